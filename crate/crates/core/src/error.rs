use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("width mismatch for {what}: expected {expected} bits, got {got}")]
    WidthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate Grover angle: {0}")]
    DegenerateAngle(String),
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error("malformed circuit description at line {line}: {msg}")]
    CircuitSyntax { line: usize, msg: String },
    #[error("IDX parse error: {0}")]
    Idx(String),
    #[error("instance needs {needed} qubits, cap is {cap}")]
    QubitCap { needed: usize, cap: usize },
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
