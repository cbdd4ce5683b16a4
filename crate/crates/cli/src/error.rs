use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] quark_core::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 for bad configuration, 3 for a degenerate angle, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use quark_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::DegenerateAngle(_)) => 3,
            CliError::Core(
                E::InvalidArgument(_)
                | E::WidthMismatch { .. }
                | E::QubitCap { .. }
                | E::UnsupportedGate(_)
                | E::CircuitSyntax { .. }
                | E::Idx(_),
            ) => 2,
            CliError::Core(_) | CliError::Output { .. } => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        use quark_core::Error as E;
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(E::DegenerateAngle("θ = π/2".into())).exit_code(), 3);
        assert_eq!(CliError::Core(E::QubitCap { needed: 30, cap: 26 }).exit_code(), 2);
        assert_eq!(CliError::Core(E::Io(std::io::Error::other("disk"))).exit_code(), 1);
    }
}
