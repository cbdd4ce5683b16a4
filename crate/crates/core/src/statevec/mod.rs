//! Gate-level statevector simulation of the amplification circuit.
//!
//! Data registers are prepared by writing amplitudes directly, the model runs as its
//! compiled reversible gate list, and the diffusion step reflects about a stored
//! copy of |Ψ0⟩. Used as the reference the closed-form evolution is checked against.

mod grover;
mod state;

pub use grover::{apply_diffusion, apply_oracle, grover_run, prepare_initial, CopyLayout, Layout};
pub use state::{measure_register, QuantumState, DEFAULT_QUBIT_CAP};
