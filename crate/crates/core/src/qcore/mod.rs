//! Exact dense linear algebra for small qubit registers.

pub mod channel;
pub mod density;
pub mod eigen;
pub mod gates;
pub mod matrix;
pub mod measure;
pub mod pauli;
pub mod povm;
pub mod random;
pub mod state;

pub use channel::{apply_channel, Channel, ChannelSpec};
pub use density::{trace_norm, DensityMatrix};
pub use eigen::{eig_hermitian, HermitianEigen};
pub use gates::Gate;
pub use matrix::{CMatrix, C64};
pub use measure::{enumerate_outcomes, measure_single_qubit, project_outcome, Basis};
pub use pauli::{Pauli, PauliString, Phase};
pub use povm::Povm;
pub use state::StateVector;

/// Largest register the dense simulator accepts.
pub const DENSE_QUBIT_LIMIT: usize = 14;

/// Kronecker product of two states, `b` on the low qubits.
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    a.tensor(b)
}
