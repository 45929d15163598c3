//! Classical oracles: dense statevector, stabilizer tableau, single-particle
//! transfer matrices and Gaussian states, plus exact many-body primitives.

pub mod fock;
pub mod hamiltonian;
pub mod modes;
pub mod statevector;
pub mod tableau;

pub use hamiltonian::{hamiltonian_mode_matrix, ModeHamiltonian};
pub use modes::{
    dense_transfer_matrix, dft_matrix, evolve_gaussian, extract_mode_transform, max_abs, GaussianState, ModeTransform,
};
pub use statevector::{equal_up_to_phase, phase_distance, StateVector, MAX_QUBITS};
pub use tableau::{is_clifford, StabilizerTableau};
