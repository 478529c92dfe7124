//! Dense linear-algebra substrate: states, operators, Pauli algebra,
//! partial trace and distances.

pub mod linalg;
pub mod ops;
pub mod pauli;
pub mod state;
pub mod subset;

pub use linalg::{CMatrix, SPECTRAL_TOL, STRUCTURAL_TOL};
pub use ops::{
    embed_operator, fidelity_pure, frobenius_distance, partial_trace, partial_trace_operator, pauli_expectation,
    pauli_matrix, reduced_state, trace_distance,
};
pub use pauli::{Pauli, PauliString};
pub use state::{DensityMatrix, HermitianOperator, PureState};
pub use subset::{binomial, QubitSubset};
