//! Parent Hamiltonians of shallow circuits, exact ground-state analysis and
//! the robust marginal fingerprint of gapped ground states.

mod fingerprint;
mod ground;
mod hamiltonian;
mod parent;

pub use fingerprint::{fingerprint_check, FingerprintVerifier, Verdict};
pub use ground::{ground_analysis, GroundAnalysis, DEGENERACY_TOL};
pub use hamiltonian::{assemble, LocalHamiltonian, Term, MAX_DENSE_QUBITS};
pub use parent::{light_cone_classes, merged_initial_hamiltonian, parent_hamiltonian, LightConeClass};
