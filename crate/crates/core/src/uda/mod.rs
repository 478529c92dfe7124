//! Unique determination among all states: marginal-map kernels, impostor
//! search, the GHZ counterexample, and circuit-complexity bounds and tests.

mod complexity;
mod impostor;
mod map;

pub use complexity::{
    complexity_lower_bound, test_complexity, ComplexityAnswer, ComplexityVerdict, SearchConfig,
};
pub use impostor::{
    ghz_counterexample, impostor_search, max_marginal_deviation, ImpostorConfig, SearchStatistics,
    UdaStatus, UdaVerdict, WITNESS_MARGINAL_TOL, WITNESS_MIN_DISTANCE,
};
pub use map::{kernel_basis, KernelBasis, MarginalMap, MAX_KERNEL_QUBITS};
