//! Linear-inversion tomography from Pauli-basis measurements: full-state
//! estimation, overlapping marginal tomography and shot-budget planning.

mod accumulate;
mod budget;
mod estimate;
mod overlap;

pub use accumulate::{accumulate, PauliAccumulator, MAX_FULL_QUBITS};
pub use budget::{plan_budget, BudgetRequest, SampleBudget, Scenario};
pub use estimate::{estimate_expectations, estimate_state, project_psd, project_rank_r, PauliEstimate};
pub use overlap::{
    overlapping_tomography, MarginalEstimateSet, OverlapDiagnostics, MAX_MARGINAL_QUBITS,
};
