use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::binomial;

/// Which closed-form shot count to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Exhaustive Pauli tomography of the whole register.
    Full,
    /// Exhaustive tomography followed by rank-`r` truncation.
    FullRankR,
    /// Algorithm 1: all `k`-qubit marginals from random bases.
    Overlap,
    /// Unique ground state, interaction graph unknown.
    GroundUnknownGraph,
    /// Unique ground state, number of terms `m` known.
    GroundKnownM,
    /// Unique ground state, interaction graph known.
    GroundKnownGraph,
    /// Shallow-circuit output state, circuit structure unknown.
    CircuitUnknownStructure,
    /// Shallow-circuit output state, circuit structure known.
    CircuitKnownStructure,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Full,
        Scenario::FullRankR,
        Scenario::Overlap,
        Scenario::GroundUnknownGraph,
        Scenario::GroundKnownM,
        Scenario::GroundKnownGraph,
        Scenario::CircuitUnknownStructure,
        Scenario::CircuitKnownStructure,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scenario::Full => "full",
            Scenario::FullRankR => "full-rank-r",
            Scenario::Overlap => "overlap",
            Scenario::GroundUnknownGraph => "ground-unknown-graph",
            Scenario::GroundKnownM => "ground-known-m",
            Scenario::GroundKnownGraph => "ground-known-graph",
            Scenario::CircuitUnknownStructure => "circuit-unknown-structure",
            Scenario::CircuitKnownStructure => "circuit-known-structure",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.label() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.label()).collect();
                Error::Parse(format!("unknown scenario {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// Inputs to [`plan_budget`]. Fields not used by a scenario are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetRequest {
    pub scenario: Scenario,
    pub n: usize,
    pub k: Option<usize>,
    /// Number of local terms `m` of the Hamiltonian.
    pub m_terms: Option<usize>,
    /// Spectral gap above the ground state.
    pub gap: Option<f64>,
    pub epsilon: f64,
    pub delta: f64,
    pub rank: Option<usize>,
}

impl BudgetRequest {
    pub fn new(scenario: Scenario, n: usize, epsilon: f64, delta: f64) -> Self {
        Self {
            scenario,
            n,
            k: None,
            m_terms: None,
            gap: None,
            epsilon,
            delta,
            rank: None,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_terms(mut self, m: usize) -> Self {
        self.m_terms = Some(m);
        self
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = Some(gap);
        self
    }

    pub fn with_rank(mut self, r: usize) -> Self {
        self.rank = Some(r);
        self
    }
}

/// A planned shot count with the inputs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBudget {
    #[serde(flatten)]
    pub request: BudgetRequest,
    /// Marginal accuracy required by the ground-state or circuit reduction.
    pub marginal_epsilon: Option<f64>,
    /// Number of marginals the union bound runs over.
    pub union_size: Option<u64>,
    /// Unrounded value of the formula.
    pub exact: f64,
    pub shots: u64,
}

impl SampleBudget {
    /// Per-basis repetition count `ceil(shots / 3^n)` for an exhaustive run.
    pub fn exhaustive_repetitions(&self) -> u64 {
        self.shots.div_ceil(3u64.pow(self.request.n as u32))
    }
}

fn need<T: Copy>(value: Option<T>, name: &str, scenario: Scenario) -> Result<T> {
    value.ok_or_else(|| Error::InvalidArgument(format!("scenario {scenario} needs {name}")))
}

/// Algorithm 1 repetition count `32 10^k ln(2M/δ) / ε²`.
fn overlap_count(k: usize, union: f64, epsilon: f64, delta: f64) -> f64 {
    32.0 * 10f64.powi(k as i32) * (2.0 * union / delta).ln() / (epsilon * epsilon)
}

/// Evaluates the closed-form shot count for a scenario (natural log,
/// ceiling applied last).
pub fn plan_budget(req: &BudgetRequest) -> Result<SampleBudget> {
    let (n, eps, delta) = (req.n, req.epsilon, req.delta);
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {eps} outside (0, 2]")));
    }
    if !(delta > 0.0 && delta < 1.0 / 3.0) {
        return Err(Error::InvalidArgument(format!(
            "delta = {delta} outside (0, 1/3); the budget analysis only covers delta < 1/3"
        )));
    }
    let sc = req.scenario;
    let k_checked = || -> Result<usize> {
        let k = need(req.k, "k", sc)?;
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!("k = {k} outside 1..={n}")));
        }
        Ok(k)
    };
    let c = 3.0 + 2.0 * 2f64.sqrt();
    let inv = (1.0 / delta).ln() / (eps * eps);
    let (exact, marginal_epsilon, union_size) = match sc {
        Scenario::Full => (c * 10f64.powi(n as i32) * inv, None, None),
        Scenario::FullRankR => {
            let r = need(req.rank, "rank", sc)?;
            if r == 0 || r > 1usize << n.min(63) {
                return Err(Error::InvalidArgument(format!("rank {r} outside 1..=2^{n}")));
            }
            (8.0 * c * 5f64.powi(n as i32) * r as f64 * inv, None, None)
        }
        Scenario::Overlap => {
            let k = k_checked()?;
            let union = binomial(n, k);
            (overlap_count(k, union as f64, eps, delta), None, Some(union))
        }
        Scenario::GroundUnknownGraph | Scenario::GroundKnownM | Scenario::GroundKnownGraph => {
            let k = k_checked()?;
            let subsets = binomial(n, k);
            // without the graph, every k-subset may host a term
            let m = match sc {
                Scenario::GroundUnknownGraph => req.m_terms.unwrap_or(subsets as usize),
                _ => need(req.m_terms, "m_terms", sc)?,
            };
            let gap = need(req.gap, "gap", sc)?;
            if m == 0 || !(gap > 0.0) {
                return Err(Error::InvalidArgument("m_terms and gap must be positive".into()));
            }
            let (m, union) = match sc {
                Scenario::GroundUnknownGraph => (subsets as usize, subsets),
                Scenario::GroundKnownM => (m, subsets),
                _ => (m, m as u64),
            };
            let em = gap * eps * eps / (4.0 * m as f64);
            (overlap_count(k, union as f64, em, delta), Some(em), Some(union))
        }
        Scenario::CircuitUnknownStructure | Scenario::CircuitKnownStructure => {
            let k = k_checked()?;
            // one term per qubit, gap 1
            let em = eps * eps / (4.0 * n as f64);
            let union = match sc {
                Scenario::CircuitUnknownStructure => binomial(n, k),
                _ => n as u64,
            };
            (overlap_count(k, union as f64, em, delta), Some(em), Some(union))
        }
    };
    if !exact.is_finite() || exact > u64::MAX as f64 {
        return Err(Error::InvalidArgument(format!("budget {exact:e} overflows")));
    }
    Ok(SampleBudget {
        request: req.clone(),
        marginal_epsilon,
        union_size,
        exact,
        shots: exact.ceil() as u64,
    })
}
