use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{apply_gate, light_cone_bound, random_circuit, Gate, Geometry, GeometryKind, LayeredCircuit};
use crate::error::{Error, Result};
use crate::qcore::linalg::{hermitian_eigen, CMatrix};
use crate::qcore::{
    partial_trace_operator, reduced_state, trace_distance, HermitianOperator, PauliString, PureState,
    QubitSubset,
};
use crate::tomography::MarginalEstimateSet;

/// Depth lower bound for a state that is not determined by its `r`-local
/// marginals: the smallest `D` whose worst-case light cone exceeds `r`
/// (`ceil(log2(r+1))` general, `ceil((r+1)/2)` chain, γ₂ on the lattice).
pub fn complexity_lower_bound(r: usize, kind: GeometryKind) -> Result<usize> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    Ok((1..).find(|&d| light_cone_bound(kind, d) > r).expect("light cones grow without bound"))
}

/// Bounds for the variational search standing in for the marginal
/// consistency step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Nelder-Mead iterations per restart.
    pub max_iterations: u64,
    pub seed: u64,
    /// Initial simplex edge in gate-angle units.
    pub initial_step: f64,
    /// Circuits tried before the random restarts (each keeps its own
    /// layout and starts from its own gates).
    #[serde(skip)]
    pub seed_circuits: Vec<LayeredCircuit>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iterations: 3000,
            seed: 0,
            initial_step: 0.3,
            seed_circuits: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexityAnswer {
    /// A circuit of depth at most `D` reproduces the marginals.
    Yes,
    /// No such circuit was found.
    No,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityVerdict {
    pub answer: ComplexityAnswer,
    pub depth: usize,
    pub geometry: GeometryKind,
    /// Marginal size checked.
    pub k: usize,
    /// `eps^2 / (6n)`.
    pub threshold: f64,
    /// Smallest max-over-subsets trace distance reached.
    pub best_residual: f64,
    /// Subset attaining the best residual (lexicographically first on ties).
    pub worst_subset: Option<QubitSubset>,
    pub starts: usize,
    pub evaluations: u64,
    pub witness: Option<LayeredCircuit>,
    pub caveat: String,
}

fn generators() -> Vec<Matrix4<Complex64>> {
    (1..16)
        .map(|c| {
            let m = PauliString::from_code(c, 2).matrix();
            Matrix4::from_fn(|i, j| m[(i, j)])
        })
        .collect()
}

/// `exp(i sum_a theta_a G_a)` over the 15 non-identity two-qubit Paulis.
fn su4(theta: &[f64], gens: &[Matrix4<Complex64>]) -> Matrix4<Complex64> {
    let h = gens
        .iter()
        .zip(theta)
        .fold(Matrix4::zeros(), |acc, (g, &t)| acc + g.scale(t));
    let eig = hermitian_eigen(&CMatrix::from_fn(4, 4, |i, j| h[(i, j)]));
    Matrix4::from_fn(|i, j| {
        (0..4)
            .map(|k| eig.vectors[(i, k)] * Complex64::from_polar(1.0, eig.values[k]) * eig.vectors[(j, k)].conj())
            .sum()
    })
}

/// A fixed layout with base gates; parameters rotate each gate by an
/// `SU(4)` element.
#[derive(Clone)]
struct Ansatz<'a> {
    start: &'a LayeredCircuit,
    gens: Vec<Matrix4<Complex64>>,
    targets: &'a [(QubitSubset, HermitianOperator)],
}

impl Ansatz<'_> {
    fn n_params(&self) -> usize {
        15 * self.start.gate_count()
    }

    fn circuit(&self, p: &[f64]) -> LayeredCircuit {
        let mut chunks = p.chunks(15);
        let layers = self
            .start
            .layers
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|g| {
                        let theta = chunks.next().expect("one chunk per gate");
                        Gate::new(g.qubits[0], g.qubits[1], g.unitary * su4(theta, &self.gens))
                    })
                    .collect()
            })
            .collect();
        LayeredCircuit::with_layers(self.start.n_qubits, self.start.geometry.clone(), layers)
    }

    /// Max trace distance over the targets and the first subset attaining it.
    fn residual(&self, p: &[f64]) -> (f64, usize) {
        let c = self.circuit(p);
        let mut amps: Vec<Complex64> = PureState::zero(c.n_qubits).amplitudes().iter().copied().collect();
        for layer in &c.layers {
            for g in layer {
                apply_gate(&mut amps, c.n_qubits, g);
            }
        }
        let psi = PureState::new(amps).expect("unitary evolution keeps the norm");
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, (s, t)) in self.targets.iter().enumerate() {
            let d = trace_distance(&reduced_state(&psi, s).expect("subset in range"), t)
                .expect("matching dimensions");
            if d > best.0 {
                best = (d, i);
            }
        }
        best
    }
}

impl CostFunction for Ansatz<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.residual(p).0)
    }
}

struct Outcome {
    residual: f64,
    subset: usize,
    params: Vec<f64>,
    evaluations: u64,
}

fn optimize(ansatz: &Ansatz, threshold: f64, config: &SearchConfig) -> Outcome {
    let d = ansatz.n_params();
    let x0 = vec![0.0; d];
    let (r0, s0) = ansatz.residual(&x0);
    if d == 0 || r0 < threshold {
        return Outcome {
            residual: r0,
            subset: s0,
            params: x0,
            evaluations: 1,
        };
    }
    let mut simplex = vec![x0.clone()];
    for i in 0..d {
        let mut v = x0.clone();
        v[i] = config.initial_step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-14)
        .expect("positive tolerance");
    let run = Executor::new(ansatz.clone(), solver)
        .configure(|s| s.max_iters(config.max_iterations).target_cost(threshold * (1.0 - 1e-9)))
        .run();
    let (params, evaluations) = match run {
        Ok(res) => {
            let evals = res.state().get_func_counts().values().sum();
            (res.state().get_best_param().cloned().unwrap_or(x0), evals)
        }
        Err(_) => (x0, 0),
    };
    let (residual, subset) = ansatz.residual(&params);
    Outcome {
        residual,
        subset,
        params,
        evaluations,
    }
}

/// Marginals of `estimates` on every `k`-subset, derived from a stored
/// superset when the subset itself is absent.
fn required_targets(
    estimates: &MarginalEstimateSet,
    k: usize,
) -> Result<Vec<(QubitSubset, HermitianOperator)>> {
    let n = estimates.n_qubits;
    QubitSubset::k_subsets(n, k)
        .into_iter()
        .map(|s| {
            if let Some(op) = estimates.get(&s) {
                return Ok((s, op));
            }
            let sup = estimates
                .subsets()
                .find(|t| s.is_subset_of(t))
                .ok_or_else(|| Error::InvalidArgument(format!("estimate set incomplete: no estimate covers subset {s}")))?;
            let local: Vec<usize> = s
                .indices()
                .iter()
                .map(|q| sup.indices().binary_search(q).expect("subset of sup"))
                .collect();
            let op = estimates.get(sup).expect("listed subset");
            Ok((s, partial_trace_operator(&op, &QubitSubset::new(local, sup.len())?)?))
        })
        .collect()
}

/// Decides whether a depth-`D` circuit reproduces the estimated marginals
/// to within `eps^2/(6n)` on every `k`-subset, `k` the light-cone bound of
/// the geometry. The search is heuristic, so "no" is only as strong as the
/// search; the verdict's caveat says so.
pub fn test_complexity(
    estimates: &MarginalEstimateSet,
    depth: usize,
    geometry: &Geometry,
    epsilon: f64,
    config: &SearchConfig,
) -> Result<ComplexityVerdict> {
    let n = estimates.n_qubits;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
    }
    if config.restarts == 0 && config.seed_circuits.is_empty() {
        return Err(Error::InvalidArgument("search needs at least one start".into()));
    }
    if let Geometry::SquareLattice { coords } = geometry {
        if coords.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: coords.len(),
            });
        }
    }
    let kind = geometry.kind();
    let k = light_cone_bound(kind, depth).min(n);
    let targets = required_targets(estimates, k)?;
    let threshold = epsilon * epsilon / (6.0 * n as f64);

    let mut starts: Vec<LayeredCircuit> = Vec::new();
    for c in &config.seed_circuits {
        c.validate()?;
        if c.n_qubits != n || c.depth() > depth {
            return Err(Error::InvalidCircuit(format!(
                "seed circuit has {} qubits and depth {}, expected {n} qubits and depth <= {depth}",
                c.n_qubits,
                c.depth()
            )));
        }
        starts.push(c.clone());
    }
    starts.extend((0..config.restarts).map(|r| {
        random_circuit(n, depth, geometry.clone(), config.seed.wrapping_add(r as u64))
    }));

    let outcomes: Vec<Outcome> = starts
        .par_iter()
        .map(|c| {
            let ansatz = Ansatz {
                start: c,
                gens: generators(),
                targets: &targets,
            };
            optimize(&ansatz, threshold, config)
        })
        .collect();
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let winner = outcomes.iter().position(|o| o.residual < threshold);
    let best = winner.unwrap_or_else(|| {
        (0..outcomes.len())
            .min_by(|&a, &b| outcomes[a].residual.total_cmp(&outcomes[b].residual))
            .expect("at least one start")
    });
    let o = &outcomes[best];
    let witness = winner.map(|i| {
        Ansatz {
            start: &starts[i],
            gens: generators(),
            targets: &targets,
        }
        .circuit(&outcomes[i].params)
    });
    Ok(ComplexityVerdict {
        answer: if winner.is_some() {
            ComplexityAnswer::Yes
        } else {
            ComplexityAnswer::No
        },
        depth,
        geometry: kind,
        k,
        threshold,
        best_residual: o.residual,
        worst_subset: targets.get(o.subset).map(|t| t.0.clone()),
        starts: starts.len(),
        evaluations,
        witness,
        caveat: if winner.is_some() {
            "the witness circuit reproduces every checked marginal below the threshold".into()
        } else {
            "no is sound only up to the completeness of the bounded variational search".into()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{ghz_circuit, ghz_depth};
    use crate::qcore::linalg::CMatrix;
    use proptest::prelude::*;

    fn exact_estimates(psi: &PureState, k: usize) -> MarginalEstimateSet {
        let subsets = QubitSubset::k_subsets(psi.n_qubits(), k);
        MarginalEstimateSet::exact(psi.n_qubits(), &subsets, |s| {
            Ok(reduced_state(psi, s)?.into_operator())
        })
        .unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(complexity_lower_bound(1, GeometryKind::General).unwrap(), 1);
        for n in 2..=10 {
            for kind in [GeometryKind::General, GeometryKind::Chain, GeometryKind::SquareLattice] {
                assert_eq!(
                    complexity_lower_bound(n - 1, kind).unwrap(),
                    ghz_depth(n, kind).unwrap(),
                    "n = {n}, {kind}"
                );
            }
        }
        assert_eq!(complexity_lower_bound(7, GeometryKind::General).unwrap(), 3);
        assert_eq!(complexity_lower_bound(7, GeometryKind::Chain).unwrap(), 4);
        assert!(complexity_lower_bound(0, GeometryKind::Chain).is_err());
    }

    #[test]
    fn su4_is_unitary_and_identity_at_zero() {
        let gens = generators();
        let u = su4(&[0.0; 15], &gens);
        assert!((u - Matrix4::identity()).norm() < 1e-14);
        let theta: Vec<f64> = (0..15).map(|i| 0.1 * i as f64 - 0.4).collect();
        let u = su4(&theta, &gens);
        assert!((u * u.adjoint() - Matrix4::identity()).norm() < 1e-12);
    }

    #[test]
    fn self_witness_says_yes() {
        let c = random_circuit(5, 2, Geometry::Chain, 3);
        let est = exact_estimates(&c.output_state().unwrap(), 4);
        let config = SearchConfig {
            restarts: 0,
            seed_circuits: vec![c],
            ..SearchConfig::default()
        };
        let v = test_complexity(&est, 2, &Geometry::Chain, 0.1, &config).unwrap();
        assert_eq!(v.answer, ComplexityAnswer::Yes);
        assert!(v.best_residual <= 1e-8);
        assert!(v.witness.is_some());
    }

    #[test]
    fn ghz8_is_not_depth_one() {
        let psi = ghz_circuit(8, Geometry::General).unwrap().output_state().unwrap();
        let est = exact_estimates(&psi, 2);
        let config = SearchConfig {
            restarts: 4,
            max_iterations: 400,
            ..SearchConfig::default()
        };
        let v = test_complexity(&est, 1, &Geometry::General, 0.5, &config).unwrap();
        assert_eq!(v.answer, ComplexityAnswer::No);
        assert!(v.best_residual > v.threshold);
        assert!(v.caveat.contains("sound only up to"));
        assert!(complexity_lower_bound(7, GeometryKind::General).unwrap() > 1);
    }

    #[test]
    fn mixed_marginal_has_no_depth_zero_state() {
        let mut m = CMatrix::identity(2, 2);
        m.scale_mut(0.5);
        let est = MarginalEstimateSet::exact(1, &[QubitSubset::singleton(0)], |_| {
            HermitianOperator::new(m.clone())
        })
        .unwrap();
        let v = test_complexity(&est, 0, &Geometry::General, 0.5, &SearchConfig::default()).unwrap();
        assert_eq!(v.answer, ComplexityAnswer::No);
        assert!((v.best_residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incomplete_estimates_are_rejected() {
        let psi = PureState::ghz(4);
        let est = exact_estimates(&psi, 1);
        assert!(test_complexity(&est, 1, &Geometry::General, 0.5, &SearchConfig::default()).is_err());
    }

    proptest! {
        #[test]
        fn lower_bound_is_nondecreasing(r in 1usize..200, kind in 0usize..3) {
            let kind = [GeometryKind::General, GeometryKind::Chain, GeometryKind::SquareLattice][kind];
            prop_assert!(complexity_lower_bound(r, kind).unwrap() <= complexity_lower_bound(r + 1, kind).unwrap());
        }
    }
}
