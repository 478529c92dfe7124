//! End-to-end acceptance checks. Each test prints one PASS/FAIL line; run
//! with `--nocapture` to see them:
//!
//!     cargo test -p shallowscope --test acceptance -- --nocapture

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shallowscope::circuit::{gamma2, gamma2_upper_bound, ghz_circuit, ghz_depth, light_cone_bound, random_circuit};
use shallowscope::parenth::{ground_analysis, parent_hamiltonian, FingerprintVerifier, Verdict};
use shallowscope::qcore::ops::{frobenius_distance, reduced_state, trace_distance};
use shallowscope::sampler::{
    empirical_distribution, execute, exhaustive_schedule, outcome_distribution, random_schedule,
    restrict_record, sample, BasisString,
};
use shallowscope::tomography::{
    accumulate, estimate_expectations, estimate_state, overlapping_tomography, plan_budget,
    project_rank_r, BudgetRequest, MarginalEstimateSet, PauliEstimate, Scenario,
};
use shallowscope::uda::{
    complexity_lower_bound, ghz_counterexample, max_marginal_deviation, test_complexity,
    ComplexityAnswer, MarginalMap, SearchConfig,
};
use shallowscope::{DensityMatrix, Geometry, GeometryKind, LayeredCircuit, PureState, QubitSubset};

fn report(id: u32, name: &str, pass: bool, detail: &str) -> bool {
    println!("[{}] criterion {id:>2}: {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn c01_full_tomography_error_bound() {
    let (n, eps, delta) = (3, 0.2, 0.1);
    let budget = plan_budget(&BudgetRequest::new(Scenario::Full, n, eps, delta)).unwrap();
    let m = budget.exhaustive_repetitions();
    let schedule = exhaustive_schedule(n, m).unwrap();
    let mut g = rng(101);
    let fixtures = [
        ("random pure", PureState::random(n, &mut g).density_matrix()),
        ("random rank-2", DensityMatrix::random(n, 2, &mut g)),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (label, rho) in &fixtures {
        let mut failures = 0;
        let mut worst: f64 = 0.0;
        for seed in 0..200 {
            let store = execute(rho, &schedule, seed).unwrap();
            let sigma = estimate_state(&accumulate(&store).unwrap()).unwrap();
            let d = trace_distance(rho, &sigma).unwrap();
            worst = worst.max(d);
            failures += usize::from(d > eps);
        }
        let fraction = failures as f64 / 200.0;
        pass &= fraction <= delta;
        details.push(format!("{label}: failure fraction {fraction} (max distance {worst:.4})"));
    }
    let detail = format!("{} shots, m = {m}; {}", budget.shots, details.join("; "));
    assert!(report(1, "full tomography error bound", pass, &detail));
}

#[test]
fn c02_estimator_is_unbiased() {
    let psi = PureState::ghz(2);
    let exact = PauliEstimate::from_operator(psi.density_matrix().as_operator());
    let schedule = exhaustive_schedule(2, 50).unwrap();
    let runs = 2000;
    let mut sum = [0.0; 16];
    let mut sum_sq = [0.0; 16];
    for seed in 0..runs {
        let store = execute(&psi, &schedule, seed).unwrap();
        let est = estimate_expectations(&accumulate(&store).unwrap()).unwrap();
        for (code, &v) in est.expectations().iter().enumerate() {
            sum[code] += v;
            sum_sq[code] += v * v;
        }
    }
    let r = runs as f64;
    let mut worst_z: f64 = 0.0;
    let mut pass = true;
    for code in 0..16 {
        let mean = sum[code] / r;
        let var = (sum_sq[code] / r - mean * mean).max(0.0) * r / (r - 1.0);
        let se = (var / r).sqrt();
        let err = (mean - exact.expectations()[code]).abs();
        if se > 0.0 {
            worst_z = worst_z.max(err / se);
            pass &= err <= 5.0 * se;
        } else {
            // deterministic coefficient
            pass &= err <= 1e-12;
        }
    }
    let detail = format!("{runs} runs at m = 50; largest deviation {worst_z:.2} standard errors");
    assert!(report(2, "estimator unbiasedness", pass, &detail));
}

#[test]
fn c03_rank_r_refinement() {
    let mut g = rng(303);
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for trial in 0..100u64 {
        let n = 2 + (trial % 2) as usize;
        let rho = PureState::random(n, &mut g).density_matrix();
        let m = [2, 5, 20, 100][(trial % 4) as usize];
        let store = execute(&rho, &exhaustive_schedule(n, m).unwrap(), trial).unwrap();
        let sigma = estimate_state(&accumulate(&store).unwrap()).unwrap();
        let refined = project_rank_r(&sigma, 1).unwrap();
        let before = frobenius_distance(&rho, &sigma).unwrap();
        let after = frobenius_distance(&rho, &refined).unwrap();
        worst_ratio = worst_ratio.max(after / before);
        violations += usize::from(after > 2.0 * before + 1e-12);
    }
    let detail = format!("{violations} violations in 100 trials; max ratio {worst_ratio:.4}");
    assert!(report(3, "rank-r refinement", violations == 0, &detail));
}

#[test]
fn c04_overlapping_tomography() {
    let (n, k, eps, delta) = (8, 2, 0.25, 0.2);
    let psi = PureState::ghz(n);
    let budget = plan_budget(&BudgetRequest::new(Scenario::Overlap, n, eps, delta).with_k(k)).unwrap();
    let subsets = QubitSubset::k_subsets(n, k);
    let exact: Vec<DensityMatrix> = subsets.iter().map(|s| reduced_state(&psi, s).unwrap()).collect();
    let seeds = 50;
    let mut good = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..seeds {
        let schedule = random_schedule(n, budget.shots, seed).unwrap();
        let store = execute(&psi, &schedule, seed).unwrap();
        let est = overlapping_tomography(store.records(), n, k, None).unwrap();
        let mut all = true;
        for (s, rho) in subsets.iter().zip(&exact) {
            let d = trace_distance(rho, &est.get(s).unwrap()).unwrap();
            worst = worst.max(d);
            all &= d <= eps;
        }
        good += usize::from(all);
    }
    let fraction = good as f64 / seeds as f64;
    let detail = format!(
        "{} repetitions; {good}/{seeds} runs with all 28 marginals within eps (max distance {worst:.4})",
        budget.shots
    );
    assert!(report(4, "overlapping tomography", fraction >= 1.0 - delta, &detail));
}

#[test]
fn c05_gamma2_sequence() {
    let expected = [2, 4, 8, 16, 30];
    let values: Vec<usize> = (1..=5).map(|d| gamma2(d).unwrap()).collect();
    let bounded = (1..=5).all(|d| values[d - 1] <= (d + 1) * (d + 1) + d * d && values[d - 1] <= gamma2_upper_bound(d));
    let pass = values == expected && bounded;
    let detail = format!("computed {values:?}, expected {expected:?}, bound respected: {bounded}");
    assert!(report(5, "gamma2 sequence", pass, &detail));
}

fn square_shape(n: usize) -> (usize, usize) {
    match n {
        4 => (2, 2),
        6 => (2, 3),
        8 => (2, 4),
        _ => (1, n),
    }
}

#[test]
fn c06_parent_hamiltonian_certification() {
    let mut failures = Vec::new();
    let mut worst_energy: f64 = 0.0;
    let mut worst_gap: f64 = f64::INFINITY;
    let mut worst_fidelity: f64 = 1.0;
    let mut worst_defect: f64 = 0.0;
    for kind in [GeometryKind::General, GeometryKind::Chain, GeometryKind::SquareLattice] {
        for i in 0..100u64 {
            let n = 2 + (i % 7) as usize;
            let depth = 1 + ((i / 7) % 3) as usize;
            let geometry = match kind {
                GeometryKind::General => Geometry::General,
                GeometryKind::Chain => Geometry::Chain,
                GeometryKind::SquareLattice => {
                    let (r, c) = square_shape(n);
                    Geometry::grid(r, c)
                }
            };
            let circuit = random_circuit(n, depth, geometry, 1000 + i);
            let psi = circuit.output_state().unwrap();
            let h = parent_hamiltonian(&circuit).unwrap();
            let ga = ground_analysis(&h).unwrap();
            let fidelity = ga.ground.as_ref().map_or(0.0, |g| g.overlap(&psi));
            let defect = h.projector_defect();
            worst_energy = worst_energy.max(ga.lambda0.abs());
            worst_gap = worst_gap.min(ga.gap);
            worst_fidelity = worst_fidelity.min(fidelity);
            worst_defect = worst_defect.max(defect);
            let ok = ga.lambda0.abs() <= 1e-9
                && ga.unique
                && ga.gap >= 1.0 - 1e-8
                && fidelity >= 1.0 - 1e-9
                && defect <= 1e-9
                && h.locality() <= light_cone_bound(kind, circuit.depth());
            if !ok {
                failures.push(format!("{kind} n={n} D={depth} seed={}", 1000 + i));
            }
        }
    }
    let detail = format!(
        "300 circuits; max |E0| {worst_energy:.1e}, min gap {worst_gap:.12}, min fidelity {worst_fidelity:.12}, max defect {worst_defect:.1e}; failures {failures:?}"
    );
    assert!(report(6, "parent Hamiltonian certification", failures.is_empty(), &detail));
}

/// `psi` pushed towards a random pure state by a random amount.
fn perturbed(psi: &PureState, g: &mut ChaCha8Rng) -> DensityMatrix {
    let other = PureState::random(psi.n_qubits(), g);
    let s: f64 = g.random::<f64>().powi(2);
    let amps: Vec<Complex64> = psi
        .amplitudes()
        .iter()
        .zip(other.amplitudes().iter())
        .map(|(a, b)| a * (1.0 - s) + b * s)
        .collect();
    PureState::normalized(amps).unwrap().density_matrix()
}

#[test]
fn c07_robust_fingerprint() {
    let mut parents: Vec<LayeredCircuit> = vec![ghz_circuit(4, Geometry::General).unwrap()];
    for seed in 0..9 {
        let geometry = if seed % 2 == 0 { Geometry::Chain } else { Geometry::General };
        parents.push(random_circuit(4, 1 + (seed % 2) as usize, geometry, 700 + seed));
    }
    let epsilons = [0.1, 0.5, 1.0];
    let mut g = rng(707);
    let (mut trials, mut close, mut witnessed, mut violations) = (0, 0, 0, 0);
    for circuit in &parents {
        let psi = circuit.output_state().unwrap();
        let h = parent_hamiltonian(circuit).unwrap();
        let verifier = FingerprintVerifier::new(&h, &psi).unwrap();
        let pure = psi.density_matrix();
        for t in 0..1002 {
            let rho = match t % 3 {
                0 => perturbed(&psi, &mut g),
                1 => {
                    let noise = DensityMatrix::random(4, 1 + g.random_range(0..16), &mut g);
                    pure.mix(&noise, g.random::<f64>().powi(3)).unwrap()
                }
                _ => DensityMatrix::random(4, 1 + g.random_range(0..16), &mut g),
            };
            let eps = epsilons[(t / 3) % 3];
            match verifier.check(&rho, eps).unwrap() {
                Verdict::Close { .. } => close += 1,
                Verdict::Witnessed { .. } => witnessed += 1,
                Verdict::BoundViolation { .. } => violations += 1,
            }
            trials += 1;
        }
    }
    let detail = format!("{trials} trials: {close} close, {witnessed} witnessed, {violations} bound violations");
    assert!(report(7, "robust fingerprint", trials >= 10_000 && violations == 0, &detail));
}

#[test]
fn c08_ghz_counterexample_and_tight_bounds() {
    let mut worst: f64 = 0.0;
    for n in 2..=10 {
        let (psi, rho) = ghz_counterexample(n).unwrap();
        let map = MarginalMap::all_k_subsets(n, n - 1).unwrap();
        let dev = max_marginal_deviation(&map, &psi.density_matrix(), &rho).unwrap();
        assert!(trace_distance(&psi.density_matrix(), &rho).unwrap() > 0.5);
        worst = worst.max(dev);
    }
    let mut mismatches = Vec::new();
    for n in 2..=10usize {
        let log = (usize::BITS - (n - 1).leading_zeros()) as usize;
        for (geometry, formula) in [(Geometry::General, log), (Geometry::Chain, n.div_ceil(2))] {
            let kind = geometry.kind();
            let circuit = ghz_circuit(n, geometry).unwrap();
            let bound = complexity_lower_bound(n - 1, kind).unwrap();
            if bound != circuit.depth() || bound != formula || ghz_depth(n, kind).unwrap() != formula {
                mismatches.push(format!("{kind} n={n}: bound {bound}, circuit {}", circuit.depth()));
            }
        }
    }
    let pass = worst <= 1e-12 && mismatches.is_empty();
    let detail = format!("max marginal deviation {worst:.1e} for n = 2..10; bound mismatches {mismatches:?}");
    assert!(report(8, "GHZ non-UDA and tight bounds", pass, &detail));
}

fn exact_estimates(psi: &PureState, k: usize) -> MarginalEstimateSet {
    let subsets = QubitSubset::k_subsets(psi.n_qubits(), k);
    MarginalEstimateSet::exact(psi.n_qubits(), &subsets, |s| Ok(reduced_state(psi, s)?.into_operator())).unwrap()
}

#[test]
fn c09_complexity_test_fixtures() {
    let c = random_circuit(5, 2, Geometry::Chain, 3);
    let est = exact_estimates(&c.output_state().unwrap(), 4);
    let config = SearchConfig {
        restarts: 0,
        seed_circuits: vec![c],
        ..SearchConfig::default()
    };
    let yes = test_complexity(&est, 2, &Geometry::Chain, 0.1, &config).unwrap();

    let ghz = PureState::ghz(8);
    let no = test_complexity(&exact_estimates(&ghz, 2), 1, &Geometry::General, 0.5, &SearchConfig::default()).unwrap();
    let json = serde_json::to_value(&no).unwrap();
    let caveat = json["caveat"].as_str().is_some_and(|s| !s.is_empty());

    let pass = yes.answer == ComplexityAnswer::Yes
        && yes.best_residual <= 1e-8
        && no.answer == ComplexityAnswer::No
        && caveat;
    let detail = format!(
        "self-witness {:?} (residual {:.1e}); GHZ8 at D=1 {:?} (residual {:.3}, threshold {:.4}); caveat present: {caveat}",
        yes.answer, yes.best_residual, no.answer, no.best_residual, no.threshold
    );
    assert!(report(9, "complexity-test fixtures", pass, &detail));
}

fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[test]
fn c10_sampler_statistics() {
    let mut g = rng(1010);
    let product = (0..3).fold(PureState::random(1, &mut g), |acc, _| acc.tensor(&PureState::random(1, &mut g)));
    let fixtures = [("GHZ4", PureState::ghz(4)), ("product", product)];
    let pair = QubitSubset::new(vec![1, 3], 4).unwrap();
    let mut worst: f64 = 0.0;
    for (i, (_, psi)) in fixtures.iter().enumerate() {
        for (j, basis) in ["ZZZZ", "XXXX", "XYZY", "YZXX"].iter().enumerate() {
            let basis: BasisString = basis.parse().unwrap();
            let records = sample(psi, &basis, 100_000, (10 * i + j) as u64).unwrap();
            let outcomes: Vec<u64> = records.iter().map(|r| r.outcome).collect();
            let tv = total_variation(
                &empirical_distribution(&outcomes, 16).unwrap(),
                &outcome_distribution(psi, &basis).unwrap(),
            );
            // marginal consistency on a qubit pair
            let (sub_basis, _) = restrict_record(&records[0], &pair).unwrap();
            let sub: Vec<u64> = records.iter().map(|r| restrict_record(r, &pair).unwrap().1).collect();
            let marginal = outcome_distribution(&reduced_state(psi, &pair).unwrap(), &sub_basis).unwrap();
            let tv_pair = total_variation(&empirical_distribution(&sub, 4).unwrap(), &marginal);
            worst = worst.max(tv).max(tv_pair);
        }
    }
    let detail = format!("10^5 shots per basis; max total variation {worst:.4}");
    assert!(report(10, "sampler statistics", worst <= 0.02, &detail));
}

#[test]
fn budget_sweep() {
    let (eps, delta) = (0.2, 0.1);
    println!("budget sweep, full tomography, eps = {eps}, delta = {delta}");
    println!("{:>2} {:>22} {:>10} {:>10}", "n", "closed form", "shots", "per basis");
    let mut previous = 0;
    let mut pass = true;
    for n in 1..=4 {
        let b = plan_budget(&BudgetRequest::new(Scenario::Full, n, eps, delta)).unwrap();
        let closed = (3.0 + 2.0 * 2f64.sqrt()) * 10f64.powi(n as i32) * (1.0 / delta).ln() / (eps * eps);
        println!("{n:>2} {closed:>22.6} {:>10} {:>10}", b.shots, b.exhaustive_repetitions());
        pass &= b.shots == closed.ceil() as u64 && (b.exact - closed).abs() <= 1e-12 * closed && b.shots > previous;
        previous = b.shots;
    }
    println!("[{}] budget sweep: shots equal the rounded-up closed form and grow with n", if pass { "PASS" } else { "FAIL" });
    assert!(pass);
}
