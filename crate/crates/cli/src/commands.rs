//! One function per subcommand. Each returns a JSON payload and, where the
//! result is scalar, a table.
//!
//! Seeds: a run has one stochastic stage, which receives the top-level seed
//! unchanged. The sampler splits it into independent ChaCha streams for
//! outcomes and for the random basis schedule.

use serde::Serialize;
use serde_json::{json, Value};
use shallowscope::circuit::{
    ghz_circuit, ghz_depth, gamma2, gamma2_diagnostic, gamma2_upper_bound, light_cone_bound,
    random_circuit_with, square_lattice_ghz_embedding, GateDistribution,
};
use shallowscope::parenth::{ground_analysis, parent_hamiltonian, FingerprintVerifier, LocalHamiltonian, Verdict};
use shallowscope::qcore::{trace_distance, HermitianOperator, PauliString};
use shallowscope::sampler::{execute, exhaustive_schedule, random_schedule, ShotStore};
use shallowscope::tomography::{
    accumulate, estimate_expectations, overlapping_tomography, plan_budget, project_psd, project_rank_r,
    BudgetRequest, MarginalEstimateSet, SampleBudget, Scenario,
};
use shallowscope::uda::{
    complexity_lower_bound, impostor_search, test_complexity, ImpostorConfig, MarginalMap, SearchConfig,
};
use shallowscope::{DensityMatrix, Geometry, GeometryKind, PureState, QubitSubset};

use crate::error::{CliError, Context};
use crate::files::{self, DensityFile, StateFile};
use crate::table::{Cell, Table};
use crate::{Command, ExperimentConfig, Gates, Outcome, ScheduleKind};

pub fn dispatch(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let seed = config.seed;
    match &config.command {
        Command::Simulate(a) => simulate(a, seed),
        Command::Sample(a) => sample(a, seed),
        Command::TomoFull(a) => tomo_full(a),
        Command::TomoOverlap(a) => tomo_overlap(a),
        Command::Budget(a) => budget(a),
        Command::Parent(a) => parent(a),
        Command::Gap(a) => gap(a),
        Command::Fingerprint(a) => fingerprint(a),
        Command::Gamma2(a) => gamma2_cmd(a),
        Command::Ghz(a) => ghz(a),
        Command::Lowerbound(a) => lowerbound(a),
        Command::UdaProbe(a) => uda_probe(a, seed),
        Command::ComplexityTest(a) => complexity(a, seed),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload serializes")
}

fn json_text(text: String) -> Value {
    serde_json::from_str(&text).expect("library JSON parses")
}

fn opt<T: Into<Cell>>(v: Option<T>) -> Cell {
    v.map_or(Cell::Text(String::new()), Into::into)
}

pub fn check_epsilon(epsilon: f64) -> Result<(), CliError> {
    if !(epsilon > 0.0 && epsilon <= 2.0) {
        return Err(CliError::config("epsilon", format!("{epsilon} is outside (0, 2]")));
    }
    Ok(())
}

/// Budget-bearing commands only accept δ < 1/3.
pub fn check_delta(delta: f64) -> Result<(), CliError> {
    if !(delta > 0.0 && delta < 1.0 / 3.0) {
        return Err(CliError::config(
            "delta",
            format!("{delta} is outside (0, 1/3); the tomography sample bounds are only stated for delta < 1/3"),
        ));
    }
    Ok(())
}

fn parse_grid(grid: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::config("grid", format!("{grid:?} is not of the form RxC"));
    let (r, c) = grid.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

fn geometry(kind: GeometryKind, grid: Option<&str>, n: usize) -> Result<Geometry, CliError> {
    Ok(match kind {
        GeometryKind::General => Geometry::General,
        GeometryKind::Chain => Geometry::Chain,
        GeometryKind::SquareLattice => {
            let grid = grid.ok_or_else(|| CliError::config("grid", "square-lattice geometry needs --grid RxC"))?;
            let (r, c) = parse_grid(grid)?;
            if r * c != n {
                return Err(CliError::config("grid", format!("{r}x{c} has {} sites for {n} qubits", r * c)));
            }
            Geometry::grid(r, c)
        }
    })
}

fn simulate(a: &crate::SimulateArgs, seed: u64) -> Result<Outcome, CliError> {
    let (circuit, generated) = match (&a.circuit, a.n, a.depth) {
        (Some(path), _, _) => (files::load_circuit(path)?, false),
        (None, Some(n), Some(depth)) => {
            if n == 0 {
                return Err(CliError::config("n", "must be at least 1"));
            }
            let g = geometry(a.geometry, a.grid.as_deref(), n)?;
            let dist = match a.gates {
                Gates::Haar => GateDistribution::Haar,
                Gates::Fixed => GateDistribution::FixedSet,
            };
            (random_circuit_with(n, depth, g, dist, seed), true)
        }
        _ => return Err(CliError::config("circuit", "give --circuit or both --n and --depth")),
    };
    let psi = circuit.output_state().context(|| "simulating the circuit".into())?;
    let mut payload = json!({
        "n": circuit.n_qubits,
        "depth": circuit.depth(),
        "gates": circuit.gate_count(),
        "state": StateFile::from(&psi),
    });
    if generated {
        payload["circuit"] = to_value(&circuit);
    }
    Ok(Outcome { payload, table: None })
}

fn sample(a: &crate::SampleArgs, seed: u64) -> Result<Outcome, CliError> {
    let psi = match (&a.state, &a.circuit) {
        (Some(p), _) => files::load_state(p)?,
        (None, Some(p)) => files::load_circuit(p)?
            .output_state()
            .context(|| "simulating the circuit".into())?,
        (None, None) => return Err(CliError::config("state", "give --state or --circuit")),
    };
    if a.shots == 0 {
        return Err(CliError::config("shots", "must be at least 1"));
    }
    let n = psi.n_qubits();
    let schedule = match a.schedule {
        ScheduleKind::Exhaustive => {
            let m = a.shots.div_ceil(3u64.pow(n as u32));
            exhaustive_schedule(n, m)
        }
        ScheduleKind::Random => random_schedule(n, a.shots, seed),
    }
    .context(|| "building the schedule".into())?;
    let store = execute(&psi, &schedule, seed).context(|| "sampling".into())?;
    store.save(&a.out_shots).map_err(|e| CliError::Output {
        path: a.out_shots.clone(),
        source: std::io::Error::other(e.to_string()),
    })?;
    Ok(Outcome {
        payload: json!({
            "n": n,
            "shots": store.len(),
            "schedule": to_value(store.schedule()),
            "shot_file": a.out_shots,
        }),
        table: None,
    })
}

fn load_store(path: &std::path::Path) -> Result<ShotStore, CliError> {
    ShotStore::load(path).map_err(|e| CliError::input(path, e))
}

fn pauli_map(n: usize, values: &[f64]) -> serde_json::Map<String, Value> {
    values
        .iter()
        .enumerate()
        .map(|(c, &v)| (PauliString::from_code(c, n).to_string(), json!(v)))
        .collect()
}

fn tomo_full(a: &crate::TomoFullArgs) -> Result<Outcome, CliError> {
    let store = load_store(&a.shots_file)?;
    let n = store.n_qubits();
    let acc = accumulate(&store).context(|| "accumulating shots".into())?;
    let est = estimate_expectations(&acc).context(|| "estimating expectations".into())?;
    let sigma = est.operator();
    let projected = project_psd(&sigma);
    let mut payload = json!({
        "n": n,
        "records": store.len(),
        "expectations": pauli_map(n, est.expectations()),
        "min_eigenvalue": sigma.min_eigenvalue(),
        "density": DensityFile::from(&projected),
    });
    if a.matrix {
        payload["matrix"] = to_value(&shallowscope::qcore::linalg::matrix_to_rows(sigma.matrix()));
    }
    let truncated = match a.rank {
        Some(r) => {
            let t = project_rank_r(&sigma, r).context(|| format!("rank-{r} truncation"))?;
            payload["rank_r"] = json!({
                "rank": r,
                "matrix": shallowscope::qcore::linalg::matrix_to_rows(t.matrix()),
            });
            Some(t)
        }
        None => None,
    };
    if let (Some(eps), Some(delta)) = (a.epsilon, a.delta) {
        check_epsilon(eps)?;
        check_delta(delta)?;
        let req = BudgetRequest::new(Scenario::Full, n, eps, delta);
        let b = plan_budget(&req).context(|| "planning the budget".into())?;
        payload["budget"] = to_value(&b);
        payload["meets_budget"] = json!(store.len() as u64 >= b.shots);
    }
    if let Some(path) = &a.reference {
        let rho = files::load_density(path)?;
        let d = |op: &HermitianOperator| trace_distance(&rho, op).context(|| "comparing with the reference".into());
        let mut errors = json!({
            "estimate": d(&sigma)?,
            "projected": d(projected.as_operator())?,
        });
        if let Some(t) = &truncated {
            errors["rank_r"] = json!(d(t)?);
        }
        payload["trace_distance"] = errors;
    }
    let mut table = Table::new(&["pauli", "expectation"]);
    for (c, &v) in est.expectations().iter().enumerate() {
        table.push(vec![PauliString::from_code(c, n).to_string().into(), v.into()]);
    }
    Ok(Outcome {
        payload,
        table: Some(table),
    })
}

fn tomo_overlap(a: &crate::TomoOverlapArgs) -> Result<Outcome, CliError> {
    let store = load_store(&a.shots_file)?;
    let n = store.n_qubits();
    let subsets = match &a.subsets_file {
        Some(p) => Some(files::load_graph(p, n)?),
        None => None,
    };
    let mut set = overlapping_tomography(store.records(), n, a.k, subsets.as_deref())
        .context(|| "overlapping tomography".into())?;
    if let (Some(eps), Some(delta)) = (a.epsilon, a.delta) {
        check_epsilon(eps)?;
        check_delta(delta)?;
        set = set.with_targets(eps, delta);
    }
    let mut payload = json!({
        "estimates": json_text(set.to_json().context(|| "serializing estimates".into())?),
    });
    if let Some(path) = &a.reference {
        let rho = files::load_density(path)?;
        payload["trace_distance"] = reference_distances(&set, &rho)?;
    }
    let mut table = Table::new(&["subset", "pauli", "expectation"]);
    for (s, est) in &set.estimates {
        for (c, &v) in est.expectations().iter().enumerate() {
            table.push(vec![
                s.to_string().into(),
                PauliString::from_code(c, est.n_qubits()).to_string().into(),
                v.into(),
            ]);
        }
    }
    Ok(Outcome {
        payload,
        table: Some(table),
    })
}

fn reference_distances(set: &MarginalEstimateSet, rho: &DensityMatrix) -> Result<Value, CliError> {
    if rho.n_qubits() != set.n_qubits {
        return Err(CliError::config(
            "reference",
            format!("reference has {} qubits, shots have {}", rho.n_qubits(), set.n_qubits),
        ));
    }
    let mut out = serde_json::Map::new();
    let mut worst: f64 = 0.0;
    for s in set.subsets() {
        let exact = shallowscope::qcore::partial_trace(rho, s).context(|| format!("marginal on {s}"))?;
        let est = set.get(s).expect("subset listed");
        let d = trace_distance(&exact, &est).context(|| format!("distance on {s}"))?;
        worst = worst.max(d);
        out.insert(s.to_string(), json!(d));
    }
    Ok(json!({"max": worst, "per_subset": out}))
}

fn budget(a: &crate::BudgetArgs) -> Result<Outcome, CliError> {
    check_epsilon(a.epsilon)?;
    check_delta(a.delta)?;
    let budgets: Vec<SampleBudget> = a
        .n
        .iter()
        .map(|&n| {
            let mut req = BudgetRequest::new(a.scenario, n, a.epsilon, a.delta);
            req.k = a.k;
            req.m_terms = a.terms;
            req.gap = a.gap;
            req.rank = a.rank;
            plan_budget(&req).map_err(|e| CliError::config("budget", e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&[
        "scenario",
        "n",
        "k",
        "m_terms",
        "gap",
        "rank",
        "epsilon",
        "delta",
        "marginal_epsilon",
        "union_size",
        "exact",
        "shots",
    ]);
    for b in &budgets {
        let r = &b.request;
        table.push(vec![
            r.scenario.label().into(),
            r.n.into(),
            opt(r.k),
            opt(r.m_terms),
            opt(r.gap),
            opt(r.rank),
            r.epsilon.into(),
            r.delta.into(),
            opt(b.marginal_epsilon),
            opt(b.union_size),
            b.exact.into(),
            b.shots.into(),
        ]);
    }
    let payload = match budgets.as_slice() {
        [one] => to_value(one),
        many => to_value(&many),
    };
    Ok(Outcome {
        payload,
        table: Some(table),
    })
}

fn hamiltonian_value(h: &LocalHamiltonian) -> Result<Value, CliError> {
    Ok(json_text(h.to_json().context(|| "serializing the Hamiltonian".into())?))
}

fn parent(a: &crate::ParentArgs) -> Result<Outcome, CliError> {
    let circuit = files::load_circuit(&a.circuit)?;
    let h = parent_hamiltonian(&circuit).context(|| "building the parent Hamiltonian".into())?;
    let mut payload = json!({
        "n": h.n_qubits(),
        "terms": h.len(),
        "locality": h.locality(),
        "locality_bound": light_cone_bound(circuit.geometry.kind(), circuit.depth()),
        "projector_defect": h.projector_defect(),
        "hamiltonian": hamiltonian_value(&h)?,
    });
    if a.analyze {
        let g = ground_analysis(&h).context(|| "diagonalizing".into())?;
        let psi = circuit.output_state().context(|| "simulating the circuit".into())?;
        payload["analysis"] = to_value(&g);
        payload["ground_fidelity"] = json!(g.ground.as_ref().map(|v| v.overlap(&psi)));
    }
    Ok(Outcome { payload, table: None })
}

fn hamiltonian_and_state(
    hamiltonian: &Option<std::path::PathBuf>,
    circuit: &Option<std::path::PathBuf>,
) -> Result<(LocalHamiltonian, Option<PureState>), CliError> {
    match (hamiltonian, circuit) {
        (Some(p), _) => Ok((files::load_hamiltonian(p)?, None)),
        (None, Some(p)) => {
            let c = files::load_circuit(p)?;
            let h = parent_hamiltonian(&c).context(|| "building the parent Hamiltonian".into())?;
            let psi = c.output_state().context(|| "simulating the circuit".into())?;
            Ok((h, Some(psi)))
        }
        (None, None) => Err(CliError::config("hamiltonian", "give --hamiltonian or --circuit")),
    }
}

fn gap(a: &crate::GapArgs) -> Result<Outcome, CliError> {
    let (h, _) = hamiltonian_and_state(&a.hamiltonian, &a.circuit)?;
    let g = ground_analysis(&h).context(|| "diagonalizing".into())?;
    let mut table = Table::new(&["n", "terms", "lambda0", "lambda1", "gap", "ground_dimension", "unique"]);
    table.push(vec![
        h.n_qubits().into(),
        h.len().into(),
        g.lambda0.into(),
        g.lambda1.into(),
        g.gap.into(),
        g.ground_dimension.into(),
        g.unique.into(),
    ]);
    let mut payload = to_value(&g);
    payload["n"] = json!(h.n_qubits());
    payload["terms"] = json!(h.len());
    Ok(Outcome {
        payload,
        table: Some(table),
    })
}

fn fingerprint(a: &crate::FingerprintArgs) -> Result<Outcome, CliError> {
    if !(a.epsilon > 0.0) {
        return Err(CliError::config("epsilon", format!("{} must be positive", a.epsilon)));
    }
    let (h, from_circuit) = hamiltonian_and_state(&a.hamiltonian, &a.circuit)?;
    let psi = match (&a.state, from_circuit) {
        (Some(p), _) => files::load_state(p)?,
        (None, Some(psi)) => psi,
        (None, None) => return Err(CliError::config("state", "--hamiltonian needs --state")),
    };
    let rho = files::load_density(&a.rho)?;
    let verifier = FingerprintVerifier::new(&h, &psi).context(|| "checking the ground state".into())?;
    let verdict = verifier.check(&rho, a.epsilon).context(|| "fingerprint check".into())?;
    let (label, distance) = match &verdict {
        Verdict::Close { distance } => ("close", *distance),
        Verdict::Witnessed { distance, .. } => ("witnessed", *distance),
        Verdict::BoundViolation { distance, .. } => ("bound_violation", *distance),
    };
    let mut table = Table::new(&["verdict", "distance", "threshold", "gap", "terms"]);
    table.push(vec![
        label.into(),
        distance.into(),
        verifier.threshold(a.epsilon).into(),
        verifier.analysis().gap.into(),
        h.len().into(),
    ]);
    Ok(Outcome {
        payload: json!({
            "result": to_value(&verdict),
            "epsilon": a.epsilon,
            "threshold": verifier.threshold(a.epsilon),
            "gap": verifier.analysis().gap,
            "terms": h.len(),
        }),
        table: Some(table),
    })
}

fn gamma2_cmd(a: &crate::Gamma2Args) -> Result<Outcome, CliError> {
    let value = gamma2(a.d).context(|| format!("gamma2({})", a.d))?;
    let diag = gamma2_diagnostic(a.d).context(|| format!("gamma2 diagnostic at depth {}", a.d))?;
    let mut table = Table::new(&["depth", "value", "naive_count", "upper_bound"]);
    table.push(vec![
        a.d.into(),
        value.into(),
        diag.naive_count.into(),
        gamma2_upper_bound(a.d).into(),
    ]);
    Ok(Outcome {
        payload: json!({
            "depth": a.d,
            "value": value,
            "upper_bound": gamma2_upper_bound(a.d),
            "diagnostic": to_value(&diag),
        }),
        table: Some(table),
    })
}

fn ghz(a: &crate::GhzArgs) -> Result<Outcome, CliError> {
    let g = match a.geometry {
        GeometryKind::General => Geometry::General,
        GeometryKind::Chain => Geometry::Chain,
        GeometryKind::SquareLattice => {
            square_lattice_ghz_embedding(a.n).context(|| format!("lattice embedding for {} qubits", a.n))?
        }
    };
    let circuit = ghz_circuit(a.n, g).context(|| format!("GHZ circuit on {} qubits", a.n))?;
    Ok(Outcome {
        payload: json!({
            "n": a.n,
            "geometry": a.geometry.to_string(),
            "depth": circuit.depth(),
            "optimal_depth": ghz_depth(a.n, a.geometry).context(|| "GHZ depth".into())?,
            "circuit": to_value(&circuit),
        }),
        table: None,
    })
}

fn lowerbound(a: &crate::LowerboundArgs) -> Result<Outcome, CliError> {
    let r = match (a.r, a.n) {
        (Some(r), _) => r,
        (None, Some(n)) if n >= 2 => n - 1,
        (None, Some(n)) => return Err(CliError::config("n", format!("GHZ needs n >= 2, got {n}"))),
        (None, None) => return Err(CliError::config("r", "give --r or --n")),
    };
    let depth = complexity_lower_bound(r, a.geometry).map_err(|e| CliError::config("r", e.to_string()))?;
    let mut payload = json!({"r": r, "geometry": a.geometry.to_string(), "depth": depth});
    if let Some(n) = a.n {
        payload["ghz_depth"] = json!(ghz_depth(n, a.geometry).ok());
    }
    let mut table = Table::new(&["r", "geometry", "depth"]);
    table.push(vec![r.into(), a.geometry.to_string().into(), depth.into()]);
    Ok(Outcome {
        payload,
        table: Some(table),
    })
}

fn uda_probe(a: &crate::UdaProbeArgs, seed: u64) -> Result<Outcome, CliError> {
    let psi = files::load_state(&a.state)?;
    let n = psi.n_qubits();
    let subsets = match (&a.graph, a.k) {
        (Some(p), _) => files::load_graph(p, n)?,
        (None, Some(k)) if (1..=n).contains(&k) => QubitSubset::k_subsets(n, k),
        (None, Some(k)) => return Err(CliError::config("k", format!("{k} outside 1..={n}"))),
        (None, None) => return Err(CliError::config("graph", "give --graph or --k")),
    };
    if a.restarts == 0 {
        return Err(CliError::config("restarts", "must be at least 1"));
    }
    let map = MarginalMap::new(n, subsets).map_err(|e| CliError::config("graph", e.to_string()))?;
    let config = ImpostorConfig {
        restarts: a.restarts,
        seed,
        max_iterations: a.max_iterations,
        ..ImpostorConfig::default()
    };
    let v = impostor_search(&psi, &map, &config).context(|| "impostor search".into())?;
    let mut table = Table::new(&["status", "witness_distance", "witness_marginal_deviation", "restarts", "converged"]);
    table.push(vec![
        to_value(&v.status).as_str().unwrap_or_default().into(),
        opt(v.witness_distance),
        opt(v.witness_marginal_deviation),
        v.statistics.restarts.into(),
        v.statistics.converged.into(),
    ]);
    Ok(Outcome {
        payload: to_value(&v),
        table: Some(table),
    })
}

fn complexity(a: &crate::ComplexityTestArgs, seed: u64) -> Result<Outcome, CliError> {
    check_epsilon(a.epsilon)?;
    let est = files::load_estimates(&a.estimates)?;
    let g = geometry(a.geometry, a.grid.as_deref(), est.n_qubits)?;
    if a.restarts == 0 {
        return Err(CliError::config("restarts", "must be at least 1"));
    }
    let config = SearchConfig {
        restarts: a.restarts,
        max_iterations: a.max_iterations,
        seed,
        ..SearchConfig::default()
    };
    let v = test_complexity(&est, a.depth, &g, a.epsilon, &config).context(|| "complexity test".into())?;
    let mut table = Table::new(&["answer", "depth", "k", "threshold", "best_residual", "starts", "evaluations"]);
    table.push(vec![
        to_value(&v.answer).as_str().unwrap_or_default().into(),
        v.depth.into(),
        v.k.into(),
        v.threshold.into(),
        v.best_residual.into(),
        v.starts.into(),
        v.evaluations.into(),
    ]);
    Ok(Outcome {
        payload: to_value(&v),
        table: Some(table),
    })
}
