use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::map::{kernel_basis, MarginalMap};
use crate::error::{Error, Result};
use crate::qcore::linalg::{frobenius_norm, hermitian_eigen, from_spectrum, matrix_to_rows, CMatrix};
use crate::qcore::pauli::{operator_from_pauli_coefficients, real_pauli_coefficients};
use crate::qcore::{partial_trace, trace_distance, DensityMatrix, PauliString, PureState};

/// Alternating-projection settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpostorConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop when successive iterates differ by less than this (Frobenius).
    pub tolerance: f64,
    pub relaxation: f64,
}

impl Default for ImpostorConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0,
            max_iterations: 5000,
            tolerance: 1e-9,
            relaxation: 1.5,
        }
    }
}

/// Marginal agreement required of a witness (entrywise).
pub const WITNESS_MARGINAL_TOL: f64 = 1e-8;
/// Smallest trace distance from the probed state that counts as distinct.
pub const WITNESS_MIN_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UdaStatus {
    /// A distinct state with the same marginals was found.
    NotUda,
    /// No witness found. Evidence only, never a proof of UDA.
    NoImpostorFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStatistics {
    pub restarts: usize,
    pub converged: usize,
    /// Restarts that hit the iteration cap.
    pub capped: usize,
    pub mean_iterations: f64,
    pub kernel_dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UdaVerdict {
    pub status: UdaStatus,
    #[serde(serialize_with = "witness_rows", skip_deserializing)]
    pub witness: Option<DensityMatrix>,
    /// `||witness - psi||_1`.
    pub witness_distance: Option<f64>,
    /// Largest entrywise marginal deviation of the witness.
    pub witness_marginal_deviation: Option<f64>,
    /// Restart that produced the witness.
    pub witness_restart: Option<usize>,
    pub statistics: SearchStatistics,
    pub note: String,
}

fn witness_rows<S: serde::Serializer>(
    w: &Option<DensityMatrix>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    w.as_ref().map(|d| matrix_to_rows(d.matrix())).serialize(s)
}

/// `psi` and the separable mixture `(|0..0><0..0| + |1..1><1..1|)/2`,
/// which share every `(n-1)`-qubit marginal.
pub fn ghz_counterexample(n: usize) -> Result<(PureState, DensityMatrix)> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("GHZ needs n >= 2, got {n}")));
    }
    let d = 1usize << n;
    let mut m = CMatrix::zeros(d, d);
    m[(0, 0)] = Complex64::new(0.5, 0.0);
    m[(d - 1, d - 1)] = Complex64::new(0.5, 0.0);
    Ok((PureState::ghz(n), DensityMatrix::new(m)?))
}

/// Largest entrywise deviation between the marginals of two states.
pub fn max_marginal_deviation(
    map: &MarginalMap,
    a: &DensityMatrix,
    b: &DensityMatrix,
) -> Result<f64> {
    map.subsets().iter().try_fold(0.0f64, |worst, s| {
        let d = partial_trace(a, s)?.matrix() - partial_trace(b, s)?.matrix();
        Ok(d.iter().map(|z| z.norm()).fold(worst, f64::max))
    })
}

/// Nearest unit-trace PSD matrix (eigenvalues projected onto the simplex).
fn project_density(m: &CMatrix) -> CMatrix {
    let eig = hermitian_eigen(m);
    let mut sorted = eig.values.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let (mut cum, mut theta) = (0.0, 0.0);
    for (i, &v) in sorted.iter().enumerate() {
        cum += v;
        let t = (cum - 1.0) / (i + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    let clipped: Vec<f64> = eig.values.iter().map(|v| (v - theta).max(0.0)).collect();
    from_spectrum(&clipped, &eig.vectors)
}

/// Gauss-Newton on a factor `L` (`sigma = L L†`) of the eigenvectors of `w`
/// above `cutoff`, driving the fixed Pauli coefficients of `sigma` to their
/// targets. Stays PSD by construction; `None` if it stalls.
fn polish(w: &CMatrix, cutoff: f64, paulis: &[(usize, CMatrix)], target: &[f64]) -> Option<CMatrix> {
    let eig = hermitian_eigen(w);
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] > cutoff).collect();
    let (d, r) = (w.nrows(), keep.len());
    if r == 0 {
        return None;
    }
    let mut l = CMatrix::from_fn(d, r, |i, j| eig.vectors[(i, keep[j])] * eig.values[keep[j]].sqrt());
    for _ in 0..200 {
        let sigma = &l * l.adjoint();
        let resid = DVector::from_iterator(
            paulis.len(),
            paulis.iter().map(|(c, p)| target[*c] - (p * &sigma).trace().re),
        );
        if resid.amax() < 1e-14 {
            return Some((&sigma + sigma.adjoint()).scale(0.5));
        }
        // d Tr(P L L†) = 2 Re Tr(L† P dL)
        let mut jac = DMatrix::zeros(paulis.len(), 2 * d * r);
        for (row, (_, p)) in paulis.iter().enumerate() {
            let m = l.adjoint() * p;
            for i in 0..d {
                for j in 0..r {
                    jac[(row, i * r + j)] = 2.0 * m[(j, i)].re;
                    jac[(row, d * r + i * r + j)] = -2.0 * m[(j, i)].im;
                }
            }
        }
        let step = jac.svd(true, true).solve(&resid, 1e-12).ok()?;
        for i in 0..d {
            for j in 0..r {
                l[(i, j)] += Complex64::new(step[i * r + j], step[d * r + i * r + j]);
            }
        }
    }
    None
}

struct Restart {
    candidate: CMatrix,
    iterations: usize,
    converged: bool,
}

/// Searches for a state with the marginals of `psi` on `map` but distinct
/// from it, by over-relaxed alternating projection between the affine set
/// of marginal-compatible unit-trace operators and the density matrices.
pub fn impostor_search(psi: &PureState, map: &MarginalMap, config: &ImpostorConfig) -> Result<UdaVerdict> {
    let n = map.n_qubits();
    if psi.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: psi.n_qubits(),
        });
    }
    if config.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let kernel = kernel_basis(map)?;
    let target = psi.density_matrix();
    let target_coeffs = real_pauli_coefficients(target.matrix());
    let mut free = vec![false; target_coeffs.len()];
    for &c in kernel.codes() {
        free[c] = true;
    }
    let project_affine = |m: &CMatrix| {
        let mut c = real_pauli_coefficients(m);
        for (i, v) in c.iter_mut().enumerate() {
            if !free[i] {
                *v = target_coeffs[i];
            }
        }
        operator_from_pauli_coefficients(&c, n)
    };
    let fixed: Vec<(usize, CMatrix)> = (0..free.len())
        .filter(|&c| !free[c])
        .map(|c| (c, PauliString::from_code(c, n).matrix()))
        .collect();
    let dim = 1usize << n;
    let mixed = CMatrix::identity(dim, dim).unscale(dim as f64);

    let runs: Vec<Restart> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(r as u64);
            let t: f64 = rng.random();
            let mut x = target.matrix().scale(1.0 - t) + mixed.scale(t);
            if kernel.dim() > 0 {
                let c: Vec<f64> = (0..kernel.dim()).map(|_| rng.sample(StandardNormal)).collect();
                let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                for (i, v) in c.iter().enumerate() {
                    x += kernel.element(i).matrix().scale(0.5 * t * v / norm);
                }
            }
            let mut iterations = 0;
            let mut converged = false;
            while iterations < config.max_iterations {
                iterations += 1;
                let z = project_affine(&project_density(&x));
                let next = &x + (z - &x).scale(config.relaxation);
                let step = frobenius_norm(&(&next - &x));
                x = next;
                if step < config.tolerance {
                    converged = true;
                    break;
                }
            }
            Restart {
                candidate: project_density(&x),
                iterations,
                converged,
            }
        })
        .collect();

    let statistics = SearchStatistics {
        restarts: config.restarts,
        converged: runs.iter().filter(|r| r.converged).count(),
        capped: runs.iter().filter(|r| !r.converged).count(),
        mean_iterations: runs.iter().map(|r| r.iterations as f64).sum::<f64>() / runs.len() as f64,
        kernel_dimension: kernel.dim(),
    };
    // first valid witness by restart index, re-validated from scratch
    for (i, run) in runs.iter().enumerate() {
        let polished = [1e-6, 1e-9]
            .iter()
            .filter_map(|&cut| polish(&run.candidate, cut, &fixed, &target_coeffs));
        for candidate in std::iter::once(run.candidate.clone()).chain(polished) {
            let Ok(w) = DensityMatrix::new(candidate) else {
                continue;
            };
            let deviation = max_marginal_deviation(map, &w, &target)?;
            let distance = trace_distance(&w, &target)?;
            // a nearly converged point next to psi can pass the marginal
            // check at distance ~ sqrt(deviation); demand a clear separation
            let needed = WITNESS_MIN_DISTANCE.max(100.0 * deviation.sqrt());
            if deviation <= WITNESS_MARGINAL_TOL && distance > needed {
                return Ok(UdaVerdict {
                    status: UdaStatus::NotUda,
                    witness: Some(w),
                    witness_distance: Some(distance),
                    witness_marginal_deviation: Some(deviation),
                    witness_restart: Some(i),
                    statistics,
                    note: "witness is a distinct density matrix with the same marginals".into(),
                });
            }
        }
    }
    Ok(UdaVerdict {
        status: UdaStatus::NoImpostorFound,
        witness: None,
        witness_distance: None,
        witness_marginal_deviation: None,
        witness_restart: None,
        statistics,
        note: "no impostor found; this is evidence, not a proof of unique determination".into(),
    })
}
