use serde::{Deserialize, Serialize};

use super::accumulate::PauliAccumulator;
use crate::error::{Error, Result};
use crate::qcore::linalg::{from_spectrum, hermitian_eigen};
use crate::qcore::pauli::{operator_from_pauli_coefficients, real_pauli_coefficients};
use crate::qcore::{DensityMatrix, HermitianOperator, PauliString};

/// A linear-inversion estimate held as Pauli expectations `Tr(sigma P)`,
/// indexed by Pauli code. The identity entry is exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliEstimate {
    n_qubits: usize,
    expectations: Vec<f64>,
}

impl PauliEstimate {
    pub fn from_expectations(n_qubits: usize, expectations: Vec<f64>) -> Result<Self> {
        if expectations.len() != 1usize << (2 * n_qubits) {
            return Err(Error::DimensionMismatch {
                expected: 1 << (2 * n_qubits),
                found: expectations.len(),
            });
        }
        Ok(Self {
            n_qubits,
            expectations,
        })
    }

    /// Exact coordinates of an operator (used for noiseless fixtures).
    pub fn from_operator(op: &HermitianOperator) -> Self {
        Self {
            n_qubits: op.n_qubits(),
            expectations: real_pauli_coefficients(op.matrix()),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn expectations(&self) -> &[f64] {
        &self.expectations
    }

    pub fn expectation(&self, p: &PauliString) -> f64 {
        self.expectations[p.code()]
    }

    /// `sigma = sum_P e_P P / 2^n`.
    pub fn operator(&self) -> HermitianOperator {
        HermitianOperator::from_matrix_unchecked(operator_from_pauli_coefficients(
            &self.expectations,
            self.n_qubits,
        ))
    }
}

/// The paper's estimator from a complete accumulator: `e_Q = mu_Q / count_Q`.
pub fn estimate_expectations(acc: &PauliAccumulator) -> Result<PauliEstimate> {
    let n = acc.n_qubits();
    let expectations = (0..1usize << (2 * n))
        .map(|code| match acc.count(code) {
            0 => Err(Error::InsufficientData {
                subset: "all".into(),
                basis: PauliString::from_code(code, n).to_string(),
            }),
            c => Ok(acc.mu(code) as f64 / c as f64),
        })
        .collect::<Result<Vec<_>>>()?;
    PauliEstimate::from_expectations(n, expectations)
}

/// Linear-inversion estimate; Hermitian with unit trace but not
/// necessarily positive.
pub fn estimate_state(acc: &PauliAccumulator) -> Result<HermitianOperator> {
    Ok(estimate_expectations(acc)?.operator())
}

/// Euclidean projection of `values` onto the probability simplex.
fn simplex_projection(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    values.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Nearest density matrix in Frobenius norm: eigenvalues projected onto
/// the simplex, eigenvectors kept.
pub fn project_psd(sigma: &HermitianOperator) -> DensityMatrix {
    let eig = hermitian_eigen(sigma.matrix());
    let clipped = simplex_projection(&eig.values);
    DensityMatrix::from_matrix_unchecked(from_spectrum(&clipped, &eig.vectors))
}

/// Best rank-`r` approximation: the `r` eigenvalues of largest magnitude.
pub fn project_rank_r(sigma: &HermitianOperator, r: usize) -> Result<HermitianOperator> {
    let dim = sigma.dim();
    if r == 0 || r > dim {
        return Err(Error::InvalidArgument(format!(
            "rank {r} outside 1..={dim}"
        )));
    }
    let eig = hermitian_eigen(sigma.matrix());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.values[b].abs().total_cmp(&eig.values[a].abs()).then(a.cmp(&b)));
    let mut kept = vec![0.0; dim];
    for &i in order.iter().take(r) {
        kept[i] = eig.values[i];
    }
    Ok(HermitianOperator::from_matrix_unchecked(from_spectrum(
        &kept,
        &eig.vectors,
    )))
}
