//! Dense complex linear algebra helpers.
//!
//! Hermitian eigendecomposition is the only spectral primitive used in the
//! crate; trace norms, projections and ground-state analysis all go through
//! [`hermitian_eigen`] or [`hermitian_eigenvalues`].

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Entrywise tolerance for structural invariants (hermiticity, trace, norm).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Slack allowed on eigenvalues (positivity, projector checks).
pub const SPECTRAL_TOL: f64 = 1e-9;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

fn symmetrized(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> Eigen {
    let dim = m.nrows();
    if dim == 0 {
        return Eigen {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = symmetrized(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Eigen { values, vectors }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return vec![];
    }
    let mut values: Vec<f64> = symmetrized(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Rebuilds `V diag(values) V†`.
pub fn from_spectrum(values: &[f64], vectors: &CMatrix) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v);
    }
    let out = &scaled * vectors.adjoint();
    symmetrized(&out)
}

/// Largest entrywise deviation from hermiticity.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Hilbert-Schmidt norm.
pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Row-major `[[re, im], ...]` rows, the JSON form of dense matrices.
pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Inverse of [`matrix_to_rows`]; `None` unless the rows form a square matrix.
pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Option<CMatrix> {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return None;
    }
    Some(CMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
            ],
        );
        let e = hermitian_eigen(&m);
        assert!(e.values[0] <= e.values[1]);
        let back = from_spectrum(&e.values, &e.vectors);
        assert!(frobenius_norm(&(back - &m)) < 1e-12);
    }

    #[test]
    fn trace_norm_of_pauli_z_is_two() {
        let z = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, -ONE]));
        assert!((trace_norm(&z) - 2.0).abs() < 1e-14);
    }
}
