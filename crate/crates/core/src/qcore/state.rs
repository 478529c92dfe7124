//! Pure states, density matrices and Hermitian operators over `2^n`
//! dimensions. Qubit 0 is the most significant bit of a basis index.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{
    hermitian_eigenvalues, hermiticity_defect, trace, CMatrix, SPECTRAL_TOL, STRUCTURAL_TOL, ZERO,
};
use crate::error::{Error, Result};

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// A Hermitian matrix on `n` qubits; trace and positivity unconstrained.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    n_qubits: usize,
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidOperator("matrix is not square".into()));
        }
        let n_qubits = qubits_for_dim(matrix.nrows())?;
        let defect = hermiticity_defect(&matrix);
        if defect > STRUCTURAL_TOL {
            return Err(Error::InvalidOperator(format!(
                "not Hermitian (max defect {defect:.3e})"
            )));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// Skips validation; the caller guarantees hermiticity.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        let n_qubits = matrix.nrows().trailing_zeros() as usize;
        Self { n_qubits, matrix }
    }

    pub fn zeros(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        Self {
            n_qubits,
            matrix: CMatrix::from_element(d, d, ZERO),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        Self {
            n_qubits,
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Validates trace and positivity, producing a density matrix.
    pub fn into_density(self) -> Result<DensityMatrix> {
        DensityMatrix::from_operator(self)
    }
}

impl AsRef<HermitianOperator> for HermitianOperator {
    fn as_ref(&self) -> &HermitianOperator {
        self
    }
}

/// A valid quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::from_operator(HermitianOperator::new(matrix)?)
    }

    pub fn from_operator(op: HermitianOperator) -> Result<Self> {
        let tr = trace(&op.matrix);
        if (tr.re - 1.0).abs() > STRUCTURAL_TOL || tr.im.abs() > STRUCTURAL_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = op.min_eigenvalue();
        if min < -SPECTRAL_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { op })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self {
            op: HermitianOperator::from_matrix_unchecked(matrix),
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self::from_matrix_unchecked(CMatrix::identity(d, d).scale(1.0 / d as f64))
    }

    /// Random state of the given rank from the induced (Ginibre) measure.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rank: usize, rng: &mut R) -> Self {
        let d = 1usize << n_qubits;
        let rank = rank.clamp(1, d);
        let g = CMatrix::from_fn(d, rank, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let m = &g * g.adjoint();
        let tr = trace(&m).re;
        let m = m.scale(1.0 / tr);
        Self::from_matrix_unchecked((&m + m.adjoint()).scale(0.5))
    }

    /// Convex combination `(1 - t) self + t other`.
    pub fn mix(&self, other: &DensityMatrix, t: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("mixing weight {t} outside [0, 1]")));
        }
        Ok(Self::from_matrix_unchecked(
            self.matrix().scale(1.0 - t) + other.matrix().scale(t),
        ))
    }

    pub fn n_qubits(&self) -> usize {
        self.op.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.op.matrix
    }

    pub fn as_operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.op.eigenvalues()
    }

    pub fn purity(&self) -> f64 {
        self.matrix().iter().map(|z| z.norm_sqr()).sum()
    }
}

impl AsRef<HermitianOperator> for DensityMatrix {
    fn as_ref(&self) -> &HermitianOperator {
        &self.op
    }
}

/// A normalized amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::InvalidState(format!(
                "squared norm {norm} is not 1"
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub(crate) fn from_vector_unchecked(amplitudes: DVector<Complex64>) -> Self {
        let n_qubits = amplitudes.len().trailing_zeros() as usize;
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut v = DVector::from_element(1 << n_qubits, ZERO);
        v[index] = Complex64::new(1.0, 0.0);
        Self::from_vector_unchecked(v)
    }

    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// `(|0...0> + |1...1>)/sqrt(2)`.
    pub fn ghz(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        let mut v = DVector::from_element(d, ZERO);
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[0] = a;
        v[d - 1] += a;
        Self::from_vector_unchecked(v)
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let d = 1usize << n_qubits;
        let v: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(v).expect("gaussian vector is nonzero")
    }

    /// Tensor product `self ⊗ other` (self on the leading qubits).
    pub fn tensor(&self, other: &PureState) -> PureState {
        Self::from_vector_unchecked(self.amplitudes.kronecker(&other.amplitudes))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_matrix_unchecked(m)
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}
