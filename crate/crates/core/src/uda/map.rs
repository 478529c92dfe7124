use crate::error::{Error, Result};
use crate::qcore::linalg::CMatrix;
use crate::qcore::{partial_trace_operator, HermitianOperator, PauliString, QubitSubset};

/// Largest register handled by kernel computations (`4^n` Pauli strings).
pub const MAX_KERNEL_QUBITS: usize = 8;

/// The linear map sending an operator to its marginals on an interaction
/// graph's subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalMap {
    n_qubits: usize,
    subsets: Vec<QubitSubset>,
}

/// Bitmask of the qubits a Pauli code acts on, qubit 0 as the top bit.
pub(crate) fn support_mask(code: usize, n: usize) -> usize {
    (0..n).fold(0, |mask, q| {
        let letter = (code >> (2 * (n - 1 - q))) & 3;
        mask | (usize::from(letter != 0) << (n - 1 - q))
    })
}

impl MarginalMap {
    pub fn new(n_qubits: usize, subsets: Vec<QubitSubset>) -> Result<Self> {
        if subsets.is_empty() {
            return Err(Error::InvalidSubset("interaction graph has no subsets".into()));
        }
        for s in &subsets {
            s.check_range(n_qubits)?;
            if s.is_empty() {
                return Err(Error::InvalidSubset("empty subset in interaction graph".into()));
            }
        }
        Ok(Self { n_qubits, subsets })
    }

    /// Every `k`-subset of `n` qubits.
    pub fn all_k_subsets(n: usize, k: usize) -> Result<Self> {
        Self::new(n, QubitSubset::k_subsets(n, k))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn subsets(&self) -> &[QubitSubset] {
        &self.subsets
    }

    fn masks(&self) -> Vec<usize> {
        self.subsets
            .iter()
            .map(|s| s.index_mask(self.n_qubits))
            .collect()
    }

    /// Whether every marginal fixes the coefficient of this Pauli code,
    /// i.e. its support lies inside some subset. The identity is fixed by
    /// the trace.
    pub fn determines(&self, code: usize) -> bool {
        let m = support_mask(code, self.n_qubits);
        m == 0 || self.masks().iter().any(|&s| m & !s == 0)
    }

    /// Marginals of `op` on every subset.
    pub fn apply(&self, op: &HermitianOperator) -> Result<Vec<HermitianOperator>> {
        self.subsets
            .iter()
            .map(|s| partial_trace_operator(op, s))
            .collect()
    }
}

/// Orthonormal basis of the traceless Hermitian operators with vanishing
/// marginals. Element `i` is `P_i / sqrt(2^n)` for the Pauli code `codes[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelBasis {
    n_qubits: usize,
    codes: Vec<usize>,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.codes.len()
    }

    pub fn codes(&self) -> &[usize] {
        &self.codes
    }

    pub fn element(&self, i: usize) -> HermitianOperator {
        let p = PauliString::from_code(self.codes[i], self.n_qubits);
        let scale = (1usize << self.n_qubits) as f64;
        HermitianOperator::from_matrix_unchecked(p.matrix().unscale(scale.sqrt()))
    }

    /// Frobenius norm of the component of `op` orthogonal to the kernel.
    pub fn residual(&self, op: &CMatrix) -> f64 {
        let n = self.n_qubits;
        let inside: Vec<bool> = {
            let mut v = vec![false; 1 << (2 * n)];
            for &c in &self.codes {
                v[c] = true;
            }
            v
        };
        let coeffs = crate::qcore::pauli::pauli_coefficients(op);
        let scale = (1usize << n) as f64;
        coeffs
            .iter()
            .enumerate()
            .filter(|(c, _)| !inside[*c])
            .map(|(_, z)| z.norm_sqr() / scale)
            .sum::<f64>()
            .sqrt()
    }
}

/// Null space of `{Tr = 0} ∪ {marginal on s = 0}`. A Pauli string has a
/// nonzero marginal on `s` exactly when its support lies inside `s`, so the
/// kernel is spanned by the strings supported outside every subset.
pub fn kernel_basis(map: &MarginalMap) -> Result<KernelBasis> {
    let n = map.n_qubits;
    if n > MAX_KERNEL_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: MAX_KERNEL_QUBITS,
        });
    }
    let masks = map.masks();
    let codes = (0..1usize << (2 * n))
        .filter(|&c| {
            let m = support_mask(c, n);
            m != 0 && masks.iter().all(|&s| m & !s != 0)
        })
        .collect();
    Ok(KernelBasis { n_qubits: n, codes })
}
