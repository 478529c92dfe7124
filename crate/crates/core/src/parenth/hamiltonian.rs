use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::{
    hermitian_eigenvalues, matrix_from_rows, matrix_to_rows, CMatrix, SPECTRAL_TOL,
};
use crate::qcore::{embed_operator, reduced_state, HermitianOperator, PureState, QubitSubset};

/// Largest register for which dense `2^n` matrices are assembled.
pub const MAX_DENSE_QUBITS: usize = 12;

/// One local term `H_s`, a matrix on exactly the qubits of `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub support: QubitSubset,
    pub operator: HermitianOperator,
}

/// `H = sum_s H_s ⊗ I`, every term between 0 and the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalHamiltonian {
    n_qubits: usize,
    terms: Vec<Term>,
    /// Two lowest eigenvalues, when known.
    pub gap_certificate: Option<(f64, f64)>,
}

pub(crate) fn check_dense(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

impl LocalHamiltonian {
    /// Checks supports, term dimensions and `0 <= H_s <= I` (within 1e-9).
    pub fn new(n_qubits: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            t.support.check_range(n_qubits)?;
            if t.support.is_empty() {
                return Err(Error::InvalidSubset("term with empty support".into()));
            }
            if t.operator.n_qubits() != t.support.len() || t.operator.dim() != 1 << t.support.len() {
                return Err(Error::DimensionMismatch {
                    expected: 1 << t.support.len(),
                    found: t.operator.dim(),
                });
            }
            let ev = hermitian_eigenvalues(t.operator.matrix());
            let (lo, hi) = (ev[0], ev[ev.len() - 1]);
            if lo < -SPECTRAL_TOL || hi > 1.0 + SPECTRAL_TOL {
                return Err(Error::InvalidOperator(format!(
                    "term on {} has spectrum [{lo:.3e}, {hi:.3e}] outside [0, 1]",
                    t.support
                )));
            }
        }
        Ok(Self {
            n_qubits,
            terms,
            gap_certificate: None,
        })
    }

    pub(crate) fn from_terms_unchecked(n_qubits: usize, terms: Vec<Term>) -> Self {
        Self {
            n_qubits,
            terms,
            gap_certificate: None,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Number of terms `m`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest support size.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.support.len()).max().unwrap_or(0)
    }

    /// Largest `||H_s^2 - H_s||_2` over the terms.
    pub fn projector_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let m = t.operator.matrix();
                (m * m - m).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `<psi|H|psi>` from reduced states, without the full matrix.
    pub fn energy(&self, psi: &PureState) -> Result<f64> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: psi.n_qubits(),
            });
        }
        self.terms.iter().try_fold(0.0, |acc, t| {
            let r = reduced_state(psi, &t.support)?;
            Ok(acc + (t.operator.matrix() * r.matrix()).trace().re)
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&HamiltonianJson::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: HamiltonianJson = serde_json::from_str(text)?;
        let terms = raw
            .terms
            .into_iter()
            .map(|t| {
                let support = QubitSubset::new(t.support, raw.n)?;
                let m = matrix_from_rows(&t.matrix)
                    .ok_or_else(|| Error::Parse(format!("term on {support} is not square")))?;
                Ok(Term {
                    support,
                    operator: HermitianOperator::new(m)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut h = Self::new(raw.n, terms)?;
        h.gap_certificate = raw.gap_certificate;
        Ok(h)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    support: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct HamiltonianJson {
    n: usize,
    terms: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gap_certificate: Option<(f64, f64)>,
}

impl From<&LocalHamiltonian> for HamiltonianJson {
    fn from(h: &LocalHamiltonian) -> Self {
        let terms = h
            .terms
            .iter()
            .map(|t| TermJson {
                support: t.support.indices().to_vec(),
                matrix: matrix_to_rows(t.operator.matrix()),
            })
            .collect();
        Self {
            n: h.n_qubits,
            terms,
            gap_certificate: h.gap_certificate,
        }
    }
}

/// Dense `2^n x 2^n` matrix of `sum_s H_s ⊗ I`.
pub fn assemble(h: &LocalHamiltonian) -> Result<HermitianOperator> {
    let n = h.n_qubits;
    check_dense(n)?;
    let mut total = CMatrix::zeros(1 << n, 1 << n);
    for t in &h.terms {
        total += embed_operator(t.operator.matrix(), &t.support, n)?;
    }
    Ok(HermitianOperator::from_matrix_unchecked(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::hermiticity_defect;
    use num_complex::Complex64;

    pub(crate) fn one_projector() -> HermitianOperator {
        let mut m = CMatrix::zeros(2, 2);
        m[(1, 1)] = Complex64::new(1.0, 0.0);
        HermitianOperator::new(m).unwrap()
    }

    #[test]
    fn assemble_examples() {
        let h = LocalHamiltonian::new(
            2,
            vec![Term {
                support: QubitSubset::singleton(0),
                operator: one_projector(),
            }],
        )
        .unwrap();
        let m = assemble(&h).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m.matrix()[(i, i)].re).collect();
        assert_eq!(diag, [0.0, 0.0, 1.0, 1.0]);
        assert_eq!(hermiticity_defect(m.matrix()), 0.0);
        let empty = LocalHamiltonian::new(3, vec![]).unwrap();
        assert_eq!(assemble(&empty).unwrap().matrix(), &CMatrix::zeros(8, 8));
        assert!(assemble(&LocalHamiltonian::new(13, vec![]).unwrap()).is_err());
    }

    #[test]
    fn rejects_terms_outside_unit_interval() {
        let big = HermitianOperator::new(one_projector().matrix().scale(2.0)).unwrap();
        let t = Term {
            support: QubitSubset::singleton(0),
            operator: big,
        };
        assert!(LocalHamiltonian::new(1, vec![t]).is_err());
        let t = Term {
            support: QubitSubset::singleton(3),
            operator: one_projector(),
        };
        assert!(LocalHamiltonian::new(2, vec![t]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut h = LocalHamiltonian::new(
            3,
            vec![Term {
                support: QubitSubset::new(vec![2], 3).unwrap(),
                operator: one_projector(),
            }],
        )
        .unwrap();
        h.gap_certificate = Some((0.0, 1.0));
        let text = h.to_json().unwrap();
        assert!(text.starts_with(r#"{"n":3,"terms":[{"support":[2],"matrix":[[[0.0,0.0],"#));
        assert_eq!(LocalHamiltonian::from_json(&text).unwrap(), h);
    }
}
