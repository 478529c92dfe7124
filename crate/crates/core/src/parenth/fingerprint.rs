use serde::{Deserialize, Serialize};

use super::ground::{ground_analysis, GroundAnalysis};
use super::hamiltonian::LocalHamiltonian;
use crate::error::{Error, Result};
use crate::qcore::{partial_trace, reduced_state, trace_distance, DensityMatrix, PureState, QubitSubset};

/// Outcome of the robust-fingerprint test for one candidate state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// `||psi - rho||_1 < epsilon`.
    Close { distance: f64 },
    /// A term support whose marginal deviation exceeds `gap eps^2 / (4m)`.
    Witnessed {
        support: QubitSubset,
        deviation: f64,
        threshold: f64,
        distance: f64,
    },
    /// Neither condition holds. The gapped-ground-state lemma rules this
    /// out, so it signals a bug or a violated precondition.
    BoundViolation {
        distance: f64,
        max_deviation: f64,
        threshold: f64,
    },
}

/// Checks candidate states against a verified unique ground state.
#[derive(Debug, Clone)]
pub struct FingerprintVerifier<'a> {
    h: &'a LocalHamiltonian,
    psi: PureState,
    analysis: GroundAnalysis,
    marginals: Vec<DensityMatrix>,
}

impl<'a> FingerprintVerifier<'a> {
    /// Fails unless `psi` is the unique ground state of `h` (fidelity
    /// `1 - 1e-9` with the computed ground vector).
    pub fn new(h: &'a LocalHamiltonian, psi: &PureState) -> Result<Self> {
        if psi.n_qubits() != h.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: h.n_qubits(),
                found: psi.n_qubits(),
            });
        }
        let analysis = ground_analysis(h)?;
        let Some(ground) = analysis.ground.as_ref() else {
            return Err(Error::NotUniqueGroundState(format!(
                "ground space has dimension {} (gap {:.3e})",
                analysis.ground_dimension, analysis.gap
            )));
        };
        let f = ground.overlap(psi);
        if f < 1.0 - 1e-9 {
            return Err(Error::NotUniqueGroundState(format!(
                "state has fidelity {f:.12} with the ground vector"
            )));
        }
        let marginals = h
            .terms()
            .iter()
            .map(|t| reduced_state(psi, &t.support))
            .collect::<Result<_>>()?;
        Ok(Self {
            h,
            psi: psi.clone(),
            analysis,
            marginals,
        })
    }

    pub fn analysis(&self) -> &GroundAnalysis {
        &self.analysis
    }

    /// `gap eps^2 / (4m)`.
    pub fn threshold(&self, epsilon: f64) -> f64 {
        self.analysis.gap * epsilon * epsilon / (4.0 * self.h.len().max(1) as f64)
    }

    pub fn check(&self, rho: &DensityMatrix, epsilon: f64) -> Result<Verdict> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
        }
        let distance = trace_distance(&self.psi.density_matrix(), rho)?;
        if distance < epsilon {
            return Ok(Verdict::Close { distance });
        }
        let threshold = self.threshold(epsilon);
        let mut best: Option<(usize, f64)> = None;
        for (i, (t, m)) in self.h.terms().iter().zip(&self.marginals).enumerate() {
            let d = trace_distance(m, &partial_trace(rho, &t.support)?)?;
            if best.is_none_or(|(_, b)| d > b) {
                best = Some((i, d));
            }
        }
        Ok(match best {
            Some((i, deviation)) if deviation > threshold => Verdict::Witnessed {
                support: self.h.terms()[i].support.clone(),
                deviation,
                threshold,
                distance,
            },
            other => Verdict::BoundViolation {
                distance,
                max_deviation: other.map_or(0.0, |(_, d)| d),
                threshold,
            },
        })
    }
}

/// One-shot form of [`FingerprintVerifier`].
pub fn fingerprint_check(
    h: &LocalHamiltonian,
    psi: &PureState,
    rho: &DensityMatrix,
    epsilon: f64,
) -> Result<Verdict> {
    FingerprintVerifier::new(h, psi)?.check(rho, epsilon)
}
