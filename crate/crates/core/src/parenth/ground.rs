use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{assemble, LocalHamiltonian};
use crate::error::Result;
use crate::qcore::linalg::hermitian_eigen;
use crate::qcore::PureState;

/// Eigenvalue separation below which the ground space counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Bottom of the spectrum of a local Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundAnalysis {
    pub lambda0: f64,
    pub lambda1: f64,
    pub gap: f64,
    /// Eigenvalues within [`DEGENERACY_TOL`] of `lambda0`.
    pub ground_dimension: usize,
    pub unique: bool,
    #[serde(skip)]
    pub ground: Option<PureState>,
}

/// Dense diagonalization of the assembled Hamiltonian.
pub fn ground_analysis(h: &LocalHamiltonian) -> Result<GroundAnalysis> {
    let full = assemble(h)?;
    let eig = hermitian_eigen(full.matrix());
    let lambda0 = eig.values[0];
    let lambda1 = eig.values.get(1).copied().unwrap_or(lambda0);
    let gap = (lambda1 - lambda0).max(0.0);
    let unique = gap > DEGENERACY_TOL;
    let ground = unique.then(|| {
        let v: DVector<_> = eig.vectors.column(0).into_owned();
        PureState::from_vector_unchecked(v.normalize())
    });
    Ok(GroundAnalysis {
        lambda0,
        lambda1,
        gap,
        ground_dimension: eig.values.iter().filter(|&&v| v - lambda0 <= DEGENERACY_TOL).count(),
        unique,
        ground,
    })
}
