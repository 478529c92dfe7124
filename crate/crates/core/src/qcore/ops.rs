use num_complex::Complex64;

use super::linalg::{frobenius_norm, trace_norm, CMatrix, ZERO};
use super::pauli::PauliString;
use super::state::{DensityMatrix, HermitianOperator, PureState};
use super::subset::QubitSubset;
use crate::error::{Error, Result};

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn pauli_matrix(p: &PauliString) -> HermitianOperator {
    HermitianOperator::from_matrix_unchecked(p.matrix())
}

/// `Tr(rho P)` without materializing `P`.
pub fn pauli_expectation(rho: &DensityMatrix, p: &PauliString) -> Result<f64> {
    check_dims(rho.n_qubits(), p.n_qubits())?;
    Ok(operator_pauli_trace(rho.matrix(), p).re)
}

pub(crate) fn operator_pauli_trace(m: &CMatrix, p: &PauliString) -> Complex64 {
    // P|j> = phase |j'>, so (M P)_{jj} = M_{j j'} phase
    (0..m.nrows())
        .map(|j| {
            let (row, phase) = p.apply_to_basis(j);
            m[(j, row)] * phase
        })
        .fold(ZERO, |a, b| a + b)
}

/// Scatter table: value `a` in `0..2^k` placed on the bits of `qubits`.
fn scatter_table(qubits: &[usize], n: usize) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|a| {
            qubits.iter().enumerate().fold(0usize, |acc, (i, &q)| {
                acc | (((a >> (k - 1 - i)) & 1) << (n - 1 - q))
            })
        })
        .collect()
}

/// Reduced matrix on `keep` of an arbitrary `2^n x 2^n` matrix.
pub(crate) fn partial_trace_matrix(m: &CMatrix, n: usize, keep: &QubitSubset) -> CMatrix {
    let complement: Vec<usize> = (0..n).filter(|&q| !keep.contains(q)).collect();
    let kept = scatter_table(keep.indices(), n);
    let traced = scatter_table(&complement, n);
    let dk = kept.len();
    CMatrix::from_fn(dk, dk, |a, b| {
        let (ra, rb) = (kept[a], kept[b]);
        traced
            .iter()
            .map(|&t| m[(ra | t, rb | t)])
            .fold(ZERO, |x, y| x + y)
    })
}

/// `m ⊗ I` with `m` acting on `support`, as a `2^n x 2^n` matrix.
pub fn embed_operator(m: &CMatrix, support: &QubitSubset, n: usize) -> Result<CMatrix> {
    support.check_range(n)?;
    check_dims(1 << support.len(), m.nrows())?;
    let complement: Vec<usize> = (0..n).filter(|&q| !support.contains(q)).collect();
    let kept = scatter_table(support.indices(), n);
    let rest = scatter_table(&complement, n);
    let mut out = CMatrix::zeros(1 << n, 1 << n);
    for &t in &rest {
        for (a, &ra) in kept.iter().enumerate() {
            for (b, &rb) in kept.iter().enumerate() {
                out[(ra | t, rb | t)] = m[(a, b)];
            }
        }
    }
    Ok(out)
}

fn check_keep(keep: &QubitSubset, n: usize) -> Result<()> {
    if keep.is_empty() {
        return Err(Error::InvalidSubset("cannot keep an empty subset".into()));
    }
    keep.check_range(n)
}

/// Reduced density matrix on `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &QubitSubset) -> Result<DensityMatrix> {
    check_keep(keep, rho.n_qubits())?;
    Ok(DensityMatrix::from_matrix_unchecked(partial_trace_matrix(
        rho.matrix(),
        rho.n_qubits(),
        keep,
    )))
}

/// Partial trace of a general Hermitian operator (estimates, perturbations).
pub fn partial_trace_operator(
    op: &HermitianOperator,
    keep: &QubitSubset,
) -> Result<HermitianOperator> {
    check_keep(keep, op.n_qubits())?;
    Ok(HermitianOperator::from_matrix_unchecked(
        partial_trace_matrix(op.matrix(), op.n_qubits(), keep),
    ))
}

/// Reduced state of a pure state without forming the full density matrix.
pub fn reduced_state(psi: &PureState, keep: &QubitSubset) -> Result<DensityMatrix> {
    let n = psi.n_qubits();
    check_keep(keep, n)?;
    let complement: Vec<usize> = (0..n).filter(|&q| !keep.contains(q)).collect();
    let kept = scatter_table(keep.indices(), n);
    let traced = scatter_table(&complement, n);
    let amps = psi.amplitudes();
    let dk = kept.len();
    let m = CMatrix::from_fn(dk, dk, |a, b| {
        traced
            .iter()
            .map(|&t| amps[kept[a] | t] * amps[kept[b] | t].conj())
            .fold(ZERO, |x, y| x + y)
    });
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// `||a - b||_1`, the sum of absolute eigenvalues of the difference.
pub fn trace_distance(
    a: &impl AsRef<HermitianOperator>,
    b: &impl AsRef<HermitianOperator>,
) -> Result<f64> {
    let (a, b) = (a.as_ref(), b.as_ref());
    check_dims(a.dim(), b.dim())?;
    Ok(trace_norm(&(a.matrix() - b.matrix())))
}

/// `||a - b||_2 = sqrt(Tr[(a-b)^dagger (a-b)])`.
pub fn frobenius_distance(
    a: &impl AsRef<HermitianOperator>,
    b: &impl AsRef<HermitianOperator>,
) -> Result<f64> {
    let (a, b) = (a.as_ref(), b.as_ref());
    check_dims(a.dim(), b.dim())?;
    Ok(frobenius_norm(&(a.matrix() - b.matrix())))
}

/// `<psi| rho |psi>`.
pub fn fidelity_pure(psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    check_dims(psi.dim(), rho.dim())?;
    let v = psi.amplitudes();
    Ok(v.dotc(&(rho.matrix() * v)).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{hermitian_eigenvalues, ONE};
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> DensityMatrix {
        DensityMatrix::new(CMatrix::from_diagonal(&DVector::from_vec(
            values.iter().map(|&v| c(v)).collect(),
        )))
        .unwrap()
    }

    #[test]
    fn pauli_matrix_examples() {
        let ii = pauli_matrix(&"II".parse().unwrap());
        assert_eq!(ii.matrix(), &CMatrix::identity(4, 4));
        // XY as the Kronecker product of the single-qubit matrices.
        let x: PauliString = "X".parse().unwrap();
        let y: PauliString = "Y".parse().unwrap();
        let xy = pauli_matrix(&"XY".parse().unwrap());
        assert_eq!(xy.matrix(), &x.matrix().kronecker(&y.matrix()));
    }

    #[test]
    fn expectation_matches_dense_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = DensityMatrix::random(3, 2, &mut rng);
        for code in 0..64 {
            let p = PauliString::from_code(code, 3);
            let dense = (rho.matrix() * p.matrix()).trace();
            let fast = pauli_expectation(&rho, &p).unwrap();
            assert!((dense.re - fast).abs() < 1e-12);
            assert!(dense.im.abs() < 1e-9);
        }
    }

    #[test]
    fn expectation_examples() {
        let zero = PureState::zero(1).density_matrix();
        assert_eq!(pauli_expectation(&zero, &"Z".parse().unwrap()).unwrap(), 1.0);
        let ghz = PureState::ghz(3).density_matrix();
        assert!(pauli_expectation(&ghz, &"ZII".parse().unwrap()).unwrap().abs() < 1e-15);
        // Oracle: direct Tr(rho P) with the dense XXX matrix.
        let p: PauliString = "XXX".parse().unwrap();
        let dense = (ghz.matrix() * p.matrix()).trace().re;
        assert!((dense - 1.0).abs() < 1e-12);
        assert!((pauli_expectation(&ghz, &p).unwrap() - 1.0).abs() < 1e-12);
        assert!(pauli_expectation(&ghz, &"XX".parse().unwrap()).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let plus = PureState::normalized(vec![ONE, ONE]).unwrap();
        let prod = PureState::zero(1).tensor(&plus).density_matrix();
        let red = partial_trace(&prod, &QubitSubset::singleton(1)).unwrap();
        assert!(frobenius_distance(&red, &plus.density_matrix()).unwrap() < 1e-14);

        for n in 2..=5 {
            let ghz = PureState::ghz(n).density_matrix();
            let mut target = vec![0.0; 1 << (n - 1)];
            target[0] = 0.5;
            target[(1 << (n - 1)) - 1] = 0.5;
            for skip in 0..n {
                let keep = QubitSubset::new((0..n).filter(|&q| q != skip).collect(), n).unwrap();
                let red = partial_trace(&ghz, &keep).unwrap();
                assert!(frobenius_distance(&red, &diag(&target)).unwrap() < 1e-14);
            }
        }

        let mixed = DensityMatrix::maximally_mixed(2);
        let red = partial_trace(&mixed, &QubitSubset::singleton(0)).unwrap();
        assert!(frobenius_distance(&red, &diag(&[0.5, 0.5])).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = DensityMatrix::maximally_mixed(2);
        let empty = QubitSubset::new(vec![], 2).unwrap();
        assert!(partial_trace(&rho, &empty).is_err());
        let big = QubitSubset::new(vec![3], 5).unwrap();
        assert!(partial_trace(&rho, &big).is_err());
    }

    #[test]
    fn qubit_order_fixture() {
        // |10> has qubit 0 in state 1: basis index 2 with qubit 0 as MSB.
        let psi = PureState::basis(2, 0b10);
        let rho = psi.density_matrix();
        let z0 = pauli_expectation(&rho, &"ZI".parse().unwrap()).unwrap();
        let z1 = pauli_expectation(&rho, &"IZ".parse().unwrap()).unwrap();
        assert_eq!((z0, z1), (-1.0, 1.0));
        let q0 = reduced_state(&psi, &QubitSubset::singleton(0)).unwrap();
        assert_eq!(q0.matrix()[(1, 1)], ONE);
    }

    #[test]
    fn reduced_state_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = PureState::random(4, &mut rng);
        let rho = psi.density_matrix();
        for keep in QubitSubset::k_subsets(4, 2) {
            let a = reduced_state(&psi, &keep).unwrap();
            let b = partial_trace(&rho, &keep).unwrap();
            assert!(frobenius_distance(&a, &b).unwrap() < 1e-13);
        }
    }

    #[test]
    fn distance_examples() {
        let zero = PureState::zero(1).density_matrix();
        let one = PureState::basis(1, 1).density_matrix();
        let half = DensityMatrix::maximally_mixed(1);
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 2.0).abs() < 1e-14);
        // Oracle: eigenvalues of diag(1,0) - diag(.5,.5) are +-0.5.
        let ev = hermitian_eigenvalues(&(zero.matrix() - half.matrix()));
        assert!((ev[0] + 0.5).abs() < 1e-15 && (ev[1] - 0.5).abs() < 1e-15);
        assert!((trace_distance(&zero, &half).unwrap() - 1.0).abs() < 1e-14);

        assert_eq!(frobenius_distance(&zero, &zero).unwrap(), 0.0);
        assert!((frobenius_distance(&zero, &one).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((frobenius_distance(&zero, &half).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(trace_distance(&zero, &DensityMatrix::maximally_mixed(2)).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let psi = PureState::zero(1);
        assert_eq!(fidelity_pure(&psi, &psi.density_matrix()).unwrap(), 1.0);
        assert_eq!(fidelity_pure(&psi, &PureState::basis(1, 1).density_matrix()).unwrap(), 0.0);
        assert!((fidelity_pure(&psi, &DensityMatrix::maximally_mixed(1)).unwrap() - 0.5).abs() < 1e-15);
    }
}
