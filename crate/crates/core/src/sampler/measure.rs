use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::{Basis, BasisString, MeasurementRecord};
use super::schedule::Schedule;
use super::store::ShotStore;
use super::{counter_rng, streams, unit_f64};
use crate::error::{Error, Result};
use crate::qcore::{CMatrix, DensityMatrix, PureState};

/// Negative probabilities above this are rounding noise and are clipped.
const CLIP_TOL: f64 = 1e-12;

/// Rows of the single-qubit unitary taking the basis eigenvectors to
/// `|0>` (`+1`) and `|1>` (`-1`).
fn rotation(b: Basis) -> Option<[[Complex64; 2]; 2]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x, 0.0);
    match b {
        Basis::Z => None,
        Basis::X => Some([[r(h), r(h)], [r(h), r(-h)]]),
        // H S^dagger
        Basis::Y => Some([[r(h), Complex64::new(0.0, -h)], [r(h), Complex64::new(0.0, h)]]),
    }
}

fn rotate_vector(amps: &mut [Complex64], n: usize, basis: &BasisString) {
    for q in 0..n {
        let Some(v) = rotation(basis.letter(q)) else { continue };
        let bit = 1usize << (n - 1 - q);
        for i in 0..amps.len() {
            if i & bit == 0 {
                let (a, b) = (amps[i], amps[i | bit]);
                amps[i] = v[0][0] * a + v[0][1] * b;
                amps[i | bit] = v[1][0] * a + v[1][1] * b;
            }
        }
    }
}

/// Diagonal of `V rho V^dagger` for the product rotation `V`.
fn rotated_diagonal(rho: &CMatrix, n: usize, basis: &BasisString) -> Vec<f64> {
    let mut m = rho.clone();
    let dim = m.nrows();
    for q in 0..n {
        let Some(v) = rotation(basis.letter(q)) else { continue };
        let bit = 1usize << (n - 1 - q);
        for c in 0..dim {
            for i in (0..dim).filter(|i| i & bit == 0) {
                let (a, b) = (m[(i, c)], m[(i | bit, c)]);
                m[(i, c)] = v[0][0] * a + v[0][1] * b;
                m[(i | bit, c)] = v[1][0] * a + v[1][1] * b;
            }
        }
        for r in 0..dim {
            for j in (0..dim).filter(|j| j & bit == 0) {
                let (a, b) = (m[(r, j)], m[(r, j | bit)]);
                m[(r, j)] = a * v[0][0].conj() + b * v[0][1].conj();
                m[(r, j | bit)] = a * v[1][0].conj() + b * v[1][1].conj();
            }
        }
    }
    (0..dim).map(|i| m[(i, i)].re).collect()
}

fn clip_and_normalize(mut p: Vec<f64>) -> Result<Vec<f64>> {
    for x in p.iter_mut() {
        if *x < -CLIP_TOL {
            return Err(Error::InvalidState(format!(
                "outcome probability {x:.3e} is negative beyond rounding"
            )));
        }
        *x = x.max(0.0);
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!(
            "outcome probabilities sum to {total}"
        )));
    }
    p.iter_mut().for_each(|x| *x /= total);
    Ok(p)
}

/// States that can be measured in a Pauli product basis.
pub trait Measurable: Sync {
    fn n_qubits(&self) -> usize;

    /// `p(b) = Tr(rho ⊗_i Π_{basis_i, b_i})`, indexed by outcome bits.
    fn outcome_distribution(&self, basis: &BasisString) -> Result<Vec<f64>>;
}

fn check_basis(n: usize, basis: &BasisString) -> Result<()> {
    if basis.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: basis.n_qubits(),
        });
    }
    Ok(())
}

impl Measurable for PureState {
    fn n_qubits(&self) -> usize {
        PureState::n_qubits(self)
    }

    fn outcome_distribution(&self, basis: &BasisString) -> Result<Vec<f64>> {
        let n = PureState::n_qubits(self);
        check_basis(n, basis)?;
        let mut amps: Vec<Complex64> = self.amplitudes().iter().copied().collect();
        rotate_vector(&mut amps, n, basis);
        clip_and_normalize(amps.iter().map(|a| a.norm_sqr()).collect())
    }
}

impl Measurable for DensityMatrix {
    fn n_qubits(&self) -> usize {
        DensityMatrix::n_qubits(self)
    }

    fn outcome_distribution(&self, basis: &BasisString) -> Result<Vec<f64>> {
        let n = DensityMatrix::n_qubits(self);
        check_basis(n, basis)?;
        clip_and_normalize(rotated_diagonal(self.matrix(), n, basis))
    }
}

pub fn outcome_distribution(state: &impl Measurable, basis: &BasisString) -> Result<Vec<f64>> {
    state.outcome_distribution(basis)
}

/// Inverse-CDF sampler with one cumulative table per basis.
#[derive(Debug, Clone)]
pub struct OutcomeSampler {
    cdfs: HashMap<BasisString, Vec<f64>>,
}

impl OutcomeSampler {
    /// Precomputes the outcome tables of every basis in `bases`.
    pub fn new(state: &impl Measurable, bases: impl IntoIterator<Item = BasisString>) -> Result<Self> {
        let mut unique: Vec<BasisString> = bases.into_iter().collect();
        unique.sort_unstable();
        unique.dedup();
        let cdfs = unique
            .into_par_iter()
            .map(|b| {
                let p = state.outcome_distribution(&b)?;
                let mut acc = 0.0;
                let cdf = p
                    .iter()
                    .map(|x| {
                        acc += x;
                        acc
                    })
                    .collect();
                Ok((b, cdf))
            })
            .collect::<Result<HashMap<_, _>>>()?;
        Ok(Self { cdfs })
    }

    /// The outcome for uniform variate `u` in `[0, 1)`. Outcomes of zero
    /// probability are never returned.
    pub fn draw(&self, basis: &BasisString, u: f64) -> u64 {
        let cdf = &self.cdfs[basis];
        let i = cdf.partition_point(|&c| c <= u);
        if i < cdf.len() {
            return i as u64;
        }
        // u above the rounded total: fall back to the last outcome with mass
        let mut j = cdf.len() - 1;
        while j > 0 && cdf[j] == cdf[j - 1] {
            j -= 1;
        }
        j as u64
    }
}

const CHUNK: usize = 4096;

/// Runs `schedule` against `state`; shot `i` uses the `i`-th word of the
/// outcome stream of `seed`.
pub fn execute(state: &impl Measurable, schedule: &Schedule, seed: u64) -> Result<ShotStore> {
    let n = state.n_qubits();
    if schedule.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: schedule.n_qubits(),
        });
    }
    let sampler = OutcomeSampler::new(state, schedule.bases().iter().copied())?;
    let bases = schedule.bases();
    let records: Vec<MeasurementRecord> = bases
        .par_chunks(CHUNK)
        .enumerate()
        .flat_map_iter(|(ci, chunk)| {
            let mut rng = counter_rng(seed, streams::OUTCOMES, (ci * CHUNK) as u64);
            let sampler = &sampler;
            chunk.iter().map(move |b| MeasurementRecord {
                basis: *b,
                outcome: sampler.draw(b, unit_f64(&mut rng)),
            })
        })
        .collect();
    let mut store = ShotStore::new(n, seed, schedule.descriptor().clone());
    store.extend(records)?;
    Ok(store)
}

/// `shots` i.i.d. measurements of `state` in one basis.
pub fn sample(
    state: &impl Measurable,
    basis: &BasisString,
    shots: usize,
    seed: u64,
) -> Result<Vec<MeasurementRecord>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let schedule = Schedule::fixed(*basis, shots);
    Ok(execute(state, &schedule, seed)?.into_records())
}

/// Frequencies of `samples` over the alphabet `0..alphabet`.
pub fn empirical_distribution(samples: &[u64], alphabet: usize) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("empirical distribution of no samples".into()));
    }
    let mut counts = vec![0u64; alphabet];
    for &s in samples {
        let slot = counts.get_mut(s as usize).ok_or_else(|| {
            Error::InvalidArgument(format!("sample {s} outside alphabet of size {alphabet}"))
        })?;
        *slot += 1;
    }
    let total = samples.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::QubitSubset;
    use crate::sampler::{exhaustive_schedule, random_schedule, restrict_record};
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b(s: &str) -> BasisString {
        s.parse().unwrap()
    }

    fn plus() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)]).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn distribution_examples() {
        let zero = PureState::zero(1);
        assert!(close(&outcome_distribution(&zero, &b("Z")).unwrap(), &[1.0, 0.0], 1e-15));
        assert!(close(&outcome_distribution(&zero, &b("X")).unwrap(), &[0.5, 0.5], 1e-15));
        let ghz = PureState::ghz(2);
        let p = outcome_distribution(&ghz, &b("XX")).unwrap();
        assert!(close(&p, &[0.5, 0.0, 0.0, 0.5], 1e-15));
        assert!(outcome_distribution(&ghz, &b("X")).is_err());
    }

    /// Oracle: `Tr(rho Π)` with the projector built from explicit
    /// eigenvectors and Kronecker products.
    fn projector_oracle(rho: &DensityMatrix, basis: &BasisString) -> Vec<f64> {
        use crate::qcore::linalg::kron;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let vec_for = |l: Basis, bit: usize| -> CMatrix {
            let (a, c) = match (l, bit) {
                (Basis::Z, 0) => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
                (Basis::Z, _) => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
                (Basis::X, 0) => (Complex64::new(h, 0.0), Complex64::new(h, 0.0)),
                (Basis::X, _) => (Complex64::new(h, 0.0), Complex64::new(-h, 0.0)),
                (Basis::Y, 0) => (Complex64::new(h, 0.0), Complex64::new(0.0, h)),
                (Basis::Y, _) => (Complex64::new(h, 0.0), Complex64::new(0.0, -h)),
            };
            let v = CMatrix::from_column_slice(2, 1, &[a, c]);
            &v * v.adjoint()
        };
        let n = basis.n_qubits();
        (0..1usize << n)
            .map(|o| {
                let mut proj = CMatrix::identity(1, 1);
                for q in 0..n {
                    proj = kron(&proj, &vec_for(basis.letter(q), (o >> (n - 1 - q)) & 1));
                }
                (rho.matrix() * proj).trace().re
            })
            .collect()
    }

    #[test]
    fn density_distribution_matches_projector_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = DensityMatrix::random(3, 2, &mut rng);
        for i in 0..27 {
            let basis = BasisString::from_lex_index(i, 3);
            let p = outcome_distribution(&rho, &basis).unwrap();
            assert!(close(&p, &projector_oracle(&rho, &basis), 1e-12));
        }
        // pure and dense paths agree
        let psi = PureState::random(3, &mut rng);
        let dm = psi.density_matrix();
        let basis = b("YXZ");
        let a = outcome_distribution(&psi, &basis).unwrap();
        let c = outcome_distribution(&dm, &basis).unwrap();
        assert!(close(&a, &c, 1e-12));
    }

    #[test]
    fn sample_examples() {
        let zero = PureState::zero(1);
        let recs = sample(&zero, &b("Z"), 100, 3).unwrap();
        assert!(recs.iter().all(|r| r.outcome == 0));
        assert_eq!(sample(&zero, &b("X"), 50, 9).unwrap(), sample(&zero, &b("X"), 50, 9).unwrap());
        let recs = sample(&plus(), &b("X"), 10_000, 4).unwrap();
        assert!(recs.iter().all(|r| r.outcome == 0));
        assert!(sample(&zero, &b("Z"), 0, 1).is_err());
    }

    #[test]
    fn structural_zeros_never_sampled() {
        let ghz = PureState::ghz(3);
        let recs = sample(&ghz, &b("ZZZ"), 20_000, 8).unwrap();
        assert!(recs.iter().all(|r| r.outcome == 0 || r.outcome == 0b111));
    }

    #[test]
    fn restricted_ghz_marginal() {
        let ghz = PureState::ghz(3);
        let schedule = exhaustive_schedule(3, 4000).unwrap();
        let store = execute(&ghz, &schedule, 21).unwrap();
        let s = QubitSubset::new(vec![0, 1], 3).unwrap();
        let zz = b("ZZ");
        let outs: Vec<u64> = store
            .records()
            .iter()
            .map(|r| restrict_record(r, &s).unwrap())
            .filter(|(basis, _)| *basis == zz)
            .map(|(_, o)| o)
            .collect();
        let p = empirical_distribution(&outs, 4).unwrap();
        let tv: f64 = p
            .iter()
            .zip([0.5, 0.0, 0.0, 0.5])
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv <= 0.02, "tv {tv}");
    }

    #[test]
    fn execution_is_chunking_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = PureState::random(4, &mut rng);
        let schedule = random_schedule(4, 10_000, 17).unwrap();
        let a = execute(&psi, &schedule, 99).unwrap();
        // serial reference: shot i reads word i of the stream
        let sampler = OutcomeSampler::new(&psi, schedule.bases().iter().copied()).unwrap();
        for (i, rec) in a.records().iter().enumerate() {
            let word = counter_rng(99, streams::OUTCOMES, i as u64).next_u64();
            let u = (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            assert_eq!(rec.outcome, sampler.draw(&rec.basis, u));
        }
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| execute(&psi, &schedule, 99).unwrap());
        assert_eq!(a.records(), b.records());
    }

    #[test]
    fn empirical_examples() {
        assert_eq!(empirical_distribution(&[0, 0, 1, 1], 2).unwrap(), vec![0.5, 0.5]);
        assert_eq!(empirical_distribution(&[1], 3).unwrap(), vec![0.0, 1.0, 0.0]);
        assert!(empirical_distribution(&[], 2).is_err());
        let coin = sample(&plus(), &b("Z"), 100_000, 12).unwrap();
        let outs: Vec<u64> = coin.iter().map(|r| r.outcome).collect();
        let p = empirical_distribution(&outs, 2).unwrap();
        assert!((p[0] - 0.5).abs() < 0.01 && (p[1] - 0.5).abs() < 0.01);
    }
}
