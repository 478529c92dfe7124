use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qcore::pauli::spread_bits;
use crate::qcore::PauliString;
use crate::sampler::{MeasurementRecord, ScheduleDescriptor, ShotStore};

/// Register size above which full-state accumulation (`4^n` coefficients)
/// is refused.
pub const MAX_FULL_QUBITS: usize = 8;

/// Signed outcome sums `mu_Q` and sample counts for every Pauli string `Q`,
/// indexed by Pauli code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliAccumulator {
    n_qubits: usize,
    mu: Vec<i64>,
    counts: Vec<u64>,
}

/// In-place Walsh-Hadamard transform: `f[T] = sum_o h[o] (-1)^{|o & T|}`.
fn walsh_hadamard(v: &mut [i64]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

impl PauliAccumulator {
    pub fn new(n_qubits: usize) -> Self {
        let len = 1usize << (2 * n_qubits);
        Self {
            n_qubits,
            mu: vec![0; len],
            counts: vec![0; len],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn mu(&self, code: usize) -> i64 {
        self.mu[code]
    }

    pub fn count(&self, code: usize) -> u64 {
        self.counts[code]
    }

    /// Number of records accumulated.
    pub fn total(&self) -> u64 {
        self.counts[0]
    }

    /// Adds one basis' outcome histogram: every record measured in the
    /// basis with Pauli code `basis_code` counts toward each Pauli that
    /// agrees with the basis on its support.
    pub(crate) fn add_histogram(&mut self, basis_code: usize, histogram: &[u64]) {
        let n = self.n_qubits;
        let total: u64 = histogram.iter().sum();
        if total == 0 {
            return;
        }
        let mut f: Vec<i64> = histogram.iter().map(|&c| c as i64).collect();
        walsh_hadamard(&mut f);
        for (t, &signed) in f.iter().enumerate() {
            let q = basis_code & (spread_bits(t) * 3);
            self.mu[q] += signed;
            self.counts[q] += total;
        }
        debug_assert!(histogram.len() == 1 << n);
    }

    fn merge(mut self, other: &PauliAccumulator) -> Self {
        for (a, b) in self.mu.iter_mut().zip(&other.mu) {
            *a += b;
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self
    }

    /// Accumulates arbitrary records over `n` qubits.
    pub fn from_records(records: &[MeasurementRecord], n: usize) -> Result<Self> {
        if n > MAX_FULL_QUBITS {
            return Err(Error::TooManyQubits {
                n,
                max: MAX_FULL_QUBITS,
            });
        }
        if let Some(r) = records.iter().find(|r| r.n_qubits() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.n_qubits(),
            });
        }
        let mut hist: HashMap<u64, Vec<u64>> = HashMap::new();
        for r in records {
            hist.entry(r.basis.pauli_code()).or_insert_with(|| vec![0; 1 << n])[r.outcome as usize] +=
                1;
        }
        let mut bases: Vec<(u64, Vec<u64>)> = hist.into_iter().collect();
        bases.sort_unstable_by_key(|(b, _)| *b);
        // integer sums, so the merge order does not matter
        Ok(bases
            .par_iter()
            .fold(
                || PauliAccumulator::new(n),
                |mut acc, (b, h)| {
                    acc.add_histogram(*b as usize, h);
                    acc
                },
            )
            .reduce(|| PauliAccumulator::new(n), |a, b| a.merge(&b)))
    }

    /// Checks the exhaustive-schedule count identity `count_Q = m 3^{n-w}`.
    pub fn check_exhaustive(&self, m: u64) -> Result<()> {
        let n = self.n_qubits;
        for code in 0..self.counts.len() {
            let w = PauliString::from_code(code, n).weight();
            let expected = m * 3u64.pow((n - w) as u32);
            if self.counts[code] != expected {
                return Err(Error::ScheduleMismatch(format!(
                    "{} has {} samples, expected m*3^(n-w) = {expected}",
                    PauliString::from_code(code, n),
                    self.counts[code]
                )));
            }
            debug_assert!(self.mu[code].unsigned_abs() <= self.counts[code]);
        }
        Ok(())
    }
}

/// Accumulates a shot store; stores produced by an exhaustive schedule are
/// checked against the count identity.
pub fn accumulate(store: &ShotStore) -> Result<PauliAccumulator> {
    let acc = PauliAccumulator::from_records(store.records(), store.n_qubits())?;
    if let ScheduleDescriptor::Exhaustive { m } = store.schedule() {
        acc.check_exhaustive(*m)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::PureState;
    use crate::sampler::{execute, exhaustive_schedule, random_schedule, BasisString};

    fn rec(basis: &str, outcome: u64) -> MeasurementRecord {
        MeasurementRecord {
            basis: basis.parse::<BasisString>().unwrap(),
            outcome,
        }
    }

    /// Oracle: loop over records and Pauli strings directly.
    fn brute(records: &[MeasurementRecord], n: usize) -> PauliAccumulator {
        let mut acc = PauliAccumulator::new(n);
        for code in 0..1usize << (2 * n) {
            let q = PauliString::from_code(code, n);
            for r in records {
                let matches = (0..n).all(|i| {
                    q.letters()[i].index() == 0 || q.letters()[i] == r.basis.letter(i).pauli()
                });
                if matches {
                    let ones = q
                        .support()
                        .iter()
                        .filter(|&&i| (r.outcome >> (n - 1 - i)) & 1 == 1)
                        .count();
                    acc.mu[code] += if ones % 2 == 0 { 1 } else { -1 };
                    acc.counts[code] += 1;
                }
            }
        }
        acc
    }

    #[test]
    fn hand_example() {
        let records = [rec("X", 0), rec("X", 0), rec("Y", 1), rec("Y", 0), rec("Z", 0), rec("Z", 1)];
        let acc = PauliAccumulator::from_records(&records, 1).unwrap();
        assert_eq!((acc.mu(0), acc.mu(1), acc.mu(2), acc.mu(3)), (6, 2, 0, 0));
        assert_eq!(acc, brute(&records, 1));
        acc.check_exhaustive(2).unwrap();
    }

    #[test]
    fn matches_brute_force_oracle() {
        let psi = PureState::ghz(3);
        let store = execute(&psi, &random_schedule(3, 400, 6).unwrap(), 1).unwrap();
        let acc = PauliAccumulator::from_records(store.records(), 3).unwrap();
        assert_eq!(acc, brute(store.records(), 3));
    }

    #[test]
    fn exhaustive_counts() {
        let psi = PureState::ghz(2);
        let store = execute(&psi, &exhaustive_schedule(2, 7).unwrap(), 3).unwrap();
        let acc = accumulate(&store).unwrap();
        assert_eq!(acc.mu(0), 7 * 9);
        assert_eq!(acc.count("XI".parse::<PauliString>().unwrap().code()), 7 * 3);
        assert!(acc.check_exhaustive(8).is_err());
    }
}
