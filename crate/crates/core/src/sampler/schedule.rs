use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{BasisString, MAX_BASIS_QUBITS};
use super::{counter_rng, streams};
use crate::error::{Error, Result};

/// Default cap on schedule length (shots held in memory at once).
pub const DEFAULT_SHOT_LIMIT: u64 = 50_000_000;

/// How a schedule was generated; stored in shot-file headers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleDescriptor {
    /// Every basis string `m` times, lexicographic, repetitions adjacent.
    Exhaustive { m: u64 },
    /// Uniformly random basis strings drawn from `seed`.
    Random { repetitions: u64, seed: u64 },
    Fixed { basis: BasisString, shots: u64 },
    Custom { shots: u64 },
}

/// An ordered list of bases, one per shot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    n_qubits: usize,
    bases: Vec<BasisString>,
    descriptor: ScheduleDescriptor,
}

impl Schedule {
    pub fn fixed(basis: BasisString, shots: usize) -> Self {
        Self {
            n_qubits: basis.n_qubits(),
            bases: vec![basis; shots],
            descriptor: ScheduleDescriptor::Fixed {
                basis,
                shots: shots as u64,
            },
        }
    }

    pub fn from_bases(n_qubits: usize, bases: Vec<BasisString>) -> Result<Self> {
        if let Some(b) = bases.iter().find(|b| b.n_qubits() != n_qubits) {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                found: b.n_qubits(),
            });
        }
        let shots = bases.len() as u64;
        Ok(Self {
            n_qubits,
            bases,
            descriptor: ScheduleDescriptor::Custom { shots },
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn bases(&self) -> &[BasisString] {
        &self.bases
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn descriptor(&self) -> &ScheduleDescriptor {
        &self.descriptor
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("schedule needs at least one qubit".into()));
    }
    if n > MAX_BASIS_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: MAX_BASIS_QUBITS,
        });
    }
    Ok(())
}

/// Each of the `3^n` basis strings `m` times, under [`DEFAULT_SHOT_LIMIT`].
pub fn exhaustive_schedule(n: usize, m: u64) -> Result<Schedule> {
    exhaustive_schedule_with_limit(n, m, DEFAULT_SHOT_LIMIT)
}

pub fn exhaustive_schedule_with_limit(n: usize, m: u64, limit: u64) -> Result<Schedule> {
    check_n(n)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let total = 3u64
        .checked_pow(n as u32)
        .and_then(|b| b.checked_mul(m))
        .unwrap_or(u64::MAX);
    if total > limit {
        return Err(Error::BudgetExceeded {
            requested: total,
            limit,
        });
    }
    let n_bases = 3u64.pow(n as u32);
    let bases = (0..n_bases)
        .flat_map(|i| std::iter::repeat_n(BasisString::from_lex_index(i, n), m as usize))
        .collect();
    Ok(Schedule {
        n_qubits: n,
        bases,
        descriptor: ScheduleDescriptor::Exhaustive { m },
    })
}

/// `repetitions` independent uniformly random basis strings. Letter `q` of
/// repetition `r` comes from word `r*n + q` of the schedule stream.
pub fn random_schedule(n: usize, repetitions: u64, seed: u64) -> Result<Schedule> {
    check_n(n)?;
    if repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
    }
    if repetitions > DEFAULT_SHOT_LIMIT {
        return Err(Error::BudgetExceeded {
            requested: repetitions,
            limit: DEFAULT_SHOT_LIMIT,
        });
    }
    const CHUNK: u64 = 4096;
    let chunks = repetitions.div_ceil(CHUNK);
    let bases = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(repetitions);
            let mut rng = counter_rng(seed, streams::SCHEDULE, start * n as u64);
            (start..end).map(move |_| {
                let code = (0..n).fold(0u64, |acc, _| {
                    let letter = ((rng.next_u64() as u128 * 3) >> 64) as u64;
                    (acc << 2) | (letter + 1)
                });
                BasisString::from_code_unchecked(n, code)
            })
        })
        .collect();
    Ok(Schedule {
        n_qubits: n,
        bases,
        descriptor: ScheduleDescriptor::Random { repetitions, seed },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::Basis;

    #[test]
    fn exhaustive_examples() {
        let s = exhaustive_schedule(1, 2).unwrap();
        let names: Vec<String> = s.bases().iter().map(|b| b.to_string()).collect();
        assert_eq!(names, ["X", "X", "Y", "Y", "Z", "Z"]);
        let s = exhaustive_schedule(2, 1).unwrap();
        assert_eq!(s.len(), 9);
        assert!(s.bases().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(exhaustive_schedule(3, 5).unwrap().len(), 135);
        assert!(matches!(
            exhaustive_schedule_with_limit(3, 5, 100),
            Err(Error::BudgetExceeded { requested: 135, limit: 100 })
        ));
    }

    #[test]
    fn random_examples() {
        assert!(random_schedule(3, 0, 1).is_err());
        assert_eq!(random_schedule(3, 50, 4).unwrap(), random_schedule(3, 50, 4).unwrap());
        assert_ne!(random_schedule(3, 50, 4).unwrap(), random_schedule(3, 50, 5).unwrap());
        let s = random_schedule(8, 100_000, 2024).unwrap();
        for q in 0..8 {
            for b in Basis::ALL {
                let f = s.bases().iter().filter(|x| x.letter(q) == b).count() as f64 / 1e5;
                assert!((f - 1.0 / 3.0).abs() < 0.01, "qubit {q} {b:?} {f}");
            }
        }
    }

    #[test]
    fn random_letters_are_position_keyed() {
        // a prefix of a longer schedule is the shorter schedule
        let long = random_schedule(5, 10_000, 3).unwrap();
        let short = random_schedule(5, 5_000, 3).unwrap();
        assert_eq!(&long.bases()[..5_000], short.bases());
    }
}
