//! Born-rule simulation of Pauli-basis measurements and shot persistence.
//!
//! Randomness is counter based: shot `i` of a run draws exactly one 64-bit
//! word at a fixed position of a ChaCha8 stream keyed by the seed, so
//! results do not depend on thread count or chunking.

mod basis;
mod measure;
mod schedule;
mod store;

pub use basis::{Basis, BasisString, MeasurementRecord};
pub use measure::{
    empirical_distribution, execute, outcome_distribution, sample, Measurable, OutcomeSampler,
};
pub use schedule::{
    exhaustive_schedule, exhaustive_schedule_with_limit, random_schedule, Schedule,
    ScheduleDescriptor, DEFAULT_SHOT_LIMIT,
};
pub use store::ShotStore;

use crate::error::Result;
use crate::qcore::QubitSubset;

/// Projects a record onto `subset`: the sub-basis and the sub-outcome, with
/// the first listed qubit most significant as usual.
pub fn restrict_record(
    record: &MeasurementRecord,
    subset: &QubitSubset,
) -> Result<(BasisString, u64)> {
    let n = record.basis.n_qubits();
    subset.check_range(n)?;
    Ok((
        record.basis.restrict(subset),
        basis::gather_bits(record.outcome, n, subset.indices()),
    ))
}

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream ids separating the independent uses of one seed.
pub(crate) mod streams {
    pub const OUTCOMES: u64 = 0;
    pub const SCHEDULE: u64 = 1;
}

/// Generator positioned at word `index` of stream `stream`; consecutive
/// `next_u64` calls continue from there.
pub(crate) fn counter_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    // two 32-bit words per u64
    rng.set_word_pos(2 * index as u128);
    rng
}

/// Uniform double in `[0, 1)` from the top 53 bits.
pub(crate) fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
