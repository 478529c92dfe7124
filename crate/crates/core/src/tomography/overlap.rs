use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::accumulate::PauliAccumulator;
use super::estimate::{estimate_expectations, PauliEstimate};
use crate::error::{Error, Result};
use crate::qcore::{binomial, HermitianOperator, PauliString, QubitSubset};
use crate::sampler::{BasisString, MeasurementRecord};

/// Largest marginal size handled by overlapping tomography.
pub const MAX_MARGINAL_QUBITS: usize = 8;

/// Per-subset bucket statistics from an overlapping-tomography run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapDiagnostics {
    /// Smallest number of records in any (subset, basis) bucket.
    pub min_bucket_count: u64,
    /// Per-bucket count the union-bound analysis asks for, when ε and δ are
    /// known. Reported only; the outer repetition count is authoritative.
    pub bucket_threshold: Option<f64>,
    pub below_threshold: Option<bool>,
}

/// Estimates of many marginals, keyed by subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalEstimateSet {
    pub n_qubits: usize,
    pub k: usize,
    pub repetitions: u64,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    #[serde(with = "estimate_map")]
    pub estimates: BTreeMap<QubitSubset, PauliEstimate>,
    pub diagnostics: Option<OverlapDiagnostics>,
}

impl MarginalEstimateSet {
    /// Exact marginals of an operator, as a noiseless estimate set.
    pub fn exact(
        n_qubits: usize,
        subsets: &[QubitSubset],
        marginal: impl Fn(&QubitSubset) -> Result<HermitianOperator>,
    ) -> Result<Self> {
        let k = subsets.iter().map(QubitSubset::len).max().unwrap_or(0);
        let estimates = subsets
            .iter()
            .map(|s| Ok((s.clone(), PauliEstimate::from_operator(&marginal(s)?))))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self {
            n_qubits,
            k,
            repetitions: 0,
            epsilon: None,
            delta: None,
            estimates,
            diagnostics: None,
        })
    }

    pub fn get(&self, subset: &QubitSubset) -> Option<HermitianOperator> {
        self.estimates.get(subset).map(PauliEstimate::operator)
    }

    pub fn subsets(&self) -> impl Iterator<Item = &QubitSubset> {
        self.estimates.keys()
    }

    /// Records the accuracy targets and evaluates the per-bucket diagnostic
    /// `(3+2√2) 10^k ln(2 C(n,k)/δ) / (3^k ε²)`.
    pub fn with_targets(mut self, epsilon: f64, delta: f64) -> Self {
        self.epsilon = Some(epsilon);
        self.delta = Some(delta);
        if let Some(d) = self.diagnostics.as_mut() {
            let k = self.k as i32;
            let c = binomial(self.n_qubits, self.k) as f64;
            let threshold = (3.0 + 2.0 * 2f64.sqrt()) * 10f64.powi(k) * (2.0 * c / delta).ln()
                / (3f64.powi(k) * epsilon * epsilon);
            d.bucket_threshold = Some(threshold);
            d.below_threshold = Some((d.min_bucket_count as f64) < threshold);
        }
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// JSON form: `{"0,3": {"II": 1.0, "IZ": ...}}`.
mod estimate_map {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<QubitSubset, PauliEstimate>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let out: BTreeMap<String, BTreeMap<String, f64>> = map
            .iter()
            .map(|(subset, est)| {
                let coeffs = est
                    .expectations()
                    .iter()
                    .enumerate()
                    .map(|(c, &v)| (PauliString::from_code(c, est.n_qubits()).to_string(), v))
                    .collect();
                (subset.to_string(), coeffs)
            })
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<QubitSubset, PauliEstimate>, D::Error> {
        let raw: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::deserialize(d)?;
        raw.into_iter()
            .map(|(key, coeffs)| {
                let indices = key
                    .split(',')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(D::Error::custom)?;
                let k = indices.len();
                let subset = QubitSubset::new(indices, usize::MAX).map_err(D::Error::custom)?;
                let mut e = vec![f64::NAN; 1 << (2 * k)];
                for (name, v) in coeffs {
                    let p: PauliString = name.parse().map_err(D::Error::custom)?;
                    if p.n_qubits() != k {
                        return Err(D::Error::custom(format!("{name} on subset {key}")));
                    }
                    e[p.code()] = v;
                }
                if e.iter().any(|v| v.is_nan()) {
                    return Err(D::Error::custom(format!("missing coefficients for {key}")));
                }
                let est = PauliEstimate::from_expectations(k, e).map_err(D::Error::custom)?;
                Ok((subset, est))
            })
            .collect()
    }
}

/// Bucketed restriction of every record to one subset: `counts[b][o]` for
/// lexicographic sub-basis `b` and sub-outcome `o`.
fn bucket(records: &[MeasurementRecord], n: usize, subset: &QubitSubset) -> Vec<Vec<u64>> {
    let k = subset.len();
    let mut counts = vec![vec![0u64; 1 << k]; 3usize.pow(k as u32)];
    let idx = subset.indices();
    for r in records {
        let code = r.basis.pauli_code();
        let (mut b, mut o) = (0usize, 0usize);
        for &q in idx {
            let shift = n - 1 - q;
            b = b * 3 + ((code >> (2 * shift)) & 3) as usize - 1;
            o = (o << 1) | ((r.outcome >> shift) & 1) as usize;
        }
        counts[b][o] += 1;
    }
    counts
}

/// Algorithm 1 post-processing: estimates every marginal in `subsets`
/// (default: all `k`-subsets) from randomly scheduled records.
pub fn overlapping_tomography(
    records: &[MeasurementRecord],
    n: usize,
    k: usize,
    subsets: Option<&[QubitSubset]>,
) -> Result<MarginalEstimateSet> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={n}")));
    }
    if k > MAX_MARGINAL_QUBITS {
        return Err(Error::TooManyQubits {
            n: k,
            max: MAX_MARGINAL_QUBITS,
        });
    }
    if let Some(r) = records.iter().find(|r| r.n_qubits() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: r.n_qubits(),
        });
    }
    let subsets: Vec<QubitSubset> = match subsets {
        Some(s) => s.to_vec(),
        None => QubitSubset::k_subsets(n, k),
    };
    for s in &subsets {
        s.check_range(n)?;
        if s.len() != k {
            return Err(Error::InvalidSubset(format!("subset {s} does not have {k} qubits")));
        }
    }
    let results: Vec<(QubitSubset, PauliEstimate, u64)> = subsets
        .par_iter()
        .map(|s| {
            let counts = bucket(records, n, s);
            let mut acc = PauliAccumulator::new(k);
            let mut min_count = u64::MAX;
            for (b, hist) in counts.iter().enumerate() {
                let total: u64 = hist.iter().sum();
                let basis = BasisString::from_lex_index(b as u64, k);
                if total == 0 {
                    return Err(Error::InsufficientData {
                        subset: s.to_string(),
                        basis: basis.to_string(),
                    });
                }
                min_count = min_count.min(total);
                acc.add_histogram(basis.pauli_code() as usize, hist);
            }
            Ok((s.clone(), estimate_expectations(&acc)?, min_count))
        })
        .collect::<Result<_>>()?;
    let min_bucket_count = results.iter().map(|r| r.2).min().unwrap_or(0);
    Ok(MarginalEstimateSet {
        n_qubits: n,
        k,
        repetitions: records.len() as u64,
        epsilon: None,
        delta: None,
        estimates: results.into_iter().map(|(s, e, _)| (s, e)).collect(),
        diagnostics: Some(OverlapDiagnostics {
            min_bucket_count,
            bucket_threshold: None,
            below_threshold: None,
        }),
    })
}
