use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A strictly increasing list of qubit positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitSubset {
    indices: Vec<usize>,
}

impl QubitSubset {
    /// Sorts `indices` and checks they are distinct and below `n_qubits`.
    pub fn new(mut indices: Vec<usize>, n_qubits: usize) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidSubset(format!("duplicate qubit {}", w[0])));
        }
        if let Some(&bad) = indices.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::InvalidSubset(format!(
                "qubit {bad} out of range for {n_qubits} qubits"
            )));
        }
        Ok(Self { indices })
    }

    pub fn all(n_qubits: usize) -> Self {
        Self {
            indices: (0..n_qubits).collect(),
        }
    }

    pub fn singleton(q: usize) -> Self {
        Self { indices: vec![q] }
    }

    /// Every `k`-element subset of `0..n`, in lexicographic order.
    pub fn k_subsets(n: usize, k: usize) -> Vec<QubitSubset> {
        let mut out = Vec::new();
        if k > n {
            return out;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(QubitSubset {
                indices: idx.clone(),
            });
            let Some(i) = (0..k).rev().find(|&i| idx[i] < i + n - k) else {
                return out;
            };
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    /// Parses `"0,3,4"`.
    pub fn parse(s: &str, n_qubits: usize) -> Result<Self> {
        let indices = s
            .split(',')
            .map(|t| t.trim())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad qubit index {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices, n_qubits)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.indices.binary_search(&q).is_ok()
    }

    pub fn is_subset_of(&self, other: &QubitSubset) -> bool {
        self.indices.iter().all(|&q| other.contains(q))
    }

    /// Bits of a computational-basis index (qubit 0 most significant) that
    /// belong to this subset.
    pub fn index_mask(&self, n_qubits: usize) -> usize {
        self.indices
            .iter()
            .fold(0, |m, &q| m | (1usize << (n_qubits - 1 - q)))
    }

    /// Checks the subset fits in `n_qubits`.
    pub fn check_range(&self, n_qubits: usize) -> Result<()> {
        match self.indices.last() {
            Some(&q) if q >= n_qubits => Err(Error::InvalidSubset(format!(
                "qubit {q} out of range for {n_qubits} qubits"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for QubitSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|q| q.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Binomial coefficient, exact for the sizes used here.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_out_of_range() {
        assert!(QubitSubset::new(vec![1, 1], 3).is_err());
        assert!(QubitSubset::new(vec![3], 3).is_err());
        assert_eq!(QubitSubset::new(vec![2, 0], 3).unwrap().indices(), &[0, 2]);
    }

    #[test]
    fn k_subsets_counts() {
        for n in 0..7 {
            for k in 0..=n {
                let subs = QubitSubset::k_subsets(n, k);
                assert_eq!(subs.len() as u64, binomial(n, k), "n={n} k={k}");
                assert!(subs.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert_eq!(binomial(8, 2), 28);
    }

    #[test]
    fn parse_and_display() {
        let s = QubitSubset::parse("3, 0", 4).unwrap();
        assert_eq!(s.to_string(), "0,3");
        assert_eq!(s.index_mask(4), 0b1001);
    }
}
