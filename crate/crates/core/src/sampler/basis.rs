use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qcore::{Pauli, PauliString, QubitSubset};

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    /// The digit used in Pauli codes (`X=1, Y=2, Z=3`).
    pub fn pauli_digit(self) -> u64 {
        match self {
            Basis::X => 1,
            Basis::Y => 2,
            Basis::Z => 3,
        }
    }

    fn from_digit(d: u64) -> Basis {
        match d {
            1 => Basis::X,
            2 => Basis::Y,
            3 => Basis::Z,
            _ => unreachable!("basis digit {d}"),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }

    pub fn pauli(self) -> Pauli {
        Pauli::from_index(self.pauli_digit() as usize)
    }
}

/// Largest register a [`BasisString`] can describe.
pub const MAX_BASIS_QUBITS: usize = 32;

/// A word over `{X, Y, Z}`; every qubit is measured.
///
/// Stored as the Pauli code of the matching Pauli string (two bits per
/// qubit, qubit 0 most significant), so comparisons follow the
/// lexicographic order `X < Y < Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisString {
    n_qubits: usize,
    code: u64,
}

impl BasisString {
    pub fn new(letters: &[Basis]) -> Result<Self> {
        if letters.len() > MAX_BASIS_QUBITS {
            return Err(Error::TooManyQubits {
                n: letters.len(),
                max: MAX_BASIS_QUBITS,
            });
        }
        let code = letters
            .iter()
            .fold(0u64, |acc, b| (acc << 2) | b.pauli_digit());
        Ok(Self {
            n_qubits: letters.len(),
            code,
        })
    }

    pub fn uniform(n_qubits: usize, b: Basis) -> Result<Self> {
        Self::new(&vec![b; n_qubits])
    }

    pub(crate) fn from_code_unchecked(n_qubits: usize, code: u64) -> Self {
        Self { n_qubits, code }
    }

    /// The `index`-th basis string in lexicographic order (`X < Y < Z`).
    pub fn from_lex_index(mut index: u64, n_qubits: usize) -> Self {
        let mut code = 0u64;
        for q in 0..n_qubits {
            let digit = index % 3 + 1;
            index /= 3;
            code |= digit << (2 * q);
        }
        Self { n_qubits, code }
    }

    /// Position in the lexicographic enumeration of all `3^n` strings.
    pub fn lex_index(&self) -> u64 {
        (0..self.n_qubits).fold(0u64, |acc, q| acc * 3 + self.digit(q) - 1)
    }

    fn digit(&self, q: usize) -> u64 {
        (self.code >> (2 * (self.n_qubits - 1 - q))) & 3
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn letter(&self, q: usize) -> Basis {
        Basis::from_digit(self.digit(q))
    }

    pub fn letters(&self) -> Vec<Basis> {
        (0..self.n_qubits).map(|q| self.letter(q)).collect()
    }

    /// Code of the all-non-identity Pauli string measured by this basis.
    pub fn pauli_code(&self) -> u64 {
        self.code
    }

    pub fn to_pauli(&self) -> PauliString {
        PauliString::new(self.letters().into_iter().map(Basis::pauli).collect())
    }

    /// The letters on `subset`, in subset order.
    pub fn restrict(&self, subset: &QubitSubset) -> BasisString {
        let code = subset
            .indices()
            .iter()
            .fold(0u64, |acc, &q| (acc << 2) | self.digit(q));
        BasisString {
            n_qubits: subset.len(),
            code,
        }
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for BasisString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                'X' | 'x' => Ok(Basis::X),
                'Y' | 'y' => Ok(Basis::Y),
                'Z' | 'z' => Ok(Basis::Z),
                other => Err(Error::Parse(format!(
                    "basis letter {other:?} in {s:?}; only X, Y, Z are measurable"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        BasisString::new(&letters)
    }
}

impl Serialize for BasisString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One shot: the basis used and the outcome bits (bit 0 for the `+1`
/// eigenvalue), qubit 0 in the most significant position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeasurementRecord {
    pub basis: BasisString,
    pub outcome: u64,
}

impl MeasurementRecord {
    pub fn n_qubits(&self) -> usize {
        self.basis.n_qubits()
    }

    pub fn outcome_string(&self) -> String {
        format_outcome(self.outcome, self.n_qubits())
    }
}

pub(crate) fn format_outcome(outcome: u64, n: usize) -> String {
    (0..n)
        .map(|q| if (outcome >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub(crate) fn parse_outcome(s: &str) -> Result<u64> {
    if s.len() > 64 {
        return Err(Error::Parse(format!("outcome {s:?} is too long")));
    }
    s.chars().try_fold(0u64, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        other => Err(Error::Parse(format!("outcome bit {other:?} in {s:?}"))),
    })
}

/// Bits of `value` at `indices` (qubit positions in an `n`-bit word),
/// packed in the given order.
pub(crate) fn gather_bits(value: u64, n: usize, indices: &[usize]) -> u64 {
    indices
        .iter()
        .fold(0u64, |acc, &q| (acc << 1) | ((value >> (n - 1 - q)) & 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_order_and_parse() {
        let all: Vec<String> = (0..9)
            .map(|i| BasisString::from_lex_index(i, 2).to_string())
            .collect();
        assert_eq!(all, ["XX", "XY", "XZ", "YX", "YY", "YZ", "ZX", "ZY", "ZZ"]);
        for i in 0..27 {
            let b = BasisString::from_lex_index(i, 3);
            assert_eq!(b.lex_index(), i);
            assert_eq!(b.to_string().parse::<BasisString>().unwrap(), b);
        }
        assert!("XIZ".parse::<BasisString>().is_err());
        let a: BasisString = "XZ".parse().unwrap();
        let b: BasisString = "YX".parse().unwrap();
        assert!(a < b);
    }

    #[test]
    fn pauli_code_matches_pauli_string() {
        let b: BasisString = "XYZ".parse().unwrap();
        assert_eq!(b.pauli_code() as usize, b.to_pauli().code());
    }

    #[test]
    fn restriction_and_outcomes() {
        let b: BasisString = "XYZ".parse().unwrap();
        let s = QubitSubset::new(vec![0, 2], 3).unwrap();
        assert_eq!(b.restrict(&s).to_string(), "XZ");
        let o = parse_outcome("010").unwrap();
        assert_eq!(gather_bits(o, 3, s.indices()), 0);
        assert_eq!(format_outcome(o, 3), "010");
    }
}
