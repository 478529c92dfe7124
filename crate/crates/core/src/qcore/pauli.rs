//! Pauli strings and the Pauli-basis transform of dense operators.
//!
//! A Pauli string on `n` qubits is indexed by its base-4 code
//! `sum_q letter_q * 4^(n-1-q)` with `I=0, X=1, Y=2, Z=3`, so qubit 0 is
//! the most significant digit (the same convention as computational-basis
//! indices).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linalg::{CMatrix, ONE, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Pauli {
        Self::ALL[i & 3]
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Action on a basis bit: returns (flipped bit, phase).
    #[inline]
    fn act(self, bit: usize) -> (usize, Complex64) {
        match self {
            Pauli::I => (bit, ONE),
            Pauli::X => (bit ^ 1, ONE),
            Pauli::Y => {
                if bit == 0 {
                    (1, Complex64::new(0.0, 1.0))
                } else {
                    (0, Complex64::new(0.0, -1.0))
                }
            }
            Pauli::Z => (bit, if bit == 0 { ONE } else { -ONE }),
        }
    }
}

/// A word over `{I, X, Y, Z}`; letter `q` acts on qubit `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            letters: vec![Pauli::I; n],
        }
    }

    pub fn from_code(code: usize, n: usize) -> Self {
        let letters = (0..n)
            .map(|q| Pauli::from_index(code >> (2 * (n - 1 - q))))
            .collect();
        Self { letters }
    }

    pub fn code(&self) -> usize {
        self.letters
            .iter()
            .fold(0usize, |acc, p| (acc << 2) | p.index())
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Positions of the non-identity letters.
    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Dense `2^n x 2^n` matrix, Kronecker product in qubit order.
    pub fn matrix(&self) -> CMatrix {
        let n = self.letters.len();
        let dim = 1usize << n;
        let mut m = CMatrix::from_element(dim, dim, ZERO);
        for col in 0..dim {
            let (row, phase) = self.apply_to_basis(col);
            m[(row, col)] = phase;
        }
        m
    }

    /// `P |index> = phase |row>`.
    #[inline]
    pub fn apply_to_basis(&self, index: usize) -> (usize, Complex64) {
        let n = self.letters.len();
        let mut out = 0usize;
        let mut phase = ONE;
        for (q, p) in self.letters.iter().enumerate() {
            let shift = n - 1 - q;
            let (b, ph) = p.act((index >> shift) & 1);
            out |= b << shift;
            phase *= ph;
        }
        (out, phase)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| {
                Pauli::from_char(c.to_ascii_uppercase())
                    .ok_or_else(|| Error::Parse(format!("invalid Pauli letter {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { letters })
    }
}

/// Spreads the low bits of `x` onto the even bit positions.
#[inline]
pub(crate) fn spread_bits(mut x: usize) -> usize {
    let mut out = 0usize;
    let mut shift = 0;
    while x != 0 {
        out |= (x & 1) << shift;
        x >>= 1;
        shift += 2;
    }
    out
}

/// `Tr(M P)` for every Pauli string `P`, indexed by Pauli code.
///
/// Runs in `O(n 4^n)` by transforming one qubit at a time.
pub fn pauli_coefficients(m: &CMatrix) -> Vec<Complex64> {
    let dim = m.nrows();
    assert!(dim.is_power_of_two() && m.ncols() == dim);
    let n = dim.trailing_zeros() as usize;
    let mut w: Vec<Complex64> = (0..dim * dim).map(|i| m[(i / dim, i % dim)]).collect();
    let i_unit = Complex64::new(0.0, 1.0);
    for q in 0..n {
        let b = 1usize << (n - 1 - q);
        for r in (0..dim).filter(|r| r & b == 0) {
            for c in (0..dim).filter(|c| c & b == 0) {
                let p00 = r * dim + c;
                let p01 = r * dim + (c | b);
                let p10 = (r | b) * dim + c;
                let p11 = (r | b) * dim + (c | b);
                let (m00, m01, m10, m11) = (w[p00], w[p01], w[p10], w[p11]);
                w[p00] = m00 + m11;
                w[p01] = m01 + m10;
                w[p10] = i_unit * (m01 - m10);
                w[p11] = m00 - m11;
            }
        }
    }
    let mut out = vec![ZERO; dim * dim];
    for r in 0..dim {
        let sr = spread_bits(r) << 1;
        for c in 0..dim {
            out[sr | spread_bits(c)] = w[r * dim + c];
        }
    }
    out
}

/// Real parts of [`pauli_coefficients`], the natural coordinates of a
/// Hermitian operator.
pub fn real_pauli_coefficients(m: &CMatrix) -> Vec<f64> {
    pauli_coefficients(m).into_iter().map(|z| z.re).collect()
}

/// Inverse transform: `sum_P a_P P / 2^n` for real coefficients `a_P = Tr(M P)`.
pub fn operator_from_pauli_coefficients(coeffs: &[f64], n: usize) -> CMatrix {
    let dim = 1usize << n;
    assert_eq!(coeffs.len(), dim * dim);
    let mut w = vec![ZERO; dim * dim];
    for r in 0..dim {
        let sr = spread_bits(r) << 1;
        for c in 0..dim {
            w[r * dim + c] = Complex64::new(coeffs[sr | spread_bits(c)], 0.0);
        }
    }
    let i_unit = Complex64::new(0.0, 1.0);
    for q in 0..n {
        let b = 1usize << (n - 1 - q);
        for r in (0..dim).filter(|r| r & b == 0) {
            for c in (0..dim).filter(|c| c & b == 0) {
                let p00 = r * dim + c;
                let p01 = r * dim + (c | b);
                let p10 = (r | b) * dim + c;
                let p11 = (r | b) * dim + (c | b);
                let (ci, cx, cy, cz) = (w[p00], w[p01], w[p10], w[p11]);
                w[p00] = (ci + cz) * 0.5;
                w[p11] = (ci - cz) * 0.5;
                w[p01] = (cx - i_unit * cy) * 0.5;
                w[p10] = (cx + i_unit * cy) * 0.5;
            }
        }
    }
    CMatrix::from_fn(dim, dim, |r, c| w[r * dim + c])
}
