//! Layered two-qubit-gate circuits, light cones, γ₂ and reference
//! constructions.

mod gamma2;
mod gates;
mod ghz;
mod random;
mod repr;

use std::fmt;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::STRUCTURAL_TOL;
use crate::qcore::{PureState, QubitSubset};

pub use gamma2::{
    gamma2, gamma2_diagnostic, gamma2_growth, gamma2_upper_bound, Gamma2Diagnostic, Gamma2Growth, GrowthStep, Point,
    GAMMA2_MAX_EXACT_DEPTH,
};
pub use gates::{apply_gate, bell_gate, cnot, hadamard_gate};
pub use ghz::{ghz_circuit, ghz_depth, square_lattice_ghz_embedding};
pub use random::{haar_unitary_4, random_circuit, random_circuit_with, GateDistribution};

/// Qubit connectivity of a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    General,
    Chain,
    /// `coords[q]` is the `(row, col)` lattice site of qubit `q`.
    SquareLattice { coords: Vec<(i32, i32)> },
}

/// The three geometry classes, without embedding data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    General,
    Chain,
    SquareLattice,
}

impl std::str::FromStr for GeometryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(GeometryKind::General),
            "chain" => Ok(GeometryKind::Chain),
            "square" | "square_lattice" | "square-lattice" => Ok(GeometryKind::SquareLattice),
            other => Err(Error::Parse(format!("unknown geometry {other:?}"))),
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryKind::General => "general",
            GeometryKind::Chain => "chain",
            GeometryKind::SquareLattice => "square_lattice",
        })
    }
}

impl Geometry {
    /// Row-major `rows x cols` grid.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let coords = (0..rows * cols)
            .map(|i| ((i / cols) as i32, (i % cols) as i32))
            .collect();
        Geometry::SquareLattice { coords }
    }

    pub fn kind(&self) -> GeometryKind {
        match self {
            Geometry::General => GeometryKind::General,
            Geometry::Chain => GeometryKind::Chain,
            Geometry::SquareLattice { .. } => GeometryKind::SquareLattice,
        }
    }

    /// Whether a gate on `(a, b)` is allowed.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        match self {
            Geometry::General => true,
            Geometry::Chain => a.abs_diff(b) == 1,
            Geometry::SquareLattice { coords } => match (coords.get(a), coords.get(b)) {
                (Some(p), Some(q)) => (p.0 - q.0).abs() + (p.1 - q.1).abs() == 1,
                _ => false,
            },
        }
    }

    fn check(&self, n_qubits: usize) -> std::result::Result<(), String> {
        if let Geometry::SquareLattice { coords } = self {
            if coords.len() != n_qubits {
                return Err(format!(
                    "lattice embedding has {} sites for {n_qubits} qubits",
                    coords.len()
                ));
            }
            let mut sorted = coords.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(format!("duplicate lattice site {:?}", w[0]));
            }
        }
        Ok(())
    }
}

/// Worst-case light-cone size after `depth` layers: `2^D` for general
/// circuits, `2D` on a chain and γ₂(D) on the square lattice.
///
/// Beyond the exact γ₂ range the square-lattice value falls back to
/// `(D+1)^2 + D^2`.
pub fn light_cone_bound(kind: GeometryKind, depth: usize) -> usize {
    if depth == 0 {
        return 1;
    }
    match kind {
        GeometryKind::General => 1usize.checked_shl(depth as u32).unwrap_or(usize::MAX),
        GeometryKind::Chain => 2 * depth,
        GeometryKind::SquareLattice => gamma2(depth).unwrap_or_else(|_| gamma2_upper_bound(depth)),
    }
}

/// A two-qubit gate. The first listed qubit is the more significant
/// tensor factor of the 4x4 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub qubits: [usize; 2],
    pub unitary: Matrix4<Complex64>,
}

impl Gate {
    pub fn new(a: usize, b: usize, unitary: Matrix4<Complex64>) -> Self {
        Self {
            qubits: [a, b],
            unitary,
        }
    }

    pub fn touches(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }

    fn unitarity_defect(&self) -> f64 {
        let prod = self.unitary.adjoint() * self.unitary;
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// The first invariant violation found by [`LayeredCircuit::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub layer: Option<usize>,
    pub gate: Option<usize>,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.layer, self.gate) {
            (Some(l), Some(g)) => write!(f, "layer {l}, gate {g}: {}", self.reason),
            (Some(l), None) => write!(f, "layer {l}: {}", self.reason),
            _ => write!(f, "{}", self.reason),
        }
    }
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        Error::InvalidCircuit(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredCircuit {
    pub n_qubits: usize,
    pub layers: Vec<Vec<Gate>>,
    pub geometry: Geometry,
}

/// Input qubits influencing the conjugated single-qubit operator on `qubit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightCone {
    pub qubit: usize,
    pub support: QubitSubset,
}

impl LayeredCircuit {
    pub fn new(n_qubits: usize, geometry: Geometry) -> Self {
        Self {
            n_qubits,
            layers: Vec::new(),
            geometry,
        }
    }

    pub fn with_layers(n_qubits: usize, geometry: Geometry, layers: Vec<Vec<Gate>>) -> Self {
        Self {
            n_qubits,
            layers,
            geometry,
        }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Checks disjointness within layers, unitarity and geometry.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        self.geometry.check(self.n_qubits).map_err(|reason| Violation {
            layer: None,
            gate: None,
            reason,
        })?;
        for (li, layer) in self.layers.iter().enumerate() {
            let mut used = vec![false; self.n_qubits];
            for (gi, gate) in layer.iter().enumerate() {
                let fail = |reason: String| Violation {
                    layer: Some(li),
                    gate: Some(gi),
                    reason,
                };
                let [a, b] = gate.qubits;
                if a >= self.n_qubits || b >= self.n_qubits {
                    return Err(fail(format!("qubits {a},{b} out of range")));
                }
                if a == b {
                    return Err(fail(format!("gate acts twice on qubit {a}")));
                }
                for q in [a, b] {
                    if used[q] {
                        return Err(fail(format!("qubit {q} already used in this layer")));
                    }
                    used[q] = true;
                }
                if !self.geometry.adjacent(a, b) {
                    return Err(fail(format!(
                        "qubits {a},{b} are not adjacent in {} geometry",
                        self.geometry.kind()
                    )));
                }
                let defect = gate.unitarity_defect();
                if defect > STRUCTURAL_TOL {
                    return Err(fail(format!("gate is not unitary (defect {defect:.3e})")));
                }
            }
        }
        Ok(())
    }

    /// `U_D ... U_1 |input>`.
    pub fn apply(&self, input: &PureState) -> Result<PureState> {
        self.validate()?;
        if input.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: input.n_qubits(),
            });
        }
        let mut amps: Vec<Complex64> = input.amplitudes().iter().copied().collect();
        for layer in &self.layers {
            for gate in layer {
                apply_gate(&mut amps, self.n_qubits, gate);
            }
        }
        Ok(PureState::from_vector_unchecked(nalgebra::DVector::from_vec(
            amps,
        )))
    }

    /// The circuit output on `|0...0>`.
    pub fn output_state(&self) -> Result<PureState> {
        self.apply(&PureState::zero(self.n_qubits))
    }

    /// Support of `U P_q U†` for an operator `P_q` on input qubit `q`: start
    /// from `{q}` and, layer by layer from the first, absorb every gate
    /// touching the current set.
    pub fn light_cone(&self, qubit: usize) -> Result<LightCone> {
        if qubit >= self.n_qubits {
            return Err(Error::InvalidArgument(format!(
                "qubit {qubit} out of range for {} qubits",
                self.n_qubits
            )));
        }
        let mut inside = vec![false; self.n_qubits];
        inside[qubit] = true;
        for layer in &self.layers {
            let mut next = inside.clone();
            for gate in layer {
                let [a, b] = gate.qubits;
                if inside[a] || inside[b] {
                    next[a] = true;
                    next[b] = true;
                }
            }
            inside = next;
        }
        let support = (0..self.n_qubits).filter(|&q| inside[q]).collect();
        Ok(LightCone {
            qubit,
            support: QubitSubset::new(support, self.n_qubits)?,
        })
    }

    /// The inverse circuit `U_1† ... U_D†`.
    pub fn inverse(&self) -> LayeredCircuit {
        let layers = self
            .layers
            .iter()
            .rev()
            .map(|layer| {
                layer
                    .iter()
                    .map(|g| Gate::new(g.qubits[0], g.qubits[1], g.unitary.adjoint()))
                    .collect()
            })
            .collect();
        LayeredCircuit::with_layers(self.n_qubits, self.geometry.clone(), layers)
    }
}
