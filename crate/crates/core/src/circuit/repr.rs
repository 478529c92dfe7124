//! Circuit JSON: `{"n", "geometry", "layers": [[{"qubits", "unitary"}]]}`
//! with each unitary entry written as `[re, im]`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Gate, Geometry, LayeredCircuit};
use crate::error::Result;

#[derive(Serialize, Deserialize)]
struct GateRepr {
    qubits: [usize; 2],
    unitary: [[[f64; 2]; 4]; 4],
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    n: usize,
    geometry: Geometry,
    layers: Vec<Vec<GateRepr>>,
}

impl From<&Gate> for GateRepr {
    fn from(g: &Gate) -> Self {
        let mut unitary = [[[0.0; 2]; 4]; 4];
        for (r, row) in unitary.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                let z = g.unitary[(r, c)];
                *entry = [z.re, z.im];
            }
        }
        GateRepr {
            qubits: g.qubits,
            unitary,
        }
    }
}

impl From<GateRepr> for Gate {
    fn from(g: GateRepr) -> Self {
        let m = Matrix4::from_fn(|r, c| Complex64::new(g.unitary[r][c][0], g.unitary[r][c][1]));
        Gate::new(g.qubits[0], g.qubits[1], m)
    }
}

impl Serialize for LayeredCircuit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CircuitRepr {
            n: self.n_qubits,
            geometry: self.geometry.clone(),
            layers: self
                .layers
                .iter()
                .map(|l| l.iter().map(GateRepr::from).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LayeredCircuit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CircuitRepr::deserialize(d)?;
        let layers = r
            .layers
            .into_iter()
            .map(|l| l.into_iter().map(Gate::from).collect())
            .collect();
        Ok(LayeredCircuit::with_layers(r.n, r.geometry, layers))
    }
}

impl LayeredCircuit {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Parses and validates a circuit.
    pub fn from_json(text: &str) -> Result<Self> {
        let c: LayeredCircuit = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }
}
