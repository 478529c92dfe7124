use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{bell_gate, cnot, hadamard_gate, Gate, Geometry, LayeredCircuit};

/// Source of two-qubit gates for [`random_circuit`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateDistribution {
    #[default]
    Haar,
    /// Uniform over CNOT (either orientation), `H ⊗ I`, `I ⊗ H` and the
    /// Bell-pair gate.
    FixedSet,
}

impl std::str::FromStr for GateDistribution {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "haar" => Ok(Self::Haar),
            "fixed" | "fixed_set" | "fixed-set" => Ok(Self::FixedSet),
            other => Err(crate::error::Error::Parse(format!(
                "unknown gate distribution {other:?}"
            ))),
        }
    }
}

/// Haar-random element of U(4): QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal folded back into `Q`.
pub fn haar_unitary_4<R: Rng + ?Sized>(rng: &mut R) -> Matrix4<Complex64> {
    let g = Matrix4::from_fn(|_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..4 {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..4 {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn draw_gate(a: usize, b: usize, dist: GateDistribution, rng: &mut ChaCha8Rng) -> Gate {
    match dist {
        GateDistribution::Haar => Gate::new(a, b, haar_unitary_4(rng)),
        GateDistribution::FixedSet => match rng.random_range(0..5) {
            0 => cnot(a, b),
            1 => cnot(b, a),
            2 => hadamard_gate(a, b),
            3 => hadamard_gate(b, a),
            _ => bell_gate(a, b),
        },
    }
}

fn layer_pairs(n: usize, layer: usize, geometry: &Geometry, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    match geometry {
        // brickwork: even bonds, then odd bonds
        Geometry::Chain => (layer % 2..n.saturating_sub(1))
            .step_by(2)
            .map(|a| (a, a + 1))
            .collect(),
        Geometry::General => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            perm.chunks_exact(2).map(|c| (c[0], c[1])).collect()
        }
        Geometry::SquareLattice { coords } => {
            let mut edges: Vec<(usize, usize)> = (0..coords.len())
                .flat_map(|a| (a + 1..coords.len()).map(move |b| (a, b)))
                .filter(|&(a, b)| geometry.adjacent(a, b))
                .collect();
            edges.shuffle(rng);
            let mut used = vec![false; coords.len()];
            let mut out = Vec::new();
            for (a, b) in edges {
                if !used[a] && !used[b] {
                    used[a] = true;
                    used[b] = true;
                    out.push((a, b));
                }
            }
            out
        }
    }
}

/// Depth-`depth` random circuit with Haar-random gates.
pub fn random_circuit(n: usize, depth: usize, geometry: Geometry, seed: u64) -> LayeredCircuit {
    random_circuit_with(n, depth, geometry, GateDistribution::Haar, seed)
}

/// Depth-`depth` random circuit; the layer pattern follows the geometry and
/// the same seed always gives the same circuit.
pub fn random_circuit_with(
    n: usize,
    depth: usize,
    geometry: Geometry,
    dist: GateDistribution,
    seed: u64,
) -> LayeredCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = (0..depth)
        .map(|l| {
            layer_pairs(n, l, &geometry, &mut rng)
                .into_iter()
                .map(|(a, b)| {
                    // random orientation so the leading factor is not always the lower index
                    let (a, b) = if rng.random::<bool>() { (a, b) } else { (b, a) };
                    draw_gate(a, b, dist, &mut rng)
                })
                .collect()
        })
        .collect();
    LayeredCircuit::with_layers(n, geometry, layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{light_cone_bound, GeometryKind};
    use crate::qcore::PureState;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(random_circuit(4, 0, Geometry::General, 3).depth(), 0);
        let a = random_circuit(4, 2, Geometry::Chain, 7);
        let b = random_circuit(4, 2, Geometry::Chain, 7);
        assert_eq!(a, b);
        assert!(random_circuit(6, 2, Geometry::General, 1).validate().is_ok());
        let f = random_circuit_with(6, 3, Geometry::grid(2, 3), GateDistribution::FixedSet, 2);
        assert!(f.validate().is_ok());
    }

    #[test]
    fn haar_gates_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let u = haar_unitary_4(&mut rng);
            let defect = (u.adjoint() * u - Matrix4::identity()).norm();
            assert!(defect < 1e-12);
        }
    }

    fn geometry_for(kind: u8, n: usize) -> Geometry {
        match kind {
            0 => Geometry::General,
            1 => Geometry::Chain,
            _ => {
                let cols = (n as f64).sqrt().ceil() as usize;
                let mut g = Geometry::grid(n.div_ceil(cols), cols);
                if let Geometry::SquareLattice { coords } = &mut g {
                    coords.truncate(n);
                }
                g
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn light_cones_respect_geometry_bound(
            kind in 0u8..3, n in 2usize..=10, depth in 0usize..=3, seed: u64, q in 0usize..10,
        ) {
            let g = geometry_for(kind, n);
            let bound_kind = g.kind();
            let c = random_circuit_with(n, depth, g, GateDistribution::FixedSet, seed);
            prop_assert!(c.validate().is_ok());
            let cone = c.light_cone(q % n).unwrap();
            prop_assert!(cone.support.contains(q % n));
            prop_assert!(cone.support.len() <= light_cone_bound(bound_kind, depth));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn apply_preserves_norm(kind in 0u8..3, n in 2usize..=7, depth in 0usize..=4, seed: u64) {
            let c = random_circuit(n, depth, geometry_for(kind, n), seed);
            let input = PureState::basis(n, (seed as usize) % (1 << n));
            let out = c.apply(&input).unwrap();
            prop_assert!((out.amplitudes().norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn square_bound_uses_gamma2() {
        assert_eq!(light_cone_bound(GeometryKind::SquareLattice, 2), 4);
    }
}
