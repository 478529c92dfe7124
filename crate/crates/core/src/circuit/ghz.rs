//! GHZ preparation circuits of optimal depth.
//!
//! Every construction grows the GHZ register from one Bell pair: in each
//! layer, every qubit already holding the GHZ state may control a CNOT onto
//! one fresh neighbour, so one layer at most doubles the register.

use std::collections::HashMap;

use super::{bell_gate, cnot, gamma2, gamma2_growth, Gate, Geometry, GeometryKind, LayeredCircuit};
use super::gamma2::GAMMA2_MAX_EXACT_DEPTH;
use crate::error::{Error, Result};

/// Depth of [`ghz_circuit`]: `ceil(log2 n)` for general geometry,
/// `ceil(n/2)` on a chain, `min{D : γ₂(D) >= n}` on the square lattice.
pub fn ghz_depth(n: usize, kind: GeometryKind) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("GHZ needs n >= 2, got {n}")));
    }
    Ok(match kind {
        GeometryKind::General => n.next_power_of_two().trailing_zeros() as usize,
        GeometryKind::Chain => n.div_ceil(2),
        GeometryKind::SquareLattice => {
            let mut d = 1;
            loop {
                if d > GAMMA2_MAX_EXACT_DEPTH {
                    return Err(Error::Unsupported(format!(
                        "square-lattice GHZ on {n} qubits needs depth beyond the exact gamma2 range"
                    )));
                }
                if gamma2(d)? >= n {
                    break d;
                }
                d += 1;
            }
        }
    })
}

/// A compact lattice embedding for an `n`-qubit GHZ circuit, taken from a
/// recorded optimal γ₂ growth process truncated to `n` sites.
pub fn square_lattice_ghz_embedding(n: usize) -> Result<Geometry> {
    let depth = ghz_depth(n, GeometryKind::SquareLattice)?;
    let growth = gamma2_growth(depth)?;
    // |S_{D-1}| <= γ₂(D-1) < n <= |S_D|, so a prefix of the final step fits.
    let mut coords = growth.points_after(depth - 1);
    let last: Vec<_> = growth.steps[depth - 1].iter().map(|&(_, q)| q).collect();
    coords.extend(last.into_iter().take(n - coords.len()));
    debug_assert_eq!(coords.len(), n);
    Ok(Geometry::SquareLattice { coords })
}

/// Circuit whose output on `|0...0>` is the `n`-qubit GHZ state.
pub fn ghz_circuit(n: usize, geometry: Geometry) -> Result<LayeredCircuit> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("GHZ needs n >= 2, got {n}")));
    }
    let layers = match &geometry {
        Geometry::General => general_layers(n),
        Geometry::Chain => chain_layers(n),
        Geometry::SquareLattice { coords } => {
            if coords.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "embedding has {} sites for {n} qubits",
                    coords.len()
                )));
            }
            lattice_layers(coords)?
        }
    };
    let circuit = LayeredCircuit::with_layers(n, geometry, layers);
    circuit.validate()?;
    Ok(circuit)
}

fn general_layers(n: usize) -> Vec<Vec<Gate>> {
    let mut layers = vec![vec![bell_gate(0, 1)]];
    let mut size = 2;
    while size < n {
        let layer = (0..size)
            .filter(|i| size + i < n)
            .map(|i| cnot(i, size + i))
            .collect();
        layers.push(layer);
        size = (2 * size).min(n);
    }
    layers
}

fn chain_layers(n: usize) -> Vec<Vec<Gate>> {
    let a = n.div_ceil(2) - 1;
    let mut layers = vec![vec![bell_gate(a, a + 1)]];
    let (mut left, mut right) = (a, a + 1);
    while left > 0 || right + 1 < n {
        let mut layer = Vec::new();
        if left > 0 {
            layer.push(cnot(left, left - 1));
            left -= 1;
        }
        if right + 1 < n {
            layer.push(cnot(right, right + 1));
            right += 1;
        }
        layers.push(layer);
    }
    layers
}

/// Bases of the transversal matroid "fresh neighbours matchable into the
/// current register", i.e. all maximal one-step growths.
fn maximal_growths(members: u64, adjacency: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
    let n = adjacency.len();
    let candidates: Vec<usize> = (0..n)
        .filter(|&q| members & (1 << q) == 0)
        .filter(|&q| adjacency[q].iter().any(|&p| members & (1 << p) != 0))
        .collect();
    let cand_adj: Vec<Vec<usize>> = candidates
        .iter()
        .map(|&q| {
            adjacency[q]
                .iter()
                .copied()
                .filter(|&p| members & (1 << p) != 0)
                .collect()
        })
        .collect();

    fn augment(
        b: usize,
        cand_adj: &[Vec<usize>],
        owner: &mut HashMap<usize, usize>,
        seen: &mut Vec<usize>,
    ) -> bool {
        for &p in &cand_adj[b] {
            if seen.contains(&p) {
                continue;
            }
            seen.push(p);
            let prev = owner.get(&p).copied();
            if prev.is_none() || augment(prev.unwrap(), cand_adj, owner, seen) {
                owner.insert(p, b);
                return true;
            }
        }
        false
    }

    let rank = {
        let mut owner = HashMap::new();
        (0..candidates.len())
            .filter(|&b| augment(b, &cand_adj, &mut owner, &mut Vec::new()))
            .count()
    };

    let mut out = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        chosen: usize,
        rank: usize,
        owner: &HashMap<usize, usize>,
        candidates: &[usize],
        cand_adj: &[Vec<usize>],
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if chosen == rank {
            let mut pairs: Vec<(usize, usize)> =
                owner.iter().map(|(&p, &b)| (p, candidates[b])).collect();
            pairs.sort_unstable();
            out.push(pairs);
            return;
        }
        if chosen + candidates.len() - i < rank {
            return;
        }
        let mut with = owner.clone();
        if augment(i, cand_adj, &mut with, &mut Vec::new()) {
            rec(i + 1, chosen + 1, rank, &with, candidates, cand_adj, out);
        }
        rec(i + 1, chosen, rank, owner, candidates, cand_adj, out);
    }
    rec(0, 0, rank, &HashMap::new(), &candidates, &cand_adj, &mut out);
    out
}

/// Minimum-depth growth of the GHZ register over the embedded sites.
fn lattice_layers(coords: &[(i32, i32)]) -> Result<Vec<Vec<Gate>>> {
    let n = coords.len();
    if n > 40 {
        return Err(Error::TooManyQubits { n, max: 40 });
    }
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| {
                    let (p, q) = (coords[a], coords[b]);
                    (p.0 - q.0).abs() + (p.1 - q.1).abs() == 1
                })
                .collect()
        })
        .collect();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    let mut best: Option<Vec<Vec<(usize, usize)>>> = None;
    for root in 0..n {
        // breadth-first over registers; parent links rebuild the layers
        let mut parent: HashMap<u64, (u64, Vec<(usize, usize)>)> = HashMap::new();
        let mut frontier = vec![1u64 << root];
        parent.insert(1u64 << root, (0, vec![]));
        let mut depth = 0;
        let limit = best.as_ref().map_or(n, |b| b.len() - 1);
        let mut reached = None;
        while depth < limit && reached.is_none() {
            let mut next = Vec::new();
            for &mask in &frontier {
                for pairs in maximal_growths(mask, &adjacency) {
                    let grown = pairs.iter().fold(mask, |m, &(_, q)| m | (1 << q));
                    if grown == mask || parent.contains_key(&grown) {
                        continue;
                    }
                    parent.insert(grown, (mask, pairs));
                    if grown == full {
                        reached = Some(grown);
                    }
                    next.push(grown);
                }
            }
            depth += 1;
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        if let Some(mut mask) = reached {
            let mut steps = Vec::new();
            while mask != 1u64 << root {
                let (prev, pairs) = parent[&mask].clone();
                steps.push(pairs);
                mask = prev;
            }
            steps.reverse();
            if best.as_ref().is_none_or(|b| steps.len() < b.len()) {
                best = Some(steps);
            }
        }
    }
    let steps = best.ok_or_else(|| {
        Error::InvalidArgument("embedding infeasible: lattice sites are not connected".into())
    })?;
    Ok(steps
        .into_iter()
        .enumerate()
        .map(|(i, pairs)| {
            pairs
                .into_iter()
                .map(|(p, q)| if i == 0 { bell_gate(p, q) } else { cnot(p, q) })
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::PureState;

    fn check(circuit: &LayeredCircuit) {
        let out = circuit.output_state().unwrap();
        let f = out.overlap(&PureState::ghz(circuit.n_qubits));
        assert!(f >= 1.0 - 1e-10, "fidelity {f}");
    }

    #[test]
    fn depth_examples() {
        assert_eq!(ghz_circuit(2, Geometry::General).unwrap().depth(), 1);
        assert_eq!(ghz_circuit(8, Geometry::General).unwrap().depth(), 3);
        assert_eq!(ghz_circuit(6, Geometry::Chain).unwrap().depth(), 3);
        assert!(ghz_circuit(1, Geometry::General).is_err());
    }

    #[test]
    fn outputs_ghz_in_every_geometry() {
        for n in 2..=10 {
            for geometry in [Geometry::General, Geometry::Chain] {
                let kind = geometry.kind();
                let c = ghz_circuit(n, geometry).unwrap();
                assert_eq!(c.depth(), ghz_depth(n, kind).unwrap());
                check(&c);
            }
            let emb = square_lattice_ghz_embedding(n).unwrap();
            let c = ghz_circuit(n, emb).unwrap();
            assert_eq!(c.depth(), ghz_depth(n, GeometryKind::SquareLattice).unwrap(), "n={n}");
            check(&c);
        }
    }

    #[test]
    fn grid_embedding_is_accepted() {
        let c = ghz_circuit(6, Geometry::grid(2, 3)).unwrap();
        check(&c);
        assert!(c.depth() >= ghz_depth(6, GeometryKind::SquareLattice).unwrap());
    }

    #[test]
    fn disconnected_embedding_is_infeasible() {
        let g = Geometry::SquareLattice {
            coords: vec![(0, 0), (0, 1), (5, 5)],
        };
        assert!(ghz_circuit(3, g).is_err());
    }
}
