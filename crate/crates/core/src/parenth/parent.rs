use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::hamiltonian::{check_dense, LocalHamiltonian, Term};
use crate::circuit::{apply_gate, Gate, LayeredCircuit};
use crate::error::Result;
use crate::qcore::linalg::CMatrix;
use crate::qcore::{HermitianOperator, QubitSubset};

/// A class of input qubits sharing one light-cone support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LightConeClass {
    /// Input qubits `S_j` in the class.
    pub qubits: QubitSubset,
    /// Their common light-cone support, the support of the merged term.
    pub support: QubitSubset,
}

/// Partitions the input qubits by exact light-cone support.
pub fn light_cone_classes(circuit: &LayeredCircuit) -> Result<Vec<LightConeClass>> {
    circuit.validate()?;
    let mut classes: BTreeMap<QubitSubset, Vec<usize>> = BTreeMap::new();
    for q in 0..circuit.n_qubits {
        classes
            .entry(circuit.light_cone(q)?.support)
            .or_default()
            .push(q);
    }
    classes
        .into_iter()
        .map(|(support, qubits)| {
            Ok(LightConeClass {
                qubits: QubitSubset::new(qubits, circuit.n_qubits)?,
                support,
            })
        })
        .collect()
}

/// `I - |0...0><0...0|` on the class qubits, tensored with the identity on
/// the rest of `support` (a diagonal projector on the local space).
fn merged_initial_term(class: &LightConeClass) -> CMatrix {
    let support = class.support.indices();
    let k = support.len();
    let mask: usize = support
        .iter()
        .enumerate()
        .filter(|(_, q)| class.qubits.contains(**q))
        .map(|(i, _)| 1 << (k - 1 - i))
        .sum();
    let mut m = CMatrix::zeros(1 << k, 1 << k);
    for i in 0..1usize << k {
        if i & mask != 0 {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
    }
    m
}

/// `G O G†` with `G` acting on local positions of a `2^k` space.
fn conjugate(op: &mut CMatrix, k: usize, gate: &Gate) {
    let apply_columns = |m: &mut CMatrix| {
        for mut col in m.column_iter_mut() {
            apply_gate(col.as_mut_slice(), k, gate);
        }
    };
    apply_columns(op);
    let mut t = op.adjoint();
    apply_columns(&mut t);
    *op = t.adjoint();
}

/// The merged term of one class conjugated by the gates inside its light
/// cone, built on `2^|support|` dimensions.
fn conjugated_term(circuit: &LayeredCircuit, class: &LightConeClass) -> Term {
    let support = class.support.indices();
    let k = support.len();
    let local = |q: usize| support.binary_search(&q).expect("gate inside light cone");
    let mut op = merged_initial_term(class);
    let mut inside = vec![false; circuit.n_qubits];
    for &q in class.qubits.indices() {
        inside[q] = true;
    }
    for layer in &circuit.layers {
        let mut next = inside.clone();
        for gate in layer {
            let [a, b] = gate.qubits;
            if inside[a] || inside[b] {
                next[a] = true;
                next[b] = true;
                conjugate(&mut op, k, &Gate::new(local(a), local(b), gate.unitary));
            }
        }
        inside = next;
    }
    let op = (&op + op.adjoint()).scale(0.5);
    Term {
        support: class.support.clone(),
        operator: HermitianOperator::from_matrix_unchecked(op),
    }
}

/// Parent Hamiltonian `U H0 U†` of the circuit output, one merged
/// projector per light-cone class. Frustration-free with gap 1 and the
/// circuit output as unique ground state.
pub fn parent_hamiltonian(circuit: &LayeredCircuit) -> Result<LocalHamiltonian> {
    check_dense(circuit.n_qubits)?;
    let classes = light_cone_classes(circuit)?;
    let terms = classes
        .par_iter()
        .map(|c| conjugated_term(circuit, c))
        .collect();
    let mut h = LocalHamiltonian::from_terms_unchecked(circuit.n_qubits, terms);
    h.gap_certificate = Some((0.0, 1.0));
    Ok(h)
}

/// The merged Hamiltonian before conjugation, `sum_j I_{S_j} - |0><0|_{S_j}`.
pub fn merged_initial_hamiltonian(circuit: &LayeredCircuit) -> Result<LocalHamiltonian> {
    let terms = light_cone_classes(circuit)?
        .into_iter()
        .map(|c| {
            let only = LightConeClass {
                qubits: c.qubits.clone(),
                support: c.qubits,
            };
            Term {
                operator: HermitianOperator::from_matrix_unchecked(merged_initial_term(&only)),
                support: only.support,
            }
        })
        .collect();
    Ok(LocalHamiltonian::from_terms_unchecked(circuit.n_qubits, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{bell_gate, ghz_circuit, light_cone_bound, random_circuit, Geometry};
    use crate::parenth::{assemble, ground_analysis};
    use crate::qcore::embed_operator;
    use crate::qcore::linalg::hermitian_eigenvalues;
    use proptest::prelude::*;

    /// Full-space oracle `U (H0 ⊗ I) U†` for one class.
    fn full_space_term(circuit: &LayeredCircuit, class: &LightConeClass) -> CMatrix {
        let n = circuit.n_qubits;
        let only = LightConeClass {
            qubits: class.qubits.clone(),
            support: class.qubits.clone(),
        };
        let h0 = embed_operator(&merged_initial_term(&only), &class.qubits, n).unwrap();
        let mut u = CMatrix::identity(1 << n, 1 << n);
        for mut col in u.column_iter_mut() {
            for layer in &circuit.layers {
                for g in layer {
                    apply_gate(col.as_mut_slice(), n, g);
                }
            }
        }
        &u * h0 * u.adjoint()
    }

    #[test]
    fn empty_circuit_gives_single_qubit_projectors() {
        let c = LayeredCircuit::new(3, Geometry::Chain);
        let h = parent_hamiltonian(&c).unwrap();
        assert_eq!(h.len(), 3);
        for (q, t) in h.terms().iter().enumerate() {
            assert_eq!(t.support, QubitSubset::singleton(q));
            let m = t.operator.matrix();
            assert_eq!(m[(1, 1)].re, 1.0);
            assert_eq!(m[(0, 0)].re, 0.0);
        }
    }

    #[test]
    fn bell_circuit_parent() {
        let c = LayeredCircuit::with_layers(2, Geometry::Chain, vec![vec![bell_gate(0, 1)]]);
        let h = parent_hamiltonian(&c).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.terms()[0].support, QubitSubset::all(2));
        let bell = c.output_state().unwrap().density_matrix();
        let expected = CMatrix::identity(4, 4) - bell.matrix();
        assert!((h.terms()[0].operator.matrix() - expected).norm() < 1e-12);
        let ev = hermitian_eigenvalues(assemble(&h).unwrap().matrix());
        for (a, b) in ev.iter().zip([0.0, 1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn restricted_conjugation_matches_full_space() {
        for (seed, geometry) in [(1, Geometry::Chain), (2, Geometry::General), (3, Geometry::grid(2, 3))] {
            let c = random_circuit(6, 2, geometry, seed);
            let h = parent_hamiltonian(&c).unwrap();
            for (class, term) in light_cone_classes(&c).unwrap().iter().zip(h.terms()) {
                let local = embed_operator(term.operator.matrix(), &term.support, 6).unwrap();
                let full = full_space_term(&c, class);
                assert!((local - full).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn chain_supports_are_at_most_2d() {
        let c = random_circuit(6, 2, Geometry::Chain, 9);
        let h = parent_hamiltonian(&c).unwrap();
        assert!(h.locality() <= 4);
        assert!(h.len() <= 6);
    }

    #[test]
    fn ghz_parent_has_unit_gap() {
        let c = ghz_circuit(4, Geometry::General).unwrap();
        let h = parent_hamiltonian(&c).unwrap();
        let g = ground_analysis(&h).unwrap();
        assert!((g.gap - 1.0).abs() < 1e-9);
        assert!(g.unique);
        let ghz = crate::qcore::PureState::ghz(4);
        assert!(g.ground.unwrap().overlap(&ghz) > 1.0 - 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn parent_invariants(seed: u64, n in 2usize..=7, depth in 1usize..=3, kind in 0usize..3) {
            let geometry = match kind {
                0 => Geometry::Chain,
                1 => Geometry::General,
                _ => Geometry::grid(2, n.div_ceil(2)),
            };
            let n = if kind == 2 { 2 * n.div_ceil(2) } else { n };
            let c = random_circuit(n, depth, geometry.clone(), seed);
            let h = parent_hamiltonian(&c).unwrap();
            prop_assert!(h.projector_defect() <= 1e-9);
            prop_assert!(h.len() <= n);
            let supports: std::collections::BTreeSet<_> = h.terms().iter().map(|t| &t.support).collect();
            prop_assert_eq!(supports.len(), h.len());
            prop_assert!(h.locality() <= light_cone_bound(geometry.kind(), depth).min(n));
            let psi = c.output_state().unwrap();
            prop_assert!(h.energy(&psi).unwrap() <= 1e-9);
            let a = hermitian_eigenvalues(assemble(&h).unwrap().matrix());
            let b = hermitian_eigenvalues(assemble(&merged_initial_hamiltonian(&c).unwrap()).unwrap().matrix());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-8);
            }
            let g = ground_analysis(&h).unwrap();
            prop_assert!(g.lambda0.abs() < 1e-9 && g.gap >= 1.0 - 1e-8);
            prop_assert!(g.ground.unwrap().overlap(&psi) >= 1.0 - 1e-9);
        }
    }
}
