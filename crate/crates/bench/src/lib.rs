//! Fixtures shared by the benchmarks.

use shallowscope::circuit::{ghz_circuit, random_circuit};
use shallowscope::{Geometry, LayeredCircuit, PureState};

/// Output of a depth-`depth` random chain circuit on `n` qubits.
pub fn chain_state(n: usize, depth: usize, seed: u64) -> (LayeredCircuit, PureState) {
    let c = random_circuit(n, depth, Geometry::Chain, seed);
    let psi = c.output_state().expect("valid random circuit");
    (c, psi)
}

pub fn ghz(n: usize) -> (LayeredCircuit, PureState) {
    let c = ghz_circuit(n, Geometry::General).expect("ghz circuit");
    let psi = c.output_state().expect("valid ghz circuit");
    (c, psi)
}
