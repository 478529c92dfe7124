use nalgebra::Matrix4;
use num_complex::Complex64;

use super::Gate;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn cnot_matrix() -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m[(0, 0)] = c(1.0);
    m[(1, 1)] = c(1.0);
    m[(2, 3)] = c(1.0);
    m[(3, 2)] = c(1.0);
    m
}

fn hadamard_first() -> Matrix4<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = Matrix4::zeros();
    // H on the leading qubit, identity on the trailing one
    for b in 0..2 {
        m[(b, b)] = c(h);
        m[(b, 2 + b)] = c(h);
        m[(2 + b, b)] = c(h);
        m[(2 + b, 2 + b)] = c(-h);
    }
    m
}

/// CNOT with `control` as the leading tensor factor.
pub fn cnot(control: usize, target: usize) -> Gate {
    Gate::new(control, target, cnot_matrix())
}

/// `H ⊗ I` packaged as a two-qubit gate.
pub fn hadamard_gate(a: usize, b: usize) -> Gate {
    Gate::new(a, b, hadamard_first())
}

/// `CNOT (H ⊗ I)`: maps `|00>` to the Bell state `(|00> + |11>)/sqrt(2)`.
pub fn bell_gate(a: usize, b: usize) -> Gate {
    Gate::new(a, b, cnot_matrix() * hadamard_first())
}

/// Applies `gate` in place to an `n`-qubit amplitude vector.
pub fn apply_gate(amps: &mut [Complex64], n: usize, gate: &Gate) {
    let [a, b] = gate.qubits;
    let ba = 1usize << (n - 1 - a);
    let bb = 1usize << (n - 1 - b);
    let u = &gate.unitary;
    for base in 0..amps.len() {
        if base & (ba | bb) != 0 {
            continue;
        }
        let idx = [base, base | bb, base | ba, base | ba | bb];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &i) in idx.iter().enumerate() {
            amps[i] = u[(r, 0)] * v[0] + u[(r, 1)] * v[1] + u[(r, 2)] * v[2] + u[(r, 3)] * v[3];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cnot_truth_table_respects_orientation() {
        // control on qubit 1, target qubit 0: |01> -> |11>
        let mut amps = vec![c(0.0); 4];
        amps[0b01] = c(1.0);
        apply_gate(&mut amps, 2, &cnot(1, 0));
        assert_eq!(amps[0b11], c(1.0));
    }

    #[test]
    fn gate_on_nonadjacent_qubits_of_larger_register() {
        let mut amps = vec![c(0.0); 8];
        amps[0b100] = c(1.0);
        apply_gate(&mut amps, 3, &cnot(0, 2));
        assert_eq!(amps[0b101], c(1.0));
    }
}
