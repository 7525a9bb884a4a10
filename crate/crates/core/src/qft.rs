//! Quantum Fourier transform on an arbitrary qubit register.
//!
//! Convention: the forward transform maps `|j>` to
//! `M^{-1/2} sum_k e^{+2 pi i jk/M} |k>`, so phase readout uses the inverse,
//! which concentrates `sum_j e^{i w j} |j>` at bin `k ~ w M / 2 pi`.
//! Both directions return the register in natural (not bit-reversed) order.

use std::f64::consts::PI;

use crate::error::{QpeError, Result};
use crate::gate::GateMatrix;
use crate::statevector::StateVector;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Hadamard(usize),
    ControlledPhase(usize, usize, f64),
    Swap(usize, usize),
}

/// Gate sequence of the forward transform; `register[0]` is the low bit.
fn forward_ops(register: &[usize]) -> Vec<Op> {
    let n = register.len();
    let mut ops = Vec::with_capacity(n * (n + 1) / 2 + n / 2);
    for high in (0..n).rev() {
        ops.push(Op::Hadamard(register[high]));
        for low in (0..high).rev() {
            let angle = 2.0 * PI / (1u64 << (high - low + 1)) as f64;
            ops.push(Op::ControlledPhase(register[low], register[high], angle));
        }
    }
    for i in 0..n / 2 {
        ops.push(Op::Swap(register[i], register[n - 1 - i]));
    }
    ops
}

fn apply(state: &mut StateVector, op: Op, conjugate: bool) -> Result<()> {
    match op {
        Op::Hadamard(q) => state.apply_gate(&GateMatrix::hadamard(), &[q]),
        Op::ControlledPhase(a, b, angle) => {
            state.apply_controlled_phase(a, b, if conjugate { -angle } else { angle })
        }
        Op::Swap(a, b) => state.apply_swap(a, b),
    }
}

fn validate(state: &StateVector, register: &[usize]) -> Result<()> {
    if register.is_empty() {
        return Err(QpeError::EmptyRegister);
    }
    for (i, &q) in register.iter().enumerate() {
        if q >= state.num_qubits() {
            return Err(QpeError::QubitOutOfRange {
                qubit: q,
                num_qubits: state.num_qubits(),
            });
        }
        if register[..i].contains(&q) {
            return Err(QpeError::DuplicateQubit(q));
        }
    }
    Ok(())
}

/// Forward transform on `register`; other qubits are untouched.
pub fn qft_forward(state: &mut StateVector, register: &[usize]) -> Result<()> {
    validate(state, register)?;
    for op in forward_ops(register) {
        apply(state, op, false)?;
    }
    state.check_norm()
}

/// Exact inverse of [`qft_forward`].
pub fn qft_inverse(state: &mut StateVector, register: &[usize]) -> Result<()> {
    validate(state, register)?;
    for op in forward_ops(register).into_iter().rev() {
        apply(state, op, true)?;
    }
    state.check_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::c;
    use num_complex::Complex64;

    fn approx_eq(a: &[Complex64], b: &[Complex64], tol: f64) {
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            assert!((x - y).norm() <= tol, "amplitude {i}: {x} vs {y}");
        }
    }

    #[test]
    fn single_qubit_is_hadamard() {
        let mut s = StateVector::new_basis_state(1, 0).unwrap();
        qft_forward(&mut s, &[0]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        approx_eq(s.amplitudes(), &[c(h), c(h)], 1e-15);
    }

    #[test]
    fn two_qubit_basis_one() {
        let mut s = StateVector::new_basis_state(2, 1).unwrap();
        qft_forward(&mut s, &[0, 1]).unwrap();
        let i = Complex64::i();
        approx_eq(s.amplitudes(), &[c(0.5), 0.5 * i, c(-0.5), -0.5 * i], 1e-15);
    }

    #[test]
    fn uniform_maps_to_zero() {
        let amp = c(1.0 / 8f64.sqrt());
        let mut s = StateVector::from_amplitudes(3, vec![amp; 8]).unwrap();
        qft_forward(&mut s, &[0, 1, 2]).unwrap();
        approx_eq(
            s.amplitudes(),
            &StateVector::new_basis_state(3, 0)
                .unwrap()
                .into_amplitudes(),
            1e-14,
        );
    }

    #[test]
    fn on_grid_phase_reads_out_exactly() {
        let amps: Vec<Complex64> = (0..4)
            .map(|j| Complex64::from_polar(0.5, PI / 2.0 * j as f64))
            .collect();
        let mut s = StateVector::from_amplitudes(2, amps).unwrap();
        qft_inverse(&mut s, &[0, 1]).unwrap();
        let probs = s.register_probabilities(&[0, 1]).unwrap();
        assert!((probs[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn empty_register_rejected() {
        let mut s = StateVector::new_basis_state(2, 0).unwrap();
        assert!(matches!(
            qft_forward(&mut s, &[]),
            Err(QpeError::EmptyRegister)
        ));
        assert!(matches!(
            qft_inverse(&mut s, &[]),
            Err(QpeError::EmptyRegister)
        ));
        assert!(matches!(
            qft_forward(&mut s, &[0, 0]),
            Err(QpeError::DuplicateQubit(0))
        ));
    }
}
