mod common;

use common::*;
use qpe_core::qft::{qft_forward, qft_inverse};
use qpe_core::{Complex64, StateVector};
use std::f64::consts::TAU;

#[test]
fn forward_equals_dense_dft_up_to_five_qubits() {
    let mut r = rng(21);
    for bits in 1..=5 {
        let register: Vec<usize> = (0..bits).collect();
        let psi = random_state(&mut r, bits);
        let mut s = psi.clone();
        qft_forward(&mut s, &register).unwrap();
        let expected = mat_vec(&dft_matrix(bits), psi.amplitudes());
        assert!(max_diff(s.amplitudes(), &expected) < 1e-10, "bits {bits}");

        let mut s = psi.clone();
        qft_inverse(&mut s, &register).unwrap();
        let expected = mat_vec(&dft_matrix(bits).adjoint(), psi.amplitudes());
        assert!(max_diff(s.amplitudes(), &expected) < 1e-10, "bits {bits}");
    }
}

#[test]
fn scattered_register_matches_embedded_dft() {
    let mut r = rng(22);
    let register = [4, 1, 3];
    let psi = random_state(&mut r, 5);
    let mut s = psi.clone();
    qft_forward(&mut s, &register).unwrap();
    let dense = embed_dense(&dft_matrix(3), &register, &[], 5);
    assert!(max_diff(s.amplitudes(), &mat_vec(&dense, psi.amplitudes())) < 1e-10);
}

#[test]
fn round_trip_up_to_ten_qubits() {
    let mut r = rng(23);
    for bits in [3, 7, 10] {
        let psi = random_state(&mut r, bits);
        let register: Vec<usize> = (0..bits).collect();
        let mut s = psi.clone();
        qft_forward(&mut s, &register).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        qft_inverse(&mut s, &register).unwrap();
        assert!(max_diff(s.amplitudes(), psi.amplitudes()) < 1e-12);
    }
}

#[test]
fn qubits_outside_register_untouched() {
    let mut r = rng(24);
    let inside = random_state(&mut r, 3);
    let outside = random_state(&mut r, 2);
    let mut s = inside.tensor(&outside).unwrap();
    qft_forward(&mut s, &[0, 1, 2]).unwrap();
    let mut expected_inside = inside.clone();
    qft_forward(&mut expected_inside, &[0, 1, 2]).unwrap();
    let expected = expected_inside.tensor(&outside).unwrap();
    assert!(max_diff(s.amplitudes(), expected.amplitudes()) < 1e-12);
}

/// Half-bin offset phase at M = 8 leaks equally into bins 1 and 2.
#[test]
fn off_grid_phase_splits_between_neighbouring_bins() {
    let m = 8usize;
    let omega = TAU * 1.5 / m as f64;
    let amps: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(1.0 / (m as f64).sqrt(), omega * j as f64))
        .collect();
    let mut s = StateVector::from_amplitudes(3, amps).unwrap();
    qft_inverse(&mut s, &[0, 1, 2]).unwrap();
    let probs = s.register_probabilities(&[0, 1, 2]).unwrap();

    // Independent route: direct geometric sum for bin k.
    let direct = |k: usize| {
        let amp: Complex64 = (0..m)
            .map(|j| {
                Complex64::from_polar(
                    1.0 / m as f64,
                    (omega - TAU * k as f64 / m as f64) * j as f64,
                )
            })
            .sum();
        amp.norm_sqr()
    };
    let closed_form = 1.0 / ((m * m) as f64 * (std::f64::consts::PI / 16.0).sin().powi(2));
    assert!((direct(1) - closed_form).abs() < 1e-12);
    assert!((closed_form - 0.410_533_5).abs() < 1e-7);
    assert!((probs[1] - closed_form).abs() < 1e-12);
    assert!((probs[2] - closed_form).abs() < 1e-12);
}
