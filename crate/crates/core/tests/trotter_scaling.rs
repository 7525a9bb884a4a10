mod common;

use common::*;
use qpe_core::gate::{max_abs_diff, pauli, unitarity_deviation};
use qpe_core::hamiltonian::{
    exact_unitary, term_exponential, trotter_evolve, trotter_step, trotter_unitary,
};
use qpe_core::oracle::assemble_dense;
use qpe_core::problems::build_transverse_ising;
use qpe_core::{CMatrix, EvolutionParams, HamiltonianSum, LocalTerm, RegisterLayout, StateVector};

fn x_plus_z() -> HamiltonianSum {
    HamiltonianSum::new(
        1,
        vec![
            LocalTerm::new(vec![0], pauli::x()).unwrap(),
            LocalTerm::new(vec![0], pauli::z()).unwrap(),
        ],
    )
    .unwrap()
}

fn commuting_zz() -> HamiltonianSum {
    HamiltonianSum::new(
        2,
        vec![
            LocalTerm::new(vec![0], pauli::z()).unwrap(),
            LocalTerm::new(vec![1], pauli::z().scale(0.7)).unwrap(),
        ],
    )
    .unwrap()
}

/// Independent reference `e^{-iHt}` by Taylor series with scaling and squaring.
fn taylor_exponential(h: &CMatrix, t: f64) -> CMatrix {
    let n = h.nrows();
    let squarings = 10;
    let a = h.scale(t / f64::powi(2.0, squarings)) * qpe_core::Complex64::new(0.0, -1.0);
    let mut term = CMatrix::identity(n, n);
    let mut sum = CMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &a / qpe_core::Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn trotter_error(h: &HamiltonianSum, t: f64, slices: usize) -> f64 {
    let params = EvolutionParams::new(t, slices, 1e-3).unwrap();
    let trotter = trotter_unitary(h, &params).unwrap();
    let exact = exact_unitary(h, t).unwrap();
    max_abs_diff(trotter.matrix(), exact.matrix())
}

#[test]
fn exact_unitary_agrees_with_series_reference() {
    let mut r = rng(31);
    for l in 1..=3 {
        let terms =
            vec![LocalTerm::new((0..l).collect(), random_hermitian(&mut r, 1 << l)).unwrap()];
        let h = HamiltonianSum::new(l, terms).unwrap();
        let u = exact_unitary(&h, 0.9).unwrap();
        let reference = taylor_exponential(&assemble_dense(&h).unwrap(), 0.9);
        assert!(max_abs_diff(u.matrix(), &reference) < 1e-10);
    }
}

#[test]
fn single_term_step_equals_term_exponential() {
    let mut r = rng(32);
    let term = LocalTerm::new(vec![1, 0], random_hermitian(&mut r, 4)).unwrap();
    let h = HamiltonianSum::new(2, vec![term.clone()]).unwrap();
    let layout = RegisterLayout::new(1, 2, 0).unwrap();
    let psi = random_state(&mut r, 3);
    let mut a = psi.clone();
    trotter_step(&mut a, &h, 0.37, &layout).unwrap();
    let mut b = psi;
    b.apply_gate(&term_exponential(&term, 0.37).unwrap(), &[2, 1])
        .unwrap();
    assert!(max_diff(a.amplitudes(), b.amplitudes()) < 1e-12);
}

#[test]
fn commuting_terms_are_exact_for_every_slice_count() {
    let h = commuting_zz();
    for r in [1, 2, 5, 16] {
        assert!(trotter_error(&h, 1.3, r) <= 1e-9);
    }
}

#[test]
fn single_step_error_is_second_order_in_dt() {
    let h = x_plus_z();
    let dt = 0.1;
    let err = trotter_error(&h, dt, 1);
    assert!(err > 0.0);
    // Leading error of e^{-iX dt} e^{-iZ dt} is ||[X,Z]||/2 dt^2 = dt^2.
    assert!(err <= 1.2 * dt * dt, "err {err}");
    assert!(err >= 0.8 * dt * dt, "err {err}");
}

#[test]
fn first_order_convergence_ratios() {
    let h = x_plus_z();
    let errors: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&r| trotter_error(&h, 1.0, r))
        .collect();
    for pair in errors.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn evolve_with_one_slice_is_one_step() {
    let mut r = rng(33);
    let h = build_transverse_ising(3, 1.0, 0.6).unwrap();
    let layout = RegisterLayout::new(1, 3, 0).unwrap();
    let psi = random_state(&mut r, 4);
    let mut a = psi.clone();
    trotter_evolve(
        &mut a,
        &h,
        &EvolutionParams::new(0.8, 1, 1e-3).unwrap(),
        &layout,
    )
    .unwrap();
    let mut b = psi;
    trotter_step(&mut b, &h, 0.8, &layout).unwrap();
    assert!(max_diff(a.amplitudes(), b.amplitudes()) < 1e-14);
}

#[test]
fn exact_unitary_group_inverse() {
    let mut r = rng(34);
    let h = HamiltonianSum::new(
        2,
        vec![LocalTerm::new(vec![0, 1], random_hermitian(&mut r, 4)).unwrap()],
    )
    .unwrap();
    let forward = exact_unitary(&h, 1.7).unwrap();
    let backward = exact_unitary(&h, -1.7).unwrap();
    assert!(
        max_abs_diff(
            &(forward.matrix() * backward.matrix()),
            &CMatrix::identity(4, 4)
        ) < 1e-10
    );
    assert!(unitarity_deviation(forward.matrix()) < 1e-10);
}

#[test]
fn energy_conserved_under_exact_evolution() {
    let mut r = rng(35);
    let h = build_transverse_ising(3, 0.8, 1.1).unwrap();
    let dense = assemble_dense(&h).unwrap();
    let psi = random_state(&mut r, 3);
    let energy = |s: &StateVector| {
        let hv = mat_vec(&dense, s.amplitudes());
        s.amplitudes()
            .iter()
            .zip(&hv)
            .map(|(a, b)| a.conj() * b)
            .sum::<qpe_core::Complex64>()
            .re
    };
    let u = exact_unitary(&h, 2.3).unwrap();
    let mut evolved =
        StateVector::from_amplitudes(3, mat_vec(u.matrix(), psi.amplitudes())).unwrap();
    assert!((energy(&psi) - energy(&evolved)).abs() < 1e-6);

    // Trotter evolution drifts by no more than its operator error times ||H||.
    let params = EvolutionParams::new(2.3, 64, 1e-3).unwrap();
    let layout = RegisterLayout::new(1, 3, 0).unwrap();
    let mut full = StateVector::new_basis_state(1, 0)
        .unwrap()
        .tensor(&psi)
        .unwrap();
    trotter_evolve(&mut full, &h, &params, &layout).unwrap();
    evolved = full.extract_register(&[1, 2, 3], &[0], 0).unwrap();
    let bound = 2.0 * 8.0 * trotter_error(&h, 2.3, 64) * dense.norm();
    assert!((energy(&psi) - energy(&evolved)).abs() <= bound);
}

#[test]
fn term_exponentials_are_unitary() {
    let mut r = rng(36);
    for k in 1..=6 {
        let term = LocalTerm::new((0..k).collect(), random_hermitian(&mut r, 1 << k)).unwrap();
        let g = term_exponential(&term, 0.77).unwrap();
        assert!(unitarity_deviation(g.matrix()) < 1e-10);
    }
}
