#![allow(dead_code)]

use nalgebra::DMatrix;
use qpe_core::{CMatrix, Complex64, GateMatrix, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_state<R: Rng>(rng: &mut R, q: usize) -> StateVector {
    let amps: Vec<Complex64> = (0..1 << q).map(|_| random_complex(rng)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(q, amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// Haar-ish random unitary from the QR factor of a random complex matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, arity: usize) -> GateMatrix {
    let dim = 1 << arity;
    let m = DMatrix::from_fn(dim, dim, |_, _| random_complex(rng));
    GateMatrix::new(m.qr().q()).unwrap()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
    let m = DMatrix::from_fn(dim, dim, |_, _| random_complex(rng));
    (&m + m.adjoint()).scale(0.5)
}

/// Dense embedding of `gate` on `targets` into a `q`-qubit operator, built
/// entry by entry: rows and columns must agree off the targets.
pub fn embed_dense(gate: &CMatrix, targets: &[usize], controls: &[usize], q: usize) -> CMatrix {
    let dim = 1usize << q;
    let local = |i: usize| {
        targets
            .iter()
            .enumerate()
            .map(|(b, &t)| ((i >> t) & 1) << b)
            .sum::<usize>()
    };
    let tmask: usize = targets.iter().map(|t| 1 << t).sum();
    let cmask: usize = controls.iter().map(|c| 1 << c).sum();
    DMatrix::from_fn(dim, dim, |r, c| {
        if (r ^ c) & !tmask != 0 {
            return Complex64::new(0.0, 0.0);
        }
        if r & cmask != cmask {
            return if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        gate[(local(r), local(c))]
    })
}

pub fn mat_vec(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)] * v[c]).sum())
        .collect()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Dense DFT with the `e^{+2 pi i jk / M}` sign.
pub fn dft_matrix(bits: usize) -> CMatrix {
    let m = 1usize << bits;
    DMatrix::from_fn(m, m, |k, j| {
        Complex64::from_polar(
            1.0 / (m as f64).sqrt(),
            std::f64::consts::TAU * (j * k) as f64 / m as f64,
        )
    })
}

/// Eigenvalues/eigenvectors from nalgebra, independent of the crate's Jacobi solver.
pub fn reference_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}
