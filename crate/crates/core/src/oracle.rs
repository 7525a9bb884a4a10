//! Dense brute-force reference: Hamiltonian assembly and a cyclic Jacobi
//! eigensolver for complex Hermitian matrices.

use std::f64::consts::TAU;
use std::ops::Range;

use num_complex::Complex64;

use crate::error::{QpeError, Result};
use crate::gate::{hermiticity_deviation, CMatrix};
use crate::hamiltonian::HamiltonianSum;
use crate::statevector::StateVector;

/// Largest system handled by dense reference routines.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Tolerance on `max |A - A^dagger|` accepted by [`eigendecompose`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Relative spacing (in units of `||A||`) below which eigenvalues share an eigenspace.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

const MAX_SWEEPS: usize = 64;

/// Above this dimension the Householder/implicit-QR solver from nalgebra is
/// used instead of Jacobi sweeps.
pub const JACOBI_MAX_DIM: usize = 128;

/// Eigenvalues in ascending order with orthonormal eigenvectors as matrix columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

/// One term of `V_a = sum_k c_k phi_k`: weight `|c_k|^2` and eigenphase
/// `w_k = -E_k t mod 2 pi` under `U = e^{-iHt}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralComponent {
    pub weight: f64,
    pub phase: f64,
    pub energy: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Spectral norm `max |lambda|`.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k).iter().copied().collect()
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(lambda);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// `max_k ||A v_k - lambda_k v_k||`.
    pub fn max_residual(&self, matrix: &CMatrix) -> f64 {
        (0..self.dim())
            .map(|k| {
                let v = self.eigenvectors.column(k);
                (matrix * v - v * Complex64::new(self.eigenvalues[k], 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |V^dagger V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        crate::gate::unitarity_deviation(&self.eigenvectors)
    }

    /// Index ranges of eigenvalues grouped into numerically degenerate eigenspaces.
    pub fn eigenspaces(&self) -> Vec<Range<usize>> {
        let tol = DEGENERACY_TOLERANCE * self.norm().max(1.0);
        let mut groups = Vec::new();
        let mut start = 0;
        for k in 1..=self.dim() {
            if k == self.dim() || self.eigenvalues[k] - self.eigenvalues[k - 1] > tol {
                groups.push(start..k);
                start = k;
            }
        }
        groups
    }

    /// `<psi|P|psi>` for the projector onto eigenvectors `range`.
    pub fn projector_weight(&self, state: &StateVector, range: Range<usize>) -> Result<f64> {
        self.check_dim(state)?;
        Ok(range.map(|k| self.overlap(state, k).norm_sqr()).sum())
    }

    /// `<phi_k|psi>`.
    pub fn overlap(&self, state: &StateVector, k: usize) -> Complex64 {
        self.eigenvectors
            .column(k)
            .iter()
            .zip(state.amplitudes())
            .map(|(v, a)| v.conj() * a)
            .sum()
    }

    /// `e^{-i A t}` evaluated through the decomposition.
    pub fn exponential(&self, t: f64) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled
                .column_mut(k)
                .scale_mut_complex(Complex64::from_polar(1.0, -lambda * t));
        }
        scaled * self.eigenvectors.adjoint()
    }

    fn check_dim(&self, state: &StateVector) -> Result<()> {
        if state.dim() != self.dim() {
            return Err(QpeError::DimensionMismatch {
                left: state.dim(),
                right: self.dim(),
            });
        }
        Ok(())
    }
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, factor: Complex64);
}

impl<S> ScaleComplex for nalgebra::Matrix<Complex64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<Complex64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, factor: Complex64) {
        self.iter_mut().for_each(|x| *x *= factor);
    }
}

/// Dense `2^l x 2^l` matrix of `sum_i H_i`.
pub fn assemble_dense(h: &HamiltonianSum) -> Result<CMatrix> {
    let l = h.num_system_qubits();
    if l > MAX_DENSE_QUBITS {
        return Err(QpeError::TooLarge {
            qubits: l,
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << l;
    let mut total = CMatrix::zeros(dim, dim);
    for term in h.terms() {
        embed_into(&mut total, term.matrix(), term.support());
    }
    Ok(total)
}

/// Adds `local` acting on `support` (identity elsewhere) into `full`.
pub fn embed_into(full: &mut CMatrix, local: &CMatrix, support: &[usize]) {
    let mask: usize = support.iter().map(|&q| 1usize << q).sum();
    let offsets: Vec<usize> = (0..local.nrows())
        .map(|local_index| {
            support
                .iter()
                .enumerate()
                .fold(0, |acc, (b, &q)| acc | (((local_index >> b) & 1) << q))
        })
        .collect();
    for row in 0..full.nrows() {
        let base = row & !mask;
        let local_row = crate::statevector::extract_bits(row, support);
        for (local_col, off) in offsets.iter().enumerate() {
            full[(row, base | off)] += local[(local_row, local_col)];
        }
    }
}

/// Full eigendecomposition of a Hermitian matrix. Eigenvalues come out
/// ascending; each eigenvector is phased so its largest component is real and
/// positive. Small matrices use cyclic complex Jacobi rotations, larger ones
/// tridiagonalization with implicit QR.
pub fn eigendecompose(matrix: &CMatrix) -> Result<SpectralDecomposition> {
    let n = matrix.nrows();
    if n != matrix.ncols() || n == 0 {
        return Err(QpeError::BadMatrixShape {
            rows: n,
            cols: matrix.ncols(),
        });
    }
    let deviation = hermiticity_deviation(matrix);
    if deviation > HERMITIAN_TOLERANCE {
        return Err(QpeError::NotHermitian { deviation });
    }

    let symmetric = (matrix + matrix.adjoint()).scale(0.5);
    let (values, vectors) = if n <= JACOBI_MAX_DIM {
        jacobi(symmetric)
    } else {
        let eig = symmetric.symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    Ok(canonicalize(&values, &vectors))
}

/// Cyclic Jacobi sweeps until the off-diagonal mass vanishes.
fn jacobi(mut a: CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    let mut v = CMatrix::identity(n, n);
    let frob = a.norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// Ascending order, deterministic eigenvector phases.
fn canonicalize(values: &[f64], v: &CMatrix) -> SpectralDecomposition {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let col = v.column(i);
        let pivot = col
            .iter()
            .copied()
            .enumerate()
            .fold((0, 0.0), |best, (r, x)| {
                if x.norm() > best.1 + 1e-12 {
                    (r, x.norm())
                } else {
                    best
                }
            })
            .0;
        let phase = col[pivot].conj() / col[pivot].norm();
        for r in 0..n {
            eigenvectors[(r, k)] = col[r] * phase;
        }
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// One Jacobi rotation zeroing `a[p][q]`; accumulates it into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    // Phase the q axis so the pivot is real, then do a real symmetric rotation.
    let unit = apq / g;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -s * unit.conj();
    let g_qq = c * unit.conj();

    let n = a.nrows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Expansion of `va` in the eigenbasis with eigenphases for evolution time `t`.
pub fn spectral_components(
    va: &StateVector,
    decomposition: &SpectralDecomposition,
    t: f64,
) -> Result<Vec<SpectralComponent>> {
    decomposition.check_dim(va)?;
    if t == 0.0 || !t.is_finite() {
        return Err(QpeError::InvalidParameter(
            "evolution time must be finite and nonzero".into(),
        ));
    }
    let components: Vec<SpectralComponent> = decomposition
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &energy)| SpectralComponent {
            weight: decomposition.overlap(va, k).norm_sqr(),
            phase: (-energy * t).rem_euclid(TAU),
            energy,
        })
        .collect();
    let sum: f64 = components.iter().map(|c| c.weight).sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(QpeError::WeightNormalization { sum });
    }
    Ok(components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{c, pauli};

    #[test]
    fn diagonal_matrix_sorted() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0), c(1.0), c(2.0)]));
        let d = eigendecompose(&m).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert!((d.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((d.eigenvectors[(2, 1)].norm() - 1.0).abs() < 1e-15);
        assert!((d.eigenvectors[(0, 2)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let d = eigendecompose(&pauli::x()).unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // (1, -1)/sqrt2 up to phase for -1.
        let v0 = d.eigenvector(0);
        assert!(((v0[0] + v0[1]).norm()) < 1e-14);
        assert!((v0[0].norm() - h).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(
            eigendecompose(&m),
            Err(QpeError::NotHermitian { .. })
        ));
    }

    #[test]
    fn components_of_eigenvector() {
        let d = eigendecompose(&pauli::z()).unwrap();
        let phi0 = StateVector::from_amplitudes(1, d.eigenvector(0)).unwrap();
        let comps = spectral_components(&phi0, &d, 1.0).unwrap();
        assert!((comps[0].weight - 1.0).abs() < 1e-14);
        assert!(comps[1].weight < 1e-28);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mix = StateVector::from_amplitudes(1, vec![c(h), c(h)]).unwrap();
        let comps = spectral_components(&mix, &d, 1.0).unwrap();
        assert!((comps[0].weight - 0.5).abs() < 1e-14);
        assert!((comps[1].weight - 0.5).abs() < 1e-14);
        assert!(spectral_components(&mix, &d, 0.0).is_err());
    }

    #[test]
    fn eigenspace_grouping() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0),
            c(-1.0),
            c(1.0),
            c(-1.0),
        ]));
        let d = eigendecompose(&m).unwrap();
        assert_eq!(d.eigenspaces(), vec![0..2, 2..4]);
    }
}
