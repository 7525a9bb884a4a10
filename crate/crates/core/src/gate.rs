//! Dense unitary gates and small complex-matrix helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QpeError, Result};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

/// Largest arity a [`GateMatrix`] may have. Local gates stay far below this;
/// the cap is reached only by dense system unitaries (`l <= 12`).
pub const MAX_GATE_ARITY: usize = 12;

/// Unitarity tolerance on `max |G^dagger G - I|`.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// A validated `2^k x 2^k` unitary. Row/column bit `b` refers to the `b`-th
/// target qubit passed at application time, so `targets[0]` is the least
/// significant bit of the local index.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    arity: usize,
    matrix: CMatrix,
}

impl GateMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let arity = arity_of(&matrix)?;
        if arity == 0 || arity > MAX_GATE_ARITY {
            return Err(QpeError::BadArity(arity));
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation > UNITARITY_TOLERANCE {
            return Err(QpeError::NotUnitary { deviation });
        }
        Ok(Self { arity, matrix })
    }

    /// Builds a gate from row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(QpeError::WrongLength {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Self::new(CMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(arity: usize) -> Result<Self> {
        let dim = 1usize << arity;
        Self::new(CMatrix::identity(dim, dim))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            arity: self.arity,
            matrix: self.matrix.adjoint(),
        }
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn compose(&self, other: &GateMatrix) -> Result<Self> {
        if self.arity != other.arity {
            return Err(QpeError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Self::new(&self.matrix * &other.matrix)
    }

    /// `self^power` by repeated squaring.
    pub fn pow(&self, mut power: u64) -> Self {
        let dim = self.dim();
        let mut result = CMatrix::identity(dim, dim);
        let mut base = self.matrix.clone();
        while power > 0 {
            if power & 1 == 1 {
                result = &result * &base;
            }
            power >>= 1;
            if power > 0 {
                base = &base * &base;
            }
        }
        Self {
            arity: self.arity,
            matrix: result,
        }
    }

    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::raw(1, &[c(s), c(s), c(s), c(-s)])
    }

    pub fn pauli_x() -> Self {
        Self::raw(1, &[c(0.0), c(1.0), c(1.0), c(0.0)])
    }

    pub fn pauli_y() -> Self {
        let i = Complex64::i();
        Self::raw(1, &[c(0.0), -i, i, c(0.0)])
    }

    pub fn pauli_z() -> Self {
        Self::raw(1, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
    }

    /// `diag(1, e^{i theta})`.
    pub fn phase(theta: f64) -> Self {
        Self::raw(
            1,
            &[c(1.0), c(0.0), c(0.0), Complex64::from_polar(1.0, theta)],
        )
    }

    fn raw(arity: usize, entries: &[Complex64]) -> Self {
        let dim = 1 << arity;
        Self {
            arity,
            matrix: CMatrix::from_row_slice(dim, dim, entries),
        }
    }
}

#[inline]
pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Returns `k` for a square `2^k x 2^k` matrix.
pub fn arity_of(matrix: &CMatrix) -> Result<usize> {
    let (rows, cols) = matrix.shape();
    if rows != cols || rows == 0 || !rows.is_power_of_two() {
        return Err(QpeError::BadMatrixShape { rows, cols });
    }
    Ok(rows.trailing_zeros() as usize)
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `max |M^dagger M - I|`.
pub fn unitarity_deviation(matrix: &CMatrix) -> f64 {
    let n = matrix.nrows();
    let product = matrix.adjoint() * matrix;
    max_abs_diff(&product, &CMatrix::identity(n, n))
}

/// `max |M - M^dagger|`.
pub fn hermiticity_deviation(matrix: &CMatrix) -> f64 {
    max_abs_diff(matrix, &matrix.adjoint())
}

/// Pauli matrices as plain matrices, handy for building Hamiltonian terms.
pub mod pauli {
    use super::{c, CMatrix};
    use num_complex::Complex64;

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
    }

    pub fn y() -> CMatrix {
        let i = Complex64::i();
        CMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
    }

    pub fn identity() -> CMatrix {
        CMatrix::identity(2, 2)
    }

    /// Kronecker product with `high` on the more significant qubit:
    /// `kron(high, low)` acts on targets `[low_qubit, high_qubit]`.
    pub fn kron(high: &CMatrix, low: &CMatrix) -> CMatrix {
        high.kronecker(low)
    }
}
