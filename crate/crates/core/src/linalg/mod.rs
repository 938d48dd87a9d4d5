//! Dense complex linear algebra on square operators.

mod eigen;
mod state;
mod tensor;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

// Unused whenever std is linked into the build.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::{Error, Result};

pub use eigen::{hermitian_eigensystem, matrix_function, unitary_conjugate_exp, HermitianEigen, Propagator};
pub(crate) use state::spectrum_deviation;
pub use state::{DensityState, DEFAULT_HERMITICITY_TOL, DEFAULT_POSITIVITY_TOL};
pub use tensor::{
    partial_trace, partial_trace_matrix, partial_transpose, partial_transpose_matrix, tensor_product, CompositeLayout,
};

pub type C64 = num_complex::Complex64;

/// Imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix in row-major dense storage.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl OperatorMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::NotSquare { len: entries.len() });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        Self { dim, entries: vec![C64::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { C64::new(1.0, 0.0) } else { C64::zero() })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.entries[r * dim + c] = f(r, c);
            }
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |r, c| if r == c { C64::new(diag[r], 0.0) } else { C64::zero() })
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self::from_fn(diag.len(), |r, c| if r == c { diag[r] } else { C64::zero() })
    }

    /// Builds a matrix from nested rows of real numbers.
    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, |r, c| C64::new(rows[r][c], 0.0))
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self::from_fn(N, |r, c| rows[r][c])
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        assert_eq!(u.len(), v.len(), "outer product of vectors with different lengths");
        Self::from_fn(u.len(), |r, c| u[r] * v[c].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|z| z * s).collect() }
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }

    /// `‖M − M†‖_F / ‖M‖_F`, zero for the zero matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                acc += (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        acc.sqrt() / norm
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector length does not match operator dimension");
        (0..self.dim).map(|r| (0..self.dim).map(|c| self[(r, c)] * v[c]).sum()).collect()
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = vec![C64::zero(); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a.is_zero() {
                    continue;
                }
                let row = &other.entries[k * n..(k + 1) * n];
                let dst = &mut out[r * n..(r + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Self { dim: n, entries: out }
    }

    /// Whether every off-diagonal entry vanishes and the diagonal is constant,
    /// within `tol · ‖M‖_F`.
    pub fn is_multiple_of_identity(&self, tol: f64) -> bool {
        let c = self.trace() / self.dim as f64;
        let dev = (self - &Self::identity(self.dim).scale(c)).frobenius_norm();
        dev <= tol * self.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    /// Whether `‖[M, B]‖_F ≤ tol · ‖M‖_F · ‖B‖_F`.
    pub fn commutes_with(&self, other: &Self, tol: f64) -> bool {
        match commutator(self, other) {
            Ok(c) => c.frobenius_norm() <= tol * self.frobenius_norm() * other.frobenius_norm(),
            Err(_) => false,
        }
    }

    /// Embeds this `d × d` block into a `total`-dimensional zero matrix at
    /// rows/columns `offset .. offset + d`.
    pub fn embed(&self, offset: usize, total: usize) -> Result<Self> {
        if offset + self.dim > total {
            return Err(Error::DimensionMismatch { left: offset + self.dim, right: total });
        }
        let mut out = Self::zeros(total);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[(offset + r, offset + c)] = self[(r, c)];
            }
        }
        Ok(out)
    }

    /// Inverse of [`embed`](Self::embed): the principal block of size `dim`
    /// starting at `offset`.
    pub fn block(&self, offset: usize, dim: usize) -> Result<Self> {
        if offset + dim > self.dim || dim == 0 {
            return Err(Error::DimensionMismatch { left: offset + dim, right: self.dim });
        }
        Ok(Self::from_fn(dim, |r, c| self[(offset + r, offset + c)]))
    }

    /// Reorders basis vectors: entry `(r, c)` of the result is entry
    /// `(perm[r], perm[c])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim, "permutation length mismatch");
        Self::from_fn(self.dim, |r, c| self[(perm[r], perm[c])])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

fn check_dims(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { left: a.dim, right: b.dim });
    }
    Ok(())
}

/// `AB − BA`.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_dims(a, b)?;
    let ab = a.mul_unchecked(b);
    let ba = b.mul_unchecked(a);
    Ok(&ab - &ba)
}

impl Index<(usize, usize)> for OperatorMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.entries[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for OperatorMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.entries[r * self.dim + c]
    }
}

macro_rules! elementwise {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&OperatorMatrix> for &OperatorMatrix {
            type Output = OperatorMatrix;

            fn $method(self, rhs: &OperatorMatrix) -> OperatorMatrix {
                assert_eq!(self.dim, rhs.dim, "dimension mismatch");
                OperatorMatrix {
                    dim: self.dim,
                    entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a $op b).collect(),
                }
            }
        }

        impl $tr<OperatorMatrix> for OperatorMatrix {
            type Output = OperatorMatrix;

            fn $method(self, rhs: OperatorMatrix) -> OperatorMatrix {
                (&self).$method(&rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl Mul<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Mul<OperatorMatrix> for OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: OperatorMatrix) -> OperatorMatrix {
        &self * &rhs
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn neg(self) -> OperatorMatrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OperatorMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
