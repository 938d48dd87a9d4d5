use alloc::vec::Vec;

use super::{hermitian_eigensystem, HermitianEigen, OperatorMatrix};
use crate::{Error, Result};

pub const DEFAULT_HERMITICITY_TOL: f64 = 1e-10;
pub const DEFAULT_POSITIVITY_TOL: f64 = 1e-10;

/// A Hermitian positive-semidefinite operator with positive (not necessarily
/// unit) trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    matrix: OperatorMatrix,
    hermiticity_tol: f64,
    positivity_tol: f64,
}

impl DensityState {
    pub fn new(matrix: OperatorMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, DEFAULT_HERMITICITY_TOL, DEFAULT_POSITIVITY_TOL)
    }

    pub fn with_tolerances(matrix: OperatorMatrix, hermiticity_tol: f64, positivity_tol: f64) -> Result<Self> {
        let state = Self { matrix, hermiticity_tol, positivity_tol };
        state.validate()?;
        Ok(state)
    }

    /// Same tolerances, different matrix.
    pub fn with_matrix(&self, matrix: OperatorMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, self.hermiticity_tol, self.positivity_tol)
    }

    fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        let defect = m.hermiticity_defect();
        if defect > self.hermiticity_tol {
            return Err(Error::NotHermitian { defect });
        }
        let tr = m.trace();
        let norm = m.frobenius_norm();
        if !(tr.re > 0.0) || tr.im.abs() > self.hermiticity_tol * norm.max(1.0) {
            return Err(Error::BadTrace { re: tr.re, im: tr.im });
        }
        let min = self.eigen()?.values[0];
        if min < -self.positivity_tol * norm {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(())
    }

    #[inline]
    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> OperatorMatrix {
        self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn hermiticity_tol(&self) -> f64 {
        self.hermiticity_tol
    }

    pub fn positivity_tol(&self) -> f64 {
        self.positivity_tol
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        hermitian_eigensystem(&self.matrix)
    }

    /// Ascending eigenvalues.
    pub fn spectrum(&self) -> Vec<f64> {
        // Validated states are Hermitian within tolerance, so this cannot fail.
        self.eigen().map(|e| e.values).unwrap_or_default()
    }

    /// `ρ / Tr ρ`.
    pub fn normalized(&self) -> Self {
        Self {
            matrix: self.matrix.scale_real(1.0 / self.trace()),
            hermiticity_tol: self.hermiticity_tol,
            positivity_tol: self.positivity_tol,
        }
    }

    /// Pure state `|ψ⟩⟨ψ|` (not normalized unless `ψ` is).
    pub fn pure(psi: &[super::C64]) -> Result<Self> {
        Self::new(OperatorMatrix::outer(psi, psi))
    }
}

/// Largest absolute difference between two ascending spectra, relative to
/// the largest magnitude in `reference`.
pub(crate) fn spectrum_deviation(reference: &[f64], other: &[f64]) -> f64 {
    let scale = reference.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    reference.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn accepts_unnormalized_state() {
        let s = DensityState::new(OperatorMatrix::from_real_diagonal(&[3.0, 1.0])).unwrap();
        assert_eq!(s.trace(), 4.0);
        assert!((s.normalized().trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_negative_and_non_hermitian() {
        let neg = OperatorMatrix::from_real_diagonal(&[1.0, -0.5]);
        assert!(matches!(DensityState::new(neg), Err(Error::NotPositive { .. })));
        let skew = OperatorMatrix::from_rows([
            [C64::new(1.0, 0.0), C64::new(0.0, 0.1)],
            [C64::new(0.0, 0.1), C64::new(1.0, 0.0)],
        ]);
        assert!(matches!(DensityState::new(skew), Err(Error::NotHermitian { .. })));
        let zero = OperatorMatrix::zeros(2);
        assert!(matches!(DensityState::new(zero), Err(Error::BadTrace { .. })));
    }
}
