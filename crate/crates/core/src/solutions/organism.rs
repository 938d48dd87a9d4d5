//! Two-qubit "organism": `H = 2σx ⊗ 1 + 1 ⊗ σz` with `f(ρ) = ρ²`.
//!
//! The seed evolves linearly five times faster than without feedback. Its
//! Darboux partner `ρ₁(t) = e^{−5iHt} ρ_int(t) e^{5iHt}` couples the qubits for
//! a few time units around `t = 0` and decouples them again asymptotically.

// Unused whenever std is linked into the build.
use alloc::vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::darboux::{DarbouxDressing, DarbouxParameters};
use crate::feedback::FeedbackPolynomial;
use crate::linalg::{unitary_conjugate_exp, CompositeLayout, DensityState, OperatorMatrix, C64};
use crate::{Error, Result};

const S7: f64 = 2.645_751_311_064_590_6;
const S15: f64 = 3.872_983_346_207_417;
const S105: f64 = 10.246_950_765_959_598;

/// Rate of the linear factor `e^{−5iHt}`.
pub const LINEAR_RATE: f64 = 5.0;

/// Trace of the unnormalized states.
pub const TRACE: f64 = 10.0;

fn sech(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    2.0 * (-x.abs()).exp() / (1.0 + e)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Organism;

impl Organism {
    pub fn new() -> Self {
        Self
    }

    pub fn hamiltonian(&self) -> OperatorMatrix {
        OperatorMatrix::from_real_rows([
            [1.0, 2.0, 0.0, 0.0],
            [2.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 2.0],
            [0.0, 0.0, 2.0, -1.0],
        ])
    }

    pub fn feedback(&self) -> FeedbackPolynomial {
        FeedbackPolynomial::square()
    }

    pub fn layout(&self) -> CompositeLayout {
        CompositeLayout::qubits(2)
    }

    /// Tensor factor holding the given particle (1 or 2).
    pub fn particle_factor(&self, particle: usize) -> Result<usize> {
        match particle {
            1 => Ok(1),
            2 => Ok(0),
            _ => Err(Error::invalid("particle must be 1 or 2")),
        }
    }

    fn diagonal(sign7: f64, sign15: f64) -> OperatorMatrix {
        OperatorMatrix::from_real_diagonal(&[
            (5.0 + sign7 * S7) / 2.0,
            (5.0 - sign7 * S7) / 2.0,
            (5.0 + sign15 * S15) / 2.0,
            (5.0 - sign15 * S15) / 2.0,
        ])
    }

    /// Unnormalized seed `ρ(0)`.
    pub fn seed(&self) -> DensityState {
        DensityState::new(Self::diagonal(1.0, 1.0)).expect("seed is a valid state")
    }

    /// `ρ_int(t → −∞)`: the seed with the lower block's populations swapped.
    pub fn asymptote_past(&self) -> DensityState {
        DensityState::new(Self::diagonal(1.0, -1.0)).expect("asymptote is a valid state")
    }

    /// `ρ_int(t → +∞)`: the seed with the upper block's populations swapped.
    pub fn asymptote_future(&self) -> DensityState {
        DensityState::new(Self::diagonal(-1.0, 1.0)).expect("asymptote is a valid state")
    }

    /// `ρ(t) = e^{−5iHt} ρ(0) e^{5iHt}`.
    pub fn linear_solution(&self, t: f64) -> Result<DensityState> {
        unitary_conjugate_exp(&self.hamiltonian(), LINEAR_RATE * t, &self.seed())
    }

    /// Interaction-picture state `ρ_int(t)`.
    pub fn interaction_state(&self, t: f64) -> Result<DensityState> {
        if !t.is_finite() {
            return Err(Error::NonFinite);
        }
        let th = (2.0 * t).tanh();
        let s = sech(2.0 * t) / 8.0;
        let c = |re: f64, im: f64| C64::new(re * s, im * s);
        let e02 = c(-3.0 * S7 - S15, -13.0 - S105);
        let e03 = c(3.0 * S7 - 3.0 * S15, -7.0 + S105);
        let e12 = c(S7 - S15, 15.0 - S105);
        let e13 = c(4.0 * (S7 + S15), 0.0);
        let z = C64::new(0.0, 0.0);
        let r = |x: f64| C64::new(x, 0.0);
        let m = OperatorMatrix::from_rows([
            [r(5.0 - S7 * th), z, e02, e03],
            [z, r(5.0 + S7 * th), e12, e13],
            [e02.conj(), e12.conj(), r(5.0 + S15 * th), z],
            [e03.conj(), e13.conj(), z, r(5.0 - S15 * th)],
        ]);
        DensityState::new(m.scale_real(0.5))
    }

    /// `ρ₁(t) = e^{−5iHt} ρ_int(t) e^{5iHt}`, unnormalized (trace 10).
    pub fn solution(&self, t: f64) -> Result<DensityState> {
        unitary_conjugate_exp(&self.hamiltonian(), LINEAR_RATE * t, &self.interaction_state(t)?)
    }

    /// Lax data producing [`solution`](Self::solution) from the seed.
    pub fn darboux_parameters(&self) -> DarbouxParameters {
        let chi = vec![C64::new(-0.75, S7 / 4.0), C64::new(1.0, 0.0), C64::new(0.25, S15 / 4.0), C64::new(1.0, 0.0)];
        DarbouxParameters::new(C64::new(0.0, -1.0), LINEAR_RATE, chi).expect("fixed parameters are valid")
    }

    pub fn dressing(&self) -> Result<DarbouxDressing> {
        DarbouxDressing::new(&self.seed(), &self.hamiltonian(), &self.feedback(), &self.darboux_parameters())
    }

    /// Closed-form eigenvalues `(p₋, p₊)` of the normalized reduced state of
    /// `particle` (1 or 2).
    pub fn reduced_eigenvalues(&self, particle: usize, t: f64) -> Result<(f64, f64)> {
        let half = match particle {
            1 => (S15 - S7) / 20.0 * (2.0 * t).tanh(),
            2 => (26.0 + 2.0 * S105).sqrt() / 40.0 * sech(2.0 * t),
            _ => return Err(Error::invalid("particle must be 1 or 2")),
        };
        let lo = 0.5 - half.abs();
        Ok((lo, 1.0 - lo))
    }
}

/// Unnormalized `ρ₁(t)` of the organism.
pub fn organism_solution(t: f64) -> Result<DensityState> {
    Organism.solution(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sech_matches_cosh() {
        for x in [-3.0, -0.2, 0.0, 1.5] {
            assert!((sech(x) - 1.0 / f64::cosh(x)).abs() < 1e-15);
        }
        assert!(sech(800.0) == 0.0);
    }

    #[test]
    fn interaction_state_limits() {
        let o = Organism;
        let late = o.interaction_state(30.0).unwrap();
        let early = o.interaction_state(-30.0).unwrap();
        assert!(late.matrix().max_abs_diff(o.asymptote_future().matrix()) < 1e-12);
        assert!(early.matrix().max_abs_diff(o.asymptote_past().matrix()) < 1e-12);
        assert!((o.interaction_state(0.4).unwrap().trace() - TRACE).abs() < 1e-12);
    }

    #[test]
    fn dressing_reproduces_closed_form() {
        let o = Organism;
        let d = o.dressing().unwrap();
        for t in [-2.0, 0.0, 0.7] {
            let a = d.matrix_at(t).unwrap();
            let b = o.solution(t).unwrap();
            assert!(a.max_abs_diff(b.matrix()) < 1e-10);
        }
    }

    #[test]
    fn particle_index() {
        assert_eq!(Organism.particle_factor(1).unwrap(), 1);
        assert_eq!(Organism.particle_factor(2).unwrap(), 0);
        assert!(Organism.particle_factor(3).is_err());
    }
}
