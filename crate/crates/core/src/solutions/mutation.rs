//! Three-level "sudden mutation" family for `f(ρ) = (1 − h)ρ + hρ²` and
//! `H = Σ n|n⟩⟨n|`, restricted to the levels `k, k+1, k+2`.

// Unused whenever std is linked into the build.
use alloc::vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::darboux::{DarbouxDressing, DarbouxParameters};
use super::multispecies::MultiSpeciesConfig;
use crate::feedback::FeedbackPolynomial;
use crate::linalg::{DensityState, OperatorMatrix, C64};
use crate::{Error, Result};

const SQRT5: f64 = 2.236_067_977_499_79;

/// `15 + √5`, the trace of the unnormalized seed.
fn norm() -> f64 {
    15.0 + SQRT5
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MutationParams {
    pub feedback_strength: f64,
    pub alpha: f64,
    pub level_offset: usize,
}

impl MutationParams {
    pub fn new(feedback_strength: f64, alpha: f64, level_offset: usize) -> Self {
        Self { feedback_strength, alpha, level_offset }
    }

    /// Critical strength `h₀ = (15 + √5)/(5 + √5)` at which `ω₀ = 0`.
    pub fn critical_strength() -> f64 {
        norm() / (5.0 + SQRT5)
    }

    pub fn critical() -> Self {
        Self::new(Self::critical_strength(), 1.0, 0)
    }

    /// `ω₀ = 1 − h(5 + √5)/(15 + √5)`.
    pub fn omega0(&self) -> f64 {
        1.0 - self.feedback_strength * (5.0 + SQRT5) / norm()
    }

    /// `γ = 2h/(15 + √5)`.
    pub fn gamma(&self) -> f64 {
        2.0 * self.feedback_strength / norm()
    }

    pub fn feedback(&self) -> FeedbackPolynomial {
        FeedbackPolynomial::quadratic(self.feedback_strength)
    }

    /// `diag(k, k+1, k+2)`.
    pub fn hamiltonian(&self) -> OperatorMatrix {
        let k = self.level_offset as f64;
        OperatorMatrix::from_real_diagonal(&[k, k + 1.0, k + 2.0])
    }

    /// Off-diagonal `ρ₀₁ = ρ₁₂` (before normalization by `15 + √5`).
    pub fn xi(&self, t: f64) -> C64 {
        let g = self.gamma() * t;
        let a = self.alpha;
        // α / (e^{γt} + α² e^{−γt}), written to avoid overflow
        let envelope = if g >= 0.0 {
            a * (-g).exp() / (1.0 + a * a * (-2.0 * g).exp())
        } else {
            a * g.exp() / ((2.0 * g).exp() + a * a)
        };
        let prefactor = C64::new(2.0, 3.0 - SQRT5) * (3.0 + SQRT5).sqrt() / 3f64.sqrt();
        prefactor * envelope * C64::from_polar(1.0, self.omega0() * t)
    }

    /// Corner `ρ₀₂` (before normalization).
    pub fn zeta(&self, t: f64) -> C64 {
        let g2 = 2.0 * self.gamma() * t;
        let a2 = self.alpha * self.alpha;
        let (w_late, w_early) = if g2 >= 0.0 {
            let e = (-g2).exp();
            (1.0 / (1.0 + a2 * e), a2 * e / (1.0 + a2 * e))
        } else {
            let e = g2.exp();
            (e / (e + a2), a2 / (e + a2))
        };
        let value = C64::new(-3.0, 0.0) * w_late - C64::new(1.0, 4.0 * SQRT5) / 3.0 * w_early;
        value * C64::from_polar(1.0, 2.0 * self.omega0() * t)
    }
}

/// Unit-trace 3×3 state on levels `k, k+1, k+2`.
///
/// The lower triangle is the Hermitian completion of the upper one.
pub fn mutation3(params: &MutationParams, t: f64) -> Result<DensityState> {
    let xi = params.xi(t);
    let zeta = params.zeta(t);
    let d = C64::new(5.0, 0.0);
    let mid = C64::new(5.0 + SQRT5, 0.0);
    let m = OperatorMatrix::from_rows([[d, xi, zeta], [xi.conj(), mid, xi], [zeta.conj(), xi.conj(), d]]);
    DensityState::new(m.scale_real(1.0 / norm()))
}

impl MutationParams {
    /// The same state placed on levels `k..k+3` of a `total`-level space.
    pub fn embedded(&self, t: f64, total: usize) -> Result<DensityState> {
        let m = mutation3(self, t)?.into_matrix().embed(self.level_offset, total)?;
        DensityState::new(m)
    }

    /// Time at which `|ξ|²` peaks, `ln α / γ`.
    pub fn peak_time(&self) -> Result<f64> {
        if !(self.alpha > 0.0) || !(self.gamma() > 0.0) {
            return Err(Error::invalid("peak time needs alpha > 0 and h > 0"));
        }
        Ok(self.alpha.ln() / self.gamma())
    }

    /// Time for `|ξ(t)|²` to fall from `upper` to `lower` (fractions of its
    /// peak value) after the peak, found by bisection.
    pub fn fall_time(&self, upper: f64, lower: f64) -> Result<f64> {
        if !(0.0 < lower && lower < upper && upper < 1.0) {
            return Err(Error::invalid("fall time needs 0 < lower < upper < 1"));
        }
        let peak_t = self.peak_time()?;
        let peak = self.xi(peak_t).norm_sqr();
        let level = |t: f64| self.xi(t).norm_sqr() / peak;
        let crossing = |target: f64| {
            let mut span = 1.0 / self.gamma();
            while level(peak_t + span) > target {
                span *= 2.0;
            }
            let (mut lo, mut hi) = (peak_t, peak_t + span);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if level(mid) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                    break;
                }
            }
            0.5 * (lo + hi)
        };
        Ok(crossing(lower) - crossing(upper))
    }

    /// Darboux dressing that generates this family from the single-species
    /// (`l = 0`) seed with `a = 5`, `b = −4`, `m = 1`.
    ///
    /// The seed is normalized by `c = 2/(15 + √5)`, so the Lax parameter is
    /// `ν = −ic` and the linear rate is `ω₀`.
    pub fn construction(&self) -> Result<DarbouxDressing> {
        let cfg = MultiSpeciesConfig::new(
            5.0,
            -4.0,
            1,
            self.level_offset,
            0,
            vec![C64::new(self.alpha, 0.0)],
            vec![C64::new(1.0, 0.0)],
            self.feedback_strength,
        )?;
        let c = 2.0 / norm();
        let seed = DensityState::new(cfg.seed()?.into_matrix().scale_real(c))?;
        let params = DarbouxParameters::new(C64::new(0.0, -c), self.omega0(), cfg.lax_vector())?;
        DarbouxDressing::new(&seed, &cfg.hamiltonian(), &self.feedback(), &params)
    }
}

/// Family member obtained from the general construction. It agrees with
/// [`mutation3`] up to a constant phase on the middle level.
pub fn mutation3_via_construction(params: &MutationParams, t: f64) -> Result<DensityState> {
    params.construction()?.at(t)
}
