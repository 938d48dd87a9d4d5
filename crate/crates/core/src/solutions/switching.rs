//! Switching functions of the two-parameter two-species family.

// Unused whenever std is linked into the build.
#[allow(unused_imports)]
use num_traits::Float;

/// Switching moments `t₀`, `t₁`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwitchingProfile {
    pub t0: f64,
    pub t1: f64,
}

impl SwitchingProfile {
    pub fn new(t0: f64, t1: f64) -> Self {
        Self { t0, t1 }
    }
}

/// `F = e^{t/2}/D`, `F₀ = e^{(t+t₀)/4}/D`, `F₁ = e^{(t+t₁)/4}/D` with
/// `D = e^{t/2} + e^{t₀/2} + e^{t₁/2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwitchingFunctions {
    pub f: f64,
    pub f0: f64,
    pub f1: f64,
}

/// Evaluates the switching functions with every exponent shifted by the
/// largest one, so no intermediate overflows.
pub fn switching_functions(t: f64, profile: SwitchingProfile) -> SwitchingFunctions {
    let (x, x0, x1) = (t / 2.0, profile.t0 / 2.0, profile.t1 / 2.0);
    let top = x.max(x0).max(x1);
    let d = (x - top).exp() + (x0 - top).exp() + (x1 - top).exp();
    SwitchingFunctions {
        f: (x - top).exp() / d,
        f0: ((x + x0) / 2.0 - top).exp() / d,
        f1: ((x + x1) / 2.0 - top).exp() / d,
    }
}

/// Right-hand side of the uncertainty bound `ΔP ΔP₁ ≥ ½|⟨[P, P₁]⟩|` for the
/// reduced state of the first species.
pub fn uncertainty_bound_closed_form(t: f64, profile: SwitchingProfile) -> f64 {
    let s = switching_functions(t, profile);
    let sqrt5 = 5f64.sqrt();
    (sqrt5 * (s.f + s.f0) - (3.0 + sqrt5) * s.f1).abs() / (12.0 * (15.0 + sqrt5))
}
