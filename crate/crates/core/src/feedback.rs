//! Feedback polynomials and the dynamics `i dρ/dt = [H, f(ρ)]`.
//!
//! Besides the right-hand side this module carries the two conserved
//! quantities of the flow (`h = Tr H f(ρ)` and the moments `Tr ρⁿ`), a
//! fixed-step RK4 integrator that logs them, and the finite-difference residual
//! used throughout the crate to decide whether a closed form is a solution.

// Unused whenever std is linked into the build.
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{commutator, spectrum_deviation, DensityState, OperatorMatrix, C64, I};
use crate::{Error, Result};

const CLASSIFY_TOL: f64 = 1e-12;
/// Positivity slack for integrated states, relative to `‖ρ‖_F`.
pub const INTEGRATOR_POSITIVITY_TOL: f64 = 1e-6;
/// Number of moments `Tr ρⁿ` tracked in drift logs.
pub const LOGGED_MOMENTS: usize = 4;
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Whether `f` leaves pure states on the linear flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FeedbackClass {
    /// `f(0) = 0`, `f(1) = 1`.
    Strict,
    /// `f(0) = 0`, `f(1) = scale ≠ 1`: linear on pure states after rescaling
    /// time by `scale`.
    Proportional {
        scale: f64,
    },
    Invalid,
}

/// `f(x) = a₀ + a₁x + … + aₙxⁿ` with real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackPolynomial {
    coefficients: Vec<f64>,
    class: FeedbackClass,
}

impl FeedbackPolynomial {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("feedback coefficients must be finite and non-empty"));
        }
        let mut coefficients = coefficients;
        while coefficients.len() > 1 && coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        let class = classify(&coefficients);
        Ok(Self { coefficients, class })
    }

    /// `f(ρ) = ρ`.
    pub fn linear() -> Self {
        Self::new(alloc::vec![0.0, 1.0]).expect("valid coefficients")
    }

    /// `f(ρ) = ρ²`.
    pub fn square() -> Self {
        Self::new(alloc::vec![0.0, 0.0, 1.0]).expect("valid coefficients")
    }

    /// `f(ρ) = (1 − h)ρ + hρ²` with feedback strength `h`.
    pub fn quadratic(feedback_strength: f64) -> Self {
        Self::new(alloc::vec![0.0, 1.0 - feedback_strength, feedback_strength]).expect("valid coefficients")
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn class(&self) -> FeedbackClass {
        self.class
    }

    pub fn is_affine(&self) -> bool {
        self.degree() <= 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    /// `f(M)` by Horner's scheme on matrices.
    pub fn apply(&self, m: &OperatorMatrix) -> OperatorMatrix {
        let id = OperatorMatrix::identity(m.dim());
        let mut iter = self.coefficients.iter().rev();
        let lead = *iter.next().expect("non-empty coefficients");
        let mut acc = id.scale_real(lead);
        for &a in iter {
            acc = &(&acc * m) + &id.scale_real(a);
        }
        acc
    }
}

fn classify(coefficients: &[f64]) -> FeedbackClass {
    let f0 = coefficients[0];
    let f1: f64 = coefficients.iter().sum();
    if f0.abs() > CLASSIFY_TOL || f1.abs() <= CLASSIFY_TOL {
        FeedbackClass::Invalid
    } else if (f1 - 1.0).abs() <= CLASSIFY_TOL {
        FeedbackClass::Strict
    } else {
        FeedbackClass::Proportional { scale: f1 }
    }
}

/// Free-function form of [`FeedbackPolynomial::class`].
pub fn classify_feedback(f: &FeedbackPolynomial) -> FeedbackClass {
    f.class()
}

fn check_rhs_inputs(dim: usize, h: &OperatorMatrix, f: &FeedbackPolynomial) -> Result<()> {
    if h.dim() != dim {
        return Err(Error::DimensionMismatch { left: h.dim(), right: dim });
    }
    if f.class() == FeedbackClass::Invalid {
        let c = f.coefficients();
        return Err(Error::InvalidFeedback { f0: c[0], f1: c.iter().sum() });
    }
    Ok(())
}

/// `−i[H, f(M)]` for any square `M`, without state validation.
pub fn generator(m: &OperatorMatrix, h: &OperatorMatrix, f: &FeedbackPolynomial) -> OperatorMatrix {
    let fm = f.apply(m);
    commutator(h, &fm).expect("dimensions checked by caller").scale(-I)
}

/// Time derivative `dρ/dt = −i[H, f(ρ)]`.
pub fn rhs(rho: &DensityState, h: &OperatorMatrix, f: &FeedbackPolynomial) -> Result<OperatorMatrix> {
    check_rhs_inputs(rho.dim(), h, f)?;
    Ok(generator(rho.matrix(), h, f))
}

/// `h = Tr H f(ρ)`.
pub fn conserved_energy(rho: &DensityState, h: &OperatorMatrix, f: &FeedbackPolynomial) -> Result<f64> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { left: h.dim(), right: rho.dim() });
    }
    Ok((h * &f.apply(rho.matrix())).trace().re)
}

/// `(Tr ρ, Tr ρ², …, Tr ρ^n_max)`.
pub fn conserved_moments(rho: &DensityState, n_max: usize) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let mut out = Vec::with_capacity(n_max);
    let mut power = rho.matrix().clone();
    out.push(power.trace().re);
    for _ in 1..n_max {
        power = &power * rho.matrix();
        out.push(power.trace().re);
    }
    Ok(out)
}

/// Conserved quantities at one trajectory sample.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedSample {
    pub energy: f64,
    pub moments: [f64; LOGGED_MOMENTS],
    /// Largest eigenvalue deviation from the initial spectrum, relative.
    pub spectrum_deviation: f64,
}

impl ConservedSample {
    pub fn measure(rho: &DensityState, h: &OperatorMatrix, f: &FeedbackPolynomial, reference: &[f64]) -> Result<Self> {
        let energy = conserved_energy(rho, h, f)?;
        let m = conserved_moments(rho, LOGGED_MOMENTS)?;
        let mut moments = [0.0; LOGGED_MOMENTS];
        moments.copy_from_slice(&m);
        Ok(Self { energy, moments, spectrum_deviation: spectrum_deviation(reference, &rho.spectrum()) })
    }
}

/// Maximum relative drift of each conserved quantity over a series of samples.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DriftSummary {
    pub energy: f64,
    pub moments: [f64; LOGGED_MOMENTS],
    pub spectrum: f64,
}

impl DriftSummary {
    pub fn from_samples(samples: &[ConservedSample]) -> Self {
        let Some(first) = samples.first() else {
            return Self::default();
        };
        let mut out = Self::default();
        for s in samples {
            out.energy = out.energy.max(relative_change(first.energy, s.energy));
            for n in 0..LOGGED_MOMENTS {
                out.moments[n] = out.moments[n].max(relative_change(first.moments[n], s.moments[n]));
            }
            out.spectrum = out.spectrum.max(s.spectrum_deviation);
        }
        out
    }

    /// Largest of all tracked drifts.
    pub fn max(&self) -> f64 {
        self.moments.iter().fold(self.energy.max(self.spectrum), |m, &x| m.max(x))
    }
}

fn relative_change(reference: f64, value: f64) -> f64 {
    let d = (value - reference).abs();
    if reference.abs() > 1e-12 {
        d / reference.abs()
    } else {
        d
    }
}

/// Fixed-step integrator settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    /// Record every `sample_stride`-th step (the endpoints are always kept).
    pub sample_stride: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64) -> Self {
        Self { dt, sample_stride: 10 }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride.max(1);
        self
    }
}

/// Sampled solution with its conservation log.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityState>,
    pub drift_log: Vec<ConservedSample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &DensityState)> {
        Some((*self.times.last()?, self.states.last()?))
    }

    pub fn drift(&self) -> DriftSummary {
        DriftSummary::from_samples(&self.drift_log)
    }
}

/// Integrates from `t0` to `t1` with classical RK4.
///
/// The interval is split into `n = ⌈(t1 − t0)/dt⌉` equal steps (so the
/// effective step never exceeds `dt`). After each step the state is replaced
/// by its Hermitian part; a minimum eigenvalue below `−1e−6 ‖ρ‖_F` aborts
/// with [`Error::PositivityLost`].
pub fn integrate(
    rho0: &DensityState,
    h: &OperatorMatrix,
    f: &FeedbackPolynomial,
    t0: f64,
    t1: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    check_rhs_inputs(rho0.dim(), h, f)?;
    let span = t1 - t0;
    if !(config.dt > 0.0) || !(span > 0.0) || config.dt > span * (1.0 + 1e-12) {
        return Err(Error::invalid("integration requires 0 < dt <= t1 - t0"));
    }
    let ratio = span / config.dt;
    let steps = if (ratio - ratio.round()).abs() <= 1e-9 * ratio { ratio.round() } else { ratio.ceil() } as usize;
    let step = span / steps as f64;
    let stride = config.sample_stride.max(1);

    let reference = rho0.spectrum();
    let mut times = alloc::vec![t0];
    let mut states = alloc::vec![rho0.clone()];
    let mut drift_log = alloc::vec![ConservedSample::measure(rho0, h, f, &reference)?];

    let mut m = rho0.matrix().clone();
    for k in 1..=steps {
        m = rk4_step(&m, h, f, step).hermitian_part();
        let t = t0 + step * k as f64;
        let min = crate::linalg::hermitian_eigensystem(&m)?.values[0];
        if min < -INTEGRATOR_POSITIVITY_TOL * m.frobenius_norm() {
            return Err(Error::PositivityLost { t, min_eigenvalue: min });
        }
        if k % stride == 0 || k == steps {
            let state = rho0.with_matrix(m.clone()).map_err(|_| Error::PositivityLost { t, min_eigenvalue: min })?;
            drift_log.push(ConservedSample::measure(&state, h, f, &reference)?);
            times.push(t);
            states.push(state);
        }
    }
    Ok(Trajectory { times, states, drift_log })
}

fn rk4_step(m: &OperatorMatrix, h: &OperatorMatrix, f: &FeedbackPolynomial, dt: f64) -> OperatorMatrix {
    let k1 = generator(m, h, f);
    let k2 = generator(&(m + &k1.scale_real(dt / 2.0)), h, f);
    let k3 = generator(&(m + &k2.scale_real(dt / 2.0)), h, f);
    let k4 = generator(&(m + &k3.scale_real(dt)), h, f);
    let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
    m + &incr.scale_real(dt / 6.0)
}

/// Relative residual `‖ρ̇_fd − rhs(ρ(t))‖_F / max(1, ‖ρ(t)‖_F)` with a
/// five-point central difference of step `fd_step`.
pub fn residual<F>(trajectory: F, h: &OperatorMatrix, f: &FeedbackPolynomial, t: f64, fd_step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<DensityState>,
{
    if !(fd_step > 0.0) {
        return Err(Error::invalid("fd_step must be positive"));
    }
    let rho = trajectory(t)?;
    let derivative = rhs(&rho, h, f)?;
    let p1 = trajectory(t + fd_step)?;
    let m1 = trajectory(t - fd_step)?;
    let p2 = trajectory(t + 2.0 * fd_step)?;
    let m2 = trajectory(t - 2.0 * fd_step)?;
    let fd = five_point(m2.matrix(), m1.matrix(), p1.matrix(), p2.matrix(), fd_step);
    Ok((&fd - &derivative).frobenius_norm() / rho.matrix().frobenius_norm().max(1.0))
}

fn five_point(
    m2: &OperatorMatrix,
    m1: &OperatorMatrix,
    p1: &OperatorMatrix,
    p2: &OperatorMatrix,
    e: f64,
) -> OperatorMatrix {
    let num = &(&(m2 - p2) + &p1.scale_real(8.0)) - &m1.scale_real(8.0);
    num.scale(C64::new(1.0 / (12.0 * e), 0.0))
}
