//! Darboux dressing of seeds whose `Δ_a = f(ρ) − aρ` commutes with `H`.
//!
//! For such a seed `ρ(t) = e^{−iaHt} ρ(0) e^{iaHt}`, and with the Lax data
//! `μ = ν̄`, `(ρ(0) − ν̄H)|χ⟩ = z|χ⟩` the dressed solution is
//!
//! ```text
//! ρ₁(t) = e^{−iaHt} ( ρ(0) + (ν̄ − ν) F(t)⁻¹ e^{−iΔt/ν̄} [|χ⟩⟨χ|, H] e^{iΔt/ν} ) e^{iaHt}
//! F(t)  = ⟨χ| exp(i (ν̄ − ν) Δ t / |ν|²) |χ⟩
//! ```

// Unused whenever std is linked into the build.
use alloc::string::ToString;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_traits::Zero;

use crate::feedback::{residual, FeedbackPolynomial, DEFAULT_FD_STEP};
use crate::linalg::{
    commutator, hermitian_eigensystem, spectrum_deviation, DensityState, HermitianEigen, OperatorMatrix, Propagator,
    C64, I,
};
use crate::{Error, Result};

/// Relative tolerance for the commuting and eigenvector preconditions.
const PRECONDITION_TOL: f64 = 1e-9;

/// Delta operator `f(ρ) − aρ`.
pub fn delta_a(rho: &DensityState, f: &FeedbackPolynomial, a: f64) -> OperatorMatrix {
    &f.apply(rho.matrix()) - &rho.matrix().scale_real(a)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DarbouxParameters {
    /// Spectral parameter `ν`; the companion parameter is `μ = ν̄`.
    pub nu: C64,
    /// Linearization scalar: the seed evolves as `e^{−iaHt}`.
    pub a: f64,
    /// Lax initial condition `|χ(0)⟩` (need not be normalized).
    pub chi0: Vec<C64>,
}

impl DarbouxParameters {
    pub fn new(nu: C64, a: f64, chi0: Vec<C64>) -> Result<Self> {
        if nu.im == 0.0 || !nu.im.is_finite() || !nu.re.is_finite() {
            return Err(Error::invalid("nu must have a nonzero imaginary part"));
        }
        if chi0.iter().all(|z| z.is_zero()) {
            return Err(Error::invalid("chi0 must have a nonzero component"));
        }
        Ok(Self { nu, a, chi0 })
    }

    pub fn mu(&self) -> C64 {
        self.nu.conj()
    }
}

/// A prepared dressing: evaluates `ρ₁(t)` for any `t`.
#[derive(Clone, Debug)]
pub struct DarbouxDressing {
    seed0: DensityState,
    hamiltonian: OperatorMatrix,
    feedback: FeedbackPolynomial,
    params: DarbouxParameters,
    linear: Propagator,
    delta: HermitianEigen,
    /// `[|χ⟩⟨χ|, H]` in the eigenbasis of `Δ`.
    commutator_delta_basis: OperatorMatrix,
    /// `|⟨d_k|χ⟩|²` for each eigenvector of `Δ`.
    weights: Vec<f64>,
    lax_eigenvalue: C64,
}

impl DarbouxDressing {
    pub fn new(
        seed0: &DensityState,
        hamiltonian: &OperatorMatrix,
        feedback: &FeedbackPolynomial,
        params: &DarbouxParameters,
    ) -> Result<Self> {
        let n = seed0.dim();
        if hamiltonian.dim() != n || params.chi0.len() != n {
            return Err(Error::DimensionMismatch { left: n, right: hamiltonian.dim().max(params.chi0.len()) });
        }
        if params.nu.im == 0.0 {
            return Err(Error::invalid("nu must have a nonzero imaginary part"));
        }
        let delta = delta_a(seed0, feedback, params.a);
        if !delta.commutes_with(hamiltonian, PRECONDITION_TOL) {
            return Err(Error::precondition("Delta_a does not commute with H"));
        }
        if delta.is_multiple_of_identity(PRECONDITION_TOL) {
            return Err(Error::precondition("Delta_a is a multiple of the identity"));
        }

        // |χ⟩ must be an eigenvector of ρ(0) − μH with μ = ν̄.
        let chi = &params.chi0;
        let lax = seed0.matrix() - &hamiltonian.scale(params.mu());
        let lchi = lax.apply(chi);
        let norm2: f64 = chi.iter().map(|z| z.norm_sqr()).sum();
        let z: C64 = chi.iter().zip(&lchi).map(|(c, l)| c.conj() * l).sum::<C64>() / norm2;
        let defect: f64 = lchi.iter().zip(chi).map(|(l, c)| (l - z * c).norm_sqr()).sum::<f64>().sqrt();
        if defect > PRECONDITION_TOL * lax.frobenius_norm() * norm2.sqrt() {
            return Err(Error::precondition("chi0 is not an eigenvector of rho(0) - conj(nu) H"));
        }

        let delta = hermitian_eigensystem(&delta.hermitian_part())?;
        let p = OperatorMatrix::outer(chi, chi);
        let c = commutator(&p, hamiltonian)?;
        let v = &delta.vectors;
        let commutator_delta_basis = &(&v.adjoint() * &c) * v;
        let weights = (0..n).map(|k| (0..n).map(|r| v[(r, k)].conj() * chi[r]).sum::<C64>().norm_sqr()).collect();

        Ok(Self {
            seed0: seed0.clone(),
            hamiltonian: hamiltonian.clone(),
            feedback: feedback.clone(),
            params: params.clone(),
            linear: Propagator::new(hamiltonian)?,
            delta,
            commutator_delta_basis,
            weights,
            lax_eigenvalue: z,
        })
    }

    pub fn params(&self) -> &DarbouxParameters {
        &self.params
    }

    pub fn seed0(&self) -> &DensityState {
        &self.seed0
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.hamiltonian
    }

    pub fn feedback(&self) -> &FeedbackPolynomial {
        &self.feedback
    }

    /// `z` with `(ρ(0) − ν̄H)|χ⟩ = z|χ⟩`.
    pub fn lax_eigenvalue(&self) -> C64 {
        self.lax_eigenvalue
    }

    /// Undressed seed `e^{−iaHt} ρ(0) e^{iaHt}`.
    pub fn seed_at(&self, t: f64) -> Result<DensityState> {
        let m = self.linear.conjugate_matrix(self.params.a * t, self.seed0.matrix())?;
        self.seed0.with_matrix(m.hermitian_part())
    }

    /// `F(t)`, possibly astronomically large; prefer [`at`](Self::at) for
    /// state evaluation, which works with rescaled exponentials.
    pub fn normalization(&self, t: f64) -> C64 {
        let k = C64::new(0.0, 1.0) * (self.params.mu() - self.params.nu) / self.params.nu.norm_sqr();
        self.weights.iter().zip(&self.delta.values).map(|(w, l)| (k * l * t).exp() * w).sum()
    }

    /// Dressed operator before validation.
    pub fn matrix_at(&self, t: f64) -> Result<OperatorMatrix> {
        let n = self.seed0.dim();
        let nu = self.params.nu;
        let nub = self.params.mu();
        // log-magnitudes of the exponentials, to keep everything finite
        let growth = nu.im / nu.norm_sqr();
        let total: f64 = self.weights.iter().sum();
        let shift = self
            .weights
            .iter()
            .zip(&self.delta.values)
            .filter(|(w, _)| **w > 1e-30 * total)
            .map(|(_, l)| 2.0 * growth * l * t)
            .fold(f64::NEG_INFINITY, f64::max);
        let f_scaled: f64 =
            self.weights.iter().zip(&self.delta.values).map(|(w, l)| w * (2.0 * growth * l * t - shift).exp()).sum();
        if !(f_scaled > 0.0) || !f_scaled.is_finite() {
            return Err(Error::DegenerateNormalization { t });
        }
        let left: Vec<C64> = self.delta.values.iter().map(|l| (-I * l * t / nub - shift / 2.0).exp()).collect();
        let right: Vec<C64> = self.delta.values.iter().map(|l| (I * l * t / nu - shift / 2.0).exp()).collect();
        let cd = &self.commutator_delta_basis;
        let middle = OperatorMatrix::from_fn(n, |r, c| {
            let x = cd[(r, c)];
            if x.is_zero() {
                x
            } else {
                left[r] * x * right[c]
            }
        });
        let v = &self.delta.vectors;
        let kick = (&(v * &middle) * &v.adjoint()).scale((nub - nu) / f_scaled);
        let inner = self.seed0.matrix() + &kick;
        let out = self.linear.conjugate_matrix(self.params.a * t, &inner)?;
        Ok(out.hermitian_part())
    }

    /// Dressed state `ρ₁(t)`.
    pub fn at(&self, t: f64) -> Result<DensityState> {
        self.seed0.with_matrix(self.matrix_at(t)?)
    }
}

/// One-shot dressing at time `t`.
pub fn darboux_dress(
    seed0: &DensityState,
    hamiltonian: &OperatorMatrix,
    feedback: &FeedbackPolynomial,
    params: &DarbouxParameters,
    t: f64,
) -> Result<DensityState> {
    DarbouxDressing::new(seed0, hamiltonian, feedback, params)?.at(t)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaxSample {
    pub t: f64,
    /// Residual of the dressed state.
    pub residual: f64,
    /// Residual of the seed trajectory at the same time.
    pub seed_residual: f64,
    /// Spectrum of the dressed state against the seed, relative.
    pub spectrum_deviation: f64,
    pub trace_deviation: f64,
}

/// Outcome of [`lax_covariance_check`]. Failures are recorded rather than
/// returned so a partial report is still available.
#[derive(Clone, Debug, PartialEq)]
pub struct LaxReport {
    pub nu: C64,
    pub mu: C64,
    /// `z` with `(ρ(0) − μH)|χ⟩ = z|χ⟩`, when the preconditions held.
    pub lax_eigenvalue: Option<C64>,
    pub samples: Vec<LaxSample>,
    pub failures: Vec<(Option<f64>, Error)>,
}

impl LaxReport {
    pub fn max_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    pub fn max_spectrum_deviation(&self) -> f64 {
        self.samples.iter().map(|s| s.spectrum_deviation).fold(0.0, f64::max)
    }

    pub fn passes(&self, residual_tol: f64, spectrum_tol: f64) -> bool {
        self.failures.is_empty() && self.max_residual() < residual_tol && self.max_spectrum_deviation() < spectrum_tol
    }
}

/// Dresses `seed_fn(0)` and checks at each sample time that the result solves
/// the nonlinear equation and stays isospectral to the seed.
pub fn lax_covariance_check<S>(
    seed_fn: S,
    hamiltonian: &OperatorMatrix,
    feedback: &FeedbackPolynomial,
    params: &DarbouxParameters,
    sample_times: &[f64],
) -> LaxReport
where
    S: Fn(f64) -> Result<DensityState>,
{
    let mut report =
        LaxReport { nu: params.nu, mu: params.mu(), lax_eigenvalue: None, samples: Vec::new(), failures: Vec::new() };
    let dressing = match seed_fn(0.0).and_then(|s0| DarbouxDressing::new(&s0, hamiltonian, feedback, params)) {
        Ok(d) => d,
        Err(e) => {
            report.failures.push((None, e));
            return report;
        }
    };
    report.lax_eigenvalue = Some(dressing.lax_eigenvalue());
    for &t in sample_times {
        let sample = (|| -> Result<LaxSample> {
            let dressed = dressing.at(t)?;
            let seed = seed_fn(t)?;
            let r = residual(|s| dressing.at(s), hamiltonian, feedback, t, DEFAULT_FD_STEP)?;
            let rs = residual(&seed_fn, hamiltonian, feedback, t, DEFAULT_FD_STEP)?;
            Ok(LaxSample {
                t,
                residual: r,
                seed_residual: rs,
                spectrum_deviation: spectrum_deviation(&seed.spectrum(), &dressed.spectrum()),
                trace_deviation: (dressed.trace() - seed.trace()).abs(),
            })
        })();
        match sample {
            Ok(s) => report.samples.push(s),
            Err(e) => report.failures.push((Some(t), e)),
        }
    }
    if report.samples.is_empty() && report.failures.is_empty() {
        report.failures.push((None, Error::invalid("no sample times".to_string())));
    }
    report
}
