//! Self-check suite over the closed forms, observables and integrator.

use std::fmt;

use nlvn_core::feedback::{integrate, residual, ConservedSample, DriftSummary, DEFAULT_FD_STEP};
use nlvn_core::linalg::unitary_conjugate_exp;
use nlvn_core::observables::{
    complementarity_propositions, ppt_is_positive, reduced_eigenvalue_mismatch, uncertainty_bound, uncertainty_report,
    von_neumann_entropy,
};
use nlvn_core::solutions::{
    mutation3, mutation3_via_construction, switching_functions, two_species_closed_form, two_species_example,
    MutationParams, Organism, SwitchingProfile, ORGANISM_LINEAR_RATE,
};
use nlvn_core::{DensityState, FeedbackPolynomial, IntegratorConfig, OperatorMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::scenario::linspace;

/// Size of the deliberate fault added to the organism's `(1,3)` entry.
pub const FAULT_SIZE: f64 = 1e-3;

/// Expected late-time uncertainty bound, `√5 / (12(15 + √5))`.
pub const BOUND_LIMIT: f64 = 0.010811;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within(f64, f64),
}

impl Bound {
    pub fn admits(self, x: f64) -> bool {
        match self {
            Bound::AtMost(b) => x <= b,
            Bound::AtLeast(b) => x >= b,
            Bound::Within(lo, hi) => (lo..=hi).contains(&x),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(b) => write!(f, "<= {b:e}"),
            Bound::AtLeast(b) => write!(f, ">= {b:e}"),
            Bound::Within(lo, hi) => write!(f, "in [{}, {}]", tidy(*lo), tidy(*hi)),
        }
    }
}

/// `x` rounded to 12 significant digits, so `0.010811 + 1e-4` prints as
/// `0.010911`.
fn tidy(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub bound: Bound,
    pub passed: bool,
    /// Set when the check could not be evaluated at all.
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub level: Level,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn status(&self) -> CliResult<()> {
        let failed = self.failures().count();
        if failed == 0 {
            Ok(())
        } else {
            Err(CliError::VerifyFailed { failed, total: self.checks.len() })
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            match &c.error {
                Some(e) => out.push_str(&format!("{mark}  {:width$}  error: {e}\n", c.name)),
                None => out.push_str(&format!("{mark}  {:width$}  {:.6e}  (want {})\n", c.name, c.measured, c.bound)),
            }
        }
        for n in &self.notes {
            out.push_str(&format!("note  {n}\n"));
        }
        let failed = self.failures().count();
        out.push_str(&format!("{} passed, {failed} failed\n", self.checks.len() - failed));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub level: Level,
    /// Replace the organism trajectory with a perturbed one everywhere it is
    /// checked, to demonstrate that the oracles catch it.
    pub inject_fault: bool,
}

impl VerifyOptions {
    pub fn new(level: Level) -> Self {
        Self { level, inject_fault: false }
    }
}

type Measure = Box<dyn Fn() -> nlvn_core::Result<f64> + Send + Sync>;

struct CheckDef {
    name: &'static str,
    bound: Bound,
    measure: Measure,
}

fn def(
    name: &'static str,
    bound: Bound,
    measure: impl Fn() -> nlvn_core::Result<f64> + Send + Sync + 'static,
) -> CheckDef {
    CheckDef { name, bound, measure: Box::new(measure) }
}

fn max_over<I, F>(items: I, f: F) -> nlvn_core::Result<f64>
where
    I: IntoParallelIterator,
    F: Fn(I::Item) -> nlvn_core::Result<f64> + Sync + Send,
{
    let values = items.into_par_iter().map(f).collect::<nlvn_core::Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

fn min_over<I, F>(items: I, f: F) -> nlvn_core::Result<f64>
where
    I: IntoParallelIterator,
    F: Fn(I::Item) -> nlvn_core::Result<f64> + Sync + Send,
{
    Ok(-max_over(items, |x| f(x).map(|v| -v))?)
}

/// `ρ₁(t)` with `FAULT_SIZE` added to the interaction-picture entry `(1,3)`
/// and its mirror.
pub fn perturbed_organism(t: f64) -> nlvn_core::Result<DensityState> {
    let o = Organism;
    let mut m = o.interaction_state(t)?.into_matrix();
    let e = OperatorMatrix::from_fn(4, |r, c| {
        if (r, c) == (0, 2) || (r, c) == (2, 0) {
            C64::new(FAULT_SIZE, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    m = &m + &e;
    unitary_conjugate_exp(&o.hamiltonian(), ORGANISM_LINEAR_RATE * t, &DensityState::new(m)?)
}

fn organism_curve(fault: bool) -> fn(f64) -> nlvn_core::Result<DensityState> {
    if fault {
        perturbed_organism
    } else {
        |t| Organism.solution(t)
    }
}

/// Largest relative residual `‖ρ̇ − rhs‖ / ‖ρ‖` of `curve` over `times`.
fn max_relative_residual<C>(
    curve: C,
    h: &OperatorMatrix,
    f: &FeedbackPolynomial,
    times: &[f64],
) -> nlvn_core::Result<f64>
where
    C: Fn(f64) -> nlvn_core::Result<DensityState> + Sync,
{
    max_over(times, |&t| {
        let n = curve(t)?.matrix().frobenius_norm();
        // undo the max(1, ‖ρ‖) scaling applied by `residual`
        Ok(residual(&curve, h, f, t, DEFAULT_FD_STEP)? * n.max(1.0) / n)
    })
}

fn closed_form_drift<C>(
    curve: C,
    h: &OperatorMatrix,
    f: &FeedbackPolynomial,
    times: &[f64],
) -> nlvn_core::Result<DriftSummary>
where
    C: Fn(f64) -> nlvn_core::Result<DensityState> + Sync,
{
    let states = times.par_iter().map(|&t| curve(t)).collect::<nlvn_core::Result<Vec<_>>>()?;
    let reference = states[0].spectrum();
    let samples =
        states.iter().map(|s| ConservedSample::measure(s, h, f, &reference)).collect::<nlvn_core::Result<Vec<_>>>()?;
    Ok(DriftSummary::from_samples(&samples))
}

fn rk4_endpoint_error<C>(
    curve: C,
    h: &OperatorMatrix,
    f: &FeedbackPolynomial,
    t0: f64,
    t1: f64,
    dt: f64,
) -> nlvn_core::Result<(f64, DriftSummary)>
where
    C: Fn(f64) -> nlvn_core::Result<DensityState>,
{
    let traj = integrate(&curve(t0)?, h, f, t0, t1, &IntegratorConfig::new(dt).with_stride(100))?;
    let end = traj.last().expect("trajectories keep their endpoint").1;
    Ok(((end.matrix() - curve(t1)?.matrix()).frobenius_norm(), traj.drift()))
}

/// Relative spread `(max − min)/mean` of fall time × h.
pub fn fall_time_spread() -> nlvn_core::Result<f64> {
    let h0 = MutationParams::critical_strength();
    let products = [h0 / 2.0, h0, 2.0 * h0]
        .iter()
        .map(|&h| Ok(MutationParams::new(h, 1.0, 0).fall_time(0.9, 0.1)? * h))
        .collect::<nlvn_core::Result<Vec<f64>>>()?;
    let (lo, hi) = products.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    Ok((hi - lo) / (products.iter().sum::<f64>() / products.len() as f64))
}

/// Largest `|F₀² + F₁² − F(1 − F)|` over `count` random triples in `[−200, 200]³`.
pub fn switching_identity_error(count: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<[f64; 3]> = (0..count).map(|_| [0; 3].map(|_| rng.gen_range(-200.0..200.0))).collect();
    triples
        .iter()
        .map(|&[t, t0, t1]| {
            let s = switching_functions(t, SwitchingProfile::new(t0, t1));
            (s.f0 * s.f0 + s.f1 * s.f1 - s.f * (1.0 - s.f)).abs()
        })
        .fold(0.0, f64::max)
}

/// Full width at half depth of the particle-2 entropy dip around `t = 0`,
/// measured against its late-time value.
pub fn organism_lifespan() -> nlvn_core::Result<f64> {
    let o = Organism;
    let s2 = |t: f64| -> nlvn_core::Result<f64> {
        let rho = o.solution(t)?.normalized();
        von_neumann_entropy(&nlvn_core::linalg::partial_trace(&rho, &o.layout(), o.particle_factor(2)?)?)
    };
    let base = s2(40.0)?;
    let half = 0.5 * (s2(0.0)? - base);
    let (mut lo, mut hi) = (0.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (s2(mid)? - base).abs() > half.abs() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + hi)
}

fn check_defs(opts: VerifyOptions) -> Vec<CheckDef> {
    let full = opts.level == Level::Full;
    let fault = opts.inject_fault;
    let pick = move |quick: usize, thorough: usize| if full { thorough } else { quick };
    let organism_times = linspace(-10.0, 10.0, pick(201, 2001));
    let ppt_times = linspace(-10.0, 10.0, 201);
    let multi_times = linspace(-30.0, 30.0, pick(41, 401));
    let mutation_times = linspace(-50.0, 50.0, pick(101, 1001));
    let uncertainty_times = linspace(-60.0, 60.0, 401);
    let h0 = MutationParams::critical_strength();
    let strengths = [h0 / 2.0, h0, 2.0 * h0];
    let profiles = [(0.0, 0.0), (150.0, 0.0), (0.0, 150.0)].map(|(a, b)| SwitchingProfile::new(a, b));
    let o = Organism;

    let mut v = vec![
        def("organism residual", Bound::AtMost(1e-6), {
            let ts = organism_times.clone();
            move || max_relative_residual(organism_curve(fault), &o.hamiltonian(), &o.feedback(), &ts)
        }),
        def("organism reduced eigenvalues vs closed form", Bound::AtMost(1e-10), {
            let ts = organism_times.clone();
            move || max_over(&ts, |&t| reduced_eigenvalue_mismatch(t))
        }),
        def("organism PPT minimum eigenvalue", Bound::AtLeast(-1e-10), move || {
            min_over(&ppt_times, |&t| Ok(ppt_is_positive(&organism_curve(fault)(t)?, &o.layout())?.min_eigenvalue))
        }),
        def("organism drift, closed form", Bound::AtMost(1e-6), {
            let ts = organism_times.clone();
            move || Ok(closed_form_drift(organism_curve(fault), &o.hamiltonian(), &o.feedback(), &ts)?.max())
        }),
        def("organism Darboux dressing vs closed form", Bound::AtMost(1e-10), {
            let ts = linspace(-10.0, 10.0, 41);
            move || {
                let d = o.dressing()?;
                max_over(&ts, |&t| {
                    let exact = organism_curve(fault)(t)?;
                    Ok((d.at(t)?.matrix() - exact.matrix()).frobenius_norm() / exact.matrix().frobenius_norm())
                })
            }
        }),
        def("fault injection raises organism residual", Bound::AtLeast(1e-6), {
            let ts = linspace(-10.0, 10.0, 21);
            move || max_relative_residual(perturbed_organism, &o.hamiltonian(), &o.feedback(), &ts)
        }),
        def("multispecies example residual", Bound::AtMost(1e-6), {
            let ts = multi_times.clone();
            move || {
                max_over(&profiles, |&p| {
                    let cfg = two_species_example(p);
                    max_relative_residual(|t| two_species_closed_form(t, p), &cfg.hamiltonian(), &cfg.feedback(), &ts)
                })
            }
        }),
        def("multispecies diagonal constancy", Bound::AtMost(1e-10), move || {
            max_over(&profiles, |&p| {
                let d0 = two_species_closed_form(multi_times[0], p)?.into_matrix().diagonal();
                max_over(&multi_times, |&t| {
                    let d = two_species_closed_form(t, p)?.into_matrix().diagonal();
                    Ok(d.iter().zip(&d0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
                })
            })
        }),
        def("mutation3 residual", Bound::AtMost(1e-6), {
            let ts = mutation_times.clone();
            move || {
                max_over(&strengths, |&h| {
                    let p = MutationParams::new(h, 1.0, 0);
                    max_relative_residual(|t| mutation3(&p, t), &p.hamiltonian(), &p.feedback(), &ts)
                })
            }
        }),
        def("mutation3 trace and spectrum constancy", Bound::AtMost(1e-10), {
            let ts = mutation_times.clone();
            move || {
                max_over(&strengths, |&h| {
                    let p = MutationParams::new(h, 1.0, 0);
                    let s0 = mutation3(&p, 0.0)?.spectrum();
                    max_over(&ts, |&t| {
                        let st = mutation3(&p, t)?;
                        let spread = st.spectrum().iter().zip(&s0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                        Ok(spread.max((st.trace() - 1.0).abs()))
                    })
                })
            }
        }),
        def("mutation3 vs general construction", Bound::AtMost(1e-10), {
            let ts = linspace(-50.0, 50.0, 21);
            move || {
                max_over(&strengths, |&h| {
                    let p = MutationParams::new(h, 1.0, 0);
                    max_over(&ts, |&t| {
                        let (a, b) =
                            (mutation3(&p, t)?.into_matrix(), mutation3_via_construction(&p, t)?.into_matrix());
                        // the construction differs by a constant phase on the middle level
                        let gauge = [
                            (a[(0, 0)] - b[(0, 0)]).norm(),
                            (a[(1, 1)] - b[(1, 1)]).norm(),
                            (a[(0, 2)] - b[(0, 2)]).norm(),
                            (a[(0, 1)].norm() - b[(0, 1)].norm()).abs(),
                            (a[(0, 1)] * a[(1, 2)] - b[(0, 1)] * b[(1, 2)]).norm(),
                        ];
                        Ok(gauge.into_iter().fold(0.0, f64::max))
                    })
                })
            }
        }),
        def("mutation3 fall time x h spread", Bound::AtMost(0.05), fall_time_spread),
        def("uncertainty bound at t = -60", Bound::AtMost(1e-6), || bound_at(-60.0)),
        def("uncertainty bound at t = +60", Bound::Within(BOUND_LIMIT - 1e-4, BOUND_LIMIT + 1e-4), || bound_at(60.0)),
        def("uncertainty inequality margin", Bound::AtLeast(0.0), move || {
            let (p, p1) = complementarity_propositions();
            let prof = SwitchingProfile::new(0.0, 0.0);
            min_over(&uncertainty_times, |&t| {
                let species = two_species_example(prof).reduced(&two_species_closed_form(t, prof)?, 0)?;
                let r = uncertainty_report(&p, &p1, &species)?;
                Ok(r.deviation_product - r.bound)
            })
        }),
        def("switching identity", Bound::AtMost(1e-12), move || {
            Ok(switching_identity_error(pick(1_000, 10_000), 0x5eed))
        }),
        def("switching asymptotics at |t| = 1000", Bound::AtMost(1e-12), || Ok(switching_asymptotic_error(1e3))),
        def("RK4 mutation3 endpoint error", Bound::AtMost(1e-6), move || {
            let p = MutationParams::critical();
            let span = if full { 20.0 } else { 10.0 };
            Ok(rk4_endpoint_error(|t| mutation3(&p, t), &p.hamiltonian(), &p.feedback(), -span, span, 1e-3)?.0)
        }),
        def("RK4 mutation3 drift", Bound::AtMost(1e-5), move || {
            let p = MutationParams::critical();
            let span = if full { 20.0 } else { 10.0 };
            Ok(rk4_endpoint_error(|t| mutation3(&p, t), &p.hamiltonian(), &p.feedback(), -span, span, 1e-3)?.1.max())
        }),
    ];
    if full {
        v.extend([
            def("RK4 order, mutation3 at 2h0 (dt 0.02 / 0.01)", Bound::Within(12.0, 20.0), move || {
                let p = MutationParams::new(2.0 * h0, 1.0, 0);
                let err = |dt| rk4_endpoint_error(|t| mutation3(&p, t), &p.hamiltonian(), &p.feedback(), -3.0, 3.0, dt);
                Ok(err(0.02)?.0 / err(0.01)?.0)
            }),
            def("RK4 organism endpoint error (t = -5 to 5, dt 1e-3)", Bound::AtMost(1e-6), move || {
                Ok(rk4_endpoint_error(organism_curve(fault), &o.hamiltonian(), &o.feedback(), -5.0, 5.0, 1e-3)?.0)
            }),
            def("RK4 order, organism (dt 1e-3 / 5e-4)", Bound::Within(12.0, 20.0), move || {
                let err =
                    |dt| rk4_endpoint_error(organism_curve(fault), &o.hamiltonian(), &o.feedback(), -5.0, 5.0, dt);
                Ok(err(1e-3)?.0 / err(5e-4)?.0)
            }),
            def("RK4 organism drift", Bound::AtMost(1e-5), move || {
                Ok(rk4_endpoint_error(organism_curve(fault), &o.hamiltonian(), &o.feedback(), -5.0, 5.0, 1e-3)?.1.max())
            }),
        ]);
    }
    v
}

fn bound_at(t: f64) -> nlvn_core::Result<f64> {
    let (p, p1) = complementarity_propositions();
    let prof = SwitchingProfile::new(0.0, 0.0);
    uncertainty_bound(&p, &p1, &two_species_example(prof).reduced(&two_species_closed_form(t, prof)?, 0)?)
}

/// Deviation of the switching functions from their limits at `±t`.
pub fn switching_asymptotic_error(t: f64) -> f64 {
    let prof = SwitchingProfile::new(0.0, 0.0);
    let (early, late) = (switching_functions(-t, prof), switching_functions(t, prof));
    [early.f, early.f0, early.f1, 1.0 - late.f, late.f0, late.f1].into_iter().map(f64::abs).fold(0.0, f64::max)
}

pub fn verify_suite(opts: VerifyOptions) -> VerifyReport {
    let checks = check_defs(opts)
        .into_par_iter()
        .map(|s| match (s.measure)() {
            Ok(x) => Check { name: s.name, measured: x, bound: s.bound, passed: s.bound.admits(x), error: None },
            Err(e) => {
                Check { name: s.name, measured: f64::NAN, bound: s.bound, passed: false, error: Some(e.to_string()) }
            }
        })
        .collect();
    let mut notes = Vec::new();
    match organism_lifespan() {
        Ok(w) => notes.push(format!("organism lifespan (FWHM of the particle-2 entropy dip): {w:.6}")),
        Err(e) => notes.push(format!("organism lifespan unavailable: {e}")),
    }
    if opts.inject_fault {
        notes.push(format!("fault injected: organism interaction entry (1,3) shifted by {FAULT_SIZE:e}"));
    }
    VerifyReport { level: opts.level, checks, notes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(Bound::AtMost(1.0).admits(1.0) && !Bound::AtMost(1.0).admits(1.5));
        assert!(Bound::AtLeast(0.0).admits(0.0) && !Bound::AtLeast(0.0).admits(-1e-300));
        assert!(Bound::Within(12.0, 20.0).admits(16.0) && !Bound::Within(12.0, 20.0).admits(32.0));
        assert!(!Bound::AtMost(1.0).admits(f64::NAN));
    }

    #[test]
    fn perturbation_has_expected_size() {
        let o = Organism;
        for t in [-2.0, 0.0, 1.5] {
            let shifted = perturbed_organism(t).unwrap();
            let exact = o.solution(t).unwrap();
            let diff = (shifted.matrix() - exact.matrix()).frobenius_norm();
            assert!((diff - FAULT_SIZE * 2f64.sqrt()).abs() < 1e-12, "{diff}");
        }
    }

    #[test]
    fn identity_and_asymptotics() {
        assert!(switching_identity_error(500, 1) < 1e-12);
        assert!(switching_asymptotic_error(1e3) < 1e-100);
        assert!(fall_time_spread().unwrap() < 1e-9);
    }

    #[test]
    fn lifespan_is_a_few_units() {
        let w = organism_lifespan().unwrap();
        assert!(w > 0.1 && w < 10.0, "{w}");
    }
}
