//! Statistical quantities extracted from states.

// Unused whenever std is linked into the build.
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_traits::Zero;

use crate::linalg::{
    commutator, hermitian_eigensystem, partial_trace, partial_transpose, CompositeLayout, DensityState, OperatorMatrix,
    C64,
};
use crate::solutions::Organism;
use crate::{Error, Result};

/// Largest oscillator level reachable by [`oscillator_eigenfunction`].
pub const MAX_OSCILLATOR_LEVEL: usize = 200;

/// Tolerance on projector properties.
pub const PROJECTOR_TOL: f64 = 1e-12;

/// Relative tolerance on the partial-transpose spectrum.
pub const PPT_TOL: f64 = 1e-10;

/// Agreement required between closed-form and computed reduced spectra.
pub const REDUCED_EIGENVALUE_TOL: f64 = 1e-10;

fn require_positive_trace(rho: &DensityState) -> Result<f64> {
    let tr = rho.trace();
    if tr > 0.0 {
        Ok(tr)
    } else {
        Err(Error::BadTrace { re: tr, im: 0.0 })
    }
}

/// `−Σ pᵢ ln pᵢ` over the positive eigenvalues of `ρ/Tr ρ`.
pub fn von_neumann_entropy(rho: &DensityState) -> Result<f64> {
    let tr = require_positive_trace(rho)?;
    Ok(rho.spectrum().into_iter().map(|p| p / tr).filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum())
}

/// Eigenvalue pairs `(p₋, p₊)` of the normalized reduced organism states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedEigenvalues {
    pub particle1: (f64, f64),
    pub particle2: (f64, f64),
}

/// Closed-form reduced spectra of the organism at time `t`.
pub fn reduced_eigenvalue_curves(t: f64) -> ReducedEigenvalues {
    let o = Organism;
    ReducedEigenvalues {
        particle1: o.reduced_eigenvalues(1, t).expect("particle 1"),
        particle2: o.reduced_eigenvalues(2, t).expect("particle 2"),
    }
}

/// Reduced organism spectra obtained by partial trace of the exact solution.
pub fn computed_reduced_eigenvalues(t: f64) -> Result<ReducedEigenvalues> {
    let o = Organism;
    let rho = o.solution(t)?.normalized();
    let pair = |particle: usize| -> Result<(f64, f64)> {
        let s = partial_trace(&rho, &o.layout(), o.particle_factor(particle)?)?.spectrum();
        Ok((s[0], s[1]))
    };
    Ok(ReducedEigenvalues { particle1: pair(1)?, particle2: pair(2)? })
}

/// Largest difference between the closed-form and computed reduced spectra.
pub fn reduced_eigenvalue_mismatch(t: f64) -> Result<f64> {
    let a = reduced_eigenvalue_curves(t);
    let b = computed_reduced_eigenvalues(t)?;
    Ok([
        a.particle1.0 - b.particle1.0,
        a.particle1.1 - b.particle1.1,
        a.particle2.0 - b.particle2.0,
        a.particle2.1 - b.particle2.1,
    ]
    .iter()
    .fold(0.0f64, |m, d| m.max(d.abs())))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PptReport {
    pub positive: bool,
    /// Smallest eigenvalue of the partial transpose of `ρ/Tr ρ`.
    pub min_eigenvalue: f64,
}

/// Peres–Horodecki test on a two-factor layout (second factor transposed).
pub fn ppt_is_positive(rho: &DensityState, layout: &CompositeLayout) -> Result<PptReport> {
    if layout.factor_dims().len() != 2 {
        return Err(Error::invalid(format!("expected two factors, got {}", layout.factor_dims().len())));
    }
    let normalized = rho.normalized();
    let pt = partial_transpose(&normalized, layout, 1)?;
    let min_eigenvalue = hermitian_eigensystem(&pt.hermitian_part())?.values[0];
    let positive = min_eigenvalue >= -PPT_TOL * normalized.matrix().frobenius_norm();
    Ok(PptReport { positive, min_eigenvalue })
}

/// Purification `|Ψ⟩ = Σ_e √p_e |e⟩_env ⊗ |e⟩` of `ρ/Tr ρ`.
///
/// The environment vectors are the standard basis, assigned to the
/// eigenvectors of `ρ` in order of descending eigenvalue. The vector lives on
/// `[dim, dim]` with the environment as the first factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Purification {
    pub vector: Vec<C64>,
    pub system_dim: usize,
}

impl Purification {
    pub fn layout(&self) -> CompositeLayout {
        CompositeLayout::new(vec![self.system_dim, self.system_dim]).expect("positive dimension")
    }

    pub fn state(&self) -> Result<DensityState> {
        DensityState::pure(&self.vector)
    }

    /// `Tr_E |Ψ⟩⟨Ψ|`.
    pub fn reduced(&self) -> Result<DensityState> {
        partial_trace(&self.state()?, &self.layout(), 1)
    }
}

pub fn purify(rho: &DensityState) -> Result<Purification> {
    let tr = require_positive_trace(rho)?;
    let eig = rho.eigen()?;
    let n = rho.dim();
    let floor = -rho.positivity_tol() * rho.matrix().frobenius_norm();
    let mut vector = vec![C64::zero(); n * n];
    for (slot, k) in (0..n).rev().enumerate() {
        let p = eig.values[k];
        if p < floor {
            return Err(Error::NotPositive { min_eigenvalue: p });
        }
        let w = (p.max(0.0) / tr).sqrt();
        for (i, v) in eig.vector(k).into_iter().enumerate() {
            vector[slot * n + i] = v * w;
        }
    }
    Ok(Purification { vector, system_dim: n })
}

/// An orthogonal projector.
#[derive(Clone, Debug, PartialEq)]
pub struct Proposition {
    projector: OperatorMatrix,
}

impl Proposition {
    pub fn new(projector: OperatorMatrix) -> Result<Self> {
        let scale = projector.frobenius_norm().max(1.0);
        let adj = (&projector - &projector.adjoint()).frobenius_norm();
        if adj > PROJECTOR_TOL * scale {
            return Err(Error::NotHermitian { defect: adj / scale });
        }
        let sq = (&(&projector * &projector) - &projector).frobenius_norm();
        if sq > PROJECTOR_TOL * scale {
            return Err(Error::invalid(format!("P^2 - P has norm {sq}")));
        }
        Ok(Self { projector })
    }

    pub fn projector(&self) -> &OperatorMatrix {
        &self.projector
    }

    pub fn dim(&self) -> usize {
        self.projector.dim()
    }
}

/// `Tr(Pρ)/Tr ρ`.
pub fn proposition_probability(p: &Proposition, rho: &DensityState) -> Result<f64> {
    let tr = require_positive_trace(rho)?;
    let prod = p.projector.try_mul(rho.matrix())?;
    Ok(prod.trace().re / tr)
}

/// Standard deviation `√(p − p²)` of a proposition with probability `p`.
pub fn proposition_deviation(probability: f64) -> f64 {
    (probability - probability * probability).max(0.0).sqrt()
}

/// `½|Tr([P, P₁]ρ)/Tr ρ|`.
pub fn uncertainty_bound(p: &Proposition, p1: &Proposition, rho: &DensityState) -> Result<f64> {
    let tr = require_positive_trace(rho)?;
    let c = commutator(&p.projector, &p1.projector)?;
    Ok(0.5 * c.try_mul(rho.matrix())?.trace().norm() / tr)
}

/// Both sides of `ΔP ΔP₁ ≥ ½|⟨[P, P₁]⟩|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UncertaintyReport {
    pub probability: f64,
    pub probability1: f64,
    pub deviation_product: f64,
    pub bound: f64,
}

impl UncertaintyReport {
    pub fn holds(&self, slack: f64) -> bool {
        self.deviation_product + slack >= self.bound
    }
}

pub fn uncertainty_report(p: &Proposition, p1: &Proposition, rho: &DensityState) -> Result<UncertaintyReport> {
    let probability = proposition_probability(p, rho)?;
    let probability1 = proposition_probability(p1, rho)?;
    Ok(UncertaintyReport {
        probability,
        probability1,
        deviation_product: proposition_deviation(probability) * proposition_deviation(probability1),
        bound: uncertainty_bound(p, p1, rho)?,
    })
}

/// The propositions `P` and `P₁` used on the first-species reduced state.
pub fn complementarity_propositions() -> (Proposition, Proposition) {
    let p = OperatorMatrix::from_real_rows([
        [0.5, 0.0, 0.5, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.5, 0.0, 0.5, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ]);
    let p1 = OperatorMatrix::from_real_rows([
        [0.5, 0.5, 0.0, 0.0],
        [0.5, 0.5, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ]);
    (Proposition::new(p).expect("projector"), Proposition::new(p1).expect("projector"))
}

/// Values `ψ_0(x) … ψ_n(x)` of the normalized Hermite functions.
pub fn oscillator_eigenfunctions(n: usize, x: f64) -> Result<Vec<f64>> {
    if n > MAX_OSCILLATOR_LEVEL {
        return Err(Error::LevelOutOfRange { level: n, max: MAX_OSCILLATOR_LEVEL });
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(core::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n >= 1 {
        out.push(core::f64::consts::SQRT_2 * x * out[0]);
    }
    for j in 1..n {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * out[j] - (jf / (jf + 1.0)).sqrt() * out[j - 1];
        out.push(next);
    }
    Ok(out)
}

/// `ψ_n(x) = (√π 2ⁿ n!)^{−1/2} H_n(x) e^{−x²/2}`.
pub fn oscillator_eigenfunction(n: usize, x: f64) -> Result<f64> {
    Ok(oscillator_eigenfunctions(n, x)?[n])
}

#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorBasis {
    level_offset: usize,
    x_grid: Vec<f64>,
}

impl OscillatorBasis {
    pub fn new(level_offset: usize, x_grid: Vec<f64>) -> Result<Self> {
        if x_grid.is_empty() {
            return Err(Error::invalid("empty position grid"));
        }
        if x_grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if x_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("position grid must be strictly ascending"));
        }
        Ok(Self { level_offset, x_grid })
    }

    /// Uniform grid of `points` samples on `[lo, hi]`.
    pub fn uniform(level_offset: usize, lo: f64, hi: f64, points: usize) -> Result<Self> {
        if points < 2 || !(hi > lo) {
            return Err(Error::invalid("uniform grid needs points >= 2 and hi > lo"));
        }
        let step = (hi - lo) / (points - 1) as f64;
        Self::new(level_offset, (0..points).map(|i| lo + step * i as f64).collect())
    }

    /// `[−8, 8]` with 401 points.
    pub fn default_grid(level_offset: usize) -> Self {
        Self::uniform(level_offset, -8.0, 8.0, 401).expect("valid default grid")
    }

    pub fn level_offset(&self) -> usize {
        self.level_offset
    }

    pub fn x_grid(&self) -> &[f64] {
        &self.x_grid
    }
}

/// `p(x) = Σ_{mn} ρ_{mn} ψ_{k+m}(x) ψ_{k+n}(x)` on the basis grid.
pub fn position_density(rho: &DensityState, basis: &OscillatorBasis) -> Result<Vec<f64>> {
    let d = rho.dim();
    let top = basis.level_offset + d - 1;
    if top > MAX_OSCILLATOR_LEVEL {
        return Err(Error::LevelOutOfRange { level: top, max: MAX_OSCILLATOR_LEVEL });
    }
    let m = rho.matrix();
    basis
        .x_grid
        .iter()
        .map(|&x| {
            let psi = &oscillator_eigenfunctions(top, x)?[basis.level_offset..];
            let mut acc = 0.0;
            for r in 0..d {
                acc += m[(r, r)].re * psi[r] * psi[r];
                for c in (r + 1)..d {
                    acc += 2.0 * m[(r, c)].re * psi[r] * psi[c];
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Trapezoid rule for samples `y` on the ascending grid `x`.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}
