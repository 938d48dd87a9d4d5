//! Multi-species self-switching family.
//!
//! Two species with occupation numbers `(n₁, n₂)` and `H = n₁ + n₂`. For each
//! of the three energies `k`, `k+m`, `k+2m` the family uses the `l + 1`
//! degenerate vectors `|n_j⟩ = |k + nm − j, j⟩`, `j = 0..=l`.
//!
//! Basis order: level-major, and within a level by ascending `n₁` (that is,
//! descending `j`). With this order the worked two-species example has exactly
//! the block layout printed for it.

// Unused whenever std is linked into the build.
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_traits::Zero;

use super::darboux::{DarbouxDressing, DarbouxParameters};
use super::switching::{switching_functions, SwitchingProfile};
use crate::feedback::FeedbackPolynomial;
use crate::linalg::{partial_trace, CompositeLayout, DensityState, OperatorMatrix, C64};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct MultiSpeciesConfig {
    pub a: f64,
    pub b: f64,
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub alphas: Vec<C64>,
    pub betas: Vec<C64>,
    /// Feedback strength in `f(ρ) = (1 − h)ρ + hρ²`.
    pub h: f64,
}

impl MultiSpeciesConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: f64,
        b: f64,
        m: usize,
        k: usize,
        l: usize,
        alphas: Vec<C64>,
        betas: Vec<C64>,
        h: f64,
    ) -> Result<Self> {
        let cfg = Self { a, b, m, k, l, alphas, betas, h };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let m2 = (self.m * self.m) as f64;
        let w = self.a * self.a + 4.0 * self.b;
        if !(0.0 < 4.0 * m2 && 4.0 * m2 < w && w < self.a * self.a) {
            return Err(Error::invalid(format!(
                "positivity window 0 < 4m^2 < a^2 + 4b < a^2 violated (4m^2 = {}, a^2 + 4b = {w}, a^2 = {})",
                4.0 * m2,
                self.a * self.a
            )));
        }
        if self.a <= 0.0 {
            return Err(Error::invalid("a must be positive"));
        }
        if self.l > self.k {
            return Err(Error::invalid(format!("l = {} exceeds k = {}", self.l, self.k)));
        }
        if self.alphas.len() != self.l + 1 || self.betas.len() != self.l + 1 {
            return Err(Error::invalid(format!("alphas and betas need {} entries", self.l + 1)));
        }
        if !self.h.is_finite() {
            return Err(Error::invalid("h must be finite"));
        }
        Ok(())
    }

    pub fn species(&self) -> usize {
        self.l + 1
    }

    pub fn dim(&self) -> usize {
        3 * self.species()
    }

    /// Position of `|n_j⟩` in the basis.
    pub fn index(&self, level: usize, j: usize) -> usize {
        level * self.species() + (self.l - j)
    }

    /// Occupations `(n₁, n₂)` of every basis vector, in basis order.
    pub fn basis(&self) -> Vec<(usize, usize)> {
        let mut out = vec![(0, 0); self.dim()];
        for level in 0..3 {
            for j in 0..=self.l {
                out[self.index(level, j)] = (self.k + level * self.m - j, j);
            }
        }
        out
    }

    pub fn hamiltonian(&self) -> OperatorMatrix {
        let diag: Vec<f64> = self.basis().iter().map(|&(n1, n2)| (n1 + n2) as f64).collect();
        OperatorMatrix::from_real_diagonal(&diag)
    }

    pub fn feedback(&self) -> FeedbackPolynomial {
        FeedbackPolynomial::quadratic(self.h)
    }

    fn root_minus(&self) -> f64 {
        let m2 = (self.m * self.m) as f64;
        (self.a * self.a + 4.0 * (self.b - m2)).sqrt()
    }

    fn root_plus(&self) -> f64 {
        (self.a * self.a + 4.0 * self.b).sqrt()
    }

    /// Unnormalized seed `Σ_j ρ_j(0)`.
    pub fn seed(&self) -> Result<DensityState> {
        let n = self.dim();
        let mut m = OperatorMatrix::zeros(n);
        for j in 0..=self.l {
            let (i0, i1, i2) = (self.index(0, j), self.index(1, j), self.index(2, j));
            m[(i0, i0)] = C64::new(self.a / 2.0, 0.0);
            m[(i2, i2)] = C64::new(self.a / 2.0, 0.0);
            m[(i1, i1)] = C64::new((self.a + self.root_minus()) / 2.0, 0.0);
            m[(i0, i2)] = C64::new(-self.root_plus() / 2.0, 0.0);
            m[(i2, i0)] = C64::new(-self.root_plus() / 2.0, 0.0);
        }
        DensityState::new(m)
    }

    /// Closed form of `ρ(0)² − aρ(0)`: `b·1 − m² Σ_j |1_j⟩⟨1_j|`.
    pub fn expected_delta(&self) -> OperatorMatrix {
        let m2 = (self.m * self.m) as f64;
        let diag: Vec<f64> =
            (0..self.dim()).map(|i| if i / self.species() == 1 { self.b - m2 } else { self.b }).collect();
        OperatorMatrix::from_real_diagonal(&diag)
    }

    /// The two eigenvectors of `ρ_j(0) − iH_j` sharing the eigenvalue
    /// [`lax_eigenvalue`](Self::lax_eigenvalue).
    pub fn ansatz_vectors(&self, j: usize) -> (Vec<C64>, Vec<C64>) {
        let n = self.dim();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let mut phi1 = vec![C64::zero(); n];
        phi1[self.index(0, j)] = -C64::new(self.root_minus(), 2.0 * self.m as f64) * s / self.root_plus();
        phi1[self.index(2, j)] = C64::new(s, 0.0);
        let mut phi2 = vec![C64::zero(); n];
        phi2[self.index(1, j)] = C64::new(1.0, 0.0);
        (phi1, phi2)
    }

    /// `z = (a + √(a² + 4(b − m²)))/2 − (k + m)i`.
    pub fn lax_eigenvalue(&self) -> C64 {
        C64::new((self.a + self.root_minus()) / 2.0, -((self.k + self.m) as f64))
    }

    /// `|φ⟩ = Σ_j α_j|φ_j⁽¹⁾⟩ + β_j|φ_j⁽²⁾⟩`.
    pub fn lax_vector(&self) -> Vec<C64> {
        let mut v = vec![C64::zero(); self.dim()];
        for j in 0..=self.l {
            let (p1, p2) = self.ansatz_vectors(j);
            for i in 0..v.len() {
                v[i] += self.alphas[j] * p1[i] + self.betas[j] * p2[i];
            }
        }
        v
    }

    /// Rate `1 + h(a − 1)` of the linear factor `e^{−i(1 + h(a−1))Ht}`.
    pub fn linear_rate(&self) -> f64 {
        1.0 + self.h * (self.a - 1.0)
    }

    /// Whether `h = 1/(1 − a)`, which removes the oscillating factor.
    pub fn is_tuned(&self) -> bool {
        (self.h - 1.0 / (1.0 - self.a)).abs() <= 1e-12 * self.h.abs().max(1.0)
    }

    pub fn dressing(&self) -> Result<MultiSpeciesSolution> {
        let params = DarbouxParameters::new(C64::new(0.0, -1.0), self.linear_rate(), self.lax_vector())?;
        let dressing = DarbouxDressing::new(&self.seed()?, &self.hamiltonian(), &self.feedback(), &params)?;
        Ok(MultiSpeciesSolution { cfg: self.clone(), dressing })
    }

    /// Product space of the two species: occupations `0..=k+2m` for the first
    /// and `0..=l` for the second.
    pub fn species_layout(&self) -> CompositeLayout {
        CompositeLayout::new(vec![self.k + 2 * self.m + 1, self.l + 1]).expect("positive factors")
    }

    /// Places a state on the family's subspace into the full two-species
    /// product space (first species most significant).
    pub fn embed_species(&self, state: &DensityState) -> Result<DensityState> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: state.dim(), right: self.dim() });
        }
        let layout = self.species_layout();
        let width = layout.factor_dims()[1];
        let flat: Vec<usize> = self.basis().iter().map(|&(n1, n2)| n1 * width + n2).collect();
        let mut out = OperatorMatrix::zeros(layout.total_dim());
        let m = state.matrix();
        for (r, &fr) in flat.iter().enumerate() {
            for (c, &fc) in flat.iter().enumerate() {
                out[(fr, fc)] = m[(r, c)];
            }
        }
        state.with_matrix(out)
    }

    /// Reduced state of species `which` (0 or 1).
    pub fn reduced(&self, state: &DensityState, which: usize) -> Result<DensityState> {
        partial_trace(&self.embed_species(state)?, &self.species_layout(), which)
    }
}

/// Unnormalized seed of the family.
pub fn multispecies_seed(cfg: &MultiSpeciesConfig) -> Result<DensityState> {
    cfg.validate()?;
    cfg.seed()
}

#[derive(Clone, Debug)]
pub struct MultiSpeciesSolution {
    cfg: MultiSpeciesConfig,
    dressing: DarbouxDressing,
}

impl MultiSpeciesSolution {
    pub fn config(&self) -> &MultiSpeciesConfig {
        &self.cfg
    }

    pub fn dressing(&self) -> &DarbouxDressing {
        &self.dressing
    }

    pub fn at(&self, t: f64) -> Result<DensityState> {
        self.dressing.at(t)
    }
}

/// `ρ₁(t)` of the family.
pub fn multispecies_solution(cfg: &MultiSpeciesConfig, t: f64) -> Result<DensityState> {
    cfg.dressing()?.at(t)
}

/// Worked example `k = m = 1`, `l = 1`, `a = 5`, `b = −4`, `h = −1/4` with
/// `α_j = 1/√2`, `β₀ = e^{t₀/4}`, `β₁ = e^{t₁/4}`.
pub fn two_species_example(profile: SwitchingProfile) -> MultiSpeciesConfig {
    let s = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    MultiSpeciesConfig::new(
        5.0,
        -4.0,
        1,
        1,
        1,
        vec![s, s],
        vec![C64::new((profile.t0 / 4.0).exp(), 0.0), C64::new((profile.t1 / 4.0).exp(), 0.0)],
        -0.25,
    )
    .expect("worked example parameters are valid")
}

/// Closed-form block matrix of the worked example, in the family basis order.
pub fn two_species_closed_form(t: f64, profile: SwitchingProfile) -> Result<DensityState> {
    let sf = switching_functions(t, profile);
    let sqrt5 = 5f64.sqrt();
    let c = C64::new(2.0 / 3.0, -sqrt5 / 3.0);
    let i = C64::new(0.0, 1.0);
    let re = |x: f64| C64::new(x, 0.0);
    // ξ = [[F₁, F₀], [F₁, F₀]], ζ = F·[[1, 1], [1, 1]]
    let xi = [[sf.f1, sf.f0], [sf.f1, sf.f0]];
    let mut m = OperatorMatrix::zeros(6);
    for r in 0..2 {
        for q in 0..2 {
            let id = if r == q { 1.0 } else { 0.0 };
            m[(r, q)] = re(2.5 * id);
            m[(2 + r, 2 + q)] = re((5.0 + sqrt5) / 2.0 * id);
            m[(4 + r, 4 + q)] = re(2.5 * id);
            m[(r, 2 + q)] = c * xi[r][q];
            m[(2 + r, q)] = c.conj() * xi[q][r];
            m[(r, 4 + q)] = re(-1.5 * id) + c * sf.f;
            m[(4 + r, q)] = re(-1.5 * id) + c.conj() * sf.f;
            m[(2 + r, 4 + q)] = i * xi[q][r];
            m[(4 + r, 2 + q)] = -i * xi[r][q];
        }
    }
    DensityState::new(m)
}
