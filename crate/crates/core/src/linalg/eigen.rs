//! Cyclic complex Jacobi eigensolver for small dense Hermitian matrices.
//!
//! Jacobi is slower than tridiagonal QR for large `n` but every operator in
//! this crate has dimension well below 32, where it is fast, backward stable
//! and fully deterministic.

use alloc::vec::Vec;

// Unused whenever std is linked into the build.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use super::{DensityState, OperatorMatrix, C64};
use crate::{Error, Result};

/// Hermiticity tolerance accepted by the eigensolver.
const HERMITIAN_INPUT_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition `A = V diag(λ) V†` of a Hermitian matrix.
///
/// Eigenvalues are ascending; each eigenvector column has its first
/// non-negligible component made real and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are orthonormal eigenvectors.
    pub vectors: OperatorMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.dim()).map(|r| self.vectors[(r, k)]).collect()
    }

    /// `V diag(g(λ)) V†` for a complex-valued scalar function.
    pub fn map_complex(&self, mut g: impl FnMut(f64) -> C64) -> OperatorMatrix {
        let weights: Vec<C64> = self.values.iter().map(|&l| g(l)).collect();
        self.synthesize(&weights)
    }

    /// `V diag(w) V†`.
    pub fn synthesize(&self, weights: &[C64]) -> OperatorMatrix {
        let n = self.dim();
        let v = &self.vectors;
        OperatorMatrix::from_fn(n, |r, c| {
            let mut acc = C64::zero();
            for k in 0..n {
                acc += v[(r, k)] * weights[k] * v[(c, k)].conj();
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> OperatorMatrix {
        let w: Vec<C64> = self.values.iter().map(|&l| C64::new(l, 0.0)).collect();
        self.synthesize(&w)
    }
}

/// Diagonalizes a Hermitian matrix.
pub fn hermitian_eigensystem(a: &OperatorMatrix) -> Result<HermitianEigen> {
    let defect = a.hermiticity_defect();
    if defect > HERMITIAN_INPUT_TOL {
        return Err(Error::NotHermitian { defect });
    }
    Ok(jacobi(&a.hermitian_part()))
}

/// `V diag(g(λ)) V†` for a real scalar function `g`; `g` returning a
/// non-finite value at some eigenvalue is reported as a domain error.
pub fn matrix_function(a: &OperatorMatrix, g: impl Fn(f64) -> f64) -> Result<OperatorMatrix> {
    let eig = hermitian_eigensystem(a)?;
    let mut weights = Vec::with_capacity(eig.dim());
    for &l in &eig.values {
        let y = g(l);
        if !y.is_finite() {
            return Err(Error::Domain { eigenvalue: l });
        }
        weights.push(C64::new(y, 0.0));
    }
    Ok(eig.synthesize(&weights))
}

fn jacobi(a: &OperatorMatrix) -> HermitianEigen {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = OperatorMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| m[(r, c)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&k| m[(k, k)].re).collect();
    let mut vectors = OperatorMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    fix_phases(&mut vectors);
    HermitianEigen { values, vectors }
}

/// One Jacobi rotation annihilating `m[p][q]`; accumulates into `v`.
fn rotate(m: &mut OperatorMatrix, v: &mut OperatorMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let n = m.dim();
    let phase = apq / mag;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = diag(1, conj(phase)) · [[c, s], [−s, c]] on the (p, q) plane.
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    for r in 0..n {
        let mp = m[(r, p)];
        let mq = m[(r, q)];
        m[(r, p)] = mp * jpp + mq * jqp;
        m[(r, q)] = mp * jpq + mq * jqq;
        let vp = v[(r, p)];
        let vq = v[(r, q)];
        v[(r, p)] = vp * jpp + vq * jqp;
        v[(r, q)] = vp * jpq + vq * jqq;
    }
    for col in 0..n {
        let mp = m[(p, col)];
        let mq = m[(q, col)];
        m[(p, col)] = jpp.conj() * mp + jqp.conj() * mq;
        m[(q, col)] = jpq.conj() * mp + jqq.conj() * mq;
    }
    m[(p, q)] = C64::zero();
    m[(q, p)] = C64::zero();
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
}

fn fix_phases(vectors: &mut OperatorMatrix) {
    let n = vectors.dim();
    for k in 0..n {
        let Some(lead) = (0..n).map(|r| vectors[(r, k)]).find(|z| z.norm() > 1e-12) else {
            continue;
        };
        let rot = lead.conj() / lead.norm();
        for r in 0..n {
            vectors[(r, k)] *= rot;
        }
        // The leading component is real by construction; drop rounding residue.
        if let Some(r0) = (0..n).find(|&r| vectors[(r, k)].norm() > 1e-12) {
            vectors[(r0, k)] = C64::new(vectors[(r0, k)].re, 0.0);
        }
    }
}

/// Cached eigen-decomposition of a Hermitian generator, used to apply
/// `ρ ↦ e^{−isH} ρ e^{isH}` repeatedly.
#[derive(Clone, Debug)]
pub struct Propagator {
    eig: HermitianEigen,
}

impl Propagator {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        Ok(Self { eig: hermitian_eigensystem(h)? })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    /// `e^{−isH}`.
    pub fn unitary(&self, s: f64) -> OperatorMatrix {
        self.eig.map_complex(|l| C64::from_polar(1.0, -s * l))
    }

    /// `e^{−isH} M e^{isH}` for an arbitrary operator `M`.
    pub fn conjugate_matrix(&self, s: f64, m: &OperatorMatrix) -> Result<OperatorMatrix> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: m.dim() });
        }
        let u = self.unitary(s);
        Ok(&(&u * m) * &u.adjoint())
    }
}

impl DensityState {
    /// `e^{−isH} ρ e^{isH}`, computed from the eigen-decomposition of `H`.
    pub fn unitary_conjugate_exp(&self, h: &OperatorMatrix, s: f64) -> Result<DensityState> {
        let prop = Propagator::new(h)?;
        let out = prop.conjugate_matrix(s, self.matrix())?;
        self.with_matrix(out.hermitian_part())
    }
}

/// Free-function form of [`DensityState::unitary_conjugate_exp`].
pub fn unitary_conjugate_exp(h: &OperatorMatrix, s: f64, rho: &DensityState) -> Result<DensityState> {
    rho.unitary_conjugate_exp(h, s)
}
