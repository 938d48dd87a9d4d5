use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::{DensityState, OperatorMatrix, C64};
use crate::{Error, Result};

/// Factor dimensions of a tensor-product space. The first factor is the most
/// significant digit of the row-major multi-index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositeLayout {
    factor_dims: Vec<usize>,
}

impl CompositeLayout {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() || factor_dims.contains(&0) {
            return Err(Error::invalid("layout factors must be positive"));
        }
        Ok(Self { factor_dims })
    }

    pub fn qubits(n: usize) -> Self {
        Self { factor_dims: vec![2; n] }
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    fn check(&self, dim: usize, factor: usize) -> Result<()> {
        if self.total_dim() != dim {
            return Err(Error::LayoutMismatch { product: self.total_dim(), dim });
        }
        if factor >= self.factor_dims.len() {
            return Err(Error::FactorOutOfRange { index: factor, factors: self.factor_dims.len() });
        }
        Ok(())
    }

    /// Splits a flat index into (outer, digit, inner) around factor `k`.
    fn split(&self, index: usize, k: usize) -> (usize, usize, usize) {
        let inner_size: usize = self.factor_dims[k + 1..].iter().product();
        let d = self.factor_dims[k];
        (index / (inner_size * d), (index / inner_size) % d, index % inner_size)
    }

    fn join(&self, outer: usize, digit: usize, inner: usize, k: usize) -> usize {
        let inner_size: usize = self.factor_dims[k + 1..].iter().product();
        (outer * self.factor_dims[k] + digit) * inner_size + inner
    }
}

/// Kronecker product `A ⊗ B`.
pub fn tensor_product(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    let (n, m) = (a.dim(), b.dim());
    OperatorMatrix::from_fn(n * m, |r, c| a[(r / m, c / m)] * b[(r % m, c % m)])
}

/// Reduced operator on factor `keep`, tracing out all the others.
pub fn partial_trace_matrix(m: &OperatorMatrix, layout: &CompositeLayout, keep: usize) -> Result<OperatorMatrix> {
    layout.check(m.dim(), keep)?;
    let d = layout.factor_dims[keep];
    let n = m.dim();
    let mut out = vec![C64::zero(); d * d];
    for r in 0..n {
        let (ro, rd, ri) = layout.split(r, keep);
        for c in 0..n {
            let (co, cd, ci) = layout.split(c, keep);
            if ro == co && ri == ci {
                out[rd * d + cd] += m[(r, c)];
            }
        }
    }
    OperatorMatrix::new(d, out)
}

/// `Tr_{others} ρ`, kept on factor `keep`.
pub fn partial_trace(rho: &DensityState, layout: &CompositeLayout, keep: usize) -> Result<DensityState> {
    let m = partial_trace_matrix(rho.matrix(), layout, keep)?;
    rho.with_matrix(m.hermitian_part())
}

/// Matrix transpose restricted to factor `which`.
pub fn partial_transpose_matrix(m: &OperatorMatrix, layout: &CompositeLayout, which: usize) -> Result<OperatorMatrix> {
    layout.check(m.dim(), which)?;
    Ok(OperatorMatrix::from_fn(m.dim(), |r, c| {
        let (ro, rd, ri) = layout.split(r, which);
        let (co, cd, ci) = layout.split(c, which);
        m[(layout.join(ro, cd, ri, which), layout.join(co, rd, ci, which))]
    }))
}

pub fn partial_transpose(rho: &DensityState, layout: &CompositeLayout, which: usize) -> Result<OperatorMatrix> {
    partial_transpose_matrix(rho.matrix(), layout, which)
}
