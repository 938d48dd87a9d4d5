//! Numerical core for the nonlinear von Neumann equation `i dρ/dt = [H, f(ρ)]`.
//!
//! The crate is `no_std` and only needs an allocator. It is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, a deterministic Hermitian eigensolver,
//!   spectral functions, Kronecker products, partial traces and transposes.
//! * [`feedback`]: feedback polynomials `f(ρ)`, the right-hand side, conserved
//!   quantities, a fixed-step RK4 integrator and the finite-difference residual.
//! * [`solutions`]: Darboux dressing of commuting seeds and the closed-form
//!   self-switching families (three-level mutation, two-qubit organism,
//!   multi-species populations).
//! * [`observables`]: entropies, separability, purification, propositions,
//!   uncertainty bounds and oscillator position densities.

#![no_std]
#![deny(rust_2018_idioms)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod feedback;
pub mod linalg;
pub mod observables;
pub mod solutions;

pub use error::{Error, Result};
pub use feedback::{FeedbackClass, FeedbackPolynomial, IntegratorConfig, Trajectory};
pub use linalg::{CompositeLayout, DensityState, HermitianEigen, OperatorMatrix, C64};
