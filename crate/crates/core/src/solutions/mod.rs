//! Closed-form self-switching solutions and the Darboux machinery behind them.
//!
//! Every family here is an exact solution of `i dρ/dt = [H, f(ρ)]` for its own
//! `(H, f)`; the crate's tests and the verification suite check each one with
//! the finite-difference residual from [`crate::feedback::residual`].

mod darboux;
mod multispecies;
mod mutation;
mod organism;
mod switching;

pub use darboux::{
    darboux_dress, delta_a, lax_covariance_check, DarbouxDressing, DarbouxParameters, LaxReport, LaxSample,
};
pub use multispecies::{
    multispecies_seed, multispecies_solution, two_species_closed_form, two_species_example, MultiSpeciesConfig,
    MultiSpeciesSolution,
};
pub use mutation::{mutation3, mutation3_via_construction, MutationParams};
pub use organism::{organism_solution, Organism, LINEAR_RATE as ORGANISM_LINEAR_RATE, TRACE as ORGANISM_TRACE};
pub use switching::{switching_functions, uncertainty_bound_closed_form, SwitchingFunctions, SwitchingProfile};
