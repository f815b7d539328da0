//! Exact small-lattice oracle: full generator enumeration on `2^(n-1)` states.

mod dirichlet;
mod generator;
mod linalg;
mod profile;

pub use dirichlet::{
    detailed_balance_by_bond, detailed_balance_check, dirichlet_form, dirichlet_inner,
    generator_action, mean_carre_du_champ,
};
pub use generator::{
    build_generator, exact_evolution, stationary_distribution, write_distribution_triplets,
    GeneratorMatrix, StateDistribution, MAX_EXACT_N,
};
pub use linalg::lu_solve;
pub use profile::{closed_form_profile, exact_mean_profile, recurrence_residual};
