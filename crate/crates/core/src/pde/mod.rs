//! Hydrodynamic heat equation, its stationary profiles and eigenbases.

mod discrete;
mod heat;
mod hydrostatic;
mod spectral;
mod test_function;

pub use discrete::{discrete_operators, DiscreteOperators};
pub use heat::{solve_heat, thomas, trapezoid, DensityField, HeatGrid};
pub use hydrostatic::{hydrostatic_profile, HydrostaticProfile};
pub use spectral::{
    eigenbasis, interpolate_grid, robin_condition, robin_root, semigroup_apply, Mode, Projection,
    Source, SpectralBasis,
};
pub use test_function::{Shape, TestFunction};
