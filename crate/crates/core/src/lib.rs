//! Symmetric simple exclusion on `{1, ..., n-1}` with slow boundary
//! reservoirs: exact small-lattice oracles, kinetic Monte Carlo, heat-equation
//! and spectral solvers, and equilibrium fluctuation statistics.

pub mod error;
pub mod fluct;
pub mod kmc;
pub mod lattice;
pub mod oracle;
pub mod pde;
pub mod scalar;

pub use error::{Error, Result};
pub use lattice::{BondEvent, BondKind, Configuration, Parameters, Regime};
pub use scalar::Real;

pub type Params = Parameters<f64>;
pub type Params32 = Parameters<f32>;
pub type Generator = oracle::GeneratorMatrix<f64>;
pub type Distribution = oracle::StateDistribution<f64>;
