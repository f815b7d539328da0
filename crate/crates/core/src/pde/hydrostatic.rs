//! Stationary solutions of the hydrodynamic equation.

use crate::error::{Error, Result};
use crate::lattice::Regime;
use crate::scalar::Real;

/// Affine profile `u -> slope * u + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydrostaticProfile<T> {
    pub regime: Regime,
    pub slope: T,
    pub intercept: T,
}

impl<T: Real> HydrostaticProfile<T> {
    pub fn eval(&self, u: T) -> T {
        self.slope * u + self.intercept
    }
}

/// Long-time limit of the density: linear between the reservoir densities
/// for `theta < 1`, linear with a third of the jump at each end for
/// `theta = 1`, flat at the mean reservoir density for `theta > 1`.
pub fn hydrostatic_profile<T: Real>(theta: T, alpha: T, beta: T) -> Result<HydrostaticProfile<T>> {
    if !(theta >= T::zero()) {
        return Err(Error::NegativeTheta(theta.to_f64_lossy()));
    }
    let regime = Regime::from_theta(theta);
    let (slope, intercept) = match regime {
        Regime::Dirichlet => (beta - alpha, alpha),
        Regime::Robin => {
            let third = (beta - alpha) / T::lit(3.0);
            (third, alpha + third)
        }
        Regime::Neumann => (T::zero(), (alpha + beta) / T::lit(2.0)),
    };
    Ok(HydrostaticProfile {
        regime,
        slope,
        intercept,
    })
}
