//! Stationary mean occupation: exact (from the stationary law) and closed form.

use crate::error::Result;
use crate::lattice::Parameters;
use crate::oracle::generator::{stationary_distribution, GeneratorMatrix};
use crate::scalar::Real;

/// `rho^n(x) = a_n x + b_n` with `a_n = (beta - alpha) / (2 n^theta + n - 2)`
/// and `b_n = alpha + a_n (n^theta - 1)`, for `x = 1..=n-1`.
pub fn closed_form_profile<T: Real>(p: &Parameters<T>) -> Vec<T> {
    let n = T::from_usize_lossy(p.n());
    let nt = n.powf(p.theta());
    let two = T::lit(2.0);
    let slope = (p.beta() - p.alpha()) / (two * nt + n - two);
    let offset = p.alpha() + slope * (nt - T::one());
    (1..=p.sites())
        .map(|x| slope * T::from_usize_lossy(x) + offset)
        .collect()
}

/// `sum_eta pi(eta) eta(x)` under the stationary law of `q`.
pub fn exact_mean_profile<T: Real>(q: &GeneratorMatrix<T>, p: &Parameters<T>) -> Result<Vec<T>> {
    debug_assert_eq!(q.params().n(), p.n());
    Ok(stationary_distribution(q)?.marginals())
}

/// Largest residual of the stationary balance relations for the mean profile:
/// discrete harmonicity in the bulk and reservoir exchange at sites `1`, `n-1`.
pub fn recurrence_residual<T: Real>(p: &Parameters<T>, profile: &[T]) -> T {
    let m = profile.len();
    let s = p.boundary_scale();
    let at = |x: usize| profile[x - 1];
    if m == 1 {
        // single site exchanges with both reservoirs
        return (s * (p.alpha() - at(1)) + s * (p.beta() - at(1))).abs();
    }
    let mut worst = (at(2) - at(1) + s * (p.alpha() - at(1))).abs();
    worst = worst.max((s * (p.beta() - at(m)) + at(m - 1) - at(m)).abs());
    for x in 2..m {
        worst = worst.max((at(x + 1) - at(x) + at(x - 1) - at(x)).abs());
    }
    worst
}
