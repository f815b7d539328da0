//! Replica covariances of the fluctuation field.

use crate::error::{Error, Result};
use crate::fluct::stats::{covariance_jackknife, Estimate};
use crate::pde::TestFunction;

/// `Y_t(f)` per replica at shared grid times.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationSeries {
    pub f: TestFunction<f64>,
    pub rho: f64,
    pub times: Vec<f64>,
    /// `values[r][k]` is replica `r` at `times[k]`.
    pub values: Vec<Vec<f64>>,
}

impl FluctuationSeries {
    pub fn time_index(&self, t: f64) -> Result<usize> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))
            .ok_or(Error::MissingGridTime(t))
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[k]).collect()
    }
}

/// Sample `Cov(Y_s, Y_t)` across replicas with jackknife standard error.
pub fn covariance_estimator(series: &FluctuationSeries, s: f64, t: f64) -> Result<Estimate> {
    if series.values.len() < 3 {
        return Err(Error::TooFewReplicas {
            needed: 3,
            got: series.values.len(),
        });
    }
    let (i, j) = (series.time_index(s)?, series.time_index(t)?);
    covariance_jackknife(&series.column(i), &series.column(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn recovers_a_known_covariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let values: Vec<Vec<f64>> = (0..20000)
            .map(|_| {
                let a: f64 = rng.random::<f64>() - 0.5;
                let b: f64 = rng.random::<f64>() - 0.5;
                vec![a, 0.6 * a + b]
            })
            .collect();
        let series = FluctuationSeries {
            f: TestFunction::sine(1),
            rho: 0.5,
            times: vec![0.0, 0.1],
            values,
        };
        let c = covariance_estimator(&series, 0.0, 0.1).unwrap();
        assert!(c.within(0.6 / 12.0, 4.0), "{c:?}");
        assert!(covariance_estimator(&series, 0.0, 0.2).is_err());
    }
}
