//! Replica-averaged density profiles.

use crate::error::{Error, Result};
use crate::kmc::simulator::TrajectoryRecord;

/// Per-site sample mean and standard error, site `x` at index `x - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub replicas: usize,
}

impl DensityEstimate {
    /// Mean and standard error from per-replica profiles of equal length.
    pub fn from_samples<'a, I>(samples: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut sum: Vec<f64> = Vec::new();
        let mut sq: Vec<f64> = Vec::new();
        let mut count = 0usize;
        for s in samples {
            if count == 0 {
                sum = vec![0.0; s.len()];
                sq = vec![0.0; s.len()];
            } else if s.len() != sum.len() {
                return Err(Error::MismatchedRecords);
            }
            for (i, &v) in s.iter().enumerate() {
                sum[i] += v;
                sq[i] += v * v;
            }
            count += 1;
        }
        if count == 0 {
            return Err(Error::EmptyRecords);
        }
        let r = count as f64;
        let mean: Vec<f64> = sum.iter().map(|s| s / r).collect();
        let stderr = mean
            .iter()
            .zip(&sq)
            .map(|(&m, &q)| {
                if count < 2 {
                    0.0
                } else {
                    ((q / r - m * m).max(0.0) * r / (r - 1.0) / r).sqrt()
                }
            })
            .collect();
        Ok(Self {
            mean,
            stderr,
            replicas: count,
        })
    }

    /// `(1/n) sum_x |mean(x) - reference(x/n)|`, the lattice version of the
    /// L1 distance on `[0, 1]`.
    pub fn l1_distance<F: Fn(f64) -> f64>(&self, reference: F) -> f64 {
        let n = (self.mean.len() + 1) as f64;
        self.mean
            .iter()
            .enumerate()
            .map(|(i, &m)| (m - reference((i + 1) as f64 / n)).abs())
            .sum::<f64>()
            / n
    }
}

/// Density profile across replicas at grid time `t`.
pub fn empirical_density_profile(records: &[TrajectoryRecord], t: f64) -> Result<DensityEstimate> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    let k = first.grid_index(t)?;
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        if r.params != first.params || r.grid != first.grid {
            return Err(Error::MismatchedRecords);
        }
        let snap = &r.snapshots[k];
        rows.push((1..=snap.len()).map(|x| snap.occ(x) as f64).collect::<Vec<f64>>());
    }
    DensityEstimate::from_samples(rows.iter().map(|v| v.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmc::rng::replica_rng;
    use crate::kmc::simulator::{run_trajectory, RunOptions};
    use crate::lattice::{Configuration, Parameters};

    #[test]
    fn full_start_single_replica() {
        let p = Parameters::new(6, 0.0, 0.3, 0.6, 0.5).unwrap();
        let init = Configuration::full(5);
        let mut rng = replica_rng(0, 0);
        let rec = run_trajectory(&p, &init, 0.1, &[0.0, 0.1], &mut (), &mut rng, RunOptions::default(), (0, 0)).unwrap();
        let est = empirical_density_profile(&[rec], 0.0).unwrap();
        assert_eq!(est.mean, vec![1.0; 5]);
        assert_eq!(est.stderr, vec![0.0; 5]);
    }

    #[test]
    fn errors() {
        assert_eq!(empirical_density_profile(&[], 0.0), Err(Error::EmptyRecords));
        let p = Parameters::new(6, 0.0, 0.3, 0.6, 0.5).unwrap();
        let q = Parameters::new(6, 1.0, 0.3, 0.6, 0.5).unwrap();
        let init = Configuration::full(5);
        let mut rng = replica_rng(0, 0);
        let a = run_trajectory(&p, &init, 0.1, &[0.0], &mut (), &mut rng, RunOptions::default(), (0, 0)).unwrap();
        let b = run_trajectory(&q, &init, 0.1, &[0.0], &mut (), &mut rng, RunOptions::default(), (0, 1)).unwrap();
        assert_eq!(empirical_density_profile(&[a, b], 0.0), Err(Error::MismatchedRecords));
    }

    #[test]
    fn standard_error_formula() {
        let rows = [vec![1.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.0]];
        let est = DensityEstimate::from_samples(rows.iter().map(|v| v.as_slice())).unwrap();
        assert_eq!(est.mean, vec![0.5, 0.0]);
        // sample variance 1/3, divided by 4 replicas
        assert!((est.stderr[0] - (1.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }
}
