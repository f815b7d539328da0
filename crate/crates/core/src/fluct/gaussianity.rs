//! Moments and characteristic function of the field at time zero.

use crate::error::{Error, Result};
use crate::fluct::field::compressibility;
use crate::fluct::stats::{mean_estimate, Estimate};
use crate::pde::TestFunction;

pub const MIN_GAUSSIANITY_REPLICAS: usize = 1000;
pub const CHARACTERISTIC_POINTS: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicCheck {
    pub lambda: f64,
    /// `E cos(lambda Y)`.
    pub real: Estimate,
    /// `E sin(lambda Y)`.
    pub imag: Estimate,
    /// `exp(-lambda^2 chi int f^2 / 2)`.
    pub theory: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianityReport {
    pub replicas: usize,
    pub mean: Estimate,
    pub variance: Estimate,
    /// `chi (1/n) sum_x f(x/n)^2`, exact for the product measure.
    pub lattice_variance: f64,
    /// `chi int_0^1 f^2`.
    pub limit_variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub jarque_bera: f64,
    /// Asymptotic chi-square (2 dof) p-value of the Jarque-Bera statistic.
    pub normality_p_value: f64,
    pub characteristic: Vec<CharacteristicCheck>,
}

fn l2_norm_sq(f: &TestFunction<f64>) -> f64 {
    // Simpson on a fine grid
    let m = 1 << 14;
    let h = 1.0 / m as f64;
    let g = |u: f64| f.eval(u).powi(2);
    let mut acc = g(0.0) + g(1.0);
    for j in 1..m {
        acc += if j % 2 == 1 { 4.0 } else { 2.0 } * g(j as f64 * h);
    }
    acc * h / 3.0
}

/// Summary statistics of `Y_0(f)` samples drawn under the product measure
/// at density `rho` on a lattice of size `n`.
pub fn initial_gaussianity(samples: &[f64], f: &TestFunction<f64>, n: usize, rho: f64) -> Result<GaussianityReport> {
    let r = samples.len();
    if r < MIN_GAUSSIANITY_REPLICAS {
        return Err(Error::TooFewReplicas {
            needed: MIN_GAUSSIANITY_REPLICAS,
            got: r,
        });
    }
    let chi = compressibility(rho);
    let lattice_variance = chi * f.sample_sites(n).iter().map(|v| v * v).sum::<f64>() / n as f64;
    let limit_variance = chi * l2_norm_sq(f);
    let rf = r as f64;
    let mean = mean_estimate(samples)?;
    let m = mean.value;
    let central = |p: i32| samples.iter().map(|x| (x - m).powi(p)).sum::<f64>() / rf;
    let (m2, m3, m4) = (central(2), central(3), central(4));
    let var = m2 * rf / (rf - 1.0);
    let variance = Estimate {
        value: var,
        stderr: ((m4 - m2 * m2) / rf).max(0.0).sqrt(),
    };
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    let jarque_bera = rf / 6.0 * (skewness * skewness + excess_kurtosis * excess_kurtosis / 4.0);
    let normality_p_value = (-jarque_bera / 2.0).exp();
    let characteristic = CHARACTERISTIC_POINTS
        .iter()
        .map(|&lambda| {
            let cos: Vec<f64> = samples.iter().map(|y| (lambda * y).cos()).collect();
            let sin: Vec<f64> = samples.iter().map(|y| (lambda * y).sin()).collect();
            Ok(CharacteristicCheck {
                lambda,
                real: mean_estimate(&cos)?,
                imag: mean_estimate(&sin)?,
                theory: (-lambda * lambda * limit_variance / 2.0).exp(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GaussianityReport {
        replicas: r,
        mean,
        variance,
        lattice_variance,
        limit_variance,
        skewness,
        excess_kurtosis,
        jarque_bera,
        normality_p_value,
        characteristic,
    })
}
