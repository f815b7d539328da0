//! Small estimators shared by the fluctuation statistics.

use crate::error::{Error, Result};

/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// `(value - theory) / stderr`; zero when both sides agree exactly.
    pub fn z_score(&self, theory: f64) -> f64 {
        let d = self.value - theory;
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }

    pub fn within(&self, theory: f64, sigmas: f64) -> bool {
        self.z_score(theory).abs() <= sigmas
    }
}

/// Sample mean and its standard error.
pub fn mean_estimate(xs: &[f64]) -> Result<Estimate> {
    if xs.len() < 2 {
        return Err(Error::TooFewReplicas { needed: 2, got: xs.len() });
    }
    let r = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / r;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0);
    Ok(Estimate {
        value: mean,
        stderr: (var / r).sqrt(),
    })
}

/// Unbiased sample covariance with a jackknife standard error.
pub fn covariance_jackknife(xs: &[f64], ys: &[f64]) -> Result<Estimate> {
    if xs.len() != ys.len() {
        return Err(Error::MismatchedRecords);
    }
    let r = xs.len();
    if r < 3 {
        return Err(Error::TooFewReplicas { needed: 3, got: r });
    }
    let rf = r as f64;
    let mx = xs.iter().sum::<f64>() / rf;
    let my = ys.iter().sum::<f64>() / rf;
    // centred sums keep the leave-one-out formulas well conditioned
    let (mut sx, mut sy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (a, b) = (x - mx, y - my);
        sx += a;
        sy += b;
        sxy += a * b;
    }
    let full = (sxy - sx * sy / rf) / (rf - 1.0);
    let m = rf - 1.0;
    let loo: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let (a, b) = (x - mx, y - my);
            let (sa, sb) = (sx - a, sy - b);
            (sxy - a * b - sa * sb / m) / (m - 1.0)
        })
        .collect();
    let mean_loo = loo.iter().sum::<f64>() / rf;
    let var = loo.iter().map(|c| (c - mean_loo).powi(2)).sum::<f64>() * (rf - 1.0) / rf;
    Ok(Estimate {
        value: full,
        stderr: var.sqrt(),
    })
}

/// Least-squares slope of `y` on `x` and its standard error from the
/// supplied per-point standard errors of `y` (weighted fit).
pub fn weighted_slope(x: &[f64], y: &[Estimate]) -> Result<Estimate> {
    if x.len() != y.len() {
        return Err(Error::MismatchedRecords);
    }
    if x.len() < 2 {
        return Err(Error::TooFewReplicas { needed: 2, got: x.len() });
    }
    let w: Vec<f64> = y.iter().map(|e| 1.0 / (e.stderr * e.stderr)).collect();
    let sw: f64 = w.iter().sum();
    let xm = w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() / sw;
    let ym = w.iter().zip(y).map(|(w, e)| w * e.value).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * (x - xm).powi(2)).sum();
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), e)| w * (x - xm) * (e.value - ym)).sum();
    Ok(Estimate {
        value: sxy / sxx,
        stderr: (1.0 / sxx).sqrt(),
    })
}
