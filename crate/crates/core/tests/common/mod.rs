//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

/// Cyclic Jacobi eigen-decomposition of a symmetric `m x m` matrix (row
/// major). Returns eigenvalues and eigenvectors as columns of `v`.
pub fn jacobi_eigen(mut a: Vec<f64>, m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * m + j].powi(2))
            .sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
                for k in 0..m {
                    let vkp = v[k * m + p];
                    let vkq = v[k * m + q];
                    v[k * m + p] = c * vkp - s * vkq;
                    v[k * m + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..m).map(|i| a[i * m + i]).collect(), v)
}

/// Accelerated one-point evolution matrix at equilibrium: `d/dt E[eta(x) - rho] = (B E[eta - rho])_x`.
pub fn mean_matrix(n: usize, theta: f64) -> Vec<f64> {
    let m = n - 1;
    let n2 = (n * n) as f64;
    let mut a = vec![0.0; m * m];
    for i in 0..m {
        a[i * m + i] = -2.0 * n2;
        if i > 0 {
            a[i * m + i - 1] = n2;
        }
        if i + 1 < m {
            a[i * m + i + 1] = n2;
        }
    }
    let slow = n2 * (n as f64).powf(-theta);
    if m == 1 {
        a[0] = -2.0 * slow;
    } else {
        a[0] = -n2 - slow;
        a[m * m - 1] = -n2 - slow;
    }
    a
}

/// Spectral data of [`mean_matrix`].
pub struct MeanSpectrum {
    pub m: usize,
    pub w: Vec<f64>,
    pub v: Vec<f64>,
}

impl MeanSpectrum {
    pub fn new(n: usize, theta: f64) -> Self {
        let m = n - 1;
        let (w, v) = jacobi_eigen(mean_matrix(n, theta), m);
        Self { m, w, v }
    }

    /// `Cov(Y_0(f), Y_t(f))` under the stationary product measure.
    pub fn field_covariance(&self, f_sites: &[f64], chi: f64, t: f64) -> f64 {
        let n = (self.m + 1) as f64;
        let mut acc = 0.0;
        for k in 0..self.m {
            let proj: f64 = (0..self.m).map(|x| self.v[x * self.m + k] * f_sites[x]).sum();
            acc += proj * proj * (self.w[k] * t).exp();
        }
        chi / n * acc
    }

    /// `E[eta_t(x)]` for reservoir densities `alpha`, `beta` from the
    /// product initial profile `start`; the one-point functions close for
    /// exclusion, so this is exact. Site `x` at index `x - 1`.
    pub fn mean_profile(&self, n: usize, theta: f64, alpha: f64, beta: f64, start: &[f64], t: f64) -> Vec<f64> {
        let m = self.m;
        let slow = (n * n) as f64 * (n as f64).powf(-theta);
        let mut source = vec![0.0; m];
        source[0] += slow * alpha;
        source[m - 1] += slow * beta;
        // rho* = -B^{-1} s, then rho_t = rho* + V e^{wt} V^T (start - rho*)
        let coeff = |v: &[f64]| -> Vec<f64> { (0..m).map(|k| (0..m).map(|x| self.v[x * m + k] * v[x]).sum()).collect() };
        let cs = coeff(&source);
        let stationary: Vec<f64> = (0..m)
            .map(|x| -(0..m).map(|k| self.v[x * m + k] * cs[k] / self.w[k]).sum::<f64>())
            .collect();
        let dev: Vec<f64> = start.iter().zip(&stationary).map(|(a, b)| a - b).collect();
        let cd = coeff(&dev);
        (0..m)
            .map(|x| stationary[x] + (0..m).map(|k| self.v[x * m + k] * cd[k] * (self.w[k] * t).exp()).sum::<f64>())
            .collect()
    }

    /// `E[(int_0^t (eta_s(x) - rho) ds)^2]` for site `x` (1-based).
    pub fn integrated_second_moment(&self, site: usize, chi: f64, t: f64) -> f64 {
        let i = site - 1;
        (0..self.m)
            .map(|k| {
                let wt = self.w[k] * t;
                let g = if wt.abs() < 1e-8 {
                    t * t / 2.0
                } else {
                    (wt.exp() - 1.0 - wt) / (self.w[k] * self.w[k])
                };
                self.v[i * self.m + k].powi(2) * 2.0 * g
            })
            .sum::<f64>()
            * chi
    }
}

/// Eigenvalues of the second-order finite-difference Robin operator
/// (`psi'(0) = psi(0)`, `psi'(1) = -psi(1)`, ghost nodes) on `m` intervals,
/// smallest first, by Sturm bisection on the symmetrised tridiagonal matrix.
pub fn robin_fd_eigenvalues(m: usize, count: usize) -> Vec<f64> {
    let h = 1.0 / m as f64;
    let ih2 = 1.0 / (h * h);
    let size = m + 1;
    let mut d = vec![2.0 * ih2; size];
    let mut e = vec![-ih2; size - 1];
    d[0] = (2.0 + 2.0 * h) * ih2;
    d[m] = (2.0 + 2.0 * h) * ih2;
    e[0] = -(2.0f64).sqrt() * ih2;
    e[m - 1] = -(2.0f64).sqrt() * ih2;
    let below = |x: f64| {
        let mut q = d[0] - x;
        let mut c = usize::from(q < 0.0);
        for i in 1..size {
            let qq = if q == 0.0 { 1e-300 } else { q };
            q = d[i] - x - e[i - 1] * e[i - 1] / qq;
            if q < 0.0 {
                c += 1;
            }
        }
        c
    };
    let upper = 4.0 * ih2 + 4.0 * ih2;
    (0..count)
        .map(|k| {
            let (mut lo, mut hi) = (0.0, upper);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if below(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Composite Simpson rule on `[0, 1]` with `m` (even) intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, m: usize) -> f64 {
    let h = 1.0 / m as f64;
    let mut acc = f(0.0) + f(1.0);
    for j in 1..m {
        acc += if j % 2 == 1 { 4.0 } else { 2.0 } * f(j as f64 * h);
    }
    acc * h / 3.0
}
