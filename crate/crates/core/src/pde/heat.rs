//! Crank-Nicolson solver for `d_t rho = d_uu rho` on `[0, 1]`.
//!
//! Dirichlet pins `rho(t, 0) = alpha`, `rho(t, 1) = beta`. Robin
//! (`d_u rho(0) = rho(0) - alpha`, `d_u rho(1) = beta - rho(1)`) and Neumann
//! boundaries are eliminated through ghost nodes to second order. The first
//! two steps are replaced by four implicit Euler half steps to damp the
//! oscillations Crank-Nicolson leaves behind on rough initial data.

use std::io::Write;

use crate::error::{Error, Result};
use crate::lattice::Regime;
use crate::scalar::Real;

const STARTUP_STEPS: usize = 2;

/// Spatial resolution, nominal time step, horizon and optional output times.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatGrid<T> {
    pub m: usize,
    pub dt: T,
    pub horizon: T,
    /// Output times; `None` stores every step.
    pub save: Option<Vec<T>>,
}

impl<T: Real> HeatGrid<T> {
    pub fn new(m: usize, dt: T, horizon: T) -> Self {
        Self {
            m,
            dt,
            horizon,
            save: None,
        }
    }

    pub fn saving_at(mut self, times: &[T]) -> Self {
        self.save = Some(times.to_vec());
        self
    }

    fn checkpoints(&self) -> Result<Vec<T>> {
        if self.m < 2 {
            return Err(Error::InvalidDiscretisation(format!("need M >= 2, got {}", self.m)));
        }
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidDiscretisation(format!("time step {} must be positive", self.dt)));
        }
        if !(self.horizon >= T::zero()) || !self.horizon.is_finite() {
            return Err(Error::InvalidDiscretisation(format!("horizon {} must be nonnegative", self.horizon)));
        }
        match &self.save {
            Some(times) => {
                let mut prev = -T::one();
                for &t in times {
                    if !(t >= T::zero() && t <= self.horizon) || t <= prev {
                        return Err(Error::InvalidGrid(format!(
                            "output times must increase within [0, {}]",
                            self.horizon
                        )));
                    }
                    prev = t;
                }
                Ok(times.clone())
            }
            None => {
                let steps = (self.horizon / self.dt - T::lit(1e-9)).ceil().to_usize().unwrap_or(0);
                let mut v: Vec<T> = (0..steps).map(|k| T::from_usize_lossy(k) * self.dt).collect();
                v.push(self.horizon);
                Ok(v)
            }
        }
    }
}

/// Solution samples: `values[k][j]` approximates `rho(times[k], u[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField<T> {
    pub regime: Regime,
    pub u: Vec<T>,
    pub times: Vec<T>,
    pub values: Vec<Vec<T>>,
}

impl<T: Real> DensityField<T> {
    pub fn time_index(&self, t: T) -> Result<usize> {
        let tol = T::lit(1e-9) * t.abs().max(T::one());
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= tol)
            .ok_or(Error::MissingGridTime(t.to_f64_lossy()))
    }

    pub fn profile_at(&self, t: T) -> Result<&[T]> {
        Ok(&self.values[self.time_index(t)?])
    }

    /// Linear interpolation of row `k` at `u`.
    pub fn interpolate(&self, k: usize, u: T) -> T {
        let m = self.u.len() - 1;
        let s = (u.max(T::zero()).min(T::one())) * T::from_usize_lossy(m);
        let j = s.floor().to_usize().unwrap_or(0).min(m - 1);
        let w = s - T::from_usize_lossy(j);
        let row = &self.values[k];
        row[j] * (T::one() - w) + row[j + 1] * w
    }

    /// Trapezoid rule for `int_0^1 rho(times[k], u) du`.
    pub fn mass(&self, k: usize) -> T {
        trapezoid(&self.values[k])
    }

    pub fn min_max(&self) -> (T, T) {
        self.values.iter().flatten().fold(
            (T::infinity(), T::neg_infinity()),
            |(lo, hi), &v| (lo.min(v), hi.max(v)),
        )
    }

    /// CSV with header `t,u,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,u,value")?;
        for (t, row) in self.times.iter().zip(&self.values) {
            for (u, v) in self.u.iter().zip(row) {
                writeln!(w, "{t},{u},{v}")?;
            }
        }
        Ok(())
    }
}

/// Composite trapezoid on a uniform grid over `[0, 1]`.
pub fn trapezoid<T: Real>(v: &[T]) -> T {
    let m = v.len() - 1;
    let h = T::one() / T::from_usize_lossy(m);
    let inner: T = v[1..m].iter().copied().sum();
    h * (inner + (v[0] + v[m]) / T::lit(2.0))
}

/// Solves `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i` in place (`d` becomes `x`).
pub fn thomas<T: Real>(a: &[T], b: &[T], c: &[T], d: &mut [T]) -> Result<()> {
    let n = d.len();
    let mut cp = vec![T::zero(); n];
    let mut denom = b[0];
    if denom == T::zero() {
        return Err(Error::Singular { column: 0, pivot: 0.0 });
    }
    cp[0] = c[0] / denom;
    d[0] /= denom;
    for i in 1..n {
        denom = b[i] - a[i] * cp[i - 1];
        if denom == T::zero() {
            return Err(Error::Singular { column: i, pivot: 0.0 });
        }
        cp[i] = c[i] / denom;
        d[i] = (d[i] - a[i] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= cp[i] * next;
    }
    Ok(())
}

/// Discrete Laplacian on the unknown nodes as `(sub, diag, sup, source)`,
/// all already divided by `h^2`.
struct Operator<T> {
    lo: usize,
    sub: Vec<T>,
    diag: Vec<T>,
    sup: Vec<T>,
    source: Vec<T>,
}

impl<T: Real> Operator<T> {
    fn new(regime: Regime, m: usize, alpha: T, beta: T) -> Self {
        let h = T::one() / T::from_usize_lossy(m);
        let ih2 = T::one() / (h * h);
        let two = T::lit(2.0);
        let (lo, hi) = match regime {
            Regime::Dirichlet => (1, m - 1),
            _ => (0, m),
        };
        let k = hi - lo + 1;
        let mut sub = vec![ih2; k];
        let mut diag = vec![-two * ih2; k];
        let mut sup = vec![ih2; k];
        let mut source = vec![T::zero(); k];
        sub[0] = T::zero();
        sup[k - 1] = T::zero();
        match regime {
            Regime::Dirichlet => {
                source[0] += alpha * ih2;
                source[k - 1] += beta * ih2;
            }
            Regime::Robin | Regime::Neumann => {
                sup[0] = two * ih2;
                sub[k - 1] = two * ih2;
                if regime == Regime::Robin {
                    let r = two * h * ih2;
                    diag[0] -= r;
                    diag[k - 1] -= r;
                    source[0] += r * alpha;
                    source[k - 1] += r * beta;
                }
            }
        }
        Self {
            lo,
            sub,
            diag,
            sup,
            source,
        }
    }

    fn apply(&self, v: &[T], out: &mut [T]) {
        let k = v.len();
        for i in 0..k {
            let mut acc = self.diag[i] * v[i] + self.source[i];
            if i > 0 {
                acc += self.sub[i] * v[i - 1];
            }
            if i + 1 < k {
                acc += self.sup[i] * v[i + 1];
            }
            out[i] = acc;
        }
    }

    /// One step of the theta-scheme (`weight = 1/2` Crank-Nicolson,
    /// `weight = 1` implicit Euler).
    fn step(&self, v: &mut [T], dt: T, weight: T) -> Result<()> {
        let k = v.len();
        let mut rhs = vec![T::zero(); k];
        self.apply(v, &mut rhs);
        let explicit = T::one() - weight;
        for i in 0..k {
            // (I - w dt A) v' = v + dt [(1 - w) A v + w b] with rhs = A v + b
            rhs[i] = v[i] + dt * (explicit * rhs[i] + weight * self.source[i]);
        }
        let a: Vec<T> = self.sub.iter().map(|&s| -weight * dt * s).collect();
        let b: Vec<T> = self.diag.iter().map(|&d| T::one() - weight * dt * d).collect();
        let c: Vec<T> = self.sup.iter().map(|&s| -weight * dt * s).collect();
        thomas(&a, &b, &c, &mut rhs)?;
        v.copy_from_slice(&rhs);
        Ok(())
    }
}

pub fn solve_heat<T: Real, F: Fn(T) -> T>(
    regime: Regime,
    rho0: F,
    alpha: T,
    beta: T,
    grid: &HeatGrid<T>,
) -> Result<DensityField<T>> {
    let checkpoints = grid.checkpoints()?;
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(Error::DensityOutOfRange {
                name,
                value: v.to_f64_lossy(),
            });
        }
    }
    let m = grid.m;
    let mm = T::from_usize_lossy(m);
    let u: Vec<T> = (0..=m).map(|j| T::from_usize_lossy(j) / mm).collect();
    let mut full: Vec<T> = Vec::with_capacity(m + 1);
    for &x in &u {
        let v = rho0(x);
        if !(v >= T::zero() && v <= T::one()) {
            return Err(Error::ProfileOutOfRange {
                u: x.to_f64_lossy(),
                value: v.to_f64_lossy(),
            });
        }
        full.push(v);
    }
    let op = Operator::new(regime, m, alpha, beta);
    let (lo, k) = (op.lo, op.diag.len());
    let mut v: Vec<T> = full[lo..lo + k].to_vec();
    let assemble = |v: &[T]| -> Vec<T> {
        let mut row = full.clone();
        row[lo..lo + k].copy_from_slice(v);
        if regime == Regime::Dirichlet {
            row[0] = alpha;
            row[m] = beta;
        }
        row
    };

    let half = T::lit(0.5);
    let mut startup = STARTUP_STEPS;
    let mut t = T::zero();
    let mut times = Vec::with_capacity(checkpoints.len());
    let mut values = Vec::with_capacity(checkpoints.len());
    for &target in &checkpoints {
        let span = target - t;
        if span > T::zero() {
            let steps = (span / grid.dt - T::lit(1e-9)).ceil().max(T::one()).to_usize().unwrap_or(1);
            let dt = span / T::from_usize_lossy(steps);
            for _ in 0..steps {
                if startup > 0 {
                    op.step(&mut v, dt * half, T::one())?;
                    op.step(&mut v, dt * half, T::one())?;
                    startup -= 1;
                } else {
                    op.step(&mut v, dt, half)?;
                }
            }
        }
        t = target;
        times.push(target);
        values.push(if target == T::zero() { full.clone() } else { assemble(&v) });
    }
    Ok(DensityField {
        regime,
        u,
        times,
        values,
    })
}
