//! Accelerated generator on the full state space, its stationary law and
//! exact time evolution by uniformization.

use std::io::Write;

use crate::error::{Error, Result};
use crate::lattice::{apply_event_in_place, bond_rate, BondEvent, Configuration, Parameters};
use crate::oracle::linalg::lu_solve;
use crate::scalar::Real;

/// Largest lattice scale the oracle will enumerate (`2^13` states).
pub const MAX_EXACT_N: usize = 14;

/// `n^2 L_n^theta` as a sparse row list. Identity transitions are omitted.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix<T> {
    params: Parameters<T>,
    rows: Vec<Vec<(usize, T)>>,
    exit: Vec<T>,
}

/// Probability vector over the `2^(n-1)` configurations, indexed by
/// [`Configuration::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution<T> {
    probs: Vec<T>,
}

impl<T: Real> StateDistribution<T> {
    /// Wraps a vector, checking nonnegativity and unit mass to `1e-12`
    /// (scaled by machine precision for narrow scalar types).
    pub fn new(probs: Vec<T>) -> Result<Self> {
        let tol = T::lit(1e-12).max(T::epsilon() * T::from_usize_lossy(probs.len()));
        let total: T = probs.iter().copied().sum();
        if probs.iter().any(|&p| p < -tol) || (total - T::one()).abs() > tol {
            return Err(Error::InvalidDiscretisation(format!(
                "not a probability vector (mass {total})"
            )));
        }
        Ok(Self { probs })
    }

    pub(crate) fn from_raw(probs: Vec<T>) -> Self {
        Self { probs }
    }

    /// Point mass at a configuration.
    pub fn point(eta: &Configuration) -> Self {
        let mut probs = vec![T::zero(); 1 << eta.len()];
        probs[eta.index()] = T::one();
        Self { probs }
    }

    /// Product Bernoulli measure `nu_rho` on `sites` sites.
    pub fn bernoulli(sites: usize, rho: T) -> Self {
        let dim = 1usize << sites;
        let probs = (0..dim)
            .map(|idx| {
                let ones = idx.count_ones() as i32;
                rho.powi(ones) * (T::one() - rho).powi(sites as i32 - ones)
            })
            .collect();
        Self { probs }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn sites(&self) -> usize {
        self.probs.len().trailing_zeros() as usize
    }

    /// `P(eta(x) = 1)` for `x = 1..=n-1`.
    pub fn marginals(&self) -> Vec<T> {
        let sites = self.sites();
        let mut m = vec![T::zero(); sites];
        for (idx, &p) in self.probs.iter().enumerate() {
            for (x, slot) in m.iter_mut().enumerate() {
                if idx >> x & 1 == 1 {
                    *slot += p;
                }
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.probs
            .iter()
            .zip(&other.probs)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    /// `E[f]` for `f` given on every state.
    pub fn expect(&self, f: &[T]) -> T {
        self.probs.iter().zip(f).map(|(&p, &v)| p * v).sum()
    }
}

/// Enumerates `n^2 L_n^theta`. Rejects `n > MAX_EXACT_N`.
pub fn build_generator<T: Real>(p: &Parameters<T>) -> Result<GeneratorMatrix<T>> {
    let n = p.n();
    if n > MAX_EXACT_N {
        return Err(Error::StateSpaceTooLarge { n, max: MAX_EXACT_N });
    }
    let sites = p.sites();
    let dim = 1usize << sites;
    let accel = p.acceleration();
    let mut rows = Vec::with_capacity(dim);
    let mut exit = Vec::with_capacity(dim);
    for idx in 0..dim {
        let eta = Configuration::from_index(sites, idx);
        let mut row: Vec<(usize, T)> = Vec::with_capacity(n);
        let mut out = T::zero();
        for b in 0..n {
            let mut image = eta.clone();
            if !apply_event_in_place(&mut image, BondEvent(b)) {
                continue;
            }
            let rate = accel * bond_rate(p, &eta, BondEvent(b));
            if rate == T::zero() {
                continue;
            }
            // n = 2: both reservoir bonds flip the same site.
            let j = image.index();
            match row.iter_mut().find(|(c, _)| *c == j) {
                Some(entry) => entry.1 += rate,
                None => row.push((j, rate)),
            }
            out += rate;
        }
        rows.push(row);
        exit.push(out);
    }
    Ok(GeneratorMatrix {
        params: *p,
        rows,
        exit,
    })
}

impl<T: Real> GeneratorMatrix<T> {
    pub fn params(&self) -> &Parameters<T> {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Off-diagonal entries of row `i`.
    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    /// Diagonal entry (minus the exit rate).
    pub fn diagonal(&self, i: usize) -> T {
        -self.exit[i]
    }

    pub fn max_exit_rate(&self) -> T {
        self.exit.iter().fold(T::zero(), |m, &v| m.max(v))
    }

    /// Largest absolute row sum.
    pub fn max_row_sum(&self) -> T {
        self.rows
            .iter()
            .zip(&self.exit)
            .map(|(row, &e)| (row.iter().map(|&(_, r)| r).sum::<T>() - e).abs())
            .fold(T::zero(), T::max)
    }

    /// Row vector times matrix: `mu Q`.
    pub fn left_apply(&self, mu: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); mu.len()];
        for (i, (row, &e)) in self.rows.iter().zip(&self.exit).enumerate() {
            let m = mu[i];
            if m == T::zero() {
                continue;
            }
            out[i] -= m * e;
            for &(j, r) in row {
                out[j] += m * r;
            }
        }
        out
    }

    /// Matrix times column vector: `(Q f)(eta)`.
    pub fn right_apply(&self, f: &[T]) -> Vec<T> {
        self.rows
            .iter()
            .zip(&self.exit)
            .enumerate()
            .map(|(i, (row, &e))| row.iter().map(|&(j, r)| r * f[j]).sum::<T>() - e * f[i])
            .collect()
    }

    /// `|| mu Q ||_inf`.
    pub fn stationarity_residual(&self, mu: &StateDistribution<T>) -> T {
        self.left_apply(mu.probs())
            .into_iter()
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> Vec<T> {
        let d = self.dim();
        let mut a = vec![T::zero(); d * d];
        for (i, row) in self.rows.iter().enumerate() {
            a[i * d + i] = -self.exit[i];
            for &(j, r) in row {
                a[i * d + j] += r;
            }
        }
        a
    }

    /// Sparse triplets `row col value`, diagonal included.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            let mut entries: Vec<(usize, T)> = row.clone();
            entries.push((i, -self.exit[i]));
            entries.sort_by_key(|&(j, _)| j);
            for (j, v) in entries {
                writeln!(w, "{i} {j} {v:e}")?;
            }
        }
        Ok(())
    }
}

/// Writes a distribution as triplets `0 j value`, skipping zeros.
pub fn write_distribution_triplets<T: Real, W: Write>(
    mu: &StateDistribution<T>,
    mut w: W,
) -> std::io::Result<()> {
    for (j, &v) in mu.probs().iter().enumerate() {
        if v != T::zero() {
            writeln!(w, "0 {j} {v:e}")?;
        }
    }
    Ok(())
}

/// Unique `pi` with `pi Q = 0`: LU on `Q^T` with the last equation replaced by
/// the normalisation.
pub fn stationary_distribution<T: Real>(q: &GeneratorMatrix<T>) -> Result<StateDistribution<T>> {
    let d = q.dim();
    let mut a = vec![T::zero(); d * d];
    for (i, row) in q.rows.iter().enumerate() {
        a[i * d + i] = -q.exit[i];
        for &(j, r) in row {
            // transpose: equation j gets coefficient of pi_i
            a[j * d + i] += r;
        }
    }
    for v in &mut a[(d - 1) * d..] {
        *v = T::one();
    }
    let mut b = vec![T::zero(); d];
    b[d - 1] = T::one();
    lu_solve(&mut a, d, &mut b)?;
    for v in &mut b {
        if *v < T::zero() {
            // round-off below zero on near-vanishing states
            *v = v.max(T::zero());
        }
    }
    let total: T = b.iter().copied().sum();
    for v in &mut b {
        *v /= total;
    }
    Ok(StateDistribution::from_raw(b))
}

/// `mu0 exp(tQ)` by uniformization. Time is split into slices with
/// `Lambda * dt <= 32` so the Poisson weights never underflow; each slice is
/// truncated once the remaining Poisson mass drops below `1e-15`.
pub fn exact_evolution<T: Real>(
    q: &GeneratorMatrix<T>,
    mu0: &StateDistribution<T>,
    t: T,
) -> Result<StateDistribution<T>> {
    if t < T::zero() {
        return Err(Error::NegativeTime(t.to_f64_lossy()));
    }
    let lambda = q.max_exit_rate();
    if t == T::zero() || lambda == T::zero() {
        return Ok(mu0.clone());
    }
    let budget = T::lit(32.0);
    let slices = (lambda * t / budget).ceil().to_usize().unwrap_or(1).max(1);
    let x = lambda * t / T::from_usize_lossy(slices);
    let tail_tol = T::lit(1e-15).max(T::epsilon());
    let mut mu = mu0.probs().to_vec();
    for _ in 0..slices {
        let mut weight = (-x).exp();
        let mut cumulative = weight;
        let mut term = mu.clone();
        let mut acc: Vec<T> = term.iter().map(|&v| v * weight).collect();
        let mut k = 0usize;
        while T::one() - cumulative > tail_tol && k < 10_000 {
            k += 1;
            // term <- term P, P = I + Q / lambda
            let qt = q.left_apply(&term);
            for (v, d) in term.iter_mut().zip(qt) {
                *v += d / lambda;
            }
            weight = weight * x / T::from_usize_lossy(k);
            cumulative += weight;
            for (a, &v) in acc.iter_mut().zip(&term) {
                *a += weight * v;
            }
        }
        let mass: T = acc.iter().copied().sum();
        mu = acc.into_iter().map(|v| (v / mass).max(T::zero())).collect();
    }
    Ok(StateDistribution::from_raw(mu))
}
