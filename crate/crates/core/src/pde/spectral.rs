//! Eigenbases of `-d_uu` on `[0, 1]` for the three boundary regimes and the
//! heat semigroup expanded in them.
//!
//! Robin modes solve `psi'(0) = psi(0)`, `psi'(1) = -psi(1)`. With
//! `psi = sin(k u) + k cos(k u)` the second condition becomes
//! `2 k cos k - (k^2 - 1) sin k = 0`; the root with index `j` lies in
//! `(j pi, (j + 1) pi)`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::lattice::Regime;
use crate::pde::test_function::{Shape, TestFunction};
use crate::scalar::Real;

const TRUNCATION: f64 = 1e-10;
const QUADRATURE_TOL: f64 = 1e-10;
const QUADRATURE_START: usize = 256;
const QUADRATURE_MAX: usize = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode<T> {
    /// Index in the usual labelling: Dirichlet from 1, Robin and Neumann from 0.
    pub index: usize,
    pub lambda: T,
    /// `sqrt(lambda)`.
    pub frequency: T,
    /// Factor giving unit `L^2` norm.
    pub normalizer: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis<T> {
    regime: Regime,
    modes: Vec<Mode<T>>,
}

/// `2 k cos k - (k^2 - 1) sin k`.
pub fn robin_condition<T: Real>(k: T) -> T {
    let (s, c) = k.sin_cos();
    T::lit(2.0) * k * c - (k * k - T::one()) * s
}

fn robin_normalizer<T: Real>(k: T) -> T {
    let two = T::lit(2.0);
    let s2 = (two * k).sin() / (T::lit(4.0) * k);
    let s = k.sin();
    let half = T::lit(0.5);
    (half - s2 + k * k * (half + s2) + s * s).sqrt().recip()
}

/// Root of [`robin_condition`] with index `j` by bisection.
pub fn robin_root<T: Real>(j: usize) -> Result<T> {
    let pi = T::PI();
    let mut lo = if j == 0 { T::lit(1e-3) } else { T::from_usize_lossy(j) * pi };
    let mut hi = T::from_usize_lossy(j + 1) * pi;
    let (mut glo, ghi) = (robin_condition(lo), robin_condition(hi));
    if glo * ghi > T::zero() {
        return Err(Error::Bracketing {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    // bisect down to adjacent floats
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = robin_condition(mid);
        if gm == T::zero() {
            return Ok(mid);
        }
        if gm * glo > T::zero() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}

/// First `k` eigenpairs of the regime.
pub fn eigenbasis<T: Real>(regime: Regime, k: usize) -> Result<SpectralBasis<T>> {
    if k == 0 {
        return Err(Error::InvalidDiscretisation("basis needs at least one mode".into()));
    }
    let pi = T::PI();
    let modes = match regime {
        Regime::Dirichlet | Regime::Neumann => {
            let first = usize::from(regime == Regime::Dirichlet);
            (first..first + k)
                .map(|j| {
                    let w = T::from_usize_lossy(j) * pi;
                    let normalizer = if j == 0 { T::one() } else { T::lit(2.0).sqrt() };
                    Mode {
                        index: j,
                        lambda: w * w,
                        frequency: w,
                        normalizer,
                    }
                })
                .collect()
        }
        Regime::Robin => (0..k)
            .map(|j| {
                let r: T = robin_root(j)?;
                Ok(Mode {
                    index: j,
                    lambda: r * r,
                    frequency: r,
                    normalizer: robin_normalizer(r),
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(SpectralBasis { regime, modes })
}

impl<T: Real> SpectralBasis<T> {
    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn modes(&self) -> &[Mode<T>] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.modes.iter().map(|m| m.lambda).collect()
    }

    /// Mode with the given index label.
    pub fn mode(&self, index: usize) -> Option<&Mode<T>> {
        self.modes.iter().find(|m| m.index == index)
    }

    /// Eigenfunction at position `pos` (not index label) as a test function.
    pub fn function(&self, pos: usize) -> TestFunction<T> {
        mode_function(self.regime, &self.modes[pos])
    }

    /// Eigenfunction with index label `index`.
    pub fn function_by_index(&self, index: usize) -> Option<TestFunction<T>> {
        self.mode(index).map(|m| mode_function(self.regime, m))
    }

    pub fn psi(&self, pos: usize, u: T) -> T {
        self.function(pos).eval(u)
    }

    /// Largest boundary-condition residual over all modes.
    pub fn boundary_residual(&self) -> T {
        (0..self.len())
            .map(|j| self.function(j).boundary_residual_in(self.regime))
            .fold(T::zero(), |m, v| m.max(v))
    }

    /// CSV with header `k,lambda,normalizer`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,lambda,normalizer")?;
        for m in &self.modes {
            writeln!(w, "{},{:e},{:e}", m.index, m.lambda, m.normalizer)?;
        }
        Ok(())
    }
}

fn mode_function<T: Real>(regime: Regime, m: &Mode<T>) -> TestFunction<T> {
    match regime {
        Regime::Dirichlet => TestFunction::sine(m.index as u32),
        Regime::Neumann => TestFunction::cosine(m.index as u32),
        Regime::Robin => TestFunction::new(
            Shape::Robin {
                root: m.frequency,
                norm: m.normalizer,
            },
            Regime::Robin,
        ),
    }
}

/// Truncated eigen-expansion `sum_k a_k exp(-lambda_k t) psi_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<T> {
    regime: Regime,
    modes: Vec<Mode<T>>,
    coeffs: Vec<T>,
    /// `L^2` distance between the input and its projection; only computed
    /// at `t = 0`.
    pub projection_error: Option<T>,
}

impl<T: Real> Projection<T> {
    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    pub fn modes(&self) -> &[Mode<T>] {
        &self.modes
    }

    pub fn eval(&self, u: T) -> T {
        self.modes
            .iter()
            .zip(&self.coeffs)
            .map(|(m, &a)| a * mode_function(self.regime, m).eval(u))
            .sum()
    }

    /// Values on `j/m`, `j = 0..=m`.
    pub fn sample_grid(&self, m: usize) -> Vec<T> {
        let mm = T::from_usize_lossy(m);
        let fs: Vec<TestFunction<T>> = self.modes.iter().map(|md| mode_function(self.regime, md)).collect();
        (0..=m)
            .map(|j| {
                let u = T::from_usize_lossy(j) / mm;
                fs.iter().zip(&self.coeffs).map(|(f, &a)| a * f.eval(u)).sum()
            })
            .collect()
    }

    pub fn l2_norm(&self) -> T {
        self.coeffs.iter().map(|&a| a * a).sum::<T>().sqrt()
    }

    /// `<self, g>` in `L^2[0,1]`, using orthonormality.
    pub fn inner(&self, other: &Projection<T>) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a * b)
            .sum()
    }
}

/// What the semigroup acts on.
#[derive(Debug, Clone, Copy)]
pub enum Source<'a, T> {
    Function(&'a TestFunction<T>),
    /// Values on a uniform grid over `[0, 1]` (at least two points).
    Grid(&'a [T]),
    Series(&'a Projection<T>),
}

fn trapezoid_product<T: Real, F: Fn(T) -> T, G: Fn(T) -> T>(f: &F, g: &G, m: usize) -> T {
    let mm = T::from_usize_lossy(m);
    let mut acc = T::zero();
    for j in 1..m {
        let u = T::from_usize_lossy(j) / mm;
        acc += f(u) * g(u);
    }
    acc += (f(T::zero()) * g(T::zero()) + f(T::one()) * g(T::one())) / T::lit(2.0);
    acc / mm
}

fn grid_interp<T: Real>(values: &[T], u: T) -> T {
    let m = values.len() - 1;
    let s = u * T::from_usize_lossy(m);
    let j = s.floor().to_usize().unwrap_or(0).min(m - 1);
    let w = s - T::from_usize_lossy(j);
    values[j] * (T::one() - w) + values[j + 1] * w
}

/// Coefficients `<f, psi_k>` by trapezoid refinement for analytic input or
/// a single trapezoid pass for grid input.
fn coefficients<T: Real>(regime: Regime, modes: &[Mode<T>], source: Source<'_, T>) -> Result<Vec<T>> {
    let fs: Vec<TestFunction<T>> = modes.iter().map(|m| mode_function(regime, m)).collect();
    match source {
        Source::Series(p) => {
            if p.regime != regime {
                return Err(Error::InvalidDiscretisation("series belongs to another regime".into()));
            }
            Ok(modes
                .iter()
                .map(|m| {
                    p.modes
                        .iter()
                        .position(|q| q.index == m.index)
                        .map_or(T::zero(), |i| p.coeffs[i])
                })
                .collect())
        }
        Source::Grid(v) => {
            if v.len() < 2 {
                return Err(Error::InvalidDiscretisation("grid profile needs two points".into()));
            }
            let m = v.len() - 1;
            let mm = T::from_usize_lossy(m);
            Ok(fs
                .iter()
                .map(|psi| {
                    let mut acc = T::zero();
                    for (j, &vj) in v.iter().enumerate() {
                        let w = if j == 0 || j == m { T::lit(0.5) } else { T::one() };
                        acc += w * vj * psi.eval(T::from_usize_lossy(j) / mm);
                    }
                    acc / mm
                })
                .collect())
        }
        Source::Function(f) => {
            let eval = |u: T| f.eval(u);
            let mut m = QUADRATURE_START;
            let mut prev: Vec<T> = fs.iter().map(|psi| trapezoid_product(&eval, &|u| psi.eval(u), m)).collect();
            loop {
                m *= 2;
                let next: Vec<T> = fs.iter().map(|psi| trapezoid_product(&eval, &|u| psi.eval(u), m)).collect();
                let change = prev
                    .iter()
                    .zip(&next)
                    .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()));
                prev = next;
                if change < T::lit(QUADRATURE_TOL).max(T::epsilon() * T::lit(64.0)) || m >= QUADRATURE_MAX {
                    return Ok(prev);
                }
            }
        }
    }
}

fn source_norm<T: Real>(source: Source<'_, T>) -> T {
    match source {
        Source::Series(p) => p.l2_norm(),
        Source::Grid(v) => {
            let sq: Vec<T> = v.iter().map(|&x| x * x).collect();
            crate::pde::heat::trapezoid(&sq).sqrt()
        }
        Source::Function(f) => {
            let e = |u: T| f.eval(u);
            trapezoid_product(&e, &e, 4096).sqrt()
        }
    }
}

/// `T_t f = sum_k <f, psi_k> exp(-lambda_k t) psi_k`.
///
/// For `t > 0` modes are kept while `exp(-lambda_k t) ||f|| >= 1e-10`, extending
/// the basis when it is too short. At `t = 0` the full basis is used and the
/// projection error is reported.
pub fn semigroup_apply<T: Real>(basis: &SpectralBasis<T>, source: Source<'_, T>, t: T) -> Result<Projection<T>> {
    if t < T::zero() {
        return Err(Error::NegativeTime(t.to_f64_lossy()));
    }
    let regime = basis.regime;
    let norm = source_norm(source);
    let modes: Vec<Mode<T>> = if t > T::zero() {
        let cut = if norm > T::zero() {
            (norm / T::lit(TRUNCATION)).ln().max(T::zero()) / t
        } else {
            T::zero()
        };
        let mut modes = basis.modes.clone();
        while modes.last().is_some_and(|m| m.lambda <= cut) {
            let extended = eigenbasis(regime, modes.len() * 2)?;
            modes = extended.modes;
        }
        let keep = modes.iter().position(|m| m.lambda > cut).unwrap_or(modes.len()).max(1);
        modes.truncate(keep);
        modes
    } else {
        basis.modes.clone()
    };
    let raw = coefficients(regime, &modes, source)?;
    let coeffs: Vec<T> = modes
        .iter()
        .zip(&raw)
        .map(|(m, &a)| a * (-m.lambda * t).exp())
        .collect();
    let mut out = Projection {
        regime,
        modes,
        coeffs,
        projection_error: None,
    };
    if t == T::zero() {
        let err = match source {
            Source::Series(_) => T::zero(),
            Source::Grid(v) => {
                let m = v.len() - 1;
                let approx = out.sample_grid(m);
                let sq: Vec<T> = v.iter().zip(&approx).map(|(a, b)| (*a - *b) * (*a - *b)).collect();
                crate::pde::heat::trapezoid(&sq).sqrt()
            }
            Source::Function(f) => {
                let d = |u: T| f.eval(u) - out.eval(u);
                trapezoid_product(&d, &d, 2048).sqrt()
            }
        };
        out.projection_error = Some(err);
    }
    Ok(out)
}

/// Convenience wrapper for grid data sampled by linear interpolation.
pub fn interpolate_grid<T: Real>(values: &[T], u: T) -> T {
    grid_interp(values, u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson<F: Fn(f64) -> f64>(f: F, m: usize) -> f64 {
        let h = 1.0 / m as f64;
        let mut acc = f(0.0) + f(1.0);
        for j in 1..m {
            acc += if j % 2 == 1 { 4.0 } else { 2.0 } * f(j as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn dirichlet_and_neumann_eigenvalues() {
        let d = eigenbasis::<f64>(Regime::Dirichlet, 3).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        for (l, w) in d.eigenvalues().iter().zip([pi2, 4.0 * pi2, 9.0 * pi2]) {
            assert!((l - w).abs() < 1e-12);
        }
        let n = eigenbasis::<f64>(Regime::Neumann, 2).unwrap();
        assert_eq!(n.modes()[0].lambda, 0.0);
        assert_eq!(n.psi(0, 0.37), 1.0);
        assert!(eigenbasis::<f64>(Regime::Robin, 0).is_err());
    }

    #[test]
    fn robin_roots_solve_the_condition() {
        let b = eigenbasis::<f64>(Regime::Robin, 12).unwrap();
        assert!((b.modes()[0].frequency - 1.306_54).abs() < 1e-5);
        for (j, m) in b.modes().iter().enumerate() {
            assert!(robin_condition(m.frequency).abs() < 1e-12 * (1.0 + m.lambda));
            assert!(m.frequency > j as f64 * std::f64::consts::PI);
        }
        assert!(b.boundary_residual() < 1e-10);
        let ratio = b.mode(10).unwrap().lambda / (100.0 * std::f64::consts::PI.powi(2));
        assert!((ratio - 1.0).abs() < 0.15);
    }

    #[test]
    fn orthonormal_in_every_regime() {
        for regime in [Regime::Dirichlet, Regime::Robin, Regime::Neumann] {
            let b = eigenbasis::<f64>(regime, 12).unwrap();
            for i in 0..b.len() {
                for j in 0..=i {
                    let (fi, fj) = (b.function(i), b.function(j));
                    let g = simpson(|u| fi.eval(u) * fj.eval(u), 1 << 14);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g - want).abs() < 1e-8, "{regime} ({i},{j}): {g}");
                }
            }
        }
    }

    #[test]
    fn single_mode_decays_exponentially() {
        let b = eigenbasis::<f64>(Regime::Robin, 6).unwrap();
        let f = b.function(2);
        let t = 0.03;
        let p = semigroup_apply(&b, Source::Function(&f), t).unwrap();
        let decay = (-b.modes()[2].lambda * t).exp();
        for u in [0.0, 0.2, 0.5, 0.9] {
            assert!((p.eval(u) - decay * f.eval(u)).abs() < 1e-9);
        }
    }

    #[test]
    fn semigroup_property() {
        let b = eigenbasis::<f64>(Regime::Dirichlet, 4).unwrap();
        let f = TestFunction::parabola();
        let whole = semigroup_apply(&b, Source::Function(&f), 0.05).unwrap();
        let first = semigroup_apply(&b, Source::Function(&f), 0.02).unwrap();
        let second = semigroup_apply(&b, Source::Series(&first), 0.03).unwrap();
        for u in [0.1, 0.4, 0.77] {
            assert!((whole.eval(u) - second.eval(u)).abs() < 1e-8);
        }
    }

    #[test]
    fn identity_at_time_zero_on_the_span() {
        let b = eigenbasis::<f64>(Regime::Neumann, 5).unwrap();
        let f = TestFunction::combination(vec![(0.3, b.function(0)), (-1.2, b.function(3))]);
        let p = semigroup_apply(&b, Source::Function(&f), 0.0).unwrap();
        assert!(p.projection_error.unwrap() < 1e-8);
        assert!((p.eval(0.31) - f.eval(0.31)).abs() < 1e-8);
        assert!(semigroup_apply(&b, Source::Function(&f), -1.0).is_err());
    }

    #[test]
    fn basis_csv() {
        let b = eigenbasis::<f64>(Regime::Dirichlet, 2).unwrap();
        let mut buf = Vec::new();
        b.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("k,lambda,normalizer"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn f32_roots() {
        let b = eigenbasis::<f32>(Regime::Robin, 3).unwrap();
        assert!((b.modes()[0].frequency - 1.30654).abs() < 1e-4);
    }
}
