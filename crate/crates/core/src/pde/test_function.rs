//! Regime-tagged smooth test functions on `[0, 1]`.

use std::fmt;

use crate::lattice::Regime;
use crate::scalar::Real;

/// Analytic shape of a test function.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape<T> {
    /// `sqrt(2) sin(k pi u)`.
    Sine(u32),
    /// `sqrt(2) cos(k pi u)`, or `1` for `k = 0`.
    Cosine(u32),
    /// `norm * (sin(root u) + root cos(root u))`.
    Robin { root: T, norm: T },
    /// `sum_j c_j u^j`.
    Polynomial(Vec<T>),
    /// `sum_i w_i g_i`.
    Combination(Vec<(T, Shape<T>)>),
}

impl<T: Real> Shape<T> {
    /// `d^order/du^order` at `u`, `order <= 2`.
    fn derivative(&self, order: u8, u: T) -> T {
        let two = T::lit(2.0);
        match self {
            Shape::Sine(k) | Shape::Cosine(k) => {
                let w = T::from_u32(*k).unwrap() * T::PI();
                let s2 = two.sqrt();
                let is_sine = matches!(self, Shape::Sine(_));
                if !is_sine && *k == 0 {
                    return if order == 0 { T::one() } else { T::zero() };
                }
                let (s, c) = (w * u).sin_cos();
                match (is_sine, order) {
                    (true, 0) => s2 * s,
                    (true, 1) => s2 * w * c,
                    (true, _) => -s2 * w * w * s,
                    (false, 0) => s2 * c,
                    (false, 1) => -s2 * w * s,
                    (false, _) => -s2 * w * w * c,
                }
            }
            Shape::Robin { root, norm } => {
                let (s, c) = (*root * u).sin_cos();
                let r = *root;
                *norm
                    * match order {
                        0 => s + r * c,
                        1 => r * c - r * r * s,
                        _ => -r * r * s - r * r * r * c,
                    }
            }
            Shape::Polynomial(c) => {
                let mut acc = T::zero();
                for (j, &cj) in c.iter().enumerate().rev() {
                    let j = j as u32;
                    let factor = match order {
                        0 => T::one(),
                        1 => T::from_u32(j).unwrap(),
                        _ => T::from_u32(j * j.saturating_sub(1)).unwrap(),
                    };
                    let power = j.saturating_sub(order as u32) as i32;
                    if factor != T::zero() {
                        acc += cj * factor * u.powi(power);
                    }
                }
                acc
            }
            Shape::Combination(parts) => parts
                .iter()
                .map(|(w, g)| *w * g.derivative(order, u))
                .sum(),
        }
    }
}

/// Smooth function on `[0, 1]` tagged with the boundary regime whose test
/// space it is meant to belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction<T> {
    shape: Shape<T>,
    regime: Regime,
}

impl<T: Real> TestFunction<T> {
    pub fn new(shape: Shape<T>, regime: Regime) -> Self {
        Self { shape, regime }
    }

    /// Dirichlet eigenfunction `sqrt(2) sin(k pi u)`.
    pub fn sine(k: u32) -> Self {
        Self::new(Shape::Sine(k), Regime::Dirichlet)
    }

    /// Neumann eigenfunction `sqrt(2) cos(k pi u)` (`1` for `k = 0`).
    pub fn cosine(k: u32) -> Self {
        Self::new(Shape::Cosine(k), Regime::Neumann)
    }

    pub fn robin(root: T, norm: T) -> Self {
        Self::new(Shape::Robin { root, norm }, Regime::Robin)
    }

    pub fn polynomial(coeffs: Vec<T>, regime: Regime) -> Self {
        Self::new(Shape::Polynomial(coeffs), regime)
    }

    pub fn constant(c: T, regime: Regime) -> Self {
        Self::polynomial(vec![c], regime)
    }

    /// `u (1 - u)`, a Dirichlet member that is not an eigenfunction.
    pub fn parabola() -> Self {
        Self::polynomial(vec![T::zero(), T::one(), -T::one()], Regime::Dirichlet)
    }

    /// `sum_i w_i f_i`; the regime is taken from the first term.
    pub fn combination(terms: Vec<(T, TestFunction<T>)>) -> Self {
        let regime = terms.first().map_or(Regime::Dirichlet, |(_, f)| f.regime);
        Self::new(
            Shape::Combination(terms.into_iter().map(|(w, f)| (w, f.shape)).collect()),
            regime,
        )
    }

    pub fn scaled(&self, c: T) -> Self {
        Self::new(Shape::Combination(vec![(c, self.shape.clone())]), self.regime)
    }

    pub fn shape(&self) -> &Shape<T> {
        &self.shape
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn eval(&self, u: T) -> T {
        self.shape.derivative(0, u)
    }

    pub fn d1(&self, u: T) -> T {
        self.shape.derivative(1, u)
    }

    pub fn d2(&self, u: T) -> T {
        self.shape.derivative(2, u)
    }

    /// Largest violation of the order-zero boundary conditions of `regime`:
    /// Dirichlet `f(0) = f(1) = 0`, Robin `f'(0) = f(0)`, `f'(1) = -f(1)`,
    /// Neumann `f'(0) = f'(1) = 0`.
    pub fn boundary_residual_in(&self, regime: Regime) -> T {
        let (z, o) = (T::zero(), T::one());
        match regime {
            Regime::Dirichlet => self.eval(z).abs().max(self.eval(o).abs()),
            Regime::Robin => (self.d1(z) - self.eval(z))
                .abs()
                .max((self.d1(o) + self.eval(o)).abs()),
            Regime::Neumann => self.d1(z).abs().max(self.d1(o).abs()),
        }
    }

    pub fn boundary_residual(&self) -> T {
        self.boundary_residual_in(self.regime)
    }

    /// `f(x/n)` for `x = 1..=n-1`.
    pub fn sample_sites(&self, n: usize) -> Vec<T> {
        let nn = T::from_usize_lossy(n);
        (1..n).map(|x| self.eval(T::from_usize_lossy(x) / nn)).collect()
    }

    /// `f` on the uniform grid `j/m`, `j = 0..=m`.
    pub fn sample_grid(&self, m: usize) -> Vec<T> {
        let mm = T::from_usize_lossy(m);
        (0..=m).map(|j| self.eval(T::from_usize_lossy(j) / mm)).collect()
    }
}

impl<T: Real> fmt::Display for Shape<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Sine(k) => write!(f, "sqrt2*sin({k}*pi*u)"),
            Shape::Cosine(0) => write!(f, "1"),
            Shape::Cosine(k) => write!(f, "sqrt2*cos({k}*pi*u)"),
            Shape::Robin { root, norm } => write!(f, "{norm}*(sin({root}*u)+{root}*cos({root}*u))"),
            Shape::Polynomial(c) => {
                let terms: Vec<String> = c.iter().enumerate().map(|(j, v)| format!("{v}*u^{j}")).collect();
                write!(f, "{}", terms.join("+"))
            }
            Shape::Combination(parts) => {
                let terms: Vec<String> = parts.iter().map(|(w, g)| format!("{w}*[{g}]")).collect();
                write!(f, "{}", terms.join("+"))
            }
        }
    }
}

impl<T: Real> fmt::Display for TestFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.shape, self.regime)
    }
}
