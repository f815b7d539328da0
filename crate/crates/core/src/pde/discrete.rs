//! Lattice difference operators applied to a test function.

use crate::pde::test_function::TestFunction;
use crate::scalar::Real;

/// `n^2 [f((x+1)/n) + f((x-1)/n) - 2 f(x/n)]` at `x = 1..=n-1` and the
/// one-sided gradients `n [f((x+1)/n) - f(x/n)]` at `x = 0..=n-1`,
/// `n [f(x/n) - f((x-1)/n)]` at `x = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperators<T> {
    pub n: usize,
    laplacian: Vec<T>,
    grad_plus: Vec<T>,
}

impl<T: Real> DiscreteOperators<T> {
    /// Laplacian at site `x` in `1..=n-1`.
    pub fn laplacian(&self, x: usize) -> T {
        self.laplacian[x - 1]
    }

    /// Forward gradient at `x` in `0..=n-1`.
    pub fn grad_plus(&self, x: usize) -> T {
        self.grad_plus[x]
    }

    /// Backward gradient at `x` in `1..=n`.
    pub fn grad_minus(&self, x: usize) -> T {
        self.grad_plus[x - 1]
    }

    pub fn laplacian_values(&self) -> &[T] {
        &self.laplacian
    }

    pub fn grad_plus_values(&self) -> &[T] {
        &self.grad_plus
    }
}

pub fn discrete_operators<T: Real>(f: &TestFunction<T>, n: usize) -> DiscreteOperators<T> {
    let nn = T::from_usize_lossy(n);
    let vals: Vec<T> = (0..=n).map(|x| f.eval(T::from_usize_lossy(x) / nn)).collect();
    let laplacian = (1..n)
        .map(|x| nn * nn * (vals[x + 1] + vals[x - 1] - T::lit(2.0) * vals[x]))
        .collect();
    let grad_plus = (0..n).map(|x| nn * (vals[x + 1] - vals[x])).collect();
    DiscreteOperators {
        n,
        laplacian,
        grad_plus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Regime;

    #[test]
    fn linear_functions() {
        let f = TestFunction::polynomial(vec![0.3, -1.7], Regime::Dirichlet);
        let ops = discrete_operators(&f, 25);
        assert!(ops.laplacian_values().iter().all(|v: &f64| v.abs() < 1e-10));
        assert!(ops.grad_plus_values().iter().all(|v| (v + 1.7).abs() < 1e-12));
        assert!((ops.grad_minus(25) + 1.7).abs() < 1e-12);
    }

    #[test]
    fn quadratic_has_constant_laplacian() {
        let f = TestFunction::polynomial(vec![0.0, 0.0, 1.0], Regime::Dirichlet);
        for n in [3, 10, 77] {
            let ops = discrete_operators(&f, n);
            assert!(ops.laplacian_values().iter().all(|v: &f64| (v - 2.0).abs() < 1e-9));
        }
    }

    #[test]
    fn second_order_consistency() {
        let f = TestFunction::<f64>::sine(1);
        let err = |n: usize| {
            let ops = discrete_operators(&f, n);
            (1..n)
                .map(|x| (ops.laplacian(x) - f.d2(x as f64 / n as f64)).abs())
                .fold(0.0, f64::max)
        };
        for n in [20, 40, 80] {
            let ratio = err(n) / err(2 * n);
            assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio} at n = {n}");
        }
    }
}
