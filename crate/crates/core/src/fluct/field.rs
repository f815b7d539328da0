//! Equilibrium density fluctuation field, the drift term of its Dynkin
//! martingale and the predicted quadratic variation.

use crate::error::Result;
use crate::lattice::{check_len, BondEvent, BondKind, Configuration, Parameters};
use crate::pde::{discrete_operators, TestFunction};
use crate::scalar::Real;

/// `chi(rho) = rho (1 - rho)`.
pub fn compressibility<T: Real>(rho: T) -> T {
    rho * (T::one() - rho)
}

/// `(1/sqrt n) sum_x f(x/n) (eta(x) - rho)`.
pub fn fluctuation_field<T: Real>(eta: &Configuration, f: &TestFunction<T>, p: &Parameters<T>, rho: T) -> Result<T> {
    check_len(p, eta)?;
    let n = p.n();
    let nn = T::from_usize_lossy(n);
    let sum: T = (1..n)
        .map(|x| f.eval(T::from_usize_lossy(x) / nn) * (occ::<T>(eta, x) - rho))
        .sum();
    Ok(sum / nn.sqrt())
}

#[inline]
fn occ<T: Real>(eta: &Configuration, x: usize) -> T {
    if eta.get(x) {
        T::one()
    } else {
        T::zero()
    }
}

/// Drift of the fluctuation field: bulk discrete Laplacian, boundary
/// gradients and the reservoir terms with prefactor `n^(3/2 - theta)`.
pub fn gamma_term<T: Real>(eta: &Configuration, f: &TestFunction<T>, p: &Parameters<T>, rho: T) -> Result<T> {
    check_len(p, eta)?;
    let n = p.n();
    let nn = T::from_usize_lossy(n);
    let sq = nn.sqrt();
    let ops = discrete_operators(f, n);
    let left = occ::<T>(eta, 1) - rho;
    let right = occ::<T>(eta, n - 1) - rho;
    let bulk: T = (1..n).map(|x| ops.laplacian(x) * (occ::<T>(eta, x) - rho)).sum::<T>() / sq;
    let gradients = sq * ops.grad_plus(0) * left - sq * ops.grad_minus(n) * right;
    let reservoir = nn * sq * p.boundary_scale();
    let f_left = f.eval(T::one() / nn);
    let f_right = f.eval((nn - T::one()) / nn);
    Ok(bulk + gradients - reservoir * f_left * left - reservoir * f_right * right)
}

/// `2 chi t [ (1/n) sum_{x=1}^{n-2} (grad+ f(x/n))^2 + n^(1-theta) (f(1/n)^2 + f((n-1)/n)^2) ]`.
pub fn predicted_qv<T: Real>(f: &TestFunction<T>, p: &Parameters<T>, t: T, rho: T) -> T {
    let n = p.n();
    let nn = T::from_usize_lossy(n);
    let ops = discrete_operators(f, n);
    let bulk: T = (1..n.saturating_sub(1)).map(|x| ops.grad_plus(x).powi(2)).sum::<T>() / nn;
    let f_left = f.eval(T::one() / nn);
    let f_right = f.eval((nn - T::one()) / nn);
    let boundary = nn * p.boundary_scale() * (f_left * f_left + f_right * f_right);
    T::lit(2.0) * compressibility(rho) * t * (bulk + boundary)
}

/// Linear functional `sum_x w_x (eta(x) - rho)` with O(1) updates after a
/// single transition.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteWeights<T> {
    /// `weights[x - 1]` multiplies site `x`.
    pub weights: Vec<T>,
    pub rho: T,
}

impl<T: Real> SiteWeights<T> {
    /// Weights of the fluctuation field `Y(f)`.
    pub fn field(f: &TestFunction<T>, n: usize, rho: T) -> Self {
        let sq = T::from_usize_lossy(n).sqrt();
        Self {
            weights: f.sample_sites(n).into_iter().map(|v| v / sq).collect(),
            rho,
        }
    }

    /// Weights of the drift term, collected site by site.
    pub fn gamma(f: &TestFunction<T>, p: &Parameters<T>, rho: T) -> Self {
        let n = p.n();
        let nn = T::from_usize_lossy(n);
        let sq = nn.sqrt();
        let ops = discrete_operators(f, n);
        let mut weights: Vec<T> = (1..n).map(|x| ops.laplacian(x) / sq).collect();
        let reservoir = nn * sq * p.boundary_scale();
        weights[0] += sq * ops.grad_plus(0) - reservoir * f.eval(T::one() / nn);
        weights[n - 2] += -sq * ops.grad_minus(n) - reservoir * f.eval((nn - T::one()) / nn);
        Self { weights, rho }
    }

    pub fn eval(&self, eta: &Configuration) -> T {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, &w)| w * (occ::<T>(eta, i + 1) - self.rho))
            .sum()
    }

    /// Change of the functional caused by `bond`, given the configuration
    /// after the (non-trivial) transition.
    #[inline]
    pub fn delta(&self, bond: BondEvent, after: &Configuration) -> T {
        let n = after.len() + 1;
        match bond.kind(n) {
            BondKind::Flip(x) => {
                let s = if after.get(x) { T::one() } else { -T::one() };
                s * self.weights[x - 1]
            }
            BondKind::Swap(x) => {
                let s = if after.get(x) { T::one() } else { -T::one() };
                s * (self.weights[x - 1] - self.weights[x])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{apply_event, Regime};
    use crate::oracle::{build_generator, generator_action, mean_carre_du_champ, StateDistribution};
    use proptest::prelude::*;

    fn params(n: usize, theta: f64, rho: f64) -> Parameters<f64> {
        Parameters::equilibrium(n, theta, rho).unwrap()
    }

    #[test]
    fn field_by_hand() {
        let p = Parameters::<f64>::new(4, 0.0, 0.3, 0.7, 0.5).unwrap();
        let f = TestFunction::polynomial(vec![0.0, 1.0], Regime::Dirichlet);
        let eta = Configuration::from_bits(&[1, 0, 0]);
        let y = fluctuation_field(&eta, &f, &p, 0.5).unwrap();
        assert!((y + 0.25).abs() < 1e-15);
        let zero = TestFunction::constant(0.0, Regime::Dirichlet);
        assert_eq!(fluctuation_field(&eta, &zero, &p, 0.5).unwrap(), 0.0);
        assert!(fluctuation_field(&Configuration::empty(2), &f, &p, 0.5).is_err());
    }

    #[test]
    fn gamma_reduces_to_laplacian_field_for_dirichlet_at_theta_zero() {
        let p = params(9, 0.0, 0.4);
        let f = TestFunction::sine(2);
        let lap = discrete_operators(&f, 9);
        for idx in [0usize, 5, 77, 255] {
            let eta = Configuration::from_index(8, idx);
            let g = gamma_term(&eta, &f, &p, 0.4).unwrap();
            let direct: f64 = (1..9).map(|x| lap.laplacian(x) * (eta.occ(x) as f64 - 0.4)).sum::<f64>() / 3.0;
            assert!((g - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn gamma_for_constant_neumann_function() {
        let p = params(16, 2.0, 0.5);
        let f = TestFunction::constant(1.0, Regime::Neumann);
        let eta = Configuration::from_index(15, 0b100_0000_0000_0001);
        let g = gamma_term(&eta, &f, &p, 0.5).unwrap();
        let want = -(16f64).powf(1.5 - 2.0) * ((1.0 - 0.5) + (1.0 - 0.5));
        assert!((g - want).abs() < 1e-12);
        let full = Configuration::full(15);
        assert_eq!(gamma_term(&full, &f, &Parameters::equilibrium(16, 2.0, 0.999).unwrap(), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn gamma_is_the_accelerated_generator_of_the_field() {
        for (n, theta) in [(5, 0.0), (6, 0.5), (7, 1.0), (8, 2.0)] {
            let p = params(n, theta, 0.35);
            let f = TestFunction::robin(1.1, 0.8);
            let states = 1usize << (n - 1);
            let y: Vec<f64> = (0..states)
                .map(|i| fluctuation_field(&Configuration::from_index(n - 1, i), &f, &p, 0.35).unwrap())
                .collect();
            let ly = generator_action(&p, &y);
            let accel = (n * n) as f64;
            for (i, v) in ly.iter().enumerate() {
                let g = gamma_term(&Configuration::from_index(n - 1, i), &f, &p, 0.35).unwrap();
                assert!((accel * v - g).abs() < 1e-10, "n={n} state {i}");
            }
        }
    }

    #[test]
    fn predicted_qv_equals_exact_carre_du_champ() {
        for (n, theta) in [(4, 0.0), (6, 0.5), (7, 1.0), (8, 2.0)] {
            let rho = 0.3;
            let p = params(n, theta, rho);
            let f = TestFunction::cosine(1);
            let states = 1usize << (n - 1);
            let y: Vec<f64> = (0..states)
                .map(|i| fluctuation_field(&Configuration::from_index(n - 1, i), &f, &p, rho).unwrap())
                .collect();
            let nu = StateDistribution::bernoulli(n - 1, rho);
            let t = 0.7;
            let exact = t * mean_carre_du_champ(&y, &nu, &p);
            assert!((predicted_qv(&f, &p, t, rho) - exact).abs() < 1e-10, "n={n}");
        }
        let q = build_generator(&params(3, 0.0, 0.5)).unwrap();
        assert_eq!(q.dim(), 4);
    }

    #[test]
    fn predicted_qv_limit_for_dirichlet() {
        let f = TestFunction::sine(1);
        let n = 2000;
        let p = params(n, 0.0, 0.5);
        let qv = predicted_qv(&f, &p, 1.0, 0.5);
        let limit = 2.0 * 0.25 * std::f64::consts::PI.powi(2);
        assert!((qv - limit).abs() < 10.0 / n as f64);
        assert_eq!(predicted_qv(&TestFunction::constant(0.0, Regime::Dirichlet), &p, 1.0, 0.5), 0.0);
    }

    #[test]
    fn weights_agree_with_direct_formulas() {
        let p = params(12, 1.0, 0.6);
        let f = TestFunction::robin(1.306, 0.5);
        let yw = SiteWeights::field(&f, 12, 0.6);
        let gw = SiteWeights::gamma(&f, &p, 0.6);
        let mut eta = Configuration::from_index(11, 0b101_1001_0110);
        for bond in [0usize, 3, 11, 7, 0, 5] {
            let before = (yw.eval(&eta), gw.eval(&eta));
            assert!((before.0 - fluctuation_field(&eta, &f, &p, 0.6).unwrap()).abs() < 1e-12);
            assert!((before.1 - gamma_term(&eta, &f, &p, 0.6).unwrap()).abs() < 1e-10);
            let next = apply_event(&eta, BondEvent(bond)).unwrap();
            if next != eta {
                assert!((yw.eval(&next) - before.0 - yw.delta(BondEvent(bond), &next)).abs() < 1e-12);
                assert!((gw.eval(&next) - before.1 - gw.delta(BondEvent(bond), &next)).abs() < 1e-9);
            }
            eta = next;
        }
    }

    proptest! {
        #[test]
        fn field_is_linear(bits in proptest::collection::vec(0u8..2, 1..40), a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let n = bits.len() + 1;
            let p = params(n.max(2), 1.0, 0.5);
            let eta = Configuration::from_bits(&bits);
            let f = TestFunction::sine(1);
            let g = TestFunction::cosine(2);
            let h = TestFunction::combination(vec![(a, f.clone()), (b, g.clone())]);
            let lhs = fluctuation_field(&eta, &h, &p, 0.5).unwrap();
            let rhs = a * fluctuation_field(&eta, &f, &p, 0.5).unwrap() + b * fluctuation_field(&eta, &g, &p, 0.5).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
            prop_assert!(lhs.abs() <= (n as f64).sqrt() * (a.abs() * 2f64.sqrt() + b.abs() * 2f64.sqrt()) + 1e-12);
        }
    }
}
