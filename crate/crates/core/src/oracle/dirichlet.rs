//! Dirichlet forms, generator action and reversibility checks by enumeration.

use crate::error::{Error, Result};
use crate::lattice::{apply_event_in_place, bond_rate, BondEvent, Configuration, Parameters};
use crate::oracle::generator::StateDistribution;
use crate::scalar::Real;

fn image(eta: &Configuration, b: usize) -> usize {
    let mut c = eta.clone();
    apply_event_in_place(&mut c, BondEvent(b));
    c.index()
}

/// `(L f)(eta)` for every state, un-accelerated.
pub fn generator_action<T: Real>(p: &Parameters<T>, f: &[T]) -> Vec<T> {
    let sites = p.sites();
    (0..f.len())
        .map(|idx| {
            let eta = Configuration::from_index(sites, idx);
            (0..p.bonds())
                .map(|b| bond_rate(p, &eta, BondEvent(b)) * (f[image(&eta, b)] - f[idx]))
                .sum()
        })
        .collect()
}

/// `D_n(f, mu) = sum_x int r_{x,x+1}(eta) (f(sigma eta) - f(eta))^2 dmu`,
/// un-accelerated rates, reservoir bonds included.
pub fn dirichlet_form<T: Real>(f: &[T], mu: &StateDistribution<T>, p: &Parameters<T>) -> T {
    let sites = p.sites();
    mu.probs()
        .iter()
        .enumerate()
        .map(|(idx, &w)| {
            let eta = Configuration::from_index(sites, idx);
            let local: T = (0..p.bonds())
                .map(|b| {
                    let d = f[image(&eta, b)] - f[idx];
                    bond_rate(p, &eta, BondEvent(b)) * d * d
                })
                .sum();
            w * local
        })
        .sum()
}

/// `<-L f, f>_mu`.
pub fn dirichlet_inner<T: Real>(f: &[T], mu: &StateDistribution<T>, p: &Parameters<T>) -> T {
    let lf = generator_action(p, f);
    -mu.probs()
        .iter()
        .zip(lf.iter().zip(f))
        .map(|(&w, (&l, &v))| w * l * v)
        .sum::<T>()
}

/// `E_mu[ n^2 (L(F^2) - 2 F L F) ]`, the mean carre du champ of the
/// accelerated generator.
pub fn mean_carre_du_champ<T: Real>(f: &[T], mu: &StateDistribution<T>, p: &Parameters<T>) -> T {
    let sq: Vec<T> = f.iter().map(|&v| v * v).collect();
    let l_sq = generator_action(p, &sq);
    let l_f = generator_action(p, f);
    let cdc: Vec<T> = l_sq
        .iter()
        .zip(l_f.iter().zip(f))
        .map(|(&a, (&b, &v))| a - T::lit(2.0) * v * b)
        .collect();
    p.acceleration() * mu.expect(&cdc)
}

/// Largest `|r(eta) nu(eta) - r(sigma eta) nu(sigma eta)|` over states and bonds
/// under `nu_rho`. Only defined when `alpha = beta = rho`.
pub fn detailed_balance_check<T: Real>(p: &Parameters<T>) -> Result<T> {
    if !p.is_equilibrium() {
        return Err(Error::NotEquilibrium {
            alpha: p.alpha().to_f64_lossy(),
            beta: p.beta().to_f64_lossy(),
            rho: p.rho().to_f64_lossy(),
        });
    }
    Ok(detailed_balance_by_bond(p).into_iter().fold(T::zero(), T::max))
}

/// Worst detailed-balance residual per bond.
pub fn detailed_balance_by_bond<T: Real>(p: &Parameters<T>) -> Vec<T> {
    let sites = p.sites();
    let nu = StateDistribution::bernoulli(sites, p.rho());
    let mut worst = vec![T::zero(); p.bonds()];
    for idx in 0..nu.dim() {
        let eta = Configuration::from_index(sites, idx);
        for (b, w) in worst.iter_mut().enumerate() {
            let j = image(&eta, b);
            let other = Configuration::from_index(sites, j);
            let lhs = bond_rate(p, &eta, BondEvent(b)) * nu.probs()[idx];
            let rhs = bond_rate(p, &other, BondEvent(b)) * nu.probs()[j];
            *w = w.max((lhs - rhs).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::generator::build_generator;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_function_has_zero_energy() {
        let p = Parameters::<f64>::new(5, 0.5, 0.2, 0.7, 0.5).unwrap();
        let mu = StateDistribution::<f64>::bernoulli(4, 0.4);
        assert_eq!(dirichlet_form(&[2.5; 16], &mu, &p), 0.0);
    }

    #[test]
    fn two_state_boundary_integrals() {
        // f(eta) = eta(1) on one site: both reservoir bonds flip the site,
        // (f(flip) - f)^2 = 1, so D = E[r_left + r_right].
        let (rho, theta, n) = (0.3, 0.5, 2usize);
        let p = Parameters::<f64>::equilibrium(n, theta, rho).unwrap();
        let mu = StateDistribution::<f64>::bernoulli(1, rho);
        let s = (n as f64).powf(-theta);
        // empty: rate rho s each; occupied: (1-rho) s each
        let by_hand = (1.0 - rho) * 2.0 * rho * s + rho * 2.0 * (1.0 - rho) * s;
        let d = dirichlet_form(&[0.0, 1.0], &mu, &p);
        assert!((d - by_hand).abs() < 1e-15);
    }

    #[test]
    fn energy_identity_under_reversible_measure() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for theta in [0.0, 1.0, 2.0] {
            let p = Parameters::<f64>::equilibrium(7, theta, 0.3).unwrap();
            let nu = StateDistribution::<f64>::bernoulli(6, 0.3);
            for _ in 0..20 {
                let f: Vec<f64> = (0..64).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                let lhs = dirichlet_inner(&f, &nu, &p);
                let d = dirichlet_form(&f, &nu, &p);
                assert!((lhs - 0.5 * d).abs() < 1e-10 * (1.0 + d.abs()));
            }
        }
    }

    #[test]
    fn generator_action_matches_matrix() {
        let p = Parameters::<f64>::new(6, 0.5, 0.2, 0.7, 0.5).unwrap();
        let q = build_generator(&p).unwrap();
        let f: Vec<f64> = (0..32).map(|i| (i as f64 * 0.37).sin()).collect();
        let via_matrix = q.right_apply(&f);
        let direct = generator_action(&p, &f);
        for (a, b) in via_matrix.iter().zip(direct) {
            assert!((a - p.acceleration() * b).abs() < 1e-10);
        }
    }

    #[test]
    fn detailed_balance_holds_at_equilibrium() {
        let p = Parameters::<f64>::equilibrium(3, 0.0, 0.5).unwrap();
        assert!(detailed_balance_check(&p).unwrap() < 1e-12);
        let p = Parameters::<f64>::equilibrium(6, 1.0, 0.3).unwrap();
        let by_bond = detailed_balance_by_bond(&p);
        assert!(by_bond[1..5].iter().all(|&r| r == 0.0));
        assert!(by_bond.iter().all(|&r| r < 1e-12));
        let q = Parameters::<f64>::new(4, 0.0, 0.2, 0.6, 0.4).unwrap();
        assert!(detailed_balance_check(&q).is_err());
    }

    #[test]
    fn flip_ratio_of_bernoulli_weights() {
        let rho = 0.3;
        let nu = StateDistribution::<f64>::bernoulli(4, rho);
        for idx in 0..16usize {
            let flipped = idx ^ 1;
            let ratio = nu.probs()[flipped] / nu.probs()[idx];
            let want = if idx & 1 == 1 {
                (1.0 - rho) / rho
            } else {
                rho / (1.0 - rho)
            };
            assert!((ratio - want).abs() < 1e-12);
        }
    }
}
