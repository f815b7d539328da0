mod common;

use proptest::prelude::*;
use slowsep::fluct::{
    compressibility, covariance_jackknife, dynkin_martingale, fluctuation_field, predicted_qv,
    replacement_moment, MartingaleObserver, MartingalePath, OccupationIntegral,
};
use slowsep::kmc::{run_replicas, run_trajectory, RunOptions};
use slowsep::lattice::{bernoulli_sample, Configuration, Parameters};
use slowsep::oracle::{mean_carre_du_champ, StateDistribution};
use slowsep::pde::{discrete_operators, eigenbasis, TestFunction};
use slowsep::Regime;

use common::MeanSpectrum;

const RHO: f64 = 0.5;

fn paths(n: usize, theta: f64, f: &TestFunction<f64>, grid: &[f64], replicas: usize, seed: u64) -> Vec<MartingalePath> {
    let p = Parameters::<f64>::equilibrium(n, theta, RHO).unwrap();
    let horizon = *grid.last().unwrap();
    run_replicas(replicas, seed, |r, rng| {
        let init = bernoulli_sample(&p, RHO, rng).unwrap();
        let mut obs = (MartingaleObserver::new("m", f, &p, RHO),);
        let rec = run_trajectory(&p, &init, horizon, grid, &mut obs, rng, RunOptions::default(), (seed, r)).unwrap();
        MartingaleObserver::split(&rec.observables["m"]).unwrap()
    })
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let r = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / r;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (r - 1.0);
    (m, (v / r).sqrt())
}

#[test]
fn martingale_has_mean_zero_and_orthogonal_increments() {
    let grid = [0.0, 0.01, 0.02, 0.04];
    for theta in [0.5, 1.0, 2.0] {
        let basis = eigenbasis::<f64>(Regime::from_theta(theta), 3).unwrap();
        let f = basis.function_by_index(1).unwrap();
        let ps = paths(40, theta, &f, &grid, 4000, 17);
        for k in 1..grid.len() {
            let m: Vec<f64> = ps.iter().map(|p| p.martingale[k]).collect();
            let (mean, se) = mean_and_se(&m);
            assert!(mean.abs() < 4.0 * se, "theta = {theta}, k = {k}: {mean} +- {se}");
        }
        let inc = |a: usize, b: usize| -> Vec<f64> { ps.iter().map(|p| p.martingale[b] - p.martingale[a]).collect() };
        let cov = covariance_jackknife(&inc(1, 2), &inc(2, 3)).unwrap();
        assert!(cov.within(0.0, 4.0), "theta = {theta}: {cov:?}");
    }
}

#[test]
fn dirichlet_closure_at_fast_reservoirs() {
    // at theta = 0 and f(0) = f(1) = 0 the boundary terms of the drift cancel,
    // so the drift integral is the time integral of Y_s(Delta_n f)
    let n = 25;
    let p = Parameters::<f64>::equilibrium(n, 0.0, RHO).unwrap();
    let f = TestFunction::sine(2);
    let lap = discrete_operators(&f, n);
    let grid = [0.0, 0.003, 0.01];
    for seed in 0..5 {
        let mut rng = slowsep::kmc::replica_rng(seed, 0);
        let init = bernoulli_sample(&p, RHO, &mut rng).unwrap();
        let rec = run_trajectory(&p, &init, 0.01, &grid, &mut (), &mut rng, RunOptions::with_events(), (seed, 0)).unwrap();
        let path = dynkin_martingale(&rec, &f, RHO).unwrap();
        let y_lap = |eta: &Configuration| -> f64 {
            (1..n).map(|x| (eta.occ(x) as f64 - RHO) * lap.laplacian(x)).sum::<f64>() / (n as f64).sqrt()
        };
        for (k, &t) in grid.iter().enumerate() {
            let mut integral = 0.0;
            rec.replay(t, |a, b, eta| integral += (b - a) * y_lap(eta)).unwrap();
            let y0 = path.field[0];
            let closure = path.field[k] - y0 - integral;
            assert!((closure - path.martingale[k]).abs() < 1e-9 * (1.0 + integral.abs()), "{closure} vs {}", path.martingale[k]);
        }
    }
}

#[test]
fn covariance_matches_finite_lattice_exactly() {
    let n = 30;
    let chi = compressibility(RHO);
    let grid = [0.0, 0.01, 0.03];
    for theta in [0.5, 2.0] {
        let basis = eigenbasis::<f64>(Regime::from_theta(theta), 3).unwrap();
        let f = basis.function_by_index(1).unwrap();
        let ps = paths(n, theta, &f, &grid, 6000, 23);
        let spectrum = MeanSpectrum::new(n, theta);
        let sites = f.sample_sites(n);
        let y0: Vec<f64> = ps.iter().map(|p| p.field[0]).collect();
        for (k, &t) in grid.iter().enumerate() {
            let yt: Vec<f64> = ps.iter().map(|p| p.field[k]).collect();
            let cov = covariance_jackknife(&y0, &yt).unwrap();
            let exact = spectrum.field_covariance(&sites, chi, t);
            assert!(cov.within(exact, 4.0), "theta = {theta}, t = {t}: {cov:?} vs {exact}");
        }
    }
}

#[test]
fn replacement_moment_matches_exact_second_moment() {
    let n = 16;
    let t = 0.2;
    for (theta, site) in [(0.5, 1), (2.0, 15)] {
        let p = Parameters::<f64>::equilibrium(n, theta, RHO).unwrap();
        let records = run_replicas(3000, 31, |r, rng| {
            let init = bernoulli_sample(&p, RHO, rng).unwrap();
            let mut obs = (OccupationIntegral::new(site),);
            run_trajectory(&p, &init, t, &[t], &mut obs, rng, RunOptions::default(), (31, r)).unwrap()
        });
        let est = replacement_moment(&records, site, 1.0, t).unwrap();
        let exact = MeanSpectrum::new(n, theta).integrated_second_moment(site, compressibility(RHO), t);
        assert!(est.within(exact, 4.0), "theta = {theta}: {est:?} vs {exact}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn field_is_linear(
        bits in prop::collection::vec(0u8..2, 1..60),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        j in 1u32..6,
        k in 0u32..6,
    ) {
        let eta = Configuration::from_bits(&bits);
        let n = bits.len() + 1;
        let p = Parameters::<f64>::equilibrium(n, 1.0, RHO).unwrap();
        let f = TestFunction::sine(j);
        let g = TestFunction::cosine(k);
        let combined = TestFunction::combination(vec![(a, f.clone()), (b, g.clone())]);
        let lhs = fluctuation_field(&eta, &combined, &p, RHO).unwrap();
        let rhs = a * fluctuation_field(&eta, &f, &p, RHO).unwrap() + b * fluctuation_field(&eta, &g, &p, RHO).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn predicted_qv_is_the_enumerated_carre_du_champ(
        n in 2usize..9,
        theta in prop::sample::select(vec![0.0, 0.5, 1.0, 2.0]),
        rho in 0.1f64..0.9,
        t in 0.01f64..1.0,
        mode in 1usize..4,
    ) {
        let p = Parameters::<f64>::equilibrium(n, theta, rho).unwrap();
        let basis = eigenbasis::<f64>(Regime::from_theta(theta), 5).unwrap();
        let f = basis.function_by_index(mode).unwrap();
        let nu = StateDistribution::bernoulli(n - 1, rho);
        let y: Vec<f64> = (0..nu.dim())
            .map(|i| fluctuation_field(&Configuration::from_index(n - 1, i), &f, &p, rho).unwrap())
            .collect();
        let exact = t * mean_carre_du_champ(&y, &nu, &p);
        prop_assert!((predicted_qv(&f, &p, t, rho) - exact).abs() < 1e-10 * (1.0 + exact.abs()));
    }
}
