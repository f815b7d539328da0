use slowsep::kmc::{
    empirical_density_profile, run_replicas, run_trajectory, BoundaryEvents, RunOptions, Selection,
};
use slowsep::lattice::{bernoulli_sample, Configuration, Parameters};
use slowsep::oracle::{build_generator, exact_evolution, StateDistribution};

fn marginal_check(n: usize, theta: f64, alpha: f64, beta: f64, t: f64, replicas: usize, selection: Selection) -> f64 {
    let p = Parameters::<f64>::new(n, theta, alpha, beta, 0.5).unwrap();
    let init = Configuration::from_index(n - 1, 0b1011 & ((1 << (n - 1)) - 1));
    let seed = 77 + n as u64;
    let finals = run_replicas(replicas, seed, |r, rng| {
        run_trajectory(&p, &init, t, &[t], &mut (), rng, RunOptions::default().selection(selection), (seed, r))
            .unwrap()
            .snapshots
            .pop()
            .unwrap()
    });
    let q = build_generator(&p).unwrap();
    let exact = exact_evolution(&q, &StateDistribution::point(&init), t).unwrap().marginals();
    (1..n)
        .map(|x| {
            let freq = finals.iter().filter(|c| c.get(x)).count() as f64 / replicas as f64;
            let sigma = (exact[x - 1] * (1.0 - exact[x - 1]) / replicas as f64).sqrt();
            (freq - exact[x - 1]).abs() / sigma
        })
        .fold(0.0, f64::max)
}

#[test]
fn grouped_engine_matches_exact_marginals() {
    for (n, theta) in [(3, 0.0), (5, 0.5), (8, 2.0)] {
        let z = marginal_check(n, theta, 0.3, 0.9, 0.1, 30_000, Selection::Grouped);
        assert!(z < 4.0, "n = {n}, theta = {theta}: max |z| = {z:.2}");
    }
}

#[test]
fn sum_tree_engine_matches_exact_marginals() {
    for (n, theta) in [(4, 1.0), (7, 0.0)] {
        let z = marginal_check(n, theta, 0.7, 0.2, 0.05, 30_000, Selection::SumTree);
        assert!(z < 4.0, "n = {n}, theta = {theta}: max |z| = {z:.2}");
    }
}

#[test]
fn identical_seeds_give_identical_records() {
    let p = Parameters::<f64>::new(30, 1.0, 0.2, 0.6, 0.5).unwrap();
    let run = |seed| {
        let mut rng = slowsep::kmc::replica_rng(seed, 4);
        let init = bernoulli_sample(&p, 0.4, &mut rng).unwrap();
        run_trajectory(&p, &init, 0.05, &[0.01, 0.05], &mut (), &mut rng, RunOptions::with_events(), (seed, 4)).unwrap()
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5).snapshots, run(6).snapshots);
}

#[test]
fn boundary_events_scale_with_accelerated_rate() {
    let (theta, rho, horizon) = (0.5, 0.5, 0.2);
    let counts: Vec<f64> = [50usize, 100, 200]
        .iter()
        .map(|&n| {
            let p = Parameters::<f64>::equilibrium(n, theta, rho).unwrap();
            let totals = run_replicas(20, 91 + n as u64, |r, rng| {
                let init = bernoulli_sample(&p, rho, rng).unwrap();
                let mut obs = (BoundaryEvents::default(),);
                let rec = run_trajectory(&p, &init, horizon, &[], &mut obs, rng, RunOptions::default(), (91, r)).unwrap();
                rec.observables["boundary_events"].iter().sum::<f64>()
            });
            let mean = totals.iter().sum::<f64>() / totals.len() as f64;
            // each side flips at n^2 n^-theta (rho (1 - eta) + (1 - rho) eta), mean 2 rho (1 - rho) n^{2 - theta}
            let expected = 4.0 * rho * (1.0 - rho) * (n as f64).powf(2.0 - theta) * horizon;
            assert!((mean / expected - 1.0).abs() < 0.2, "n = {n}: {mean} vs {expected}");
            mean
        })
        .collect();
    for w in counts.windows(2) {
        let ratio = w[1] / w[0];
        let want = 2f64.powf(2.0 - theta);
        assert!((ratio / want - 1.0).abs() < 0.2, "{ratio} vs {want}");
    }
}

#[test]
fn bernoulli_measure_is_invariant_under_the_dynamics() {
    let (n, rho, replicas) = (6, 0.3, 10_000);
    let p = Parameters::<f64>::equilibrium(n, 1.0, rho).unwrap();
    let records = run_replicas(replicas, 5, |r, rng| {
        let init = bernoulli_sample(&p, rho, rng).unwrap();
        run_trajectory(&p, &init, 0.5, &[0.5], &mut (), rng, RunOptions::default(), (5, r)).unwrap()
    });
    let est = empirical_density_profile(&records, 0.5).unwrap();
    let sigma = (rho * (1.0 - rho) / replicas as f64).sqrt();
    for m in est.mean {
        assert!((m - rho).abs() < 4.0 * sigma, "{m}");
    }
}

#[test]
fn deterministic_full_start() {
    let p = Parameters::<f64>::new(10, 1.0, 0.5, 0.5, 0.5).unwrap();
    let full = Configuration::full(9);
    let mut rng = slowsep::kmc::replica_rng(1, 0);
    let rec = run_trajectory(&p, &full, 0.1, &[0.0, 0.1], &mut (), &mut rng, RunOptions::default(), (1, 0)).unwrap();
    let est = empirical_density_profile(&[rec], 0.0).unwrap();
    assert!(est.mean.iter().all(|&m| m == 1.0));
    assert!(est.stderr.iter().all(|&s| s == 0.0));
}
