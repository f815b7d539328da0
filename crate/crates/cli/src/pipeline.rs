//! Per-cell experiment pipelines.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use rand::Rng;
use slowsep::fluct::{
    compressibility, covariance_jackknife, fluctuation_field, initial_gaussianity, mean_estimate,
    predicted_qv, replacement_moment, weighted_slope, Estimate, MartingaleObserver, MartingalePath,
    OccupationIntegral,
};
use slowsep::kmc::{
    empirical_density_profile, replica_rng, run_replicas, run_trajectory, write_snapshots_binary,
    write_trajectory_csv, DensityEstimate, RunOptions, SiteTimeAverage, TrajectoryRecord,
};
use slowsep::lattice::{bernoulli_sample, Configuration};
use slowsep::oracle::{
    build_generator, closed_form_profile, detailed_balance_check, dirichlet_form, dirichlet_inner,
    exact_mean_profile, mean_carre_du_champ, stationary_distribution, write_distribution_triplets,
    StateDistribution,
};
use slowsep::pde::{eigenbasis, hydrostatic_profile, solve_heat, HeatGrid, TestFunction};
use slowsep::{Params, Regime};

use crate::config::{ExperimentConfig, ExperimentKind, TrajectoryFormat};
use crate::report::{CellReport, Statistic, SCHEMA_VERSION};

/// Refuse cells whose stored replica data would exceed this many bytes.
const MEMORY_BUDGET: f64 = 4.0 * (1u64 << 30) as f64;
const DIRICHLET_SAMPLES: usize = 20;
const BASIS_EXPORT_MODES: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum CellError {
    #[error(transparent)]
    Model(#[from] slowsep::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("resource exhaustion: {0}")]
    Resources(String),
    #[error("{0}")]
    Unsupported(String),
}

/// What a verb asks of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Monte Carlo plus whatever deterministic reference the kind needs.
    Full,
    /// Only the continuum solvers, no particles.
    PdeOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub n: Vec<usize>,
    pub theta: f64,
    pub seed: u64,
}

/// Expands the parameter grid. Replacement scaling sweeps `n` inside one
/// cell per exponent; every other kind has one cell per `(n, theta)`.
pub fn plan(cfg: &ExperimentConfig) -> Vec<Cell> {
    let pairs: Vec<(Vec<usize>, f64)> = if cfg.kind == ExperimentKind::ReplacementScaling {
        cfg.theta.iter().map(|&t| (cfg.n.clone(), t)).collect()
    } else {
        cfg.cells().into_iter().map(|(n, t)| (vec![n], t)).collect()
    };
    pairs
        .into_iter()
        .enumerate()
        .map(|(index, (n, theta))| Cell {
            index,
            n,
            theta,
            seed: replica_rng(cfg.seed, index as u64).random(),
        })
        .collect()
}

struct Outputs {
    statistics: Vec<Statistic>,
    series: Vec<String>,
}

impl Outputs {
    fn new() -> Self {
        Self {
            statistics: Vec::new(),
            series: Vec::new(),
        }
    }
}

/// Runs one cell; failures and panics end up in the report instead of
/// propagating.
pub fn run_cell(cfg: &ExperimentConfig, cell: &Cell, stage: Stage, dir: &Path) -> CellReport {
    let mut out = Outputs::new();
    let result = catch_unwind(AssertUnwindSafe(|| dispatch(cfg, cell, stage, dir, &mut out)));
    let error = match result {
        Ok(Ok(())) => None,
        Ok(Err(e)) => Some(e.to_string()),
        Err(panic) => Some(match panic.downcast_ref::<String>() {
            Some(s) => format!("panic: {s}"),
            None => match panic.downcast_ref::<&str>() {
                Some(s) => format!("panic: {s}"),
                None => "panic".to_string(),
            },
        }),
    };
    let replicas = match cfg.kind {
        ExperimentKind::ExactCheck => 0,
        _ if stage == Stage::PdeOnly => 0,
        _ => cfg.replicas,
    };
    CellReport {
        schema_version: SCHEMA_VERSION,
        kind: cfg.kind,
        cell: cell.index,
        n: cell.n.clone(),
        theta: cell.theta,
        alpha: cfg.alpha,
        beta: cfg.beta,
        rho: cfg.rho,
        seed: cell.seed,
        replicas,
        statistics: out.statistics,
        series: out.series,
        error,
        pass: false,
    }
    .finish()
}

fn dispatch(cfg: &ExperimentConfig, cell: &Cell, stage: Stage, dir: &Path, out: &mut Outputs) -> Result<(), CellError> {
    use ExperimentKind::*;
    match (cfg.kind, stage) {
        (ExactCheck, _) => exact_check(cfg, cell, dir, out),
        (Hydrodynamics, Stage::Full) => hydrodynamics(cfg, cell, dir, out),
        (Hydrostatics, Stage::Full) => hydrostatics(cfg, cell, dir, out),
        (Hydrodynamics | Hydrostatics, Stage::PdeOnly) => continuum(cfg, cell, dir, out),
        (QvCheck, Stage::Full) => quadratic_variation(cfg, cell, dir, out),
        (Gaussianity, Stage::Full) => gaussianity(cfg, cell, out),
        (OuCovariance, Stage::Full) => ou_covariance(cfg, cell, dir, out),
        (ReplacementScaling, Stage::Full) => replacement(cfg, cell, dir, out),
        (kind, Stage::PdeOnly) => Err(CellError::Unsupported(format!("{kind} has no continuum-only stage"))),
    }
}

fn single_n(cell: &Cell) -> usize {
    cell.n[0]
}

fn check_budget(bytes: f64) -> Result<(), CellError> {
    if bytes > MEMORY_BUDGET {
        return Err(CellError::Resources(format!(
            "replica data would need {:.1} GiB",
            bytes / (1u64 << 30) as f64
        )));
    }
    Ok(())
}

fn create(dir: &Path, name: &str, out: &mut Outputs) -> Result<BufWriter<File>, CellError> {
    fs::create_dir_all(dir)?;
    out.series.push(name.to_string());
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Normalised eigenfunction `mode` of the regime and its eigenvalue.
fn regime_mode(theta: f64, mode: usize) -> Result<(TestFunction<f64>, f64), CellError> {
    let basis = eigenbasis::<f64>(Regime::from_theta(theta), mode + 2)?;
    let missing = || CellError::Unsupported(format!("mode {mode} does not exist in this regime"));
    let f = basis.function_by_index(mode).ok_or_else(missing)?;
    let lambda = basis.mode(mode).ok_or_else(missing)?.lambda;
    Ok((f, lambda))
}

fn exact_check(cfg: &ExperimentConfig, cell: &Cell, dir: &Path, out: &mut Outputs) -> Result<(), CellError> {
    let n = single_n(cell);
    let tol = cfg.gates.exact;
    let eq = Params::equilibrium(n, cell.theta, cfg.rho)?;
    let q = build_generator(&eq)?;
    let nu = StateDistribution::bernoulli(n - 1, cfg.rho);
    out.statistics
        .push(Statistic::bounded("stationarity_residual", q.stationarity_residual(&nu), tol));
    out.statistics
        .push(Statistic::bounded("detailed_balance", detailed_balance_check(&eq)?, tol));

    let mut rng = replica_rng(cell.seed, 0);
    let mut worst = 0.0f64;
    for _ in 0..DIRICHLET_SAMPLES {
        let f: Vec<f64> = (0..nu.dim()).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let d = dirichlet_form(&f, &nu, &eq);
        let gap = (dirichlet_inner(&f, &nu, &eq) - 0.5 * d).abs() / (1.0 + d.abs());
        worst = worst.max(gap);
    }
    out.statistics.push(Statistic::bounded("dirichlet_form_identity", worst, tol));

    let (f, _) = regime_mode(cell.theta, cfg.mode)?;
    let y: Vec<f64> = (0..nu.dim())
        .map(|i| fluctuation_field(&Configuration::from_index(n - 1, i), &f, &eq, cfg.rho))
        .collect::<Result<_, _>>()?;
    let enumerated = cfg.horizon * mean_carre_du_champ(&y, &nu, &eq);
    let predicted = predicted_qv(&f, &eq, cfg.horizon, cfg.rho);
    out.statistics.push(Statistic::bounded(
        "quadratic_variation",
        (predicted - enumerated).abs(),
        tol * (1.0 + enumerated.abs()),
    ));

    let p = cfg.params(n, cell.theta)?;
    let qp = build_generator(&p)?;
    let exact = exact_mean_profile(&qp, &p)?;
    let gap = exact
        .iter()
        .zip(closed_form_profile(&p))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.statistics.push(Statistic::bounded("stationary_profile", gap, tol * 10.0));

    if cfg.dump_matrix {
        let name = format!("generator_cell{:03}.txt", cell.index);
        let mut w = create(dir, &name, out)?;
        qp.write_triplets(&mut w)?;
        w.flush()?;
        let name = format!("stationary_cell{:03}.txt", cell.index);
        let mut w = create(dir, &name, out)?;
        write_distribution_triplets(&stationary_distribution(&qp)?, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn export_trajectories(cfg: &ExperimentConfig, cell: &Cell, dir: &Path, records: &[TrajectoryRecord], out: &mut Outputs) -> Result<(), CellError> {
    let count = cfg.export_replicas.min(records.len());
    match cfg.trajectories {
        TrajectoryFormat::None => {}
        TrajectoryFormat::Csv => {
            let mut w = create(dir, &format!("trajectories_cell{:03}.csv", cell.index), out)?;
            write_trajectory_csv(&records[..count], &mut w)?;
            w.flush()?;
        }
        TrajectoryFormat::Binary => {
            let mut w = create(dir, &format!("trajectories_cell{:03}.bin", cell.index), out)?;
            write_snapshots_binary(&records[..count], &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn hydrodynamics(cfg: &ExperimentConfig, cell: &Cell, dir: &Path, out: &mut Outputs) -> Result<(), CellError> {
    let n = single_n(cell);
    check_budget(cfg.replicas as f64 * cfg.times.len() as f64 * (n as f64 / 8.0 + 32.0))?;
    let p = cfg.params(n, cell.theta)?;
    let rho0 = cfg.rho;
    let records: Vec<TrajectoryRecord> = run_replicas(cfg.replicas, cell.seed, |r, rng| {
        let init = bernoulli_sample(&p, rho0, rng)?;
        run_trajectory(&p, &init, cfg.horizon, &cfg.times, &mut (), rng, RunOptions::default(), (cell.seed, r))
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let grid = HeatGrid::new(cfg.m, cfg.dt, cfg.horizon).saving_at(&cfg.times);
    let field = solve_heat(p.regime(), |_| rho0, cfg.alpha, cfg.beta, &grid)?;

    let mut w = create(dir, &format!("profile_cell{:03}.csv", cell.index), out)?;
    writeln!(w, "t,site,u,mean,stderr,pde")?;
    for (k, &t) in cfg.times.iter().enumerate() {
        let est = empirical_density_profile(&records, t)?;
        let l1 = est.l1_distance(|u| field.interpolate(k, u));
        out.statistics.push(Statistic::bounded(format!("l1_t{t}"), l1, cfg.gates.l1));
        for (i, (m, s)) in est.mean.iter().zip(&est.stderr).enumerate() {
            let u = (i + 1) as f64 / n as f64;
            writeln!(w, "{t},{},{u},{m:e},{s:e},{:e}", i + 1, field.interpolate(k, u))?;
        }
    }
    w.flush()?;
    let mut w = create(dir, &format!("field_cell{:03}.csv", cell.index), out)?;
    field.write_csv(&mut w)?;
    w.flush()?;
    export_trajectories(cfg, cell, dir, &records, out)
}

fn hydrostatics(cfg: &ExperimentConfig, cell: &Cell, dir: &Path, out: &mut Outputs) -> Result<(), CellError> {
    let n = single_n(cell);
    check_budget(cfg.replicas as f64 * (n as f64 * 8.0 + cfg.times.len() as f64 * n as f64 / 8.0))?;
    let p = cfg.params(n, cell.theta)?;
    let start = (cfg.alpha + cfg.beta) / 2.0;
    let records: Vec<TrajectoryRecord> = run_replicas(cfg.replicas, cell.seed, |r, rng| {
        let init = bernoulli_sample(&p, start, rng)?;
        let mut obs = (SiteTimeAverage::new(cfg.burn_in, cfg.horizon),);
        run_trajectory(&p, &init, cfg.horizon, &cfg.times, &mut obs, rng, RunOptions::default(), (cell.seed, r))
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let est = DensityEstimate::from_samples(records.iter().map(|r| r.observables["site_time_average"].as_slice()))?;
    let bar = hydrostatic_profile(cell.theta, cfg.alpha, cfg.beta)?;
    out.statistics
        .push(Statistic::bounded("l1_hydrostatic", est.l1_distance(|u| bar.eval(u)), cfg.gates.l1));

    let closed = closed_form_profile(&p);
    let mut w = create(dir, &format!("profile_cell{:03}.csv", cell.index), out)?;
    writeln!(w, "site,u,mean,stderr,closed_form,limit")?;
    for (i, ((m, s), c)) in est.mean.iter().zip(&est.stderr).zip(&closed).enumerate() {
        let u = (i + 1) as f64 / n as f64;
        writeln!(w, "{},{u},{m:e},{s:e},{c:e},{:e}", i + 1, bar.eval(u))?;
    }
    w.flush()?;
    export_trajectories(cfg, cell, dir, &records, out)
}

fn continuum(cfg: &ExperimentConfig, cell: &Cell, dir: &Path, out: &mut Outputs) -> Result<(), CellError> {
    let regime = Regime::from_theta(cell.theta);
    let start = match cfg.kind {
        ExperimentKind::Hydrostatics => (cfg.alpha + cfg.beta) / 2.0,
        _ => cfg.rho,
    };
    let grid = HeatGrid::new(cfg.m, cfg.dt, cfg.horizon).saving_at(&cfg.times);
    let field = solve_heat(regime, |_| start, cfg.alpha, cfg.beta, &grid)?;
    let (lo, hi) = field.min_max();
    let floor = start.min(cfg.alpha).min(cfg.beta);
    let ceiling = start.max(cfg.alpha).max(cfg.beta);
    let violation = (floor - lo).max(hi - ceiling).max(0.0);
    out.statistics.push(Statistic::bounded("maximum_principle", violation, 1e-12));

    let basis = eigenbasis::<f64>(regime, BASIS_EXPORT_MODES)?;
    out.statistics
        .push(Statistic::bounded("basis_boundary_residual", basis.boundary_residual(), 1e-8));

    if cfg.kind == ExperimentKind::Hydrostatics {
        let bar = hydrostatic_profile(cell.theta, cfg.alpha, cfg.beta)?;
        let k = cfg.times.len() - 1;
        let m = 1000;
        let l1 = (0..m)
            .map(|j| {
                let u = (j as f64 + 0.5) / m as f64;
                (field.interpolate(k, u) - bar.eval(u)).abs()
            })
            .sum::<f64>()
            / m as f64;
        out.statistics
            .push(Statistic::bounded(format!("l1_hydrostatic_t{}", cfg.times[k]), l1, cfg.gates.l1));
    }

    let mut w = create(dir, &format!("field_cell{:03}.csv", cell.index), out)?;
    field.write_csv(&mut w)?;
    w.flush()?;
    let mut w = create(dir, &format!("basis_cell{:03}.csv", cell.index), out)?;
    basis.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn martingale_paths(cfg: &ExperimentConfig, cell: &Cell, f: &TestFunction<f64>) -> Result<(Params, Vec<MartingalePath>), CellError> {
    let n = single_n(cell);
    let p = Params::equilibrium(n, cell.theta, cfg.rho)?;
    let grid = path_times(cfg);
    let paths = run_replicas(cfg.replicas, cell.seed, |r, rng| {
        let init = bernoulli_sample(&p, cfg.rho, rng)?;
        let mut obs = (MartingaleObserver::new("m", f, &p, cfg.rho),);
        let rec = run_trajectory(&p, &init, cfg.horizon, &grid, &mut obs, rng, RunOptions::default(), (cell.seed, r))?;
        MartingaleObserver::split(&rec.observables["m"])
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    Ok((p, paths))
}

fn variance_estimate(xs: &[f64]) -> Estimate {
    let r = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / r;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / r;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / r;
    Estimate {
        value: if r > 1.0 { m2 * r / (r - 1.0) } else { 0.0 },
        stderr: ((m4 - m2 * m2).max(0.0) / r).sqrt(),
    }
}

/// Grid times of the martingale paths, which always start at zero.
fn path_times(cfg: &ExperimentConfig) -> Vec<f64> {
    let mut grid = cfg.times.clone();
    if grid.first() != Some(&0.0) {
        grid.insert(0, 0.0);
    }
    grid
}

fn quadratic_variation(cfg: &ExperimentConfig, cell: &Cell, dir: &Path, out: &mut Outputs) -> Result<(), CellError> {
    let (f, _) = regime_mode(cell.theta, cfg.mode)?;
    let (p, paths) = martingale_paths(cfg, cell, &f)?;
    let mut w = create(dir, &format!("qv_cell{:03}.csv", cell.index), out)?;
    writeln!(w, "t,mean,mean_stderr,variance,variance_stderr,predicted")?;
    for (k, &t) in path_times(cfg).iter().enumerate().skip(1) {
        let m: Vec<f64> = paths.iter().map(|path| path.martingale[k]).collect();
        let mean = mean_estimate(&m)?;
        let var = variance_estimate(&m);
        let theory = predicted_qv(&f, &p, t, cfg.rho);
        out.statistics
            .push(Statistic::banded(format!("martingale_mean_t{t}"), mean.value, mean.stderr, 0.0, cfg.gates.sigmas));
        out.statistics
            .push(Statistic::banded(format!("martingale_variance_t{t}"), var.value, var.stderr, theory, cfg.gates.sigmas));
        writeln!(w, "{t},{:e},{:e},{:e},{:e},{theory:e}", mean.value, mean.stderr, var.value, var.stderr)?;
    }
    w.flush()?;
    Ok(())
}

fn gaussianity(cfg: &ExperimentConfig, cell: &Cell, out: &mut Outputs) -> Result<(), CellError> {
    let n = single_n(cell);
    let p = Params::equilibrium(n, cell.theta, cfg.rho)?;
    let (f, _) = regime_mode(cell.theta, cfg.mode)?;
    let samples: Vec<f64> = run_replicas(cfg.replicas, cell.seed, |_, rng| {
        let eta = bernoulli_sample(&p, cfg.rho, rng)?;
        fluctuation_field(&eta, &f, &p, cfg.rho)
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let rep = initial_gaussianity(&samples, &f, n, cfg.rho)?;
    let sigmas = cfg.gates.sigmas;
    out.statistics
        .push(Statistic::banded("mean", rep.mean.value, rep.mean.stderr, 0.0, sigmas));
    out.statistics.push(Statistic::banded(
        "variance",
        rep.variance.value,
        rep.variance.stderr,
        rep.lattice_variance,
        sigmas,
    ));
    out.statistics
        .push(Statistic::bounded("abs_skewness", rep.skewness.abs(), cfg.gates.skewness));
    for c in &rep.characteristic {
        out.statistics.push(Statistic::banded(
            format!("char_real_{}", c.lambda),
            c.real.value,
            c.real.stderr,
            c.theory,
            sigmas,
        ));
        out.statistics.push(Statistic::banded(
            format!("char_imag_{}", c.lambda),
            c.imag.value,
            c.imag.stderr,
            0.0,
            sigmas,
        ));
    }
    Ok(())
}

fn ou_covariance(cfg: &ExperimentConfig, cell: &Cell, dir: &Path, out: &mut Outputs) -> Result<(), CellError> {
    let (f, lambda) = regime_mode(cell.theta, cfg.mode)?;
    let (_, paths) = martingale_paths(cfg, cell, &f)?;
    let chi = compressibility(cfg.rho);
    let y0: Vec<f64> = paths.iter().map(|p| p.field[0]).collect();
    let mut w = create(dir, &format!("covariance_cell{:03}.csv", cell.index), out)?;
    writeln!(w, "t,covariance,stderr,theory")?;
    for (k, &t) in path_times(cfg).iter().enumerate().skip(1) {
        let yt: Vec<f64> = paths.iter().map(|p| p.field[k]).collect();
        let cov = covariance_jackknife(&y0, &yt)?;
        let theory = chi * (-lambda * t).exp();
        out.statistics
            .push(Statistic::banded(format!("covariance_t{t}"), cov.value, cov.stderr, theory, cfg.gates.sigmas));
        writeln!(w, "{t},{:e},{:e},{theory:e}", cov.value, cov.stderr)?;
    }
    w.flush()?;
    Ok(())
}

fn replacement(cfg: &ExperimentConfig, cell: &Cell, dir: &Path, out: &mut Outputs) -> Result<(), CellError> {
    let theta = cell.theta;
    if theta == 1.0 {
        return Err(CellError::Unsupported("replacement scaling is defined for theta != 1".into()));
    }
    let t = cfg.horizon;
    let mut w = create(dir, &format!("replacement_cell{:03}.csv", cell.index), out)?;
    writeln!(w, "n,site,scale,moment,stderr")?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (j, &n) in cell.n.iter().enumerate() {
        let p = Params::equilibrium(n, theta, cfg.rho)?;
        let site = cfg.boundary.site(n);
        let c_n = if theta < 1.0 { (n as f64).sqrt() } else { (n as f64).powf(1.5 - theta) };
        let seed = replica_rng(cell.seed, j as u64).random::<u64>();
        let records: Vec<TrajectoryRecord> = run_replicas(cfg.replicas, seed, |r, rng| {
            let init = bernoulli_sample(&p, cfg.rho, rng)?;
            let mut obs = (OccupationIntegral::new(site),);
            run_trajectory(&p, &init, t, &[t], &mut obs, rng, RunOptions::default(), (seed, r))
        })
        .into_iter()
        .collect::<Result<_, _>>()?;
        let est = replacement_moment(&records, site, c_n, t)?;
        writeln!(w, "{n},{site},{c_n:e},{:e},{:e}", est.value, est.stderr)?;
        if !(est.value > 0.0) {
            return Err(CellError::Unsupported(format!("zero replacement moment at n = {n}")));
        }
        x.push((n as f64).ln());
        y.push(Estimate {
            value: est.value.ln(),
            stderr: est.stderr / est.value,
        });
    }
    w.flush()?;
    let slope = weighted_slope(&x, &y)?;
    let envelope = -(theta - 1.0).abs();
    out.statistics.push(Statistic::upper(
        "log_log_slope",
        slope.value,
        slope.stderr,
        envelope,
        envelope + cfg.gates.slope,
    ));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn cfg(text: &str) -> ExperimentConfig {
        parse_config(text).unwrap()
    }

    #[test]
    fn plan_is_deterministic_and_grouped() {
        let c = cfg("[experiment]\nkind = \"replacement-scaling\"\nseed = 5\n[model]\nn = [16, 32]\ntheta = [0.5, 2.0]\n");
        let cells = plan(&c);
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].n, vec![16, 32]);
        assert_eq!(cells, plan(&c));
        assert_ne!(cells[0].seed, cells[1].seed);
        let c = cfg("[experiment]\nkind = \"exact-check\"\n[model]\nn = [4, 5]\ntheta = [0, 1, 2]\n");
        let cells = plan(&c);
        assert_eq!(cells.len(), 6);
        assert_eq!((cells[4].n[0], cells[4].theta), (5, 1.0));
    }

    #[test]
    fn exact_cell_passes() {
        let dir = std::env::temp_dir().join("slowsep_exact_cell_test");
        let c = cfg("[experiment]\nkind = \"exact-check\"\n[model]\nn = 5\ntheta = 1\nalpha = 0.2\nbeta = 0.7\n[output]\ndump_matrix = true\n");
        let cell = &plan(&c)[0];
        let rep = run_cell(&c, cell, Stage::Full, &dir);
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.statistics.len(), 5);
        assert_eq!(rep.series.len(), 2);
        let q = fs::read_to_string(dir.join(&rep.series[0])).unwrap();
        assert!(q.lines().all(|l| l.split_whitespace().count() == 3));
    }

    #[test]
    fn failures_stay_inside_the_cell() {
        let c = cfg("[experiment]\nkind = \"qv-check\"\n[model]\nn = 20\ntheta = 0.5\n[run]\nreplicas = 10\nmode = 0\n");
        let rep = run_cell(&c, &plan(&c)[0], Stage::Full, &std::env::temp_dir());
        assert!(!rep.pass);
        assert!(rep.error.is_some());
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(check_budget(1e12), Err(CellError::Resources(_))));
        assert!(check_budget(1e6).is_ok());
    }
}
