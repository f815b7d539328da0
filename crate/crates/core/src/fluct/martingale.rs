//! Dynkin martingale `M_t = Y_t - Y_0 - int_0^t Gamma_s ds` with the time
//! integral taken exactly over the piecewise-constant path.

use crate::error::{Error, Result};
use crate::fluct::field::SiteWeights;
use crate::kmc::{Observer, TrajectoryRecord};
use crate::lattice::{BondEvent, Configuration};
use crate::pde::TestFunction;

/// Field, drift integral and martingale at the grid times of one path.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MartingalePath {
    pub field: Vec<f64>,
    pub drift_integral: Vec<f64>,
    pub martingale: Vec<f64>,
}

/// Per-replica martingale paths on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleSeries {
    pub f: TestFunction<f64>,
    pub times: Vec<f64>,
    pub paths: Vec<MartingalePath>,
}

impl MartingaleSeries {
    /// `M` at grid index `k` across replicas.
    pub fn values_at(&self, k: usize) -> Vec<f64> {
        self.paths.iter().map(|p| p.martingale[k]).collect()
    }
}

/// Running state shared by the replay and the streaming observer.
#[derive(Debug, Clone)]
struct Tracker {
    y: SiteWeights<f64>,
    g: SiteWeights<f64>,
    y0: f64,
    y_now: f64,
    g_now: f64,
    integral: f64,
    last: f64,
    out: MartingalePath,
}

impl Tracker {
    fn new(f: &TestFunction<f64>, params: &crate::lattice::Parameters<f64>, rho: f64) -> Self {
        Self {
            y: SiteWeights::field(f, params.n(), rho),
            g: SiteWeights::gamma(f, params, rho),
            y0: 0.0,
            y_now: 0.0,
            g_now: 0.0,
            integral: 0.0,
            last: 0.0,
            out: MartingalePath::default(),
        }
    }

    fn start(&mut self, eta: &Configuration) {
        self.y0 = self.y.eval(eta);
        self.y_now = self.y0;
        self.g_now = self.g.eval(eta);
        self.integral = 0.0;
        self.last = 0.0;
    }

    #[inline]
    fn event(&mut self, t: f64, bond: BondEvent, after: &Configuration) {
        self.integral += self.g_now * (t - self.last);
        self.last = t;
        self.y_now += self.y.delta(bond, after);
        self.g_now += self.g.delta(bond, after);
    }

    fn record(&mut self, t: f64) {
        let integral = self.integral + self.g_now * (t - self.last);
        self.out.field.push(self.y_now);
        self.out.drift_integral.push(integral);
        self.out.martingale.push(self.y_now - self.y0 - integral);
    }
}

/// Martingale at the record's grid times, recomputed from its event log.
pub fn dynkin_martingale(record: &TrajectoryRecord, f: &TestFunction<f64>, rho: f64) -> Result<MartingalePath> {
    let events = record.events()?;
    let mut tr = Tracker::new(f, &record.params, rho);
    let mut eta = record.initial.clone();
    tr.start(&eta);
    let mut k = 0;
    for e in events {
        while k < record.grid.len() && record.grid[k] < e.time {
            tr.record(record.grid[k]);
            k += 1;
        }
        let bond = BondEvent(e.bond as usize);
        crate::lattice::apply_event_in_place(&mut eta, bond);
        tr.event(e.time, bond, &eta);
    }
    while k < record.grid.len() {
        tr.record(record.grid[k]);
        k += 1;
    }
    Ok(tr.out)
}

/// Streaming version of [`dynkin_martingale`]. The series it returns is the
/// concatenation `[Y; int Gamma; M]` over the grid; split it with
/// [`MartingaleObserver::split`].
#[derive(Debug, Clone)]
pub struct MartingaleObserver {
    name: String,
    tracker: Tracker,
}

impl MartingaleObserver {
    pub fn new(name: impl Into<String>, f: &TestFunction<f64>, params: &crate::lattice::Parameters<f64>, rho: f64) -> Self {
        Self {
            name: name.into(),
            tracker: Tracker::new(f, params, rho),
        }
    }

    pub fn split(series: &[f64]) -> Result<MartingalePath> {
        if series.len() % 3 != 0 {
            return Err(Error::Format(format!("martingale series of length {}", series.len())));
        }
        let k = series.len() / 3;
        Ok(MartingalePath {
            field: series[..k].to_vec(),
            drift_integral: series[k..2 * k].to_vec(),
            martingale: series[2 * k..].to_vec(),
        })
    }
}

impl Observer for MartingaleObserver {
    fn name(&self) -> &str {
        &self.name
    }
    fn start(&mut self, eta: &Configuration) {
        self.tracker.start(eta);
        self.tracker.out = MartingalePath::default();
    }
    #[inline]
    fn event(&mut self, t: f64, bond: BondEvent, eta: &Configuration) {
        self.tracker.event(t, bond, eta);
    }
    fn grid(&mut self, t: f64, _eta: &Configuration) {
        self.tracker.record(t);
    }
    fn finish(&mut self, _t_end: f64, _eta: &Configuration) -> Vec<f64> {
        let out = std::mem::take(&mut self.tracker.out);
        let mut v = out.field;
        v.extend(out.drift_integral);
        v.extend(out.martingale);
        v
    }
}

/// Fluctuation field at grid times only.
#[derive(Debug, Clone)]
pub struct FieldObserver {
    name: String,
    weights: SiteWeights<f64>,
    value: f64,
    series: Vec<f64>,
}

impl FieldObserver {
    pub fn new(name: impl Into<String>, f: &TestFunction<f64>, n: usize, rho: f64) -> Self {
        Self {
            name: name.into(),
            weights: SiteWeights::field(f, n, rho),
            value: 0.0,
            series: Vec::new(),
        }
    }
}

impl Observer for FieldObserver {
    fn name(&self) -> &str {
        &self.name
    }
    fn start(&mut self, eta: &Configuration) {
        self.value = self.weights.eval(eta);
        self.series.clear();
    }
    #[inline]
    fn event(&mut self, _t: f64, bond: BondEvent, eta: &Configuration) {
        self.value += self.weights.delta(bond, eta);
    }
    fn grid(&mut self, _t: f64, _eta: &Configuration) {
        self.series.push(self.value);
    }
    fn finish(&mut self, _t_end: f64, _eta: &Configuration) -> Vec<f64> {
        std::mem::take(&mut self.series)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluct::field::fluctuation_field;
    use crate::kmc::{replica_rng, run_trajectory, RunOptions};
    use crate::lattice::{bernoulli_sample, Parameters};

    #[test]
    fn replay_and_stream_agree() {
        let p = Parameters::equilibrium(20, 1.0, 0.5).unwrap();
        let f = TestFunction::robin(1.3065, 0.6);
        let grid = [0.0, 0.01, 0.03, 0.05];
        let mut rng = replica_rng(5, 2);
        let init = bernoulli_sample(&p, 0.5, &mut rng).unwrap();
        let mut obs = (MartingaleObserver::new("m", &f, &p, 0.5), FieldObserver::new("y", &f, 20, 0.5));
        let rec = run_trajectory(&p, &init, 0.05, &grid, &mut obs, &mut rng, RunOptions::with_events(), (5, 2)).unwrap();
        let replay = dynkin_martingale(&rec, &f, 0.5).unwrap();
        let stream = MartingaleObserver::split(&rec.observables["m"]).unwrap();
        assert_eq!(replay.martingale[0], 0.0);
        for k in 0..grid.len() {
            assert!((replay.martingale[k] - stream.martingale[k]).abs() < 1e-9);
            let y = fluctuation_field(&rec.snapshots[k], &f, &p, 0.5).unwrap();
            assert!((stream.field[k] - y).abs() < 1e-9);
            assert!((rec.observables["y"][k] - y).abs() < 1e-9);
        }
    }

    #[test]
    fn dirichlet_closure_at_theta_zero() {
        // For f in the Dirichlet space at theta = 0 the drift is Y(Delta_n f);
        // integrate it independently from the replayed path.
        let n = 15;
        let p = Parameters::equilibrium(n, 0.0, 0.3).unwrap();
        let f = TestFunction::sine(1);
        let ops = crate::pde::discrete_operators(&f, n);
        let lap: Vec<f64> = (1..n).map(|x| ops.laplacian(x)).collect();
        let mut rng = replica_rng(8, 0);
        let init = bernoulli_sample(&p, 0.3, &mut rng).unwrap();
        let rec = run_trajectory(&p, &init, 0.2, &[0.0, 0.2], &mut (), &mut rng, RunOptions::with_events(), (8, 0)).unwrap();
        let path = dynkin_martingale(&rec, &f, 0.3).unwrap();
        let mut integral = 0.0;
        rec.replay(0.2, |a, b, eta| {
            let yl: f64 = lap.iter().enumerate().map(|(i, w)| w * (eta.occ(i + 1) as f64 - 0.3)).sum::<f64>() / (n as f64).sqrt();
            integral += yl * (b - a);
        })
        .unwrap();
        let y0 = fluctuation_field(&rec.initial, &f, &p, 0.3).unwrap();
        let yt = fluctuation_field(&rec.snapshots[1], &f, &p, 0.3).unwrap();
        let scale = 1.0 + integral.abs();
        assert!((path.martingale[1] - (yt - y0 - integral)).abs() < 1e-10 * scale);
    }

    #[test]
    fn missing_log_is_an_error() {
        let p = Parameters::equilibrium(6, 1.0, 0.5).unwrap();
        let mut rng = replica_rng(1, 0);
        let rec = run_trajectory(&p, &Configuration::empty(5), 0.1, &[0.1], &mut (), &mut rng, RunOptions::default(), (1, 0)).unwrap();
        assert_eq!(dynkin_martingale(&rec, &TestFunction::sine(1), 0.5), Err(Error::MissingEventLog));
        assert!(MartingaleObserver::split(&[1.0, 2.0]).is_err());
    }
}
