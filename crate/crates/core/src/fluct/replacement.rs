//! Second moment of time-integrated boundary occupations.

use crate::error::{Error, Result};
use crate::fluct::stats::{mean_estimate, Estimate};
use crate::kmc::{Observer, TrajectoryRecord};
use crate::lattice::{BondEvent, Configuration};

/// Name of the observable written by [`OccupationIntegral`] for `site`.
pub fn occupation_observable(site: usize) -> String {
    format!("occupation_integral_{site}")
}

/// `int_0^t eta_s(site) ds` at each grid time.
#[derive(Debug, Clone)]
pub struct OccupationIntegral {
    name: String,
    site: usize,
    occupied: bool,
    acc: f64,
    last: f64,
    series: Vec<f64>,
}

impl OccupationIntegral {
    pub fn new(site: usize) -> Self {
        Self {
            name: occupation_observable(site),
            site,
            occupied: false,
            acc: 0.0,
            last: 0.0,
            series: Vec::new(),
        }
    }
}

impl Observer for OccupationIntegral {
    fn name(&self) -> &str {
        &self.name
    }
    fn start(&mut self, eta: &Configuration) {
        self.occupied = eta.get(self.site);
        self.acc = 0.0;
        self.last = 0.0;
        self.series.clear();
    }
    #[inline]
    fn event(&mut self, t: f64, _bond: BondEvent, eta: &Configuration) {
        let now = eta.get(self.site);
        if now != self.occupied {
            if self.occupied {
                self.acc += t - self.last;
            }
            self.last = t;
            self.occupied = now;
        }
    }
    fn grid(&mut self, t: f64, _eta: &Configuration) {
        let extra = if self.occupied { t - self.last } else { 0.0 };
        self.series.push(self.acc + extra);
    }
    fn finish(&mut self, _t_end: f64, _eta: &Configuration) -> Vec<f64> {
        std::mem::take(&mut self.series)
    }
}

/// Estimates `E[(int_0^t c_n (eta_s(x) - rho) ds)^2]` for a boundary site
/// `x`. Uses the event log when present, otherwise the
/// [`OccupationIntegral`] observable at grid time `t`.
pub fn replacement_moment(records: &[TrajectoryRecord], site: usize, c_n: f64, t: f64) -> Result<Estimate> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    let n = first.params.n();
    if site != 1 && site != n - 1 {
        return Err(Error::NotBoundarySite { site, n });
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let rho = first.params.rho();
    let name = occupation_observable(site);
    let squares = records
        .iter()
        .map(|rec| {
            if rec.params != first.params {
                return Err(Error::MismatchedRecords);
            }
            let integral = if rec.events.is_some() {
                rec.occupation_integral(site, t)?
            } else if let Some(series) = rec.observables.get(&name) {
                series[rec.grid_index(t)?]
            } else {
                return Err(Error::MissingEventLog);
            };
            Ok((c_n * (integral - rho * t)).powi(2))
        })
        .collect::<Result<Vec<f64>>>()?;
    if squares.len() < 2 {
        let v = squares[0];
        return Ok(Estimate { value: v, stderr: f64::INFINITY });
    }
    mean_estimate(&squares)
}
