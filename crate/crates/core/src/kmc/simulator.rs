//! Event-driven simulation of the accelerated process `n^2 L_n^theta`.
//!
//! All user-facing times are macroscopic; rates are multiplied by `n^2`
//! internally. Bulk bonds whose two sites agree carry zero effective rate,
//! so every sampled event changes the configuration.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::kmc::observer::ObserverSet;
use crate::kmc::active_set::ActiveBonds;
use crate::kmc::rate_index::RateIndex;
use crate::lattice::{apply_event_in_place, check_len, reservoir_rate, BondEvent, Configuration, Parameters};

/// One applied transition in the event log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoggedEvent {
    pub time: f64,
    pub bond: u32,
}

/// Event-selection structure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Selection {
    /// Reservoir bonds plus a uniform pick among active bulk bonds, `O(1)`.
    #[default]
    Grouped,
    /// Sum tree over all bond rates, `O(log n)`.
    SumTree,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Keep the full event log (needed for exact time integrals).
    pub record_events: bool,
    pub selection: Selection,
}

impl RunOptions {
    pub fn with_events() -> Self {
        Self {
            record_events: true,
            ..Self::default()
        }
    }

    pub fn selection(mut self, selection: Selection) -> Self {
        self.selection = selection;
        self
    }
}

enum Selector {
    Grouped(ActiveBonds),
    Tree(RateIndex),
}

impl Selector {
    #[inline]
    fn total(&self) -> f64 {
        match self {
            Selector::Grouped(s) => s.total(),
            Selector::Tree(s) => s.total(),
        }
    }

    #[inline]
    fn find(&self, target: f64) -> Option<usize> {
        match self {
            Selector::Grouped(s) => s.find(target),
            Selector::Tree(s) => s.find(target),
        }
    }

    #[inline]
    fn update(&mut self, bond: usize, rate: f64) -> Result<()> {
        match self {
            Selector::Grouped(s) => s.update(bond, rate),
            Selector::Tree(s) => s.update(bond, rate),
        }
    }

    fn verify(&mut self) -> Result<()> {
        match self {
            Selector::Grouped(_) => Ok(()),
            Selector::Tree(s) => s.verify(),
        }
    }
}

/// Output of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub params: Parameters<f64>,
    pub horizon: f64,
    pub grid: Vec<f64>,
    /// `snapshots[k]` is the configuration at `grid[k]`.
    pub snapshots: Vec<Configuration>,
    pub observables: BTreeMap<String, Vec<f64>>,
    pub event_count: u64,
    pub seed: u64,
    pub replica: u64,
    pub initial: Configuration,
    pub events: Option<Vec<LoggedEvent>>,
}

impl TrajectoryRecord {
    pub fn grid_index(&self, t: f64) -> Result<usize> {
        self.grid
            .iter()
            .position(|&g| (g - t).abs() <= 1e-12 * t.abs().max(1.0))
            .ok_or(Error::MissingGridTime(t))
    }

    pub fn snapshot_at(&self, t: f64) -> Result<&Configuration> {
        Ok(&self.snapshots[self.grid_index(t)?])
    }

    pub fn events(&self) -> Result<&[LoggedEvent]> {
        self.events.as_deref().ok_or(Error::MissingEventLog)
    }

    /// Walks the path: `visit(t_from, t_to, eta)` for each maximal interval
    /// in `[0, until]` on which the configuration is constant.
    pub fn replay<F: FnMut(f64, f64, &Configuration)>(&self, until: f64, mut visit: F) -> Result<()> {
        let events = self.events()?;
        let mut eta = self.initial.clone();
        let mut t = 0.0;
        for e in events {
            if e.time > until {
                break;
            }
            visit(t, e.time, &eta);
            apply_event_in_place(&mut eta, BondEvent(e.bond as usize));
            t = e.time;
        }
        visit(t, until, &eta);
        Ok(())
    }

    /// `int_0^until eta_s(x) ds`, exact.
    pub fn occupation_integral(&self, site: usize, until: f64) -> Result<f64> {
        let mut acc = 0.0;
        self.replay(until, |a, b, eta| {
            if eta.get(site) {
                acc += b - a;
            }
        })?;
        Ok(acc)
    }
}

fn validate_grid(grid: &[f64], horizon: f64) -> Result<()> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidGrid(format!("horizon {horizon} must be positive")));
    }
    let mut prev = f64::NEG_INFINITY;
    for &g in grid {
        if !(g >= 0.0 && g <= horizon) {
            return Err(Error::InvalidGrid(format!("time {g} outside [0, {horizon}]")));
        }
        if g <= prev {
            return Err(Error::InvalidGrid("times must be strictly increasing".into()));
        }
        prev = g;
    }
    Ok(())
}

#[inline]
fn effective_rate(p: &Parameters<f64>, scale: f64, eta: &Configuration, bond: usize) -> f64 {
    let n = p.n();
    if bond == 0 {
        reservoir_rate(p.alpha(), scale, eta.get(1))
    } else if bond == n - 1 {
        reservoir_rate(p.beta(), scale, eta.get(n - 1))
    } else if eta.get(bond) != eta.get(bond + 1) {
        1.0
    } else {
        0.0
    }
}

/// Simulates one path on `[0, horizon]`.
///
/// `seed` and `replica` are only stored in the record; the randomness comes
/// from `rng`.
#[allow(clippy::too_many_arguments)]
pub fn run_trajectory<O: ObserverSet, R: Rng + ?Sized>(
    p: &Parameters<f64>,
    init: &Configuration,
    horizon: f64,
    grid: &[f64],
    observers: &mut O,
    rng: &mut R,
    options: RunOptions,
    (seed, replica): (u64, u64),
) -> Result<TrajectoryRecord> {
    check_len(p, init)?;
    validate_grid(grid, horizon)?;
    let n = p.n();
    let scale = p.boundary_scale();
    let accel = p.acceleration();
    let mut eta = init.clone();
    let rates: Vec<f64> = (0..n).map(|b| effective_rate(p, scale, &eta, b)).collect();
    let mut index = match options.selection {
        Selection::Grouped => Selector::Grouped(ActiveBonds::new(&rates)?),
        Selection::SumTree => Selector::Tree(RateIndex::new(&rates)),
    };
    let mut snapshots = Vec::with_capacity(grid.len());
    let mut events = options.record_events.then(Vec::new);
    let mut next_grid = 0;
    let mut t = 0.0;
    let mut count = 0u64;
    observers.start(&eta);

    loop {
        let total = index.total() * accel;
        let t_next = if total > 0.0 {
            t - (1.0 - rng.random::<f64>()).ln() / total
        } else {
            f64::INFINITY
        };
        while next_grid < grid.len() && grid[next_grid] < t_next {
            snapshots.push(eta.clone());
            observers.grid(grid[next_grid], &eta);
            next_grid += 1;
        }
        if t_next > horizon {
            break;
        }
        let bond = loop {
            if let Some(b) = index.find(rng.random::<f64>() * index.total()) {
                break b;
            }
        };
        apply_event_in_place(&mut eta, BondEvent(bond));
        // a swap leaves its own bond active and can only change the two
        // neighbouring bonds; a flip changes its own bond and one neighbour
        let (b1, b2) = if bond == 0 {
            (0, 1)
        } else if bond == n - 1 {
            (n - 2, n - 1)
        } else {
            (bond - 1, bond + 1)
        };
        index.update(b1, effective_rate(p, scale, &eta, b1))?;
        index.update(b2, effective_rate(p, scale, &eta, b2))?;
        t = t_next;
        count += 1;
        if let Some(log) = events.as_mut() {
            log.push(LoggedEvent {
                time: t,
                bond: bond as u32,
            });
        }
        observers.event(t, BondEvent(bond), &eta);
    }
    index.verify()?;
    let mut observables = BTreeMap::new();
    observers.finish(horizon, &eta, &mut observables);
    Ok(TrajectoryRecord {
        params: *p,
        horizon,
        grid: grid.to_vec(),
        snapshots,
        observables,
        event_count: count,
        seed,
        replica,
        initial: init.clone(),
        events,
    })
}
