//! Pluggable trajectory observers.
//!
//! The simulator calls [`Observer::event`] after every applied transition
//! with the updated configuration, [`Observer::grid`] at each snapshot time,
//! and [`Observer::finish`] at the horizon. Each observer returns one named
//! series that ends up in the trajectory record.

use std::collections::BTreeMap;

use crate::lattice::{BondEvent, BondKind, Configuration};

pub trait Observer {
    fn name(&self) -> &str;
    fn start(&mut self, _eta: &Configuration) {}
    fn event(&mut self, t: f64, bond: BondEvent, eta: &Configuration);
    fn grid(&mut self, _t: f64, _eta: &Configuration) {}
    fn finish(&mut self, t_end: f64, eta: &Configuration) -> Vec<f64>;
}

/// A collection of observers driven together.
pub trait ObserverSet {
    fn start(&mut self, eta: &Configuration);
    fn event(&mut self, t: f64, bond: BondEvent, eta: &Configuration);
    fn grid(&mut self, t: f64, eta: &Configuration);
    fn finish(&mut self, t_end: f64, eta: &Configuration, out: &mut BTreeMap<String, Vec<f64>>);
}

impl ObserverSet for () {
    fn start(&mut self, _: &Configuration) {}
    #[inline]
    fn event(&mut self, _: f64, _: BondEvent, _: &Configuration) {}
    fn grid(&mut self, _: f64, _: &Configuration) {}
    fn finish(&mut self, _: f64, _: &Configuration, _: &mut BTreeMap<String, Vec<f64>>) {}
}

macro_rules! tuple_set {
    ($($name:ident : $idx:tt),+) => {
        impl<$($name: Observer),+> ObserverSet for ($($name,)+) {
            fn start(&mut self, eta: &Configuration) {
                $(self.$idx.start(eta);)+
            }
            #[inline]
            fn event(&mut self, t: f64, bond: BondEvent, eta: &Configuration) {
                $(self.$idx.event(t, bond, eta);)+
            }
            fn grid(&mut self, t: f64, eta: &Configuration) {
                $(self.$idx.grid(t, eta);)+
            }
            fn finish(&mut self, t_end: f64, eta: &Configuration, out: &mut BTreeMap<String, Vec<f64>>) {
                $(
                    let series = self.$idx.finish(t_end, eta);
                    out.insert(self.$idx.name().to_string(), series);
                )+
            }
        }
    };
}

tuple_set!(A: 0);
tuple_set!(A: 0, B: 1);
tuple_set!(A: 0, B: 1, C: 2);
tuple_set!(A: 0, B: 1, C: 2, D: 3);

impl ObserverSet for Vec<Box<dyn Observer + Send>> {
    fn start(&mut self, eta: &Configuration) {
        self.iter_mut().for_each(|o| o.start(eta));
    }
    fn event(&mut self, t: f64, bond: BondEvent, eta: &Configuration) {
        self.iter_mut().for_each(|o| o.event(t, bond, eta));
    }
    fn grid(&mut self, t: f64, eta: &Configuration) {
        self.iter_mut().for_each(|o| o.grid(t, eta));
    }
    fn finish(&mut self, t_end: f64, eta: &Configuration, out: &mut BTreeMap<String, Vec<f64>>) {
        for o in self.iter_mut() {
            let series = o.finish(t_end, eta);
            out.insert(o.name().to_string(), series);
        }
    }
}

/// Sites whose occupation an applied (non-trivial) event flipped.
#[inline]
pub fn changed_sites(bond: BondEvent, n: usize) -> ([usize; 2], usize) {
    match bond.kind(n) {
        BondKind::Flip(x) => ([x, 0], 1),
        BondKind::Swap(x) => ([x, x + 1], 2),
    }
}

/// Particle number at grid times, plus a check that only reservoir events
/// change it and always by exactly one.
#[derive(Debug, Default, Clone)]
pub struct ParticleCount {
    count: i64,
    series: Vec<f64>,
    pub boundary_events: u64,
    pub bulk_events: u64,
    /// Events that changed the count in a way other than +-1 at a reservoir
    /// bond or 0 in the bulk.
    pub violations: u64,
}

impl ParticleCount {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Observer for ParticleCount {
    fn name(&self) -> &str {
        "particle_count"
    }
    fn start(&mut self, eta: &Configuration) {
        self.count = eta.count() as i64;
    }
    fn event(&mut self, _t: f64, bond: BondEvent, eta: &Configuration) {
        let n = eta.len() + 1;
        let now = eta.count() as i64;
        let delta = now - self.count;
        if bond.is_boundary(n) {
            self.boundary_events += 1;
            if delta.abs() != 1 {
                self.violations += 1;
            }
        } else {
            self.bulk_events += 1;
            if delta != 0 {
                self.violations += 1;
            }
        }
        self.count = now;
    }
    fn grid(&mut self, _t: f64, _eta: &Configuration) {
        self.series.push(self.count as f64);
    }
    fn finish(&mut self, _t_end: f64, _eta: &Configuration) -> Vec<f64> {
        std::mem::take(&mut self.series)
    }
}

/// Number of reservoir events; the series is `[left, right]`.
#[derive(Debug, Default, Clone)]
pub struct BoundaryEvents {
    pub left: u64,
    pub right: u64,
}

impl Observer for BoundaryEvents {
    fn name(&self) -> &str {
        "boundary_events"
    }
    #[inline]
    fn event(&mut self, _t: f64, bond: BondEvent, eta: &Configuration) {
        let n = eta.len() + 1;
        if bond.0 == 0 {
            self.left += 1;
        } else if bond.0 == n - 1 {
            self.right += 1;
        }
    }
    fn finish(&mut self, _t_end: f64, _eta: &Configuration) -> Vec<f64> {
        vec![self.left as f64, self.right as f64]
    }
}

/// Exact per-site time average of the occupation over `[from, to]`.
#[derive(Debug, Clone)]
pub struct SiteTimeAverage {
    from: f64,
    to: f64,
    last: Vec<f64>,
    integral: Vec<f64>,
}

impl SiteTimeAverage {
    pub fn new(from: f64, to: f64) -> Self {
        assert!(to > from, "empty averaging window");
        Self {
            from,
            to,
            last: Vec::new(),
            integral: Vec::new(),
        }
    }

    #[inline]
    fn overlap(&self, a: f64, b: f64) -> f64 {
        (b.min(self.to) - a.max(self.from)).max(0.0)
    }
}

impl Observer for SiteTimeAverage {
    fn name(&self) -> &str {
        "site_time_average"
    }
    fn start(&mut self, eta: &Configuration) {
        self.last = vec![0.0; eta.len()];
        self.integral = vec![0.0; eta.len()];
    }
    #[inline]
    fn event(&mut self, t: f64, bond: BondEvent, eta: &Configuration) {
        let (sites, k) = changed_sites(bond, eta.len() + 1);
        for &x in &sites[..k] {
            // occupation before the event is the complement of the current one
            if !eta.get(x) {
                self.integral[x - 1] += self.overlap(self.last[x - 1], t);
            }
            self.last[x - 1] = t;
        }
    }
    fn finish(&mut self, t_end: f64, eta: &Configuration) -> Vec<f64> {
        let width = self.to - self.from;
        (1..=eta.len())
            .map(|x| {
                let mut v = self.integral[x - 1];
                if eta.get(x) {
                    v += self.overlap(self.last[x - 1], t_end);
                }
                v / width
            })
            .collect()
    }
}
