//! Sum tree over bond rates: total, proportional sampling and point updates
//! in `O(log n)`.

use crate::error::{Error, Result};

/// Updates between full recomputations of the internal nodes.
const REBUILD_PERIOD: u64 = 1 << 20;

#[derive(Debug, Clone)]
pub struct RateIndex {
    len: usize,
    base: usize,
    nodes: Vec<f64>,
    updates: u64,
}

impl RateIndex {
    pub fn new(rates: &[f64]) -> Self {
        let len = rates.len();
        let base = len.next_power_of_two().max(1);
        let mut nodes = vec![0.0; 2 * base];
        nodes[base..base + len].copy_from_slice(rates);
        let mut idx = Self {
            len,
            base,
            nodes,
            updates: 0,
        };
        idx.recompute();
        idx
    }

    fn recompute(&mut self) {
        for i in (1..self.base).rev() {
            self.nodes[i] = self.nodes[2 * i] + self.nodes[2 * i + 1];
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    #[inline]
    pub fn rate(&self, i: usize) -> f64 {
        self.nodes[self.base + i]
    }

    /// Sets leaf `i`; parents are recomputed from their children so the tree
    /// never accumulates drift.
    #[inline]
    pub fn update(&mut self, i: usize, rate: f64) -> Result<()> {
        let mut k = self.base + i;
        if self.nodes[k] == rate {
            return Ok(());
        }
        self.nodes[k] = rate;
        while k > 1 {
            k >>= 1;
            self.nodes[k] = self.nodes[2 * k] + self.nodes[2 * k + 1];
        }
        self.updates += 1;
        if self.updates % REBUILD_PERIOD == 0 {
            self.verify()?;
        }
        Ok(())
    }

    /// Recomputes every internal node and checks the stored total against a
    /// plain sum of the leaves.
    pub fn verify(&mut self) -> Result<()> {
        let stored = self.total();
        self.recompute();
        let exact: f64 = self.nodes[self.base..self.base + self.len].iter().sum();
        if (stored - exact).abs() > 1e-9 * exact.abs().max(f64::MIN_POSITIVE)
            || (self.total() - exact).abs() > 1e-9 * exact.abs().max(f64::MIN_POSITIVE)
        {
            return Err(Error::RateIndexCorrupt { stored, exact });
        }
        Ok(())
    }

    /// Leaf `i` with `sum_{j<i} r_j <= target < sum_{j<=i} r_j`, for
    /// `target` in `[0, total)`. Returns `None` if round-off lands on a
    /// zero-rate leaf.
    #[inline]
    pub fn find(&self, mut target: f64) -> Option<usize> {
        let mut k = 1;
        while k < self.base {
            let left = self.nodes[2 * k];
            // branch-free descent: the comparison is unpredictable
            let right = (target >= left) as usize;
            target -= left * right as f64;
            k = 2 * k + right;
        }
        let i = k - self.base;
        (i < self.len && self.nodes[k] > 0.0).then_some(i)
    }
}
