//! Grouped event selection: the two reservoir bonds plus a uniform pick
//! among active bulk bonds (all of which have rate one).

use crate::error::{Error, Result};

const ABSENT: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct ActiveBonds {
    n: usize,
    left: f64,
    right: f64,
    list: Vec<u32>,
    pos: Vec<u32>,
}

impl ActiveBonds {
    /// `rates` indexed by bond `0..n`; bulk entries must be 0 or 1.
    pub fn new(rates: &[f64]) -> Result<Self> {
        let n = rates.len();
        if n < 2 {
            return Err(Error::LatticeTooSmall(n));
        }
        let mut s = Self {
            n,
            left: rates[0],
            right: rates[n - 1],
            list: Vec::with_capacity(n),
            pos: vec![ABSENT; n],
        };
        for (b, &r) in rates.iter().enumerate().take(n - 1).skip(1) {
            s.set_bulk(b, check_unit(b, r)?);
        }
        Ok(s)
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.left + self.right + self.list.len() as f64
    }

    pub fn rate(&self, bond: usize) -> f64 {
        if bond == 0 {
            self.left
        } else if bond == self.n - 1 {
            self.right
        } else if self.pos[bond] != ABSENT {
            1.0
        } else {
            0.0
        }
    }

    #[inline]
    fn set_bulk(&mut self, bond: usize, active: bool) {
        let present = self.pos[bond] != ABSENT;
        if active && !present {
            self.pos[bond] = self.list.len() as u32;
            self.list.push(bond as u32);
        } else if !active && present {
            let p = self.pos[bond] as usize;
            let last = *self.list.last().expect("nonempty when a bond is present");
            self.list[p] = last;
            self.pos[last as usize] = p as u32;
            self.list.pop();
            self.pos[bond] = ABSENT;
        }
    }

    #[inline]
    pub fn update(&mut self, bond: usize, rate: f64) -> Result<()> {
        if bond == 0 {
            self.left = rate;
        } else if bond == self.n - 1 {
            self.right = rate;
        } else {
            self.set_bulk(bond, check_unit(bond, rate)?);
        }
        Ok(())
    }

    /// Bond with cumulative-rate interval containing `target`, where the
    /// order is left reservoir, right reservoir, then active bulk bonds in
    /// list order.
    #[inline]
    pub fn find(&self, target: f64) -> Option<usize> {
        if target < self.left {
            return Some(0);
        }
        let rest = target - self.left;
        if rest < self.right {
            return Some(self.n - 1);
        }
        let k = (rest - self.right) as usize;
        self.list.get(k).map(|&b| b as usize)
    }
}

#[inline]
fn check_unit(bond: usize, r: f64) -> Result<bool> {
    if r == 0.0 {
        Ok(false)
    } else if r == 1.0 {
        Ok(true)
    } else {
        Err(Error::InvalidDiscretisation(format!("bulk bond {bond} has rate {r}, expected 0 or 1")))
    }
}
