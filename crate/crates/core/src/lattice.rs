//! Lattice configurations, model parameters, jump rates and the elementary
//! transitions of the slow-boundary exclusion generator.
//!
//! Sites are labelled `1..=n-1`. Bonds are labelled `0..=n-1`: bond `x` with
//! `1 <= x <= n-2` exchanges the occupations of sites `x` and `x+1`, bond `0`
//! flips site `1` (left reservoir) and bond `n-1` flips site `n-1` (right
//! reservoir).

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Boundary regime of the limiting heat equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// `theta < 1`: the density is pinned to the reservoir values.
    Dirichlet,
    /// `theta == 1`: boundary flux proportional to the density mismatch.
    Robin,
    /// `theta > 1`: no flux through the boundary.
    Neumann,
}

impl Regime {
    pub fn from_theta<T: Real>(theta: T) -> Self {
        if theta < T::one() {
            Regime::Dirichlet
        } else if theta == T::one() {
            Regime::Robin
        } else {
            Regime::Neumann
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Dirichlet => "dirichlet",
            Regime::Robin => "robin",
            Regime::Neumann => "neumann",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Validated model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters<T> {
    n: usize,
    theta: T,
    alpha: T,
    beta: T,
    rho: T,
    regime: Regime,
}

fn check_open<T: Real>(name: &'static str, value: T) -> Result<()> {
    if value > T::zero() && value < T::one() {
        Ok(())
    } else {
        Err(Error::DensityOutOfRange {
            name,
            value: value.to_f64_lossy(),
        })
    }
}

fn check_closed<T: Real>(name: &'static str, value: T) -> Result<()> {
    if value >= T::zero() && value <= T::one() {
        Ok(())
    } else {
        Err(Error::DensityOutOfRange {
            name,
            value: value.to_f64_lossy(),
        })
    }
}

impl<T: Real> Parameters<T> {
    /// `n >= 2`, `theta >= 0`, and `alpha`, `beta`, `rho` in `(0, 1)`.
    pub fn new(n: usize, theta: T, alpha: T, beta: T, rho: T) -> Result<Self> {
        Self::validate_common(n, theta)?;
        check_open("alpha", alpha)?;
        check_open("beta", beta)?;
        check_open("rho", rho)?;
        Ok(Self::assemble(n, theta, alpha, beta, rho))
    }

    /// Equilibrium parameters `alpha = beta = rho`.
    pub fn equilibrium(n: usize, theta: T, rho: T) -> Result<Self> {
        Self::new(n, theta, rho, rho, rho)
    }

    /// Like [`Parameters::new`] but admits fully absorbing or fully injecting
    /// reservoirs (`alpha`, `beta` in the closed interval `[0, 1]`). Some
    /// boundary rates may then vanish.
    pub fn with_closed_reservoirs(n: usize, theta: T, alpha: T, beta: T, rho: T) -> Result<Self> {
        Self::validate_common(n, theta)?;
        check_closed("alpha", alpha)?;
        check_closed("beta", beta)?;
        check_open("rho", rho)?;
        Ok(Self::assemble(n, theta, alpha, beta, rho))
    }

    fn validate_common(n: usize, theta: T) -> Result<()> {
        if n < 2 {
            return Err(Error::LatticeTooSmall(n));
        }
        if !(theta >= T::zero()) || !theta.is_finite() {
            return Err(Error::NegativeTheta(theta.to_f64_lossy()));
        }
        Ok(())
    }

    fn assemble(n: usize, theta: T, alpha: T, beta: T, rho: T) -> Self {
        Self {
            n,
            theta,
            alpha,
            beta,
            rho,
            regime: Regime::from_theta(theta),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn theta(&self) -> T {
        self.theta
    }
    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn beta(&self) -> T {
        self.beta
    }
    pub fn rho(&self) -> T {
        self.rho
    }
    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Number of sites `n - 1`.
    pub fn sites(&self) -> usize {
        self.n - 1
    }

    /// Number of bonds `n` (two reservoir bonds plus `n - 2` bulk bonds).
    pub fn bonds(&self) -> usize {
        self.n
    }

    /// Boundary damping `n^-theta`.
    pub fn boundary_scale(&self) -> T {
        T::from_usize_lossy(self.n).powf(-self.theta)
    }

    /// Diffusive time acceleration `n^2`.
    pub fn acceleration(&self) -> T {
        let n = T::from_usize_lossy(self.n);
        n * n
    }

    pub fn is_equilibrium(&self) -> bool {
        self.alpha == self.rho && self.beta == self.rho
    }

    /// Same parameters at a different lattice scale.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::LatticeTooSmall(n));
        }
        Ok(Self { n, ..*self })
    }

    /// Same parameters with a different slowness exponent.
    pub fn with_theta(&self, theta: T) -> Result<Self> {
        Self::validate_common(self.n, theta)?;
        Ok(Self {
            theta,
            regime: Regime::from_theta(theta),
            ..*self
        })
    }

    pub fn cast<U: Real>(&self) -> Parameters<U> {
        Parameters {
            n: self.n,
            theta: U::lit(self.theta.to_f64_lossy()),
            alpha: U::lit(self.alpha.to_f64_lossy()),
            beta: U::lit(self.beta.to_f64_lossy()),
            rho: U::lit(self.rho.to_f64_lossy()),
            regime: self.regime,
        }
    }
}

/// Occupation bits for sites `1..=n-1`, densely packed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    len: usize,
    words: Vec<u64>,
}

impl Configuration {
    pub fn empty(sites: usize) -> Self {
        Self {
            len: sites,
            words: vec![0; sites.div_ceil(64)],
        }
    }

    pub fn full(sites: usize) -> Self {
        let mut c = Self::empty(sites);
        for x in 1..=sites {
            c.set(x, true);
        }
        c
    }

    /// Build from a slice of 0/1 values; entry `i` is site `i + 1`.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut c = Self::empty(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            c.set(i + 1, b != 0);
        }
        c
    }

    /// State with index `idx` in the enumeration used by the exact oracle:
    /// site `x` is bit `x - 1` of `idx`.
    pub fn from_index(sites: usize, idx: usize) -> Self {
        let mut c = Self::empty(sites);
        if sites > 0 {
            c.words[0] = idx as u64;
        }
        c
    }

    /// Inverse of [`Configuration::from_index`]; only meaningful for `sites < 64`.
    pub fn index(&self) -> usize {
        self.words.first().copied().unwrap_or(0) as usize
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Occupation of site `x` in `1..=len`.
    #[inline]
    pub fn get(&self, x: usize) -> bool {
        debug_assert!(x >= 1 && x <= self.len);
        let i = x - 1;
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn occ(&self, x: usize) -> u8 {
        self.get(x) as u8
    }

    #[inline]
    pub fn set(&mut self, x: usize, value: bool) {
        let i = x - 1;
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, x: usize) {
        let i = x - 1;
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    /// Exchange sites `x` and `x + 1`; returns whether anything changed.
    #[inline]
    pub fn swap(&mut self, x: usize) -> bool {
        let a = self.get(x);
        let b = self.get(x + 1);
        if a != b {
            self.flip(x);
            self.flip(x + 1);
            true
        } else {
            false
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (1..=self.len).map(|x| self.occ(x)).collect()
    }

    /// Occupations packed little-endian into bytes, site 1 in the lowest bit.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for x in 1..=self.len {
            if self.get(x) {
                out[(x - 1) / 8] |= 1 << ((x - 1) % 8);
            }
        }
        out
    }

    pub fn from_packed_bytes(sites: usize, bytes: &[u8]) -> Self {
        let mut c = Self::empty(sites);
        for x in 1..=sites {
            if bytes[(x - 1) / 8] >> ((x - 1) % 8) & 1 == 1 {
                c.set(x, true);
            }
        }
        c
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (1..=self.len)
            .map(|x| if self.get(x) { '1' } else { '0' })
            .collect();
        write!(f, "Configuration({s})")
    }
}

/// A bond of the lattice; `0` and `n - 1` are the reservoir bonds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BondEvent(pub usize);

/// What a bond does to a configuration of `n - 1` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BondKind {
    /// Flip the occupation of the given site.
    Flip(usize),
    /// Exchange sites `x` and `x + 1`.
    Swap(usize),
}

impl BondEvent {
    pub fn new(bond: usize, n: usize) -> Result<Self> {
        if bond < n {
            Ok(Self(bond))
        } else {
            Err(Error::BondOutOfRange { bond, n })
        }
    }

    #[inline]
    pub fn kind(self, n: usize) -> BondKind {
        if self.0 == 0 {
            BondKind::Flip(1)
        } else if self.0 == n - 1 {
            BondKind::Flip(n - 1)
        } else {
            BondKind::Swap(self.0)
        }
    }

    pub fn is_boundary(self, n: usize) -> bool {
        self.0 == 0 || self.0 == n - 1
    }
}

/// Reservoir rate at a boundary site given its occupation.
#[inline]
pub fn reservoir_rate<T: Real>(density: T, scale: T, occupied: bool) -> T {
    if occupied {
        (T::one() - density) * scale
    } else {
        density * scale
    }
}

/// Un-accelerated rates indexed by bond `0..n`.
pub fn jump_rates<T: Real>(p: &Parameters<T>, eta: &Configuration) -> Result<Vec<T>> {
    check_len(p, eta)?;
    let n = p.n();
    let scale = p.boundary_scale();
    let mut rates = vec![T::one(); n];
    rates[0] = reservoir_rate(p.alpha(), scale, eta.get(1));
    rates[n - 1] = reservoir_rate(p.beta(), scale, eta.get(n - 1));
    Ok(rates)
}

/// Rate of a single bond (un-accelerated).
#[inline]
pub fn bond_rate<T: Real>(p: &Parameters<T>, eta: &Configuration, bond: BondEvent) -> T {
    let n = p.n();
    if bond.0 == 0 {
        reservoir_rate(p.alpha(), p.boundary_scale(), eta.get(1))
    } else if bond.0 == n - 1 {
        reservoir_rate(p.beta(), p.boundary_scale(), eta.get(n - 1))
    } else {
        T::one()
    }
}

pub(crate) fn check_len<T: Real>(p: &Parameters<T>, eta: &Configuration) -> Result<()> {
    if eta.len() != p.sites() {
        Err(Error::LengthMismatch {
            expected: p.sites(),
            got: eta.len(),
        })
    } else {
        Ok(())
    }
}

/// In-place transition; returns whether the configuration changed.
#[inline]
pub fn apply_event_in_place(eta: &mut Configuration, e: BondEvent) -> bool {
    match e.kind(eta.len() + 1) {
        BondKind::Flip(x) => {
            eta.flip(x);
            true
        }
        BondKind::Swap(x) => eta.swap(x),
    }
}

/// Image of `eta` under the bond transition.
pub fn apply_event(eta: &Configuration, e: BondEvent) -> Result<Configuration> {
    let n = eta.len() + 1;
    if e.0 >= n {
        return Err(Error::BondOutOfRange { bond: e.0, n });
    }
    let mut out = eta.clone();
    apply_event_in_place(&mut out, e);
    Ok(out)
}

/// Product Bernoulli(`rho`) configuration with `p.n() - 1` sites.
pub fn bernoulli_sample<T: Real, R: Rng + ?Sized>(
    p: &Parameters<T>,
    rho: T,
    rng: &mut R,
) -> Result<Configuration> {
    check_open("rho", rho)?;
    let r = rho.to_f64_lossy();
    let mut c = Configuration::empty(p.sites());
    for x in 1..=p.sites() {
        if rng.random::<f64>() < r {
            c.set(x, true);
        }
    }
    Ok(c)
}

/// Product measure with site-dependent densities; `profile[i]` is site `i + 1`.
pub fn product_sample<R: Rng + ?Sized>(profile: &[f64], rng: &mut R) -> Configuration {
    let mut c = Configuration::empty(profile.len());
    for (i, &d) in profile.iter().enumerate() {
        if rng.random::<f64>() < d {
            c.set(i + 1, true);
        }
    }
    c
}
