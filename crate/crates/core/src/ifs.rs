//! Iterated function systems on a rectangular domain, their symbolic
//! addresses, and two attractor rasterizers (random and deterministic).
//!
//! A system is a finite ordered list of contractive maps together with a
//! user-asserted uniform Lipschitz bound. The bound is an assertion, not a
//! computation: for map families whose one-step norm is 1 but whose two-step
//! compositions contract (the swap-style packing systems), callers assert
//! the per-step geometric mean instead, and the depth guarantees below hold
//! at even depths.

use crate::error::{Error, Result};
use crate::geometry::{MapVariant, Point2, Rect};
use crate::raster::{cell_center, cell_of, BitGrid, CountGrid};
use crate::rng::SplitMix64;
use crate::tol::{self, Tolerances};
use crate::Real;
use rayon::prelude::*;

/// Steps discarded before a chaos-game orbit starts painting, enough to pull
/// any domain point within fractions of a cell of the attractor.
pub const CHAOS_BURN_IN: usize = 100;

/// Grid side for the construction-time domain self-map spot check.
const DOMAIN_CHECK_GRID: usize = 32;

/// A finite symbol string over the alphabet `1..=N`, most significant map
/// first: the address `[1, 3]` denotes the composition `f1 ∘ f3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Address {
    symbols: Vec<u8>,
}

impl Address {
    pub fn new(symbols: Vec<u8>) -> Self {
        Self { symbols }
    }

    pub fn empty() -> Self {
        Self { symbols: Vec::new() }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    #[inline]
    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    #[inline]
    pub fn push(&mut self, symbol: u8) {
        self.symbols.push(symbol);
    }

    /// Drops the leading symbol, consuming self; used by the shift map.
    pub(crate) fn into_tail(mut self) -> Address {
        self.symbols.remove(0);
        self
    }
}

impl std::fmt::Display for Address {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.symbols.iter().all(|&s| s <= 9) {
            for s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// Nonnegative weights summing to one; drives symbol draws in chaos games.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector {
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::BadProbabilities("empty weight list".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::BadProbabilities(format!("negative or non-finite weight {v}")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol::PROB_SUM {
            return Err(Error::BadProbabilities(format!("weights sum to {sum}, not 1")));
        }
        let mut cumulative = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        for v in &values {
            acc += v;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Self { values, cumulative })
    }

    pub fn uniform(n: usize) -> Self {
        Self::new(vec![1.0 / n as f64; n]).expect("uniform weights are valid")
    }

    /// Weights proportional to the area scale `|det|` of each affine map;
    /// the natural choice when encoding pictures as stationary measures.
    pub fn from_areas<F: Real>(ifs: &IfsSystem<F>) -> Result<Self> {
        let mut areas = Vec::with_capacity(ifs.len());
        for map in ifs.maps() {
            match map {
                MapVariant::Affine(m) => areas.push(m.det().abs().f64()),
                _ => {
                    return Err(Error::BadProbabilities(
                        "area weights need affine maps".into(),
                    ))
                }
            }
        }
        let total: f64 = areas.iter().sum();
        if total <= 0.0 {
            return Err(Error::BadProbabilities("degenerate total area".into()));
        }
        Self::new(areas.iter().map(|a| a / total).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn draw(&self, rng: &mut SplitMix64) -> usize {
        rng.pick(&self.cumulative)
    }
}

/// An IFS: ordered maps, a domain box every map sends into itself, and a
/// user-asserted contraction bound in `(0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IfsSystem<F> {
    maps: Vec<MapVariant<F>>,
    domain: Rect<F>,
    lipschitz_bound: F,
}

impl<F: Real> IfsSystem<F> {
    /// Validates and builds a system. The domain self-map condition is
    /// spot-checked on a 32x32 grid with `tols.domain_check` slack; the
    /// Lipschitz bound is taken on trust beyond the range check.
    pub fn new_with(
        maps: Vec<MapVariant<F>>,
        domain: Rect<F>,
        lipschitz_bound: F,
        tols: &Tolerances,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidSystem("a system needs at least one map".into()));
        }
        let l = lipschitz_bound.f64();
        if !(0.0..1.0).contains(&l) || l == 0.0 {
            return Err(Error::InvalidSystem(format!(
                "lipschitz bound {l} outside (0, 1)"
            )));
        }
        if domain.x1 <= domain.x0 || domain.y1 <= domain.y0 {
            return Err(Error::InvalidSystem("empty domain rectangle".into()));
        }
        let slack = F::of(tols.domain_check);
        let n = DOMAIN_CHECK_GRID;
        for gj in 0..n {
            for gi in 0..n {
                let u = F::of(gi as f64 / (n - 1) as f64);
                let v = F::of(gj as f64 / (n - 1) as f64);
                let p = Point2::new(
                    domain.x0 + u * (domain.x1 - domain.x0),
                    domain.y0 + v * (domain.y1 - domain.y0),
                );
                for (mi, map) in maps.iter().enumerate() {
                    let q = map.apply_with(p, tols).map_err(|_| {
                        Error::InvalidSystem(format!(
                            "map {} degenerates inside the domain at ({}, {})",
                            mi + 1,
                            p.x.f64(),
                            p.y.f64()
                        ))
                    })?;
                    if !domain.contains(q, slack) {
                        return Err(Error::InvalidSystem(format!(
                            "map {} sends ({}, {}) out of the domain to ({}, {})",
                            mi + 1,
                            p.x.f64(),
                            p.y.f64(),
                            q.x.f64(),
                            q.y.f64()
                        )));
                    }
                }
            }
        }
        Ok(Self { maps, domain, lipschitz_bound })
    }

    pub fn new(maps: Vec<MapVariant<F>>, domain: Rect<F>, lipschitz_bound: F) -> Result<Self> {
        Self::new_with(maps, domain, lipschitz_bound, &Tolerances::default())
    }

    /// Builds a system without the domain self-map spot check.
    ///
    /// Projective systems are contractive near their attractor but need not
    /// send any rectangle into itself; for those the domain acts as a
    /// viewing window that contains the attractor, asserted by the caller.
    /// Range checks on the map count, Lipschitz bound, and domain still run.
    pub fn new_trusting(
        maps: Vec<MapVariant<F>>,
        domain: Rect<F>,
        lipschitz_bound: F,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidSystem("a system needs at least one map".into()));
        }
        let l = lipschitz_bound.f64();
        if !(0.0..1.0).contains(&l) || l == 0.0 {
            return Err(Error::InvalidSystem(format!(
                "lipschitz bound {l} outside (0, 1)"
            )));
        }
        if domain.x1 <= domain.x0 || domain.y1 <= domain.y0 {
            return Err(Error::InvalidSystem("empty domain rectangle".into()));
        }
        Ok(Self { maps, domain, lipschitz_bound })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    #[inline]
    pub fn maps(&self) -> &[MapVariant<F>] {
        &self.maps
    }

    #[inline]
    pub fn map(&self, symbol: u8) -> &MapVariant<F> {
        &self.maps[(symbol - 1) as usize]
    }

    #[inline]
    pub fn domain(&self) -> &Rect<F> {
        &self.domain
    }

    #[inline]
    pub fn lipschitz_bound(&self) -> F {
        self.lipschitz_bound
    }

    /// Evaluates the truncated coding map: `f_{s1} ∘ ... ∘ f_{sK} (seed)`.
    /// An empty address returns the seed unchanged.
    pub fn coding_point(&self, addr: &Address, seed: Point2<F>) -> Result<Point2<F>> {
        let mut p = seed;
        for &s in addr.symbols().iter().rev() {
            if s == 0 || s as usize > self.maps.len() {
                return Err(Error::InvalidSystem(format!(
                    "address symbol {s} outside 1..={}",
                    self.maps.len()
                )));
            }
            p = self.map(s).apply(p)?;
        }
        Ok(p)
    }

    /// Smallest `K` with `lipschitz^K * diam(domain) <= epsilon`: the depth
    /// at which any two seeds yield coding points within `epsilon`.
    pub fn recommended_depth(&self, epsilon: F) -> usize {
        assert!(epsilon > F::zero(), "depth target must be positive");
        let diam = self.domain.diameter();
        let mut bound = diam;
        let mut k = 0usize;
        while bound > epsilon {
            bound = bound * self.lipschitz_bound;
            k += 1;
            // The bound shrinks geometrically; anything past a few thousand
            // means a caller passed a denormal-range epsilon.
            if k > 100_000 {
                break;
            }
        }
        k
    }

    /// Runs one random orbit from the domain center and accumulates the `n`
    /// post-burn-in visits on a `resolution^2` grid. Bit-reproducible for a
    /// given `(seed, n)`.
    pub fn attractor_chaos_game(
        &self,
        probs: &ProbabilityVector,
        n: usize,
        seed: u64,
        resolution: usize,
    ) -> Result<CountGrid> {
        if probs.len() != self.len() {
            return Err(Error::BadProbabilities(format!(
                "{} weights for {} maps",
                probs.len(),
                self.len()
            )));
        }
        if n == 0 {
            return Err(Error::InvalidSystem("chaos game needs n >= 1".into()));
        }
        let mut rng = SplitMix64::new(seed);
        let mut grid = CountGrid::new(resolution);
        let clamp = F::of(tol::ORBIT_CLAMP);
        let mut p = self.domain.center();
        for step in 0..(CHAOS_BURN_IN + n) {
            let sym = probs.draw(&mut rng);
            p = self.maps[sym].apply(p)?;
            if step < CHAOS_BURN_IN {
                // Excursions outside the window are tolerated while the
                // orbit is still converging; nothing is painted yet.
                continue;
            }
            if !self.domain.contains(p, clamp) {
                let (x, y) = p.f64();
                return Err(Error::OrbitEscaped { x, y });
            }
            p = self.domain.clamp(p);
            let (i, j) = cell_of(&self.domain, resolution, p);
            grid.bump(i, j);
        }
        Ok(grid)
    }

    /// Chaos game split across `orbits` independent orbits with derived
    /// seeds `seed ^ orbit_index`, merged additively. The result depends
    /// only on the arguments, not on the worker count.
    pub fn attractor_chaos_game_multi(
        &self,
        probs: &ProbabilityVector,
        per_orbit: usize,
        orbits: usize,
        seed: u64,
        resolution: usize,
    ) -> Result<CountGrid> {
        let grids: Vec<Result<CountGrid>> = (0..orbits.max(1) as u64)
            .into_par_iter()
            .map(|i| self.attractor_chaos_game(probs, per_orbit, seed ^ i, resolution))
            .collect();
        let mut acc = CountGrid::new(resolution);
        for g in grids {
            acc.merge_add(&g?);
        }
        Ok(acc)
    }

    /// Deterministic set iteration: starts from the full grid and replaces
    /// the occupied set by the rasterized images of its cell centers under
    /// every map, `iterations` times. Image points that leave the domain
    /// (possible only when the containment assertion is marginal between
    /// spot-check grid points) are dropped rather than clamped to the edge.
    pub fn attractor_deterministic(&self, resolution: usize, iterations: usize) -> Result<BitGrid> {
        let mut grid = BitGrid::full(resolution);
        for _ in 0..iterations {
            grid = self.step_raster(&grid, resolution)?;
        }
        Ok(grid)
    }

    /// Set iteration run to its fixed point (capped at `max_iterations`).
    ///
    /// Starting from the full grid the occupied set only shrinks, so the
    /// iteration stabilizes; the stable raster is self-consistent (every
    /// occupied cell holds the image of some occupied center), which is what
    /// mask validation needs to compare regions against attractor pieces.
    pub fn attractor_raster_stable(
        &self,
        resolution: usize,
        max_iterations: usize,
    ) -> Result<BitGrid> {
        let mut grid = self.attractor_deterministic(resolution, 1)?;
        for _ in 1..max_iterations {
            let next = self.step_raster(&grid, resolution)?;
            if next == grid {
                break;
            }
            grid = next;
        }
        Ok(grid)
    }

    fn step_raster(&self, grid: &BitGrid, resolution: usize) -> Result<BitGrid> {
        let slack = F::of(tol::DOMAIN_CHECK);
        let mut next = BitGrid::new(resolution);
        for (i, j) in grid.iter_occupied() {
            let c = cell_center(&self.domain, resolution, i, j);
            for map in &self.maps {
                let q = match map.apply(c) {
                    Ok(q) => q,
                    // A degenerate denominator between spot-check points
                    // maps to infinity: not part of F(B) ∩ B.
                    Err(Error::DegenerateDenominator { .. }) => continue,
                    Err(e) => return Err(e),
                };
                if !self.domain.contains(q, slack) {
                    continue;
                }
                let (qi, qj) = cell_of(&self.domain, resolution, q);
                next.set(qi, qj);
            }
        }
        Ok(next)
    }
}
