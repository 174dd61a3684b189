//! Fractal transformations between attractors.
//!
//! A section system pairs an IFS with a mask and a truncation depth; feeding
//! the depth-`K` address of a point under one system into the coding map of
//! another defines the fractal transformation between their attractors. When
//! two systems with compatible masks are bundled as a pair, the forward and
//! backward transformations invert each other up to the truncation bound and
//! the pair acts on pictures as a warp.

use crate::error::{Error, Result};
use crate::geometry::{AffineMap2, MapVariant, Point2, Rect};
use crate::ifs::{Address, IfsSystem};
use crate::imaging::Picture;
use crate::sections::{
    masked_address_with, quadrant_regions, split_x_regions, Mask,
};
use crate::tol::Tolerances;
use crate::Real;
use rayon::prelude::*;

/// Depth defaults target coding points within this distance of the limit.
pub const DEFAULT_DEPTH_EPSILON: f64 = 1.0 / 1024.0;

/// Collision paint for packing: cells claimed by two sources turn white.
pub const WHITE: [u8; 4] = [255, 255, 255, 255];

/// Owner sentinel for cells that have collided and stay white.
pub const OWNER_COLLIDED: u8 = u8::MAX;

/// An IFS together with the mask that sections its attractor and the depth
/// at which addresses are truncated.
#[derive(Clone, Debug)]
pub struct SectionSystem<F> {
    ifs: IfsSystem<F>,
    mask: Mask<F>,
    depth: usize,
}

impl<F: Real> SectionSystem<F> {
    pub fn new(ifs: IfsSystem<F>, mask: Mask<F>, depth: usize) -> Result<Self> {
        if mask.len() != ifs.len() {
            return Err(Error::InvalidMask(format!(
                "mask with {} regions cannot section a {}-map system",
                mask.len(),
                ifs.len()
            )));
        }
        Ok(Self { ifs, mask, depth })
    }

    /// Depth chosen so truncation moves coding points by at most
    /// [`DEFAULT_DEPTH_EPSILON`].
    pub fn with_default_depth(ifs: IfsSystem<F>, mask: Mask<F>) -> Result<Self> {
        let depth = ifs.recommended_depth(F::of(DEFAULT_DEPTH_EPSILON));
        Self::new(ifs, mask, depth)
    }

    #[inline]
    pub fn ifs(&self) -> &IfsSystem<F> {
        &self.ifs
    }

    #[inline]
    pub fn mask(&self) -> &Mask<F> {
        &self.mask
    }

    #[inline]
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    /// The depth-truncated address of `p` under the masked dynamics.
    pub fn address_with(&self, p: Point2<F>, tols: &Tolerances) -> Result<Address> {
        masked_address_with(&self.ifs, &self.mask, p, self.depth, tols)
    }

    #[inline]
    pub fn address(&self, p: Point2<F>) -> Result<Address> {
        self.address_with(p, &Tolerances::default())
    }
}

/// The map sending a source-attractor point to the target point with the
/// same address: read the address under the source's mask, evaluate it under
/// the target's coding map.
#[derive(Clone, Debug)]
pub struct FractalTransform<F> {
    source: SectionSystem<F>,
    target: IfsSystem<F>,
}

impl<F: Real> FractalTransform<F> {
    pub fn new(source: SectionSystem<F>, target: IfsSystem<F>) -> Result<Self> {
        if source.ifs().len() != target.len() {
            return Err(Error::InvalidSystem(format!(
                "source has {} maps but target has {}; transforms need a shared alphabet",
                source.ifs().len(),
                target.len()
            )));
        }
        Ok(Self { source, target })
    }

    #[inline]
    pub fn source(&self) -> &SectionSystem<F> {
        &self.source
    }

    #[inline]
    pub fn target(&self) -> &IfsSystem<F> {
        &self.target
    }

    pub fn transform_point_with(&self, p: Point2<F>, tols: &Tolerances) -> Result<Point2<F>> {
        let addr = self.source.address_with(p, tols)?;
        self.target.coding_point(&addr, self.target.domain().center())
    }

    #[inline]
    pub fn transform_point(&self, p: Point2<F>) -> Result<Point2<F>> {
        self.transform_point_with(p, &Tolerances::default())
    }

    /// Pull-based warp: the output spans this transform's *source* domain and
    /// every pixel samples `src` (spanning the *target* domain) at its
    /// transformed center. Pixels whose orbits fail numerically, typically
    /// off-attractor points under a gappy mask, come out transparent.
    ///
    /// Pulling through `self` realizes the pushforward of `src` through the
    /// opposite transform, so a pair warps pictures with its backward member.
    pub fn pull_picture(&self, src: &Picture, out_resolution: usize) -> Picture {
        let tols = Tolerances::default();
        let mut out = Picture::new(out_resolution, out_resolution);
        let width = out_resolution;
        let src_domain = *self.target.domain();
        let source_domain = *self.source.ifs().domain();
        let rows: Vec<(usize, &mut [u8])> = out
            .data_mut()
            .chunks_mut(width * 4)
            .enumerate()
            .collect();
        rows.into_par_iter().for_each(|(row, chunk)| {
            for col in 0..width {
                let u = F::of((col as f64 + 0.5) / width as f64);
                let v = F::of(1.0 - (row as f64 + 0.5) / out_resolution as f64);
                let p = source_domain.at(u, v);
                let color = match self.transform_point_with(p, &tols) {
                    Ok(q) => src.sample_in(&src_domain, q),
                    Err(e) => {
                        debug_assert!(e.is_numeric(), "unexpected transform failure: {e}");
                        [0, 0, 0, 0]
                    }
                };
                chunk[col * 4..col * 4 + 4].copy_from_slice(&color);
            }
        });
        out
    }

    /// Forward splat for transforms without a usable inverse: supersampled
    /// source pixels are written at their transformed positions into
    /// `canvas` (spanning the target domain). When several subcells of the
    /// same source contend for one cell, the one whose image lies nearest the
    /// cell center wins (ties keep the earlier writer), so the read-back point
    /// used later by a pull agrees with the stored color as often as the
    /// resolutions allow. `depth` holds each cell's best squared distance so
    /// far and must be `f32::INFINITY` on first use. `owner` tracks which
    /// source id painted each cell; a cell claimed by two different ids turns
    /// white and stays white. Holes are left for the caller, who may run a
    /// majority fill.
    pub fn splat_into(
        &self,
        src: &Picture,
        canvas: &mut Picture,
        owner: &mut [u8],
        depth: &mut [f32],
        id: u8,
        supersample: usize,
    ) {
        assert!(supersample >= 1, "supersample factor must be at least 1");
        assert!(id != OWNER_COLLIDED && id != 0, "source ids are 1..=254");
        assert_eq!(
            owner.len(),
            canvas.width() * canvas.height(),
            "owner grid must match the canvas"
        );
        assert_eq!(depth.len(), owner.len(), "depth grid must match the canvas");
        let tols = Tolerances::default();
        let source_domain = *self.source.ifs().domain();
        let target_domain = *self.target.domain();
        let ss = supersample as f64;
        for row in 0..src.height() {
            for col in 0..src.width() {
                let color = src.get(col, row);
                for dy in 0..supersample {
                    for dx in 0..supersample {
                        let u = (col as f64 + (dx as f64 + 0.5) / ss) / src.width() as f64;
                        let v = 1.0 - (row as f64 + (dy as f64 + 0.5) / ss) / src.height() as f64;
                        let p = source_domain.at(F::of(u), F::of(v));
                        let q = match self.transform_point_with(p, &tols) {
                            Ok(q) => q,
                            Err(e) => {
                                debug_assert!(
                                    e.is_numeric(),
                                    "unexpected transform failure: {e}"
                                );
                                continue;
                            }
                        };
                        let (oc, or) = canvas.pixel_of(&target_domain, q);
                        let cell = or * canvas.width() + oc;
                        let cu = (oc as f64 + 0.5) / canvas.width() as f64;
                        let cv = 1.0 - (or as f64 + 0.5) / canvas.height() as f64;
                        let center = target_domain.at(F::of(cu), F::of(cv));
                        let dx2 = (q.x - center.x).f64();
                        let dy2 = (q.y - center.y).f64();
                        let d2 = (dx2 * dx2 + dy2 * dy2) as f32;
                        match owner[cell] {
                            0 => {
                                owner[cell] = id;
                                depth[cell] = d2;
                                canvas.put(oc, or, color);
                            }
                            OWNER_COLLIDED => {}
                            prev if prev == id => {
                                if d2 < depth[cell] {
                                    depth[cell] = d2;
                                    canvas.put(oc, or, color);
                                }
                            }
                            _ => {
                                owner[cell] = OWNER_COLLIDED;
                                canvas.put(oc, or, WHITE);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Single-source forward splat with majority hole fill.
    pub fn splat_picture(
        &self,
        src: &Picture,
        out_resolution: usize,
        supersample: usize,
    ) -> Picture {
        let mut canvas = Picture::new(out_resolution, out_resolution);
        let mut owner = vec![0u8; out_resolution * out_resolution];
        let mut depth = vec![f32::INFINITY; out_resolution * out_resolution];
        self.splat_into(src, &mut canvas, &mut owner, &mut depth, 1, supersample);
        canvas.fill_holes_majority()
    }
}

/// A forward/backward bundle of transforms between two sectioned systems,
/// sharing one truncation depth so the round-trip error telescopes to a
/// single bound.
#[derive(Clone, Debug)]
pub struct HomeoPair<F> {
    forward: FractalTransform<F>,
    backward: FractalTransform<F>,
}

impl<F: Real> HomeoPair<F> {
    pub fn new(f: SectionSystem<F>, g: SectionSystem<F>) -> Result<Self> {
        if f.ifs().len() != g.ifs().len() {
            return Err(Error::InvalidSystem(format!(
                "pair members have {} and {} maps",
                f.ifs().len(),
                g.ifs().len()
            )));
        }
        let depth = f.depth().max(g.depth());
        let f = f.with_depth(depth);
        let g = g.with_depth(depth);
        let forward = FractalTransform::new(f.clone(), g.ifs().clone())?;
        let backward = FractalTransform::new(g, f.ifs().clone())?;
        Ok(Self { forward, backward })
    }

    #[inline]
    pub fn forward(&self) -> &FractalTransform<F> {
        &self.forward
    }

    #[inline]
    pub fn backward(&self) -> &FractalTransform<F> {
        &self.backward
    }

    #[inline]
    pub fn depth(&self) -> usize {
        self.forward.source().depth()
    }

    /// Pushes `src` (over the forward source domain) through the forward
    /// transformation, realized as a pull through the backward member.
    pub fn warp_picture(&self, src: &Picture, out_resolution: usize) -> Picture {
        self.backward.pull_picture(src, out_resolution)
    }

    /// Inverse warp: pushes a picture over the target domain back.
    pub fn unwarp_picture(&self, src: &Picture, out_resolution: usize) -> Picture {
        self.forward.pull_picture(src, out_resolution)
    }
}

fn clamped_threshold<F: Real>(t: F, lo: F, hi: F) -> Result<F> {
    if lo > hi {
        return Err(Error::InvalidConfig(format!(
            "empty threshold range [{}, {}]; the family needs overlapping pieces",
            lo.f64(),
            hi.f64()
        )));
    }
    Ok(t.max(lo).min(hi))
}

/// The quadrant family `H_{r,s}`: four maps splitting the unit square with
/// `r`-scales toward the lower-left corner and `s`-scales toward the upper
/// right, ordered lower-left, lower-right, upper-right, upper-left.
pub fn hrs_system<F: Real>(r: F, s: F) -> Result<IfsSystem<F>> {
    let rf = r.f64();
    let sf = s.f64();
    if !(rf > 0.0 && rf < 1.0 && sf > 0.0 && sf < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "quadrant family scales must lie in (0, 1), got r = {rf}, s = {sf}"
        )));
    }
    if rf + sf < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "quadrant family needs r + s >= 1 so the pieces cover, got {rf} + {sf}"
        )));
    }
    let o = F::zero();
    let shift = F::one() - s;
    let maps = vec![
        MapVariant::Affine(AffineMap2::scale_translate(r, o, r, o)),
        MapVariant::Affine(AffineMap2::scale_translate(s, shift, r, o)),
        MapVariant::Affine(AffineMap2::scale_translate(s, shift, s, shift)),
        MapVariant::Affine(AffineMap2::scale_translate(r, o, s, shift)),
    ];
    IfsSystem::new(maps, Rect::unit(), r.max(s))
}

/// Builds the quadrant-family pair: `F = H_{r1,s1}` masked by quadrants at
/// threshold `p`, `G = H_{r2,s2}` masked at `1 - p`. Thresholds only carry
/// information inside the overlap band `[1 - s, r]` of each system; outside
/// it they are clamped to the seam, which in the non-overlapping case
/// `r + s = 1` forces the unique valid mask.
pub fn make_hrs_pair<F: Real>(r1: F, s1: F, r2: F, s2: F, p: F) -> Result<HomeoPair<F>> {
    let f_ifs = hrs_system(r1, s1)?;
    let g_ifs = hrs_system(r2, s2)?;
    let pf = clamped_threshold(p, F::one() - s1, r1)?;
    let pg = clamped_threshold(F::one() - p, F::one() - s2, r2)?;
    let f_mask = Mask::new(quadrant_regions(pf), &f_ifs)?;
    let g_mask = Mask::new(quadrant_regions(pg), &g_ifs)?;
    let f = SectionSystem::with_default_depth(f_ifs, f_mask)?;
    let g = SectionSystem::with_default_depth(g_ifs, g_mask)?;
    HomeoPair::new(f, g)
}

/// The two-map interval system `x -> a*x`, `x -> b*x + 1 - b`, embedded on
/// the diagonal of the unit square.
pub fn diagonal_system<F: Real>(a: F, b: F) -> Result<IfsSystem<F>> {
    let af = a.f64();
    let bf = b.f64();
    if !(af > 0.0 && af < 1.0 && bf > 0.0 && bf < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "interval family scales must lie in (0, 1), got a = {af}, b = {bf}"
        )));
    }
    if af + bf < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "interval family needs a + b >= 1 so the pieces cover, got {af} + {bf}"
        )));
    }
    let o = F::zero();
    let shift = F::one() - b;
    let maps = vec![
        MapVariant::Affine(AffineMap2::scale_translate(a, o, a, o)),
        MapVariant::Affine(AffineMap2::scale_translate(b, shift, b, shift)),
    ];
    IfsSystem::new(maps, Rect::unit(), a.max(b))
}

/// The interval pair behind the golden-threshold construction:
/// `F = (a*x, b*x + 1 - b)` masked at `p`, `G = (b*x, a*x + 1 - a)` (scales
/// swapped) masked at `1 - p`.
pub fn make_diagonal_pair<F: Real>(a: F, b: F, p: F) -> Result<HomeoPair<F>> {
    let f_ifs = diagonal_system(a, b)?;
    let g_ifs = diagonal_system(b, a)?;
    let pf = clamped_threshold(p, F::one() - b, a)?;
    let pg = clamped_threshold(F::one() - p, F::one() - a, b)?;
    let f_mask = Mask::new(split_x_regions(pf), &f_ifs)?;
    let g_mask = Mask::new(split_x_regions(pg), &g_ifs)?;
    let f = SectionSystem::with_default_depth(f_ifs, f_mask)?;
    let g = SectionSystem::with_default_depth(g_ifs, g_mask)?;
    HomeoPair::new(f, g)
}

/// Locates the crossing threshold `p*` for the interval pair `(a, b)`: the
/// largest `p` with `(p, 1 - p)` on the attractor of the transpose-graph
/// system `((a*x, b*y), (b*x + 1 - b, a*y + 1 - a))`.
///
/// The attractor is rasterized deterministically and the anti-diagonal is
/// scanned from the right; both cell rows the line `x + y = 1` touches are
/// checked, since at even resolutions the line runs along cell corners. The
/// result is clamped into the valid threshold band `[1 - b, a]`, which also
/// pins the degenerate symmetric case `a = b` to the exact crossing.
pub fn compute_p_star<F: Real>(
    a: F,
    b: F,
    resolution: usize,
    iterations: usize,
) -> Result<F> {
    let af = a.f64();
    let bf = b.f64();
    if !(bf > 0.0 && af >= bf && af < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "crossing scan needs 0 < b <= a < 1, got a = {af}, b = {bf}"
        )));
    }
    if af + bf < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "crossing scan needs a + b >= 1, got {af} + {bf}"
        )));
    }
    let o = F::zero();
    let maps = vec![
        MapVariant::Affine(AffineMap2::scale_translate(a, o, b, o)),
        MapVariant::Affine(AffineMap2::scale_translate(b, F::one() - b, a, F::one() - a)),
    ];
    let graph = IfsSystem::new(maps, Rect::unit(), a.max(b))?;
    let occupied = graph.attractor_deterministic(resolution, iterations)?;
    for i in (0..resolution).rev() {
        let on_line = occupied.get(i, resolution - 1 - i)
            || (resolution - i < resolution && occupied.get(i, resolution - i));
        if on_line {
            let p = F::of((i as f64 + 0.5) / resolution as f64);
            return clamped_threshold(p, F::one() - b, a);
        }
    }
    Err(Error::NoIntersection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn pt(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    #[test]
    fn identity_pair_fixes_points_within_depth_bound() {
        let pair: HomeoPair<f64> = make_hrs_pair(0.5, 0.5, 0.5, 0.5, 0.5).unwrap();
        let mut rng = SplitMix64::new(11);
        for _ in 0..200 {
            let p = pt(rng.next_f64(), rng.next_f64());
            let q = pair.forward().transform_point(p).unwrap();
            assert!(p.dist(q) <= DEFAULT_DEPTH_EPSILON + 1e-12, "{p:?} -> {q:?}");
        }
    }

    #[test]
    fn quadrant_pair_corner_is_fixed() {
        let pair: HomeoPair<f64> = make_hrs_pair(0.5, 0.5, 0.6, 0.4, 0.5).unwrap();
        let q = pair.forward().transform_point(pt(0.0, 0.0)).unwrap();
        assert!(q.dist(pt(0.0, 0.0)) <= DEFAULT_DEPTH_EPSILON + 1e-12);
    }

    #[test]
    fn quadrant_pair_center_lands_at_target_seam() {
        // Hand oracle for the 0.5 -> 0.6 quadrant pair at (0.5, 0.5): the
        // masked orbit classifies (0.5, 0.5) as symbol 1 (boundaries stick
        // low), steps to (1, 1), and stays at symbol 3 forever. Evaluating
        // the address 1 3 3 3 ... under the target maps gives
        // g1(fix g3) = g1((1, 1)) = (0.6, 0.6).
        let pair: HomeoPair<f64> = make_hrs_pair(0.5, 0.5, 0.6, 0.4, 0.5).unwrap();
        let depth = pair.depth();
        let q = pair.forward().transform_point(pt(0.5, 0.5)).unwrap();
        let bound = 0.6f64.powi(depth as i32) * 2f64.sqrt() + 1e-12;
        assert!(q.dist(pt(0.6, 0.6)) <= bound, "{q:?} vs (0.6, 0.6) +- {bound}");

        // Independent oracle: iterate the doubling dynamics by hand and
        // compose the target maps in reverse at a deeper truncation.
        let mut addr = Vec::new();
        let (mut x, mut y) = (0.5f64, 0.5f64);
        for _ in 0..20 {
            let sym = match (x <= 0.5, y <= 0.5) {
                (true, true) => 1,
                (false, true) => 2,
                (false, false) => 3,
                (true, false) => 4,
            };
            addr.push(sym);
            x = if sym == 1 || sym == 4 { x / 0.5 } else { (x - 0.5) / 0.5 };
            y = if sym <= 2 { y / 0.5 } else { (y - 0.5) / 0.5 };
        }
        let (mut gx, mut gy) = (0.5f64, 0.5f64);
        for &sym in addr.iter().rev() {
            gx = if sym == 1 || sym == 4 { 0.6 * gx } else { 0.4 * gx + 0.6 };
            gy = if sym <= 2 { 0.6 * gy } else { 0.4 * gy + 0.6 };
        }
        assert!((gx - 0.6).abs() < 1e-4 && (gy - 0.6).abs() < 1e-4);
    }

    #[test]
    fn round_trip_non_overlapping_pair() {
        let pair: HomeoPair<f64> = make_hrs_pair(0.5, 0.5, 0.6, 0.4, 0.5).unwrap();
        let mut rng = SplitMix64::new(77);
        let tol = 3.0 / 512.0;
        let mut good = 0usize;
        let n = 10_000;
        for _ in 0..n {
            let p = pt(rng.next_f64(), rng.next_f64());
            let q = pair.forward().transform_point(p).unwrap();
            let back = pair.backward().transform_point(q).unwrap();
            if p.dist(back) <= tol {
                good += 1;
            }
        }
        assert!(good as f64 >= 0.99 * n as f64, "round trip held for {good}/{n}");
    }

    #[test]
    fn round_trip_overlapping_golden_pair() {
        let p_star: f64 = compute_p_star(2.0 / 3.0, 0.5, 1024, 30).unwrap();
        let pair = make_hrs_pair(2.0 / 3.0, 0.5, 0.5, 2.0 / 3.0, p_star).unwrap();
        let mut rng = SplitMix64::new(78);
        let tol = 3.0 / 512.0;
        let mut good = 0usize;
        let n = 10_000;
        for _ in 0..n {
            let p = pt(rng.next_f64(), rng.next_f64());
            let q = pair.forward().transform_point(p).unwrap();
            let back = pair.backward().transform_point(q).unwrap();
            if p.dist(back) <= tol {
                good += 1;
            }
        }
        assert!(good as f64 >= 0.95 * n as f64, "round trip held for {good}/{n}");
    }

    #[test]
    fn p_star_symmetric_case_is_exact() {
        let p: f64 = compute_p_star(0.5, 0.5, 1024, 20).unwrap();
        assert_eq!(p, 0.5);
    }

    #[test]
    fn p_star_golden_value() {
        let p: f64 = compute_p_star(2.0 / 3.0, 0.5, 4096, 40).unwrap();
        assert!((p - 0.618).abs() <= 0.01, "p* = {p}");
        assert!((0.5..=2.0 / 3.0).contains(&p));
    }

    #[test]
    fn p_star_rejects_bad_parameters() {
        assert!(compute_p_star(0.4f64, 0.3, 256, 10).is_err());
        assert!(compute_p_star(0.5f64, 0.7, 256, 10).is_err());
    }

    #[test]
    fn diagonal_transform_monotone_and_endpoint_fixing() {
        let p_star: f64 = compute_p_star(2.0 / 3.0, 0.5, 1024, 30).unwrap();
        let pair = make_diagonal_pair(2.0 / 3.0, 0.5, p_star).unwrap();
        let t = pair.forward();

        let zero = t.transform_point(pt(0.0, 0.0)).unwrap();
        let one = t.transform_point(pt(1.0, 1.0)).unwrap();
        assert!(zero.dist(pt(0.0, 0.0)) <= DEFAULT_DEPTH_EPSILON + 1e-12);
        assert!(one.dist(pt(1.0, 1.0)) <= DEFAULT_DEPTH_EPSILON + 1e-12);

        let grid = 4096;
        let mut prev = f64::NEG_INFINITY;
        for k in 0..grid {
            let x = (k as f64 + 0.5) / grid as f64;
            let q = t.transform_point(pt(x, x)).unwrap();
            assert!(
                q.x >= prev - 1.0 / grid as f64 - 1e-9,
                "decrease at x = {x}: {} after {prev}",
                q.x
            );
            prev = prev.max(q.x);
        }
    }

    #[test]
    fn family_constructors_reject_uncovered_pieces() {
        assert!(hrs_system(0.4f64, 0.4).is_err());
        assert!(hrs_system(1.0f64, 0.5).is_err());
        assert!(diagonal_system(0.3f64, 0.3).is_err());
        assert!(make_hrs_pair(0.45f64, 0.45, 0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn target_threshold_is_forced_at_the_seam() {
        // For the 0.5 -> 0.6 pair the only valid target mask splits at 0.6:
        // (0.55, 0.55) must classify as symbol 1 under the backward source.
        let pair: HomeoPair<f64> = make_hrs_pair(0.5, 0.5, 0.6, 0.4, 0.5).unwrap();
        let g_mask = pair.backward().source().mask();
        assert_eq!(g_mask.classify(pt(0.55, 0.55)).unwrap(), 1);
        assert_eq!(g_mask.classify(pt(0.65, 0.55)).unwrap(), 2);
    }

    #[test]
    fn pull_picture_identity_is_exact_resample() {
        let pair: HomeoPair<f64> = make_hrs_pair(0.5, 0.5, 0.5, 0.5, 0.5).unwrap();
        let mut rng = SplitMix64::new(9);
        let mut src = Picture::new(64, 64);
        for row in 0..64 {
            for col in 0..64 {
                let v = rng.next_u64();
                src.put(col, row, [v as u8, (v >> 8) as u8, (v >> 16) as u8, 255]);
            }
        }
        let out = pair.warp_picture(&src, 64);
        assert_eq!(out, src);
    }

    #[test]
    fn splat_picture_identity_recovers_source() {
        let pair: HomeoPair<f64> = make_hrs_pair(0.5, 0.5, 0.5, 0.5, 0.5).unwrap();
        let mut rng = SplitMix64::new(10);
        let mut src = Picture::new(64, 64);
        for row in 0..64 {
            for col in 0..64 {
                let v = rng.next_u64();
                src.put(col, row, [v as u8, (v >> 8) as u8, (v >> 16) as u8, 255]);
            }
        }
        let out = pair.forward().splat_picture(&src, 64, 4);
        assert_eq!(out, src);
    }

    #[test]
    fn constant_source_warps_to_constant() {
        let p_star: f64 = compute_p_star(2.0 / 3.0, 0.5, 512, 25).unwrap();
        let pair = make_hrs_pair(2.0 / 3.0, 0.5, 0.5, 2.0 / 3.0, p_star).unwrap();
        let src = Picture::filled(32, 32, [10, 200, 30, 255]);
        let out = pair.warp_picture(&src, 32);
        for row in 0..32 {
            for col in 0..32 {
                assert_eq!(out.get(col, row), [10, 200, 30, 255]);
            }
        }
    }
}
