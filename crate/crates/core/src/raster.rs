//! Square occupancy and count grids over a domain rectangle.
//!
//! Rasterization convention, shared by every consumer: box coordinate
//! `u in [0, 1]` lands in cell `floor(u * resolution)`, with `u == 1` (and
//! any clamp-tolerated overshoot) folded into the last cell. Cell `(0, 0)`
//! sits at the domain's lower-left corner; PNG export flips rows so that
//! image row 0 shows the top of the domain.

use crate::geometry::{Point2, Rect};
use crate::imaging::Picture;
use crate::Real;

/// Maps a point to its cell in an `resolution^2` grid over `domain`.
/// Indices clamp into range, so callers must only pass points that are in
/// the domain up to orbit-clamp slack.
#[inline]
pub fn cell_of<F: Real>(domain: &Rect<F>, resolution: usize, p: Point2<F>) -> (usize, usize) {
    let (u, v) = domain.normalize(p);
    let res = F::of(resolution as f64);
    let clamp = |w: F| -> usize {
        let idx = (w * res).floor().f64() as i64;
        idx.clamp(0, resolution as i64 - 1) as usize
    };
    (clamp(u), clamp(v))
}

/// Center point of cell `(i, j)`.
#[inline]
pub fn cell_center<F: Real>(domain: &Rect<F>, resolution: usize, i: usize, j: usize) -> Point2<F> {
    let res = F::of(resolution as f64);
    let u = (F::of(i as f64) + F::of(0.5)) / res;
    let v = (F::of(j as f64) + F::of(0.5)) / res;
    Point2::new(
        domain.x0 + u * (domain.x1 - domain.x0),
        domain.y0 + v * (domain.y1 - domain.y0),
    )
}

/// Occupancy bitset.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BitGrid {
    resolution: usize,
    words: Vec<u64>,
}

impl BitGrid {
    pub fn new(resolution: usize) -> Self {
        let bits = resolution * resolution;
        Self {
            resolution,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    pub fn full(resolution: usize) -> Self {
        let mut g = Self::new(resolution);
        for w in &mut g.words {
            *w = u64::MAX;
        }
        // Mask the tail so popcounts stay honest.
        let bits = resolution * resolution;
        let tail = bits % 64;
        if tail != 0 {
            *g.words.last_mut().unwrap() = (1u64 << tail) - 1;
        }
        g
    }

    #[inline]
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        j * self.resolution + i
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        let idx = self.index(i, j);
        self.words[idx / 64] >> (idx % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        let idx = self.index(i, j);
        self.words[idx / 64] |= 1u64 << (idx % 64);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Occupied cells in row-major order (j outer, i inner).
    pub fn iter_occupied(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let res = self.resolution;
        (0..res).flat_map(move |j| (0..res).filter_map(move |i| self.get(i, j).then_some((i, j))))
    }

    /// 8-neighborhood dilation (occupied cells spread to all neighbors).
    pub fn dilate_one(&self) -> Self {
        let res = self.resolution;
        let mut out = Self::new(res);
        for (i, j) in self.iter_occupied() {
            let i0 = i.saturating_sub(1);
            let j0 = j.saturating_sub(1);
            for jj in j0..=(j + 1).min(res - 1) {
                for ii in i0..=(i + 1).min(res - 1) {
                    out.set(ii, jj);
                }
            }
        }
        out
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        debug_assert_eq!(self.resolution, other.resolution);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Renders occupied cells white on black, flipping rows for image space.
    pub fn to_picture(&self) -> Picture {
        let res = self.resolution;
        let mut pic = Picture::new(res, res);
        for (i, j) in self.iter_occupied() {
            pic.put(i, res - 1 - j, [255, 255, 255, 255]);
        }
        pic
    }
}

/// Visit-count grid; the occupancy view is `count > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CountGrid {
    resolution: usize,
    counts: Vec<u32>,
}

impl CountGrid {
    pub fn new(resolution: usize) -> Self {
        Self {
            resolution,
            counts: vec![0; resolution * resolution],
        }
    }

    #[inline]
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    #[inline]
    pub fn bump(&mut self, i: usize, j: usize) {
        self.counts[j * self.resolution + i] += 1;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.counts[j * self.resolution + i]
    }

    pub fn max(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Additive merge; the parallel chaos game combines per-orbit grids with
    /// this, which keeps the result independent of merge order.
    pub fn merge_add(&mut self, other: &Self) {
        debug_assert_eq!(self.resolution, other.resolution);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn occupancy(&self) -> BitGrid {
        let mut bits = BitGrid::new(self.resolution);
        for j in 0..self.resolution {
            for i in 0..self.resolution {
                if self.get(i, j) > 0 {
                    bits.set(i, j);
                }
            }
        }
        bits
    }

    /// Total visits, for overlap statistics.
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Sum over cells of `min(self, other)`: how much visit mass the two
    /// grids share.
    pub fn overlap_mass(&self, other: &Self) -> u64 {
        debug_assert_eq!(self.resolution, other.resolution);
        self.counts
            .iter()
            .zip(&other.counts)
            .map(|(&a, &b)| a.min(b) as u64)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_mapping_clamps_the_upper_edge() {
        let dom = Rect::unit();
        assert_eq!(cell_of(&dom, 4, Point2::new(0.0f64, 0.0)), (0, 0));
        assert_eq!(cell_of(&dom, 4, Point2::new(1.0f64, 1.0)), (3, 3));
        assert_eq!(cell_of(&dom, 4, Point2::new(0.25f64, 0.5)), (1, 2));
    }

    #[test]
    fn centers_roundtrip_through_cell_of() {
        let dom = Rect::new(-1.0f64, 3.0, 0.0, 2.0);
        for j in 0..8 {
            for i in 0..8 {
                let c = cell_center(&dom, 8, i, j);
                assert_eq!(cell_of(&dom, 8, c), (i, j));
            }
        }
    }

    #[test]
    fn full_grid_popcount_handles_tail_words() {
        let g = BitGrid::full(5);
        assert_eq!(g.count(), 25);
    }

    #[test]
    fn dilation_and_subset() {
        let mut g = BitGrid::new(8);
        g.set(3, 3);
        let d = g.dilate_one();
        assert_eq!(d.count(), 9);
        assert!(g.is_subset_of(&d));
        assert!(!d.is_subset_of(&g));
    }

    #[test]
    fn count_grid_merge_and_overlap() {
        let mut a = CountGrid::new(2);
        let mut b = CountGrid::new(2);
        a.bump(0, 0);
        a.bump(0, 0);
        b.bump(0, 0);
        b.bump(1, 1);
        assert_eq!(a.overlap_mass(&b), 1);
        a.merge_add(&b);
        assert_eq!(a.get(0, 0), 3);
        assert_eq!(a.total(), 4);
        assert_eq!(a.occupancy().count(), 2);
    }
}
