//! Diagnostic renderers: escape-time pictures of the overlapping-pair
//! repeller dynamics and grayscale attractor densities.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::ifs::{IfsSystem, ProbabilityVector};
use crate::imaging::Picture;
use crate::Real;
use rayon::prelude::*;

/// Margin around the unit square; orbits chatter across the box edge, so a
/// strict unit-square test would flip boundary cells between runs.
const ESCAPE_SLACK: f64 = 0.01;

/// One step of the expansive overlap dynamics for the diagonal pair with
/// ratios `a >= b`: the inverse of the first branch on the lower half-plane
/// `x + y <= 1`, the inverse of the second elsewhere. Both corners `(0,0)`
/// and `(1,1)` are fixed exactly.
#[inline]
pub fn repeller_step<F: Real>(a: F, b: F, p: Point2<F>) -> Point2<F> {
    let one = F::one();
    if p.x + p.y <= one {
        Point2::new(p.x / a, p.y / b)
    } else {
        Point2::new((p.x - one + b) / b, (p.y - one + a) / a)
    }
}

/// Escape-time picture of the repeller: each pixel center in the unit square
/// iterates the overlap dynamics until it leaves the slack box or `max_iter`
/// runs out. Gray level is the escape step count scaled linearly to
/// `[0, 255)`; points that never escape render white.
pub fn render_repeller_escape<F: Real>(
    a: F,
    b: F,
    resolution: usize,
    max_iter: usize,
) -> Result<Picture> {
    let af = a.f64();
    let bf = b.f64();
    if !(bf > 0.0 && af >= bf && af + bf >= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "repeller ratios need a >= b > 0 and a + b >= 1, got ({af}, {bf})"
        )));
    }
    if resolution == 0 || max_iter == 0 {
        return Err(Error::InvalidConfig(
            "repeller render needs resolution >= 1 and max_iter >= 1".into(),
        ));
    }
    let mut out = Picture::new(resolution, resolution);
    let lo = -ESCAPE_SLACK;
    let hi = 1.0 + ESCAPE_SLACK;
    let rows: Vec<(usize, &mut [u8])> = out
        .data_mut()
        .chunks_mut(resolution * 4)
        .enumerate()
        .collect();
    rows.into_par_iter().for_each(|(row, chunk)| {
        for col in 0..resolution {
            let mut p = Point2::new(
                (col as f64 + 0.5) / resolution as f64,
                1.0 - (row as f64 + 0.5) / resolution as f64,
            );
            let mut level = 255u8;
            for i in 0..max_iter {
                p = repeller_step(af, bf, p);
                if p.x < lo || p.x > hi || p.y < lo || p.y > hi {
                    level = (i * 255 / max_iter) as u8;
                    break;
                }
            }
            chunk[col * 4..col * 4 + 4].copy_from_slice(&[level, level, level, 255]);
        }
    });
    Ok(out)
}

/// Grayscale picture of log-scaled chaos-game visit counts: the brightest
/// cell is the most visited one, unvisited cells are black. Bit-reproducible
/// for a given `(seed, n)`.
pub fn render_attractor_density<F: Real>(
    ifs: &IfsSystem<F>,
    probs: &ProbabilityVector,
    n: usize,
    seed: u64,
    resolution: usize,
) -> Result<Picture> {
    let counts = ifs.attractor_chaos_game(probs, n, seed, resolution)?;
    let denom = (1.0 + counts.max() as f64).ln();
    let mut out = Picture::new(resolution, resolution);
    for row in 0..resolution {
        for col in 0..resolution {
            let c = counts.get(col, resolution - 1 - row);
            let v = ((1.0 + c as f64).ln() / denom * 255.0).round() as u8;
            out.put(col, row, [v, v, v, 255]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AffineMap2, MapVariant, Rect};

    #[test]
    fn unit_ratios_never_escape() {
        let pic = render_repeller_escape(1.0, 1.0, 16, 8).unwrap();
        assert!(pic
            .data()
            .chunks_exact(4)
            .all(|px| px == [255, 255, 255, 255]));
    }

    #[test]
    fn corner_fixed_points_stay_put() {
        let a = 2.0 / 3.0;
        let b = 0.5;
        let mut lo = Point2::new(0.0, 0.0);
        let mut hi = Point2::new(1.0, 1.0);
        for _ in 0..64 {
            lo = repeller_step(a, b, lo);
            hi = repeller_step(a, b, hi);
        }
        assert_eq!((lo.x, lo.y), (0.0, 0.0));
        assert_eq!((hi.x, hi.y), (1.0, 1.0));
    }

    #[test]
    fn golden_repeller_is_transpose_symmetric() {
        let res = 128;
        let pic = render_repeller_escape(2.0 / 3.0, 0.5, res, 48).unwrap();
        // The dynamics commutes with (x,y) -> (1-y, 1-x), which on pixel
        // rasters is exactly the transpose.
        let mut agree = 0usize;
        for row in 0..res {
            for col in 0..res {
                if pic.get(col, row) == pic.get(row, col) {
                    agree += 1;
                }
            }
        }
        assert!(
            agree as f64 >= 0.99 * (res * res) as f64,
            "only {agree} of {} transpose-symmetric",
            res * res
        );
        assert!(
            pic.data().chunks_exact(4).any(|px| px[0] < 255),
            "escape structure missing"
        );
    }

    #[test]
    fn repeller_rejects_bad_ratios() {
        assert!(render_repeller_escape(0.5, 0.4, 8, 8).is_err());
        assert!(render_repeller_escape(0.4, 0.5, 8, 8).is_err());
        assert!(render_repeller_escape(0.6, 0.6, 8, 0).is_err());
    }

    #[test]
    fn single_map_density_lights_its_fixed_point() {
        let ifs = IfsSystem::new(
            vec![MapVariant::Affine(AffineMap2::scale_translate(
                0.5, 0.25, 0.5, 0.25,
            ))],
            Rect::unit(),
            0.5,
        )
        .unwrap();
        let pic =
            render_attractor_density(&ifs, &ProbabilityVector::uniform(1), 1000, 5, 8).unwrap();
        assert_eq!(pic.get(4, 3), [255, 255, 255, 255]);
        let bright = pic
            .data()
            .chunks_exact(4)
            .filter(|px| px[0] > 0)
            .count();
        assert_eq!(bright, 1, "orbit should collapse to the fixed point");
    }

    #[test]
    fn density_tracks_the_invariant_measure() {
        let ifs = IfsSystem::new(
            vec![
                MapVariant::Affine(AffineMap2::scale_translate(0.5, 0.0, 0.5, 0.0)),
                MapVariant::Affine(AffineMap2::scale_translate(0.5, 0.5, 0.5, 0.0)),
            ],
            Rect::unit(),
            0.5,
        )
        .unwrap();
        let res = 32;
        let uniform =
            render_attractor_density(&ifs, &ProbabilityVector::uniform(2), 100_000, 9, res)
                .unwrap();
        // The embedded attractor is the bottom pixel row; equal weights give
        // it near-uniform brightness.
        for col in 0..res {
            assert!(uniform.get(col, res - 1)[0] >= 200, "dim cell {col}");
            for row in 0..res - 1 {
                assert_eq!(uniform.get(col, row)[0], 0, "stray light at {col},{row}");
            }
        }
        let skewed = render_attractor_density(
            &ifs,
            &ProbabilityVector::new(vec![0.1, 0.9]).unwrap(),
            100_000,
            9,
            res,
        )
        .unwrap();
        let mean = |pic: &Picture, range: std::ops::Range<usize>| {
            range.clone().map(|c| pic.get(c, res - 1)[0] as f64).sum::<f64>()
                / range.len() as f64
        };
        assert!(
            mean(&skewed, res / 2..res) > mean(&skewed, 0..res / 2) + 10.0,
            "mass should lean toward the second map's fixed point"
        );
    }

    #[test]
    fn density_renders_are_seed_reproducible() {
        let ifs = IfsSystem::new(
            vec![
                MapVariant::Affine(AffineMap2::scale_translate(0.5, 0.0, 0.5, 0.0)),
                MapVariant::Affine(AffineMap2::scale_translate(0.5, 0.5, 0.5, 0.5)),
            ],
            Rect::unit(),
            0.5,
        )
        .unwrap();
        let probs = ProbabilityVector::uniform(2);
        let one = render_attractor_density(&ifs, &probs, 10_000, 11, 64).unwrap();
        let two = render_attractor_density(&ifs, &probs, 10_000, 11, 64).unwrap();
        let other = render_attractor_density(&ifs, &probs, 10_000, 12, 64).unwrap();
        assert_eq!(one, two);
        assert_ne!(one, other);
    }
}
