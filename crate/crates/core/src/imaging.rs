//! Pictures and the imaging applications of fractal transformations:
//! color-stealing, fractal filters, masked packing, and measure-coupled
//! encoding.
//!
//! A picture is an RGBA8 raster spanning a domain rectangle: pixel
//! `(col, row)` has its center at box coordinates
//! `((col + 0.5) / width, 1 - (row + 0.5) / height)`, so row 0 is the top of
//! the domain. Unpainted pixels carry alpha 0, distinct from painted black.
//! Sampling is nearest-neighbor throughout; fractal warps are non-smooth and
//! interpolation would only blur their structure.

use crate::error::{Error, Result};
use crate::geometry::{Point2, Rect};
use crate::ifs::{IfsSystem, ProbabilityVector};
use crate::rng::SplitMix64;
use crate::sections::{split_y_regions, Mask};
use crate::tol::{self, Tolerances};
use crate::transform::{FractalTransform, HomeoPair, SectionSystem, OWNER_COLLIDED};
use crate::Real;
use rayon::prelude::*;
use std::path::Path;

pub const TRANSPARENT: [u8; 4] = [0, 0, 0, 0];

/// Row-major RGBA8 raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Picture {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Picture {
    /// A fully transparent picture.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "pictures need at least one pixel");
        Self { width, height, data: vec![0; width * height * 4] }
    }

    pub fn filled(width: usize, height: usize, rgba: [u8; 4]) -> Self {
        let mut p = Self::new(width, height);
        for px in p.data.chunks_exact_mut(4) {
            px.copy_from_slice(&rgba);
        }
        p
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height * 4 {
            return Err(Error::InvalidConfig(format!(
                "raw picture buffer of {} bytes does not match {}x{} RGBA",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, data })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    #[inline]
    fn idx(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.width && row < self.height);
        (row * self.width + col) * 4
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> [u8; 4] {
        let i = self.idx(col, row);
        [self.data[i], self.data[i + 1], self.data[i + 2], self.data[i + 3]]
    }

    #[inline]
    pub fn put(&mut self, col: usize, row: usize, rgba: [u8; 4]) {
        let i = self.idx(col, row);
        self.data[i..i + 4].copy_from_slice(&rgba);
    }

    #[inline]
    pub fn is_painted(&self, col: usize, row: usize) -> bool {
        self.data[self.idx(col, row) + 3] != 0
    }

    /// Pixel indices of the domain point, under the center convention; points
    /// on or past the far edges clamp to the last pixel.
    #[inline]
    pub fn pixel_of<F: Real>(&self, domain: &Rect<F>, p: Point2<F>) -> (usize, usize) {
        let (u, v) = domain.normalize(p);
        let col = (u.f64() * self.width as f64).floor() as isize;
        let row = ((1.0 - v.f64()) * self.height as f64).floor() as isize;
        (
            col.clamp(0, self.width as isize - 1) as usize,
            row.clamp(0, self.height as isize - 1) as usize,
        )
    }

    /// Domain point at the center of a pixel.
    #[inline]
    pub fn pixel_center<F: Real>(&self, domain: &Rect<F>, col: usize, row: usize) -> Point2<F> {
        let u = F::of((col as f64 + 0.5) / self.width as f64);
        let v = F::of(1.0 - (row as f64 + 0.5) / self.height as f64);
        domain.at(u, v)
    }

    /// Nearest-neighbor sample at a domain point.
    #[inline]
    pub fn sample_in<F: Real>(&self, domain: &Rect<F>, p: Point2<F>) -> [u8; 4] {
        let (col, row) = self.pixel_of(domain, p);
        self.get(col, row)
    }

    /// Nearest-neighbor resample to a new resolution over the same domain.
    pub fn resample(&self, width: usize, height: usize) -> Picture {
        let domain: Rect<f64> = Rect::unit();
        let mut out = Picture::new(width, height);
        for row in 0..height {
            for col in 0..width {
                let p = out.pixel_center(&domain, col, row);
                out.put(col, row, self.sample_in(&domain, p));
            }
        }
        out
    }

    /// Replaces transparency with an opaque backdrop color.
    pub fn over_background(&self, rgb: [u8; 3]) -> Picture {
        let mut out = self.clone();
        for px in out.data.chunks_exact_mut(4) {
            if px[3] == 0 {
                px[0] = rgb[0];
                px[1] = rgb[1];
                px[2] = rgb[2];
            }
            px[3] = 255;
        }
        out
    }

    pub fn load_png(path: impl AsRef<Path>) -> Result<Picture> {
        let img = image::open(path)?.to_rgba8();
        let (w, h) = (img.width() as usize, img.height() as usize);
        Picture::from_raw(w, h, img.into_raw())
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let img = image::RgbaImage::from_raw(
            self.width as u32,
            self.height as u32,
            self.data.clone(),
        )
        .expect("picture buffer length is self-consistent");
        img.save(path)?;
        Ok(())
    }

    /// Single-pass hole fill: every unpainted pixel takes the majority color
    /// of its painted 8-neighbors (ties to the smallest RGBA bytes), reading
    /// only pre-pass state so the fill cannot cascade. Pixels with no painted
    /// neighbor stay transparent.
    pub fn fill_holes_majority(&self) -> Picture {
        let mut out = self.clone();
        for row in 0..self.height {
            for col in 0..self.width {
                if self.is_painted(col, row) {
                    continue;
                }
                let mut votes: Vec<([u8; 4], u32)> = Vec::with_capacity(8);
                for dr in -1isize..=1 {
                    for dc in -1isize..=1 {
                        if dr == 0 && dc == 0 {
                            continue;
                        }
                        let (nc, nr) = (col as isize + dc, row as isize + dr);
                        if nc < 0
                            || nr < 0
                            || nc >= self.width as isize
                            || nr >= self.height as isize
                        {
                            continue;
                        }
                        let (nc, nr) = (nc as usize, nr as usize);
                        if !self.is_painted(nc, nr) {
                            continue;
                        }
                        let color = self.get(nc, nr);
                        match votes.iter_mut().find(|(c, _)| *c == color) {
                            Some((_, n)) => *n += 1,
                            None => votes.push((color, 1)),
                        }
                    }
                }
                if let Some((color, _)) = votes
                    .iter()
                    .max_by(|(ca, na), (cb, nb)| na.cmp(nb).then(cb.cmp(ca)))
                {
                    out.put(col, row, *color);
                }
            }
        }
        out
    }
}

/// Fraction of pixel positions whose RGBA bytes agree exactly.
pub fn exact_match_fraction(a: &Picture, b: &Picture) -> f64 {
    assert_eq!(
        (a.width, a.height),
        (b.width, b.height),
        "pictures must share dimensions"
    );
    let total = a.width * a.height;
    let matches = (0..total)
        .filter(|&i| a.data[i * 4..i * 4 + 4] == b.data[i * 4..i * 4 + 4])
        .count();
    matches as f64 / total as f64
}

/// Mean absolute error over the RGB channels (alpha ignored).
pub fn mean_absolute_error(a: &Picture, b: &Picture) -> f64 {
    assert_eq!(
        (a.width, a.height),
        (b.width, b.height),
        "pictures must share dimensions"
    );
    let mut acc = 0u64;
    for (pa, pb) in a.data.chunks_exact(4).zip(b.data.chunks_exact(4)) {
        for ch in 0..3 {
            acc += (pa[ch] as i64 - pb[ch] as i64).unsigned_abs();
        }
    }
    acc as f64 / (a.width * a.height * 3) as f64
}

/// Peak signal-to-noise ratio in dB over RGB; infinite for identical inputs.
pub fn psnr(a: &Picture, b: &Picture) -> f64 {
    assert_eq!(
        (a.width, a.height),
        (b.width, b.height),
        "pictures must share dimensions"
    );
    let mut acc = 0f64;
    for (pa, pb) in a.data.chunks_exact(4).zip(b.data.chunks_exact(4)) {
        for ch in 0..3 {
            let d = pa[ch] as f64 - pb[ch] as f64;
            acc += d * d;
        }
    }
    let mse = acc / (a.width * a.height * 3) as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0f64 * 255.0 / mse).log10()
    }
}

/// Paints the attractor of `drawing` by stealing colors from `palette`:
/// each attractor pixel takes its address under the drawing's section and
/// looks up the point with that address in the palette system, sampling
/// `palette` there. Pixels off the attractor, or whose orbits fail
/// numerically, stay transparent.
pub fn color_steal<F: Real>(
    drawing: &SectionSystem<F>,
    palette_ifs: &IfsSystem<F>,
    palette: &Picture,
    out_resolution: usize,
) -> Result<Picture> {
    if drawing.ifs().len() != palette_ifs.len() {
        return Err(Error::InvalidSystem(format!(
            "drawing has {} maps but the palette system has {}",
            drawing.ifs().len(),
            palette_ifs.len()
        )));
    }
    let tols = Tolerances::default();
    let gate = drawing
        .ifs()
        .attractor_raster_stable(out_resolution, tol::MASK_ATTRACTOR_ITERS)?;
    let mut out = Picture::new(out_resolution, out_resolution);
    let width = out_resolution;
    let domain = *drawing.ifs().domain();
    let pal_domain = *palette_ifs.domain();
    let seed = pal_domain.center();
    let rows: Vec<(usize, &mut [u8])> = out
        .data_mut()
        .chunks_mut(width * 4)
        .enumerate()
        .collect();
    rows.into_par_iter().for_each(|(row, chunk)| {
        for col in 0..width {
            if !gate.get(col, width - 1 - row) {
                continue;
            }
            let u = F::of((col as f64 + 0.5) / width as f64);
            let v = F::of(1.0 - (row as f64 + 0.5) / width as f64);
            let stolen = drawing
                .address_with(domain.at(u, v), &tols)
                .and_then(|addr| palette_ifs.coding_point(&addr, seed));
            match stolen {
                Ok(q) => {
                    let color = palette.sample_in(&pal_domain, q);
                    chunk[col * 4..col * 4 + 4].copy_from_slice(&color);
                }
                Err(e) => debug_assert!(e.is_numeric(), "unexpected stealing failure: {e}"),
            }
        }
    });
    Ok(out)
}

/// Fractal filter: warps `img` onto the pair's other system at a coarser
/// grid resolution and warps it back at full size. The downstream warp
/// quantizes in the warped geometry, so the filter blocks detail along
/// fractal structure lines instead of the pixel lattice. Applying the same
/// filter twice changes almost nothing: the second pass re-quantizes values
/// that are already constant on the warped grid cells.
pub fn fractal_filter<F: Real>(
    img: &Picture,
    pair: &HomeoPair<F>,
    grid_resolution: usize,
) -> Result<Picture> {
    if img.width() != img.height() {
        return Err(Error::InvalidConfig(format!(
            "filter needs a square picture, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    if grid_resolution == 0 || grid_resolution > img.width() {
        return Err(Error::InvalidConfig(format!(
            "grid resolution {} outside 1..={}",
            grid_resolution,
            img.width()
        )));
    }
    let warped = pair.warp_picture(img, grid_resolution);
    Ok(pair.unwarp_picture(&warped, img.width()))
}

/// Packs several pictures into one canvas over `g`'s attractor. Source `j`
/// is splatted through the transform keyed by its mask threshold `p_j`
/// (thresholds split the second coordinate, matching the band geometry of
/// the two-map packing systems); cells claimed by two different sources turn
/// white. Returns the filled canvas and the fraction of painted cells that
/// collided.
pub fn pack_masked<F: Real>(
    sources: &[(Picture, F)],
    f_template: &IfsSystem<F>,
    g: &IfsSystem<F>,
    out_resolution: usize,
    supersample: usize,
) -> Result<(Picture, f64)> {
    if sources.is_empty() {
        return Err(Error::InvalidConfig("nothing to pack".into()));
    }
    if sources.len() > 254 {
        return Err(Error::InvalidConfig("at most 254 sources".into()));
    }
    for (i, (_, pi)) in sources.iter().enumerate() {
        for (_, pj) in &sources[i + 1..] {
            if *pi == *pj {
                return Err(Error::InvalidConfig(format!(
                    "duplicate pack threshold {}",
                    pi.f64()
                )));
            }
        }
    }
    let mut canvas = Picture::new(out_resolution, out_resolution);
    let mut owner = vec![0u8; out_resolution * out_resolution];
    let mut depth = vec![f32::INFINITY; out_resolution * out_resolution];
    for (j, (picture, p)) in sources.iter().enumerate() {
        let mask = Mask::new(split_y_regions(*p), f_template)?;
        let section = SectionSystem::with_default_depth(f_template.clone(), mask)?;
        let transform = FractalTransform::new(section, g.clone())?;
        transform.splat_into(
            picture,
            &mut canvas,
            &mut owner,
            &mut depth,
            (j + 1) as u8,
            supersample,
        );
    }
    let painted = owner.iter().filter(|&&o| o != 0).count();
    let collided = owner.iter().filter(|&&o| o == OWNER_COLLIDED).count();
    let fraction = if painted == 0 {
        0.0
    } else {
        collided as f64 / painted as f64
    };
    Ok((canvas.fill_holes_majority(), fraction))
}

/// Recovers one source from a packed canvas by pulling it back through the
/// transform keyed by that source's mask threshold. Collision cells come
/// back white and holes come back as whatever the majority fill chose, so
/// recovery is approximate where sources fought over cells.
pub fn unpack_masked<F: Real>(
    combined: &Picture,
    p: F,
    f_template: &IfsSystem<F>,
    g: &IfsSystem<F>,
    out_resolution: usize,
) -> Result<Picture> {
    let mask = Mask::new(split_y_regions(p), f_template)?;
    let section = SectionSystem::with_default_depth(f_template.clone(), mask)?;
    let transform = FractalTransform::new(section, g.clone())?;
    Ok(transform.pull_picture(combined, out_resolution))
}

/// One picture-bearing system for measure-coupled encoding.
#[derive(Clone, Debug)]
pub struct MeasureSource<F: Real> {
    pub picture: Picture,
    pub ifs: IfsSystem<F>,
    pub probs: ProbabilityVector,
    pub iterations: usize,
}

/// Encodes pictures as colored stationary measures on a shared carrier
/// system: each source runs a chaos-game orbit, advancing its own system and
/// the carrier with the same symbol stream, and paints the carrier position
/// with the source picture's color at the source position. Later sources
/// overwrite earlier ones where their measures overlap. Source `i` draws
/// from a stream seeded with `seed ^ i`, so a single-source encoding uses
/// `seed` itself and a decode with the same seed replays it exactly.
pub fn encode_measure<F: Real>(
    sources: &[MeasureSource<F>],
    carrier: &IfsSystem<F>,
    out_resolution: usize,
    seed: u64,
) -> Result<Picture> {
    let mut out = Picture::new(out_resolution, out_resolution);
    let carrier_domain = *carrier.domain();
    for (idx, src) in sources.iter().enumerate() {
        if src.ifs.len() != carrier.len() {
            return Err(Error::InvalidSystem(format!(
                "source {} has {} maps but the carrier has {}",
                idx,
                src.ifs.len(),
                carrier.len()
            )));
        }
        if src.probs.len() != src.ifs.len() {
            return Err(Error::BadProbabilities(format!(
                "{} weights for {} maps",
                src.probs.len(),
                src.ifs.len()
            )));
        }
        let mut rng = SplitMix64::new(seed ^ idx as u64);
        let source_domain = *src.ifs.domain();
        let mut x = source_domain.at(F::zero(), F::zero());
        let mut z = carrier_domain.at(F::zero(), F::zero());
        for _ in 0..src.iterations {
            let sym = (src.probs.draw(&mut rng) + 1) as u8;
            x = src.ifs.map(sym).apply(x)?;
            z = carrier.map(sym).apply(z)?;
            let (col, row) = out.pixel_of(&carrier_domain, z);
            let color = src.picture.sample_in(&source_domain, x);
            out.put(col, row, color);
        }
    }
    Ok(out)
}

/// Decodes one source from a measure encoding by replaying the coupled
/// orbit: the output is painted at the source position with the encoded
/// picture's color (alpha included) at the carrier position. With the
/// encoding seed the replay is exact; a fresh seed still converges onto the
/// same measure, it just visits cells in a different order.
pub fn decode_measure<F: Real>(
    encoded: &Picture,
    source_ifs: &IfsSystem<F>,
    probs: &ProbabilityVector,
    carrier: &IfsSystem<F>,
    iterations: usize,
    seed: u64,
    out_resolution: usize,
) -> Result<Picture> {
    if source_ifs.len() != carrier.len() {
        return Err(Error::InvalidSystem(format!(
            "source has {} maps but the carrier has {}",
            source_ifs.len(),
            carrier.len()
        )));
    }
    if probs.len() != source_ifs.len() {
        return Err(Error::BadProbabilities(format!(
            "{} weights for {} maps",
            probs.len(),
            source_ifs.len()
        )));
    }
    let mut out = Picture::new(out_resolution, out_resolution);
    let source_domain = *source_ifs.domain();
    let carrier_domain = *carrier.domain();
    let mut rng = SplitMix64::new(seed);
    let mut x = source_domain.at(F::zero(), F::zero());
    let mut z = carrier_domain.at(F::zero(), F::zero());
    for _ in 0..iterations {
        let sym = (probs.draw(&mut rng) + 1) as u8;
        x = source_ifs.map(sym).apply(x)?;
        z = carrier.map(sym).apply(z)?;
        let (col, row) = out.pixel_of(&source_domain, x);
        out.put(col, row, encoded.sample_in(&carrier_domain, z));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AffineMap2, MapVariant};
    use crate::sections::quadrant_regions;
    use crate::transform::{diagonal_system, hrs_system, make_hrs_pair, WHITE};

    fn random_picture(width: usize, height: usize, seed: u64) -> Picture {
        let mut rng = SplitMix64::new(seed);
        let mut pic = Picture::new(width, height);
        for row in 0..height {
            for col in 0..width {
                let bits = rng.next_u64();
                pic.put(
                    col,
                    row,
                    [
                        (bits & 0xff) as u8,
                        ((bits >> 8) & 0xff) as u8,
                        ((bits >> 16) & 0xff) as u8,
                        255,
                    ],
                );
            }
        }
        pic
    }

    fn blocky_picture(side: usize, block: usize, seed: u64) -> Picture {
        let mut rng = SplitMix64::new(seed);
        let blocks = side.div_ceil(block);
        let mut colors = Vec::new();
        for _ in 0..blocks * blocks {
            let bits = rng.next_u64();
            colors.push([
                (bits & 0xff) as u8,
                ((bits >> 8) & 0xff) as u8,
                ((bits >> 16) & 0xff) as u8,
                255,
            ]);
        }
        let mut pic = Picture::new(side, side);
        for row in 0..side {
            for col in 0..side {
                pic.put(col, row, colors[(row / block) * blocks + col / block]);
            }
        }
        pic
    }

    /// Coordinate-swapping band pair: two-map systems whose pieces stack in
    /// the second coordinate, leaving a mask threshold range of [0.4, 0.6]
    /// for the first and the whole square as attractor for both.
    fn packing_systems() -> (IfsSystem<f64>, IfsSystem<f64>) {
        let f = IfsSystem::new(
            vec![
                MapVariant::Affine(AffineMap2::new(0.0, 1.0, -0.6, 0.0, 0.0, 0.6)),
                MapVariant::Affine(AffineMap2::new(0.0, 1.0, 0.6, 0.0, 0.0, 0.4)),
            ],
            Rect::unit(),
            0.6f64.sqrt(),
        )
        .unwrap();
        let g = IfsSystem::new(
            vec![
                MapVariant::Affine(AffineMap2::new(0.0, 1.0, -0.5, 0.0, 0.0, 0.5)),
                MapVariant::Affine(AffineMap2::new(0.0, 1.0, 0.5, 0.0, 0.0, 0.5)),
            ],
            Rect::unit(),
            0.5f64.sqrt(),
        )
        .unwrap();
        (f, g)
    }

    #[test]
    fn pixel_conventions_row_zero_is_top() {
        let pic = Picture::new(8, 8);
        let unit: Rect<f64> = Rect::unit();
        let c = pic.pixel_center(&unit, 0, 0);
        assert!((c.x - 0.0625).abs() < 1e-12 && (c.y - 0.9375).abs() < 1e-12);
        assert_eq!(pic.pixel_of(&unit, c), (0, 0));
        assert_eq!(pic.pixel_of(&unit, Point2::new(1.0, 0.0)), (7, 7));
        assert_eq!(pic.pixel_of(&unit, Point2::new(0.0, 1.0)), (0, 0));
    }

    #[test]
    fn png_round_trip_preserves_bytes() {
        let pic = random_picture(13, 7, 42);
        let path = std::env::temp_dir().join("ifswarp_png_roundtrip_test.png");
        pic.save_png(&path).unwrap();
        let back = Picture::load_png(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(pic, back);
    }

    #[test]
    fn majority_fill_votes_and_breaks_ties_low() {
        let red = [200, 0, 0, 255];
        let blue = [0, 0, 200, 255];
        let mut pic = Picture::new(3, 3);
        pic.put(0, 0, red);
        pic.put(1, 0, red);
        pic.put(2, 0, red);
        pic.put(0, 1, blue);
        pic.put(2, 1, blue);
        let filled = pic.fill_holes_majority();
        assert_eq!(filled.get(1, 1), red, "three reds outvote two blues");
        assert_eq!(filled.get(0, 0), red, "painted pixels stay put");

        let mut far = Picture::new(5, 5);
        far.put(0, 0, red);
        assert!(!far.fill_holes_majority().is_painted(3, 3));

        let mut tie = Picture::new(3, 1);
        tie.put(0, 0, blue);
        tie.put(2, 0, red);
        assert_eq!(tie.fill_holes_majority().get(1, 0), blue);
    }

    #[test]
    fn metrics_agree_on_simple_cases() {
        let a = Picture::filled(4, 4, [10, 20, 30, 255]);
        let mut b = a.clone();
        assert_eq!(exact_match_fraction(&a, &b), 1.0);
        assert_eq!(psnr(&a, &b), f64::INFINITY);
        b.put(0, 0, [11, 20, 30, 255]);
        assert!((exact_match_fraction(&a, &b) - 15.0 / 16.0).abs() < 1e-12);
        assert!((mean_absolute_error(&a, &b) - 1.0 / 48.0).abs() < 1e-12);
        assert!(psnr(&a, &b) > 40.0);
    }

    #[test]
    fn stealing_from_the_same_system_resamples_the_palette() {
        let ifs = hrs_system(0.5, 0.5).unwrap();
        let mask = Mask::new(quadrant_regions(0.5), &ifs).unwrap();
        let drawing = SectionSystem::with_default_depth(ifs.clone(), mask).unwrap();
        let palette = random_picture(64, 64, 7);
        let out = color_steal(&drawing, &ifs, &palette, 64).unwrap();
        assert_eq!(out, palette);
    }

    #[test]
    fn palette_permutation_permutes_the_stolen_colors() {
        let f = hrs_system(2.0 / 3.0, 0.5).unwrap();
        let g = hrs_system(0.5, 2.0 / 3.0).unwrap();
        let mask = Mask::new(quadrant_regions(0.618), &f).unwrap();
        let drawing = SectionSystem::with_default_depth(f, mask).unwrap();
        let p1 = random_picture(32, 32, 11);
        let mut p2 = p1.clone();
        for row in 0..32 {
            for col in 0..32 {
                let [r, gch, b, a] = p1.get(col, row);
                p2.put(col, row, [gch, b, r, a]);
            }
        }
        let s1 = color_steal(&drawing, &g, &p1, 48).unwrap();
        let s2 = color_steal(&drawing, &g, &p2, 48).unwrap();
        for row in 0..48 {
            for col in 0..48 {
                let [r, gch, b, a] = s1.get(col, row);
                assert_eq!(s2.get(col, row), [gch, b, r, a]);
            }
        }
    }

    #[test]
    fn stealing_rejects_mismatched_map_counts() {
        let ifs = hrs_system(0.5, 0.5).unwrap();
        let mask = Mask::new(quadrant_regions(0.5), &ifs).unwrap();
        let drawing = SectionSystem::with_default_depth(ifs, mask).unwrap();
        let (two, _) = packing_systems();
        assert!(color_steal(&drawing, &two, &Picture::new(4, 4), 16).is_err());
    }

    #[test]
    fn identity_filter_at_full_grid_is_exact() {
        let pair = make_hrs_pair(0.5, 0.5, 0.5, 0.5, 0.5).unwrap();
        let img = random_picture(64, 64, 3);
        let filtered = fractal_filter(&img, &pair, 64).unwrap();
        assert_eq!(filtered, img);
    }

    #[test]
    fn identity_filter_at_half_grid_blocks_pixels() {
        let pair = make_hrs_pair(0.5, 0.5, 0.5, 0.5, 0.5).unwrap();
        let img = random_picture(64, 64, 4);
        let filtered = fractal_filter(&img, &pair, 32).unwrap();
        // The depth-11 coding of a dyadic pixel center lands 2^-12 below the
        // true center in both coordinates (the tail orbit parks at the corner
        // (1, 1)), so half-grid sampling resolves its boundary ties toward
        // the even column and, with the row flip, the odd row.
        for row in 0..64 {
            for col in 0..64 {
                assert_eq!(filtered.get(col, row), img.get(col & !1, row | 1));
            }
        }
    }

    #[test]
    fn identity_filter_is_idempotent() {
        let pair = make_hrs_pair(0.5, 0.5, 0.5, 0.5, 0.5).unwrap();
        let img = random_picture(64, 64, 5);
        let once = fractal_filter(&img, &pair, 32).unwrap();
        let twice = fractal_filter(&once, &pair, 32).unwrap();
        assert_eq!(twice, once);
    }

    #[test]
    fn filter_rejects_bad_grids() {
        let pair = make_hrs_pair(0.5, 0.5, 0.5, 0.5, 0.5).unwrap();
        let img = random_picture(16, 16, 6);
        assert!(fractal_filter(&img, &pair, 0).is_err());
        assert!(fractal_filter(&img, &pair, 17).is_err());
        assert!(fractal_filter(&Picture::new(4, 8), &pair, 4).is_err());
    }

    #[test]
    // Exact recovery is only meaningful for locally constant pictures: the
    // transform's measure distortion makes several source pixels share a
    // canvas cell at equal resolutions, so per-pixel noise cannot survive the
    // round trip, while flat patches lose only their boundary pixels.
    #[test]
    fn packed_picture_unpacks_to_the_source() {
        let (f, g) = packing_systems();
        let src = blocky_picture(128, 32, 8);
        let (packed, collisions) =
            pack_masked(&[(src.clone(), 0.5)], &f, &g, 128, 4).unwrap();
        assert_eq!(collisions, 0.0, "a single source never collides");
        let back = unpack_masked(&packed, 0.5, &f, &g, 128).unwrap();
        assert!(
            exact_match_fraction(&back, &src) > 0.9,
            "recovered {:.4}",
            exact_match_fraction(&back, &src)
        );
    }

    #[test]
    fn pack_rejects_duplicate_thresholds() {
        let (f, g) = packing_systems();
        let a = Picture::filled(8, 8, [255, 0, 0, 255]);
        let b = Picture::filled(8, 8, [0, 0, 255, 255]);
        assert!(pack_masked(&[(a, 0.5), (b, 0.5)], &f, &g, 32, 1).is_err());
    }

    #[test]
    fn two_sources_share_the_canvas_with_white_collisions() {
        let (f, g) = packing_systems();
        let red = Picture::filled(64, 64, [220, 30, 30, 255]);
        let blue = Picture::filled(64, 64, [30, 30, 220, 255]);
        let (packed, collisions) =
            pack_masked(&[(red, 0.44), (blue, 0.56)], &f, &g, 64, 4).unwrap();
        assert!(
            collisions > 0.0 && collisions < 0.25,
            "collision fraction {collisions}"
        );
        let mut saw = [false; 3];
        for row in 0..64 {
            for col in 0..64 {
                if !packed.is_painted(col, row) {
                    continue;
                }
                match packed.get(col, row) {
                    [220, 30, 30, 255] => saw[0] = true,
                    [30, 30, 220, 255] => saw[1] = true,
                    px if px == WHITE => saw[2] = true,
                    px => panic!("unexpected color {px:?} at ({col}, {row})"),
                }
            }
        }
        assert!(saw.iter().all(|&s| s), "want both sources and collisions");
    }

    #[test]
    fn measure_encoding_replays_exactly_with_the_same_seed() {
        let ifs = hrs_system(0.5, 0.5).unwrap();
        let src = random_picture(64, 64, 9);
        let sources = vec![MeasureSource {
            picture: src.clone(),
            ifs: ifs.clone(),
            probs: ProbabilityVector::uniform(4),
            iterations: 100_000,
        }];
        let encoded = encode_measure(&sources, &ifs, 64, 1234).unwrap();
        let decoded = decode_measure(
            &encoded,
            &ifs,
            &ProbabilityVector::uniform(4),
            &ifs,
            100_000,
            1234,
            64,
        )
        .unwrap();
        let mut painted = 0usize;
        for row in 0..64 {
            for col in 0..64 {
                if !decoded.is_painted(col, row) {
                    continue;
                }
                painted += 1;
                assert_eq!(decoded.get(col, row), src.get(col, row));
            }
        }
        assert!(painted as f64 > 0.9 * (64.0 * 64.0), "painted {painted}");
    }

    #[test]
    fn zero_iteration_encoding_paints_nothing() {
        let ifs = hrs_system(0.5, 0.5).unwrap();
        let sources = vec![MeasureSource {
            picture: Picture::filled(4, 4, [9, 9, 9, 255]),
            ifs: ifs.clone(),
            probs: ProbabilityVector::uniform(4),
            iterations: 0,
        }];
        let encoded = encode_measure(&sources, &ifs, 16, 7).unwrap();
        assert!(encoded.data().iter().all(|&b| b == 0));
    }

    #[test]
    fn encoding_rejects_mismatched_map_counts() {
        let four = hrs_system(0.5, 0.5).unwrap();
        let (two, _) = packing_systems();
        let sources = vec![MeasureSource {
            picture: Picture::new(4, 4),
            ifs: two,
            probs: ProbabilityVector::uniform(2),
            iterations: 10,
        }];
        assert!(encode_measure(&sources, &four, 16, 7).is_err());
    }

    #[test]
    fn different_weights_concentrate_mass_apart() {
        let ifs = diagonal_system(0.5, 0.5).unwrap();
        let uniform = ifs
            .attractor_chaos_game(&ProbabilityVector::uniform(2), 100_000, 5, 1024)
            .unwrap();
        let skewed = ifs
            .attractor_chaos_game(
                &ProbabilityVector::new(vec![0.1, 0.9]).unwrap(),
                100_000,
                6,
                1024,
            )
            .unwrap();
        let overlap = uniform.overlap_mass(&skewed);
        assert!(
            (overlap as f64) < 0.2 * uniform.total() as f64,
            "shared mass {overlap} of {}",
            uniform.total()
        );
    }
}
