//! Planar points, rectangles, and the three invertible map families the
//! systems are built from: affine, projective, and bilinear.
//!
//! All maps expose `apply` and `invert`. Inversion is exact linear algebra
//! for the affine and projective cases; the bilinear case solves the
//! quadratic obtained by eliminating one preimage coordinate and keeps the
//! root that lands in the unit box.

use crate::error::{Error, Result};
use crate::tol::{self, Tolerances};
use crate::Real;
use serde::{Deserialize, Serialize};

/// A point of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2<F> {
    pub x: F,
    pub y: F,
}

impl<F: Real> Point2<F> {
    #[inline]
    pub fn new(x: F, y: F) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist(self, other: Self) -> F {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    #[inline]
    fn sub(self, other: Self) -> Self {
        Self::new(self.x - other.x, self.y - other.y)
    }

    /// z-component of the cross product of two plane vectors.
    #[inline]
    fn cross(self, other: Self) -> F {
        self.x * other.y - self.y * other.x
    }

    /// Casts both coordinates to `f64` for diagnostics and rasters.
    #[inline]
    pub fn f64(self) -> (f64, f64) {
        (self.x.f64(), self.y.f64())
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect<F> {
    pub x0: F,
    pub x1: F,
    pub y0: F,
    pub y1: F,
}

impl<F: Real> Rect<F> {
    pub fn new(x0: F, x1: F, y0: F, y1: F) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn unit() -> Self {
        Self::new(F::zero(), F::one(), F::zero(), F::one())
    }

    #[inline]
    pub fn center(&self) -> Point2<F> {
        let half = F::of(0.5);
        Point2::new((self.x0 + self.x1) * half, (self.y0 + self.y1) * half)
    }

    /// Diagonal length; the diameter used by depth estimates.
    #[inline]
    pub fn diameter(&self) -> F {
        Point2::new(self.x0, self.y0).dist(Point2::new(self.x1, self.y1))
    }

    #[inline]
    pub fn contains(&self, p: Point2<F>, slack: F) -> bool {
        p.x >= self.x0 - slack
            && p.x <= self.x1 + slack
            && p.y >= self.y0 - slack
            && p.y <= self.y1 + slack
    }

    #[inline]
    pub fn clamp(&self, p: Point2<F>) -> Point2<F> {
        Point2::new(
            p.x.max(self.x0).min(self.x1),
            p.y.max(self.y0).min(self.y1),
        )
    }

    /// Maps a point to box coordinates in `[0, 1]^2`.
    #[inline]
    pub fn normalize(&self, p: Point2<F>) -> (F, F) {
        (
            (p.x - self.x0) / (self.x1 - self.x0),
            (p.y - self.y0) / (self.y1 - self.y0),
        )
    }

    /// Inverse of [`normalize`](Self::normalize): box coordinates to a point.
    #[inline]
    pub fn at(&self, u: F, v: F) -> Point2<F> {
        Point2::new(
            self.x0 + u * (self.x1 - self.x0),
            self.y0 + v * (self.y1 - self.y0),
        )
    }
}

/// Affine map `(x, y) -> (a*x + b*y + e, c*x + d*y + f)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap2<F> {
    pub a: F,
    pub b: F,
    pub c: F,
    pub d: F,
    pub e: F,
    pub f: F,
}

impl<F: Real> AffineMap2<F> {
    pub fn new(a: F, b: F, c: F, d: F, e: F, f: F) -> Self {
        Self { a, b, c, d, e, f }
    }

    /// `(x, y) -> (sx*x + tx, sy*y + ty)`: the axis-aligned scale-translate
    /// form almost every shipped system uses.
    pub fn scale_translate(sx: F, tx: F, sy: F, ty: F) -> Self {
        Self::new(sx, F::zero(), F::zero(), sy, tx, ty)
    }

    pub fn identity() -> Self {
        Self::scale_translate(F::one(), F::zero(), F::one(), F::zero())
    }

    #[inline]
    pub fn apply(&self, p: Point2<F>) -> Point2<F> {
        Point2::new(
            self.a * p.x + self.b * p.y + self.e,
            self.c * p.x + self.d * p.y + self.f,
        )
    }

    #[inline]
    pub fn det(&self) -> F {
        self.a * self.d - self.b * self.c
    }

    #[inline]
    pub fn invert(&self, p: Point2<F>) -> Result<Point2<F>> {
        let det = self.det();
        if det.abs().f64() <= tol::PROJECTIVE_DENOMINATOR {
            let (x, y) = p.f64();
            return Err(Error::NotInvertibleHere { x, y });
        }
        let rx = p.x - self.e;
        let ry = p.y - self.f;
        Ok(Point2::new(
            (self.d * rx - self.b * ry) / det,
            (self.a * ry - self.c * rx) / det,
        ))
    }

    /// `self` after `other`: `(self ∘ other)(p) = self(other(p))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.a * other.e + self.b * other.f + self.e,
            self.c * other.e + self.d * other.f + self.f,
        )
    }
}

/// Projective map
/// `(x, y) -> ((a*x + b*y + c) / w, (d*x + e*y + k) / w)` with
/// `w = g*x + h*y + j`. Field names follow the coefficient-table layout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveMap2<F> {
    pub a: F,
    pub b: F,
    pub c: F,
    pub d: F,
    pub e: F,
    pub k: F,
    pub g: F,
    pub h: F,
    pub j: F,
}

impl<F: Real> ProjectiveMap2<F> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(a: F, b: F, c: F, d: F, e: F, k: F, g: F, h: F, j: F) -> Self {
        Self { a, b, c, d, e, k, g, h, j }
    }

    #[inline]
    pub fn apply_with(&self, p: Point2<F>, tols: &Tolerances) -> Result<Point2<F>> {
        let w = self.g * p.x + self.h * p.y + self.j;
        if w.abs().f64() <= tols.projective_denominator {
            let (x, y) = p.f64();
            return Err(Error::DegenerateDenominator { x, y });
        }
        Ok(Point2::new(
            (self.a * p.x + self.b * p.y + self.c) / w,
            (self.d * p.x + self.e * p.y + self.k) / w,
        ))
    }

    #[inline]
    pub fn apply(&self, p: Point2<F>) -> Result<Point2<F>> {
        self.apply_with(p, &Tolerances::default())
    }

    /// Inverts by applying the adjugate of the homogeneous matrix
    /// `[[a, b, c], [d, e, k], [g, h, j]]` and dehomogenizing, which avoids
    /// dividing by the determinant twice.
    pub fn invert_with(&self, p: Point2<F>, tols: &Tolerances) -> Result<Point2<F>> {
        let (a, b, c) = (self.a, self.b, self.c);
        let (d, e, k) = (self.d, self.e, self.k);
        let (g, h, j) = (self.g, self.h, self.j);
        // Adjugate rows (cofactor transpose).
        let m00 = e * j - k * h;
        let m01 = c * h - b * j;
        let m02 = b * k - c * e;
        let m10 = k * g - d * j;
        let m11 = a * j - c * g;
        let m12 = c * d - a * k;
        let m20 = d * h - e * g;
        let m21 = b * g - a * h;
        let m22 = a * e - b * d;
        let det = a * m00 + b * m10 + c * m20;
        let (px, py) = p.f64();
        if det.abs().f64() <= tols.projective_denominator {
            return Err(Error::NotInvertibleHere { x: px, y: py });
        }
        let w = m20 * p.x + m21 * p.y + m22;
        if w.abs().f64() <= tols.projective_denominator * det.abs().f64().max(1.0) {
            return Err(Error::DegenerateDenominator { x: px, y: py });
        }
        Ok(Point2::new(
            (m00 * p.x + m01 * p.y + m02) / w,
            (m10 * p.x + m11 * p.y + m12) / w,
        ))
    }

    #[inline]
    pub fn invert(&self, p: Point2<F>) -> Result<Point2<F>> {
        self.invert_with(p, &Tolerances::default())
    }
}

/// Bilinear map determined by the images `p, q, r, s` of the unit-square
/// corners `(0,0), (1,0), (1,1), (0,1)`:
///
/// `B(x, y) = p + x*(q - p) + y*(s - p) + x*y*(r + p - q - s)`.
///
/// Edges map affinely onto the quadrilateral edges, so a convex
/// quadrilateral `pqrs` is exactly the image of the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearMap2<F> {
    pub p: Point2<F>,
    pub q: Point2<F>,
    pub r: Point2<F>,
    pub s: Point2<F>,
}

impl<F: Real> BilinearMap2<F> {
    pub fn new(p: Point2<F>, q: Point2<F>, r: Point2<F>, s: Point2<F>) -> Self {
        Self { p, q, r, s }
    }

    #[inline]
    pub fn apply(&self, u: Point2<F>) -> Point2<F> {
        let e = self.q.sub(self.p);
        let f = self.s.sub(self.p);
        let g = Point2::new(
            self.r.x + self.p.x - self.q.x - self.s.x,
            self.r.y + self.p.y - self.q.y - self.s.y,
        );
        Point2::new(
            self.p.x + u.x * e.x + u.y * f.x + u.x * u.y * g.x,
            self.p.y + u.x * e.y + u.y * f.y + u.x * u.y * g.y,
        )
    }

    /// Solves `B(x, y) = target` for `(x, y)` in the unit box (with
    /// `tols.bilinear_root_box` slack). Eliminating `x` leaves
    /// `A2*y^2 + A1*y + A0 = 0` with
    ///
    /// `A2 = cross(g, f)`, `A1 = cross(t, g) + cross(e, f)`, `A0 = cross(t, e)`
    ///
    /// where `e = q - p`, `f = s - p`, `g = r + p - q - s`, `t = target - p`.
    /// The quadratic is solved in the sign-aware form `q = -(A1 ± sqrt(D))/2`
    /// so neither root loses precision; if both roots give a preimage in the
    /// box the one whose forward image is nearer the target wins.
    pub fn invert_with(&self, target: Point2<F>, tols: &Tolerances) -> Result<Point2<F>> {
        let e = self.q.sub(self.p);
        let f = self.s.sub(self.p);
        let g = Point2::new(
            self.r.x + self.p.x - self.q.x - self.s.x,
            self.r.y + self.p.y - self.q.y - self.s.y,
        );
        let t = target.sub(self.p);

        let a2 = g.cross(f);
        let a1 = t.cross(g) + e.cross(f);
        let a0 = t.cross(e);

        let mut roots_y = [F::zero(); 2];
        let mut n_roots = 0usize;
        let (tx, ty) = target.f64();
        if a2.abs().f64() <= tols.projective_denominator {
            // Degenerate quadratic: affine in y (parallelogram-like cells).
            if a1.abs().f64() <= tols.projective_denominator {
                return Err(Error::NotInvertibleHere { x: tx, y: ty });
            }
            roots_y[0] = -a0 / a1;
            n_roots = 1;
        } else {
            let disc = a1 * a1 - F::of(4.0) * a2 * a0;
            if disc < F::zero() {
                return Err(Error::NotInvertibleHere { x: tx, y: ty });
            }
            let sq = disc.sqrt();
            let qq = if a1 >= F::zero() {
                -(a1 + sq) * F::of(0.5)
            } else {
                -(a1 - sq) * F::of(0.5)
            };
            roots_y[n_roots] = qq / a2;
            n_roots += 1;
            if qq.abs() > F::zero() {
                roots_y[n_roots] = a0 / qq;
                n_roots += 1;
            }
        }

        let slack = F::of(tols.bilinear_root_box);
        let lo = -slack;
        let hi = F::one() + slack;
        let mut best: Option<(Point2<F>, F)> = None;
        for &y in roots_y.iter().take(n_roots) {
            if y < lo || y > hi {
                continue;
            }
            // x from whichever component equation is better conditioned.
            let dx = e.x + y * g.x;
            let dy = e.y + y * g.y;
            let x = if dx.abs() >= dy.abs() {
                if dx.abs().f64() <= tols.projective_denominator {
                    continue;
                }
                (t.x - y * f.x) / dx
            } else {
                (t.y - y * f.y) / dy
            };
            if x < lo || x > hi {
                continue;
            }
            let cand = Point2::new(x, y);
            let err = self.apply(cand).dist(target);
            match best {
                Some((_, best_err)) if best_err <= err => {}
                _ => best = Some((cand, err)),
            }
        }
        best.map(|(p, _)| p)
            .ok_or(Error::NotInvertibleHere { x: tx, y: ty })
    }

    #[inline]
    pub fn invert(&self, target: Point2<F>) -> Result<Point2<F>> {
        self.invert_with(target, &Tolerances::default())
    }
}

/// Any of the supported map families, as stored by a system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MapVariant<F> {
    Affine(AffineMap2<F>),
    Projective(ProjectiveMap2<F>),
    Bilinear(BilinearMap2<F>),
}

impl<F: Real> MapVariant<F> {
    #[inline]
    pub fn apply_with(&self, p: Point2<F>, tols: &Tolerances) -> Result<Point2<F>> {
        match self {
            MapVariant::Affine(m) => Ok(m.apply(p)),
            MapVariant::Projective(m) => m.apply_with(p, tols),
            MapVariant::Bilinear(m) => Ok(m.apply(p)),
        }
    }

    #[inline]
    pub fn apply(&self, p: Point2<F>) -> Result<Point2<F>> {
        self.apply_with(p, &Tolerances::default())
    }

    #[inline]
    pub fn invert_with(&self, p: Point2<F>, tols: &Tolerances) -> Result<Point2<F>> {
        match self {
            MapVariant::Affine(m) => m.invert(p),
            MapVariant::Projective(m) => m.invert_with(p, tols),
            MapVariant::Bilinear(m) => m.invert_with(p, tols),
        }
    }

    #[inline]
    pub fn invert(&self, p: Point2<F>) -> Result<Point2<F>> {
        self.invert_with(p, &Tolerances::default())
    }
}
