//! Fractal transformations between IFS attractors.
//!
//! The crate models iterated function systems (IFS) whose maps are affine,
//! projective, or bilinear contractions of a rectangular domain. On top of
//! the raw systems it builds *masked dynamical systems*: a mask assigns to
//! every attractor point the index of the map whose inverse drives the point
//! one step backwards, which yields a symbolic address for the point. Feeding
//! the address of a point under one system into the coding map of another
//! system produces a fractal transformation between the two attractors; when
//! the address structures agree the transformation is a homeomorphism.
//!
//! The imaging layer applies these transformations to raster images:
//! homeomorphic warps, color stealing (painting one attractor with the
//! colors of another), idempotent fractal filters, packing several images
//! into one carrier through threshold-family transforms, and a coupled
//! chaos game that encodes pictures as stationary measures.
//!
//! Math lives in scalar-generic modules (`f32` or `f64` via [`Real`]);
//! the aliases at the crate root fix `f64`, which is what the CLI and the
//! imaging pipeline use.

pub mod config;
pub mod error;
pub mod geometry;
pub mod ifs;
pub mod imaging;
pub mod raster;
pub mod render;
pub mod rng;
pub mod sections;
pub mod tol;
pub mod transform;

pub use error::{Error, Result};

use std::fmt::Debug;

/// Scalar abstraction for the geometric core.
///
/// Everything the math modules need from `f32`/`f64`. The `of` helper exists
/// because literals in generic code would otherwise drown in `F::from(..)`
/// noise.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + Debug + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` constant.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant must convert to the scalar type")
    }

    /// Lossy conversion to `f64`, for diagnostics and rasterization.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }
}

impl<T> Real for T where
    T: num_traits::Float + num_traits::FromPrimitive + Debug + Send + Sync + 'static
{
}

pub type Point2d = geometry::Point2<f64>;
pub type Rect2d = geometry::Rect<f64>;
pub type Affine2d = geometry::AffineMap2<f64>;
pub type Projective2d = geometry::ProjectiveMap2<f64>;
pub type Bilinear2d = geometry::BilinearMap2<f64>;
pub type Map2d = geometry::MapVariant<f64>;
pub type Ifs2d = ifs::IfsSystem<f64>;
pub type Address = ifs::Address;
pub type Region2d = sections::Region<f64>;
pub type Mask2d = sections::Mask<f64>;
pub type Section2d = transform::SectionSystem<f64>;
pub type Transform2d = transform::FractalTransform<f64>;
pub type Pair2d = transform::HomeoPair<f64>;
