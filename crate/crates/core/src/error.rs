//! Crate-wide error type.
//!
//! Geometric failures carry the offending point in `f64` so diagnostics do
//! not depend on the scalar type of the caller.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A projective denominator `g*x + h*y + j` vanished at the point.
    #[error("projective denominator vanishes near ({x}, {y})")]
    DegenerateDenominator { x: f64, y: f64 },

    /// A map has no usable preimage at the point (singular linear part,
    /// negative discriminant, or every root outside the unit box).
    #[error("no valid preimage at ({x}, {y})")]
    NotInvertibleHere { x: f64, y: f64 },

    /// A point fell into no mask region during classification.
    #[error("point ({x}, {y}) lies in no mask region")]
    MaskGap { x: f64, y: f64 },

    /// A masked orbit stepped further outside the domain than the clamp
    /// tolerance allows.
    #[error("masked orbit escaped the domain at ({x}, {y})")]
    OrbitEscaped { x: f64, y: f64 },

    /// `shift` was asked to drop a symbol from a zero-length address.
    #[error("cannot shift an empty address")]
    EmptyAddress,

    /// Probability entries were negative or did not sum to one.
    #[error("invalid probability vector: {0}")]
    BadProbabilities(String),

    /// The attractor scan along the anti-diagonal found no occupied cell.
    #[error("attractor does not intersect the scanned anti-diagonal range")]
    NoIntersection,

    /// System-level construction failure (map count, Lipschitz bound,
    /// domain self-map check).
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    /// Mask-level construction failure (region count, disjointness, cover,
    /// or subset spot check).
    #[error("invalid mask: {0}")]
    InvalidMask(String),

    /// Configuration parse or cross-reference failure.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numeric pipeline (as opposed to bad input
    /// declarations or I/O). The CLI maps these to a distinct exit code.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::DegenerateDenominator { .. }
                | Error::NotInvertibleHere { .. }
                | Error::MaskGap { .. }
                | Error::OrbitEscaped { .. }
                | Error::NoIntersection
        )
    }
}
