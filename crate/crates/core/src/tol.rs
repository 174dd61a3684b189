//! Numeric guard constants, collected in one place so their relationships
//! stay visible. Operations that accept a [`Tolerances`] value default to
//! these constants; the CLI config may override them per run.

/// `|g*x + h*y + j|` at or below this is treated as a vanishing projective
/// denominator. Absolute, because the shipped coefficient tables are O(10).
pub const PROJECTIVE_DENOMINATOR: f64 = 1e-12;

/// Slack around the unit box accepted for bilinear preimages. Wider than the
/// denominator guard: quadratic root error grows with conditioning, and a
/// preimage grazing an edge must not be rejected.
pub const BILINEAR_ROOT_BOX: f64 = 1e-9;

/// Budget asserted by tests for `f^-1(f(p)) - p` on interior points.
pub const INVERSE_ROUNDTRIP: f64 = 1e-10;

/// Drift outside the domain box silently clamped during masked orbits.
/// Anything farther is an escape error, not a rounding artifact.
pub const ORBIT_CLAMP: f64 = 1e-9;

/// Slack for the construction-time check that every map sends the domain
/// rectangle into itself.
pub const DOMAIN_CHECK: f64 = 1e-9;

/// `|sum - 1|` accepted for probability vectors.
pub const PROB_SUM: f64 = 1e-9;

/// Slack applied to the closed edges of rectangle mask regions during
/// classification. Coding points that sit exactly on a tile boundary in
/// exact arithmetic can round a few ulps into an open gap; this pulls them
/// back without bridging real gaps, which are wider by many orders.
pub const MASK_BOUNDARY: f64 = 1e-12;

/// Side length of the validation grid used for mask disjointness, cover,
/// and subset spot checks.
pub const MASK_GRID: usize = 256;

/// Cap on set iterations for the attractor raster that mask validation
/// compares against; the iteration normally stabilizes well before this.
pub const MASK_ATTRACTOR_ITERS: usize = 64;

/// Runtime-adjustable subset of the guards.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub projective_denominator: f64,
    pub bilinear_root_box: f64,
    pub orbit_clamp: f64,
    pub domain_check: f64,
    pub mask_boundary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            projective_denominator: PROJECTIVE_DENOMINATOR,
            bilinear_root_box: BILINEAR_ROOT_BOX,
            orbit_clamp: ORBIT_CLAMP,
            domain_check: DOMAIN_CHECK,
            mask_boundary: MASK_BOUNDARY,
        }
    }
}
