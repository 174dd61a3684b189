//! Declarative TOML configuration: one document names systems, masks,
//! probability vectors, and transform pairs, so paired-system examples live
//! in a single file. Unknown keys are rejected everywhere. Built-in presets
//! ship the standard examples ready to run.

use crate::error::{Error, Result};
use crate::geometry::{AffineMap2, BilinearMap2, MapVariant, Point2, ProjectiveMap2, Rect};
use crate::ifs::{IfsSystem, ProbabilityVector};
use crate::sections::{
    quadrant_regions, split_x_regions, split_y_regions, tops_mask_raster, Mask, Region,
};
use crate::transform::{HomeoPair, SectionSystem, DEFAULT_DEPTH_EPSILON};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

fn default_true() -> bool {
    true
}

/// Top-level configuration document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    /// Default RNG seed for chaos-game operations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Point tolerance used to pick truncation depths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub system: BTreeMap<String, SystemDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub mask: BTreeMap<String, MaskDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub probs: BTreeMap<String, ProbsDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub pair: BTreeMap<String, PairDecl>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDecl {
    pub lipschitz: f64,
    /// Domain rectangle as `[x0, x1, y0, y1]`.
    pub domain: [f64; 4],
    /// When false the domain is only a viewing window and the containment
    /// check is skipped (systems with no invariant rectangle).
    #[serde(default = "default_true")]
    pub domain_invariant: bool,
    pub maps: Vec<MapDecl>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapDecl {
    /// `[a, b, c, d, e, f]` for `(x,y) -> (ax+by+e, cx+dy+f)`.
    Affine { coefficients: [f64; 6] },
    /// `[a, b, c, d, e, k, g, h, j]` for
    /// `(x,y) -> ((ax+by+c)/(gx+hy+j), (dx+ey+k)/(gx+hy+j))`.
    Projective { coefficients: [f64; 9] },
    /// Corner images of the unit square, counterclockwise from the origin.
    Bilinear { corners: [[f64; 2]; 4] },
}

impl MapDecl {
    fn build(&self) -> MapVariant<f64> {
        match self {
            MapDecl::Affine { coefficients: c } => {
                MapVariant::Affine(AffineMap2::new(c[0], c[1], c[2], c[3], c[4], c[5]))
            }
            MapDecl::Projective { coefficients: c } => MapVariant::Projective(
                ProjectiveMap2::new(c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7], c[8]),
            ),
            MapDecl::Bilinear { corners } => {
                let pt = |c: [f64; 2]| Point2::new(c[0], c[1]);
                MapVariant::Bilinear(BilinearMap2::new(
                    pt(corners[0]),
                    pt(corners[1]),
                    pt(corners[2]),
                    pt(corners[3]),
                ))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MaskDecl {
    /// Four-quadrant mask split at `threshold`.
    Quadrants { system: String, threshold: f64 },
    /// Two-piece split of the first coordinate.
    SplitX { system: String, threshold: f64 },
    /// Two-piece split of the second coordinate.
    SplitY { system: String, threshold: f64 },
    /// Tops mask: map `i` claims its domain tile minus all earlier tiles.
    Tops { system: String },
    /// Explicit region list, one per map.
    Regions {
        system: String,
        regions: Vec<Region<f64>>,
    },
}

impl MaskDecl {
    fn system(&self) -> &str {
        match self {
            MaskDecl::Quadrants { system, .. }
            | MaskDecl::SplitX { system, .. }
            | MaskDecl::SplitY { system, .. }
            | MaskDecl::Tops { system }
            | MaskDecl::Regions { system, .. } => system,
        }
    }
}

/// Probability weights, either literal or proportional to map areas.
/// Exactly one of the two fields must be present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbsDecl {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub areas_of: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDecl {
    pub forward: MemberDecl,
    pub backward: MemberDecl,
    /// Explicit truncation depth; overrides epsilon-derived depths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Pair-local epsilon; overrides the document default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberDecl {
    pub system: String,
    pub mask: String,
}

/// Parses a configuration document, rejecting unknown keys.
pub fn parse_config(text: &str) -> Result<ConfigDoc> {
    toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
}

/// Serializes a document back to TOML; reparsing yields an equal value.
pub fn to_text(doc: &ConfigDoc) -> Result<String> {
    toml::to_string(doc).map_err(|e| Error::InvalidConfig(e.to_string()))
}

/// All declarations of a document, constructed and validated.
#[derive(Clone, Debug)]
pub struct BuiltConfig {
    pub seed: u64,
    pub epsilon: f64,
    pub systems: BTreeMap<String, IfsSystem<f64>>,
    pub masks: BTreeMap<String, Mask<f64>>,
    pub probs: BTreeMap<String, ProbabilityVector>,
    pub pairs: BTreeMap<String, HomeoPair<f64>>,
}

impl ConfigDoc {
    /// Builds every declared value, validating systems and masks.
    pub fn build(&self) -> Result<BuiltConfig> {
        let epsilon = self.epsilon.unwrap_or(DEFAULT_DEPTH_EPSILON);
        if epsilon <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "epsilon {epsilon} must be positive"
            )));
        }
        let mut systems = BTreeMap::new();
        for (name, decl) in &self.system {
            let maps = decl.maps.iter().map(MapDecl::build).collect();
            let d = decl.domain;
            let domain = Rect::new(d[0], d[1], d[2], d[3]);
            let system = if decl.domain_invariant {
                IfsSystem::new(maps, domain, decl.lipschitz)
            } else {
                IfsSystem::new_trusting(maps, domain, decl.lipschitz)
            }
            .map_err(|e| Error::InvalidConfig(format!("system '{name}': {e}")))?;
            systems.insert(name.clone(), system);
        }
        let lookup = |name: &str| -> Result<&IfsSystem<f64>> {
            systems
                .get(name)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown system '{name}'")))
        };
        let mut masks = BTreeMap::new();
        for (name, decl) in &self.mask {
            let ifs = lookup(decl.system())?;
            let mask = match decl {
                MaskDecl::Quadrants { threshold, .. } => {
                    Mask::new(quadrant_regions(*threshold), ifs)
                }
                MaskDecl::SplitX { threshold, .. } => Mask::new(split_x_regions(*threshold), ifs),
                MaskDecl::SplitY { threshold, .. } => Mask::new(split_y_regions(*threshold), ifs),
                MaskDecl::Tops { .. } => tops_mask_raster(ifs),
                MaskDecl::Regions { regions, .. } => Mask::new(regions.clone(), ifs),
            }?;
            masks.insert(name.clone(), mask);
        }
        let mut probs = BTreeMap::new();
        for (name, decl) in &self.probs {
            let vector = match (&decl.values, &decl.areas_of) {
                (Some(values), None) => ProbabilityVector::new(values.clone()),
                (None, Some(system)) => ProbabilityVector::from_areas(lookup(system)?),
                _ => Err(Error::InvalidConfig(format!(
                    "probs '{name}' needs exactly one of values or areas_of"
                ))),
            }?;
            probs.insert(name.clone(), vector);
        }
        let mut pairs = BTreeMap::new();
        for (name, decl) in &self.pair {
            let eps = decl.epsilon.unwrap_or(epsilon);
            if eps <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "pair '{name}': epsilon {eps} must be positive"
                )));
            }
            let member = |m: &MemberDecl| -> Result<SectionSystem<f64>> {
                let ifs = lookup(&m.system)?.clone();
                let mask = masks
                    .get(&m.mask)
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown mask '{}'", m.mask)))?
                    .clone();
                let depth = match decl.depth {
                    Some(d) => d,
                    None => ifs.recommended_depth(eps),
                };
                SectionSystem::new(ifs, mask, depth)
            };
            let pair = HomeoPair::new(member(&decl.forward)?, member(&decl.backward)?)
                .map_err(|e| Error::InvalidConfig(format!("pair '{name}': {e}")))?;
            pairs.insert(name.clone(), pair);
        }
        Ok(BuiltConfig {
            seed: self.seed.unwrap_or(0),
            epsilon,
            systems,
            masks,
            probs,
            pairs,
        })
    }
}

impl BuiltConfig {
    pub fn system(&self, name: &str) -> Result<&IfsSystem<f64>> {
        self.systems
            .get(name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown system '{name}'")))
    }

    pub fn mask(&self, name: &str) -> Result<&Mask<f64>> {
        self.masks
            .get(name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown mask '{name}'")))
    }

    pub fn probs(&self, name: &str) -> Result<&ProbabilityVector> {
        self.probs
            .get(name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown probs '{name}'")))
    }

    pub fn pair(&self, name: &str) -> Result<&HomeoPair<f64>> {
        self.pairs
            .get(name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown pair '{name}'")))
    }

    /// Section over a named system and mask at the document's default depth.
    pub fn section(&self, system: &str, mask: &str) -> Result<SectionSystem<f64>> {
        let ifs = self.system(system)?.clone();
        let depth = ifs.recommended_depth(self.epsilon);
        SectionSystem::new(ifs, self.mask(mask)?.clone(), depth)
    }
}

/// Names of the built-in presets.
pub const PRESET_NAMES: [&str; 7] = [
    "tent",
    "lenaex",
    "goldenlennaex",
    "stealingex-projective",
    "expack3",
    "expack4",
    "goldthm",
];

/// Returns the TOML text of a built-in preset.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "tent" => Some(PRESET_TENT),
        "lenaex" => Some(PRESET_LENAEX),
        "goldenlennaex" => Some(PRESET_GOLDENLENNAEX),
        "stealingex-projective" => Some(PRESET_STEALINGEX),
        "expack3" => Some(PRESET_EXPACK3),
        "expack4" => Some(PRESET_EXPACK4),
        "goldthm" => Some(PRESET_GOLDTHM),
        _ => None,
    }
}

/// Overlapping tent pair at heights 0.75 and 0.5, masks split at the
/// midpoint.
const PRESET_TENT: &str = r#"
seed = 7

[system.tent75]
lipschitz = 0.75
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.75, 0.0, 0.0, 0.75, 0.0, 0.0] },
  { kind = "affine", coefficients = [-0.75, 0.0, 0.0, 0.75, 1.0, 0.0] },
]

[system.tent50]
lipschitz = 0.5
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.0, 0.0] },
  { kind = "affine", coefficients = [-0.5, 0.0, 0.0, 0.5, 1.0, 0.0] },
]

[mask.tent75]
kind = "split-x"
system = "tent75"
threshold = 0.5

[mask.tent50]
kind = "split-x"
system = "tent50"
threshold = 0.5
"#;

/// Just-touching quadrant pair: uniform halves versus a 0.6/0.4 split.
const PRESET_LENAEX: &str = r#"
seed = 7

[system.f]
lipschitz = 0.5
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.0, 0.0] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.5, 0.0] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.5, 0.5] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.0, 0.5] },
]

[system.g]
lipschitz = 0.6
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.6, 0.0, 0.0, 0.6, 0.0, 0.0] },
  { kind = "affine", coefficients = [0.4, 0.0, 0.0, 0.6, 0.6, 0.0] },
  { kind = "affine", coefficients = [0.4, 0.0, 0.0, 0.4, 0.6, 0.6] },
  { kind = "affine", coefficients = [0.6, 0.0, 0.0, 0.4, 0.0, 0.6] },
]

[mask.f]
kind = "quadrants"
system = "f"
threshold = 0.5

[mask.g]
kind = "quadrants"
system = "g"
threshold = 0.6

[pair.main]
forward = { system = "f", mask = "f" }
backward = { system = "g", mask = "g" }
"#;

/// Overlapping quadrant pair whose natural threshold is the experimental
/// golden value 0.618; the pstar command recomputes it from scratch.
const PRESET_GOLDENLENNAEX: &str = r#"
seed = 7

[system.f]
lipschitz = 0.6666666666666666
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.6666666666666666, 0.0, 0.0, 0.6666666666666666, 0.0, 0.0] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.6666666666666666, 0.5, 0.0] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.5, 0.5] },
  { kind = "affine", coefficients = [0.6666666666666666, 0.0, 0.0, 0.5, 0.0, 0.5] },
]

[system.g]
lipschitz = 0.6666666666666666
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.0, 0.0] },
  { kind = "affine", coefficients = [0.6666666666666666, 0.0, 0.0, 0.5, 0.3333333333333333, 0.0] },
  { kind = "affine", coefficients = [0.6666666666666666, 0.0, 0.0, 0.6666666666666666, 0.3333333333333333, 0.3333333333333333] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.6666666666666666, 0.0, 0.3333333333333333] },
]

[mask.f]
kind = "quadrants"
system = "f"
threshold = 0.618

[mask.g]
kind = "quadrants"
system = "g"
threshold = 0.382

[pair.main]
forward = { system = "f", mask = "f" }
backward = { system = "g", mask = "g" }
"#;

/// Projective leaf drawing with a tops mask, plus an affine quadrant
/// palette. The drawing has no invariant rectangle; the domain is a
/// pole-free viewing window around the attractor.
const PRESET_STEALINGEX: &str = r#"
seed = 7

[system.drawing]
lipschitz = 0.8
domain = [0.27, 0.72, -0.9, -0.11]
domain_invariant = false
maps = [
  { kind = "projective", coefficients = [19.05, 0.72, 1.86, -0.15, 16.9, -0.28, 5.63, 2.01, 20.0] },
  { kind = "projective", coefficients = [0.2, 4.4, 7.5, -0.3, -4.4, -10.4, 0.2, 8.8, 15.4] },
  { kind = "projective", coefficients = [96.5, 35.2, 5.8, -131.4, -6.5, 19.1, 134.8, 30.7, 7.5] },
  { kind = "projective", coefficients = [-32.5, 5.81, -2.9, 122.9, -0.1, -19.9, -128.1, -24.3, -5.8] },
]

[mask.drawing]
kind = "tops"
system = "drawing"

[system.palette]
lipschitz = 0.5
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.0, 0.0] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.5, 0.0] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.5, 0.5] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.0, 0.5] },
]
"#;

/// Coordinate-swapping band pair for masked packing; amortized contraction
/// ratios are the square roots of the two-step factors 0.6 and 0.5.
const PRESET_EXPACK3: &str = r#"
seed = 7

[system.f]
lipschitz = 0.7745966692414834
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.0, 1.0, -0.6, 0.0, 0.0, 0.6] },
  { kind = "affine", coefficients = [0.0, 1.0, 0.6, 0.0, 0.0, 0.4] },
]

[system.g]
lipschitz = 0.7071067811865476
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.0, 1.0, -0.5, 0.0, 0.0, 0.5] },
  { kind = "affine", coefficients = [0.0, 1.0, 0.5, 0.0, 0.0, 0.5] },
]
"#;

/// Two four-map square tilings with mirrored aspect ratios plus the
/// half-scale carrier grid for measure-coupled encoding. Weights follow
/// tile areas.
const PRESET_EXPACK4: &str = r#"
seed = 7

[system.f]
lipschitz = 0.66
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.66, 0.0, 0.0, 0.34, 0.0, 0.0] },
  { kind = "affine", coefficients = [0.34, 0.0, 0.0, 0.34, 0.66, 0.0] },
  { kind = "affine", coefficients = [0.34, 0.0, 0.0, 0.66, 0.66, 0.34] },
  { kind = "affine", coefficients = [0.66, 0.0, 0.0, 0.66, 0.0, 0.34] },
]

[system.g]
lipschitz = 0.66
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.34, 0.0, 0.0, 0.66, 0.0, 0.0] },
  { kind = "affine", coefficients = [0.66, 0.0, 0.0, 0.66, 0.34, 0.0] },
  { kind = "affine", coefficients = [0.66, 0.0, 0.0, 0.34, 0.34, 0.66] },
  { kind = "affine", coefficients = [0.34, 0.0, 0.0, 0.34, 0.0, 0.66] },
]

[system.h]
lipschitz = 0.5
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.0, 0.0] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.5, 0.0] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.5, 0.5] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.0, 0.5] },
]

[probs.f]
areas_of = "f"

[probs.g]
areas_of = "g"
"#;

/// Overlapping diagonal pair with ratios 2/3 and 1/2; thresholds carry the
/// experimental golden value and its mirror.
const PRESET_GOLDTHM: &str = r#"
seed = 7

[system.f]
lipschitz = 0.6666666666666666
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.6666666666666666, 0.0, 0.0, 0.6666666666666666, 0.0, 0.0] },
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.5, 0.5] },
]

[system.g]
lipschitz = 0.6666666666666666
domain = [0.0, 1.0, 0.0, 1.0]
maps = [
  { kind = "affine", coefficients = [0.5, 0.0, 0.0, 0.5, 0.0, 0.0] },
  { kind = "affine", coefficients = [0.6666666666666666, 0.0, 0.0, 0.6666666666666666, 0.3333333333333333, 0.3333333333333333] },
]

[mask.f]
kind = "split-x"
system = "f"
threshold = 0.618

[mask.g]
kind = "split-x"
system = "g"
threshold = 0.382

[pair.main]
forward = { system = "f", mask = "f" }
backward = { system = "g", mask = "g" }
"#;
