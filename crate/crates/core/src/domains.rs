//! Built-in demo geometries: a curved planar element bounded by a periodic
//! cubic spline and a union of five overlapping balls.

use crate::error::Result;
use crate::geometry::{BallUnion, SplineBoundary};
use crate::io::{from_json, BallDomainFile, SplineDomainFile};

pub const SPLINE_ELEMENT_JSON: &str = include_str!("../data/spline_element.json");
pub const BALLS5_JSON: &str = include_str!("../data/balls5.json");

/// Halton sample size used by the 3D demos.
pub const DEMO_HALTON_COUNT: usize = 100_000;

pub fn default_spline_element() -> Result<SplineBoundary> {
    from_json::<SplineDomainFile>(SPLINE_ELEMENT_JSON)?.build()
}

pub fn default_ball_union() -> Result<BallUnion> {
    from_json::<BallDomainFile>(BALLS5_JSON)?.build()
}
