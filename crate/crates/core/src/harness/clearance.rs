use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphology::{frame_length, MorphGeometry};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Clearance {
    /// Frame length plus propeller overhang on both sides [m].
    pub total_width: f64,
    /// Gap width minus total width [m]; negative when the vehicle is wider.
    pub clearance: f64,
    /// `total_width + margin < gap`.
    pub pass: bool,
}

/// Whether the vehicle at fold `alpha` fits through a slot `gap` wide.
pub fn gap_clearance(alpha: f64, geom: &MorphGeometry, gap: f64, margin: f64) -> Result<Clearance> {
    if !(gap > 0.0) {
        return Err(Error::Domain(format!("gap width must be positive, got {gap}")));
    }
    if !(margin >= 0.0) {
        return Err(Error::Domain(format!("margin must be non-negative, got {margin}")));
    }
    let total_width = frame_length(alpha, geom)? + 2.0 * geom.prop_overhang;
    Ok(Clearance { total_width, clearance: gap - total_width, pass: total_width + margin < gap })
}
