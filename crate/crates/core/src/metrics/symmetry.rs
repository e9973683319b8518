//! Reflection-symmetry measurement: Chamfer Distance between a cloud and
//! its mirror image about a plane. Zero means the cloud equals its own
//! reflection as a set.

use crate::error::{Error, Result};
use crate::geometry::{make_reflection, reflect_cloud, Plane, PointCloud};
use crate::metrics::chamfer::chamfer_distance;

/// A symmetry measurement: the Chamfer Distance (squared model units)
/// between a shape and its reflection about `plane`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryScore {
    pub value: f64,
    pub plane: Plane,
}

/// Measures reflection symmetry of `cloud` about `plane`.
pub fn symmetry_score(cloud: &PointCloud, plane: &Plane) -> Result<SymmetryScore> {
    if cloud.is_empty() {
        return Err(Error::InvalidInput(
            "symmetry score requires a non-empty cloud".into(),
        ));
    }
    let mirrored = reflect_cloud(cloud, &make_reflection(plane));
    Ok(SymmetryScore {
        value: chamfer_distance(cloud, &mirrored)?,
        plane: *plane,
    })
}
