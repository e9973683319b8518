//! Chamfer Distance: two-sided mean of squared nearest-neighbor distances.

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::spatial::NeighborIndex;

/// Mean squared nearest-neighbor distance from every point of `from`
/// into the indexed set.
pub(crate) fn directed_mean_sq(from: &PointCloud, to: &NeighborIndex) -> f64 {
    let mut sum = 0.0;
    for p in from.iter() {
        sum += to.nearest_distance_sq(p);
    }
    sum / from.len() as f64
}

/// Two-sided Chamfer Distance that gives up once its running lower bound
/// exceeds `threshold` (the final value only grows as terms accumulate).
/// Returns the exact [`chamfer_with_indices`] value when it completes.
pub(crate) fn chamfer_within(
    a: &PointCloud,
    a_index: &NeighborIndex,
    b: &PointCloud,
    b_index: &NeighborIndex,
    threshold: f64,
) -> Option<f64> {
    let n1 = a.len() as f64;
    let cap1 = threshold * n1;
    let mut sum1 = 0.0;
    for p in a.iter() {
        sum1 += b_index.nearest_distance_sq(p);
        if sum1 > cap1 {
            return None;
        }
    }
    let term1 = sum1 / n1;

    let n2 = b.len() as f64;
    let cap2 = (threshold - term1) * n2;
    let mut sum2 = 0.0;
    for p in b.iter() {
        sum2 += a_index.nearest_distance_sq(p);
        if sum2 > cap2 {
            return None;
        }
    }
    Some(term1 + sum2 / n2)
}

/// Chamfer Distance with prebuilt indices; callers guarantee the indices
/// belong to the clouds.
pub(crate) fn chamfer_with_indices(
    a: &PointCloud,
    a_index: &NeighborIndex,
    b: &PointCloud,
    b_index: &NeighborIndex,
) -> f64 {
    directed_mean_sq(a, b_index) + directed_mean_sq(b, a_index)
}

/// Chamfer Distance between two non-empty clouds:
/// mean over S1 of min squared distance into S2, plus the reverse term.
/// Symmetric in its arguments; zero for identical clouds.
pub fn chamfer_distance(s1: &PointCloud, s2: &PointCloud) -> Result<f64> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::InvalidInput(
            "chamfer distance requires non-empty clouds".into(),
        ));
    }
    let i1 = NeighborIndex::build(s1)?;
    let i2 = NeighborIndex::build(s2)?;
    Ok(chamfer_with_indices(s1, &i1, s2, &i2))
}
