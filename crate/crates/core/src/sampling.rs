//! Farthest point sampling.

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Greedy maximin downsampling to `k` points, seeded at `cloud[start]`.
///
/// Each subsequent selection maximizes its minimum squared distance to
/// the already-selected set; exact ties break toward the lowest point
/// index. The output preserves selection order and is always a subset of
/// the input. Deterministic for fixed `(cloud, k, start)`.
pub fn farthest_point_sample(cloud: &PointCloud, k: usize, start: usize) -> Result<PointCloud> {
    let n = cloud.len();
    if k == 0 {
        return Err(Error::InvalidInput("sample size k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::InvalidInput(format!(
            "sample size k = {k} exceeds cloud size {n}"
        )));
    }
    if start >= n {
        return Err(Error::InvalidInput(format!(
            "start index {start} out of range for cloud of {n} points"
        )));
    }

    let points = cloud.points();
    let mut selected = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    // Running minimum squared distance from each point to the selected set.
    let mut min_d2 = vec![f64::INFINITY; n];

    let mut current = start;
    selected.push(points[current]);
    taken[current] = true;

    for _ in 1..k {
        let latest = points[current];
        let mut next = usize::MAX;
        let mut next_d2 = f64::NEG_INFINITY;
        for i in 0..n {
            if taken[i] {
                continue;
            }
            let d2 = vec3::squared_distance(&points[i], &latest);
            if d2 < min_d2[i] {
                min_d2[i] = d2;
            }
            if min_d2[i] > next_d2 {
                next_d2 = min_d2[i];
                next = i;
            }
        }
        current = next;
        selected.push(points[current]);
        taken[current] = true;
    }

    Ok(PointCloud::from_validated(selected))
}

/// Farthest point sampling with a seeded-random start index.
pub fn farthest_point_sample_seeded(cloud: &PointCloud, k: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.random_range(0..cloud.len());
    farthest_point_sample(cloud, k, start)
}
