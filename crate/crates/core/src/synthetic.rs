//! Deterministic synthetic point-cloud generators for calibration and
//! testing: sphere/ellipsoid families, exactly mirror-symmetric clouds,
//! and cluster shifts.

use crate::geometry::PointCloud;
use crate::vec3::Point3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Uniform sample of the unit sphere surface.
pub fn sphere_cloud(n: usize, rng: &mut ChaCha8Rng) -> PointCloud {
    assert!(n > 0);
    PointCloud::from_validated((0..n).map(|_| sphere_point(rng)).collect())
}

fn sphere_point(rng: &mut ChaCha8Rng) -> Point3 {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Sphere sample stretched by per-axis scales.
pub fn ellipsoid_cloud(n: usize, axes: [f64; 3], rng: &mut ChaCha8Rng) -> PointCloud {
    assert!(n > 0);
    PointCloud::from_validated(
        (0..n)
            .map(|_| {
                let p = sphere_point(rng);
                [p[0] * axes[0], p[1] * axes[1], p[2] * axes[2]]
            })
            .collect(),
    )
}

/// One draw from a fixed shape family: an ellipsoid whose axis scales
/// are themselves sampled uniformly from [0.4, 1.6]. Disjoint draws are
/// interchangeable samples of the same distribution.
pub fn family_shape(n: usize, rng: &mut ChaCha8Rng) -> PointCloud {
    let axes = [
        rng.random_range(0.4..1.6),
        rng.random_range(0.4..1.6),
        rng.random_range(0.4..1.6),
    ];
    ellipsoid_cloud(n, axes, rng)
}

/// Exactly mirror-symmetric cloud about x = 0: `n/2` random points plus
/// their bitwise sign-negated x counterparts (`n` must be even).
pub fn mirrored_cloud(n: usize, rng: &mut ChaCha8Rng) -> PointCloud {
    assert!(n >= 2 && n % 2 == 0, "mirrored cloud needs an even size");
    let mut points = Vec::with_capacity(n);
    for _ in 0..n / 2 {
        let p = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        points.push(p);
        points.push([-p[0], p[1], p[2]]);
    }
    PointCloud::from_validated(points)
}

/// Rigid translation of a cloud.
pub fn translated(cloud: &PointCloud, offset: Point3) -> PointCloud {
    PointCloud::from_validated(
        cloud
            .iter()
            .map(|p| [p[0] + offset[0], p[1] + offset[1], p[2] + offset[2]])
            .collect(),
    )
}
