//! Per-class normalization statistics: a per-axis mean over every point
//! of every shape, and a single pooled population standard deviation of
//! the centered coordinates.

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Streaming Welford accumulator over all coordinates of a shape set.
#[derive(Debug, Clone, Default)]
pub struct NormalizationAccumulator {
    count: u64,
    mean: [f64; 3],
    m2: [f64; 3],
}

impl NormalizationAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_cloud(&mut self, cloud: &PointCloud) {
        for p in cloud.iter() {
            self.count += 1;
            let n = self.count as f64;
            for a in 0..3 {
                let delta = p[a] - self.mean[a];
                self.mean[a] += delta / n;
                self.m2[a] += delta * (p[a] - self.mean[a]);
            }
        }
    }

    /// Points accumulated so far.
    pub fn point_count(&self) -> u64 {
        self.count
    }

    /// Finishes into `(μ, σ)`; errors on an empty set or a degenerate
    /// (zero) pooled deviation.
    pub fn finish(&self) -> Result<([f64; 3], f64)> {
        if self.count == 0 {
            return Err(Error::InvalidInput(
                "normalization requires at least one shape".into(),
            ));
        }
        let pooled_var = (self.m2[0] + self.m2[1] + self.m2[2]) / (3.0 * self.count as f64);
        let sigma = pooled_var.sqrt();
        if sigma == 0.0 {
            return Err(Error::DegenerateScale);
        }
        Ok((self.mean, sigma))
    }
}

/// Computes `(μ, σ)` over a shape set in one pass.
pub fn compute_normalization(shapes: &[PointCloud]) -> Result<([f64; 3], f64)> {
    let mut acc = NormalizationAccumulator::new();
    for s in shapes {
        acc.push_cloud(s);
    }
    acc.finish()
}

/// Direction of the mean shift applied after scaling by σ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenormMode {
    /// x ↦ x·σ + μ (the CLI's `default` mode).
    #[default]
    Standard,
    /// x ↦ x·σ − μ (the CLI's `paper-literal` mode).
    Literal,
}

/// Maps a normalized cloud back to model units.
pub fn denormalize(cloud: &PointCloud, mu: [f64; 3], sigma: f64, mode: DenormMode) -> PointCloud {
    debug_assert!(sigma > 0.0);
    let sign = match mode {
        DenormMode::Standard => 1.0,
        DenormMode::Literal => -1.0,
    };
    PointCloud::from_validated(
        cloud
            .iter()
            .map(|p| {
                [
                    p[0] * sigma + sign * mu[0],
                    p[1] * sigma + sign * mu[1],
                    p[2] * sigma + sign * mu[2],
                ]
            })
            .collect(),
    )
}

/// Maps a cloud into normalized coordinates: x ↦ (x − μ)/σ.
pub fn normalize(cloud: &PointCloud, mu: [f64; 3], sigma: f64) -> Result<PointCloud> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidInput(format!(
            "normalization scale must be positive, got {sigma}"
        )));
    }
    Ok(PointCloud::from_validated(
        cloud
            .iter()
            .map(|p| {
                [
                    (p[0] - mu[0]) / sigma,
                    (p[1] - mu[1]) / sigma,
                    (p[2] - mu[2]) / sigma,
                ]
            })
            .collect(),
    ))
}
