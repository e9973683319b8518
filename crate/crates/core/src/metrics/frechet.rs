//! Fréchet distance between Gaussian fits of feature distributions:
//! ‖μ1−μ2‖² + Tr(Σ1 + Σ2 − 2(Σ1Σ2)^{1/2}).

use crate::error::{Error, Result};
use crate::metrics::features::FeatureVector;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Gaussian fit of a feature sample: mean vector and unbiased covariance.
#[derive(Debug, Clone)]
pub struct GaussianSummary {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl GaussianSummary {
    /// Fits mean and covariance (N−1 denominator) to a feature sample of
    /// at least two vectors with a common dimension.
    pub fn fit(features: &[FeatureVector]) -> Result<Self> {
        let n = features.len();
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 feature vectors to fit a Gaussian, got {n}"
            )));
        }
        let d = features[0].dim();
        for (i, f) in features.iter().enumerate() {
            if f.dim() != d {
                return Err(Error::InvalidInput(format!(
                    "feature vector {i} has dimension {}, expected {d}",
                    f.dim()
                )));
            }
        }

        let mut mean = DVector::zeros(d);
        for f in features {
            for (k, &v) in f.values().iter().enumerate() {
                mean[k] += v;
            }
        }
        mean /= n as f64;

        // Upper triangle accumulated, then mirrored: Σ is exactly symmetric.
        let mut cov = DMatrix::zeros(d, d);
        for f in features {
            let vals = f.values();
            for r in 0..d {
                let dr = vals[r] - mean[r];
                for c in r..d {
                    cov[(r, c)] += dr * (vals[c] - mean[c]);
                }
            }
        }
        cov /= (n - 1) as f64;
        for r in 0..d {
            for c in 0..r {
                cov[(r, c)] = cov[(c, r)];
            }
        }

        Ok(Self { mean, covariance: cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }
}

/// Symmetric PSD square root via eigendecomposition, clamping negative
/// eigenvalues at zero.
fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let sqrt_vals: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (c, &s) in sqrt_vals.iter().enumerate() {
        scaled.column_mut(c).scale_mut(s);
    }
    &scaled * q.transpose()
}

/// Fréchet distance between two fitted Gaussians. The cross term is
/// computed as Tr((Σ1^{1/2} Σ2 Σ1^{1/2})^{1/2}) with the inner product
/// symmetrized before decomposition; the final value is clamped at zero.
pub fn frechet_between(g1: &GaussianSummary, g2: &GaussianSummary) -> Result<f64> {
    if g1.dim() != g2.dim() {
        return Err(Error::InvalidInput(format!(
            "feature dimensions differ: {} vs {}",
            g1.dim(),
            g2.dim()
        )));
    }
    let delta = g1.mean() - g2.mean();
    let mean_term = delta.dot(&delta);

    let s1_sqrt = psd_sqrt(g1.covariance());
    let inner = &s1_sqrt * g2.covariance() * &s1_sqrt;
    let inner = (&inner + inner.transpose()) * 0.5;
    let cross = inner
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .sum::<f64>();

    let value = mean_term + g1.covariance().trace() + g2.covariance().trace() - 2.0 * cross;
    Ok(value.max(0.0))
}

/// Fréchet point cloud distance between two feature samples.
pub fn frechet_point_distance(f1: &[FeatureVector], f2: &[FeatureVector]) -> Result<f64> {
    let g1 = GaussianSummary::fit(f1)?;
    let g2 = GaussianSummary::fit(f2)?;
    frechet_between(&g1, &g2)
}

/// Whether a sample is large enough for a well-conditioned Gaussian fit
/// (at least D + 1 vectors of dimension D).
pub fn sample_size_adequate(sample_count: usize, dim: usize) -> bool {
    sample_count > dim
}

/// Deterministic random partition of `0..count` into two halves
/// (the first gets the extra element when `count` is odd). Used for
/// reference lower-bound style self-comparisons.
pub fn two_way_split(count: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut indices: Vec<usize> = (0..count).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let second = indices.split_off(count / 2 + count % 2);
    (indices, second)
}
