//! Per-shape feature extraction for distributional comparison.
//!
//! The built-in extractor is a deterministic 63-dimensional geometric
//! moment descriptor; an external binding table lets callers substitute
//! features produced by any network, keyed by shape id.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::vec3;
use nalgebra::Matrix3;

/// Dimension of [`moment_features`] vectors.
pub const MOMENT_FEATURE_DIM: usize = 63;

const RADIAL_BINS: usize = 16;

/// A fixed-length real feature vector; all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty feature vector".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "feature vector has a non-finite entry: {bad}"
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Deterministic 63-dimensional geometric descriptor:
/// centroid (3), centered second moments (6), centered third moments (10),
/// radial-distance histogram (16), per-axis extent statistics (12), and
/// covariance-eigenvalue shape measures (16). Everything after the
/// centroid block is translation-invariant.
pub fn moment_features(cloud: &PointCloud) -> Result<FeatureVector> {
    if cloud.is_empty() {
        return Err(Error::InvalidInput(
            "feature extraction requires a non-empty cloud".into(),
        ));
    }
    let n = cloud.len() as f64;
    let mut out = Vec::with_capacity(MOMENT_FEATURE_DIM);

    let mut centroid = [0.0; 3];
    for p in cloud.iter() {
        for a in 0..3 {
            centroid[a] += p[a];
        }
    }
    for c in &mut centroid {
        *c /= n;
    }
    out.extend_from_slice(&centroid);

    // Centered moments of order two (xx, xy, xz, yy, yz, zz) and three.
    let mut m2 = [0.0; 6];
    let mut m3 = [0.0; 10];
    for p in cloud.iter() {
        let d = vec3::sub(p, &centroid);
        m2[0] += d[0] * d[0];
        m2[1] += d[0] * d[1];
        m2[2] += d[0] * d[2];
        m2[3] += d[1] * d[1];
        m2[4] += d[1] * d[2];
        m2[5] += d[2] * d[2];
        m3[0] += d[0] * d[0] * d[0];
        m3[1] += d[0] * d[0] * d[1];
        m3[2] += d[0] * d[0] * d[2];
        m3[3] += d[0] * d[1] * d[1];
        m3[4] += d[0] * d[1] * d[2];
        m3[5] += d[0] * d[2] * d[2];
        m3[6] += d[1] * d[1] * d[1];
        m3[7] += d[1] * d[1] * d[2];
        m3[8] += d[1] * d[2] * d[2];
        m3[9] += d[2] * d[2] * d[2];
    }
    out.extend(m2.iter().map(|v| v / n));
    out.extend(m3.iter().map(|v| v / n));

    // Normalized radial-distance histogram about the centroid.
    let radii: Vec<f64> = cloud
        .iter()
        .map(|p| vec3::distance(p, &centroid))
        .collect();
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let mut hist = [0.0; RADIAL_BINS];
    if r_max > 0.0 {
        for &r in &radii {
            let mut bin = (r / r_max * RADIAL_BINS as f64) as usize;
            if bin >= RADIAL_BINS {
                bin = RADIAL_BINS - 1;
            }
            hist[bin] += 1.0;
        }
    } else {
        hist[0] = cloud.len() as f64;
    }
    out.extend(hist.iter().map(|c| c / n));

    // Per-axis extents relative to the centroid: min, max, standard
    // deviation, mean absolute deviation.
    for axis in 0..3 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut abs_sum = 0.0;
        for p in cloud.iter() {
            let d = p[axis] - centroid[axis];
            lo = lo.min(d);
            hi = hi.max(d);
            abs_sum += d.abs();
        }
        let var = m2[[0, 3, 5][axis]] / n;
        out.push(lo);
        out.push(hi);
        out.push(var.max(0.0).sqrt());
        out.push(abs_sum / n);
    }

    // Covariance eigenvalue descriptors.
    let cov = Matrix3::new(
        m2[0] / n,
        m2[1] / n,
        m2[2] / n,
        m2[1] / n,
        m2[3] / n,
        m2[4] / n,
        m2[2] / n,
        m2[4] / n,
        m2[5] / n,
    );
    let mut lam: Vec<f64> = cov
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&v| v.max(0.0))
        .collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    let (l1, l2, l3) = (lam[0], lam[1], lam[2]);
    let total = l1 + l2 + l3;
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let entropy = if total > 0.0 {
        -lam.iter()
            .map(|&l| {
                let q = l / total;
                if q > 0.0 {
                    q * q.ln()
                } else {
                    0.0
                }
            })
            .sum::<f64>()
    } else {
        0.0
    };
    out.extend_from_slice(&[
        l1,
        l2,
        l3,
        l1.sqrt(),
        l2.sqrt(),
        l3.sqrt(),
        ratio(l2, l1),
        ratio(l3, l1),
        ratio(l3, l2),
        ratio(l1 - l2, l1), // linearity
        ratio(l2 - l3, l1), // planarity
        ratio(l3, l1),      // sphericity
        ratio(l1 - l3, l1), // anisotropy
        (l1 * l2 * l3).cbrt(),
        entropy,
        ratio(l3, total),
    ]);

    debug_assert_eq!(out.len(), MOMENT_FEATURE_DIM);
    FeatureVector::new(out)
}

/// Features loaded from an external binding file, keyed by shape id.
#[derive(Debug, Clone)]
pub struct ExternalFeatureTable {
    dim: usize,
    map: BTreeMap<String, FeatureVector>,
}

impl ExternalFeatureTable {
    pub fn new(entries: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut dim = None;
        for (id, values) in entries {
            let fv = FeatureVector::new(values)?;
            match dim {
                None => dim = Some(fv.dim()),
                Some(d) if d != fv.dim() => {
                    return Err(Error::InvalidInput(format!(
                        "feature row for `{id}` has dimension {}, expected {d}",
                        fv.dim()
                    )))
                }
                _ => {}
            }
            if map.insert(id.clone(), fv).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate feature row for shape id `{id}`"
                )));
            }
        }
        let dim = dim.ok_or_else(|| Error::InvalidInput("empty feature table".into()))?;
        Ok(Self { dim, map })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, id: &str) -> Result<&FeatureVector> {
        self.map
            .get(id)
            .ok_or_else(|| Error::MissingFeature { id: id.to_string() })
    }
}

/// Which extractor produces a shape's feature vector.
#[derive(Debug, Clone)]
pub enum FeatureSource {
    /// Built-in geometric moment descriptor.
    Moments,
    /// Externally computed features keyed by shape id.
    External(ExternalFeatureTable),
}

impl FeatureSource {
    /// Extracts (or looks up) the features of one shape.
    pub fn features(&self, id: &str, cloud: &PointCloud) -> Result<FeatureVector> {
        match self {
            FeatureSource::Moments => moment_features(cloud),
            FeatureSource::External(table) => table.get(id).cloned(),
        }
    }

    /// Report label identifying the extractor.
    pub fn label(&self) -> String {
        match self {
            FeatureSource::Moments => format!("geometric-moments-{MOMENT_FEATURE_DIM}"),
            FeatureSource::External(t) => format!("external-{}d", t.dim()),
        }
    }
}
