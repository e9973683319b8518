//! 1-Nearest-Neighbor Accuracy between a generated and a reference set.
//!
//! Each shape in the union is classified by the set membership of its
//! nearest neighbor (itself excluded) under the chosen shape distance;
//! the returned accuracy is the fraction classified correctly. 50% means
//! the two sets are indistinguishable. Exact distance ties between the
//! best same-set and best other-set neighbor count as incorrect.
//!
//! The Chamfer path keeps per-shape running minima and abandons a pair
//! as soon as its partial sum provably exceeds every minimum it could
//! improve; abandoned pairs cannot change any classification, so the
//! result is identical to the full distance matrix.

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::metrics::chamfer::{chamfer_with_indices, chamfer_within};
use crate::metrics::emd::{emd_approx, emd_exact_capped};
use crate::metrics::features::{moment_features, FeatureVector};
use crate::spatial::NeighborIndex;
use rayon::prelude::*;

/// Shape distance driving the 1-NN classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairMetric {
    /// Chamfer Distance (squared nearest-neighbor form).
    Chamfer,
    /// Earth Mover's Distance; exact assignment up to 256 points per
    /// cloud, entropic approximation at the given tolerance above that.
    EarthMover { tolerance: f64 },
}

const EMD_EXACT_LIMIT: usize = 256;

/// Pairs per scheduling block on the Chamfer path; running minima are
/// snapshotted per block, so the outcome does not depend on worker count.
const CHAMFER_BLOCK: usize = 512;

/// Which of the two input sets a shape belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetLabel {
    Generated,
    Reference,
}

/// Classification outcome for one shape of the union.
#[derive(Debug, Clone, Copy)]
pub struct NnaRecord {
    pub set: SetLabel,
    /// Index within its own set.
    pub index: usize,
    pub nearest_set: SetLabel,
    pub nearest_index: usize,
    pub distance: f64,
    pub correct: bool,
}

/// Full 1-NNA outcome with per-shape nearest-neighbor records.
#[derive(Debug, Clone)]
pub struct NnaReport {
    pub accuracy: f64,
    pub records: Vec<NnaRecord>,
    pub generated_count: usize,
    pub reference_count: usize,
}

fn label_of(i: usize, generated: usize) -> (SetLabel, usize) {
    if i < generated {
        (SetLabel::Generated, i)
    } else {
        (SetLabel::Reference, i - generated)
    }
}

/// Running class-wise minima for one shape: value and union index of the
/// best same-set and other-set neighbor seen so far.
#[derive(Clone, Copy)]
struct RowMin {
    same: (f64, u32),
    other: (f64, u32),
}

impl RowMin {
    fn new() -> Self {
        Self {
            same: (f64::INFINITY, u32::MAX),
            other: (f64::INFINITY, u32::MAX),
        }
    }

    fn update(&mut self, same_set: bool, candidate: (f64, u32)) {
        let slot = if same_set { &mut self.same } else { &mut self.other };
        if candidate < *slot {
            *slot = candidate;
        }
    }

    /// Largest distance still worth computing exactly for this row when
    /// the partner lies in the same (`true`) or other (`false`) set.
    fn needed(&self, same_set: bool) -> f64 {
        if same_set {
            self.same.0
        } else {
            self.other.0
        }
    }
}

fn validate(
    generated: &[PointCloud],
    reference: &[PointCloud],
    metric: PairMetric,
) -> Result<usize> {
    if generated.is_empty() || reference.is_empty() {
        return Err(Error::InvalidInput(
            "1-NNA requires both sets to be non-empty".into(),
        ));
    }
    let m = generated.len() + reference.len();
    if m < 2 {
        return Err(Error::InvalidInput(
            "1-NNA needs at least two shapes in the union".into(),
        ));
    }
    let resolution = generated[0].len();
    for (i, c) in generated.iter().chain(reference.iter()).enumerate() {
        if c.is_empty() {
            return Err(Error::InvalidInput(format!("shape {i} is empty")));
        }
        if c.len() != resolution {
            return Err(Error::InvalidInput(format!(
                "resolution mismatch: shape {i} has {} points, expected {resolution}",
                c.len()
            )));
        }
    }
    if let PairMetric::EarthMover { tolerance } = metric {
        if !(tolerance > 0.0) || !tolerance.is_finite() {
            return Err(Error::InvalidInput(format!(
                "EMD tolerance must be positive and finite, got {tolerance}"
            )));
        }
    }
    Ok(resolution)
}

/// Leave-one-out 1-NN classification over the union of both sets,
/// returning per-shape records alongside the accuracy.
pub fn one_nn_report(
    generated: &[PointCloud],
    reference: &[PointCloud],
    metric: PairMetric,
) -> Result<NnaReport> {
    let resolution = validate(generated, reference, metric)?;
    let union: Vec<&PointCloud> = generated.iter().chain(reference.iter()).collect();
    let g = generated.len();
    let m = union.len();

    let rows = match metric {
        PairMetric::Chamfer => chamfer_rows(&union, g)?,
        PairMetric::EarthMover { tolerance } => emd_rows(&union, g, resolution, tolerance)?,
    };

    let mut records = Vec::with_capacity(m);
    let mut correct_total = 0usize;
    for (i, row) in rows.iter().enumerate() {
        let correct = row.same.0 < row.other.0;
        if correct {
            correct_total += 1;
        }
        let nearest = if row.same <= row.other {
            row.same
        } else {
            row.other
        };
        let (set, index) = label_of(i, g);
        let (nearest_set, nearest_index) = label_of(nearest.1 as usize, g);
        records.push(NnaRecord {
            set,
            index,
            nearest_set,
            nearest_index,
            distance: nearest.0,
            correct,
        });
    }

    Ok(NnaReport {
        accuracy: correct_total as f64 / m as f64,
        records,
        generated_count: g,
        reference_count: union.len() - g,
    })
}

/// Chamfer path: prebuilt indices, block-parallel pair evaluation with
/// early abandonment against snapshotted row minima. Minima are seeded
/// by computing the exact distance to each shape's most similar same-set
/// and other-set partner under a cheap feature proxy, so thresholds are
/// tight from the first block.
fn chamfer_rows(union: &[&PointCloud], g: usize) -> Result<Vec<RowMin>> {
    let m = union.len();
    let indices: Vec<NeighborIndex> = union
        .par_iter()
        .map(|c| NeighborIndex::build(c))
        .collect::<Result<Vec<_>>>()?;

    let proxies: Vec<FeatureVector> = union
        .par_iter()
        .map(|c| moment_features(c))
        .collect::<Result<Vec<_>>>()?;
    let proxy_d2 = |a: usize, b: usize| -> f64 {
        proxies[a]
            .values()
            .iter()
            .zip(proxies[b].values())
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    };
    let mut seeded = std::collections::BTreeSet::new();
    for i in 0..m {
        for same in [true, false] {
            let mut best = (f64::INFINITY, usize::MAX);
            for j in 0..m {
                if j == i || ((j < g) == (i < g)) != same {
                    continue;
                }
                let d = proxy_d2(i, j);
                if d < best.0 {
                    best = (d, j);
                }
            }
            if best.1 != usize::MAX {
                seeded.insert((i.min(best.1) as u32, i.max(best.1) as u32));
            }
        }
    }

    let mut rows = vec![RowMin::new(); m];
    let seed_pairs: Vec<(u32, u32)> = seeded.iter().copied().collect();
    let seed_values: Vec<f64> = seed_pairs
        .par_iter()
        .map(|&(i, j)| {
            let (i, j) = (i as usize, j as usize);
            chamfer_with_indices(union[i], &indices[i], union[j], &indices[j])
        })
        .collect();
    for (&(i, j), &d) in seed_pairs.iter().zip(&seed_values) {
        let (iu, ju) = (i as usize, j as usize);
        let same = (iu < g) == (ju < g);
        rows[iu].update(same, (d, j));
        rows[ju].update(same, (d, i));
    }

    let pairs: Vec<(u32, u32)> = (0..m as u32)
        .flat_map(|i| ((i + 1)..m as u32).map(move |j| (i, j)))
        .filter(|p| !seeded.contains(p))
        .collect();

    for block in pairs.chunks(CHAMFER_BLOCK) {
        let snapshot: Vec<Option<f64>> = block
            .par_iter()
            .map(|&(i, j)| {
                let (i, j) = (i as usize, j as usize);
                let same = (i < g) == (j < g);
                let needed = rows[i].needed(same).max(rows[j].needed(same));
                // slack keeps exact ties on the computed side
                let threshold = if needed.is_finite() {
                    needed * (1.0 + 1e-9) + f64::MIN_POSITIVE
                } else {
                    f64::INFINITY
                };
                chamfer_within(union[i], &indices[i], union[j], &indices[j], threshold)
            })
            .collect();
        for (&(i, j), value) in block.iter().zip(snapshot) {
            if let Some(d) = value {
                let (iu, ju) = (i as usize, j as usize);
                let same = (iu < g) == (ju < g);
                rows[iu].update(same, (d, j));
                rows[ju].update(same, (d, i));
            }
        }
    }
    Ok(rows)
}

/// EMD path: full pair matrix (sizes are modest wherever EMD is viable).
fn emd_rows(union: &[&PointCloud], g: usize, resolution: usize, tolerance: f64) -> Result<Vec<RowMin>> {
    let m = union.len();
    let pairs: Vec<(u32, u32)> = (0..m as u32)
        .flat_map(|i| ((i + 1)..m as u32).map(move |j| (i, j)))
        .collect();
    let distances: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (union[i as usize], union[j as usize]);
            if resolution <= EMD_EXACT_LIMIT {
                emd_exact_capped(a, b, EMD_EXACT_LIMIT)
            } else {
                emd_approx(a, b, tolerance)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = vec![RowMin::new(); m];
    for (&(i, j), &d) in pairs.iter().zip(&distances) {
        let (iu, ju) = (i as usize, j as usize);
        let same = (iu < g) == (ju < g);
        rows[iu].update(same, (d, j));
        rows[ju].update(same, (d, i));
    }
    Ok(rows)
}

/// Leave-one-out 1-NN classification accuracy; see [`one_nn_report`].
pub fn one_nn_accuracy(
    generated: &[PointCloud],
    reference: &[PointCloud],
    metric: PairMetric,
) -> Result<f64> {
    Ok(one_nn_report(generated, reference, metric)?.accuracy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::chamfer::chamfer_distance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cloud(rng: &mut ChaCha8Rng, n: usize, center: [f64; 3]) -> PointCloud {
        PointCloud::new(
            (0..n)
                .map(|_| {
                    [
                        center[0] + rng.random_range(-1.0..1.0),
                        center[1] + rng.random_range(-1.0..1.0),
                        center[2] + rng.random_range(-1.0..1.0),
                    ]
                })
                .collect(),
        )
        .unwrap()
    }

    /// Reference implementation over the full distance matrix.
    fn brute_nna(generated: &[PointCloud], reference: &[PointCloud]) -> (f64, Vec<bool>) {
        let union: Vec<&PointCloud> = generated.iter().chain(reference.iter()).collect();
        let g = generated.len();
        let m = union.len();
        let mut flags = Vec::new();
        let mut correct = 0;
        for i in 0..m {
            let mut same = f64::INFINITY;
            let mut other = f64::INFINITY;
            for j in 0..m {
                if i == j {
                    continue;
                }
                let d = chamfer_distance(union[i], union[j]).unwrap();
                if (i < g) == (j < g) {
                    same = same.min(d);
                } else {
                    other = other.min(d);
                }
            }
            let ok = same < other;
            flags.push(ok);
            if ok {
                correct += 1;
            }
        }
        (correct as f64 / m as f64, flags)
    }

    #[test]
    fn duplicated_sets_score_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let shapes: Vec<PointCloud> = (0..3).map(|_| random_cloud(&mut rng, 32, [0.0; 3])).collect();
        let acc = one_nn_accuracy(&shapes, &shapes, PairMetric::Chamfer).unwrap();
        assert_eq!(acc, 0.0);
        let acc =
            one_nn_accuracy(&shapes, &shapes, PairMetric::EarthMover { tolerance: 0.01 }).unwrap();
        assert_eq!(acc, 0.0);
    }

    #[test]
    fn separated_families_score_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a: Vec<PointCloud> = (0..6).map(|_| random_cloud(&mut rng, 24, [0.0; 3])).collect();
        let b: Vec<PointCloud> = (0..6)
            .map(|_| random_cloud(&mut rng, 24, [100.0, 0.0, 0.0]))
            .collect();
        assert_eq!(one_nn_accuracy(&a, &b, PairMetric::Chamfer).unwrap(), 1.0);
    }

    #[test]
    fn early_abandon_matches_full_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..8 {
            let g = rng.random_range(3..20);
            let r = rng.random_range(3..20);
            let a: Vec<PointCloud> = (0..g).map(|_| random_cloud(&mut rng, 24, [0.0; 3])).collect();
            let b: Vec<PointCloud> = (0..r)
                .map(|_| random_cloud(&mut rng, 24, [0.5, 0.0, 0.0]))
                .collect();
            let report = one_nn_report(&a, &b, PairMetric::Chamfer).unwrap();
            let (want_acc, want_flags) = brute_nna(&a, &b);
            assert_eq!(report.accuracy, want_acc, "trial {trial}");
            let got_flags: Vec<bool> = report.records.iter().map(|r| r.correct).collect();
            assert_eq!(got_flags, want_flags, "trial {trial}");
        }
    }

    #[test]
    fn same_distribution_sits_near_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut accs = Vec::new();
        for _ in 0..5 {
            let a: Vec<PointCloud> = (0..40).map(|_| random_cloud(&mut rng, 16, [0.0; 3])).collect();
            let b: Vec<PointCloud> = (0..40).map(|_| random_cloud(&mut rng, 16, [0.0; 3])).collect();
            accs.push(one_nn_accuracy(&a, &b, PairMetric::Chamfer).unwrap());
        }
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        assert!((0.3..=0.7).contains(&mean), "mean accuracy {mean}");
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let c = PointCloud::new(vec![[0.0; 3]]).unwrap();
        assert!(one_nn_accuracy(&[], &[c.clone()], PairMetric::Chamfer).is_err());
        // resolution mismatch
        let big = PointCloud::new(vec![[0.0; 3], [1.0; 3]]).unwrap();
        assert!(one_nn_accuracy(&[c.clone()], &[big], PairMetric::Chamfer).is_err());
        // bad tolerance
        assert!(one_nn_accuracy(
            &[c.clone()],
            &[c.clone()],
            PairMetric::EarthMover { tolerance: -1.0 }
        )
        .is_err());
    }

    #[test]
    fn records_carry_set_labels_and_neighbors() {
        let near = PointCloud::new(vec![[0.0; 3]]).unwrap();
        let also_near = PointCloud::new(vec![[0.1, 0.0, 0.0]]).unwrap();
        let far = PointCloud::new(vec![[50.0, 0.0, 0.0]]).unwrap();
        let report = one_nn_report(&[near, also_near], &[far], PairMetric::Chamfer).unwrap();
        assert_eq!(report.generated_count, 2);
        assert_eq!(report.reference_count, 1);
        let first = &report.records[0];
        assert_eq!(first.set, SetLabel::Generated);
        assert_eq!(first.nearest_set, SetLabel::Generated);
        assert_eq!(first.nearest_index, 1);
        assert!(first.correct);
        // the lone reference shape's nearest is in the generated set
        assert!(!report.records[2].correct);
    }

    #[test]
    fn exact_distance_ties_count_as_incorrect() {
        // Four identical single-point shapes: every same-set and other-set
        // distance is 0, so d_same == d_other for every shape.
        let c = PointCloud::new(vec![[0.0; 3]]).unwrap();
        let acc = one_nn_accuracy(
            &[c.clone(), c.clone()],
            &[c.clone(), c.clone()],
            PairMetric::Chamfer,
        )
        .unwrap();
        assert_eq!(acc, 0.0);
    }
}
