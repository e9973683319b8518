//! Per-shape score aggregation: summary statistics and histograms.

use crate::error::{Error, Result};

/// Equal-width histogram over [min, max]; degenerates to a single bin
/// when all scores coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// bin edges, length = bins + 1
    pub edges: Vec<f64>,
    /// occupancy per bin, sums to the number of scores
    pub counts: Vec<usize>,
}

/// Per-shape scores with aggregate statistics and a histogram.
#[derive(Debug, Clone)]
pub struct MetricReport {
    pub per_shape: Vec<(String, f64)>,
    pub mean: f64,
    /// population standard deviation
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Histogram,
}

/// Aggregates `(id, value)` scores into a [`MetricReport`] with `bins`
/// equal-width histogram bins.
pub fn build_report(scores: &[(String, f64)], bins: usize) -> Result<MetricReport> {
    if scores.is_empty() {
        return Err(Error::InvalidInput("cannot report on zero scores".into()));
    }
    if bins == 0 {
        return Err(Error::InvalidInput("bin count must be at least 1".into()));
    }
    for (id, v) in scores {
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!(
                "score for `{id}` is not finite: {v}"
            )));
        }
    }

    let n = scores.len();
    let values: Vec<f64> = scores.iter().map(|(_, v)| *v).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let std = var.sqrt();

    let histogram = if min == max {
        Histogram {
            edges: vec![min, max],
            counts: vec![n],
        }
    } else {
        let width = (max - min) / bins as f64;
        let edges: Vec<f64> = (0..=bins)
            .map(|i| {
                if i == bins {
                    max
                } else {
                    min + width * i as f64
                }
            })
            .collect();
        let mut counts = vec![0usize; bins];
        for &v in &values {
            let mut bin = ((v - min) / width) as usize;
            if bin >= bins {
                bin = bins - 1; // v == max lands in the last bin
            }
            counts[bin] += 1;
        }
        Histogram { edges, counts }
    };

    Ok(MetricReport {
        per_shape: scores.to_vec(),
        mean,
        std,
        min,
        max,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(values: &[f64]) -> Vec<(String, f64)> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| (format!("s{i}"), v))
            .collect()
    }

    #[test]
    fn rejects_empty_and_zero_bins() {
        assert!(build_report(&[], 4).is_err());
        assert!(build_report(&named(&[1.0]), 0).is_err());
        assert!(build_report(&named(&[f64::NAN]), 1).is_err());
    }

    #[test]
    fn constant_scores_collapse_to_one_bin() {
        let r = build_report(&named(&[1.0, 1.0, 1.0]), 4).unwrap();
        assert_eq!(r.histogram.counts, vec![3]);
        assert_eq!(r.histogram.edges, vec![1.0, 1.0]);
        assert_eq!(r.mean, 1.0);
        assert_eq!(r.std, 0.0);
    }

    #[test]
    fn two_bin_example() {
        let r = build_report(&named(&[0.0, 1.0, 2.0, 3.0]), 2).unwrap();
        assert_eq!(r.histogram.counts, vec![2, 2]);
        assert_eq!(r.mean, 1.5);
        assert_eq!((r.min, r.max), (0.0, 3.0));
    }

    #[test]
    fn counts_sum_to_shape_count_and_mean_is_reproducible() {
        let values: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.7).sin().abs()).collect();
        let r = build_report(&named(&values), 50).unwrap();
        assert_eq!(r.histogram.counts.iter().sum::<usize>(), 1000);
        let mean = r.per_shape.iter().map(|(_, v)| v).sum::<f64>() / 1000.0;
        assert!((mean - r.mean).abs() <= 1e-9);
        assert_eq!(r.histogram.edges.len(), 51);
    }

    #[test]
    fn max_value_lands_in_last_bin() {
        let r = build_report(&named(&[0.0, 10.0]), 5).unwrap();
        assert_eq!(r.histogram.counts[0], 1);
        assert_eq!(r.histogram.counts[4], 1);
    }
}
