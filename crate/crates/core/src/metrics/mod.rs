//! Shape distances and set-level evaluation metrics: Chamfer Distance,
//! reflection-symmetry scores, Earth Mover's Distance, 1-NNA, and the
//! Fréchet distance over per-shape feature distributions.

mod chamfer;
mod emd;
mod features;
mod frechet;
mod nna;
mod report;
mod symmetry;

pub use chamfer::chamfer_distance;
pub use emd::{emd_approx, emd_exact, emd_exact_capped, EXACT_SIZE_CAP};
pub use features::{
    moment_features, ExternalFeatureTable, FeatureSource, FeatureVector, MOMENT_FEATURE_DIM,
};
pub use frechet::{
    frechet_between, frechet_point_distance, sample_size_adequate, two_way_split, GaussianSummary,
};
pub use nna::{one_nn_accuracy, one_nn_report, NnaRecord, NnaReport, PairMetric, SetLabel};
pub use report::{build_report, Histogram, MetricReport};
pub use symmetry::{symmetry_score, SymmetryScore};
