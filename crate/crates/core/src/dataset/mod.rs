//! Point-cloud ingestion and serialization, per-class normalization
//! statistics, half-object dataset construction, and manifests.

mod features_io;
mod io;
mod manifest;
mod normalize;
mod prepare;

pub use features_io::{load_feature_table, save_feature_table};
pub use io::{load_cloud, load_cloud_auto, save_cloud, CloudFormat};
pub use manifest::{
    manifest_from_directory, validate_id, DatasetManifest, NormalizationStats, ShapeEntry,
    ShapeFailure, ShapeRecord, Split, VerifyReport,
};
pub use normalize::{
    compute_normalization, denormalize, normalize, DenormMode, NormalizationAccumulator,
};
pub use prepare::{build_half_dataset, PrepOptions};
