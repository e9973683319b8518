//! Point-cloud geometry toolkit for reflection-symmetry measurement,
//! half-object dataset construction, mirrored-shape reconstruction, and
//! generative-model evaluation (Chamfer Distance, Earth Mover's Distance,
//! 1-NNA, Fréchet feature distance).
//!
//! Shapes are plain ordered lists of 3D points ([`PointCloud`]). The
//! symmetry protocol reflects a shape about a plane with the Householder
//! pair (A, t) and scores the Chamfer Distance between original and
//! mirror. Half-object construction mirrors everything onto one side of
//! the plane; reconstruction concatenates a half shape with its mirror
//! and optionally downsamples with farthest point sampling.
//!
//! All operations are pure functions of their inputs and safe to call
//! concurrently; set-level metrics parallelize internally with rayon.

pub mod dataset;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod sampling;
pub mod spatial;
pub mod synthetic;
mod vec3;

pub use error::{Error, Result};
pub use geometry::{
    make_reflection, reconstruct_full, reflect_cloud, make_half_object, split_halves,
    BoundaryPolicy, Plane, PointCloud, ReflectionMap, Side, SplitHalves,
};
pub use sampling::{farthest_point_sample, farthest_point_sample_seeded};
pub use spatial::{build_index, NeighborIndex};
pub use vec3::Point3;
