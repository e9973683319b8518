//! Half-object dataset construction: mirror every train-split shape onto
//! one side of the plane, pass validation/test shapes through untouched,
//! and emit a manifest recording the preparation parameters.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::dataset::io::{save_cloud, CloudFormat};
use crate::dataset::manifest::{DatasetManifest, ShapeEntry, ShapeFailure};
use crate::dataset::Split;
use crate::error::{Error, Result};
use crate::geometry::{make_half_object, BoundaryPolicy, Plane};

/// Parameters recorded into the output manifest.
#[derive(Debug, Clone)]
pub struct PrepOptions {
    pub plane: Plane,
    pub policy: BoundaryPolicy,
}

impl Default for PrepOptions {
    fn default() -> Self {
        Self {
            plane: Plane::yz(),
            policy: BoundaryPolicy::Duplicate,
        }
    }
}

/// Fraction of per-shape failures beyond which preparation aborts.
const ABORT_FAILURE_FRACTION: f64 = 0.10;

enum Outcome {
    Done(ShapeEntry),
    Failed(ShapeFailure),
}

/// Converts every train-split shape of `manifest` into a half-object
/// under `options.plane`, writes the results (and byte-copies of the
/// other splits) into `out_dir`, and writes + returns the new manifest
/// (`out_dir/manifest.txt`).
///
/// Per-shape failures are recorded in the manifest and processing
/// continues; more than 10% failures aborts the run. Re-running over the
/// same inputs produces identical bytes.
pub fn build_half_dataset(
    manifest: &DatasetManifest,
    out_dir: &Path,
    options: &PrepOptions,
) -> Result<DatasetManifest> {
    if manifest.shapes.is_empty() {
        return Err(Error::InvalidInput("input manifest lists no shapes".into()));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let outcomes: Vec<Outcome> = manifest
        .shapes
        .par_iter()
        .map(|entry| {
            let result = prepare_one(manifest, entry, out_dir, options);
            match result {
                Ok(e) => Outcome::Done(e),
                Err(err) => Outcome::Failed(ShapeFailure {
                    id: entry.id.clone(),
                    message: err.to_string(),
                }),
            }
        })
        .collect();

    let mut out = DatasetManifest::new(&manifest.class_label, &manifest.source, out_dir);
    out.prep_plane = Some(options.plane);
    out.prep_boundary = Some(options.policy);
    out.normalization = manifest.normalization.clone();
    out.provenance = manifest.provenance.clone();
    for outcome in outcomes {
        match outcome {
            Outcome::Done(e) => out.shapes.push(e),
            Outcome::Failed(f) => out.failures.push(f),
        }
    }

    let total = manifest.shapes.len();
    if out.failures.len() as f64 > ABORT_FAILURE_FRACTION * total as f64 {
        return Err(Error::InvalidInput(format!(
            "aborting: {} of {} shapes failed preparation",
            out.failures.len(),
            total
        )));
    }

    out.write(&out_dir.join("manifest.txt"))?;
    Ok(out)
}

fn prepare_one(
    manifest: &DatasetManifest,
    entry: &ShapeEntry,
    out_dir: &Path,
    options: &PrepOptions,
) -> Result<ShapeEntry> {
    let src = manifest.resolve(entry);
    let format = CloudFormat::from_path(&src)?;
    let file_name = format!("{}.{}", entry.id, format.extension());
    let dst = out_dir.join(&file_name);

    if entry.split == Split::Train {
        let cloud = manifest.load_shape(entry)?;
        let half = make_half_object(&cloud, &options.plane, options.policy);
        save_cloud(&half, &dst, format)?;
        Ok(ShapeEntry {
            id: entry.id.clone(),
            split: entry.split,
            point_count: half.len(),
            rel_path: file_name.into(),
        })
    } else {
        // evaluation splits pass through untouched
        fs::copy(&src, &dst).map_err(|e| Error::io(&src, e))?;
        Ok(ShapeEntry {
            id: entry.id.clone(),
            split: entry.split,
            point_count: entry.point_count,
            rel_path: file_name.into(),
        })
    }
}
