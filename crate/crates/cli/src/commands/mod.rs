//! Subcommand implementations and shared argument plumbing.

pub mod eval;
pub mod prep;
pub mod reconstruct;
pub mod stats;
pub mod symmetry;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use rayon::prelude::*;
use symcloud::dataset::{manifest_from_directory, DatasetManifest, ShapeEntry, Split};
use symcloud::metrics::Histogram;
use symcloud::{Plane, PointCloud};

/// Parses `--plane nx,ny,nz,px,py,pz`; the direction is normalized.
pub fn parse_plane(spec: &str) -> Result<Plane> {
    let parts: Vec<f64> = spec
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid plane component `{t}`"))
        })
        .collect::<Result<_>>()?;
    anyhow::ensure!(
        parts.len() == 6,
        "--plane needs 6 comma-separated values, got {}",
        parts.len()
    );
    Ok(Plane::from_direction(
        [parts[0], parts[1], parts[2]],
        [parts[3], parts[4], parts[5]],
    )?)
}

/// Split filter shared by several commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Train,
    Val,
    Test,
    All,
}

impl SplitArg {
    pub fn matches(&self, split: Split) -> bool {
        match self {
            SplitArg::Train => split == Split::Train,
            SplitArg::Val => split == Split::Val,
            SplitArg::Test => split == Split::Test,
            SplitArg::All => true,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SplitArg::Train => "train",
            SplitArg::Val => "val",
            SplitArg::Test => "test",
            SplitArg::All => "all",
        }
    }
}

/// Loads `--input` as a manifest file, or scans it as a directory.
pub fn load_manifest(input: &Path, class_label: &str) -> Result<DatasetManifest> {
    if input.is_dir() {
        Ok(manifest_from_directory(input, class_label)?)
    } else {
        Ok(DatasetManifest::load(input)?)
    }
}

/// Loads the filtered entries in parallel; parse failures come back as
/// `(id, message)` skips instead of aborting the batch.
pub fn load_clouds_with_skips(
    manifest: &DatasetManifest,
    filter: SplitArg,
) -> (Vec<(ShapeEntry, PointCloud)>, Vec<(String, String)>) {
    let entries: Vec<&ShapeEntry> = manifest
        .shapes
        .iter()
        .filter(|e| filter.matches(e.split))
        .collect();
    let results: Vec<_> = entries
        .par_iter()
        .map(|e| ((*e).clone(), manifest.load_shape(e)))
        .collect();
    let mut loaded = Vec::new();
    let mut skipped = Vec::new();
    for (entry, result) in results {
        match result {
            Ok(cloud) => loaded.push((entry, cloud)),
            Err(err) => skipped.push((entry.id, err.to_string())),
        }
    }
    (loaded, skipped)
}

pub fn ensure_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

/// Writes an `id,score` CSV.
pub fn write_scores_csv(path: &PathBuf, scores: &[(String, f64)]) -> Result<()> {
    let mut out = String::from("id,score\n");
    for (id, v) in scores {
        out.push_str(&format!("{id},{v:?}\n"));
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes a `bin_start,bin_end,count` CSV.
pub fn write_histogram_csv(path: &PathBuf, hist: &Histogram) -> Result<()> {
    let mut out = String::from("bin_start,bin_end,count\n");
    for (i, count) in hist.counts.iter().enumerate() {
        out.push_str(&format!(
            "{:?},{:?},{count}\n",
            hist.edges[i],
            hist.edges[i + 1]
        ));
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}
