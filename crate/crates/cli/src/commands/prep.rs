//! `symcloud prep`: build a half-object dataset.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use symcloud::dataset::{build_half_dataset, PrepOptions, Split};
use symcloud::BoundaryPolicy;

use super::{ensure_out_dir, load_manifest, parse_plane};

#[derive(Args)]
pub struct PrepArgs {
    /// Input manifest file or directory of cloud files.
    #[arg(long)]
    input: PathBuf,
    /// Output dataset directory (manifest written as manifest.txt inside).
    #[arg(long)]
    output: PathBuf,
    /// Class label recorded when scanning a directory.
    #[arg(long, default_value = "unlabeled")]
    class: String,
    /// Mirroring plane as nx,ny,nz,px,py,pz.
    #[arg(long, default_value = "1,0,0,0,0,0")]
    plane: String,
    /// Assign on-plane points to the right half only instead of
    /// duplicating them into both halves.
    #[arg(long)]
    dedup_boundary: bool,
}

pub fn run(args: PrepArgs) -> Result<u8> {
    let manifest = load_manifest(&args.input, &args.class)?;
    ensure_out_dir(&args.output)?;
    let options = PrepOptions {
        plane: parse_plane(&args.plane)?,
        policy: if args.dedup_boundary {
            BoundaryPolicy::AssignRight
        } else {
            BoundaryPolicy::Duplicate
        },
    };

    eprintln!(
        "preparing {} shapes from {} into {}",
        manifest.shapes.len(),
        args.input.display(),
        args.output.display()
    );
    let prepared = build_half_dataset(&manifest, &args.output, &options)?;

    let converted = prepared
        .shapes
        .iter()
        .filter(|e| e.split == Split::Train)
        .count();
    println!("shapes: {}", prepared.shapes.len());
    println!("converted: {converted}");
    println!("copied: {}", prepared.shapes.len() - converted);
    println!("failures: {}", prepared.failures.len());
    println!("manifest: {}", args.output.join("manifest.txt").display());
    for f in &prepared.failures {
        eprintln!("warning: {}: {}", f.id, f.message);
    }

    Ok(if prepared.failures.is_empty() { 0 } else { 1 })
}
