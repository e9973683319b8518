//! `symcloud verify`: manifest integrity pass.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use symcloud::dataset::DatasetManifest;

#[derive(Args)]
pub struct VerifyArgs {
    /// Manifest file to check.
    #[arg(long)]
    input: PathBuf,
}

pub fn run(args: VerifyArgs) -> Result<u8> {
    let manifest = DatasetManifest::load(&args.input)?;
    eprintln!("verifying {} entries", manifest.shapes.len());
    let report = manifest.verify();
    for (id, message) in &report.problems {
        println!("{id}: {message}");
    }
    println!("checked: {}", report.checked);
    println!("problems: {}", report.problems.len());
    Ok(if report.is_clean() { 0 } else { 1 })
}
