//! `symcloud stats`: derive normalization statistics from one split and
//! record them in the manifest.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use rayon::prelude::*;
use symcloud::dataset::{NormalizationAccumulator, NormalizationStats, Split};

use super::{load_manifest, SplitArg};

#[derive(Args)]
pub struct StatsArgs {
    /// Input manifest file or directory of cloud files.
    #[arg(long)]
    input: PathBuf,
    /// Class label recorded when scanning a directory.
    #[arg(long, default_value = "unlabeled")]
    class: String,
    /// Split the statistics are derived from.
    #[arg(long, value_enum, default_value = "val")]
    split: SplitArg,
    /// Where to write the updated manifest (default: rewrite the input,
    /// or <dir>/manifest.txt when the input is a directory).
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn run(args: StatsArgs) -> Result<u8> {
    let mut manifest = load_manifest(&args.input, &args.class)?;
    let split = match args.split {
        SplitArg::Train => Split::Train,
        SplitArg::Val => Split::Val,
        SplitArg::Test => Split::Test,
        SplitArg::All => bail!("--split must name one split for stats derivation"),
    };

    let entries: Vec<_> = manifest.split_entries(split).cloned().collect();
    if entries.is_empty() {
        bail!(
            "manifest {} has no shapes in the {split} split",
            args.input.display()
        );
    }
    eprintln!("deriving statistics from {} {split} shapes", entries.len());

    let clouds = entries
        .par_iter()
        .map(|e| manifest.load_shape(e))
        .collect::<symcloud::Result<Vec<_>>>()?;
    let mut acc = NormalizationAccumulator::new();
    for cloud in &clouds {
        acc.push_cloud(cloud);
    }
    let (mu, sigma) = acc.finish()?;

    manifest.normalization = Some(NormalizationStats {
        mu,
        sigma,
        split,
        estimator: "population".into(),
    });
    let out_path = args.output.unwrap_or_else(|| {
        if args.input.is_dir() {
            args.input.join("manifest.txt")
        } else {
            args.input.clone()
        }
    });
    manifest.write(&out_path)?;

    println!("count: {}", entries.len());
    println!("points: {}", acc.point_count());
    println!("mu: {:?} {:?} {:?}", mu[0], mu[1], mu[2]);
    println!("sigma: {sigma:?}");
    println!("manifest: {}", out_path.display());
    Ok(0)
}
