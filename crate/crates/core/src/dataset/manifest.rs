//! Dataset manifests: a per-dataset inventory of shapes with splits,
//! declared point counts, normalization statistics, and preparation
//! provenance.
//!
//! The on-disk form is a plain text file with a fixed field order so that
//! reruns are byte-identical:
//!
//! ```text
//! symcloud-manifest v1
//! class: airplane
//! source: <free text>
//! plane: <nx> <ny> <nz> <px> <py> <pz>      (optional, prep provenance)
//! boundary: duplicate|assign-right           (optional, prep provenance)
//! mu: <x> <y> <z>                            (optional, with sigma)
//! sigma: <s>
//! stats-split: train|val|test
//! stats-estimator: population
//! prov: <free text, repeatable>
//! shapes: <count>
//! <id>\t<split>\t<points>\t<relative path>   (count rows)
//! failures: <count>                          (only when non-empty)
//! <id>\t<message>                            (count rows)
//! ```
//!
//! Shape paths are stored relative to the manifest's directory. Floats
//! use Rust's shortest round-trip formatting, so values survive a
//! write/load cycle bitwise.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::dataset::io::{load_cloud_auto, CloudFormat};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryPolicy, Plane, PointCloud};

const HEADER: &str = "symcloud-manifest v1";

/// Dataset split a shape belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "train" => Some(Split::Train),
            "val" => Some(Split::Val),
            "test" => Some(Split::Test),
            _ => None,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One inventoried shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeEntry {
    pub id: String,
    pub split: Split,
    pub point_count: usize,
    /// Path relative to the manifest's directory.
    pub rel_path: PathBuf,
}

/// A shape loaded together with its manifest identity.
#[derive(Debug, Clone)]
pub struct ShapeRecord {
    pub id: String,
    pub cloud: PointCloud,
    pub split: Split,
}

/// A per-shape failure recorded during batch preparation.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeFailure {
    pub id: String,
    pub message: String,
}

/// Normalization statistics with their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationStats {
    pub mu: [f64; 3],
    pub sigma: f64,
    /// Split the statistics were derived from.
    pub split: Split,
    /// Estimator form, currently always "population".
    pub estimator: String,
}

/// Per-class shape inventory with normalization statistics and
/// preparation provenance.
#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub class_label: String,
    pub source: String,
    /// Mirroring plane recorded by half-object preparation.
    pub prep_plane: Option<Plane>,
    /// Boundary policy recorded by half-object preparation.
    pub prep_boundary: Option<BoundaryPolicy>,
    pub normalization: Option<NormalizationStats>,
    /// Free-form provenance notes, kept in order.
    pub provenance: Vec<String>,
    pub shapes: Vec<ShapeEntry>,
    pub failures: Vec<ShapeFailure>,
    base_dir: PathBuf,
}

/// Ids must stay safe for tab-separated manifests and comma-separated
/// report files.
pub fn validate_id(id: &str) -> Result<()> {
    if id.is_empty() {
        return Err(Error::InvalidInput("empty shape id".into()));
    }
    if id
        .chars()
        .any(|c| matches!(c, '\t' | '\n' | '\r' | ',' | '"' | '/' | '\\'))
    {
        return Err(Error::InvalidInput(format!(
            "shape id `{id}` contains a reserved character"
        )));
    }
    Ok(())
}

fn boundary_str(policy: BoundaryPolicy) -> &'static str {
    match policy {
        BoundaryPolicy::Duplicate => "duplicate",
        BoundaryPolicy::AssignRight => "assign-right",
    }
}

fn boundary_parse(s: &str) -> Option<BoundaryPolicy> {
    match s {
        "duplicate" => Some(BoundaryPolicy::Duplicate),
        "assign-right" => Some(BoundaryPolicy::AssignRight),
        _ => None,
    }
}

impl DatasetManifest {
    /// Creates an in-memory manifest rooted at `base_dir`.
    pub fn new(class_label: impl Into<String>, source: impl Into<String>, base_dir: impl Into<PathBuf>) -> Self {
        Self {
            class_label: class_label.into(),
            source: source.into(),
            prep_plane: None,
            prep_boundary: None,
            normalization: None,
            provenance: Vec::new(),
            shapes: Vec::new(),
            failures: Vec::new(),
            base_dir: base_dir.into(),
        }
    }

    /// Directory that relative shape paths resolve against.
    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn resolve(&self, entry: &ShapeEntry) -> PathBuf {
        self.base_dir.join(&entry.rel_path)
    }

    /// Entries of one split.
    pub fn split_entries(&self, split: Split) -> impl Iterator<Item = &ShapeEntry> {
        self.shapes.iter().filter(move |e| e.split == split)
    }

    /// Loads one shape's cloud.
    pub fn load_shape(&self, entry: &ShapeEntry) -> Result<PointCloud> {
        load_cloud_auto(&self.resolve(entry))
    }

    /// Loads one shape with its identity.
    pub fn load_record(&self, entry: &ShapeEntry) -> Result<ShapeRecord> {
        Ok(ShapeRecord {
            id: entry.id.clone(),
            cloud: self.load_shape(entry)?,
            split: entry.split,
        })
    }

    /// Serializes with the fixed field order; byte-stable across runs.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        out.push_str(&format!("class: {}\n", self.class_label));
        out.push_str(&format!("source: {}\n", self.source));
        if let Some(plane) = &self.prep_plane {
            let n = plane.normal();
            let m = plane.point();
            out.push_str(&format!(
                "plane: {:?} {:?} {:?} {:?} {:?} {:?}\n",
                n[0], n[1], n[2], m[0], m[1], m[2]
            ));
        }
        if let Some(policy) = self.prep_boundary {
            out.push_str(&format!("boundary: {}\n", boundary_str(policy)));
        }
        if let Some(stats) = &self.normalization {
            out.push_str(&format!(
                "mu: {:?} {:?} {:?}\n",
                stats.mu[0], stats.mu[1], stats.mu[2]
            ));
            out.push_str(&format!("sigma: {:?}\n", stats.sigma));
            out.push_str(&format!("stats-split: {}\n", stats.split));
            out.push_str(&format!("stats-estimator: {}\n", stats.estimator));
        }
        for note in &self.provenance {
            out.push_str(&format!("prov: {note}\n"));
        }
        out.push_str(&format!("shapes: {}\n", self.shapes.len()));
        for e in &self.shapes {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                e.id,
                e.split,
                e.point_count,
                e.rel_path.display()
            ));
        }
        if !self.failures.is_empty() {
            out.push_str(&format!("failures: {}\n", self.failures.len()));
            for f in &self.failures {
                let msg = f.message.replace(['\t', '\n', '\r'], " ");
                out.push_str(&format!("{}\t{}\n", f.id, msg));
            }
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Parses a manifest file; relative paths resolve against the file's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();

        let mut lines = Vec::new();
        let mut offset = 0usize;
        for raw in text.split('\n') {
            lines.push((offset, raw.trim_end_matches('\r')));
            offset += raw.len() + 1;
        }
        let mut pos = 0usize;
        let next = |pos: &mut usize| -> Option<(usize, &str)> {
            if *pos >= lines.len() {
                return None;
            }
            let (o, l) = lines[*pos];
            *pos += 1;
            if *pos == lines.len() && l.is_empty() {
                return None; // trailing newline
            }
            Some((o, l))
        };

        let (o, first) = next(&mut pos).ok_or_else(|| Error::parse(path, 0, "empty manifest"))?;
        if first != HEADER {
            return Err(Error::parse(path, o, format!("expected `{HEADER}`")));
        }

        let mut manifest = DatasetManifest::new("", "", base_dir);
        let mut saw_class = false;
        let mut mu: Option<[f64; 3]> = None;
        let mut sigma: Option<f64> = None;
        let mut stats_split: Option<Split> = None;
        let mut stats_estimator: Option<String> = None;
        let mut shape_count: Option<usize> = None;

        while let Some((o, line)) = next(&mut pos) {
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(path, o, format!("expected `key: value`, got `{line}`")))?;
            let value = value.trim_start_matches(' ');
            match key {
                "class" => {
                    manifest.class_label = value.to_string();
                    saw_class = true;
                }
                "source" => manifest.source = value.to_string(),
                "plane" => {
                    let nums = parse_floats(value, 6)
                        .ok_or_else(|| Error::parse(path, o, "plane needs 6 floats"))?;
                    let plane = Plane::new(
                        [nums[0], nums[1], nums[2]],
                        [nums[3], nums[4], nums[5]],
                    )
                    .map_err(|e| Error::parse(path, o, e.to_string()))?;
                    manifest.prep_plane = Some(plane);
                }
                "boundary" => {
                    manifest.prep_boundary = Some(boundary_parse(value).ok_or_else(|| {
                        Error::parse(path, o, format!("unknown boundary policy `{value}`"))
                    })?);
                }
                "mu" => {
                    let nums = parse_floats(value, 3)
                        .ok_or_else(|| Error::parse(path, o, "mu needs 3 floats"))?;
                    mu = Some([nums[0], nums[1], nums[2]]);
                }
                "sigma" => {
                    let s: f64 = value
                        .parse()
                        .map_err(|_| Error::parse(path, o, "invalid sigma"))?;
                    if !(s > 0.0) {
                        return Err(Error::parse(path, o, "sigma must be positive"));
                    }
                    sigma = Some(s);
                }
                "stats-split" => {
                    stats_split = Some(Split::parse(value).ok_or_else(|| {
                        Error::parse(path, o, format!("unknown split `{value}`"))
                    })?);
                }
                "stats-estimator" => stats_estimator = Some(value.to_string()),
                "prov" => manifest.provenance.push(value.to_string()),
                "shapes" => {
                    shape_count = Some(
                        value
                            .parse()
                            .map_err(|_| Error::parse(path, o, "invalid shape count"))?,
                    );
                    break;
                }
                other => {
                    return Err(Error::parse(path, o, format!("unknown manifest key `{other}`")))
                }
            }
        }
        if !saw_class {
            return Err(Error::parse(path, 0, "manifest lacks a class line"));
        }
        let shape_count =
            shape_count.ok_or_else(|| Error::parse(path, text.len(), "manifest lacks a shapes line"))?;

        match (mu, sigma) {
            (Some(mu), Some(sigma)) => {
                manifest.normalization = Some(NormalizationStats {
                    mu,
                    sigma,
                    split: stats_split
                        .ok_or_else(|| Error::parse(path, 0, "normalization lacks stats-split"))?,
                    estimator: stats_estimator
                        .ok_or_else(|| Error::parse(path, 0, "normalization lacks stats-estimator"))?,
                });
            }
            (None, None) => {}
            _ => return Err(Error::parse(path, 0, "mu and sigma must appear together")),
        }

        for _ in 0..shape_count {
            let (o, line) = next(&mut pos)
                .ok_or_else(|| Error::parse(path, text.len(), "manifest ends inside shape table"))?;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::parse(
                    path,
                    o,
                    format!("shape row needs 4 tab-separated fields, got {}", fields.len()),
                ));
            }
            validate_id(fields[0]).map_err(|e| Error::parse(path, o, e.to_string()))?;
            let split = Split::parse(fields[1])
                .ok_or_else(|| Error::parse(path, o, format!("unknown split `{}`", fields[1])))?;
            let point_count: usize = fields[2]
                .parse()
                .map_err(|_| Error::parse(path, o, "invalid point count"))?;
            manifest.shapes.push(ShapeEntry {
                id: fields[0].to_string(),
                split,
                point_count,
                rel_path: PathBuf::from(fields[3]),
            });
        }

        if let Some((o, line)) = next(&mut pos) {
            let count: usize = line
                .strip_prefix("failures: ")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(path, o, format!("unexpected trailing line `{line}`")))?;
            for _ in 0..count {
                let (o, line) = next(&mut pos)
                    .ok_or_else(|| Error::parse(path, text.len(), "manifest ends inside failures"))?;
                let (id, message) = line
                    .split_once('\t')
                    .ok_or_else(|| Error::parse(path, o, "failure row needs id and message"))?;
                manifest.failures.push(ShapeFailure {
                    id: id.to_string(),
                    message: message.to_string(),
                });
            }
        }

        let mut seen = std::collections::BTreeSet::new();
        for e in &manifest.shapes {
            if !seen.insert(&e.id) {
                return Err(Error::parse(path, 0, format!("duplicate shape id `{}`", e.id)));
            }
        }

        Ok(manifest)
    }

    /// Loads every entry and checks it parses to its declared count.
    pub fn verify(&self) -> VerifyReport {
        let problems: Vec<(String, String)> = self
            .shapes
            .par_iter()
            .filter_map(|e| match self.load_shape(e) {
                Ok(cloud) if cloud.len() == e.point_count => None,
                Ok(cloud) => Some((
                    e.id.clone(),
                    format!("declared {} points but parsed {}", e.point_count, cloud.len()),
                )),
                Err(err) => Some((e.id.clone(), err.to_string())),
            })
            .collect();
        VerifyReport {
            checked: self.shapes.len(),
            problems,
        }
    }
}

/// Outcome of a manifest integrity pass.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checked: usize,
    pub problems: Vec<(String, String)>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.problems.is_empty()
    }
}

fn parse_floats(value: &str, expected: usize) -> Option<Vec<f64>> {
    let nums: Vec<f64> = value
        .split_whitespace()
        .map(|t| t.parse().ok())
        .collect::<Option<_>>()?;
    (nums.len() == expected).then_some(nums)
}

/// Builds a manifest by scanning a directory of cloud files. `train/`,
/// `val/` and `test/` subdirectories map to splits; files directly in
/// the directory land in the train split. Every file is parsed so the
/// manifest records true point counts.
pub fn manifest_from_directory(dir: &Path, class_label: &str) -> Result<DatasetManifest> {
    if !dir.is_dir() {
        return Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        ));
    }
    let mut pending: Vec<(Split, PathBuf, PathBuf)> = Vec::new(); // split, abs, rel
    let mut scan = |sub: Option<Split>| -> Result<()> {
        let (root, split) = match sub {
            Some(split) => (dir.join(split.as_str()), split),
            None => (dir.to_path_buf(), Split::Train),
        };
        if !root.is_dir() {
            return Ok(());
        }
        let mut files: Vec<PathBuf> = fs::read_dir(&root)
            .map_err(|e| Error::io(&root, e))?
            .filter_map(|r| r.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && CloudFormat::from_path(p).is_ok())
            .collect();
        files.sort();
        for abs in files {
            let rel = match sub {
                Some(split) => Path::new(split.as_str()).join(abs.file_name().unwrap()),
                None => PathBuf::from(abs.file_name().unwrap()),
            };
            pending.push((split, abs, rel));
        }
        Ok(())
    };
    let has_split_dirs = [Split::Train, Split::Val, Split::Test]
        .iter()
        .any(|s| dir.join(s.as_str()).is_dir());
    if has_split_dirs {
        scan(Some(Split::Train))?;
        scan(Some(Split::Val))?;
        scan(Some(Split::Test))?;
    } else {
        scan(None)?;
    }
    if pending.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no point-cloud files found under {}",
            dir.display()
        )));
    }

    let entries: Vec<Result<ShapeEntry>> = pending
        .par_iter()
        .map(|(split, abs, rel)| {
            let id = abs
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| Error::InvalidInput(format!("unusable file name {}", abs.display())))?
                .to_string();
            validate_id(&id)?;
            let cloud = load_cloud_auto(abs)?;
            Ok(ShapeEntry {
                id,
                split: *split,
                point_count: cloud.len(),
                rel_path: rel.clone(),
            })
        })
        .collect();

    let mut manifest = DatasetManifest::new(class_label, dir.display().to_string(), dir);
    for e in entries {
        manifest.shapes.push(e?);
    }
    manifest.shapes.sort_by(|a, b| (a.split, &a.id).cmp(&(b.split, &b.id)));
    let mut seen = std::collections::BTreeSet::new();
    for e in &manifest.shapes {
        if !seen.insert(e.id.clone()) {
            return Err(Error::InvalidInput(format!(
                "duplicate shape id `{}` across splits",
                e.id
            )));
        }
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::io::{save_cloud, CloudFormat};
    use tempfile::TempDir;

    fn sample_manifest(base: &Path) -> DatasetManifest {
        let mut m = DatasetManifest::new("airplane", "unit-test", base);
        m.normalization = Some(NormalizationStats {
            mu: [0.1, -0.25, 1e-3],
            sigma: 0.5773502691896257,
            split: Split::Val,
            estimator: "population".into(),
        });
        m.prep_plane = Some(Plane::yz());
        m.prep_boundary = Some(BoundaryPolicy::Duplicate);
        m.provenance.push("created by unit test".into());
        m.shapes.push(ShapeEntry {
            id: "a".into(),
            split: Split::Train,
            point_count: 2,
            rel_path: "a.xyz".into(),
        });
        m.shapes.push(ShapeEntry {
            id: "b".into(),
            split: Split::Val,
            point_count: 1,
            rel_path: "b.xyz".into(),
        });
        m.failures.push(ShapeFailure {
            id: "c".into(),
            message: "parse error".into(),
        });
        m
    }

    #[test]
    fn write_load_round_trip_preserves_fields() {
        let dir = TempDir::new().unwrap();
        let m = sample_manifest(dir.path());
        let path = dir.path().join("manifest.txt");
        m.write(&path).unwrap();
        let back = DatasetManifest::load(&path).unwrap();
        assert_eq!(back.class_label, "airplane");
        assert_eq!(back.source, "unit-test");
        assert_eq!(back.normalization, m.normalization);
        assert_eq!(back.prep_plane, m.prep_plane);
        assert_eq!(back.prep_boundary, m.prep_boundary);
        assert_eq!(back.provenance, m.provenance);
        assert_eq!(back.shapes, m.shapes);
        assert_eq!(back.failures, m.failures);
    }

    #[test]
    fn serialization_is_byte_stable() {
        let dir = TempDir::new().unwrap();
        let m = sample_manifest(dir.path());
        let p1 = dir.path().join("m1.txt");
        let p2 = dir.path().join("m2.txt");
        m.write(&p1).unwrap();
        DatasetManifest::load(&p1).unwrap().write(&p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    }

    #[test]
    fn unknown_keys_and_bad_rows_are_rejected() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("m.txt");
        fs::write(&path, "symcloud-manifest v1\nclass: x\nwat: 1\nshapes: 0\n").unwrap();
        assert!(matches!(
            DatasetManifest::load(&path),
            Err(Error::Parse { .. })
        ));
        fs::write(
            &path,
            "symcloud-manifest v1\nclass: x\nshapes: 1\nonly-two\tfields\n",
        )
        .unwrap();
        assert!(DatasetManifest::load(&path).is_err());
    }

    #[test]
    fn id_validation() {
        assert!(validate_id("shape_000-1.v2").is_ok());
        for bad in ["", "a\tb", "a,b", "a/b", "a\"b"] {
            assert!(validate_id(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn verify_flags_count_mismatches_and_missing_files() {
        let dir = TempDir::new().unwrap();
        let cloud = PointCloud::new(vec![[0.0; 3], [1.0, 0.0, 0.0]]).unwrap();
        save_cloud(&cloud, &dir.path().join("a.xyz"), CloudFormat::Xyz).unwrap();
        let mut m = DatasetManifest::new("c", "t", dir.path());
        m.shapes.push(ShapeEntry {
            id: "a".into(),
            split: Split::Train,
            point_count: 2,
            rel_path: "a.xyz".into(),
        });
        assert!(m.verify().is_clean());

        m.shapes[0].point_count = 3;
        let report = m.verify();
        assert_eq!(report.problems.len(), 1);
        assert!(report.problems[0].1.contains("declared 3"));

        m.shapes.push(ShapeEntry {
            id: "ghost".into(),
            split: Split::Train,
            point_count: 1,
            rel_path: "ghost.xyz".into(),
        });
        assert_eq!(m.verify().problems.len(), 2);
    }

    #[test]
    fn directory_scan_maps_split_subdirs() {
        let dir = TempDir::new().unwrap();
        fs::create_dir(dir.path().join("train")).unwrap();
        fs::create_dir(dir.path().join("val")).unwrap();
        let c1 = PointCloud::new(vec![[0.0; 3]]).unwrap();
        let c2 = PointCloud::new(vec![[1.0; 3], [2.0; 3]]).unwrap();
        save_cloud(&c1, &dir.path().join("train/s1.xyz"), CloudFormat::Xyz).unwrap();
        save_cloud(&c2, &dir.path().join("val/s2.npy"), CloudFormat::Npy).unwrap();

        let m = manifest_from_directory(dir.path(), "toy").unwrap();
        assert_eq!(m.shapes.len(), 2);
        assert_eq!(m.shapes[0].id, "s1");
        assert_eq!(m.shapes[0].split, Split::Train);
        assert_eq!(m.shapes[1].split, Split::Val);
        assert_eq!(m.shapes[1].point_count, 2);
        assert_eq!(m.load_shape(&m.shapes[1]).unwrap(), c2);
    }

    #[test]
    fn directory_scan_without_split_dirs_is_all_train() {
        let dir = TempDir::new().unwrap();
        let c = PointCloud::new(vec![[0.0; 3]]).unwrap();
        save_cloud(&c, &dir.path().join("only.ply"), CloudFormat::Ply).unwrap();
        let m = manifest_from_directory(dir.path(), "toy").unwrap();
        assert_eq!(m.shapes.len(), 1);
        assert_eq!(m.shapes[0].split, Split::Train);
    }

    #[test]
    fn missing_directory_errors() {
        assert!(manifest_from_directory(Path::new("/nonexistent-symcloud"), "x").is_err());
    }
}
