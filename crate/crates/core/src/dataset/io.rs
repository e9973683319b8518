//! Point-cloud file formats: XYZ text, ASCII PLY, and NPY v1.0.
//!
//! - XYZ: whitespace-separated `x y z` per line, `#` starts a comment.
//! - PLY: ASCII 1.0 with a vertex element carrying scalar x/y/z
//!   properties; other elements are skipped on read.
//! - NPY: magic `\x93NUMPY`, version 1.0, C-order little-endian `<f4` or
//!   `<f8`, shape (N, 3). Writing always emits `<f8`, so NPY round trips
//!   are bitwise.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::vec3::Point3;

/// Supported on-disk cloud encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    Xyz,
    Ply,
    Npy,
}

impl CloudFormat {
    /// Infers the format from a path extension (case-insensitive).
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .unwrap_or_default();
        match ext.as_str() {
            "xyz" => Ok(CloudFormat::Xyz),
            "ply" => Ok(CloudFormat::Ply),
            "npy" => Ok(CloudFormat::Npy),
            _ => Err(Error::InvalidInput(format!(
                "unrecognized cloud extension on {}",
                path.display()
            ))),
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            CloudFormat::Xyz => "xyz",
            CloudFormat::Ply => "ply",
            CloudFormat::Npy => "npy",
        }
    }
}

/// Loads a point cloud, validating that it is non-empty and finite.
pub fn load_cloud(path: &Path, format: CloudFormat) -> Result<PointCloud> {
    let points = match format {
        CloudFormat::Xyz => parse_xyz(path)?,
        CloudFormat::Ply => parse_ply(path)?,
        CloudFormat::Npy => parse_npy(path)?,
    };
    if points.is_empty() {
        return Err(Error::validation(path, "file contains no points"));
    }
    for (i, p) in points.iter().enumerate() {
        if !crate::vec3::is_finite(p) {
            return Err(Error::validation(
                path,
                format!("point {i} has a non-finite coordinate: {p:?}"),
            ));
        }
    }
    Ok(PointCloud::from_validated(points))
}

/// Loads a cloud, inferring the format from the path extension.
pub fn load_cloud_auto(path: &Path) -> Result<PointCloud> {
    load_cloud(path, CloudFormat::from_path(path)?)
}

/// Saves a point cloud. XYZ keeps 9 significant digits; PLY and NPY
/// write full-precision doubles.
pub fn save_cloud(cloud: &PointCloud, path: &Path, format: CloudFormat) -> Result<()> {
    let bytes = match format {
        CloudFormat::Xyz => encode_xyz(cloud).into_bytes(),
        CloudFormat::Ply => encode_ply(cloud).into_bytes(),
        CloudFormat::Npy => encode_npy(cloud),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    String::from_utf8(bytes).map_err(|e| {
        let offset = e.utf8_error().valid_up_to();
        Error::parse(path, offset, "file is not valid UTF-8")
    })
}

fn parse_xyz(path: &Path) -> Result<Vec<Point3>> {
    let text = read_text(path)?;
    let mut points = Vec::new();
    let mut offset = 0usize;
    for raw_line in text.split('\n') {
        let line_offset = offset;
        offset += raw_line.len() + 1;
        let line = raw_line.trim_end_matches('\r');
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 3 {
            return Err(Error::parse(
                path,
                line_offset,
                format!("expected 3 coordinates per line, found {}", tokens.len()),
            ));
        }
        let mut p = [0.0; 3];
        for (k, tok) in tokens.iter().enumerate() {
            p[k] = tok.parse::<f64>().map_err(|_| {
                Error::parse(path, line_offset, format!("invalid float `{tok}`"))
            })?;
        }
        points.push(p);
    }
    Ok(points)
}

fn encode_xyz(cloud: &PointCloud) -> String {
    let mut out = String::with_capacity(cloud.len() * 48);
    for p in cloud.iter() {
        // 9 significant digits
        out.push_str(&format!("{:.8e} {:.8e} {:.8e}\n", p[0], p[1], p[2]));
    }
    out
}

const PLY_SCALAR_TYPES: &[&str] = &[
    "char", "uchar", "short", "ushort", "int", "uint", "float", "double", "int8", "uint8",
    "int16", "uint16", "int32", "uint32", "float32", "float64",
];

struct PlyElement {
    name: String,
    count: usize,
    /// property names in declaration order; None marks a list property
    scalars: Vec<Option<String>>,
}

fn parse_ply(path: &Path) -> Result<Vec<Point3>> {
    let text = read_text(path)?;
    let mut lines = Vec::new();
    let mut offset = 0usize;
    for raw in text.split('\n') {
        lines.push((offset, raw.trim_end_matches('\r')));
        offset += raw.len() + 1;
    }
    let mut it = lines.iter();

    let (o, first) = it
        .next()
        .ok_or_else(|| Error::parse(path, 0, "empty file"))?;
    if first.trim() != "ply" {
        return Err(Error::parse(path, *o, "missing `ply` magic line"));
    }

    let mut elements: Vec<PlyElement> = Vec::new();
    let mut saw_format = false;
    let mut header_done = false;
    for (o, line) in it.by_ref() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("comment") || line.starts_with("obj_info") {
            continue;
        }
        if line == "end_header" {
            header_done = true;
            break;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("format") => {
                let rest: Vec<&str> = words.collect();
                if rest != ["ascii", "1.0"] {
                    return Err(Error::parse(path, *o, "only `format ascii 1.0` is supported"));
                }
                saw_format = true;
            }
            Some("element") => {
                let name = words
                    .next()
                    .ok_or_else(|| Error::parse(path, *o, "element without a name"))?;
                let count: usize = words
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| Error::parse(path, *o, "element without a valid count"))?;
                elements.push(PlyElement {
                    name: name.to_string(),
                    count,
                    scalars: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| Error::parse(path, *o, "property before any element"))?;
                let kind = words
                    .next()
                    .ok_or_else(|| Error::parse(path, *o, "property without a type"))?;
                if kind == "list" {
                    element.scalars.push(None);
                } else if PLY_SCALAR_TYPES.contains(&kind) {
                    let name = words
                        .next()
                        .ok_or_else(|| Error::parse(path, *o, "property without a name"))?;
                    element.scalars.push(Some(name.to_string()));
                } else {
                    return Err(Error::parse(path, *o, format!("unknown property type `{kind}`")));
                }
            }
            Some(other) => {
                return Err(Error::parse(path, *o, format!("unexpected header line `{other}`")));
            }
            None => {}
        }
    }
    if !header_done {
        return Err(Error::parse(path, text.len(), "header never reaches end_header"));
    }
    if !saw_format {
        return Err(Error::parse(path, 0, "header is missing the format line"));
    }

    let vertex = elements
        .iter()
        .find(|e| e.name == "vertex")
        .ok_or_else(|| Error::parse(path, 0, "no vertex element in header"))?;
    if vertex.scalars.iter().any(|s| s.is_none()) {
        return Err(Error::parse(
            path,
            0,
            "vertex element with list properties is unsupported",
        ));
    }
    let column = |name: &str| -> Result<usize> {
        vertex
            .scalars
            .iter()
            .position(|s| s.as_deref() == Some(name))
            .ok_or_else(|| Error::parse(path, 0, format!("vertex element lacks property `{name}`")))
    };
    let cols = [column("x")?, column("y")?, column("z")?];
    let width = vertex.scalars.len();

    let mut points = Vec::new();
    let mut data = it;
    for element in &elements {
        for row in 0..element.count {
            // skip blank lines between rows
            let (o, line) = loop {
                match data.next() {
                    Some((o, l)) if l.trim().is_empty() => {
                        let _ = (o, l);
                        continue;
                    }
                    Some((o, l)) => break (*o, *l),
                    None => {
                        return Err(Error::parse(
                            path,
                            text.len(),
                            format!("unexpected end of data in element `{}` row {row}", element.name),
                        ))
                    }
                }
            };
            if element.name != "vertex" {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != width {
                return Err(Error::parse(
                    path,
                    o,
                    format!("vertex row has {} values, expected {width}", tokens.len()),
                ));
            }
            let mut p = [0.0; 3];
            for (k, &c) in cols.iter().enumerate() {
                p[k] = tokens[c]
                    .parse::<f64>()
                    .map_err(|_| Error::parse(path, o, format!("invalid float `{}`", tokens[c])))?;
            }
            points.push(p);
        }
    }
    Ok(points)
}

fn encode_ply(cloud: &PointCloud) -> String {
    let mut out = String::with_capacity(cloud.len() * 48 + 128);
    out.push_str("ply\nformat ascii 1.0\n");
    out.push_str(&format!("element vertex {}\n", cloud.len()));
    out.push_str("property double x\nproperty double y\nproperty double z\nend_header\n");
    for p in cloud.iter() {
        out.push_str(&format!("{:?} {:?} {:?}\n", p[0], p[1], p[2]));
    }
    out
}

const NPY_MAGIC: &[u8] = b"\x93NUMPY";

fn parse_npy(path: &Path) -> Result<Vec<Point3>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 10 || &bytes[..6] != NPY_MAGIC {
        return Err(Error::parse(path, 0, "missing NPY magic"));
    }
    if bytes[6] != 1 || bytes[7] != 0 {
        return Err(Error::parse(
            path,
            6,
            format!("unsupported NPY version {}.{}", bytes[6], bytes[7]),
        ));
    }
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let data_start = 10 + header_len;
    if bytes.len() < data_start {
        return Err(Error::parse(path, 8, "header length exceeds file size"));
    }
    let header = std::str::from_utf8(&bytes[10..data_start])
        .map_err(|_| Error::parse(path, 10, "header is not ASCII"))?;

    let descr = dict_str_value(header, "descr")
        .ok_or_else(|| Error::parse(path, 10, "header lacks a descr entry"))?;
    let item_size = match descr {
        "<f4" => 4,
        "<f8" => 8,
        other => {
            return Err(Error::parse(
                path,
                10,
                format!("unsupported dtype `{other}`; expected <f4 or <f8"),
            ))
        }
    };
    match dict_raw_value(header, "fortran_order") {
        Some("False") => {}
        Some("True") => {
            return Err(Error::parse(path, 10, "fortran_order arrays are unsupported"))
        }
        _ => return Err(Error::parse(path, 10, "header lacks fortran_order")),
    }
    let shape_raw = dict_tuple_value(header, "shape")
        .ok_or_else(|| Error::parse(path, 10, "header lacks a shape entry"))?;
    let dims: Vec<usize> = shape_raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(path, 10, format!("invalid shape component `{s}`")))
        })
        .collect::<Result<_>>()?;
    if dims.len() != 2 || dims[1] != 3 {
        return Err(Error::parse(
            path,
            10,
            format!("expected shape (N, 3), got ({shape_raw})"),
        ));
    }
    let n = dims[0];

    let expected = n * 3 * item_size;
    let data = &bytes[data_start..];
    if data.len() != expected {
        return Err(Error::parse(
            path,
            data_start,
            format!("payload is {} bytes, expected {expected}", data.len()),
        ));
    }

    let mut points = Vec::with_capacity(n);
    match item_size {
        4 => {
            for i in 0..n {
                let mut p = [0.0; 3];
                for k in 0..3 {
                    let at = (i * 3 + k) * 4;
                    p[k] = f32::from_le_bytes(data[at..at + 4].try_into().unwrap()) as f64;
                }
                points.push(p);
            }
        }
        _ => {
            for i in 0..n {
                let mut p = [0.0; 3];
                for k in 0..3 {
                    let at = (i * 3 + k) * 8;
                    p[k] = f64::from_le_bytes(data[at..at + 8].try_into().unwrap());
                }
                points.push(p);
            }
        }
    }
    Ok(points)
}

/// Extracts the quoted string after `'key':` in a NPY header dict.
fn dict_str_value<'a>(header: &'a str, key: &str) -> Option<&'a str> {
    let rest = seek_key(header, key)?;
    let rest = rest.trim_start();
    let quote = rest.chars().next()?;
    if quote != '\'' && quote != '"' {
        return None;
    }
    let rest = &rest[1..];
    let end = rest.find(quote)?;
    Some(&rest[..end])
}

/// Extracts a bare token (True/False) after `'key':`.
fn dict_raw_value<'a>(header: &'a str, key: &str) -> Option<&'a str> {
    let rest = seek_key(header, key)?.trim_start();
    let end = rest.find([',', '}'])?;
    Some(rest[..end].trim())
}

/// Extracts the parenthesized contents after `'key':`.
fn dict_tuple_value<'a>(header: &'a str, key: &str) -> Option<&'a str> {
    let rest = seek_key(header, key)?.trim_start();
    let rest = rest.strip_prefix('(')?;
    let end = rest.find(')')?;
    Some(&rest[..end])
}

fn seek_key<'a>(header: &'a str, key: &str) -> Option<&'a str> {
    for quote in ['\'', '"'] {
        let pat = format!("{quote}{key}{quote}");
        if let Some(at) = header.find(&pat) {
            let rest = &header[at + pat.len()..];
            return rest.trim_start().strip_prefix(':');
        }
    }
    None
}

fn encode_npy(cloud: &PointCloud) -> Vec<u8> {
    let dict = format!(
        "{{'descr': '<f8', 'fortran_order': False, 'shape': ({}, 3), }}",
        cloud.len()
    );
    // pad header so the data section starts on a 64-byte boundary
    let unpadded = NPY_MAGIC.len() + 4 + dict.len() + 1;
    let padding = (64 - unpadded % 64) % 64;
    let header_len = dict.len() + padding + 1;

    let mut out = Vec::with_capacity(unpadded + padding + cloud.len() * 24);
    out.extend_from_slice(NPY_MAGIC);
    out.push(1);
    out.push(0);
    out.extend_from_slice(&(header_len as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out.extend(std::iter::repeat(b' ').take(padding));
    out.push(b'\n');
    for p in cloud.iter() {
        for c in p {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    out
}
