//! External feature binding tables: `id,f0,...,f{D-1}` CSV with a header
//! row, one row per shape. Ids follow the manifest id rules, so fields
//! never need quoting.

use std::fs;
use std::path::Path;

use crate::dataset::manifest::validate_id;
use crate::error::{Error, Result};
use crate::metrics::ExternalFeatureTable;

/// Loads a feature table, validating dimensions and finiteness.
pub fn load_feature_table(path: &Path) -> Result<ExternalFeatureTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    let mut offset = 0usize;
    let mut header_cols: Option<usize> = None;
    for raw in text.split('\n') {
        let line_offset = offset;
        offset += raw.len() + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if line.contains('"') {
            return Err(Error::parse(
                path,
                line_offset,
                "quoted fields are not supported in feature tables",
            ));
        }
        let fields: Vec<&str> = line.split(',').collect();
        match header_cols {
            None => {
                if fields.first() != Some(&"id") || fields.len() < 2 {
                    return Err(Error::parse(
                        path,
                        line_offset,
                        "expected header `id,f0,...`",
                    ));
                }
                header_cols = Some(fields.len());
            }
            Some(cols) => {
                if fields.len() != cols {
                    return Err(Error::parse(
                        path,
                        line_offset,
                        format!("row has {} fields, header has {cols}", fields.len()),
                    ));
                }
                let id = fields[0].to_string();
                validate_id(&id).map_err(|e| Error::parse(path, line_offset, e.to_string()))?;
                let values: Vec<f64> = fields[1..]
                    .iter()
                    .map(|t| {
                        t.trim().parse::<f64>().map_err(|_| {
                            Error::parse(path, line_offset, format!("invalid float `{t}`"))
                        })
                    })
                    .collect::<Result<_>>()?;
                entries.push((id, values));
            }
        }
    }
    if header_cols.is_none() {
        return Err(Error::parse(path, 0, "empty feature table"));
    }
    ExternalFeatureTable::new(entries)
}

/// Writes a feature table with the canonical header.
pub fn save_feature_table(path: &Path, rows: &[(String, Vec<f64>)]) -> Result<()> {
    let dim = rows
        .first()
        .map(|(_, v)| v.len())
        .ok_or_else(|| Error::InvalidInput("no rows to write".into()))?;
    let mut out = String::from("id");
    for k in 0..dim {
        out.push_str(&format!(",f{k}"));
    }
    out.push('\n');
    for (id, values) in rows {
        validate_id(id)?;
        if values.len() != dim {
            return Err(Error::InvalidInput(format!(
                "row `{id}` has {} values, expected {dim}",
                values.len()
            )));
        }
        out.push_str(id);
        for v in values {
            out.push_str(&format!(",{v:?}"));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
