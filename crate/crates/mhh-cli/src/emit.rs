//! Deterministic TSV and JSON rendering plus atomic file output.
//!
//! Tables iterate in sorted key order and every serialized struct has a
//! fixed field order, so equal inputs produce byte-identical output. Files
//! are written through a temporary sibling and renamed into place, so a
//! crashed run never leaves a half-written table behind.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use mhh_core::table::{BidegreeTable, DimensionTable};

use crate::Failure;

pub fn tor_tsv(table: &DimensionTable) -> String {
    let mut out = String::from("filtration\tdegree\tweight\tdim\tbasis-labels\n");
    for (t, dim) in table.iter() {
        let labels = table.labels(t).join(",");
        out.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", t.f, t.d, t.w, dim, labels));
    }
    out
}

pub fn hilbert_tsv(table: &BidegreeTable) -> String {
    let mut out = String::from("stem\tweight\tdim\tbasis-labels\n");
    for (b, dim) in table.iter() {
        let labels = table.labels(b).join(",");
        out.push_str(&format!("{}\t{}\t{}\t{}\n", b.stem, b.w, dim, labels));
    }
    out
}

#[derive(Serialize)]
struct TorRow<'a> {
    filtration: i64,
    degree: i64,
    weight: i64,
    dim: usize,
    labels: &'a [String],
}

#[derive(Serialize)]
struct HilbertRow<'a> {
    stem: i64,
    weight: i64,
    dim: usize,
    labels: &'a [String],
}

#[derive(Serialize)]
struct Rows<T: Serialize> {
    rows: Vec<T>,
}

pub fn tor_json(table: &DimensionTable) -> Result<String, Failure> {
    let rows: Vec<TorRow> = table
        .iter()
        .map(|(t, dim)| TorRow {
            filtration: t.f,
            degree: t.d,
            weight: t.w,
            dim,
            labels: table.labels(t),
        })
        .collect();
    json_string(&Rows { rows })
}

pub fn hilbert_json(table: &BidegreeTable) -> Result<String, Failure> {
    let rows: Vec<HilbertRow> = table
        .iter()
        .map(|(b, dim)| HilbertRow {
            stem: b.stem,
            weight: b.w,
            dim,
            labels: table.labels(b),
        })
        .collect();
    json_string(&Rows { rows })
}

pub fn json_string<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Usage(format!("serialize: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Write to stdout, or atomically to `out` (temp file + rename).
pub fn write_output(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| Failure::Usage(format!("stdout: {e}"))),
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .map_err(|e| Failure::Usage(format!("write {}: {e}", path.display())))?;
            tmp.write_all(content.as_bytes())
                .map_err(|e| Failure::Usage(format!("write {}: {e}", path.display())))?;
            tmp.persist(path)
                .map_err(|e| Failure::Usage(format!("write {}: {}", path.display(), e.error)))?;
            Ok(())
        }
    }
}
