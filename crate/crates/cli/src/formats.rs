//! Matrix and vector file formats.
//!
//! Three interchangeable matrix encodings, chosen by extension:
//! - `.csv`: dense rows of comma-separated entries;
//! - `.tsv`: an edge list `i<TAB>j<TAB>weight` (0-based) under a first
//!   line `n=<count>`;
//! - `.json`: `{"n": ..., "entries": [[...]], "labels": [...]?}`.
//!
//! JSON is the canonical round-trip format: floats are written with 17
//! significant digits, so read(write(m)) reproduces `m` bit-exactly.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use spectral_econ_core::SquareMatrix;

use crate::jsonfmt;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

pub fn matrix_to_json(m: &SquareMatrix) -> MatrixJson {
    MatrixJson {
        n: m.n(),
        entries: (0..m.n()).map(|i| m.row(i).to_vec()).collect(),
        labels: m.labels().map(|l| l.to_vec()),
    }
}

pub fn matrix_from_json(doc: &MatrixJson) -> Result<SquareMatrix> {
    if doc.entries.len() != doc.n {
        bail!(invalid(format!(
            "matrix declares n = {} but has {} rows",
            doc.n,
            doc.entries.len()
        )));
    }
    let mut m = SquareMatrix::from_rows(&doc.entries)?;
    m.set_labels(doc.labels.clone())?;
    Ok(m)
}

fn invalid(msg: String) -> spectral_econ_core::Error {
    spectral_econ_core::Error::InvalidInput(msg)
}

/// Reads a matrix, dispatching on the file extension.
pub fn read_matrix(path: &Path) -> Result<SquareMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow!(invalid(format!("cannot read {}: {e}", path.display()))))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let doc: MatrixJson = serde_json::from_str(&text)
                .map_err(|e| anyhow!(invalid(format!("{}: {e}", path.display()))))?;
            matrix_from_json(&doc)
        }
        Some("tsv") => parse_edge_list(&text).context("edge-list parse failed"),
        // Dense CSV is the default for .csv and anything unrecognized.
        _ => parse_dense_csv(&text).context("dense CSV parse failed"),
    }
}

/// Writes a matrix next to its format: `.json` files use the canonical
/// round-trip encoding, everything else dense CSV.
pub fn write_matrix(path: &Path, m: &SquareMatrix) -> Result<()> {
    let text = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => jsonfmt::to_string(&matrix_to_json(m))?,
        _ => {
            let mut s = String::new();
            for i in 0..m.n() {
                let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
                s.push_str(&row.join(","));
                s.push('\n');
            }
            s
        }
    };
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn parse_dense_csv(text: &str) -> Result<SquareMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|tok| tok.trim().parse::<f64>()).collect();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => bail!(invalid(format!("line {}: {e}", lineno + 1))),
        }
    }
    if rows.is_empty() {
        bail!(invalid("empty matrix file".into()));
    }
    Ok(SquareMatrix::from_rows(&rows)?)
}

pub fn parse_edge_list(text: &str) -> Result<SquareMatrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let (_, header) = lines
        .next()
        .ok_or_else(|| anyhow!(invalid("empty edge list".into())))?;
    let header = header.trim();
    let n: usize = header
        .strip_prefix("n=")
        .ok_or_else(|| anyhow!(invalid(format!("expected header n=<count>, got {header:?}"))))?
        .trim()
        .parse()
        .map_err(|e| anyhow!(invalid(format!("bad node count: {e}"))))?;
    let mut m = SquareMatrix::zeros(n);
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.trim().split('\t').collect();
        if fields.len() != 3 {
            bail!(invalid(format!(
                "line {}: expected i<TAB>j<TAB>weight, got {line:?}",
                lineno + 1
            )));
        }
        let i: usize = fields[0]
            .trim()
            .parse()
            .map_err(|e| anyhow!(invalid(format!("line {}: {e}", lineno + 1))))?;
        let j: usize = fields[1]
            .trim()
            .parse()
            .map_err(|e| anyhow!(invalid(format!("line {}: {e}", lineno + 1))))?;
        let w: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|e| anyhow!(invalid(format!("line {}: {e}", lineno + 1))))?;
        if i >= n || j >= n {
            bail!(invalid(format!(
                "line {}: edge ({i},{j}) out of range for n = {n}",
                lineno + 1
            )));
        }
        m.set(i, j, w);
    }
    Ok(m)
}

/// A vector argument: either an inline comma-separated list, the literal
/// `ones`, or a path to a file with one value per line (or commas).
pub fn parse_vector_arg(arg: &str, n: usize, base: &Path) -> Result<Vec<f64>> {
    if arg == "ones" {
        return Ok(vec![1.0; n]);
    }
    if let Ok(values) = arg
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<f64>, _>>()
    {
        if values.len() == n {
            return Ok(values);
        }
        bail!(invalid(format!(
            "vector has {} entries, expected {n}",
            values.len()
        )));
    }
    let path = base.join(arg);
    let text = fs::read_to_string(&path)
        .map_err(|e| anyhow!(invalid(format!("cannot read {}: {e}", path.display()))))?;
    let values: std::result::Result<Vec<f64>, _> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>())
        .collect();
    let values = values.map_err(|e| anyhow!(invalid(format!("{}: {e}", path.display()))))?;
    if values.len() != n {
        bail!(invalid(format!(
            "{} has {} entries, expected {n}",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}
