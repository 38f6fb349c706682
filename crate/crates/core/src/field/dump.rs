//! Plain-text grid dumps, one file per parameter:
//!
//! ```text
//! # lagl-field
//! # param=a1 n1=<N1> n2=<N2> origin_x1=<x1> origin_x2=<x2>
//! <N1 comma-separated values for j = 1>
//! ...
//! <N1 comma-separated values for j = N2>
//! ```
//!
//! Values use Rust's shortest round-trip formatting, so reading a dump back
//! reproduces the field bit-for-bit. The mask dump has the same layout with
//! `param=mask` and integer entries: 0 for free nodes, `r + 1` for nodes of
//! region `r`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::affine::{PixelPoint, PARAM_NAMES};
use crate::error::{Error, Result};

use super::{GridDomain, ParameterField};

const MAGIC: &str = "# lagl-field";

fn render(grid: &GridDomain, name: &str, cell: impl Fn(usize) -> String) -> String {
    let o = grid.origin();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(
        out,
        "# param={name} n1={} n2={} origin_x1={} origin_x2={}",
        grid.n1(),
        grid.n2(),
        o.x1,
        o.x2
    );
    for j in 1..=grid.n2() {
        let row: Vec<String> = (1..=grid.n1()).map(|i| cell(grid.index(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// File names and contents of the six parameter dumps plus `mask.csv`.
pub fn field_dump_files(field: &ParameterField) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = PARAM_NAMES
        .iter()
        .enumerate()
        .map(|(p, name)| {
            let values = field.values(p);
            (
                format!("field_{name}.csv"),
                render(field.grid(), name, |k| format!("{}", values[k])),
            )
        })
        .collect();
    files.push(("mask.csv".to_string(), render_mask(field)));
    files
}

/// Writes `field_<param>.csv` for each parameter into `dir` and returns the
/// paths in parameter order.
pub fn write_field_dump(field: &ParameterField, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::with_capacity(6);
    for (name, text) in field_dump_files(field).into_iter().take(6) {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

fn render_mask(field: &ParameterField) -> String {
    let class = field.classification();
    render(field.grid(), "mask", |k| match class[k] {
        Some(r) => (r + 1).to_string(),
        None => "0".to_string(),
    })
}

pub fn write_mask_dump(field: &ParameterField, path: &Path) -> Result<()> {
    fs::write(path, render_mask(field)).map_err(|e| Error::io(path, e))
}

/// Reads one dump file back as `(param name, grid, values)`.
pub fn read_field_dump(path: &Path) -> Result<(String, GridDomain, Vec<f64>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(parse_err(1, "missing field dump header".into()));
    }
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .ok_or_else(|| parse_err(2, "missing parameter line".into()))?;
    let mut name = None;
    let (mut n1, mut n2, mut o1, mut o2) = (None, None, None, None);
    for kv in header.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| parse_err(2, format!("expected key=value, got `{kv}`")))?;
        let bad = |_| parse_err(2, format!("bad value for `{k}`: `{v}`"));
        match k {
            "param" => name = Some(v.to_string()),
            "n1" => n1 = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "n2" => n2 = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "origin_x1" => o1 = Some(v.parse::<f64>().map_err(|e| bad(e.to_string()))?),
            "origin_x2" => o2 = Some(v.parse::<f64>().map_err(|e| bad(e.to_string()))?),
            _ => return Err(parse_err(2, format!("unknown key `{k}`"))),
        }
    }
    let (Some(name), Some(n1), Some(n2), Some(o1), Some(o2)) = (name, n1, n2, o1, o2) else {
        return Err(parse_err(2, "incomplete parameter line".into()));
    };
    let grid = GridDomain::new(PixelPoint::new(o1, o2), n1, n2)?;
    let mut values = Vec::with_capacity(grid.len());
    for (row, line) in lines.enumerate() {
        let lineno = row + 3;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n1 {
            return Err(parse_err(lineno, format!("expected {n1} values, got {}", cells.len())));
        }
        for c in cells {
            values.push(
                c.trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(lineno, format!("bad number `{c}`: {e}")))?,
            );
        }
    }
    if values.len() != grid.len() {
        return Err(parse_err(
            n2 + 2,
            format!("expected {n2} rows, got {}", values.len() / n1),
        ));
    }
    Ok((name, grid, values))
}
