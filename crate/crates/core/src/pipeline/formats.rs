//! Input and output file formats.
//!
//! Correspondence files group records under `@set <name>` headers:
//!
//! ```text
//! # comment
//! @set Adriatic
//! @note optional free text
//! x1,x2,lon,lat,label
//! ```
//!
//! The label column is optional. Pixel curve files hold one `x1,x2` pair per
//! line. Geographic curves are GeoJSON `LineString` geometries with
//! `[lon, lat]` positions, optionally wrapped in a `Feature` or
//! `FeatureCollection`; a feature's `name` property names the curve.

use std::path::Path;

use serde_json::{json, Value};

use crate::affine::{Correspondence, CorrespondenceSet, PixelPoint};
use crate::curves::DiscreteCurve;
use crate::error::{Error, Result};
use crate::geodesy::GeoPoint;

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Content lines with 1-based numbers; blank lines and `#` comments dropped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn number(path: &Path, line: usize, field: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("{field}: `{}` is not a number", s.trim())))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(path, line, format!("{field} is not finite")))
    }
}

/// `path` only labels errors.
pub fn parse_correspondences(text: &str, path: &Path) -> Result<Vec<CorrespondenceSet>> {
    let mut sets: Vec<CorrespondenceSet> = Vec::new();
    for (line, l) in content_lines(text) {
        if let Some(name) = l.strip_prefix("@set") {
            let name = name.trim();
            if name.is_empty() {
                return Err(parse_err(path, line, "@set needs a name"));
            }
            if sets.iter().any(|s| s.name == name) {
                return Err(parse_err(path, line, format!("set `{name}` defined twice")));
            }
            sets.push(CorrespondenceSet::new(name, Vec::new()));
            continue;
        }
        let Some(set) = sets.last_mut() else {
            return Err(parse_err(path, line, "record before the first @set header"));
        };
        if let Some(note) = l.strip_prefix("@note") {
            if !set.note.is_empty() {
                set.note.push('\n');
            }
            set.note.push_str(note.trim());
            continue;
        }
        let cols: Vec<&str> = l.splitn(5, ',').collect();
        if cols.len() < 4 {
            return Err(parse_err(path, line, "expected x1,x2,lon,lat[,label]"));
        }
        let source = PixelPoint::new(
            number(path, line, "x1", cols[0])?,
            number(path, line, "x2", cols[1])?,
        );
        let target = GeoPoint::new(number(path, line, "lon", cols[2])?, number(path, line, "lat", cols[3])?)
            .map_err(|e| parse_err(path, line, e.to_string()))?;
        let label = cols.get(4).map(|s| s.trim().to_string()).unwrap_or_default();
        set.pairs.push(Correspondence { source, target, label });
    }
    Ok(sets)
}

pub fn read_correspondences(path: &Path) -> Result<Vec<CorrespondenceSet>> {
    parse_correspondences(&read(path)?, path)
}

pub fn format_correspondences(sets: &[CorrespondenceSet]) -> String {
    let mut out = String::new();
    for s in sets {
        out.push_str(&format!("@set {}\n", s.name));
        for n in s.note.lines() {
            out.push_str(&format!("@note {n}\n"));
        }
        for c in &s.pairs {
            out.push_str(&format!(
                "{},{},{},{}",
                c.source.x1, c.source.x2, c.target.lon, c.target.lat
            ));
            if !c.label.is_empty() {
                out.push(',');
                out.push_str(&c.label);
            }
            out.push('\n');
        }
    }
    out
}

pub fn parse_pixel_curve(text: &str, path: &Path) -> Result<Vec<PixelPoint>> {
    content_lines(text)
        .map(|(line, l)| {
            let cols: Vec<&str> = l.split(',').collect();
            if cols.len() != 2 {
                return Err(parse_err(path, line, "expected x1,x2"));
            }
            Ok(PixelPoint::new(
                number(path, line, "x1", cols[0])?,
                number(path, line, "x2", cols[1])?,
            ))
        })
        .collect()
}

pub fn read_pixel_curve(path: &Path) -> Result<Vec<PixelPoint>> {
    parse_pixel_curve(&read(path)?, path)
}

/// A polyline from a GeoJSON file with its `name` property, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoLine {
    pub name: Option<String>,
    pub points: Vec<GeoPoint>,
}

fn json_err(path: &Path, message: impl Into<String>) -> Error {
    parse_err(path, 0, message)
}

fn line_string(path: &Path, geometry: &Value) -> Result<Vec<GeoPoint>> {
    if geometry.get("type").and_then(Value::as_str) != Some("LineString") {
        return Err(json_err(path, "geometry is not a LineString"));
    }
    let coords = geometry
        .get("coordinates")
        .and_then(Value::as_array)
        .ok_or_else(|| json_err(path, "LineString without coordinates"))?;
    coords
        .iter()
        .enumerate()
        .map(|(k, pos)| {
            let pos = pos.as_array().filter(|p| p.len() >= 2);
            let lon = pos.and_then(|p| p[0].as_f64());
            let lat = pos.and_then(|p| p[1].as_f64());
            match (lon, lat) {
                (Some(lon), Some(lat)) => {
                    GeoPoint::new(lon, lat).map_err(|e| json_err(path, format!("position {k}: {e}")))
                }
                _ => Err(json_err(path, format!("position {k} is not [lon, lat]"))),
            }
        })
        .collect()
}

fn feature(path: &Path, f: &Value) -> Result<GeoLine> {
    let name = f
        .get("properties")
        .and_then(|p| p.get("name"))
        .and_then(Value::as_str)
        .map(str::to_string);
    let geometry = f.get("geometry").ok_or_else(|| json_err(path, "feature without geometry"))?;
    Ok(GeoLine {
        name,
        points: line_string(path, geometry)?,
    })
}

pub fn parse_geojson(text: &str, path: &Path) -> Result<Vec<GeoLine>> {
    let root: Value = serde_json::from_str(text).map_err(|e| parse_err(path, e.line(), e.to_string()))?;
    match root.get("type").and_then(Value::as_str) {
        Some("FeatureCollection") => root
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| json_err(path, "FeatureCollection without features"))?
            .iter()
            .map(|f| feature(path, f))
            .collect(),
        Some("Feature") => Ok(vec![feature(path, &root)?]),
        Some("LineString") => Ok(vec![GeoLine {
            name: None,
            points: line_string(path, &root)?,
        }]),
        _ => Err(json_err(path, "expected a FeatureCollection, Feature or LineString")),
    }
}

pub fn read_geojson(path: &Path) -> Result<Vec<GeoLine>> {
    parse_geojson(&read(path)?, path)
}

/// Picks the line named `feature`, or the only line when `feature` is `None`.
pub fn select_line(lines: Vec<GeoLine>, feature: Option<&str>, path: &Path) -> Result<GeoLine> {
    match feature {
        Some(want) => lines
            .into_iter()
            .find(|l| l.name.as_deref() == Some(want))
            .ok_or_else(|| json_err(path, format!("no feature named `{want}`"))),
        None if lines.len() == 1 => Ok(lines.into_iter().next().unwrap()),
        None => Err(json_err(
            path,
            format!("{} features present; name one with `feature`", lines.len()),
        )),
    }
}

/// FeatureCollection of the curves, one `LineString` feature each with
/// `name` and `points` properties.
pub fn geojson_string(curves: &[&DiscreteCurve]) -> String {
    let features: Vec<Value> = curves
        .iter()
        .map(|c| {
            let coords: Vec<Value> = c.points().iter().map(|p| json!([p.lon, p.lat])).collect();
            json!({
                "type": "Feature",
                "properties": { "name": c.name(), "points": c.len() },
                "geometry": { "type": "LineString", "coordinates": coords },
            })
        })
        .collect();
    let fc = json!({ "type": "FeatureCollection", "features": features });
    let mut s = serde_json::to_string_pretty(&fc).expect("serializing JSON values cannot fail");
    s.push('\n');
    s
}
