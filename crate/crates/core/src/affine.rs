//! Least-squares affine transformations between pixel and geographic space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesy::{geodesic_distance, GeoPoint};

/// A position on the source map: `x1` is the column (growing rightward),
/// `x2` the row (growing downward).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelPoint {
    pub x1: f64,
    pub x2: f64,
}

impl PixelPoint {
    pub const fn new(x1: f64, x2: f64) -> Self {
        PixelPoint { x1, x2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

/// `lon = a1*x1 + a2*x2 + b1`, `lat = a3*x1 + a4*x2 + b2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Names of the six parameters, in [`AffineParams::to_array`] order.
pub const PARAM_NAMES: [&str; 6] = ["a1", "a2", "a3", "a4", "b1", "b2"];

impl AffineParams {
    pub const IDENTITY: AffineParams = AffineParams {
        a1: 1.0,
        a2: 0.0,
        a3: 0.0,
        a4: 1.0,
        b1: 0.0,
        b2: 0.0,
    };

    pub fn to_array(&self) -> [f64; 6] {
        [self.a1, self.a2, self.a3, self.a4, self.b1, self.b2]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        AffineParams {
            a1: v[0],
            a2: v[1],
            a3: v[2],
            a4: v[3],
            b1: v[4],
            b2: v[5],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Raw evaluation of the two linear forms, `(lon, lat)` in degrees.
    pub fn eval(&self, x: PixelPoint) -> (f64, f64) {
        (
            self.a1 * x.x1 + self.a2 * x.x2 + self.b1,
            self.a3 * x.x1 + self.a4 * x.x2 + self.b2,
        )
    }

    /// Maps a pixel to a geographic point.
    pub fn apply(&self, x: PixelPoint) -> Result<GeoPoint> {
        apply_affine(self, x)
    }
}

pub fn apply_affine(t: &AffineParams, x: PixelPoint) -> Result<GeoPoint> {
    let (lon, lat) = t.eval(x);
    GeoPoint::new(lon, lat).map_err(|e| match e {
        Error::LatitudeOutOfRange { lat, .. } => Error::LatitudeOutOfRange {
            lat,
            context: Some(format!("image of pixel ({}, {})", x.x1, x.x2)),
        },
        Error::NonFinite { .. } => Error::NonFinite {
            context: Some(format!("image of pixel ({}, {})", x.x1, x.x2)),
        },
        other => other,
    })
}

/// One landmark: a pixel on the source map and its position in WGS84.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub source: PixelPoint,
    pub target: GeoPoint,
    pub label: String,
}

/// A named group of correspondences, typically one region of the map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceSet {
    pub name: String,
    pub pairs: Vec<Correspondence>,
    #[serde(default)]
    pub note: String,
}

impl CorrespondenceSet {
    pub fn new(name: impl Into<String>, pairs: Vec<Correspondence>) -> Self {
        CorrespondenceSet {
            name: name.into(),
            pairs,
            note: String::new(),
        }
    }

    pub fn sources(&self) -> Vec<PixelPoint> {
        self.pairs.iter().map(|p| p.source).collect()
    }

    /// Union of several sets, in order, under a new name.
    pub fn union<'a>(name: impl Into<String>, sets: impl IntoIterator<Item = &'a CorrespondenceSet>) -> Self {
        let pairs = sets.into_iter().flat_map(|s| s.pairs.iter().cloned()).collect();
        CorrespondenceSet::new(name, pairs)
    }
}

/// Least-squares objective: sum of squared degree-space residuals.
pub fn objective(t: &AffineParams, set: &CorrespondenceSet) -> f64 {
    set.pairs
        .iter()
        .map(|c| {
            let (lon, lat) = t.eval(c.source);
            let (tlon, tlat) = unwrap_target(c.target, set.pairs[0].target.lon);
            (tlon - lon).powi(2) + (tlat - lat).powi(2)
        })
        .sum()
}

/// Target longitude shifted by a multiple of 360 to lie within 180 degrees of
/// `reference`, so that sets straddling the antimeridian fit continuously.
fn unwrap_target(target: GeoPoint, reference: f64) -> (f64, f64) {
    let mut lon = target.lon;
    while lon - reference > 180.0 {
        lon -= 360.0;
    }
    while lon - reference < -180.0 {
        lon += 360.0;
    }
    (lon, target.lat)
}

/// Fits the affine transformation minimizing [`objective`].
///
/// The normal equations split into two 3x3 systems sharing the matrix
/// `[[Sx1x1, Sx1x2, Sx1], [Sx1x2, Sx2x2, Sx2], [Sx1, Sx2, n]]`, one for
/// `(a1, a2, b1)` and one for `(a3, a4, b2)`. Sources are centred first and
/// the translation is restored afterwards.
pub fn fit_affine(set: &CorrespondenceSet) -> Result<AffineParams> {
    let degenerate = |reason: String| Error::DegenerateSet {
        set: set.name.clone(),
        reason,
    };
    if set.pairs.is_empty() {
        return Err(degenerate("no correspondences".into()));
    }
    if let Some(c) = set.pairs.iter().find(|c| !c.source.is_finite()) {
        return Err(degenerate(format!("non-finite source point `{}`", c.label)));
    }

    // Merge duplicate sources, averaging their targets.
    let reference = set.pairs[0].target.lon;
    let mut merged: Vec<(PixelPoint, f64, f64, usize)> = Vec::with_capacity(set.pairs.len());
    for c in &set.pairs {
        let (lon, lat) = unwrap_target(c.target, reference);
        match merged.iter_mut().find(|m| m.0 == c.source) {
            Some(m) => {
                m.1 += lon;
                m.2 += lat;
                m.3 += 1;
            }
            None => merged.push((c.source, lon, lat, 1)),
        }
    }
    let points: Vec<(PixelPoint, f64, f64)> = merged
        .into_iter()
        .map(|(x, lon, lat, k)| (x, lon / k as f64, lat / k as f64))
        .collect();
    let n = points.len();
    if n < 3 {
        return Err(degenerate(format!(
            "{n} distinct source points, at least 3 are required"
        )));
    }

    let nf = n as f64;
    let c1 = points.iter().map(|p| p.0.x1).sum::<f64>() / nf;
    let c2 = points.iter().map(|p| p.0.x2).sum::<f64>() / nf;

    let mut s11 = 0.0;
    let mut s12 = 0.0;
    let mut s22 = 0.0;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut rhs_lon = [0.0; 3];
    let mut rhs_lat = [0.0; 3];
    for (x, lon, lat) in &points {
        let u = x.x1 - c1;
        let v = x.x2 - c2;
        s11 += u * u;
        s12 += u * v;
        s22 += v * v;
        s1 += u;
        s2 += v;
        rhs_lon[0] += lon * u;
        rhs_lon[1] += lon * v;
        rhs_lon[2] += lon;
        rhs_lat[0] += lat * u;
        rhs_lat[1] += lat * v;
        rhs_lat[2] += lat;
    }

    // Collinear sources make the 2x2 scatter block singular.
    let scale = s11 + s22;
    let det = s11 * s22 - s12 * s12;
    if scale == 0.0 || det <= 1e-12 * scale * scale {
        return Err(degenerate("source points are collinear".into()));
    }

    let m = [[s11, s12, s1], [s12, s22, s2], [s1, s2, nf]];
    let lon_sol = solve3(m, rhs_lon).ok_or_else(|| degenerate("singular normal matrix".into()))?;
    let lat_sol = solve3(m, rhs_lat).ok_or_else(|| degenerate("singular normal matrix".into()))?;

    let [a1, a2, e1] = lon_sol;
    let [a3, a4, e2] = lat_sol;
    let params = AffineParams {
        a1,
        a2,
        a3,
        a4,
        b1: e1 - a1 * c1 - a2 * c2,
        b2: e2 - a3 * c1 - a4 * c2,
    };
    if !params.is_finite() {
        return Err(degenerate("non-finite solution".into()));
    }
    Ok(params)
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col] == 0.0 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / m[row][row];
    }
    Some(x)
}

fn residuals_m(set: &CorrespondenceSet, map: impl Fn(PixelPoint) -> Result<GeoPoint>) -> Result<Vec<f64>> {
    set.pairs
        .iter()
        .map(|c| Ok(geodesic_distance(c.target, map(c.source)?)))
        .collect()
}

fn rms_km(r: &[f64]) -> f64 {
    if r.is_empty() {
        return 0.0;
    }
    let ms = r.iter().map(|d| d * d).sum::<f64>() / r.len() as f64;
    ms.sqrt() / 1000.0
}

fn max_km(r: &[f64]) -> f64 {
    r.iter().copied().fold(0.0, f64::max) / 1000.0
}

/// Root-mean-square geodesic residual of `t` on `set`, in kilometers.
pub fn mean_error(t: &AffineParams, set: &CorrespondenceSet) -> Result<f64> {
    Ok(rms_km(&residuals_m(set, |x| apply_affine(t, x))?))
}

/// Largest geodesic residual of `t` on `set`, in kilometers.
pub fn max_error(t: &AffineParams, set: &CorrespondenceSet) -> Result<f64> {
    Ok(max_km(&residuals_m(set, |x| apply_affine(t, x))?))
}

/// `(mean_error, max_error)` in kilometers for an arbitrary pixel-to-geo map.
pub fn map_errors(set: &CorrespondenceSet, map: impl Fn(PixelPoint) -> Result<GeoPoint>) -> Result<(f64, f64)> {
    let r = residuals_m(set, map)?;
    Ok((rms_km(&r), max_km(&r)))
}
