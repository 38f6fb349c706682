//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use lagl::geodesy::{Ellipsoid, GeoPoint, GeoSegment};
use lagl::DiscreteCurve;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WGS84_A: f64 = 6_378_137.0;
pub const WGS84_F: f64 = 1.0 / 298.257_223_563;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vincenty's iterative inverse solution. `None` when the longitude
/// iteration fails to settle, which happens near antipodal pairs.
pub fn vincenty_inverse(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> Option<f64> {
    let (a, f) = (WGS84_A, WGS84_F);
    let b = a * (1.0 - f);
    let mut l = (lon2 - lon1).to_radians();
    while l > std::f64::consts::PI {
        l -= 2.0 * std::f64::consts::PI;
    }
    while l < -std::f64::consts::PI {
        l += 2.0 * std::f64::consts::PI;
    }
    let u1 = ((1.0 - f) * lat1.to_radians().tan()).atan();
    let u2 = ((1.0 - f) * lat2.to_radians().tan()).atan();
    let (su1, cu1) = u1.sin_cos();
    let (su2, cu2) = u2.sin_cos();

    let mut lambda = l;
    for _ in 0..1000 {
        let (sl, cl) = lambda.sin_cos();
        let sin_sigma = ((cu2 * sl).powi(2) + (cu1 * su2 - su1 * cu2 * cl).powi(2)).sqrt();
        if sin_sigma == 0.0 {
            return Some(0.0);
        }
        let cos_sigma = su1 * su2 + cu1 * cu2 * cl;
        let sigma = sin_sigma.atan2(cos_sigma);
        let sin_alpha = cu1 * cu2 * sl / sin_sigma;
        let cos2_alpha = 1.0 - sin_alpha * sin_alpha;
        let cos_2sm = if cos2_alpha != 0.0 {
            cos_sigma - 2.0 * su1 * su2 / cos2_alpha
        } else {
            0.0
        };
        let c = f / 16.0 * cos2_alpha * (4.0 + f * (4.0 - 3.0 * cos2_alpha));
        let prev = lambda;
        lambda = l
            + (1.0 - c)
                * f
                * sin_alpha
                * (sigma + c * sin_sigma * (cos_2sm + c * cos_sigma * (-1.0 + 2.0 * cos_2sm * cos_2sm)));
        if (lambda - prev).abs() < 1e-13 {
            let u_sq = cos2_alpha * (a * a - b * b) / (b * b);
            let big_a = 1.0 + u_sq / 16384.0 * (4096.0 + u_sq * (-768.0 + u_sq * (320.0 - 175.0 * u_sq)));
            let big_b = u_sq / 1024.0 * (256.0 + u_sq * (-128.0 + u_sq * (74.0 - 47.0 * u_sq)));
            let delta_sigma = big_b
                * sin_sigma
                * (cos_2sm
                    + big_b / 4.0
                        * (cos_sigma * (-1.0 + 2.0 * cos_2sm * cos_2sm)
                            - big_b / 6.0
                                * cos_2sm
                                * (-3.0 + 4.0 * sin_sigma * sin_sigma)
                                * (-3.0 + 4.0 * cos_2sm * cos_2sm)));
            return Some(b * big_a * (sigma - delta_sigma));
        }
        if lambda.abs() > std::f64::consts::PI {
            return None;
        }
    }
    None
}

pub fn vincenty(p: GeoPoint, q: GeoPoint) -> f64 {
    vincenty_inverse(p.lat, p.lon, q.lat, q.lon).expect("oracle pair is not near-antipodal")
}

pub fn g(lon: f64, lat: f64) -> GeoPoint {
    GeoPoint::new(lon, lat).unwrap()
}

/// Point reached from `p` after `s` meters along azimuth `azi`.
pub fn step(p: GeoPoint, azi: f64, s: f64) -> GeoPoint {
    let d = Ellipsoid::wgs84().direct(p.lat, p.lon, azi, s);
    g(d.lon, d.lat)
}

/// Minimum distance from `p` to the segment by sampling it every `step_m`
/// meters, refined to 0.1 m spacing around the coarse minimum.
pub fn sampled_segment_distance(p: GeoPoint, seg: &GeoSegment, step_m: f64) -> f64 {
    let len = seg.length();
    if len == 0.0 {
        return vincenty(p, seg.start);
    }
    let n = (len / step_m).ceil().max(1.0) as usize;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=n {
        let t = k as f64 / n as f64;
        let d = vincenty(p, seg.point_at(t * len));
        if d < best.0 {
            best = (d, t);
        }
    }
    let span = 2.0 * step_m / len;
    let lo = (best.1 - span).max(0.0);
    let hi = (best.1 + span).min(1.0);
    let m = (((hi - lo) * len) / 0.1).ceil().max(1.0) as usize;
    for k in 0..=m {
        let t = lo + (hi - lo) * k as f64 / m as f64;
        best.0 = best.0.min(vincenty(p, seg.point_at(t * len)));
    }
    best.0
}

/// Smooth random curve of about `length_m` meters with vertices every
/// `spacing_m` meters; heading drifts slowly.
pub fn wiggly_curve(rng: &mut ChaCha8Rng, start: GeoPoint, length_m: f64, spacing_m: f64) -> Vec<GeoPoint> {
    let n = (length_m / spacing_m).round() as usize;
    let mut heading: f64 = rng.gen_range(0.0..360.0);
    let mut turn: f64 = 0.0;
    let mut pts = vec![start];
    for _ in 0..n {
        turn = 0.9 * turn + rng.gen_range(-0.4..0.4);
        heading += turn;
        let s = spacing_m * rng.gen_range(0.7..1.3);
        pts.push(step(*pts.last().unwrap(), heading, s));
    }
    pts
}

/// Points every `step_m` meters (or closer) along the polyline, including
/// all vertices.
pub fn densify(points: &[GeoPoint], step_m: f64) -> Vec<GeoPoint> {
    let mut out = vec![points[0]];
    for w in points.windows(2) {
        let seg = GeoSegment::new(w[0], w[1]);
        let len = seg.length();
        let n = (len / step_m).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(if k == n { w[1] } else { seg.point_at(len * k as f64 / n as f64) });
        }
    }
    out
}

/// Nearest-point distances from each point of `a` to the set `b`, using a
/// planar bucket grid to pick candidates and the Vincenty oracle to
/// measure them.
pub struct PointSet {
    lat0: f64,
    lon0: f64,
    kx: f64,
    ky: f64,
    cell: f64,
    cells: std::collections::HashMap<(i64, i64), Vec<usize>>,
    pts: Vec<GeoPoint>,
    xy: Vec<(f64, f64)>,
}

impl PointSet {
    pub fn new(pts: Vec<GeoPoint>, cell: f64) -> Self {
        let lat0 = pts.iter().map(|p| p.lat).sum::<f64>() / pts.len() as f64;
        let lon0 = pts[0].lon;
        // Local metres per degree on the ellipsoid.
        let e2 = WGS84_F * (2.0 - WGS84_F);
        let (sl, cl) = lat0.to_radians().sin_cos();
        let w = (1.0 - e2 * sl * sl).sqrt();
        let ky = WGS84_A * (1.0 - e2) / (w * w * w) * std::f64::consts::PI / 180.0;
        let kx = WGS84_A * cl / w * std::f64::consts::PI / 180.0;
        let xy: Vec<(f64, f64)> = pts.iter().map(|p| ((p.lon - lon0) * kx, (p.lat - lat0) * ky)).collect();
        let mut cells: std::collections::HashMap<(i64, i64), Vec<usize>> = Default::default();
        for (k, (x, y)) in xy.iter().enumerate() {
            cells
                .entry(((x / cell).floor() as i64, (y / cell).floor() as i64))
                .or_default()
                .push(k);
        }
        PointSet { lat0, lon0, kx, ky, cell, cells, pts, xy }
    }

    pub fn nearest(&self, p: GeoPoint) -> f64 {
        let (x, y) = ((p.lon - self.lon0) * self.kx, (p.lat - self.lat0) * self.ky);
        let (cx, cy) = ((x / self.cell).floor() as i64, (y / self.cell).floor() as i64);
        let mut best_planar = f64::INFINITY;
        let mut ring = 0i64;
        // Grow rings until the ring is farther than the best planar hit.
        loop {
            for i in -ring..=ring {
                for j in -ring..=ring {
                    if i.abs() != ring && j.abs() != ring {
                        continue;
                    }
                    if let Some(v) = self.cells.get(&(cx + i, cy + j)) {
                        for &k in v {
                            let d = (self.xy[k].0 - x).hypot(self.xy[k].1 - y);
                            best_planar = best_planar.min(d);
                        }
                    }
                }
            }
            if (ring as f64 - 1.0) * self.cell > best_planar * 1.002 + 2.0 {
                break;
            }
            ring += 1;
        }
        let radius = best_planar * 1.002 + 2.0;
        let r = (radius / self.cell).ceil() as i64 + 1;
        let mut best = f64::INFINITY;
        for i in -r..=r {
            for j in -r..=r {
                if let Some(v) = self.cells.get(&(cx + i, cy + j)) {
                    for &k in v {
                        let d = (self.xy[k].0 - x).hypot(self.xy[k].1 - y);
                        if d <= radius {
                            best = best.min(vincenty(p, self.pts[k]));
                        }
                    }
                }
            }
        }
        best
    }
}

/// Directed mean and max over the densified point sets: every sample of `a`
/// weighs the arc length it stands for.
pub fn brute_directed(a: &DiscreteCurve, b: &DiscreteCurve, step_m: f64) -> (f64, f64) {
    let da = densify(a.points(), step_m);
    let set = PointSet::new(densify(b.points(), step_m), 25.0);
    let d: Vec<f64> = da.iter().map(|p| set.nearest(*p)).collect();
    let mut sum = 0.0;
    let mut len = 0.0;
    for k in 0..da.len() - 1 {
        let h = vincenty(da[k], da[k + 1]);
        sum += 0.5 * (d[k] + d[k + 1]) * h;
        len += h;
    }
    (sum / len, d.iter().copied().fold(0.0, f64::max))
}

/// Offsets `base` sideways by `offset(s)` meters at arc length `s`,
/// sampling every `spacing_m` meters.
pub fn offset_curve(base: &[GeoPoint], spacing_m: f64, offset: impl Fn(f64) -> f64) -> Vec<GeoPoint> {
    let dense = densify(base, spacing_m);
    let mut out = Vec::with_capacity(dense.len());
    let mut s = 0.0;
    for k in 0..dense.len() {
        let (p, q) = if k + 1 < dense.len() { (dense[k], dense[k + 1]) } else { (dense[k - 1], dense[k]) };
        let inv = Ellipsoid::wgs84().inverse(p.lat, p.lon, q.lat, q.lon);
        if k > 0 {
            s += vincenty(dense[k - 1], dense[k]);
        }
        out.push(step(dense[k], inv.azi1 + 90.0, offset(s)));
    }
    out
}

pub mod project {
    //! Synthetic three-region experiment written to disk.

    use std::fmt::Write as _;
    use std::path::{Path, PathBuf};

    use lagl::{AffineParams, PixelPoint};

    pub const DOMAIN: (f64, f64, f64, f64) = (0.0, 0.0, 399.0, 299.0);

    /// Region name, polygon in file order, and the exact affine.
    pub fn regions() -> Vec<(&'static str, Vec<PixelPoint>, AffineParams)> {
        let square = |x0: f64, y0: f64, w: f64| {
            vec![
                PixelPoint::new(x0, y0),
                PixelPoint::new(x0 + w / 2.0, y0 - 3.0),
                PixelPoint::new(x0 + w, y0),
                PixelPoint::new(x0 + w, y0 + w),
                PixelPoint::new(x0 + w / 2.0, y0 + w + 2.0),
                PixelPoint::new(x0, y0 + w),
            ]
        };
        vec![
            (
                "west",
                square(50.0, 110.0, 50.0),
                AffineParams { a1: 0.010, a2: 0.0010, a3: -0.0005, a4: -0.0100, b1: 10.0, b2: 50.0 },
            ),
            (
                "centre",
                square(175.0, 60.0, 55.0),
                AffineParams { a1: 0.011, a2: 0.0004, a3: -0.0010, a4: -0.0095, b1: 9.9, b2: 50.2 },
            ),
            (
                "east",
                square(300.0, 170.0, 45.0),
                AffineParams { a1: 0.009, a2: 0.0015, a3: 0.0002, a4: -0.0105, b1: 10.3, b2: 49.9 },
            ),
        ]
    }

    /// Pixel polyline through the three regions, every half pixel.
    pub fn probe() -> Vec<PixelPoint> {
        let knots: [(f64, f64); 5] = [(20.0, 140.0), (75.0, 135.0), (200.0, 90.0), (322.0, 192.0), (380.0, 200.0)];
        let mut out = Vec::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = ((b.0 - a.0).hypot(b.1 - a.1) * 2.0).ceil() as usize;
            for k in 0..n {
                let t = k as f64 / n as f64;
                out.push(PixelPoint::new(a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
            }
        }
        let last = knots[knots.len() - 1];
        out.push(PixelPoint::new(last.0, last.1));
        out
    }

    fn correspondences() -> String {
        let mut s = String::from("# synthetic landmarks, exact affine images\n");
        for (name, poly, t) in regions() {
            let _ = writeln!(s, "@set {name}");
            for (k, p) in poly.iter().enumerate() {
                let (lon, lat) = t.eval(*p);
                let _ = writeln!(s, "{},{},{lon},{lat},{name}{k}", p.x1, p.x2);
            }
        }
        s
    }

    /// GeoJSON reference curve: the probe under the centre affine, shifted.
    fn reference() -> String {
        let t = regions()[1].2;
        let coords: Vec<String> = probe()
            .iter()
            .step_by(7)
            .map(|p| {
                let (lon, lat) = t.eval(*p);
                format!("[{},{}]", lon + 0.02, lat - 0.01)
            })
            .collect();
        format!(
            "{{\"type\":\"FeatureCollection\",\"features\":[{{\"type\":\"Feature\",\"properties\":{{\"name\":\"River\"}},\"geometry\":{{\"type\":\"LineString\",\"coordinates\":[{}]}}}}]}}\n",
            coords.join(",")
        )
    }

    /// Writes inputs and a config into `dir`; returns the config path.
    pub fn write(dir: &Path, output_dir: &str) -> PathBuf {
        std::fs::write(dir.join("points.txt"), correspondences()).unwrap();
        let probe: String = probe().iter().map(|p| format!("{},{}\n", p.x1, p.x2)).collect();
        std::fs::write(dir.join("probe.txt"), probe).unwrap();
        std::fs::write(dir.join("river.geojson"), reference()).unwrap();
        let (x1a, x2a, x1b, x2b) = DOMAIN;
        let split = regions()[1].2.eval(PixelPoint::new(200.0, 90.0));
        let cfg = format!(
            r#"output_dir = "{output_dir}"
correspondences = ["points.txt"]
dump_field = true

[domain]
x1_min = {x1a}
x2_min = {x2a}
x1_max = {x1b}
x2_max = {x2b}

[[source_curves]]
name = "Probe"
file = "probe.txt"
split = {{ at = [{}, {}], names = ["P1", "P2"] }}

[[reference_curves]]
name = "River"
file = "river.geojson"

[[compare]]
a = "River"
b = "Probe"

[[compare]]
a = "River"
b = "P1"
"#,
            split.0, split.1
        );
        let path = dir.join(format!("{output_dir}.toml"));
        std::fs::write(&path, cfg).unwrap();
        path
    }
}
