//! Distances on the WGS84 ellipsoid.

mod ellipsoid;

pub use ellipsoid::{ang_normalize, Direct, Ellipsoid, Inverse, MAX_INVERSE_ITERATIONS, WGS84_A, WGS84_F};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Segments longer than this are densified before the local projection step.
pub const LONG_SEGMENT_M: f64 = 100_000.0;
/// Densification step for long segments.
pub const DENSIFY_STEP_M: f64 = 1_000.0;

/// A position on the WGS84 ellipsoid, in degrees.
///
/// Latitude is in [-90, 90]; longitude is kept in (-180, 180].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
}

impl GeoPoint {
    pub fn new(lon: f64, lat: f64) -> Result<Self> {
        if !lon.is_finite() || !lat.is_finite() {
            return Err(Error::NonFinite { context: None });
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::LatitudeOutOfRange { lat, context: None });
        }
        Ok(GeoPoint {
            lon: ang_normalize(lon),
            lat,
        })
    }

    /// Geodesic distance to `other` in meters.
    pub fn distance_to(&self, other: &GeoPoint) -> f64 {
        geodesic_distance(*self, *other)
    }
}

/// A geodesic segment between two points. Zero-length segments are allowed
/// and reported by [`GeoSegment::is_degenerate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoSegment {
    pub start: GeoPoint,
    pub end: GeoPoint,
}

impl GeoSegment {
    pub fn new(start: GeoPoint, end: GeoPoint) -> Self {
        GeoSegment { start, end }
    }

    pub fn is_degenerate(&self) -> bool {
        self.start == self.end
    }

    pub fn length(&self) -> f64 {
        geodesic_distance(self.start, self.end)
    }

    /// Point at `t` meters from `start` along the segment.
    pub fn point_at(&self, t: f64) -> GeoPoint {
        let inv = inverse(self.start, self.end);
        along(self.start, inv.azi1, t).0
    }
}

fn inverse(p: GeoPoint, q: GeoPoint) -> Inverse {
    Ellipsoid::wgs84().inverse(p.lat, p.lon, q.lat, q.lon)
}

/// Point and forward azimuth after travelling `s` meters from `p` along `azi`.
fn along(p: GeoPoint, azi: f64, s: f64) -> (GeoPoint, f64) {
    let d = Ellipsoid::wgs84().direct(p.lat, p.lon, azi, s);
    (GeoPoint { lon: d.lon, lat: d.lat }, d.azi)
}

/// Length of the shortest geodesic between `p` and `q` on WGS84, in meters.
///
/// Falls back to the path through the nearer pole if the azimuth iteration
/// does not settle, which can only happen for nearly antipodal points.
pub fn geodesic_distance(p: GeoPoint, q: GeoPoint) -> f64 {
    let inv = inverse(p, q);
    if inv.converged && inv.distance.is_finite() {
        inv.distance
    } else {
        meridional_path_length(p, q)
    }
}

fn meridional_path_length(p: GeoPoint, q: GeoPoint) -> f64 {
    let g = Ellipsoid::wgs84();
    let north = g.meridian_arc(p.lat, 90.0) + g.meridian_arc(q.lat, 90.0);
    let south = g.meridian_arc(p.lat, -90.0) + g.meridian_arc(q.lat, -90.0);
    north.min(south)
}

/// Geodesic midpoint of `p` and `q`.
pub fn geodesic_midpoint(p: GeoPoint, q: GeoPoint) -> GeoPoint {
    if p == q {
        return p;
    }
    let inv = inverse(p, q);
    along(p, inv.azi1, inv.distance / 2.0).0
}

/// Sum of geodesic distances between consecutive points.
pub fn polyline_length(points: &[GeoPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| geodesic_distance(w[0], w[1]))
        .sum()
}

/// Minimum geodesic distance from `p` to any point of the segment `s`.
///
/// The segment endpoints are projected into an azimuthal equidistant plane
/// centred on `p` to get a first foot-point estimate, which is then polished
/// on the ellipsoid by solving for the parameter where the connecting
/// geodesic meets the segment at a right angle. Segments longer than
/// [`LONG_SEGMENT_M`] are first sampled every [`DENSIFY_STEP_M`] to bracket
/// the minimum.
pub fn point_to_segment_distance(p: GeoPoint, s: &GeoSegment) -> f64 {
    let d_start = geodesic_distance(p, s.start);
    if s.is_degenerate() {
        return d_start;
    }
    let d_end = geodesic_distance(p, s.end);
    let seg = inverse(s.start, s.end);
    let len = seg.distance;
    let endpoint_min = d_start.min(d_end);
    if endpoint_min == 0.0 || len == 0.0 {
        return endpoint_min;
    }
    let foot = SegmentFoot {
        p,
        start: s.start,
        azi: seg.azi1,
    };

    let (lo, hi, guess) = if len <= LONG_SEGMENT_M {
        (0.0, len, aeqd_foot(p, s, len))
    } else {
        let n = (len / DENSIFY_STEP_M).ceil() as usize;
        let step = len / n as f64;
        let mut best = (d_start, 0usize);
        for k in 1..=n {
            let t = if k == n { len } else { k as f64 * step };
            let d = if k == n {
                d_end
            } else {
                geodesic_distance(p, along(s.start, seg.azi1, t).0)
            };
            if d < best.0 {
                best = (d, k);
            }
        }
        let k = best.1;
        let lo = k.saturating_sub(1) as f64 * step;
        let hi = ((k + 1) as f64 * step).min(len);
        let local = GeoSegment::new(foot.point(lo), foot.point(hi));
        (lo, hi, lo + aeqd_foot(p, &local, hi - lo))
    };

    let d = foot.minimize(lo, hi, guess);
    d.min(endpoint_min)
}

/// Foot-point parameter (meters from `s.start`) of `p` on `s`, computed in an
/// azimuthal equidistant plane centred at `p`.
fn aeqd_foot(p: GeoPoint, s: &GeoSegment, len: f64) -> f64 {
    let project = |q: GeoPoint| {
        let inv = inverse(p, q);
        let (sa, ca) = inv.azi1.to_radians().sin_cos();
        (inv.distance * sa, inv.distance * ca)
    };
    let (ax, ay) = project(s.start);
    let (bx, by) = project(s.end);
    let (dx, dy) = (bx - ax, by - ay);
    let d2 = dx * dx + dy * dy;
    if d2 == 0.0 {
        return 0.0;
    }
    let tau = (-(ax * dx + ay * dy) / d2).clamp(0.0, 1.0);
    tau * len
}

struct SegmentFoot {
    p: GeoPoint,
    start: GeoPoint,
    azi: f64,
}

impl SegmentFoot {
    fn point(&self, t: f64) -> GeoPoint {
        along(self.start, self.azi, t).0
    }

    /// Distance from `p` to the segment point at `t`, and the derivative of
    /// that distance with respect to `t`.
    fn eval(&self, t: f64) -> (f64, f64) {
        let (x, azi_seg) = along(self.start, self.azi, t);
        let inv = inverse(x, self.p);
        if inv.distance == 0.0 {
            return (0.0, 0.0);
        }
        let slope = -(inv.azi1 - azi_seg).to_radians().cos();
        (inv.distance, slope)
    }

    /// Minimum of the distance over `[lo, hi]` by regula falsi (Illinois
    /// variant) on the slope, seeded with `guess`.
    fn minimize(&self, lo: f64, hi: f64, guess: f64) -> f64 {
        let (f_lo, g_lo) = self.eval(lo);
        if g_lo >= 0.0 {
            return f_lo;
        }
        let (f_hi, g_hi) = self.eval(hi);
        if g_hi <= 0.0 {
            return f_hi;
        }
        let (mut a, mut ga) = (lo, g_lo);
        let (mut b, mut gb) = (hi, g_hi);
        let mut best = f_lo.min(f_hi);

        if guess > lo && guess < hi {
            let (f, g) = self.eval(guess);
            best = best.min(f);
            if g == 0.0 {
                return best;
            }
            if g < 0.0 {
                a = guess;
                ga = g;
            } else {
                b = guess;
                gb = g;
            }
        }

        let mut side = 0i8;
        for _ in 0..60 {
            if b - a < 1e-6 {
                break;
            }
            let t = (a * gb - b * ga) / (gb - ga);
            let t = if t.is_finite() && t > a && t < b {
                t
            } else {
                0.5 * (a + b)
            };
            let (f, g) = self.eval(t);
            best = best.min(f);
            if g.abs() < 1e-13 {
                break;
            }
            if g < 0.0 {
                a = t;
                ga = g;
                if side == -1 {
                    gb *= 0.5;
                }
                side = -1;
            } else {
                b = t;
                gb = g;
                if side == 1 {
                    ga *= 0.5;
                }
                side = 1;
            }
        }
        best
    }
}
