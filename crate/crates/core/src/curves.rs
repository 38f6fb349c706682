//! Digitized curves on the ellipsoid and the distances used to compare them.
//!
//! Vertex `a_i` of a curve owns the segment running from the geodesic
//! midpoint of its incoming edge, through `a_i`, to the midpoint of its
//! outgoing edge; the end vertices own half an edge each. Every metric here
//! weights vertex `a_i` by the length of its segment.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geodesy::{geodesic_distance, geodesic_midpoint, point_to_segment_distance, GeoPoint, GeoSegment};

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    name: String,
    points: Vec<GeoPoint>,
    edge_lengths: Vec<f64>,
    segment_lengths: Vec<f64>,
    length: f64,
}

impl DiscreteCurve {
    /// Consecutive duplicate points are dropped; at least two distinct
    /// points must remain.
    pub fn new(name: impl Into<String>, points: Vec<GeoPoint>) -> Result<Self> {
        let name = name.into();
        let mut pts: Vec<GeoPoint> = Vec::with_capacity(points.len());
        for p in points {
            if !(p.lon.is_finite() && p.lat.is_finite()) {
                return Err(Error::NonFinite {
                    context: Some(format!("curve `{name}`")),
                });
            }
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        if pts.len() < 2 {
            return Err(Error::DegenerateCurve {
                curve: name,
                reason: format!("needs at least 2 distinct points, got {}", pts.len()),
            });
        }

        let mut edge_lengths = Vec::with_capacity(pts.len() - 1);
        let mut halves = Vec::with_capacity(pts.len() - 1);
        for w in pts.windows(2) {
            let m = geodesic_midpoint(w[0], w[1]);
            let (h0, h1) = (geodesic_distance(w[0], m), geodesic_distance(m, w[1]));
            edge_lengths.push(h0 + h1);
            halves.push((h0, h1));
        }
        let n = pts.len();
        let segment_lengths: Vec<f64> = (0..n)
            .map(|i| {
                let incoming = if i > 0 { halves[i - 1].1 } else { 0.0 };
                let outgoing = if i + 1 < n { halves[i].0 } else { 0.0 };
                incoming + outgoing
            })
            .collect();
        let length = segment_lengths.iter().sum();
        Ok(DiscreteCurve {
            name,
            points: pts,
            edge_lengths,
            segment_lengths,
            length,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn points(&self) -> &[GeoPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total length in meters.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Geodesic length of each edge `a_i -> a_{i+1}`.
    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    /// Length of the segment owned by each vertex.
    pub fn segment_lengths(&self) -> &[f64] {
        &self.segment_lengths
    }

    pub fn edges(&self) -> impl Iterator<Item = GeoSegment> + '_ {
        self.points.windows(2).map(|w| GeoSegment::new(w[0], w[1]))
    }

    /// The segment owned by vertex `i` as a polyline of two or three points.
    pub fn segment(&self, i: usize) -> Vec<GeoPoint> {
        let mut out = Vec::with_capacity(3);
        if i > 0 {
            out.push(geodesic_midpoint(self.points[i - 1], self.points[i]));
        }
        out.push(self.points[i]);
        if i + 1 < self.points.len() {
            out.push(geodesic_midpoint(self.points[i], self.points[i + 1]));
        }
        out
    }

    /// First point; by convention the river source.
    pub fn source(&self) -> GeoPoint {
        self.points[0]
    }

    /// Index of the vertex nearest to `reference`; ties keep the first.
    pub fn nearest_vertex(&self, reference: GeoPoint) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.points.iter().enumerate() {
            let d = geodesic_distance(*p, reference);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Splits at the vertex nearest to `reference`, which ends the first
    /// part and starts the second.
    pub fn split_at_nearest(
        &self,
        reference: GeoPoint,
        first: impl Into<String>,
        second: impl Into<String>,
    ) -> Result<(DiscreteCurve, DiscreteCurve)> {
        let m = self.nearest_vertex(reference);
        let head = DiscreteCurve::new(first, self.points[..=m].to_vec());
        let tail = DiscreteCurve::new(second, self.points[m..].to_vec());
        match (head, tail) {
            (Ok(h), Ok(t)) => Ok((h, t)),
            (Err(e), _) | (_, Err(e)) => Err(e.context(format!(
                "splitting `{}` at vertex {m} nearest to ({}, {})",
                self.name, reference.lon, reference.lat
            ))),
        }
    }
}

/// Same as [`DiscreteCurve::new`].
pub fn build_segments(name: impl Into<String>, points: Vec<GeoPoint>) -> Result<DiscreteCurve> {
    DiscreteCurve::new(name, points)
}

/// Distance gate for matching lengths, in meters.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BandThreshold(f64);

impl BandThreshold {
    pub fn new(meters: f64) -> Result<Self> {
        if meters.is_finite() && meters > 0.0 {
            Ok(BandThreshold(meters))
        } else {
            Err(Error::Argument(format!("band threshold must be positive, got {meters} m")))
        }
    }

    pub fn from_km(km: f64) -> Result<Self> {
        BandThreshold::new(km * 1000.0)
    }

    pub fn meters(self) -> f64 {
        self.0
    }

    pub fn km(self) -> f64 {
        self.0 / 1000.0
    }
}

/// Minimum geodesic distance from `p` to the polyline of `b`.
///
/// Edges are visited in order of a triangle-inequality lower bound and
/// skipped once the bound exceeds the best distance found.
pub fn distance_to_curve(p: GeoPoint, b: &DiscreteCurve) -> f64 {
    let d: Vec<f64> = b.points.iter().map(|q| geodesic_distance(p, *q)).collect();
    let mut best = d.iter().copied().fold(f64::INFINITY, f64::min);
    let mut order: Vec<(f64, usize)> = (0..b.edge_lengths.len())
        .map(|k| (0.5 * (d[k] + d[k + 1] - b.edge_lengths[k]), k))
        .collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    for (lower, k) in order {
        // Margin covers rounding in the bound and the foot search.
        if lower > best + 1e-6 {
            break;
        }
        let seg = GeoSegment::new(b.points[k], b.points[k + 1]);
        best = best.min(point_to_segment_distance(p, &seg));
    }
    best
}

/// `min_j D(a_i, b_j)` for every vertex of `a`, in vertex order.
pub fn anchor_distances(a: &DiscreteCurve, b: &DiscreteCurve) -> Vec<f64> {
    a.points.par_iter().map(|p| distance_to_curve(*p, b)).collect()
}

/// Directed summary of `a` against `b`, computed from one distance pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Directed {
    pub distances: Vec<f64>,
    pub weights: Vec<f64>,
    pub length: f64,
}

impl Directed {
    pub fn new(a: &DiscreteCurve, b: &DiscreteCurve) -> Self {
        Directed {
            distances: anchor_distances(a, b),
            weights: a.segment_lengths.clone(),
            length: a.length,
        }
    }

    /// Segment-length-weighted mean of the anchor distances.
    pub fn mean(&self) -> f64 {
        let s: f64 = self.distances.iter().zip(&self.weights).map(|(d, w)| d * w).sum();
        s / self.length
    }

    pub fn max(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }

    /// Total segment length of anchors strictly closer than the band.
    pub fn matched(&self, band: BandThreshold) -> f64 {
        self.distances
            .iter()
            .zip(&self.weights)
            .filter(|(d, _)| **d < band.meters())
            .map(|(_, w)| *w)
            .sum()
    }
}

pub fn directed_mean_hausdorff(a: &DiscreteCurve, b: &DiscreteCurve) -> f64 {
    Directed::new(a, b).mean()
}

pub fn directed_max_hausdorff(a: &DiscreteCurve, b: &DiscreteCurve) -> f64 {
    Directed::new(a, b).max()
}

/// Length-weighted combination of two directed means.
pub fn combine_mean(len_a: f64, ab: f64, len_b: f64, ba: f64) -> f64 {
    (len_a * ab + len_b * ba) / (len_a + len_b)
}

pub fn mean_hausdorff(a: &DiscreteCurve, b: &DiscreteCurve) -> f64 {
    combine_mean(a.length, directed_mean_hausdorff(a, b), b.length, directed_mean_hausdorff(b, a))
}

pub fn max_hausdorff(a: &DiscreteCurve, b: &DiscreteCurve) -> f64 {
    directed_max_hausdorff(a, b).max(directed_max_hausdorff(b, a))
}

/// Matched length in meters and as a percentage of the reference length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingLength {
    pub meters: f64,
    pub percent: f64,
}

pub fn matching_length(a: &DiscreteCurve, b: &DiscreteCurve, band: BandThreshold) -> MatchingLength {
    let m = Directed::new(a, b).matched(band);
    MatchingLength {
        meters: m,
        percent: 100.0 * m / a.length,
    }
}

/// Mean of the two directed matched lengths; percent is taken against the
/// summed curve lengths.
pub fn combine_matching(m_ab: f64, len_a: f64, m_ba: f64, len_b: f64) -> MatchingLength {
    MatchingLength {
        meters: (m_ab + m_ba) / 2.0,
        percent: 100.0 * (m_ab + m_ba) / (len_a + len_b),
    }
}

pub fn matching_average(a: &DiscreteCurve, b: &DiscreteCurve, band: BandThreshold) -> MatchingLength {
    let ab = matching_length(a, b, band).meters;
    let ba = matching_length(b, a, band).meters;
    combine_matching(ab, a.length, ba, b.length)
}

/// Geodesic distance between the first points of the two curves, in km.
pub fn source_distance(a: &DiscreteCurve, b: &DiscreteCurve) -> f64 {
    geodesic_distance(a.source(), b.source()) / 1000.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(lon: f64, lat: f64) -> GeoPoint {
        GeoPoint::new(lon, lat).unwrap()
    }

    fn meridian(lon: f64, lat0: f64, lat1: f64, n: usize) -> DiscreteCurve {
        let pts = (0..n)
            .map(|k| g(lon, lat0 + (lat1 - lat0) * k as f64 / (n - 1) as f64))
            .collect();
        DiscreteCurve::new("m", pts).unwrap()
    }

    #[test]
    fn two_point_curve_splits_in_half() {
        let c = DiscreteCurve::new("c", vec![g(0.0, 0.0), g(1.0, 0.0)]).unwrap();
        let s = c.segment_lengths();
        assert_eq!(s.len(), 2);
        assert!((s[0] - 55_659.745_396_5).abs() < 0.1);
        assert!((s[0] - s[1]).abs() < 1e-6);
        assert!((c.length() - 111_319.490_793).abs() < 1e-3);
    }

    #[test]
    fn three_equal_edges_give_quarter_half_quarter() {
        let c = DiscreteCurve::new("c", vec![g(0.0, 0.0), g(1.0, 0.0), g(2.0, 0.0)]).unwrap();
        let l = c.length();
        let s = c.segment_lengths();
        assert!((s[0] - l / 4.0).abs() < 1e-6);
        assert!((s[1] - l / 2.0).abs() < 1e-6);
        assert!((s[2] - l / 4.0).abs() < 1e-6);
        let edges: f64 = c.edge_lengths().iter().sum();
        assert!((edges - l).abs() <= 1e-9 * l);
    }

    #[test]
    fn duplicates_removed_and_degenerate_rejected() {
        let c = DiscreteCurve::new("c", vec![g(0.0, 0.0), g(0.0, 0.0), g(0.1, 0.0), g(0.1, 0.0)]).unwrap();
        assert_eq!(c.len(), 2);
        assert!(matches!(
            DiscreteCurve::new("d", vec![g(0.0, 0.0), g(0.0, 0.0)]),
            Err(Error::DegenerateCurve { .. })
        ));
    }

    #[test]
    fn segment_polylines() {
        let c = DiscreteCurve::new("c", vec![g(0.0, 0.0), g(1.0, 0.0), g(2.0, 0.0)]).unwrap();
        assert_eq!(c.segment(0).len(), 2);
        assert_eq!(c.segment(1).len(), 3);
        assert!((c.segment(1)[0].lon - 0.5).abs() < 1e-12);
    }

    #[test]
    fn self_distances_are_zero() {
        let a = meridian(10.0, 45.0, 45.5, 11);
        assert_eq!(directed_mean_hausdorff(&a, &a), 0.0);
        assert_eq!(max_hausdorff(&a, &a), 0.0);
        assert_eq!(mean_hausdorff(&a, &a), 0.0);
        let m = matching_length(&a, &a, BandThreshold::new(1.0).unwrap());
        assert_eq!(m.meters, a.length());
        assert_eq!(m.percent, 100.0);
    }

    #[test]
    fn single_anchor_max() {
        // Anchor on the equator 0.3 degrees east of a meridian curve.
        let b = meridian(0.0, -0.5, 0.5, 5);
        let d = geodesic_distance(g(0.0, 0.0), g(0.3, 0.0));
        let a = DiscreteCurve::new("a", vec![g(0.3, 0.0), g(0.3, 1e-9)]).unwrap();
        assert!((directed_max_hausdorff(&a, &b) - d).abs() < 1e-3);
    }

    #[test]
    fn matching_gates() {
        let a = meridian(0.0, 0.0, 0.2, 5);
        let b = meridian(0.5, 0.0, 0.2, 5);
        let far = BandThreshold::from_km(1.0).unwrap();
        let near = BandThreshold::from_km(100.0).unwrap();
        assert_eq!(matching_length(&a, &b, far).meters, 0.0);
        assert_eq!(matching_length(&a, &b, near).percent, 100.0);
        assert!(BandThreshold::new(0.0).is_err());
    }

    #[test]
    fn average_of_one_sided_match() {
        let m = combine_matching(0.0, 10.0, 30.0, 30.0);
        assert_eq!(m.meters, 15.0);
        assert_eq!(m.percent, 75.0);
    }

    #[test]
    fn split_keeps_shared_vertex() {
        let c = meridian(0.0, 0.0, 1.0, 11);
        let (h, t) = c.split_at_nearest(g(0.01, 0.41), "h", "t").unwrap();
        assert_eq!(h.len(), 5);
        assert_eq!(t.len(), 7);
        assert_eq!(h.points().last(), t.points().first());
        assert!(c.split_at_nearest(g(0.0, -1.0), "h", "t").is_err());
    }

    #[test]
    fn source_distance_km() {
        let a = DiscreteCurve::new("a", vec![g(0.0, 0.0), g(0.0, 1.0)]).unwrap();
        let b = DiscreteCurve::new("b", vec![g(1.0, 0.0), g(1.0, 1.0)]).unwrap();
        assert!((source_distance(&a, &b) - 111.319_490_793).abs() < 1e-6);
        assert_eq!(source_distance(&a, &a), 0.0);
    }

    #[test]
    fn pruned_search_matches_exhaustive() {
        let b = DiscreteCurve::new(
            "b",
            (0..40).map(|k| g(0.05 * k as f64, 0.3 * (k as f64 * 0.7).sin())).collect(),
        )
        .unwrap();
        for p in [g(0.4, 0.5), g(1.0, -0.2), g(3.0, 1.0), g(-0.5, 0.0)] {
            let exhaustive = b
                .edges()
                .map(|s| point_to_segment_distance(p, &s))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(distance_to_curve(p, &b), exhaustive);
        }
    }
}
