//! Polygon predicates and rasterization of Dirichlet regions onto the grid.

use crate::affine::PixelPoint;
use crate::error::{Error, Result};

use super::{DirichletRegion, GridDomain};

/// Set of grid nodes, indexed like [`GridDomain::index`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMask {
    n1: usize,
    n2: usize,
    marked: Vec<bool>,
}

impl NodeMask {
    pub fn new(n1: usize, n2: usize) -> Self {
        NodeMask {
            n1,
            n2,
            marked: vec![false; n1 * n2],
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        (j - 1) * self.n1 + (i - 1)
    }

    /// Whether node `(i, j)` (1-based) is in the set.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        i >= 1 && j >= 1 && i <= self.n1 && j <= self.n2 && self.marked[self.idx(i, j)]
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        let k = self.idx(i, j);
        self.marked[k] = true;
    }

    pub fn count(&self) -> usize {
        self.marked.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.marked.iter().any(|&m| m)
    }

    /// Marked nodes as 1-based `(i, j)`, `i` varying fastest.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n1 = self.n1;
        self.marked
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(move |(k, _)| (k % n1 + 1, k / n1 + 1))
    }
}

fn cross(o: PixelPoint, a: PixelPoint, b: PixelPoint) -> f64 {
    (a.x1 - o.x1) * (b.x2 - o.x2) - (a.x2 - o.x2) * (b.x1 - o.x1)
}

fn on_segment(p: PixelPoint, a: PixelPoint, b: PixelPoint) -> bool {
    let scale = (b.x1 - a.x1).abs().max((b.x2 - a.x2).abs()).max(1.0);
    cross(a, b, p).abs() <= 1e-12 * scale * scale
        && p.x1 >= a.x1.min(b.x1) - 1e-12 * scale
        && p.x1 <= a.x1.max(b.x1) + 1e-12 * scale
        && p.x2 >= a.x2.min(b.x2) - 1e-12 * scale
        && p.x2 <= a.x2.max(b.x2) + 1e-12 * scale
}

/// Even-odd point-in-polygon test; points on an edge count as inside.
pub fn point_in_polygon(p: PixelPoint, polygon: &[PixelPoint]) -> bool {
    let n = polygon.len();
    let mut inside = false;
    for k in 0..n {
        let a = polygon[k];
        let b = polygon[(k + 1) % n];
        if on_segment(p, a, b) {
            return true;
        }
        if (a.x2 > p.x2) != (b.x2 > p.x2) {
            let x = a.x1 + (p.x2 - a.x2) * (b.x1 - a.x1) / (b.x2 - a.x2);
            if p.x1 < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn segments_intersect(p1: PixelPoint, p2: PixelPoint, q1: PixelPoint, q2: PixelPoint) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    on_segment(p1, q1, q2) || on_segment(p2, q1, q2) || on_segment(q1, p1, p2) || on_segment(q2, p1, p2)
}

/// Returns the first pair of non-adjacent intersecting edges, if any. Edge
/// `k` joins vertex `k` to vertex `k + 1` (cyclically).
pub fn find_self_intersection(polygon: &[PixelPoint]) -> Option<(usize, usize)> {
    let n = polygon.len();
    if n < 4 {
        return None;
    }
    for e1 in 0..n {
        for e2 in e1 + 2..n {
            if e1 == 0 && e2 == n - 1 {
                continue;
            }
            let (a, b) = (polygon[e1], polygon[(e1 + 1) % n]);
            let (c, d) = (polygon[e2], polygon[(e2 + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return Some((e1, e2));
            }
        }
    }
    None
}

/// Convex hull (counter-clockwise in the x1/x2 plane), monotone chain.
pub fn convex_hull(points: &[PixelPoint]) -> Vec<PixelPoint> {
    let mut pts: Vec<PixelPoint> = points.to_vec();
    pts.sort_by(|a, b| a.x1.total_cmp(&b.x1).then(a.x2.total_cmp(&b.x2)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<PixelPoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<PixelPoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Dirichlet nodes of a region: every node whose centre lies inside or on
/// the polygon, plus the 4-neighbours of those nodes.
///
/// Fails if the polygon encloses no node, or if any marked node would sit on
/// or beyond the domain boundary.
pub fn rasterize_envelope(region: &DirichletRegion, grid: &GridDomain) -> Result<NodeMask> {
    let (lo1, hi1, lo2, hi2) = region.polygon.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| {
            let (u, v) = grid.node_coords(*p);
            (a.min(u), b.max(u), c.min(v), d.max(v))
        },
    );
    let i_range = (lo1.ceil() as i64)..=(hi1.floor() as i64);
    let j_range = (lo2.ceil() as i64)..=(hi2.floor() as i64);

    let mut enclosed: Vec<(i64, i64)> = Vec::new();
    for j in j_range {
        for i in i_range.clone() {
            let centre = grid.node_center_unchecked(i, j);
            if point_in_polygon(centre, &region.polygon) {
                enclosed.push((i, j));
            }
        }
    }
    if enclosed.is_empty() {
        return Err(Error::EmptyRegion {
            region: region.name.clone(),
        });
    }

    let (n1, n2) = (grid.n1() as i64, grid.n2() as i64);
    let mut mask = NodeMask::new(grid.n1(), grid.n2());
    for &(i, j) in &enclosed {
        for (di, dj) in [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)] {
            let (a, b) = (i + di, j + dj);
            if a <= 1 || b <= 1 || a >= n1 || b >= n2 {
                return Err(Error::DomainViolation {
                    region: region.name.clone(),
                    i: a.max(0) as usize,
                    j: b.max(0) as usize,
                });
            }
            mask.insert(a as usize, b as usize);
        }
    }
    Ok(mask)
}
