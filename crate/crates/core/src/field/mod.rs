//! Six-parameter affine field over the pixel grid of the source map.
//!
//! Each region pins all six affine parameters to its local least-squares fit
//! on a set of Dirichlet nodes; elsewhere each parameter solves the discrete
//! Laplace equation with zero-flux (reflected) boundary rows.

mod dump;
mod raster;
mod solve;
mod system;

pub use dump::{field_dump_files, read_field_dump, write_field_dump, write_mask_dump};
pub use raster::{convex_hull, find_self_intersection, point_in_polygon, rasterize_envelope, NodeMask};
pub use solve::{solve_field, RESIDUAL_TOLERANCE};
pub use system::{assemble_from_nodes, assemble_system, LaplaceSystem, StencilCase};

use crate::affine::{fit_affine, AffineParams, CorrespondenceSet, PixelPoint};
use crate::error::{Error, Result};

/// Uniform grid with unit spacing. Node `(i, j)`, 1-based, sits at
/// `origin + (i - 1, j - 1)` in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridDomain {
    origin: PixelPoint,
    n1: usize,
    n2: usize,
}

impl GridDomain {
    pub fn new(origin: PixelPoint, n1: usize, n2: usize) -> Result<Self> {
        if n1 < 3 || n2 < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes per axis, got {n1} x {n2}"
            )));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidGrid("non-finite origin".into()));
        }
        n1.checked_mul(n2)
            .filter(|&n| n <= u32::MAX as usize)
            .ok_or_else(|| Error::InvalidGrid(format!("{n1} x {n2} nodes is too many")))?;
        Ok(GridDomain { origin, n1, n2 })
    }

    /// Grid whose first and last nodes sit on the given (integer-spaced)
    /// pixel rectangle corners.
    pub fn from_bounds(min: PixelPoint, max: PixelPoint) -> Result<Self> {
        let span1 = max.x1 - min.x1;
        let span2 = max.x2 - min.x2;
        if !(span1.is_finite() && span2.is_finite()) || span1 < 0.0 || span2 < 0.0 {
            return Err(Error::InvalidGrid(format!(
                "bounds ({}, {})..({}, {}) are not an ordered rectangle",
                min.x1, min.x2, max.x1, max.x2
            )));
        }
        GridDomain::new(min, span1.floor() as usize + 1, span2.floor() as usize + 1)
    }

    pub fn origin(&self) -> PixelPoint {
        self.origin
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unknown index of node `(i, j)`: `(j - 1) * n1 + (i - 1)`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!((1..=self.n1).contains(&i) && (1..=self.n2).contains(&j));
        (j - 1) * self.n1 + (i - 1)
    }

    /// Inverse of [`GridDomain::index`].
    pub fn node(&self, k: usize) -> (usize, usize) {
        (k % self.n1 + 1, k / self.n1 + 1)
    }

    pub fn node_center(&self, i: usize, j: usize) -> PixelPoint {
        self.node_center_unchecked(i as i64, j as i64)
    }

    pub(crate) fn node_center_unchecked(&self, i: i64, j: i64) -> PixelPoint {
        PixelPoint::new(self.origin.x1 + (i - 1) as f64, self.origin.x2 + (j - 1) as f64)
    }

    /// Continuous node coordinates: node `(i, j)` maps to `(i, j)`.
    pub fn node_coords(&self, x: PixelPoint) -> (f64, f64) {
        (x.x1 - self.origin.x1 + 1.0, x.x2 - self.origin.x2 + 1.0)
    }

    pub fn contains(&self, x: PixelPoint) -> bool {
        let (u, v) = self.node_coords(x);
        (1.0..=self.n1 as f64).contains(&u) && (1.0..=self.n2 as f64).contains(&v)
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 1 || j == 1 || i == self.n1 || j == self.n2
    }
}

/// How a region polygon is derived from a correspondence set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolygonMode {
    /// Source points in file order.
    #[default]
    AsGiven,
    ConvexHull,
}

/// A polygon whose rasterized nodes carry fixed affine parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletRegion {
    pub name: String,
    pub polygon: Vec<PixelPoint>,
    pub value: AffineParams,
}

impl DirichletRegion {
    /// Validates that the polygon is finite, has at least three vertices and
    /// does not self-intersect. A repeated closing vertex is dropped.
    pub fn new(name: impl Into<String>, mut polygon: Vec<PixelPoint>, value: AffineParams) -> Result<Self> {
        let name = name.into();
        if polygon.len() > 1 && polygon.first() == polygon.last() {
            polygon.pop();
        }
        if polygon.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite {
                context: Some(format!("polygon of region `{name}`")),
            });
        }
        if polygon.len() < 3 {
            return Err(Error::DegenerateSet {
                set: name,
                reason: format!("polygon needs at least 3 vertices, got {}", polygon.len()),
            });
        }
        if !value.is_finite() {
            return Err(Error::NonFinite {
                context: Some(format!("parameters of region `{name}`")),
            });
        }
        if let Some((e1, e2)) = find_self_intersection(&polygon) {
            return Err(Error::NonSimplePolygon { region: name, e1, e2 });
        }
        Ok(DirichletRegion { name, polygon, value })
    }

    /// Region spanned by the set's source points, valued by its affine fit.
    pub fn from_set(set: &CorrespondenceSet, mode: PolygonMode) -> Result<Self> {
        let value = fit_affine(set)?;
        let sources = set.sources();
        let polygon = match mode {
            PolygonMode::AsGiven => sources,
            PolygonMode::ConvexHull => convex_hull(&sources),
        };
        DirichletRegion::new(set.name.clone(), polygon, value)
    }
}

/// Solved field: one value grid per affine parameter, in
/// [`GridDomain::index`] order.
#[derive(Debug, Clone)]
pub struct ParameterField {
    grid: GridDomain,
    values: [Vec<f64>; 6],
    /// Region index (into the assembled region list) per node, if Dirichlet.
    classification: Vec<Option<u32>>,
    residual: f64,
}

impl ParameterField {
    pub fn grid(&self) -> &GridDomain {
        &self.grid
    }

    /// Values of parameter `p` (`0..6`, ordered as `PARAM_NAMES`).
    pub fn values(&self, p: usize) -> &[f64] {
        &self.values[p]
    }

    pub fn node_params(&self, i: usize, j: usize) -> AffineParams {
        let k = self.grid.index(i, j);
        AffineParams::from_array(std::array::from_fn(|p| self.values[p][k]))
    }

    pub fn region_of(&self, i: usize, j: usize) -> Option<usize> {
        self.classification[self.grid.index(i, j)].map(|r| r as usize)
    }

    pub fn classification(&self) -> &[Option<u32>] {
        &self.classification
    }

    /// Relative max-norm residual reached by the solve.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn sample(&self, x: PixelPoint) -> Result<AffineParams> {
        sample_field(self, x)
    }
}

/// Bilinear interpolation of all six parameters at `x`.
pub fn sample_field(field: &ParameterField, x: PixelPoint) -> Result<AffineParams> {
    let grid = &field.grid;
    if !x.is_finite() || !grid.contains(x) {
        return Err(Error::OutOfDomain {
            x1: x.x1,
            x2: x.x2,
            context: None,
        });
    }
    let (u, v) = grid.node_coords(x);
    let i0 = (u.floor() as usize).min(grid.n1 - 1);
    let j0 = (v.floor() as usize).min(grid.n2 - 1);
    let s = u - i0 as f64;
    let t = v - j0 as f64;
    let k00 = grid.index(i0, j0);
    let k10 = k00 + 1;
    let k01 = k00 + grid.n1;
    let k11 = k01 + 1;
    let w = [(1.0 - s) * (1.0 - t), s * (1.0 - t), (1.0 - s) * t, s * t];
    Ok(AffineParams::from_array(std::array::from_fn(|p| {
        let g = &field.values[p];
        w[0] * g[k00] + w[1] * g[k10] + w[2] * g[k01] + w[3] * g[k11]
    })))
}
