use crate::affine::AffineParams;
use crate::error::{Error, Result};

use super::{rasterize_envelope, DirichletRegion, GridDomain};

/// Equation type of a node row. `A` is a Dirichlet row, `B` the interior
/// five-point row, `C`..`F` the corners (1,1), (1,N2), (N1,1), (N1,N2),
/// and `G`..`J` the edges i=N1, j=N2, j=1, i=1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StencilCase {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
}

impl StencilCase {
    fn of_position(grid: &GridDomain, i: usize, j: usize) -> StencilCase {
        let (n1, n2) = (grid.n1(), grid.n2());
        match (i == 1, i == n1, j == 1, j == n2) {
            (true, _, true, _) => StencilCase::C,
            (true, _, _, true) => StencilCase::D,
            (_, true, true, _) => StencilCase::E,
            (_, true, _, true) => StencilCase::F,
            (_, true, _, _) => StencilCase::G,
            (_, _, _, true) => StencilCase::H,
            (_, _, true, _) => StencilCase::I,
            (true, _, _, _) => StencilCase::J,
            _ => StencilCase::B,
        }
    }
}

/// Sparse system shared by the six parameters, with one right-hand side per
/// parameter. Rows are stored compressed, columns sorted within a row.
#[derive(Debug, Clone)]
pub struct LaplaceSystem {
    pub(super) grid: GridDomain,
    pub(super) region_names: Vec<String>,
    pub(super) classification: Vec<Option<u32>>,
    pub(super) row_ptr: Vec<usize>,
    pub(super) cols: Vec<usize>,
    pub(super) vals: Vec<f64>,
    pub(super) rhs: [Vec<f64>; 6],
}

/// Rasterizes the regions and builds the finite-difference system.
///
/// Regions may share nodes only if their parameter values are identical.
pub fn assemble_system(grid: &GridDomain, regions: &[DirichletRegion]) -> Result<LaplaceSystem> {
    let n = grid.len();
    let mut classification: Vec<Option<u32>> = vec![None; n];
    let mut values: Vec<AffineParams> = Vec::with_capacity(regions.len());
    for (r, region) in regions.iter().enumerate() {
        let mask = rasterize_envelope(region, grid)?;
        for (i, j) in mask.iter() {
            let k = grid.index(i, j);
            match classification[k] {
                None => classification[k] = Some(r as u32),
                Some(prev) if values[prev as usize] == region.value => {}
                Some(prev) => {
                    return Err(Error::RegionConflict {
                        i,
                        j,
                        first: regions[prev as usize].name.clone(),
                        second: region.name.clone(),
                    })
                }
            }
        }
        values.push(region.value);
    }

    let names = regions.iter().map(|r| r.name.clone()).collect();
    Ok(build(grid, names, classification, &values))
}

/// Builds the system from explicit Dirichlet nodes `(i, j, value)`. Unlike
/// [`assemble_system`], nodes on the domain boundary are allowed; a node
/// listed twice keeps its first value. Each node is its own region, named
/// `"(i,j)"`.
pub fn assemble_from_nodes(grid: &GridDomain, nodes: &[(usize, usize, AffineParams)]) -> Result<LaplaceSystem> {
    let mut classification: Vec<Option<u32>> = vec![None; grid.len()];
    let mut values = Vec::with_capacity(nodes.len());
    let mut names = Vec::with_capacity(nodes.len());
    for &(i, j, v) in nodes {
        if !(1..=grid.n1()).contains(&i) || !(1..=grid.n2()).contains(&j) {
            return Err(Error::InvalidGrid(format!("node ({i}, {j}) is outside the grid")));
        }
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: Some(format!("Dirichlet value at node ({i}, {j})")),
            });
        }
        let k = grid.index(i, j);
        if classification[k].is_none() {
            classification[k] = Some(values.len() as u32);
            values.push(v);
            names.push(format!("({i},{j})"));
        }
    }
    Ok(build(grid, names, classification, &values))
}

fn build(
    grid: &GridDomain,
    region_names: Vec<String>,
    classification: Vec<Option<u32>>,
    values: &[AffineParams],
) -> LaplaceSystem {
    let n = grid.len();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(5 * n);
    let mut vals = Vec::with_capacity(5 * n);
    let mut rhs: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; n]);
    row_ptr.push(0);
    let mut entries: Vec<(usize, f64)> = Vec::with_capacity(5);
    for k in 0..n {
        let (i, j) = grid.node(k);
        entries.clear();
        match classification[k] {
            Some(r) => {
                entries.push((k, 1.0));
                let v = values[r as usize].to_array();
                for p in 0..6 {
                    rhs[p][k] = v[p];
                }
            }
            None => stencil_row(grid, i, j, &mut entries),
        }
        entries.sort_by_key(|e| e.0);
        for &(c, v) in entries.iter() {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }

    LaplaceSystem {
        grid: *grid,
        region_names,
        classification,
        row_ptr,
        cols,
        vals,
        rhs,
    }
}

/// Five-point row with a missing neighbour replaced by the reflection of
/// the opposite one.
fn stencil_row(grid: &GridDomain, i: usize, j: usize, entries: &mut Vec<(usize, f64)>) {
    entries.push((grid.index(i, j), 4.0));
    let (n1, n2) = (grid.n1() as i64, grid.n2() as i64);
    let (ii, jj) = (i as i64, j as i64);
    for (di, dj) in [(-1i64, 0i64), (0, -1), (1, 0), (0, 1)] {
        let (mut a, mut b) = (ii + di, jj + dj);
        if a < 1 || a > n1 || b < 1 || b > n2 {
            a = ii - di;
            b = jj - dj;
        }
        let c = grid.index(a as usize, b as usize);
        match entries.iter_mut().find(|e| e.0 == c) {
            Some(e) => e.1 -= 1.0,
            None => entries.push((c, -1.0)),
        }
    }
}

impl LaplaceSystem {
    pub fn grid(&self) -> &GridDomain {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn region_names(&self) -> &[String] {
        &self.region_names
    }

    pub fn classification(&self) -> &[Option<u32>] {
        &self.classification
    }

    pub fn dirichlet_count(&self) -> usize {
        self.classification.iter().filter(|c| c.is_some()).count()
    }

    pub fn case(&self, i: usize, j: usize) -> StencilCase {
        if self.classification[self.grid.index(i, j)].is_some() {
            StencilCase::A
        } else {
            StencilCase::of_position(&self.grid, i, j)
        }
    }

    /// Row of node `(i, j)` as `((i', j'), coefficient)`, sorted by unknown
    /// index.
    pub fn row(&self, i: usize, j: usize) -> Vec<((usize, usize), f64)> {
        let k = self.grid.index(i, j);
        (self.row_ptr[k]..self.row_ptr[k + 1])
            .map(|e| (self.grid.node(self.cols[e]), self.vals[e]))
            .collect()
    }

    /// Right-hand side of parameter `p` (`0..6`).
    pub fn rhs(&self, p: usize) -> &[f64] {
        &self.rhs[p]
    }

    pub fn matvec(&self, u: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                (self.row_ptr[k]..self.row_ptr[k + 1])
                    .map(|e| self.vals[e] * u[self.cols[e]])
                    .sum()
            })
            .collect()
    }

    pub(super) fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.len()).flat_map(move |k| {
            (self.row_ptr[k]..self.row_ptr[k + 1]).map(move |e| (k, self.cols[e], self.vals[e]))
        })
    }
}
