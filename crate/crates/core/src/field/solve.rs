use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

use super::{LaplaceSystem, ParameterField};

/// Acceptable relative residual: `|Mu - f|_inf <= tol * max(1, |f|_inf)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

const REFINEMENT_STEPS: usize = 2;

/// Factorizes the shared matrix once and solves for all six parameters.
///
/// Dirichlet values are written back verbatim after the solve, so they hold
/// bit-for-bit.
pub fn solve_field(system: &LaplaceSystem) -> Result<ParameterField> {
    let n = system.len();
    if system.dirichlet_count() == 0 {
        return Err(Error::Singular(
            "no Dirichlet nodes; the zero-flux problem has no unique solution".into(),
        ));
    }

    let triplets: Vec<Triplet<usize, usize, f64>> = system
        .triplets()
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    let matrix = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Singular(format!("matrix construction failed: {e:?}")))?;
    let lu = matrix
        .sp_lu()
        .map_err(|e| Error::Singular(format!("LU factorization failed: {e:?}")))?;

    let f = Mat::<f64>::from_fn(n, 6, |k, p| system.rhs[p][k]);
    let mut u = lu.solve(&f);
    for _ in 0..REFINEMENT_STEPS {
        let r = Mat::<f64>::from_fn(n, 6, |k, p| {
            let mut acc = system.rhs[p][k];
            for e in system.row_ptr[k]..system.row_ptr[k + 1] {
                acc -= system.vals[e] * u[(system.cols[e], p)];
            }
            acc
        });
        let du = lu.solve(&r);
        u += du;
    }

    let mut values: [Vec<f64>; 6] = std::array::from_fn(|p| (0..n).map(|k| u[(k, p)]).collect());
    for (k, class) in system.classification.iter().enumerate() {
        if class.is_some() {
            for p in 0..6 {
                values[p][k] = system.rhs[p][k];
            }
        }
    }

    let mut worst = 0.0f64;
    for p in 0..6 {
        if values[p].iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("solution contains non-finite values".into()));
        }
        let mu = system.matvec(&values[p]);
        let res = mu
            .iter()
            .zip(&system.rhs[p])
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = system.rhs[p].iter().fold(1.0f64, |m, v| m.max(v.abs()));
        worst = worst.max(res / scale);
    }
    if !(worst <= RESIDUAL_TOLERANCE) {
        return Err(Error::Convergence {
            achieved: worst,
            tolerance: RESIDUAL_TOLERANCE,
        });
    }

    Ok(ParameterField {
        grid: system.grid,
        values,
        classification: system.classification.clone(),
        residual: worst,
    })
}
