//! Deterministic workloads shared by the benchmarks.

use lagl::field::{assemble_system, GridDomain, LaplaceSystem};
use lagl::{AffineParams, DirichletRegion, DiscreteCurve, GeoPoint, PixelPoint};

fn square(name: &str, c: (f64, f64), half: f64, value: AffineParams) -> DirichletRegion {
    let p = |dx: f64, dy: f64| PixelPoint::new(c.0 + dx, c.1 + dy);
    DirichletRegion::new(name, vec![p(-half, -half), p(half, -half), p(half, half), p(-half, half)], value)
        .expect("valid square")
}

/// `n x n` grid with three regions of distinct values.
pub fn three_region_system(n: usize) -> LaplaceSystem {
    let grid = GridDomain::new(PixelPoint::new(0.0, 0.0), n, n).expect("grid");
    let f = n as f64;
    let regions = [
        square("a", (0.2 * f, 0.3 * f), 0.05 * f, AffineParams::from_array([0.010, 0.001, -0.001, -0.010, 10.0, 50.0])),
        square("b", (0.7 * f, 0.2 * f), 0.04 * f, AffineParams::from_array([0.011, 0.000, -0.002, -0.009, 9.8, 50.3])),
        square("c", (0.5 * f, 0.8 * f), 0.06 * f, AffineParams::from_array([0.009, 0.002, 0.000, -0.011, 10.2, 49.7])),
    ];
    assemble_system(&grid, &regions).expect("assembly")
}

/// Sinuous polyline of `n` vertices about 2 km apart, shifted by `offset`
/// degrees of latitude.
pub fn river(n: usize, offset: f64) -> DiscreteCurve {
    let pts = (0..n)
        .map(|k| {
            let t = k as f64 * 0.025;
            GeoPoint::new(10.0 + t, 45.0 + offset + 0.2 * (t * 3.0).sin()).expect("in range")
        })
        .collect();
    DiscreteCurve::new(format!("river{offset}"), pts).expect("curve")
}

/// Point pairs spread over the globe for inverse-problem timing.
pub fn point_pairs(n: usize) -> Vec<(GeoPoint, GeoPoint)> {
    (0..n)
        .map(|k| {
            let a = k as f64;
            let p = GeoPoint::new((a * 37.0) % 360.0 - 180.0, (a * 13.0) % 170.0 - 85.0).expect("in range");
            let q = GeoPoint::new((a * 71.0 + 5.0) % 360.0 - 180.0, (a * 29.0 + 3.0) % 170.0 - 85.0).expect("in range");
            (p, q)
        })
        .collect()
}
