use lagl::field::{assemble_from_nodes, assemble_system, solve_field, GridDomain, StencilCase};
use lagl::{AffineParams, DirichletRegion, PixelPoint};
use proptest::prelude::*;

fn px(x1: f64, x2: f64) -> PixelPoint {
    PixelPoint::new(x1, x2)
}

fn square(name: &str, c: (f64, f64), half: f64, v: f64) -> DirichletRegion {
    DirichletRegion::new(
        name,
        vec![
            px(c.0 - half, c.1 - half),
            px(c.0 + half, c.1 - half),
            px(c.0 + half, c.1 + half),
            px(c.0 - half, c.1 + half),
        ],
        AffineParams::from_array([v, -v, 2.0 * v, v * v, 100.0 * v, 1.0 - v]),
    )
    .unwrap()
}

/// Successive over-relaxation on the reflected five-point rule, written
/// from the grid alone.
fn sor_oracle(n1: usize, n2: usize, fixed: &[Option<f64>]) -> Vec<f64> {
    let idx = |i: usize, j: usize| (j - 1) * n1 + (i - 1);
    let mut u: Vec<f64> = fixed.iter().map(|v| v.unwrap_or(0.0)).collect();
    let omega = 1.9;
    for _ in 0..200_000 {
        let mut change = 0.0f64;
        for j in 1..=n2 {
            for i in 1..=n1 {
                let k = idx(i, j);
                if fixed[k].is_some() {
                    continue;
                }
                // Missing neighbours mirror across the boundary node.
                let w = if i > 1 { u[idx(i - 1, j)] } else { u[idx(i + 1, j)] };
                let e = if i < n1 { u[idx(i + 1, j)] } else { u[idx(i - 1, j)] };
                let s = if j > 1 { u[idx(i, j - 1)] } else { u[idx(i, j + 1)] };
                let n = if j < n2 { u[idx(i, j + 1)] } else { u[idx(i, j - 1)] };
                let target = 0.25 * (w + e + s + n);
                let next = u[k] + omega * (target - u[k]);
                change = change.max((next - u[k]).abs());
                u[k] = next;
            }
        }
        if change < 1e-14 {
            break;
        }
    }
    u
}

#[test]
fn direct_solve_matches_relaxation_oracle() {
    let grid = GridDomain::new(px(0.0, 0.0), 24, 17).unwrap();
    let regions = [square("a", (6.0, 5.0), 1.5, 0.25), square("b", (17.0, 11.0), 2.0, 1.5)];
    let sys = assemble_system(&grid, &regions).unwrap();
    let field = solve_field(&sys).unwrap();
    for p in 0..6 {
        let fixed: Vec<Option<f64>> = sys
            .classification()
            .iter()
            .enumerate()
            .map(|(k, c)| c.map(|_| sys.rhs(p)[k]))
            .collect();
        let want = sor_oracle(24, 17, &fixed);
        for (k, (got, want)) in field.values(p).iter().zip(&want).enumerate() {
            assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0), "param {p} node {k}: {got} vs {want}");
        }
    }
}

#[test]
fn dirichlet_values_are_exact() {
    let grid = GridDomain::new(px(-3.0, 2.0), 40, 30).unwrap();
    let regions = [square("a", (5.0, 10.0), 3.0, 0.3), square("b", (25.0, 20.0), 4.0, 0.7)];
    let sys = assemble_system(&grid, &regions).unwrap();
    let field = solve_field(&sys).unwrap();
    for (k, class) in field.classification().iter().enumerate() {
        if let Some(r) = class {
            let (i, j) = grid.node(k);
            assert_eq!(field.node_params(i, j), regions[*r as usize].value);
        }
    }
    assert!(field.residual() <= 1e-8);
}

#[test]
fn free_rows_sum_to_zero_and_couple_neighbours_only() {
    let grid = GridDomain::new(px(0.0, 0.0), 15, 11).unwrap();
    let sys = assemble_system(&grid, &[square("a", (7.0, 5.0), 1.0, 1.0)]).unwrap();
    for j in 1..=11 {
        for i in 1..=15 {
            let row = sys.row(i, j);
            if sys.case(i, j) == StencilCase::A {
                assert_eq!(row, vec![((i, j), 1.0)]);
                continue;
            }
            let sum: f64 = row.iter().map(|r| r.1).sum();
            assert_eq!(sum, 0.0);
            for ((a, b), _) in row {
                assert!(a.abs_diff(i) + b.abs_diff(j) <= 1);
            }
        }
    }
}

#[test]
fn mirrored_layout_gives_mirrored_field() {
    let grid = GridDomain::new(px(0.0, 0.0), 31, 21).unwrap();
    let left = [square("a", (6.0, 6.0), 2.0, 0.0), square("b", (20.0, 14.0), 2.0, 1.0)];
    let right = [square("a", (24.0, 6.0), 2.0, 0.0), square("b", (10.0, 14.0), 2.0, 1.0)];
    let f1 = solve_field(&assemble_system(&grid, &left).unwrap()).unwrap();
    let f2 = solve_field(&assemble_system(&grid, &right).unwrap()).unwrap();
    for j in 1..=21 {
        for i in 1..=31 {
            let a = f1.node_params(i, j).a1;
            let b = f2.node_params(32 - i, j).a1;
            assert!((a - b).abs() <= 1e-10, "({i},{j}) {a} vs {b}");
        }
    }
}

#[test]
fn wider_margin_changes_interior_little() {
    // Moving the zero-flux boundary outward perturbs the field between two
    // regions only slightly.
    let between = |margin: f64| {
        let grid = GridDomain::from_bounds(px(-margin, -margin), px(40.0 + margin, 20.0 + margin)).unwrap();
        let regions = [square("a", (8.0, 10.0), 2.0, 0.0), square("b", (32.0, 10.0), 2.0, 1.0)];
        let f = solve_field(&assemble_system(&grid, &regions).unwrap()).unwrap();
        f.sample(px(20.0, 10.0)).unwrap().a1
    };
    let (m1, m2) = (between(20.0), between(40.0));
    assert!((m1 - 0.5).abs() < 1e-9 && (m2 - 0.5).abs() < 1e-9);
    let q = |margin: f64| {
        let grid = GridDomain::from_bounds(px(-margin, -margin), px(40.0 + margin, 20.0 + margin)).unwrap();
        let regions = [square("a", (8.0, 10.0), 2.0, 0.0), square("b", (32.0, 10.0), 2.0, 1.0)];
        let f = solve_field(&assemble_system(&grid, &regions).unwrap()).unwrap();
        f.sample(px(14.0, 10.0)).unwrap().a1
    };
    let (q1, q2) = (q(20.0), q(40.0));
    assert!((q1 - q2).abs() < 0.05, "{q1} vs {q2}");
    assert!(q1 > 0.0 && q1 < 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn maximum_principle(
        n1 in 12usize..40,
        n2 in 12usize..40,
        seeds in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0, -5.0f64..5.0), 1..4),
    ) {
        let grid = GridDomain::new(px(0.0, 0.0), n1, n2).unwrap();
        let regions: Vec<DirichletRegion> = seeds
            .iter()
            .enumerate()
            .map(|(r, (fx, fy, v))| {
                let c = (3.0 + fx * (n1 as f64 - 7.0), 3.0 + fy * (n2 as f64 - 7.0));
                square(&format!("r{r}"), c, 0.6, *v)
            })
            .collect();
        let Ok(sys) = assemble_system(&grid, &regions) else {
            // Overlapping regions with different values are rejected.
            return Ok(());
        };
        let field = solve_field(&sys).unwrap();
        for p in 0..6 {
            let bounds: Vec<f64> = regions.iter().map(|r| r.value.to_array()[p]).collect();
            let lo = bounds.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = bounds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let tol = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
            for v in field.values(p) {
                prop_assert!(*v >= lo - tol && *v <= hi + tol, "{v} outside [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn strip_profile_is_linear(n in 3usize..60, lo in -10.0f64..10.0, hi in -10.0f64..10.0) {
        let grid = GridDomain::new(px(0.0, 0.0), n, 3).unwrap();
        let mut nodes = Vec::new();
        for j in 1..=3 {
            nodes.push((1, j, AffineParams::from_array([lo; 6])));
            nodes.push((n, j, AffineParams::from_array([hi; 6])));
        }
        let field = solve_field(&assemble_from_nodes(&grid, &nodes).unwrap()).unwrap();
        for j in 1..=3 {
            for i in 1..=n {
                let want = lo + (hi - lo) * (i - 1) as f64 / (n - 1) as f64;
                let got = field.node_params(i, j).b2;
                prop_assert!((got - want).abs() <= 1e-8, "{got} vs {want}");
            }
        }
    }
}
