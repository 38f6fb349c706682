mod common;

use std::collections::BTreeMap;
use std::path::Path;

use common::project;
use lagl::field::read_field_dump;
use lagl::pipeline::{parse_geojson, run_and_write, run_experiment, FIELD_TRANSFORM, GLOBAL_SET};
use lagl::{ErrorCategory, ProjectConfig};

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn synthetic_run_recovers_region_affines() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ProjectConfig::load(&project::write(tmp.path(), "out")).unwrap();
    let out = run_experiment(&cfg).unwrap();

    for ((name, fit), (want_name, _, want)) in out.fits.iter().zip(project::regions()) {
        assert_eq!(name, want_name);
        for (a, b) in fit.to_array().iter().zip(want.to_array()) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{name}: {a} vs {b}");
        }
    }
    assert_eq!(out.fits.last().unwrap().0, GLOBAL_SET);

    let e = &out.report.errors;
    assert_eq!(e.transforms.last().unwrap(), FIELD_TRANSFORM);
    // Each set is reproduced by its own fit and by the field.
    for (s, _) in e.sets.iter().enumerate() {
        assert!(e.mean_km[s][s] <= 1e-6 && e.max_km[s][s] <= 1e-6);
        let lagl = e.transforms.len() - 1;
        assert!(e.max_km[lagl][s] <= 1e-6, "{}", e.max_km[lagl][s]);
    }
    assert!(out.report.field.residual <= 1e-8);

    let names: Vec<&str> = out.transformed.iter().map(|c| c.name()).collect();
    assert_eq!(names, ["Probe", "P1", "P2"]);
    assert_eq!(out.report.hausdorff.len(), 2);
    assert_eq!(out.report.matching[0].ab_m.len(), 3);
}

#[test]
fn runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let c1 = ProjectConfig::load(&project::write(tmp.path(), "first")).unwrap();
    let c2 = ProjectConfig::load(&project::write(tmp.path(), "second")).unwrap();
    let (_, d1) = run_and_write(&c1).unwrap();
    let (_, d2) = run_and_write(&c2).unwrap();
    let (t1, t2) = (read_tree(&d1), read_tree(&d2));
    assert!(t1.contains_key("report.txt") && t1.contains_key("field/mask.csv"));
    assert_eq!(t1.keys().collect::<Vec<_>>(), t2.keys().collect::<Vec<_>>());
    for (k, v) in &t1 {
        assert!(v == &t2[k], "{k} differs");
    }
}

#[test]
fn written_outputs_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ProjectConfig::load(&project::write(tmp.path(), "out")).unwrap();
    let (out, dir) = run_and_write(&cfg).unwrap();

    let text = std::fs::read_to_string(dir.join("transformed.geojson")).unwrap();
    let lines = parse_geojson(&text, &dir.join("transformed.geojson")).unwrap();
    assert_eq!(lines.len(), out.transformed.len());
    for (line, curve) in lines.iter().zip(&out.transformed) {
        assert_eq!(line.name.as_deref(), Some(curve.name()));
        assert_eq!(line.points, curve.points());
    }

    for (p, name) in lagl::affine::PARAM_NAMES.iter().enumerate() {
        let (n, grid, values) = read_field_dump(&dir.join("field").join(format!("field_{name}.csv"))).unwrap();
        assert_eq!(&n, name);
        assert_eq!(&grid, out.field.grid());
        assert_eq!(values, out.field.values(p));
    }

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["field"]["n1"], 400);
    let matching = std::fs::read_to_string(dir.join("matching.csv")).unwrap();
    assert!(matching.lines().any(|l| l.starts_with("Average,,")));
}

#[test]
fn failures_leave_no_output() {
    let tmp = tempfile::tempdir().unwrap();
    let path = project::write(tmp.path(), "out");
    // A probe point outside the domain aborts the run before anything is written.
    std::fs::write(tmp.path().join("probe.txt"), "10,10\n500,10\n").unwrap();
    let cfg = ProjectConfig::load(&path).unwrap();
    let err = run_and_write(&cfg).unwrap_err();
    assert_eq!(err.category(), ErrorCategory::Config);
    assert!(matches!(err.root(), lagl::Error::OutOfDomain { .. }));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let path = project::write(tmp.path(), "out");
    let text = std::fs::read_to_string(&path).unwrap().replace("dump_field = true", "dump_feild = true");
    std::fs::write(&path, text).unwrap();
    let err = ProjectConfig::load(&path).unwrap_err();
    assert_eq!(err.category(), ErrorCategory::Config);
}
