//! Experiment orchestration: fit, field, transform, compare, report.
//!
//! Everything is computed and rendered in memory first; files are written
//! only once the whole run, including the report self-check, has succeeded.

mod config;
mod formats;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub use config::{
    DomainConfig, PairConfig, PolygonModeConfig, ProjectConfig, ReferenceCurveConfig, SourceCurveConfig, SplitConfig,
    DEFAULT_BANDS_KM,
};
pub use formats::{
    format_correspondences, geojson_string, parse_correspondences, parse_geojson, parse_pixel_curve,
    read_correspondences, read_geojson, read_pixel_curve, select_line, GeoLine,
};
pub use report::{
    km3, pct1, printed_average_consistent, printed_mean_consistent, CurveSummary, ErrorTables, FieldSummary,
    HausdorffRow, MatchingRow, MetricsReport, SetSummary, SourceRow,
};

use crate::affine::{apply_affine, fit_affine, map_errors, AffineParams, CorrespondenceSet, PixelPoint};
use crate::curves::{combine_matching, combine_mean, source_distance, BandThreshold, Directed, DiscreteCurve};
use crate::error::{Error, Result};
use crate::field::{
    assemble_system, field_dump_files, sample_field, solve_field, DirichletRegion, ParameterField,
};
use crate::geodesy::GeoPoint;

/// Name of the transform fitted to the union of all sets.
pub const GLOBAL_SET: &str = "global";
/// Name of the field-based transform in the error tables.
pub const FIELD_TRANSFORM: &str = "lagl";

/// Lower and upper length in km of `n` stadia, at 177.7 m and 197.3 m per
/// stadium.
pub fn stadia_to_km(n: f64) -> Result<(f64, f64)> {
    if !(n.is_finite() && n >= 0.0) {
        return Err(Error::Argument(format!("stadia count must be non-negative, got {n}")));
    }
    // Integer numerators keep round inputs exact: 1000 -> 177.7, 197.3.
    Ok((n * 1777.0 / 10_000.0, n * 1973.0 / 10_000.0))
}

/// Maps one source pixel through the field.
pub fn transform_point(field: &ParameterField, x: PixelPoint) -> Result<GeoPoint> {
    apply_affine(&sample_field(field, x)?, x)
}

/// Maps a pixel polyline through the field, point by point.
pub fn transform_curve(field: &ParameterField, points: &[PixelPoint], name: &str) -> Result<DiscreteCurve> {
    if points.is_empty() {
        return Err(Error::DegenerateCurve {
            curve: name.to_string(),
            reason: "no points".into(),
        });
    }
    let geo = points
        .iter()
        .enumerate()
        .map(|(k, x)| transform_point(field, *x).map_err(|e| e.context(format!("point {k} of curve `{name}`"))))
        .collect::<Result<Vec<_>>>()?;
    DiscreteCurve::new(name, geo)
}

/// Hausdorff and matching rows for one curve pair.
pub fn compare_pair(a: &DiscreteCurve, b: &DiscreteCurve, bands_km: &[f64]) -> Result<(HausdorffRow, MatchingRow)> {
    let bands = bands_km
        .iter()
        .map(|b| BandThreshold::from_km(*b))
        .collect::<Result<Vec<_>>>()?;
    let ab = Directed::new(a, b);
    let ba = Directed::new(b, a);
    let (la, lb) = (a.length(), b.length());
    let (mean_ab, mean_ba) = (ab.mean(), ba.mean());
    let h = HausdorffRow {
        a: a.name().to_string(),
        b: b.name().to_string(),
        len_a_m: la,
        len_b_m: lb,
        max_ab_m: ab.max(),
        max_ba_m: ba.max(),
        max_m: ab.max().max(ba.max()),
        mean_ab_m: mean_ab,
        mean_ba_m: mean_ba,
        mean_m: combine_mean(la, mean_ab, lb, mean_ba),
    };
    let ab_m: Vec<f64> = bands.iter().map(|t| ab.matched(*t)).collect();
    let ba_m: Vec<f64> = bands.iter().map(|t| ba.matched(*t)).collect();
    let avg: Vec<_> = ab_m
        .iter()
        .zip(&ba_m)
        .map(|(x, y)| combine_matching(*x, la, *y, lb))
        .collect();
    let m = MatchingRow {
        a: h.a.clone(),
        b: h.b.clone(),
        len_a_m: la,
        len_b_m: lb,
        ab_m,
        ba_m,
        average_m: avg.iter().map(|v| v.meters).collect(),
        average_percent: avg.iter().map(|v| v.percent).collect(),
    };
    Ok((h, m))
}

/// Everything a run produces, before it is written.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: MetricsReport,
    pub field: ParameterField,
    pub fits: Vec<(String, AffineParams)>,
    /// Transformed source curves and their split parts.
    pub transformed: Vec<DiscreteCurve>,
    /// Reference curves and their split parts.
    pub references: Vec<DiscreteCurve>,
}

fn split(curve: DiscreteCurve, split: &Option<SplitConfig>, out: &mut Vec<DiscreteCurve>) -> Result<()> {
    if let Some(s) = split {
        let (h, t) = curve.split_at_nearest(s.point()?, s.names[0].clone(), s.names[1].clone())?;
        out.push(curve);
        out.push(h);
        out.push(t);
    } else {
        out.push(curve);
    }
    Ok(())
}

/// Fitted sets and the solved parameter field of a project.
#[derive(Debug, Clone)]
pub struct FittedProject {
    pub sets: Vec<CorrespondenceSet>,
    /// Per-set fits followed by the fit to the union of all sets.
    pub fits: Vec<(String, AffineParams)>,
    pub regions: Vec<DirichletRegion>,
    pub dirichlet_nodes: usize,
    pub field: ParameterField,
}

/// Reads the correspondences, fits every set and solves the field.
pub fn fit_and_solve(cfg: &ProjectConfig) -> Result<FittedProject> {
    let mut sets: Vec<CorrespondenceSet> = Vec::new();
    for f in &cfg.correspondences {
        for s in read_correspondences(&cfg.resolve(f))? {
            if s.name == GLOBAL_SET || s.name == FIELD_TRANSFORM || sets.iter().any(|t| t.name == s.name) {
                return Err(Error::Config(format!("set name `{}` is reserved or used twice", s.name)));
            }
            sets.push(s);
        }
    }
    let global = CorrespondenceSet::union(GLOBAL_SET, &sets);

    let mut fits: Vec<(String, AffineParams)> = Vec::with_capacity(sets.len() + 1);
    for s in sets.iter().chain(std::iter::once(&global)) {
        let t = fit_affine(s).map_err(|e| e.context(format!("fitting set `{}`", s.name)))?;
        fits.push((s.name.clone(), t));
    }

    let region_names: Vec<String> = match &cfg.regions {
        Some(r) => r.clone(),
        None => sets.iter().map(|s| s.name.clone()).collect(),
    };
    let mut regions = Vec::with_capacity(region_names.len());
    for name in &region_names {
        let set = sets
            .iter()
            .find(|s| &s.name == name)
            .ok_or_else(|| Error::Config(format!("region `{name}` names no correspondence set")))?;
        regions.push(DirichletRegion::from_set(set, cfg.polygon_mode.into())?);
    }
    let grid = cfg.domain.grid()?;
    let system = assemble_system(&grid, &regions)?;
    let field = solve_field(&system)?;
    Ok(FittedProject {
        sets,
        fits,
        regions,
        dirichlet_nodes: system.dirichlet_count(),
        field,
    })
}

/// Runs a configured experiment without touching the output directory.
pub fn run_experiment(cfg: &ProjectConfig) -> Result<ExperimentOutput> {
    let FittedProject {
        sets,
        fits,
        regions,
        dirichlet_nodes,
        field,
    } = fit_and_solve(cfg)?;
    let grid = *field.grid();
    let region_names: Vec<String> = regions.iter().map(|r| r.name.clone()).collect();

    let mut transforms: Vec<String> = fits.iter().map(|f| f.0.clone()).collect();
    transforms.push(FIELD_TRANSFORM.to_string());
    let (mut mean_km, mut max_km) = (Vec::new(), Vec::new());
    for (k, name) in transforms.iter().enumerate() {
        let (mut mean_row, mut max_row) = (Vec::new(), Vec::new());
        for s in &sets {
            let (mean, max) = if k < fits.len() {
                map_errors(s, |x| apply_affine(&fits[k].1, x))
            } else {
                map_errors(s, |x| transform_point(&field, x))
            }
            .map_err(|e| e.context(format!("evaluating `{name}` on set `{}`", s.name)))?;
            mean_row.push(mean);
            max_row.push(max);
        }
        mean_km.push(mean_row);
        max_km.push(max_row);
    }

    let mut transformed = Vec::new();
    for c in &cfg.source_curves {
        let path = cfg.resolve(&c.file);
        let pixels = read_pixel_curve(&path)?;
        let curve = transform_curve(&field, &pixels, &c.name).map_err(|e| e.context(path.display().to_string()))?;
        split(curve, &c.split, &mut transformed)?;
    }
    let mut references = Vec::new();
    for c in &cfg.reference_curves {
        let path = cfg.resolve(&c.file);
        let line = select_line(read_geojson(&path)?, c.feature.as_deref(), &path)?;
        let curve = DiscreteCurve::new(c.name.clone(), line.points).map_err(|e| e.context(path.display().to_string()))?;
        split(curve, &c.split, &mut references)?;
    }

    let by_name: BTreeMap<&str, &DiscreteCurve> =
        transformed.iter().chain(&references).map(|c| (c.name(), c)).collect();
    let source_pairs: Vec<(String, String)> = match &cfg.sources {
        Some(p) => p.iter().map(|p| (p.a.clone(), p.b.clone())).collect(),
        None => cfg
            .reference_curves
            .iter()
            .flat_map(|r| cfg.source_curves.iter().map(move |s| (r.name.clone(), s.name.clone())))
            .collect(),
    };
    let sources = source_pairs
        .iter()
        .map(|(a, b)| SourceRow {
            a: a.clone(),
            b: b.clone(),
            distance_km: source_distance(by_name[a.as_str()], by_name[b.as_str()]),
        })
        .collect();

    let mut hausdorff = Vec::new();
    let mut matching = Vec::new();
    for p in &cfg.compare {
        let (h, m) = compare_pair(by_name[p.a.as_str()], by_name[p.b.as_str()], &cfg.bands_km)?;
        hausdorff.push(h);
        matching.push(m);
    }

    let mut param_min = [f64::INFINITY; 6];
    let mut param_max = [f64::NEG_INFINITY; 6];
    for p in 0..6 {
        for v in field.values(p) {
            param_min[p] = param_min[p].min(*v);
            param_max[p] = param_max[p].max(*v);
        }
    }
    let mut set_sizes: BTreeMap<&str, usize> = sets.iter().map(|s| (s.name.as_str(), s.pairs.len())).collect();
    set_sizes.insert(GLOBAL_SET, sets.iter().map(|s| s.pairs.len()).sum());
    let report = MetricsReport {
        sets: fits
            .iter()
            .map(|(n, t)| SetSummary {
                name: n.clone(),
                points: set_sizes[n.as_str()],
                params: t.to_array(),
            })
            .collect(),
        errors: ErrorTables {
            transforms,
            sets: sets.iter().map(|s| s.name.clone()).collect(),
            mean_km,
            max_km,
        },
        field: FieldSummary {
            n1: grid.n1(),
            n2: grid.n2(),
            origin: [grid.origin().x1, grid.origin().x2],
            regions: region_names,
            dirichlet_nodes,
            residual: field.residual(),
            param_min,
            param_max,
        },
        curves: transformed
            .iter()
            .map(|c| (c, "transformed"))
            .chain(references.iter().map(|c| (c, "reference")))
            .map(|(c, kind)| CurveSummary {
                name: c.name().to_string(),
                kind: kind.to_string(),
                points: c.len(),
                length_m: c.length(),
            })
            .collect(),
        sources,
        hausdorff,
        bands_km: cfg.bands_km.clone(),
        matching,
    };
    report.self_check()?;
    Ok(ExperimentOutput {
        report,
        field,
        fits,
        transformed,
        references,
    })
}

/// Output files as `(path relative to the output directory, contents)`.
pub fn render_outputs(out: &ExperimentOutput, dump_field: bool) -> Result<Vec<(PathBuf, String)>> {
    out.report.self_check()?;
    let r = &out.report;
    let mut files = vec![
        (PathBuf::from("params.csv"), r.params_csv()),
        (PathBuf::from("errors_mean.csv"), r.errors_mean_csv()),
        (PathBuf::from("errors_max.csv"), r.errors_max_csv()),
        (PathBuf::from("curves.csv"), r.curves_csv()),
        (PathBuf::from("sources.csv"), r.sources_csv()),
        (PathBuf::from("hausdorff.csv"), r.hausdorff_csv()),
        (PathBuf::from("matching.csv"), r.matching_csv()),
        (PathBuf::from("report.txt"), r.text()),
        (PathBuf::from("report.json"), r.json()),
    ];
    if !out.transformed.is_empty() {
        let curves: Vec<&DiscreteCurve> = out.transformed.iter().collect();
        files.push((PathBuf::from("transformed.geojson"), geojson_string(&curves)));
    }
    if dump_field {
        for (name, text) in field_dump_files(&out.field) {
            files.push((Path::new("field").join(name), text));
        }
    }
    Ok(files)
}

/// Writes rendered files under `dir`, creating directories as needed.
pub fn write_files(dir: &Path, files: &[(PathBuf, String)]) -> Result<()> {
    for (rel, text) in files {
        let path = dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Runs the experiment and writes all outputs to its output directory.
pub fn run_and_write(cfg: &ProjectConfig) -> Result<(ExperimentOutput, PathBuf)> {
    let out = run_experiment(cfg)?;
    let files = render_outputs(&out, cfg.dump_field)?;
    let dir = cfg.output_path();
    write_files(&dir, &files)?;
    Ok((out, dir))
}
