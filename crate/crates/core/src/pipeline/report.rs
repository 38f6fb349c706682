//! Metric tables, their text renderings, and the consistency check run
//! before anything is written.

use serde::Serialize;

use crate::affine::PARAM_NAMES;
use crate::curves::{combine_matching, combine_mean};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetSummary {
    pub name: String,
    pub points: usize,
    /// `a1, a2, a3, a4, b1, b2`.
    pub params: [f64; 6],
}

/// Cross-evaluation of transformations on correspondence sets:
/// `mean_km[t][s]` is the error of transform `t` on set `s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTables {
    pub transforms: Vec<String>,
    pub sets: Vec<String>,
    pub mean_km: Vec<Vec<f64>>,
    pub max_km: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSummary {
    pub n1: usize,
    pub n2: usize,
    pub origin: [f64; 2],
    pub regions: Vec<String>,
    pub dirichlet_nodes: usize,
    pub residual: f64,
    pub param_min: [f64; 6],
    pub param_max: [f64; 6],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSummary {
    pub name: String,
    pub kind: String,
    pub points: usize,
    pub length_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceRow {
    pub a: String,
    pub b: String,
    pub distance_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HausdorffRow {
    pub a: String,
    pub b: String,
    pub len_a_m: f64,
    pub len_b_m: f64,
    pub max_ab_m: f64,
    pub max_ba_m: f64,
    pub max_m: f64,
    pub mean_ab_m: f64,
    pub mean_ba_m: f64,
    pub mean_m: f64,
}

/// Matched lengths per band, in the order of [`MetricsReport::bands_km`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingRow {
    pub a: String,
    pub b: String,
    pub len_a_m: f64,
    pub len_b_m: f64,
    pub ab_m: Vec<f64>,
    pub ba_m: Vec<f64>,
    pub average_m: Vec<f64>,
    pub average_percent: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub sets: Vec<SetSummary>,
    pub errors: ErrorTables,
    pub field: FieldSummary,
    pub curves: Vec<CurveSummary>,
    pub sources: Vec<SourceRow>,
    pub hausdorff: Vec<HausdorffRow>,
    pub bands_km: Vec<f64>,
    pub matching: Vec<MatchingRow>,
}

pub fn km3(meters: f64) -> String {
    format!("{:.3}", meters / 1000.0)
}

pub fn pct1(percent: f64) -> String {
    format!("{percent:.1}")
}

fn parse(s: &str) -> f64 {
    s.parse().unwrap_or(f64::NAN)
}

/// Whether a printed average row (km to 3 decimals, percent to 1) is what
/// the averaging formula gives for the printed directed rows, up to the
/// rounding of the printed digits.
pub fn printed_average_consistent(
    ab_km: f64,
    len_a_km: f64,
    ba_km: f64,
    len_b_km: f64,
    avg_km: f64,
    avg_percent: f64,
) -> bool {
    let want = combine_matching(ab_km, len_a_km, ba_km, len_b_km);
    // Each printed km value is off by at most 0.0005; the percent by 0.05.
    (avg_km - want.meters).abs() <= 0.001 + 1e-9 && (avg_percent - want.percent).abs() <= 0.05 + 1e-6
}

/// Same check for a printed combined mean Hausdorff value.
pub fn printed_mean_consistent(len_a_km: f64, ab_km: f64, len_b_km: f64, ba_km: f64, mean_km: f64) -> bool {
    (combine_mean(len_a_km, ab_km, len_b_km, ba_km) - mean_km).abs() <= 0.001 + 1e-9
}

fn fail(msg: String) -> Result<()> {
    Err(Error::Consistency(msg))
}

impl MetricsReport {
    /// Recomputes every combined value from its directed parts, both at
    /// full precision (exact) and as rendered.
    pub fn self_check(&self) -> Result<()> {
        for h in &self.hausdorff {
            let pair = format!("{} / {}", h.a, h.b);
            if h.max_m != h.max_ab_m.max(h.max_ba_m) {
                return fail(format!("maximal HD of {pair} is not the larger directed value"));
            }
            if h.mean_m != combine_mean(h.len_a_m, h.mean_ab_m, h.len_b_m, h.mean_ba_m) {
                return fail(format!("mean HD of {pair} does not match its directed values"));
            }
            let r = |m: f64| parse(&km3(m));
            if !printed_mean_consistent(r(h.len_a_m), r(h.mean_ab_m), r(h.len_b_m), r(h.mean_ba_m), r(h.mean_m)) {
                return fail(format!("printed mean HD of {pair} does not match its printed rows"));
            }
        }
        for m in &self.matching {
            let pair = format!("{} / {}", m.a, m.b);
            let n = self.bands_km.len();
            if [m.ab_m.len(), m.ba_m.len(), m.average_m.len(), m.average_percent.len()] != [n; 4] {
                return fail(format!("matching row {pair} has the wrong number of bands"));
            }
            for k in 0..n {
                let want = combine_matching(m.ab_m[k], m.len_a_m, m.ba_m[k], m.len_b_m);
                if want.meters != m.average_m[k] || want.percent != m.average_percent[k] {
                    return fail(format!("average row of {pair} at band {} km is inconsistent", self.bands_km[k]));
                }
                let r = |v: f64| parse(&km3(v));
                if !printed_average_consistent(
                    r(m.ab_m[k]),
                    r(m.len_a_m),
                    r(m.ba_m[k]),
                    r(m.len_b_m),
                    r(m.average_m[k]),
                    parse(&pct1(m.average_percent[k])),
                ) {
                    return fail(format!("printed average row of {pair} at band {} km is inconsistent", self.bands_km[k]));
                }
            }
        }
        Ok(())
    }

    pub fn params_csv(&self) -> String {
        let mut out = format!("set,points,{}\n", PARAM_NAMES.join(","));
        for s in &self.sets {
            let p: Vec<String> = s.params.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&format!("{},{},{}\n", s.name, s.points, p.join(",")));
        }
        out
    }

    fn error_csv(&self, table: &[Vec<f64>]) -> String {
        let mut out = format!("transform,{}\n", self.errors.sets.join(","));
        for (t, row) in self.errors.transforms.iter().zip(table) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.3}")).collect();
            out.push_str(&format!("{t},{}\n", cells.join(",")));
        }
        out
    }

    pub fn errors_mean_csv(&self) -> String {
        self.error_csv(&self.errors.mean_km)
    }

    pub fn errors_max_csv(&self) -> String {
        self.error_csv(&self.errors.max_km)
    }

    pub fn sources_csv(&self) -> String {
        let mut out = String::from("a,b,distance_km\n");
        for s in &self.sources {
            out.push_str(&format!("{},{},{:.3}\n", s.a, s.b, s.distance_km));
        }
        out
    }

    pub fn curves_csv(&self) -> String {
        let mut out = String::from("curve,kind,points,length_km\n");
        for c in &self.curves {
            out.push_str(&format!("{},{},{},{}\n", c.name, c.kind, c.points, km3(c.length_m)));
        }
        out
    }

    /// Two rows per pair, `A,B` then `B,A`; combined columns repeat.
    pub fn hausdorff_csv(&self) -> String {
        let mut out = String::from("a,b,delta_max_km,d_max_km,delta_mean_km,d_mean_km\n");
        for h in &self.hausdorff {
            for (a, b, dm, dn) in [(&h.a, &h.b, h.max_ab_m, h.mean_ab_m), (&h.b, &h.a, h.max_ba_m, h.mean_ba_m)] {
                out.push_str(&format!(
                    "{a},{b},{},{},{},{}\n",
                    km3(dm),
                    km3(h.max_m),
                    km3(dn),
                    km3(h.mean_m)
                ));
            }
        }
        out
    }

    /// Three rows per pair: `A -> B`, `B -> A`, and the average, with one
    /// length/percent column pair per band.
    pub fn matching_csv(&self) -> String {
        let mut out = String::from("a,len_a_km,b");
        for b in &self.bands_km {
            out.push_str(&format!(",lm_{b}_km,pct_{b}"));
        }
        out.push('\n');
        for m in &self.matching {
            for (a, la, b, vals, lb) in [
                (&m.a, m.len_a_m, &m.b, &m.ab_m, m.len_a_m),
                (&m.b, m.len_b_m, &m.a, &m.ba_m, m.len_b_m),
            ] {
                out.push_str(&format!("{a},{},{b}", km3(la)));
                for v in vals {
                    out.push_str(&format!(",{},{}", km3(*v), pct1(100.0 * v / lb)));
                }
                out.push('\n');
            }
            out.push_str("Average,,");
            for (v, p) in m.average_m.iter().zip(&m.average_percent) {
                out.push_str(&format!(",{},{}", km3(*v), pct1(*p)));
            }
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable rendering of all tables.
    pub fn text(&self) -> String {
        let mut out = String::new();
        out.push_str("AFFINE PARAMETERS\n");
        out.push_str(&table(
            &["set", "points", "a1", "a2", "a3", "a4", "b1", "b2"],
            self.sets
                .iter()
                .map(|s| {
                    let mut row = vec![s.name.clone(), s.points.to_string()];
                    row.extend(s.params.iter().map(|v| format!("{v:.6e}")));
                    row
                })
                .collect(),
        ));
        for (title, t) in [("MEAN ERROR [km]", &self.errors.mean_km), ("MAXIMAL ERROR [km]", &self.errors.max_km)] {
            out.push_str(&format!("\n{title} (rows: transform, columns: set)\n"));
            let mut head = vec!["transform".to_string()];
            head.extend(self.errors.sets.iter().cloned());
            let head: Vec<&str> = head.iter().map(String::as_str).collect();
            let rows = self
                .errors
                .transforms
                .iter()
                .zip(t)
                .map(|(name, r)| {
                    let mut row = vec![name.clone()];
                    row.extend(r.iter().map(|v| format!("{v:.3}")));
                    row
                })
                .collect();
            out.push_str(&table(&head, rows));
        }
        let f = &self.field;
        out.push_str(&format!(
            "\nFIELD\n{} x {} nodes, origin ({}, {}), {} Dirichlet nodes from {} region(s), relative residual {:.3e}\n",
            f.n1,
            f.n2,
            f.origin[0],
            f.origin[1],
            f.dirichlet_nodes,
            f.regions.len(),
            f.residual
        ));
        out.push_str("\nCURVES\n");
        out.push_str(&table(
            &["curve", "kind", "points", "length [km]"],
            self.curves
                .iter()
                .map(|c| vec![c.name.clone(), c.kind.clone(), c.points.to_string(), km3(c.length_m)])
                .collect(),
        ));
        if !self.sources.is_empty() {
            out.push_str("\nDISTANCE OF SOURCES [km]\n");
            out.push_str(&table(
                &["A", "B", "distance"],
                self.sources
                    .iter()
                    .map(|s| vec![s.a.clone(), s.b.clone(), format!("{:.3}", s.distance_km)])
                    .collect(),
            ));
        }
        if !self.hausdorff.is_empty() {
            out.push_str("\nHAUSDORFF DISTANCES [km]\n");
            let mut rows = Vec::new();
            for h in &self.hausdorff {
                rows.push(vec![h.a.clone(), h.b.clone(), km3(h.max_ab_m), km3(h.max_m), km3(h.mean_ab_m), km3(h.mean_m)]);
                rows.push(vec![h.b.clone(), h.a.clone(), km3(h.max_ba_m), String::new(), km3(h.mean_ba_m), String::new()]);
            }
            out.push_str(&table(&["A", "B", "max dir", "max", "mean dir", "mean"], rows));
        }
        if !self.matching.is_empty() {
            out.push_str("\nMATCHING LENGTH [km]\n");
            let mut head = vec!["A".to_string(), "L_A".to_string(), "B".to_string()];
            head.extend(self.bands_km.iter().map(|b| format!("d_t = {b}")));
            let head: Vec<&str> = head.iter().map(String::as_str).collect();
            let mut rows = Vec::new();
            for m in &self.matching {
                for (a, la, b, vals) in [(&m.a, m.len_a_m, &m.b, &m.ab_m), (&m.b, m.len_b_m, &m.a, &m.ba_m)] {
                    let mut row = vec![a.clone(), km3(la), b.clone()];
                    row.extend(vals.iter().map(|v| format!("{} ({}%)", km3(*v), pct1(100.0 * v / la))));
                    rows.push(row);
                }
                let mut row = vec!["Average".to_string(), String::new(), String::new()];
                row.extend(
                    m.average_m
                        .iter()
                        .zip(&m.average_percent)
                        .map(|(v, p)| format!("{} ({}%)", km3(*v), pct1(*p))),
                );
                rows.push(row);
            }
            out.push_str(&table(&head, rows));
        }
        out
    }
}

/// Left-aligned first column, right-aligned others.
fn table(head: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut width: Vec<usize> = head.iter().map(|h| h.len()).collect();
    for r in &rows {
        for (k, c) in r.iter().enumerate() {
            width[k] = width[k].max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(k, c)| if k == 0 { format!("{c:<w$}", w = width[k]) } else { format!("{c:>w$}", w = width[k]) })
            .collect();
        let mut s = parts.join("  ").trim_end().to_string();
        s.push('\n');
        s
    };
    let mut out = line(head.to_vec());
    let total: usize = width.iter().sum::<usize>() + 2 * (width.len() - 1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for r in &rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> MetricsReport {
        let (la, lb) = (2_714_887.0, 1_421_117.0);
        let avg = combine_matching(228_127.0, la, 185_952.0, lb);
        MetricsReport {
            sets: vec![],
            errors: ErrorTables {
                transforms: vec!["A".into()],
                sets: vec!["A".into()],
                mean_km: vec![vec![0.5]],
                max_km: vec![vec![1.0]],
            },
            field: FieldSummary {
                n1: 3,
                n2: 3,
                origin: [0.0, 0.0],
                regions: vec![],
                dirichlet_nodes: 0,
                residual: 0.0,
                param_min: [0.0; 6],
                param_max: [0.0; 6],
            },
            curves: vec![],
            sources: vec![],
            hausdorff: vec![HausdorffRow {
                a: "D".into(),
                b: "Rio".into(),
                len_a_m: la,
                len_b_m: lb,
                max_ab_m: 317_781.0,
                max_ba_m: 206_829.0,
                max_m: 317_781.0,
                mean_ab_m: 112_802.0,
                mean_ba_m: 79_573.0,
                mean_m: combine_mean(la, 112_802.0, lb, 79_573.0),
            }],
            bands_km: vec![10.0],
            matching: vec![MatchingRow {
                a: "D".into(),
                b: "Rio".into(),
                len_a_m: la,
                len_b_m: lb,
                ab_m: vec![228_127.0],
                ba_m: vec![185_952.0],
                average_m: vec![avg.meters],
                average_percent: vec![avg.percent],
            }],
        }
    }

    #[test]
    fn consistent_report_passes_and_renders() {
        let r = report();
        r.self_check().unwrap();
        let m = r.matching_csv();
        assert!(m.contains("D,2714.887,Rio,228.127,8.4\n"));
        assert!(m.contains("Rio,1421.117,D,185.952,13.1\n"));
        assert!(m.contains("Average,,,207.040,10.0\n"));
        let h = r.hausdorff_csv();
        assert!(h.contains("D,Rio,317.781,317.781,112.802,"));
        assert!(h.contains("Rio,D,206.829,317.781,79.573,"));
        assert!(r.text().contains("207.040 (10.0%)"));
    }

    #[test]
    fn tampered_rows_fail() {
        let mut r = report();
        r.matching[0].average_m[0] += 1.0;
        assert!(matches!(r.self_check(), Err(Error::Consistency(_))));
        let mut r = report();
        r.hausdorff[0].max_m = 206_829.0;
        assert!(r.self_check().is_err());
        let mut r = report();
        r.hausdorff[0].mean_m *= 1.0 + 1e-12;
        assert!(r.self_check().is_err());
    }

    #[test]
    fn printed_rows() {
        assert!(printed_average_consistent(228.127, 2714.887, 185.952, 1421.117, 207.040, 10.0));
        assert!(!printed_average_consistent(228.127, 2714.887, 185.952, 1421.117, 207.042, 10.0));
        assert!(printed_mean_consistent(2021.995, 44.903, 1421.117, 39.621, 42.723));
        assert!(!printed_mean_consistent(2021.995, 44.903, 1421.117, 39.621, 42.686));
    }
}
