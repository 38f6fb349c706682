use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand};
use lagl::affine::{fit_affine, max_error, mean_error, PARAM_NAMES};
use lagl::field::field_dump_files;
use lagl::pipeline::{
    compare_pair, fit_and_solve, geojson_string, km3, pct1, read_correspondences, read_geojson, read_pixel_curve,
    render_outputs, run_experiment, select_line, stadia_to_km, transform_curve, write_files, DEFAULT_BANDS_KM,
};
use lagl::pipeline::DomainConfig;
use lagl::{DiscreteCurve, ProjectConfig};

#[derive(Parser)]
#[command(name = "lagl", version, about = "Locally affine, globally harmonic map registration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Overrides applied on top of a project config.
#[derive(Args)]
struct Overrides {
    /// Domain rectangle `x1_min,x2_min,x1_max,x2_max` in pixels.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "X1_MIN,X2_MIN,X1_MAX,X2_MAX")]
    domain: Option<Vec<f64>>,
}

impl Overrides {
    fn load(&self, config: &Path) -> Result<ProjectConfig> {
        let mut cfg = ProjectConfig::load(config)?;
        if let Some(d) = &self.domain {
            if d.len() != 4 {
                return Err(lagl::Error::Config(format!("--domain takes 4 values, got {}", d.len())).into());
            }
            cfg.domain = DomainConfig {
                x1_min: d[0],
                x2_min: d[1],
                x1_max: d[2],
                x2_max: d[3],
            };
            cfg.validate()?;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit one affine per correspondence set and report residuals.
    Fit {
        /// Correspondence files (`@set` blocks of `x1,x2,lon,lat[,label]`).
        #[arg(required = true)]
        points: Vec<PathBuf>,
    },
    /// Solve the parameter field of a project and dump it as CSV grids.
    Field {
        config: PathBuf,
        /// Target directory; defaults to `<output_dir>/field`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Map a pixel curve through the field of a project, as GeoJSON.
    Transform {
        config: PathBuf,
        /// Pixel curve file with one `x1,x2` per line.
        curve: PathBuf,
        /// Feature name; defaults to the file stem.
        #[arg(long)]
        name: Option<String>,
        /// Output file; defaults to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Hausdorff distances and matching lengths between two GeoJSON lines.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        feature_a: Option<String>,
        #[arg(long)]
        feature_b: Option<String>,
        /// Band thresholds in km.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BANDS_KM.to_vec())]
        bands: Vec<f64>,
    },
    /// Run a full experiment and write all reports.
    Run {
        config: PathBuf,
        /// Override `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the band thresholds in km.
        #[arg(long, value_delimiter = ',')]
        bands: Option<Vec<f64>>,
        /// Do not print the text report.
        #[arg(short, long)]
        quiet: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Convert stadia to a km range.
    Stadia {
        #[arg(required = true)]
        counts: Vec<f64>,
    },
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "curve".into())
}

fn fit(points: &[PathBuf], out: &mut impl std::io::Write) -> Result<()> {
    writeln!(out, "set,points,{},mean_km,max_km", PARAM_NAMES.join(","))?;
    for path in points {
        for set in read_correspondences(path)? {
            let t = fit_affine(&set).with_context(|| format!("fitting set `{}`", set.name))?;
            let params: Vec<String> = t.to_array().iter().map(|v| v.to_string()).collect();
            writeln!(
                out,
                "{},{},{},{:.6},{:.6}",
                set.name,
                set.pairs.len(),
                params.join(","),
                mean_error(&t, &set)?,
                max_error(&t, &set)?
            )?;
        }
    }
    Ok(())
}

fn field(cfg: &ProjectConfig, dir: Option<PathBuf>) -> Result<PathBuf> {
    let fitted = fit_and_solve(cfg)?;
    let dir = dir.unwrap_or_else(|| cfg.output_path().join("field"));
    let files: Vec<(PathBuf, String)> = field_dump_files(&fitted.field)
        .into_iter()
        .map(|(n, t)| (PathBuf::from(n), t))
        .collect();
    write_files(&dir, &files)?;
    Ok(dir)
}

fn transform(cfg: &ProjectConfig, curve: &Path, name: Option<String>, output: Option<PathBuf>) -> Result<()> {
    let fitted = fit_and_solve(cfg)?;
    let name = name.unwrap_or_else(|| stem(curve));
    let pixels = read_pixel_curve(curve)?;
    let geo = transform_curve(&fitted.field, &pixels, &name)?;
    let text = geojson_string(&[&geo]);
    match output {
        Some(path) => write_files(Path::new(""), &[(path, text)])?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_line(path: &Path, feature: Option<&str>) -> Result<DiscreteCurve> {
    let line = select_line(read_geojson(path)?, feature, path)?;
    let name = line.name.clone().unwrap_or_else(|| stem(path));
    Ok(DiscreteCurve::new(name, line.points)?)
}

fn compare(
    a: &Path,
    b: &Path,
    feature_a: Option<&str>,
    feature_b: Option<&str>,
    bands: &[f64],
    out: &mut impl std::io::Write,
) -> Result<()> {
    let (ca, cb) = (load_line(a, feature_a)?, load_line(b, feature_b)?);
    let (h, m) = compare_pair(&ca, &cb, bands)?;
    writeln!(out, "A {} {} km", h.a, km3(h.len_a_m))?;
    writeln!(out, "B {} {} km", h.b, km3(h.len_b_m))?;
    writeln!(out, "max HD   A->B {}  B->A {}  d_H {} km", km3(h.max_ab_m), km3(h.max_ba_m), km3(h.max_m))?;
    writeln!(out, "mean HD  A->B {}  B->A {}  mean {} km", km3(h.mean_ab_m), km3(h.mean_ba_m), km3(h.mean_m))?;
    for (k, band) in bands.iter().enumerate() {
        writeln!(
            out,
            "band {band} km  A->B {}  B->A {}  average {} ({}%)",
            km3(m.ab_m[k]),
            km3(m.ba_m[k]),
            km3(m.average_m[k]),
            pct1(m.average_percent[k])
        )?;
    }
    Ok(())
}

fn run(mut cfg: ProjectConfig, out_dir: Option<PathBuf>, bands: Option<Vec<f64>>, quiet: bool) -> Result<()> {
    if let Some(dir) = out_dir {
        cfg.output_dir = dir;
    }
    if let Some(b) = bands {
        cfg.bands_km = b;
        cfg.validate()?;
    }
    let out = run_experiment(&cfg)?;
    let files = render_outputs(&out, cfg.dump_field)?;
    let dir = cfg.output_path();
    write_files(&dir, &files)?;
    if !quiet {
        print!("{}", out.report.text());
    }
    eprintln!("wrote {} files to {}", files.len(), dir.display());
    Ok(())
}

fn stadia(counts: &[f64], out: &mut impl std::io::Write) -> Result<()> {
    for n in counts {
        let (lo, hi) = stadia_to_km(*n)?;
        writeln!(out, "{n} stadia = {lo} - {hi} km")?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Fit { points } => fit(&points, &mut stdout),
        Command::Field { config, out, overrides } => {
            let dir = field(&overrides.load(&config)?, out)?;
            eprintln!("wrote field dump to {}", dir.display());
            Ok(())
        }
        Command::Transform {
            config,
            curve,
            name,
            output,
            overrides,
        } => transform(&overrides.load(&config)?, &curve, name, output),
        Command::Compare {
            a,
            b,
            feature_a,
            feature_b,
            bands,
        } => compare(&a, &b, feature_a.as_deref(), feature_b.as_deref(), &bands, &mut stdout),
        Command::Run {
            config,
            out,
            bands,
            quiet,
            overrides,
        } => run(overrides.load(&config)?, out, bands, quiet),
        Command::Stadia { counts } => stadia(&counts, &mut stdout),
    }
}

/// Exit code of the first library or I/O error in the chain; 70 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| {
            if let Some(e) = e.downcast_ref::<lagl::Error>() {
                Some(e.category().exit_code())
            } else {
                e.downcast_ref::<std::io::Error>()
                    .map(|_| lagl::ErrorCategory::Io.exit_code())
            }
        })
        .unwrap_or(70) as u8
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
