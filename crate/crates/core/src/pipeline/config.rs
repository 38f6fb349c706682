//! Experiment configuration (TOML). Relative paths resolve against the
//! directory of the config file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::affine::PixelPoint;
use crate::error::{Error, Result};
use crate::field::{GridDomain, PolygonMode};
use crate::geodesy::GeoPoint;

pub const DEFAULT_BANDS_KM: [f64; 3] = [10.0, 50.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub x1_min: f64,
    pub x2_min: f64,
    pub x1_max: f64,
    pub x2_max: f64,
}

impl DomainConfig {
    pub fn grid(&self) -> Result<GridDomain> {
        GridDomain::from_bounds(
            PixelPoint::new(self.x1_min, self.x2_min),
            PixelPoint::new(self.x1_max, self.x2_max),
        )
    }
}

/// Splits a curve at the vertex nearest to `at` (`[lon, lat]`) into two
/// named parts.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub at: [f64; 2],
    pub names: [String; 2],
}

impl SplitConfig {
    pub fn point(&self) -> Result<GeoPoint> {
        GeoPoint::new(self.at[0], self.at[1])
    }
}

/// A pixel polyline on the source map, transformed through the field.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceCurveConfig {
    pub name: String,
    pub file: PathBuf,
    #[serde(default)]
    pub split: Option<SplitConfig>,
}

/// A WGS84 polyline read from GeoJSON. `feature` selects a feature by its
/// `name` property; without it the file must hold exactly one line.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceCurveConfig {
    pub name: String,
    pub file: PathBuf,
    #[serde(default)]
    pub feature: Option<String>,
    #[serde(default)]
    pub split: Option<SplitConfig>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolygonModeConfig {
    #[default]
    AsGiven,
    ConvexHull,
}

impl From<PolygonModeConfig> for PolygonMode {
    fn from(m: PolygonModeConfig) -> Self {
        match m {
            PolygonModeConfig::AsGiven => PolygonMode::AsGiven,
            PolygonModeConfig::ConvexHull => PolygonMode::ConvexHull,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub domain: DomainConfig,
    /// Correspondence files; every set in them enters the error tables.
    pub correspondences: Vec<PathBuf>,
    /// Sets used as Dirichlet regions; all sets when absent.
    #[serde(default)]
    pub regions: Option<Vec<String>>,
    #[serde(default)]
    pub polygon_mode: PolygonModeConfig,
    #[serde(default = "default_bands")]
    pub bands_km: Vec<f64>,
    #[serde(default)]
    pub source_curves: Vec<SourceCurveConfig>,
    #[serde(default)]
    pub reference_curves: Vec<ReferenceCurveConfig>,
    /// Curve pairs for the Hausdorff and matching tables.
    #[serde(default)]
    pub compare: Vec<PairConfig>,
    /// Curve pairs for the source-distance table; every reference curve
    /// against every transformed curve when absent.
    #[serde(default)]
    pub sources: Option<Vec<PairConfig>>,
    #[serde(default)]
    pub dump_field: bool,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_bands() -> Vec<f64> {
    DEFAULT_BANDS_KM.to_vec()
}

impl ProjectConfig {
    pub fn from_toml(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: ProjectConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        ProjectConfig::from_toml(&text, base).map_err(|e| e.context(format!("config {}", path.display())))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_path(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    /// Cross-field checks; run by the loaders and after any override.
    pub fn validate(&self) -> Result<()> {
        self.domain.grid()?;
        if self.correspondences.is_empty() {
            return Err(Error::Config("`correspondences` lists no files".into()));
        }
        for b in &self.bands_km {
            if !(b.is_finite() && *b > 0.0) {
                return Err(Error::Config(format!("band {b} km is not positive")));
            }
        }
        let mut names = BTreeSet::new();
        let splits = self
            .source_curves
            .iter()
            .map(|c| (&c.name, &c.split))
            .chain(self.reference_curves.iter().map(|c| (&c.name, &c.split)));
        for (name, split) in splits {
            let parts = split.iter().flat_map(|s| s.names.iter());
            for n in std::iter::once(name).chain(parts) {
                if !names.insert(n.clone()) {
                    return Err(Error::Config(format!("curve name `{n}` is used twice")));
                }
            }
            if let Some(s) = split {
                s.point()?;
            }
        }
        let pairs = self.compare.iter().chain(self.sources.iter().flatten());
        for p in pairs {
            for n in [&p.a, &p.b] {
                if !names.contains(n) {
                    return Err(Error::Config(format!("pair refers to unknown curve `{n}`")));
                }
            }
        }
        Ok(())
    }
}
