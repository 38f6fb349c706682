//! Locally affine, globally harmonic (LAGL) registration of historical maps.
//!
//! The crate fits least-squares affine transformations to landmark
//! correspondences, spreads their six parameters over the pixel grid of the
//! source map by solving a discrete Laplace problem, pushes digitized curves
//! through the resulting field into WGS84, and compares curves with geodesic
//! Hausdorff distances and matching lengths.

pub mod affine;
pub mod curves;
pub mod error;
pub mod field;
pub mod geodesy;
pub mod pipeline;

pub use affine::{fit_affine, AffineParams, Correspondence, CorrespondenceSet, PixelPoint};
pub use curves::{BandThreshold, DiscreteCurve, MatchingLength};
pub use error::{Error, ErrorCategory, Result};
pub use field::{GridDomain, DirichletRegion, ParameterField, PolygonMode};
pub use geodesy::{geodesic_distance, point_to_segment_distance, polyline_length, GeoPoint, GeoSegment};
pub use pipeline::{MetricsReport, ProjectConfig};
