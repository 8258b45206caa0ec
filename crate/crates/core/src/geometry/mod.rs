//! Geometry of encodings in embedding space.
//!
//! Units are embedded, projected to the plane with PCA, and grouped by
//! their code or cluster id. The measures here quantify how widely each
//! group spreads: smoothed convex hulls, coverage curves, per-group volume
//! CDFs, the concentration factor Γ and a nearest-neighbour density.

mod density;
mod embed;
mod hull;
mod measures;
mod pca;
mod report;

use thiserror::Error;

pub use density::{density_measure, density_profile, sample_hull_interior, DensityParams, DensityReport, DensityRow};
pub use embed::{load_embeddings, parse_embeddings, train_embeddings, EmbeddingParams, EmbeddingTable};
pub use hull::{convex_hull, polygon_area, smooth_hull, HullMetrics, HullParams};
pub use measures::{
    concentration_factor, coverage_curve, group_points, mean_coverage_curve, volume_cdf, GammaReport, Grouping,
    VolumeCdf,
};
pub use pca::{pca_project, Projection2D};
pub use report::{CdfReport, CoverageReport, Report};

/// A point in the projected plane.
pub type Point = [f64; 2];

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("corpus has no tokens")]
    EmptyCorpus,
    #[error("vocabulary of {vocab} units is smaller than dimension {dimension}")]
    RankDeficient { vocab: usize, dimension: usize },
    #[error("embedding dimension {0} must be at least 2")]
    DimensionTooSmall(usize),
    #[error("line {line}: expected {expected} components, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("line {line}: cannot parse {token:?} as a finite number")]
    MalformedFloat { line: usize, token: String },
    #[error("need at least {needed} units, found {found}")]
    TooFewUnits { needed: usize, found: usize },
    #[error("all points are identical")]
    DegenerateData,
    #[error("hull parameters need beta > 0 and radius > 0 (beta {beta}, radius {radius})")]
    InvalidHullParams { beta: f64, radius: f64 },
    #[error("point set is empty")]
    EmptyPoints,
    #[error("smoothing removed all {0} points")]
    AllPointsRemoved(usize),
    #[error("smoothed hull has no interior ({0} vertices)")]
    DegenerateHull(usize),
    #[error("group {0} is empty")]
    EmptyGroup(usize),
    #[error("no groups given")]
    NoGroups,
    #[error("every group collapses to a single point")]
    ZeroDispersion,
    #[error("density needs {needed} groups, found {found}")]
    InsufficientGroups { needed: usize, found: usize },
    #[error("neighbour index {index} exceeds the {available} reference points")]
    InsufficientNeighbors { index: usize, available: usize },
    #[error("neighbour index must be 1 or more")]
    InvalidNeighborIndex,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}
