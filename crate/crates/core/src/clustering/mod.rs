//! Random clustering with a size distribution copied from a baseline
//! encoding, a uniform-size variant, and the K-Means baseline.

mod io;
mod kmeans;
mod random;

use thiserror::Error;

use crate::codecs::CodecError;

pub use io::{
    format_cluster_model, parse_cluster_model, read_assignment, read_cluster_model, write_assignment, write_centroids,
    write_cluster_model,
};
pub use kmeans::{kmeans_fit, KMeansModel};
pub use random::{
    derive_size_distribution, group_by_code, random_cluster, random_cluster_uniform, ClusterModel, ClusterSource,
    SizeDistribution, UNKNOWN_CLUSTER,
};

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("unit list is empty")]
    EmptyUnitList,
    #[error("unit {0:?} appears more than once")]
    DuplicateUnit(String),
    #[error("size distribution covers {covered} units but {units} were given")]
    SizeMismatch { covered: usize, units: usize },
    #[error("cluster fraction {0} must be in (0, 1] and leave at least one cluster")]
    InvalidFraction(f64),
    #[error("cannot fit {k} clusters to {points} points")]
    TooFewPoints { k: usize, points: usize },
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("malformed cluster file line {line}: {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
