//! Cluster model files.
//!
//! A random-cluster model is a TSV of `unit<TAB>cluster_id` lines preceded
//! by `#` header lines carrying the seed, generator and source. K-Means
//! models are written as a centroid TSV plus a separate assignment TSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::random::{cluster_name, ClusterModel, ClusterSource};
use super::{ClusterError, KMeansModel};
use crate::rng::RNG_NAME;

pub fn format_cluster_model(model: &ClusterModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# seed: {}", model.seed());
    let _ = writeln!(out, "# rng: {RNG_NAME}");
    let _ = writeln!(out, "# source: {}", model.source().as_str());
    let _ = writeln!(out, "# clusters: {}", model.num_clusters());
    for (unit, cluster) in model.iter() {
        let _ = writeln!(out, "{unit}\t{}", cluster_name(cluster));
    }
    out
}

pub fn write_cluster_model(path: impl AsRef<Path>, model: &ClusterModel) -> Result<(), ClusterError> {
    fs::write(path, format_cluster_model(model))?;
    Ok(())
}

pub fn parse_cluster_model(text: &str) -> Result<ClusterModel, ClusterError> {
    let mut seed = 0;
    let mut source = ClusterSource::BaselineDerived;
    let mut declared = None;
    let mut assignment = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let malformed = || ClusterError::MalformedLine {
            line: idx + 1,
            content: line.to_string(),
        };
        if let Some(header) = line.strip_prefix('#') {
            if let Some((key, value)) = header.split_once(':') {
                let value = value.trim();
                match key.trim() {
                    "seed" => seed = value.parse().map_err(|_| malformed())?,
                    "source" => {
                        source = match value {
                            "baseline-derived" => ClusterSource::BaselineDerived,
                            "uniform-k" => ClusterSource::UniformK,
                            _ => return Err(malformed()),
                        }
                    }
                    "clusters" => declared = Some(value.parse::<usize>().map_err(|_| malformed())?),
                    _ => {}
                }
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let (unit, id) = line.split_once('\t').ok_or_else(malformed)?;
        let index: usize = id
            .strip_prefix('G')
            .and_then(|n| n.parse().ok())
            .filter(|&n: &usize| n >= 1)
            .ok_or_else(malformed)?;
        assignment.insert(unit.to_string(), index - 1);
    }
    let used = assignment.values().max().map_or(0, |m| m + 1);
    let num_clusters = declared.unwrap_or(used).max(used);
    Ok(ClusterModel::from_parts(assignment, num_clusters, seed, source))
}

pub fn read_cluster_model(path: impl AsRef<Path>) -> Result<ClusterModel, ClusterError> {
    parse_cluster_model(&fs::read_to_string(path)?)
}

/// One centroid per line: `cluster_id<TAB>v1<TAB>v2...`.
pub fn write_centroids(path: impl AsRef<Path>, model: &KMeansModel) -> Result<(), ClusterError> {
    let mut out = String::new();
    for (k, c) in model.centroids.iter().enumerate() {
        out.push_str(&cluster_name(k));
        for v in c {
            let _ = write!(out, "\t{v}");
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// `label<TAB>cluster_id` for each point, in input order.
pub fn write_assignment<S: AsRef<str>>(
    path: impl AsRef<Path>,
    labels: &[S],
    assignment: &[usize],
) -> Result<(), ClusterError> {
    let mut out = String::new();
    for (label, &k) in labels.iter().zip(assignment) {
        let _ = writeln!(out, "{}\t{}", label.as_ref(), cluster_name(k));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads any `label<TAB>group` file (cluster models, assignments, code maps)
/// into label → group pairs in file order.
pub fn read_assignment(path: impl AsRef<Path>) -> Result<Vec<(String, String)>, ClusterError> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let (label, group) = line.split_once('\t').ok_or_else(|| ClusterError::MalformedLine {
            line: idx + 1,
            content: line.to_string(),
        })?;
        out.push((label.to_string(), group.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{random_cluster, SizeDistribution};

    #[test]
    fn model_file_round_trip() {
        let units: Vec<String> = ["speak", "space", "body", "bad", "car"].map(String::from).to_vec();
        let m = random_cluster(&units, &SizeDistribution::new(vec![2, 2, 1]), 42).unwrap();
        let text = format_cluster_model(&m);
        assert!(text.starts_with("# seed: 42\n"));
        assert_eq!(parse_cluster_model(&text).unwrap(), m);
    }

    #[test]
    fn rejects_bad_ids() {
        assert!(matches!(
            parse_cluster_model("a\tX1\n"),
            Err(ClusterError::MalformedLine { line: 1, .. })
        ));
        assert!(parse_cluster_model("a\tG0\n").is_err());
        assert!(parse_cluster_model("a G1\n").is_err());
    }
}
