use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::ClusterError;
use crate::codecs::{encode_or_pass, Codec, CodecError};
use crate::rng;

/// Cluster id emitted for tokens the model has never seen.
pub const UNKNOWN_CLUSTER: &str = "G_UNK";

/// Multiset of group sizes, one entry per distinct baseline code, kept in
/// descending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeDistribution {
    multiplicities: Vec<usize>,
}

impl SizeDistribution {
    pub fn new(mut multiplicities: Vec<usize>) -> Self {
        multiplicities.retain(|&m| m > 0);
        multiplicities.sort_unstable_by(|a, b| b.cmp(a));
        Self { multiplicities }
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn total(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn num_clusters(&self) -> usize {
        self.multiplicities.len()
    }
}

fn canonical_units<S: AsRef<str>>(units: &[S]) -> Result<Vec<String>, ClusterError> {
    if units.is_empty() {
        return Err(ClusterError::EmptyUnitList);
    }
    let mut set = BTreeSet::new();
    for u in units {
        if !set.insert(u.as_ref()) {
            return Err(ClusterError::DuplicateUnit(u.as_ref().to_string()));
        }
    }
    Ok(set.into_iter().map(str::to_string).collect())
}

/// Groups distinct `units` by their code under `codec`. Units the codec
/// rejects as non-alphabetic form their own group keyed by the surface form.
pub fn group_by_code<S: AsRef<str>>(
    units: &[S],
    codec: &dyn Codec,
) -> Result<BTreeMap<String, Vec<String>>, ClusterError> {
    let units = canonical_units(units)?;
    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for unit in units {
        let (codes, _) = encode_or_pass(codec, &unit)?;
        groups.entry(codes.join(" ")).or_default().push(unit);
    }
    Ok(groups)
}

pub fn derive_size_distribution<S: AsRef<str>>(
    units: &[S],
    codec: &dyn Codec,
) -> Result<SizeDistribution, ClusterError> {
    let groups = group_by_code(units, codec)?;
    Ok(SizeDistribution::new(groups.values().map(Vec::len).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterSource {
    BaselineDerived,
    UniformK,
}

impl ClusterSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ClusterSource::BaselineDerived => "baseline-derived",
            ClusterSource::UniformK => "uniform-k",
        }
    }
}

/// A seeded unit to cluster mapping. Cluster `i` is written `G{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterModel {
    assignment: BTreeMap<String, usize>,
    num_clusters: usize,
    seed: u64,
    source: ClusterSource,
}

impl ClusterModel {
    pub(crate) fn from_parts(
        assignment: BTreeMap<String, usize>,
        num_clusters: usize,
        seed: u64,
        source: ClusterSource,
    ) -> Self {
        Self {
            assignment,
            num_clusters,
            seed,
            source,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn source(&self) -> ClusterSource {
        self.source
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn num_units(&self) -> usize {
        self.assignment.len()
    }

    pub fn cluster_index(&self, unit: &str) -> Option<usize> {
        self.assignment.get(unit).copied()
    }

    pub fn cluster_id(&self, unit: &str) -> Option<String> {
        self.cluster_index(unit).map(cluster_name)
    }

    /// Units in lexicographic order with their cluster index.
    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.assignment.iter().map(|(u, &c)| (u.as_str(), c))
    }

    /// Cluster sizes indexed by cluster.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_clusters];
        for &c in self.assignment.values() {
            sizes[c] += 1;
        }
        sizes
    }

    /// Replaces every token by its cluster id, or [`UNKNOWN_CLUSTER`].
    pub fn encode_sentence<S: AsRef<str>>(&self, sentence: &[S]) -> Vec<String> {
        sentence
            .iter()
            .map(|t| {
                self.cluster_id(t.as_ref())
                    .unwrap_or_else(|| UNKNOWN_CLUSTER.to_string())
            })
            .collect()
    }
}

pub(crate) fn cluster_name(index: usize) -> String {
    format!("G{}", index + 1)
}

impl Codec for ClusterModel {
    fn name(&self) -> &str {
        "random-cluster"
    }

    fn encode(&self, token: &str) -> Result<Vec<String>, CodecError> {
        Ok(vec![self
            .cluster_id(token)
            .unwrap_or_else(|| UNKNOWN_CLUSTER.to_string())])
    }
}

fn assign_in_chunks(units: Vec<String>, sizes: &[usize], seed: u64, source: ClusterSource) -> ClusterModel {
    let mut order = units;
    order.shuffle(&mut rng::seeded(seed));
    let mut assignment = BTreeMap::new();
    let mut it = order.into_iter();
    for (cluster, &size) in sizes.iter().enumerate() {
        for unit in it.by_ref().take(size) {
            assignment.insert(unit, cluster);
        }
    }
    ClusterModel::from_parts(assignment, sizes.len(), seed, source)
}

/// Partitions `units` into clusters whose sizes are exactly `dist`.
///
/// Units are sorted before sampling, so the result depends only on the unit
/// set and the seed. A seeded permutation is cut into consecutive chunks,
/// which is the same as drawing each cluster uniformly without replacement
/// from the units still unassigned.
pub fn random_cluster<S: AsRef<str>>(
    units: &[S],
    dist: &SizeDistribution,
    seed: u64,
) -> Result<ClusterModel, ClusterError> {
    let units = canonical_units(units)?;
    if dist.total() != units.len() {
        return Err(ClusterError::SizeMismatch {
            covered: dist.total(),
            units: units.len(),
        });
    }
    Ok(assign_in_chunks(
        units,
        dist.multiplicities(),
        seed,
        ClusterSource::BaselineDerived,
    ))
}

/// `round(fraction * |units|)` clusters whose sizes differ by at most one.
pub fn random_cluster_uniform<S: AsRef<str>>(
    units: &[S],
    fraction: f64,
    seed: u64,
) -> Result<ClusterModel, ClusterError> {
    let units = canonical_units(units)?;
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(ClusterError::InvalidFraction(fraction));
    }
    let n = units.len();
    let k = (fraction * n as f64).round() as usize;
    if k == 0 {
        return Err(ClusterError::InvalidFraction(fraction));
    }
    let sizes: Vec<usize> = (0..k).map(|i| n / k + usize::from(i < n % k)).collect();
    Ok(assign_in_chunks(units, &sizes, seed, ClusterSource::UniformK))
}
