//! Group-level measures: grouping, concentration factor, coverage curves
//! and hull-volume CDFs.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::{dist, smooth_hull, GeometryError, HullParams, Point};
use crate::rng;

/// Projected points grouped by code or cluster id, keys in sorted order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grouping {
    pub keys: Vec<String>,
    pub groups: Vec<Vec<Point>>,
    /// Encoded units that have no projection.
    pub missing: usize,
}

impl Grouping {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&[Point]> {
        self.keys
            .binary_search_by(|k| k.as_str().cmp(key))
            .ok()
            .map(|i| self.groups[i].as_slice())
    }
}

/// One group per distinct code, holding its members' projected points.
pub fn group_points<'a, I, K>(projected: &BTreeMap<String, Point>, encoding: I) -> Grouping
where
    I: IntoIterator<Item = (&'a str, K)>,
    K: AsRef<str>,
{
    let mut by_key: BTreeMap<String, Vec<Point>> = BTreeMap::new();
    let mut missing = 0;
    for (unit, key) in encoding {
        match projected.get(unit) {
            Some(&p) => by_key.entry(key.as_ref().to_string()).or_default().push(p),
            None => missing += 1,
        }
    }
    if missing > 0 {
        log::warn!("{missing} encoded units have no projection");
    }
    let (keys, groups) = by_key.into_iter().unzip();
    Grouping { keys, groups, missing }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaReport {
    pub schema: &'static str,
    pub gamma: f64,
    pub k: usize,
    pub centroids: Vec<Point>,
    pub sizes: Vec<usize>,
    pub between: f64,
    pub within: f64,
}

fn centroid(points: &[Point]) -> Point {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(x, y), p| (x + p[0], y + p[1]));
    [sx / n, sy / n]
}

/// Spread of group centroids around their mean, divided by the spread of
/// points around their own centroid. Large values mean tight, well
/// separated groups.
pub fn concentration_factor(groups: &[Vec<Point>]) -> Result<GammaReport, GeometryError> {
    if groups.is_empty() {
        return Err(GeometryError::NoGroups);
    }
    if let Some(i) = groups.iter().position(Vec::is_empty) {
        return Err(GeometryError::EmptyGroup(i));
    }
    let centroids: Vec<Point> = groups.iter().map(|g| centroid(g)).collect();
    let grand = centroid(&centroids);
    let between: f64 = centroids.iter().map(|&c| dist(c, grand)).sum();
    let within: f64 = groups
        .iter()
        .zip(&centroids)
        .map(|(g, &c)| g.iter().map(|&p| dist(p, c)).sum::<f64>())
        .sum();
    if within == 0.0 {
        return Err(GeometryError::ZeroDispersion);
    }
    Ok(GammaReport {
        schema: "phonetic-mt/gamma/v1",
        gamma: between / within,
        k: groups.len(),
        centroids,
        sizes: groups.iter().map(Vec::len).collect(),
        between,
        within,
    })
}

/// Hull volume of the union of the first `t` groups, for every `t`, with
/// the group order shuffled by `order_seed`.
pub fn coverage_curve(
    groups: &[Vec<Point>],
    order_seed: u64,
    params: &HullParams,
) -> Result<Vec<(usize, f64)>, GeometryError> {
    if groups.is_empty() {
        return Err(GeometryError::NoGroups);
    }
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.shuffle(&mut rng::seeded(order_seed));
    let mut union: Vec<Point> = Vec::new();
    let mut curve = Vec::with_capacity(groups.len());
    for (step, &g) in order.iter().enumerate() {
        union.extend_from_slice(&groups[g]);
        let volume = if union.is_empty() {
            0.0
        } else if params.is_smoothing() {
            smooth_hull(&union, params)?.volume
        } else {
            // Without smoothing only the previous corners can stay corners.
            let m = smooth_hull(&union, params)?;
            union = m.vertices;
            m.volume
        };
        curve.push((step + 1, volume));
    }
    Ok(curve)
}

/// Coverage curve averaged over `orders` random group orders. Order `j`
/// uses the `j`-th seed drawn from `seed`.
pub fn mean_coverage_curve(
    groups: &[Vec<Point>],
    seed: u64,
    orders: usize,
    params: &HullParams,
) -> Result<Vec<(usize, f64)>, GeometryError> {
    let mut seeds = rng::substream(seed, 1);
    let mut mean: Vec<(usize, f64)> = (1..=groups.len()).map(|t| (t, 0.0)).collect();
    for _ in 0..orders {
        let curve = coverage_curve(groups, seeds.gen(), params)?;
        for (m, (_, v)) in mean.iter_mut().zip(curve) {
            m.1 += v / orders as f64;
        }
    }
    Ok(mean)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeCdf {
    /// `(volume, k/n)`, volumes ascending.
    pub points: Vec<(f64, f64)>,
    /// Groups whose points were all removed as outliers (volume 0).
    pub emptied_groups: usize,
}

impl VolumeCdf {
    pub fn volumes(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    /// Empirical quantile at `q` in (0, 1]: the smallest volume whose CDF
    /// value reaches `q`.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.points.len();
        let k = ((q * n as f64).ceil() as usize).clamp(1, n);
        self.points[k - 1].0
    }
}

/// Per-group smoothed hull volumes as an empirical CDF.
pub fn volume_cdf(groups: &[Vec<Point>], params: &HullParams) -> Result<VolumeCdf, GeometryError> {
    if groups.is_empty() {
        return Err(GeometryError::NoGroups);
    }
    let mut emptied = 0;
    let mut volumes: Vec<f64> = groups
        .iter()
        .map(|g| {
            if g.len() < 3 {
                return 0.0;
            }
            match smooth_hull(g, params) {
                Ok(m) => m.volume,
                Err(_) => {
                    emptied += 1;
                    0.0
                }
            }
        })
        .collect();
    if emptied > 0 {
        log::warn!("smoothing removed every point of {emptied} groups");
    }
    volumes.sort_by(f64::total_cmp);
    let n = volumes.len() as f64;
    let points = volumes
        .into_iter()
        .enumerate()
        .map(|(k, v)| (v, (k + 1) as f64 / n))
        .collect();
    Ok(VolumeCdf {
        points,
        emptied_groups: emptied,
    })
}
