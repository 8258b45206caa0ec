//! Nearest-neighbour density of a few random groups over the smoothed hull
//! of all points.
//!
//! Samples are convex combinations of the hull corners with uniform random
//! weights, normalized to sum to one. For each sample the distance to its
//! i-th nearest reference point is accumulated. Sampling runs in batches
//! until every running mean moves by less than the threshold, or the
//! budget is spent.

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use super::{dist, smooth_hull, GeometryError, HullParams, Point};
use crate::rng::{self, SeededRng};

const BATCH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityParams {
    pub hull: HullParams,
    /// Sample budget.
    pub budget: usize,
    pub threshold: f64,
    pub seed: u64,
    pub groups_drawn: usize,
}

impl DensityParams {
    pub fn new(hull: HullParams, seed: u64) -> Self {
        Self {
            hull,
            budget: 100_000,
            threshold: 0.001,
            seed,
            groups_drawn: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub neighbor: usize,
    pub max_density: f64,
    pub sum_density: f64,
    pub mean_density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub schema: &'static str,
    pub rows: Vec<DensityRow>,
    pub converge_threshold: f64,
    pub samples_used: usize,
    pub converged: bool,
    pub chosen_groups: Vec<usize>,
    pub reference_points: usize,
    pub hull_corners: usize,
}

impl DensityReport {
    pub fn row(&self, neighbor: usize) -> Option<&DensityRow> {
        self.rows.iter().find(|r| r.neighbor == neighbor)
    }
}

/// `count` points inside the polygon spanned by `corners`.
pub fn sample_hull_interior(corners: &[Point], count: usize, rng: &mut SeededRng) -> Vec<Point> {
    (0..count)
        .map(|_| {
            let q: Vec<f64> = corners.iter().map(|_| rng.gen::<f64>()).collect();
            let total: f64 = q.iter().sum();
            let mut p = [0.0, 0.0];
            for (c, w) in corners.iter().zip(&q) {
                p[0] += c[0] * w / total;
                p[1] += c[1] * w / total;
            }
            p
        })
        .collect()
}

/// Distances to the 1st..=k-th nearest reference points, ascending.
fn nearest_distances(x: Point, reference: &[Point], k: usize) -> Vec<f64> {
    let mut best: Vec<f64> = Vec::with_capacity(k + 1);
    for &r in reference {
        let d = dist(x, r);
        if best.len() < k || d < best[k - 1] {
            let at = best.partition_point(|&b| b <= d);
            best.insert(at, d);
            best.truncate(k);
        }
    }
    best
}

/// Density rows for every neighbour index in `neighbors`, computed over one
/// shared sample stream.
pub fn density_profile(
    all_points: &[Point],
    groups: &[Vec<Point>],
    neighbors: &[usize],
    params: &DensityParams,
) -> Result<DensityReport, GeometryError> {
    if neighbors.is_empty() || neighbors.contains(&0) {
        return Err(GeometryError::InvalidNeighborIndex);
    }
    if groups.len() < params.groups_drawn {
        return Err(GeometryError::InsufficientGroups {
            needed: params.groups_drawn,
            found: groups.len(),
        });
    }
    let mut chosen = index::sample(&mut rng::substream(params.seed, 0), groups.len(), params.groups_drawn).into_vec();
    chosen.sort_unstable();
    let reference: Vec<Point> = chosen.iter().flat_map(|&g| groups[g].iter().copied()).collect();
    let k = *neighbors.iter().max().expect("non-empty");
    if reference.len() < k {
        return Err(GeometryError::InsufficientNeighbors {
            index: k,
            available: reference.len(),
        });
    }
    let hull = smooth_hull(all_points, &params.hull)?;
    if hull.degenerate {
        return Err(GeometryError::DegenerateHull(hull.vertices.len()));
    }
    let corners = hull.vertices;

    let mut sampler = rng::substream(params.seed, 1);
    let mut max = vec![0.0f64; neighbors.len()];
    let mut sum = vec![0.0f64; neighbors.len()];
    let mut used = 0usize;
    let mut previous: Option<Vec<f64>> = None;
    let mut converged = false;
    while used < params.budget {
        let batch = BATCH.min(params.budget - used);
        for x in sample_hull_interior(&corners, batch, &mut sampler) {
            let near = nearest_distances(x, &reference, k);
            for (slot, &i) in neighbors.iter().enumerate() {
                let d = near[i - 1];
                max[slot] = max[slot].max(d);
                sum[slot] += d;
            }
        }
        used += batch;
        let means: Vec<f64> = sum.iter().map(|s| s / used as f64).collect();
        if let Some(prev) = &previous {
            if prev.iter().zip(&means).all(|(a, b)| (a - b).abs() < params.threshold) {
                converged = true;
                break;
            }
        }
        previous = Some(means);
    }
    let rows = neighbors
        .iter()
        .enumerate()
        .map(|(slot, &i)| DensityRow {
            neighbor: i,
            max_density: max[slot],
            sum_density: sum[slot],
            mean_density: if used == 0 { 0.0 } else { sum[slot] / used as f64 },
        })
        .collect();
    Ok(DensityReport {
        schema: "phonetic-mt/density/v1",
        rows,
        converge_threshold: params.threshold,
        samples_used: used,
        converged,
        chosen_groups: chosen,
        reference_points: reference.len(),
        hull_corners: corners.len(),
    })
}

/// Density for a single neighbour index.
pub fn density_measure(
    all_points: &[Point],
    groups: &[Vec<Point>],
    neighbor: usize,
    params: &DensityParams,
) -> Result<DensityReport, GeometryError> {
    density_profile(all_points, groups, &[neighbor], params)
}
