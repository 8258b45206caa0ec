use rand::Rng;

use super::ClusterError;
use crate::rng;

/// Result of [`kmeans_fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel {
    pub centroids: Vec<Vec<f64>>,
    /// Cluster index for each input point.
    pub assignment: Vec<usize>,
    /// Within-cluster sum of squares after every update step.
    pub cost_history: Vec<f64>,
    pub iterations: usize,
}

impl KMeansModel {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn cost(&self) -> f64 {
        self.cost_history.last().copied().unwrap_or(0.0)
    }

    /// Point indices per cluster.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k()];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, c) in centroids.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

/// K-Means++ seeding: each further centre is drawn with probability
/// proportional to the squared distance to the closest centre so far.
fn seed_centroids<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.gen_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = points.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.gen_range(0..points.len())
        };
        let c = points[idx].clone();
        for (p, d) in points.iter().zip(d2.iter_mut()) {
            *d = d.min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn total_cost(points: &[Vec<f64>], centroids: &[Vec<f64>], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| sq_dist(p, &centroids[c]))
        .sum()
}

fn recompute_means(points: &[Vec<f64>], assignment: &[usize], k: usize, dim: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assignment) {
        counts[c] += 1;
        for (s, x) in sums[c].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (s, &n) in sums.iter_mut().zip(&counts) {
        if n > 0 {
            s.iter_mut().for_each(|v| *v /= n as f64);
        }
    }
    (sums, counts)
}

/// Single-point transfers (Hartigan's rule): move a point to another cluster
/// whenever that strictly lowers the total cost. Escapes the Lloyd fixed
/// points in which a point sits in a cluster that is not best for it once
/// the centre shift is accounted for. Returns the number of moves.
fn transfer_pass(
    points: &[Vec<f64>],
    centroids: &mut [Vec<f64>],
    counts: &mut [usize],
    assignment: &mut [usize],
) -> usize {
    let mut moves = 0;
    for (i, p) in points.iter().enumerate() {
        let from = assignment[i];
        let n_from = counts[from] as f64;
        if counts[from] < 2 {
            continue;
        }
        let removal_gain = n_from / (n_from - 1.0) * sq_dist(p, &centroids[from]);
        let mut best: Option<(usize, f64)> = None;
        for (to, c) in centroids.iter().enumerate() {
            if to == from {
                continue;
            }
            let n_to = counts[to] as f64;
            let added = n_to / (n_to + 1.0) * sq_dist(p, c);
            if best.is_none_or(|(_, b)| added < b) {
                best = Some((to, added));
            }
        }
        let Some((to, added)) = best else { continue };
        if added < removal_gain * (1.0 - 1e-12) {
            let n_to = counts[to] as f64;
            for (c, x) in centroids[from].iter_mut().zip(p) {
                *c = (*c * n_from - x) / (n_from - 1.0);
            }
            for (c, x) in centroids[to].iter_mut().zip(p) {
                *c = (*c * n_to + x) / (n_to + 1.0);
            }
            counts[from] -= 1;
            counts[to] += 1;
            assignment[i] = to;
            moves += 1;
        }
    }
    moves
}

/// Lloyd's algorithm from K-Means++ seeding.
///
/// Iterates until assignments are stable or `max_iter` rounds have run. A
/// cluster that empties is re-seeded with the point farthest from its
/// current centre. Once Lloyd is stable a transfer pass is tried; if it
/// moves anything, Lloyd resumes. The cost never increases.
pub fn kmeans_fit(points: &[Vec<f64>], k: usize, seed: u64, max_iter: usize) -> Result<KMeansModel, ClusterError> {
    if k == 0 || k > points.len() {
        return Err(ClusterError::TooFewPoints {
            k,
            points: points.len(),
        });
    }
    let dim = points[0].len();
    if let Some((index, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
        return Err(ClusterError::DimensionMismatch {
            index,
            expected: dim,
            found: p.len(),
        });
    }

    let mut rng = rng::seeded(seed);
    let mut centroids = seed_centroids(points, k, &mut rng);
    let mut assignment: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
    let mut cost_history = Vec::new();
    let mut iterations = 0;

    loop {
        let (means, mut counts) = recompute_means(points, &assignment, k, dim);
        centroids = means;
        // Re-seed empty clusters from the worst-served points.
        for empty in (0..k).filter(|&c| counts[c] == 0).collect::<Vec<_>>() {
            let far = (0..points.len())
                .filter(|&i| counts[assignment[i]] > 1)
                .max_by(|&a, &b| {
                    let da = sq_dist(&points[a], &centroids[assignment[a]]);
                    let db = sq_dist(&points[b], &centroids[assignment[b]]);
                    da.total_cmp(&db).then(b.cmp(&a))
                });
            if let Some(i) = far {
                counts[assignment[i]] -= 1;
                assignment[i] = empty;
                counts[empty] = 1;
                centroids[empty] = points[i].clone();
            }
        }
        let (means, mut counts) = recompute_means(points, &assignment, k, dim);
        centroids = means;
        cost_history.push(total_cost(points, &centroids, &assignment));
        iterations += 1;
        if iterations >= max_iter {
            break;
        }

        let mut changed = false;
        for (p, a) in points.iter().zip(assignment.iter_mut()) {
            let (best, best_d) = nearest(p, &centroids);
            // Only move on a strict improvement so ties cannot cycle.
            if best != *a && best_d < sq_dist(p, &centroids[*a]) {
                *a = best;
                changed = true;
            }
        }
        if !changed && transfer_pass(points, &mut centroids, &mut counts, &mut assignment) == 0 {
            break;
        }
    }

    Ok(KMeansModel {
        centroids,
        assignment,
        cost_history,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_two_partition_cost(points: &[Vec<f64>]) -> f64 {
        let n = points.len();
        let mut best = f64::INFINITY;
        for mask in 1..(1u32 << n) - 1 {
            let assignment: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
            let (means, _) = recompute_means(points, &assignment, 2, points[0].len());
            best = best.min(total_cost(points, &means, &assignment));
        }
        best
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 3.0]];
        let m = kmeans_fit(&pts, 1, 4, 50).unwrap();
        assert!((m.centroids[0][0] - 1.0).abs() < 1e-12);
        assert!((m.centroids[0][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k_equal_to_n_has_zero_cost() {
        let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 3.0], vec![5.0, 5.0]];
        let m = kmeans_fit(&pts, 4, 9, 50).unwrap();
        assert!(m.cost() < 1e-12);
        let mut a = m.assignment.clone();
        a.sort_unstable();
        assert_eq!(a, [0, 1, 2, 3]);
    }

    #[test]
    fn square_corners_reach_the_best_partition_for_every_seed() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let best = brute_force_two_partition_cost(&pts);
        assert!((best - 1.0).abs() < 1e-12);
        for seed in 0..64 {
            let m = kmeans_fit(&pts, 2, seed, 100).unwrap();
            assert!((m.cost() - best).abs() < 1e-9, "seed {seed}: {}", m.cost());
            assert_eq!(m.members().iter().map(Vec::len).collect::<Vec<_>>(), [2, 2]);
        }
    }

    #[test]
    fn cost_is_monotone() {
        let mut r = rng::seeded(1);
        let pts: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![r.gen::<f64>(), r.gen::<f64>(), r.gen::<f64>()])
            .collect();
        let m = kmeans_fit(&pts, 12, 3, 100).unwrap();
        for w in m.cost_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{:?}", m.cost_history);
        }
        // Centroids are the means of their members.
        for (k, members) in m.members().iter().enumerate() {
            for (d, c) in m.centroids[k].iter().enumerate() {
                let mean = members.iter().map(|&i| pts[i][d]).sum::<f64>() / members.len() as f64;
                assert!((mean - c).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn errors() {
        let pts = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            kmeans_fit(&pts, 3, 0, 10),
            Err(ClusterError::TooFewPoints { .. })
        ));
        assert!(kmeans_fit(&pts, 0, 0, 10).is_err());
        let ragged = vec![vec![0.0], vec![1.0, 2.0]];
        assert!(matches!(
            kmeans_fit(&ragged, 1, 0, 10),
            Err(ClusterError::DimensionMismatch { index: 1, .. })
        ));
    }
}
