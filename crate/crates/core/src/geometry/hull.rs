//! Convex hulls with radius-based outlier removal.

use std::collections::HashMap;

use serde::Serialize;

use super::{GeometryError, Point};

/// Outlier threshold `beta` and ball radius `radius`.
///
/// A point is removed when its closed `radius`-ball holds fewer than the
/// resolved threshold of other points. `beta` in (0, 1) is a fraction of
/// the point count; `beta >= 1` is an absolute count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HullParams {
    beta: f64,
    radius: f64,
}

impl HullParams {
    pub fn new(beta: f64, radius: f64) -> Result<Self, GeometryError> {
        if !(beta > 0.0 && beta.is_finite() && radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidHullParams { beta, radius });
        }
        Ok(Self { beta, radius })
    }

    /// No outlier removal: the plain convex hull.
    pub fn unsmoothed() -> Self {
        Self { beta: 0.0, radius: 1.0 }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_smoothing(&self) -> bool {
        self.beta > 0.0
    }

    /// Minimum number of other points a survivor needs within the radius.
    pub fn threshold(&self, points: usize) -> f64 {
        if self.beta < 1.0 {
            self.beta * points as f64
        } else {
            self.beta
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullMetrics {
    /// Hull corners in counter-clockwise order.
    pub vertices: Vec<Point>,
    pub volume: f64,
    pub removed_outliers: usize,
    /// Fewer than three hull corners: the volume is zero.
    pub degenerate: bool,
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Monotone-chain hull, counter-clockwise, without collinear corners.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Shoelace area, absolute value.
pub fn polygon_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    twice.abs() / 2.0
}

fn survivors(points: &[Point], params: &HullParams) -> Vec<Point> {
    if !params.is_smoothing() {
        return points.to_vec();
    }
    let need = params.threshold(points.len());
    let r = params.radius;
    let cell = |p: Point| ((p[0] / r).floor() as i64, (p[1] / r).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &p) in points.iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i);
    }
    let r2 = r * r;
    points
        .iter()
        .enumerate()
        .filter(|&(i, &p)| {
            let (cx, cy) = cell(p);
            let mut others = 0usize;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(bucket) = grid.get(&(cx + dx, cy + dy)) else {
                        continue;
                    };
                    for &j in bucket {
                        let q = points[j];
                        if j != i && (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) <= r2 {
                            others += 1;
                            if others as f64 >= need {
                                return true;
                            }
                        }
                    }
                }
            }
            (others as f64) >= need
        })
        .map(|(_, &p)| p)
        .collect()
}

/// Removes outliers, then returns the convex hull of what is left.
pub fn smooth_hull(points: &[Point], params: &HullParams) -> Result<HullMetrics, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyPoints);
    }
    let kept = survivors(points, params);
    if kept.is_empty() {
        return Err(GeometryError::AllPointsRemoved(points.len()));
    }
    let vertices = convex_hull(&kept);
    let degenerate = vertices.len() < 3;
    let volume = if degenerate { 0.0 } else { polygon_area(&vertices) };
    Ok(HullMetrics {
        vertices,
        volume,
        removed_outliers: points.len() - kept.len(),
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: [Point; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

    #[test]
    fn unit_square() {
        let m = smooth_hull(&SQUARE, &HullParams::new(0.1, 1.0).unwrap()).unwrap();
        assert_eq!(m.removed_outliers, 0);
        assert!((m.volume - 1.0).abs() < 1e-12);
        assert_eq!(m.vertices.len(), 4);
    }

    #[test]
    fn isolated_outlier_is_removed() {
        let mut pts = SQUARE.to_vec();
        pts.push([10.0, 10.0]);
        let m = smooth_hull(&pts, &HullParams::new(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(m.removed_outliers, 1);
        assert!((m.volume - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_area() {
        let m = smooth_hull(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &HullParams::unsmoothed()).unwrap();
        assert!((m.volume - 0.5).abs() < 1e-12);
    }

    #[test]
    fn closed_ball_counts_boundary() {
        // Neighbours at exactly the radius count.
        let m = smooth_hull(&SQUARE, &HullParams::new(2.0, 1.0).unwrap()).unwrap();
        assert_eq!(m.removed_outliers, 0);
        // The diagonal neighbour lies outside.
        assert!(matches!(
            smooth_hull(&SQUARE, &HullParams::new(3.0, 1.0).unwrap()),
            Err(GeometryError::AllPointsRemoved(4))
        ));
    }

    #[test]
    fn aggressive_beta_is_an_error() {
        assert!(matches!(
            smooth_hull(&SQUARE, &HullParams::new(5.0, 0.1).unwrap()),
            Err(GeometryError::AllPointsRemoved(4))
        ));
    }

    #[test]
    fn few_points_are_degenerate() {
        let m = smooth_hull(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], &HullParams::unsmoothed()).unwrap();
        assert!(m.degenerate);
        assert_eq!(m.volume, 0.0);
        assert!(smooth_hull(&[], &HullParams::unsmoothed()).is_err());
    }

    #[test]
    fn fractional_beta_scales_with_count() {
        let p = HullParams::new(0.3, 10.0).unwrap();
        assert!((p.threshold(10) - 3.0).abs() < 1e-12);
        assert_eq!(HullParams::new(4.0, 1.0).unwrap().threshold(100), 4.0);
        assert!(HullParams::new(0.0, 1.0).is_err());
        assert!(HullParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn hull_is_counter_clockwise() {
        let h = convex_hull(&[[0.0, 0.0], [2.0, 0.0], [1.0, 1.0], [2.0, 2.0], [0.0, 2.0], [1.0, 0.0]]);
        assert_eq!(h, vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]);
    }
}
