//! Projection of an embedding table onto its top two principal directions.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::{EmbeddingTable, GeometryError, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct Projection2D {
    pub mean: Vec<f64>,
    pub components: [Vec<f64>; 2],
}

impl Projection2D {
    pub fn project(&self, v: &[f64]) -> Point {
        let mut out = [0.0; 2];
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = v.iter().zip(&self.mean).zip(c).map(|((x, m), w)| (x - m) * w).sum();
        }
        out
    }
}

/// Mean-centred PCA via SVD. Returns the projection and every unit's
/// coordinates.
pub fn pca_project(table: &EmbeddingTable) -> Result<(Projection2D, BTreeMap<String, Point>), GeometryError> {
    let n = table.len();
    if n < 3 {
        return Err(GeometryError::TooFewUnits { needed: 3, found: n });
    }
    let d = table.dimension();
    let mut mean = vec![0.0; d];
    for (_, v) in table.iter() {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x / n as f64;
        }
    }
    let rows: Vec<&[f64]> = table.iter().map(|(_, v)| v).collect();
    let x = DMatrix::from_fn(n, d, |i, j| rows[i][j] - mean[j]);
    let scale = x.abs().max();
    let svd = x.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let s = &svd.singular_values;
    if scale == 0.0 || s.max() <= scale * 1e-12 {
        return Err(GeometryError::DegenerateData);
    }
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
    let component = |k: usize| -> Vec<f64> {
        let row: Vec<f64> = vt.row(k).iter().copied().collect();
        let pivot = row
            .iter()
            .copied()
            .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        row.into_iter().map(|x| x * sign).collect()
    };
    let projection = Projection2D {
        mean,
        components: [component(order[0]), component(order[1])],
    };
    let coords = table
        .iter()
        .map(|(u, v)| (u.to_string(), projection.project(v)))
        .collect();
    Ok((projection, coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist;
    use rand::Rng;

    fn table(rows: &[(&str, Vec<f64>)]) -> EmbeddingTable {
        let d = rows[0].1.len();
        EmbeddingTable::from_rows(d, rows.iter().map(|(u, v)| (u.to_string(), v.clone())).collect()).unwrap()
    }

    fn variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
        let n = values.clone().count() as f64;
        let m = values.clone().sum::<f64>() / n;
        values.map(|x| (x - m).powi(2)).sum::<f64>() / n
    }

    #[test]
    fn planar_points_are_recovered_isometrically() {
        let pts = [[0.0, 0.0], [3.0, 1.0], [1.0, 4.0], [-2.0, 2.5], [5.0, -1.0]];
        let rows: Vec<_> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("u{i}"), vec![p[0], 0.0, p[1], 0.0, 0.0]))
            .collect();
        let rows: Vec<(&str, Vec<f64>)> = rows.iter().map(|(u, v)| (u.as_str(), v.clone())).collect();
        let (proj, coords) = pca_project(&table(&rows)).unwrap();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let a = coords[&format!("u{i}")];
                let b = coords[&format!("u{j}")];
                assert!((dist(a, b) - dist(pts[i], pts[j])).abs() < 1e-9);
            }
        }
        let [c0, c1] = &proj.components;
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        assert!((dot(c0, c0) - 1.0).abs() < 1e-9);
        assert!((dot(c1, c1) - 1.0).abs() < 1e-9);
        assert!(dot(c0, c1).abs() < 1e-9);
        let origin = proj.project(&proj.mean);
        assert!(origin[0].abs() < 1e-12 && origin[1].abs() < 1e-12);
    }

    #[test]
    fn collinear_points_have_no_second_variance() {
        let rows: Vec<(&str, Vec<f64>)> = vec![
            ("a", vec![0.0, 0.0, 0.0]),
            ("b", vec![1.0, 2.0, 3.0]),
            ("c", vec![2.0, 4.0, 6.0]),
            ("d", vec![-1.0, -2.0, -3.0]),
        ];
        let (_, coords) = pca_project(&table(&rows)).unwrap();
        assert!(variance(coords.values().map(|p| p[1])) < 1e-18);
        assert!(variance(coords.values().map(|p| p[0])) > 1.0);
    }

    #[test]
    fn first_component_beats_every_axis() {
        let mut rng = crate::rng::seeded(5);
        for _ in 0..20 {
            let rows: Vec<(String, Vec<f64>)> = (0..5)
                .map(|i| (format!("u{i}"), (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect()))
                .collect();
            let t = EmbeddingTable::from_rows(4, rows.clone()).unwrap();
            let (_, coords) = pca_project(&t).unwrap();
            let pc1 = variance(coords.values().map(|p| p[0]));
            let pc2 = variance(coords.values().map(|p| p[1]));
            assert!(pc1 >= pc2 - 1e-12);
            for axis in 0..4 {
                let v = variance(rows.iter().map(|(_, r)| r[axis]));
                assert!(pc1 >= v - 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_inputs() {
        let same = vec![("a", vec![1.0, 1.0]), ("b", vec![1.0, 1.0]), ("c", vec![1.0, 1.0])];
        assert!(matches!(pca_project(&table(&same)), Err(GeometryError::DegenerateData)));
        let two = vec![("a", vec![1.0, 1.0]), ("b", vec![2.0, 1.0])];
        assert!(matches!(
            pca_project(&table(&two)),
            Err(GeometryError::TooFewUnits { .. })
        ));
    }
}
