//! Distributional embeddings: positive PMI over a symmetric window,
//! reduced with a seeded randomized SVD.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;

use super::GeometryError;
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    units: Vec<String>,
    vectors: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    /// Builds a table; a repeated unit keeps its last vector.
    pub fn from_rows(dimension: usize, rows: Vec<(String, Vec<f64>)>) -> Result<Self, GeometryError> {
        if dimension < 2 {
            return Err(GeometryError::DimensionTooSmall(dimension));
        }
        let mut table = Self {
            dimension,
            units: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
        };
        for (line, (unit, v)) in rows.into_iter().enumerate() {
            if v.len() != dimension {
                return Err(GeometryError::DimensionMismatch {
                    line: line + 1,
                    expected: dimension,
                    found: v.len(),
                });
            }
            if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                return Err(GeometryError::MalformedFloat {
                    line: line + 1,
                    token: bad.to_string(),
                });
            }
            table.insert(unit, v);
        }
        Ok(table)
    }

    fn insert(&mut self, unit: String, v: Vec<f64>) {
        match self.index.get(&unit) {
            Some(&i) => {
                log::warn!("duplicate embedding for {unit:?}; keeping the last one");
                self.vectors[i] = v;
            }
            None => {
                self.index.insert(unit.clone(), self.units.len());
                self.units.push(unit);
                self.vectors.push(v);
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn get(&self, unit: &str) -> Option<&[f64]> {
        self.index.get(unit).map(|&i| self.vectors[i].as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.units
            .iter()
            .zip(&self.vectors)
            .map(|(u, v)| (u.as_str(), v.as_slice()))
    }

    pub fn cosine(&self, a: &str, b: &str) -> Option<f64> {
        Some(cosine(self.get(a)?, self.get(b)?))
    }

    /// Text format: `unit v1 … vd` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.iter() {
            out.push_str(u);
            for x in v {
                let _ = write!(out, " {x}");
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GeometryError> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

pub(crate) fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Parses the text vector format. A leading `count dim` header line is
/// skipped.
pub fn parse_embeddings(text: &str) -> Result<EmbeddingTable, GeometryError> {
    let mut rows = Vec::new();
    let mut dimension = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut fields = line.split_whitespace();
        let Some(unit) = fields.next() else { continue };
        let rest: Vec<&str> = fields.collect();
        if rows.is_empty()
            && dimension.is_none()
            && rest.len() == 1
            && unit.parse::<usize>().is_ok()
            && rest[0].parse::<usize>().is_ok()
        {
            continue;
        }
        let mut v = Vec::with_capacity(rest.len());
        for tok in rest {
            match tok.parse::<f64>() {
                Ok(x) if x.is_finite() => v.push(x),
                _ => {
                    return Err(GeometryError::MalformedFloat {
                        line: line_no,
                        token: tok.to_string(),
                    })
                }
            }
        }
        let d = *dimension.get_or_insert(v.len());
        if v.len() != d {
            return Err(GeometryError::DimensionMismatch {
                line: line_no,
                expected: d,
                found: v.len(),
            });
        }
        rows.push((unit.to_string(), v));
    }
    EmbeddingTable::from_rows(dimension.unwrap_or(0), rows)
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable, GeometryError> {
    parse_embeddings(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingParams {
    pub dimension: usize,
    pub window: usize,
    pub seed: u64,
    pub oversample: usize,
    pub power_iterations: usize,
}

impl EmbeddingParams {
    pub fn new(dimension: usize, window: usize, seed: u64) -> Self {
        Self {
            dimension,
            window,
            seed,
            oversample: 10,
            power_iterations: 4,
        }
    }
}

/// Sparse symmetric matrix, one sorted row of `(column, value)` per unit.
struct SparseRows(Vec<Vec<(usize, f64)>>);

impl SparseRows {
    fn mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.0.len(), x.ncols());
        for (i, row) in self.0.iter().enumerate() {
            for &(j, a) in row {
                for c in 0..x.ncols() {
                    out[(i, c)] += a * x[(j, c)];
                }
            }
        }
        out
    }

    #[cfg(test)]
    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.0.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.0.iter().enumerate() {
            for &(j, a) in row {
                m[(i, j)] = a;
            }
        }
        m
    }
}

fn ppmi_matrix<S: AsRef<str>>(corpus: &[Vec<S>], window: usize) -> (Vec<String>, SparseRows) {
    let units: Vec<String> = corpus
        .iter()
        .flatten()
        .map(|t| t.as_ref().to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: HashMap<&str, usize> = units.iter().enumerate().map(|(i, u)| (u.as_str(), i)).collect();
    let mut counts: Vec<HashMap<usize, f64>> = vec![HashMap::new(); units.len()];
    for sentence in corpus {
        let ids: Vec<usize> = sentence.iter().map(|t| index[t.as_ref()]).collect();
        for (p, &a) in ids.iter().enumerate() {
            let hi = (p + window + 1).min(ids.len());
            for &b in &ids[p + 1..hi] {
                *counts[a].entry(b).or_insert(0.0) += 1.0;
                *counts[b].entry(a).or_insert(0.0) += 1.0;
            }
        }
    }
    let marginal: Vec<f64> = counts.iter().map(|r| r.values().sum()).collect();
    let total: f64 = marginal.iter().sum();
    let rows = counts
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row: Vec<(usize, f64)> = row
                .into_iter()
                .filter_map(|(j, c)| {
                    let pmi = (c * total / (marginal[i] * marginal[j])).ln();
                    (pmi > 0.0).then_some((j, pmi))
                })
                .collect();
            row.sort_unstable_by_key(|&(j, _)| j);
            row
        })
        .collect();
    (units, SparseRows(rows))
}

fn orthonormal_basis(y: DMatrix<f64>) -> DMatrix<f64> {
    y.qr().q()
}

/// Truncated SVD of a symmetric matrix: returns `(U, σ, V)` with `rank`
/// columns.
fn randomized_svd(a: &SparseRows, rank: usize, params: &EmbeddingParams) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let n = a.0.len();
    let width = (rank + params.oversample).min(n);
    let mut rng = rng::seeded(params.seed);
    let omega = DMatrix::from_fn(n, width, |_, _| rng.gen_range(-1.0..1.0));
    let mut q = orthonormal_basis(a.mul(&omega));
    for _ in 0..params.power_iterations {
        q = orthonormal_basis(a.mul(&q));
        q = orthonormal_basis(a.mul(&q));
    }
    // A symmetric, so Qᵀ A = (A Q)ᵀ.
    let b = a.mul(&q).transpose();
    let svd = b.svd(true, true);
    let ub = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .total_cmp(&svd.singular_values[i])
            .then(i.cmp(&j))
    });
    order.truncate(rank);
    let u_full = &q * &ub;
    let mut u = DMatrix::zeros(n, order.len());
    let mut v = DMatrix::zeros(n, order.len());
    let mut sigma = Vec::with_capacity(order.len());
    for (c, &k) in order.iter().enumerate() {
        // Fix the sign so the largest-magnitude entry of each column is positive.
        let col = u_full.column(k);
        let pivot = col
            .iter()
            .copied()
            .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        u.set_column(c, &(col * sign));
        v.set_column(c, &(vt.row(k).transpose() * sign));
        sigma.push(svd.singular_values[k]);
    }
    (u, sigma, v)
}

/// Trains `d`-dimensional vectors for every distinct token of `corpus`.
///
/// Co-occurrences are counted within `window` tokens on either side,
/// inside sentences only. Vectors are rows of `U·√Σ` from the truncated
/// SVD of the positive PMI matrix.
pub fn train_embeddings<S: AsRef<str>>(
    corpus: &[Vec<S>],
    params: &EmbeddingParams,
) -> Result<EmbeddingTable, GeometryError> {
    if params.dimension < 2 {
        return Err(GeometryError::DimensionTooSmall(params.dimension));
    }
    let (units, ppmi) = ppmi_matrix(corpus, params.window);
    if units.is_empty() {
        return Err(GeometryError::EmptyCorpus);
    }
    if units.len() < params.dimension {
        return Err(GeometryError::RankDeficient {
            vocab: units.len(),
            dimension: params.dimension,
        });
    }
    let (u, sigma, _) = randomized_svd(&ppmi, params.dimension, params);
    let rows = units
        .into_iter()
        .enumerate()
        .map(|(i, unit)| {
            let v = (0..params.dimension).map(|c| u[(i, c)] * sigma[c].sqrt()).collect();
            (unit, v)
        })
        .collect();
    EmbeddingTable::from_rows(params.dimension, rows)
}
