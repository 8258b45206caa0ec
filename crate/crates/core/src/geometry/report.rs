//! JSON and CSV renderings of the geometry measures. Every JSON document
//! carries a `schema` field.

use std::fmt::Write as _;

use serde::Serialize;

use super::{DensityReport, GammaReport, VolumeCdf};

pub trait Report: Serialize {
    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    fn to_csv(&self) -> String;
}

impl Report for GammaReport {
    fn to_csv(&self) -> String {
        let mut out = String::from("group,size,centroid_x,centroid_y\n");
        for (i, (c, n)) in self.centroids.iter().zip(&self.sizes).enumerate() {
            let _ = writeln!(out, "{i},{n},{},{}", c[0], c[1]);
        }
        let _ = writeln!(out, "gamma,{},{},", self.k, self.gamma);
        out
    }
}

impl Report for DensityReport {
    fn to_csv(&self) -> String {
        let mut out = String::from("neighbor,max,sum,mean,samples\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.neighbor, r.max_density, r.sum_density, r.mean_density, self.samples_used
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfReport {
    pub schema: &'static str,
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub emptied_groups: usize,
}

impl CdfReport {
    pub fn new(label: impl Into<String>, cdf: &VolumeCdf) -> Self {
        Self {
            schema: "phonetic-mt/volume-cdf/v1",
            label: label.into(),
            points: cdf.points.clone(),
            emptied_groups: cdf.emptied_groups,
        }
    }
}

impl Report for CdfReport {
    fn to_csv(&self) -> String {
        let mut out = String::from("volume,fraction\n");
        for (v, f) in &self.points {
            let _ = writeln!(out, "{v},{f}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub schema: &'static str,
    pub label: String,
    pub order_seed: u64,
    pub total_volume: f64,
    pub curve: Vec<(usize, f64)>,
}

impl CoverageReport {
    pub fn new(label: impl Into<String>, order_seed: u64, total_volume: f64, curve: Vec<(usize, f64)>) -> Self {
        Self {
            schema: "phonetic-mt/coverage/v1",
            label: label.into(),
            order_seed,
            total_volume,
            curve,
        }
    }
}

impl Report for CoverageReport {
    fn to_csv(&self) -> String {
        let mut out = String::from("step,volume,fraction_of_total\n");
        for (t, v) in &self.curve {
            let frac = if self.total_volume > 0.0 {
                v / self.total_volume
            } else {
                0.0
            };
            let _ = writeln!(out, "{t},{v},{frac}");
        }
        out
    }
}
