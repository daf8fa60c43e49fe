use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, FeatureRow};

/// Per-column mean and population standard deviation of the training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub columns: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn fit_standardizer(m: &FeatureMatrix) -> Result<StandardizationParams> {
    if m.is_empty() {
        return Err(Error::invalid("cannot standardize an empty matrix"));
    }
    let columns = m.columns();
    let x = m.values();
    let n = x.len() as f64;
    let d = columns.len();
    let mut mean = vec![0.0; d];
    for row in &x {
        for (acc, v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= n);
    let mut var = vec![0.0; d];
    for row in &x {
        for j in 0..d {
            let dv = row[j] - mean[j];
            var[j] += dv * dv;
        }
    }
    let std = var.into_iter().map(|v| (v / n).sqrt()).collect();
    Ok(StandardizationParams { columns, mean, std })
}

impl StandardizationParams {
    /// Standardizes one row given in `self.columns` order. Zero-variance
    /// columns map to 0.
    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }

    pub fn transform_values(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter().map(|r| self.transform_row(r)).collect()
    }

    /// Applies the stored parameters to a matrix with the same columns.
    pub fn apply(&self, m: &FeatureMatrix) -> Result<FeatureMatrix> {
        super::check_columns(&self.columns, &m.columns())?;
        let rows = m
            .rows
            .iter()
            .map(|r| {
                let z = self.transform_row(&r.values());
                let mut out: FeatureRow = r.clone();
                for (name, v) in self.columns.iter().zip(z) {
                    if let Some(slot) = out.network.get_mut(name) {
                        *slot = v;
                    } else if let Some(slot) = out.exogenous.get_mut(name) {
                        *slot = v;
                    }
                }
                out
            })
            .collect();
        Ok(FeatureMatrix { rows, provenance: m.provenance.clone() })
    }
}
