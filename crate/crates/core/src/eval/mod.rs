//! Prediction metrics, stratified cross-validation and the experiment
//! protocols (horizon sweeps, cross-community transfer).

mod cv;
mod experiment;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cv::{kfold_cv, stratified_folds, CvReport};
pub use experiment::{
    build_training_set, context, evaluate_models, fit_method, fit_variants, horizon_labels,
    run_cross_dataset, run_horizon_experiment, run_transfer, variant_ranking, Corpus, EvalContext, EvalReport,
    ExperimentPlan, FittedModel, HorizonLabels, Method, TrainingSet, VariantModel, REPORT_HEADER,
};

/// Binary confusion counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn from_predictions(predicted: &[bool], actual: &[bool]) -> Self {
        assert_eq!(predicted.len(), actual.len(), "prediction/label length mismatch");
        let mut c = Confusion::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    /// Harmonic mean of precision and recall; 0 when both are 0.
    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn score(&self, metric: Metric) -> f64 {
        match metric {
            Metric::F1 => self.f1(),
            Metric::Accuracy => self.accuracy(),
            Metric::Precision => self.precision(),
            Metric::Recall => self.recall(),
        }
    }
}

impl std::ops::Add for Confusion {
    type Output = Confusion;

    fn add(self, o: Confusion) -> Confusion {
        Confusion { tp: self.tp + o.tp, fp: self.fp + o.fp, fn_: self.fn_ + o.fn_, tn: self.tn + o.tn }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    F1,
    Accuracy,
    Precision,
    Recall,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::F1 => "f1",
            Metric::Accuracy => "accuracy",
            Metric::Precision => "precision",
            Metric::Recall => "recall",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(Metric::F1),
            "accuracy" => Ok(Metric::Accuracy),
            "precision" => Ok(Metric::Precision),
            "recall" => Ok(Metric::Recall),
            _ => Err(Error::invalid(format!("unknown metric `{s}`"))),
        }
    }
}

/// The four prediction measures of one confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub f1: f64,
    /// Set when a denominator was zero and the affected value was reported as 0.
    pub degenerate: bool,
}

/// Precision, recall, accuracy and F1 of `c`.
pub fn metrics(c: &Confusion) -> Result<Scores> {
    if c.total() == 0 {
        return Err(Error::invalid("confusion matrix is empty"));
    }
    let degenerate = c.tp + c.fp == 0 || c.tp + c.fn_ == 0 || c.tp == 0;
    Ok(Scores {
        precision: c.precision(),
        recall: c.recall(),
        accuracy: c.accuracy(),
        f1: c.f1(),
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_arithmetic() {
        let s = metrics(&Confusion { tp: 2, fp: 1, fn_: 1, tn: 6 }).unwrap();
        assert_eq!((s.precision, s.recall, s.accuracy), (2.0 / 3.0, 2.0 / 3.0, 0.8));
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert!(!s.degenerate);
    }

    #[test]
    fn perfect_and_degenerate() {
        let s = metrics(&Confusion { tp: 3, fp: 0, fn_: 0, tn: 4 }).unwrap();
        assert_eq!((s.precision, s.recall, s.accuracy, s.f1), (1.0, 1.0, 1.0, 1.0));
        let s = metrics(&Confusion { tp: 0, fp: 2, fn_: 3, tn: 1 }).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        assert!(s.degenerate);
        assert!(metrics(&Confusion::default()).is_err());
    }

    #[test]
    fn from_predictions_counts() {
        let c = Confusion::from_predictions(&[true, true, false, false], &[true, false, true, false]);
        assert_eq!(c, Confusion { tp: 1, fp: 1, fn_: 1, tn: 1 });
        assert_eq!("F1".parse::<Metric>().unwrap(), Metric::F1);
    }
}
