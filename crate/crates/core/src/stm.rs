//! Single-attribute threshold model.
//!
//! Candidate thresholds are the observed attribute values. For each
//! candidate both orientations are scored on the training labels and the best
//! (score, smaller threshold, `LeaveIfBelow` first) wins.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{Confusion, Metric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Predict leave iff `value < lambda`.
    LeaveIfBelow,
    /// Predict leave iff `value >= lambda`.
    LeaveIfAtOrAbove,
}

impl Orientation {
    pub fn predicts_leave(self, value: f64, lambda: f64) -> bool {
        match self {
            Orientation::LeaveIfBelow => value < lambda,
            Orientation::LeaveIfAtOrAbove => value >= lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StmModel {
    pub attribute: String,
    pub lambda: f64,
    pub orientation: Orientation,
    pub metric: Metric,
    pub training_score: f64,
    /// The threshold sits at the smallest observed value (or the training
    /// labels were single-class), so one side of the split is empty.
    pub degenerate: bool,
}

/// One scored `(lambda, orientation)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub lambda: f64,
    pub orientation: Orientation,
    pub score: f64,
}

fn preference(a: &Candidate, b: &Candidate) -> Ordering {
    // Greater is better.
    a.score
        .total_cmp(&b.score)
        .then_with(|| b.lambda.total_cmp(&a.lambda))
        .then_with(|| match (a.orientation, b.orientation) {
            (x, y) if x == y => Ordering::Equal,
            (Orientation::LeaveIfBelow, _) => Ordering::Greater,
            _ => Ordering::Less,
        })
}

/// Argmax over scored candidates with the deterministic tie-break.
pub fn select_best<I: IntoIterator<Item = Candidate>>(candidates: I) -> Option<Candidate> {
    candidates.into_iter().fold(None, |best, c| match best {
        Some(b) if preference(&c, &b) != Ordering::Greater => Some(b),
        _ => Some(c),
    })
}

/// Scores every candidate threshold in one sorted sweep.
pub fn scan(values: &[f64], labels: &[bool], metric: Metric) -> Result<Vec<Candidate>> {
    check_inputs(values, labels)?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;

    let mut out = Vec::new();
    // counts of true/false labels strictly below the current candidate
    let (mut pos_below, mut neg_below) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let lambda = values[order[i]];
        let below = Confusion {
            tp: pos_below,
            fp: neg_below,
            fn_: positives - pos_below,
            tn: negatives - neg_below,
        };
        let above = Confusion {
            tp: positives - pos_below,
            fp: negatives - neg_below,
            fn_: pos_below,
            tn: neg_below,
        };
        out.push(Candidate { lambda, orientation: Orientation::LeaveIfBelow, score: below.score(metric) });
        out.push(Candidate { lambda, orientation: Orientation::LeaveIfAtOrAbove, score: above.score(metric) });
        while i < order.len() && values[order[i]] == lambda {
            if labels[order[i]] {
                pos_below += 1;
            } else {
                neg_below += 1;
            }
            i += 1;
        }
    }
    Ok(out)
}

fn check_inputs(values: &[f64], labels: &[bool]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid("threshold model needs at least one value"));
    }
    if values.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} values but {} labels",
            values.len(),
            labels.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite attribute value {v}")));
    }
    Ok(())
}

/// Fits the threshold on one attribute, maximizing `metric` on `labels`.
pub fn fit(attribute: &str, values: &[f64], labels: &[bool], metric: Metric) -> Result<StmModel> {
    let candidates = scan(values, labels, metric)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let single_class = labels.iter().all(|&l| l == labels[0]);
    let best = if single_class {
        log::warn!("`{attribute}`: training labels are single-class; threshold pinned to the minimum");
        select_best(candidates.into_iter().filter(|c| c.lambda == min))
    } else {
        select_best(candidates)
    }
    .expect("non-empty input yields candidates");
    let degenerate = single_class || best.lambda == min;
    if degenerate {
        log::warn!("`{attribute}`: threshold {} equals the smallest observed value", best.lambda);
    }
    Ok(StmModel {
        attribute: attribute.to_owned(),
        lambda: best.lambda,
        orientation: best.orientation,
        metric,
        training_score: best.score,
        degenerate,
    })
}

pub fn predict(model: &StmModel, values: &[f64]) -> Vec<bool> {
    values.iter().map(|&v| model.orientation.predicts_leave(v, model.lambda)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryEvaluation {
    pub score: f64,
    /// `true` when the attribute being set predicts leaving.
    pub set_means_leave: bool,
}

/// Scores a boolean attribute used directly as the prediction, trying both
/// polarities. Ties keep the direct polarity.
pub fn evaluate_binary_attribute(values: &[bool], labels: &[bool], metric: Metric) -> Result<BinaryEvaluation> {
    if values.is_empty() {
        return Err(Error::invalid("binary attribute evaluation needs at least one value"));
    }
    if values.len() != labels.len() {
        return Err(Error::invalid("values and labels differ in length"));
    }
    let direct = Confusion::from_predictions(values, labels).score(metric);
    let flipped: Vec<bool> = values.iter().map(|v| !v).collect();
    let inverse = Confusion::from_predictions(&flipped, labels).score(metric);
    Ok(if inverse > direct {
        BinaryEvaluation { score: inverse, set_means_leave: false }
    } else {
        BinaryEvaluation { score: direct, set_means_leave: true }
    })
}

/// Threshold-free model for a 0/1 attribute, expressed as a threshold at 1 so
/// that [`predict`] applies unchanged.
pub fn fit_binary(attribute: &str, values: &[f64], labels: &[bool], metric: Metric) -> Result<StmModel> {
    if let Some(v) = values.iter().find(|&&v| v != 0.0 && v != 1.0) {
        return Err(Error::invalid(format!("`{attribute}` is not binary (value {v})")));
    }
    let flags: Vec<bool> = values.iter().map(|&v| v == 1.0).collect();
    let eval = evaluate_binary_attribute(&flags, labels, metric)?;
    Ok(StmModel {
        attribute: attribute.to_owned(),
        lambda: 1.0,
        orientation: if eval.set_means_leave {
            Orientation::LeaveIfAtOrAbove
        } else {
            Orientation::LeaveIfBelow
        },
        metric,
        training_score: eval.score,
        degenerate: false,
    })
}
