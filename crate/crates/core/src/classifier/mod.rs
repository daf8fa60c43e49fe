//! Supervised leave classifiers: L2-regularized logistic regression, a
//! linear SVM and a random forest, all trained on standardized features and
//! sharing one probability-plus-threshold prediction contract.

mod forest;
mod logreg;
mod standardize;
mod svm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

pub use forest::{Forest, ForestConfig, Tree, TreeNode};
pub use logreg::{loss_and_gradient as logistic_loss_and_gradient, sigmoid, LogRegConfig};
pub use standardize::{fit_standardizer, StandardizationParams};
pub use svm::{objective as hinge_objective, SvmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Logreg,
    LinearSvm,
    RandomForest,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Logreg => "logreg",
            ClassifierKind::LinearSvm => "svm",
            ClassifierKind::RandomForest => "forest",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logreg" => Ok(ClassifierKind::Logreg),
            "svm" | "linear_svm" => Ok(ClassifierKind::LinearSvm),
            "forest" | "random_forest" => Ok(ClassifierKind::RandomForest),
            _ => Err(Error::invalid(format!("unknown classifier `{s}` (logreg, svm, forest)"))),
        }
    }
}

/// Hyperparameters for all three trainers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub logreg: LogRegConfig,
    pub svm: SvmConfig,
    pub forest: ForestConfig,
    /// Probability at or above which a row is predicted to leave.
    pub decision_threshold: Option<f64>,
}

impl ClassifierConfig {
    /// Same hyperparameters with every trainer seeded from `seed`.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.logreg.seed = seed;
        self.svm.seed = seed;
        self.forest.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelParameters {
    Linear { weights: Vec<f64>, bias: f64 },
    Forest(Forest),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainingConfig {
    Logreg(LogRegConfig),
    LinearSvm(SvmConfig),
    RandomForest(ForestConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ClassifierKind,
    /// Training columns, in matrix order.
    pub columns: Vec<String>,
    pub standardization: StandardizationParams,
    pub decision_threshold: f64,
    pub parameters: ModelParameters,
    pub training_config: TrainingConfig,
}

/// Feature names with their importance weights, most important first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRanking {
    pub entries: Vec<(String, f64)>,
}

impl ImportanceRanking {
    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["feature", "weight"])?;
        for (name, weight) in &self.entries {
            w.write_record([name.clone(), weight.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<importance>", e))?;
        Ok(())
    }
}

pub(crate) fn check_columns(expected: &[String], found: &[String]) -> Result<()> {
    if expected == found {
        return Ok(());
    }
    let missing: Vec<&str> = expected.iter().filter(|c| !found.contains(c)).map(String::as_str).collect();
    let extra: Vec<&str> = found.iter().filter(|c| !expected.contains(c)).map(String::as_str).collect();
    let mut msg = Vec::new();
    if !missing.is_empty() {
        msg.push(format!("missing {}", missing.join(", ")));
    }
    if !extra.is_empty() {
        msg.push(format!("unexpected {}", extra.join(", ")));
    }
    if msg.is_empty() {
        msg.push(format!("order differs: expected {}", expected.join(", ")));
    }
    Err(Error::ColumnMismatch(msg.join("; ")))
}

fn prepare(m: &FeatureMatrix) -> Result<(StandardizationParams, Vec<Vec<f64>>, Vec<bool>)> {
    let y = m.labels();
    if y.iter().all(|&l| l) || y.iter().all(|&l| !l) {
        return Err(Error::SingleClass);
    }
    let params = fit_standardizer(m)?;
    let x = params.transform_values(&m.values());
    Ok((params, x, y))
}

fn finish(
    kind: ClassifierKind,
    m: &FeatureMatrix,
    standardization: StandardizationParams,
    parameters: ModelParameters,
    training_config: TrainingConfig,
    threshold: Option<f64>,
) -> TrainedModel {
    TrainedModel {
        kind,
        columns: m.columns(),
        standardization,
        decision_threshold: threshold.unwrap_or(0.5),
        parameters,
        training_config,
    }
}

pub fn train_logreg(m: &FeatureMatrix, cfg: &LogRegConfig) -> Result<TrainedModel> {
    let (params, x, y) = prepare(m)?;
    let (weights, bias, epochs) = logreg::train(&x, &y, cfg);
    log::debug!("logistic regression stopped after {epochs} epochs");
    Ok(finish(
        ClassifierKind::Logreg,
        m,
        params,
        ModelParameters::Linear { weights, bias },
        TrainingConfig::Logreg(cfg.clone()),
        None,
    ))
}

pub fn train_linear_svm(m: &FeatureMatrix, cfg: &SvmConfig) -> Result<TrainedModel> {
    let (params, x, y) = prepare(m)?;
    let (weights, bias) = svm::train(&x, &y, cfg);
    Ok(finish(
        ClassifierKind::LinearSvm,
        m,
        params,
        ModelParameters::Linear { weights, bias },
        TrainingConfig::LinearSvm(cfg.clone()),
        None,
    ))
}

pub fn train_random_forest(m: &FeatureMatrix, cfg: &ForestConfig) -> Result<TrainedModel> {
    let (params, x, y) = prepare(m)?;
    let forest = forest::train(&x, &y, cfg);
    Ok(finish(
        ClassifierKind::RandomForest,
        m,
        params,
        ModelParameters::Forest(forest),
        TrainingConfig::RandomForest(cfg.clone()),
        None,
    ))
}

/// Trains the classifier of `kind` with the matching section of `cfg`.
pub fn train(kind: ClassifierKind, m: &FeatureMatrix, cfg: &ClassifierConfig) -> Result<TrainedModel> {
    let mut model = match kind {
        ClassifierKind::Logreg => train_logreg(m, &cfg.logreg)?,
        ClassifierKind::LinearSvm => train_linear_svm(m, &cfg.svm)?,
        ClassifierKind::RandomForest => train_random_forest(m, &cfg.forest)?,
    };
    if let Some(t) = cfg.decision_threshold {
        model.decision_threshold = t;
    }
    Ok(model)
}

/// Importance weights of a forest's features, most important first (ties
/// keep column order).
pub fn feature_importance(model: &TrainedModel) -> Result<ImportanceRanking> {
    let ModelParameters::Forest(forest) = &model.parameters else {
        return Err(Error::invalid(format!("feature importance needs a random forest, got {}", model.kind)));
    };
    let mut entries: Vec<(String, f64)> = model.columns.iter().cloned().zip(forest.importances()).collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(ImportanceRanking { entries })
}

impl TrainedModel {
    pub fn probability_row(&self, raw: &[f64]) -> f64 {
        let z = self.standardization.transform_row(raw);
        match (&self.parameters, self.kind) {
            (ModelParameters::Linear { weights, bias }, ClassifierKind::LinearSvm) => {
                svm::probability(weights, *bias, &z)
            }
            (ModelParameters::Linear { weights, bias }, _) => logreg::probability(weights, *bias, &z),
            (ModelParameters::Forest(f), _) => f.probability(&z),
        }
    }

    /// `(probability, probability >= decision_threshold)` per row. The
    /// matrix must have exactly the training columns.
    pub fn predict(&self, m: &FeatureMatrix) -> Result<Vec<(f64, bool)>> {
        check_columns(&self.columns, &m.columns())?;
        Ok(m.rows
            .iter()
            .map(|r| {
                let p = self.probability_row(&r.values());
                (p, p >= self.decision_threshold)
            })
            .collect())
    }

    pub fn predict_labels(&self, m: &FeatureMatrix) -> Result<Vec<bool>> {
        Ok(self.predict(m)?.into_iter().map(|(_, l)| l).collect())
    }
}
