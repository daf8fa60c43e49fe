//! Train on `(G_t, G_t1)`, then score the initial nodes against later
//! snapshots `G_t'` taken a number of months after `t1`.

use std::fmt;
use std::str::FromStr;

use chrono::Months;
use serde::{Deserialize, Serialize};

use crate::classifier::{self, ClassifierConfig, ClassifierKind, ForestConfig, TrainedModel};
use crate::error::{Error, Result};
use crate::features::{self, FeatureMatrix, VariantKind, VariantSpec};
use crate::graph::MinCutOptions;
use crate::ingest::{
    build_snapshot, format_timestamp, label_leaves, AttributeTable, InteractionEvent, LeaveLabeling, Snapshot,
    Timestamp,
};
use crate::stm::{self, StmModel};

use super::{metrics, Confusion, Metric, Scores};

/// How leave labels are predicted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Method {
    /// Threshold model on one feature column.
    Stm { attribute: String },
    Classifier(ClassifierKind),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Stm { attribute } => write!(f, "stm:{attribute}"),
            Method::Classifier(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix("stm:") {
            Some(attr) if !attr.is_empty() => Ok(Method::Stm { attribute: attr.to_owned() }),
            Some(_) => Err(Error::invalid("`stm:` needs an attribute name, e.g. stm:degree")),
            None => s.parse().map(Method::Classifier),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A fitted predictor of either family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "model", rename_all = "snake_case")]
pub enum FittedModel {
    Stm(StmModel),
    Classifier(TrainedModel),
}

impl FittedModel {
    pub fn predict_labels(&self, m: &FeatureMatrix) -> Result<Vec<bool>> {
        match self {
            FittedModel::Stm(model) => Ok(stm::predict(model, &m.column(&model.attribute)?)),
            FittedModel::Classifier(model) => model.predict_labels(m),
        }
    }

    /// Probability-like score per row; threshold models report 0 or 1.
    pub fn predict(&self, m: &FeatureMatrix) -> Result<Vec<(f64, bool)>> {
        match self {
            FittedModel::Stm(_) => Ok(self
                .predict_labels(m)?
                .into_iter()
                .map(|l| (if l { 1.0 } else { 0.0 }, l))
                .collect()),
            FittedModel::Classifier(model) => model.predict(m),
        }
    }
}

/// Fits `method` on a labeled matrix.
pub fn fit_method(
    method: &Method,
    m: &FeatureMatrix,
    classifier: &ClassifierConfig,
    metric: Metric,
) -> Result<FittedModel> {
    match method {
        Method::Stm { attribute } => {
            let values = m.column(attribute)?;
            let labels = m.labels();
            let model = if attribute == "is_articulation" {
                stm::fit_binary(attribute, &values, &labels, metric)?
            } else {
                stm::fit(attribute, &values, &labels, metric)?
            };
            Ok(FittedModel::Stm(model))
        }
        Method::Classifier(kind) => Ok(FittedModel::Classifier(classifier::train(*kind, m, classifier)?)),
    }
}

fn default_window() -> u32 {
    45
}

fn default_variants() -> Vec<VariantKind> {
    vec![VariantKind::All]
}

fn default_metric() -> Metric {
    Metric::F1
}

fn default_seed() -> u64 {
    42
}

fn default_mincut_threshold() -> usize {
    2000
}

/// Window layout, horizons and method of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    /// Start of the `G_t` window.
    pub train_start: Timestamp,
    /// Start of the `G_t1` window whose absences label the training set.
    pub train_end: Timestamp,
    #[serde(default = "default_window")]
    pub window_days: u32,
    /// Month offsets after `train_end` at which `G_t'` windows start.
    #[serde(default)]
    pub horizons: Vec<u32>,
    #[serde(default = "default_variants")]
    pub variants: Vec<VariantKind>,
    pub method: Method,
    /// Metric maximized by the threshold model.
    #[serde(default = "default_metric")]
    pub metric: Metric,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub classifier: ClassifierConfig,
    #[serde(default)]
    pub mincut_sample_size: Option<usize>,
    #[serde(default = "default_mincut_threshold")]
    pub mincut_sample_threshold: usize,
}

impl ExperimentPlan {
    pub fn new(train_start: Timestamp, train_end: Timestamp, horizons: Vec<u32>, method: Method) -> Self {
        ExperimentPlan {
            train_start,
            train_end,
            window_days: default_window(),
            horizons,
            variants: default_variants(),
            method,
            metric: default_metric(),
            seed: default_seed(),
            classifier: ClassifierConfig::default(),
            mincut_sample_size: None,
            mincut_sample_threshold: default_mincut_threshold(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_days < 1 {
            return Err(Error::invalid("window_days must be at least 1"));
        }
        if self.train_end <= self.train_start {
            return Err(Error::invalid("train_end must be after train_start"));
        }
        if self.horizons.iter().any(|&h| h == 0) {
            return Err(Error::invalid("horizons must be at least one month after train_end"));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("horizons must be strictly increasing"));
        }
        if self.variants.is_empty() {
            return Err(Error::invalid("at least one variant is required"));
        }
        Ok(())
    }

    pub fn min_cut_options(&self) -> MinCutOptions {
        MinCutOptions {
            sample_threshold: self.mincut_sample_threshold,
            sample_size: self.mincut_sample_size,
            seed: self.seed,
        }
    }

    /// Classifier settings with every trainer seeded from the plan seed.
    pub fn classifier_config(&self) -> ClassifierConfig {
        self.classifier.clone().with_seed(self.seed)
    }

    /// Variants actually evaluated: the threshold model uses one column, so
    /// it always runs once on the full matrix.
    pub fn effective_variants(&self) -> Vec<VariantKind> {
        match self.method {
            Method::Stm { .. } => vec![VariantKind::All],
            Method::Classifier(_) => self.variants.clone(),
        }
    }

    pub fn horizon_start(&self, months: u32) -> Result<Timestamp> {
        self.train_end
            .checked_add_months(Months::new(months))
            .ok_or_else(|| Error::invalid(format!("horizon {months} months overflows the calendar")))
    }
}

/// An event log with its member attribute table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub events: Vec<InteractionEvent>,
    pub attributes: AttributeTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalContext {
    pub train_start: String,
    pub train_end: String,
    pub window_days: u32,
    /// Empty for cross-validation rows.
    pub horizon_months: Option<u32>,
    pub variant: String,
    pub method: String,
}

/// One report row. `confusion`/`scores` are `None` when the horizon snapshot
/// had no nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub context: EvalContext,
    pub empty: bool,
    pub confusion: Option<Confusion>,
    pub scores: Option<Scores>,
}

pub const REPORT_HEADER: [&str; 15] = [
    "train_start",
    "train_end",
    "window_days",
    "horizon_months",
    "variant",
    "method",
    "empty",
    "tp",
    "fp",
    "fn",
    "tn",
    "precision",
    "recall",
    "accuracy",
    "f1",
];

impl EvalReport {
    pub fn record(&self) -> Vec<String> {
        let c = &self.context;
        let mut rec = vec![
            c.train_start.clone(),
            c.train_end.clone(),
            c.window_days.to_string(),
            c.horizon_months.map(|h| h.to_string()).unwrap_or_default(),
            c.variant.clone(),
            c.method.clone(),
            self.empty.to_string(),
        ];
        match (&self.confusion, &self.scores) {
            (Some(k), Some(s)) => {
                rec.extend([k.tp, k.fp, k.fn_, k.tn].iter().map(usize::to_string));
                rec.extend([s.precision, s.recall, s.accuracy, s.f1].iter().map(f64::to_string));
            }
            _ => rec.extend(std::iter::repeat_n(String::new(), 8)),
        }
        rec
    }

    pub fn write_csv<W: std::io::Write>(reports: &[EvalReport], writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(REPORT_HEADER)?;
        for r in reports {
            w.write_record(r.record())?;
        }
        w.flush().map_err(|e| Error::io("<report>", e))?;
        Ok(())
    }
}

/// Training snapshots, labels and the feature matrix `M(G_t, G_t1)`.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    pub g_t: Snapshot,
    pub g_t1: Snapshot,
    pub labeling: LeaveLabeling,
    pub matrix: FeatureMatrix,
}

pub fn build_training_set(corpus: &Corpus, plan: &ExperimentPlan) -> Result<TrainingSet> {
    plan.validate()?;
    let g_t = build_snapshot(&corpus.events, plan.train_start, plan.window_days)?.with_label("g_t");
    let g_t1 = build_snapshot(&corpus.events, plan.train_end, plan.window_days)?.with_label("g_t1");
    let labeling = label_leaves(&g_t, &g_t1)?;
    let (matrix, _) = features::assemble(&g_t, &labeling, &corpus.attributes, &plan.min_cut_options())?;
    Ok(TrainingSet { g_t, g_t1, labeling, matrix })
}

/// Importance ranking from a forest on the full training matrix, used by the
/// `best*` variants.
pub fn variant_ranking(train: &FeatureMatrix, plan: &ExperimentPlan) -> Result<Vec<String>> {
    let cfg = ForestConfig { seed: plan.seed, ..plan.classifier.forest.clone() };
    let forest = classifier::train_random_forest(train, &cfg)?;
    Ok(classifier::feature_importance(&forest)?.names())
}

/// One fitted model per evaluated variant, in plan order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantModel {
    pub variant: VariantKind,
    pub columns: Vec<String>,
    pub model: FittedModel,
}

pub fn fit_variants(train: &FeatureMatrix, plan: &ExperimentPlan) -> Result<Vec<VariantModel>> {
    let variants = plan.effective_variants();
    let ranking = if variants.iter().any(|v| v.needs_ranking()) {
        variant_ranking(train, plan)?
    } else {
        Vec::new()
    };
    let cfg = plan.classifier_config();
    variants
        .into_iter()
        .map(|kind| {
            let spec = VariantSpec { kind, ranking: ranking.clone() };
            let m = features::select_variant(train, &spec)?;
            let model = fit_method(&plan.method, &m, &cfg, plan.metric)?;
            Ok(VariantModel { variant: kind, columns: m.columns(), model })
        })
        .collect()
}

/// Departure labels of the initial nodes for one horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonLabels {
    pub months: u32,
    /// No member interacted in the horizon window.
    pub empty: bool,
    pub departed: Vec<String>,
}

pub fn horizon_labels(events: &[InteractionEvent], g_t: &Snapshot, plan: &ExperimentPlan) -> Result<Vec<HorizonLabels>> {
    plan.horizons
        .iter()
        .map(|&months| {
            let snap = build_snapshot(events, plan.horizon_start(months)?, plan.window_days)?;
            let labeling = label_leaves(g_t, &snap)?;
            Ok(HorizonLabels {
                months,
                empty: snap.graph.is_empty(),
                departed: labeling.departed.into_iter().collect(),
            })
        })
        .collect()
}

pub fn context(plan: &ExperimentPlan, horizon: Option<u32>, variant: &str) -> EvalContext {
    EvalContext {
        train_start: format_timestamp(&plan.train_start),
        train_end: format_timestamp(&plan.train_end),
        window_days: plan.window_days,
        horizon_months: horizon,
        variant: variant.to_owned(),
        method: plan.method.to_string(),
    }
}

/// Scores every (horizon, variant) cell on `test`, whose rows are the
/// initial nodes of the test corpus.
pub fn evaluate_models(
    models: &[VariantModel],
    test: &FeatureMatrix,
    horizons: &[HorizonLabels],
    plan: &ExperimentPlan,
) -> Result<Vec<EvalReport>> {
    let projected: Vec<FeatureMatrix> =
        models.iter().map(|vm| features::project(test, &vm.columns)).collect::<Result<_>>()?;
    let mut reports = Vec::new();
    for h in horizons {
        for (vm, m) in models.iter().zip(&projected) {
            let ctx = context(plan, Some(h.months), vm.variant.as_str());
            if h.empty {
                log::warn!("horizon {} months: snapshot is empty, row left blank", h.months);
                reports.push(EvalReport { context: ctx, empty: true, confusion: None, scores: None });
                continue;
            }
            let m = m.relabeled(|id| h.departed.binary_search_by(|d| d.as_str().cmp(id)).is_ok());
            let predicted = vm.model.predict_labels(&m)?;
            let c = Confusion::from_predictions(&predicted, &m.labels());
            reports.push(EvalReport { context: ctx, empty: false, confusion: Some(c), scores: Some(metrics(&c)?) });
        }
    }
    Ok(reports)
}

/// Fits on one corpus's training windows and evaluates on every horizon of
/// the same corpus.
pub fn run_horizon_experiment(corpus: &Corpus, plan: &ExperimentPlan) -> Result<Vec<EvalReport>> {
    run_cross_dataset(corpus, corpus, plan)
}

/// Fits entirely on `train` and evaluates the initial nodes of `test` at
/// each horizon, using the same windows for both corpora. Standardization
/// parameters travel inside the fitted models; no labels of `test` are read
/// before evaluation.
pub fn run_cross_dataset(train: &Corpus, test: &Corpus, plan: &ExperimentPlan) -> Result<Vec<EvalReport>> {
    run_transfer(train, plan, test, plan)
}

/// Like [`run_cross_dataset`] for corpora covering different periods: the
/// models come from `train` under `plan`, while the test snapshots and
/// horizons follow `test_plan`'s windows. Report rows carry `plan`'s
/// training context and `test_plan`'s horizons.
pub fn run_transfer(
    train: &Corpus,
    plan: &ExperimentPlan,
    test: &Corpus,
    test_plan: &ExperimentPlan,
) -> Result<Vec<EvalReport>> {
    plan.validate()?;
    test_plan.validate()?;
    if test_plan.horizons.is_empty() {
        return Ok(Vec::new());
    }
    let training = build_training_set(train, plan)?;
    let models = fit_variants(&training.matrix, plan)?;

    let g_t = build_snapshot(&test.events, test_plan.train_start, test_plan.window_days)?.with_label("g_t");
    let unlabeled = LeaveLabeling {
        initial_nodes: g_t.graph.nodes().iter().cloned().collect(),
        departed: Default::default(),
        ignored: Default::default(),
        horizon_tag: String::new(),
    };
    let (test_matrix, _) = features::assemble(&g_t, &unlabeled, &test.attributes, &test_plan.min_cut_options())?;
    classifier_schema_check(&training.matrix, &test_matrix)?;
    let horizons = horizon_labels(&test.events, &g_t, test_plan)?;
    evaluate_models(&models, &test_matrix, &horizons, plan)
}

fn classifier_schema_check(train: &FeatureMatrix, test: &FeatureMatrix) -> Result<()> {
    if train.columns() != test.columns() {
        return Err(Error::ColumnMismatch(format!(
            "training corpus columns [{}] differ from test corpus columns [{}]",
            train.columns().join(", "),
            test.columns().join(", ")
        )));
    }
    Ok(())
}
