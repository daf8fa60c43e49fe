//! File-based stages behind the `decay` binary. Each stage reads the
//! artifacts of earlier stages from the output directory and writes its own,
//! so running the stages one by one yields the same report as
//! [`cmd_evaluate`] with `one_shot`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::classifier::{self, ClassifierConfig, ForestConfig, ImportanceRanking};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate_models, fit_method, fit_variants, kfold_cv, run_horizon_experiment, Corpus, CvReport, EvalReport,
    ExperimentPlan, HorizonLabels, Method, Metric, VariantModel,
};
use crate::features::{self, CorrelationMatrix, FeatureMatrix, VariantKind};
use crate::graph::{self, Graph, MinCutOptions};
use crate::ingest::{
    build_snapshot, format_timestamp, label_leaves, parse_attributes, parse_events, AttributeTable, Snapshot, Timestamp,
};
use crate::synth::{SyntheticCommunity, SyntheticSpec};

pub const FORMAT_VERSION: u32 = 1;

pub const FEATURES_FILE: &str = "features.csv";
pub const LABELS_FILE: &str = "labels.json";
pub const MODEL_FILE: &str = "model.json";
pub const CV_FILE: &str = "cv.csv";
pub const PREDICTIONS_FILE: &str = "predictions.csv";
pub const REPORT_FILE: &str = "report.csv";
pub const IMPORTANCE_FILE: &str = "importance.csv";
pub const CORRELATION_FILE: &str = "correlation.csv";
pub const CDF_FILE: &str = "cdf.csv";
pub const CONFIG_FILE: &str = "config.json";

/// Everything a run needs. Loaded from JSON, with command-line flags layered
/// on top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Defaults to `<out>/events.csv`.
    pub events: Option<PathBuf>,
    /// Defaults to `<out>/attributes.csv`.
    pub attributes: Option<PathBuf>,
    pub out: PathBuf,
    pub train_start: Option<Timestamp>,
    pub train_end: Option<Timestamp>,
    pub window_days: u32,
    pub horizons: Vec<u32>,
    pub method: Method,
    pub variants: Vec<VariantKind>,
    pub metric: Metric,
    pub seed: u64,
    pub classifier: ClassifierConfig,
    pub mincut_sample_size: Option<usize>,
    pub mincut_sample_threshold: usize,
    /// Cross-validate during `fit` with this many folds.
    pub cv_folds: Option<usize>,
    pub synth: SyntheticSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            events: None,
            attributes: None,
            out: PathBuf::from("out"),
            train_start: None,
            train_end: None,
            window_days: 45,
            horizons: vec![2, 4, 12, 24],
            method: Method::Stm { attribute: "degree".into() },
            variants: vec![VariantKind::All],
            metric: Metric::F1,
            seed: 42,
            classifier: ClassifierConfig::default(),
            mincut_sample_size: None,
            mincut_sample_threshold: MinCutOptions::default().sample_threshold,
            cv_folds: None,
            synth: SyntheticSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn events_path(&self) -> PathBuf {
        self.events.clone().unwrap_or_else(|| self.out.join("events.csv"))
    }

    pub fn attributes_path(&self) -> PathBuf {
        self.attributes.clone().unwrap_or_else(|| self.out.join("attributes.csv"))
    }

    pub fn artifact(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    pub fn plan(&self) -> Result<ExperimentPlan> {
        let (Some(start), Some(end)) = (self.train_start, self.train_end) else {
            return Err(Error::invalid("train_start and train_end are required"));
        };
        let plan = ExperimentPlan {
            train_start: start,
            train_end: end,
            window_days: self.window_days,
            horizons: self.horizons.clone(),
            variants: self.variants.clone(),
            method: self.method.clone(),
            metric: self.metric,
            seed: self.seed,
            classifier: self.classifier.clone(),
            mincut_sample_size: self.mincut_sample_size,
            mincut_sample_threshold: self.mincut_sample_threshold,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Same run settings with the windows of `spec` filled in.
    pub fn for_synthetic(&self, spec: &SyntheticSpec) -> RunConfig {
        let plan = spec.plan(self.method.clone(), &self.horizons);
        RunConfig {
            train_start: Some(plan.train_start),
            train_end: Some(plan.train_end),
            window_days: plan.window_days,
            horizons: plan.horizons,
            synth: spec.clone(),
            ..self.clone()
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_bytes(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

fn ensure_out(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))
}

pub fn load_corpus(cfg: &RunConfig) -> Result<Corpus> {
    let log = parse_events(&cfg.events_path())?;
    Ok(Corpus { events: log.events, attributes: parse_attributes(&cfg.attributes_path())? })
}

/// Generates a synthetic community into the output directory together with
/// a `config.json` whose windows match it.
pub fn cmd_synth(cfg: &RunConfig) -> Result<SyntheticCommunity> {
    let community = cfg.synth.generate()?;
    ensure_out(cfg)?;
    community.write(&cfg.out)?;
    let mut run = cfg.for_synthetic(&cfg.synth);
    run.events = Some(cfg.out.join("events.csv"));
    run.attributes = Some(cfg.out.join("attributes.csv"));
    write_json(&cfg.artifact(CONFIG_FILE), &run)?;
    Ok(community)
}

pub fn horizon_stem(months: u32) -> String {
    format!("g_h{months}")
}

/// Writes `g_t`, `g_t1` and one `g_h<months>` snapshot per horizon.
pub fn cmd_snapshot(cfg: &RunConfig) -> Result<Vec<Snapshot>> {
    let plan = cfg.plan()?;
    let events = parse_events(&cfg.events_path())?.events;
    if events.is_empty() {
        log::warn!("no events; every snapshot will be empty");
    }
    ensure_out(cfg)?;
    let mut snaps = vec![
        build_snapshot(&events, plan.train_start, plan.window_days)?.with_label("g_t"),
        build_snapshot(&events, plan.train_end, plan.window_days)?.with_label("g_t1"),
    ];
    for &h in &plan.horizons {
        snaps.push(build_snapshot(&events, plan.horizon_start(h)?, plan.window_days)?.with_label(horizon_stem(h)));
    }
    for s in &snaps {
        s.save(&cfg.out, &s.label)?;
    }
    Ok(snaps)
}

/// Horizon labels of the initial nodes, stored between `features` and
/// `evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelsArtifact {
    pub format_version: u32,
    pub train_start: String,
    pub window_days: u32,
    pub horizons: Vec<HorizonLabels>,
}

fn load_snapshot(cfg: &RunConfig, stem: &str, start: Timestamp, window_days: u32) -> Result<Snapshot> {
    let snap = Snapshot::load(&cfg.out, stem)?;
    if snap.window_start != start || snap.window_days != window_days {
        return Err(Error::invalid(format!(
            "snapshot `{stem}` covers {} (+{} days) but the config asks for {} (+{window_days} days); re-run `snapshot`",
            format_timestamp(&snap.window_start),
            snap.window_days,
            format_timestamp(&start),
        )));
    }
    Ok(snap)
}

/// Assembles the training matrix from the saved snapshots and labels the
/// initial nodes at every horizon.
pub fn cmd_features(cfg: &RunConfig) -> Result<(FeatureMatrix, LabelsArtifact)> {
    let plan = cfg.plan()?;
    let attrs: AttributeTable = parse_attributes(&cfg.attributes_path())?;
    let g_t = load_snapshot(cfg, "g_t", plan.train_start, plan.window_days)?;
    let g_t1 = load_snapshot(cfg, "g_t1", plan.train_end, plan.window_days)?;
    let labeling = label_leaves(&g_t, &g_t1)?;
    let (matrix, report) = features::assemble(&g_t, &labeling, &attrs, &plan.min_cut_options())?;
    if report.missing_attributes > 0 {
        log::warn!("{} members have no attribute row; exogenous features set to 0", report.missing_attributes);
    }
    let horizons = plan
        .horizons
        .iter()
        .map(|&h| {
            let snap = load_snapshot(cfg, &horizon_stem(h), plan.horizon_start(h)?, plan.window_days)?;
            let labeling = label_leaves(&g_t, &snap)?;
            Ok(HorizonLabels { months: h, empty: snap.graph.is_empty(), departed: labeling.departed.into_iter().collect() })
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = LabelsArtifact {
        format_version: FORMAT_VERSION,
        train_start: format_timestamp(&plan.train_start),
        window_days: plan.window_days,
        horizons,
    };
    matrix.save(&cfg.artifact(FEATURES_FILE))?;
    write_json(&cfg.artifact(LABELS_FILE), &labels)?;
    Ok((matrix, labels))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format_version: u32,
    pub method: Method,
    /// Columns of the matrix the models were fitted on.
    pub columns: Vec<String>,
    pub models: Vec<VariantModel>,
}

impl ModelArtifact {
    pub fn load(path: &Path) -> Result<Self> {
        let artifact: ModelArtifact = read_json(path)?;
        if artifact.format_version != FORMAT_VERSION {
            return Err(Error::invalid(format!(
                "{}: format version {} is not supported (expected {FORMAT_VERSION})",
                path.display(),
                artifact.format_version
            )));
        }
        Ok(artifact)
    }
}

/// Cross-validation scores of one variant.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantCv {
    pub variant: VariantKind,
    pub report: CvReport,
}

pub const CV_HEADER: [&str; 10] = ["variant", "fold", "tp", "fp", "fn", "tn", "precision", "recall", "accuracy", "f1"];

pub fn write_cv_csv<W: std::io::Write>(rows: &[VariantCv], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CV_HEADER)?;
    for v in rows {
        for (i, (c, s)) in v.report.folds.iter().enumerate() {
            let mut rec = vec![v.variant.to_string(), (i + 1).to_string()];
            rec.extend([c.tp, c.fp, c.fn_, c.tn].iter().map(usize::to_string));
            rec.extend([s.precision, s.recall, s.accuracy, s.f1].iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        let m = &v.report.mean;
        let mut rec = vec![v.variant.to_string(), "mean".to_owned()];
        rec.extend(std::iter::repeat_n(String::new(), 4));
        rec.extend([m.precision, m.recall, m.accuracy, m.f1].iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<cv>", e))?;
    Ok(())
}

/// Fits one model per variant on `features.csv`; with `cv_folds` also runs
/// stratified cross-validation on the training matrix.
pub fn cmd_fit(cfg: &RunConfig) -> Result<(ModelArtifact, Vec<VariantCv>)> {
    let plan = cfg.plan()?;
    let train = FeatureMatrix::load(&cfg.artifact(FEATURES_FILE))?;
    let models = fit_variants(&train, &plan)?;
    let mut cv = Vec::new();
    if let Some(k) = cfg.cv_folds {
        let ccfg = plan.classifier_config();
        for vm in &models {
            let m = features::project(&train, &vm.columns)?;
            let report = kfold_cv(&m, k, plan.seed, |fold| fit_method(&plan.method, fold, &ccfg, plan.metric))?;
            cv.push(VariantCv { variant: vm.variant, report });
        }
        write_bytes(&cfg.artifact(CV_FILE), |b| write_cv_csv(&cv, b))?;
    }
    let artifact = ModelArtifact { format_version: FORMAT_VERSION, method: plan.method.clone(), columns: train.columns(), models };
    write_json(&cfg.artifact(MODEL_FILE), &artifact)?;
    Ok((artifact, cv))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub node_id: String,
    pub variant: VariantKind,
    pub score: f64,
    pub leave: bool,
}

/// Scores every row of `features.csv` with every fitted variant.
pub fn cmd_predict(cfg: &RunConfig) -> Result<Vec<Prediction>> {
    let artifact = ModelArtifact::load(&cfg.artifact(MODEL_FILE))?;
    let matrix = FeatureMatrix::load(&cfg.artifact(FEATURES_FILE))?;
    let mut out = Vec::new();
    for vm in &artifact.models {
        let m = features::project(&matrix, &vm.columns)?;
        for (id, (score, leave)) in m.node_ids().into_iter().zip(vm.model.predict(&m)?) {
            out.push(Prediction { node_id: id.to_owned(), variant: vm.variant, score, leave });
        }
    }
    write_bytes(&cfg.artifact(PREDICTIONS_FILE), |b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["node_id", "variant", "score", "leave"])?;
        for p in &out {
            w.write_record([p.node_id.clone(), p.variant.to_string(), p.score.to_string(), p.leave.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<predictions>", e))?;
        Ok(())
    })?;
    Ok(out)
}

/// Writes `report.csv`. Staged mode reads `model.json`, `features.csv` and
/// `labels.json`; `one_shot` recomputes everything from the event log.
pub fn cmd_evaluate(cfg: &RunConfig, one_shot: bool) -> Result<Vec<EvalReport>> {
    let plan = cfg.plan()?;
    let reports = if one_shot {
        run_horizon_experiment(&load_corpus(cfg)?, &plan)?
    } else {
        let artifact = ModelArtifact::load(&cfg.artifact(MODEL_FILE))?;
        if artifact.method != plan.method {
            return Err(Error::invalid(format!(
                "model.json was fitted with `{}` but the config selects `{}`",
                artifact.method, plan.method
            )));
        }
        let matrix = FeatureMatrix::load(&cfg.artifact(FEATURES_FILE))?;
        if matrix.columns() != artifact.columns {
            return Err(Error::ColumnMismatch(format!(
                "features.csv columns [{}] differ from the model's [{}]",
                matrix.columns().join(", "),
                artifact.columns.join(", ")
            )));
        }
        let labels_path = cfg.artifact(LABELS_FILE);
        let labels: LabelsArtifact = read_json(&labels_path)?;
        let months: Vec<u32> = labels.horizons.iter().map(|h| h.months).collect();
        if labels.format_version != FORMAT_VERSION || months != plan.horizons || labels.window_days != plan.window_days {
            return Err(Error::invalid(format!(
                "{} does not match the config (horizons {:?}, window {} days); re-run `features`",
                labels_path.display(),
                plan.horizons,
                plan.window_days
            )));
        }
        evaluate_models(&artifact.models, &matrix, &labels.horizons, &plan)?
    };
    ensure_out(cfg)?;
    write_bytes(&cfg.artifact(REPORT_FILE), |b| EvalReport::write_csv(&reports, b))?;
    Ok(reports)
}

/// Forest importance of every column of `features.csv`.
pub fn cmd_importance(cfg: &RunConfig) -> Result<ImportanceRanking> {
    let matrix = FeatureMatrix::load(&cfg.artifact(FEATURES_FILE))?;
    let forest_cfg = ForestConfig { seed: cfg.seed, ..cfg.classifier.forest.clone() };
    let model = classifier::train_random_forest(&matrix, &forest_cfg)?;
    let ranking = classifier::feature_importance(&model)?;
    write_bytes(&cfg.artifact(IMPORTANCE_FILE), |b| ranking.write_csv(b))?;
    Ok(ranking)
}

pub fn cmd_correlate(cfg: &RunConfig) -> Result<CorrelationMatrix> {
    let matrix = FeatureMatrix::load(&cfg.artifact(FEATURES_FILE))?;
    let corr = features::pearson_matrix(&matrix)?;
    write_bytes(&cfg.artifact(CORRELATION_FILE), |b| corr.write_csv(b))?;
    Ok(corr)
}

pub fn cmd_cdf(cfg: &RunConfig) -> Result<Vec<(i64, f64)>> {
    let attrs = parse_attributes(&cfg.attributes_path())?;
    let cdf = features::active_weeks_cdf(&attrs)?;
    ensure_out(cfg)?;
    write_bytes(&cfg.artifact(CDF_FILE), |b| features::write_cdf_csv(&cdf, b))?;
    Ok(cdf)
}

/// Per-node measures of a tab-separated edge list.
pub fn cmd_metrics(edges: &Path, out: &Path, opts: &MinCutOptions) -> Result<usize> {
    let g = Graph::read_edge_list(edges)?;
    let (metrics, summary) = graph::all_metrics_with(&g, opts);
    if summary.sampled {
        log::warn!("min-cut averages estimated from {} sampled partners", summary.sample_size);
    }
    write_bytes(out, |b| graph::write_metrics_csv(&metrics, b))?;
    Ok(metrics.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(dir: &Path) -> RunConfig {
        let base = RunConfig { out: dir.to_path_buf(), horizons: vec![2, 4], ..Default::default() };
        let spec = SyntheticSpec { nodes: 60, edge_density: 0.05, months: 8, ..Default::default() };
        base.for_synthetic(&spec)
    }

    #[test]
    fn config_json_defaults_and_unknown_fields() {
        let cfg: RunConfig = serde_json::from_str(r#"{"method":"forest","seed":7}"#).unwrap();
        assert_eq!(cfg.window_days, 45);
        assert_eq!(cfg.seed, 7);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed":7}"#).is_err());
        assert!(cfg.plan().is_err(), "windows are required");
    }

    #[test]
    fn staged_matches_one_shot() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path());
        cmd_synth(&cfg).unwrap();
        assert_eq!(cmd_snapshot(&cfg).unwrap().len(), 4);
        cmd_features(&cfg).unwrap();
        cmd_fit(&cfg).unwrap();
        let staged = cmd_evaluate(&cfg, false).unwrap();
        let staged_bytes = fs::read(cfg.artifact(REPORT_FILE)).unwrap();
        let one_shot = cmd_evaluate(&cfg, true).unwrap();
        assert_eq!(staged, one_shot);
        assert_eq!(staged_bytes, fs::read(cfg.artifact(REPORT_FILE)).unwrap());
        assert!(staged.iter().all(|r| r.scores.unwrap().f1 == 1.0));
    }

    #[test]
    fn evaluate_rejects_stale_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path());
        cmd_synth(&cfg).unwrap();
        cmd_snapshot(&cfg).unwrap();
        cmd_features(&cfg).unwrap();
        cmd_fit(&cfg).unwrap();
        let other = RunConfig { method: "logreg".parse().unwrap(), ..cfg.clone() };
        assert!(matches!(cmd_evaluate(&other, false), Err(Error::Invalid(_))));
        let shifted = RunConfig { window_days: 30, ..cfg };
        assert!(matches!(cmd_features(&shifted), Err(Error::Invalid(_))));
    }
}
