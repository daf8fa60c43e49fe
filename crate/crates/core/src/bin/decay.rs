use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use decay::eval::{FittedModel, Method, Metric};
use decay::features::VariantKind;
use decay::graph::MinCutOptions;
use decay::ingest::{parse_timestamp, Timestamp};
use decay::pipeline::{self, RunConfig};
use decay::synth::PlantedAttribute;

/// Predict which members of an online community become inactive.
///
/// Stages share an output directory: synth -> snapshot -> features -> fit
/// -> predict / evaluate. Exit codes: 0 ok, 1 invalid data or config,
/// 2 missing input or artifact.
#[derive(Parser)]
#[command(name = "decay", version)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Events CSV (timestamp,actor,target,kind). Default: <out>/events.csv
    #[arg(long, global = true)]
    events: Option<PathBuf>,
    /// Member attributes CSV. Default: <out>/attributes.csv
    #[arg(long, global = true)]
    attributes: Option<PathBuf>,
    /// Directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Start of the first training window.
    #[arg(long, global = true, value_parser = timestamp)]
    train_start: Option<Timestamp>,
    /// Start of the window whose absences label the training set.
    #[arg(long, global = true, value_parser = timestamp)]
    train_end: Option<Timestamp>,
    /// Window length in days.
    #[arg(long, global = true)]
    window_days: Option<u32>,
    /// Test horizons in months after train-end, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    horizons: Option<Vec<u32>>,
    /// stm:<feature>, logreg, svm or forest.
    #[arg(long, global = true)]
    method: Option<Method>,
    /// Feature variants: all, best4, best1, best2 (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    variants: Option<Vec<VariantKind>>,
    /// Metric maximized by the threshold model.
    #[arg(long, global = true)]
    metric: Option<Metric>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample this many partners per node when averaging min cuts.
    #[arg(long, global = true)]
    mincut_sample_size: Option<usize>,
    /// Sample min cuts only for graphs above this many nodes.
    #[arg(long, global = true)]
    mincut_sample_threshold: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic community with a planted departure rule.
    Synth(SynthArgs),
    /// Build the training and horizon snapshots from the event log.
    Snapshot,
    /// Assemble the training feature matrix and horizon labels.
    Features,
    /// Fit one model per variant.
    Fit {
        /// Also report stratified k-fold cross-validation.
        #[arg(long)]
        cv: Option<usize>,
    },
    /// Score every member of the training matrix.
    Predict,
    /// Write the per-horizon report.
    Evaluate {
        /// Recompute everything from the event log instead of reading
        /// stage artifacts.
        #[arg(long)]
        one_shot: bool,
    },
    /// Rank features by forest importance.
    Importance,
    /// Pearson correlation between feature columns.
    Correlate,
    /// Distribution of active weeks per member.
    Cdf,
    /// Per-node measures of a tab-separated edge list.
    Metrics {
        edges: PathBuf,
        /// Output CSV.
        #[arg(long, default_value = "metrics.csv")]
        output: PathBuf,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    nodes: Option<usize>,
    /// Pair interaction probability in the first window.
    #[arg(long)]
    density: Option<f64>,
    /// Planted attribute: degree or reputation.
    #[arg(long)]
    attribute: Option<PlantedAttribute>,
    /// Members below this value leave.
    #[arg(long)]
    threshold: Option<f64>,
    /// Label flip rate in [0, 0.5).
    #[arg(long)]
    noise: Option<f64>,
    /// Months of generated activity.
    #[arg(long)]
    months: Option<u32>,
}

fn timestamp(s: &str) -> Result<Timestamp, String> {
    parse_timestamp(s).ok_or_else(|| format!("cannot parse `{s}` as a date or RFC 3339 timestamp"))
}

fn config(run: RunArgs) -> decay::Result<RunConfig> {
    let mut cfg = match &run.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = run.$field { cfg.$field = v; })* };
    }
    set!(out, window_days, horizons, method, variants, metric, mincut_sample_threshold);
    if run.events.is_some() {
        cfg.events = run.events;
    }
    if run.attributes.is_some() {
        cfg.attributes = run.attributes;
    }
    if run.train_start.is_some() {
        cfg.train_start = run.train_start;
    }
    if run.train_end.is_some() {
        cfg.train_end = run.train_end;
    }
    if run.mincut_sample_size.is_some() {
        cfg.mincut_sample_size = run.mincut_sample_size;
    }
    if let Some(seed) = run.seed {
        cfg.seed = seed;
        cfg.synth.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> decay::Result<()> {
    let mut cfg = config(cli.run)?;
    match cli.command {
        Command::Synth(a) => {
            let s = &mut cfg.synth;
            s.nodes = a.nodes.unwrap_or(s.nodes);
            s.edge_density = a.density.unwrap_or(s.edge_density);
            s.rule.attribute = a.attribute.unwrap_or(s.rule.attribute);
            s.rule.threshold = a.threshold.unwrap_or(s.rule.threshold);
            s.rule.noise = a.noise.unwrap_or(s.rule.noise);
            s.months = a.months.unwrap_or(s.months);
            let c = pipeline::cmd_synth(&cfg)?;
            println!(
                "{} events, {} members, {} departures -> {}",
                c.corpus.events.len(),
                c.corpus.attributes.len(),
                c.departures().len(),
                cfg.out.display()
            );
        }
        Command::Snapshot => {
            for s in pipeline::cmd_snapshot(&cfg)? {
                println!("{}\t{} nodes\t{} edges", s.label, s.graph.node_count(), s.graph.edge_count());
            }
        }
        Command::Features => {
            let (m, labels) = pipeline::cmd_features(&cfg)?;
            let leaves = m.labels().iter().filter(|&&l| l).count();
            println!("{} rows, {leaves} labeled leave", m.len());
            for h in &labels.horizons {
                println!("horizon {}\t{} departed{}", h.months, h.departed.len(), if h.empty { " (empty)" } else { "" });
            }
        }
        Command::Fit { cv } => {
            if cv.is_some() {
                cfg.cv_folds = cv;
            }
            let (artifact, folds) = pipeline::cmd_fit(&cfg)?;
            for vm in &artifact.models {
                match &vm.model {
                    FittedModel::Stm(m) => {
                        if m.degenerate {
                            log::warn!("threshold model on `{}` is degenerate", m.attribute);
                        }
                        println!(
                            "{}\tstm:{}\tlambda={}\t{:?}\t{}={}",
                            vm.variant, m.attribute, m.lambda, m.orientation, m.metric, m.training_score
                        );
                    }
                    FittedModel::Classifier(m) => println!("{}\t{}\t{} columns", vm.variant, m.kind, vm.columns.len()),
                }
            }
            for v in &folds {
                println!("cv {}\tf1={}\taccuracy={}", v.variant, v.report.mean.f1, v.report.mean.accuracy);
            }
        }
        Command::Predict => {
            let p = pipeline::cmd_predict(&cfg)?;
            println!("{} predictions -> {}", p.len(), cfg.artifact(pipeline::PREDICTIONS_FILE).display());
        }
        Command::Evaluate { one_shot } => {
            let reports = pipeline::cmd_evaluate(&cfg, one_shot)?;
            let mut out = Vec::new();
            decay::eval::EvalReport::write_csv(&reports, &mut out)?;
            print!("{}", String::from_utf8_lossy(&out));
        }
        Command::Importance => {
            for (name, w) in pipeline::cmd_importance(&cfg)?.entries {
                println!("{name}\t{w:.4}");
            }
        }
        Command::Correlate => {
            let c = pipeline::cmd_correlate(&cfg)?;
            if !c.constant.is_empty() {
                log::warn!("constant columns (correlation undefined): {}", c.constant.join(", "));
            }
            println!("{} columns -> {}", c.names.len(), cfg.artifact(pipeline::CORRELATION_FILE).display());
        }
        Command::Cdf => {
            let cdf = pipeline::cmd_cdf(&cfg)?;
            println!("{} points -> {}", cdf.len(), cfg.artifact(pipeline::CDF_FILE).display());
        }
        Command::Metrics { edges, output } => {
            let opts = MinCutOptions {
                sample_threshold: cfg.mincut_sample_threshold,
                sample_size: cfg.mincut_sample_size,
                seed: cfg.seed,
            };
            let n = pipeline::cmd_metrics(&edges, &output, &opts)?;
            println!("{n} nodes -> {}", output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
