//! Training the three multi-attribute classifiers on one feature matrix and
//! ranking attributes by forest importance.
//!
//! cargo run --example classifiers

use decay::classifier::{self, ClassifierConfig, ClassifierKind};
use decay::eval::{Confusion, Metric};
use decay::features::assemble;
use decay::graph::MinCutOptions;
use decay::ingest::{build_snapshot, label_leaves};
use decay::synth::{DepartureRule, SyntheticSpec};

fn main() -> decay::Result<()> {
    let spec = SyntheticSpec { rule: DepartureRule { noise: 0.05, ..SyntheticSpec::default().rule }, ..Default::default() };
    let community = spec.generate()?;
    let events = &community.corpus.events;
    let g_t = build_snapshot(events, spec.start, spec.window_days)?;
    let g_t1 = build_snapshot(events, spec.train_end(), spec.window_days)?;
    let labels = label_leaves(&g_t, &g_t1)?;
    let (m, _) = assemble(&g_t, &labels, &community.corpus.attributes, &MinCutOptions::default())?;
    println!("{} rows, columns {:?}", m.len(), m.columns());

    let cfg = ClassifierConfig::default();
    for kind in [ClassifierKind::Logreg, ClassifierKind::LinearSvm, ClassifierKind::RandomForest] {
        let model = classifier::train(kind, &m, &cfg)?;
        let c = Confusion::from_predictions(&model.predict_labels(&m)?, &m.labels());
        println!("{:<8} training F1 {:.3}", kind.as_str(), c.score(Metric::F1));
    }

    let forest = classifier::train(ClassifierKind::RandomForest, &m, &cfg)?;
    for (name, weight) in classifier::feature_importance(&forest)?.entries.iter().take(5) {
        println!("  {name:<14} {weight:.3}");
    }
    Ok(())
}
