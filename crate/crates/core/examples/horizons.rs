//! The within-community experiment: train on one window, test at several
//! later horizons, for each method.
//!
//! cargo run --release --example horizons

use decay::eval::run_horizon_experiment;
use decay::synth::{DepartureRule, SyntheticSpec};

fn main() -> decay::Result<()> {
    let spec = SyntheticSpec { rule: DepartureRule { noise: 0.1, ..SyntheticSpec::default().rule }, ..Default::default() };
    let community = spec.generate()?;
    for method in ["stm:degree", "logreg", "svm", "forest"] {
        let plan = spec.plan(method.parse()?, &[2, 4, 12, 24]);
        for r in run_horizon_experiment(&community.corpus, &plan)? {
            let s = r.scores.expect("non-empty horizon");
            println!(
                "{:<11} {:>2}m {:<6} A={:.3} F1={:.3}",
                method,
                r.context.horizon_months.unwrap_or(0),
                r.context.variant,
                s.accuracy,
                s.f1
            );
        }
    }
    Ok(())
}
