//! Training on one community and testing on another.
//!
//! cargo run --release --example cross_community

use decay::eval::{run_cross_dataset, run_horizon_experiment};
use decay::synth::SyntheticSpec;

fn main() -> decay::Result<()> {
    let a = SyntheticSpec { seed: 1, ..Default::default() };
    let b = SyntheticSpec { seed: 2, nodes: 400, ..Default::default() };
    let (ca, cb) = (a.generate()?, b.generate()?);
    for method in ["stm:degree", "logreg", "forest"] {
        let plan = a.plan(method.parse()?, &[2, 4, 12]);
        let within = run_horizon_experiment(&cb.corpus, &plan)?;
        let cross = run_cross_dataset(&ca.corpus, &cb.corpus, &plan)?;
        for (w, c) in within.iter().zip(&cross) {
            println!(
                "{method:<11} {:>2}m  within F1 {:.3}  cross F1 {:.3}",
                w.context.horizon_months.unwrap_or(0),
                w.scores.map_or(f64::NAN, |s| s.f1),
                c.scores.map_or(f64::NAN, |s| s.f1)
            );
        }
    }
    Ok(())
}
