//! The staged pipeline the `decay` binary drives, run from library code.
//! Artifacts land in a temporary directory.
//!
//! cargo run --release --example pipeline

use decay::pipeline::{self, RunConfig};
use decay::synth::SyntheticSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("decay-example");
    let base = RunConfig { out: dir.clone(), method: "forest".parse()?, ..Default::default() };
    let cfg = base.for_synthetic(&SyntheticSpec::default());
    pipeline::cmd_synth(&cfg)?;
    pipeline::cmd_snapshot(&cfg)?;
    pipeline::cmd_features(&cfg)?;
    pipeline::cmd_fit(&cfg)?;
    pipeline::cmd_evaluate(&cfg, false)?;
    pipeline::cmd_importance(&cfg)?;
    print!("{}", std::fs::read_to_string(cfg.artifact(pipeline::REPORT_FILE))?);
    println!("artifacts in {}", dir.display());
    Ok(())
}
