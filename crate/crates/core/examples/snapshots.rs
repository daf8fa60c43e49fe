//! Time-windowed snapshots and leave labels from a generated event log.
//!
//! cargo run --example snapshots

use chrono::Months;
use decay::ingest::{build_snapshot, label_leaves};
use decay::synth::SyntheticSpec;

fn main() -> decay::Result<()> {
    let spec = SyntheticSpec::default();
    let community = spec.generate()?;
    let events = &community.corpus.events;
    println!("{} events", events.len());

    let g_t = build_snapshot(events, spec.start, spec.window_days)?;
    println!("G_t: {} nodes, {} edges", g_t.graph.node_count(), g_t.graph.edge_count());
    for months in [2, 4, 12] {
        let later = build_snapshot(events, spec.train_end() + Months::new(months), spec.window_days)?;
        let labels = label_leaves(&g_t, &later)?;
        println!(
            "+{months:>2} months: {} of {} initial members gone, {} newcomers ignored",
            labels.departed.len(),
            labels.initial_nodes.len(),
            labels.ignored.len()
        );
    }
    Ok(())
}
