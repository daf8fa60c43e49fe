//! Node measures on a small hand-built graph.
//!
//! cargo run --example graph_metrics

use decay::graph::{all_metrics, articulation_points, min_cut};
use decay::Graph;

fn main() -> decay::Result<()> {
    // two triangles joined through a bridge node "c"
    let g = Graph::from_edges([("a", "b"), ("b", "c"), ("a", "c"), ("c", "d"), ("d", "e"), ("e", "f"), ("d", "f")]);
    println!("{} nodes, {} edges", g.node_count(), g.edge_count());
    println!("{:<4} {:>3} {:>8} {:>8} {:>4} {:>4} {:>5} {:>6}", "id", "deg", "betw", "close", "core", "ecc", "art", "mincut");
    for (id, m) in all_metrics(&g) {
        println!(
            "{id:<4} {:>3} {:>8.2} {:>8.4} {:>4} {:>4} {:>5} {:>6.3}",
            m.degree, m.betweenness, m.closeness, m.coreness, m.eccentricity, m.is_articulation, m.avg_min_cut
        );
    }
    println!("articulation points: {:?}", articulation_points(&g));
    println!("min cut a-f: {}", min_cut(&g, "a", "f")?);
    Ok(())
}
