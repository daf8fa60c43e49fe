use std::collections::{BTreeMap, VecDeque};

use super::Graph;

/// Betweenness of every node, counting each unordered endpoint pair once.
///
/// Brandes' accumulation: one BFS per source, then dependencies are pushed
/// back along the shortest-path DAG in reverse BFS order.
pub fn betweenness_all(g: &Graph) -> BTreeMap<String, f64> {
    let values = betweenness_indexed(g);
    g.nodes().iter().cloned().zip(values).collect()
}

pub fn betweenness_indexed(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut centrality = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        for v in 0..n {
            sigma[v] = 0.0;
            dist[v] = usize::MAX;
            delta[v] = 0.0;
            preds[v].clear();
        }
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    // every unordered pair was visited from both ends
    for c in &mut centrality {
        *c /= 2.0;
    }
    centrality
}
