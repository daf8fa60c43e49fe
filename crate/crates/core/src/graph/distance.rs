use crate::error::Result;

use super::Graph;

/// Unweighted shortest-path distances from `src`; `usize::MAX` marks
/// unreachable nodes.
pub fn bfs_distances(g: &Graph, src: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.node_count()];
    let mut queue = std::collections::VecDeque::new();
    dist[src] = 0;
    queue.push_back(src);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Inverse of the summed distances to the nodes of `v`'s own component.
/// An isolated node has closeness 0.
pub fn closeness(g: &Graph, v: &str) -> Result<f64> {
    Ok(closeness_indexed(g, g.index_of(v)?))
}

pub fn closeness_indexed(g: &Graph, v: usize) -> f64 {
    closeness_from(&bfs_distances(g, v))
}

pub(crate) fn closeness_from(dist: &[usize]) -> f64 {
    let total: usize = dist.iter().filter(|&&d| d != usize::MAX).sum();
    if total == 0 {
        0.0
    } else {
        1.0 / total as f64
    }
}

/// Largest distance from `v` within its component; 0 when isolated.
pub fn eccentricity(g: &Graph, v: &str) -> Result<usize> {
    Ok(eccentricity_indexed(g, g.index_of(v)?))
}

pub fn eccentricity_indexed(g: &Graph, v: usize) -> usize {
    eccentricity_from(&bfs_distances(g, v))
}

pub(crate) fn eccentricity_from(dist: &[usize]) -> usize {
    dist.iter().copied().filter(|&d| d != usize::MAX).max().unwrap_or(0)
}
