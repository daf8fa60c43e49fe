use std::collections::VecDeque;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

use super::Graph;

/// Controls how averaged min-cut values are computed on large graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct MinCutOptions {
    /// Node count above which sampling kicks in (when `sample_size` is set).
    pub sample_threshold: usize,
    /// Number of partner nodes sampled per node; `None` keeps exact values.
    pub sample_size: Option<usize>,
    pub seed: u64,
}

impl Default for MinCutOptions {
    fn default() -> Self {
        MinCutOptions { sample_threshold: 2000, sample_size: None, seed: 42 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinCutSummary {
    pub sampled: bool,
    /// Partners evaluated per node (n - 1 when exact).
    pub sample_size: usize,
}

/// Unit-capacity flow network over an undirected graph. Each undirected edge
/// is a pair of opposite arcs with capacity 1, each the other's residual.
struct FlowNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<i32>,
    next: Vec<usize>,
    level: Vec<usize>,
    iter: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl FlowNetwork {
    fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let mut net = FlowNetwork {
            head: vec![NIL; n],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
            level: vec![NIL; n],
            iter: vec![NIL; n],
        };
        for (a, b) in g.edge_indices() {
            net.push_arc(a, b);
            net.push_arc(b, a);
        }
        net
    }

    fn push_arc(&mut self, from: usize, to: usize) {
        self.to.push(to);
        self.cap.push(1);
        self.next.push(self.head[from]);
        self.head[from] = self.to.len() - 1;
    }

    fn reset(&mut self) {
        self.cap.iter_mut().for_each(|c| *c = 1);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = NIL);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let mut e = self.head[v];
            while e != NIL {
                let w = self.to[e];
                if self.cap[e] > 0 && self.level[w] == NIL {
                    self.level[w] = self.level[v] + 1;
                    queue.push_back(w);
                }
                e = self.next[e];
            }
        }
        self.level[t] != NIL
    }

    /// Finds one augmenting path in the level graph; unit capacities mean
    /// each path carries exactly one unit.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut path: Vec<usize> = Vec::new();
        let mut v = s;
        loop {
            if v == t {
                for &e in &path {
                    self.cap[e] -= 1;
                    self.cap[e ^ 1] += 1;
                }
                return true;
            }
            let mut advanced = false;
            while self.iter[v] != NIL {
                let e = self.iter[v];
                let w = self.to[e];
                if self.cap[e] > 0 && self.level[w] == self.level[v] + 1 {
                    path.push(e);
                    v = w;
                    advanced = true;
                    break;
                }
                self.iter[v] = self.next[e];
            }
            if !advanced {
                // dead end: retreat and retire the arc that led here
                match path.pop() {
                    None => return false,
                    Some(e) => {
                        self.level[v] = NIL;
                        v = self.to[e ^ 1];
                        self.iter[v] = self.next[e];
                    }
                }
            }
        }
    }

    /// Dinic max-flow from `s` to `t`, starting from full capacities.
    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        self.reset();
        let mut flow = 0;
        while self.bfs(s, t) {
            self.iter.copy_from_slice(&self.head);
            while self.augment(s, t) {
                flow += 1;
            }
        }
        flow
    }

    /// Nodes reachable from `s` in the residual graph after `max_flow`.
    fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            let mut e = self.head[v];
            while e != NIL {
                let w = self.to[e];
                if self.cap[e] > 0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
                e = self.next[e];
            }
        }
        seen
    }
}

/// Minimum number of edges whose removal separates `u` and `v`.
/// Nodes in different components have min cut 0.
pub fn min_cut(g: &Graph, u: &str, v: &str) -> Result<usize> {
    let (i, j) = (g.index_of(u)?, g.index_of(v)?);
    if i == j {
        return Ok(0);
    }
    Ok(FlowNetwork::new(g).max_flow(i, j))
}

/// `MC(v) = (1/n) * sum_{u != v} MinCut(u, v)` with `n` the graph size,
/// one max-flow per partner node.
pub fn avg_min_cut(g: &Graph, v: &str) -> Result<f64> {
    let s = g.index_of(v)?;
    let n = g.node_count();
    if g.neighbors(s).is_empty() {
        return Ok(0.0);
    }
    let mut net = FlowNetwork::new(g);
    let mut total = 0usize;
    for t in (0..n).filter(|&t| t != s) {
        total += net.max_flow(s, t);
    }
    Ok(total as f64 / n as f64)
}

/// Averaged min cut of every node, indexed like the graph.
///
/// Exact mode builds an equivalent flow tree (Gusfield) with `n - 1`
/// max-flows; the min cut of any pair is the lightest edge on its tree path.
/// Sampled mode (graphs above the threshold with a sample size set) runs one
/// max-flow per sampled partner and rescales the partial sum to `n - 1` terms.
pub fn avg_min_cut_all(g: &Graph, opts: &MinCutOptions) -> (Vec<f64>, MinCutSummary) {
    let n = g.node_count();
    if n == 0 {
        return (Vec::new(), MinCutSummary { sampled: false, sample_size: 0 });
    }
    match opts.sample_size {
        Some(k) if n > opts.sample_threshold && k < n - 1 => {
            (sampled_min_cuts(g, k, opts.seed), MinCutSummary { sampled: true, sample_size: k })
        }
        _ => (exact_min_cuts(g), MinCutSummary { sampled: false, sample_size: n - 1 }),
    }
}

fn exact_min_cuts(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut net = FlowNetwork::new(g);
    let mut parent = vec![0usize; n];
    let mut weight = vec![0usize; n];
    for s in 1..n {
        let t = parent[s];
        let flow = if g.neighbors(s).is_empty() || g.neighbors(t).is_empty() {
            net.reset();
            0
        } else {
            net.max_flow(s, t)
        };
        weight[s] = flow;
        let side = net.source_side(s);
        for i in s + 1..n {
            if side[i] && parent[i] == t {
                parent[i] = s;
            }
        }
    }

    let mut tree: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for s in 1..n {
        tree[s].push((parent[s], weight[s]));
        tree[parent[s]].push((s, weight[s]));
    }
    let mut out = vec![0.0; n];
    let mut bottleneck = vec![0usize; n];
    let mut seen = vec![false; n];
    for (v, slot) in out.iter_mut().enumerate() {
        seen.iter_mut().for_each(|x| *x = false);
        seen[v] = true;
        bottleneck[v] = usize::MAX;
        let mut stack = vec![v];
        let mut total = 0usize;
        while let Some(x) = stack.pop() {
            for &(y, w) in &tree[x] {
                if !seen[y] {
                    seen[y] = true;
                    bottleneck[y] = bottleneck[x].min(w);
                    total += bottleneck[y];
                    stack.push(y);
                }
            }
        }
        *slot = total as f64 / n as f64;
    }
    out
}

fn sampled_min_cuts(g: &Graph, k: usize, seed: u64) -> Vec<f64> {
    let n = g.node_count();
    let mut net = FlowNetwork::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0.0; n];
    for (v, slot) in out.iter_mut().enumerate() {
        // draw from the n - 1 other nodes, skipping v by shifting indices
        let picks = sample(&mut rng, n - 1, k);
        if g.neighbors(v).is_empty() {
            continue;
        }
        let mut total = 0usize;
        for p in picks.iter() {
            let u = if p >= v { p + 1 } else { p };
            total += net.max_flow(v, u);
        }
        *slot = total as f64 * (n - 1) as f64 / k as f64 / n as f64;
    }
    out
}
