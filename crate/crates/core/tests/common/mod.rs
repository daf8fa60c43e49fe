//! Brute-force reference implementations for small graphs. Everything here
//! works on an adjacency matrix and enumerates instead of being clever.

#![allow(dead_code)]

use decay::Graph;

#[derive(Debug, Clone)]
pub struct Small {
    pub n: usize,
    pub adj: Vec<Vec<bool>>,
}

impl Small {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a != b {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
        Small { n, adj }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.adj[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn id(i: usize) -> String {
        format!("v{i}")
    }

    /// Library graph with ids `v0..v{n-1}`, isolated nodes included.
    pub fn graph(&self) -> Graph {
        let ids: Vec<String> = (0..self.n).map(Self::id).collect();
        let edges: Vec<(String, String)> = self.edges().into_iter().map(|(a, b)| (Self::id(a), Self::id(b))).collect();
        Graph::build(ids.iter().map(String::as_str), edges.iter().map(|(a, b)| (a.as_str(), b.as_str())))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&x| x).count()
    }

    /// Floyd-Warshall; `None` = unreachable.
    pub fn distances(&self) -> Vec<Vec<Option<usize>>> {
        let n = self.n;
        let mut d = vec![vec![None; n]; n];
        for i in 0..n {
            d[i][i] = Some(0);
            for j in 0..n {
                if self.adj[i][j] {
                    d[i][j] = Some(1);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                        if d[i][j].is_none_or(|c| a + b < c) {
                            d[i][j] = Some(a + b);
                        }
                    }
                }
            }
        }
        d
    }

    /// Every simple path from `s` to `t`, as node sequences.
    pub fn simple_paths(&self, s: usize, t: usize) -> Vec<Vec<usize>> {
        fn walk(g: &Small, at: usize, t: usize, path: &mut Vec<usize>, seen: &mut [bool], out: &mut Vec<Vec<usize>>) {
            if at == t {
                out.push(path.clone());
                return;
            }
            for next in 0..g.n {
                if g.adj[at][next] && !seen[next] {
                    seen[next] = true;
                    path.push(next);
                    walk(g, next, t, path, seen, out);
                    path.pop();
                    seen[next] = false;
                }
            }
        }
        let mut out = Vec::new();
        let mut seen = vec![false; self.n];
        seen[s] = true;
        walk(self, s, t, &mut vec![s], &mut seen, &mut out);
        out
    }

    /// Fraction of shortest paths through `v`, summed over unordered pairs
    /// not containing `v`.
    pub fn betweenness(&self, v: usize) -> f64 {
        let mut total = 0.0;
        for s in 0..self.n {
            for t in s + 1..self.n {
                if s == v || t == v {
                    continue;
                }
                let paths = self.simple_paths(s, t);
                let Some(best) = paths.iter().map(Vec::len).min() else { continue };
                let shortest: Vec<_> = paths.iter().filter(|p| p.len() == best).collect();
                let through = shortest.iter().filter(|p| p.contains(&v)).count();
                total += through as f64 / shortest.len() as f64;
            }
        }
        total
    }

    pub fn closeness(&self, v: usize) -> f64 {
        let d = self.distances();
        let sum: usize = (0..self.n).filter(|&u| u != v).filter_map(|u| d[v][u]).sum();
        if sum == 0 {
            0.0
        } else {
            1.0 / sum as f64
        }
    }

    pub fn eccentricity(&self, v: usize) -> usize {
        let d = self.distances();
        (0..self.n).filter_map(|u| d[v][u]).max().unwrap_or(0)
    }

    /// Largest `k` for which `v` survives repeated deletion of nodes with
    /// fewer than `k` remaining neighbors.
    pub fn coreness(&self, v: usize) -> usize {
        let mut best = 0;
        for k in 1..self.n {
            let mut alive = vec![true; self.n];
            loop {
                let drop: Vec<usize> = (0..self.n)
                    .filter(|&u| alive[u])
                    .filter(|&u| (0..self.n).filter(|&w| alive[w] && self.adj[u][w]).count() < k)
                    .collect();
                if drop.is_empty() {
                    break;
                }
                for u in drop {
                    alive[u] = false;
                }
            }
            if alive[v] {
                best = k;
            }
        }
        best
    }

    /// Connected components among nodes with `alive[i]`.
    pub fn components(&self, alive: &[bool]) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if !alive[s] || seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for w in 0..self.n {
                    if alive[w] && !seen[w] && self.adj[u][w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_articulation(&self, v: usize) -> bool {
        let all = vec![true; self.n];
        let mut without = all.clone();
        without[v] = false;
        self.components(&without) > self.components(&all)
    }

    /// Min cut by enumerating every vertex bipartition with `u` on one side
    /// and `v` on the other.
    pub fn min_cut_bipartition(&self, u: usize, v: usize) -> usize {
        let edges = self.edges();
        let mut best = usize::MAX;
        for mask in 0u32..(1 << self.n) {
            if mask & (1 << u) == 0 || mask & (1 << v) != 0 {
                continue;
            }
            let crossing = edges.iter().filter(|&&(a, b)| ((mask >> a) & 1) != ((mask >> b) & 1)).count();
            best = best.min(crossing);
        }
        best
    }

    /// Min cut of every pair by trying every subset of edges to delete.
    /// Exponential in the edge count; only for sparse graphs.
    pub fn min_cuts_by_edge_removal(&self) -> Vec<Vec<usize>> {
        let edges = self.edges();
        assert!(edges.len() <= 20, "edge-subset oracle is limited to 20 edges");
        let n = self.n;
        let mut best = vec![vec![usize::MAX; n]; n];
        for mask in 0u32..(1 << edges.len()) {
            let removed = mask.count_ones() as usize;
            let kept: Vec<(usize, usize)> =
                edges.iter().enumerate().filter(|(i, _)| mask & (1 << i) == 0).map(|(_, &e)| e).collect();
            let comp = component_labels(n, &kept);
            for a in 0..n {
                for b in 0..n {
                    if a != b && comp[a] != comp[b] && removed < best[a][b] {
                        best[a][b] = removed;
                    }
                }
            }
        }
        best
    }

    pub fn avg_min_cut(&self, v: usize) -> f64 {
        let sum: usize = (0..self.n).filter(|&u| u != v).map(|u| self.min_cut_bipartition(u, v)).sum();
        sum as f64 / self.n as f64
    }
}

fn component_labels(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for &(a, b) in edges {
            let m = label[a].min(label[b]);
            if label[a] != m || label[b] != m {
                label[a] = m;
                label[b] = m;
                changed = true;
            }
        }
        if !changed {
            return label;
        }
    }
}

/// Random small graph: `n` in `1..=max_n`, each pair present with a
/// per-graph probability.
pub fn random_small(rng: &mut impl rand::Rng, max_n: usize) -> Small {
    let n = rng.gen_range(1..=max_n);
    let p: f64 = rng.gen_range(0.15..0.85);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Small::new(n, &edges)
}

/// Compares every library metric with the oracles. Returns a description of
/// the first mismatch.
pub fn check_metrics(s: &Small) -> Result<(), String> {
    let g = s.graph();
    let metrics = decay::graph::all_metrics(&g);
    for v in 0..s.n {
        let id = Small::id(v);
        let m = &metrics[&id];
        let close = |name: &str, got: f64, want: f64| {
            if (got - want).abs() <= 1e-9 {
                Ok(())
            } else {
                Err(format!("{name}({id}) = {got}, oracle {want}, edges {:?}", s.edges()))
            }
        };
        let exact = |name: &str, got: usize, want: usize| {
            if got == want {
                Ok(())
            } else {
                Err(format!("{name}({id}) = {got}, oracle {want}, edges {:?}", s.edges()))
            }
        };
        exact("degree", m.degree, s.degree(v))?;
        close("betweenness", m.betweenness, s.betweenness(v))?;
        close("closeness", m.closeness, s.closeness(v))?;
        exact("coreness", m.coreness, s.coreness(v))?;
        exact("eccentricity", m.eccentricity, s.eccentricity(v))?;
        if m.is_articulation != s.is_articulation(v) {
            return Err(format!("is_articulation({id}) = {}, edges {:?}", m.is_articulation, s.edges()));
        }
        close("avg_min_cut", m.avg_min_cut, s.avg_min_cut(v))?;
    }
    if s.edges().len() <= 14 {
        let cuts = s.min_cuts_by_edge_removal();
        for u in 0..s.n {
            for v in u + 1..s.n {
                let got = decay::graph::min_cut(&g, &Small::id(u), &Small::id(v)).map_err(|e| e.to_string())?;
                if got != cuts[u][v] {
                    return Err(format!("min_cut(v{u}, v{v}) = {got}, oracle {}, edges {:?}", cuts[u][v], s.edges()));
                }
            }
        }
    }
    Ok(())
}

/// Matrix with exogenous columns `f00, f01, ...` and ids `r0000, ...`.
pub fn matrix(x: &[Vec<f64>], y: &[bool]) -> decay::features::FeatureMatrix {
    let rows = x
        .iter()
        .zip(y)
        .enumerate()
        .map(|(i, (values, &label))| decay::features::FeatureRow {
            node_id: format!("r{i:04}"),
            network: Default::default(),
            exogenous: values.iter().enumerate().map(|(j, &v)| (format!("f{j:02}"), v)).collect(),
            leave_label: label,
        })
        .collect();
    decay::features::FeatureMatrix::new(rows, vec!["test".into()]).expect("valid matrix")
}

/// `n` rows: column 0 separates the classes perfectly (leave iff > 0.5),
/// the remaining `noise` columns are uniform noise.
pub fn planted(rng: &mut impl rand::Rng, n: usize, noise: usize) -> (Vec<Vec<f64>>, Vec<bool>) {
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let leave = i % 3 == 0;
        let signal = if leave { rng.gen_range(0.6..1.0) } else { rng.gen_range(0.0..0.4) };
        let mut row = vec![signal];
        row.extend((0..noise).map(|_| rng.gen_range(0.0..1.0)));
        x.push(row);
        y.push(leave);
    }
    (x, y)
}
