//! Undirected simple graphs over opaque member ids and the node-level
//! measures used as network features.
//!
//! Node ids are stored sorted; every internal index refers to that order, so
//! two graphs with the same edge set always share the same indices.

mod articulation;
mod betweenness;
mod core;
mod distance;
mod mincut;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use articulation::{articulation_points, articulation_flags};
pub use betweenness::{betweenness_all, betweenness_indexed};
pub use self::core::{coreness_all, coreness_indexed};
pub use distance::{bfs_distances, closeness, closeness_indexed, eccentricity, eccentricity_indexed};
pub use mincut::{avg_min_cut, avg_min_cut_all, min_cut, MinCutOptions, MinCutSummary};

/// Undirected simple graph. Immutable after construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<String>,
    index: BTreeMap<String, usize>,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge iterator. Self-loops are dropped and
    /// repeated pairs collapse to a single edge. Every endpoint becomes a node.
    pub fn from_edges<I, S>(edges: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        Self::build(std::iter::empty::<String>(), edges)
    }

    /// Like [`Graph::from_edges`] but also adds `nodes`, which may be isolated.
    pub fn build<N, I, S>(nodes: N, edges: I) -> Self
    where
        N: IntoIterator,
        N::Item: AsRef<str>,
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
        let mut ids: BTreeSet<String> = nodes.into_iter().map(|n| n.as_ref().to_owned()).collect();
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            if a == b {
                continue;
            }
            ids.insert(a.to_owned());
            ids.insert(b.to_owned());
            let pair = if a < b { (a.to_owned(), b.to_owned()) } else { (b.to_owned(), a.to_owned()) };
            pairs.insert(pair);
        }
        let ids: Vec<String> = ids.into_iter().collect();
        let index: BTreeMap<String, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        for (a, b) in &pairs {
            let (i, j) = (index[a], index[b]);
            adj[i].push(j);
            adj[j].push(i);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        Graph { ids, index, adj, edge_count: pairs.len() }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Node ids in ascending order.
    pub fn nodes(&self) -> &[String] {
        &self.ids
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownNode(id.to_owned()))
    }

    pub fn id(&self, idx: usize) -> &str {
        &self.ids[idx]
    }

    /// Sorted neighbor indices of node `idx`.
    pub fn neighbors(&self, idx: usize) -> &[usize] {
        &self.adj[idx]
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => self.adj[i].binary_search(&j).is_ok(),
            _ => false,
        }
    }

    /// Edges as index pairs `(i, j)` with `i < j`, in ascending order.
    pub fn edge_indices(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (i, nbrs) in self.adj.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    /// Edges as id pairs with the smaller id first.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edge_indices().into_iter().map(move |(i, j)| (self.id(i), self.id(j)))
    }

    /// `|Γ(v)|`, the size of the neighbor set.
    pub fn degree(&self, id: &str) -> Result<usize> {
        Ok(self.adj[self.index_of(id)?].len())
    }

    /// Serializes to the tab-separated edge-list format, one edge per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{a}\t{b}");
        }
        out
    }

    pub fn parse_edge_list(text: &str, origin: &Path) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split('\t');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) if valid_token(a) && valid_token(b) => {
                    edges.push((a.to_owned(), b.to_owned()))
                }
                _ => {
                    return Err(Error::Parse {
                        path: origin.to_path_buf(),
                        line: lineno + 1,
                        message: format!("expected `<node-id>\\t<node-id>`, got {line:?}"),
                    })
                }
            }
        }
        Ok(Graph::from_edges(edges))
    }

    pub fn read_edge_list(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_edge_list(&text, path)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_edge_list()).map_err(|e| Error::io(path, e))
    }
}

fn valid_token(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_graphic())
}

/// The seven node-level measures of one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMetrics {
    pub degree: usize,
    pub betweenness: f64,
    pub closeness: f64,
    pub coreness: usize,
    pub eccentricity: usize,
    pub is_articulation: bool,
    pub avg_min_cut: f64,
}

/// Computes every measure for every node. Values are identical to calling
/// the individual measure functions.
pub fn all_metrics(g: &Graph) -> BTreeMap<String, NodeMetrics> {
    all_metrics_with(g, &MinCutOptions::default()).0
}

pub fn all_metrics_with(
    g: &Graph,
    opts: &MinCutOptions,
) -> (BTreeMap<String, NodeMetrics>, MinCutSummary) {
    let betweenness = betweenness_indexed(g);
    let coreness = coreness_indexed(g);
    let articulation = articulation_flags(g);
    let (min_cut, summary) = avg_min_cut_all(g, opts);
    let mut out = BTreeMap::new();
    for v in 0..g.node_count() {
        let dist = bfs_distances(g, v);
        out.insert(
            g.id(v).to_owned(),
            NodeMetrics {
                degree: g.neighbors(v).len(),
                betweenness: betweenness[v],
                closeness: distance::closeness_from(&dist),
                coreness: coreness[v],
                eccentricity: distance::eccentricity_from(&dist),
                is_articulation: articulation[v],
                avg_min_cut: min_cut[v],
            },
        );
    }
    (out, summary)
}

pub const METRICS_HEADER: [&str; 8] = [
    "node_id",
    "degree",
    "betweenness",
    "closeness",
    "coreness",
    "eccentricity",
    "is_articulation",
    "avg_min_cut",
];

pub fn write_metrics_csv<W: std::io::Write>(
    metrics: &BTreeMap<String, NodeMetrics>,
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(METRICS_HEADER)?;
    for (id, m) in metrics {
        w.write_record([
            id.clone(),
            m.degree.to_string(),
            m.betweenness.to_string(),
            m.closeness.to_string(),
            m.coreness.to_string(),
            m.eccentricity.to_string(),
            m.is_articulation.to_string(),
            m.avg_min_cut.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<metrics>", e))?;
    Ok(())
}
