use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows trees until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features tried per split; `None` means `round(sqrt(#features))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            max_features: None,
            bootstrap: true,
            seed: 42,
        }
    }
}

/// One node of a tree. Internal nodes carry a split (`value <= threshold`
/// goes left); every node records the class counts `[stay, leave]` of the
/// training samples that reached it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub feature: Option<usize>,
    pub threshold: f64,
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub leaf_class_counts: [usize; 2],
}

/// Nodes are stored in an arena; index 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> bool {
        let mut idx = 0;
        loop {
            let node = &self.nodes[idx];
            match (node.feature, node.left, node.right) {
                (Some(f), Some(l), Some(r)) => idx = if x[f] <= node.threshold { l } else { r },
                _ => {
                    let [stay, leave] = node.leaf_class_counts;
                    return leave > stay;
                }
            }
        }
    }

    /// Sample-weighted Gini decrease per feature, normalized by the root's
    /// sample count.
    pub fn impurity_decrease(&self, n_features: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_features];
        let root_n = total(&self.nodes[0].leaf_class_counts) as f64;
        for node in &self.nodes {
            if let (Some(f), Some(l), Some(r)) = (node.feature, node.left, node.right) {
                let weighted = |c: &[usize; 2]| total(c) as f64 * gini(c);
                let dec = weighted(&node.leaf_class_counts)
                    - weighted(&self.nodes[l].leaf_class_counts)
                    - weighted(&self.nodes[r].leaf_class_counts);
                out[f] += dec.max(0.0) / root_n;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub n_features: usize,
    pub trees: Vec<Tree>,
}

impl Forest {
    /// Fraction of trees voting "leave".
    pub fn probability(&self, x: &[f64]) -> f64 {
        let votes = self.trees.iter().filter(|t| t.predict(x)).count();
        votes as f64 / self.trees.len() as f64
    }

    /// Mean of the per-tree normalized impurity decreases, renormalized to
    /// sum to 1. A forest without any split spreads weight uniformly.
    pub fn importances(&self) -> Vec<f64> {
        let d = self.n_features;
        let mut acc = vec![0.0; d];
        for tree in &self.trees {
            let dec = tree.impurity_decrease(d);
            let sum: f64 = dec.iter().sum();
            if sum > 0.0 {
                for (a, v) in acc.iter_mut().zip(dec) {
                    *a += v / sum;
                }
            }
        }
        let sum: f64 = acc.iter().sum();
        if sum > 0.0 {
            acc.iter().map(|v| v / sum).collect()
        } else {
            vec![1.0 / d as f64; d]
        }
    }
}

fn total(c: &[usize; 2]) -> usize {
    c[0] + c[1]
}

fn gini(c: &[usize; 2]) -> f64 {
    let n = total(c);
    if n == 0 {
        return 0.0;
    }
    let p = c[1] as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

fn counts(y: &[bool], idx: &[usize]) -> [usize; 2] {
    let leave = idx.iter().filter(|&&i| y[i]).count();
    [idx.len() - leave, leave]
}

/// splitmix64 step; derives independent per-tree seeds from the master seed.
fn derive_seed(master: u64, i: u64) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(i + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn train(x: &[Vec<f64>], y: &[bool], cfg: &ForestConfig) -> Forest {
    let n = x.len();
    let d = x.first().map_or(0, Vec::len);
    let mtry = cfg
        .max_features
        .unwrap_or_else(|| ((d as f64).sqrt().round() as usize).max(1))
        .clamp(1, d.max(1));
    let trees = (0..cfg.n_trees.max(1))
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, t as u64));
            let sample: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow(x, y, sample, d, mtry, cfg, &mut rng)
        })
        .collect();
    Forest { n_features: d, trees }
}

struct Split {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

fn grow(
    x: &[Vec<f64>],
    y: &[bool],
    root: Vec<usize>,
    d: usize,
    mtry: usize,
    cfg: &ForestConfig,
    rng: &mut ChaCha8Rng,
) -> Tree {
    let mut nodes = vec![TreeNode {
        feature: None,
        threshold: 0.0,
        left: None,
        right: None,
        leaf_class_counts: counts(y, &root),
    }];
    // (node index, samples, depth)
    let mut work = vec![(0usize, root, 0usize)];
    let mut features: Vec<usize> = (0..d).collect();
    while let Some((id, samples, depth)) = work.pop() {
        let c = nodes[id].leaf_class_counts;
        let stop = c[0] == 0
            || c[1] == 0
            || samples.len() < cfg.min_samples_split.max(2)
            || cfg.max_depth.is_some_and(|m| depth >= m);
        if stop {
            continue;
        }
        features.shuffle(rng);
        let Some(split) = best_split(x, y, &samples, &features, mtry) else {
            continue;
        };
        let (left, right): (Vec<usize>, Vec<usize>) =
            samples.iter().partition(|&&i| x[i][split.feature] <= split.threshold);
        let l = nodes.len();
        for side in [&left, &right] {
            nodes.push(TreeNode {
                feature: None,
                threshold: 0.0,
                left: None,
                right: None,
                leaf_class_counts: counts(y, side),
            });
        }
        let node = &mut nodes[id];
        node.feature = Some(split.feature);
        node.threshold = split.threshold;
        node.left = Some(l);
        node.right = Some(l + 1);
        work.push((l + 1, right, depth + 1));
        work.push((l, left, depth + 1));
    }
    Tree { nodes }
}

/// Examines features in the shuffled order. At least `mtry` features with a
/// valid split are tried; constant features do not count toward `mtry`.
fn best_split(
    x: &[Vec<f64>],
    y: &[bool],
    samples: &[usize],
    features: &[usize],
    mtry: usize,
) -> Option<Split> {
    let parent = counts(y, samples);
    let n = samples.len() as f64;
    let parent_impurity = gini(&parent);
    let mut best: Option<Split> = None;
    let mut tried = 0;
    let mut sorted: Vec<(f64, bool)> = Vec::with_capacity(samples.len());
    for &f in features {
        if tried >= mtry {
            break;
        }
        sorted.clear();
        sorted.extend(samples.iter().map(|&i| (x[i][f], y[i])));
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if sorted[0].0 == sorted[sorted.len() - 1].0 {
            continue;
        }
        tried += 1;
        let mut left = [0usize; 2];
        for k in 0..sorted.len() - 1 {
            left[sorted[k].1 as usize] += 1;
            let (lo, hi) = (sorted[k].0, sorted[k + 1].0);
            if lo == hi {
                continue;
            }
            let right = [parent[0] - left[0], parent[1] - left[1]];
            let nl = total(&left) as f64;
            let nr = total(&right) as f64;
            let decrease = parent_impurity - (nl / n) * gini(&left) - (nr / n) * gini(&right);
            if best.as_ref().is_none_or(|b| decrease > b.decrease) {
                let mid = lo + (hi - lo) / 2.0;
                let threshold = if mid < hi { mid } else { lo };
                best = Some(Split { feature: f, threshold, decrease });
            }
        }
    }
    best
}
