use std::collections::BTreeSet;

use super::Graph;

/// Cut vertices: nodes whose removal increases the number of components.
pub fn articulation_points(g: &Graph) -> BTreeSet<String> {
    articulation_flags(g)
        .into_iter()
        .enumerate()
        .filter(|&(_, cut)| cut)
        .map(|(v, _)| g.id(v).to_owned())
        .collect()
}

/// Per-index articulation flags from an iterative DFS low-link pass.
pub fn articulation_flags(g: &Graph) -> Vec<bool> {
    let n = g.node_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut timer = 0;
    // (node, parent, next neighbor offset)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut root_children = 0;
        stack.push((root, usize::MAX, 0));
        while let Some(&mut (v, parent, ref mut next)) = stack.last_mut() {
            let nbrs = g.neighbors(v);
            if *next < nbrs.len() {
                let w = nbrs[*next];
                *next += 1;
                if w == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= disc[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    is_cut
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(articulation_points(&path3()), BTreeSet::from(["b".to_owned()]));
        assert!(articulation_points(&cycle4()).is_empty());
        let bowtie = Graph::from_edges([
            ("a", "b"), ("b", "w"), ("w", "a"),
            ("w", "c"), ("c", "d"), ("d", "w"),
        ]);
        assert_eq!(articulation_points(&bowtie), BTreeSet::from(["w".to_owned()]));
        assert!(articulation_points(&Graph::default()).is_empty());
    }

    #[test]
    fn long_path_does_not_overflow_stack() {
        let ids: Vec<String> = (0..50_000).map(|i| format!("n{i:05}")).collect();
        let g = Graph::from_edges(ids.windows(2).map(|w| (w[0].clone(), w[1].clone())));
        assert_eq!(articulation_points(&g).len(), 49_998);
    }
}
