//! Exhaustive enumeration of small graphs up to isomorphism.
//!
//! Graphs are grown one vertex at a time and deduplicated by a canonical
//! edge mask: the smallest mask over relabelings that keep vertices sorted
//! by a degree-based invariant. Trees use rooted canonical strings at the
//! centre instead, which scales further.

use std::collections::{BTreeSet, HashSet};

use crate::error::{input, Result};
use crate::graph::{is_connected, Graph};

/// Largest order accepted by [`graphs`] and [`connected_graphs`].
pub const MAX_GRAPH_ORDER: usize = 8;
/// Largest order accepted by [`trees`].
pub const MAX_TREE_ORDER: usize = 16;

type Adj = Vec<u16>;

fn pair_index(i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    j * (j - 1) / 2 + i
}

fn mask_of(adj: &Adj, perm: &[usize]) -> u64 {
    let mut m = 0u64;
    for (u, row) in adj.iter().enumerate() {
        for v in 0..u {
            if row >> v & 1 == 1 {
                m |= 1 << pair_index(perm[u], perm[v]);
            }
        }
    }
    m
}

fn canonical(adj: &Adj) -> u64 {
    let n = adj.len();
    let deg: Vec<u32> = adj.iter().map(|r| r.count_ones()).collect();
    let inv: Vec<(u32, Vec<u32>)> = (0..n)
        .map(|v| {
            let mut nd: Vec<u32> = (0..n).filter(|&u| adj[v] >> u & 1 == 1).map(|u| deg[u]).collect();
            nd.sort_unstable();
            (deg[v], nd)
        })
        .collect();
    let keys: BTreeSet<&(u32, Vec<u32>)> = inv.iter().collect();
    let classes: Vec<Vec<usize>> = keys.iter().map(|k| (0..n).filter(|&v| &inv[v] == *k).collect()).collect();
    let mut perm = vec![0; n];
    let mut best = u64::MAX;
    fn assign(classes: &[Vec<usize>], base: usize, perm: &mut Vec<usize>, adj: &Adj, best: &mut u64) {
        let Some(first) = classes.first() else {
            *best = (*best).min(mask_of(adj, perm));
            return;
        };
        let mut order = first.clone();
        permute(&mut order, 0, &mut |o| {
            for (k, &v) in o.iter().enumerate() {
                perm[v] = base + k;
            }
            assign(&classes[1..], base + o.len(), perm, adj, best);
        });
    }
    assign(&classes, 0, &mut perm, adj, &mut best);
    best
}

fn permute(xs: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

fn to_graph(adj: &Adj) -> Graph {
    let n = adj.len();
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut edges = vec![];
    for u in 0..n {
        for v in 0..u {
            if adj[u] >> v & 1 == 1 {
                edges.push((labels[v].as_str(), labels[u].as_str()));
            }
        }
    }
    Graph::new(&labels, edges).expect("enumerated graph")
}

fn all_adj(n: usize) -> Vec<Adj> {
    let mut level: Vec<Adj> = vec![vec![0]];
    for s in 1..n {
        let mut seen = HashSet::new();
        let mut next = vec![];
        for g in &level {
            for nb in 0u16..(1 << s) {
                let mut h = g.clone();
                for (v, row) in h.iter_mut().enumerate() {
                    if nb >> v & 1 == 1 {
                        *row |= 1 << s;
                    }
                }
                h.push(nb);
                if seen.insert(canonical(&h)) {
                    next.push(h);
                }
            }
        }
        level = next;
    }
    level
}

/// All graphs on `n` vertices up to isomorphism, labelled `0..n`.
pub fn graphs(n: usize) -> Result<Vec<Graph>> {
    if n == 0 || n > MAX_GRAPH_ORDER {
        return input(format!("graph enumeration supports 1..={MAX_GRAPH_ORDER} vertices"));
    }
    Ok(all_adj(n).iter().map(to_graph).collect())
}

/// Connected graphs on `n` vertices up to isomorphism.
pub fn connected_graphs(n: usize) -> Result<Vec<Graph>> {
    Ok(graphs(n)?.into_iter().filter(is_connected).collect())
}

/// Trees on `n` vertices up to isomorphism.
pub fn trees(n: usize) -> Result<Vec<Graph>> {
    if n == 0 || n > MAX_TREE_ORDER {
        return input(format!("tree enumeration supports 1..={MAX_TREE_ORDER} vertices"));
    }
    let mut level: Vec<Vec<Vec<usize>>> = vec![vec![vec![]]];
    for s in 1..n {
        let mut seen = HashSet::new();
        let mut next = vec![];
        for t in &level {
            for v in 0..s {
                let mut u = t.clone();
                u[v].push(s);
                u.push(vec![v]);
                if seen.insert(tree_code(&u)) {
                    next.push(u);
                }
            }
        }
        level = next;
    }
    Ok(level
        .iter()
        .map(|t| {
            let labels: Vec<String> = (0..t.len()).map(|i| i.to_string()).collect();
            let edges = t.iter().enumerate().flat_map(|(u, nb)| {
                let labels = &labels;
                nb.iter().filter(move |&&v| u < v).map(move |&v| (labels[u].as_str(), labels[v].as_str()))
            });
            Graph::new(&labels, edges).expect("enumerated tree")
        })
        .collect())
}

fn tree_code(t: &[Vec<usize>]) -> String {
    let n = t.len();
    // peel leaves to find the centre(s)
    let mut deg: Vec<usize> = t.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = vec![];
        for &v in &layer {
            for &u in &t[v] {
                deg[u] -= 1;
                if deg[u] == 1 {
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    fn code(t: &[Vec<usize>], v: usize, parent: usize) -> String {
        let mut kids: Vec<String> = t[v].iter().filter(|&&u| u != parent).map(|&u| code(t, u, v)).collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    layer.iter().map(|&c| code(t, c, usize::MAX)).min().expect("nonempty tree")
}
