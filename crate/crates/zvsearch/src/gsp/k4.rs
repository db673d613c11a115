//! Detection of subdivided `K4`.

use std::collections::BTreeSet;

use super::witness::ForbiddenWitness;
use crate::graph::Graph;

/// Whether `g` has no subdivision of `K4`. Since `K4` is cubic this is the
/// same as having no `K4` minor, which holds exactly when repeatedly deleting
/// vertices of degree at most one and suppressing vertices of degree two
/// empties the graph.
pub fn is_k4_subdivision_free(g: &Graph) -> bool {
    reduces(g.n(), &g.edges())
}

fn reduces(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(u, v) in edges {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    let mut alive = vec![true; n];
    let mut stack: Vec<usize> = (0..n).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] || adj[v].len() > 2 {
            continue;
        }
        alive[v] = false;
        let nb: Vec<usize> = std::mem::take(&mut adj[v]).into_iter().collect();
        for &x in &nb {
            adj[x].remove(&v);
            stack.push(x);
        }
        if let [x, y] = nb[..] {
            adj[x].insert(y);
            adj[y].insert(x);
        }
    }
    alive.iter().all(|a| !a)
}

/// A subdivided `K4` in `g`, if any. Edges are dropped greedily (highest
/// first) while a subdivision survives; what remains is exactly one.
pub fn has_k4_subdivision(g: &Graph) -> Option<ForbiddenWitness> {
    let mut keep = g.edges();
    if reduces(g.n(), &keep) {
        return None;
    }
    let mut i = keep.len();
    while i > 0 {
        i -= 1;
        let e = keep.remove(i);
        if reduces(g.n(), &keep) {
            keep.insert(i, e);
        }
    }
    let h = g.edge_subgraph(&keep);
    let branch: Vec<usize> = (0..h.n()).filter(|&v| h.degree(v) == 3).collect();
    debug_assert_eq!(branch.len(), 4);
    let mut paths = vec![];
    for &s in &branch {
        for &first in h.neighbors(s) {
            let mut path = vec![s, first];
            while h.degree(*path.last().unwrap()) == 2 {
                let (p, c) = (path[path.len() - 2], path[path.len() - 1]);
                let next = h.neighbors(c).iter().copied().find(|&x| x != p).expect("degree two");
                path.push(next);
            }
            if s < *path.last().unwrap() {
                paths.push(path);
            }
        }
    }
    paths.sort();
    let lab = |p: &[usize]| p.iter().map(|&v| h.label(v).to_string()).collect::<Vec<_>>();
    Some(ForbiddenWitness::f1(
        branch.iter().map(|&v| h.label(v).to_string()).collect(),
        paths.iter().map(|p| lab(p)).collect(),
    ))
}
