//! Series-parallel decompositions of blocks and their rearrangements.

use std::collections::BTreeSet;

use super::{invert, parallel_of, series_of, GspTree, Op};
use crate::error::{input, Result};
use crate::graph::{blocks, components, Graph};

/// Series-parallel decomposition of a 2-connected `K4`-subdivision-free
/// graph (or a single edge) with terminals `a`, `b`, which must be adjacent
/// or separate the graph.
pub fn sp_decompose(g: &Graph, a: &str, b: &str) -> Result<GspTree> {
    let (ia, ib) = (g.require(a)?, g.require(b)?);
    if ia == ib {
        return input("terminals must be distinct");
    }
    if g.n() == 2 && g.m() == 1 {
        return Ok(GspTree::edge(a, b));
    }
    let bct = blocks(g);
    if bct.blocks.len() != 1 || bct.blocks[0].len() != g.n() {
        return input("series-parallel decomposition needs a 2-connected graph");
    }
    sp_rec(g, ia, ib)
}

fn sp_rec(g: &Graph, a: usize, b: usize) -> Result<GspTree> {
    let (la, lb) = (g.label(a), g.label(b));
    if g.n() == 2 {
        return Ok(GspTree::edge(la, lb));
    }
    let mut rest = g.full_set();
    rest.set(a, false);
    rest.set(b, false);
    let comps = components(g, Some(&rest));
    let direct = g.has_edge(a, b);
    if comps.len() + usize::from(direct) < 2 {
        return input(format!("{la} and {lb} are neither adjacent nor separating; a K4 subdivision is present"));
    }
    let mut parts = vec![];
    for c in comps {
        let mut keep = g.set_of(c);
        keep.insert(a);
        keep.insert(b);
        let edges: Vec<(usize, usize)> = g
            .edges()
            .into_iter()
            .filter(|&(u, v)| keep.contains(u) && keep.contains(v) && (u, v) != (a.min(b), a.max(b)))
            .collect();
        let h = g.edge_subgraph(&edges);
        parts.push(chain(&h, la, lb)?);
    }
    if direct {
        parts.push(GspTree::edge(la, lb));
    }
    Ok(parallel_of(parts))
}

// Decomposes a graph whose blocks form a path from `a` to `b`.
fn chain(h: &Graph, a: &str, b: &str) -> Result<GspTree> {
    let (ia, ib) = (h.require(a)?, h.require(b)?);
    let bct = blocks(h);
    let Some((bs, joints)) = bct.block_path(ia, ib) else {
        return input(format!("{a} and {b} are disconnected"));
    };
    if bs.len() != bct.blocks.len() {
        return input("a branch hangs off the terminal path inside a block");
    }
    let mut parts = vec![];
    for (j, &blk) in bs.iter().enumerate() {
        let sub = h.edge_subgraph(&bct.block_edges[blk]);
        let (x, y) = (sub.require(h.label(joints[j]))?, sub.require(h.label(joints[j + 1]))?);
        parts.push(sp_rec(&sub, x, y)?);
    }
    Ok(series_of(parts))
}

/// GSP decomposition of a connected `K4`-subdivision-free graph with
/// terminals `a`, `b` lying in a common block, adjacent or separating it.
/// Every other block is attached with [`merge_block`].
pub fn gsp_decompose(g: &Graph, a: &str, b: &str) -> Result<GspTree> {
    let (ia, ib) = (g.require(a)?, g.require(b)?);
    let bct = blocks(g);
    let shared: Vec<usize> = bct.blocks_of(ia).into_iter().filter(|x| bct.blocks_of(ib).contains(x)).collect();
    let Some(&home) = shared.first() else {
        return input(format!("{a} and {b} lie in no common block"));
    };
    let core = g.edge_subgraph(&bct.block_edges[home]);
    let mut tree = sp_decompose(&core, a, b)?;
    let mut done = vec![false; bct.blocks.len()];
    done[home] = true;
    let mut queue = std::collections::VecDeque::from([home]);
    while let Some(x) = queue.pop_front() {
        for c in bct.cuts_in(x) {
            for y in bct.blocks_of(c) {
                if done[y] {
                    continue;
                }
                done[y] = true;
                queue.push_back(y);
                let blk = g.edge_subgraph(&bct.block_edges[y]);
                let ic = blk.require(g.label(c))?;
                let w = blk.neighbors(ic)[0];
                let part = sp_decompose(&blk, g.label(c), blk.label(w))?;
                tree = merge_block(tree, &part, g.label(c))?;
            }
        }
    }
    Ok(tree)
}

/// Attaches `h`, sharing only the vertex `c` with `g`, where `c` is a
/// terminal of `h`. The new part hangs from a leaf at `c` through a branch
/// operation, so every existing node keeps its complexity.
pub fn merge_block(g: GspTree, h: &GspTree, c: &str) -> Result<GspTree> {
    let h = match h.terminals() {
        (x, _) if x == c => h.clone(),
        (_, y) if y == c => invert(h),
        _ => return input(format!("{c} is not a terminal of the attached part")),
    };
    let vg = g.vertices();
    let vh = h.vertices();
    let common: Vec<&String> = vg.intersection(&vh).collect();
    if common != [c] {
        return input(format!("parts must share exactly {c}, share {common:?}"));
    }
    insert(g, &h, c).map_err(|_| crate::Error::Input(format!("{c} not found")))
}

fn insert(t: GspTree, h: &GspTree, c: &str) -> std::result::Result<GspTree, GspTree> {
    match t {
        GspTree::Edge(ref u, ref v) => {
            if u == c {
                Ok(GspTree::join(Op::Branch, t, h.clone()))
            } else if v == c {
                Ok(GspTree::join(Op::BranchPrime, t, h.clone()))
            } else {
                Err(t)
            }
        }
        GspTree::Node { op, terminals, left, right } => match insert(*left, h, c) {
            Ok(l) => Ok(GspTree::Node { op, terminals, left: Box::new(l), right }),
            Err(l) => match insert(*right, h, c) {
                Ok(r) => Ok(GspTree::Node { op, terminals, left: Box::new(l), right: Box::new(r) }),
                Err(r) => Err(GspTree::Node { op, terminals, left: Box::new(l), right: Box::new(r) }),
            },
        },
    }
}

/// Given simple series-parallel decompositions of `(H, a, b)` and `(K, a, b)`
/// meeting only in `a`, `b`, returns a simple series-parallel decomposition
/// of `H ∪ K` with first terminal `a`.
pub fn rotate_parallel(h: &GspTree, k: &GspTree) -> Result<GspTree> {
    if h.terminals() != k.terminals() {
        return input("rotation needs equal terminals");
    }
    for t in [h, k] {
        if !t.is_series_parallel() || !t.is_simple() {
            return input("rotation needs simple series-parallel decompositions");
        }
    }
    let (a, b) = h.terminals();
    let common: BTreeSet<String> = h.vertices().intersection(&k.vertices()).cloned().collect();
    if common != BTreeSet::from([a.to_string(), b.to_string()]) {
        return input("parts must meet exactly in the terminals");
    }
    Ok(rotate(h.clone(), k.clone()))
}

fn rotate(h: GspTree, k: GspTree) -> GspTree {
    let (h, k) = if h.edge_count() > k.edge_count() { (k, h) } else { (h, k) };
    match h {
        GspTree::Edge(..) => GspTree::join(Op::Parallel, k, h),
        GspTree::Node { op: Op::Parallel, left, right, .. } => {
            let (busy, idle) = if right.complexity() == 0 { (*left, *right) } else { (*right, *left) };
            rotate(busy, GspTree::join(Op::Parallel, k, idle))
        }
        series @ GspTree::Node { .. } => {
            let mut parts = vec![];
            flatten_series(series, &mut parts);
            let first = parts.remove(0);
            let mut chain = vec![k];
            chain.extend(parts.iter().rev().map(invert));
            rotate(first, series_of(chain))
        }
    }
}

fn flatten_series(t: GspTree, out: &mut Vec<GspTree>) {
    match t {
        GspTree::Node { op: Op::Series, left, right, .. } => {
            flatten_series(*left, out);
            flatten_series(*right, out);
        }
        other => out.push(other),
    }
}
