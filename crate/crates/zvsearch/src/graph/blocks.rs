use super::{components, Graph, VertexSet};

/// Blocks (maximal 2-connected subgraphs or bridges) and cut vertices.
///
/// Isolated vertices belong to no block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCutTree {
    /// Vertex lists, each sorted; blocks ordered by smallest member, then size.
    pub blocks: Vec<Vec<usize>>,
    /// Edges of each block, `(u, v)` with `u < v`, sorted.
    pub block_edges: Vec<Vec<(usize, usize)>>,
    pub cut_vertices: Vec<usize>,
}

impl BlockCutTree {
    pub fn is_cut(&self, v: usize) -> bool {
        self.cut_vertices.binary_search(&v).is_ok()
    }

    /// Indices of blocks containing `v`.
    pub fn blocks_of(&self, v: usize) -> Vec<usize> {
        (0..self.blocks.len())
            .filter(|&b| self.blocks[b].binary_search(&v).is_ok())
            .collect()
    }

    /// Cut vertices lying in block `b`.
    pub fn cuts_in(&self, b: usize) -> Vec<usize> {
        self.blocks[b].iter().copied().filter(|&v| self.is_cut(v)).collect()
    }

    /// Blocks with exactly one cut vertex. Empty when there is a single block.
    pub fn leaf_blocks(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&b| self.cuts_in(b).len() == 1).collect()
    }

    /// Sequence of blocks on the tree path from a block containing `from` to a
    /// block containing `to`, with the cut vertices joining consecutive blocks.
    /// Returns `(blocks, joints)` where `joints.len() == blocks.len() + 1`,
    /// `joints[0] == from` and the last joint is `to`.
    pub fn block_path(&self, from: usize, to: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        let nb = self.blocks.len();
        // Nodes 0..nb are blocks; vertex v maps to nb + v.
        let mut prev: std::collections::HashMap<usize, usize> = Default::default();
        let mut queue = std::collections::VecDeque::new();
        for b in self.blocks_of(from) {
            prev.insert(b, usize::MAX);
            queue.push_back(b);
        }
        let targets = self.blocks_of(to);
        let mut hit = None;
        while let Some(x) = queue.pop_front() {
            if x < nb {
                if targets.contains(&x) {
                    hit = Some(x);
                    break;
                }
                for c in self.cuts_in(x) {
                    if c != from && !prev.contains_key(&(nb + c)) {
                        prev.insert(nb + c, x);
                        queue.push_back(nb + c);
                    }
                }
            } else {
                for b in self.blocks_of(x - nb) {
                    if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(b) {
                        e.insert(x);
                        queue.push_back(b);
                    }
                }
            }
        }
        let mut x = hit?;
        let mut blocks = vec![];
        let mut joints = vec![to];
        loop {
            blocks.push(x);
            let p = prev[&x];
            if p == usize::MAX {
                break;
            }
            joints.push(p - nb);
            x = prev[&p];
        }
        joints.push(from);
        blocks.reverse();
        joints.reverse();
        Some((blocks, joints))
    }
}

/// Biconnected components by the lowpoint method with an explicit edge stack.
pub fn blocks(g: &Graph) -> BlockCutTree {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut found: Vec<Vec<(usize, usize)>> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX || g.degree(root) == 0 {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // (vertex, parent, next neighbour index)
        let mut frames = vec![(root, usize::MAX, 0usize)];
        while let Some(top) = frames.last_mut() {
            let (v, parent) = (top.0, top.1);
            if top.2 < g.degree(v) {
                let w = g.neighbors(v)[top.2];
                top.2 += 1;
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    frames.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                frames.pop();
                if let Some(up) = frames.last() {
                    let u = up.0;
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let mut block = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            block.push((e.0.min(e.1), e.0.max(e.1)));
                            if e == (u, v) {
                                break;
                            }
                        }
                        found.push(block);
                    }
                }
            }
        }
    }
    let mut pairs: Vec<(Vec<usize>, Vec<(usize, usize)>)> = found
        .into_iter()
        .map(|mut edges| {
            edges.sort_unstable();
            let mut verts: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
            verts.sort_unstable();
            verts.dedup();
            (verts, edges)
        })
        .collect();
    pairs.sort_by(|a, b| a.0[0].cmp(&b.0[0]).then(a.0.len().cmp(&b.0.len())).then(a.0.cmp(&b.0)));
    let mut count = vec![0usize; n];
    for (verts, _) in &pairs {
        for &v in verts {
            count[v] += 1;
        }
    }
    let cut_vertices = (0..n).filter(|&v| count[v] > 1).collect();
    let (blocks, block_edges) = pairs.into_iter().unzip();
    BlockCutTree { blocks, block_edges, cut_vertices }
}

/// Bridges of `g`, each `(u, v)` with `u < v`.
pub fn bridges(g: &Graph) -> Vec<(usize, usize)> {
    blocks(g)
        .block_edges
        .into_iter()
        .filter(|e| e.len() == 1)
        .map(|e| e[0])
        .collect()
}

/// Bridges whose removal disconnects `s` from `t`, ordered by distance of the
/// nearer endpoint from `s`, then by endpoints.
pub fn separating_bridges(g: &Graph, s: usize, t: usize) -> Vec<(usize, usize)> {
    let dist = super::distances(g, s, None);
    if dist[t].is_none() {
        return vec![];
    }
    let mut out: Vec<(usize, usize)> = bridges(g)
        .into_iter()
        .filter(|&(u, v)| {
            let without = g.edge_subgraph(
                &g.edges().into_iter().filter(|&e| e != (u, v)).collect::<Vec<_>>(),
            );
            match (without.id(g.label(s)), without.id(g.label(t))) {
                (Some(a), Some(b)) => super::distances(&without, a, None)[b].is_none(),
                _ => true,
            }
        })
        .collect();
    out.sort_by_key(|&(u, v)| (dist[u].min(dist[v]), u, v));
    out
}

/// Whether some bridge separates `s` from `t`. Computed by contracting the
/// 2-edge-connected components: the pair is bridged exactly when `s` and `t`
/// are connected but lie in different components once bridges are removed.
pub fn is_bridged(g: &Graph, s: usize, t: usize) -> bool {
    if super::distances(g, s, None)[t].is_none() {
        return false;
    }
    let br = bridges(g);
    let keep: Vec<(usize, usize)> = g.edges().into_iter().filter(|e| !br.contains(e)).collect();
    let mut comp = vec![usize::MAX; g.n()];
    let h = strip(g, &keep);
    for (i, c) in components(&h, None).into_iter().enumerate() {
        for v in c {
            comp[v] = i;
        }
    }
    comp[s] != comp[t]
}

// Same vertex ids as `g`, restricted edge set.
fn strip(g: &Graph, keep: &[(usize, usize)]) -> Graph {
    Graph::new(
        g.labels().iter().map(String::as_str),
        keep.iter().map(|&(u, v)| (g.label(u), g.label(v))),
    )
    .expect("subgraph of a valid graph")
}

#[allow(dead_code)]
pub(crate) fn without(g: &Graph, drop: &VertexSet) -> Graph {
    let mut keep = g.full_set();
    keep.difference_with(drop);
    g.induced(&keep)
}
