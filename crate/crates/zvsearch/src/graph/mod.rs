//! Simple undirected graphs with stable string labels.
//!
//! Vertices are stored in label order, so the integer id of a vertex is its
//! rank under [`label_cmp`]. Every algorithm in the crate iterates in id
//! order, which makes outputs reproducible.

mod blocks;
mod paths;
mod quotient;
mod subdivide;

pub use blocks::{blocks, bridges, is_bridged, separating_bridges, BlockCutTree};
pub use paths::{internally_disjoint_paths, shortest_path, two_disjoint_paths};
pub use quotient::{quotient, EquivalenceSpec, Quotient};
pub use subdivide::{subdivide, subdivide_uniform, subdivision_label, EdgeCounts, SubdividedGraph};

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::error::{input, Result};

/// A set of vertex ids of one graph.
pub type VertexSet = FixedBitSet;

/// Natural ordering on labels: runs of ASCII digits compare numerically, so
/// `v9 < v10` and `(0,1)#2 < (0,1)#10`. Ties fall back to byte order, which
/// keeps the order total and consistent with string equality.
pub fn label_cmp(a: &str, b: &str) -> Ordering {
    let (x, y) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        if x[i].is_ascii_digit() && y[j].is_ascii_digit() {
            let si = i;
            while i < x.len() && x[i].is_ascii_digit() {
                i += 1;
            }
            let sj = j;
            while j < y.len() && y[j].is_ascii_digit() {
                j += 1;
            }
            let da = trim_zeros(&x[si..i]);
            let db = trim_zeros(&y[sj..j]);
            let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            if x[i] != y[j] {
                return x[i].cmp(&y[j]);
            }
            i += 1;
            j += 1;
        }
    }
    (x.len() - i).cmp(&(y.len() - j)).then_with(|| x.cmp(y))
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let k = d.iter().take_while(|&&c| c == b'0').count();
    &d[k.min(d.len().saturating_sub(1))..]
}

/// Finite simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an explicit vertex list plus edges. Endpoints not
    /// listed among `vertices` are added. Repeated edges collapse; loops are
    /// rejected.
    pub fn new<V, E, S, T>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = S>,
        E: IntoIterator<Item = (T, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let mut labels: Vec<String> = vertices.into_iter().map(|s| s.as_ref().to_string()).collect();
        let mut raw = Vec::new();
        for (u, v) in edges {
            let (u, v) = (u.as_ref().to_string(), v.as_ref().to_string());
            if u == v {
                return input(format!("self-loop at vertex {u}"));
            }
            labels.push(u.clone());
            labels.push(v.clone());
            raw.push((u, v));
        }
        labels.sort_by(|a, b| label_cmp(a, b));
        labels.dedup();
        if let Some(bad) = labels.iter().find(|l| l.is_empty() || l.chars().any(char::is_whitespace)) {
            return input(format!("invalid vertex label {bad:?}"));
        }
        let index: HashMap<String, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        let mut adj = vec![Vec::new(); labels.len()];
        for (u, v) in &raw {
            let (a, b) = (index[u], index[v]);
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { labels, index, adj })
    }

    /// Builds a graph whose vertices are exactly the edge endpoints.
    pub fn from_edges<T: AsRef<str>>(edges: &[(T, T)]) -> Result<Self> {
        Self::new(
            Vec::<String>::new(),
            edges.iter().map(|(u, v)| (u.as_ref(), v.as_ref())),
        )
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Looks up a label, turning a miss into an input error.
    pub fn require(&self, label: &str) -> Result<usize> {
        match self.id(label) {
            Some(v) => Ok(v),
            None => input(format!("unknown vertex {label:?}")),
        }
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn label_edges(&self) -> Vec<(String, String)> {
        self.edges()
            .into_iter()
            .map(|(u, v)| (self.labels[u].clone(), self.labels[v].clone()))
            .collect()
    }

    pub fn empty_set(&self) -> VertexSet {
        FixedBitSet::with_capacity(self.n())
    }

    pub fn full_set(&self) -> VertexSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn set_of(&self, ids: impl IntoIterator<Item = usize>) -> VertexSet {
        let mut s = self.empty_set();
        for v in ids {
            s.insert(v);
        }
        s
    }

    pub fn set_from_labels<I, S>(&self, labels: I) -> Result<VertexSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut s = self.empty_set();
        for l in labels {
            s.insert(self.require(l.as_ref())?);
        }
        Ok(s)
    }

    pub fn set_labels(&self, s: &VertexSet) -> Vec<String> {
        s.ones().map(|v| self.labels[v].clone()).collect()
    }

    /// Subgraph induced by `keep`.
    pub fn induced(&self, keep: &VertexSet) -> Graph {
        let verts: Vec<&str> = keep.ones().map(|v| self.labels[v].as_str()).collect();
        let edges = self
            .edges()
            .into_iter()
            .filter(|&(u, v)| keep.contains(u) && keep.contains(v))
            .map(|(u, v)| (self.labels[u].as_str(), self.labels[v].as_str()));
        Graph::new(verts, edges).expect("induced subgraph of a valid graph")
    }

    /// Subgraph formed by the given edges and their endpoints.
    pub fn edge_subgraph(&self, edges: &[(usize, usize)]) -> Graph {
        let e: Vec<(&str, &str)> = edges
            .iter()
            .map(|&(u, v)| (self.labels[u].as_str(), self.labels[v].as_str()))
            .collect();
        Graph::from_edges(&e).expect("edge subgraph of a valid graph")
    }
}

/// Vertices of `s` with a neighbour outside `s`.
pub fn boundary(g: &Graph, s: &VertexSet) -> VertexSet {
    let mut out = g.empty_set();
    for v in s.ones() {
        if g.neighbors(v).iter().any(|&w| !s.contains(w)) {
            out.insert(v);
        }
    }
    out
}

/// Label-level wrapper around [`boundary`].
pub fn boundary_labels(g: &Graph, s: &[&str]) -> Result<Vec<String>> {
    let set = g.set_from_labels(s)?;
    Ok(g.set_labels(&boundary(g, &set)))
}

/// BFS distances from `v`, restricted to `allowed` when given.
pub fn distances(g: &Graph, v: usize, allowed: Option<&VertexSet>) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[v] = Some(0);
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap_or(0);
        for &w in g.neighbors(u) {
            if dist[w].is_none() && allowed.is_none_or(|a| a.contains(w)) {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// All vertices within distance `r` of `v`.
pub fn ball(g: &Graph, v: usize, r: usize) -> VertexSet {
    let dist = distances(g, v, None);
    g.set_of((0..g.n()).filter(|&u| dist[u].is_some_and(|d| d <= r)))
}

/// Connected components of the subgraph induced by `allowed` (all vertices
/// when `None`), each sorted, ordered by smallest member.
pub fn components(g: &Graph, allowed: Option<&VertexSet>) -> Vec<Vec<usize>> {
    let mut seen = g.empty_set();
    let mut out = Vec::new();
    for s in 0..g.n() {
        if seen.contains(s) || allowed.is_some_and(|a| !a.contains(s)) {
            continue;
        }
        let mut comp = vec![s];
        seen.insert(s);
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for &w in g.neighbors(u) {
                if !seen.contains(w) && allowed.is_none_or(|a| a.contains(w)) {
                    seen.insert(w);
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn is_connected(g: &Graph) -> bool {
    g.n() <= 1 || components(g, None).len() == 1
}
