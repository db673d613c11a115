use std::collections::BTreeMap;

use super::Graph;
use crate::error::{input, Result};

/// Per-edge subdivision counts keyed by `(u, v)` with `u < v`.
pub type EdgeCounts = BTreeMap<(usize, usize), usize>;

/// Label of the `i`-th (1-based) subdivision vertex on base edge `u`–`v`,
/// counted from whichever endpoint sorts first.
pub fn subdivision_label(u: &str, v: &str, i: usize) -> String {
    let (a, b) = if super::label_cmp(u, v).is_le() { (u, v) } else { (v, u) };
    format!("({a},{b})#{i}")
}

/// A base graph with some edges replaced by paths.
#[derive(Clone, Debug)]
pub struct SubdividedGraph {
    pub base: Graph,
    pub derived: Graph,
    counts: EdgeCounts,
    // derived id -> (base edge, position) for subdivision vertices
    origin: Vec<Option<((usize, usize), usize)>>,
    base_in_derived: Vec<usize>,
}

impl SubdividedGraph {
    /// Subdivision count of a base edge (0 for non-edges).
    pub fn count(&self, u: usize, v: usize) -> usize {
        self.counts.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    /// Counts for every base edge, zeros included.
    pub fn counts(&self) -> &EdgeCounts {
        &self.counts
    }

    /// Derived id of a base vertex.
    pub fn lift(&self, v: usize) -> usize {
        self.base_in_derived[v]
    }

    /// Base vertex behind a derived vertex, if it is not a subdivision vertex.
    pub fn base_vertex(&self, x: usize) -> Option<usize> {
        match self.origin[x] {
            None => self.base.id(self.derived.label(x)),
            Some(_) => None,
        }
    }

    /// Base edge carrying a subdivision vertex, with its position from the
    /// smaller endpoint.
    pub fn base_edge_of(&self, x: usize) -> Option<((usize, usize), usize)> {
        self.origin[x]
    }

    /// Derived vertices along the subdivided edge, from `u` to `v` inclusive.
    pub fn edge_path(&self, u: usize, v: usize) -> Vec<usize> {
        let (a, b) = (u.min(v), u.max(v));
        let (la, lb) = (self.base.label(a), self.base.label(b));
        let mut path = vec![self.lift(a)];
        for i in 1..=self.count(a, b) {
            path.push(self.derived.id(&subdivision_label(la, lb, i)).expect("subdivision vertex"));
        }
        path.push(self.lift(b));
        if u > v {
            path.reverse();
        }
        path
    }
}

/// Replaces every base edge `e` by a path with `counts[e]` inner vertices.
pub fn subdivide(g: &Graph, counts: &EdgeCounts) -> Result<SubdividedGraph> {
    let mut full = EdgeCounts::new();
    for (u, v) in g.edges() {
        full.insert((u, v), 0);
    }
    for (&(u, v), &c) in counts {
        let key = (u.min(v), u.max(v));
        if u >= g.n() || v >= g.n() || !g.has_edge(u, v) {
            return input(format!("subdivision count given for non-edge ({u},{v})"));
        }
        full.insert(key, c);
    }
    let mut edges: Vec<(String, String)> = Vec::new();
    for (&(u, v), &c) in &full {
        let (lu, lv) = (g.label(u), g.label(v));
        let mut chain = vec![lu.to_string()];
        chain.extend((1..=c).map(|i| subdivision_label(lu, lv, i)));
        chain.push(lv.to_string());
        for w in chain.windows(2) {
            edges.push((w[0].clone(), w[1].clone()));
        }
    }
    let derived = Graph::new(g.labels().iter(), edges.iter().map(|(a, b)| (a.as_str(), b.as_str())))?;
    let expected = g.n() + full.values().sum::<usize>();
    if derived.n() != expected {
        return input("subdivision labels collide with base labels");
    }
    let mut origin = vec![None; derived.n()];
    for (&(u, v), &c) in &full {
        for i in 1..=c {
            let x = derived.id(&subdivision_label(g.label(u), g.label(v), i)).expect("just added");
            origin[x] = Some(((u, v), i));
        }
    }
    let base_in_derived = (0..g.n()).map(|v| derived.id(g.label(v)).expect("base vertex kept")).collect();
    Ok(SubdividedGraph { base: g.clone(), derived, counts: full, origin, base_in_derived })
}

/// Uniform subdivision of every edge.
pub fn subdivide_uniform(g: &Graph, c: usize) -> SubdividedGraph {
    let counts = g.edges().into_iter().map(|e| (e, c)).collect();
    subdivide(g, &counts).expect("edges of g")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn zero_counts_keep_labels() {
        let g = generate::cycle(4).unwrap();
        let s = subdivide(&g, &EdgeCounts::new()).unwrap();
        assert_eq!(s.derived, g);
    }

    #[test]
    fn single_edge_three_times() {
        let g = Graph::from_edges(&[("b", "a")]).unwrap();
        let s = subdivide(&g, &EdgeCounts::from([((0, 1), 3)])).unwrap();
        assert_eq!(s.derived.n(), 5);
        assert_eq!(s.derived.m(), 4);
        let path: Vec<&str> = s.edge_path(1, 0).iter().map(|&x| s.derived.label(x)).collect();
        assert_eq!(path, ["b", "(a,b)#3", "(a,b)#2", "(a,b)#1", "a"]);
        let mid = s.derived.require("(a,b)#2").unwrap();
        assert_eq!(s.base_edge_of(mid), Some(((0, 1), 2)));
        assert_eq!(s.base_vertex(s.lift(1)), Some(1));
    }

    #[test]
    fn k4_once_each() {
        let s = subdivide_uniform(&generate::complete(4).unwrap(), 1);
        assert_eq!(s.derived.n(), 10);
        for v in 0..4 {
            assert_eq!(s.derived.degree(s.lift(v)), 3);
        }
    }

    #[test]
    fn non_edge_rejected() {
        let g = generate::path(3).unwrap();
        assert!(subdivide(&g, &EdgeCounts::from([((0, 2), 1)])).is_err());
    }
}
