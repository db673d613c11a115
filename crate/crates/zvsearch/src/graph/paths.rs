use std::collections::VecDeque;

use super::{Graph, VertexSet};

// Unit-capacity flow network on split vertices: in(v) = 2v, out(v) = 2v + 1,
// plus a source and a sink at the end.
struct Network {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<i32>,
    next: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl Network {
    fn new(nodes: usize) -> Self {
        Network { head: vec![NIL; nodes], to: vec![], cap: vec![], next: vec![] }
    }

    fn arc(&mut self, u: usize, v: usize) {
        self.arc_cap(u, v, 1);
    }

    fn arc_cap(&mut self, u: usize, v: usize, cap: i32) {
        for (a, b, c) in [(u, v, cap), (v, u, 0)] {
            self.to.push(b);
            self.cap.push(c);
            self.next.push(self.head[a]);
            self.head[a] = self.to.len() - 1;
        }
    }

    fn arcs(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        let mut e = self.head[u];
        std::iter::from_fn(move || {
            (e != NIL).then(|| {
                let cur = e;
                e = self.next[e];
                cur
            })
        })
    }

    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut via = vec![NIL; self.head.len()];
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let arcs: Vec<usize> = self.arcs(u).collect();
            for e in arcs.into_iter().rev() {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    via[v] = e;
                    if v == t {
                        let mut x = t;
                        while x != s {
                            let e = via[x];
                            self.cap[e] -= 1;
                            self.cap[e ^ 1] += 1;
                            x = self.to[e ^ 1];
                        }
                        return true;
                    }
                    queue.push_back(v);
                }
            }
        }
        false
    }

    // Forward arcs (even index) that carry flow.
    fn flow_paths(&mut self, s: usize, t: usize) -> Vec<Vec<usize>> {
        let mut paths = vec![];
        loop {
            let mut walk = vec![s];
            let mut u = s;
            while u != t {
                let e = self.arcs(u).find(|&e| e % 2 == 0 && self.cap[e ^ 1] > 0);
                let Some(e) = e else { return paths };
                self.cap[e ^ 1] -= 1;
                u = self.to[e];
                walk.push(u);
            }
            paths.push(walk);
        }
    }
}

fn build(g: &Graph, allowed: Option<&VertexSet>) -> Network {
    let n = g.n();
    let ok = |v: usize| allowed.is_none_or(|a| a.contains(v));
    let mut net = Network::new(2 * n + 2);
    for v in 0..n {
        if ok(v) {
            net.arc(2 * v, 2 * v + 1);
        }
    }
    for (u, v) in g.edges() {
        if ok(u) && ok(v) {
            net.arc(2 * u + 1, 2 * v);
            net.arc(2 * v + 1, 2 * u);
        }
    }
    net
}

fn to_vertices(walk: &[usize], n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for &x in walk {
        if x < 2 * n && out.last() != Some(&(x / 2)) {
            out.push(x / 2);
        }
    }
    out
}

/// Two vertex-disjoint paths, each starting in `x`, ending in `y`, and
/// otherwise avoiding `x ∪ y`. A vertex in both sets is a one-vertex path.
pub fn two_disjoint_paths(g: &Graph, x: &VertexSet, y: &VertexSet) -> Option<[Vec<usize>; 2]> {
    let n = g.n();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = build(g, None);
    for v in x.ones() {
        net.arc(s, 2 * v);
    }
    for v in y.ones() {
        net.arc(2 * v + 1, t);
    }
    if !(net.augment(s, t) && net.augment(s, t)) {
        return None;
    }
    let mut paths = net.flow_paths(s, t).into_iter().map(|w| {
        let p = to_vertices(&w, n);
        let end = p.iter().position(|&v| y.contains(v)).expect("flow path ends in y");
        let start = p[..=end].iter().rposition(|&v| x.contains(v)).expect("flow path starts in x");
        p[start..=end].to_vec()
    });
    Some([paths.next()?, paths.next()?])
}

/// Up to `k` internally vertex-disjoint `u`–`w` paths through `allowed`
/// (endpoints are always permitted). Fewer are returned when fewer exist.
pub fn internally_disjoint_paths(
    g: &Graph,
    u: usize,
    w: usize,
    k: usize,
    allowed: Option<&VertexSet>,
) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut allow = allowed.cloned().unwrap_or_else(|| g.full_set());
    allow.insert(u);
    allow.insert(w);
    let mut net = build(g, Some(&allow));
    let (s, t) = (2 * n, 2 * n + 1);
    net.arc_cap(s, 2 * u + 1, k as i32);
    net.arc_cap(2 * w, t, k as i32);
    let mut found = 0;
    while found < k && net.augment(s, t) {
        found += 1;
    }
    net.flow_paths(s, t).iter().map(|p| to_vertices(p, n)).collect()
}

/// A shortest `s`–`t` path inside `allowed`, preferring smaller ids on ties.
pub fn shortest_path(g: &Graph, s: usize, t: usize, allowed: Option<&VertexSet>) -> Option<Vec<usize>> {
    let mut prev = vec![NIL; g.n()];
    prev[s] = s;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        if u == t {
            let mut path = vec![t];
            let mut x = t;
            while x != s {
                x = prev[x];
                path.push(x);
            }
            path.reverse();
            return Some(path);
        }
        for &v in g.neighbors(u) {
            if prev[v] == NIL && (v == t || allowed.is_none_or(|a| a.contains(v))) {
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn is_path(g: &Graph, p: &[usize]) -> bool {
        p.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }

    #[test]
    fn opposite_sides_of_c6() {
        let g = generate::cycle(6).unwrap();
        let x = g.set_of([0, 1]);
        let y = g.set_of([3, 4]);
        let [p, q] = two_disjoint_paths(&g, &x, &y).unwrap();
        assert!(is_path(&g, &p) && is_path(&g, &q));
        assert!(p.iter().all(|v| !q.contains(v)));
        let mut ends = vec![p[0], q[0], *p.last().unwrap(), *q.last().unwrap()];
        ends.sort();
        assert_eq!(ends, [0, 1, 3, 4]);
    }

    #[test]
    fn path_endpoints_have_one_route() {
        let g = generate::path(5).unwrap();
        assert!(two_disjoint_paths(&g, &g.set_of([0]), &g.set_of([4])).is_none());
    }

    #[test]
    fn k4_pairs() {
        let g = generate::complete(4).unwrap();
        assert!(two_disjoint_paths(&g, &g.set_of([0, 1]), &g.set_of([2, 3])).is_some());
        let ps = internally_disjoint_paths(&g, 0, 1, 5, None);
        assert_eq!(ps.len(), 3);
        for p in &ps {
            assert!(is_path(&g, p));
            assert_eq!((p[0], *p.last().unwrap()), (0, 1));
        }
    }

    #[test]
    fn overlap_gives_trivial_path() {
        let g = generate::cycle(4).unwrap();
        let [p, q] = two_disjoint_paths(&g, &g.set_of([0, 1]), &g.set_of([1, 2])).unwrap();
        let mut lens = [p.len(), q.len()];
        lens.sort();
        assert_eq!(lens, [1, 3]);
    }

    #[test]
    fn shortest() {
        let g = generate::cycle(6).unwrap();
        assert_eq!(shortest_path(&g, 0, 3, None).unwrap().len(), 4);
        let avoid = g.set_of([0, 1, 2, 3]);
        assert_eq!(shortest_path(&g, 0, 3, Some(&avoid)).unwrap(), [0, 1, 2, 3]);
    }
}
