//! Forbidden-structure witnesses, their checker, and a brute-force oracle.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{GspTree, Op};
use crate::error::{input, Error, Result};
use crate::graph::{blocks, internally_disjoint_paths, label_cmp, Graph};

/// The three families of forbidden topological minors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// Subdivided `K4`.
    F1,
    /// Three bipaths with common endpoints.
    F2,
    /// Two pairs of bipaths joined by two paths.
    F3,
}

/// A bipath given by its primary vertices and, for each consecutive pair,
/// the two internally disjoint paths joining them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipathRole {
    pub primaries: Vec<String>,
    pub segments: Vec<[Vec<String>; 2]>,
}

impl BipathRole {
    pub fn start(&self) -> &str {
        &self.primaries[0]
    }

    pub fn end(&self) -> &str {
        self.primaries.last().expect("nonempty")
    }

    pub fn reversed(&self) -> BipathRole {
        let rev = |p: &Vec<String>| p.iter().rev().cloned().collect::<Vec<_>>();
        BipathRole {
            primaries: self.primaries.iter().rev().cloned().collect(),
            segments: self.segments.iter().rev().map(|[x, y]| [rev(x), rev(y)]).collect(),
        }
    }

    /// Orients the bipath to start at `from`.
    pub fn from(self, from: &str) -> BipathRole {
        if self.start() == from {
            self
        } else {
            self.reversed()
        }
    }

    pub fn vertices(&self) -> BTreeSet<String> {
        self.segments.iter().flatten().flatten().cloned().collect()
    }
}

/// A forbidden structure embedded in a graph, with every vertex assigned a role.
///
/// * `F1`: four branch vertices and six connector paths, one per pair.
/// * `F2`: branch vertices `[a, b]` and three bipaths from `a` to `b`.
/// * `F3`: branch vertices `[v1, v2, v3, v4]`, bipaths 0 and 1 from `v1` to
///   `v2`, bipaths 2 and 3 from `v3` to `v4`, connectors `v1`–`v3` and
///   `v2`–`v4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenWitness {
    pub family: Family,
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub branch_vertices: Vec<String>,
    pub bipaths: Vec<BipathRole>,
    pub connectors: Vec<Vec<String>>,
}

fn norm(u: &str, v: &str) -> (String, String) {
    if label_cmp(u, v).is_le() {
        (u.to_string(), v.to_string())
    } else {
        (v.to_string(), u.to_string())
    }
}

fn path_edges(p: &[String], out: &mut BTreeSet<(String, String)>) {
    for w in p.windows(2) {
        out.insert(norm(&w[0], &w[1]));
    }
}

impl ForbiddenWitness {
    fn assemble(family: Family, branch: Vec<String>, bipaths: Vec<BipathRole>, connectors: Vec<Vec<String>>) -> Self {
        let mut edges = BTreeSet::new();
        for b in &bipaths {
            for p in b.segments.iter().flatten() {
                path_edges(p, &mut edges);
            }
        }
        for p in &connectors {
            path_edges(p, &mut edges);
        }
        let mut vertices: Vec<String> = edges.iter().flat_map(|(u, v)| [u.clone(), v.clone()]).collect();
        vertices.sort_by(|a, b| label_cmp(a, b));
        vertices.dedup();
        let mut edges: Vec<(String, String)> = edges.into_iter().collect();
        edges.sort_by(|x, y| label_cmp(&x.0, &y.0).then_with(|| label_cmp(&x.1, &y.1)));
        ForbiddenWitness { family, vertices, edges, branch_vertices: branch, bipaths, connectors }
    }

    pub fn f1(branch: Vec<String>, paths: Vec<Vec<String>>) -> Self {
        Self::assemble(Family::F1, branch, vec![], paths)
    }

    /// Bipaths are reoriented to run from `a` to `b`.
    pub fn f2(a: &str, b: &str, bipaths: Vec<BipathRole>) -> Self {
        let bs = bipaths.into_iter().map(|x| x.from(a)).collect();
        Self::assemble(Family::F2, vec![a.into(), b.into()], bs, vec![])
    }

    /// `pair0` joins `v[0]`, `v[1]`; `pair1` joins `v[2]`, `v[3]`; `p1` runs
    /// `v[0]` to `v[2]` and `p2` runs `v[1]` to `v[3]`.
    pub fn f3(v: [String; 4], pair0: [BipathRole; 2], pair1: [BipathRole; 2], p1: Vec<String>, p2: Vec<String>) -> Self {
        let [x0, x1] = pair0;
        let [x2, x3] = pair1;
        let bs = vec![x0.from(&v[0]), x1.from(&v[0]), x2.from(&v[2]), x3.from(&v[2])];
        Self::assemble(Family::F3, v.to_vec(), bs, vec![p1, p2])
    }

    pub fn graph(&self) -> Graph {
        Graph::new(&self.vertices, self.edges.iter().map(|(u, v)| (u.as_str(), v.as_str()))).expect("witness edges")
    }
}

fn bad<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(format!("witness: {}", msg.into())))
}

// A simple path with at least one edge, all of whose edges are in `edges`.
fn check_path(p: &[String], edges: &BTreeSet<(String, String)>) -> Result<()> {
    if p.len() < 2 {
        return bad("path with no edge");
    }
    let distinct: BTreeSet<&String> = p.iter().collect();
    if distinct.len() != p.len() {
        return bad(format!("path {p:?} repeats a vertex"));
    }
    for w in p.windows(2) {
        if !edges.contains(&norm(&w[0], &w[1])) {
            return bad(format!("{}-{} is not a witness edge", w[0], w[1]));
        }
    }
    Ok(())
}

fn interior(p: &[String]) -> &[String] {
    &p[1..p.len() - 1]
}

// Validates one bipath and returns its interior vertices (everything except
// the two ends).
fn check_bipath(b: &BipathRole, edges: &BTreeSet<(String, String)>) -> Result<BTreeSet<String>> {
    let k = b.primaries.len();
    if k < 3 {
        return bad("bipath of order below 3");
    }
    if b.segments.len() != k - 1 {
        return bad("bipath needs one segment per consecutive primary pair");
    }
    let mut inner: BTreeSet<String> = b.primaries[1..k - 1].iter().cloned().collect();
    if inner.len() != k - 2 || inner.contains(b.start()) || inner.contains(b.end()) || b.start() == b.end() {
        return bad("bipath primaries repeat");
    }
    for (j, pair) in b.segments.iter().enumerate() {
        for p in pair {
            check_path(p, edges)?;
            if p[0] != b.primaries[j] || p[p.len() - 1] != b.primaries[j + 1] {
                return bad(format!("segment {j} does not join consecutive primaries"));
            }
        }
        if pair[0] == pair[1] || (pair[0].len() == 2 && pair[1].len() == 2) {
            return bad(format!("segment {j} paths are not edge-disjoint"));
        }
        for v in interior(&pair[0]).iter().chain(interior(&pair[1])) {
            if !inner.insert(v.clone()) {
                return bad(format!("vertex {v} used twice inside a bipath"));
            }
        }
    }
    Ok(inner)
}

/// Validates the role assignment and that the roles cover exactly the
/// witness edge set.
pub fn pattern_check(w: &ForbiddenWitness) -> Result<()> {
    let edges: BTreeSet<(String, String)> = w.edges.iter().map(|(u, v)| norm(u, v)).collect();
    if edges.len() != w.edges.len() {
        return bad("repeated edge");
    }
    let bv: BTreeSet<&String> = w.branch_vertices.iter().collect();
    if bv.len() != w.branch_vertices.len() {
        return bad("branch vertices repeat");
    }
    let mut used = BTreeSet::new();
    match w.family {
        Family::F1 => {
            if w.branch_vertices.len() != 4 || w.connectors.len() != 6 || !w.bipaths.is_empty() {
                return bad("F1 needs 4 branch vertices and 6 connectors");
            }
            let mut pairs = BTreeSet::new();
            let mut inner = BTreeSet::new();
            for p in &w.connectors {
                check_path(p, &edges)?;
                let ends = norm(&p[0], &p[p.len() - 1]);
                if !bv.contains(&ends.0) || !bv.contains(&ends.1) || !pairs.insert(ends) {
                    return bad("connectors must join distinct pairs of branch vertices");
                }
                for v in interior(p) {
                    if bv.contains(v) || !inner.insert(v.clone()) {
                        return bad(format!("connector interiors overlap at {v}"));
                    }
                }
            }
        }
        Family::F2 => {
            if w.branch_vertices.len() != 2 || w.bipaths.len() != 3 || !w.connectors.is_empty() {
                return bad("F2 needs 2 branch vertices and 3 bipaths");
            }
            let (a, b) = (&w.branch_vertices[0], &w.branch_vertices[1]);
            let mut inner = BTreeSet::new();
            for x in &w.bipaths {
                if x.start() != a || x.end() != b {
                    return bad("F2 bipaths must run between the branch vertices");
                }
                for v in check_bipath(x, &edges)? {
                    if !inner.insert(v.clone()) {
                        return bad(format!("bipaths meet at {v}"));
                    }
                }
            }
        }
        Family::F3 => {
            if w.branch_vertices.len() != 4 || w.bipaths.len() != 4 || w.connectors.len() != 2 {
                return bad("F3 needs 4 branch vertices, 4 bipaths and 2 connectors");
            }
            let v = &w.branch_vertices;
            let mut inner = BTreeSet::new();
            for (i, x) in w.bipaths.iter().enumerate() {
                let (s, t) = if i < 2 { (&v[0], &v[1]) } else { (&v[2], &v[3]) };
                if x.start() != s || x.end() != t {
                    return bad(format!("bipath {i} has the wrong ends"));
                }
                for u in check_bipath(x, &edges)? {
                    if bv.contains(&u) || !inner.insert(u.clone()) {
                        return bad(format!("bipaths meet at {u}"));
                    }
                }
            }
            for (p, (s, t)) in w.connectors.iter().zip([(&v[0], &v[2]), (&v[1], &v[3])]) {
                check_path(p, &edges)?;
                if &p[0] != s || &p[p.len() - 1] != t {
                    return bad("connector has the wrong ends");
                }
                if let Some(x) = interior(p).iter().find(|x| inner.contains(*x) || bv.contains(x)) {
                    return bad(format!("connector passes through bipath vertex {x}"));
                }
            }
        }
    }
    for p in w.bipaths.iter().flat_map(|b| b.segments.iter().flatten()).chain(&w.connectors) {
        path_edges(p, &mut used);
    }
    if used != edges {
        return bad("roles do not cover exactly the witness edges");
    }
    let verts: BTreeSet<&String> = w.vertices.iter().collect();
    let touched: BTreeSet<&String> = edges.iter().flat_map(|(u, v)| [u, v]).collect();
    if verts != touched || verts.len() != w.vertices.len() {
        return bad("vertex list does not match the edges");
    }
    Ok(())
}

/// [`pattern_check`] plus containment of the witness in `g`.
pub fn pattern_check_in(g: &Graph, w: &ForbiddenWitness) -> Result<()> {
    pattern_check(w)?;
    for (u, v) in &w.edges {
        let (a, b) = (g.require(u)?, g.require(v)?);
        if !g.has_edge(a, b) {
            return bad(format!("{u}-{v} is not an edge of the graph"));
        }
    }
    Ok(())
}

/// Vertex-disjoint (apart from terminals) bipaths between the terminals of
/// every complex-contributing node: one per unbridged series node reached
/// through parallel nodes and the terminal side of branch nodes. Their
/// number equals the complexity of `t`.
pub fn extract_bipaths(t: &GspTree) -> Result<Vec<BipathRole>> {
    let mut out = vec![];
    collect(t, &mut out)?;
    Ok(out)
}

fn collect(t: &GspTree, out: &mut Vec<BipathRole>) -> Result<()> {
    match t {
        GspTree::Edge(..) => Ok(()),
        GspTree::Node { op, left, right, .. } => match op {
            Op::Parallel => {
                collect(left, out)?;
                collect(right, out)
            }
            Op::Branch | Op::BranchPrime => collect(left, out),
            Op::Series if t.is_bridged() => Ok(()),
            Op::Series => {
                out.push(series_bipath(t)?);
                Ok(())
            }
        },
    }
}

fn series_bipath(t: &GspTree) -> Result<BipathRole> {
    let g = t.graph();
    let (a, b) = t.terminals();
    let (a, b) = (g.require(a)?, g.require(b)?);
    let bct = blocks(&g);
    let (bs, joints) = bct.block_path(a, b).ok_or_else(|| Error::Unresolved("terminals disconnected".into()))?;
    if bs.len() < 2 {
        return input("series node whose terminals share a block");
    }
    let mut segments = vec![];
    for (j, &blk) in bs.iter().enumerate() {
        let allowed = g.set_of(bct.blocks[blk].iter().copied());
        let ps = internally_disjoint_paths(&g, joints[j], joints[j + 1], 2, Some(&allowed));
        if ps.len() < 2 {
            return input("unbridged series node has a bridge on its block path");
        }
        let lab = |p: &Vec<usize>| p.iter().map(|&v| g.label(v).to_string()).collect::<Vec<_>>();
        let mut pair = [lab(&ps[0]), lab(&ps[1])];
        pair.sort_by_key(|p| p.len());
        segments.push(pair);
    }
    Ok(BipathRole { primaries: joints.iter().map(|&v| g.label(v).to_string()).collect(), segments })
}

/// Largest graph [`brute_force_forbidden`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Exhaustive search for a member of any family, for cross-checking on small
/// graphs. `F2` needs at least 11 vertices and `F3` at least 16, so those
/// searches only run at such sizes.
pub fn brute_force_forbidden(g: &Graph, max_n: usize) -> Result<Option<ForbiddenWitness>> {
    let n = g.n();
    if n > max_n.min(BRUTE_FORCE_LIMIT) {
        return Err(Error::Resource { budget: "brute force vertices", limit: max_n.min(BRUTE_FORCE_LIMIT) });
    }
    let s = Search::new(g);
    if let Some(w) = s.f1() {
        return Ok(Some(w));
    }
    if n >= 11 {
        if let Some(w) = s.f2() {
            return Ok(Some(w));
        }
    }
    if n >= 16 {
        if let Some(w) = s.f3() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

// Bitmask backtracking over vertex ids.
struct Search<'a> {
    g: &'a Graph,
    nb: Vec<u32>,
}

// Raw bipath: primaries plus two paths per segment, as ids.
type RawBipath = (Vec<usize>, Vec<[Vec<usize>; 2]>);

impl<'a> Search<'a> {
    fn new(g: &'a Graph) -> Self {
        let nb = (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u)).collect();
        Search { g, nb }
    }

    fn lab(&self, p: &[usize]) -> Vec<String> {
        p.iter().map(|&v| self.g.label(v).to_string()).collect()
    }

    fn role(&self, b: &RawBipath) -> BipathRole {
        BipathRole {
            primaries: self.lab(&b.0),
            segments: b.1.iter().map(|[x, y]| [self.lab(x), self.lab(y)]).collect(),
        }
    }

    // Calls `f` on every simple path from `s` to `t` whose interior lies in
    // `free`; stops when `f` returns true.
    fn paths(&self, s: usize, t: usize, free: u32, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        fn go(me: &Search, path: &mut Vec<usize>, t: usize, free: u32, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
            let u = *path.last().unwrap();
            if me.nb[u] >> t & 1 == 1 {
                path.push(t);
                let stop = f(path);
                path.pop();
                if stop {
                    return true;
                }
            }
            let mut cand = me.nb[u] & free;
            while cand != 0 {
                let v = cand.trailing_zeros() as usize;
                cand &= cand - 1;
                path.push(v);
                if go(me, path, t, free & !(1 << v), f) {
                    return true;
                }
                path.pop();
            }
            false
        }
        go(self, &mut vec![s], t, free & !(1 << s) & !(1 << t), f)
    }

    fn f1(&self) -> Option<ForbiddenWitness> {
        let n = self.g.n();
        let cand: Vec<usize> = (0..n).filter(|&v| self.g.degree(v) >= 3).collect();
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        fn place(me: &Search, br: &[usize; 4], pairs: &[(usize, usize)], free: u32, acc: &mut Vec<Vec<usize>>) -> bool {
            let Some(&(i, j)) = pairs.first() else { return true };
            let mut found = false;
            me.paths(br[i], br[j], free, &mut |p| {
                let used = p.iter().fold(0u32, |m, &v| m | 1 << v);
                acc.push(p.to_vec());
                if place(me, br, &pairs[1..], free & !used, acc) {
                    found = true;
                    return true;
                }
                acc.pop();
                false
            });
            found
        }
        for a in 0..cand.len() {
            for b in a + 1..cand.len() {
                for c in b + 1..cand.len() {
                    for d in c + 1..cand.len() {
                        let br = [cand[a], cand[b], cand[c], cand[d]];
                        let free = br.iter().fold(all, |m, &v| m & !(1 << v));
                        let mut acc = vec![];
                        if place(self, &br, &pairs, free, &mut acc) {
                            return Some(ForbiddenWitness::f1(
                                br.iter().map(|&v| self.g.label(v).to_string()).collect(),
                                acc.iter().map(|p| self.lab(p)).collect(),
                            ));
                        }
                    }
                }
            }
        }
        None
    }

    // Enumerates bipaths from `a` to `b` with interior in `free`.
    fn bipaths(&self, a: usize, b: usize, free: u32, f: &mut dyn FnMut(&RawBipath, u32) -> bool) -> bool {
        // Extends a partial bipath currently ending at primary `p`.
        fn grow(
            me: &Search,
            p: usize,
            b: usize,
            free: u32,
            acc: &mut RawBipath,
            f: &mut dyn FnMut(&RawBipath, u32) -> bool,
        ) -> bool {
            // Next primary q: b (only after at least one segment) or a free vertex.
            let mut targets: Vec<usize> = (0..me.g.n()).filter(|&q| free >> q & 1 == 1).collect();
            targets.push(b);
            for q in targets {
                if q == b && acc.1.is_empty() {
                    continue;
                }
                let inner = free & !(1 << q);
                // two internally disjoint p–q paths, the first lexicographically smaller
                let stop = me.paths(p, q, inner, &mut |x| {
                    let ux = x.iter().fold(0u32, |m, &v| m | 1 << v) & !(1 << p) & !(1 << q);
                    let x = x.to_vec();
                    me.paths(p, q, inner & !ux, &mut |y| {
                        if y <= &x[..] || (x.len() == 2 && y.len() == 2) {
                            return false;
                        }
                        let uy = y.iter().fold(0u32, |m, &v| m | 1 << v) & !(1 << p) & !(1 << q);
                        acc.0.push(q);
                        acc.1.push([x.clone(), y.to_vec()]);
                        let rest = inner & !ux & !uy;
                        let stop = if q == b { f(acc, rest) } else { grow(me, q, b, rest, acc, f) };
                        acc.0.pop();
                        acc.1.pop();
                        stop
                    })
                });
                if stop {
                    return true;
                }
            }
            false
        }
        let mut acc = (vec![a], vec![]);
        grow(self, a, b, free & !(1 << a) & !(1 << b), &mut acc, f)
    }

    // `count` bipaths from a to b with disjoint interiors inside `free`.
    fn many(&self, a: usize, b: usize, free: u32, count: usize, acc: &mut Vec<RawBipath>, f: &mut dyn FnMut(&[RawBipath], u32) -> bool) -> bool {
        if count == 0 {
            return f(acc, free);
        }
        self.bipaths(a, b, free, &mut |bp, rest| {
            acc.push(bp.clone());
            let stop = self.many(a, b, rest, count - 1, acc, f);
            acc.pop();
            stop
        })
    }

    fn full(&self) -> u32 {
        let n = self.g.n();
        if n == 32 { u32::MAX } else { (1u32 << n) - 1 }
    }

    fn f2(&self) -> Option<ForbiddenWitness> {
        let n = self.g.n();
        for a in 0..n {
            for b in a + 1..n {
                let mut hit = None;
                self.many(a, b, self.full(), 3, &mut vec![], &mut |bs, _| {
                    hit = Some(bs.to_vec());
                    true
                });
                if let Some(bs) = hit {
                    let (la, lb) = (self.g.label(a), self.g.label(b));
                    return Some(ForbiddenWitness::f2(la, lb, bs.iter().map(|x| self.role(x)).collect()));
                }
            }
        }
        None
    }

    fn f3(&self) -> Option<ForbiddenWitness> {
        let n = self.g.n();
        let g = self.g;
        for v1 in 0..n {
            for v2 in 0..n {
                if v2 == v1 {
                    continue;
                }
                let mut hit = None;
                self.many(v1, v2, self.full() & !(1 << v1) & !(1 << v2), 2, &mut vec![], &mut |p0, free0| {
                    for v3 in 0..n {
                        for v4 in v3 + 1..n {
                            if free0 >> v3 & 1 == 0 || free0 >> v4 & 1 == 0 {
                                continue;
                            }
                            let f1 = free0 & !(1 << v3) & !(1 << v4);
                            let stop = self.many(v3, v4, f1, 2, &mut vec![], &mut |p1, free1| {
                                for (x, y) in [(v3, v4), (v4, v3)] {
                                    let free = free1;
                                    let mut c1 = None;
                                    self.paths(v1, x, free, &mut |p| {
                                        c1 = Some(p.to_vec());
                                        true
                                    });
                                    let mut c2 = None;
                                    self.paths(v2, y, free, &mut |p| {
                                        c2 = Some(p.to_vec());
                                        true
                                    });
                                    if let (Some(c1), Some(c2)) = (c1, c2) {
                                        hit = Some((p0.to_vec(), p1.to_vec(), x, y, c1, c2));
                                        return true;
                                    }
                                }
                                false
                            });
                            if stop {
                                return true;
                            }
                        }
                    }
                    false
                });
                if let Some((p0, p1, x, y, c1, c2)) = hit {
                    let l = |v: usize| g.label(v).to_string();
                    let r = |b: &RawBipath| self.role(b);
                    return Some(ForbiddenWitness::f3(
                        [l(v1), l(v2), l(x), l(y)],
                        [r(&p0[0]), r(&p0[1])],
                        [r(&p1[0]), r(&p1[1])],
                        self.lab(&c1),
                        self.lab(&c2),
                    ));
                }
            }
        }
        None
    }
}
