//! Constructive 3-searches on subdivisions.
//!
//! [`synthesize`] walks a simple GSP decomposition bottom-up. Leaves are swept
//! with two searchers; inner nodes glue the searches of their children,
//! clearing a large ball around the shared terminal first or last. Parallel
//! nodes are cut at a bridge of one side and closed with a long connector
//! path. Floors (minimum subdivision counts) are passed down to children, who
//! may subdivide more than asked.
//!
//! Every bundle, including the intermediate ones, is replayed before it is
//! returned.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::game::{verify, Replay, Search, SparseSearch};
use crate::graph::{
    ball, distances, label_cmp, separating_bridges, subdivide, subdivision_label, EdgeCounts, Graph,
    SubdividedGraph, VertexSet,
};
use crate::gsp::{merge_block, GspTree, Op, TerminalGraph};

/// Minimum subdivision count per base edge, keyed by [`edge_key`].
pub type SubdivisionFloor = BTreeMap<(String, String), usize>;

/// Hosts above this many vertices are refused.
pub const HOST_LIMIT: usize = 3_000_000;

/// Orders an edge's endpoints by label.
pub fn edge_key(u: &str, v: &str) -> (String, String) {
    if label_cmp(u, v).is_le() {
        (u.to_string(), v.to_string())
    } else {
        (v.to_string(), u.to_string())
    }
}

/// Sizes of a synthesized bundle.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthStats {
    pub host_vertices: usize,
    pub host_edges: usize,
    pub search_length: usize,
    /// Edges joining both terminals of a parallel node, subdivided to the sum
    /// of the two ball demands.
    pub summed_floor_edges: Vec<(String, String)>,
    /// Base edges split in two extra places so that a bridge avoids the
    /// terminals.
    pub presubdivided_edges: Vec<(String, String)>,
}

/// A subdivision together with a successful 3-search aligned to a pair of
/// base vertices. Steps are stored sparsely; hosts can be large.
#[derive(Clone, Debug)]
pub struct AlignedSearchBundle {
    pub host: SubdividedGraph,
    pub search: SparseSearch,
    pub alignment: (String, String),
    pub floors_satisfied: BTreeMap<(String, String), usize>,
    pub stats: SynthStats,
}

impl AlignedSearchBundle {
    /// Replays the search and checks success, alignment and step sizes.
    pub fn check(&self) -> Result<()> {
        let g = &self.host.derived;
        let (a, b) = (g.require(&self.alignment.0)?, g.require(&self.alignment.1)?);
        let v = verify(g, &self.search.steps, &g.empty_set(), Some((a, b)));
        if !v.successful || v.aligned != Some(true) || v.max_step > 3 {
            return Err(Error::Unresolved(format!(
                "bundle fails replay: successful {}, aligned {:?}, max step {}",
                v.successful, v.aligned, v.max_step
            )));
        }
        Ok(())
    }

    /// Steps as sorted label lists.
    pub fn step_labels(&self) -> Vec<Vec<String>> {
        let g = &self.host.derived;
        self.search
            .steps
            .iter()
            .map(|s| {
                let mut ids = s.clone();
                ids.sort_unstable();
                ids.into_iter().map(|v| g.label(v).to_string()).collect()
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct CountRecord {
    edge: [String; 2],
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct BundleRecord {
    base_edges: Vec<[String; 2]>,
    counts: Vec<CountRecord>,
    host_edges: Vec<[String; 2]>,
    steps: Vec<Vec<String>>,
    alignment: [String; 2],
    stats: SynthStats,
}

impl Serialize for AlignedSearchBundle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs = |g: &Graph| g.label_edges().into_iter().map(|(u, v)| [u, v]).collect::<Vec<_>>();
        let base = &self.host.base;
        let counts = self
            .host
            .counts()
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&(u, v), &c)| CountRecord { edge: [base.label(u).into(), base.label(v).into()], count: c })
            .collect();
        BundleRecord {
            base_edges: pairs(base),
            counts,
            host_edges: pairs(&self.host.derived),
            steps: self.step_labels(),
            alignment: [self.alignment.0.clone(), self.alignment.1.clone()],
            stats: self.stats.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlignedSearchBundle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = BundleRecord::deserialize(d)?;
        from_record(r).map_err(D::Error::custom)
    }
}

fn from_record(r: BundleRecord) -> Result<AlignedSearchBundle> {
    let base = Graph::from_edges(&r.base_edges.iter().map(|[u, v]| (u.as_str(), v.as_str())).collect::<Vec<_>>())?;
    let mut counts = EdgeCounts::new();
    for c in &r.counts {
        let (u, v) = (base.require(&c.edge[0])?, base.require(&c.edge[1])?);
        counts.insert((u.min(v), u.max(v)), c.count);
    }
    let host = subdivide(&base, &counts)?;
    let listed = Graph::from_edges(&r.host_edges.iter().map(|[u, v]| (u.as_str(), v.as_str())).collect::<Vec<_>>())?;
    if listed != host.derived {
        return input("host edge list disagrees with base edges and counts");
    }
    let attained = host
        .counts()
        .iter()
        .map(|(&(u, v), &c)| (edge_key(base.label(u), base.label(v)), c))
        .collect();
    let steps = r
        .steps
        .iter()
        .map(|s| s.iter().map(|x| host.derived.require(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let search = SparseSearch { k: 3, steps };
    if search.max_step() > 3 {
        return input("bundle steps search more than 3 vertices");
    }
    let [a, b] = r.alignment;
    Ok(AlignedSearchBundle { host, search, alignment: (a, b), floors_satisfied: attained, stats: r.stats })
}

// ---------------------------------------------------------------------------
// Ball clearing

fn pow2(e: usize) -> Result<usize> {
    1usize.checked_shl(e as u32).filter(|&p| p <= HOST_LIMIT).ok_or(Error::Resource { budget: "host size", limit: HOST_LIMIT })
}

fn mul(a: usize, b: usize) -> Result<usize> {
    a.checked_mul(b).filter(|&p| p <= HOST_LIMIT).ok_or(Error::Resource { budget: "host size", limit: HOST_LIMIT })
}

fn push_step<T: Clone + Eq>(out: &mut Vec<Vec<T>>, items: &[&T]) {
    let mut s: Vec<T> = Vec::with_capacity(items.len());
    for &x in items {
        if !s.contains(x) {
            s.push(x.clone());
        }
    }
    out.push(s);
}

/// `paths[i]` runs from the pinned vertex to the far end of its edge; path
/// `i` (1-based) is swept `2^(d-i) r` steps.
fn outward_plan<T: Clone + Eq>(w: &T, paths: &[Vec<T>], r: usize) -> Result<Vec<Vec<T>>> {
    let d = paths.len();
    let mut out = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let len = mul(pow2(d - i - 1)?, r)?;
        for t in 1..=len {
            push_step(&mut out, &[w, &p[t], &p[t + 1]]);
        }
    }
    Ok(out)
}

/// Path `i` (1-based) is swept `2^(i-1) r` steps towards the pinned vertex.
/// The window at step `t` covers distances `R - t + 1` and `R - t + 2`
/// (`R = 2^(i-1) r`), so the pinned vertex clears on the very last step and
/// not one step earlier.
fn inward_plan<T: Clone + Eq>(v: &T, paths: &[Vec<T>], r: usize) -> Result<Vec<Vec<T>>> {
    let mut out = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let len = mul(pow2(i)?, r)?;
        for t in 1..=len {
            push_step(&mut out, &[v, &p[len - t + 1], &p[len - t + 2]]);
        }
    }
    Ok(out)
}

fn outward_floor(d: usize, r: usize) -> Result<usize> {
    if r == 0 {
        return Ok(0);
    }
    Ok(mul(pow2(d.saturating_sub(1))?, r)? + 1)
}

fn inward_floor(d: usize, r: usize) -> Result<usize> {
    mul(pow2(d.saturating_sub(1))?, r)
}

fn ball_paths(h: &SubdividedGraph, w: usize, floor: usize) -> Result<Vec<Vec<usize>>> {
    let base = &h.base;
    let mut nbrs = base.neighbors(w).to_vec();
    nbrs.sort_by(|&x, &y| label_cmp(base.label(x), base.label(y)));
    nbrs.into_iter()
        .map(|u| {
            let c = h.count(w, u);
            if c < floor {
                return input(format!(
                    "edge {}-{} is subdivided {c} times, below the floor {floor}",
                    base.label(w),
                    base.label(u)
                ));
            }
            Ok(h.edge_path(w, u))
        })
        .collect()
}

fn to_search(h: &SubdividedGraph, plan: Vec<Vec<usize>>) -> Result<Search> {
    let steps = plan.into_iter().map(|s| h.derived.set_of(s)).collect();
    Search::new(&h.derived, steps, 3)
}

/// Search pinned at base vertex `w` whose final cleared set contains the ball
/// of radius `r` around `w`; aligned to `(w, v)`. Length `(2^d - 1) r` for
/// `d = deg(w)`.
pub fn clear_ball_outward(h: &SubdividedGraph, w: &str, v: &str, r: usize) -> Result<Search> {
    let (w, v) = (h.base.require(w)?, h.base.require(v)?);
    if w == v {
        return input("pinned and aligned vertices must differ");
    }
    let d = h.base.degree(w);
    let paths = ball_paths(h, w, outward_floor(d, r)?)?;
    to_search(h, outward_plan(&h.lift(w), &paths, r)?)
}

/// Search pinned at base vertex `v` that, starting from [`inward_start`],
/// clears the whole host; aligned to `(w, v)` over that start. Length
/// `(2^d - 1) r` for `d = deg(v)`.
pub fn clear_ball_inward(h: &SubdividedGraph, v: &str, w: &str, r: usize) -> Result<Search> {
    let (v, w) = (h.base.require(v)?, h.base.require(w)?);
    if w == v {
        return input("pinned and aligned vertices must differ");
    }
    let d = h.base.degree(v);
    let paths = ball_paths(h, v, inward_floor(d, r)?)?;
    to_search(h, inward_plan(&h.lift(v), &paths, r)?)
}

/// Everything outside the ball of radius `r` around base vertex `v`.
pub fn inward_start(h: &SubdividedGraph, v: &str, r: usize) -> Result<VertexSet> {
    let v = h.base.require(v)?;
    let mut a = ball(&h.derived, h.lift(v), r);
    a.toggle_range(..);
    Ok(a)
}

// ---------------------------------------------------------------------------
// Grid

/// The sliding-window search on the `n x m` grid: with `s = min(n, m)`, a
/// window of `s + 1` consecutive vertices along the long side, `s(l - 1)`
/// steps for `l = max(n, m)`.
pub fn grid_search(n: usize, m: usize) -> Result<(Graph, Search)> {
    let g = crate::generate::grid(n, m)?;
    let (long, short) = (n.max(m), n.min(m));
    // k-th vertex in the order that walks the short side fastest
    let vertex = |k: usize| {
        let (i, j) = (k / short, k % short);
        let (row, col) = if n >= m { (i, j) } else { (j, i) };
        g.require(&format!("v{}", row * m + col)).expect("grid vertex")
    };
    let steps = (0..short * (long - 1)).map(|t| g.set_of((t..=t + short).map(vertex))).collect();
    let s = Search::new(&g, steps, short + 1)?;
    Ok((g, s))
}

// ---------------------------------------------------------------------------
// Bridge splitting

/// Result of cutting a bridged terminal graph at a separating bridge `cd`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeSplit {
    /// Decomposition of the side containing the first terminal, ending at `c`.
    pub left: GspTree,
    pub bridge: (String, String),
    /// Decomposition of the side containing the second terminal, starting at `d`.
    pub right: GspTree,
}

#[derive(Default)]
struct Halves {
    left: Option<GspTree>,
    left_hang: Vec<GspTree>,
    right: Option<GspTree>,
    right_hang: Vec<GspTree>,
}

fn contains_edge(t: &GspTree, c: &str, d: &str) -> bool {
    let mut hit = false;
    t.for_each_edge(&mut |u, v| hit |= (u == c && v == d) || (u == d && v == c));
    hit
}

fn cut(t: &GspTree, c: &str, d: &str) -> Result<Halves> {
    match t {
        GspTree::Edge(u, v) => {
            if u == c && v == d {
                Ok(Halves::default())
            } else {
                input(format!("bridge {c}-{d} does not separate the terminals of edge {u}-{v}"))
            }
        }
        GspTree::Node { op, left, right, .. } => match op {
            Op::Series => {
                if contains_edge(left, c, d) {
                    let mut h = cut(left, c, d)?;
                    h.right = Some(match h.right.take() {
                        Some(x) => GspTree::join(Op::Series, x, (**right).clone()),
                        None => (**right).clone(),
                    });
                    Ok(h)
                } else {
                    let mut h = cut(right, c, d)?;
                    h.left = Some(match h.left.take() {
                        Some(x) => GspTree::join(Op::Series, (**left).clone(), x),
                        None => (**left).clone(),
                    });
                    Ok(h)
                }
            }
            Op::Branch => {
                let mut h = cut(left, c, d)?;
                match h.left.take() {
                    Some(x) => h.left = Some(GspTree::join(Op::Branch, x, (**right).clone())),
                    None => h.left_hang.push((**right).clone()),
                }
                Ok(h)
            }
            Op::BranchPrime => {
                let mut h = cut(left, c, d)?;
                match h.right.take() {
                    Some(x) => h.right = Some(GspTree::join(Op::BranchPrime, x, (**right).clone())),
                    None => h.right_hang.push((**right).clone()),
                }
                Ok(h)
            }
            Op::Parallel => input(format!("bridge {c}-{d} lies inside a parallel node")),
        },
    }
}

fn attach(base: Option<GspTree>, hangs: Vec<GspTree>, at: &str) -> Result<GspTree> {
    let mut t = base.ok_or_else(|| Error::Input(format!("side ending at {at} has no edges")))?;
    for h in hangs {
        t = merge_block(t, &h, at)?;
    }
    Ok(t)
}

/// The separating bridge of `t` closest to its first terminal among those
/// touching neither terminal, oriented away from that terminal.
fn pick_bridge(t: &GspTree) -> Option<(String, String)> {
    let g = t.graph();
    let (a, b) = t.terminals();
    let (ia, ib) = (g.id(a)?, g.id(b)?);
    let dist = distances(&g, ia, None);
    separating_bridges(&g, ia, ib)
        .into_iter()
        .find(|&(u, v)| ![u, v].iter().any(|&x| x == ia || x == ib))
        .map(|(u, v)| {
            let (c, d) = if dist[u] <= dist[v] { (u, v) } else { (v, u) };
            (g.label(c).to_string(), g.label(d).to_string())
        })
}

/// Cuts a simple decomposition at its separating bridge closest to the first
/// terminal, skipping bridges that touch a terminal. Both sides come back as
/// simple decompositions.
pub fn split_at_bridge(t: &GspTree) -> Result<BridgeSplit> {
    let (c, d) = pick_bridge(t).ok_or_else(|| {
        Error::Input("no separating bridge avoids both terminals; subdivide first".into())
    })?;
    let h = cut(t, &c, &d)?;
    let left = attach(h.left, h.left_hang, &c)?;
    let right = attach(h.right, h.right_hang, &d)?;
    for side in [&left, &right] {
        if !side.is_simple() {
            return Err(Error::Unresolved(format!("side {:?} of bridge {c}-{d} is not simple", side.terminals())));
        }
    }
    Ok(BridgeSplit { left, bridge: (c, d), right })
}

// ---------------------------------------------------------------------------
// Normalisation

fn parallel_parts(t: &GspTree, a: &str, b: &str, out: &mut Vec<GspTree>) -> Result<()> {
    match t {
        GspTree::Node { op: Op::Parallel, left, right, .. } => {
            parallel_parts(left, a, b, out)?;
            parallel_parts(right, a, b, out)?;
        }
        _ if t.terminals() == (a, b) => out.push(normalize(t)?),
        _ => out.push(normalize(&crate::gsp::invert(t))?),
    }
    Ok(())
}

/// Right child of every parallel node becomes a bridged part; among bridged
/// parts the one with the fewest vertices is taken.
fn chain_parallel(mut parts: Vec<GspTree>) -> Result<GspTree> {
    if parts.len() == 1 {
        return Ok(parts.pop().expect("one part"));
    }
    let pick = parts
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_bridged())
        .min_by_key(|(i, p)| (p.vertices().len(), *i))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Input("parallel node without a bridged part; decomposition is not simple".into()))?;
    let k = parts.remove(pick);
    Ok(GspTree::join(Op::Parallel, chain_parallel(parts)?, k))
}

fn normalize(t: &GspTree) -> Result<GspTree> {
    match t {
        GspTree::Edge(..) => Ok(t.clone()),
        GspTree::Node { op: Op::Parallel, .. } => {
            let (a, b) = t.terminals();
            let mut parts = vec![];
            parallel_parts(t, a, b, &mut parts)?;
            chain_parallel(parts)
        }
        GspTree::Node { op, left, right, .. } => Ok(GspTree::join(*op, normalize(left)?, normalize(right)?)),
    }
}

/// Base edges whose chosen bridge touches a terminal of its parallel node.
fn bridges_to_widen(t: &GspTree, out: &mut BTreeSet<(String, String)>) -> Result<()> {
    if let GspTree::Node { op, left, right, .. } = t {
        if *op == Op::Parallel {
            let g = right.graph();
            let (a, b) = right.terminals();
            let (ia, ib) = (g.require(a)?, g.require(b)?);
            let &(u, v) = separating_bridges(&g, ia, ib)
                .first()
                .ok_or_else(|| Error::Input(format!("parallel part at {a},{b} is not bridged")))?;
            if [u, v].iter().any(|&x| x == ia || x == ib) {
                out.insert(edge_key(g.label(u), g.label(v)));
            }
        }
        bridges_to_widen(left, out)?;
        bridges_to_widen(right, out)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Recursive synthesis

/// Host vertex inside the recursion: a vertex of the working graph, or
/// `(edge index + 1) << 32 | position` for a subdivision vertex.
type Hv = u64;
const NONE: Hv = Hv::MAX;
type Step = [Hv; 3];
type Counts = BTreeMap<(String, String), usize>;

struct Ctx {
    vid: HashMap<String, u32>,
    names: Vec<String>,
    eid: HashMap<(String, String), u32>,
    edges: Vec<(String, String)>,
}

impl Ctx {
    fn new(g: &Graph) -> Self {
        let names = g.labels().to_vec();
        let vid = names.iter().enumerate().map(|(i, l)| (l.clone(), i as u32)).collect();
        let edges: Vec<(String, String)> = g.label_edges().iter().map(|(u, v)| edge_key(u, v)).collect();
        let eid = edges.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        Ctx { vid, names, eid, edges }
    }

    fn v(&self, x: &str) -> Hv {
        Hv::from(self.vid[x])
    }

    /// Host vertices on the subdivided edge `u`-`v`, from `u` to `v`.
    fn path(&self, u: &str, v: &str, c: usize) -> Vec<Hv> {
        let key = edge_key(u, v);
        let e = Hv::from(self.eid[&key]) + 1;
        let forward = key.0 == u;
        let mut p = Vec::with_capacity(c + 2);
        p.push(self.v(u));
        for i in 1..=c {
            let pos = if forward { i } else { c + 1 - i };
            p.push(e << 32 | pos as Hv);
        }
        p.push(self.v(v));
        p
    }

    fn label(&self, x: Hv) -> String {
        match x >> 32 {
            0 => self.names[x as usize].clone(),
            e => {
                let (u, v) = &self.edges[(e - 1) as usize];
                subdivision_label(u, v, (x & 0xffff_ffff) as usize)
            }
        }
    }
}

struct Part {
    a: String,
    b: String,
    counts: Counts,
    steps: Vec<Step>,
    summed: Vec<(String, String)>,
}

fn step(items: &[Hv]) -> Step {
    let mut s = [NONE; 3];
    let mut n = 0;
    for &x in items {
        if !s[..n].contains(&x) {
            s[n] = x;
            n += 1;
        }
    }
    s
}

fn steps_of(plan: Vec<Vec<Hv>>) -> Vec<Step> {
    plan.iter().map(|s| step(s)).collect()
}

fn floor_of(floors: &SubdivisionFloor, u: &str, v: &str) -> usize {
    floors.get(&edge_key(u, v)).copied().unwrap_or(0)
}

fn raise(floors: &mut SubdivisionFloor, u: &str, v: &str, f: usize) {
    let e = floors.entry(edge_key(u, v)).or_insert(0);
    *e = (*e).max(f);
}

fn neighbours_in(t: &GspTree, w: &str) -> Vec<String> {
    let mut out = BTreeSet::new();
    t.for_each_edge(&mut |u, v| {
        if u == w {
            out.insert(v.to_string());
        } else if v == w {
            out.insert(u.to_string());
        }
    });
    let mut out: Vec<String> = out.into_iter().collect();
    out.sort_by(|x, y| label_cmp(x, y));
    out
}

fn paths_at(ctx: &Ctx, p: &Part, w: &str) -> Vec<Vec<Hv>> {
    let mut nbrs: Vec<&String> = p
        .counts
        .keys()
        .filter_map(|(u, v)| if u == w { Some(v) } else if v == w { Some(u) } else { None })
        .collect();
    nbrs.sort_by(|x, y| label_cmp(x, y));
    nbrs.into_iter().map(|u| ctx.path(w, u, p.counts[&edge_key(w, u)])).collect()
}

fn host_size(counts: &Counts) -> usize {
    let mut vs = BTreeSet::new();
    for (u, v) in counts.keys() {
        vs.insert(u);
        vs.insert(v);
    }
    vs.len() + counts.values().sum::<usize>()
}

fn check_part(ctx: &Ctx, p: &Part, floors: &SubdivisionFloor) -> Result<()> {
    for (e, &c) in &p.counts {
        let f = floors.get(e).copied().unwrap_or(0);
        if c < f {
            return Err(Error::Unresolved(format!("edge {}-{} got {c} < floor {f}", e.0, e.1)));
        }
    }
    // dense local numbering: base vertices first, then each edge's inner run
    let mut local: HashMap<Hv, usize> = HashMap::new();
    for (u, v) in p.counts.keys() {
        for x in [u, v] {
            let n = local.len();
            local.entry(ctx.v(x)).or_insert(n);
        }
    }
    let mut offset: HashMap<Hv, usize> = HashMap::new();
    let mut n = local.len();
    for (e, &c) in &p.counts {
        offset.insert(Hv::from(ctx.eid[e]) + 1, n);
        n += c;
    }
    let index = |x: Hv| -> Option<usize> {
        match x >> 32 {
            0 => local.get(&x).copied(),
            e => offset.get(&e).map(|o| o + (x & 0xffff_ffff) as usize - 1),
        }
    };
    let mut adj = vec![Vec::new(); n];
    for ((u, v), &c) in &p.counts {
        let path = ctx.path(u, v, c);
        for w in path.windows(2) {
            let (x, y) = (index(w[0]).expect("own vertex"), index(w[1]).expect("own vertex"));
            adj[x].push(y);
            adj[y].push(x);
        }
    }
    let (a, b) = (index(ctx.v(&p.a)), index(ctx.v(&p.b)));
    let (Some(a), Some(b)) = (a, b) else {
        return Err(Error::Unresolved("terminal outside its host".into()));
    };
    let mut r = Replay::new(adj.as_slice(), &VertexSet::with_capacity(n));
    let mut aligned = true;
    let mut buf = Vec::with_capacity(3);
    for (t, s) in p.steps.iter().enumerate() {
        buf.clear();
        for &x in s.iter().filter(|&&x| x != NONE) {
            buf.push(index(x).ok_or_else(|| Error::Unresolved(format!("step {} leaves the host", t + 1)))?);
        }
        r.step(&buf);
        aligned &= r.pc_contains(a) && (t + 1 == p.steps.len() || !r.fc_contains(b));
    }
    if r.fc_count() == n && aligned {
        Ok(())
    } else {
        Err(Error::Unresolved(format!(
            "search for ({}, {}) fails replay: cleared {}/{n}, aligned {aligned}",
            p.a,
            p.b,
            r.fc_count()
        )))
    }
}

fn synth(ctx: &Ctx, t: &GspTree, floors: &SubdivisionFloor) -> Result<Part> {
    let part = match t {
        GspTree::Edge(u, v) => {
            let c = floor_of(floors, u, v);
            if c > HOST_LIMIT {
                return Err(Error::Resource { budget: "host size", limit: HOST_LIMIT });
            }
            let path = ctx.path(u, v, c);
            let steps = path.windows(2).map(step).collect();
            Part { a: u.clone(), b: v.clone(), counts: Counts::from([(edge_key(u, v), c)]), steps, summed: vec![] }
        }
        GspTree::Node { op, left, right, .. } => match op {
            Op::Series => {
                let mut p0 = synth(ctx, left, floors)?;
                let mut p1 = synth(ctx, right, floors)?;
                p0.steps.append(&mut p1.steps);
                p0.b = p1.b;
                p0.counts.append(&mut p1.counts);
                p0.summed.append(&mut p1.summed);
                p0
            }
            Op::Branch => branch(ctx, left, right, floors)?,
            Op::BranchPrime => branch_prime(ctx, left, right, floors)?,
            Op::Parallel => parallel(ctx, left, right, floors)?,
        },
    };
    if host_size(&part.counts) > HOST_LIMIT {
        return Err(Error::Resource { budget: "host size", limit: HOST_LIMIT });
    }
    check_part(ctx, &part, floors)?;
    Ok(part)
}

/// Combines the children's hosts under new terminals and a new step list.
fn assemble(a: String, b: String, steps: Vec<Step>, parts: Vec<Part>) -> Part {
    let mut out = Part { a, b, counts: Counts::new(), steps, summed: vec![] };
    for mut p in parts {
        out.counts.append(&mut p.counts);
        out.summed.append(&mut p.summed);
    }
    out
}

fn branch(ctx: &Ctx, g0: &GspTree, g1: &GspTree, floors: &SubdivisionFloor) -> Result<Part> {
    let mut p1 = synth(ctx, g1, floors)?;
    let a = g0.terminals().0.to_string();
    let nbrs = neighbours_in(g0, &a);
    let r = p1.steps.len();
    let f = outward_floor(nbrs.len(), r)?;
    let mut f0 = floors.clone();
    for u in &nbrs {
        raise(&mut f0, &a, u, f);
    }
    let mut p0 = synth(ctx, g0, &f0)?;
    let mut steps = steps_of(outward_plan(&ctx.v(&a), &paths_at(ctx, &p0, &a), r)?);
    steps.append(&mut p1.steps);
    steps.append(&mut p0.steps);
    let b = p0.b.clone();
    Ok(assemble(a, b, steps, vec![p0, p1]))
}

/// Inversion that leaves the children of parallel nodes in place, so the
/// bridged side chosen during normalisation stays on the right.
fn flip(t: &GspTree) -> GspTree {
    match t {
        GspTree::Edge(u, v) => GspTree::Edge(v.clone(), u.clone()),
        GspTree::Node { op, left, right, .. } => match op {
            Op::Series => GspTree::join(Op::Series, flip(right), flip(left)),
            Op::Parallel => GspTree::join(Op::Parallel, flip(left), flip(right)),
            Op::Branch => GspTree::join(Op::BranchPrime, flip(left), (**right).clone()),
            Op::BranchPrime => GspTree::join(Op::Branch, flip(left), (**right).clone()),
        },
    }
}

fn branch_prime(ctx: &Ctx, g0: &GspTree, g1: &GspTree, floors: &SubdivisionFloor) -> Result<Part> {
    let mut p1 = synth(ctx, &flip(g1), floors)?;
    let (a, b) = (g0.terminals().0.to_string(), g0.terminals().1.to_string());
    let nbrs = neighbours_in(g0, &b);
    let r = p1.steps.len() + 1;
    let f = inward_floor(nbrs.len(), r)?;
    let mut f0 = floors.clone();
    for u in &nbrs {
        raise(&mut f0, &b, u, f);
    }
    let mut p0 = synth(ctx, g0, &f0)?;
    let tail = steps_of(inward_plan(&ctx.v(&b), &paths_at(ctx, &p0, &b), r)?);
    let mut steps = std::mem::take(&mut p0.steps);
    let vb = ctx.v(&b);
    if let Some(last) = steps.last_mut() {
        let kept: Vec<Hv> = last.iter().copied().filter(|&x| x != vb && x != NONE).collect();
        *last = step(&kept);
    }
    steps.append(&mut p1.steps);
    steps.extend(tail);
    Ok(assemble(a, b, steps, vec![p0, p1]))
}

/// Connector length exceeds the middle search by this much.
const CONNECTOR_SLACK: usize = 4;
/// The sweep from the `b` side starts at connector distance `CONNECTOR_TAIL`.
const CONNECTOR_TAIL: usize = 2;

fn parallel(ctx: &Ctx, g0: &GspTree, k: &GspTree, floors: &SubdivisionFloor) -> Result<Part> {
    let (a, b) = (g0.terminals().0.to_string(), g0.terminals().1.to_string());
    let split = split_at_bridge(k)?;
    let (c, d) = split.bridge.clone();
    let mut p1 = synth(ctx, &split.left, floors)?;
    // b must keep a neighbour outside the connector's last step, so a direct
    // d-b edge is subdivided at least once
    let mut f2 = floors.clone();
    if contains_edge(&split.right, &d, &b) {
        raise(&mut f2, &d, &b, 1);
    }
    let mut p2 = synth(ctx, &split.right, &f2)?;
    let (r1, r2) = (p1.steps.len(), p2.steps.len() + 1);
    let (na, nb) = (neighbours_in(g0, &a), neighbours_in(g0, &b));
    let delta = na.len().max(nb.len());
    let fa = outward_floor(delta, r1)?;
    let fb = inward_floor(delta, r2)?;
    let mut f0 = floors.clone();
    let mut summed = vec![];
    for u in &na {
        if *u == b {
            raise(&mut f0, &a, u, fa + fb);
            summed.push(edge_key(&a, &b));
        } else {
            raise(&mut f0, &a, u, fa);
        }
    }
    for u in nb.iter().filter(|u| **u != a) {
        raise(&mut f0, &b, u, fb);
    }
    let mut p0 = synth(ctx, g0, &f0)?;
    let s0 = p0.steps.len();
    let len = (s0 + CONNECTOR_SLACK).max(floor_of(floors, &c, &d) + 1);
    let q = ctx.path(&c, &d, len - 1);
    let (va, vb) = (ctx.v(&a), ctx.v(&b));

    let mut steps = steps_of(outward_plan(&va, &paths_at(ctx, &p0, &a), r1)?);
    let sb = steps_of(inward_plan(&vb, &paths_at(ctx, &p0, &b), r2)?);
    steps.append(&mut p1.steps);
    steps.extend((1..=s0 + 2).map(|t| step(&[va, q[t - 1], q[t]])));
    steps.append(&mut p0.steps);
    steps.extend((1..=len - CONNECTOR_TAIL).map(|t| step(&[vb, q[t + CONNECTOR_TAIL - 1], q[t + CONNECTOR_TAIL]])));
    steps.push(step(&[ctx.v(&d)]));
    steps.append(&mut p2.steps);
    steps.extend(sb);

    let connector = Part { a: c.clone(), b: d.clone(), counts: Counts::from([(edge_key(&c, &d), len - 1)]), steps: vec![], summed };
    Ok(assemble(a, b, steps, vec![connector, p0, p1, p2]))
}

// ---------------------------------------------------------------------------
// Top level

/// Builds a subdivision of `tg` meeting `floors` together with a successful
/// 3-search aligned to its terminals, following the simple decomposition `t`.
pub fn synthesize(tg: &TerminalGraph, t: &GspTree, floors: &SubdivisionFloor) -> Result<AlignedSearchBundle> {
    t.validate()?;
    if !t.is_simple() {
        return input("synthesis needs a simple decomposition");
    }
    let (a, b) = (&tg.terminals.0, &tg.terminals.1);
    if t.terminals() != (a.as_str(), b.as_str()) {
        return input("decomposition terminals differ from the graph's");
    }
    let g = &tg.graph;
    let mut tree_edges: Vec<(String, String)> = t.edges().iter().map(|(u, v)| edge_key(u, v)).collect();
    let mut graph_edges: Vec<(String, String)> = g.label_edges().iter().map(|(u, v)| edge_key(u, v)).collect();
    tree_edges.sort();
    graph_edges.sort();
    if tree_edges != graph_edges || t.vertices().len() != g.n() {
        return input("decomposition does not cover the graph exactly");
    }
    for (u, v) in floors.keys() {
        if !g.has_edge(g.require(u)?, g.require(v)?) {
            return input(format!("floor given for non-edge {u}-{v}"));
        }
    }

    let norm = normalize(t)?;
    let mut widen = BTreeSet::new();
    bridges_to_widen(&norm, &mut widen)?;
    let mut pre = EdgeCounts::new();
    for (u, v) in &widen {
        let (x, y) = (g.require(u)?, g.require(v)?);
        pre.insert((x.min(y), x.max(y)), 2);
    }
    let w = subdivide(g, &pre)?;
    let tw = crate::gsp::subdivide_decomposition(&norm, &w)?;
    let wlabel = |u: &str, v: &str, i: usize| w.derived.label(w.edge_path(w.base.id(u).expect("base"), w.base.id(v).expect("base"))[i]).to_string();

    // a widened edge's floor goes to its first segment
    let mut wfloors = SubdivisionFloor::new();
    for ((u, v), &f) in floors {
        if widen.contains(&edge_key(u, v)) {
            raise(&mut wfloors, u, &wlabel(u, v, 1), f.saturating_sub(2));
        } else {
            raise(&mut wfloors, u, v, f);
        }
    }
    let ctx = Ctx::new(&w.derived);
    let part = synth(&ctx, &tw, &wfloors)?;

    // fold widened edges back into single base edges of g
    let mut rename: HashMap<Hv, String> = HashMap::new();
    let mut counts = EdgeCounts::new();
    let mut attained = BTreeMap::new();
    for (x, y) in g.edges() {
        let (u, v) = (g.label(x), g.label(y));
        let c = if widen.contains(&edge_key(u, v)) {
            let mid = [u.to_string(), wlabel(u, v, 1), wlabel(u, v, 2), v.to_string()];
            let mut walk: Vec<Hv> = vec![ctx.v(u)];
            for s in mid.windows(2) {
                let seg = ctx.path(&s[0], &s[1], part.counts[&edge_key(&s[0], &s[1])]);
                walk.extend(seg.into_iter().skip(1));
            }
            let c = walk.len() - 2;
            let forward = label_cmp(u, v).is_le();
            for (i, h) in walk.into_iter().enumerate().skip(1).take(c) {
                rename.insert(h, subdivision_label(u, v, if forward { i } else { c + 1 - i }));
            }
            c
        } else {
            part.counts[&edge_key(u, v)]
        };
        counts.insert((x, y), c);
        attained.insert(edge_key(u, v), c);
    }
    let host = subdivide(g, &counts)?;
    let mut ids: HashMap<Hv, usize> = HashMap::new();
    let mut steps = Vec::with_capacity(part.steps.len());
    for s in &part.steps {
        let mut out = Vec::with_capacity(3);
        for &x in s.iter().filter(|&&x| x != NONE) {
            let id = match ids.get(&x) {
                Some(&id) => id,
                None => {
                    let label = rename.get(&x).cloned().unwrap_or_else(|| ctx.label(x));
                    let id = host.derived.require(&label)?;
                    ids.insert(x, id);
                    id
                }
            };
            out.push(id);
        }
        out.sort_unstable();
        steps.push(out);
    }
    let search = SparseSearch { k: 3, steps };
    let stats = SynthStats {
        host_vertices: host.derived.n(),
        host_edges: host.derived.m(),
        search_length: search.len(),
        summed_floor_edges: part.summed.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect(),
        presubdivided_edges: widen.iter().cloned().collect(),
    };
    let bundle = AlignedSearchBundle { host, search, alignment: (a.clone(), b.clone()), floors_satisfied: attained, stats };
    bundle.check()?;
    for (e, &f) in floors {
        if bundle.floors_satisfied[e] < f {
            return Err(Error::Unresolved(format!("floor {f} on {}-{} not met", e.0, e.1)));
        }
    }
    Ok(bundle)
}

/// Classifies `g` and synthesizes a bundle when it has a simple
/// decomposition; `None` for graphs with a forbidden witness.
pub fn synthesize_graph(g: &Graph, floors: &SubdivisionFloor) -> Result<Option<AlignedSearchBundle>> {
    match crate::gsp::build_simple_gsp(g)? {
        crate::gsp::Verdict::Yes { decomposition } => {
            let (a, b) = decomposition.terminals();
            let tg = TerminalGraph::new(g.clone(), a, b)?;
            synthesize(&tg, &decomposition, floors).map(Some)
        }
        crate::gsp::Verdict::No { .. } => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{is_aligned, is_successful, simulate};
    use crate::generate;
    use crate::gsp::{build_simple_gsp, sp_decompose, Verdict};
    use crate::graph::subdivide;

    fn host_of_edges(edges: &[(&str, &str)], counts: &[((&str, &str), usize)]) -> SubdividedGraph {
        let g = Graph::from_edges(edges).unwrap();
        let c = counts
            .iter()
            .map(|((u, v), c)| {
                let (x, y) = (g.id(u).unwrap(), g.id(v).unwrap());
                ((x.min(y), x.max(y)), *c)
            })
            .collect();
        subdivide(&g, &c).unwrap()
    }

    #[test]
    fn outward_single_edge() {
        let h = host_of_edges(&[("w", "v")], &[(("w", "v"), 3)]);
        let s = clear_ball_outward(&h, "w", "v", 2).unwrap();
        let labels: Vec<Vec<String>> = s.steps.iter().map(|x| h.derived.set_labels(x)).collect();
        assert_eq!(labels, [["(v,w)#2", "(v,w)#3", "w"], ["(v,w)#1", "(v,w)#2", "w"]]);
        let tr = simulate(&h.derived, &s, &h.derived.empty_set()).unwrap();
        let g = &h.derived;
        assert_eq!(g.set_labels(tr.final_fc()), ["(v,w)#2", "(v,w)#3", "w"]);
        assert!(is_aligned(&tr, g.require("w").unwrap(), g.require("v").unwrap()));
    }

    #[test]
    fn ball_radius_zero_is_empty() {
        let h = host_of_edges(&[("w", "v")], &[]);
        assert!(clear_ball_outward(&h, "w", "v", 0).unwrap().is_empty());
        assert!(clear_ball_inward(&h, "w", "v", 0).unwrap().is_empty());
    }

    #[test]
    fn star_lengths() {
        let star = [("w", "x"), ("w", "y"), ("w", "z")];
        let h = host_of_edges(&star, &[(("w", "x"), 5), (("w", "y"), 5), (("w", "z"), 5)]);
        assert_eq!(clear_ball_outward(&h, "w", "x", 1).unwrap().len(), 7);
        let h = host_of_edges(&star[..2], &[(("w", "x"), 6), (("w", "y"), 6)]);
        let s = clear_ball_inward(&h, "w", "x", 3).unwrap();
        assert_eq!(s.len(), 9);
        let a = inward_start(&h, "w", 3).unwrap();
        let tr = simulate(&h.derived, &s, &a).unwrap();
        assert!(is_successful(&h.derived, &tr));
    }

    #[test]
    fn floors_are_enforced() {
        let h = host_of_edges(&[("w", "v")], &[(("w", "v"), 2)]);
        let err = clear_ball_outward(&h, "w", "v", 2).unwrap_err();
        assert!(err.to_string().contains("floor 3"), "{err}");
    }

    #[test]
    fn single_edge_bundle() {
        let g = Graph::from_edges(&[("a", "b")]).unwrap();
        let tg = TerminalGraph::new(g, "a", "b").unwrap();
        let b = synthesize(&tg, &GspTree::edge("a", "b"), &SubdivisionFloor::new()).unwrap();
        assert_eq!(b.step_labels(), [["a", "b"]]);
    }

    #[test]
    fn edge_floor_is_met() {
        let g = Graph::from_edges(&[("a", "b")]).unwrap();
        let tg = TerminalGraph::new(g, "a", "b").unwrap();
        let floors = SubdivisionFloor::from([(edge_key("a", "b"), 4)]);
        let b = synthesize(&tg, &GspTree::edge("a", "b"), &floors).unwrap();
        assert_eq!(b.floors_satisfied[&edge_key("a", "b")], 4);
        assert_eq!(b.search.len(), 5);
    }

    fn run(g: &Graph) -> AlignedSearchBundle {
        let Verdict::Yes { decomposition } = build_simple_gsp(g).unwrap() else { panic!("expected a decomposition") };
        let (a, b) = decomposition.terminals();
        let tg = TerminalGraph::new(g.clone(), a, b).unwrap();
        let bundle = synthesize(&tg, &decomposition, &SubdivisionFloor::new()).unwrap();
        bundle.check().unwrap();
        bundle
    }

    #[test]
    fn cycles_and_small_families() {
        for n in 3..=8 {
            run(&generate::cycle(n).unwrap());
        }
        run(&generate::complete_bipartite(2, 3).unwrap());
        run(&generate::spider(&[2, 2, 2]).unwrap());
        run(&generate::path(6).unwrap());
    }

    #[test]
    fn cycle_through_parallel_of_chains() {
        let g = generate::cycle(5).unwrap();
        let t = sp_decompose(&g, "0", "2").unwrap();
        let tg = TerminalGraph::new(g, "0", "2").unwrap();
        let b = synthesize(&tg, &t, &SubdivisionFloor::new()).unwrap();
        assert!(b.search.max_step() <= 3);
        assert_eq!(b.stats.host_vertices, b.host.derived.n());
    }

    #[test]
    fn bundle_round_trips() {
        let b = run(&generate::cycle(4).unwrap());
        let text = serde_json::to_string(&b).unwrap();
        let back: AlignedSearchBundle = serde_json::from_str(&text).unwrap();
        assert_eq!(back.search, b.search);
        assert_eq!(back.host.derived, b.host.derived);
        back.check().unwrap();
    }

    #[test]
    fn split_chain_of_cycles() {
        let g = Graph::from_edges(&[("a", "x"), ("x", "y"), ("y", "a"), ("y", "z"), ("z", "w"), ("w", "b"), ("b", "z")])
            .unwrap();
        let left = sp_decompose(&g.induced(&g.set_from_labels(["a", "x", "y"]).unwrap()), "a", "y").unwrap();
        let right = sp_decompose(&g.induced(&g.set_from_labels(["z", "w", "b"]).unwrap()), "z", "b").unwrap();
        let t = crate::gsp::series_of(vec![left, GspTree::edge("y", "z"), right]);
        t.validate().unwrap();
        let s = split_at_bridge(&t).unwrap();
        assert_eq!(s.bridge, ("y".to_string(), "z".to_string()));
        assert_eq!(s.left.terminals(), ("a", "y"));
        assert_eq!(s.right.terminals(), ("z", "b"));
        assert!(s.left.is_simple() && s.right.is_simple());
        assert_eq!(s.left.edge_count() + s.right.edge_count() + 1, g.m());
    }

    #[test]
    fn split_needs_a_free_bridge() {
        let t = crate::gsp::sp_decompose(&generate::path(2).unwrap(), "0", "1").unwrap();
        assert!(split_at_bridge(&t).is_err());
        let path: Vec<String> = (0..4).map(|i| i.to_string()).collect();
        let t = crate::gsp::series_chain(&path);
        let s = split_at_bridge(&t).unwrap();
        assert_eq!(s.bridge, ("1".to_string(), "2".to_string()));
    }

    #[test]
    fn grid_windows() {
        let (g, s) = grid_search(2, 2).unwrap();
        assert_eq!(s.len(), 2);
        assert!(is_successful(&g, &simulate(&g, &s, &g.empty_set()).unwrap()));
        for (n, m) in [(3, 4), (4, 3), (5, 2), (4, 4)] {
            let (g, s) = grid_search(n, m).unwrap();
            assert_eq!(s.k, n.min(m) + 1);
            assert_eq!(s.len(), n.min(m) * (n.max(m) - 1));
            assert!(is_successful(&g, &simulate(&g, &s, &g.empty_set()).unwrap()), "{n}x{m}");
        }
        assert!(grid_search(1, 3).is_err());
    }
}
