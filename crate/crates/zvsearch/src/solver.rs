//! Exact solvers: inspection number by state-space search, pathwidth by
//! subset DP, direct monotone search, and boundary-size certificates.
//!
//! The game solver explores fully cleared sets reachable from `∅`. Its
//! pruning relies on monotonicity of the dynamics: if `A ⊆ A'` then every
//! state reachable from `A` is dominated by one reachable from `A'`, so only
//! inclusion-maximal states need expanding.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::game::Search;
use crate::graph::{components, Graph};

/// Configurable limits. Exceeding one yields [`Error::Resource`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Distinct states the game solver may store.
    pub states: usize,
    /// Largest vertex count for the pathwidth DP.
    pub pw: usize,
    /// Largest vertex count for boundary-profile enumeration.
    pub profile: usize,
    /// Largest component size for the game solver.
    pub game: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { states: 4_000_000, pw: 22, profile: 24, game: 40 }
    }
}

impl Budget {
    /// Reads overrides from `ZVSEARCH_BUDGET`, e.g. `states=100000,pw=20`.
    pub fn from_env() -> Result<Self> {
        match std::env::var("ZVSEARCH_BUDGET") {
            Ok(s) => Self::default().with_overrides(&s),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let Some((key, val)) = part.split_once('=') else {
                return input(format!("budget entry {part:?} is not key=value"));
            };
            let val: usize = match val.trim().parse() {
                Ok(v) if v > 0 => v,
                _ => return input(format!("budget value {val:?} must be a positive integer")),
            };
            match key.trim() {
                "states" => self.states = val,
                "pw" => self.pw = val,
                "profile" => self.profile = val,
                "game" => self.game = val.min(64),
                other => return input(format!("unknown budget {other:?}")),
            }
        }
        Ok(self)
    }
}

/// Solver settings.
#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub budget: Budget,
    pub workers: usize,
    /// Keep only inclusion-maximal states. Turning this off gives a plain
    /// reachability search, used as an oracle in tests.
    pub prune: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config { budget: Budget::default(), workers: 1, prune: true }
    }
}

/// Outcome of an exact computation.
#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    /// `None` means the value exceeds the requested maximum.
    pub value: Option<usize>,
    #[serde(skip)]
    pub witness: Option<Search>,
    pub explored_states: usize,
    pub method: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub width: usize,
}

impl PathDecomposition {
    /// Checks edge coverage and contiguity.
    pub fn is_valid(&self, g: &Graph) -> bool {
        let covered = g.edges().iter().all(|&(u, v)| self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)));
        let contiguous = (0..g.n()).all(|v| {
            let idx: Vec<usize> = (0..self.bags.len()).filter(|&i| self.bags[i].contains(&v)).collect();
            !idx.is_empty() && idx.last().unwrap() - idx[0] + 1 == idx.len()
        });
        covered && contiguous
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryGapCertificate {
    pub k: usize,
    /// Smallest index with no profile member strictly inside `(i - k, i)`.
    pub i: usize,
    /// Every such index.
    pub gaps: Vec<usize>,
    pub profile: Vec<usize>,
}

// Bitmask view of a graph with at most 64 vertices.
struct Masks {
    n: usize,
    adj: Vec<u64>,
}

impl Masks {
    fn new(g: &Graph) -> Self {
        let adj = (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w)).collect();
        Masks { n: g.n(), adj }
    }

    fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    fn boundary(&self, s: u64) -> u64 {
        let mut b = 0;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.adj[v] & !s != 0 {
                b |= 1 << v;
            }
        }
        b
    }

    fn clear(&self, pc: u64) -> u64 {
        pc & !self.boundary(pc)
    }
}

// All k-subsets of the members of `pool` (the whole pool if it is smaller),
// in lexicographic order of positions.
fn subsets(pool: u64, k: usize) -> Vec<u64> {
    let items: Vec<u32> = (0..64).filter(|&i| pool >> i & 1 == 1).collect();
    if items.len() <= k {
        return vec![pool];
    }
    let mut out = vec![];
    let len = items.len();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().fold(0u64, |m, &i| m | 1 << items[i]));
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + len - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers <= 1 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

struct Explored {
    path: Option<Vec<u64>>,
    states: usize,
}

// Breadth-first search over cleared states of a connected graph. Returns the
// searched sets of a winning play if one exists.
fn explore(m: &Masks, k: usize, cfg: &Config, monotone: bool) -> Result<Explored> {
    let full = m.full();
    let mut parent: HashMap<u64, (u64, u64)> = HashMap::from([(0, (0, 0))]);
    let mut frontier = vec![0u64];
    let mut antichain: Vec<u64> = vec![0];
    let rebuild = |parent: &HashMap<u64, (u64, u64)>| {
        let mut steps = vec![];
        let mut s = full;
        while s != 0 {
            let (p, step) = parent[&s];
            steps.push(step);
            s = p;
        }
        steps.reverse();
        steps
    };
    if full == 0 {
        return Ok(Explored { path: Some(vec![]), states: 1 });
    }
    while !frontier.is_empty() {
        let expand = |&a: &u64| -> Vec<(u64, u64)> {
            subsets(full & !a, k)
                .into_iter()
                .filter_map(|s| {
                    let next = m.clear(a | s);
                    let keep = if monotone { next & a == a && next != a } else { next & !a != 0 };
                    keep.then_some((next, s))
                })
                .collect()
        };
        let batches: Vec<Vec<(u64, u64)>> =
            with_pool(cfg.workers, || frontier.par_iter().map(expand).collect());
        let mut fresh: Vec<u64> = vec![];
        for (a, batch) in frontier.iter().zip(batches) {
            for (next, s) in batch {
                if parent.contains_key(&next) {
                    continue;
                }
                parent.insert(next, (*a, s));
                if next == full {
                    return Ok(Explored { path: Some(rebuild(&parent)), states: parent.len() });
                }
                fresh.push(next);
            }
        }
        if parent.len() > cfg.budget.states {
            return Err(Error::Resource { budget: "states", limit: cfg.budget.states });
        }
        if cfg.prune && !monotone {
            // Largest first, so a state is only compared with possible dominators.
            fresh.sort_by_key(|s| std::cmp::Reverse(s.count_ones()));
            let mut kept = vec![];
            for s in fresh {
                if antichain.iter().any(|&t| s & t == s) {
                    continue;
                }
                antichain.retain(|&t| t & s != t);
                antichain.push(s);
                kept.push(s);
            }
            frontier = kept;
        } else {
            frontier = fresh;
        }
    }
    Ok(Explored { path: None, states: parent.len() })
}

// Runs `solve` on each component and concatenates the witnesses.
fn per_component(
    g: &Graph,
    k: usize,
    cfg: &Config,
    monotone: bool,
) -> Result<(Option<Search>, usize)> {
    if g.n() == 0 {
        return input("graph has no vertices");
    }
    if k == 0 {
        return input("search size must be positive");
    }
    let mut steps = vec![];
    let mut states = 0;
    for comp in components(g, None) {
        if comp.len() > cfg.budget.game {
            return Err(Error::Resource { budget: "game", limit: cfg.budget.game });
        }
        let h = g.induced(&g.set_of(comp.iter().copied()));
        let ex = explore(&Masks::new(&h), k, cfg, monotone)?;
        states += ex.states;
        let Some(path) = ex.path else { return Ok((None, states)) };
        for s in path {
            steps.push(g.set_of((0..h.n()).filter(|&v| s >> v & 1 == 1).map(|v| comp[v])));
        }
    }
    Ok((Some(Search::new(g, steps, k)?), states))
}

/// A successful `k`-search, or `None` when none exists.
pub fn exists_successful_search(g: &Graph, k: usize, cfg: &Config) -> Result<Option<Search>> {
    per_component(g, k, cfg, false).map(|r| r.0)
}

/// A successful `k`-search whose cleared set never shrinks, or `None`.
pub fn exists_monotonic_search(g: &Graph, k: usize, cfg: &Config) -> Result<Option<Search>> {
    per_component(g, k, cfg, true).map(|r| r.0)
}

/// Smallest `k ≤ k_max` admitting a successful `k`-search.
pub fn inspection_number(g: &Graph, k_max: usize, cfg: &Config) -> Result<SolveResult> {
    if k_max == 0 {
        return input("k_max must be positive");
    }
    let bound = if g.n() <= cfg.budget.pw { Some(pathwidth(g, &cfg.budget)?) } else { None };
    let scan_to = bound.as_ref().map_or(k_max, |(pw, _)| k_max.min(*pw));
    let mut explored = 0;
    for k in 1..=scan_to {
        let (found, states) = per_component(g, k, cfg, false)?;
        explored += states;
        if let Some(w) = found {
            return Ok(SolveResult { value: Some(k), witness: Some(w), explored_states: explored, method: "search" });
        }
    }
    match bound {
        Some((pw, dec)) if pw < k_max => {
            let steps = dec.bags.iter().map(|b| g.set_of(b.iter().copied())).collect();
            Ok(SolveResult {
                value: Some(pw + 1),
                witness: Some(Search::new(g, steps, pw + 1)?),
                explored_states: explored,
                method: "pathwidth-bound",
            })
        }
        _ => Ok(SolveResult { value: None, witness: None, explored_states: explored, method: "search" }),
    }
}

/// Exact pathwidth by the vertex-separation subset DP.
pub fn pathwidth(g: &Graph, budget: &Budget) -> Result<(usize, PathDecomposition)> {
    let n = g.n();
    if n > budget.pw || n > 30 {
        return Err(Error::Resource { budget: "pw", limit: budget.pw.min(30) });
    }
    if n == 0 {
        return input("graph has no vertices");
    }
    let m = Masks::new(g);
    let size = 1usize << n;
    let mut f = vec![0u8; size];
    for s in 1..size {
        let bnd = m.boundary(s as u64).count_ones() as u8;
        let mut best = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            best = best.min(f[s & !(1 << v)]);
        }
        f[s] = bnd.max(best);
    }
    let mut order = vec![];
    let mut s = size - 1;
    while s != 0 {
        let v = (0..n).filter(|&v| s >> v & 1 == 1).min_by_key(|&v| f[s & !(1 << v)]).expect("nonempty");
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    let mut bags = vec![];
    let mut prefix = 0u64;
    for &v in &order {
        let mut bag: Vec<usize> = (0..n).filter(|&u| m.boundary(prefix) >> u & 1 == 1).collect();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        prefix |= 1 << v;
    }
    let width = bags.iter().map(Vec::len).max().unwrap_or(1) - 1;
    debug_assert_eq!(width, f[size - 1] as usize);
    Ok((width, PathDecomposition { bags, width }))
}

/// Monotonic inspection number `pw + 1`, witnessed by the bag sequence.
pub fn monotonic_inspection_number(g: &Graph, budget: &Budget) -> Result<SolveResult> {
    let (pw, dec) = pathwidth(g, budget)?;
    let steps = dec.bags.iter().map(|b| g.set_of(b.iter().copied())).collect();
    Ok(SolveResult {
        value: Some(pw + 1),
        witness: Some(Search::new(g, steps, pw + 1)?),
        explored_states: 1 << g.n(),
        method: "pathwidth",
    })
}

/// Sizes of all vertex sets whose boundary has fewer than `k` vertices.
pub fn boundary_profile(g: &Graph, k: usize, budget: &Budget) -> Result<BTreeSet<usize>> {
    let n = g.n();
    if n > budget.profile || n > 63 {
        return Err(Error::Resource { budget: "profile", limit: budget.profile.min(63) });
    }
    let m = Masks::new(g);
    let mut found = BTreeSet::new();
    // Decide vertices in id order; a vertex inside with a decided neighbour
    // outside is already on the boundary.
    fn go(m: &Masks, v: usize, inside: u64, decided: u64, k: usize, found: &mut BTreeSet<usize>) {
        let outside = decided & !inside;
        let mut partial = 0;
        let mut rest = inside;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if m.adj[u] & outside != 0 {
                partial += 1;
            }
        }
        if partial >= k {
            return;
        }
        if v == m.n {
            found.insert(inside.count_ones() as usize);
            return;
        }
        let bit = 1u64 << v;
        go(m, v + 1, inside, decided | bit, k, found);
        go(m, v + 1, inside | bit, decided | bit, k, found);
    }
    go(&m, 0, 0, 0, k, &mut found);
    Ok(found)
}

/// An index `i` such that no set with boundary below `k` has size strictly
/// between `i - k` and `i`; its existence proves the inspection number
/// exceeds `k`. `None` is inconclusive.
pub fn boundary_gap_certificate(g: &Graph, k: usize, budget: &Budget) -> Result<Option<BoundaryGapCertificate>> {
    // The size argument needs a nonempty boundary, which an edgeless graph
    // never has; such graphs are cleared by single steps anyway.
    if g.m() == 0 {
        return Ok(None);
    }
    let profile = boundary_profile(g, k, budget)?;
    let gaps: Vec<usize> = (1..=g.n())
        .filter(|&i| !profile.iter().any(|&c| c + k > i && c < i))
        .collect();
    Ok(gaps.first().map(|&i| BoundaryGapCertificate {
        k,
        i,
        gaps: gaps.clone(),
        profile: profile.iter().copied().collect(),
    }))
}
