//! The zero-visibility search game.
//!
//! Starting from an initially cleared set `A = FC_0`, each step searches a
//! set `S_t`; the pre-cleared set is `PC_t = FC_{t-1} ∪ S_t` and the intruder
//! then recontaminates its boundary, leaving `FC_t = PC_t ∖ ∂(PC_t)`.

use std::collections::BTreeSet;

use crate::error::{input, Result};
use crate::graph::{boundary, Graph, Quotient, VertexSet};

/// A sequence of searched sets with a declared size bound `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Search {
    pub k: usize,
    pub steps: Vec<VertexSet>,
}

impl Search {
    /// Validates step sizes and membership against `g`.
    pub fn new(g: &Graph, steps: Vec<VertexSet>, k: usize) -> Result<Self> {
        for (t, s) in steps.iter().enumerate() {
            if s.len() != g.n() {
                return input(format!("step {} is not a vertex set of this graph", t + 1));
            }
            if s.count_ones(..) > k {
                return input(format!("step {} searches {} > {k} vertices", t + 1, s.count_ones(..)));
            }
        }
        Ok(Search { k, steps })
    }

    /// Search whose size bound is its largest step.
    pub fn tight(g: &Graph, steps: Vec<VertexSet>) -> Result<Self> {
        let k = steps.iter().map(|s| s.count_ones(..)).max().unwrap_or(0);
        Self::new(g, steps, k)
    }

    pub fn from_labels(g: &Graph, steps: &[&[&str]], k: usize) -> Result<Self> {
        let sets = steps.iter().map(|s| g.set_from_labels(s.iter())).collect::<Result<Vec<_>>>()?;
        Self::new(g, sets, k)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn max_step(&self) -> usize {
        self.steps.iter().map(|s| s.count_ones(..)).max().unwrap_or(0)
    }
}

/// A search stored as vertex lists, for hosts where one bitset per step
/// would not fit in memory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseSearch {
    pub k: usize,
    pub steps: Vec<Vec<usize>>,
}

impl SparseSearch {
    pub fn from_search(s: &Search) -> Self {
        SparseSearch { k: s.k, steps: s.steps.iter().map(|x| x.ones().collect()).collect() }
    }

    /// Dense form; validates membership and the size bound.
    pub fn to_search(&self, g: &Graph) -> Result<Search> {
        if let Some(&v) = self.steps.iter().flatten().find(|&&v| v >= g.n()) {
            return input(format!("vertex id {v} out of range"));
        }
        Search::new(g, self.steps.iter().map(|s| g.set_of(s.iter().copied())).collect(), self.k)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn max_step(&self) -> usize {
        self.steps.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Full set sequences of one play. `fc[0]` is the initial set and
/// `pc[t - 1]` is `PC_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchTrace {
    pub pc: Vec<VertexSet>,
    pub fc: Vec<VertexSet>,
}

impl SearchTrace {
    pub fn initial(&self) -> &VertexSet {
        &self.fc[0]
    }

    pub fn final_fc(&self) -> &VertexSet {
        self.fc.last().expect("fc is never empty")
    }
}

pub fn simulate(g: &Graph, search: &Search, initial: &VertexSet) -> Result<SearchTrace> {
    if initial.len() != g.n() || search.steps.iter().any(|s| s.len() != g.n()) {
        return input("search or initial set does not belong to this graph");
    }
    let mut pc = Vec::with_capacity(search.len());
    let mut fc = vec![initial.clone()];
    for s in &search.steps {
        let mut p = fc.last().expect("nonempty").clone();
        p.union_with(s);
        let mut f = p.clone();
        f.difference_with(&boundary(g, &p));
        pc.push(p);
        fc.push(f);
    }
    Ok(SearchTrace { pc, fc })
}

pub fn is_successful(g: &Graph, trace: &SearchTrace) -> bool {
    trace.final_fc().count_ones(..) == g.n()
}

pub fn is_monotonic(trace: &SearchTrace) -> bool {
    trace.fc.windows(2).all(|w| w[0].is_subset(&w[1]))
}

/// `a` is pre-cleared at every step and `b` is not fully cleared before
/// the last step.
pub fn is_aligned(trace: &SearchTrace, a: usize, b: usize) -> bool {
    trace.pc.iter().all(|p| p.contains(a)) && trace.fc[..trace.fc.len() - 1].iter().all(|f| !f.contains(b))
}

/// The image of a search under a vertex partition.
pub fn push_search(search: &Search, q: &Quotient) -> Search {
    Search { k: search.k, steps: search.steps.iter().map(|s| q.vee(s)).collect() }
}

/// Whether every pre-cleared set is a union of classes.
pub fn is_invariant(g: &Graph, search: &Search, initial: &VertexSet, q: &Quotient) -> Result<bool> {
    let trace = simulate(g, search, initial)?;
    Ok(trace.pc.iter().all(|p| q.spec.is_invariant_set(p)))
}

/// Summary of a streamed replay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub steps: usize,
    pub max_step: usize,
    pub successful: bool,
    pub monotonic: bool,
    /// `None` when no pair was requested.
    pub aligned: Option<bool>,
    pub final_cleared: usize,
}

/// Anything that can hand out neighbour lists of vertices `0..order()`.
pub trait Adjacency {
    fn order(&self) -> usize;
    fn adjacent(&self, v: usize) -> &[usize];
}

impl Adjacency for Graph {
    fn order(&self) -> usize {
        self.n()
    }

    fn adjacent(&self, v: usize) -> &[usize] {
        self.neighbors(v)
    }
}

impl Adjacency for [Vec<usize>] {
    fn order(&self) -> usize {
        self.len()
    }

    fn adjacent(&self, v: usize) -> &[usize] {
        &self[v]
    }
}

/// Incremental replay that never materialises the whole trace; each step
/// costs time proportional to the searched set, the current boundary and
/// their neighbourhoods.
pub struct Replay<'g, G: Adjacency + ?Sized = Graph> {
    g: &'g G,
    pc: VertexSet,
    // neighbours of v outside pc
    out: Vec<u32>,
    bnd: BTreeSet<usize>,
    // boundary of the initial set, still to be examined by the first step
    pending: Vec<usize>,
    monotonic: bool,
}

impl<'g, G: Adjacency + ?Sized> Replay<'g, G> {
    pub fn new(g: &'g G, initial: &VertexSet) -> Self {
        let out: Vec<u32> = (0..g.order())
            .map(|v| g.adjacent(v).iter().filter(|&&w| !initial.contains(w)).count() as u32)
            .collect();
        let pending = initial.ones().filter(|&v| out[v] > 0).collect();
        Replay { g, pc: initial.clone(), out, bnd: BTreeSet::new(), pending, monotonic: true }
    }

    fn flip(&mut self, v: usize, into_pc: bool) {
        self.pc.set(v, into_pc);
        for &w in self.g.adjacent(v) {
            if into_pc {
                self.out[w] -= 1;
            } else {
                self.out[w] += 1;
            }
        }
    }

    /// Plays one step. Returns whether `FC` grew weakly.
    pub fn step(&mut self, s: &[usize]) -> bool {
        let old_bnd = std::mem::take(&mut self.bnd);
        let drop: Vec<usize> = old_bnd.iter().copied().filter(|v| !s.contains(v)).collect();
        let added: Vec<usize> = s.iter().copied().filter(|&v| !self.pc.contains(v)).collect();
        for &v in &drop {
            self.flip(v, false);
        }
        for &v in &added {
            self.flip(v, true);
        }
        let mut touched: BTreeSet<usize> = std::mem::take(&mut self.pending).into_iter().collect();
        for &v in old_bnd.iter().chain(&added).chain(s) {
            touched.insert(v);
            touched.extend(self.g.adjacent(v));
        }
        let mut grew = true;
        for v in touched {
            if self.pc.contains(v) && self.out[v] > 0 {
                self.bnd.insert(v);
                if !added.contains(&v) && !old_bnd.contains(&v) {
                    grew = false;
                }
            }
        }
        self.monotonic &= grew;
        grew
    }

    pub fn fc_contains(&self, v: usize) -> bool {
        self.pc.contains(v) && !self.bnd.contains(&v)
    }

    pub fn pc_contains(&self, v: usize) -> bool {
        self.pc.contains(v)
    }

    pub fn fc_count(&self) -> usize {
        self.pc.count_ones(..) - self.bnd.len()
    }

    pub fn fc(&self) -> VertexSet {
        let mut f = self.pc.clone();
        for &v in &self.bnd {
            f.set(v, false);
        }
        f
    }
}

/// Streams `steps` from `initial` and reports the predicates.
pub fn verify<G: Adjacency + ?Sized, S: AsRef<[usize]>>(
    g: &G,
    steps: &[S],
    initial: &VertexSet,
    align: Option<(usize, usize)>,
) -> Verdict {
    let mut r = Replay::new(g, initial);
    let mut aligned = align.map(|(_, b)| !initial.contains(b));
    let last = steps.len();
    for (t, s) in steps.iter().enumerate() {
        r.step(s.as_ref());
        if let (Some(ok), Some((a, b))) = (aligned.as_mut(), align) {
            *ok &= r.pc_contains(a) && (t + 1 == last || !r.fc_contains(b));
        }
    }
    Verdict {
        steps: last,
        max_step: steps.iter().map(|s| s.as_ref().len()).max().unwrap_or(0),
        successful: r.fc_count() == g.order(),
        monotonic: r.monotonic,
        aligned,
        final_cleared: r.fc_count(),
    }
}
