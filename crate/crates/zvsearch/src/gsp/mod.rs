//! Generalized series-parallel (GSP) decompositions.
//!
//! A [`GspTree`] is a binary tree whose leaves are single edges and whose
//! inner nodes combine two graphs with terminals by one of four operations.
//! Trees refer to vertices by label so they survive re-indexing, e.g. after
//! subdivision.

mod classify;
mod k4;
mod sp;
mod witness;

pub use classify::{build_simple_gsp, classify_topological_3, minimal_complex_descendant, MinimalComplex, Verdict};
pub use k4::{has_k4_subdivision, is_k4_subdivision_free};
pub use sp::{gsp_decompose, merge_block, rotate_parallel, sp_decompose};
pub use witness::{brute_force_forbidden, extract_bipaths, pattern_check, pattern_check_in, BipathRole, Family, ForbiddenWitness};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{label_cmp, Graph, SubdividedGraph};

/// Composition operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    /// `(G, u, v) ∘ (H, v, w) = (G ∪ H, u, w)`, sharing only `v`.
    Series,
    /// `(G, u, v) ∘ (H, u, v) = (G ∪ H, u, v)`, sharing only `u, v`.
    Parallel,
    /// `(G, u, v) ∘ (H, u, w) = (G ∪ H, u, v)`, sharing only `u`.
    Branch,
    /// `(G, u, v) ∘ (H, v, w) = (G ∪ H, u, v)`, sharing only `v`.
    BranchPrime,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Series => "series",
            Op::Parallel => "parallel",
            Op::Branch => "branch",
            Op::BranchPrime => "branch_prime",
        }
    }
}

/// A graph together with an ordered pair of distinct terminals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminalGraph {
    pub graph: Graph,
    pub terminals: (String, String),
}

impl TerminalGraph {
    pub fn new(graph: Graph, a: &str, b: &str) -> Result<Self> {
        graph.require(a)?;
        graph.require(b)?;
        if a == b {
            return input("terminals must be distinct");
        }
        Ok(TerminalGraph { graph, terminals: (a.to_string(), b.to_string()) })
    }

    /// Whether some bridge separates the terminals.
    pub fn is_bridged(&self) -> bool {
        let g = &self.graph;
        let (a, b) = (g.id(&self.terminals.0), g.id(&self.terminals.1));
        crate::graph::is_bridged(g, a.expect("terminal"), b.expect("terminal"))
    }
}

/// A GSP decomposition tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Record", try_from = "Record")]
pub enum GspTree {
    /// A single edge with terminals in the given order.
    Edge(String, String),
    Node {
        op: Op,
        terminals: (String, String),
        left: Box<GspTree>,
        right: Box<GspTree>,
    },
}

/// Per-node summary produced by [`complexity`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeReport {
    pub terminals: (String, String),
    pub op: Option<Op>,
    pub complexity: usize,
    pub bridged: bool,
    /// Preorder index of the parent, `None` for the root.
    pub parent: Option<usize>,
}

/// Complexity and bridgedness of every node, in preorder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexityReport {
    pub nodes: Vec<NodeReport>,
}

impl ComplexityReport {
    pub fn root(&self) -> &NodeReport {
        &self.nodes[0]
    }

    pub fn is_simple(&self) -> bool {
        self.nodes.iter().all(|n| n.complexity <= 1)
    }
}

pub fn complexity(t: &GspTree) -> ComplexityReport {
    fn walk(t: &GspTree, parent: Option<usize>, out: &mut Vec<NodeReport>) -> (usize, bool) {
        let me = out.len();
        let (a, b) = t.terminals();
        out.push(NodeReport { terminals: (a.into(), b.into()), op: t.op(), complexity: 0, bridged: true, parent });
        let (c, br) = match t {
            GspTree::Edge(..) => (0, true),
            GspTree::Node { op, left, right, .. } => {
                let (cl, bl) = walk(left, Some(me), out);
                let (cr, brr) = walk(right, Some(me), out);
                match op {
                    Op::Series => {
                        let br = bl || brr;
                        (usize::from(!br), br)
                    }
                    Op::Parallel => (cl + cr, false),
                    Op::Branch | Op::BranchPrime => (cl, bl),
                }
            }
        };
        out[me].complexity = c;
        out[me].bridged = br;
        (c, br)
    }
    let mut nodes = vec![];
    walk(t, None, &mut nodes);
    ComplexityReport { nodes }
}

impl GspTree {
    pub fn edge(u: &str, v: &str) -> Self {
        GspTree::Edge(u.to_string(), v.to_string())
    }

    pub fn terminals(&self) -> (&str, &str) {
        match self {
            GspTree::Edge(u, v) => (u, v),
            GspTree::Node { terminals, .. } => (&terminals.0, &terminals.1),
        }
    }

    pub fn op(&self) -> Option<Op> {
        match self {
            GspTree::Edge(..) => None,
            GspTree::Node { op, .. } => Some(*op),
        }
    }

    pub fn children(&self) -> Option<(&GspTree, &GspTree)> {
        match self {
            GspTree::Edge(..) => None,
            GspTree::Node { left, right, .. } => Some((left, right)),
        }
    }

    /// Combines two trees without checking the vertex-intersection clause.
    pub(crate) fn join(op: Op, left: GspTree, right: GspTree) -> Self {
        let (u, v) = left.terminals();
        let terminals = match op {
            Op::Series => (u.to_string(), right.terminals().1.to_string()),
            _ => (u.to_string(), v.to_string()),
        };
        GspTree::Node { op, terminals, left: Box::new(left), right: Box::new(right) }
    }

    /// Combines two trees, enforcing the terminal and intersection rules.
    pub fn compose(op: Op, left: GspTree, right: GspTree) -> Result<Self> {
        check_compose(op, &left, &right)?;
        Ok(Self::join(op, left, right))
    }

    pub fn vertices(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.for_each_edge(&mut |u, v| {
            out.insert(u.to_string());
            out.insert(v.to_string());
        });
        out
    }

    /// Edges with endpoints in label order, sorted.
    pub fn edges(&self) -> Vec<(String, String)> {
        let mut out = vec![];
        self.for_each_edge(&mut |u, v| {
            if label_cmp(u, v).is_le() {
                out.push((u.to_string(), v.to_string()));
            } else {
                out.push((v.to_string(), u.to_string()));
            }
        });
        out.sort_by(|x, y| label_cmp(&x.0, &y.0).then_with(|| label_cmp(&x.1, &y.1)));
        out
    }

    pub fn for_each_edge(&self, f: &mut impl FnMut(&str, &str)) {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                GspTree::Edge(u, v) => f(u, v),
                GspTree::Node { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
    }

    pub fn edge_count(&self) -> usize {
        let mut n = 0;
        self.for_each_edge(&mut |_, _| n += 1);
        n
    }

    /// The composed graph.
    pub fn graph(&self) -> Graph {
        let e = self.edges();
        Graph::from_edges(&e).expect("tree edges form a simple graph")
    }

    pub fn terminal_graph(&self) -> TerminalGraph {
        let (a, b) = self.terminals();
        TerminalGraph { graph: self.graph(), terminals: (a.into(), b.into()) }
    }

    /// Checks every node against its operation, which also shows that the
    /// tree recomposes to [`GspTree::graph`] without repeated edges.
    pub fn validate(&self) -> Result<()> {
        fn go(t: &GspTree) -> Result<BTreeSet<String>> {
            match t {
                GspTree::Edge(u, v) if u == v => input(format!("leaf edge {u}-{v} is a loop")),
                GspTree::Edge(u, v) => Ok([u.clone(), v.clone()].into()),
                GspTree::Node { op, terminals, left, right } => {
                    let vl = go(left)?;
                    let vr = go(right)?;
                    check_sets(*op, left, right, &vl, &vr)?;
                    check_terminal_edge(*op, left, right)?;
                    let (u, v) = left.terminals();
                    let want = match op {
                        Op::Series => (u, right.terminals().1),
                        _ => (u, v),
                    };
                    if (terminals.0.as_str(), terminals.1.as_str()) != want {
                        return input(format!("{} node has terminals {terminals:?}, expected {want:?}", op.name()));
                    }
                    Ok(vl.union(&vr).cloned().collect())
                }
            }
        }
        go(self).map(|_| ())
    }

    pub fn complexity(&self) -> usize {
        complexity(self).root().complexity
    }

    pub fn is_simple(&self) -> bool {
        complexity(self).is_simple()
    }

    /// Bridgedness of the root, from the tree structure alone.
    pub fn is_bridged(&self) -> bool {
        complexity(self).root().bridged
    }

    /// Whether only series and parallel operations occur.
    pub fn is_series_parallel(&self) -> bool {
        match self {
            GspTree::Edge(..) => true,
            GspTree::Node { op, left, right, .. } => {
                matches!(op, Op::Series | Op::Parallel) && left.is_series_parallel() && right.is_series_parallel()
            }
        }
    }

    /// All nodes in preorder.
    pub fn nodes(&self) -> Vec<&GspTree> {
        let mut out = vec![];
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            if let Some((l, r)) = t.children() {
                stack.push(r);
                stack.push(l);
            }
        }
        out
    }
}

fn check_sets(op: Op, l: &GspTree, r: &GspTree, vl: &BTreeSet<String>, vr: &BTreeSet<String>) -> Result<()> {
    let (u, v) = l.terminals();
    let (x, y) = r.terminals();
    let (ok, shared, clause): (bool, Vec<&str>, &str) = match op {
        Op::Series => (v == x, vec![v], "series needs right to start at left's second terminal"),
        Op::Parallel => ((u, v) == (x, y), vec![u, v], "parallel needs equal terminals"),
        Op::Branch => (u == x, vec![u], "branch needs both to start at the same terminal"),
        Op::BranchPrime => (v == x, vec![v], "branch' needs right to start at left's second terminal"),
    };
    if !ok {
        return input(format!("{clause}: ({u},{v}) and ({x},{y})"));
    }
    let common: Vec<&String> = vl.intersection(vr).collect();
    let mut want: Vec<&str> = shared;
    want.sort_unstable();
    let mut got: Vec<&str> = common.iter().map(|s| s.as_str()).collect();
    got.sort_unstable();
    if got != want {
        return input(format!("{} operands must share exactly {want:?}, share {got:?}", op.name()));
    }
    Ok(())
}

fn check_compose(op: Op, l: &GspTree, r: &GspTree) -> Result<()> {
    check_sets(op, l, r, &l.vertices(), &r.vertices())?;
    check_terminal_edge(op, l, r)
}

// Parallel operands share both terminals, so they must not both hold the
// edge between them.
fn check_terminal_edge(op: Op, l: &GspTree, r: &GspTree) -> Result<()> {
    if op != Op::Parallel {
        return Ok(());
    }
    let (u, v) = l.terminals();
    let has = |t: &GspTree| {
        let mut found = false;
        t.for_each_edge(&mut |x, y| found |= (x, y) == (u, v) || (y, x) == (u, v));
        found
    };
    if has(l) && has(r) {
        return input(format!("both parallel operands contain the edge {u}-{v}"));
    }
    Ok(())
}

/// The same decomposition with terminals swapped. Bridgedness, and hence
/// complexity, is unchanged at every node.
pub fn invert(t: &GspTree) -> GspTree {
    match t {
        GspTree::Edge(u, v) => GspTree::Edge(v.clone(), u.clone()),
        GspTree::Node { op, left, right, .. } => match op {
            Op::Series | Op::Parallel => GspTree::join(*op, invert(right), invert(left)),
            Op::Branch => GspTree::join(Op::BranchPrime, invert(left), (**right).clone()),
            Op::BranchPrime => GspTree::join(Op::Branch, invert(left), (**right).clone()),
        },
    }
}

/// Checked variant of [`invert`] for callers that require simplicity.
pub fn invert_simple(t: &GspTree) -> Result<GspTree> {
    if !t.is_simple() {
        return input("inversion expects a simple decomposition");
    }
    Ok(invert(t))
}

/// Balanced series chain along `path` (at least two vertices).
pub(crate) fn series_chain(path: &[String]) -> GspTree {
    if path.len() == 2 {
        return GspTree::Edge(path[0].clone(), path[1].clone());
    }
    let mid = path.len() / 2;
    GspTree::join(Op::Series, series_chain(&path[..=mid]), series_chain(&path[mid..]))
}

/// Left-to-right series composition of trees forming a terminal chain.
pub(crate) fn series_of(parts: Vec<GspTree>) -> GspTree {
    let mut it = parts.into_iter();
    let first = it.next().expect("nonempty chain");
    it.fold(first, |acc, t| GspTree::join(Op::Series, acc, t))
}

/// Left-deep parallel composition.
pub(crate) fn parallel_of(parts: Vec<GspTree>) -> GspTree {
    let mut it = parts.into_iter();
    let first = it.next().expect("nonempty group");
    it.fold(first, |acc, t| GspTree::join(Op::Parallel, acc, t))
}

/// Maps a decomposition of the base graph onto its subdivision: every node
/// keeps its terminals and leaves become series chains.
pub fn subdivide_decomposition(t: &GspTree, sub: &SubdividedGraph) -> Result<GspTree> {
    match t {
        GspTree::Edge(u, v) => {
            let (a, b) = (sub.base.require(u)?, sub.base.require(v)?);
            if !sub.base.has_edge(a, b) {
                return input(format!("leaf {u}-{v} is not a base edge"));
            }
            let path: Vec<String> = sub.edge_path(a, b).iter().map(|&x| sub.derived.label(x).to_string()).collect();
            Ok(series_chain(&path))
        }
        GspTree::Node { op, left, right, .. } => {
            Ok(GspTree::join(*op, subdivide_decomposition(left, sub)?, subdivide_decomposition(right, sub)?))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Record {
    op: String,
    terminals: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Vec<Record>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edge: Option<[String; 2]>,
}

impl From<GspTree> for Record {
    fn from(t: GspTree) -> Self {
        match t {
            GspTree::Edge(u, v) => Record {
                op: "edge".into(),
                terminals: [u.clone(), v.clone()],
                children: None,
                edge: Some([u, v]),
            },
            GspTree::Node { op, terminals, left, right } => Record {
                op: op.name().into(),
                terminals: [terminals.0, terminals.1],
                children: Some(vec![Record::from(*left), Record::from(*right)]),
                edge: None,
            },
        }
    }
}

impl TryFrom<Record> for GspTree {
    type Error = Error;

    fn try_from(r: Record) -> Result<Self> {
        let op = match r.op.as_str() {
            "edge" => {
                let [u, v] = r.edge.ok_or_else(|| Error::Input("edge record without edge".into()))?;
                return Ok(GspTree::Edge(u, v));
            }
            "series" => Op::Series,
            "parallel" => Op::Parallel,
            "branch" => Op::Branch,
            "branch_prime" => Op::BranchPrime,
            other => return input(format!("unknown op {other:?}")),
        };
        let kids = r.children.ok_or_else(|| Error::Input("inner record without children".into()))?;
        let [l, rt]: [Record; 2] = kids.try_into().map_err(|_| Error::Input("need exactly two children".into()))?;
        let t = GspTree::join(op, GspTree::try_from(l)?, GspTree::try_from(rt)?);
        let (a, b) = t.terminals();
        if [a, b] != [r.terminals[0].as_str(), r.terminals[1].as_str()] {
            return input(format!("record terminals {:?} do not match children", r.terminals));
        }
        Ok(t)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::F1 => "F1",
            Family::F2 => "F2",
            Family::F3 => "F3",
        })
    }
}
