//! Randomized checks of structural invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;

use zvsearch::game::{push_search, simulate, verify};
use zvsearch::graph::{
    blocks, boundary, components, is_bridged, is_connected, quotient, subdivide, EdgeCounts, EquivalenceSpec,
};
use zvsearch::gsp::{classify_topological_3, complexity, subdivide_decomposition, GspTree, Verdict};
use zvsearch::solver::{boundary_gap_certificate, exists_successful_search, inspection_number, Budget, Config};
use zvsearch::synth::{synthesize_graph, SubdivisionFloor};
use zvsearch::{Graph, Search, VertexSet};

fn build(n: usize, bits: &[bool]) -> Graph {
    let mut edges = vec![];
    let mut i = 0;
    for u in 0..n {
        for v in u + 1..n {
            if bits[i] {
                edges.push((u.to_string(), v.to_string()));
            }
            i += 1;
        }
    }
    Graph::new((0..n).map(|v| v.to_string()), edges).unwrap()
}

fn arb_graph(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    (lo..=hi).prop_flat_map(|n| proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |b| build(n, &b)))
}

fn arb_connected(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    arb_graph(lo, hi).prop_filter("connected", is_connected)
}

fn subset(g: &Graph, mask: u64) -> VertexSet {
    g.set_of((0..g.n()).filter(|&v| mask >> v & 1 == 1))
}

fn vertex_connectivity(g: &Graph) -> usize {
    let n = g.n();
    let mut best = n - 1;
    for mask in 0u64..1 << n {
        let cut = subset(g, mask);
        let size = cut.count_ones(..);
        if size >= best || size + 2 > n {
            continue;
        }
        let mut keep = cut.clone();
        keep.toggle_range(..);
        if components(g, Some(&keep)).len() > 1 {
            best = size;
        }
    }
    best
}

// Whether the block stays connected once `x` is removed.
fn connected_without(vs: &[usize], es: &[(usize, usize)], x: usize) -> bool {
    let rest: Vec<usize> = vs.iter().copied().filter(|&v| v != x).collect();
    let Some(&start) = rest.first() else { return true };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &(a, b) in es {
            let w = if a == u { b } else if b == u { a } else { continue };
            if w != x && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == rest.len()
}

fn tree_vertices(t: &GspTree) -> BTreeSet<String> {
    t.vertices()
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cases(128))]

    #[test]
    fn boundary_is_inside_and_vanishes_on_components(g in arb_graph(1, 8), mask in any::<u64>()) {
        let s = subset(&g, mask);
        let b = boundary(&g, &s);
        prop_assert!(b.is_subset(&s));
        let union_of_components = components(&g, None)
            .iter()
            .all(|c| c.iter().all(|&v| s.contains(v)) || c.iter().all(|&v| !s.contains(v)));
        prop_assert_eq!(b.count_ones(..) == 0, union_of_components);
    }

    #[test]
    fn connectivity_bounds_boundaries(g in arb_connected(2, 7)) {
        let k = vertex_connectivity(&g);
        for mask in 0u64..1 << g.n() {
            let s = subset(&g, mask);
            if s.count_ones(..) >= k && s.count_ones(..) < g.n() {
                prop_assert!(boundary(&g, &s).count_ones(..) >= k);
            }
        }
    }

    #[test]
    fn subdivision_preserves_the_base(g in arb_graph(2, 7), seed in proptest::collection::vec(0usize..4, 21)) {
        let counts: EdgeCounts = g.edges().into_iter().zip(seed).collect();
        let sub = subdivide(&g, &counts).unwrap();
        let extra: usize = counts.values().sum();
        prop_assert_eq!(sub.derived.n(), g.n() + extra);
        prop_assert_eq!(sub.derived.m(), g.m() + extra);
        for (u, v) in g.edges() {
            let p = sub.edge_path(u, v);
            prop_assert_eq!(p.len(), counts[&(u, v)] + 2);
            prop_assert_eq!((p[0], p[p.len() - 1]), (sub.lift(u), sub.lift(v)));
            for w in p.windows(2) {
                prop_assert!(sub.derived.has_edge(w[0], w[1]));
            }
            for &x in &p[1..p.len() - 1] {
                prop_assert_eq!(sub.derived.degree(x), 2);
            }
        }
    }

    #[test]
    fn quotients_stay_simple(g in arb_graph(1, 7), labels in proptest::collection::vec(0usize..4, 7)) {
        let id = quotient(&g, &EquivalenceSpec::singletons(&g));
        prop_assert_eq!(id.graph.label_edges(), g.label_edges());
        let mut classes: Vec<Vec<usize>> = vec![vec![]; 4];
        for v in 0..g.n() {
            classes[labels[v]].push(v);
        }
        classes.retain(|c| !c.is_empty());
        let q = quotient(&g, &EquivalenceSpec::from_classes(&g, &classes).unwrap());
        prop_assert_eq!(q.graph.n(), classes.len());
        let edges: BTreeSet<_> = q.graph.edges().into_iter().collect();
        prop_assert_eq!(edges.len(), q.graph.m());
        prop_assert!(edges.iter().all(|&(u, v)| u != v));
    }

    #[test]
    fn blocks_partition_edges(g in arb_graph(1, 8)) {
        let bc = blocks(&g);
        let mut seen: Vec<(usize, usize)> = bc.block_edges.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, g.edges());
        for (vs, es) in bc.blocks.iter().zip(&bc.block_edges) {
            for &x in vs.iter().filter(|&&x| !bc.is_cut(x)) {
                prop_assert!(connected_without(vs, es, x));
            }
        }
    }

    #[test]
    fn dynamics_are_monotone(g in arb_graph(2, 8), steps in proptest::collection::vec(any::<u64>(), 1..6), a in any::<u64>(), extra in any::<u64>()) {
        let steps: Vec<VertexSet> = steps.iter().map(|&m| subset(&g, m)).collect();
        let s = Search::new(&g, steps, g.n()).unwrap();
        let small = subset(&g, a);
        let mut big = small.clone();
        big.union_with(&subset(&g, extra));
        let (t1, t2) = (simulate(&g, &s, &small).unwrap(), simulate(&g, &s, &big).unwrap());
        for t in 0..s.len() {
            prop_assert!(t1.pc[t].is_subset(&t2.pc[t]));
            prop_assert!(t1.fc[t + 1].is_subset(&t2.fc[t + 1]));
        }
    }

    #[test]
    fn quotient_searches_are_faithful(g in arb_connected(3, 7), labels in proptest::collection::vec(0usize..5, 7), steps in proptest::collection::vec(any::<u8>(), 1..6), a in any::<u8>()) {
        let mut classes: Vec<Vec<usize>> = vec![vec![]; 5];
        for v in 0..g.n() {
            classes[labels[v]].push(v);
        }
        classes.retain(|c| !c.is_empty());
        let spec = EquivalenceSpec::from_classes(&g, &classes).unwrap();
        let q = quotient(&g, &spec);
        let lift = |m: u8| g.set_of(classes.iter().enumerate().filter(|(i, _)| m >> (i % 8) & 1 == 1).flat_map(|(_, c)| c.iter().copied()));
        let s = Search::new(&g, steps.iter().map(|&m| lift(m)).collect(), g.n()).unwrap();
        let init = lift(a);
        let tr = simulate(&g, &s, &init).unwrap();
        prop_assume!(tr.pc.iter().all(|p| spec.is_invariant_set(p)));
        let qtr = simulate(&q.graph, &push_search(&s, &q), &q.wedge(&init)).unwrap();
        for t in 0..s.len() {
            prop_assert_eq!(&qtr.pc[t], &q.wedge(&tr.pc[t]));
            prop_assert_eq!(&qtr.fc[t + 1], &q.wedge(&tr.fc[t + 1]));
        }
    }

    #[test]
    fn pruning_is_safe(g in arb_graph(1, 5)) {
        let on = Config::default();
        let off = Config { prune: false, ..on };
        for k in 1..=g.n() {
            prop_assert_eq!(
                exists_successful_search(&g, k, &on).unwrap().is_some(),
                exists_successful_search(&g, k, &off).unwrap().is_some()
            );
        }
    }

    #[test]
    fn subgraphs_are_no_harder(g in arb_connected(2, 6), drop in any::<prop::sample::Index>()) {
        let full = inspection_number(&g, 7, &Config::default()).unwrap().value.unwrap();
        let edges = g.edges();
        let gone = drop.index(edges.len());
        let kept = edges
            .into_iter()
            .enumerate()
            .filter(|&(i, _)| i != gone)
            .map(|(_, (u, v))| (g.label(u), g.label(v)));
        let h = Graph::new(g.labels(), kept).unwrap();
        let part = inspection_number(&h, 7, &Config::default()).unwrap().value.unwrap();
        prop_assert!(part <= full);
    }

    #[test]
    fn certificates_are_sound(g in arb_connected(1, 7)) {
        let k = inspection_number(&g, 8, &Config::default()).unwrap().value.unwrap();
        prop_assert!(boundary_gap_certificate(&g, k, &Budget::default()).unwrap().is_none());
    }
}

// Decomposition checks run on fewer, costlier cases.
proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn decompositions_recompose(g in arb_connected(2, 8)) {
        let Verdict::Yes { decomposition: t } = classify_topological_3(&g).unwrap() else { return Ok(()) };
        let mut want = g.label_edges();
        let mut got = t.graph().label_edges();
        want.sort();
        got.sort();
        prop_assert_eq!(got, want);
        let all: BTreeSet<String> = g.labels().iter().cloned().collect();
        prop_assert_eq!(tree_vertices(&t), all.clone());

        let report = complexity(&t);
        prop_assert!(report.is_simple());
        for (node, r) in t.nodes().into_iter().zip(&report.nodes) {
            let h = node.graph();
            let (a, b) = node.terminals();
            prop_assert_eq!(r.bridged, is_bridged(&h, h.require(a).unwrap(), h.require(b).unwrap()));
            // the terminals separate the node's interior from the rest
            let inside = tree_vertices(node);
            for (u, v) in g.label_edges() {
                let interior = |x: &str| inside.contains(x) && x != a && x != b;
                prop_assert!(!(interior(&u) && !inside.contains(&v)) && !(interior(&v) && !inside.contains(&u)));
            }
        }
    }

    #[test]
    fn subdivided_decompositions_keep_complexity(g in arb_connected(2, 7), seed in proptest::collection::vec(0usize..3, 21)) {
        let Verdict::Yes { decomposition: t } = classify_topological_3(&g).unwrap() else { return Ok(()) };
        let counts: EdgeCounts = g.edges().into_iter().zip(seed).collect();
        let sub = subdivide(&g, &counts).unwrap();
        let st = subdivide_decomposition(&t, &sub).unwrap();
        prop_assert_eq!(st.complexity(), t.complexity());
        prop_assert_eq!(st.is_simple(), t.is_simple());
        let mut want = sub.derived.label_edges();
        let mut got = st.graph().label_edges();
        want.sort();
        got.sort();
        prop_assert_eq!(got, want);
    }
}

proptest! {
    #![proptest_config(cases(48))]

    #[test]
    fn synthesized_bundles_replay(g in arb_connected(2, 6)) {
        let Some(bundle) = synthesize_graph(&g, &SubdivisionFloor::new()).unwrap() else { return Ok(()) };
        let h = &bundle.host.derived;
        let (a, b) = (h.require(&bundle.alignment.0).unwrap(), h.require(&bundle.alignment.1).unwrap());
        let v = verify(h, &bundle.search.steps, &h.empty_set(), Some((a, b)));
        prop_assert!(v.successful && v.aligned == Some(true) && v.max_step <= 3);
        let again = synthesize_graph(&g, &SubdivisionFloor::new()).unwrap().unwrap();
        prop_assert_eq!(again.step_labels(), bundle.step_labels());
    }
}
