use super::{Graph, VertexSet};
use crate::error::{input, Result};

/// A partition of the vertices of one graph. Classes are lists of ids, each
/// sorted, ordered by smallest member; unmentioned vertices are singletons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceSpec {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl EquivalenceSpec {
    pub fn singletons(g: &Graph) -> Self {
        Self::from_classes(g, &[]).expect("empty class list is valid")
    }

    /// Builds a partition from explicit (possibly partial) classes.
    pub fn from_classes(g: &Graph, classes: &[Vec<usize>]) -> Result<Self> {
        let n = g.n();
        let mut owner = vec![usize::MAX; n];
        for (i, c) in classes.iter().enumerate() {
            for &v in c {
                if v >= n {
                    return input(format!("class member {v} out of range"));
                }
                if owner[v] != usize::MAX {
                    return input(format!("vertex {} in two classes", g.label(v)));
                }
                owner[v] = i;
            }
        }
        let mut all: Vec<Vec<usize>> = classes.iter().filter(|c| !c.is_empty()).cloned().collect();
        all.extend((0..n).filter(|&v| owner[v] == usize::MAX).map(|v| vec![v]));
        for c in &mut all {
            c.sort_unstable();
        }
        all.sort_by_key(|c| c[0]);
        let mut class_of = vec![0; n];
        for (i, c) in all.iter().enumerate() {
            for &v in c {
                class_of[v] = i;
            }
        }
        Ok(EquivalenceSpec { class_of, classes: all })
    }

    pub fn from_labels(g: &Graph, classes: &[Vec<&str>]) -> Result<Self> {
        let ids = classes
            .iter()
            .map(|c| c.iter().map(|l| g.require(l)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_classes(g, &ids)
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Whether `s` is a union of classes.
    pub fn is_invariant_set(&self, s: &VertexSet) -> bool {
        self.classes.iter().all(|c| {
            let inside = c.iter().filter(|&&v| s.contains(v)).count();
            inside == 0 || inside == c.len()
        })
    }
}

/// The quotient graph together with the map from classes to its vertices.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub graph: Graph,
    pub spec: EquivalenceSpec,
    // class index -> vertex id in `graph`
    vertex_of_class: Vec<usize>,
}

impl Quotient {
    pub fn vertex_of(&self, v: usize) -> usize {
        self.vertex_of_class[self.spec.class_of(v)]
    }

    /// Classes meeting `s`.
    pub fn vee(&self, s: &VertexSet) -> VertexSet {
        self.graph.set_of(s.ones().map(|v| self.vertex_of(v)))
    }

    /// Classes contained in `s`.
    pub fn wedge(&self, s: &VertexSet) -> VertexSet {
        let full = self
            .spec
            .classes()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.iter().all(|&v| s.contains(v)))
            .map(|(i, _)| self.vertex_of_class[i]);
        self.graph.set_of(full)
    }
}

/// Merges each class into one vertex labelled by its smallest member.
/// Edges inside a class disappear; parallel edges collapse.
pub fn quotient(g: &Graph, spec: &EquivalenceSpec) -> Quotient {
    let name = |v: usize| g.label(spec.classes()[spec.class_of(v)][0]);
    let verts: Vec<&str> = spec.classes().iter().map(|c| g.label(c[0])).collect();
    let edges = g
        .edges()
        .into_iter()
        .filter(|&(u, v)| spec.class_of(u) != spec.class_of(v))
        .map(|(u, v)| (name(u), name(v)));
    let graph = Graph::new(verts, edges).expect("quotient of a valid graph");
    let vertex_of_class = spec.classes().iter().map(|c| graph.id(g.label(c[0])).expect("class label")).collect();
    Quotient { graph, spec: spec.clone(), vertex_of_class }
}
