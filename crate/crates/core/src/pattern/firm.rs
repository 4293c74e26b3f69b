//! Firm sub-patterns: maximal strongly connected components of the auxiliary
//! graph in which child edges are traversable both ways, ancestor edges only
//! downwards, and every root-flagged vertex points at every other vertex.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::{EdgeKind, Pattern, VertexId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirmDecomposition {
    /// Components ordered by their smallest vertex id; vertices sorted.
    pub components: Vec<Vec<VertexId>>,
    /// Component pairs joined by an ancestor edge, sorted and deduplicated.
    pub dag_edges: Vec<(usize, usize)>,
    pub root_component: Option<usize>,
}

impl FirmDecomposition {
    pub fn component_of(&self, v: VertexId) -> usize {
        self.components
            .iter()
            .position(|c| c.contains(&v))
            .expect("components partition the vertices")
    }

    /// The rooted firm sub-pattern, if there is one.
    pub fn root_pattern(&self, p: &Pattern) -> Option<Pattern> {
        self.root_component.map(|c| p.induced(&self.components[c]))
    }

    pub fn display<'a>(&'a self, p: &'a Pattern) -> impl fmt::Display + 'a {
        DecompositionDisplay { d: self, p }
    }
}

struct DecompositionDisplay<'a> {
    d: &'a FirmDecomposition,
    p: &'a Pattern,
}

impl fmt::Display for DecompositionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "components {}", self.d.components.len())?;
        for (i, comp) in self.d.components.iter().enumerate() {
            let names: Vec<&str> = comp.iter().map(|&v| self.p.vertices()[v].name.as_str()).collect();
            let marker = if self.d.root_component == Some(i) { " root" } else { "" };
            writeln!(f, "component {i}{marker}: {}", names.join(" "))?;
        }
        for (a, b) in &self.d.dag_edges {
            writeln!(f, "dag {a} -> {b}")?;
        }
        match self.d.root_component {
            Some(i) => writeln!(f, "root component {i}"),
            None => writeln!(f, "root component none"),
        }
    }
}

pub fn firm_decomposition(p: &Pattern) -> FirmDecomposition {
    let n = p.vertex_count();
    let mut g = DiGraph::<(), ()>::with_capacity(n, p.edges().len() * 2);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for e in p.edges() {
        g.add_edge(nodes[e.from], nodes[e.to], ());
        if e.kind != EdgeKind::Ancestor {
            g.add_edge(nodes[e.to], nodes[e.from], ());
        }
    }
    for r in p.roots() {
        for v in (0..n).filter(|&v| v != r) {
            g.add_edge(nodes[r], nodes[v], ());
        }
    }

    let mut components: Vec<Vec<VertexId>> = tarjan_scc(&g)
        .into_iter()
        .map(|scc| {
            let mut c: Vec<VertexId> = scc.into_iter().map(|ix| ix.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    components.sort();

    let mut comp_of = vec![0; n];
    for (i, c) in components.iter().enumerate() {
        for &v in c {
            comp_of[v] = i;
        }
    }
    let dag_edges: BTreeSet<(usize, usize)> = p
        .edges()
        .iter()
        .filter(|e| e.kind == EdgeKind::Ancestor && comp_of[e.from] != comp_of[e.to])
        .map(|e| (comp_of[e.from], comp_of[e.to]))
        .collect();
    let root_component = p.roots().next().map(|r| comp_of[r]);

    FirmDecomposition {
        components,
        dag_edges: dag_edges.into_iter().collect(),
        root_component,
    }
}

/// Upper bound on the depth of any homomorphic image of a rooted firm pattern.
///
/// Walking from a vertex towards a root-flagged vertex, a child edge changes
/// depth by one and an ancestor edge `x ⊑ y` taken from `x` only goes
/// deeper, so the depth of `h(x)` is at most the least number of child edges
/// on such a walk. Returns `None` if some vertex cannot reach a root-flagged
/// vertex (the pattern is not rooted firm). Never exceeds `|V| - 1`.
pub fn rooted_depth_bound(p: &Pattern) -> Option<u32> {
    let n = p.vertex_count();
    // reverse adjacency of the "x can step to y" relation, with 0/1 weights
    let mut incoming: Vec<Vec<(VertexId, u32)>> = vec![Vec::new(); n];
    for e in p.edges() {
        match e.kind {
            EdgeKind::Ancestor => incoming[e.to].push((e.from, 0)),
            _ => {
                incoming[e.to].push((e.from, 1));
                incoming[e.from].push((e.to, 1));
            }
        }
    }
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for r in p.roots() {
        dist[r] = 0;
        queue.push_back(r);
    }
    if queue.is_empty() {
        return None;
    }
    while let Some(w) = queue.pop_front() {
        for &(v, weight) in &incoming[w] {
            let d = dist[w] + weight;
            if d < dist[v] {
                dist[v] = d;
                if weight == 0 {
                    queue.push_front(v);
                } else {
                    queue.push_back(v);
                }
            }
        }
    }
    dist.into_iter().try_fold(0, |acc, d| (d != u32::MAX).then_some(acc.max(d)))
}
