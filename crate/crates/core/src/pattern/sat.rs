use petgraph::algo::is_cyclic_directed;
use petgraph::graph::DiGraph;

use super::{EdgeKind, HomMatcher, HomWitness, Pattern};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::trees::{node_count, CompleteTree, Symbol, MAX_DEPTH};

/// A satisfying tree together with the homomorphism that proves it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub tree: CompleteTree,
    pub witness: HomWitness,
}

impl Model {
    /// The same model cut down to the depth the witness actually uses.
    pub fn trimmed(&self) -> Model {
        let depth = self.witness.max_depth();
        Model {
            tree: self.tree.prefix_of_height(depth).expect("witness lies inside the tree"),
            witness: self.witness.clone(),
        }
    }
}

/// Depth bound `B = |V| + |E|` for the satisfiability search.
pub fn satisfiability_bound(p: &Pattern) -> u32 {
    p.size() as u32
}

/// Decides satisfiability by searching assignments into positions of depth
/// at most [`satisfiability_bound`].
pub fn is_satisfiable_pattern(p: &Pattern, budget: &Budget) -> Result<Option<Model>> {
    search_with_bound(p, satisfiability_bound(p), budget)
}

pub(crate) fn search_with_bound(p: &Pattern, bound: u32, budget: &Budget) -> Result<Option<Model>> {
    if bound > MAX_DEPTH || node_count(bound) > budget.max_positions {
        return Err(Error::Budget {
            what: "satisfiability search",
            needed: format!("positions up to depth {bound}"),
            cap: budget.max_positions,
        });
    }
    if has_depth_cycle(p) {
        return Ok(None);
    }
    let Some((witness, labels)) = HomMatcher::new(p).find_free(bound) else {
        return Ok(None);
    };
    let mut tree = CompleteTree::uniform(p.alphabet().clone(), bound, Symbol(0));
    for (pos, sym) in labels {
        tree.set(pos, sym);
    }
    Ok(Some(Model { tree, witness }))
}

/// Every edge kind forces its target strictly deeper than its source, so a
/// directed cycle means no assignment exists.
fn has_depth_cycle(p: &Pattern) -> bool {
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..p.vertex_count()).map(|_| g.add_node(())).collect();
    for e in p.edges() {
        debug_assert!(EdgeKind::ALL.contains(&e.kind));
        g.add_edge(nodes[e.from], nodes[e.to], ());
    }
    is_cyclic_directed(&g)
}
