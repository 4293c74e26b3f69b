use std::collections::HashMap;
use std::fmt;

use super::{EdgeKind, Pattern, VertexId};
use crate::trees::{node_count, CompleteTree, Dir, Position, Symbol};

/// A vertex-to-position assignment, indexed by vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomWitness {
    pub assignment: Vec<Position>,
}

impl HomWitness {
    pub fn image(&self, v: VertexId) -> Position {
        self.assignment[v]
    }

    pub fn max_depth(&self) -> u32 {
        self.assignment.iter().map(|p| p.depth()).max().unwrap_or(0)
    }

    pub fn display<'a>(&'a self, pattern: &'a Pattern) -> impl fmt::Display + 'a {
        WitnessDisplay { w: self, p: pattern }
    }
}

struct WitnessDisplay<'a> {
    w: &'a HomWitness,
    p: &'a Pattern,
}

impl fmt::Display for WitnessDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .p
            .vertices()
            .iter()
            .zip(&self.w.assignment)
            .map(|(v, pos)| format!("{}={pos}", v.name))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Independent witness checker: every edge, root flag and label must hold.
pub fn verify_hom(p: &Pattern, t: &CompleteTree, w: &HomWitness) -> bool {
    if w.assignment.len() != p.vertex_count() || !w.assignment.iter().all(|&pos| t.contains(pos)) {
        return false;
    }
    let roots_ok = p.roots().all(|v| w.assignment[v] == Position::ROOT);
    let labels_ok = p
        .vertices()
        .iter()
        .zip(&w.assignment)
        .all(|(v, &pos)| v.label.is_none_or(|l| t.label(pos) == l));
    let edges_ok = p.edges().iter().all(|e| {
        let (x, y) = (w.assignment[e.from], w.assignment[e.to]);
        match e.kind {
            EdgeKind::Left => y == x.left(),
            EdgeKind::Right => y == x.right(),
            EdgeKind::Child => y.parent() == Some(x),
            EdgeKind::Ancestor => x.is_proper_ancestor_of(y),
        }
    });
    roots_ok && labels_ok && edges_ok
}

/// Returns a homomorphism from `p` into `t`, if one exists.
pub fn check_hom(p: &Pattern, t: &CompleteTree) -> Option<HomWitness> {
    HomMatcher::new(p).find(t)
}

/// A pattern compiled for repeated homomorphism checks against many trees.
#[derive(Debug, Clone)]
pub struct HomMatcher {
    order: Vec<VertexId>,
    root: Vec<bool>,
    labels: Vec<Option<Symbol>>,
    /// Per vertex: constraints towards vertices earlier in `order`.
    back: Vec<Vec<Constraint>>,
}

/// `self_is_from` tells which side of the edge the constrained vertex is on.
#[derive(Debug, Clone, Copy)]
struct Constraint {
    kind: EdgeKind,
    other: VertexId,
    self_is_from: bool,
}

impl HomMatcher {
    pub fn new(p: &Pattern) -> Self {
        let order = search_order(p);
        let mut rank = vec![0; p.vertex_count()];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        let mut back = vec![Vec::new(); p.vertex_count()];
        for e in p.edges() {
            // the later vertex in the order carries the constraint
            let (carrier, other, self_is_from) = if rank[e.from] >= rank[e.to] {
                (e.from, e.to, true)
            } else {
                (e.to, e.from, false)
            };
            back[carrier].push(Constraint {
                kind: e.kind,
                other,
                self_is_from,
            });
        }
        HomMatcher {
            order,
            root: p.vertices().iter().map(|v| v.root).collect(),
            labels: p.vertices().iter().map(|v| v.label).collect(),
            back,
        }
    }

    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    pub fn find(&self, t: &CompleteTree) -> Option<HomWitness> {
        let mut search = Search {
            m: self,
            max_depth: t.height(),
            labels: LabelSource::Tree(t),
            assignment: vec![None; self.order.len()],
        };
        search.run(0).then(|| search.witness())
    }

    pub fn matches(&self, t: &CompleteTree) -> bool {
        self.find(t).is_some()
    }

    /// Searches for an assignment into positions of depth at most
    /// `max_depth`, treating labels as constraints to be chosen rather than
    /// read from a tree. Positions shared by several vertices must agree on
    /// their labels.
    pub(crate) fn find_free(&self, max_depth: u32) -> Option<(HomWitness, HashMap<Position, Symbol>)> {
        let mut search = Search {
            m: self,
            max_depth,
            labels: LabelSource::Free(HashMap::new()),
            assignment: vec![None; self.order.len()],
        };
        if !search.run(0) {
            return None;
        }
        let witness = search.witness();
        let LabelSource::Free(used) = search.labels else {
            unreachable!()
        };
        Some((witness, used.into_iter().map(|(p, (s, _))| (p, s)).collect()))
    }
}

/// Most-constrained-first: root-flagged vertices, then vertices child-linked
/// to a placed one, then ancestor-linked, then the rest. Ties go to the
/// earliest declared vertex.
fn search_order(p: &Pattern) -> Vec<VertexId> {
    let n = p.vertex_count();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let priority = |v: VertexId| -> u8 {
            if p.vertices()[v].root {
                return 3;
            }
            let mut best = 0;
            for e in p.edges() {
                let other = if e.from == v {
                    e.to
                } else if e.to == v {
                    e.from
                } else {
                    continue;
                };
                if !placed[other] {
                    continue;
                }
                best = best.max(if e.kind == EdgeKind::Ancestor { 1 } else { 2 });
            }
            best
        };
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (priority(v), std::cmp::Reverse(v)))
            .expect("unplaced vertex exists");
        placed[next] = true;
        order.push(next);
    }
    order
}

enum LabelSource<'a> {
    Tree(&'a CompleteTree),
    /// position -> (label, number of vertices pinning it)
    Free(HashMap<Position, (Symbol, u32)>),
}

struct Search<'a> {
    m: &'a HomMatcher,
    max_depth: u32,
    labels: LabelSource<'a>,
    assignment: Vec<Option<Position>>,
}

enum Candidates {
    One(Option<Position>),
    Two(Position, Position),
    List(Vec<Position>),
    All,
}

impl Search<'_> {
    fn witness(&self) -> HomWitness {
        HomWitness {
            assignment: self.assignment.iter().map(|p| p.expect("complete assignment")).collect(),
        }
    }

    fn run(&mut self, depth: usize) -> bool {
        let Some(&v) = self.m.order.get(depth) else {
            return true;
        };
        match self.candidates(v) {
            Candidates::One(None) => false,
            Candidates::One(Some(p)) => self.attempt(v, p, depth),
            Candidates::Two(a, b) => self.attempt(v, a, depth) || self.attempt(v, b, depth),
            Candidates::List(list) => list.into_iter().any(|p| self.attempt(v, p, depth)),
            Candidates::All => {
                let n = node_count(self.max_depth);
                (0..n).any(|i| self.attempt(v, Position::from_index(i), depth))
            }
        }
    }

    fn attempt(&mut self, v: VertexId, pos: Position, depth: usize) -> bool {
        if pos.depth() > self.max_depth || !self.consistent(v, pos) {
            return false;
        }
        let label = self.m.labels[v];
        if let (Some(l), LabelSource::Free(map)) = (label, &mut self.labels) {
            match map.get_mut(&pos) {
                Some((existing, _)) if *existing != l => return false,
                Some((_, count)) => *count += 1,
                None => {
                    map.insert(pos, (l, 1));
                }
            }
        }
        self.assignment[v] = Some(pos);
        if self.run(depth + 1) {
            return true;
        }
        self.assignment[v] = None;
        if let (Some(_), LabelSource::Free(map)) = (label, &mut self.labels) {
            let entry = map.get_mut(&pos).expect("label was recorded");
            entry.1 -= 1;
            if entry.1 == 0 {
                map.remove(&pos);
            }
        }
        false
    }

    fn consistent(&self, v: VertexId, pos: Position) -> bool {
        if self.m.root[v] && pos != Position::ROOT {
            return false;
        }
        if let (Some(l), LabelSource::Tree(t)) = (self.m.labels[v], &self.labels) {
            if t.label(pos) != l {
                return false;
            }
        }
        self.m.back[v].iter().all(|c| {
            let other = if c.other == v {
                pos
            } else {
                self.assignment[c.other].expect("constraints point to placed vertices")
            };
            let (x, y) = if c.self_is_from { (pos, other) } else { (other, pos) };
            match c.kind {
                EdgeKind::Left => y == x.left(),
                EdgeKind::Right => y == x.right(),
                EdgeKind::Child => y.parent() == Some(x),
                EdgeKind::Ancestor => x.is_proper_ancestor_of(y),
            }
        })
    }

    /// Narrowest candidate set implied by root flags and constraints to placed vertices.
    fn candidates(&self, v: VertexId) -> Candidates {
        if self.m.root[v] {
            return Candidates::One(Some(Position::ROOT));
        }
        let mut best = Candidates::All;
        let mut best_rank = 4;
        for c in &self.m.back[v] {
            if c.other == v {
                continue;
            }
            let other = self.assignment[c.other].expect("placed");
            // (candidates, rank): lower rank is narrower
            let (cand, rank) = match (c.kind, c.self_is_from) {
                (EdgeKind::Left, false) => (Candidates::One(Some(other.left())), 0),
                (EdgeKind::Right, false) => (Candidates::One(Some(other.right())), 0),
                (EdgeKind::Left, true) => (
                    Candidates::One(other.parent().filter(|_| other.last_dir() == Some(Dir::L))),
                    0,
                ),
                (EdgeKind::Right, true) => (
                    Candidates::One(other.parent().filter(|_| other.last_dir() == Some(Dir::R))),
                    0,
                ),
                (EdgeKind::Child, true) => (Candidates::One(other.parent()), 0),
                (EdgeKind::Child, false) => (Candidates::Two(other.left(), other.right()), 1),
                (EdgeKind::Ancestor, true) => {
                    let ancestors = (0..other.depth()).map(|d| other.ancestor_at_depth(d)).collect();
                    (Candidates::List(ancestors), 2)
                }
                (EdgeKind::Ancestor, false) => (Candidates::List(descendants(other, self.max_depth)), 3),
            };
            if rank < best_rank {
                best = cand;
                best_rank = rank;
                if rank == 0 {
                    break;
                }
            }
        }
        best
    }
}

/// Proper descendants of `pos` down to depth `max_depth`, in heap order.
fn descendants(pos: Position, max_depth: u32) -> Vec<Position> {
    let mut out = Vec::new();
    let base = pos.depth();
    for k in 1..=max_depth.saturating_sub(base) {
        let first = ((pos.index() + 1) << k) - 1;
        out.extend((first..first + (1u64 << k)).map(Position::from_index));
    }
    out
}
