//! Shared helpers: a brute-force homomorphism test that works on position
//! words, and seeded random patterns and combinations.
#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treemeasure::boolexpr::BoolExpr;
use treemeasure::measure::Bccq;
use treemeasure::pattern::{EdgeKind, Pattern};
use treemeasure::trees::{enumerate_complete_trees, fraction_of_trees};
use treemeasure::{Alphabet, Budget, CompleteTree, Rational, Symbol};

pub fn alphabet(names: &[&str]) -> Arc<Alphabet> {
    Arc::new(Alphabet::new(names.iter().copied()).unwrap())
}

pub fn pattern(names: &[&str], body: &str) -> Pattern {
    Pattern::parse(body, Some(alphabet(names))).unwrap()
}

fn edge_holds(kind: EdgeKind, x: &str, y: &str) -> bool {
    match kind {
        EdgeKind::Left => y.len() == x.len() + 1 && y.starts_with(x) && y.ends_with('L'),
        EdgeKind::Right => y.len() == x.len() + 1 && y.starts_with(x) && y.ends_with('R'),
        EdgeKind::Child => y.len() == x.len() + 1 && y.starts_with(x),
        EdgeKind::Ancestor => y.len() > x.len() && y.starts_with(x),
    }
}

/// Is there any assignment of vertices to nodes of `t` satisfying every
/// label, root flag and edge? Positions are compared as `L`/`R` strings.
pub fn naive_hom(p: &Pattern, t: &CompleteTree) -> bool {
    let nodes: Vec<(String, Symbol)> = t.positions().map(|u| (u.word(), t.label(u))).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(p.vertex_count());
    search(p, &nodes, &mut chosen)
}

fn search(p: &Pattern, nodes: &[(String, Symbol)], chosen: &mut Vec<usize>) -> bool {
    let i = chosen.len();
    if i == p.vertex_count() {
        return true;
    }
    let v = &p.vertices()[i];
    for (n, (word, label)) in nodes.iter().enumerate() {
        if v.label.is_some_and(|l| l != *label) || (v.root && !word.is_empty()) {
            continue;
        }
        chosen.push(n);
        let consistent = p.edges().iter().all(|e| {
            e.from.max(e.to) > i || edge_holds(e.kind, &nodes[chosen[e.from]].0, &nodes[chosen[e.to]].0)
        });
        if consistent && search(p, nodes, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Fraction of all height-`h` trees on which `pred` holds.
pub fn brute_fraction(alpha: &Arc<Alphabet>, h: u32, pred: impl Fn(&CompleteTree) -> bool) -> Rational {
    let n = enumerate_complete_trees(h, alpha.clone(), &Budget::default())
        .unwrap()
        .filter(|t| pred(t))
        .count();
    fraction_of_trees(&n.into(), h, alpha.len())
}

/// Random pattern over `alpha` with 1..=`max_vertices` vertices.
pub fn random_pattern(rng: &mut ChaCha8Rng, alpha: &Arc<Alphabet>, max_vertices: usize) -> Pattern {
    let mut p = Pattern::new(alpha.clone());
    let n = rng.random_range(1..=max_vertices);
    for i in 0..n {
        let label = rng
            .random_bool(0.6)
            .then(|| Symbol(rng.random_range(0..alpha.len()) as u8));
        let root = rng.random_bool(0.25);
        p.add_vertex(&format!("v{i}"), label, root).unwrap();
    }
    let edges = rng.random_range(0..=n);
    for _ in 0..edges {
        let kind = EdgeKind::ALL[rng.random_range(0..4)];
        let from = rng.random_range(0..n);
        let to = rng.random_range(0..n);
        if from != to {
            p.add_edge(kind, from, to).unwrap();
        }
    }
    p
}

fn random_expr(rng: &mut ChaCha8Rng, leaves: usize, depth: u32) -> BoolExpr<usize> {
    if depth == 0 || rng.random_bool(0.3) {
        return BoolExpr::Leaf(rng.random_range(0..leaves));
    }
    match rng.random_range(0..3) {
        0 => BoolExpr::not(random_expr(rng, leaves, depth - 1)),
        1 => BoolExpr::and([random_expr(rng, leaves, depth - 1), random_expr(rng, leaves, depth - 1)]),
        _ => BoolExpr::or([random_expr(rng, leaves, depth - 1), random_expr(rng, leaves, depth - 1)]),
    }
}

/// Seeded combination of up to three patterns of at most four vertices.
pub fn random_bccq(seed: u64) -> Bccq {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = alphabet(&["a", "b"]);
    let k = rng.random_range(1..=3);
    let patterns = (0..k)
        .map(|i| (format!("p{i}"), random_pattern(&mut rng, &alpha, 4)))
        .collect();
    let expr = random_expr(&mut rng, k, 3);
    Bccq::new(alpha, patterns, expr).unwrap()
}

/// The same patterns under a different expression.
pub fn with_expr(c: &Bccq, expr: BoolExpr<usize>) -> Bccq {
    Bccq::new(c.alphabet.clone(), c.patterns.clone(), expr).unwrap()
}
