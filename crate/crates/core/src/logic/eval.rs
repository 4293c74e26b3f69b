use std::collections::HashMap;

use super::{Formula, Quantifier, Relation};
use crate::error::{Error, Result};
use crate::trees::{ball, CompleteTree, Position, Symbol};

/// A formula with variables resolved to slots, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Compiled {
    node: Node,
    free: Vec<String>,
    slots: usize,
}

#[derive(Debug, Clone)]
enum Node {
    Label(Symbol, usize),
    Root(usize),
    Rel(Relation, usize, usize),
    Eq(usize, usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Quant {
        exists: bool,
        slot: usize,
        bound: Option<(u32, usize)>,
        body: Box<Node>,
    },
}

impl Compiled {
    /// `free` fixes the argument order for [`Compiled::eval`]; every free
    /// variable of `f` must be listed.
    pub fn new(f: &Formula, free: &[&str]) -> Result<Self> {
        let mut scope: Vec<(String, usize)> = free.iter().enumerate().map(|(i, v)| (v.to_string(), i)).collect();
        let mut slots = free.len();
        let node = lower(f, &mut scope, &mut slots)?;
        Ok(Compiled {
            node,
            free: free.iter().map(|s| s.to_string()).collect(),
            slots,
        })
    }

    pub fn free(&self) -> &[String] {
        &self.free
    }

    /// Evaluates with `args[i]` bound to the i-th free variable. Positions
    /// must lie in `t`.
    pub fn eval(&self, t: &CompleteTree, args: &[Position]) -> bool {
        assert_eq!(args.len(), self.free.len(), "one position per free variable");
        let mut env = vec![Position::ROOT; self.slots];
        env[..args.len()].copy_from_slice(args);
        eval_node(&self.node, t, &mut env)
    }
}

fn lower(f: &Formula, scope: &mut Vec<(String, usize)>, slots: &mut usize) -> Result<Node> {
    let lookup = |v: &str, scope: &Vec<(String, usize)>| {
        scope
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|&(_, s)| s)
            .ok_or_else(|| Error::precondition(format!("variable `{v}` is not bound")))
    };
    Ok(match f {
        Formula::Label(s, x) => Node::Label(*s, lookup(x, scope)?),
        Formula::Root(x) => Node::Root(lookup(x, scope)?),
        Formula::Rel(r, x, y) => Node::Rel(*r, lookup(x, scope)?, lookup(y, scope)?),
        Formula::Eq(x, y) => Node::Eq(lookup(x, scope)?, lookup(y, scope)?),
        Formula::Not(g) => Node::Not(Box::new(lower(g, scope, slots)?)),
        Formula::And(a, b) => Node::And(Box::new(lower(a, scope, slots)?), Box::new(lower(b, scope, slots)?)),
        Formula::Or(a, b) => Node::Or(Box::new(lower(a, scope, slots)?), Box::new(lower(b, scope, slots)?)),
        Formula::Implies(a, b) => {
            Node::Implies(Box::new(lower(a, scope, slots)?), Box::new(lower(b, scope, slots)?))
        }
        Formula::Quant { q, var, bound, body } => {
            let bound = match bound {
                Some(b) => Some((b.radius, lookup(&b.center, scope)?)),
                None => None,
            };
            let slot = *slots;
            *slots += 1;
            scope.push((var.clone(), slot));
            let body = lower(body, scope, slots);
            scope.pop();
            Node::Quant {
                exists: *q == Quantifier::Exists,
                slot,
                bound,
                body: Box::new(body?),
            }
        }
    })
}

fn eval_node(n: &Node, t: &CompleteTree, env: &mut [Position]) -> bool {
    match n {
        Node::Label(s, x) => t.label(env[*x]) == *s,
        Node::Root(x) => env[*x] == Position::ROOT,
        Node::Rel(r, x, y) => {
            let (x, y) = (env[*x], env[*y]);
            match r {
                Relation::Left => y == x.left(),
                Relation::Right => y == x.right(),
                Relation::Child => y.parent() == Some(x),
                Relation::Ancestor => x.is_proper_ancestor_of(y),
            }
        }
        Node::Eq(x, y) => env[*x] == env[*y],
        Node::Not(g) => !eval_node(g, t, env),
        Node::And(a, b) => eval_node(a, t, env) && eval_node(b, t, env),
        Node::Or(a, b) => eval_node(a, t, env) || eval_node(b, t, env),
        Node::Implies(a, b) => !eval_node(a, t, env) || eval_node(b, t, env),
        Node::Quant {
            exists,
            slot,
            bound,
            body,
        } => {
            let check = |p: Position, env: &mut [Position]| {
                env[*slot] = p;
                eval_node(body, t, env) == *exists
            };
            // exists: stop at the first witness; forall: stop at the first counterexample
            let hit = match bound {
                Some((radius, center)) => {
                    let c = env[*center];
                    ball(c, *radius, t.height()).into_iter().any(|p| check(p, env))
                }
                None => t.positions().any(|p| check(p, env)),
            };
            hit == *exists
        }
    }
}

/// Evaluates `f` on `t` under `valuation`, which must cover the free
/// variables of `f` with positions of `t`.
pub fn eval_fo(t: &CompleteTree, f: &Formula, valuation: &HashMap<String, Position>) -> Result<bool> {
    let free: Vec<String> = f.free_vars().into_iter().collect();
    let mut args = Vec::with_capacity(free.len());
    for v in &free {
        let p = *valuation
            .get(v)
            .ok_or_else(|| Error::precondition(format!("free variable `{v}` has no value")))?;
        if !t.contains(p) {
            return Err(Error::precondition(format!(
                "position {p} of `{v}` is outside the tree of height {}",
                t.height()
            )));
        }
        args.push(p);
    }
    let names: Vec<&str> = free.iter().map(String::as_str).collect();
    Ok(Compiled::new(f, &names)?.eval(t, &args))
}
