//! First-order formulas over labelled binary trees, local formulas and their
//! reduction.

mod eval;
mod gnf;
mod local;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use crate::trees::{Alphabet, Symbol};

pub use eval::{eval_fo, Compiled};
pub use gnf::GnfSentence;
pub use local::{
    eval_reduced, is_root_formula, is_satisfiable_local, local_model, reduce_basic_local, BasicLocalSentence,
    LocalFormula, ReducedSentence,
};
pub use parse::{parse_formula, parse_formula_with_free};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `sL(x,y)`: y is the left child of x.
    Left,
    Right,
    /// `s(x,y)`: y is a child of x.
    Child,
    /// `anc(x,y)`: x is a strict ancestor of y.
    Ancestor,
}

impl Relation {
    pub fn keyword(self) -> &'static str {
        match self {
            Relation::Left => "sL",
            Relation::Right => "sR",
            Relation::Child => "s",
            Relation::Ancestor => "anc",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "sL" => Relation::Left,
            "sR" => Relation::Right,
            "s" => Relation::Child,
            "anc" => Relation::Ancestor,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// `within b of center`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bound {
    pub radius: u32,
    pub center: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Label(Symbol, String),
    Root(String),
    Rel(Relation, String, String),
    Eq(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant {
        q: Quantifier,
        var: String,
        bound: Option<Bound>,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        let mut note = |v: &'a String, bound: &Vec<&'a str>| {
            if !bound.contains(&v.as_str()) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::Label(_, x) | Formula::Root(x) => note(x, bound),
            Formula::Rel(_, x, y) | Formula::Eq(x, y) => {
                note(x, bound);
                note(y, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant { var, bound: b, body, .. } => {
                if let Some(b) = b {
                    note(&b.center, bound);
                }
                bound.push(var);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Label(..) | Formula::Root(_) | Formula::Rel(..) | Formula::Eq(..) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Quant { body, .. } => 1 + body.quantifier_depth(),
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        FormulaDisplay { f: self, alphabet }
    }
}

struct FormulaDisplay<'a> {
    f: &'a Formula,
    alphabet: &'a Alphabet,
}

impl<'a> fmt::Display for FormulaDisplay<'a> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |f: &'a Formula| FormulaDisplay { f, alphabet: self.alphabet };
        match self.f {
            Formula::Label(s, x) => write!(out, "{}({x})", self.alphabet.name(*s)),
            Formula::Root(x) => write!(out, "root({x})"),
            Formula::Rel(r, x, y) => write!(out, "{}({x},{y})", r.keyword()),
            Formula::Eq(x, y) => write!(out, "{x}={y}"),
            Formula::Not(f) => write!(out, "!{}", sub(f)),
            Formula::And(a, b) => write!(out, "({} & {})", sub(a), sub(b)),
            Formula::Or(a, b) => write!(out, "({} | {})", sub(a), sub(b)),
            Formula::Implies(a, b) => write!(out, "({} -> {})", sub(a), sub(b)),
            Formula::Quant { q, var, bound, body } => {
                let letter = match q {
                    Quantifier::Exists => "E",
                    Quantifier::Forall => "A",
                };
                match bound {
                    Some(b) => write!(out, "({letter} {var}<={}@{}. {})", b.radius, b.center, sub(body)),
                    None => write!(out, "({letter} {var}. {})", sub(body)),
                }
            }
        }
    }
}
