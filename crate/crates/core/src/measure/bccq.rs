//! Boolean combinations of conjunctive queries. File format:
//!
//! ```text
//! alphabet a b
//! pattern rooted_a
//!   vertex x label=a root
//! pattern deep
//!   vertex x label=a
//!   vertex y label=b
//!   edge A x y
//! expr !rooted_a & deep
//! ```

use std::collections::HashMap;
use std::sync::Arc;

use super::cq::pattern_determining_depth;
use super::{count_models, first_model, MeasureResult};
use crate::boolexpr::{parse_bool_expr, BoolExpr};
use crate::config::{Budget, EngineConfig};
use crate::error::{Error, Result};
use crate::pattern::{firm_decomposition, is_satisfiable_pattern, HomMatcher, Pattern, PatternBuilder};
use crate::trees::{strip_comment, Alphabet, CompleteTree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bccq {
    pub alphabet: Arc<Alphabet>,
    pub patterns: Vec<(String, Pattern)>,
    /// Leaves index into `patterns`.
    pub expr: BoolExpr<usize>,
}

impl Bccq {
    pub fn new(alphabet: Arc<Alphabet>, patterns: Vec<(String, Pattern)>, expr: BoolExpr<usize>) -> Result<Self> {
        if let Some(&&i) = expr.leaves().iter().find(|&&&i| i >= patterns.len()) {
            return Err(Error::precondition(format!("expression refers to pattern #{i}, which does not exist")));
        }
        if let Some((name, _)) = patterns.iter().find(|(_, p)| p.alphabet() != &alphabet) {
            return Err(Error::precondition(format!("pattern `{name}` uses a different alphabet")));
        }
        Ok(Bccq { alphabet, patterns, expr })
    }

    /// Direct evaluation on a finite tree.
    pub fn holds(&self, t: &CompleteTree) -> bool {
        let matchers: Vec<HomMatcher> = self.patterns.iter().map(|(_, p)| HomMatcher::new(p)).collect();
        self.expr.eval(&mut |&i| matchers[i].matches(t))
    }

    /// A predicate for repeated evaluation of the unreduced combination.
    pub fn predicate(&self) -> impl Fn(&CompleteTree) -> bool + Sync + '_ {
        let matchers: Vec<HomMatcher> = self.patterns.iter().map(|(_, p)| HomMatcher::new(p)).collect();
        move |t| self.expr.eval(&mut |&i| matchers[i].matches(t))
    }

    pub fn parse(text: &str, alphabet: Option<Arc<Alphabet>>) -> Result<Self> {
        let mut builder = PatternBuilder::new(alphabet);
        let mut patterns: Vec<(String, Pattern)> = Vec::new();
        let mut open: Option<String> = None;
        let mut expr: Option<(BoolExpr<String>, usize)> = None;
        let mut last = 0;
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            last = no;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if expr.is_some() {
                return Err(Error::parse(no, "nothing may follow the `expr` line"));
            }
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match head {
                "pattern" => {
                    if builder.alphabet().is_none() {
                        return Err(Error::parse(no, "`pattern` before `alphabet`"));
                    }
                    if !crate::trees::is_identifier(rest) || rest == "true" || rest == "false" {
                        return Err(Error::parse(no, format!("`{rest}` is not a valid pattern name")));
                    }
                    if patterns.iter().any(|(n, _)| n == rest) || open.as_deref() == Some(rest) {
                        return Err(Error::parse(no, format!("pattern `{rest}` is defined twice")));
                    }
                    if let Some(name) = open.replace(rest.to_string()) {
                        patterns.push((name, builder.take().expect("alphabet is known")));
                    } else {
                        builder.take();
                    }
                }
                "expr" => expr = Some((parse_bool_expr(rest, no)?, no)),
                "alphabet" if open.is_some() => {
                    return Err(Error::parse(no, "`alphabet` must precede the first pattern"));
                }
                "vertex" | "edge" if open.is_none() => {
                    return Err(Error::parse(no, format!("`{head}` outside a `pattern` section")));
                }
                _ => builder.handle(no, line)?,
            }
        }
        let alphabet = builder
            .alphabet()
            .cloned()
            .ok_or_else(|| Error::parse(last.max(1), "missing `alphabet` line"))?;
        if let Some(name) = open {
            patterns.push((name, builder.take().expect("alphabet is known")));
        }
        let (expr, expr_line) = expr.ok_or_else(|| Error::parse(last.max(1), "missing `expr` line"))?;
        let expr = expr.try_map(&mut |name: &String| {
            patterns
                .iter()
                .position(|(n, _)| n == name)
                .ok_or_else(|| Error::parse(expr_line, format!("unknown pattern `{name}` in expression")))
        })?;
        Bccq::new(alphabet, patterns, expr)
    }
}

/// The combination after each leaf has been replaced by `true`, `false` or
/// its rooted firm sub-pattern, with constants folded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedBccq {
    pub alphabet: Arc<Alphabet>,
    /// Rooted firm patterns, tagged with the name of the leaf they came from.
    pub leaves: Vec<(String, Pattern)>,
    pub expr: BoolExpr<usize>,
}

impl ReducedBccq {
    /// Largest determining depth over the leaves still present; 0 if none.
    pub fn determining_depth(&self, cfg: &EngineConfig) -> u32 {
        self.expr
            .leaves()
            .into_iter()
            .map(|&i| pattern_determining_depth(&self.leaves[i].1, cfg.mode))
            .max()
            .unwrap_or(0)
    }

    pub fn predicate(&self) -> impl Fn(&CompleteTree) -> bool + Sync + '_ {
        let matchers: Vec<HomMatcher> = self.leaves.iter().map(|(_, p)| HomMatcher::new(p)).collect();
        move |t| self.expr.eval(&mut |&i| matchers[i].matches(t))
    }
}

pub fn bccq_reduce(c: &Bccq, budget: &Budget) -> Result<ReducedBccq> {
    let mut leaves = Vec::new();
    let mut replaced: HashMap<usize, BoolExpr<usize>> = HashMap::new();
    for &&i in &c.expr.leaves() {
        if replaced.contains_key(&i) {
            continue;
        }
        let (name, p) = &c.patterns[i];
        let e = if is_satisfiable_pattern(p, budget)?.is_none() {
            BoolExpr::Const(false)
        } else {
            match firm_decomposition(p).root_pattern(p) {
                None => BoolExpr::Const(true),
                Some(root) => {
                    leaves.push((name.clone(), root));
                    BoolExpr::Leaf(leaves.len() - 1)
                }
            }
        };
        replaced.insert(i, e);
    }
    let expr = c.expr.map_leaves(&mut |i| replaced[i].clone()).simplify();
    Ok(ReducedBccq {
        alphabet: c.alphabet.clone(),
        leaves,
        expr,
    })
}

pub fn bccq_measure(c: &Bccq, cfg: &EngineConfig) -> Result<MeasureResult> {
    let reduced = bccq_reduce(c, &cfg.budget)?;
    let depth = reduced.determining_depth(cfg);
    let hits = count_models(reduced.predicate(), depth, &c.alphabet, &cfg.budget)?;
    Ok(MeasureResult::counted("bccq", depth, hits, c.alphabet.len())
        .note(format!("reduced {}", show_reduced(&reduced)))
        .note(format!("depth mode {}", cfg.mode.name())))
}

/// A complete tree at the determining depth satisfying the reduced
/// combination; every infinite tree extending it is in the language.
pub fn bccq_positive(c: &Bccq, cfg: &EngineConfig) -> Result<Option<CompleteTree>> {
    let reduced = bccq_reduce(c, &cfg.budget)?;
    let depth = reduced.determining_depth(cfg);
    first_model(reduced.predicate(), depth, &c.alphabet, &cfg.budget)
}

fn show_reduced(r: &ReducedBccq) -> String {
    r.expr.map_leaves(&mut |&i| BoolExpr::Leaf(r.leaves[i].0.clone())).to_string()
}
