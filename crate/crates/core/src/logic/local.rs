use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use super::eval::Compiled;
use super::parse::parse_at;
use super::Formula;
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::trees::{ball, tree_distance, Alphabet, CompleteTree, Position, Symbol};

/// A formula in one free variable whose quantifiers all stay within distance
/// `radius` of that variable.
#[derive(Debug, Clone)]
pub struct LocalFormula {
    alphabet: Arc<Alphabet>,
    center: String,
    radius: u32,
    body: Formula,
    compiled: Compiled,
}

impl PartialEq for LocalFormula {
    fn eq(&self, other: &Self) -> bool {
        self.center == other.center && self.radius == other.radius && self.body == other.body
    }
}

impl Eq for LocalFormula {}

impl LocalFormula {
    pub fn new(alphabet: Arc<Alphabet>, center: &str, radius: u32, body: Formula) -> Result<Self> {
        if let Some(v) = body.free_vars().into_iter().find(|v| v != center) {
            return Err(Error::precondition(format!(
                "local formula around `{center}` has another free variable `{v}`"
            )));
        }
        let mut reach = vec![(center.to_string(), 0u32)];
        check_locality(&body, radius, &mut reach)?;
        let compiled = Compiled::new(&body, &[center])?;
        Ok(LocalFormula {
            alphabet,
            center: center.to_string(),
            radius,
            body,
            compiled,
        })
    }

    /// Parses the body of a local formula around `center`.
    pub fn parse(alphabet: Arc<Alphabet>, center: &str, radius: u32, text: &str) -> Result<Self> {
        Self::parse_at(alphabet, center, radius, text, 1)
    }

    pub(crate) fn parse_at(alphabet: Arc<Alphabet>, center: &str, radius: u32, text: &str, line: usize) -> Result<Self> {
        let body = parse_at(text, &alphabet, line, Some(&[center]))?;
        Self::new(alphabet, center, radius, body).map_err(|e| match e {
            Error::Precondition(m) => Error::parse(line, m),
            other => other,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn center(&self) -> &str {
        &self.center
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    pub fn holds_at(&self, t: &CompleteTree, u: Position) -> bool {
        self.compiled.eval(t, &[u])
    }
}

impl fmt::Display for LocalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.center, self.body.display(&self.alphabet))
    }
}

/// Every quantifier must be bounded, and the bound plus the reach of its
/// anchor may not exceed `radius`.
fn check_locality(f: &Formula, radius: u32, reach: &mut Vec<(String, u32)>) -> Result<()> {
    match f {
        Formula::Label(..) | Formula::Root(_) | Formula::Rel(..) | Formula::Eq(..) => Ok(()),
        Formula::Not(g) => check_locality(g, radius, reach),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            check_locality(a, radius, reach)?;
            check_locality(b, radius, reach)
        }
        Formula::Quant { var, bound, body, .. } => {
            let Some(b) = bound else {
                return Err(Error::precondition(format!(
                    "quantifier over `{var}` is unbounded; local formulas need `<=b@z`"
                )));
            };
            let anchor = reach
                .iter()
                .rev()
                .find(|(n, _)| *n == b.center)
                .map(|&(_, d)| d)
                .ok_or_else(|| Error::precondition(format!("anchor `{}` is not in scope", b.center)))?;
            let d = anchor.saturating_add(b.radius);
            if d > radius {
                return Err(Error::precondition(format!(
                    "`{var}` may lie {d} steps from the center, beyond radius {radius}"
                )));
            }
            reach.push((var.clone(), d));
            let res = check_locality(body, radius, reach);
            reach.pop();
            res
        }
    }
}

/// Height of the trees used to decide local questions: a radius-`r` ball
/// around any node of depth at most `r + 1` fits inside it.
fn probe_height(r: u32) -> u32 {
    2 * r + 1
}

/// Searches for a tree and a center whose depth lies in `depths` (clipped to
/// `r + 1`) satisfying `lf`. Only the labels inside the radius-`r` ball are
/// enumerated; everything else is labelled with the first symbol.
pub fn local_model(
    lf: &LocalFormula,
    depths: RangeInclusive<u32>,
    budget: &Budget,
) -> Result<Option<(CompleteTree, Position)>> {
    let r = lf.radius;
    let height = probe_height(r);
    let k = lf.alphabet.len() as u64;
    let base = CompleteTree::uniform(lf.alphabet.clone(), height, Symbol(0));
    let last = (*depths.end()).min(r + 1);
    for d in *depths.start()..=last {
        for center in Position::at_depth(d) {
            let region = ball(center, r, height);
            let labellings = u32::try_from(region.len())
                .ok()
                .and_then(|n| k.checked_pow(n))
                .filter(|&n| n <= budget.max_trees)
                .ok_or_else(|| Error::Budget {
                    what: "local satisfiability",
                    needed: format!("{k}^{} ball labellings", region.len()),
                    cap: budget.max_trees,
                })?;
            let mut t = base.clone();
            let mut digits = vec![0u8; region.len()];
            for _ in 0..labellings {
                if lf.holds_at(&t, center) {
                    return Ok(Some((t, center)));
                }
                for (i, &p) in region.iter().enumerate() {
                    digits[i] += 1;
                    if u64::from(digits[i]) < k {
                        t.set(p, Symbol(digits[i]));
                        break;
                    }
                    digits[i] = 0;
                    t.set(p, Symbol(0));
                }
            }
        }
    }
    Ok(None)
}

/// Whether some tree has a node satisfying `lf`.
pub fn is_satisfiable_local(lf: &LocalFormula, budget: &Budget) -> Result<bool> {
    Ok(local_model(lf, 0..=lf.radius + 1, budget)?.is_some())
}

/// Whether every node satisfying `lf` lies within distance `r` of the root.
///
/// Nodes deeper than `r` do not see the root in their `r`-ball, and their
/// balls are all copies of the balls around nodes of depth exactly `r + 1`,
/// so one probe depth decides it.
pub fn is_root_formula(lf: &LocalFormula, budget: &Budget) -> Result<bool> {
    Ok(local_model(lf, lf.radius + 1..=lf.radius + 1, budget)?.is_none())
}

/// `∃x1…xn` pairwise more than `2r` apart with each `xi` satisfying the i-th
/// local formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicLocalSentence {
    radius: u32,
    locals: Vec<LocalFormula>,
}

impl BasicLocalSentence {
    pub fn new(locals: Vec<LocalFormula>) -> Result<Self> {
        let Some(first) = locals.first() else {
            return Err(Error::precondition("a basic local sentence needs at least one local formula"));
        };
        let radius = first.radius;
        if let Some(other) = locals.iter().find(|l| l.radius != radius) {
            return Err(Error::precondition(format!(
                "mixed radii {radius} and {} in one basic sentence",
                other.radius
            )));
        }
        Ok(BasicLocalSentence { radius, locals })
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn locals(&self) -> &[LocalFormula] {
        &self.locals
    }

    /// Direct evaluation on a finite complete tree (quantifiers range over the
    /// tree only, so balls near the bottom are truncated).
    pub fn holds(&self, t: &CompleteTree) -> bool {
        let candidates: Vec<Vec<Position>> = self
            .locals
            .iter()
            .map(|lf| t.positions().filter(|&u| lf.holds_at(t, u)).collect())
            .collect();
        let mut chosen = Vec::with_capacity(candidates.len());
        spread_out(&candidates, 2 * self.radius, &mut chosen)
    }
}

fn spread_out(candidates: &[Vec<Position>], gap: u32, chosen: &mut Vec<Position>) -> bool {
    let Some(options) = candidates.get(chosen.len()) else {
        return true;
    };
    for &u in options {
        if chosen.iter().all(|&v| tree_distance(u, v) > gap) {
            chosen.push(u);
            if spread_out(candidates, gap, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReducedSentence {
    Bottom,
    Top,
    /// Holds iff some node within distance `r` of the root satisfies the
    /// local formula.
    RootCheck(LocalFormula),
}

impl ReducedSentence {
    /// Height from which the truth of the reduced sentence is fixed.
    pub fn determining_depth(&self) -> u32 {
        match self {
            ReducedSentence::RootCheck(lf) => 2 * lf.radius,
            _ => 0,
        }
    }
}

impl fmt::Display for ReducedSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReducedSentence::Bottom => f.write_str("bottom"),
            ReducedSentence::Top => f.write_str("top"),
            ReducedSentence::RootCheck(lf) => write!(f, "rootcheck[r={}]({lf})", lf.radius),
        }
    }
}

pub fn reduce_basic_local(s: &BasicLocalSentence, budget: &Budget) -> Result<ReducedSentence> {
    let mut roots = Vec::new();
    for lf in &s.locals {
        if !is_satisfiable_local(lf, budget)? {
            return Ok(ReducedSentence::Bottom);
        }
        if is_root_formula(lf, budget)? {
            roots.push(lf);
        }
    }
    Ok(match roots.as_slice() {
        [] => ReducedSentence::Top,
        // two witnesses within distance r of the root are at most 2r apart
        [only] => ReducedSentence::RootCheck((*only).clone()),
        _ => ReducedSentence::Bottom,
    })
}

pub fn eval_reduced(t: &CompleteTree, rs: &ReducedSentence) -> Result<bool> {
    match rs {
        ReducedSentence::Bottom => Ok(false),
        ReducedSentence::Top => Ok(true),
        ReducedSentence::RootCheck(lf) => {
            let need = 2 * lf.radius;
            if t.height() < need {
                return Err(Error::precondition(format!(
                    "root check of radius {} needs a tree of height at least {need}, got {}",
                    lf.radius,
                    t.height()
                )));
            }
            Ok(Position::up_to_depth(lf.radius).any(|u| lf.holds_at(t, u)))
        }
    }
}
