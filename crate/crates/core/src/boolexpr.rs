//! Boolean combinations over arbitrary leaves.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr<L> {
    Const(bool),
    Leaf(L),
    Not(Box<BoolExpr<L>>),
    And(Vec<BoolExpr<L>>),
    Or(Vec<BoolExpr<L>>),
}

impl<L> BoolExpr<L> {
    pub fn leaf(l: L) -> Self {
        BoolExpr::Leaf(l)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr<L>) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn and(parts: impl IntoIterator<Item = BoolExpr<L>>) -> Self {
        BoolExpr::And(parts.into_iter().collect())
    }

    pub fn or(parts: impl IntoIterator<Item = BoolExpr<L>>) -> Self {
        BoolExpr::Or(parts.into_iter().collect())
    }

    pub fn eval(&self, leaf: &mut impl FnMut(&L) -> bool) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Leaf(l) => leaf(l),
            BoolExpr::Not(e) => !e.eval(leaf),
            BoolExpr::And(es) => es.iter().all(|e| e.eval(leaf)),
            BoolExpr::Or(es) => es.iter().any(|e| e.eval(leaf)),
        }
    }

    pub fn try_eval<E>(&self, leaf: &mut impl FnMut(&L) -> Result<bool, E>) -> Result<bool, E> {
        Ok(match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Leaf(l) => leaf(l)?,
            BoolExpr::Not(e) => !e.try_eval(leaf)?,
            BoolExpr::And(es) => {
                for e in es {
                    if !e.try_eval(leaf)? {
                        return Ok(false);
                    }
                }
                true
            }
            BoolExpr::Or(es) => {
                for e in es {
                    if e.try_eval(leaf)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    pub fn try_map<M, E>(&self, f: &mut impl FnMut(&L) -> Result<M, E>) -> Result<BoolExpr<M>, E> {
        Ok(match self {
            BoolExpr::Const(b) => BoolExpr::Const(*b),
            BoolExpr::Leaf(l) => BoolExpr::Leaf(f(l)?),
            BoolExpr::Not(e) => BoolExpr::Not(Box::new(e.try_map(f)?)),
            BoolExpr::And(es) => BoolExpr::And(es.iter().map(|e| e.try_map(f)).collect::<Result<_, E>>()?),
            BoolExpr::Or(es) => BoolExpr::Or(es.iter().map(|e| e.try_map(f)).collect::<Result<_, E>>()?),
        })
    }

    /// Replaces leaves by constants or new leaves.
    pub fn map_leaves<M>(&self, f: &mut impl FnMut(&L) -> BoolExpr<M>) -> BoolExpr<M> {
        match self {
            BoolExpr::Const(b) => BoolExpr::Const(*b),
            BoolExpr::Leaf(l) => f(l),
            BoolExpr::Not(e) => BoolExpr::Not(Box::new(e.map_leaves(f))),
            BoolExpr::And(es) => BoolExpr::And(es.iter().map(|e| e.map_leaves(f)).collect()),
            BoolExpr::Or(es) => BoolExpr::Or(es.iter().map(|e| e.map_leaves(f)).collect()),
        }
    }

    pub fn leaves(&self) -> Vec<&L> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a L>) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Leaf(l) => out.push(l),
            BoolExpr::Not(e) => e.collect_leaves(out),
            BoolExpr::And(es) | BoolExpr::Or(es) => es.iter().for_each(|e| e.collect_leaves(out)),
        }
    }

    /// Constant folding; leaves are kept in place.
    pub fn simplify(self) -> Self {
        match self {
            BoolExpr::Not(e) => match e.simplify() {
                BoolExpr::Const(b) => BoolExpr::Const(!b),
                BoolExpr::Not(inner) => *inner,
                other => BoolExpr::not(other),
            },
            BoolExpr::And(es) => {
                let mut kept = Vec::new();
                for e in es.into_iter().map(BoolExpr::simplify) {
                    match e {
                        BoolExpr::Const(false) => return BoolExpr::Const(false),
                        BoolExpr::Const(true) => {}
                        other => kept.push(other),
                    }
                }
                match kept.len() {
                    0 => BoolExpr::Const(true),
                    1 => kept.pop().unwrap(),
                    _ => BoolExpr::And(kept),
                }
            }
            BoolExpr::Or(es) => {
                let mut kept = Vec::new();
                for e in es.into_iter().map(BoolExpr::simplify) {
                    match e {
                        BoolExpr::Const(true) => return BoolExpr::Const(true),
                        BoolExpr::Const(false) => {}
                        other => kept.push(other),
                    }
                }
                match kept.len() {
                    0 => BoolExpr::Const(false),
                    1 => kept.pop().unwrap(),
                    _ => BoolExpr::Or(kept),
                }
            }
            other => other,
        }
    }
}

impl<L: fmt::Display> fmt::Display for BoolExpr<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join<L: fmt::Display>(f: &mut fmt::Formatter<'_>, es: &[BoolExpr<L>], op: &str) -> fmt::Result {
            f.write_str("(")?;
            for (i, e) in es.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str(")")
        }
        match self {
            BoolExpr::Const(true) => f.write_str("true"),
            BoolExpr::Const(false) => f.write_str("false"),
            BoolExpr::Leaf(l) => write!(f, "{l}"),
            BoolExpr::Not(e) => write!(f, "!{e}"),
            BoolExpr::And(es) => join(f, es, "&"),
            BoolExpr::Or(es) => join(f, es, "|"),
        }
    }
}

/// Parses `! & | -> ( ) true false` over identifier leaves, precedence in
/// that order (`->` is right-associative and binds loosest).
pub fn parse_bool_expr(text: &str, line: usize) -> Result<BoolExpr<String>> {
    let tokens = tokenize(text, line)?;
    let mut p = ExprParser { tokens, at: 0, line };
    let e = p.implication()?;
    if p.at != p.tokens.len() {
        return Err(Error::parse(line, format!("unexpected `{}` in expression", p.tokens[p.at])));
    }
    Ok(e)
}

fn tokenize(text: &str, line: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "!&|()".contains(c) {
            out.push(c.to_string());
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push("->".into());
            i += 2;
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else {
            return Err(Error::parse(line, format!("unexpected character `{c}` in expression")));
        }
    }
    Ok(out)
}

struct ExprParser {
    tokens: Vec<String>,
    at: usize,
    line: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.at).map(String::as_str)
    }

    fn implication(&mut self) -> Result<BoolExpr<String>> {
        let lhs = self.disjunction()?;
        if self.peek() == Some("->") {
            self.at += 1;
            let rhs = self.implication()?;
            return Ok(BoolExpr::or([BoolExpr::not(lhs), rhs]));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<BoolExpr<String>> {
        let mut parts = vec![self.conjunction()?];
        while self.peek() == Some("|") {
            self.at += 1;
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { BoolExpr::Or(parts) })
    }

    fn conjunction(&mut self) -> Result<BoolExpr<String>> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some("&") {
            self.at += 1;
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { BoolExpr::And(parts) })
    }

    fn unary(&mut self) -> Result<BoolExpr<String>> {
        let tok = self
            .peek()
            .ok_or_else(|| Error::parse(self.line, "expression ends unexpectedly"))?
            .to_string();
        self.at += 1;
        match tok.as_str() {
            "!" => Ok(BoolExpr::not(self.unary()?)),
            "(" => {
                let e = self.implication()?;
                if self.peek() != Some(")") {
                    return Err(Error::parse(self.line, "missing `)` in expression"));
                }
                self.at += 1;
                Ok(e)
            }
            "true" => Ok(BoolExpr::Const(true)),
            "false" => Ok(BoolExpr::Const(false)),
            t if t.chars().next().is_some_and(|c| c.is_alphanumeric() || c == '_') => {
                Ok(BoolExpr::Leaf(tok))
            }
            t => Err(Error::parse(self.line, format!("unexpected `{t}` in expression"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse_bool_expr("!a & b | c -> d", 1).unwrap();
        assert_eq!(e.to_string(), "(!((!a & b) | c) | d)");
        let mut env = |l: &String| l == "d";
        assert!(e.eval(&mut env));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_bool_expr("a & ", 3).is_err());
        assert!(parse_bool_expr("(a | b", 3).is_err());
        assert!(parse_bool_expr("a $ b", 3).is_err());
        assert!(parse_bool_expr("a b", 3).is_err());
    }

    #[test]
    fn folding_constants() {
        let e: BoolExpr<String> = parse_bool_expr("(true & x) | false", 1).unwrap();
        assert_eq!(e.simplify(), BoolExpr::Leaf("x".to_string()));
        let e: BoolExpr<String> = parse_bool_expr("x & !true", 1).unwrap();
        assert_eq!(e.simplify(), BoolExpr::Const(false));
        let e: BoolExpr<String> = parse_bool_expr("!!x", 1).unwrap();
        assert_eq!(e.simplify(), BoolExpr::Leaf("x".to_string()));
    }
}
