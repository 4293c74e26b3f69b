//! Boolean combinations of basic local sentences, and their text format:
//!
//! ```text
//! alphabet a b
//! radius 1
//! basic rooted_a
//!   local x: root(x) & a(x)
//! end
//! expr !rooted_a
//! ```

use std::sync::Arc;

use super::local::{BasicLocalSentence, LocalFormula};
use crate::boolexpr::{parse_bool_expr, BoolExpr};
use crate::error::{Error, Result};
use crate::trees::{strip_comment, Alphabet, CompleteTree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GnfSentence {
    pub alphabet: Arc<Alphabet>,
    pub basics: Vec<(String, BasicLocalSentence)>,
    /// Leaves index into `basics`.
    pub expr: BoolExpr<usize>,
}

impl GnfSentence {
    pub fn new(alphabet: Arc<Alphabet>, basics: Vec<(String, BasicLocalSentence)>, expr: BoolExpr<usize>) -> Result<Self> {
        if let Some(&&i) = expr.leaves().iter().find(|&&&i| i >= basics.len()) {
            return Err(Error::precondition(format!("expression refers to basic sentence #{i}, which does not exist")));
        }
        Ok(GnfSentence { alphabet, basics, expr })
    }

    /// The common radius of all basic sentences.
    pub fn radius(&self) -> Result<u32> {
        let mut radii = self.basics.iter().map(|(_, b)| b.radius());
        let Some(r) = radii.next() else {
            return Ok(0);
        };
        match radii.find(|&s| s != r) {
            Some(s) => Err(Error::precondition(format!("mixed radii {r} and {s} across basic sentences"))),
            None => Ok(r),
        }
    }

    /// Direct evaluation of the unreduced combination on a finite tree.
    pub fn holds(&self, t: &CompleteTree) -> bool {
        self.expr.eval(&mut |&i| self.basics[i].1.holds(t))
    }

    pub fn parse(text: &str, alphabet: Option<Arc<Alphabet>>) -> Result<Self> {
        let mut alphabet = alphabet;
        let mut radius: Option<u32> = None;
        let mut basics: Vec<(String, BasicLocalSentence)> = Vec::new();
        let mut open: Option<(String, usize, Vec<LocalFormula>)> = None;
        let mut expr: Option<(BoolExpr<String>, usize)> = None;
        let mut last = 0;

        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            last = no;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            if expr.is_some() {
                return Err(Error::parse(no, "nothing may follow the `expr` line"));
            }
            match head {
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(Error::parse(no, "alphabet given twice"));
                    }
                    let a = Alphabet::new(rest.split_whitespace()).map_err(|e| Error::parse(no, e.to_string()))?;
                    alphabet = Some(Arc::new(a));
                }
                "radius" => {
                    if radius.is_some() {
                        return Err(Error::parse(no, "radius given twice"));
                    }
                    if !basics.is_empty() || open.is_some() {
                        return Err(Error::parse(no, "`radius` must come before the first `basic` block"));
                    }
                    let r = rest
                        .parse()
                        .map_err(|_| Error::parse(no, format!("radius `{rest}` is not a natural number")))?;
                    radius = Some(r);
                }
                "basic" => {
                    if let Some((name, _, _)) = &open {
                        return Err(Error::parse(no, format!("block `{name}` is missing its `end`")));
                    }
                    if !crate::trees::is_identifier(rest) || rest == "true" || rest == "false" {
                        return Err(Error::parse(no, format!("`{rest}` is not a valid block name")));
                    }
                    if basics.iter().any(|(n, _)| n == rest) {
                        return Err(Error::parse(no, format!("block `{rest}` is defined twice")));
                    }
                    open = Some((rest.to_string(), no, Vec::new()));
                }
                "local" => {
                    let Some((_, _, locals)) = &mut open else {
                        return Err(Error::parse(no, "`local` outside a `basic` block"));
                    };
                    let alpha = alphabet
                        .clone()
                        .ok_or_else(|| Error::parse(no, "`local` before `alphabet`"))?;
                    let r = radius.ok_or_else(|| Error::parse(no, "`local` before `radius`"))?;
                    let (center, body) = rest
                        .split_once(':')
                        .ok_or_else(|| Error::parse(no, "expected `local VAR: formula`"))?;
                    let center = center.trim();
                    if !crate::trees::is_identifier(center) {
                        return Err(Error::parse(no, format!("`{center}` is not a variable name")));
                    }
                    locals.push(LocalFormula::parse_at(alpha, center, r, body, no)?);
                }
                "end" => {
                    let Some((name, start, locals)) = open.take() else {
                        return Err(Error::parse(no, "`end` without a `basic` block"));
                    };
                    let sentence =
                        BasicLocalSentence::new(locals).map_err(|e| Error::parse(start, format!("block `{name}`: {e}")))?;
                    basics.push((name, sentence));
                }
                "expr" => {
                    if let Some((name, _, _)) = &open {
                        return Err(Error::parse(no, format!("block `{name}` is missing its `end`")));
                    }
                    expr = Some((parse_bool_expr(rest, no)?, no));
                }
                other => return Err(Error::parse(no, format!("unknown declaration `{other}`"))),
            }
        }

        if let Some((name, start, _)) = open {
            return Err(Error::parse(start, format!("block `{name}` is missing its `end`")));
        }
        let alphabet = alphabet.ok_or_else(|| Error::parse(last.max(1), "missing `alphabet` line"))?;
        let (expr, expr_line) = expr.ok_or_else(|| Error::parse(last.max(1), "missing `expr` line"))?;
        let expr = expr.try_map(&mut |name: &String| {
            basics
                .iter()
                .position(|(n, _)| n == name)
                .ok_or_else(|| Error::parse(expr_line, format!("unknown block `{name}` in expression")))
        })?;
        GnfSentence::new(alphabet, basics, expr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_blocks_and_expression() {
        let text = "alphabet a b\nradius 1\n# root labelled a\nbasic ra\n  local x: root(x) & a(x)\nend\nbasic any_b\n  local y: b(y)\n  local z: E w<=1@z. sL(z,w) & a(w)\nend\nexpr !ra | any_b\n";
        let g = GnfSentence::parse(text, None).unwrap();
        assert_eq!(g.basics.len(), 2);
        assert_eq!(g.basics[1].1.locals().len(), 2);
        assert_eq!(g.radius().unwrap(), 1);
        assert_eq!(g.expr.leaves(), vec![&0, &1]);
    }

    #[test]
    fn rejects_malformed_files() {
        let cases = [
            ("alphabet a b\nbasic p\nlocal x: a(x)\nend\nexpr p\n", 3),
            ("alphabet a b\nradius 1\nbasic p\nlocal x: a(x)\nexpr p\n", 5),
            ("alphabet a b\nradius 1\nbasic p\nlocal x: E y. a(y)\nend\nexpr p\n", 4),
            ("alphabet a b\nradius 1\nbasic p\nlocal x: E y<=2@x. a(y)\nend\nexpr p\n", 4),
            ("alphabet a b\nradius 1\nbasic p\nlocal x: a(y)\nend\nexpr p\n", 4),
            ("alphabet a b\nradius 1\nbasic p\nlocal x: a(x)\nend\nexpr q\n", 6),
            ("alphabet a b\nradius 1\nbasic p\nend\nexpr p\n", 3),
            ("alphabet a b\nradius 1\nbasic p\nlocal x: a(x)\nend\n", 5),
            ("alphabet a b\nradius 1\nwhat\n", 3),
        ];
        for (text, line) in cases {
            match GnfSentence::parse(text, None) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn mixed_radii_are_reported() {
        let alpha = Arc::new(Alphabet::new(["a", "b"]).unwrap());
        let one = BasicLocalSentence::new(vec![LocalFormula::parse(alpha.clone(), "x", 1, "a(x)").unwrap()]).unwrap();
        let two = BasicLocalSentence::new(vec![LocalFormula::parse(alpha.clone(), "x", 2, "a(x)").unwrap()]).unwrap();
        let g = GnfSentence::new(
            alpha,
            vec![("p".into(), one), ("q".into(), two)],
            BoolExpr::and([BoolExpr::Leaf(0), BoolExpr::Leaf(1)]),
        )
        .unwrap();
        assert!(matches!(g.radius(), Err(Error::Precondition(_))));
    }
}
