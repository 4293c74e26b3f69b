use super::{Bound, Formula, Quantifier, Relation};
use crate::error::{Error, Result};
use crate::trees::Alphabet;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u32),
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    Not,
    Arrow,
    Equals,
    AtMost,
    At,
}

impl Tok {
    fn show(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::Num(n) => n.to_string(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Comma => ",".into(),
            Tok::Dot => ".".into(),
            Tok::And => "&".into(),
            Tok::Or => "|".into(),
            Tok::Not => "!".into(),
            Tok::Arrow => "->".into(),
            Tok::Equals => "=".into(),
            Tok::AtMost => "<=".into(),
            Tok::At => "@".into(),
        }
    }
}

/// Parses a formula; variables that are not bound by a quantifier become free
/// (see [`Formula::free_vars`]).
pub fn parse_formula(text: &str, alphabet: &Alphabet) -> Result<Formula> {
    parse_at(text, alphabet, 1, None)
}

/// Like [`parse_formula`], but every free occurrence must be one of `free`.
pub fn parse_formula_with_free(text: &str, alphabet: &Alphabet, free: &[&str]) -> Result<Formula> {
    parse_at(text, alphabet, 1, Some(free))
}

pub(crate) fn parse_at(text: &str, alphabet: &Alphabet, line: usize, free: Option<&[&str]>) -> Result<Formula> {
    let tokens = lex(text, line)?;
    let mut p = Parser {
        toks: tokens,
        at: 0,
        line,
        alphabet,
        scope: free.map(|f| f.iter().map(|s| s.to_string()).collect()),
        end_col: text.chars().count() + 1,
    };
    let f = p.implication()?;
    if let Some((tok, col)) = p.toks.get(p.at) {
        return Err(p.error_at(*col, format!("unexpected `{}` after formula", tok.show())));
    }
    Ok(f)
}

fn lex(text: &str, line: usize) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let two = |next: char| chars.get(i + 1) == Some(&next);
        let tok = match c {
            _ if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '&' => Tok::And,
            '|' => Tok::Or,
            '!' => Tok::Not,
            '=' => Tok::Equals,
            '@' => Tok::At,
            '-' if two('>') => {
                i += 1;
                Tok::Arrow
            }
            '<' if two('=') => {
                i += 1;
                Tok::AtMost
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..=i].iter().collect();
                let n = digits
                    .parse()
                    .map_err(|_| Error::parse(line, format!("column {col}: bound `{digits}` is too large")))?;
                Tok::Num(n)
            }
            _ if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..=i].iter().collect())
            }
            _ => return Err(Error::parse(line, format!("column {col}: unexpected character `{c}`"))),
        };
        out.push((tok, col));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    line: usize,
    alphabet: &'a Alphabet,
    /// `Some` when free variables must be declared up front.
    scope: Option<Vec<String>>,
    end_col: usize,
}

impl Parser<'_> {
    fn error_at(&self, col: usize, msg: impl std::fmt::Display) -> Error {
        Error::parse(self.line, format!("column {col}: {msg}"))
    }

    fn col(&self) -> usize {
        self.toks.get(self.at).map_or(self.end_col, |t| t.1)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.at + 1).map(|t| &t.0)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.0.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let col = self.col();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(self.error_at(col, format!("expected `{}`, found `{}`", want.show(), t.show()))),
            None => Err(self.error_at(col, format!("expected `{}` at end of input", want.show()))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            Some(t) => Err(self.error_at(col, format!("expected a variable, found `{}`", t.show()))),
            None => Err(self.error_at(col, "expected a variable at end of input")),
        }
    }

    fn variable(&mut self) -> Result<String> {
        let col = self.col();
        let v = self.ident()?;
        if let Some(scope) = &self.scope {
            if !scope.contains(&v) {
                return Err(self.error_at(col, format!("unbound variable `{v}`")));
            }
        }
        Ok(v)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            f = Formula::Or(Box::new(f), Box::new(self.conjunction()?));
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            f = Formula::And(Box::new(f), Box::new(self.unary()?));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match (self.peek(), self.peek2()) {
            (Some(Tok::Not), _) => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            (Some(Tok::Ident(q)), Some(Tok::Ident(_))) if q == "E" || q == "A" => self.quantified(),
            _ => self.primary(),
        }
    }

    fn quantified(&mut self) -> Result<Formula> {
        let q = match self.bump() {
            Some(Tok::Ident(s)) if s == "E" => Quantifier::Exists,
            _ => Quantifier::Forall,
        };
        let var = self.ident()?;
        let bound = if self.peek() == Some(&Tok::AtMost) {
            self.bump();
            let col = self.col();
            let radius = match self.bump() {
                Some(Tok::Num(n)) => n,
                _ => return Err(self.error_at(col, "expected a distance bound after `<=`")),
            };
            self.expect(Tok::At)?;
            let center = self.variable()?;
            Some(Bound { radius, center })
        } else {
            None
        };
        self.expect(Tok::Dot)?;
        if let Some(scope) = &mut self.scope {
            scope.push(var.clone());
        }
        let body = self.implication();
        if let Some(scope) = &mut self.scope {
            scope.pop();
        }
        Ok(Formula::Quant {
            q,
            var,
            bound,
            body: Box::new(body?),
        })
    }

    fn primary(&mut self) -> Result<Formula> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Ident(name)) if self.peek2() == Some(&Tok::LParen) => {
                self.bump();
                self.bump();
                let mut args = vec![self.variable()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.bump();
                    args.push(self.variable()?);
                }
                self.expect(Tok::RParen)?;
                self.atom(&name, args, col)
            }
            Some(Tok::Ident(_)) if self.peek2() == Some(&Tok::Equals) => {
                let x = self.variable()?;
                self.bump();
                let y = self.variable()?;
                Ok(Formula::Eq(x, y))
            }
            Some(t) => Err(self.error_at(col, format!("unexpected `{}`", t.show()))),
            None => Err(self.error_at(col, "formula ends unexpectedly")),
        }
    }

    fn atom(&self, name: &str, mut args: Vec<String>, col: usize) -> Result<Formula> {
        match (name, args.len()) {
            ("root", 1) => return Ok(Formula::Root(args.pop().unwrap())),
            (_, 2) => {
                if let Some(rel) = Relation::from_keyword(name) {
                    let y = args.pop().unwrap();
                    let x = args.pop().unwrap();
                    return Ok(Formula::Rel(rel, x, y));
                }
            }
            (_, 1) => {
                if let Some(sym) = self.alphabet.symbol(name) {
                    return Ok(Formula::Label(sym, args.pop().unwrap()));
                }
            }
            _ => {}
        }
        if name == "root" || Relation::from_keyword(name).is_some() || self.alphabet.symbol(name).is_some() {
            Err(self.error_at(col, format!("`{name}` does not take {} argument(s)", args.len())))
        } else {
            Err(self.error_at(col, format!("unknown predicate or symbol `{name}`")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::Symbol;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn sentence_without_free_variables() {
        let f = parse_formula("E x. root(x) & a(x)", &ab()).unwrap();
        assert!(f.is_sentence());
        // the quantifier body reaches to the end of the input
        assert!(matches!(&f, Formula::Quant { body, .. } if matches!(**body, Formula::And(..))));
    }

    #[test]
    fn free_variable_reported() {
        let f = parse_formula("a(x)", &ab()).unwrap();
        assert_eq!(f, Formula::Label(Symbol(0), "x".into()));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["x"]);
    }

    #[test]
    fn bounded_quantifier() {
        let f = parse_formula("E y<=2@x. b(y)", &ab()).unwrap();
        let Formula::Quant { q, var, bound, .. } = &f else {
            panic!("{f:?}")
        };
        assert_eq!(*q, Quantifier::Exists);
        assert_eq!(var, "y");
        assert_eq!(bound, &Some(Bound { radius: 2, center: "x".into() }));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["x"]);
    }

    #[test]
    fn precedence_and_implication() {
        let f = parse_formula("!a(x) & b(x) | root(x) -> x=x -> s(x,x)", &ab()).unwrap();
        let shown = f.display(&ab()).to_string();
        assert_eq!(shown, "(((!a(x) & b(x)) | root(x)) -> (x=x -> s(x,x)))");
    }

    #[test]
    fn errors_carry_locations() {
        let err = parse_formula("E x. a(x) & c(x)", &ab()).unwrap_err();
        assert_eq!(err, Error::parse(1, "column 13: unknown predicate or symbol `c`"));
        let err = parse_formula_with_free("E x. sL(x,y)", &ab(), &[]).unwrap_err();
        assert_eq!(err, Error::parse(1, "column 11: unbound variable `y`"));
        assert!(parse_formula("E x a(x)", &ab()).is_err());
        assert!(parse_formula("a(x) &", &ab()).is_err());
        assert!(parse_formula("sL(x)", &ab()).is_err());
        assert!(parse_formula("E y<=@x. a(y)", &ab()).is_err());
        assert!(parse_formula("a(x) # b", &ab()).is_err());
    }

    #[test]
    fn declared_free_variables_and_scoping() {
        assert!(parse_formula_with_free("E y<=1@x. s(x,y)", &ab(), &["x"]).is_ok());
        // the bound variable is out of scope after the quantifier's body
        assert!(parse_formula_with_free("(E y. a(y)) & b(y)", &ab(), &[]).is_err());
        assert!(parse_formula_with_free("E y<=1@z. a(y)", &ab(), &["x"]).is_err());
    }

    #[test]
    fn quantifier_letters_can_be_symbols() {
        let alpha = Alphabet::new(["A", "E"]).unwrap();
        let f = parse_formula("E x. A(x) & E(x)", &alpha).unwrap();
        assert!(f.is_sentence());
    }
}
