//! Conjunctive queries over labelled binary trees, represented as patterns.
//!
//! A pattern is a graph whose vertices may carry a label and a root flag, and
//! whose edges are left-child, right-child, some-child or strict-ancestor
//! constraints. A tree satisfies the pattern iff there is a homomorphism from
//! the pattern into the tree.

mod firm;
mod hom;
mod sat;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::trees::{is_identifier, strip_comment, Alphabet, Symbol};

pub use firm::{firm_decomposition, rooted_depth_bound, FirmDecomposition};
pub use hom::{check_hom, verify_hom, HomMatcher, HomWitness};
pub use sat::{is_satisfiable_pattern, satisfiability_bound, Model};

pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    /// `y` is the left child of `x`.
    Left,
    /// `y` is the right child of `x`.
    Right,
    /// `y` is a child of `x`.
    Child,
    /// `x` is a strict ancestor of `y`.
    Ancestor,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 4] = [EdgeKind::Left, EdgeKind::Right, EdgeKind::Child, EdgeKind::Ancestor];

    pub fn code(self) -> &'static str {
        match self {
            EdgeKind::Left => "L",
            EdgeKind::Right => "R",
            EdgeKind::Child => "S",
            EdgeKind::Ancestor => "A",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        EdgeKind::ALL.into_iter().find(|k| k.code() == code)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub label: Option<Symbol>,
    pub root: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub kind: EdgeKind,
    pub from: VertexId,
    pub to: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    alphabet: Arc<Alphabet>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    by_name: HashMap<String, VertexId>,
}

impl Pattern {
    pub fn new(alphabet: Arc<Alphabet>) -> Self {
        Pattern {
            alphabet,
            vertices: Vec::new(),
            edges: Vec::new(),
            by_name: HashMap::new(),
        }
    }

    pub fn add_vertex(&mut self, name: &str, label: Option<Symbol>, root: bool) -> Result<VertexId> {
        if !is_identifier(name) {
            return Err(Error::precondition(format!("invalid vertex name `{name}`")));
        }
        if self.by_name.contains_key(name) {
            return Err(Error::precondition(format!("vertex `{name}` declared twice")));
        }
        if label.is_some_and(|s| s.index() >= self.alphabet.len()) {
            return Err(Error::precondition("label outside the alphabet"));
        }
        let id = self.vertices.len();
        self.vertices.push(Vertex {
            name: name.to_string(),
            label,
            root,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    /// Adds an edge; duplicates are ignored.
    pub fn add_edge(&mut self, kind: EdgeKind, from: VertexId, to: VertexId) -> Result<()> {
        if from >= self.vertices.len() || to >= self.vertices.len() {
            return Err(Error::precondition("edge endpoint is not a vertex"));
        }
        let e = Edge { kind, from, to };
        if !self.edges.contains(&e) {
            self.edges.push(e);
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.by_name.get(name).copied()
    }

    pub fn roots(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().enumerate().filter(|(_, v)| v.root).map(|(i, _)| i)
    }

    pub fn is_rooted(&self) -> bool {
        self.vertices.iter().any(|v| v.root)
    }

    /// Size `|V| + |E|`, counting all four edge kinds.
    pub fn size(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    /// The sub-pattern induced by `keep` (edges with both endpoints kept).
    pub fn induced(&self, keep: &[VertexId]) -> Pattern {
        let mut sub = Pattern::new(self.alphabet.clone());
        let mut map = HashMap::new();
        for &v in keep {
            let vx = &self.vertices[v];
            let id = sub
                .add_vertex(&vx.name, vx.label, vx.root)
                .expect("names are unique in the parent pattern");
            map.insert(v, id);
        }
        for e in &self.edges {
            if let (Some(&a), Some(&b)) = (map.get(&e.from), map.get(&e.to)) {
                sub.add_edge(e.kind, a, b).expect("endpoints exist");
            }
        }
        sub
    }

    /// Parses the pattern file format. If `alphabet` is `None` the text must
    /// declare one with an `alphabet` line before any vertex.
    pub fn parse(text: &str, alphabet: Option<Arc<Alphabet>>) -> Result<Pattern> {
        let mut builder = PatternBuilder::new(alphabet);
        for (i, raw) in text.lines().enumerate() {
            builder.handle(i + 1, strip_comment(raw))?;
        }
        builder.finish(text.lines().count().max(1))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            write!(f, "vertex {}", v.name)?;
            if let Some(l) = v.label {
                write!(f, " label={}", self.alphabet.name(l))?;
            }
            if v.root {
                f.write_str(" root")?;
            }
            writeln!(f)?;
        }
        for e in &self.edges {
            writeln!(
                f,
                "edge {} {} {}",
                e.kind.code(),
                self.vertices[e.from].name,
                self.vertices[e.to].name
            )?;
        }
        Ok(())
    }
}

/// Line-at-a-time pattern reader, shared with the Boolean-combination format.
pub(crate) struct PatternBuilder {
    alphabet: Option<Arc<Alphabet>>,
    pattern: Option<Pattern>,
}

impl PatternBuilder {
    pub(crate) fn new(alphabet: Option<Arc<Alphabet>>) -> Self {
        let pattern = alphabet.clone().map(Pattern::new);
        PatternBuilder { alphabet, pattern }
    }

    /// Handles one comment-stripped line; returns `false` if the first word
    /// is not a pattern declaration.
    pub(crate) fn line(&mut self, line_no: usize, line: &str) -> Result<bool> {
        let mut words = line.split_whitespace();
        let Some(head) = words.next() else {
            return Ok(true);
        };
        match head {
            "alphabet" => {
                if self.pattern.as_ref().is_some_and(|p| p.vertex_count() > 0) {
                    return Err(Error::parse(line_no, "`alphabet` after vertex declarations"));
                }
                let a = Alphabet::new(words).map_err(|e| Error::parse(line_no, e.to_string()))?;
                let a = Arc::new(a);
                self.alphabet = Some(a.clone());
                self.pattern = Some(Pattern::new(a));
            }
            "vertex" => {
                let pattern = self
                    .pattern
                    .as_mut()
                    .ok_or_else(|| Error::parse(line_no, "`vertex` before `alphabet`"))?;
                let name = words
                    .next()
                    .ok_or_else(|| Error::parse(line_no, "expected `vertex <name> [label=<symbol>] [root]`"))?;
                let mut label = None;
                let mut root = false;
                for w in words {
                    if w == "root" {
                        root = true;
                    } else if let Some(sym) = w.strip_prefix("label=") {
                        let s = pattern
                            .alphabet
                            .symbol(sym)
                            .ok_or_else(|| Error::parse(line_no, format!("unknown symbol `{sym}`")))?;
                        label = Some(s);
                    } else {
                        return Err(Error::parse(line_no, format!("unexpected vertex attribute `{w}`")));
                    }
                }
                pattern
                    .add_vertex(name, label, root)
                    .map_err(|e| Error::parse(line_no, e.to_string()))?;
            }
            "edge" => {
                let pattern = self
                    .pattern
                    .as_mut()
                    .ok_or_else(|| Error::parse(line_no, "`edge` before `alphabet`"))?;
                let (Some(kind), Some(x), Some(y), None) = (words.next(), words.next(), words.next(), words.next())
                else {
                    return Err(Error::parse(line_no, "expected `edge <L|R|S|A> <from> <to>`"));
                };
                let kind = EdgeKind::from_code(kind)
                    .ok_or_else(|| Error::parse(line_no, format!("unknown edge kind `{kind}` (expected L, R, S or A)")))?;
                let lookup = |n: &str| {
                    pattern
                        .vertex_id(n)
                        .ok_or_else(|| Error::parse(line_no, format!("undeclared vertex `{n}`")))
                };
                let (a, b) = (lookup(x)?, lookup(y)?);
                pattern.add_edge(kind, a, b).expect("endpoints were looked up");
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub(crate) fn alphabet(&self) -> Option<&Arc<Alphabet>> {
        self.alphabet.as_ref()
    }

    /// Starts a fresh pattern over the same alphabet, returning the current one.
    pub(crate) fn take(&mut self) -> Option<Pattern> {
        let fresh = self.alphabet.clone().map(Pattern::new);
        std::mem::replace(&mut self.pattern, fresh)
    }

    pub(crate) fn finish(mut self, last_line: usize) -> Result<Pattern> {
        self.take()
            .ok_or_else(|| Error::parse(last_line, "missing `alphabet` declaration"))
    }

    pub(crate) fn handle(&mut self, line_no: usize, line: &str) -> Result<()> {
        if self.line(line_no, line)? {
            Ok(())
        } else {
            let head = line.split_whitespace().next().unwrap_or_default();
            Err(Error::parse(line_no, format!("unknown declaration `{head}`")))
        }
    }
}
