//! Alphabets, positions and labelled binary trees.
//!
//! Positions are stored as heap indices: the root is `0`, the left child of
//! `i` is `2i + 1` and the right child is `2i + 2`. Ordering positions by
//! index is the same as ordering them by length and then lexicographically
//! with `L < R`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Budget;
use crate::error::{Error, Result};

/// Exact measures are reported as arbitrary-precision rationals in lowest terms.
pub type Rational = BigRational;

/// Deepest position representable by a heap index in a `u64`.
pub const MAX_DEPTH: u32 = 62;

/// Index of a symbol within its alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u8);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite, ordered, non-empty set of symbol names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    lookup: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::precondition("alphabet must contain at least one symbol"));
        }
        if symbols.len() > u8::MAX as usize {
            return Err(Error::precondition("alphabet may contain at most 255 symbols"));
        }
        let mut lookup = HashMap::with_capacity(symbols.len());
        for (i, name) in symbols.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::precondition(format!("invalid symbol name `{name}`")));
            }
            if lookup.insert(name.clone(), Symbol(i as u8)).is_some() {
                return Err(Error::precondition(format!("duplicate symbol `{name}`")));
            }
        }
        Ok(Alphabet { symbols, lookup })
    }

    /// Parses the compact command-line form: `a,b,c` or, without commas,
    /// one symbol per character (`abc`).
    pub fn from_compact(spec: &str) -> Result<Self> {
        if spec.contains(',') {
            Alphabet::new(spec.split(',').map(str::trim))
        } else {
            Alphabet::new(spec.chars().map(String::from))
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, symbol: Symbol) -> &str {
        &self.symbols[symbol.index()]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().map(String::as_str)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.symbols.len()).map(|i| Symbol(i as u8))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alphabet {}", self.symbols.join(" "))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphanumeric() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    L,
    R,
}

/// A node address `u ∈ {L,R}*`, stored as its heap index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(u64);

impl Position {
    pub const ROOT: Position = Position(0);

    pub fn from_index(index: u64) -> Self {
        Position(index)
    }

    pub fn index(self) -> u64 {
        self.0
    }

    /// Parses a word over `{L,R}`; `e` and the empty string denote the root.
    pub fn from_word(word: &str) -> Option<Self> {
        if word == "e" || word == "ε" {
            return Some(Position::ROOT);
        }
        if word.len() > MAX_DEPTH as usize {
            return None;
        }
        let mut pos = Position::ROOT;
        for c in word.chars() {
            pos = match c {
                'L' => pos.child(Dir::L),
                'R' => pos.child(Dir::R),
                _ => return None,
            };
        }
        Some(pos)
    }

    pub fn depth(self) -> u32 {
        63 - (self.0 + 1).leading_zeros()
    }

    pub fn child(self, dir: Dir) -> Self {
        match dir {
            Dir::L => Position(2 * self.0 + 1),
            Dir::R => Position(2 * self.0 + 2),
        }
    }

    pub fn left(self) -> Self {
        self.child(Dir::L)
    }

    pub fn right(self) -> Self {
        self.child(Dir::R)
    }

    pub fn parent(self) -> Option<Self> {
        (self.0 > 0).then(|| Position((self.0 - 1) / 2))
    }

    /// Direction of the last step, `None` for the root.
    pub fn last_dir(self) -> Option<Dir> {
        match self.0 {
            0 => None,
            i if i % 2 == 1 => Some(Dir::L),
            _ => Some(Dir::R),
        }
    }

    /// The prefix of this position of length `depth`.
    pub fn ancestor_at_depth(self, depth: u32) -> Self {
        debug_assert!(depth <= self.depth());
        Position(((self.0 + 1) >> (self.depth() - depth)) - 1)
    }

    /// Strict ancestor test: `self` is a proper prefix of `other`.
    pub fn is_proper_ancestor_of(self, other: Position) -> bool {
        let d = self.depth();
        other.depth() > d && other.ancestor_at_depth(d) == self
    }

    /// Longest common prefix.
    pub fn lca(self, other: Position) -> Self {
        let d = self.depth().min(other.depth());
        let (mut a, mut b) = (self.ancestor_at_depth(d), other.ancestor_at_depth(d));
        while a != b {
            a = Position((a.0 - 1) / 2);
            b = Position((b.0 - 1) / 2);
        }
        a
    }

    pub fn word(self) -> String {
        let depth = self.depth();
        (1..=depth)
            .map(|d| match self.ancestor_at_depth(d).last_dir() {
                Some(Dir::L) => 'L',
                _ => 'R',
            })
            .collect()
    }

    /// All positions of depth at most `depth`, in heap order.
    pub fn up_to_depth(depth: u32) -> impl Iterator<Item = Position> {
        (0..node_count(depth)).map(Position)
    }

    /// Positions of depth exactly `depth`, left to right.
    pub fn at_depth(depth: u32) -> impl Iterator<Item = Position> {
        let first = (1u64 << depth) - 1;
        (first..2 * first + 1).map(Position)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            f.write_str("e")
        } else {
            f.write_str(&self.word())
        }
    }
}

/// Distance in the child graph: `|u| + |v| - 2|lca(u, v)|`.
pub fn tree_distance(u: Position, v: Position) -> u32 {
    u.depth() + v.depth() - 2 * u.lca(v).depth()
}

/// Positions within `radius` of `center` whose depth does not exceed `max_depth`.
pub fn ball(center: Position, radius: u32, max_depth: u32) -> Vec<Position> {
    let mut seen = vec![center];
    let mut queue = VecDeque::from([(center, 0u32)]);
    while let Some((pos, dist)) = queue.pop_front() {
        if dist == radius {
            continue;
        }
        let mut next = Vec::with_capacity(3);
        if let Some(p) = pos.parent() {
            next.push(p);
        }
        if pos.depth() < max_depth {
            next.push(pos.left());
            next.push(pos.right());
        }
        for n in next {
            if !seen.contains(&n) {
                seen.push(n);
                queue.push_back((n, dist + 1));
            }
        }
    }
    seen.sort();
    seen
}

/// Number of nodes of a complete tree of height `height`: `2^(height+1) - 1`.
pub fn node_count(height: u32) -> u64 {
    assert!(height <= MAX_DEPTH, "height {height} exceeds {MAX_DEPTH}");
    (1u64 << (height + 1)) - 1
}

/// `|Γ|^(2^(height+1)-1)`, the number of complete trees of the given height.
pub fn tree_count(height: u32, alphabet_size: usize) -> BigUint {
    BigUint::from(alphabet_size).pow(node_count(height))
}

/// Checks the number of complete trees of `height` against the budget and
/// returns it as a `u64`.
pub fn enumeration_size(height: u32, alphabet_size: usize, budget: &Budget) -> Result<u64> {
    let nodes = if height <= MAX_DEPTH {
        node_count(height)
    } else {
        u64::MAX
    };
    let count = u32::try_from(nodes)
        .ok()
        .and_then(|n| (alphabet_size as u64).checked_pow(n));
    match count {
        Some(c) if c <= budget.max_trees => Ok(c),
        _ => Err(Error::Budget {
            what: "complete-tree enumeration",
            needed: if height <= MAX_DEPTH {
                format!("{alphabet_size}^{nodes} trees")
            } else {
                format!("height {height}")
            },
            cap: budget.max_trees,
        }),
    }
}

/// A finite tree with a prefix-closed domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTree {
    alphabet: Arc<Alphabet>,
    labels: BTreeMap<Position, Symbol>,
}

impl FiniteTree {
    pub fn new(alphabet: Arc<Alphabet>, labels: BTreeMap<Position, Symbol>) -> Result<Self> {
        for (&pos, &sym) in &labels {
            if sym.index() >= alphabet.len() {
                return Err(Error::precondition(format!("label at {pos} outside the alphabet")));
            }
            if let Some(parent) = pos.parent() {
                if !labels.contains_key(&parent) {
                    return Err(Error::precondition(format!(
                        "domain is not prefix-closed: {pos} present but {parent} missing"
                    )));
                }
            }
        }
        Ok(FiniteTree { alphabet, labels })
    }

    /// Parses `node <word|e> <symbol>` lines. An `alphabet` line is required
    /// unless `alphabet` is supplied.
    pub fn parse(text: &str, alphabet: Option<Arc<Alphabet>>) -> Result<Self> {
        let mut alphabet = alphabet;
        let mut labels = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let line = strip_comment(raw);
            let mut words = line.split_whitespace();
            match words.next() {
                None => continue,
                Some("alphabet") => {
                    let a = Alphabet::new(words).map_err(|e| Error::parse(line_no, e.to_string()))?;
                    alphabet = Some(Arc::new(a));
                }
                Some("node") => {
                    let alpha = alphabet
                        .as_ref()
                        .ok_or_else(|| Error::parse(line_no, "`node` before `alphabet`"))?;
                    let (Some(word), Some(sym), None) = (words.next(), words.next(), words.next())
                    else {
                        return Err(Error::parse(line_no, "expected `node <position> <symbol>`"));
                    };
                    let pos = Position::from_word(word)
                        .ok_or_else(|| Error::parse(line_no, format!("bad position `{word}`")))?;
                    let sym = alpha
                        .symbol(sym)
                        .ok_or_else(|| Error::parse(line_no, format!("unknown symbol `{sym}`")))?;
                    if labels.insert(pos, sym).is_some() {
                        return Err(Error::parse(line_no, format!("position {pos} labelled twice")));
                    }
                }
                Some(other) => {
                    return Err(Error::parse(line_no, format!("unknown declaration `{other}`")))
                }
            }
        }
        let alphabet = alphabet.ok_or_else(|| Error::parse(1, "missing `alphabet` line"))?;
        FiniteTree::new(alphabet, labels).map_err(|e| Error::parse(0, e.to_string()))
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, pos: Position) -> Option<Symbol> {
        self.labels.get(&pos).copied()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (Position, Symbol)> + '_ {
        self.labels.iter().map(|(&p, &s)| (p, s))
    }

    /// Depth of the deepest node; `None` for the empty tree.
    pub fn height(&self) -> Option<u32> {
        self.labels.keys().map(|p| p.depth()).max()
    }
}

impl fmt::Display for FiniteTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, sym) in self.nodes() {
            writeln!(f, "node {pos} {}", self.alphabet.name(sym))?;
        }
        Ok(())
    }
}

/// `|Γ|^(-|Dom(t)|)`: the measure of the set of infinite trees that contain
/// `t` as a sub-tree at a fixed position.
pub fn basic_set_measure(t: &FiniteTree) -> Rational {
    let denom = BigUint::from(t.alphabet.len()).pow(t.size());
    Rational::new(1.into(), denom.into())
}

/// A complete binary tree of height `k`, labels stored in heap order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompleteTree {
    alphabet: Arc<Alphabet>,
    height: u32,
    labels: Vec<Symbol>,
}

impl CompleteTree {
    pub fn new(alphabet: Arc<Alphabet>, height: u32, labels: Vec<Symbol>) -> Result<Self> {
        if height > MAX_DEPTH || labels.len() as u64 != node_count(height) {
            return Err(Error::precondition(format!(
                "a complete tree of height {height} needs 2^{}-1 labels, got {}",
                height + 1,
                labels.len()
            )));
        }
        if labels.iter().any(|s| s.index() >= alphabet.len()) {
            return Err(Error::precondition("label outside the alphabet"));
        }
        Ok(CompleteTree {
            alphabet,
            height,
            labels,
        })
    }

    /// Every node labelled with `symbol`.
    pub fn uniform(alphabet: Arc<Alphabet>, height: u32, symbol: Symbol) -> Self {
        let labels = vec![symbol; node_count(height) as usize];
        CompleteTree {
            alphabet,
            height,
            labels,
        }
    }

    /// The tree at position `index` of the base-|Γ| enumeration order.
    pub fn from_counter(alphabet: Arc<Alphabet>, height: u32, mut index: u64) -> Self {
        let k = alphabet.len() as u64;
        let n = node_count(height) as usize;
        let mut labels = vec![Symbol(0); n];
        for slot in labels.iter_mut().rev() {
            *slot = Symbol((index % k) as u8);
            index /= k;
        }
        CompleteTree {
            alphabet,
            height,
            labels,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn labels(&self) -> &[Symbol] {
        &self.labels
    }

    pub fn contains(&self, pos: Position) -> bool {
        pos.index() < self.labels.len() as u64
    }

    pub fn label(&self, pos: Position) -> Symbol {
        self.labels[pos.index() as usize]
    }

    pub fn get(&self, pos: Position) -> Option<Symbol> {
        self.labels.get(pos.index() as usize).copied()
    }

    pub fn set(&mut self, pos: Position, symbol: Symbol) {
        self.labels[pos.index() as usize] = symbol;
    }

    pub fn positions(&self) -> impl Iterator<Item = Position> {
        (0..self.labels.len() as u64).map(Position)
    }

    /// Restriction to `{L,R}^(<=depth)`.
    pub fn prefix_of_height(&self, depth: u32) -> Result<CompleteTree> {
        if depth > self.height {
            return Err(Error::precondition(format!(
                "prefix height {depth} exceeds tree height {}",
                self.height
            )));
        }
        Ok(CompleteTree {
            alphabet: self.alphabet.clone(),
            height: depth,
            labels: self.labels[..node_count(depth) as usize].to_vec(),
        })
    }

    /// Extends the tree to `height`, filling new nodes with `fill`.
    pub fn extend_to(&self, height: u32, fill: Symbol) -> CompleteTree {
        let mut labels = self.labels.clone();
        labels.resize(node_count(height.max(self.height)) as usize, fill);
        CompleteTree {
            alphabet: self.alphabet.clone(),
            height: height.max(self.height),
            labels,
        }
    }

    /// Does `t` occur as a sub-tree rooted at `at`, entirely inside this tree?
    pub fn contains_subtree_at(&self, t: &FiniteTree, at: Position) -> bool {
        t.nodes().all(|(offset, sym)| {
            relocate(at, offset).is_some_and(|p| self.get(p) == Some(sym))
        })
    }

    /// Parses the canonical two-line form; see [`fmt::Display`].
    pub fn parse(text: &str, alphabet: Arc<Alphabet>) -> Result<Self> {
        let mut lines = text.lines().map(strip_comment).filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::parse(1, "empty tree text"))?;
        let height = header
            .trim()
            .strip_prefix("height ")
            .and_then(|h| h.trim().parse::<u32>().ok())
            .ok_or_else(|| Error::parse(1, "expected `height <k>`"))?;
        let body = lines.next().unwrap_or("");
        let labels = body
            .split_whitespace()
            .map(|s| {
                alphabet
                    .symbol(s)
                    .ok_or_else(|| Error::parse(2, format!("unknown symbol `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        CompleteTree::new(alphabet, height, labels).map_err(|e| Error::parse(2, e.to_string()))
    }
}

impl fmt::Display for CompleteTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "height {}", self.height)?;
        let names: Vec<&str> = self.labels.iter().map(|&s| self.alphabet.name(s)).collect();
        writeln!(f, "{}", names.join(" "))
    }
}

/// `at · offset`, if it is representable.
pub fn relocate(at: Position, offset: Position) -> Option<Position> {
    let d = offset.depth();
    if at.depth() + d > MAX_DEPTH {
        return None;
    }
    // heap index of at·w: ((at+1) << d) + (offset+1 - 2^d) - 1
    Some(Position(((at.index() + 1) << d) + (offset.index() + 1 - (1u64 << d)) - 1))
}

/// All complete trees of `height`, in base-|Γ| counter order (last heap index fastest).
pub fn enumerate_complete_trees(
    height: u32,
    alphabet: Arc<Alphabet>,
    budget: &Budget,
) -> Result<impl Iterator<Item = CompleteTree>> {
    let total = enumeration_size(height, alphabet.len(), budget)?;
    let mut cursor = TreeCursor::new(alphabet, height, 0);
    let mut remaining = total;
    Ok(std::iter::from_fn(move || {
        if remaining == 0 {
            return None;
        }
        remaining -= 1;
        let tree = cursor.tree().clone();
        cursor.advance();
        Some(tree)
    }))
}

/// A mutable counter over label arrays; used by the counting backends to
/// walk a range of the enumeration without reallocating.
pub(crate) struct TreeCursor {
    tree: CompleteTree,
    k: u8,
}

impl TreeCursor {
    pub(crate) fn new(alphabet: Arc<Alphabet>, height: u32, start: u64) -> Self {
        let k = alphabet.len() as u8;
        TreeCursor {
            tree: CompleteTree::from_counter(alphabet, height, start),
            k,
        }
    }

    pub(crate) fn tree(&self) -> &CompleteTree {
        &self.tree
    }

    pub(crate) fn advance(&mut self) {
        for slot in self.tree.labels.iter_mut().rev() {
            slot.0 += 1;
            if slot.0 < self.k {
                return;
            }
            slot.0 = 0;
        }
    }
}

/// Draws every label independently and uniformly.
pub fn sample_with<R: Rng>(rng: &mut R, height: u32, alphabet: &Arc<Alphabet>) -> CompleteTree {
    let mut t = CompleteTree::uniform(alphabet.clone(), height, Symbol(0));
    resample(rng, &mut t);
    t
}

/// Relabels `t` in place with fresh uniform labels.
pub(crate) fn resample<R: Rng>(rng: &mut R, t: &mut CompleteTree) {
    let k = t.alphabet.len() as u8;
    if k == 1 {
        t.labels.fill(Symbol(0));
    } else if k.is_power_of_two() {
        // several labels per 64-bit draw
        let bits = k.trailing_zeros();
        let per_word = (64 / bits) as usize;
        for chunk in t.labels.chunks_mut(per_word) {
            let mut word = rng.next_u64();
            for slot in chunk {
                *slot = Symbol((word & u64::from(k - 1)) as u8);
                word >>= bits;
            }
        }
    } else {
        for slot in t.labels.iter_mut() {
            *slot = Symbol(rng.random_range(0..k));
        }
    }
}

/// A uniformly random complete tree, deterministic in `seed`.
pub fn sample_complete_tree(height: u32, alphabet: Arc<Alphabet>, seed: u64) -> CompleteTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(&mut rng, height, &alphabet)
}

/// `1 / |Γ|^(nodes of a height-`height` tree)` times `count`.
pub fn fraction_of_trees(count: &BigUint, height: u32, alphabet_size: usize) -> Rational {
    Rational::new(count.clone().into(), tree_count(height, alphabet_size).into())
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}
