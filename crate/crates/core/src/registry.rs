//! Input kinds behind one interface, selected by name.

use std::sync::Arc;

use num_bigint::BigUint;

use crate::analytic::{path_language_measure, PathLangSpec};
use crate::config::{Budget, EngineConfig};
use crate::error::{Error, Result};
use crate::estimator::{
    allowed_mask, estimate_event, estimate_path_truncation, estimate_subtree_occurrence, has_full_path, Estimate,
    Sampling,
};
use crate::logic::GnfSentence;
use crate::measure::{
    bccq_measure, bccq_positive, bccq_reduce, count_models, fo_local_measure, fo_positive, fo_reduce, pattern_measure,
    pattern_positive, Bccq, MeasureResult,
};
use crate::pattern::{HomMatcher, Pattern};
use crate::trees::{basic_set_measure, tree_count, Alphabet, CompleteTree, FiniteTree, Position};
use crate::DepthMode;

/// A tree on which the query holds, plus whatever certifies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub tree: CompleteTree,
    pub certificate: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Positivity {
    Zero,
    Positive(Witness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Count {
    pub height: u32,
    pub satisfying: BigUint,
    pub total: BigUint,
}

/// A parsed input. Unsupported operations keep the default bodies.
pub trait Query: Send + Sync {
    fn kind(&self) -> &'static str;

    fn alphabet(&self) -> &Arc<Alphabet>;

    fn measure(&self, cfg: &EngineConfig) -> Result<MeasureResult>;

    fn positive(&self, _cfg: &EngineConfig) -> Result<Positivity> {
        Err(self.unsupported("positive"))
    }

    /// Trees of exactly `height` on which the query, read on the finite
    /// tree, holds.
    fn count(&self, _height: u32, _budget: &Budget) -> Result<Count> {
        Err(self.unsupported("count"))
    }

    /// `depth: None` samples at the query's own default depth.
    fn estimate(&self, _depth: Option<u32>, _plan: &Sampling, _cfg: &EngineConfig) -> Result<Estimate> {
        Err(self.unsupported("estimate"))
    }

    fn unsupported(&self, operation: &'static str) -> Error {
        Error::Unsupported {
            pipeline: self.kind(),
            operation,
        }
    }
}

pub trait Pipeline: Send + Sync {
    fn kind(&self) -> &'static str;

    fn load(&self, text: &str, alphabet: Option<Arc<Alphabet>>) -> Result<Box<dyn Query>>;
}

pub struct Registry {
    pipelines: Vec<Box<dyn Pipeline>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry { pipelines: Vec::new() }
    }

    /// `cq`, `bccq`, `fo`, `path` and `subtree`.
    pub fn with_builtins() -> Self {
        let mut r = Registry::empty();
        r.register(Box::new(CqPipeline));
        r.register(Box::new(BccqPipeline));
        r.register(Box::new(FoPipeline));
        r.register(Box::new(PathPipeline));
        r.register(Box::new(SubtreePipeline));
        r
    }

    /// A later registration under the same kind replaces the earlier one.
    pub fn register(&mut self, p: Box<dyn Pipeline>) {
        self.pipelines.retain(|q| q.kind() != p.kind());
        self.pipelines.push(p);
    }

    pub fn get(&self, kind: &str) -> Option<&dyn Pipeline> {
        self.pipelines.iter().find(|p| p.kind() == kind).map(|p| p.as_ref())
    }

    pub fn kinds(&self) -> Vec<&'static str> {
        self.pipelines.iter().map(|p| p.kind()).collect()
    }

    pub fn load(&self, kind: &str, text: &str, alphabet: Option<Arc<Alphabet>>) -> Result<Box<dyn Query>> {
        let p = self.get(kind).ok_or_else(|| {
            Error::precondition(format!("unknown kind `{kind}` (known: {})", self.kinds().join(", ")))
        })?;
        p.load(text, alphabet)
    }
}

fn counted<F>(pred: F, height: u32, alphabet: &Arc<Alphabet>, budget: &Budget) -> Result<Count>
where
    F: Fn(&CompleteTree) -> bool + Sync,
{
    Ok(Count {
        height,
        satisfying: count_models(pred, height, alphabet, budget)?,
        total: tree_count(height, alphabet.len()),
    })
}

struct CqPipeline;
struct CqQuery(Pattern);

impl Pipeline for CqPipeline {
    fn kind(&self) -> &'static str {
        "cq"
    }

    fn load(&self, text: &str, alphabet: Option<Arc<Alphabet>>) -> Result<Box<dyn Query>> {
        Ok(Box::new(CqQuery(Pattern::parse(text, alphabet)?)))
    }
}

impl Query for CqQuery {
    fn kind(&self) -> &'static str {
        "cq"
    }

    fn alphabet(&self) -> &Arc<Alphabet> {
        self.0.alphabet()
    }

    fn measure(&self, cfg: &EngineConfig) -> Result<MeasureResult> {
        pattern_measure(&self.0, cfg)
    }

    fn positive(&self, cfg: &EngineConfig) -> Result<Positivity> {
        Ok(match pattern_positive(&self.0, &cfg.budget)? {
            None => Positivity::Zero,
            Some(m) => Positivity::Positive(Witness {
                certificate: Some(m.witness.display(&self.0).to_string()),
                tree: m.tree,
            }),
        })
    }

    fn count(&self, height: u32, budget: &Budget) -> Result<Count> {
        let m = HomMatcher::new(&self.0);
        counted(|t| m.matches(t), height, self.0.alphabet(), budget)
    }

    fn estimate(&self, depth: Option<u32>, plan: &Sampling, cfg: &EngineConfig) -> Result<Estimate> {
        let depth = match depth {
            Some(d) => d,
            None => self.measure(cfg)?.determining_depth.unwrap_or(0),
        };
        let m = HomMatcher::new(&self.0);
        estimate_event(|t| m.matches(t), self.0.alphabet(), depth, plan)
    }
}

struct BccqPipeline;
struct BccqQuery(Bccq);

impl Pipeline for BccqPipeline {
    fn kind(&self) -> &'static str {
        "bccq"
    }

    fn load(&self, text: &str, alphabet: Option<Arc<Alphabet>>) -> Result<Box<dyn Query>> {
        Ok(Box::new(BccqQuery(Bccq::parse(text, alphabet)?)))
    }
}

impl Query for BccqQuery {
    fn kind(&self) -> &'static str {
        "bccq"
    }

    fn alphabet(&self) -> &Arc<Alphabet> {
        &self.0.alphabet
    }

    fn measure(&self, cfg: &EngineConfig) -> Result<MeasureResult> {
        bccq_measure(&self.0, cfg)
    }

    fn positive(&self, cfg: &EngineConfig) -> Result<Positivity> {
        Ok(match bccq_positive(&self.0, cfg)? {
            None => Positivity::Zero,
            Some(tree) => Positivity::Positive(Witness {
                tree,
                certificate: None,
            }),
        })
    }

    fn count(&self, height: u32, budget: &Budget) -> Result<Count> {
        counted(self.0.predicate(), height, &self.0.alphabet, budget)
    }

    fn estimate(&self, depth: Option<u32>, plan: &Sampling, cfg: &EngineConfig) -> Result<Estimate> {
        let depth = match depth {
            Some(d) => d,
            None => bccq_reduce(&self.0, &cfg.budget)?.determining_depth(cfg),
        };
        estimate_event(self.0.predicate(), &self.0.alphabet, depth, plan)
    }
}

struct FoPipeline;
struct FoQuery(GnfSentence);

impl Pipeline for FoPipeline {
    fn kind(&self) -> &'static str {
        "fo"
    }

    fn load(&self, text: &str, alphabet: Option<Arc<Alphabet>>) -> Result<Box<dyn Query>> {
        Ok(Box::new(FoQuery(GnfSentence::parse(text, alphabet)?)))
    }
}

impl Query for FoQuery {
    fn kind(&self) -> &'static str {
        "fo"
    }

    fn alphabet(&self) -> &Arc<Alphabet> {
        &self.0.alphabet
    }

    fn measure(&self, cfg: &EngineConfig) -> Result<MeasureResult> {
        fo_local_measure(&self.0, cfg)
    }

    fn positive(&self, cfg: &EngineConfig) -> Result<Positivity> {
        Ok(match fo_positive(&self.0, cfg)? {
            None => Positivity::Zero,
            Some(tree) => Positivity::Positive(Witness {
                tree,
                certificate: None,
            }),
        })
    }

    /// Plain evaluation of the sentence on the finite tree.
    fn count(&self, height: u32, budget: &Budget) -> Result<Count> {
        counted(|t| self.0.holds(t), height, &self.0.alphabet, budget)
    }

    /// Samples the reduced sentence, which is only meaningful at or above
    /// its determining depth.
    fn estimate(&self, depth: Option<u32>, plan: &Sampling, cfg: &EngineConfig) -> Result<Estimate> {
        let reduced = fo_reduce(&self.0, &cfg.budget)?;
        let least = reduced.determining_depth(DepthMode::Minimal);
        let depth = depth.unwrap_or(reduced.determining_depth(cfg.mode));
        if depth < least {
            return Err(Error::precondition(format!(
                "depth {depth} is below the determining depth {least}"
            )));
        }
        estimate_event(
            |t| reduced.holds(t).expect("depth checked above"),
            &self.0.alphabet,
            depth,
            plan,
        )
    }
}

struct PathPipeline;
struct PathQuery(PathLangSpec);

impl Pipeline for PathPipeline {
    fn kind(&self) -> &'static str {
        "path"
    }

    fn load(&self, text: &str, alphabet: Option<Arc<Alphabet>>) -> Result<Box<dyn Query>> {
        let spec = PathLangSpec::parse(text)?;
        if alphabet.is_some_and(|a| a != *spec.alphabet()) {
            return Err(Error::precondition("alphabet differs from the one in the input"));
        }
        Ok(Box::new(PathQuery(spec)))
    }
}

impl Query for PathQuery {
    fn kind(&self) -> &'static str {
        "path"
    }

    fn alphabet(&self) -> &Arc<Alphabet> {
        self.0.alphabet()
    }

    fn measure(&self, _cfg: &EngineConfig) -> Result<MeasureResult> {
        Ok(MeasureResult::exact("path", path_language_measure(&self.0), None)
            .note(format!("allowed ratio {}", self.0.ratio())))
    }

    /// Trees with an allowed path through all `height + 1` levels.
    fn count(&self, height: u32, budget: &Budget) -> Result<Count> {
        let allowed = allowed_mask(&self.0);
        counted(|t| has_full_path(&allowed, t), height, self.0.alphabet(), budget)
    }

    /// `depth` is the path length `i`; trees of height `i - 1` are sampled.
    fn estimate(&self, depth: Option<u32>, plan: &Sampling, _cfg: &EngineConfig) -> Result<Estimate> {
        let i = depth.ok_or_else(|| Error::precondition("path estimates need an explicit length"))?;
        estimate_path_truncation(&self.0, i, plan)
    }
}

struct SubtreePipeline;
struct SubtreeQuery(FiniteTree);

impl Pipeline for SubtreePipeline {
    fn kind(&self) -> &'static str {
        "subtree"
    }

    fn load(&self, text: &str, alphabet: Option<Arc<Alphabet>>) -> Result<Box<dyn Query>> {
        Ok(Box::new(SubtreeQuery(FiniteTree::parse(text, alphabet)?)))
    }
}

impl Query for SubtreeQuery {
    fn kind(&self) -> &'static str {
        "subtree"
    }

    fn alphabet(&self) -> &Arc<Alphabet> {
        self.0.alphabet()
    }

    /// The basic set: `t` at the root.
    fn measure(&self, _cfg: &EngineConfig) -> Result<MeasureResult> {
        Ok(
            MeasureResult::exact("basic-set", basic_set_measure(&self.0), self.0.height())
                .note(format!("{} nodes", self.0.size())),
        )
    }

    /// Trees containing `t` somewhere inside the finite tree.
    fn count(&self, height: u32, budget: &Budget) -> Result<Count> {
        let h = self.0.height().unwrap_or(0);
        let t = &self.0;
        counted(
            |s| h <= height && Position::up_to_depth(height - h).any(|u| s.contains_subtree_at(t, u)),
            height,
            t.alphabet(),
            budget,
        )
    }

    fn estimate(&self, depth: Option<u32>, plan: &Sampling, _cfg: &EngineConfig) -> Result<Estimate> {
        let depth = depth.unwrap_or(self.0.height().unwrap_or(0));
        estimate_subtree_occurrence(&self.0, depth, plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::Rational;

    const ROOT_A: &str = "alphabet a b\nvertex x label=a root\n";

    fn load(kind: &str, text: &str) -> Box<dyn Query> {
        Registry::with_builtins().load(kind, text, None).unwrap()
    }

    #[test]
    fn builtin_kinds() {
        assert_eq!(Registry::with_builtins().kinds(), ["cq", "bccq", "fo", "path", "subtree"]);
        assert!(matches!(
            Registry::with_builtins().load("mso", "", None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cq_through_the_registry() {
        let q = load("cq", ROOT_A);
        let cfg = EngineConfig::default();
        assert_eq!(q.measure(&cfg).unwrap().value, Rational::new(1.into(), 2.into()));
        let c = q.count(1, &cfg.budget).unwrap();
        assert_eq!((c.satisfying, c.total), (4u32.into(), 8u32.into()));
        match q.positive(&cfg).unwrap() {
            Positivity::Positive(w) => assert_eq!(w.tree.height(), 0),
            Positivity::Zero => panic!("root-a pattern has positive measure"),
        }
        let e = q.estimate(Some(3), &Sampling::new(10_000, 7), &cfg).unwrap();
        assert!(e.contains(0.5));
    }

    #[test]
    fn tautological_combo_counts_everything() {
        let q = load("bccq", "alphabet a b c\npattern p\nvertex x root\nexpr p | !p\n");
        let c = q.count(0, &Budget::default()).unwrap();
        assert_eq!((c.satisfying, c.total), (3u32.into(), 3u32.into()));
    }

    #[test]
    fn path_and_subtree() {
        let cfg = EngineConfig::default();
        let q = load("path", "alphabet a b c\nsubset a b\n");
        assert_eq!(q.measure(&cfg).unwrap().value, Rational::new(1.into(), 2.into()));
        assert!(matches!(q.positive(&cfg), Err(Error::Unsupported { .. })));
        // height 0: the root alone is the path
        let c = q.count(0, &cfg.budget).unwrap();
        assert_eq!((c.satisfying, c.total), (2u32.into(), 3u32.into()));
        let s = load("subtree", "alphabet a b\nnode e a\nnode L b\n");
        assert_eq!(s.measure(&cfg).unwrap().value, Rational::new(1.into(), 4.into()));
        assert_eq!(s.count(1, &cfg.budget).unwrap().satisfying, 2u32.into());
    }

    #[test]
    fn later_registration_wins() {
        struct Dummy;
        impl Pipeline for Dummy {
            fn kind(&self) -> &'static str {
                "cq"
            }
            fn load(&self, _: &str, _: Option<Arc<Alphabet>>) -> Result<Box<dyn Query>> {
                Err(Error::precondition("dummy"))
            }
        }
        let mut r = Registry::with_builtins();
        r.register(Box::new(Dummy));
        assert_eq!(r.kinds().len(), 5);
        assert_eq!(r.load("cq", ROOT_A, None).err(), Some(Error::precondition("dummy")));
    }
}
