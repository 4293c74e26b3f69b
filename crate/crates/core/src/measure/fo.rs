use super::{count_models, first_model, MeasureResult};
use crate::boolexpr::BoolExpr;
use crate::config::{Budget, DepthMode, EngineConfig};
use crate::error::Result;
use crate::logic::{eval_reduced, reduce_basic_local, GnfSentence, ReducedSentence};
use crate::trees::CompleteTree;

/// A combination of basic local sentences after reduction; leaves are root
/// checks, constants are folded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedGnf {
    pub radius: u32,
    pub leaves: Vec<(String, ReducedSentence)>,
    pub expr: BoolExpr<usize>,
}

impl ReducedGnf {
    pub fn determining_depth(&self, mode: DepthMode) -> u32 {
        match mode {
            DepthMode::Paper => 2 * self.radius + 1,
            DepthMode::Minimal => self
                .expr
                .leaves()
                .into_iter()
                .map(|&i| self.leaves[i].1.determining_depth())
                .max()
                .unwrap_or(0),
        }
    }

    /// Truth on a tree of at least the minimal determining depth.
    pub fn holds(&self, t: &CompleteTree) -> Result<bool> {
        self.expr.try_eval(&mut |&i| eval_reduced(t, &self.leaves[i].1))
    }
}

pub fn fo_reduce(g: &GnfSentence, budget: &Budget) -> Result<ReducedGnf> {
    let radius = g.radius()?;
    let mut leaves = Vec::new();
    let mut slot = vec![None; g.basics.len()];
    for &&i in &g.expr.leaves() {
        if slot[i].is_some() {
            continue;
        }
        let (name, basic) = &g.basics[i];
        slot[i] = Some(match reduce_basic_local(basic, budget)? {
            ReducedSentence::Bottom => BoolExpr::Const(false),
            ReducedSentence::Top => BoolExpr::Const(true),
            rc => {
                leaves.push((name.clone(), rc));
                BoolExpr::Leaf(leaves.len() - 1)
            }
        });
    }
    let expr = g
        .expr
        .map_leaves(&mut |&i| slot[i].clone().expect("every leaf was reduced"))
        .simplify();
    Ok(ReducedGnf { radius, leaves, expr })
}

pub fn fo_local_measure(g: &GnfSentence, cfg: &EngineConfig) -> Result<MeasureResult> {
    let reduced = fo_reduce(g, &cfg.budget)?;
    let depth = reduced.determining_depth(cfg.mode);
    let hits = count_models(
        |t| reduced.holds(t).expect("trees have the determining depth"),
        depth,
        &g.alphabet,
        &cfg.budget,
    )?;
    let shown = reduced.expr.map_leaves(&mut |&i| BoolExpr::Leaf(reduced.leaves[i].0.clone()));
    Ok(MeasureResult::counted("fo-local", depth, hits, g.alphabet.len())
        .note(format!("radius {}", reduced.radius))
        .note(format!("reduced {shown}"))
        .note(format!("depth mode {}", cfg.mode.name())))
}

/// A complete tree at the determining depth on which the reduced
/// combination holds, or `None` when the measure is zero.
pub fn fo_positive(g: &GnfSentence, cfg: &EngineConfig) -> Result<Option<CompleteTree>> {
    let reduced = fo_reduce(g, &cfg.budget)?;
    let depth = reduced.determining_depth(cfg.mode);
    first_model(
        |t| reduced.holds(t).expect("trees have the determining depth"),
        depth,
        &g.alphabet,
        &cfg.budget,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::Rational;
    use num_traits::{One, Zero};

    fn gnf(blocks: &str, expr: &str) -> GnfSentence {
        GnfSentence::parse(&format!("alphabet a b\nradius 1\n{blocks}expr {expr}\n"), None).unwrap()
    }

    const BLOCKS: &str = "basic ra\nlocal x: root(x) & a(x)\nend\nbasic some_a\nlocal x: a(x)\nend\nbasic clash\nlocal x: root(x) & a(x)\nlocal y: root(y) & b(y)\nend\n";

    fn both_modes(expr: &str) -> Rational {
        let g = gnf(BLOCKS, expr);
        let minimal = fo_local_measure(&g, &EngineConfig::default()).unwrap();
        let paper = fo_local_measure(
            &g,
            &EngineConfig {
                mode: DepthMode::Paper,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        assert_eq!(paper.determining_depth, Some(3));
        assert_eq!(minimal.value, paper.value, "{expr}");
        minimal.value
    }

    #[test]
    fn worked_examples() {
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(both_modes("ra"), half);
        assert_eq!(both_modes("some_a"), Rational::one());
        assert_eq!(both_modes("!ra"), half);
        assert_eq!(both_modes("clash"), Rational::zero());
        assert_eq!(both_modes("ra | !some_a"), half);
    }

    #[test]
    fn counts_are_reported() {
        let r = fo_local_measure(&gnf(BLOCKS, "ra"), &EngineConfig::default()).unwrap();
        assert_eq!(r.determining_depth, Some(2));
        assert_eq!(r.satisfying_count, Some(64u32.into()));
        assert_eq!(r.total_count, Some(128u32.into()));
    }

    #[test]
    fn left_child_of_root_is_a_root_formula() {
        let g = gnf("basic lc\nlocal x: E y<=1@x. root(y) & sL(y,x) & a(x)\nend\n", "lc");
        assert_eq!(both_modes_for(&g), Rational::new(1.into(), 2.into()));
    }

    fn both_modes_for(g: &GnfSentence) -> Rational {
        let m = fo_local_measure(g, &EngineConfig::default()).unwrap().value;
        let p = fo_local_measure(
            g,
            &EngineConfig {
                mode: DepthMode::Paper,
                ..EngineConfig::default()
            },
        )
        .unwrap()
        .value;
        assert_eq!(m, p);
        m
    }

    #[test]
    fn positive_examples() {
        let cfg = EngineConfig::default();
        let g = gnf(BLOCKS, "ra");
        let t = fo_positive(&g, &cfg).unwrap().unwrap();
        assert!(fo_reduce(&g, &cfg.budget).unwrap().holds(&t).unwrap());
        assert!(fo_positive(&gnf(BLOCKS, "clash | (ra & !ra)"), &cfg).unwrap().is_none());
    }
}
