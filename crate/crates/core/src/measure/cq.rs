use num_traits::{One, Zero};

use super::{count_models, MeasureResult};
use crate::config::{Budget, DepthMode, EngineConfig};
use crate::error::Result;
use crate::pattern::{firm_decomposition, is_satisfiable_pattern, rooted_depth_bound, HomMatcher, Model, Pattern};
use crate::trees::Rational;

/// Counting depth for a rooted firm pattern.
pub fn pattern_determining_depth(rooted: &Pattern, mode: DepthMode) -> u32 {
    match mode {
        DepthMode::Minimal => rooted_depth_bound(rooted).expect("pattern is rooted firm"),
        DepthMode::Paper => rooted.vertex_count().saturating_sub(1) as u32,
    }
}

pub fn pattern_measure(p: &Pattern, cfg: &EngineConfig) -> Result<MeasureResult> {
    if is_satisfiable_pattern(p, &cfg.budget)?.is_none() {
        return Ok(MeasureResult::exact("cq", Rational::zero(), Some(0)).note("unsatisfiable"));
    }
    let decomposition = firm_decomposition(p);
    let Some(root) = decomposition.root_pattern(p) else {
        return Ok(MeasureResult::exact("cq", Rational::one(), Some(0)).note("satisfiable, no root component"));
    };
    let depth = pattern_determining_depth(&root, cfg.mode);
    let matcher = HomMatcher::new(&root);
    let hits = count_models(|t| matcher.matches(t), depth, p.alphabet(), &cfg.budget)?;
    let names: Vec<&str> = root.vertices().iter().map(|v| v.name.as_str()).collect();
    Ok(MeasureResult::counted("cq", depth, hits, p.alphabet().len())
        .note(format!("root component {{{}}}", names.join(", ")))
        .note(format!("depth mode {}", cfg.mode.name())))
}

/// A witness model trimmed to the depth its homomorphism uses, or `None` when
/// the measure is zero.
pub fn pattern_positive(p: &Pattern, budget: &Budget) -> Result<Option<Model>> {
    Ok(is_satisfiable_pattern(p, budget)?.map(|m| m.trimmed()))
}
