//! Seeded Monte-Carlo estimates with Hoeffding intervals.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::PathLangSpec;
use crate::error::{Error, Result};
use crate::trees::{resample, Alphabet, CompleteTree, FiniteTree, Position, Symbol};

pub const DEFAULT_MAX_SAMPLE_DEPTH: u32 = 12;
pub const MIN_SAMPLES: u64 = 100;
/// Two-sided error probability of the reported interval.
pub const ALPHA: f64 = 0.01;

/// Samples per generator stream.
const BATCH: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub samples: u64,
    pub seed: u64,
    pub max_depth: u32,
}

impl Sampling {
    pub fn new(samples: u64, seed: u64) -> Self {
        Sampling {
            samples,
            seed,
            max_depth: DEFAULT_MAX_SAMPLE_DEPTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub hits: u64,
    pub samples: u64,
    pub seed: u64,
    pub depth: u32,
}

impl Estimate {
    fn from_hits(hits: u64, samples: u64, seed: u64, depth: u32) -> Self {
        let point = hits as f64 / samples as f64;
        let eps = hoeffding_epsilon(samples);
        Estimate {
            point,
            ci_low: (point - eps).max(0.0),
            ci_high: (point + eps).min(1.0),
            hits,
            samples,
            seed,
            depth,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}

/// Half-width `sqrt(ln(2/α) / 2n)`.
pub fn hoeffding_epsilon(samples: u64) -> f64 {
    ((2.0 / ALPHA).ln() / (2.0 * samples as f64)).sqrt()
}

/// Frequency of `pred` over independent uniform trees of height `depth`.
/// Batch `b` draws from stream `b` of a ChaCha8 generator keyed by the seed,
/// so the result does not depend on thread scheduling.
pub fn estimate_event<F>(pred: F, alphabet: &Arc<Alphabet>, depth: u32, plan: &Sampling) -> Result<Estimate>
where
    F: Fn(&CompleteTree) -> bool + Sync,
{
    if plan.samples < MIN_SAMPLES {
        return Err(Error::precondition(format!(
            "at least {MIN_SAMPLES} samples are required, got {}",
            plan.samples
        )));
    }
    if depth > plan.max_depth {
        return Err(Error::Budget {
            what: "sampling depth",
            needed: depth.to_string(),
            cap: u64::from(plan.max_depth),
        });
    }
    let batches = plan.samples.div_ceil(BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            rng.set_stream(b);
            let n = BATCH.min(plan.samples - b * BATCH);
            let mut t = CompleteTree::uniform(alphabet.clone(), depth, Symbol(0));
            let mut hits = 0;
            for _ in 0..n {
                resample(&mut rng, &mut t);
                if pred(&t) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(Estimate::from_hits(hits, plan.samples, plan.seed, depth))
}

/// Frequency of trees of height `depth` containing `t` at some position,
/// with all of `t` inside the sampled prefix.
pub fn estimate_subtree_occurrence(t: &FiniteTree, depth: u32, plan: &Sampling) -> Result<Estimate> {
    let Some(h) = t.height() else {
        // the empty tree occurs everywhere
        return estimate_event(|_| true, t.alphabet(), depth, plan);
    };
    if depth < h {
        return Err(Error::precondition(format!(
            "sampling depth {depth} is below the height {h} of the tree"
        )));
    }
    estimate_event(
        |s| Position::up_to_depth(depth - h).any(|u| s.contains_subtree_at(t, u)),
        t.alphabet(),
        depth,
        plan,
    )
}

/// Estimates the measure of trees with a root path of `i` nodes all labelled
/// in the allowed set, sampling trees of height `i - 1`.
pub fn estimate_path_truncation(spec: &PathLangSpec, i: u32, plan: &Sampling) -> Result<Estimate> {
    if i == 0 {
        return estimate_event(|_| true, spec.alphabet(), 0, plan);
    }
    let allowed = allowed_mask(spec);
    estimate_event(|t| has_full_path(&allowed, t), spec.alphabet(), i - 1, plan)
}

pub(crate) fn allowed_mask(spec: &PathLangSpec) -> Vec<bool> {
    spec.alphabet().symbols().map(|s| spec.allows(s)).collect()
}

/// Is there a root-to-last-level path whose labels are all allowed?
pub(crate) fn has_full_path(allowed: &[bool], t: &CompleteTree) -> bool {
    let labels = t.labels();
    let leaves_from = labels.len() / 2;
    // ok[v]: an allowed path runs from v down to the last level
    let mut ok = vec![false; labels.len()];
    for v in (0..labels.len()).rev() {
        ok[v] = allowed[labels[v].index()] && (v >= leaves_from || ok[2 * v + 1] || ok[2 * v + 2]);
    }
    ok[0]
}
