//! Exact measures by counting complete trees at a determining depth.

mod bccq;
mod cq;
mod fo;

use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::config::Budget;
use crate::error::Result;
use crate::trees::{enumeration_size, tree_count, Alphabet, CompleteTree, Rational, TreeCursor};

pub use bccq::{bccq_measure, bccq_positive, bccq_reduce, Bccq, ReducedBccq};
pub use cq::{pattern_determining_depth, pattern_measure, pattern_positive};
pub use fo::{fo_local_measure, fo_positive, fo_reduce, ReducedGnf};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureResult {
    pub value: Rational,
    /// `cq`, `bccq`, `fo-local`, `path` or `basic-set`.
    pub pipeline: &'static str,
    pub determining_depth: Option<u32>,
    pub satisfying_count: Option<BigUint>,
    pub total_count: Option<BigUint>,
    pub notes: Vec<String>,
}

impl MeasureResult {
    pub fn exact(pipeline: &'static str, value: Rational, depth: Option<u32>) -> Self {
        MeasureResult {
            value,
            pipeline,
            determining_depth: depth,
            satisfying_count: None,
            total_count: None,
            notes: Vec::new(),
        }
    }

    pub fn counted(pipeline: &'static str, depth: u32, satisfying: BigUint, alphabet_size: usize) -> Self {
        let total = tree_count(depth, alphabet_size);
        MeasureResult {
            value: Rational::new(satisfying.clone().into(), total.clone().into()),
            pipeline,
            determining_depth: Some(depth),
            satisfying_count: Some(satisfying),
            total_count: Some(total),
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }
}

/// Number of slices the enumeration is cut into for parallel counting.
const SLICES: u64 = 256;

/// Counts the complete trees of `height` satisfying `pred`. The enumeration
/// is split into fixed counter ranges, so the result does not depend on how
/// rayon schedules them.
pub fn count_models<F>(pred: F, height: u32, alphabet: &Arc<Alphabet>, budget: &Budget) -> Result<BigUint>
where
    F: Fn(&CompleteTree) -> bool + Sync,
{
    let total = enumeration_size(height, alphabet.len(), budget)?;
    let slices = total.min(SLICES);
    let count: u64 = (0..slices)
        .into_par_iter()
        .map(|i| {
            let start = slice_start(total, slices, i);
            let end = slice_start(total, slices, i + 1);
            let mut cursor = TreeCursor::new(alphabet.clone(), height, start);
            let mut hits = 0u64;
            for _ in start..end {
                if pred(cursor.tree()) {
                    hits += 1;
                }
                cursor.advance();
            }
            hits
        })
        .sum();
    Ok(BigUint::from(count))
}

fn slice_start(total: u64, slices: u64, i: u64) -> u64 {
    (u128::from(total) * u128::from(i) / u128::from(slices)) as u64
}

/// The first complete tree of `height`, in counter order, satisfying `pred`.
pub fn first_model<F>(pred: F, height: u32, alphabet: &Arc<Alphabet>, budget: &Budget) -> Result<Option<CompleteTree>>
where
    F: Fn(&CompleteTree) -> bool + Sync,
{
    let total = enumeration_size(height, alphabet.len(), budget)?;
    let slices = total.min(SLICES);
    Ok((0..slices).into_par_iter().find_map_first(|i| {
        let start = slice_start(total, slices, i);
        let end = slice_start(total, slices, i + 1);
        let mut cursor = TreeCursor::new(alphabet.clone(), height, start);
        for _ in start..end {
            if pred(cursor.tree()) {
                return Some(cursor.tree().clone());
            }
            cursor.advance();
        }
        None
    }))
}
