//! Exact uniform measures of tree languages defined by conjunctive queries,
//! Boolean combinations of them, and first-order sentences in Gaifman normal
//! form.

pub mod analytic;
pub mod boolexpr;
pub mod config;
pub mod error;
pub mod estimator;
pub mod logic;
pub mod measure;
pub mod pattern;
pub mod registry;
pub mod render;
pub mod trees;

pub use config::{Budget, DepthMode, EngineConfig};
pub use error::{Error, Result};
pub use trees::{Alphabet, CompleteTree, FiniteTree, Position, Rational, Symbol};
