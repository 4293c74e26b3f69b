/// Default cap on the number of complete trees a single enumeration may visit.
pub const DEFAULT_MAX_TREES: u64 = 1 << 26;

/// Default cap on the number of candidate positions used by the satisfiability search.
pub const DEFAULT_MAX_POSITIONS: u64 = 1 << 22;

/// Which determining depth the counting pipelines use.
///
/// Both modes produce the same rational; `Paper` counts at the larger,
/// textbook depths and is mostly useful as a cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DepthMode {
    #[default]
    Minimal,
    Paper,
}

impl DepthMode {
    pub fn name(self) -> &'static str {
        match self {
            DepthMode::Minimal => "minimal",
            DepthMode::Paper => "paper",
        }
    }
}

impl std::str::FromStr for DepthMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "minimal" => Ok(DepthMode::Minimal),
            "paper" => Ok(DepthMode::Paper),
            other => Err(format!("unknown depth mode `{other}` (expected paper|minimal)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_trees: u64,
    pub max_positions: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_trees: DEFAULT_MAX_TREES,
            max_positions: DEFAULT_MAX_POSITIONS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EngineConfig {
    pub mode: DepthMode,
    pub budget: Budget,
}
