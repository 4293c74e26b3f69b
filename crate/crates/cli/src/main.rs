use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use treemeasure::analytic::{parse_rational, rational_root_check, solve_fixed_point, IntPolynomial};
use treemeasure::config::{DEFAULT_MAX_POSITIONS, DEFAULT_MAX_TREES};
use treemeasure::estimator::{Sampling, DEFAULT_MAX_SAMPLE_DEPTH};
use treemeasure::pattern::{firm_decomposition, Pattern};
use treemeasure::registry::{Query, Registry};
use treemeasure::render::{
    render_count, render_decomposition, render_estimate, render_measure, render_positivity, render_solve, Format,
};
use treemeasure::{Alphabet, Budget, DepthMode, EngineConfig, Error};

/// Exact uniform measures of tree languages.
#[derive(Debug, Parser)]
#[command(name = "treemeasure", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Determining depth used for counting: minimal or paper.
    #[arg(long, global = true, default_value = "minimal")]
    mode: DepthMode,

    #[arg(long, global = true, default_value = "text")]
    format: Format,

    /// Cap on the number of complete trees enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_TREES)]
    max_trees: u64,

    /// Cap on candidate positions in satisfiability searches.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_POSITIONS)]
    max_positions: u64,

    /// Alphabet, `abc` or `a,b,c`. Required for inline path languages,
    /// optional otherwise.
    #[arg(long, global = true)]
    alphabet: Option<String>,

    /// Allowed labels of an inline path language, same syntax as --alphabet.
    #[arg(long, global = true)]
    subset: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact measure of the language.
    Measure { kind: String, input: Option<PathBuf> },
    /// Decide whether the measure is positive and print a witness.
    Positive { kind: String, input: Option<PathBuf> },
    /// Firm components of a pattern.
    Decompose { input: PathBuf },
    /// Count complete trees of a given height satisfying the input.
    Count {
        kind: String,
        input: Option<PathBuf>,
        #[arg(long, visible_alias = "depth")]
        height: u32,
    },
    /// Monte-Carlo estimate with a 99% Hoeffding interval. For `path`,
    /// --depth is the path length.
    Estimate {
        kind: String,
        input: Option<PathBuf>,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_SAMPLE_DEPTH)]
        max_depth: u32,
    },
    /// Bisection for a root of an integer polynomial (coefficients highest
    /// first, comma separated) plus the rational root test.
    Solve {
        poly: String,
        #[arg(long, default_value = "0")]
        lo: String,
        #[arg(long, default_value = "1")]
        hi: String,
        #[arg(long, default_value = "1e-9")]
        tol: String,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Engine { source: Option<String>, error: Error },
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Engine { error, .. } => match error {
                Error::Parse { .. } => 2,
                Error::Budget { .. } => 3,
                Error::Precondition(_) | Error::Unsupported { .. } => 4,
            },
        }
    }

    fn in_file(path: &Path) -> impl Fn(Error) -> Failure + '_ {
        move |error| Failure::Engine {
            source: Some(path.display().to_string()),
            error,
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure::Engine { source: None, error }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Engine { source: Some(s), error } => write!(f, "{s}: {error}"),
            Failure::Engine { source: None, error } => write!(f, "{error}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn config(cli: &Cli) -> EngineConfig {
    EngineConfig {
        mode: cli.mode,
        budget: Budget {
            max_trees: cli.max_trees,
            max_positions: cli.max_positions,
        },
    }
}

fn split_compact(spec: &str) -> Vec<String> {
    if spec.contains(',') {
        spec.split(',').map(|s| s.trim().to_string()).collect()
    } else {
        spec.chars().map(String::from).collect()
    }
}

fn alphabet(cli: &Cli) -> Result<Option<Arc<Alphabet>>, Failure> {
    cli.alphabet
        .as_deref()
        .map(|a| Alphabet::from_compact(a).map(Arc::new).map_err(|e| Failure::Usage(format!("--alphabet: {e}"))))
        .transpose()
}

/// Parses the input for `kind`. A path language may come from a file or
/// from --alphabet and --subset.
fn load(cli: &Cli, registry: &Registry, kind: &str, input: Option<&Path>) -> Result<Box<dyn Query>, Failure> {
    if registry.get(kind).is_none() {
        return Err(Failure::Usage(format!(
            "unknown kind `{kind}` (expected one of {})",
            registry.kinds().join(", ")
        )));
    }
    match input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            registry.load(kind, &text, alphabet(cli)?).map_err(Failure::in_file(path))
        }
        None if kind == "path" => {
            let (Some(a), Some(s)) = (&cli.alphabet, &cli.subset) else {
                return Err(Failure::Usage(
                    "an inline path language needs --alphabet and --subset".to_string(),
                ));
            };
            let text = format!("alphabet {}\nsubset {}\n", split_compact(a).join(" "), split_compact(s).join(" "));
            Ok(registry.load(kind, &text, None)?)
        }
        None => Err(Failure::Usage(format!("`{kind}` needs an input file"))),
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let registry = Registry::with_builtins();
    let cfg = config(cli);
    let out = match &cli.command {
        Command::Measure { kind, input } => {
            let q = load(cli, &registry, kind, input.as_deref())?;
            render_measure(&q.measure(&cfg)?, cli.format)
        }
        Command::Positive { kind, input } => {
            let q = load(cli, &registry, kind, input.as_deref())?;
            render_positivity(&q.positive(&cfg)?, cli.format)
        }
        Command::Decompose { input } => {
            let text = std::fs::read_to_string(input)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", input.display())))?;
            let p = Pattern::parse(&text, alphabet(cli)?).map_err(Failure::in_file(input))?;
            render_decomposition(&firm_decomposition(&p), &p, cli.format)
        }
        Command::Count { kind, input, height } => {
            let q = load(cli, &registry, kind, input.as_deref())?;
            render_count(&q.count(*height, &cfg.budget)?, cli.format)
        }
        Command::Estimate {
            kind,
            input,
            depth,
            samples,
            seed,
            max_depth,
        } => {
            let q = load(cli, &registry, kind, input.as_deref())?;
            let plan = Sampling {
                samples: *samples,
                seed: *seed,
                max_depth: *max_depth,
            };
            render_estimate(&q.estimate(*depth, &plan, &cfg)?, cli.format)
        }
        Command::Solve { poly, lo, hi, tol } => {
            let p = IntPolynomial::parse(poly)?;
            let lo = parse_rational(lo)?;
            let hi = parse_rational(hi)?;
            let tol = parse_rational(tol)?;
            let enclosure = solve_fixed_point(&p, &lo, &hi, &tol)?;
            let roots = rational_root_check(&p)?;
            render_solve(&p, &enclosure, &roots, cli.format)
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kinds() {
        let code = |e: Error| Failure::from(e).exit_code();
        assert_eq!(code(Error::Parse { line: 1, message: String::new() }), 2);
        assert_eq!(
            code(Error::Budget {
                what: "x",
                needed: String::new(),
                cap: 1
            }),
            3
        );
        assert_eq!(code(Error::Precondition(String::new())), 4);
        assert_eq!(Failure::Usage(String::new()).exit_code(), 2);
    }

    #[test]
    fn compact_lists() {
        assert_eq!(split_compact("abc"), ["a", "b", "c"]);
        assert_eq!(split_compact("x1, y2"), ["x1", "y2"]);
    }

    #[test]
    fn flags_are_validated_by_clap() {
        assert!(Cli::try_parse_from(["treemeasure", "measure", "cq", "f", "--mode", "fast"]).is_err());
        assert!(Cli::try_parse_from(["treemeasure", "count", "cq", "f"]).is_err());
        let cli = Cli::try_parse_from(["treemeasure", "count", "cq", "f", "--depth", "2", "--format", "record"]).unwrap();
        assert_eq!(cli.format, Format::Record);
        assert!(matches!(cli.command, Command::Count { height: 2, .. }));
    }
}
