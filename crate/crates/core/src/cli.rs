//! The `monocat` command line.
//!
//! Exit codes: 0 success or `Equal`, 10 `Unknown`, 1 a suite check failed,
//! 2 usage, parse or input errors.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::functor::{FunctorError, FunctorSpec};
use crate::interchange::canonical;
use crate::scalar::{Field, FieldError, Scalar, ScalarVisitor};
use crate::search::{enum_hom, equal, explore, Equality, SearchCaps, SearchError};
use crate::suite::{run_all, ConfigError, SuiteConfig};
use crate::syntax::{parse_expr, ParseError};
use crate::term::{Mode, Term};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 10;

/// Overrides the default state budget of every search.
pub const MAX_STATES_ENV: &str = "MONOCAT_MAX_STATES";

#[derive(Debug, Parser)]
#[command(
    name = "monocat",
    version,
    about = "Rewrite, compare and evaluate cup/cap terms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an expression and print it back.
    Parse {
        expr: String,
        #[arg(long)]
        json: bool,
    },
    /// Print the interchange normal form.
    Normalize {
        expr: String,
        #[arg(long)]
        json: bool,
    },
    /// Search for a rewrite path between two terms.
    Eq {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "C")]
        mode: ModeArg,
        #[command(flatten)]
        caps: CapsArgs,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a term as a matrix.
    Eval {
        expr: String,
        /// Dimension of the vector space; read from the file with `--phi file:PATH`.
        #[arg(long)]
        dim: Option<usize>,
        /// identity, random:SEED or file:PATH
        #[arg(long, default_value = "identity")]
        phi: PhiChoice,
        /// q or p:PRIME
        #[arg(long, default_value = "q")]
        field: Field,
        #[arg(long)]
        json: bool,
    },
    /// Breadth-first exploration of the bounded class of a term.
    Explore {
        expr: String,
        #[arg(long, value_enum, default_value = "C")]
        mode: ModeArg,
        #[command(flatten)]
        caps: CapsArgs,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate the classes of morphisms `source -> target` within caps.
    Homset {
        source: usize,
        target: usize,
        #[arg(long, value_enum, default_value = "C")]
        mode: ModeArg,
        #[command(flatten)]
        caps: CapsArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run the full battery of checks.
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Report every timing as 0 so that output is byte-stable.
        #[arg(long)]
        no_timings: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "D", alias = "d")]
    D,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::C => Mode::C,
            ModeArg::D => Mode::D,
        }
    }
}

#[derive(Debug, Clone, Copy, Args)]
struct CapsArgs {
    #[arg(long)]
    max_gens: Option<usize>,
    #[arg(long)]
    max_width: Option<usize>,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    max_states: Option<usize>,
}

impl CapsArgs {
    fn resolve(self, defaults: SearchCaps) -> Result<SearchCaps, CliError> {
        let mut caps = defaults;
        if let Some(states) = env_max_states()? {
            caps.max_states = states;
        }
        caps.max_gen_count = self.max_gens.unwrap_or(caps.max_gen_count);
        caps.max_width = self.max_width.unwrap_or(caps.max_width);
        caps.max_index_n = self.max_n.unwrap_or(caps.max_index_n);
        caps.max_states = self.max_states.unwrap_or(caps.max_states);
        caps.validate()?;
        Ok(caps)
    }
}

fn env_max_states() -> Result<Option<usize>, CliError> {
    match std::env::var(MAX_STATES_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| CliError::Env(v)),
        Err(_) => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum PhiChoice {
    Identity,
    Random(u64),
    File(PathBuf),
}

impl FromStr for PhiChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "identity" {
            return Ok(PhiChoice::Identity);
        }
        if let Some(seed) = s.strip_prefix("random:") {
            return seed
                .parse()
                .map(PhiChoice::Random)
                .map_err(|_| format!("bad seed {seed:?}"));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(PhiChoice::File(path.into()));
        }
        Err(format!(
            "expected identity, random:SEED or file:PATH, found {s:?}"
        ))
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot parse {input:?}: {source}")]
    Parse { input: String, source: ParseError },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    ConfigFormat {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{MAX_STATES_ENV}={0:?} is not a number")]
    Env(String),
    #[error("--dim {given} does not match the {file}-dimensional form in the file")]
    DimMismatch { given: usize, file: usize },
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn parse(input: &str) -> Result<Term, CliError> {
    parse_expr(input).map_err(|source| CliError::Parse {
        input: input.to_string(),
        source,
    })
}

fn emit<T: serde::Serialize>(out: &mut dyn Write, value: &T) {
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(value).expect("json value")
    );
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Parse { expr, json } => {
            let t = parse(&expr)?;
            if json {
                emit(out, &term_json(&t));
            } else {
                let _ = writeln!(out, "{t}");
                let _ = writeln!(
                    out,
                    "{} -> {}, {} generators",
                    t.source(),
                    t.target(),
                    t.gen_count()
                );
            }
            Ok(EXIT_OK)
        }
        Command::Normalize { expr, json } => {
            let t = parse(&expr)?;
            let c = canonical(&t);
            if json {
                emit(out, &json!({ "input": t, "canonical": term_json(&c) }));
            } else {
                let _ = writeln!(out, "{c}");
            }
            Ok(EXIT_OK)
        }
        Command::Eq {
            a,
            b,
            mode,
            caps,
            json,
        } => {
            let (a, b) = (parse(&a)?, parse(&b)?);
            let caps = caps.resolve(SearchCaps::default())?;
            let mode = Mode::from(mode);
            let result = equal(&a, &b, mode, &caps)?;
            if json {
                emit(
                    out,
                    &json!({ "a": a, "b": b, "mode": mode, "caps": caps, "result": result }),
                );
            } else {
                match &result {
                    Equality::Equal(path) => {
                        let noun = if path.len() == 1 { "step" } else { "steps" };
                        let _ = writeln!(out, "Equal ({} {noun})", path.len());
                        let _ = writeln!(out, "  {}", path.start);
                        for s in &path.steps {
                            let _ = writeln!(out, "  {}", s.step);
                            let _ = writeln!(out, "  = {}", s.result);
                        }
                    }
                    Equality::Unknown {
                        states_visited,
                        truncated,
                    } => {
                        let _ = writeln!(out, "Unknown ({states_visited} states visited)");
                        if *truncated {
                            let _ = writeln!(err, "state budget exhausted");
                        }
                    }
                }
            }
            Ok(if result.is_equal() {
                EXIT_OK
            } else {
                EXIT_UNKNOWN
            })
        }
        Command::Eval {
            expr,
            dim,
            phi,
            field,
            json,
        } => {
            let t = parse(&expr)?;
            let (rows, cols, entries, text) = field.visit(EvalVisitor {
                term: &t,
                dim,
                phi: &phi,
            })??;
            if json {
                emit(
                    out,
                    &json!({
                        "term": t,
                        "field": field,
                        "rows": rows,
                        "cols": cols,
                        "entries": entries,
                    }),
                );
            } else {
                let _ = writeln!(out, "{text}");
            }
            Ok(EXIT_OK)
        }
        Command::Explore {
            expr,
            mode,
            caps,
            json,
        } => {
            let t = parse(&expr)?;
            let caps = caps.resolve(SearchCaps::default())?;
            let report = explore(&t, mode.into(), &caps);
            if json {
                emit(out, &report);
            } else {
                let _ = writeln!(out, "start            {}", report.start);
                let _ = writeln!(out, "states visited   {}", report.states_visited);
                let _ = writeln!(out, "levels           {}", report.levels);
                let _ = writeln!(out, "min generators   {}", report.min_gen_count_seen);
                let _ = writeln!(out, "identity found   {}", report.identity_found);
                let _ = writeln!(out, "truncated        {}", report.truncated);
                if let Some(w) = &report.witness {
                    for s in &w.steps {
                        let _ = writeln!(out, "  {}", s.step);
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Homset {
            source,
            target,
            mode,
            caps,
            json,
        } => {
            let caps = caps.resolve(SuiteConfig::default().hom_caps)?;
            let hom = enum_hom(source, target, mode.into(), &caps);
            if json {
                emit(out, &hom);
            } else {
                let _ = writeln!(
                    out,
                    "{} classes from {} terms{}",
                    hom.len(),
                    hom.terms_generated,
                    if hom.truncated {
                        " (some searches truncated)"
                    } else {
                        ""
                    }
                );
                for c in &hom.classes {
                    let _ = writeln!(out, "  {}", c.representative);
                }
                if !hom.unresolved.is_empty() {
                    let _ = writeln!(err, "{} pairs not separated", hom.unresolved.len());
                }
            }
            Ok(EXIT_OK)
        }
        Command::Suite {
            config,
            json,
            no_timings,
        } => {
            let cfg = match &config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    serde_json::from_str(&text).map_err(|source| CliError::ConfigFormat {
                        path: path.clone(),
                        source,
                    })?
                }
                None => {
                    let mut cfg = SuiteConfig::default();
                    if let Some(states) = env_max_states()? {
                        cfg.caps.max_states = states;
                    }
                    cfg
                }
            };
            let mut report = run_all(&cfg)?;
            if no_timings {
                report.zero_timings();
            }
            if json {
                emit(out, &report);
            } else {
                for c in &report.checks {
                    let _ = writeln!(out, "{:<24}{:?} ({} ms)", c.name, c.status, c.timing_ms);
                }
            }
            Ok(if report.failed() { EXIT_FAIL } else { EXIT_OK })
        }
    }
}

fn term_json(t: &Term) -> Value {
    json!({
        "term": t,
        "source": t.source(),
        "target": t.target(),
        "gen_count": t.gen_count(),
    })
}

struct EvalVisitor<'a> {
    term: &'a Term,
    dim: Option<usize>,
    phi: &'a PhiChoice,
}

type EvalOutput = (usize, usize, Vec<Vec<String>>, String);

impl ScalarVisitor for EvalVisitor<'_> {
    type Output = Result<EvalOutput, CliError>;

    fn visit<S: Scalar>(self) -> Self::Output {
        let spec = match self.phi {
            PhiChoice::Identity => FunctorSpec::<S>::identity(self.dim.unwrap_or(2)),
            PhiChoice::Random(seed) => FunctorSpec::<S>::random(self.dim.unwrap_or(2), *seed),
            PhiChoice::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                let spec = FunctorSpec::<S>::from_phi_text(&text)?;
                match self.dim {
                    Some(given) if given != spec.dim() => {
                        return Err(CliError::DimMismatch {
                            given,
                            file: spec.dim(),
                        })
                    }
                    _ => spec,
                }
            }
        };
        let m = spec.eval_term(self.term)?;
        Ok((m.rows(), m.cols(), m.to_strings(), m.to_string()))
    }
}
