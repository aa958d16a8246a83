//! Command-line front end. [`run`] parses arguments, dispatches to the
//! library and maps failures to exit codes: 2 for usage errors, 3 for domain
//! errors (bad input files, no fully robust matching), 4 for I/O errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use robust_stable::bouquet::Round;
use robust_stable::oracle::enumerate_stable_bounded;
use robust_stable::rotations::parse_poset_text;
use robust_stable::{
    build_robust, build_rotation_poset, deferred_acceptance, edges_for_error, generate, max_weight_robust,
    minimize_edges, shrink, EdgeSet, ErrorSpec, GeneratorConfig, GeneratorMode, Instance, Side, WeightFunction,
};
use thiserror::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const NO_ROBUST: &str = "NO FULLY ROBUST MATCHING";

#[derive(Debug, Parser)]
#[command(name = "robust-stable", version, about = "Stable matchings robust to preference errors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run deferred acceptance and print the proposing side's optimal matching.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "boys")]
        side: Side,
    },
    /// Print the rotation poset.
    Poset {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Print every stable matching by exhaustive search.
    Enumerate {
        #[arg(long)]
        instance: PathBuf,
        /// Largest n accepted.
        #[arg(long, default_value_t = robust_stable::oracle::DEFAULT_BOUND)]
        bound: usize,
    },
    /// Add edges to a poset and print the contracted poset.
    Compress {
        /// A file written by `poset`.
        #[arg(long)]
        poset: PathBuf,
        /// One `u v` edge per line.
        #[arg(long)]
        edges: PathBuf,
        /// Drop redundant edges first.
        #[arg(long)]
        minimize: bool,
        #[arg(long)]
        trace: bool,
    },
    /// Print the bouquet for one error.
    Bouquet {
        #[arg(long)]
        instance: PathBuf,
        /// A file holding exactly one error line.
        #[arg(long)]
        error: PathBuf,
        #[arg(long)]
        trace: bool,
    },
    /// Print a fully robust matching for a set of errors.
    Robust {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        errors: PathBuf,
        /// Pick the matching of largest total weight.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// With `--weights`, pick the smallest total weight instead.
        #[arg(long, requires = "weights")]
        minimize: bool,
        #[arg(long)]
        trace: bool,
    },
    /// Print a generated instance.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "uniform")]
        mode: GeneratorMode,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    NoRobust(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Domain(_) | CliError::NoRobust(_) => EXIT_DOMAIN,
        }
    }
}

fn domain(context: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Domain(format!("{}: {e}", context.display()))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    Instance::parse(&read(path)?).map_err(|e| domain(path, e))
}

/// Runs the command line `args` (program name first). Normal output goes to
/// `out`, diagnostics and traces to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
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
                0
            };
        }
    };
    let mut trace = String::new();
    let result = dispatch(cli.command, &mut trace);
    let _ = err.write_all(trace.as_bytes());
    match result {
        Ok(text) => match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: writing output: {e}");
                EXIT_IO
            }
        },
        Err(CliError::NoRobust(text)) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_DOMAIN
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn dispatch(command: Command, trace: &mut String) -> Result<String, CliError> {
    match command {
        Command::Solve { instance, side } => {
            let inst = read_instance(&instance)?;
            Ok(format!("{}\n", deferred_acceptance(&inst, side)))
        }
        Command::Poset { instance } => {
            let inst = read_instance(&instance)?;
            Ok(build_rotation_poset(&inst).to_text())
        }
        Command::Enumerate { instance, bound } => {
            let inst = read_instance(&instance)?;
            let snap = enumerate_stable_bounded(&inst, bound).map_err(|e| domain(&instance, e))?;
            Ok(snap.matchings().iter().map(|m| format!("{m}\n")).collect())
        }
        Command::Compress {
            poset,
            edges,
            minimize,
            trace: want_trace,
        } => compress(&poset, &edges, minimize, want_trace.then_some(trace)),
        Command::Bouquet {
            instance,
            error,
            trace: want_trace,
        } => bouquet(&instance, &error, want_trace.then_some(trace)),
        Command::Robust {
            instance,
            errors,
            weights,
            minimize,
            trace: want_trace,
        } => robust(&instance, &errors, weights.as_deref(), minimize, want_trace.then_some(trace)),
        Command::Gen { n, seed, mode } => {
            let cfg = GeneratorConfig { n: n as usize, seed, mode };
            Ok(generate(&cfg).to_text())
        }
    }
}

fn compress(poset: &Path, edges: &Path, minimize: bool, trace: Option<&mut String>) -> Result<String, CliError> {
    let order = parse_poset_text(&read(poset)?).map_err(|e| domain(poset, e))?;
    let mut set = EdgeSet::parse(&read(edges)?).map_err(|e| domain(edges, e))?;
    if let Some((u, v)) = set.iter().find(|&(u, v)| u >= order.len() || v >= order.len()) {
        return Err(domain(edges, format!("edge {u} {v} names an element outside 0..{}", order.len())));
    }
    if minimize {
        let small = minimize_edges(&order, &set);
        if let Some(t) = trace {
            let _ = writeln!(t, "minimize: kept {} of {} edges", small.len(), set.len());
            for (u, v) in small.iter() {
                let _ = writeln!(t, "  {u} {v}");
            }
        }
        set = small;
    }
    Ok(shrink(&order, &set).to_text())
}

fn parse_one_error(path: &Path, n: usize) -> Result<ErrorSpec, CliError> {
    let mut specs = ErrorSpec::parse_file(&read(path)?, n).map_err(|e| domain(path, e))?;
    if specs.len() != 1 {
        return Err(domain(path, format!("expected exactly one error, found {}", specs.len())));
    }
    Ok(specs.remove(0))
}

fn set_text(bits: &robust_stable::FixedBitSet) -> String {
    let v: Vec<String> = bits.ones().map(|e| e.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

fn list_text(v: &[usize]) -> String {
    let v: Vec<String> = v.iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

fn trace_rounds(t: &mut String, rounds: &[Round]) {
    for (i, r) in rounds.iter().enumerate() {
        let _ = writeln!(t, "round {}", i + 1);
        let _ = writeln!(t, "  S = {}", set_text(&r.splitting));
        let _ = writeln!(t, "  V = {}", list_text(&r.tail_candidates));
        let _ = writeln!(t, "  tail = {}{}", r.tail, if r.sink_tail { " (sink)" } else { "" });
        let _ = writeln!(t, "  X = {}", list_text(&r.x));
        let _ = writeln!(t, "  Y = {}", set_text(&r.y));
        let _ = writeln!(t, "  heads = {}{}", list_text(&r.heads), if r.shortcut { " (X empty)" } else { "" });
    }
}

fn bouquet(instance: &Path, error: &Path, mut trace: Option<&mut String>) -> Result<String, CliError> {
    let inst = read_instance(instance)?;
    let spec = parse_one_error(error, inst.n())?;
    robust_stable::apply_error(&inst, &spec).map_err(|e| domain(error, e))?;
    let poset = build_rotation_poset(&inst);
    let found = edges_for_error(&poset, &inst, &spec).map_err(|e| domain(error, e))?;
    let Some(run) = found.run else {
        if let Some(t) = trace.as_deref_mut() {
            let _ = writeln!(t, "error leaves the instance unchanged");
        }
        return Ok(String::new());
    };
    if let Some(t) = trace {
        let _ = writeln!(t, "error: {spec}");
        let _ = writeln!(t, "orientation: {:?}", run.bouquet.orientation);
        trace_rounds(t, &run.rounds);
        let _ = writeln!(t, "oracle: {} probes, {} evaluated", run.stats.queries, run.stats.evaluations);
    }
    Ok(run.bouquet.to_text())
}

fn robust(
    instance: &Path,
    errors: &Path,
    weights: Option<&Path>,
    minimize: bool,
    mut trace: Option<&mut String>,
) -> Result<String, CliError> {
    let inst = read_instance(instance)?;
    let specs = ErrorSpec::parse_file(&read(errors)?, inst.n()).map_err(|e| domain(errors, e))?;
    let weights = match weights {
        Some(p) => Some(WeightFunction::parse(&read(p)?, inst.n()).map_err(|e| domain(p, e))?),
        None => None,
    };
    let poset = build_rotation_poset(&inst);
    let result = build_robust(&poset, &inst, &specs).map_err(|e| domain(errors, e))?;
    if let Some(t) = trace.as_deref_mut() {
        let _ = writeln!(t, "rotations: {}", poset.rotations().len());
        let _ = writeln!(t, "errors: {} read, {} distinct and effective", specs.len(), result.per_error.len());
        for (i, pe) in result.per_error.iter().enumerate() {
            let edges: Vec<String> = pe.edges.iter().map(|(u, v)| format!("({u},{v})")).collect();
            let _ = writeln!(t, "error {}: {} -> edges {}", i + 1, pe.spec, edges.join(" "));
        }
        let _ = writeln!(t, "union: {} edges, {} blocks", result.edges.len(), result.meta.blocks().len());
    }
    if !result.exists {
        return Err(CliError::NoRobust(format!("{NO_ROBUST}\n")));
    }
    match weights {
        None => Ok(format!("{}\n", result.witness.expect("witness exists"))),
        Some(w) => {
            let objective = if minimize { w.negated() } else { w.clone() };
            let (m, _) = max_weight_robust(&result, &poset, &objective).expect("robust set is non-empty");
            if let Some(t) = trace {
                let _ = writeln!(t, "objective: {}", if minimize { "minimum" } else { "maximum" });
            }
            Ok(format!("{m}\nweight {}\n", w.weight_of(&m)))
        }
    }
}
