use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use egsolve::io::{
    generate, parse_arena, parse_solution, write_arena, write_solution, Family, GenSpec,
    SolutionDocument,
};
use egsolve::oracle::{min_credit_attractor, verify_strategy, OracleError};
use egsolve::{
    choose_chunk_size, extract_strategy, first_violation, solve, winning_sets, GameArena, Mapping,
    Owner, ParallelConfig, SolveError, SolveOptions, Variant,
};

mod bench;

const EXIT_INPUT: u8 = 1;
const EXIT_TIMEOUT: u8 = 2;
const EXIT_REFUTED: u8 = 3;
const EXIT_TOO_LARGE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "egsolve",
    version,
    about = "Minimum initial credit solvers for energy games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an arena and write its least progress measure.
    Solve(SolveArgs),
    /// Check a claimed solution against an arena.
    Verify(VerifyArgs),
    /// Generate a random arena.
    Gen(GenArgs),
    /// Time solver configurations over a set of arenas.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Mode {
    Seq,
    Sweep,
    Frontier,
}

impl From<Mode> for Variant {
    fn from(m: Mode) -> Variant {
        match m {
            Mode::Seq => Variant::Seq,
            Mode::Sweep => Variant::Sweep,
            Mode::Frontier => Variant::Frontier,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub(crate) enum MappingKind {
    Vertex,
    Chunk,
}

/// Resolves the mapping flag; without an explicit chunk size the lane count
/// follows the arena's average out-degree.
pub(crate) fn resolve_mapping(
    kind: MappingKind,
    chunk_size: Option<u32>,
    arena: &GameArena,
) -> Mapping {
    match kind {
        MappingKind::Vertex => Mapping::PerVertex,
        MappingKind::Chunk => {
            Mapping::Chunked(chunk_size.unwrap_or_else(|| choose_chunk_size(arena)))
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Arena file.
    arena: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Seq)]
    mode: Mode,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = MappingKind::Vertex)]
    mapping: MappingKind,
    /// Lanes per vertex for the chunk mapping (power of two).
    #[arg(long)]
    chunk_size: Option<u32>,
    /// Give up after this many seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Solution file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    arena: PathBuf,
    solution: PathBuf,
    /// Also require the measure to be the least one and the strategy to win.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = -3, allow_negative_numbers = true)]
    wmin: i64,
    #[arg(long, default_value_t = 3, allow_negative_numbers = true)]
    wmax: i64,
    /// Fraction of player-0 vertices.
    #[arg(long, default_value_t = 0.5)]
    p0: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// random, cycle-chain or clique.
    #[arg(long, default_value = "random")]
    family: Family,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub(crate) fn read_arena(path: &Path) -> Result<GameArena> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_arena(&text).with_context(|| format!("{}", path.display()))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub(crate) fn timeout_duration(secs: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(secs).map_err(|_| anyhow::anyhow!("invalid timeout {secs}"))
}

fn cmd_solve(args: &SolveArgs) -> Result<u8> {
    let arena = read_arena(&args.arena)?;
    let variant = Variant::from(args.mode);
    let config = ParallelConfig::new(
        args.workers,
        resolve_mapping(args.mapping, args.chunk_size, &arena),
    );
    let mut options = SolveOptions::from_env();
    if let Some(secs) = args.timeout {
        options = options.with_timeout(timeout_duration(secs)?);
    }
    let report = match solve(&arena, variant, &config, &options) {
        Ok(r) => r,
        Err(SolveError::TimedOut) => {
            eprintln!(
                "{variant}: timed out after {}s",
                args.timeout.unwrap_or_default()
            );
            return Ok(EXIT_TIMEOUT);
        }
        Err(e) => return Err(e.into()),
    };
    let doc = SolutionDocument::from_measure(report.measure.clone(), &arena)?;
    write_output(args.out.as_deref(), &write_solution(&doc))?;

    let setup = match variant {
        Variant::Seq => String::new(),
        _ => format!(" {} x{}", report.mapping, report.workers),
    };
    eprintln!(
        "{variant}{setup}: lifts={} rounds={} w0={} w1={} time={:.6}s",
        report.lifts,
        report.rounds,
        report.w0.len(),
        report.w1.len(),
        report.wall_time.as_secs_f64()
    );
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let arena = read_arena(&args.arena)?;
    let text = fs::read_to_string(&args.solution)
        .with_context(|| format!("cannot read {}", args.solution.display()))?;
    let doc = parse_solution(&text).with_context(|| format!("{}", args.solution.display()))?;
    if doc.measure.len() != arena.num_vertices() {
        bail!(
            "solution has {} vertices but the arena has {}",
            doc.measure.len(),
            arena.num_vertices()
        );
    }

    if let Some(v) = first_violation(&doc.measure, &arena)? {
        println!("refuted: vertex {v} violates its progress condition");
        return Ok(EXIT_REFUTED);
    }
    for v in arena.vertices() {
        if let Some(t) = doc.strategy.choice(v) {
            let legal =
                arena.owner(v) == Owner::Player0 && arena.successors(v).any(|(s, _)| s == t);
            if !legal {
                println!("refuted: vertex {v} has no edge to its strategy target {t}");
                return Ok(EXIT_REFUTED);
            }
        }
    }

    if args.oracle {
        let least = match min_credit_attractor(&arena) {
            Ok(m) => m,
            Err(e @ OracleError::TooLarge { .. }) => {
                eprintln!("{e}");
                return Ok(EXIT_TOO_LARGE);
            }
            Err(e) => return Err(e.into()),
        };
        if let Some(v) = arena
            .vertices()
            .find(|&v| doc.measure.get(v) != least.get(v))
        {
            println!(
                "refuted: vertex {v} claims {} but the least measure has {}",
                doc.measure.get(v),
                least.get(v)
            );
            return Ok(EXIT_REFUTED);
        }
        let strategy = if doc.has_choices() {
            doc.strategy.clone()
        } else {
            extract_strategy(&doc.measure, &arena)?
        };
        let (w0, _) = winning_sets(&doc.measure);
        match verify_strategy(&arena, &strategy, &w0) {
            Ok(true) => {}
            Ok(false) => {
                println!("refuted: the strategy lets player 1 force a negative cycle from W0");
                return Ok(EXIT_REFUTED);
            }
            Err(OracleError::MalformedStrategy(v)) => {
                println!("refuted: strategy is malformed at vertex {v}");
                return Ok(EXIT_REFUTED);
            }
            Err(e) => return Err(e.into()),
        }
    }
    println!("valid");
    Ok(0)
}

fn cmd_gen(args: &GenArgs) -> Result<u8> {
    let spec = GenSpec {
        n: args.n,
        d: args.d,
        wmin: args.wmin,
        wmax: args.wmax,
        p0_frac: args.p0,
        seed: args.seed,
        family: args.family,
    };
    let arena = generate(&spec)?;
    write_output(args.out.as_deref(), &write_arena(&arena))?;
    Ok(0)
}

fn main() -> ExitCode {
    // Usage errors count as input errors; clap's own code 2 means timeout here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => bench::cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
