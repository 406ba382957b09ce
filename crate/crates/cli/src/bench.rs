use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;

use egsolve::{solve, GameArena, Mapping, ParallelConfig, SolveError, SolveOptions, Variant};

use crate::{read_arena, resolve_mapping, timeout_duration, MappingKind, Mode};

#[derive(Args)]
pub struct BenchArgs {
    /// Arena files, or directories whose `.eg` files are all used.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "seq,sweep,frontier"
    )]
    modes: Vec<Mode>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    workers: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "vertex")]
    mappings: Vec<MappingKind>,
    /// Lanes per vertex for the chunk mapping (default: from average degree).
    #[arg(long)]
    chunk_size: Option<u32>,
    /// Per-run budget in seconds.
    #[arg(long, default_value_t = 900.0)]
    timeout: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

/// One (instance, configuration) cell. Timed-out runs report the budget as
/// their wall time and carry no counters.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub nodes: Option<usize>,
    pub edges: Option<usize>,
    pub avg_degree: Option<f64>,
    pub variant: String,
    pub mapping: String,
    pub workers: usize,
    pub wall_time_s: Option<f64>,
    pub lifts: Option<u64>,
    pub rounds: Option<u64>,
    pub timeout: bool,
    pub error: Option<String>,
}

/// The CSV flavour prints fixed-precision numbers.
#[derive(Serialize)]
struct CsvRow<'a> {
    instance: &'a str,
    nodes: Option<usize>,
    edges: Option<usize>,
    avg_degree: Option<String>,
    variant: &'a str,
    mapping: &'a str,
    workers: usize,
    wall_time_s: Option<String>,
    lifts: Option<u64>,
    rounds: Option<u64>,
    timeout: bool,
    error: Option<&'a str>,
}

impl<'a> From<&'a BenchRow> for CsvRow<'a> {
    fn from(r: &'a BenchRow) -> Self {
        CsvRow {
            instance: &r.instance,
            nodes: r.nodes,
            edges: r.edges,
            avg_degree: r.avg_degree.map(|d| format!("{d:.2}")),
            variant: &r.variant,
            mapping: &r.mapping,
            workers: r.workers,
            wall_time_s: r.wall_time_s.map(|t| format!("{t:.3}")),
            lifts: r.lifts,
            rounds: r.rounds,
            timeout: r.timeout,
            error: r.error.as_deref(),
        }
    }
}

/// A configuration cell; `mapping` is `None` for the sequential solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Cell {
    variant: Variant,
    workers: usize,
    mapping: Option<MappingKind>,
}

fn cells(args: &BenchArgs) -> Vec<Cell> {
    let mut out = Vec::new();
    for &mode in &args.modes {
        let variant = Variant::from(mode);
        if variant == Variant::Seq {
            out.push(Cell {
                variant,
                workers: 1,
                mapping: None,
            });
            continue;
        }
        for &workers in &args.workers {
            for &kind in &args.mappings {
                out.push(Cell {
                    variant,
                    workers,
                    mapping: Some(kind),
                });
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn instances(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries =
                fs::read_dir(input).with_context(|| format!("cannot list {}", input.display()))?;
            for entry in entries {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "eg") {
                    out.push(path);
                }
            }
        } else {
            out.push(input.clone());
        }
    }
    out.sort();
    Ok(out)
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn run_cell(
    name: &str,
    arena: &GameArena,
    cell: Cell,
    chunk_size: Option<u32>,
    budget: Duration,
) -> BenchRow {
    let mapping = cell.mapping.map(|k| resolve_mapping(k, chunk_size, arena));
    let mut row = BenchRow {
        instance: name.to_string(),
        nodes: Some(arena.num_vertices()),
        edges: Some(arena.num_edges()),
        avg_degree: Some(arena.stats().avg_out_degree),
        variant: cell.variant.to_string(),
        mapping: mapping.map_or_else(|| "-".to_string(), |m| m.to_string()),
        workers: cell.workers,
        wall_time_s: None,
        lifts: None,
        rounds: None,
        timeout: false,
        error: None,
    };
    let config = ParallelConfig::new(cell.workers, mapping.unwrap_or(Mapping::PerVertex));
    let options = SolveOptions::from_env().with_timeout(budget);
    match solve(arena, cell.variant, &config, &options) {
        Ok(report) => {
            row.wall_time_s = Some(report.wall_time.as_secs_f64());
            row.lifts = Some(report.lifts);
            row.rounds = Some(report.rounds);
        }
        Err(SolveError::TimedOut) => {
            row.wall_time_s = Some(budget.as_secs_f64());
            row.timeout = true;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn input_error_row(name: &str, cell: Cell, error: &anyhow::Error) -> BenchRow {
    BenchRow {
        instance: name.to_string(),
        nodes: None,
        edges: None,
        avg_degree: None,
        variant: cell.variant.to_string(),
        mapping: cell
            .mapping
            .map_or("-", |k| match k {
                MappingKind::Vertex => "vertex",
                MappingKind::Chunk => "chunk",
            })
            .to_string(),
        workers: cell.workers,
        wall_time_s: None,
        lifts: None,
        rounds: None,
        timeout: false,
        error: Some(format!("{error:#}")),
    }
}

pub fn run_matrix(args: &BenchArgs) -> Result<Vec<BenchRow>> {
    let budget = timeout_duration(args.timeout)?;
    let cells = cells(args);
    let mut rows = Vec::new();
    for path in instances(&args.inputs)? {
        let name = instance_name(&path);
        match read_arena(&path) {
            Ok(arena) => {
                for &cell in &cells {
                    let row = run_cell(&name, &arena, cell, args.chunk_size, budget);
                    eprintln!(
                        "{name} {} {} x{}: {}",
                        row.variant,
                        row.mapping,
                        row.workers,
                        if row.timeout {
                            "timeout".to_string()
                        } else if let Some(e) = &row.error {
                            e.clone()
                        } else {
                            format!("{:.3}s", row.wall_time_s.unwrap_or_default())
                        }
                    );
                    rows.push((cell, row));
                }
            }
            Err(e) => rows.extend(cells.iter().map(|&c| (c, input_error_row(&name, c, &e)))),
        }
    }
    rows.sort_by(|(a, ra), (b, rb)| (&ra.instance, a).cmp(&(&rb.instance, b)));
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(CsvRow::from(row))?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    w.flush()?;
    Ok(())
}

const CSV_HEADER: [&str; 12] = [
    "instance",
    "nodes",
    "edges",
    "avg_degree",
    "variant",
    "mapping",
    "workers",
    "wall_time_s",
    "lifts",
    "rounds",
    "timeout",
    "error",
];

pub fn cmd_bench(args: &BenchArgs) -> Result<u8> {
    if args.workers.contains(&0) {
        bail!("worker counts must be at least 1");
    }
    let rows = run_matrix(args)?;
    if let Some(path) = &args.csv {
        let file =
            fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
        write_csv(&rows, file)?;
    }
    if let Some(path) = &args.json {
        let text = serde_json::to_string_pretty(&rows)?;
        fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    if args.csv.is_none() && args.json.is_none() {
        write_csv(&rows, std::io::stdout().lock())?;
    }
    Ok(0)
}
