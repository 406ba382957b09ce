//! Types shared by every solver: options, reports and errors.

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::arena::VertexId;
use crate::measure::ProgressMeasure;

/// Environment variable that switches on the expensive invariant scans.
pub const DEBUG_CHECKS_ENV: &str = "EGSOLVE_DEBUG_CHECKS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Seq,
    Sweep,
    Frontier,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Seq => "seq",
            Variant::Sweep => "sweep",
            Variant::Frontier => "frontier",
        })
    }
}

/// How lifting work is mapped onto workers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mapping {
    /// One worker lifts a whole vertex.
    PerVertex,
    /// `h` lanes split one successor list and reduce their partial results.
    Chunked(u32),
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mapping::PerVertex => f.write_str("vertex"),
            Mapping::Chunked(h) => write!(f, "chunk{h}"),
        }
    }
}

/// Extraction order of the sequential worklist.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WorklistOrder {
    #[default]
    Fifo,
    Lifo,
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Checked at round/sweep boundaries, and every few thousand pops in the
    /// sequential solver.
    pub deadline: Option<Instant>,
    /// Run the exhaustive invariant scans (counter invariant, worklist or
    /// frontier completeness, monotonicity) and fail on the first violation.
    pub debug_checks: bool,
    pub order: WorklistOrder,
}

impl SolveOptions {
    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.deadline = Some(Instant::now() + timeout);
        self
    }

    pub fn with_debug_checks(mut self, on: bool) -> Self {
        self.debug_checks = on;
        self
    }

    /// Default options with `debug_checks` taken from `EGSOLVE_DEBUG_CHECKS`.
    pub fn from_env() -> Self {
        SolveOptions::default().with_debug_checks(debug_checks_from_env())
    }

    pub(crate) fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// `true` when `EGSOLVE_DEBUG_CHECKS` is set to `1`, `true` or `yes`.
pub fn debug_checks_from_env() -> bool {
    std::env::var(DEBUG_CHECKS_ENV).is_ok_and(|v| parse_flag(&v))
}

fn parse_flag(value: &str) -> bool {
    matches!(
        value.trim().to_ascii_lowercase().as_str(),
        "1" | "true" | "yes"
    )
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("deadline reached before a fixpoint")]
    TimedOut,
    #[error("sweep bound of {0} exhausted without reaching a fixpoint")]
    BoundExhausted(u64),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

/// Output of one solver run.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub measure: ProgressMeasure,
    pub w0: Vec<VertexId>,
    pub w1: Vec<VertexId>,
    /// Applications of the lifting operator, including ones that changed nothing.
    pub lifts: u64,
    /// Lifts that strictly raised a value.
    pub raises: u64,
    /// Worklist or frontier extractions (0 for the sweep solver).
    pub pops: u64,
    /// Loop iterations of the sequential solver, sweeps, or frontier rounds.
    pub rounds: u64,
    /// Invariant scans performed when debug checks are on.
    pub checks: u64,
    pub wall_time: Duration,
    pub variant: Variant,
    pub mapping: Mapping,
    pub workers: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_values() {
        assert!(parse_flag("1"));
        assert!(parse_flag("TRUE"));
        assert!(!parse_flag("0"));
        assert!(!parse_flag(""));
    }

    #[test]
    fn display_names() {
        assert_eq!(Mapping::Chunked(4).to_string(), "chunk4");
        assert_eq!(Mapping::PerVertex.to_string(), "vertex");
        assert_eq!(Variant::Frontier.to_string(), "frontier");
    }
}
