//! Solvers for the minimum initial-credit problem on energy games.
//!
//! An energy game is played on a weighted directed graph whose vertices are
//! split between two players. Player 0 wins a play if, starting from some
//! initial credit, the running sum of edge weights never drops below zero.
//! For every vertex the solvers compute the least progress measure: the
//! minimum initial credit player 0 needs, or `⊤` when player 1 wins.
//!
//! Three solvers compute the same measure:
//!
//! * [`solve_seq`]: worklist solver with per-vertex counters.
//! * [`solve_sweep`]: parallel full sweeps until nothing changes.
//! * [`solve_frontier`]: parallel rounds over a deduplicated frontier of
//!   vertices whose successors changed.
//!
//! The [`oracle`] module holds independent brute-force checkers for small
//! arenas.

pub mod arena;
pub mod io;
pub mod measure;
pub mod oracle;
pub mod par;
pub mod report;
pub mod seq;

pub use arena::{ArenaError, ArenaStats, Edge, GameArena, Owner, Permutation, VertexId, Weight};
pub use measure::{
    extract_strategy, first_violation, is_epm, lift, ominus, winning_sets, EnergyValue,
    MeasureError, ProgressMeasure, Strategy,
};
pub use par::{
    choose_chunk_size, lift_chunked, solve_frontier, solve_frontier_with, solve_sweep,
    solve_sweep_with, ParallelConfig,
};
pub use report::{Mapping, SolveError, SolveOptions, SolveReport, Variant, WorklistOrder};
pub use seq::{solve_seq, solve_seq_with, SeqSolver};

/// Runs the chosen solver. `config` is ignored by the sequential variant.
pub fn solve(
    arena: &GameArena,
    variant: Variant,
    config: &ParallelConfig,
    options: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    match variant {
        Variant::Seq => solve_seq_with(arena, options),
        Variant::Sweep => solve_sweep_with(arena, config, options),
        Variant::Frontier => solve_frontier_with(arena, config, options),
    }
}
