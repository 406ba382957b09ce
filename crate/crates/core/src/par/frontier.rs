use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use super::{blocks_for, build_pool, lift_with, run_blocks, ParallelConfig};
use crate::arena::{GameArena, Owner, VertexId};
use crate::measure::{edge_satisfied_raw, is_top_raw, winning_sets, ProgressMeasure};
use crate::report::{SolveError, SolveOptions, SolveReport, Variant};

pub fn solve_frontier(
    arena: &GameArena,
    config: &ParallelConfig,
) -> Result<SolveReport, SolveError> {
    solve_frontier_with(arena, config, &SolveOptions::default())
}

/// Frontier-based parallel solver.
///
/// Each round lifts every frontier vertex exactly once. Whenever a value
/// changes, all of the vertex's predecessors that are not yet `⊤` go into the
/// next frontier; a test-and-set flag per vertex keeps each insertion unique
/// within a round. Neighbour reads may see values from before or after the
/// concurrent writes of the same round.
pub fn solve_frontier_with(
    arena: &GameArena,
    config: &ParallelConfig,
    options: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    config.validate()?;
    let start = Instant::now();
    let pool = build_pool(config.workers)?;
    let n = arena.num_vertices();
    let f: Vec<AtomicU64> = (0..n).map(|_| AtomicU64::new(0)).collect();
    let in_next: Vec<AtomicBool> = (0..n).map(|_| AtomicBool::new(false)).collect();

    let mut frontier: Vec<u32> = arena
        .vertices()
        .filter(|&v| {
            let (_, weights) = arena.successor_slices(v);
            match arena.owner(v) {
                Owner::Player0 => weights.iter().all(|&w| w < 0),
                Owner::Player1 => weights.iter().any(|&w| w < 0),
            }
        })
        .map(|v| v.0)
        .collect();

    let (mut lifts, mut raises, mut rounds, mut checks) = (0u64, 0u64, 0u64, 0u64);
    while !frontier.is_empty() {
        if options.expired() {
            return Err(SolveError::TimedOut);
        }
        rounds += 1;
        let before = if options.debug_checks {
            checks += 1;
            let snapshot: Vec<u64> = f.iter().map(|x| x.load(Ordering::Relaxed)).collect();
            if let Some(v) = missing_violator(arena, &snapshot, &frontier) {
                return Err(SolveError::InvariantViolated(format!(
                    "violated vertex {v} missing from the frontier of round {rounds}"
                )));
            }
            Some(snapshot)
        } else {
            None
        };

        let blocks = blocks_for(arena, &frontier, config.workers, config.mapping);
        let per_block = run_blocks(pool.as_ref(), &blocks, |range| {
            let mut next = Vec::new();
            let mut local_raises = 0u64;
            let mut decreased = None;
            for &v in &frontier[range.clone()] {
                let old = f[v as usize].load(Ordering::Relaxed);
                let new = lift_with(arena, f.as_slice(), VertexId(v), config.mapping);
                if new == old {
                    continue;
                }
                if new < old {
                    decreased.get_or_insert(v);
                }
                f[v as usize].store(new, Ordering::Relaxed);
                local_raises += 1;
                let (sources, _) = arena.predecessor_slices(VertexId(v));
                for &p in sources {
                    if is_top_raw(f[p as usize].load(Ordering::Relaxed)) {
                        continue;
                    }
                    if !in_next[p as usize].swap(true, Ordering::AcqRel) {
                        next.push(p);
                    }
                }
            }
            (next, range.len() as u64, local_raises, decreased)
        });

        let mut next = Vec::new();
        for (part, l, r, decreased) in per_block {
            if let Some(v) = decreased {
                return Err(SolveError::InvariantViolated(format!(
                    "lifting vertex {v} decreased its value in round {rounds}"
                )));
            }
            lifts += l;
            raises += r;
            next.extend(part);
        }
        for &p in &next {
            in_next[p as usize].store(false, Ordering::Relaxed);
        }

        if let Some(before) = before {
            if let Some(v) = (0..n).find(|&v| f[v].load(Ordering::Relaxed) < before[v]) {
                return Err(SolveError::InvariantViolated(format!(
                    "vertex {v} decreased during round {rounds}"
                )));
            }
            let mut sorted = next.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(SolveError::InvariantViolated(format!(
                    "duplicate frontier insertion in round {rounds}"
                )));
            }
        }
        next.sort_unstable();
        frontier = next;
    }

    let measure = ProgressMeasure::from_raw(f.into_iter().map(AtomicU64::into_inner).collect());
    let (w0, w1) = winning_sets(&measure);
    Ok(SolveReport {
        measure,
        w0,
        w1,
        lifts,
        raises,
        pops: lifts,
        rounds,
        checks,
        wall_time: start.elapsed(),
        variant: Variant::Frontier,
        mapping: config.mapping,
        workers: config.workers,
    })
}

/// A vertex violating its progress condition that is not in `frontier`.
fn missing_violator(arena: &GameArena, f: &[u64], frontier: &[u32]) -> Option<VertexId> {
    let mut member = vec![false; arena.num_vertices()];
    for &v in frontier {
        member[v as usize] = true;
    }
    arena.vertices().find(|&v| {
        if member[v.index()] {
            return false;
        }
        let fv = f[v.index()];
        let (targets, weights) = arena.successor_slices(v);
        let mut edges = targets.iter().zip(weights);
        let satisfied = match arena.owner(v) {
            Owner::Player0 => edges.any(|(&t, &w)| edge_satisfied_raw(fv, f[t as usize], w)),
            Owner::Player1 => edges.all(|(&t, &w)| edge_satisfied_raw(fv, f[t as usize], w)),
        };
        !satisfied
    })
}
