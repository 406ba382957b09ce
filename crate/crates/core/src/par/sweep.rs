use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use super::{blocks_for, build_pool, lift_with, run_blocks, ParallelConfig};
use crate::arena::{GameArena, VertexId};
use crate::measure::{winning_sets, ProgressMeasure};
use crate::report::{SolveError, SolveOptions, SolveReport, Variant};

/// Default cap on the number of sweeps.
///
/// Every sweep before the last one raises at least one vertex, and a vertex
/// can be raised at most `M_G + 1` times, so `|V| · (M_G + 1) + 1` sweeps always
/// suffice. The cap is never below `|E| · M_G`.
pub fn default_sweep_bound(arena: &GameArena) -> u64 {
    let cap = arena.max_credit();
    let by_edges = (arena.num_edges() as u64).saturating_mul(cap);
    let by_raises = (arena.num_vertices() as u64).saturating_mul(cap.saturating_add(1));
    by_edges.max(by_raises).saturating_add(1)
}

pub fn solve_sweep(arena: &GameArena, config: &ParallelConfig) -> Result<SolveReport, SolveError> {
    solve_sweep_with(arena, config, &SolveOptions::default())
}

/// Repeatedly lifts every vertex in parallel, keeping the larger of the old
/// and lifted value, until a sweep changes nothing.
pub fn solve_sweep_with(
    arena: &GameArena,
    config: &ParallelConfig,
    options: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    config.validate()?;
    let start = Instant::now();
    let pool = build_pool(config.workers)?;
    let n = arena.num_vertices();
    let f: Vec<AtomicU64> = (0..n).map(|_| AtomicU64::new(0)).collect();
    let all: Vec<u32> = (0..n as u32).collect();
    let blocks = blocks_for(arena, &all, config.workers, config.mapping);

    let bound = config
        .sweep_bound
        .unwrap_or_else(|| default_sweep_bound(arena));
    let mut remaining = bound;
    let mut more = true;
    let (mut lifts, mut raises, mut sweeps, mut checks) = (0u64, 0u64, 0u64, 0u64);

    while more && remaining > 0 {
        if options.expired() {
            return Err(SolveError::TimedOut);
        }
        remaining -= 1;
        sweeps += 1;
        let before = options.debug_checks.then(|| {
            f.iter()
                .map(|x| x.load(Ordering::Relaxed))
                .collect::<Vec<_>>()
        });

        // One-way latch; the pool join at the end of the sweep publishes it.
        let changed = AtomicBool::new(false);
        let per_block = run_blocks(pool.as_ref(), &blocks, |range| {
            let mut local_raises = 0u64;
            for &v in &all[range.clone()] {
                let old = f[v as usize].load(Ordering::Relaxed);
                let lifted = lift_with(arena, f.as_slice(), VertexId(v), config.mapping);
                if lifted > old {
                    f[v as usize].store(lifted, Ordering::Relaxed);
                    local_raises += 1;
                }
            }
            if local_raises > 0 {
                changed.store(true, Ordering::Relaxed);
            }
            (range.len() as u64, local_raises)
        });
        for (l, r) in per_block {
            lifts += l;
            raises += r;
        }
        more = changed.load(Ordering::Relaxed);

        if let Some(before) = before {
            checks += 1;
            if let Some(v) = (0..n).find(|&v| f[v].load(Ordering::Relaxed) < before[v]) {
                return Err(SolveError::InvariantViolated(format!(
                    "vertex {v} decreased during sweep {sweeps}"
                )));
            }
        }
    }
    if more {
        return Err(SolveError::BoundExhausted(bound));
    }

    let measure = ProgressMeasure::from_raw(f.into_iter().map(AtomicU64::into_inner).collect());
    let (w0, w1) = winning_sets(&measure);
    Ok(SolveReport {
        measure,
        w0,
        w1,
        lifts,
        raises,
        pops: 0,
        rounds: sweeps,
        checks,
        wall_time: start.elapsed(),
        variant: Variant::Sweep,
        mapping: config.mapping,
        workers: config.workers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::{Edge, Owner::*};
    use crate::measure::EnergyValue;
    use crate::report::Mapping;

    fn g1() -> GameArena {
        GameArena::build(
            vec![Player0, Player1],
            &[Edge::new(0, 1, -1), Edge::new(1, 0, 1)],
        )
        .unwrap()
    }

    #[test]
    fn g1_converges_in_two_sweeps() {
        let r = solve_sweep(&g1(), &ParallelConfig::new(2, Mapping::PerVertex)).unwrap();
        assert_eq!(
            r.measure.values(),
            &[EnergyValue::finite(1), EnergyValue::ZERO]
        );
        assert_eq!(r.rounds, 2);
        assert_eq!(r.raises, 1);
    }

    #[test]
    fn nonnegative_arena_needs_one_sweep() {
        let a = GameArena::build(
            vec![Player0, Player1],
            &[Edge::new(0, 1, 2), Edge::new(1, 0, 0)],
        )
        .unwrap();
        let r = solve_sweep(&a, &ParallelConfig::default()).unwrap();
        assert_eq!(r.rounds, 1);
        assert_eq!(r.raises, 0);
    }

    #[test]
    fn negative_self_loop_needs_more_than_edges_times_bound() {
        // |E| · M_G = 1, yet the vertex is raised twice (0 -> 1 -> ⊤).
        let a = GameArena::build(vec![Player0], &[Edge::new(0, 0, -1)]).unwrap();
        let r = solve_sweep(&a, &ParallelConfig::default()).unwrap();
        assert_eq!(r.measure.values(), &[EnergyValue::TOP]);
        assert_eq!(r.rounds, 3);

        let tight = ParallelConfig {
            sweep_bound: Some(1),
            ..Default::default()
        };
        assert_eq!(
            solve_sweep(&a, &tight).unwrap_err(),
            SolveError::BoundExhausted(1)
        );
    }

    #[test]
    fn default_bound_values() {
        assert_eq!(default_sweep_bound(&g1()), 5);
        let a = GameArena::build(vec![Player0], &[Edge::new(0, 0, -1)]).unwrap();
        assert_eq!(default_sweep_bound(&a), 3);
    }
}
