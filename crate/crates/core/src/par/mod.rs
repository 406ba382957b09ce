//! Parallel solvers: the full-sweep variant and the frontier-based variant.
//!
//! Both share the same kernels. With [`Mapping::PerVertex`] each worker lifts
//! whole vertices from a block balanced by vertex count. With
//! [`Mapping::Chunked`] a vertex's successor list is split across `h` lanes
//! that each reduce a strided slice, followed by a pairwise tree reduction
//! over the lanes; blocks are then balanced by successor count.

mod frontier;
mod sweep;

use std::ops::Range;

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::arena::{GameArena, Owner, VertexId};
use crate::measure::{
    ominus, ominus_capped_raw, EnergyValue, MeasureError, ProgressMeasure, RawMeasure,
};
use crate::report::{Mapping, SolveError};

pub use frontier::{solve_frontier, solve_frontier_with};
pub use sweep::{default_sweep_bound, solve_sweep, solve_sweep_with};

/// Largest supported lane count for the chunked mapping.
pub const MAX_CHUNK: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParallelConfig {
    pub workers: usize,
    pub mapping: Mapping,
    /// Overrides the default cap on the number of sweeps.
    pub sweep_bound: Option<u64>,
}

impl Default for ParallelConfig {
    fn default() -> Self {
        ParallelConfig {
            workers: 1,
            mapping: Mapping::PerVertex,
            sweep_bound: None,
        }
    }
}

impl ParallelConfig {
    pub fn new(workers: usize, mapping: Mapping) -> Self {
        ParallelConfig {
            workers,
            mapping,
            sweep_bound: None,
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.workers == 0 {
            return Err(SolveError::InvalidConfig(
                "workers must be at least 1".into(),
            ));
        }
        if let Mapping::Chunked(h) = self.mapping {
            if !h.is_power_of_two() || h > MAX_CHUNK {
                return Err(SolveError::InvalidConfig(format!(
                    "chunk size {h} must be a power of two in 1..={MAX_CHUNK}"
                )));
            }
        }
        Ok(())
    }
}

/// Lane count for the chunked mapping: the largest power of two not above
/// the rounded average out-degree (at least 1).
pub fn choose_chunk_size(arena: &GameArena) -> u32 {
    chunk_size_for_degree(arena.stats().avg_out_degree)
}

pub fn chunk_size_for_degree(avg_out_degree: f64) -> u32 {
    let target = avg_out_degree.round().clamp(1.0, MAX_CHUNK as f64) as u32;
    1 << (31 - target.leading_zeros())
}

/// Lifting operator at `v` evaluated by `h` cooperating lanes.
///
/// Gives the same value as [`crate::measure::lift`].
pub fn lift_chunked(
    f: &ProgressMeasure,
    v: VertexId,
    arena: &GameArena,
    h: u32,
) -> Result<EnergyValue, MeasureError> {
    assert!(
        h.is_power_of_two() && h <= MAX_CHUNK,
        "chunk size must be a power of two <= {MAX_CHUNK}"
    );
    if f.len() != arena.num_vertices() {
        return Err(MeasureError::LengthMismatch {
            measure: f.len(),
            arena: arena.num_vertices(),
        });
    }
    let cap = arena.max_credit();
    let candidates: Vec<EnergyValue> = arena
        .successors(v)
        .map(|(t, w)| ominus(f.get(t), w).map(|c| c.capped(cap)))
        .collect::<Result<_, _>>()?;
    let value = match arena.owner(v) {
        Owner::Player0 => lane_reduce(
            h,
            candidates.len(),
            EnergyValue::TOP,
            |i| candidates[i],
            Ord::min,
        ),
        Owner::Player1 => lane_reduce(
            h,
            candidates.len(),
            EnergyValue::ZERO,
            |i| candidates[i],
            Ord::max,
        ),
    };
    Ok(value)
}

/// Lane `l` folds candidates `l, l + h, l + 2h, ...`; the lanes are then
/// combined pairwise, halving the active width each step.
#[inline(always)]
fn lane_reduce<T: Copy>(
    h: u32,
    len: usize,
    identity: T,
    candidate: impl Fn(usize) -> T,
    combine: impl Fn(T, T) -> T,
) -> T {
    let h = h as usize;
    let mut lanes = [identity; MAX_CHUNK as usize];
    for i in 0..len {
        let lane = i & (h - 1);
        lanes[lane] = combine(lanes[lane], candidate(i));
    }
    let mut width = h / 2;
    while width > 0 {
        for lane in 0..width {
            lanes[lane] = combine(lanes[lane], lanes[lane + width]);
        }
        width /= 2;
    }
    lanes[0]
}

#[inline]
pub(crate) fn lift_chunked_raw<M: RawMeasure + ?Sized>(
    arena: &GameArena,
    f: &M,
    v: VertexId,
    h: u32,
) -> u64 {
    let cap = arena.max_credit();
    let (targets, weights) = arena.successor_slices(v);
    let candidate = |i: usize| ominus_capped_raw(f.load(targets[i] as usize), weights[i], cap);
    match arena.owner(v) {
        Owner::Player0 => lane_reduce(h, targets.len(), u64::MAX, candidate, u64::min),
        Owner::Player1 => lane_reduce(h, targets.len(), 0, candidate, u64::max),
    }
}

#[inline]
pub(crate) fn lift_with<M: RawMeasure + ?Sized>(
    arena: &GameArena,
    f: &M,
    v: VertexId,
    mapping: Mapping,
) -> u64 {
    match mapping {
        Mapping::PerVertex => crate::measure::lift_raw(arena, f, v),
        Mapping::Chunked(h) => lift_chunked_raw(arena, f, v, h),
    }
}

/// Splits `items` into at most `parts` contiguous blocks of near-equal total
/// cost.
pub(crate) fn balanced_blocks(
    items: &[u32],
    parts: usize,
    cost: impl Fn(u32) -> usize,
) -> Vec<Range<usize>> {
    let parts = parts.max(1).min(items.len().max(1));
    if parts == 1 {
        #[allow(clippy::single_range_in_vec_init)]
        return vec![0..items.len()];
    }
    let total: usize = items.iter().map(|&v| cost(v)).sum();
    let mut blocks = Vec::with_capacity(parts);
    let mut start = 0;
    let mut acc = 0usize;
    for (i, &v) in items.iter().enumerate() {
        acc += cost(v);
        // Close block k once the running cost reaches k/parts of the total.
        let k = blocks.len() + 1;
        if k < parts && acc * parts >= total * k {
            blocks.push(start..i + 1);
            start = i + 1;
        }
    }
    blocks.push(start..items.len());
    blocks.retain(|b| !b.is_empty());
    blocks
}

pub(crate) fn blocks_for(
    arena: &GameArena,
    items: &[u32],
    workers: usize,
    mapping: Mapping,
) -> Vec<Range<usize>> {
    match mapping {
        Mapping::PerVertex => balanced_blocks(items, workers, |_| 1),
        Mapping::Chunked(_) => balanced_blocks(items, workers, |v| arena.out_degree(VertexId(v))),
    }
}

/// Runs `work` on every block, in parallel when a pool is present, and
/// returns the per-block results in block order.
pub(crate) fn run_blocks<R: Send>(
    pool: Option<&ThreadPool>,
    blocks: &[Range<usize>],
    work: impl Fn(Range<usize>) -> R + Sync,
) -> Vec<R> {
    match pool {
        Some(pool) if blocks.len() > 1 => {
            pool.install(|| blocks.par_iter().map(|b| work(b.clone())).collect())
        }
        _ => blocks.iter().map(|b| work(b.clone())).collect(),
    }
}

pub(crate) fn build_pool(workers: usize) -> Result<Option<ThreadPool>, SolveError> {
    if workers <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| SolveError::InvalidConfig(format!("cannot start worker pool: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::{Edge, Owner::*};
    use crate::measure::lift;

    #[test]
    fn chunk_size_rule() {
        assert_eq!(chunk_size_for_degree(2.76), 2);
        assert_eq!(chunk_size_for_degree(1.16), 1);
        assert_eq!(chunk_size_for_degree(6.14), 4);
        assert_eq!(chunk_size_for_degree(0.0), 1);
        assert_eq!(chunk_size_for_degree(8.0), 8);
        assert_eq!(chunk_size_for_degree(1000.0), 64);
    }

    #[test]
    fn config_validation() {
        assert!(ParallelConfig::new(0, Mapping::PerVertex)
            .validate()
            .is_err());
        assert!(ParallelConfig::new(2, Mapping::Chunked(3))
            .validate()
            .is_err());
        assert!(ParallelConfig::new(2, Mapping::Chunked(128))
            .validate()
            .is_err());
        assert!(ParallelConfig::new(8, Mapping::Chunked(4))
            .validate()
            .is_ok());
    }

    #[test]
    fn chunked_lift_with_top_candidate() {
        // Player-1 vertex whose candidates are {0, 3, ⊤}.
        let a = GameArena::build(
            vec![Player1, Player0, Player0, Player0],
            &[
                Edge::new(0, 1, 0),
                Edge::new(0, 2, -3),
                Edge::new(0, 3, 0),
                Edge::new(1, 1, 0),
                Edge::new(2, 2, 0),
                Edge::new(3, 3, -1),
            ],
        )
        .unwrap();
        let f = ProgressMeasure::from_values(vec![
            EnergyValue::ZERO,
            EnergyValue::ZERO,
            EnergyValue::ZERO,
            EnergyValue::TOP,
        ]);
        for h in [1, 2, 4, 8] {
            assert_eq!(lift_chunked(&f, VertexId(0), &a, h), Ok(EnergyValue::TOP));
        }
    }

    #[test]
    fn chunked_lift_seven_successors() {
        let weights = [-3, 2, -1, 0, -4, 1, -2];
        let mut edges: Vec<Edge> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Edge::new(0, i as u32 + 1, w))
            .collect();
        edges.extend((1..=7).map(|i| Edge::new(i, 0, 1)));
        for owner in [Player0, Player1] {
            let mut owners = vec![Player1; 8];
            owners[0] = owner;
            let a = GameArena::build(owners, &edges).unwrap();
            let values = (0..8).map(|i| EnergyValue::finite((i * 3) % 5)).collect();
            let f = ProgressMeasure::from_values(values);
            let scalar = lift(&f, VertexId(0), &a).unwrap();
            for h in [1, 2, 4, 8, 16] {
                assert_eq!(lift_chunked(&f, VertexId(0), &a, h).unwrap(), scalar);
                let raw: Vec<u64> = f.values().iter().map(|e| e.to_raw()).collect();
                assert_eq!(
                    lift_chunked_raw(&a, raw.as_slice(), VertexId(0), h),
                    scalar.to_raw()
                );
            }
        }
    }

    #[test]
    fn blocks_cover_items_in_order() {
        let items: Vec<u32> = (0..10).collect();
        let blocks = balanced_blocks(&items, 3, |_| 1);
        assert_eq!(blocks, vec![0..4, 4..7, 7..10]);
        assert_eq!(balanced_blocks(&items, 1, |_| 1), vec![0..10]);
        assert_eq!(balanced_blocks(&items[..2], 8, |_| 1), vec![0..1, 1..2]);
        assert_eq!(balanced_blocks(&[], 4, |_| 1), vec![0..0]);

        // One heavy item gets a block of its own.
        let heavy = balanced_blocks(&items, 2, |v| if v == 0 { 100 } else { 1 });
        assert_eq!(heavy, vec![0..1, 1..10]);
    }
}
