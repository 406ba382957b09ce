//! Sequential minimum-initial-credit solver with per-vertex counters.
//!
//! Player-0 vertices keep a count of successors whose edge currently satisfies
//! the progress condition. A player-0 vertex only needs lifting once its count
//! drops to zero, which keeps the total work within `O(|E| · M_G)`.

use std::collections::VecDeque;
use std::time::Instant;

use crate::arena::{GameArena, Owner, VertexId};
use crate::measure::{edge_satisfied_raw, is_top_raw, lift_raw, winning_sets, ProgressMeasure};
use crate::report::{Mapping, SolveError, SolveOptions, SolveReport, Variant, WorklistOrder};

/// How many pops between deadline checks.
const DEADLINE_STRIDE: u64 = 4096;

/// Pending vertices with O(1) membership tests.
#[derive(Clone, Debug)]
pub struct Worklist {
    queue: VecDeque<u32>,
    member: Vec<bool>,
    order: WorklistOrder,
}

impl Worklist {
    pub fn new(num_vertices: usize, order: WorklistOrder) -> Self {
        Worklist {
            queue: VecDeque::new(),
            member: vec![false; num_vertices],
            order,
        }
    }

    /// Returns `false` if `v` was already pending.
    pub fn push(&mut self, v: VertexId) -> bool {
        let slot = &mut self.member[v.index()];
        if *slot {
            return false;
        }
        *slot = true;
        self.queue.push_back(v.0);
        true
    }

    pub fn pop(&mut self) -> Option<VertexId> {
        let v = match self.order {
            WorklistOrder::Fifo => self.queue.pop_front(),
            WorklistOrder::Lifo => self.queue.pop_back(),
        }?;
        self.member[v as usize] = false;
        Some(VertexId(v))
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.member[v.index()]
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }
}

/// State of one sequential solve, exposed so tests can single-step it.
#[derive(Clone, Debug)]
pub struct SeqSolver<'a> {
    arena: &'a GameArena,
    f: Vec<u64>,
    /// Only meaningful for player-0 vertices. Signed because a vertex that is
    /// already pending may be decremented past zero.
    count: Vec<i64>,
    pending: Worklist,
    lifts: u64,
    raises: u64,
}

impl<'a> SeqSolver<'a> {
    pub fn new(arena: &'a GameArena, order: WorklistOrder) -> Self {
        let n = arena.num_vertices();
        let mut pending = Worklist::new(n, order);
        let mut count = vec![0i64; n];
        for v in arena.vertices() {
            let (_, weights) = arena.successor_slices(v);
            match arena.owner(v) {
                Owner::Player0 => {
                    if weights.iter().all(|&w| w < 0) {
                        pending.push(v);
                    } else {
                        // With f ≡ 0 an edge is satisfied iff its weight is nonnegative.
                        count[v.index()] = weights.iter().filter(|&&w| w >= 0).count() as i64;
                    }
                }
                Owner::Player1 => {
                    if weights.iter().any(|&w| w < 0) {
                        pending.push(v);
                    }
                }
            }
        }
        SeqSolver {
            arena,
            f: vec![0; n],
            count,
            pending,
            lifts: 0,
            raises: 0,
        }
    }

    pub fn is_done(&self) -> bool {
        self.pending.is_empty()
    }

    pub fn pending(&self) -> &Worklist {
        &self.pending
    }

    pub fn lifts(&self) -> u64 {
        self.lifts
    }

    pub fn raises(&self) -> u64 {
        self.raises
    }

    pub fn measure(&self) -> ProgressMeasure {
        ProgressMeasure::from_raw(self.f.clone())
    }

    fn satisfied_successors(&self, v: VertexId) -> i64 {
        let fv = self.f[v.index()];
        let (targets, weights) = self.arena.successor_slices(v);
        targets
            .iter()
            .zip(weights)
            .filter(|&(&t, &w)| edge_satisfied_raw(fv, self.f[t as usize], w))
            .count() as i64
    }

    /// Pops one vertex, lifts it, and reschedules the affected predecessors.
    /// Returns `Ok(false)` once the worklist is empty.
    pub fn step(&mut self) -> Result<bool, SolveError> {
        let Some(v) = self.pending.pop() else {
            return Ok(false);
        };
        let arena = self.arena;
        let old = self.f[v.index()];
        let new = lift_raw(arena, self.f.as_slice(), v);
        self.lifts += 1;
        if new < old {
            return Err(SolveError::InvariantViolated(format!(
                "lifting vertex {v} decreased its value"
            )));
        }
        if new != old {
            self.raises += 1;
        }
        self.f[v.index()] = new;
        if arena.owner(v) == Owner::Player0 {
            self.count[v.index()] = self.satisfied_successors(v);
        }

        let (sources, weights) = arena.predecessor_slices(v);
        for (&p, &w) in sources.iter().zip(weights) {
            let pred = VertexId(p);
            let fp = self.f[p as usize];
            if edge_satisfied_raw(fp, new, w) {
                continue;
            }
            match arena.owner(pred) {
                Owner::Player0 => {
                    // A self-loop's count was just recomputed from scratch above.
                    if pred != v && edge_satisfied_raw(fp, old, w) {
                        self.count[p as usize] -= 1;
                    }
                    if self.count[p as usize] <= 0 {
                        self.pending.push(pred);
                    }
                }
                Owner::Player1 => {
                    self.pending.push(pred);
                }
            }
        }
        Ok(true)
    }

    /// For every finite-valued player-0 vertex not pending, the stored count
    /// equals the number of satisfied successor edges and is at least one.
    pub fn check_counter_invariant(&self) -> bool {
        self.arena.vertices().all(|v| {
            if self.arena.owner(v) != Owner::Player0
                || self.pending.contains(v)
                || is_top_raw(self.f[v.index()])
            {
                return true;
            }
            let c = self.count[v.index()];
            c >= 1 && c == self.satisfied_successors(v)
        })
    }

    /// Every vertex violating its progress condition is pending.
    pub fn check_worklist_complete(&self) -> bool {
        self.arena.vertices().all(|v| {
            let fv = self.f[v.index()];
            let (targets, weights) = self.arena.successor_slices(v);
            let mut edges = targets.iter().zip(weights);
            let satisfied = match self.arena.owner(v) {
                Owner::Player0 => {
                    edges.any(|(&t, &w)| edge_satisfied_raw(fv, self.f[t as usize], w))
                }
                Owner::Player1 => {
                    edges.all(|(&t, &w)| edge_satisfied_raw(fv, self.f[t as usize], w))
                }
            };
            satisfied || self.pending.contains(v)
        })
    }
}

pub fn solve_seq(arena: &GameArena) -> Result<SolveReport, SolveError> {
    solve_seq_with(arena, &SolveOptions::default())
}

pub fn solve_seq_with(
    arena: &GameArena,
    options: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let mut solver = SeqSolver::new(arena, options.order);
    let mut checks = 0;
    let mut iterations = 0u64;
    loop {
        if options.debug_checks {
            checks += 1;
            if !solver.check_counter_invariant() {
                return Err(SolveError::InvariantViolated(format!(
                    "counter invariant broken at loop head {iterations}"
                )));
            }
            if !solver.check_worklist_complete() {
                return Err(SolveError::InvariantViolated(format!(
                    "violated vertex missing from the worklist at loop head {iterations}"
                )));
            }
        }
        if iterations.is_multiple_of(DEADLINE_STRIDE) && options.expired() {
            return Err(SolveError::TimedOut);
        }
        if !solver.step()? {
            break;
        }
        iterations += 1;
    }

    let measure = solver.measure();
    let (w0, w1) = winning_sets(&measure);
    Ok(SolveReport {
        measure,
        w0,
        w1,
        lifts: solver.lifts,
        raises: solver.raises,
        pops: solver.lifts,
        rounds: iterations,
        checks,
        wall_time: start.elapsed(),
        variant: Variant::Seq,
        mapping: Mapping::PerVertex,
        workers: 1,
    })
}
