//! Brute-force ground truth for small arenas.
//!
//! None of this shares code with the lifting solvers. The credit oracle plays
//! the energy game explicitly on `(vertex, credit)` states, and the strategy
//! checks look for negative cycles with Bellman-Ford relaxation.

use std::collections::VecDeque;

use thiserror::Error;

use crate::arena::{GameArena, Owner, VertexId, Weight};
use crate::measure::{is_epm, EnergyValue, ProgressMeasure, Strategy};

/// Upper limit on `(vertex, credit)` states explored by [`min_credit_attractor`].
pub const MAX_PRODUCT_STATES: u64 = 10_000_000;

/// Upper limit on the number of player-0 memoryless strategies enumerated.
pub const MAX_STRATEGIES: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for the oracle: {what} = {size} exceeds {limit}")]
    TooLarge {
        what: &'static str,
        size: u64,
        limit: u64,
    },
    #[error("strategy is malformed at vertex {0}")]
    MalformedStrategy(VertexId),
    #[error("measure has {measure} entries but the arena has {arena} vertices")]
    LengthMismatch { measure: usize, arena: usize },
}

/// A state of the energy-annotated safety game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProductState {
    pub vertex: VertexId,
    pub credit: u64,
}

/// Least initial credit per vertex, computed on the explicit product of the
/// arena with credits `0..=M_G`.
///
/// From `(v, c)` an edge `(v, v', w)` can be taken iff `c + w >= 0`, and leads
/// to `(v', min(c + w, M_G))`. Player 1 wins at a player-0 state with no
/// available move, at a player-1 state with any unavailable move, and at any
/// state from which it can force reaching one of those. The credit at `v` is
/// the smallest `c` with `(v, c)` safe for player 0, or `⊤`.
pub fn min_credit_attractor(arena: &GameArena) -> Result<ProgressMeasure, OracleError> {
    let n = arena.num_vertices();
    let cap = arena.max_credit();
    let levels = cap + 1;
    let size = (n as u64).saturating_mul(levels);
    if size > MAX_PRODUCT_STATES {
        return Err(OracleError::TooLarge {
            what: "product states",
            size,
            limit: MAX_PRODUCT_STATES,
        });
    }
    let levels = levels as usize;
    let state = |v: usize, c: u64| v * levels + c as usize;

    let mut lost = vec![false; n * levels];
    // Player-0 states: moves not yet known to lose.
    let mut open_moves = vec![0usize; n * levels];
    let mut queue = VecDeque::new();

    for v in arena.vertices() {
        for c in 0..=cap {
            let available = arena
                .successors(v)
                .filter(|&(_, w)| c as i128 + w as i128 >= 0)
                .count();
            let s = state(v.index(), c);
            let dead = match arena.owner(v) {
                Owner::Player0 => available == 0,
                Owner::Player1 => available < arena.out_degree(v),
            };
            open_moves[s] = available;
            if dead {
                lost[s] = true;
                queue.push_back((v, c));
            }
        }
    }

    while let Some((target, credit)) = queue.pop_front() {
        for (src, w) in arena.predecessors(target) {
            for c in source_credits(credit, w, cap) {
                let s = state(src.index(), c);
                if lost[s] {
                    continue;
                }
                match arena.owner(src) {
                    Owner::Player0 => {
                        open_moves[s] -= 1;
                        if open_moves[s] == 0 {
                            lost[s] = true;
                            queue.push_back((src, c));
                        }
                    }
                    Owner::Player1 => {
                        lost[s] = true;
                        queue.push_back((src, c));
                    }
                }
            }
        }
    }

    let values = (0..n)
        .map(|v| {
            (0..=cap)
                .find(|&c| !lost[state(v, c)])
                .map_or(EnergyValue::TOP, EnergyValue::finite)
        })
        .collect();
    Ok(ProgressMeasure::from_values(values))
}

/// Credits `c` at the source of an edge of weight `w` whose move lands on
/// credit `landed`.
fn source_credits(landed: u64, w: Weight, cap: u64) -> std::ops::RangeInclusive<u64> {
    let (landed, w, cap) = (landed as i128, w as i128, cap as i128);
    let (lo, hi) = if landed < cap {
        (landed - w, landed - w)
    } else {
        // Anything at or above the cap is truncated to it.
        (cap - w, cap)
    };
    let lo = lo.max(0);
    let hi = hi.min(cap);
    if lo > hi {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    lo as u64..=hi as u64
}

/// Player-0 winning region by exhaustive enumeration of memoryless
/// strategies: `v` is winning iff some strategy leaves no negative cycle
/// reachable from `v`.
pub fn winning_set_by_strategy_enum(arena: &GameArena) -> Result<Vec<VertexId>, OracleError> {
    let player0: Vec<VertexId> = arena
        .vertices()
        .filter(|&v| arena.owner(v) == Owner::Player0)
        .collect();
    let total = player0
        .iter()
        .try_fold(1u64, |acc, &v| acc.checked_mul(arena.out_degree(v) as u64))
        .unwrap_or(u64::MAX);
    if total > MAX_STRATEGIES {
        return Err(OracleError::TooLarge {
            what: "memoryless strategies",
            size: total,
            limit: MAX_STRATEGIES,
        });
    }

    let mut winning = vec![false; arena.num_vertices()];
    let mut digits = vec![0usize; player0.len()];
    loop {
        let mut chosen_edges = vec![None; arena.num_vertices()];
        for (&v, &d) in player0.iter().zip(&digits) {
            chosen_edges[v.index()] = Some(d);
        }
        let graph = restricted_graph(arena, &chosen_edges);
        let doomed = reaches_negative_cycle(arena.num_vertices(), &graph);
        for (w, d) in winning.iter_mut().zip(doomed) {
            *w |= !d;
        }

        // Odometer increment over the per-vertex choice digits.
        let mut i = 0;
        loop {
            if i == player0.len() {
                return Ok(arena.vertices().filter(|v| winning[v.index()]).collect());
            }
            digits[i] += 1;
            if digits[i] < arena.out_degree(player0[i]) {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Checks that following `strategy` from every vertex of `claimed_w0` never
/// reaches a negative cycle, whatever player 1 does.
///
/// Reaching a player-0 vertex where the strategy is undefined also refutes the
/// claim.
pub fn verify_strategy(
    arena: &GameArena,
    strategy: &Strategy,
    claimed_w0: &[VertexId],
) -> Result<bool, OracleError> {
    let n = arena.num_vertices();
    let mut chosen_edges = vec![None; n];
    for v in arena.vertices() {
        let Some(choice) = strategy.choice(v) else {
            continue;
        };
        if arena.owner(v) != Owner::Player0 {
            return Err(OracleError::MalformedStrategy(v));
        }
        // Among parallel edges to the chosen target, player 0 takes the
        // heaviest one.
        let best = arena
            .successors(v)
            .enumerate()
            .filter(|&(_, (t, _))| t == choice)
            .max_by_key(|&(i, (_, w))| (w, std::cmp::Reverse(i)))
            .map(|(i, _)| i);
        chosen_edges[v.index()] = Some(best.ok_or(OracleError::MalformedStrategy(v))?);
    }

    let graph = restricted_graph(arena, &chosen_edges);
    let mut reached = vec![false; n];
    let mut stack: Vec<usize> = claimed_w0.iter().map(|v| v.index()).collect();
    for &v in &stack {
        reached[v] = true;
    }
    while let Some(v) = stack.pop() {
        if arena.owner(VertexId(v as u32)) == Owner::Player0 && chosen_edges[v].is_none() {
            return Ok(false);
        }
        for &(t, _) in &graph[v] {
            if !reached[t] {
                reached[t] = true;
                stack.push(t);
            }
        }
    }
    let doomed = reaches_negative_cycle(n, &graph);
    Ok(!(0..n).any(|v| reached[v] && doomed[v]))
}

/// `f` is an energy progress measure and coincides with the oracle's least
/// one.
pub fn verify_measure(arena: &GameArena, f: &ProgressMeasure) -> Result<bool, OracleError> {
    if f.len() != arena.num_vertices() {
        return Err(OracleError::LengthMismatch {
            measure: f.len(),
            arena: arena.num_vertices(),
        });
    }
    let least = min_credit_attractor(arena)?;
    Ok(is_epm(f, arena) && *f == least)
}

/// Adjacency lists of the arena with each vertex that has a chosen edge
/// (an index into its successor row) restricted to that edge.
fn restricted_graph(
    arena: &GameArena,
    chosen_edges: &[Option<usize>],
) -> Vec<Vec<(usize, Weight)>> {
    arena
        .vertices()
        .map(|v| {
            arena
                .successors(v)
                .enumerate()
                .filter(|&(i, _)| chosen_edges[v.index()].is_none_or(|c| c == i))
                .map(|(_, (t, w))| (t.index(), w))
                .collect()
        })
        .collect()
}

/// Marks every vertex from which some negative cycle is reachable.
///
/// Runs Bellman-Ford on the reversed graph from a virtual source attached to
/// all vertices. Vertices still relaxable after `n` rounds sit downstream (in
/// the reversed graph) of a negative cycle, and so does everything reachable
/// from them.
fn reaches_negative_cycle(n: usize, graph: &[Vec<(usize, Weight)>]) -> Vec<bool> {
    let mut reverse: Vec<Vec<(usize, i128)>> = vec![Vec::new(); n];
    for (u, edges) in graph.iter().enumerate() {
        for &(t, w) in edges {
            reverse[t].push((u, w as i128));
        }
    }
    let mut dist = vec![0i128; n];
    for _ in 0..n {
        let mut changed = false;
        for u in 0..n {
            for &(t, w) in &reverse[u] {
                if dist[u] + w < dist[t] {
                    dist[t] = dist[u] + w;
                    changed = true;
                }
            }
        }
        if !changed {
            return vec![false; n];
        }
    }
    let mut doomed = vec![false; n];
    let mut stack = Vec::new();
    for u in 0..n {
        for &(t, w) in &reverse[u] {
            if dist[u] + w < dist[t] && !doomed[t] {
                doomed[t] = true;
                stack.push(t);
            }
        }
    }
    while let Some(u) = stack.pop() {
        for &(t, _) in &reverse[u] {
            if !doomed[t] {
                doomed[t] = true;
                stack.push(t);
            }
        }
    }
    doomed
}
