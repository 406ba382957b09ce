//! Energy-game arenas stored in dual compressed adjacency form.
//!
//! Successor lists live in a compressed-row (CSR) layout and predecessor lists
//! in a compressed-column (CSC) layout, so both `post(v)` and `pre(v)` are
//! contiguous slices. An arena is immutable once built and can be shared freely
//! between worker threads.

use std::fmt;

use thiserror::Error;

/// Dense vertex index in `[0, |V|)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub type Weight = i64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Owner {
    /// The energy player, who tries to keep the energy level nonnegative.
    Player0,
    Player1,
}

impl Owner {
    pub fn from_bit(bit: u8) -> Option<Owner> {
        match bit {
            0 => Some(Owner::Player0),
            1 => Some(Owner::Player1),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Owner::Player0 => 0,
            Owner::Player1 => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: Weight,
}

impl Edge {
    pub fn new(src: u32, dst: u32, weight: Weight) -> Self {
        Edge {
            src: VertexId(src),
            dst: VertexId(dst),
            weight,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArenaError {
    #[error("vertex {0} has no outgoing edge")]
    NonTotalArena(VertexId),
    #[error("edge #{edge} references vertex {vertex}, but the arena has {num_vertices} vertices")]
    DanglingVertexId {
        edge: usize,
        vertex: u32,
        num_vertices: usize,
    },
    #[error("edge #{edge} has weight {weight}, whose magnitude is not representable")]
    WeightOutOfRange { edge: usize, weight: Weight },
    #[error("arena has {0} vertices, more than a 32-bit vertex id can address")]
    TooManyVertices(usize),
    #[error("credit bound of the arena overflows 64-bit arithmetic")]
    Overflow,
}

/// Cached numeric facts about an arena.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArenaStats {
    /// `M_G`: sum over vertices of the largest negated outgoing weight (or 0).
    /// No finite least-measure value exceeds it.
    pub max_credit: u64,
    /// Largest absolute edge weight.
    pub max_abs_weight: u64,
    pub max_out_degree: usize,
    pub avg_out_degree: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameArena {
    owners: Vec<Owner>,
    num_player0: usize,
    csr_offsets: Vec<usize>,
    csr_targets: Vec<u32>,
    csr_weights: Vec<Weight>,
    csc_offsets: Vec<usize>,
    csc_sources: Vec<u32>,
    csc_weights: Vec<Weight>,
    stats: ArenaStats,
}

impl GameArena {
    /// Builds an arena with `owners.len()` vertices.
    ///
    /// Edges of one source keep their relative input order inside the CSR row.
    /// Parallel edges and self-loops are allowed.
    pub fn build(owners: Vec<Owner>, edges: &[Edge]) -> Result<GameArena, ArenaError> {
        let n = owners.len();
        if n > u32::MAX as usize {
            return Err(ArenaError::TooManyVertices(n));
        }
        for (i, e) in edges.iter().enumerate() {
            for vertex in [e.src.0, e.dst.0] {
                if vertex as usize >= n {
                    return Err(ArenaError::DanglingVertexId {
                        edge: i,
                        vertex,
                        num_vertices: n,
                    });
                }
            }
            if e.weight == Weight::MIN {
                return Err(ArenaError::WeightOutOfRange {
                    edge: i,
                    weight: e.weight,
                });
            }
        }

        // Stable counting sort by source.
        let mut csr_offsets = vec![0usize; n + 1];
        for e in edges {
            csr_offsets[e.src.index() + 1] += 1;
        }
        for v in 0..n {
            csr_offsets[v + 1] += csr_offsets[v];
        }
        if let Some(v) = (0..n).find(|&v| csr_offsets[v] == csr_offsets[v + 1]) {
            return Err(ArenaError::NonTotalArena(VertexId(v as u32)));
        }
        let mut cursor = csr_offsets.clone();
        let mut csr_targets = vec![0u32; edges.len()];
        let mut csr_weights = vec![0; edges.len()];
        for e in edges {
            let slot = &mut cursor[e.src.index()];
            csr_targets[*slot] = e.dst.0;
            csr_weights[*slot] = e.weight;
            *slot += 1;
        }

        Self::from_csr(owners, csr_offsets, csr_targets, csr_weights)
    }

    /// Completes an arena from an already-valid, total CSR layout.
    fn from_csr(
        owners: Vec<Owner>,
        csr_offsets: Vec<usize>,
        csr_targets: Vec<u32>,
        csr_weights: Vec<Weight>,
    ) -> Result<GameArena, ArenaError> {
        let n = owners.len();
        let stats = compute_stats(&csr_offsets, &csr_weights)?;
        let (csc_offsets, csc_sources, csc_weights) =
            transpose(n, &csr_offsets, &csr_targets, &csr_weights);
        let num_player0 = owners.iter().filter(|&&o| o == Owner::Player0).count();
        Ok(GameArena {
            owners,
            num_player0,
            csr_offsets,
            csr_targets,
            csr_weights,
            csc_offsets,
            csc_sources,
            csc_weights,
            stats,
        })
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.owners.len()
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.csr_targets.len()
    }

    pub fn num_player0(&self) -> usize {
        self.num_player0
    }

    #[inline]
    pub fn owner(&self, v: VertexId) -> Owner {
        self.owners[v.index()]
    }

    pub fn owners(&self) -> &[Owner] {
        &self.owners
    }

    pub fn stats(&self) -> &ArenaStats {
        &self.stats
    }

    /// Shorthand for `stats().max_credit`.
    #[inline]
    pub fn max_credit(&self) -> u64 {
        self.stats.max_credit
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> {
        (0..self.num_vertices() as u32).map(VertexId)
    }

    /// `(target, weight)` pairs of the CSR row of `v`, in input order.
    ///
    /// Panics if `v` is out of range.
    pub fn successors(
        &self,
        v: VertexId,
    ) -> impl ExactSizeIterator<Item = (VertexId, Weight)> + '_ {
        let (targets, weights) = self.successor_slices(v);
        targets.iter().zip(weights).map(|(&t, &w)| (VertexId(t), w))
    }

    /// `(source, weight)` pairs of the CSC column of `v`.
    ///
    /// Panics if `v` is out of range.
    pub fn predecessors(
        &self,
        v: VertexId,
    ) -> impl ExactSizeIterator<Item = (VertexId, Weight)> + '_ {
        let (sources, weights) = self.predecessor_slices(v);
        sources.iter().zip(weights).map(|(&s, &w)| (VertexId(s), w))
    }

    #[inline]
    pub fn successor_slices(&self, v: VertexId) -> (&[u32], &[Weight]) {
        let range = self.csr_offsets[v.index()]..self.csr_offsets[v.index() + 1];
        (&self.csr_targets[range.clone()], &self.csr_weights[range])
    }

    #[inline]
    pub fn predecessor_slices(&self, v: VertexId) -> (&[u32], &[Weight]) {
        let range = self.csc_offsets[v.index()]..self.csc_offsets[v.index() + 1];
        (&self.csc_sources[range.clone()], &self.csc_weights[range])
    }

    #[inline]
    pub fn out_degree(&self, v: VertexId) -> usize {
        self.csr_offsets[v.index() + 1] - self.csr_offsets[v.index()]
    }

    pub fn csr_offsets(&self) -> &[usize] {
        &self.csr_offsets
    }

    pub fn csc_offsets(&self) -> &[usize] {
        &self.csc_offsets
    }

    /// All edges in CSR order (by source, then row order).
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices().flat_map(move |v| {
            self.successors(v).map(move |(dst, weight)| Edge {
                src: v,
                dst,
                weight,
            })
        })
    }

    /// All edges as read back from the CSC layout (by target, then column order).
    pub fn edges_from_csc(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices().flat_map(move |v| {
            self.predecessors(v).map(move |(src, weight)| Edge {
                src,
                dst: v,
                weight,
            })
        })
    }

    /// Renumbers vertices so that player-0 vertices occupy `[0, |V0|)`.
    ///
    /// Relative order within each owner class is preserved, as is the order of
    /// edges within each row.
    pub fn reorder_by_owner(&self) -> (GameArena, Permutation) {
        let n = self.num_vertices();
        let mut old_to_new = vec![0u32; n];
        let mut new_to_old = Vec::with_capacity(n);
        for class in [Owner::Player0, Owner::Player1] {
            for v in self.vertices().filter(|&v| self.owner(v) == class) {
                old_to_new[v.index()] = new_to_old.len() as u32;
                new_to_old.push(v.0);
            }
        }

        let owners = new_to_old
            .iter()
            .map(|&o| self.owners[o as usize])
            .collect();
        let mut csr_offsets = Vec::with_capacity(n + 1);
        let mut csr_targets = Vec::with_capacity(self.num_edges());
        let mut csr_weights = Vec::with_capacity(self.num_edges());
        csr_offsets.push(0);
        for &old in &new_to_old {
            let (targets, weights) = self.successor_slices(VertexId(old));
            csr_targets.extend(targets.iter().map(|&t| old_to_new[t as usize]));
            csr_weights.extend_from_slice(weights);
            csr_offsets.push(csr_targets.len());
        }
        let arena = Self::from_csr(owners, csr_offsets, csr_targets, csr_weights)
            .expect("renumbering preserves totality and weights");
        (
            arena,
            Permutation {
                old_to_new,
                new_to_old,
            },
        )
    }
}

/// Bijection between the vertex numbering of an arena and its reordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    old_to_new: Vec<u32>,
    new_to_old: Vec<u32>,
}

impl Permutation {
    pub fn len(&self) -> usize {
        self.old_to_new.len()
    }

    pub fn is_empty(&self) -> bool {
        self.old_to_new.is_empty()
    }

    pub fn new_id(&self, old: VertexId) -> VertexId {
        VertexId(self.old_to_new[old.index()])
    }

    pub fn old_id(&self, new: VertexId) -> VertexId {
        VertexId(self.new_to_old[new.index()])
    }

    /// Maps per-vertex data indexed by new ids back to old ids.
    pub fn pull_back<T: Clone>(&self, by_new: &[T]) -> Vec<T> {
        assert_eq!(by_new.len(), self.len());
        self.old_to_new
            .iter()
            .map(|&new| by_new[new as usize].clone())
            .collect()
    }
}

/// `M_G` and degree statistics of a CSR layout.
///
/// Also rejects arenas where `M_G + W_max` would not fit in an `i64`, which
/// is what keeps every `f(v') ⊖ w` evaluation in the solvers overflow-free.
fn compute_stats(offsets: &[usize], weights: &[Weight]) -> Result<ArenaStats, ArenaError> {
    let n = offsets.len() - 1;
    let mut max_credit: u64 = 0;
    let mut max_abs_weight: u64 = 0;
    let mut max_out_degree = 0;
    for v in 0..n {
        let row = &weights[offsets[v]..offsets[v + 1]];
        max_out_degree = max_out_degree.max(row.len());
        let mut worst: u64 = 0;
        for &w in row {
            max_abs_weight = max_abs_weight.max(w.unsigned_abs());
            if w < 0 {
                worst = worst.max(w.unsigned_abs());
            }
        }
        max_credit = max_credit.checked_add(worst).ok_or(ArenaError::Overflow)?;
    }
    match max_credit.checked_add(max_abs_weight) {
        Some(total) if total <= i64::MAX as u64 => {}
        _ => return Err(ArenaError::Overflow),
    }
    let avg_out_degree = if n == 0 {
        0.0
    } else {
        weights.len() as f64 / n as f64
    };
    Ok(ArenaStats {
        max_credit,
        max_abs_weight,
        max_out_degree,
        avg_out_degree,
    })
}

/// Stable counting-sort transpose of a CSR layout.
fn transpose(
    n: usize,
    offsets: &[usize],
    targets: &[u32],
    weights: &[Weight],
) -> (Vec<usize>, Vec<u32>, Vec<Weight>) {
    let mut csc_offsets = vec![0usize; n + 1];
    for &t in targets {
        csc_offsets[t as usize + 1] += 1;
    }
    for v in 0..n {
        csc_offsets[v + 1] += csc_offsets[v];
    }
    let mut cursor = csc_offsets.clone();
    let mut sources = vec![0u32; targets.len()];
    let mut csc_weights = vec![0; targets.len()];
    for src in 0..n {
        for e in offsets[src]..offsets[src + 1] {
            let slot = &mut cursor[targets[e] as usize];
            sources[*slot] = src as u32;
            csc_weights[*slot] = weights[e];
            *slot += 1;
        }
    }
    (csc_offsets, sources, csc_weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Owner::*;

    fn g1() -> GameArena {
        GameArena::build(
            vec![Player0, Player1],
            &[Edge::new(0, 1, -1), Edge::new(1, 0, 1)],
        )
        .unwrap()
    }

    #[test]
    fn g1_stats() {
        let a = g1();
        assert_eq!(a.max_credit(), 1);
        assert_eq!(a.stats().max_abs_weight, 1);
        assert_eq!(a.stats().max_out_degree, 1);
        assert_eq!(a.stats().avg_out_degree, 1.0);
    }

    #[test]
    fn self_loop_zero_has_no_credit_bound() {
        let a = GameArena::build(vec![Player0], &[Edge::new(0, 0, 0)]).unwrap();
        assert_eq!(a.max_credit(), 0);
        assert_eq!(
            a.successors(VertexId(0)).collect::<Vec<_>>(),
            vec![(VertexId(0), 0)]
        );
    }

    #[test]
    fn sink_is_rejected() {
        let err = GameArena::build(vec![Player0, Player1], &[Edge::new(0, 1, 5)]).unwrap_err();
        assert_eq!(err, ArenaError::NonTotalArena(VertexId(1)));
    }

    #[test]
    fn dangling_ids_are_rejected() {
        let err = GameArena::build(vec![Player0], &[Edge::new(0, 3, 1)]).unwrap_err();
        assert!(matches!(
            err,
            ArenaError::DanglingVertexId { vertex: 3, .. }
        ));
    }

    #[test]
    fn credit_bound_sums_worst_negative_weights() {
        let a = GameArena::build(
            vec![Player0, Player1],
            &[Edge::new(0, 1, -3), Edge::new(1, 0, -3)],
        )
        .unwrap();
        assert_eq!(a.max_credit(), 6);

        let a = GameArena::build(
            vec![Player0, Player0],
            &[
                Edge::new(0, 1, -2),
                Edge::new(0, 1, -7),
                Edge::new(0, 0, 4),
                Edge::new(1, 1, 9),
            ],
        )
        .unwrap();
        assert_eq!(a.max_credit(), 7);
        assert_eq!(a.stats().max_abs_weight, 9);
    }

    #[test]
    fn credit_bound_overflow_is_rejected() {
        let big = -(i64::MAX / 2) - 10;
        let err = GameArena::build(
            vec![Player0, Player0],
            &[Edge::new(0, 1, big), Edge::new(1, 0, big)],
        )
        .unwrap_err();
        assert_eq!(err, ArenaError::Overflow);

        let err = GameArena::build(vec![Player0], &[Edge::new(0, 0, i64::MIN)]).unwrap_err();
        assert!(matches!(err, ArenaError::WeightOutOfRange { .. }));
    }

    #[test]
    fn adjacency_views() {
        let a = g1();
        assert_eq!(
            a.successors(VertexId(0)).collect::<Vec<_>>(),
            vec![(VertexId(1), -1)]
        );
        assert_eq!(
            a.predecessors(VertexId(0)).collect::<Vec<_>>(),
            vec![(VertexId(1), 1)]
        );
    }

    #[test]
    fn row_order_follows_input_order() {
        let a = GameArena::build(
            vec![Player0, Player1, Player0],
            &[
                Edge::new(2, 0, 1),
                Edge::new(0, 2, 5),
                Edge::new(1, 1, 0),
                Edge::new(0, 1, -4),
                Edge::new(0, 2, 5),
            ],
        )
        .unwrap();
        let row: Vec<_> = a.successors(VertexId(0)).collect();
        assert_eq!(
            row,
            vec![(VertexId(2), 5), (VertexId(1), -4), (VertexId(2), 5)]
        );
        let col: Vec<_> = a.predecessors(VertexId(2)).collect();
        assert_eq!(col, vec![(VertexId(0), 5), (VertexId(0), 5)]);
    }

    #[test]
    fn reorder_swaps_owner_classes() {
        let a = GameArena::build(
            vec![Player1, Player0],
            &[Edge::new(0, 1, 2), Edge::new(1, 0, -1)],
        )
        .unwrap();
        let (b, perm) = a.reorder_by_owner();
        assert_eq!(perm.new_id(VertexId(0)), VertexId(1));
        assert_eq!(perm.new_id(VertexId(1)), VertexId(0));
        assert_eq!(b.owners(), &[Player0, Player1]);
        assert_eq!(
            b.successors(VertexId(0)).collect::<Vec<_>>(),
            vec![(VertexId(1), -1)]
        );
    }

    #[test]
    fn reorder_keeps_sorted_arena() {
        let a = GameArena::build(
            vec![Player0, Player0, Player1],
            &[Edge::new(0, 1, 0), Edge::new(1, 2, 0), Edge::new(2, 0, 0)],
        )
        .unwrap();
        let (b, perm) = a.reorder_by_owner();
        assert!((0..3).all(|v| perm.new_id(VertexId(v)) == VertexId(v)));
        assert_eq!(a, b);
    }

    #[test]
    fn empty_arena_is_allowed() {
        let a = GameArena::build(vec![], &[]).unwrap();
        assert_eq!(a.num_vertices(), 0);
        assert_eq!(a.max_credit(), 0);
    }
}
