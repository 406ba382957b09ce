//! Progress-measure values, the truncated subtraction `⊖`, the lifting
//! operator, and the checks built on them.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::arena::{GameArena, Owner, VertexId, Weight};

const TOP_RAW: u64 = u64::MAX;

/// An element of `{0, 1, 2, ...} ∪ {⊤}` ordered with `⊤` as the maximum.
///
/// Values produced by the solvers never exceed the arena's credit bound, but
/// claimed measures read from files may.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EnergyValue(u64);

impl EnergyValue {
    pub const ZERO: EnergyValue = EnergyValue(0);
    pub const TOP: EnergyValue = EnergyValue(TOP_RAW);

    /// Largest representable finite value.
    pub const MAX_FINITE: u64 = u64::MAX - 1;

    /// Panics if `n` exceeds [`EnergyValue::MAX_FINITE`].
    pub fn finite(n: u64) -> EnergyValue {
        assert!(n <= Self::MAX_FINITE, "finite energy value out of range");
        EnergyValue(n)
    }

    pub fn try_finite(n: u64) -> Option<EnergyValue> {
        (n <= Self::MAX_FINITE).then_some(EnergyValue(n))
    }

    #[inline]
    pub fn is_top(self) -> bool {
        self.0 == TOP_RAW
    }

    #[inline]
    pub fn as_finite(self) -> Option<u64> {
        (!self.is_top()).then_some(self.0)
    }

    #[cfg(test)]
    pub(crate) fn to_raw(self) -> u64 {
        self.0
    }

    #[inline]
    pub(crate) fn from_raw(raw: u64) -> EnergyValue {
        EnergyValue(raw)
    }

    /// Maps anything above `cap` to `⊤`.
    #[inline]
    pub fn capped(self, cap: u64) -> EnergyValue {
        if self.0 > cap {
            EnergyValue::TOP
        } else {
            self
        }
    }
}

impl fmt::Debug for EnergyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for EnergyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_finite() {
            Some(n) => n.fmt(f),
            None => f.write_str("T"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("energy value arithmetic overflowed")]
    Overflow,
    #[error("measure has {measure} entries but the arena has {arena} vertices")]
    LengthMismatch { measure: usize, arena: usize },
    #[error("vertex {0} has no successor witnessing its measure")]
    NoWitness(VertexId),
}

/// `a ⊖ b = max(0, a - b)`, with `⊤ ⊖ b = ⊤`. The result is not capped.
pub fn ominus(a: EnergyValue, b: Weight) -> Result<EnergyValue, MeasureError> {
    match a.as_finite() {
        None => Ok(EnergyValue::TOP),
        Some(a) => {
            let diff = (a as i128 - b as i128).max(0);
            u64::try_from(diff)
                .ok()
                .and_then(EnergyValue::try_finite)
                .ok_or(MeasureError::Overflow)
        }
    }
}

/// `value ⪰ next ⊖ weight`: the edge satisfies the local progress condition.
#[inline]
pub fn edge_satisfied(value: EnergyValue, next: EnergyValue, weight: Weight) -> bool {
    match (value.as_finite(), next.as_finite()) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(a), Some(b)) => a as i128 >= (b as i128 - weight as i128).max(0),
    }
}

/// Dense per-vertex map from vertices to energy values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProgressMeasure {
    values: Vec<EnergyValue>,
}

impl ProgressMeasure {
    pub fn zero(num_vertices: usize) -> ProgressMeasure {
        ProgressMeasure {
            values: vec![EnergyValue::ZERO; num_vertices],
        }
    }

    pub fn from_values(values: Vec<EnergyValue>) -> ProgressMeasure {
        ProgressMeasure { values }
    }

    pub(crate) fn from_raw(raw: Vec<u64>) -> ProgressMeasure {
        ProgressMeasure {
            values: raw.into_iter().map(EnergyValue::from_raw).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, v: VertexId) -> EnergyValue {
        self.values[v.index()]
    }

    pub fn set(&mut self, v: VertexId, value: EnergyValue) {
        self.values[v.index()] = value;
    }

    pub fn values(&self) -> &[EnergyValue] {
        &self.values
    }

    pub fn into_values(self) -> Vec<EnergyValue> {
        self.values
    }

    /// Pointwise `self ⊑ other`.
    pub fn le(&self, other: &ProgressMeasure) -> bool {
        self.len() == other.len() && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    fn check_len(&self, arena: &GameArena) -> Result<(), MeasureError> {
        if self.len() != arena.num_vertices() {
            return Err(MeasureError::LengthMismatch {
                measure: self.len(),
                arena: arena.num_vertices(),
            });
        }
        Ok(())
    }
}

/// Value of the lifting operator at `v`: the min (player 0) or max (player 1)
/// over successors of `f(v') ⊖ w(v, v')`, with anything above the arena's
/// credit bound mapped to `⊤`.
///
/// This is the raw operator and may be below `f(v)` when `v` is already
/// satisfied.
pub fn lift(
    f: &ProgressMeasure,
    v: VertexId,
    arena: &GameArena,
) -> Result<EnergyValue, MeasureError> {
    f.check_len(arena)?;
    let cap = arena.max_credit();
    let mut candidates = arena
        .successors(v)
        .map(|(t, w)| ominus(f.get(t), w).map(|c| c.capped(cap)));
    let first = candidates.next().expect("arena is total")?;
    candidates.try_fold(first, |acc, c| {
        let c = c?;
        Ok(match arena.owner(v) {
            Owner::Player0 => acc.min(c),
            Owner::Player1 => acc.max(c),
        })
    })
}

/// Whether the local progress condition holds at `v`.
pub fn vertex_satisfied(f: &ProgressMeasure, v: VertexId, arena: &GameArena) -> bool {
    let fv = f.get(v);
    let mut edges = arena.successors(v);
    match arena.owner(v) {
        Owner::Player0 => edges.any(|(t, w)| edge_satisfied(fv, f.get(t), w)),
        Owner::Player1 => edges.all(|(t, w)| edge_satisfied(fv, f.get(t), w)),
    }
}

/// Lowest-numbered vertex violating its progress condition, if any.
pub fn first_violation(
    f: &ProgressMeasure,
    arena: &GameArena,
) -> Result<Option<VertexId>, MeasureError> {
    f.check_len(arena)?;
    Ok(arena.vertices().find(|&v| !vertex_satisfied(f, v, arena)))
}

/// Whether `f` is an energy progress measure of `arena`. A length mismatch
/// counts as not being one.
pub fn is_epm(f: &ProgressMeasure, arena: &GameArena) -> bool {
    matches!(first_violation(f, arena), Ok(None))
}

/// Splits vertices into `(W0, W1)`: finite-valued and `⊤`-valued.
pub fn winning_sets(f: &ProgressMeasure) -> (Vec<VertexId>, Vec<VertexId>) {
    let mut w0 = Vec::new();
    let mut w1 = Vec::new();
    for (i, value) in f.values().iter().enumerate() {
        let v = VertexId(i as u32);
        if value.is_top() {
            w1.push(v);
        } else {
            w0.push(v);
        }
    }
    (w0, w1)
}

/// Memoryless player-0 strategy, defined on player-0 vertices of `W0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    choices: Vec<Option<VertexId>>,
}

impl Strategy {
    pub fn from_choices(choices: Vec<Option<VertexId>>) -> Strategy {
        Strategy { choices }
    }

    pub fn choice(&self, v: VertexId) -> Option<VertexId> {
        self.choices.get(v.index()).copied().flatten()
    }

    pub fn choices(&self) -> &[Option<VertexId>] {
        &self.choices
    }
}

/// Picks, for every finite-valued player-0 vertex, the first successor in
/// row order whose edge satisfies the progress condition.
pub fn extract_strategy(f: &ProgressMeasure, arena: &GameArena) -> Result<Strategy, MeasureError> {
    f.check_len(arena)?;
    let mut choices = vec![None; arena.num_vertices()];
    for v in arena.vertices() {
        let fv = f.get(v);
        if arena.owner(v) != Owner::Player0 || fv.is_top() {
            continue;
        }
        let (target, _) = arena
            .successors(v)
            .find(|&(t, w)| edge_satisfied(fv, f.get(t), w))
            .ok_or(MeasureError::NoWitness(v))?;
        choices[v.index()] = Some(target);
    }
    Ok(Strategy { choices })
}

/// Read access to a raw measure, shared by the sequential and parallel
/// kernels.
pub(crate) trait RawMeasure {
    fn load(&self, v: usize) -> u64;
}

impl RawMeasure for [u64] {
    #[inline]
    fn load(&self, v: usize) -> u64 {
        self[v]
    }
}

impl RawMeasure for [AtomicU64] {
    #[inline]
    fn load(&self, v: usize) -> u64 {
        self[v].load(Ordering::Relaxed)
    }
}

/// `next ⊖ weight`, capped. Assumes `next <= cap` or `next` is `⊤`; arena
/// construction guarantees `cap + |weight|` fits in an `i64`.
#[inline(always)]
pub(crate) fn ominus_capped_raw(next: u64, weight: Weight, cap: u64) -> u64 {
    if next == TOP_RAW {
        return TOP_RAW;
    }
    let diff = next as i64 - weight;
    if diff <= 0 {
        0
    } else if diff as u64 > cap {
        TOP_RAW
    } else {
        diff as u64
    }
}

/// Raw lifting kernel over a solver-owned measure.
#[inline]
pub(crate) fn lift_raw<M: RawMeasure + ?Sized>(arena: &GameArena, f: &M, v: VertexId) -> u64 {
    let cap = arena.max_credit();
    let (targets, weights) = arena.successor_slices(v);
    let candidates = targets
        .iter()
        .zip(weights)
        .map(|(&t, &w)| ominus_capped_raw(f.load(t as usize), w, cap));
    match arena.owner(v) {
        Owner::Player0 => {
            let mut best = TOP_RAW;
            for c in candidates {
                best = best.min(c);
                if best == 0 {
                    break;
                }
            }
            best
        }
        Owner::Player1 => {
            let mut best = 0;
            for c in candidates {
                best = best.max(c);
                if best == TOP_RAW {
                    break;
                }
            }
            best
        }
    }
}

/// `value ⪰ next ⊖ weight` on raw values under the same bounds as
/// [`ominus_capped_raw`].
#[inline(always)]
pub(crate) fn edge_satisfied_raw(value: u64, next: u64, weight: Weight) -> bool {
    if value == TOP_RAW {
        return true;
    }
    if next == TOP_RAW {
        return false;
    }
    value as i64 >= next as i64 - weight
}

pub(crate) fn is_top_raw(value: u64) -> bool {
    value == TOP_RAW
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::{Edge, Owner::*};

    fn fin(n: u64) -> EnergyValue {
        EnergyValue::finite(n)
    }

    fn g1() -> GameArena {
        GameArena::build(
            vec![Player0, Player1],
            &[Edge::new(0, 1, -1), Edge::new(1, 0, 1)],
        )
        .unwrap()
    }

    fn pm(values: &[EnergyValue]) -> ProgressMeasure {
        ProgressMeasure::from_values(values.to_vec())
    }

    #[test]
    fn ominus_cases() {
        assert_eq!(ominus(fin(5), 3), Ok(fin(2)));
        assert_eq!(ominus(fin(1), 5), Ok(fin(0)));
        assert_eq!(ominus(EnergyValue::TOP, -7), Ok(EnergyValue::TOP));
        assert_eq!(
            ominus(fin(EnergyValue::MAX_FINITE), -1),
            Err(MeasureError::Overflow)
        );
    }

    #[test]
    fn top_is_maximal() {
        assert!(fin(EnergyValue::MAX_FINITE) < EnergyValue::TOP);
        assert!(fin(0) < fin(1));
        assert_eq!(EnergyValue::TOP.to_string(), "T");
        assert_eq!(fin(12).capped(11), EnergyValue::TOP);
        assert_eq!(fin(11).capped(11), fin(11));
    }

    #[test]
    fn lift_examples() {
        let a = g1();
        let zero = ProgressMeasure::zero(2);
        assert_eq!(lift(&zero, VertexId(0), &a), Ok(fin(1)));

        let lp = GameArena::build(vec![Player0], &[Edge::new(0, 0, -1)]).unwrap();
        assert_eq!(lift(&pm(&[fin(1)]), VertexId(0), &lp), Ok(EnergyValue::TOP));

        let pos = GameArena::build(
            vec![Player1, Player0],
            &[Edge::new(0, 1, 3), Edge::new(0, 0, 0), Edge::new(1, 0, 2)],
        )
        .unwrap();
        assert_eq!(
            lift(&ProgressMeasure::zero(2), VertexId(0), &pos),
            Ok(fin(0))
        );
        assert_eq!(
            lift(&ProgressMeasure::zero(2), VertexId(1), &pos),
            Ok(fin(0))
        );
    }

    #[test]
    fn lift_raw_matches_checked_lift() {
        let a = GameArena::build(
            vec![Player1, Player0, Player1],
            &[
                Edge::new(0, 1, -2),
                Edge::new(0, 2, 1),
                Edge::new(1, 2, -1),
                Edge::new(1, 0, 0),
                Edge::new(2, 2, -1),
            ],
        )
        .unwrap();
        let cap = a.max_credit();
        for x in 0..=cap + 1 {
            for y in 0..=cap + 1 {
                for z in 0..=cap + 1 {
                    let vals: Vec<EnergyValue> =
                        [x, y, z].iter().map(|&n| fin(n).capped(cap)).collect();
                    let raw: Vec<u64> = vals.iter().map(|e| e.to_raw()).collect();
                    let f = pm(&vals);
                    for v in a.vertices() {
                        assert_eq!(
                            lift(&f, v, &a).unwrap().to_raw(),
                            lift_raw(&a, raw.as_slice(), v)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn epm_checks() {
        let a = g1();
        assert!(is_epm(&pm(&[fin(1), fin(0)]), &a));
        assert!(!is_epm(&pm(&[fin(0), fin(0)]), &a));
        assert_eq!(
            first_violation(&pm(&[fin(0), fin(0)]), &a),
            Ok(Some(VertexId(0)))
        );
        assert!(is_epm(&pm(&[EnergyValue::TOP, EnergyValue::TOP]), &a));
        assert!(!is_epm(&pm(&[fin(2), fin(0)]), &a));
        assert!(is_epm(&pm(&[fin(2), fin(1)]), &a));
        assert!(!is_epm(&pm(&[fin(1)]), &a));
    }

    #[test]
    fn winning_sets_split_on_top() {
        let (w0, w1) = winning_sets(&pm(&[fin(1), fin(0)]));
        assert_eq!(w0, vec![VertexId(0), VertexId(1)]);
        assert!(w1.is_empty());
        let (w0, w1) = winning_sets(&pm(&[EnergyValue::TOP]));
        assert!(w0.is_empty());
        assert_eq!(w1, vec![VertexId(0)]);
    }

    #[test]
    fn strategy_picks_first_witness() {
        let a = g1();
        let s = extract_strategy(&pm(&[fin(1), fin(0)]), &a).unwrap();
        assert_eq!(s.choice(VertexId(0)), Some(VertexId(1)));
        assert_eq!(s.choice(VertexId(1)), None);

        // Vertex 0 with successors [(1, -5), (2, 0)].
        let b = GameArena::build(
            vec![Player0, Player0, Player0],
            &[
                Edge::new(0, 1, -5),
                Edge::new(0, 2, 0),
                Edge::new(1, 1, 0),
                Edge::new(2, 2, 0),
            ],
        )
        .unwrap();
        let s = extract_strategy(&ProgressMeasure::zero(3), &b).unwrap();
        assert_eq!(s.choice(VertexId(0)), Some(VertexId(2)));

        let lp = GameArena::build(vec![Player0], &[Edge::new(0, 0, -1)]).unwrap();
        let s = extract_strategy(&pm(&[EnergyValue::TOP]), &lp).unwrap();
        assert_eq!(s.choice(VertexId(0)), None);
    }

    #[test]
    fn corrupted_measure_has_no_witness() {
        let a = g1();
        assert_eq!(
            extract_strategy(&ProgressMeasure::zero(2), &a),
            Err(MeasureError::NoWitness(VertexId(0)))
        );
    }
}
