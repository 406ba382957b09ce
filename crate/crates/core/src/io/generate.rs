//! Deterministic arena generators.
//!
//! All randomness comes from [`XorShift64Star`] seeded with `GenSpec::seed`.
//! Owners are drawn first, one `chance(p0_frac)` per vertex in id order
//! (success means player 0); the family then draws its edges.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::rng::XorShift64Star;
use crate::arena::{ArenaError, Edge, GameArena, Owner, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Vertex `v` first gets an edge to a uniform target; then
    /// `n · (d - 1)` more edges with uniform source and target follow. Every
    /// weight is uniform in `[wmin, wmax]`.
    Random,
    /// Consecutive blocks of `d + 2` vertices form cycles (the last block may
    /// be shorter) and the first vertex of each block has an extra edge to the
    /// first vertex of the next block. Even blocks draw cycle weights from the
    /// negative part of the weight range, odd blocks from the positive part,
    /// falling back to the full range when that part is empty. Chain edges use
    /// the full range.
    CycleChain,
    /// All `n²` ordered pairs, self-loops included, with uniform weights.
    Clique,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Random => "random",
            Family::CycleChain => "cycle-chain",
            Family::Clique => "clique",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Family::Random),
            "cycle-chain" | "cyclechain" => Ok(Family::CycleChain),
            "clique" => Ok(Family::Clique),
            other => Err(format!("unknown generator family '{other}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    /// Target average out-degree (cycle length parameter for `CycleChain`,
    /// unused by `Clique`).
    pub d: usize,
    pub wmin: Weight,
    pub wmax: Weight,
    pub p0_frac: f64,
    pub seed: u64,
    pub family: Family,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            n: 16,
            d: 2,
            wmin: -3,
            wmax: 3,
            p0_frac: 0.5,
            seed: 0,
            family: Family::Random,
        }
    }
}

/// Edges above this count are refused.
const MAX_EDGES: u128 = 1 << 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Arena(#[from] ArenaError),
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        let invalid = |m: &str| Err(GenError::InvalidSpec(m.to_string()));
        if self.n == 0 {
            return invalid("n must be at least 1");
        }
        if self.n > u32::MAX as usize {
            return invalid("n does not fit a 32-bit vertex id");
        }
        if self.d == 0 {
            return invalid("d must be at least 1");
        }
        if self.wmin > self.wmax {
            return invalid("wmin must not exceed wmax");
        }
        if self.wmin == Weight::MIN {
            return invalid("wmin is out of range");
        }
        if !(0.0..=1.0).contains(&self.p0_frac) {
            return invalid("p0 fraction must be within [0, 1]");
        }
        let n = self.n as u128;
        let edges = match self.family {
            Family::Random => n * self.d as u128,
            Family::CycleChain => 2 * n,
            Family::Clique => n * n,
        };
        if edges > MAX_EDGES {
            return invalid("too many edges");
        }
        Ok(())
    }
}

pub fn generate(spec: &GenSpec) -> Result<GameArena, GenError> {
    spec.validate()?;
    let mut rng = XorShift64Star::new(spec.seed);
    let n = spec.n;
    let owners: Vec<Owner> = (0..n)
        .map(|_| {
            if rng.chance(spec.p0_frac) {
                Owner::Player0
            } else {
                Owner::Player1
            }
        })
        .collect();

    let (lo, hi) = (spec.wmin, spec.wmax);
    let edges = match spec.family {
        Family::Random => {
            let mut edges = Vec::with_capacity(n * spec.d);
            for v in 0..n as u32 {
                let dst = rng.below(n as u64) as u32;
                edges.push(Edge::new(v, dst, rng.in_range(lo, hi)));
            }
            for _ in 0..n * (spec.d - 1) {
                let src = rng.below(n as u64) as u32;
                let dst = rng.below(n as u64) as u32;
                edges.push(Edge::new(src, dst, rng.in_range(lo, hi)));
            }
            edges
        }
        Family::CycleChain => {
            let len = spec.d.saturating_add(2).min(n);
            let negative = (lo < 0).then(|| (lo, hi.min(-1)));
            let positive = (hi > 0).then(|| (lo.max(1), hi));
            let mut edges = Vec::with_capacity(n + n / len + 1);
            let mut start = 0;
            let mut block = 0usize;
            while start < n {
                let end = (start + len).min(n);
                let (clo, chi) = if block.is_multiple_of(2) {
                    negative
                } else {
                    positive
                }
                .unwrap_or((lo, hi));
                for v in start..end {
                    let next = if v + 1 == end { start } else { v + 1 };
                    edges.push(Edge::new(v as u32, next as u32, rng.in_range(clo, chi)));
                }
                if end < n {
                    edges.push(Edge::new(start as u32, end as u32, rng.in_range(lo, hi)));
                }
                start = end;
                block += 1;
            }
            edges
        }
        Family::Clique => {
            let mut edges = Vec::with_capacity(n * n);
            for u in 0..n as u32 {
                for v in 0..n as u32 {
                    edges.push(Edge::new(u, v, rng.in_range(lo, hi)));
                }
            }
            edges
        }
    };
    Ok(GameArena::build(owners, &edges)?)
}
