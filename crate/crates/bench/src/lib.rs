//! Arenas shared by the criterion benchmarks.

use egsolve::io::{generate, Family, GenSpec};
use egsolve::GameArena;

/// Named benchmark instances: a sparse random arena, a cycle chain on which
/// full sweeps converge slowly, and a small dense clique.
pub fn instances() -> Vec<(&'static str, GameArena)> {
    let specs = [
        (
            "random-5k",
            GenSpec {
                n: 5_000,
                d: 3,
                wmin: -10,
                wmax: 10,
                seed: 1,
                ..GenSpec::default()
            },
        ),
        (
            "cycle-chain-5k",
            GenSpec {
                n: 5_000,
                d: 6,
                wmin: -8,
                wmax: 8,
                seed: 2,
                family: Family::CycleChain,
                ..GenSpec::default()
            },
        ),
        (
            "clique-300",
            GenSpec {
                n: 300,
                wmin: -5,
                wmax: 5,
                seed: 3,
                family: Family::Clique,
                ..GenSpec::default()
            },
        ),
    ];
    specs
        .into_iter()
        .map(|(name, spec)| (name, generate(&spec).expect("benchmark spec is valid")))
        .collect()
}
