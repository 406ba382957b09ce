use egsolve::io::{
    generate, parse_arena, parse_solution, write_arena, write_solution, Family, GenSpec,
    SolutionDocument,
};
use egsolve::oracle::{
    min_credit_attractor, verify_measure, verify_strategy, winning_set_by_strategy_enum,
};
use egsolve::*;
use proptest::prelude::*;
use proptest::strategy::Strategy as Gen;

/// Small total arenas with parallel edges and self-loops allowed.
fn arena_strategy(max_n: usize, max_w: i64) -> impl Gen<Value = GameArena> {
    (1..=max_n).prop_flat_map(move |n| {
        let owners = prop::collection::vec(any::<bool>(), n);
        let forced = prop::collection::vec((0..n as u32, -max_w..=max_w), n);
        let extra = prop::collection::vec((0..n as u32, 0..n as u32, -max_w..=max_w), 0..=2 * n);
        (owners, forced, extra).prop_map(|(owners, forced, extra)| {
            let owners = owners
                .into_iter()
                .map(|b| if b { Owner::Player0 } else { Owner::Player1 })
                .collect();
            let mut edges: Vec<Edge> = forced
                .into_iter()
                .enumerate()
                .map(|(v, (t, w))| Edge::new(v as u32, t, w))
                .collect();
            edges.extend(extra.into_iter().map(|(s, t, w)| Edge::new(s, t, w)));
            GameArena::build(owners, &edges).unwrap()
        })
    })
}

fn all_configs() -> Vec<ParallelConfig> {
    let mut out = Vec::new();
    for workers in [1, 3] {
        for mapping in [
            Mapping::PerVertex,
            Mapping::Chunked(1),
            Mapping::Chunked(2),
            Mapping::Chunked(8),
        ] {
            out.push(ParallelConfig::new(workers, mapping));
        }
    }
    out
}

fn values(n: usize, raw: &[u64], cap: u64) -> ProgressMeasure {
    ProgressMeasure::from_values(
        raw.iter()
            .take(n)
            .map(|&x| {
                if x > cap {
                    EnergyValue::TOP
                } else {
                    EnergyValue::finite(x)
                }
            })
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn seq_matches_oracle(a in arena_strategy(7, 4)) {
        let report = solve_seq(&a).unwrap();
        prop_assert_eq!(&report.measure, &min_credit_attractor(&a).unwrap());
        prop_assert!(is_epm(&report.measure, &a));
        prop_assert_eq!(verify_measure(&a, &report.measure), Ok(true));
    }

    #[test]
    fn lifo_order_reaches_the_same_measure(a in arena_strategy(7, 4)) {
        let options = SolveOptions { order: WorklistOrder::Lifo, ..Default::default() };
        prop_assert_eq!(solve_seq_with(&a, &options).unwrap().measure, solve_seq(&a).unwrap().measure);
    }

    #[test]
    fn parallel_variants_match_seq(a in arena_strategy(8, 4)) {
        let expected = solve_seq(&a).unwrap().measure;
        for config in all_configs() {
            prop_assert_eq!(&solve_sweep(&a, &config).unwrap().measure, &expected);
            prop_assert_eq!(&solve_frontier(&a, &config).unwrap().measure, &expected);
        }
    }

    #[test]
    fn debug_checks_pass(a in arena_strategy(8, 4)) {
        let options = SolveOptions::default().with_debug_checks(true);
        let config = ParallelConfig::new(2, Mapping::Chunked(2));
        for variant in [Variant::Seq, Variant::Sweep, Variant::Frontier] {
            let report = solve(&a, variant, &config, &options).unwrap();
            prop_assert!(report.checks >= report.rounds);
        }
    }

    #[test]
    fn counter_invariant_after_each_step(a in arena_strategy(6, 3)) {
        let mut solver = SeqSolver::new(&a, WorklistOrder::Fifo);
        loop {
            prop_assert!(solver.check_counter_invariant());
            prop_assert!(solver.check_worklist_complete());
            if !solver.step().unwrap() {
                break;
            }
        }
        prop_assert!(solver.is_done());
    }

    #[test]
    fn strategies_are_winning(a in arena_strategy(6, 3)) {
        let report = solve_seq(&a).unwrap();
        let sigma = extract_strategy(&report.measure, &a).unwrap();
        prop_assert_eq!(verify_strategy(&a, &sigma, &report.w0), Ok(true));
        prop_assert_eq!(winning_set_by_strategy_enum(&a).unwrap(), report.w0);
    }

    #[test]
    fn reorder_is_invisible(a in arena_strategy(8, 4)) {
        let (sorted, perm) = a.reorder_by_owner();
        let p0 = a.num_player0();
        prop_assert!(sorted.vertices().all(|v| (v.index() < p0) == (sorted.owner(v) == Owner::Player0)));
        for v in a.vertices() {
            prop_assert_eq!(perm.old_id(perm.new_id(v)), v);
        }
        let back = perm.pull_back(solve_seq(&sorted).unwrap().measure.values());
        let direct = solve_seq(&a).unwrap().measure;
        prop_assert_eq!(back.as_slice(), direct.values());
    }

    #[test]
    fn csc_is_the_transpose(a in arena_strategy(10, 5)) {
        let mut forward: Vec<Edge> = a.edges().collect();
        let mut backward: Vec<Edge> = a.edges_from_csc().collect();
        let key = |e: &Edge| (e.src, e.dst, e.weight);
        forward.sort_by_key(key);
        backward.sort_by_key(key);
        prop_assert_eq!(forward, backward);
        let in_degrees: usize = a.vertices().map(|v| a.predecessors(v).len()).sum();
        prop_assert_eq!(in_degrees, a.num_edges());
    }

    #[test]
    fn max_credit_is_bounded(a in arena_strategy(10, 5)) {
        let w_max = a.stats().max_abs_weight;
        prop_assert!(a.max_credit() <= a.num_vertices() as u64 * w_max);
    }

    #[test]
    fn lift_is_monotone(
        a in arena_strategy(6, 3),
        lo in prop::collection::vec(0u64..12, 6),
        bump in prop::collection::vec(0u64..4, 6),
    ) {
        let n = a.num_vertices();
        let cap = a.max_credit();
        let hi: Vec<u64> = lo.iter().zip(&bump).map(|(x, b)| x + b).collect();
        let (f, g) = (values(n, &lo, cap), values(n, &hi, cap));
        prop_assert!(f.le(&g));
        for v in a.vertices() {
            prop_assert!(lift(&f, v, &a).unwrap() <= lift(&g, v, &a).unwrap());
        }
    }

    #[test]
    fn chunked_lift_matches_scalar(a in arena_strategy(6, 3), raw in prop::collection::vec(0u64..12, 6)) {
        let f = values(a.num_vertices(), &raw, a.max_credit());
        for v in a.vertices() {
            let scalar = lift(&f, v, &a).unwrap();
            for h in [1, 2, 4, 8, 16, 64] {
                prop_assert_eq!(lift_chunked(&f, v, &a, h).unwrap(), scalar);
            }
        }
    }

    #[test]
    fn documents_round_trip(a in arena_strategy(10, 6)) {
        let text = write_arena(&a);
        let back = parse_arena(&text).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(write_arena(&back), text);

        let doc = SolutionDocument::from_measure(solve_seq(&a).unwrap().measure, &a).unwrap();
        let sol = write_solution(&doc);
        prop_assert_eq!(parse_solution(&sol).unwrap(), doc);
    }

    #[test]
    fn generator_is_deterministic(seed in any::<u64>(), n in 1usize..40, d in 1usize..5, family in 0usize..3) {
        let family = [Family::Random, Family::CycleChain, Family::Clique][family];
        let spec = GenSpec { n, d, seed, family, ..Default::default() };
        let a = generate(&spec).unwrap();
        prop_assert_eq!(write_arena(&a), write_arena(&generate(&spec).unwrap()));
        prop_assert!(a.vertices().all(|v| a.out_degree(v) >= 1));
        prop_assert!(a.edges().all(|e| (spec.wmin..=spec.wmax).contains(&e.weight)));
    }
}

#[test]
fn chunk_size_follows_average_degree() {
    assert_eq!(par::chunk_size_for_degree(2.76), 2);
    assert_eq!(par::chunk_size_for_degree(1.16), 1);
    assert_eq!(par::chunk_size_for_degree(6.14), 4);
    assert_eq!(par::chunk_size_for_degree(0.2), 1);
}

#[test]
fn clique_of_zero_weights_is_free() {
    let spec = GenSpec {
        n: 3,
        wmin: 0,
        wmax: 0,
        family: Family::Clique,
        ..Default::default()
    };
    let a = generate(&spec).unwrap();
    assert_eq!(a.num_edges(), 9);
    let report = solve_seq(&a).unwrap();
    assert!(report
        .measure
        .values()
        .iter()
        .all(|&x| x == EnergyValue::ZERO));
    assert_eq!(min_credit_attractor(&a).unwrap(), report.measure);
}

#[test]
fn timeout_is_reported() {
    let a = generate(&GenSpec {
        n: 3000,
        d: 3,
        wmin: -10,
        wmax: 10,
        seed: 3,
        ..Default::default()
    })
    .unwrap();
    let expired = SolveOptions {
        deadline: Some(std::time::Instant::now()),
        ..Default::default()
    };
    let config = ParallelConfig::new(2, Mapping::PerVertex);
    for variant in [Variant::Seq, Variant::Sweep, Variant::Frontier] {
        assert_eq!(
            solve(&a, variant, &config, &expired).unwrap_err(),
            SolveError::TimedOut
        );
    }
}
