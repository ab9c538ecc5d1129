//! Property tests tying the modules together: generated instances feed the
//! parser, the cascade engines, the solvers, and the ILP bridge, with the
//! definitional oracles from `common` as the reference.

mod common;

use std::collections::BTreeSet;
use std::time::Duration;

use proptest::prelude::*;

use common::{kill_sets_laminar, naive_final, oracle_exact_k};
use ridn::cascade::{cascade, kill_set, step};
use ridn::exact::{build_ilp, check_assignment, solve_exact, trace_to_assignment, ExactLimits};
use ridn::generator::{generate, GenSpec};
use ridn::ingest::{parse_idn, serialize_idn};
use ridn::model::{CaseClass, EntityId, Idn};
use ridn::solvers::{solve_case1, solve_heuristic, sweep, threshold, SweepMethod};

fn gen(case: CaseClass, size_a: usize, size_b: usize, seed: u64) -> Idn {
    generate(&GenSpec::new(case, size_a, size_b, seed)).expect("feasible spec")
}

/// Like [`gen`], optionally allowing same-side dependencies.
fn gen_mixed(case: CaseClass, size_a: usize, size_b: usize, seed: u64, cross: bool) -> Idn {
    let mut spec = GenSpec::new(case, size_a, size_b, seed);
    spec.cross_only = cross;
    generate(&spec).expect("feasible spec")
}

fn case_strategy() -> impl Strategy<Value = CaseClass> {
    prop_oneof![
        Just(CaseClass::CaseI),
        Just(CaseClass::CaseII),
        Just(CaseClass::CaseIII),
        Just(CaseClass::CaseIV),
    ]
}

fn rho_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.25), Just(0.5), Just(0.75), Just(1.0)]
}

fn subset(idn: &Idn, mask: u32) -> BTreeSet<EntityId> {
    idn.entities()
        .enumerate()
        .filter(|(i, _)| i < &32 && mask & (1 << i) != 0)
        .map(|(_, e)| e.clone())
        .collect()
}

fn roomy_limits() -> ExactLimits {
    ExactLimits {
        max_witness_size: 16,
        max_nodes: 50_000_000,
        time_budget: Duration::from_secs(120),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parse_serialize_round_trip(
        case in case_strategy(),
        sa in 1usize..8,
        sb in 1usize..8,
        seed in any::<u64>(),
        cross in any::<bool>(),
    ) {
        let idn = gen_mixed(case, sa, sb, seed, cross);
        let text = serialize_idn(&idn);
        let back = parse_idn(&text).expect("canonical text parses");
        prop_assert_eq!(back.idn, idn);
        prop_assert!(back.notes.is_empty());
    }

    #[test]
    fn cascade_agrees_with_iterated_step(
        case in case_strategy(),
        sa in 1usize..8,
        sb in 1usize..8,
        seed in any::<u64>(),
        mask in any::<u32>(),
        cross in any::<bool>(),
    ) {
        let idn = gen_mixed(case, sa, sb, seed, cross);
        let initial = subset(&idn, mask);
        let trace = cascade(&idn, &initial).unwrap();
        let mut cur = initial;
        for (t, recorded) in trace.steps.iter().enumerate() {
            prop_assert_eq!(recorded, &cur, "diverged at step {}", t);
            cur = step(&idn, &cur).unwrap();
        }
        prop_assert_eq!(&cur, trace.final_failed());
    }

    #[test]
    fn trace_is_monotone_and_times_align(
        case in case_strategy(),
        sa in 1usize..8,
        sb in 1usize..8,
        seed in any::<u64>(),
        mask in any::<u32>(),
    ) {
        let idn = gen(case, sa, sb, seed);
        let trace = cascade(&idn, &subset(&idn, mask)).unwrap();
        let steps = &trace.steps;
        prop_assert_eq!(&steps[0], &trace.initial);
        prop_assert!(steps.len() <= idn.len() + 2);
        for w in steps.windows(2).take(steps.len() - 2) {
            prop_assert!(w[0].is_subset(&w[1]) && w[0] != w[1]);
        }
        prop_assert_eq!(&steps[steps.len() - 2], &steps[steps.len() - 1]);
        for e in idn.entities() {
            let ft = trace.failure_time[e].time();
            let first = steps.iter().position(|s| s.contains(e));
            prop_assert_eq!(ft, first);
        }
    }

    #[test]
    fn closure_is_monotone_in_the_seed_set(
        case in case_strategy(),
        sa in 1usize..8,
        sb in 1usize..8,
        seed in any::<u64>(),
        m1 in any::<u32>(),
        extra in any::<u32>(),
    ) {
        let idn = gen(case, sa, sb, seed);
        let s1 = subset(&idn, m1);
        let s2 = subset(&idn, m1 | extra);
        let f1 = cascade(&idn, &s1).unwrap();
        let f2 = cascade(&idn, &s2).unwrap();
        prop_assert!(f1.final_failed().is_subset(f2.final_failed()));
    }

    #[test]
    fn cascading_a_fixpoint_adds_nothing(
        case in case_strategy(),
        sa in 1usize..8,
        sb in 1usize..8,
        seed in any::<u64>(),
        mask in any::<u32>(),
    ) {
        let idn = gen(case, sa, sb, seed);
        let steady = cascade(&idn, &subset(&idn, mask)).unwrap().final_failed().clone();
        let again = cascade(&idn, &steady).unwrap();
        prop_assert_eq!(again.steps.len(), 2);
        prop_assert_eq!(again.final_failed(), &steady);
    }

    #[test]
    fn kill_sets_contain_their_seed_and_match_the_oracle(
        case in case_strategy(),
        sa in 1usize..6,
        sb in 1usize..6,
        seed in any::<u64>(),
    ) {
        let idn = gen(case, sa, sb, seed);
        for e in idn.entities() {
            let ks = kill_set(&idn, e).unwrap();
            prop_assert!(ks.contains(e));
            let oracle = naive_final(&idn, &BTreeSet::from([e.clone()]));
            prop_assert_eq!(ks, oracle);
        }
    }

    #[test]
    fn heuristic_is_sound_bounded_and_prefix_stable(
        case in case_strategy(),
        sa in 1usize..9,
        sb in 1usize..9,
        seed in any::<u64>(),
    ) {
        let idn = gen(case, sa, sb, seed);
        let small = solve_heuristic(&idn, 0.5).unwrap();
        let large = solve_heuristic(&idn, 1.0).unwrap();
        for r in [&small, &large] {
            prop_assert!(r.final_failed.len() >= r.threshold);
            prop_assert_eq!(r.witness.len(), r.k + 1);
            prop_assert!(r.k < r.threshold);
            let closure = naive_final(&idn, &r.witness);
            prop_assert_eq!(&closure, &r.final_failed);
        }
        prop_assert!(large.selection.starts_with(&small.selection));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn case1_greedy_is_optimal(
        sa in 1usize..7,
        sb in 1usize..7,
        seed in any::<u64>(),
        rho in rho_strategy(),
    ) {
        let idn = gen(CaseClass::CaseI, sa, sb, seed);
        prop_assert!(kill_sets_laminar(&idn));
        let greedy = solve_case1(&idn, rho).unwrap();
        prop_assert_eq!(greedy.k, oracle_exact_k(&idn, rho));
        prop_assert!(greedy.final_failed.len() >= greedy.threshold);
    }

    #[test]
    fn heuristic_never_beats_exact(
        case in case_strategy(),
        sa in 1usize..6,
        sb in 1usize..6,
        seed in any::<u64>(),
        rho in rho_strategy(),
        cross in any::<bool>(),
    ) {
        let idn = gen_mixed(case, sa, sb, seed, cross);
        let h = solve_heuristic(&idn, rho).unwrap();
        let e = solve_exact(&idn, rho, &roomy_limits())
            .unwrap()
            .solved()
            .expect("roomy limits");
        prop_assert!(h.k >= e.k, "heuristic {} vs exact {}", h.k, e.k);
    }

    #[test]
    fn pruned_search_matches_the_unpruned_oracle(
        case in case_strategy(),
        sa in 1usize..7,
        sb in 1usize..7,
        seed in any::<u64>(),
        rho in rho_strategy(),
        cross in any::<bool>(),
    ) {
        let idn = gen_mixed(case, sa, sb, seed, cross);
        let got = solve_exact(&idn, rho, &roomy_limits())
            .unwrap()
            .solved()
            .expect("roomy limits");
        prop_assert_eq!(got.k, oracle_exact_k(&idn, rho));
        prop_assert!(got.final_failed.len() >= got.threshold);
        prop_assert_eq!(got.witness.len(), got.k + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_sweep_matches_cold_per_point_runs(
        case in case_strategy(),
        sa in 1usize..6,
        sb in 1usize..6,
        seed in any::<u64>(),
    ) {
        let idn = gen(case, sa, sb, seed);
        let grid: Vec<f64> = (1..=5).map(|i| i as f64 / 5.0).collect();
        let limits = roomy_limits();
        let swept = sweep(&idn, &grid, &SweepMethod::Exact(limits.clone())).unwrap();
        for &(rho, k) in &swept {
            let cold = solve_exact(&idn, rho, &limits).unwrap().solved().unwrap();
            prop_assert_eq!(k, cold.k, "rho {}", rho);
        }
        for w in swept.windows(2) {
            prop_assert!(w[0].1 <= w[1].1, "k must be non-decreasing in rho");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // The text readers must reject garbage with errors, never panic.

    #[test]
    fn idn_parser_never_panics(text in "[ -~\n]{0,200}") {
        let _ = parse_idn(&text);
    }

    #[test]
    fn lp_parser_never_panics(text in "[ -~\n]{0,200}") {
        let _ = ridn::exact::parse_lp(&text);
    }

    #[test]
    fn assignment_parser_never_panics(text in "[ -~\n]{0,200}") {
        let _ = ridn::exact::Assignment::parse_csv(&text);
    }

    #[test]
    fn idn_parser_never_panics_on_format_shaped_input(
        decl in "[ab1-9 .+#:<\\-\n]{0,120}",
    ) {
        let _ = parse_idn(&decl);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_assignments_satisfy_the_program(
        case in case_strategy(),
        sa in 1usize..8,
        sb in 1usize..8,
        seed in any::<u64>(),
        mask in 1u32..,
        cross in any::<bool>(),
    ) {
        let idn = gen_mixed(case, sa, sb, seed, cross);
        let initial = subset(&idn, mask);
        prop_assume!(!initial.is_empty());
        let trace = cascade(&idn, &initial).unwrap();
        let n = idn.len();
        let failed = trace.final_failed().len();
        let rho = failed as f64 / n as f64;
        prop_assert_eq!(threshold(rho, n).unwrap(), failed);

        let model = build_ilp(&idn, rho, n).unwrap();
        let asg = trace_to_assignment(&idn, &trace, n).unwrap();
        let report = check_assignment(&model, &asg).unwrap();
        prop_assert!(report.feasible, "violations: {:?}", report.violations);
        prop_assert_eq!(report.objective, initial.len() as i64);
    }

    #[test]
    fn overclaimed_failures_are_infeasible(
        case in case_strategy(),
        sa in 1usize..8,
        sb in 1usize..8,
        seed in any::<u64>(),
        mask in 1u32..,
    ) {
        let idn = gen(case, sa, sb, seed);
        let initial = subset(&idn, mask);
        prop_assume!(!initial.is_empty());
        let trace = cascade(&idn, &initial).unwrap();
        let survivor = idn
            .entities()
            .find(|e| !trace.final_failed().contains(e))
            .cloned();
        prop_assume!(survivor.is_some());
        let survivor = survivor.unwrap();

        let n = idn.len();
        let rho = trace.final_failed().len() as f64 / n as f64;
        let model = build_ilp(&idn, rho, n).unwrap();
        let mut asg = trace_to_assignment(&idn, &trace, n).unwrap();
        let prefix = match survivor.side {
            ridn::model::Side::A => "x",
            ridn::model::Side::B => "y",
        };
        asg.0.insert(format!("{prefix}_{}_{n}", survivor.name), true);
        let report = check_assignment(&model, &asg).unwrap();
        prop_assert!(!report.feasible, "claiming {survivor} failed must be rejected");
    }
}
