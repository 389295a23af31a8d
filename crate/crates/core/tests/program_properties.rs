mod common;

use common::programs::{bits, program};
use proptest::prelude::*;
use tol::elementary::instrument;
use tol::frontend::{format_program, parse};
use tol::ops::lower::{eval_atomic, lower_program};
use tol::{run_source, RunOptions};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn lowering_is_sound(seed in any::<u64>()) {
        let g = program(seed);
        let p = parse(&g.source).unwrap();
        let (name, tree) = lower_program(&p, &g.shapes).unwrap();
        let direct = run_source(&g.source, &g.inputs, &RunOptions::default()).unwrap();
        let want = direct.get(&name).unwrap();
        let got = eval_atomic(&tree, &g.inputs).unwrap();
        if g.integer {
            prop_assert_eq!(&got, want, "{}", g.source);
        } else {
            prop_assert!(got.approx_eq(want, 1e-9), "{}\n{} vs {}", g.source, got, want);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn runs_are_pure(seed in any::<u64>(), rs in any::<u64>()) {
        let g = program(seed);
        let opts = RunOptions { seed: rs, memo: true };
        let a = run_source(&g.source, &g.inputs, &opts).unwrap();
        let b = run_source(&g.source, &g.inputs, &opts).unwrap();
        prop_assert_eq!(a.outputs.len(), b.outputs.len());
        for ((n1, v1), (n2, v2)) in a.outputs.iter().zip(&b.outputs) {
            prop_assert_eq!(n1, n2);
            prop_assert_eq!(bits(v1), bits(v2));
        }
        prop_assert_eq!(a.report, b.report);
    }

    #[test]
    fn memo_changes_counts_not_values(seed in any::<u64>()) {
        let g = program(seed);
        let on = run_source(&g.source, &g.inputs, &RunOptions { seed: 0, memo: true }).unwrap();
        let off = run_source(&g.source, &g.inputs, &RunOptions { seed: 0, memo: false }).unwrap();
        for ((_, a), (_, b)) in on.outputs.iter().zip(&off.outputs) {
            prop_assert_eq!(bits(a), bits(b));
        }
        prop_assert!(off.report.total >= on.report.total);
    }

    #[test]
    fn extra_outputs_never_lower_the_count(seed in any::<u64>()) {
        let g = program(seed);
        let base = run_source(&g.source, &g.inputs, &RunOptions::default()).unwrap();
        let more = format!("{}extra:=reduce(map(x,add(*,1)),add,0)\n", g.source);
        let grown = run_source(&more, &g.inputs, &RunOptions::default()).unwrap();
        prop_assert!(grown.report.total >= base.report.total);
    }

    #[test]
    fn report_matches_instrumentation(seed in any::<u64>()) {
        let g = program(seed);
        instrument::reset();
        let out = run_source(&g.source, &g.inputs, &RunOptions::default()).unwrap();
        prop_assert_eq!(instrument::snapshot().0, out.report.total);
        prop_assert!(out.report.consistent());
    }

    #[test]
    fn format_round_trips(seed in any::<u64>()) {
        let g = program(seed);
        let p = parse(&g.source).unwrap();
        let text = format_program(&p);
        let q = parse(&text).unwrap();
        prop_assert!(p.same(&q), "{}", text);
        prop_assert_eq!(format_program(&q), text);
    }

    #[test]
    fn diagnostics_are_deterministic(src in "[a-z0-9()\\[\\],:=*+|' \n]{0,30}") {
        let a = parse(&src).map(|p| format_program(&p)).map_err(|e| e.to_string());
        let b = parse(&src).map(|p| format_program(&p)).map_err(|e| e.to_string());
        prop_assert_eq!(a, b);
    }
}

