//! The determinization pipeline against the oracle.

use dynaut::afw::{afw_accepts, compile_afw};
use dynaut::formula::{parse_formula, random_formula};
use dynaut::fsa::{
    afw_to_nfa, dfa_accepts, distinguishing_trace, equivalent, first_failure, is_empty, minimize,
    nfa_accepts, nfa_to_dfa, shortest_witness,
};
use dynaut::semantics::{accepts_semantics, enumerate_traces, Trace};
use proptest::prelude::*;

fn atoms() -> Vec<String> {
    vec!["a".into(), "b".into()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn four_way_agreement(seed in any::<u64>()) {
        let f = random_formula(seed, 3, &atoms());
        let a = compile_afw(&f);
        let n = afw_to_nfa(&a);
        let d = nfa_to_dfa(&n);
        let m = minimize(&d);
        for t in enumerate_traces(&atoms(), 4) {
            let expected = accepts_semantics(&f, &t);
            prop_assert_eq!(afw_accepts(&a, &t), expected, "afw {} on {}", f, t);
            prop_assert_eq!(nfa_accepts(&n, &t), expected, "nfa {} on {}", f, t);
            prop_assert_eq!(dfa_accepts(&d, &t), expected, "dfa {} on {}", f, t);
            prop_assert_eq!(dfa_accepts(&m, &t), expected, "min {} on {}", f, t);
        }
        prop_assert!(equivalent(&d, &m));
        prop_assert_eq!(minimize(&m).num_states(), m.num_states());
    }

    #[test]
    fn witnesses_are_sound_and_shortest(seed in any::<u64>()) {
        let f = random_formula(seed, 3, &atoms());
        let d = minimize(&nfa_to_dfa(&afw_to_nfa(&compile_afw(&f))));
        match shortest_witness(&d) {
            None => {
                prop_assert!(is_empty(&d));
                for t in enumerate_traces(&atoms(), 4) {
                    prop_assert!(!accepts_semantics(&f, &t), "{} accepts {}", f, t);
                }
            }
            Some(w) => {
                prop_assert!(!is_empty(&d));
                prop_assert!(accepts_semantics(&f, &w), "{} rejects witness {}", f, w);
                for t in enumerate_traces(&atoms(), w.len() - 1) {
                    prop_assert!(!accepts_semantics(&f, &t), "{} shorter than {}", t, w);
                }
            }
        }
    }

    #[test]
    fn counterexamples_separate(s1 in any::<u64>(), s2 in any::<u64>()) {
        let f = random_formula(s1, 2, &atoms());
        let g = random_formula(s2, 2, &atoms());
        let df = minimize(&nfa_to_dfa(&afw_to_nfa(&compile_afw(&f))));
        let dg = minimize(&nfa_to_dfa(&afw_to_nfa(&compile_afw(&g))));
        match distinguishing_trace(&df, &dg) {
            Some(t) => prop_assert_ne!(accepts_semantics(&f, &t), accepts_semantics(&g, &t)),
            None => {
                for t in enumerate_traces(&atoms(), 4) {
                    prop_assert_eq!(accepts_semantics(&f, &t), accepts_semantics(&g, &t));
                }
            }
        }
    }

    #[test]
    fn first_failure_is_definitive(seed in any::<u64>()) {
        let f = random_formula(seed, 3, &atoms());
        let d = minimize(&nfa_to_dfa(&afw_to_nfa(&compile_afw(&f))));
        let traces: Vec<Trace> = enumerate_traces(&atoms(), 3).collect();
        for t in &traces {
            let verdict = first_failure(&d, t);
            prop_assert_eq!(verdict.is_none(), accepts_semantics(&f, t));
            if let Some(i) = verdict {
                // No trace of the same length sharing letters 0..=i is accepted,
                // but some sharing letters 0..i is.
                let same = |u: &Trace, k: usize| u.len() == t.len() && u.letters()[..k] == t.letters()[..k];
                prop_assert!(!traces.iter().any(|u| same(u, i + 1) && accepts_semantics(&f, u)));
                if i > 0 {
                    prop_assert!(traces.iter().any(|u| same(u, i) && accepts_semantics(&f, u)));
                }
            }
        }
    }
}

#[test]
fn running_example_over_all_traces_up_to_five() {
    let dynamic = parse_formula("< ([ true* ] b)? > < true > a").unwrap();
    let temporal = parse_formula("G b & X a").unwrap();
    let d = minimize(&nfa_to_dfa(&afw_to_nfa(&compile_afw(&dynamic))));
    let mut count = 0;
    for t in enumerate_traces(&atoms(), 5) {
        let expected = accepts_semantics(&dynamic, &t);
        assert_eq!(accepts_semantics(&temporal, &t), expected, "{t}");
        assert_eq!(dfa_accepts(&d, &t), expected, "{t}");
        count += 1;
    }
    // 4 + 16 + 64 + 256 + 1024
    assert_eq!(count, 1364);
}
