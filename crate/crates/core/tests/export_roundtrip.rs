use dynaut::afw::{afw_accepts, compile_afw};
use dynaut::export::{emit_asp_facts, emit_dot, parse_asp_facts, AutomatonView};
use dynaut::formula::random_formula;
use dynaut::fsa::{afw_to_nfa, dfa_accepts, minimize, nfa_to_dfa};
use dynaut::semantics::enumerate_traces;
use proptest::prelude::*;

fn atoms() -> Vec<String> {
    vec!["a".into(), "b".into()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn facts_round_trip(seed in any::<u64>()) {
        let f = random_formula(seed, 3, &atoms());
        let a = compile_afw(&f);
        let n = afw_to_nfa(&a);
        let d = minimize(&nfa_to_dfa(&n));
        for view in [AutomatonView::from(&a), AutomatonView::from(&n), AutomatonView::from(&d)] {
            let text = emit_asp_facts(&view);
            let back = parse_asp_facts(&text).unwrap();
            prop_assert_eq!(&back, view.automaton());
            prop_assert_eq!(emit_asp_facts(&AutomatonView::from(&back)), text);
            prop_assert_eq!(emit_dot(&view), emit_dot(&AutomatonView::from(&back)));
        }
    }

    #[test]
    fn parsed_views_run_like_sources(seed in any::<u64>()) {
        let f = random_formula(seed, 3, &atoms());
        let d = minimize(&nfa_to_dfa(&afw_to_nfa(&compile_afw(&f))));
        let back = parse_asp_facts(&emit_asp_facts(&AutomatonView::from(&d))).unwrap();
        for t in enumerate_traces(&atoms(), 4) {
            prop_assert_eq!(afw_accepts(&back, &t), dfa_accepts(&d, &t), "{} on {}", f, t);
        }
    }
}
