use std::collections::{BTreeSet, VecDeque};

use crate::afw::{Guard, Stats};
use crate::formula::SymbolTable;
use crate::semantics::{Letter, Trace};

use super::dfa::Dfa;

/// True iff the DFA accepts no nonempty well-formed word.
pub fn is_empty(d: &Dfa) -> bool {
    !d.productive()[d.initial]
}

/// A minimum-length accepted trace, if any.
///
/// Each minterm is materialized as the letter holding exactly its positive
/// atoms.
pub fn shortest_witness(d: &Dfa) -> Option<Trace> {
    let ready_with = |q: usize| {
        (0..d.minterms.len()).find(|&m| d.accepting[d.step(q, Dfa::symbol(m, true))])
    };
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; d.num_states()];
    let mut seen = vec![false; d.num_states()];
    seen[d.initial] = true;
    let mut queue = VecDeque::from([d.initial]);
    while let Some(q) = queue.pop_front() {
        if let Some(last) = ready_with(q) {
            let mut minterms = vec![last];
            let mut cur = q;
            while let Some((prev, m)) = parent[cur] {
                minterms.push(m);
                cur = prev;
            }
            minterms.reverse();
            let letters = minterms.into_iter().map(|m| d.witness_letter(m)).collect();
            return Some(Trace::new(letters).expect("witness has a final letter"));
        }
        for m in 0..d.minterms.len() {
            let t = d.step(q, Dfa::symbol(m, false));
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some((q, m));
                queue.push_back(t);
            }
        }
    }
    None
}

fn translate(g: &Guard, from: &SymbolTable, to: &SymbolTable) -> Guard {
    let map = |ids: &BTreeSet<u32>| -> BTreeSet<u32> {
        ids.iter()
            .map(|&id| to.id(from.name(id).expect("guard atom in table")).expect("merged table"))
            .collect()
    };
    Guard {
        pos: map(&g.pos),
        neg: map(&g.neg),
        last: g.last,
    }
}

/// Shortest trace on which the two DFAs disagree, or `None` when they
/// accept the same well-formed words. Symbol tables may differ; atoms
/// unknown to one side are false for it.
pub fn distinguishing_trace(a: &Dfa, b: &Dfa) -> Option<Trace> {
    let symbols = a.symbols.merged(&b.symbols);
    // Jointly satisfiable minterm pairs, with a letter realizing each.
    let mut pairs: Vec<(usize, usize, Letter)> = Vec::new();
    for (i, ma) in a.minterms.iter().enumerate() {
        let ma = translate(ma, &a.symbols, &symbols);
        for (j, mb) in b.minterms.iter().enumerate() {
            if let Some(both) = ma.conjoin(&translate(mb, &b.symbols, &symbols)) {
                let letter = both
                    .pos
                    .iter()
                    .map(|&id| symbols.name(id).expect("merged table").to_string())
                    .collect();
                pairs.push((i, j, letter));
            }
        }
    }
    let nb = b.num_states();
    let index = |p: usize, q: usize| p * nb + q;
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; a.num_states() * nb];
    let mut seen = vec![false; a.num_states() * nb];
    let start = (a.initial, b.initial);
    seen[index(start.0, start.1)] = true;
    let mut queue = VecDeque::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        let last = pairs.iter().position(|&(i, j, _)| {
            a.accepting[a.step(p, Dfa::symbol(i, true))] != b.accepting[b.step(q, Dfa::symbol(j, true))]
        });
        if let Some(last) = last {
            let mut picks = vec![last];
            let mut cur = index(p, q);
            while let Some((prev, k)) = parent[cur] {
                picks.push(k);
                cur = prev;
            }
            picks.reverse();
            let letters = picks.into_iter().map(|k| pairs[k].2.clone()).collect();
            return Some(Trace::new(letters).expect("counterexample has a final letter"));
        }
        for (k, &(i, j, _)) in pairs.iter().enumerate() {
            let next = (a.step(p, Dfa::symbol(i, false)), b.step(q, Dfa::symbol(j, false)));
            let id = index(next.0, next.1);
            if !seen[id] {
                seen[id] = true;
                parent[id] = Some((index(p, q), k));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Language equality over well-formed words.
pub fn equivalent(a: &Dfa, b: &Dfa) -> bool {
    distinguishing_trace(a, b).is_none()
}

/// Size figures. Transitions count `(state, symbol)` pairs that do not lead
/// into a dead state; the alphabet is the number of minterms.
pub fn dfa_stats(d: &Dfa) -> Stats {
    let productive = d.productive();
    let alive = |q: usize| productive[q] || d.accepting[q];
    let transitions = (0..d.num_states())
        .map(|q| (0..d.num_symbols()).filter(|&s| alive(d.step(q, s))).count())
        .sum();
    Stats {
        states: d.num_states(),
        transitions,
        max_successors: usize::from(transitions > 0),
        alphabet: d.minterms.len(),
    }
}

/// Index of the first letter after which no continuation of the remaining
/// length reaches acceptance. `None` when the trace is accepted.
pub fn first_failure(d: &Dfa, t: &Trace) -> Option<usize> {
    let n = t.len();
    // can[k][q]: some word of exactly k more letters is accepted from q.
    let mut can = vec![d.accepting.clone()];
    for k in 1..=n {
        let prev = &can[k - 1];
        let row = (0..d.num_states())
            .map(|q| {
                (0..d.minterms.len()).any(|m| prev[d.step(q, Dfa::symbol(m, k == 1))])
            })
            .collect();
        can.push(row);
    }
    let mut q = d.initial;
    for i in 0..n {
        q = d.step(q, d.symbol_of(t.letter(i), t.is_last(i)));
        if !can[n - i - 1][q] {
            return Some(i);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afw::compile_afw;
    use crate::formula::parse_formula;
    use crate::fsa::{afw_to_nfa, minimize, nfa_to_dfa};
    use crate::semantics::accepts_semantics;

    fn dfa(s: &str) -> Dfa {
        minimize(&nfa_to_dfa(&afw_to_nfa(&compile_afw(&parse_formula(s).unwrap()))))
    }

    const EQ1: &str = "< ([ true* ] b)? > < true > a";

    #[test]
    fn emptiness() {
        assert!(is_empty(&dfa("a & ~a")));
        assert!(!is_empty(&dfa(EQ1)));
        assert!(is_empty(&dfa("LAST & X a")));
        assert!(is_empty(&dfa("ff")));
    }

    #[test]
    fn witnesses_are_shortest() {
        assert_eq!(shortest_witness(&dfa("< true > tt")).unwrap().len(), 2);
        assert_eq!(shortest_witness(&dfa("tt")).unwrap().len(), 1);
        assert!(shortest_witness(&dfa("a & ~a")).is_none());
        let w = shortest_witness(&dfa(EQ1)).unwrap();
        assert_eq!(w.len(), 2);
        assert!(accepts_semantics(&parse_formula(EQ1).unwrap(), &w));
    }

    #[test]
    fn equivalence_with_counterexample() {
        assert!(equivalent(&dfa(EQ1), &dfa("G b & X a")));
        let cex = distinguishing_trace(&dfa("a"), &dfa("b")).unwrap();
        assert_eq!(cex, Trace::from_names(&[&["a"]]).unwrap());
        assert!(!equivalent(&dfa("X a"), &dfa("wX a")));
        assert_eq!(distinguishing_trace(&dfa("X a"), &dfa("wX a")).unwrap().len(), 1);
    }

    #[test]
    fn first_failure_positions() {
        let d = dfa(EQ1);
        let t = |l: &[&[&str]]| Trace::from_names(l).unwrap();
        assert_eq!(first_failure(&d, &t(&[&["b"], &["a", "b"]])), None);
        assert_eq!(first_failure(&d, &t(&[&["a"], &["a", "b"]])), Some(0));
        assert_eq!(first_failure(&d, &t(&[&["b"], &["a"]])), Some(1));
        assert_eq!(first_failure(&d, &t(&[&["b"]])), Some(0));
        assert_eq!(first_failure(&d, &t(&[&["b"], &["a", "b"], &[]])), Some(2));
    }

    #[test]
    fn stats_of_running_example() {
        let s = dfa_stats(&dfa(EQ1));
        assert_eq!(s.states, 5);
        assert_eq!(s.max_successors, 1);
    }
}
