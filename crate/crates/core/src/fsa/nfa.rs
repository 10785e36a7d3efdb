use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::afw::{Afw, Guard};
use crate::formula::SymbolTable;
use crate::semantics::Trace;

/// One transition of the dealternated automaton.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NfaTransition {
    pub guard: Guard,
    pub target: usize,
}

/// Nondeterministic automaton whose states are obligation sets of an AFW.
///
/// The state whose obligation set is empty is absorbing and accepting: a
/// trace is accepted when some run sits in it after the last letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    symbols: SymbolTable,
    afw_labels: Vec<String>,
    states: Vec<BTreeSet<usize>>,
    initial: usize,
    transitions: Vec<Vec<NfaTransition>>,
}

impl Nfa {
    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    /// The AFW states pending in NFA state `q`.
    pub fn obligations(&self, q: usize) -> &BTreeSet<usize> {
        &self.states[q]
    }

    pub fn transitions(&self, q: usize) -> &[NfaTransition] {
        &self.transitions[q]
    }

    /// Index of the discharged state, if reachable.
    pub fn accepting_state(&self) -> Option<usize> {
        self.states.iter().position(BTreeSet::is_empty)
    }

    /// Readable label: the formulas of the pending obligations.
    pub fn label(&self, q: usize) -> String {
        let parts: Vec<&str> = self.states[q]
            .iter()
            .map(|&s| self.afw_labels[s].as_str())
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Dealternation: tracks the set of pending AFW states.
///
/// From an obligation set, every combination of one transition per pending
/// state whose guards are jointly satisfiable yields one NFA transition to
/// the union of the chosen successor sets. No subset pruning is applied, so
/// the result only depends on the automaton.
pub fn afw_to_nfa(a: &Afw) -> Nfa {
    let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let start = BTreeSet::from([a.initial()]);
    let mut states = vec![start.clone()];
    index.insert(start, 0);
    let mut transitions: Vec<Vec<NfaTransition>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(q) = queue.pop_front() {
        let mut partial: Vec<(Guard, BTreeSet<usize>)> = vec![(Guard::top(), BTreeSet::new())];
        for &s in &states[q] {
            let mut grown = Vec::new();
            for (g, succ) in &partial {
                for t in a.transitions(s) {
                    if let Some(g2) = g.conjoin(&t.guard) {
                        grown.push((g2, succ.union(&t.successors).copied().collect()));
                    }
                }
            }
            grown.sort();
            grown.dedup();
            partial = grown;
        }
        let mut row = Vec::with_capacity(partial.len());
        for (guard, target_set) in partial {
            let target = match index.get(&target_set) {
                Some(&t) => t,
                None => {
                    states.push(target_set.clone());
                    index.insert(target_set, states.len() - 1);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                }
            };
            row.push(NfaTransition { guard, target });
        }
        if transitions.len() <= q {
            transitions.resize(q + 1, Vec::new());
        }
        transitions[q] = row;
    }
    transitions.resize(states.len(), Vec::new());
    Nfa {
        symbols: a.symbols().clone(),
        afw_labels: a.labels().to_vec(),
        states,
        initial: 0,
        transitions,
    }
}

/// Subset simulation of the NFA on a trace.
pub fn nfa_accepts(n: &Nfa, t: &Trace) -> bool {
    let Some(accepting) = n.accepting_state() else {
        return false;
    };
    let mut current = BTreeSet::from([n.initial]);
    for i in 0..t.len() {
        let letter = crate::afw::letter_ids(&n.symbols, t.letter(i));
        let is_last = t.is_last(i);
        let mut next = BTreeSet::new();
        for &q in &current {
            for tr in &n.transitions[q] {
                if tr.guard.admits(&letter, is_last) {
                    next.insert(tr.target);
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        current = next;
    }
    current.contains(&accepting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afw::compile_afw;
    use crate::formula::parse_formula;

    fn nfa(s: &str) -> (Afw, Nfa) {
        let a = compile_afw(&parse_formula(s).unwrap());
        let n = afw_to_nfa(&a);
        (a, n)
    }

    #[test]
    fn running_example_obligation_sets() {
        let (a, n) = nfa("< ([ true* ] b)? > < true > a");
        let id = |label: &str| a.labels().iter().position(|l| l == label).unwrap();
        let phi = a.initial();
        let always_b = id("([ true* ] b)");
        let next_a = id("a");
        let sets: BTreeSet<BTreeSet<usize>> = (0..n.num_states())
            .map(|q| n.obligations(q).clone())
            .collect();
        let expected = BTreeSet::from([
            BTreeSet::from([phi]),
            BTreeSet::from([always_b, next_a]),
            BTreeSet::from([always_b]),
            BTreeSet::new(),
        ]);
        assert_eq!(sets, expected);
        assert_eq!(n.label(0), format!("{{{}}}", a.labels()[phi]));
    }

    #[test]
    fn true_has_two_states() {
        let (_, n) = nfa("tt");
        assert_eq!(n.num_states(), 2);
        let acc = n.accepting_state().unwrap();
        assert_eq!(n.transitions(acc), &[NfaTransition { guard: Guard::top(), target: acc }]);
    }

    #[test]
    fn false_has_no_accepting_state() {
        let (_, n) = nfa("ff");
        assert_eq!(n.num_states(), 1);
        assert!(n.accepting_state().is_none());
        assert!(!nfa_accepts(&n, &Trace::from_names(&[&[]]).unwrap()));
    }
}
