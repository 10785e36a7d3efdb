use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::afw::{Afw, Guard, LastCondition, Transition};
use crate::fsa::{Dfa, Nfa};

/// Which construction a view was taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewKind {
    Afw,
    Nfa,
    Dfa,
}

/// Read-only projection of any of the automata onto the alternating shape.
///
/// NFA and DFA transitions become singleton successor sets; transitions
/// into acceptance become transitions with no successors, and transitions
/// that can never lead to acceptance are left out. The obligation-set run of
/// the view therefore accepts exactly the traces the source accepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonView {
    kind: ViewKind,
    automaton: Afw,
}

impl AutomatonView {
    pub fn kind(&self) -> ViewKind {
        self.kind
    }

    pub fn automaton(&self) -> &Afw {
        &self.automaton
    }

    pub fn into_afw(self) -> Afw {
        self.automaton
    }
}

impl From<&Afw> for AutomatonView {
    fn from(a: &Afw) -> Self {
        AutomatonView {
            kind: ViewKind::Afw,
            automaton: a.clone(),
        }
    }
}

/// Keeps the states reachable from `initial` and renumbers them
/// breadth-first, so view ids are dense from 0.
fn compact(
    labels: Vec<String>,
    initial: usize,
    rows: Vec<Vec<Transition>>,
    symbols: &crate::formula::SymbolTable,
) -> Afw {
    let mut id: BTreeMap<usize, usize> = BTreeMap::from([(initial, 0)]);
    let mut order = vec![initial];
    let mut queue = VecDeque::from([initial]);
    while let Some(q) = queue.pop_front() {
        for t in &rows[q] {
            for &s in &t.successors {
                if let std::collections::btree_map::Entry::Vacant(slot) = id.entry(s) {
                    slot.insert(order.len());
                    order.push(s);
                    queue.push_back(s);
                }
            }
        }
    }
    let transitions = order
        .iter()
        .map(|&q| {
            rows[q]
                .iter()
                .map(|t| Transition {
                    guard: t.guard.clone(),
                    successors: t.successors.iter().map(|s| id[s]).collect(),
                })
                .collect()
        })
        .collect();
    let labels = order.iter().map(|&q| labels[q].clone()).collect();
    Afw::from_parts(symbols.clone(), labels, 0, transitions).expect("view of a valid automaton")
}

impl From<&Nfa> for AutomatonView {
    fn from(n: &Nfa) -> Self {
        let done = n.accepting_state();
        let rows = (0..n.num_states())
            .map(|q| {
                n.transitions(q)
                    .iter()
                    .map(|t| Transition {
                        guard: t.guard.clone(),
                        successors: if Some(t.target) == done {
                            BTreeSet::new()
                        } else {
                            BTreeSet::from([t.target])
                        },
                    })
                    .collect()
            })
            .collect();
        let labels = (0..n.num_states()).map(|q| n.label(q)).collect();
        AutomatonView {
            kind: ViewKind::Nfa,
            automaton: compact(labels, n.initial(), rows, n.symbols()),
        }
    }
}

impl From<&Dfa> for AutomatonView {
    fn from(d: &Dfa) -> Self {
        let productive = d.productive();
        let rows = (0..d.num_states())
            .map(|q| {
                let mut row = Vec::new();
                for (m, cube) in d.minterms().iter().enumerate() {
                    let next = d.step(q, Dfa::symbol(m, false));
                    if productive[next] {
                        row.push(Transition {
                            guard: Guard { last: LastCondition::Forbidden, ..cube.clone() },
                            successors: BTreeSet::from([next]),
                        });
                    }
                    if d.is_accepting(d.step(q, Dfa::symbol(m, true))) {
                        row.push(Transition {
                            guard: Guard { last: LastCondition::Required, ..cube.clone() },
                            successors: BTreeSet::new(),
                        });
                    }
                }
                row
            })
            .collect();
        let labels = (0..d.num_states()).map(|q| format!("q{q}")).collect();
        let mut automaton = compact(labels, d.initial(), rows, d.symbols());
        // Relabel after compaction so labels follow the dense ids.
        let relabelled = (0..automaton.num_states()).map(|q| format!("q{q}")).collect();
        let transitions = (0..automaton.num_states()).map(|q| automaton.transitions(q).to_vec()).collect();
        automaton = Afw::from_parts(automaton.symbols().clone(), relabelled, 0, transitions)
            .expect("relabelling keeps validity");
        AutomatonView {
            kind: ViewKind::Dfa,
            automaton,
        }
    }
}
