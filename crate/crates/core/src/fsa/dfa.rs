use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::afw::{letter_ids, Guard, LastCondition};
use crate::formula::{AtomId, SymbolTable};
use crate::semantics::{Letter, Trace};

use super::nfa::Nfa;

/// Splits the valuations of the tested atoms into disjoint cubes such that
/// every cube either implies or contradicts each input guard. `last`
/// conditions are ignored.
pub fn minterms<'a, I: IntoIterator<Item = &'a Guard>>(guards: I) -> Vec<Guard> {
    let mut cubes = vec![Guard::top()];
    let mut seen = BTreeSet::new();
    for g in guards {
        let g = Guard {
            pos: g.pos.clone(),
            neg: g.neg.clone(),
            last: LastCondition::Unconstrained,
        };
        if g.is_top() || !seen.insert(g.clone()) {
            continue;
        }
        let mut refined = Vec::with_capacity(cubes.len() * 2);
        for c in cubes {
            let Some(inside) = c.conjoin(&g) else {
                refined.push(c);
                continue;
            };
            if inside == c {
                refined.push(c);
                continue;
            }
            refined.push(inside);
            // c ∧ ¬g as disjoint cubes: the first literal of g that fails.
            let mut prefix = c.clone();
            let literals = g
                .pos
                .iter()
                .map(|&a| (a, true))
                .chain(g.neg.iter().map(|&a| (a, false)));
            for (atom, positive) in literals {
                if (positive && prefix.pos.contains(&atom)) || (!positive && prefix.neg.contains(&atom)) {
                    continue;
                }
                if let Some(out) = prefix.conjoin(&Guard::literal(atom, !positive)) {
                    refined.push(out);
                }
                prefix = match prefix.conjoin(&Guard::literal(atom, positive)) {
                    Some(p) => p,
                    None => break,
                };
            }
        }
        cubes = refined;
    }
    cubes
}

/// Deterministic automaton over `(minterm, last)` symbols.
///
/// Symbol `2 * m + l` is minterm `m` read with the last flag `l`. The
/// transition function is total; a trace is accepted when the state reached
/// after its final letter (read with `l = 1`) is accepting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub(crate) symbols: SymbolTable,
    pub(crate) minterms: Vec<Guard>,
    pub(crate) labels: Vec<String>,
    pub(crate) initial: usize,
    pub(crate) delta: Vec<Vec<usize>>,
    pub(crate) accepting: Vec<bool>,
}

impl Dfa {
    /// Assembles a DFA; `delta[q]` must have `2 * minterms.len()` entries.
    pub fn from_parts(
        symbols: SymbolTable,
        minterms: Vec<Guard>,
        labels: Vec<String>,
        initial: usize,
        delta: Vec<Vec<usize>>,
        accepting: Vec<bool>,
    ) -> Result<Self, String> {
        let n = labels.len();
        if delta.len() != n || accepting.len() != n {
            return Err("labels, transition rows and accepting flags differ in length".into());
        }
        if initial >= n {
            return Err(format!("initial state {initial} out of range"));
        }
        if minterms.iter().any(|m| m.last != LastCondition::Unconstrained) {
            return Err("minterms may not constrain `last`".into());
        }
        for row in &delta {
            if row.len() != 2 * minterms.len() || row.iter().any(|&t| t >= n) {
                return Err("malformed transition row".into());
            }
        }
        Ok(Dfa {
            symbols,
            minterms,
            labels,
            initial,
            delta,
            accepting,
        })
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn minterms(&self) -> &[Guard] {
        &self.minterms
    }

    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.minterms.len() * 2
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn label(&self, q: usize) -> &str {
        &self.labels[q]
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn step(&self, q: usize, symbol: usize) -> usize {
        self.delta[q][symbol]
    }

    pub fn symbol(minterm: usize, is_last: bool) -> usize {
        2 * minterm + usize::from(is_last)
    }

    /// Minterm covering a letter given as atom ids.
    pub fn minterm_of(&self, letter: &BTreeSet<AtomId>) -> usize {
        self.minterms
            .iter()
            .position(|m| m.admits(letter, false))
            .expect("minterms cover every valuation")
    }

    pub fn symbol_of(&self, letter: &Letter, is_last: bool) -> usize {
        Self::symbol(self.minterm_of(&letter_ids(&self.symbols, letter)), is_last)
    }

    /// Concrete letter for a minterm: its positive atoms.
    pub fn witness_letter(&self, minterm: usize) -> Letter {
        self.minterms[minterm]
            .pos
            .iter()
            .filter_map(|&id| self.symbols.name(id).map(str::to_string))
            .collect()
    }

    /// State after reading the first `len` letters of `t`, with the last
    /// flag set on position `t.len() - 1` only.
    pub fn run_prefix(&self, t: &Trace, len: usize) -> usize {
        let mut q = self.initial;
        for i in 0..len.min(t.len()) {
            q = self.delta[q][self.symbol_of(t.letter(i), t.is_last(i))];
        }
        q
    }

    /// `ready[q]`: some last-flagged symbol leads from `q` to acceptance.
    pub(crate) fn ready(&self) -> Vec<bool> {
        (0..self.num_states())
            .map(|q| {
                (0..self.minterms.len()).any(|m| self.accepting[self.delta[q][Self::symbol(m, true)]])
            })
            .collect()
    }

    /// States from which some nonempty well-formed word is accepted.
    pub fn productive(&self) -> Vec<bool> {
        let mut good = self.ready();
        loop {
            let mut changed = false;
            for q in 0..self.num_states() {
                if good[q] {
                    continue;
                }
                if (0..self.minterms.len()).any(|m| good[self.delta[q][Self::symbol(m, false)]]) {
                    good[q] = true;
                    changed = true;
                }
            }
            if !changed {
                return good;
            }
        }
    }

    /// States reachable from the initial state through unflagged letters,
    /// in breadth-first order.
    pub fn live_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            for m in 0..self.minterms.len() {
                let t = self.delta[q][Self::symbol(m, false)];
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
            i += 1;
        }
        order
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    /// A set of NFA states; the empty set is the rejecting sink.
    Set(BTreeSet<usize>),
    /// Entered by reading the final letter with a discharged run.
    Accept,
}

/// Subset construction over the minterm alphabet of the NFA's guards.
pub fn nfa_to_dfa(n: &Nfa) -> Dfa {
    let guards: Vec<&Guard> = (0..n.num_states())
        .flat_map(|q| n.transitions(q).iter().map(|t| &t.guard))
        .collect();
    let cubes = minterms(guards);
    let done = n.accepting_state();

    let mut index: BTreeMap<Key, usize> = BTreeMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut intern = |k: Key, keys: &mut Vec<Key>, queue: &mut VecDeque<usize>| -> usize {
        *index.entry(k.clone()).or_insert_with(|| {
            keys.push(k);
            queue.push_back(keys.len() - 1);
            keys.len() - 1
        })
    };
    let mut queue = VecDeque::new();
    let init = intern(Key::Set(BTreeSet::from([n.initial()])), &mut keys, &mut queue);
    while let Some(q) = queue.pop_front() {
        let mut row = vec![0; cubes.len() * 2];
        for (m, cube) in cubes.iter().enumerate() {
            for is_last in [false, true] {
                let target = match &keys[q] {
                    Key::Accept => Key::Set(BTreeSet::new()),
                    Key::Set(states) => {
                        let mut next = BTreeSet::new();
                        for &s in states {
                            for t in n.transitions(s) {
                                if t.guard.last.admits(is_last)
                                    && t.guard.pos.is_subset(&cube.pos)
                                    && t.guard.neg.is_subset(&cube.neg)
                                {
                                    next.insert(t.target);
                                }
                            }
                        }
                        if !is_last {
                            Key::Set(next)
                        } else if done.is_some_and(|d| next.contains(&d)) {
                            Key::Accept
                        } else {
                            Key::Set(BTreeSet::new())
                        }
                    }
                };
                row[Dfa::symbol(m, is_last)] = intern(target, &mut keys, &mut queue);
            }
        }
        if delta.len() <= q {
            delta.resize(q + 1, Vec::new());
        }
        delta[q] = row;
    }
    delta.resize(keys.len(), Vec::new());
    let labels = keys
        .iter()
        .map(|k| match k {
            Key::Accept => "accept".to_string(),
            Key::Set(s) => {
                let ids: Vec<String> = s.iter().map(|q| q.to_string()).collect();
                format!("{{{}}}", ids.join(","))
            }
        })
        .collect();
    Dfa {
        symbols: n.symbols().clone(),
        minterms: cubes,
        labels,
        initial: init,
        accepting: keys.iter().map(|k| *k == Key::Accept).collect(),
        delta,
    }
}

/// Runs the DFA on a trace.
pub fn dfa_accepts(d: &Dfa, t: &Trace) -> bool {
    d.accepting[d.run_prefix(t, t.len())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afw::compile_afw;
    use crate::formula::parse_formula;
    use crate::fsa::afw_to_nfa;

    fn dfa(s: &str) -> Dfa {
        nfa_to_dfa(&afw_to_nfa(&compile_afw(&parse_formula(s).unwrap())))
    }

    fn covers_exactly_once(cubes: &[Guard], atoms: &[AtomId]) {
        for code in 0..(1u32 << atoms.len()) {
            let letter: BTreeSet<AtomId> = atoms
                .iter()
                .enumerate()
                .filter(|(k, _)| code >> k & 1 == 1)
                .map(|(_, &a)| a)
                .collect();
            let hits = cubes.iter().filter(|c| c.admits(&letter, false)).count();
            assert_eq!(hits, 1, "letter {letter:?}");
        }
    }

    #[test]
    fn minterms_partition_valuations() {
        let g1 = Guard::literal(1, true).conjoin(&Guard::literal(2, false)).unwrap();
        let g2 = Guard::literal(2, true);
        let g3 = Guard::literal(3, false).conjoin(&Guard::with_last(LastCondition::Required)).unwrap();
        let cubes = minterms([&g1, &g2, &g3]);
        covers_exactly_once(&cubes, &[1, 2, 3]);
        for c in &cubes {
            for g in [&g1, &g2, &g3] {
                let g = Guard { last: LastCondition::Unconstrained, ..g.clone() };
                let implies = g.weaker_or_equal(c);
                let contradicts = c.conjoin(&g).is_none();
                assert!(implies ^ contradicts, "{c:?} vs {g:?}");
            }
        }
        assert_eq!(minterms([&Guard::top()]), vec![Guard::top()]);
    }

    #[test]
    fn false_reaches_single_sink() {
        let d = dfa("ff");
        let sinks: Vec<usize> = (0..d.num_states())
            .filter(|&q| (0..d.num_symbols()).all(|s| d.step(q, s) == q))
            .collect();
        assert_eq!(sinks.len(), 1);
        assert!(!d.is_accepting(sinks[0]));
        assert!(d.accepting.iter().all(|a| !a));
    }

    #[test]
    fn true_accepts_empty_letter() {
        let d = dfa("tt");
        assert!(dfa_accepts(&d, &Trace::from_names(&[&[]]).unwrap()));
    }

    #[test]
    fn running_example_verdicts() {
        let d = dfa("< ([ true* ] b)? > < true > a");
        let t = |l: &[&[&str]]| Trace::from_names(l).unwrap();
        assert!(dfa_accepts(&d, &t(&[&["b"], &["a", "b"]])));
        assert!(!dfa_accepts(&d, &t(&[&["b"], &["a"]])));
        assert!(!dfa_accepts(&d, &t(&[&["b"]])));
    }

    #[test]
    fn from_parts_checks_shape() {
        let sym = SymbolTable::new();
        assert!(Dfa::from_parts(sym.clone(), vec![Guard::top()], vec!["q".into()], 0, vec![vec![0, 0]], vec![true]).is_ok());
        assert!(Dfa::from_parts(sym.clone(), vec![Guard::top()], vec!["q".into()], 0, vec![vec![0]], vec![true]).is_err());
        assert!(Dfa::from_parts(sym, vec![Guard::top()], vec!["q".into()], 1, vec![vec![0, 0]], vec![true]).is_err());
    }
}
