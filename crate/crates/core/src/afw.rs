//! Alternating finite automata on finite words.
//!
//! States are formulas of the unfolding closure. Each state owns a list of
//! alternative transitions; a transition is a conjunction of literal
//! conditions on the current letter (plus a condition on the `last` flag)
//! together with a set of successor states that must *all* accept the rest
//! of the trace. A transition with no successors discharges its state.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::formula::{negate, nnf, render, AtomId, Formula, PathExpr, SymbolTable};
use crate::semantics::{Letter, Trace};

/// Constraint on the position flag `last`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub enum LastCondition {
    #[default]
    Unconstrained,
    Required,
    Forbidden,
}

impl LastCondition {
    pub fn admits(self, is_last: bool) -> bool {
        match self {
            LastCondition::Unconstrained => true,
            LastCondition::Required => is_last,
            LastCondition::Forbidden => !is_last,
        }
    }

    fn meet(self, other: LastCondition) -> Option<LastCondition> {
        use LastCondition::*;
        match (self, other) {
            (Unconstrained, x) | (x, Unconstrained) => Some(x),
            (x, y) if x == y => Some(x),
            _ => None,
        }
    }

    /// True when every flag value admitted by `other` is admitted by `self`.
    fn weaker_or_equal(self, other: LastCondition) -> bool {
        self == LastCondition::Unconstrained || self == other
    }
}

/// A satisfiable conjunction of atom literals and a `last` condition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Guard {
    pub pos: BTreeSet<AtomId>,
    pub neg: BTreeSet<AtomId>,
    pub last: LastCondition,
}

impl Guard {
    pub fn top() -> Self {
        Guard::default()
    }

    pub fn with_last(last: LastCondition) -> Self {
        Guard {
            last,
            ..Guard::default()
        }
    }

    pub fn literal(atom: AtomId, positive: bool) -> Self {
        let mut g = Guard::default();
        if positive {
            g.pos.insert(atom);
        } else {
            g.neg.insert(atom);
        }
        g
    }

    /// Conjunction, or `None` when contradictory.
    pub fn conjoin(&self, other: &Guard) -> Option<Guard> {
        let last = self.last.meet(other.last)?;
        let pos: BTreeSet<_> = self.pos.union(&other.pos).copied().collect();
        let neg: BTreeSet<_> = self.neg.union(&other.neg).copied().collect();
        if !pos.is_disjoint(&neg) {
            return None;
        }
        Some(Guard { pos, neg, last })
    }

    /// Whether a letter (as atom ids) at a position with the given flag
    /// satisfies the guard.
    pub fn admits(&self, letter: &BTreeSet<AtomId>, is_last: bool) -> bool {
        self.last.admits(is_last)
            && self.pos.is_subset(letter)
            && self.neg.is_disjoint(letter)
    }

    /// True when `self` is implied by `other`.
    pub fn weaker_or_equal(&self, other: &Guard) -> bool {
        self.pos.is_subset(&other.pos)
            && self.neg.is_subset(&other.neg)
            && self.last.weaker_or_equal(other.last)
    }

    pub fn is_top(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty() && self.last == LastCondition::Unconstrained
    }

    /// Human-readable conjunction, e.g. `b & ~last`.
    pub fn describe(&self, symbols: &SymbolTable) -> String {
        let mut parts: Vec<String> = Vec::new();
        for id in &self.pos {
            parts.push(symbols.name(*id).unwrap_or("?").to_string());
        }
        for id in &self.neg {
            parts.push(format!("~{}", symbols.name(*id).unwrap_or("?")));
        }
        match self.last {
            LastCondition::Required => parts.push("last".into()),
            LastCondition::Forbidden => parts.push("~last".into()),
            LastCondition::Unconstrained => {}
        }
        if parts.is_empty() {
            "true".into()
        } else {
            parts.join(" & ")
        }
    }
}

/// One alternative of a state's transition relation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Transition {
    pub guard: Guard,
    /// Universal successor set, as state indices.
    pub successors: BTreeSet<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Stats {
    pub states: usize,
    pub transitions: usize,
    pub max_successors: usize,
    pub alphabet: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AfwError {
    #[error("initial state {0} does not exist")]
    BadInitial(usize),
    #[error("state {state} has a transition to missing state {target}")]
    DanglingSuccessor { state: usize, target: usize },
    #[error("state {state} has a transition on unknown atom id {atom}")]
    UnknownAtom { state: usize, atom: AtomId },
    #[error("state {0} has a contradictory transition")]
    Contradiction(usize),
    #[error("state labels are not distinct: {0}")]
    DuplicateLabel(String),
    #[error("{labels} state labels for {rows} transition rows")]
    Shape { labels: usize, rows: usize },
}

/// An alternating automaton in disjunctive transition normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Afw {
    symbols: SymbolTable,
    labels: Vec<String>,
    initial: usize,
    transitions: Vec<Vec<Transition>>,
}

impl Afw {
    /// Assembles an automaton, checking its structural invariants.
    pub fn from_parts(
        symbols: SymbolTable,
        labels: Vec<String>,
        initial: usize,
        transitions: Vec<Vec<Transition>>,
    ) -> Result<Self, AfwError> {
        if labels.len() != transitions.len() {
            return Err(AfwError::Shape {
                labels: labels.len(),
                rows: transitions.len(),
            });
        }
        if initial >= labels.len() {
            return Err(AfwError::BadInitial(initial));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(AfwError::DuplicateLabel(l.clone()));
            }
        }
        for (state, row) in transitions.iter().enumerate() {
            for t in row {
                if let Some(&target) = t.successors.iter().find(|&&s| s >= labels.len()) {
                    return Err(AfwError::DanglingSuccessor { state, target });
                }
                if let Some(&atom) = t.guard.pos.iter().chain(&t.guard.neg).find(|&&a| symbols.name(a).is_none()) {
                    return Err(AfwError::UnknownAtom { state, atom });
                }
                if !t.guard.pos.is_disjoint(&t.guard.neg) {
                    return Err(AfwError::Contradiction(state));
                }
            }
        }
        Ok(Afw {
            symbols,
            labels,
            initial,
            transitions,
        })
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn transitions(&self, state: usize) -> &[Transition] {
        &self.transitions[state]
    }

    /// Letter as the ids of its atoms; atoms missing from the symbol table
    /// are dropped.
    pub fn letter_ids(&self, letter: &Letter) -> BTreeSet<AtomId> {
        letter_ids(&self.symbols, letter)
    }

    /// States reachable from the initial state, in breadth-first order.
    pub fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_states()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for t in &self.transitions[q] {
                for &s in &t.successors {
                    if !seen[s] {
                        seen[s] = true;
                        queue.push_back(s);
                    }
                }
            }
        }
        order
    }
}

pub(crate) fn letter_ids(symbols: &SymbolTable, letter: &Letter) -> BTreeSet<AtomId> {
    letter.iter().filter_map(|a| symbols.id(a)).collect()
}

/// Compiles any formula (sugar allowed) into an alternating automaton whose
/// language is the formula's set of models.
pub fn compile_afw(f: &Formula) -> Afw {
    let symbols = SymbolTable::from_formula(f);
    let root = nnf(f);
    let mut builder = Builder {
        symbols: &symbols,
        marks: Vec::new(),
    };
    let mut index: BTreeMap<Formula, usize> = BTreeMap::new();
    let mut states: Vec<Formula> = vec![root.clone()];
    index.insert(root, 0);
    let mut transitions = Vec::new();
    let mut next = 0;
    while next < states.len() {
        let clauses = builder.delta(&states[next].clone());
        let mut row = Vec::with_capacity(clauses.len());
        for c in clauses {
            let mut successors = BTreeSet::new();
            for s in c.succ {
                let id = *index.entry(s.clone()).or_insert_with(|| {
                    states.push(s);
                    states.len() - 1
                });
                successors.insert(id);
            }
            row.push(Transition {
                guard: c.guard,
                successors,
            });
        }
        transitions.push(row);
        next += 1;
    }
    Afw {
        labels: states.iter().map(render).collect(),
        symbols,
        initial: 0,
        transitions,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Clause {
    guard: Guard,
    succ: BTreeSet<Formula>,
}

impl Clause {
    fn top() -> Self {
        Clause {
            guard: Guard::top(),
            succ: BTreeSet::new(),
        }
    }

    fn guard(guard: Guard) -> Self {
        Clause {
            guard,
            succ: BTreeSet::new(),
        }
    }

    fn conjoin(&self, other: &Clause) -> Option<Clause> {
        Some(Clause {
            guard: self.guard.conjoin(&other.guard)?,
            succ: self.succ.union(&other.succ).cloned().collect(),
        })
    }

    fn subsumes(&self, other: &Clause) -> bool {
        self.guard.weaker_or_equal(&other.guard) && self.succ.is_subset(&other.succ)
    }
}

struct Builder<'a> {
    symbols: &'a SymbolTable,
    /// Star modalities entered during the current expansion without an
    /// intervening step.
    marks: Vec<Formula>,
}

impl Builder<'_> {
    fn delta(&mut self, f: &Formula) -> Vec<Clause> {
        simplify(self.expand(f))
    }

    fn atom(&self, name: &str) -> AtomId {
        self.symbols
            .id(name)
            .expect("symbol table built from the same formula")
    }

    fn expand(&mut self, f: &Formula) -> Vec<Clause> {
        match f {
            Formula::True => vec![Clause::top()],
            Formula::False => vec![],
            Formula::Atom(a) => vec![Clause::guard(Guard::literal(self.atom(a), true))],
            Formula::Not(g) => match &**g {
                Formula::Atom(a) => vec![Clause::guard(Guard::literal(self.atom(a), false))],
                _ => unreachable!("input is in negation normal form"),
            },
            Formula::And(l, r) => {
                let l = self.expand(l);
                let r = self.expand(r);
                product(&l, &r)
            }
            Formula::Or(l, r) => {
                let mut out = self.expand(l);
                out.extend(self.expand(r));
                out
            }
            Formula::Diamond(p, g) => self.diamond(f, p, g),
            Formula::Box(p, g) => self.boxed(f, p, g),
            _ => unreachable!("input is desugared"),
        }
    }

    fn diamond(&mut self, whole: &Formula, p: &PathExpr, g: &Formula) -> Vec<Clause> {
        match p {
            PathExpr::Prop(psi) => {
                let mut out = Vec::new();
                for c in self.expand(psi) {
                    if let Some(step) = step_clause(&c.guard, LastCondition::Forbidden, g) {
                        out.push(step);
                    }
                }
                out
            }
            PathExpr::Test(psi) => {
                let t = self.expand(psi);
                let rest = self.expand(g);
                product(&t, &rest)
            }
            PathExpr::Seq(a, b) => {
                let inner = Formula::diamond((**b).clone(), g.clone());
                self.expand(&Formula::diamond((**a).clone(), inner))
            }
            PathExpr::Alt(a, b) => {
                let mut out = self.expand(&Formula::diamond((**a).clone(), g.clone()));
                out.extend(self.expand(&Formula::diamond((**b).clone(), g.clone())));
                out
            }
            PathExpr::Star(a) => {
                if self.marks.contains(whole) {
                    return vec![];
                }
                self.marks.push(whole.clone());
                let mut out = self.expand(g);
                out.extend(self.expand(&Formula::diamond((**a).clone(), whole.clone())));
                self.marks.pop();
                out
            }
        }
    }

    fn boxed(&mut self, whole: &Formula, p: &PathExpr, g: &Formula) -> Vec<Clause> {
        match p {
            PathExpr::Prop(psi) => {
                if *g == Formula::True {
                    return vec![Clause::top()];
                }
                let mut out = self.expand(&negate(psi));
                for c in self.expand(psi) {
                    if let Some(end) = c.guard.conjoin(&Guard::with_last(LastCondition::Required)) {
                        out.push(Clause::guard(end));
                    }
                    if let Some(step) = step_clause(&c.guard, LastCondition::Forbidden, g) {
                        out.push(step);
                    }
                }
                out
            }
            PathExpr::Test(psi) => {
                let mut out = self.expand(&negate(psi));
                out.extend(self.expand(g));
                out
            }
            PathExpr::Seq(a, b) => {
                let inner = Formula::boxed((**b).clone(), g.clone());
                self.expand(&Formula::boxed((**a).clone(), inner))
            }
            PathExpr::Alt(a, b) => {
                let l = self.expand(&Formula::boxed((**a).clone(), g.clone()));
                let r = self.expand(&Formula::boxed((**b).clone(), g.clone()));
                product(&l, &r)
            }
            PathExpr::Star(a) => {
                if self.marks.contains(whole) {
                    return vec![Clause::top()];
                }
                self.marks.push(whole.clone());
                let now = self.expand(g);
                let later = self.expand(&Formula::boxed((**a).clone(), whole.clone()));
                self.marks.pop();
                product(&now, &later)
            }
        }
    }
}

/// A step on `guard ∧ last` that leaves `target` as the obligation for the
/// next position. `tt` targets need no successor; `ff` targets kill the step.
fn step_clause(guard: &Guard, last: LastCondition, target: &Formula) -> Option<Clause> {
    let guard = guard.conjoin(&Guard::with_last(last))?;
    match target {
        Formula::False => None,
        Formula::True => Some(Clause::guard(guard)),
        _ => Some(Clause {
            guard,
            succ: BTreeSet::from([target.clone()]),
        }),
    }
}

fn product(l: &[Clause], r: &[Clause]) -> Vec<Clause> {
    let mut out = Vec::with_capacity(l.len() * r.len());
    for a in l {
        for b in r {
            if let Some(c) = a.conjoin(b) {
                out.push(c);
            }
        }
    }
    // Keep intermediate results small; the final list is simplified again.
    simplify(out)
}

/// Removes duplicates and clauses subsumed by a weaker one, keeping the
/// first occurrence order.
fn simplify(clauses: Vec<Clause>) -> Vec<Clause> {
    let mut out: Vec<Clause> = Vec::with_capacity(clauses.len());
    for c in clauses {
        if out.iter().any(|k| k.subsumes(&c)) {
            continue;
        }
        out.retain(|k| !c.subsumes(k));
        out.push(c);
    }
    out
}

/// Runs the obligation-set semantics of the automaton on `t`.
///
/// Starting from `{initial}`, every pending state picks one enabled
/// transition per letter and the union of the chosen successor sets becomes
/// the next obligation set. The trace is accepted when some run ends with no
/// pending obligation. Supersets of other frontier members are pruned since
/// they can only accept less.
pub fn afw_accepts(a: &Afw, t: &Trace) -> bool {
    let mut frontier: BTreeSet<BTreeSet<usize>> = BTreeSet::from([BTreeSet::from([a.initial])]);
    for i in 0..t.len() {
        if frontier.contains(&BTreeSet::new()) {
            return true;
        }
        let letter = a.letter_ids(t.letter(i));
        let is_last = t.is_last(i);
        let mut next = BTreeSet::new();
        for obligations in &frontier {
            for s in successor_sets(a, obligations, &letter, is_last) {
                next.insert(s);
            }
        }
        frontier = prune_supersets(next);
        if frontier.is_empty() {
            return false;
        }
    }
    frontier.contains(&BTreeSet::new())
}

/// All obligation sets reachable from `obligations` in one letter.
pub(crate) fn successor_sets(
    a: &Afw,
    obligations: &BTreeSet<usize>,
    letter: &BTreeSet<AtomId>,
    is_last: bool,
) -> BTreeSet<BTreeSet<usize>> {
    let mut partial: BTreeSet<BTreeSet<usize>> = BTreeSet::from([BTreeSet::new()]);
    for &q in obligations {
        let enabled: Vec<&Transition> = a.transitions[q]
            .iter()
            .filter(|t| t.guard.admits(letter, is_last))
            .collect();
        if enabled.is_empty() {
            return BTreeSet::new();
        }
        let mut grown = BTreeSet::new();
        for base in &partial {
            for t in &enabled {
                grown.insert(base.union(&t.successors).copied().collect());
            }
        }
        partial = grown;
    }
    partial
}

fn prune_supersets(sets: BTreeSet<BTreeSet<usize>>) -> BTreeSet<BTreeSet<usize>> {
    let mut by_size: Vec<BTreeSet<usize>> = sets.into_iter().collect();
    by_size.sort_by_key(|s| s.len());
    let mut kept: Vec<BTreeSet<usize>> = Vec::new();
    for s in by_size {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept.into_iter().collect()
}

/// Size measures over the reachable part of the automaton.
pub fn afw_stats(a: &Afw) -> Stats {
    let reachable = a.reachable();
    let mut stats = Stats {
        states: reachable.len(),
        alphabet: a.symbols.len(),
        ..Stats::default()
    };
    for q in reachable {
        stats.transitions += a.transitions[q].len();
        for t in &a.transitions[q] {
            stats.max_successors = stats.max_successors.max(t.successors.len());
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::semantics::{accepts_semantics, enumerate_traces};

    const RUNNING: &str = "< ([ true* ] b)? > < true > a";

    fn tr(letters: &[&[&str]]) -> Trace {
        Trace::from_names(letters).unwrap()
    }

    fn compile(s: &str) -> Afw {
        compile_afw(&parse_formula(s).unwrap())
    }

    #[test]
    fn running_example_structure() {
        let a = compile(RUNNING);
        let b = a.symbols().id("b").unwrap();
        let at = a.symbols().id("a").unwrap();
        assert_eq!(a.labels()[0], render(&parse_formula(RUNNING).unwrap()));
        assert_eq!(a.num_states(), 3);
        let always_b = a.labels().iter().position(|l| l == "([ true* ] b)").unwrap();
        let next_a = a.labels().iter().position(|l| l == "a").unwrap();

        let guard = |pos: &[AtomId], last| Guard {
            pos: pos.iter().copied().collect(),
            neg: BTreeSet::new(),
            last,
        };
        assert_eq!(
            a.transitions(0),
            &[Transition {
                guard: guard(&[b], LastCondition::Forbidden),
                successors: BTreeSet::from([always_b, next_a]),
            }]
        );
        let mut loops = a.transitions(always_b).to_vec();
        loops.sort();
        let mut expected = vec![
            Transition {
                guard: guard(&[b], LastCondition::Required),
                successors: BTreeSet::new(),
            },
            Transition {
                guard: guard(&[b], LastCondition::Forbidden),
                successors: BTreeSet::from([always_b]),
            },
        ];
        expected.sort();
        assert_eq!(loops, expected);
        assert_eq!(
            a.transitions(next_a),
            &[Transition {
                guard: guard(&[at], LastCondition::Unconstrained),
                successors: BTreeSet::new(),
            }]
        );
        let s = afw_stats(&a);
        assert_eq!((s.states, s.transitions, s.max_successors, s.alphabet), (3, 4, 2, 2));
    }

    #[test]
    fn running_example_runs() {
        let a = compile(RUNNING);
        assert!(afw_accepts(&a, &tr(&[&["b"], &["a", "b"]])));
        assert!(!afw_accepts(&a, &tr(&[&["b"]])));
        assert!(!afw_accepts(&a, &tr(&[&["b"], &["a"]])));
        assert!(afw_accepts(&a, &tr(&[&["b", "zzz"], &["a", "b"], &["b"]])));
    }

    #[test]
    fn true_automaton() {
        let a = compile("tt");
        assert_eq!(a.num_states(), 1);
        assert_eq!(a.transitions(0), &[Transition {
            guard: Guard::top(),
            successors: BTreeSet::new()
        }]);
        let s = afw_stats(&a);
        assert_eq!((s.states, s.transitions), (1, 1));
        assert!(afw_accepts(&a, &tr(&[&[]])));
        assert!(afw_accepts(&a, &tr(&[&["a"], &[]])));
    }

    #[test]
    fn false_automaton_has_no_transitions() {
        let a = compile("ff");
        assert_eq!(a.num_states(), 1);
        assert!(a.transitions(0).is_empty());
        assert!(!afw_accepts(&a, &tr(&[&[]])));
    }

    #[test]
    fn atom_matches_oracle() {
        let f = parse_formula("a").unwrap();
        let a = compile_afw(&f);
        let atoms = vec!["a".to_string(), "b".to_string()];
        for t in enumerate_traces(&atoms, 3) {
            assert_eq!(afw_accepts(&a, &t), accepts_semantics(&f, &t), "{t}");
            assert_eq!(afw_accepts(&a, &t), t.holds(0, "a"));
        }
    }

    #[test]
    fn test_loops_terminate() {
        for src in ["< (a?)* > b", "[ (a? + b?)* ] ff", "< ((a?)*)* ; true > tt", "[ (tt)?* ] a"] {
            let f = parse_formula(src).unwrap();
            let a = compile_afw(&f);
            let atoms = vec!["a".to_string(), "b".to_string()];
            for t in enumerate_traces(&atoms, 3) {
                assert_eq!(afw_accepts(&a, &t), accepts_semantics(&f, &t), "{src} on {t}");
            }
        }
    }

    #[test]
    fn transitions_are_consistent() {
        for src in ["a & ~a", "G (a | ~b) & F (b & ~a)", "[ (a & ~a) ] a", "a U ~a"] {
            let a = compile(src);
            for q in 0..a.num_states() {
                for t in a.transitions(q) {
                    assert!(t.guard.pos.is_disjoint(&t.guard.neg));
                }
            }
        }
    }

    #[test]
    fn from_parts_validates() {
        let sym = SymbolTable::from_formula(&parse_formula("a").unwrap());
        let t = Transition {
            guard: Guard::top(),
            successors: BTreeSet::from([3]),
        };
        assert!(matches!(
            Afw::from_parts(sym.clone(), vec!["x".into()], 0, vec![vec![t]]),
            Err(AfwError::DanglingSuccessor { .. })
        ));
        assert!(matches!(
            Afw::from_parts(sym.clone(), vec!["x".into()], 1, vec![vec![]]),
            Err(AfwError::BadInitial(1))
        ));
        let bad_atom = Transition {
            guard: Guard::literal(9, true),
            successors: BTreeSet::new(),
        };
        assert!(matches!(
            Afw::from_parts(sym, vec!["x".into()], 0, vec![vec![bad_atom]]),
            Err(AfwError::UnknownAtom { atom: 9, .. })
        ));
    }

    #[test]
    fn guard_algebra() {
        let a = Guard::literal(1, true);
        let na = Guard::literal(1, false);
        assert!(a.conjoin(&na).is_none());
        let last = Guard::with_last(LastCondition::Required);
        let not_last = Guard::with_last(LastCondition::Forbidden);
        assert!(last.conjoin(&not_last).is_none());
        let g = a.conjoin(&last).unwrap();
        assert!(a.weaker_or_equal(&g) && !g.weaker_or_equal(&a));
        assert!(g.admits(&BTreeSet::from([1, 2]), true));
        assert!(!g.admits(&BTreeSet::from([1]), false));
        let sym = SymbolTable::from_formula(&parse_formula("b").unwrap());
        assert_eq!(Guard::literal(1, true).conjoin(&not_last).unwrap().describe(&sym), "b & ~last");
    }
}
