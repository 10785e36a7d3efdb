//! Definition-level satisfaction of LDLf over finite traces.
//!
//! This evaluator is deliberately naive: path programs are interpreted as
//! explicit relations over positions and stars are computed as fixpoints.
//! Every automaton construction in the crate is checked against it.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{desugar, nnf, Formula, PathExpr};

/// A letter: the atoms that hold at one position.
pub type Letter = BTreeSet<String>;

/// A finite, nonempty sequence of letters. Position `len() - 1` is the last one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Letter>", into = "Vec<Letter>")]
pub struct Trace {
    letters: Vec<Letter>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("traces must contain at least one letter")]
pub struct EmptyTrace;

impl Trace {
    pub fn new(letters: Vec<Letter>) -> Result<Self, EmptyTrace> {
        if letters.is_empty() {
            return Err(EmptyTrace);
        }
        Ok(Trace { letters })
    }

    /// Builds a trace from slices of atom names, e.g. `&[&["b"], &["a", "b"]]`.
    pub fn from_names(letters: &[&[&str]]) -> Result<Self, EmptyTrace> {
        Self::new(
            letters
                .iter()
                .map(|l| l.iter().map(|s| s.to_string()).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter(&self, i: usize) -> &Letter {
        &self.letters[i]
    }

    pub fn is_last(&self, i: usize) -> bool {
        i + 1 == self.letters.len()
    }

    pub fn holds(&self, i: usize, atom: &str) -> bool {
        self.letters[i].contains(atom)
    }

    /// The first `len` letters.
    pub fn prefix(&self, len: usize) -> Result<Trace, EmptyTrace> {
        Trace::new(self.letters[..len.min(self.letters.len())].to_vec())
    }
}

impl TryFrom<Vec<Letter>> for Trace {
    type Error = EmptyTrace;

    fn try_from(letters: Vec<Letter>) -> Result<Self, Self::Error> {
        Trace::new(letters)
    }
}

impl From<Trace> for Vec<Letter> {
    fn from(t: Trace) -> Self {
        t.letters
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, letter) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{{")?;
            for (j, a) in letter.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("formula contains LTLf sugar; desugar it first: {0}")]
    Sugar(String),
    #[error("position {position} is outside a trace of length {len}")]
    Position { position: usize, len: usize },
}

/// `t, i |= f` for a formula in core form.
pub fn eval(f: &Formula, t: &Trace, i: usize) -> Result<bool, EvalError> {
    if i >= t.len() {
        return Err(EvalError::Position {
            position: i,
            len: t.len(),
        });
    }
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => t.holds(i, a),
        Formula::Not(g) => !eval(g, t, i)?,
        Formula::And(l, r) => eval(l, t, i)? && eval(r, t, i)?,
        Formula::Or(l, r) => eval(l, t, i)? || eval(r, t, i)?,
        Formula::Diamond(p, g) => {
            let rel = path_relation(p, t)?;
            let mut found = false;
            for &(_, j) in rel.range((i, 0)..=(i, t.len())) {
                if j < t.len() && eval(g, t, j)? {
                    found = true;
                    break;
                }
            }
            found
        }
        Formula::Box(p, g) => {
            let rel = path_relation(p, t)?;
            let mut all = true;
            for &(_, j) in rel.range((i, 0)..=(i, t.len())) {
                if j < t.len() && !eval(g, t, j)? {
                    all = false;
                    break;
                }
            }
            all
        }
        sugar => return Err(EvalError::Sugar(sugar.to_string())),
    })
}

/// The pairs `(i, j)`, `0 <= i <= j <= len(t)`, such that the program can
/// move from position `i` to position `j`.
///
/// Position `len(t)` is the end of the trace, reachable only by stepping off
/// the last letter. No formula is evaluated there, so tests hold at the end
/// vacuously; modalities ignore pairs that land on it.
pub fn path_relation(p: &PathExpr, t: &Trace) -> Result<BTreeSet<(usize, usize)>, EvalError> {
    let n = t.len();
    Ok(match p {
        PathExpr::Prop(f) => {
            let mut rel = BTreeSet::new();
            for i in 0..n {
                if eval(f, t, i)? {
                    rel.insert((i, i + 1));
                }
            }
            rel
        }
        PathExpr::Test(f) => {
            let mut rel = BTreeSet::from([(n, n)]);
            for i in 0..n {
                if eval(f, t, i)? {
                    rel.insert((i, i));
                }
            }
            rel
        }
        PathExpr::Seq(l, r) => compose(&path_relation(l, t)?, &path_relation(r, t)?),
        PathExpr::Alt(l, r) => {
            let mut rel = path_relation(l, t)?;
            rel.extend(path_relation(r, t)?);
            rel
        }
        PathExpr::Star(q) => {
            let base = path_relation(q, t)?;
            let mut rel: BTreeSet<(usize, usize)> = (0..=n).map(|i| (i, i)).collect();
            loop {
                let next: BTreeSet<_> = rel.union(&compose(&rel, &base)).copied().collect();
                if next.len() == rel.len() {
                    break rel;
                }
                rel = next;
            }
        }
    })
}

fn compose(
    a: &BTreeSet<(usize, usize)>,
    b: &BTreeSet<(usize, usize)>,
) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for &(i, k) in a {
        for &(_, j) in b.range((k, 0)..=(k, usize::MAX)) {
            out.insert((i, j));
        }
    }
    out
}

/// Whether `t` is a model of `f`. Sugar is removed internally.
pub fn accepts_semantics(f: &Formula, t: &Trace) -> bool {
    eval(&nnf(&desugar(f)), t, 0).expect("normalized formulas are core and position 0 exists")
}

/// Every trace over `atoms` of length `1..=max_len`, shortest first. Empty
/// when `max_len` is zero.
///
/// Within one length, traces are ordered by counting in base `2^|atoms|`
/// with the first letter as the most significant digit, where a letter's
/// value has bit `k` set when `atoms[k]` holds.
pub fn enumerate_traces(atoms: &[String], max_len: usize) -> impl Iterator<Item = Trace> + '_ {
    assert!(atoms.len() < 16, "alphabet too large to enumerate");
    let letters = 1usize << atoms.len();
    (1..=max_len).flat_map(move |len| {
        let total = letters.pow(len as u32);
        (0..total).map(move |mut code| {
            let mut seq = vec![Letter::new(); len];
            for slot in seq.iter_mut().rev() {
                let value = code % letters;
                code /= letters;
                *slot = atoms
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| value >> k & 1 == 1)
                    .map(|(_, a)| a.clone())
                    .collect();
            }
            Trace::new(seq).expect("length is at least one")
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn tr(letters: &[&[&str]]) -> Trace {
        Trace::from_names(letters).unwrap()
    }

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    const RUNNING: &str = "< ([ true* ] b)? > < true > a";

    #[test]
    fn running_example_models() {
        let f = desugar(&parse_formula(RUNNING).unwrap());
        assert!(eval(&f, &tr(&[&["b"], &["a", "b"]]), 0).unwrap());
        assert!(!eval(&f, &tr(&[&["b"], &["a"]]), 0).unwrap());
        assert!(!eval(&f, &tr(&[&["b"]]), 0).unwrap());
        assert!(accepts_semantics(&parse_formula("G b & X a").unwrap(), &tr(&[&["b"], &["a", "b"]])));
    }

    #[test]
    fn tt_holds_everywhere() {
        let t = tr(&[&[], &["a"], &[]]);
        for i in 0..3 {
            assert!(eval(&Formula::True, &t, i).unwrap());
        }
    }

    #[test]
    fn sugar_is_rejected() {
        let f = parse_formula("X a").unwrap();
        assert!(matches!(eval(&f, &tr(&[&[]]), 0), Err(EvalError::Sugar(_))));
        assert!(matches!(
            eval(&Formula::True, &tr(&[&[]]), 1),
            Err(EvalError::Position { .. })
        ));
    }

    #[test]
    fn step_relation() {
        let t = tr(&[&[], &[]]);
        let rel = path_relation(&PathExpr::step(), &t).unwrap();
        assert_eq!(rel, BTreeSet::from([(0, 1), (1, 2)]));
    }

    #[test]
    fn test_relation_does_not_move() {
        let t = tr(&[&["a"], &[], &[]]);
        let rel = path_relation(&PathExpr::Test(Formula::True), &t).unwrap();
        assert_eq!(rel, (0..=3).map(|i| (i, i)).collect());
    }

    #[test]
    fn star_relation_is_reflexive_transitive() {
        let t = tr(&[&[], &[]]);
        let rel = path_relation(&PathExpr::star(PathExpr::step()), &t).unwrap();
        let expected: BTreeSet<_> = (0..=2).flat_map(|i| (i..=2).map(move |j| (i, j))).collect();
        assert_eq!(rel, expected);
    }

    #[test]
    fn last_position_boundary() {
        let t = tr(&[&[], &[], &[]]);
        let next_tt = parse_formula("< true > tt").unwrap();
        let last = desugar(&Formula::Last);
        for i in 0..3 {
            assert_eq!(eval(&next_tt, &t, i).unwrap(), i < 2);
            assert_eq!(eval(&last, &t, i).unwrap(), i == 2);
        }
    }

    #[test]
    fn trace_counts() {
        assert_eq!(enumerate_traces(&names(&["a"]), 1).count(), 2);
        assert_eq!(enumerate_traces(&names(&["a", "b"]), 2).count(), 20);
        let none: Vec<_> = enumerate_traces(&[], 2).collect();
        assert_eq!(none, vec![tr(&[&[]]), tr(&[&[], &[]])]);
        let first: Vec<_> = enumerate_traces(&names(&["a"]), 1).collect();
        assert_eq!(first, vec![tr(&[&[]]), tr(&[&["a"]])]);
    }

    #[test]
    fn empty_trace_rejected() {
        assert_eq!(Trace::new(vec![]), Err(EmptyTrace));
        assert!(serde_json::from_str::<Trace>("[]").is_err());
        let t: Trace = serde_json::from_str(r#"[["b"],["a","b"]]"#).unwrap();
        assert_eq!(t.len(), 2);
    }
}
