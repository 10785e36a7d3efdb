//! LDLf formulas with LTLf sugar: syntax tree, concrete grammar, and the
//! rewrites (desugaring, negation normal form, closure) that feed the
//! automaton constructions.

mod parser;
mod random;
mod render;
mod symbols;
mod transform;

pub use parser::{parse_formula, ParseError, ParseErrorKind};
pub use random::random_formula;
pub use symbols::{AtomId, SymbolTable};
pub use transform::{closure, desugar, negate, nnf, subexpression_count};

use std::fmt;

/// Reserved words that can never be atom names.
pub const RESERVED: &[&str] = &["tt", "ff", "true", "false", "last", "wX"];

/// Returns true when `name` is a legal atom name: `[a-z][a-zA-Z0-9_]*` and
/// not a reserved word.
pub fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !RESERVED.contains(&name)
}

/// A formula of linear dynamic logic over finite traces.
///
/// `Next` through `Last` are LTLf sugar; [`desugar`] removes them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Diamond(Box<PathExpr>, Box<Formula>),
    Box(Box<PathExpr>, Box<Formula>),
    Next(Box<Formula>),
    WeakNext(Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Last,
}

/// A regular path program inside a modality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathExpr {
    /// One step, taken when the current letter satisfies a propositional formula.
    Prop(Formula),
    /// Stay in place if the formula holds.
    Test(Formula),
    Seq(Box<PathExpr>, Box<PathExpr>),
    Alt(Box<PathExpr>, Box<PathExpr>),
    Star(Box<PathExpr>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn diamond(p: PathExpr, f: Formula) -> Self {
        Formula::Diamond(Box::new(p), Box::new(f))
    }

    pub fn boxed(p: PathExpr, f: Formula) -> Self {
        Formula::Box(Box::new(p), Box::new(f))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn weak_next(f: Formula) -> Self {
        Formula::WeakNext(Box::new(f))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(Box::new(f))
    }

    pub fn until(l: Formula, r: Formula) -> Self {
        Formula::Until(Box::new(l), Box::new(r))
    }

    pub fn release(l: Formula, r: Formula) -> Self {
        Formula::Release(Box::new(l), Box::new(r))
    }

    /// Conjunction of all items, `tt` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of all items, `ff` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::False,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// True when the formula contains no LTLf sugar.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_core(),
            Formula::And(l, r) | Formula::Or(l, r) => l.is_core() && r.is_core(),
            Formula::Diamond(p, f) | Formula::Box(p, f) => p.is_core() && f.is_core(),
            Formula::Next(_)
            | Formula::WeakNext(_)
            | Formula::Eventually(_)
            | Formula::Always(_)
            | Formula::Until(..)
            | Formula::Release(..)
            | Formula::Last => false,
        }
    }

    /// True when the formula is in core form with negation only on atoms.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => matches!(**f, Formula::Atom(_)),
            Formula::And(l, r) | Formula::Or(l, r) => l.is_nnf() && r.is_nnf(),
            Formula::Diamond(p, f) | Formula::Box(p, f) => p.is_nnf() && f.is_nnf(),
            _ => false,
        }
    }

    /// Boolean combination of atoms and constants only.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_propositional(),
            Formula::And(l, r) | Formula::Or(l, r) => l.is_propositional() && r.is_propositional(),
            _ => false,
        }
    }

    /// Height of the syntax tree. Literals and step propositions add no
    /// level of their own; every other node, path nodes included, adds one.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Last => 1,
            Formula::Not(f) if matches!(**f, Formula::Atom(_)) => 1,
            Formula::Not(f)
            | Formula::Next(f)
            | Formula::WeakNext(f)
            | Formula::Eventually(f)
            | Formula::Always(f) => 1 + f.depth(),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Until(l, r)
            | Formula::Release(l, r) => 1 + l.depth().max(r.depth()),
            Formula::Diamond(p, f) | Formula::Box(p, f) => 1 + p.depth().max(f.depth()),
        }
    }

    /// Atom names in first textual occurrence order, without duplicates.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            Formula::Atom(a) => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            Formula::True | Formula::False | Formula::Last => {}
            Formula::Not(f)
            | Formula::Next(f)
            | Formula::WeakNext(f)
            | Formula::Eventually(f)
            | Formula::Always(f) => f.collect_atoms(out),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Until(l, r)
            | Formula::Release(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
            Formula::Diamond(p, f) | Formula::Box(p, f) => {
                p.collect_atoms(out);
                f.collect_atoms(out);
            }
        }
    }
}

impl PathExpr {
    /// The step program `true`.
    pub fn step() -> Self {
        PathExpr::Prop(Formula::True)
    }

    pub fn test(f: Formula) -> Self {
        PathExpr::Test(f)
    }

    pub fn seq(l: PathExpr, r: PathExpr) -> Self {
        PathExpr::Seq(Box::new(l), Box::new(r))
    }

    pub fn alt(l: PathExpr, r: PathExpr) -> Self {
        PathExpr::Alt(Box::new(l), Box::new(r))
    }

    pub fn star(p: PathExpr) -> Self {
        PathExpr::Star(Box::new(p))
    }

    pub fn is_core(&self) -> bool {
        match self {
            PathExpr::Prop(f) | PathExpr::Test(f) => f.is_core(),
            PathExpr::Seq(l, r) | PathExpr::Alt(l, r) => l.is_core() && r.is_core(),
            PathExpr::Star(p) => p.is_core(),
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            PathExpr::Prop(f) | PathExpr::Test(f) => f.is_nnf(),
            PathExpr::Seq(l, r) | PathExpr::Alt(l, r) => l.is_nnf() && r.is_nnf(),
            PathExpr::Star(p) => p.is_nnf(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            PathExpr::Prop(f) => f.depth(),
            PathExpr::Test(f) => 1 + f.depth(),
            PathExpr::Seq(l, r) | PathExpr::Alt(l, r) => 1 + l.depth().max(r.depth()),
            PathExpr::Star(p) => 1 + p.depth(),
        }
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            PathExpr::Prop(f) | PathExpr::Test(f) => f.collect_atoms(out),
            PathExpr::Seq(l, r) | PathExpr::Alt(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
            PathExpr::Star(p) => p.collect_atoms(out),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render(self))
    }
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render_path(self))
    }
}

pub use render::{render, render_path};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_lexeme() {
        assert!(is_atom_name("a"));
        assert!(is_atom_name("robot_1Up"));
        assert!(!is_atom_name("A"));
        assert!(!is_atom_name("1a"));
        assert!(!is_atom_name(""));
        assert!(!is_atom_name("last"));
        assert!(!is_atom_name("tt"));
        assert!(!is_atom_name("a-b"));
    }

    #[test]
    fn atoms_in_textual_order() {
        let f = Formula::and(
            Formula::until(Formula::atom("q"), Formula::atom("p")),
            Formula::atom("q"),
        );
        assert_eq!(f.atoms(), vec!["q".to_string(), "p".to_string()]);
    }

    #[test]
    fn core_and_nnf_predicates() {
        let sugar = Formula::next(Formula::atom("a"));
        assert!(!sugar.is_core());
        let core = Formula::diamond(PathExpr::step(), Formula::atom("a"));
        assert!(core.is_core() && core.is_nnf());
        let neg = Formula::not(core.clone());
        assert!(neg.is_core() && !neg.is_nnf());
    }
}
