use std::collections::{BTreeSet, VecDeque};

use super::{Formula, PathExpr};

/// Rewrites LTLf sugar into the dynamic core.
///
/// `X f = <true> f`, `wX f = [true] f`, `F f = <true*> f`, `G f = [true*] f`,
/// `f U g = <(f? ; true)*> g`, `f R g = [(~f? ; true)*] g`, `LAST = [true] ff`.
pub fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(desugar(g)),
        Formula::And(l, r) => Formula::and(desugar(l), desugar(r)),
        Formula::Or(l, r) => Formula::or(desugar(l), desugar(r)),
        Formula::Diamond(p, g) => Formula::diamond(desugar_path(p), desugar(g)),
        Formula::Box(p, g) => Formula::boxed(desugar_path(p), desugar(g)),
        Formula::Next(g) => Formula::diamond(PathExpr::step(), desugar(g)),
        Formula::WeakNext(g) => Formula::boxed(PathExpr::step(), desugar(g)),
        Formula::Eventually(g) => Formula::diamond(PathExpr::star(PathExpr::step()), desugar(g)),
        Formula::Always(g) => Formula::boxed(PathExpr::star(PathExpr::step()), desugar(g)),
        Formula::Until(l, r) => Formula::diamond(
            PathExpr::star(PathExpr::seq(PathExpr::Test(desugar(l)), PathExpr::step())),
            desugar(r),
        ),
        Formula::Release(l, r) => Formula::boxed(
            PathExpr::star(PathExpr::seq(
                PathExpr::Test(Formula::not(desugar(l))),
                PathExpr::step(),
            )),
            desugar(r),
        ),
        Formula::Last => Formula::boxed(PathExpr::step(), Formula::False),
    }
}

fn desugar_path(p: &PathExpr) -> PathExpr {
    match p {
        PathExpr::Prop(f) => PathExpr::Prop(desugar(f)),
        PathExpr::Test(f) => PathExpr::Test(desugar(f)),
        PathExpr::Seq(l, r) => PathExpr::seq(desugar_path(l), desugar_path(r)),
        PathExpr::Alt(l, r) => PathExpr::alt(desugar_path(l), desugar_path(r)),
        PathExpr::Star(q) => PathExpr::star(desugar_path(q)),
    }
}

/// Negation normal form. Sugar is desugared first, so any formula is accepted.
pub fn nnf(f: &Formula) -> Formula {
    if f.is_core() {
        to_nnf(f, false)
    } else {
        to_nnf(&desugar(f), false)
    }
}

/// NNF of `~f`.
pub fn negate(f: &Formula) -> Formula {
    if f.is_core() {
        to_nnf(f, true)
    } else {
        to_nnf(&desugar(f), true)
    }
}

fn to_nnf(f: &Formula, neg: bool) -> Formula {
    match (f, neg) {
        (Formula::True, false) | (Formula::False, true) => Formula::True,
        (Formula::True, true) | (Formula::False, false) => Formula::False,
        (Formula::Atom(_), false) => f.clone(),
        (Formula::Atom(_), true) => Formula::not(f.clone()),
        (Formula::Not(g), _) => to_nnf(g, !neg),
        (Formula::And(l, r), false) => Formula::and(to_nnf(l, false), to_nnf(r, false)),
        (Formula::And(l, r), true) => Formula::or(to_nnf(l, true), to_nnf(r, true)),
        (Formula::Or(l, r), false) => Formula::or(to_nnf(l, false), to_nnf(r, false)),
        (Formula::Or(l, r), true) => Formula::and(to_nnf(l, true), to_nnf(r, true)),
        (Formula::Diamond(p, g), false) => Formula::diamond(nnf_path(p), to_nnf(g, false)),
        (Formula::Diamond(p, g), true) => Formula::boxed(nnf_path(p), to_nnf(g, true)),
        (Formula::Box(p, g), false) => Formula::boxed(nnf_path(p), to_nnf(g, false)),
        (Formula::Box(p, g), true) => Formula::diamond(nnf_path(p), to_nnf(g, true)),
        _ => unreachable!("sugar is removed before normalization"),
    }
}

fn nnf_path(p: &PathExpr) -> PathExpr {
    match p {
        PathExpr::Prop(f) => PathExpr::Prop(to_nnf(f, false)),
        PathExpr::Test(f) => PathExpr::Test(to_nnf(f, false)),
        PathExpr::Seq(l, r) => PathExpr::seq(nnf_path(l), nnf_path(r)),
        PathExpr::Alt(l, r) => PathExpr::alt(nnf_path(l), nnf_path(r)),
        PathExpr::Star(q) => PathExpr::star(nnf_path(q)),
    }
}

/// The unfolding closure of an NNF formula, in discovery order.
///
/// Members are the formulas the alternating construction can use as states:
/// boolean components, the targets of steps, and the nested modalities that
/// sequencing and star unfolding produce.
pub fn closure(f: &Formula) -> Vec<Formula> {
    let mut seen = BTreeSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::from([f.clone()]);
    while let Some(g) = queue.pop_front() {
        if !seen.insert(g.clone()) {
            continue;
        }
        for h in unfold(&g) {
            if !seen.contains(&h) {
                queue.push_back(h);
            }
        }
        order.push(g);
    }
    order
}

/// Direct unfoldings of one closure member.
pub(crate) fn unfold(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Not(_) => vec![],
        Formula::And(l, r) | Formula::Or(l, r) => vec![(**l).clone(), (**r).clone()],
        Formula::Diamond(p, g) | Formula::Box(p, g) => {
            let diamond = matches!(f, Formula::Diamond(..));
            let wrap = |p: PathExpr, g: Formula| {
                if diamond {
                    Formula::diamond(p, g)
                } else {
                    Formula::boxed(p, g)
                }
            };
            match &**p {
                PathExpr::Prop(_) => vec![(**g).clone()],
                PathExpr::Test(t) => {
                    let tested = if diamond { t.clone() } else { negate(t) };
                    vec![tested, (**g).clone()]
                }
                PathExpr::Seq(a, b) => {
                    let inner = wrap((**b).clone(), (**g).clone());
                    vec![wrap((**a).clone(), inner.clone()), inner]
                }
                PathExpr::Alt(a, b) => vec![
                    wrap((**a).clone(), (**g).clone()),
                    wrap((**b).clone(), (**g).clone()),
                ],
                PathExpr::Star(a) => vec![(**g).clone(), wrap((**a).clone(), f.clone())],
            }
        }
        _ => vec![],
    }
}

/// Number of distinct formula and path nodes in `f`.
pub fn subexpression_count(f: &Formula) -> usize {
    let mut formulas = BTreeSet::new();
    let mut paths = BTreeSet::new();
    count_formula(f, &mut formulas, &mut paths);
    formulas.len() + paths.len()
}

fn count_formula<'a>(
    f: &'a Formula,
    formulas: &mut BTreeSet<&'a Formula>,
    paths: &mut BTreeSet<&'a PathExpr>,
) {
    if !formulas.insert(f) {
        return;
    }
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Last => {}
        Formula::Not(g)
        | Formula::Next(g)
        | Formula::WeakNext(g)
        | Formula::Eventually(g)
        | Formula::Always(g) => count_formula(g, formulas, paths),
        Formula::And(l, r)
        | Formula::Or(l, r)
        | Formula::Until(l, r)
        | Formula::Release(l, r) => {
            count_formula(l, formulas, paths);
            count_formula(r, formulas, paths);
        }
        Formula::Diamond(p, g) | Formula::Box(p, g) => {
            count_path(p, formulas, paths);
            count_formula(g, formulas, paths);
        }
    }
}

fn count_path<'a>(
    p: &'a PathExpr,
    formulas: &mut BTreeSet<&'a Formula>,
    paths: &mut BTreeSet<&'a PathExpr>,
) {
    if !paths.insert(p) {
        return;
    }
    match p {
        PathExpr::Prop(f) | PathExpr::Test(f) => count_formula(f, formulas, paths),
        PathExpr::Seq(l, r) | PathExpr::Alt(l, r) => {
            count_path(l, formulas, paths);
            count_path(r, formulas, paths);
        }
        PathExpr::Star(q) => count_path(q, formulas, paths),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn ltl_sugar_mapping() {
        assert_eq!(desugar(&p("X a")), p("< true > a"));
        assert_eq!(desugar(&p("wX a")), p("[ true ] a"));
        assert_eq!(desugar(&p("F a")), p("< true* > a"));
        assert_eq!(desugar(&p("G b")), p("[ true* ] b"));
        assert_eq!(desugar(&p("p U q")), p("< ((p)? ; true)* > q"));
        assert_eq!(desugar(&p("p R q")), p("[ ((~p)? ; true)* ] q"));
        assert_eq!(desugar(&p("LAST")), p("[ true ] ff"));
        assert!(desugar(&p("G (a U X b) & F LAST")).is_core());
    }

    #[test]
    fn negation_normal_form() {
        assert_eq!(nnf(&p("~<true> a")), p("[true] ~a"));
        assert_eq!(nnf(&p("~~a")), p("a"));
        assert_eq!(nnf(&p("~(a & b)")), p("~a | ~b"));
        assert_eq!(nnf(&p("~tt")), Formula::False);
        assert_eq!(nnf(&p("[ (~~a)? ; ~(a|b) ] ~[true*] b")), p("[ (a)? ; (~a & ~b) ] <true*> ~b"));
        assert!(nnf(&p("~(a U ~X b) | G ~F c")).is_nnf());
    }

    #[test]
    fn closure_of_atom_is_itself() {
        assert_eq!(closure(&p("a")), vec![p("a")]);
    }

    #[test]
    fn closure_of_always() {
        // [true*]b unfolds to b and [true][true*]b; the latter unfolds back.
        let f = p("[ true* ] b");
        let c = closure(&f);
        assert_eq!(c, vec![f.clone(), p("b"), Formula::boxed(PathExpr::step(), f)]);
    }

    #[test]
    fn closure_of_running_example_contains_figure_states() {
        let f = nnf(&p("< ([ true* ] b)? > < true > a"));
        let c = closure(&f);
        assert!(c.contains(&f));
        assert!(c.contains(&p("[ true* ] b")));
        assert!(c.contains(&p("a")));
        assert!(c.len() <= 2 * subexpression_count(&f) + 2);
    }

    #[test]
    fn subexpressions_are_shared() {
        // a, (a & a): two formula nodes.
        assert_eq!(subexpression_count(&p("a & a")), 2);
        // <true>a: formulas {<true>a, a, true}, paths {true}.
        assert_eq!(subexpression_count(&p("<true> a")), 4);
    }
}
