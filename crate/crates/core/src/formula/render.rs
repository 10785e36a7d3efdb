use super::{Formula, PathExpr};

/// Canonical, fully parenthesized text of a formula. Parsing the result
/// gives back a structurally equal tree.
pub fn render(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(f, &mut s);
    s
}

pub fn render_path(p: &PathExpr) -> String {
    let mut s = String::new();
    write_path(p, &mut s);
    s
}

fn write_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("tt"),
        Formula::False => out.push_str("ff"),
        Formula::Last => out.push_str("LAST"),
        Formula::Atom(a) => out.push_str(a),
        Formula::Not(g) => {
            out.push('~');
            write_formula(g, out);
        }
        Formula::And(l, r) => binary(out, l, " & ", r),
        Formula::Or(l, r) => binary(out, l, " | ", r),
        Formula::Until(l, r) => binary(out, l, " U ", r),
        Formula::Release(l, r) => binary(out, l, " R ", r),
        Formula::Next(g) => unary(out, "X ", g),
        Formula::WeakNext(g) => unary(out, "wX ", g),
        Formula::Eventually(g) => unary(out, "F ", g),
        Formula::Always(g) => unary(out, "G ", g),
        Formula::Diamond(p, g) => modal(out, "(< ", p, " > ", g),
        Formula::Box(p, g) => modal(out, "([ ", p, " ] ", g),
    }
}

fn binary(out: &mut String, l: &Formula, op: &str, r: &Formula) {
    out.push('(');
    write_formula(l, out);
    out.push_str(op);
    write_formula(r, out);
    out.push(')');
}

fn unary(out: &mut String, op: &str, g: &Formula) {
    out.push('(');
    out.push_str(op);
    write_formula(g, out);
    out.push(')');
}

fn modal(out: &mut String, open: &str, p: &PathExpr, close: &str, g: &Formula) {
    out.push_str(open);
    write_path(p, out);
    out.push_str(close);
    write_formula(g, out);
    out.push(')');
}

fn write_path(p: &PathExpr, out: &mut String) {
    match p {
        PathExpr::Prop(Formula::True) => out.push_str("true"),
        PathExpr::Prop(Formula::False) => out.push_str("false"),
        PathExpr::Prop(f) => write_formula(f, out),
        PathExpr::Test(f) => {
            out.push('(');
            write_formula(f, out);
            out.push_str(")?");
        }
        PathExpr::Seq(l, r) => {
            out.push('(');
            write_path(l, out);
            out.push_str(" ; ");
            write_path(r, out);
            out.push(')');
        }
        PathExpr::Alt(l, r) => {
            out.push('(');
            write_path(l, out);
            out.push_str(" + ");
            write_path(r, out);
            out.push(')');
        }
        PathExpr::Star(q) => {
            write_path(q, out);
            out.push('*');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    #[test]
    fn canonical_forms() {
        assert_eq!(render(&Formula::True), "tt");
        assert_eq!(render(&Formula::and(Formula::atom("a"), Formula::atom("b"))), "(a & b)");
        assert_eq!(
            render(&Formula::diamond(PathExpr::step(), Formula::atom("a"))),
            "(< true > a)"
        );
    }

    #[test]
    fn running_example_round_trips() {
        let f = parse_formula("< ([ true* ] b)? > < true > a").unwrap();
        let text = render(&f);
        assert_eq!(text, "(< (([ true* ] b))? > (< true > a))");
        assert_eq!(parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn paths_with_compound_propositions() {
        for src in [
            "[ ~(a & b)* ; (a | ~b) + false ] LAST",
            "< (~a)? ; ~~b ; (tt)?* > (a U b R c)",
            "wX F G ~X a",
        ] {
            let f = parse_formula(src).unwrap();
            assert_eq!(parse_formula(&render(&f)).unwrap(), f, "{src}");
        }
    }
}
