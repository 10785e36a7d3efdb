use std::fmt::Write as _;

use super::AutomatonView;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// GraphViz rendering. A transition with several successors goes through a
/// point-shaped junction node; one with none goes to the `done` node.
pub fn emit_dot(view: &AutomatonView) -> String {
    let a = view.automaton();
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  node [shape=box, style=rounded];\n");
    out.push_str("  init [shape=point];\n");
    let discharges = (0..a.num_states()).any(|q| a.transitions(q).iter().any(|t| t.successors.is_empty()));
    if discharges {
        out.push_str("  done [shape=doublecircle, label=\"\", width=0.2];\n");
    }
    for (q, label) in a.labels().iter().enumerate() {
        writeln!(out, "  s{q} [label=\"{}\"];", escape(label)).unwrap();
    }
    writeln!(out, "  init -> s{};", a.initial()).unwrap();
    for q in 0..a.num_states() {
        for (k, t) in a.transitions(q).iter().enumerate() {
            let label = escape(&t.guard.describe(a.symbols()));
            match t.successors.len() {
                0 => writeln!(out, "  s{q} -> done [label=\"{label}\"];").unwrap(),
                1 => {
                    let s = t.successors.first().unwrap();
                    writeln!(out, "  s{q} -> s{s} [label=\"{label}\"];").unwrap();
                }
                _ => {
                    writeln!(out, "  j{q}_{k} [shape=point];").unwrap();
                    writeln!(out, "  s{q} -> j{q}_{k} [label=\"{label}\", arrowhead=none];").unwrap();
                    for s in &t.successors {
                        writeln!(out, "  j{q}_{k} -> s{s};").unwrap();
                    }
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afw::compile_afw;
    use crate::formula::parse_formula;

    /// Structural checker for the DOT subset emitted above.
    fn check_dot(text: &str) {
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.first(), Some(&"digraph automaton {"));
        assert_eq!(lines.last(), Some(&"}"));
        for line in &lines[1..lines.len() - 1] {
            assert!(statement_ok(line), "bad DOT statement: {line}");
        }
    }

    fn statement_ok(line: &str) -> bool {
        let Some(stmt) = line.strip_prefix("  ").and_then(|l| l.strip_suffix(';')) else {
            return false;
        };
        let (head, attrs) = match stmt.find(" [") {
            Some(i) => (&stmt[..i], Some(&stmt[i + 1..])),
            None => (stmt, None),
        };
        let is_id = |s: &str| {
            !s.is_empty()
                && s.chars().next().unwrap().is_ascii_alphabetic()
                && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        };
        let head_ok = match head.split_once(" -> ") {
            Some((l, r)) => is_id(l) && is_id(r),
            None => match head.split_once('=') {
                Some((l, r)) => is_id(l) && is_id(r),
                None => is_id(head),
            },
        };
        let attrs_ok = attrs.is_none_or(|a| {
            let Some(inner) = a.strip_prefix('[').and_then(|a| a.strip_suffix(']')) else {
                return false;
            };
            // Split on `, ` outside quotes.
            let mut parts = Vec::new();
            let (mut quoted, mut escaped, mut start) = (false, false, 0);
            for (i, c) in inner.char_indices() {
                match c {
                    _ if escaped => escaped = false,
                    '\\' if quoted => escaped = true,
                    '"' => quoted = !quoted,
                    ',' if !quoted => {
                        parts.push(&inner[start..i]);
                        start = i + 2;
                    }
                    _ => {}
                }
            }
            parts.push(&inner[start..]);
            !quoted
                && parts.iter().all(|p| match p.split_once('=') {
                    Some((k, v)) => {
                        is_id(k)
                            && ((v.len() >= 2 && v.starts_with('"') && v.ends_with('"'))
                                || v.chars().all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '_'))
                    }
                    None => false,
                })
        });
        head_ok && attrs_ok
    }

    #[test]
    fn running_example_layout() {
        let a = compile_afw(&parse_formula("< ([ true* ] b)? > < true > a").unwrap());
        let text = emit_dot(&AutomatonView::from(&a));
        check_dot(&text);
        let formula_nodes = text.lines().filter(|l| l.starts_with("  s") && !l.contains("->")).count();
        assert_eq!(formula_nodes, 3);
        let junctions = text.lines().filter(|l| l.starts_with("  j") && l.contains("shape=point")).count();
        assert_eq!(junctions, 1);
        assert!(text.contains("[label=\"b & ~last\", arrowhead=none]"));
    }

    #[test]
    fn true_has_one_node_and_discharge() {
        let a = compile_afw(&parse_formula("tt").unwrap());
        let text = emit_dot(&AutomatonView::from(&a));
        check_dot(&text);
        assert!(text.contains("  s0 [label=\"tt\"];\n"));
        assert!(text.contains("  s0 -> done [label=\"true\"];\n"));
        assert!(!text.contains("  s1 "));
    }
}
