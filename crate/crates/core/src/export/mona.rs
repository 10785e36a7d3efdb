use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;

use thiserror::Error;

use crate::afw::{Guard, LastCondition};
use crate::formula::{desugar, nnf, Formula, PathExpr, SymbolTable};
use crate::fsa::Dfa;

/// Second-order variable names for the atoms of `symbols`, in id order.
///
/// Atom names are uppercased; a name that would clash gets its id appended.
pub fn mona_variables(symbols: &SymbolTable) -> Vec<String> {
    let mut taken = BTreeSet::new();
    symbols
        .iter()
        .map(|(id, name)| {
            let mut v = name.to_ascii_uppercase();
            if !taken.insert(v.clone()) {
                v = format!("{v}_{id}");
                taken.insert(v.clone());
            }
            v
        })
        .collect()
}

struct Emitter<'a> {
    vars: BTreeMap<&'a str, String>,
    fresh: usize,
}

impl Emitter<'_> {
    fn fresh(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn formula(&mut self, f: &Formula, x: &str) -> String {
        match f {
            Formula::True => "true".into(),
            Formula::False => "false".into(),
            Formula::Atom(a) => format!("{x} in {}", self.vars[a.as_str()]),
            Formula::Not(g) => match &**g {
                Formula::Atom(a) => format!("{x} notin {}", self.vars[a.as_str()]),
                other => format!("~({})", self.formula(other, x)),
            },
            Formula::And(l, r) => format!("({} & {})", self.formula(l, x), self.formula(r, x)),
            Formula::Or(l, r) => format!("({} | {})", self.formula(l, x), self.formula(r, x)),
            Formula::Diamond(p, g) => {
                let y = self.fresh("y");
                let rel = self.path(p, x, &y);
                let body = self.formula(g, &y);
                format!("(ex1 {y}: ({rel} & {body}))")
            }
            Formula::Box(p, g) => {
                let y = self.fresh("y");
                let rel = self.path(p, x, &y);
                let body = self.formula(g, &y);
                format!("(all1 {y}: ({rel} => {body}))")
            }
            _ => unreachable!("input is desugared"),
        }
    }

    /// Relation between positions `x` and `y` of the word.
    fn path(&mut self, p: &PathExpr, x: &str, y: &str) -> String {
        match p {
            PathExpr::Prop(f) => format!("({y} = {x} + 1 & {})", self.formula(f, x)),
            PathExpr::Test(f) => format!("({y} = {x} & {})", self.formula(f, x)),
            PathExpr::Seq(l, r) => {
                let z = self.fresh("z");
                format!("(ex1 {z}: ({} & {}))", self.path(l, x, &z), self.path(r, &z, y))
            }
            PathExpr::Alt(l, r) => format!("({} | {})", self.path(l, x, y), self.path(r, x, y)),
            PathExpr::Star(inner) => {
                // y lies in every set that contains x and is closed under inner.
                let s = self.fresh("S");
                let u = self.fresh("u");
                let v = self.fresh("v");
                let step = self.path(inner, &u, &v);
                format!(
                    "(all2 {s}: (({x} in {s} & (all1 {u}, {v}: (({u} in {s} & {step}) => {v} in {s}))) => {y} in {s}))"
                )
            }
        }
    }
}

/// MONA program whose models over nonempty words are the models of `f`.
pub fn emit_mona(f: &Formula) -> String {
    let symbols = SymbolTable::from_formula(f);
    let names = mona_variables(&symbols);
    let mut e = Emitter {
        vars: symbols.iter().map(|(_, n)| n).zip(names.iter().cloned()).collect(),
        fresh: 0,
    };
    let core = e.formula(&nnf(&desugar(f)), "0");
    let mut out = String::from("m2l-str;\n");
    if !names.is_empty() {
        out.push_str(&format!("var2 {};\n", names.join(", ")));
    }
    out.push_str("ex1 p_end: p_end = max($);\n");
    out.push_str(&core);
    out.push_str(";\n");
    out
}

#[derive(Debug, Error)]
pub enum MonaError {
    #[error("line {line}: unrecognized syntax: {text}")]
    Syntax { line: usize, text: String },
    #[error("edge label `{label}` has {found} variables, expected {expected}")]
    VariableCount { label: String, found: usize, expected: usize },
    #[error("automaton has no initial edge")]
    NoInitial,
    #[error("edge {0} -> {1} refers to an undeclared state")]
    UnknownState(usize, usize),
    #[error("state {state} has no transition on letter {letter}")]
    Partial { state: usize, letter: usize },
    #[error("could not run MONA: {0}")]
    Io(#[from] std::io::Error),
    #[error("MONA failed: {0}")]
    Failed(String),
}

/// Reads MONA's GraphViz automaton export into a DFA over `symbols`.
///
/// Bit `k` of an edge label belongs to the atom with id `k + 1`; `X`
/// stands for both values. MONA's auxiliary state 0 is dropped and the
/// target of the `init` edge becomes the initial state.
pub fn parse_mona_dot(text: &str, symbols: &SymbolTable) -> Result<Dfa, MonaError> {
    let k = symbols.len();
    let mut accepting: BTreeSet<usize> = BTreeSet::new();
    let mut states: BTreeSet<usize> = BTreeSet::new();
    let mut edges: Vec<(usize, usize, Vec<String>)> = Vec::new();
    let mut initial = None;
    let mut shape = String::new();
    let syntax = |line: usize, text: &str| MonaError::Syntax {
        line,
        text: text.to_string(),
    };
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let n = n + 1;
        if line.is_empty()
            || line.starts_with("digraph")
            || line == "}"
            || line.starts_with("rankdir")
            || line.starts_with("center")
            || line.starts_with("size")
            || line.starts_with("edge [")
            || line.starts_with("init [")
            || line.starts_with("node [height")
        {
            continue;
        }
        if let Some(rest) = line.strip_prefix("node [shape = ") {
            let (s, ids) = rest.split_once("];").ok_or_else(|| syntax(n, raw))?;
            shape = s.trim().to_string();
            for id in ids.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let id: usize = id.parse().map_err(|_| syntax(n, raw))?;
                states.insert(id);
                if shape == "doublecircle" {
                    accepting.insert(id);
                }
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("init -> ") {
            let id = rest.trim_end_matches(';').trim();
            initial = Some(id.parse::<usize>().map_err(|_| syntax(n, raw))?);
            continue;
        }
        if let Some((from, rest)) = line.split_once(" -> ") {
            let (to, attrs) = rest.split_once(' ').ok_or_else(|| syntax(n, raw))?;
            let label = attrs
                .trim()
                .strip_prefix("[label=\"")
                .and_then(|a| a.strip_suffix("\"];"))
                .ok_or_else(|| syntax(n, raw))?;
            let from: usize = from.trim().parse().map_err(|_| syntax(n, raw))?;
            let to: usize = to.trim().parse().map_err(|_| syntax(n, raw))?;
            let labels: Vec<String> = label.split("\\n").map(str::to_string).collect();
            edges.push((from, to, labels));
            continue;
        }
        // Lone state ids following a `node [shape = ...]` line.
        let ids: Result<Vec<usize>, _> = line
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse::<usize>)
            .collect();
        match ids {
            Ok(ids) if !shape.is_empty() => {
                for id in ids {
                    states.insert(id);
                    if shape == "doublecircle" {
                        accepting.insert(id);
                    }
                }
            }
            _ => return Err(syntax(n, raw)),
        }
    }
    let initial = initial.ok_or(MonaError::NoInitial)?;
    states.remove(&0);
    let ids: Vec<usize> = states.iter().copied().collect();
    let index: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let letters = 1usize << k;
    let mut delta: Vec<Vec<Option<usize>>> = vec![vec![None; letters]; ids.len()];
    for (from, to, labels) in edges {
        if from == 0 {
            continue;
        }
        let (Some(&f), Some(&t)) = (index.get(&from), index.get(&to)) else {
            return Err(MonaError::UnknownState(from, to));
        };
        for label in labels {
            // MONA prints an empty label when there are no free variables.
            if label.chars().count() != k && !(k == 0 && label == "X") {
                return Err(MonaError::VariableCount {
                    found: label.chars().count(),
                    expected: k,
                    label,
                });
            }
            for (code, slot) in delta[f].iter_mut().enumerate() {
                let matches = label.chars().enumerate().all(|(bit, c)| match c {
                    '0' => code >> bit & 1 == 0,
                    '1' => code >> bit & 1 == 1,
                    _ => true,
                });
                if matches {
                    *slot = Some(t);
                }
            }
        }
    }
    let minterms: Vec<Guard> = (0..letters)
        .map(|code| {
            let mut g = Guard {
                last: LastCondition::Unconstrained,
                ..Guard::default()
            };
            for bit in 0..k {
                let id = (bit + 1) as u32;
                if code >> bit & 1 == 1 {
                    g.pos.insert(id);
                } else {
                    g.neg.insert(id);
                }
            }
            g
        })
        .collect();
    let mut rows = Vec::with_capacity(ids.len());
    for (q, row) in delta.into_iter().enumerate() {
        let mut full = Vec::with_capacity(2 * letters);
        for (letter, t) in row.into_iter().enumerate() {
            let t = t.ok_or(MonaError::Partial {
                state: ids[q],
                letter,
            })?;
            full.push(t);
            full.push(t);
        }
        rows.push(full);
    }
    let initial = *index.get(&initial).ok_or(MonaError::UnknownState(0, initial))?;
    Dfa::from_parts(
        symbols.clone(),
        minterms,
        ids.iter().map(|s| format!("q{s}")).collect(),
        initial,
        rows,
        ids.iter().map(|s| accepting.contains(s)).collect(),
    )
    .map_err(MonaError::Failed)
}

/// The MONA binary named by `flag`, else by `DYNAUT_MONA`.
pub fn locate_mona(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os("DYNAUT_MONA").map(PathBuf::from))
        .filter(|p| !p.as_os_str().is_empty())
}

/// Runs MONA on `program` and returns its GraphViz automaton.
pub fn run_mona(binary: &Path, program: &str) -> Result<String, MonaError> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("formula.mona");
    std::fs::write(&path, program)?;
    let output = Command::new(binary).args(["-q", "-u", "-gw"]).arg(&path).output()?;
    if !output.status.success() {
        return Err(MonaError::Failed(String::from_utf8_lossy(&output.stderr).trim().to_string()));
    }
    String::from_utf8(output.stdout).map_err(|e| MonaError::Failed(e.to_string()))
}

/// Emits, runs and parses: the MONA-derived DFA of `f`.
pub fn mona_dfa(binary: &Path, f: &Formula) -> Result<Dfa, MonaError> {
    let dot = run_mona(binary, &emit_mona(f))?;
    parse_mona_dot(&dot, &SymbolTable::from_formula(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afw::compile_afw;
    use crate::formula::parse_formula;
    use crate::fsa::{afw_to_nfa, equivalent, minimize, nfa_to_dfa};

    fn mona(s: &str) -> String {
        emit_mona(&parse_formula(s).unwrap())
    }

    #[test]
    fn atom_constrains_position_zero() {
        assert_eq!(mona("a"), "m2l-str;\nvar2 A;\nex1 p_end: p_end = max($);\n0 in A;\n");
        assert_eq!(mona("tt"), "m2l-str;\nex1 p_end: p_end = max($);\ntrue;\n");
    }

    #[test]
    fn running_example_program_shape() {
        let text = mona("< ([ true* ] b)? > < true > a");
        assert!(text.starts_with("m2l-str;\nvar2 B, A;\n"));
        assert!(text.contains("all2 S"));
        assert_eq!(text.matches('(').count(), text.matches(')').count());
    }

    #[test]
    fn colliding_variables() {
        let f = parse_formula("aB & ab").unwrap();
        assert_eq!(mona_variables(&SymbolTable::from_formula(&f)), vec!["AB", "AB_2"]);
    }

    fn internal(s: &str) -> Dfa {
        minimize(&nfa_to_dfa(&afw_to_nfa(&compile_afw(&parse_formula(s).unwrap()))))
    }

    // Hand-written in MONA's export layout for `a`.
    const DOT_A: &str = r#"digraph MONA_DFA {
 rankdir = LR;
 center = true;
 size = "7.5,10.5";
 edge [fontname = Courier];
 node [height = .5, width = .5];
 node [shape = doublecircle]; 2;
 node [shape = circle]; 1; 3;
 node [shape = box];
 init [shape = plaintext, label = ""];
 init -> 1;
 0 -> 1 [label="X"];
 1 -> 2 [label="1"];
 1 -> 3 [label="0"];
 2 -> 2 [label="X"];
 3 -> 3 [label="X"];
}
"#;

    #[test]
    fn parses_mona_layout() {
        let symbols = SymbolTable::from_formula(&parse_formula("a").unwrap());
        let d = parse_mona_dot(DOT_A, &symbols).unwrap();
        assert_eq!(d.num_states(), 3);
        assert!(equivalent(&d, &internal("a")));
        assert!(!equivalent(&d, &internal("~a")));
    }

    #[test]
    fn parses_true_loop() {
        let text = "digraph MONA_DFA {\n node [shape = doublecircle]; 1;\n init -> 1;\n 1 -> 1 [label=\"X\"];\n}\n";
        let d = parse_mona_dot(text, &SymbolTable::new()).unwrap();
        assert_eq!(d.num_states(), 1);
        assert!(equivalent(&d, &internal("tt")));
    }

    #[test]
    fn rejects_mismatched_variables() {
        let symbols = SymbolTable::from_formula(&parse_formula("a & b").unwrap());
        assert!(matches!(parse_mona_dot(DOT_A, &symbols), Err(MonaError::VariableCount { .. })));
        assert!(matches!(
            parse_mona_dot("digraph {\n what is this\n}\n", &symbols),
            Err(MonaError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn cross_checks_when_mona_is_available() {
        let Some(bin) = locate_mona(None) else {
            return;
        };
        for s in ["a", "tt", "< ([ true* ] b)? > < true > a", "a U b", "F (a & X b)"] {
            let d = mona_dfa(&bin, &parse_formula(s).unwrap()).unwrap();
            assert!(equivalent(&d, &internal(s)), "{s}");
        }
    }
}
