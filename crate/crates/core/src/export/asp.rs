use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::afw::{Afw, AfwError, Guard, LastCondition, Transition};
use crate::formula::{AtomId, SymbolTable};

use super::AutomatonView;

/// Renders the automaton as ASP facts, one per line.
///
/// Order: `prop/2` by id, `state/2` by id, `initial_state/1`, then per state
/// and transition the `delta/2` fact followed by its conditions (positive
/// atoms, negative atoms, `last`) and successors.
pub fn emit_asp_facts(view: &AutomatonView) -> String {
    let a = view.automaton();
    let mut out = String::new();
    for (id, name) in a.symbols().iter() {
        writeln!(out, "prop({id},{name}).").unwrap();
    }
    for (q, label) in a.labels().iter().enumerate() {
        writeln!(out, "state({q},{}).", quote(label)).unwrap();
    }
    writeln!(out, "initial_state({}).", a.initial()).unwrap();
    for q in 0..a.num_states() {
        for (k, t) in a.transitions(q).iter().enumerate() {
            writeln!(out, "delta({q},{k}).").unwrap();
            for p in &t.guard.pos {
                writeln!(out, "delta({q},{k},pos,{p}).").unwrap();
            }
            for p in &t.guard.neg {
                writeln!(out, "delta({q},{k},neg,{p}).").unwrap();
            }
            match t.guard.last {
                LastCondition::Required => writeln!(out, "delta({q},{k},pos,last).").unwrap(),
                LastCondition::Forbidden => writeln!(out, "delta({q},{k},neg,last).").unwrap(),
                LastCondition::Unconstrained => {}
            }
            for s in &t.successors {
                writeln!(out, "delta({q},{k},succ,{s}).").unwrap();
            }
        }
    }
    out
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AspError {
    #[error("line {line}: malformed fact: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown predicate {name}/{arity}")]
    UnknownPredicate { line: usize, name: String, arity: usize },
    #[error("line {line}: reference to undeclared state {state}")]
    DanglingState { line: usize, state: usize },
    #[error("line {line}: reference to undeclared prop {prop}")]
    DanglingProp { line: usize, prop: AtomId },
    #[error("line {line}: transition {state},{transition} has no delta/2 fact")]
    DanglingTransition { line: usize, state: usize, transition: usize },
    #[error("line {line}: duplicate {what}")]
    Duplicate { line: usize, what: String },
    #[error("no initial_state fact")]
    MissingInitial,
    #[error("{0} ids are not dense from {1}")]
    Sparse(&'static str, usize),
    #[error(transparent)]
    Automaton(#[from] AfwError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Term {
    Int(usize),
    Ident(String),
    Str(String),
}

struct Fact {
    line: usize,
    name: String,
    args: Vec<Term>,
}

fn malformed(line: usize, message: impl Into<String>) -> AspError {
    AspError::Malformed {
        line,
        message: message.into(),
    }
}

/// Splits the text into facts `name(args).`, skipping `%` comments.
fn facts(text: &str) -> Result<Vec<Fact>, AspError> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut out = Vec::new();
    let skip_blank = |i: &mut usize, line: &mut usize| {
        while *i < chars.len() {
            match chars[*i] {
                '\n' => *line += 1,
                '%' => {
                    while *i < chars.len() && chars[*i] != '\n' {
                        *i += 1;
                    }
                    continue;
                }
                c if c.is_whitespace() => {}
                _ => break,
            }
            *i += 1;
        }
    };
    let ident = |i: &mut usize| {
        let start = *i;
        while *i < chars.len() && (chars[*i].is_ascii_alphanumeric() || chars[*i] == '_') {
            *i += 1;
        }
        chars[start..*i].iter().collect::<String>()
    };
    loop {
        skip_blank(&mut i, &mut line);
        if i >= chars.len() {
            return Ok(out);
        }
        let start_line = line;
        if !chars[i].is_ascii_lowercase() {
            return Err(malformed(line, format!("unexpected `{}`", chars[i])));
        }
        let name = ident(&mut i);
        let mut args = Vec::new();
        skip_blank(&mut i, &mut line);
        if i < chars.len() && chars[i] == '(' {
            i += 1;
            loop {
                skip_blank(&mut i, &mut line);
                let Some(&c) = chars.get(i) else {
                    return Err(malformed(start_line, "unterminated argument list"));
                };
                if c == '"' {
                    i += 1;
                    let mut s = String::new();
                    loop {
                        match chars.get(i) {
                            None | Some('\n') => return Err(malformed(line, "unterminated string")),
                            Some('"') => break,
                            Some('\\') => {
                                let esc = chars.get(i + 1).copied();
                                s.push(match esc {
                                    Some('n') => '\n',
                                    Some(c @ ('"' | '\\')) => c,
                                    _ => return Err(malformed(line, "bad escape in string")),
                                });
                                i += 2;
                            }
                            Some(&c) => {
                                s.push(c);
                                i += 1;
                            }
                        }
                    }
                    i += 1;
                    args.push(Term::Str(s));
                } else if c.is_ascii_digit() {
                    let digits = ident(&mut i);
                    let n = digits
                        .parse()
                        .map_err(|_| malformed(line, format!("bad integer `{digits}`")))?;
                    args.push(Term::Int(n));
                } else if c.is_ascii_lowercase() {
                    args.push(Term::Ident(ident(&mut i)));
                } else {
                    return Err(malformed(line, format!("unexpected `{c}` in arguments")));
                }
                skip_blank(&mut i, &mut line);
                match chars.get(i) {
                    Some(',') => i += 1,
                    Some(')') => {
                        i += 1;
                        break;
                    }
                    _ => return Err(malformed(line, "expected `,` or `)`")),
                }
            }
            skip_blank(&mut i, &mut line);
        }
        if chars.get(i) != Some(&'.') {
            return Err(malformed(line, "expected `.` after fact"));
        }
        i += 1;
        out.push(Fact {
            line: start_line,
            name,
            args,
        });
    }
}

fn int(f: &Fact, k: usize) -> Result<usize, AspError> {
    match &f.args[k] {
        Term::Int(n) => Ok(*n),
        _ => Err(malformed(f.line, format!("argument {} of {} must be an integer", k + 1, f.name))),
    }
}

#[derive(Default)]
struct Draft {
    guard: Guard,
    successors: Vec<(usize, usize)>,
}

/// Reads facts in the schema of [`emit_asp_facts`] back into an automaton.
pub fn parse_asp_facts(text: &str) -> Result<Afw, AspError> {
    let facts = facts(text)?;
    let mut symbols = SymbolTable::new();
    let mut states: BTreeMap<usize, String> = BTreeMap::new();
    let mut initial: Option<usize> = None;
    let mut drafts: BTreeMap<(usize, usize), Draft> = BTreeMap::new();

    for f in &facts {
        match (f.name.as_str(), f.args.len()) {
            ("prop", 2) => {
                let id = int(f, 0)?;
                let Term::Ident(name) = &f.args[1] else {
                    return Err(malformed(f.line, "prop name must be a constant"));
                };
                if name == "last" {
                    return Err(malformed(f.line, "`last` cannot be a prop"));
                }
                let id = AtomId::try_from(id).map_err(|_| malformed(f.line, "prop id too large"))?;
                symbols
                    .insert_with_id(id, name)
                    .map_err(|what| AspError::Duplicate { line: f.line, what })?;
            }
            ("state", 2) => {
                let id = int(f, 0)?;
                let label = match &f.args[1] {
                    Term::Str(s) | Term::Ident(s) => s.clone(),
                    Term::Int(n) => n.to_string(),
                };
                if states.insert(id, label).is_some() {
                    return Err(AspError::Duplicate {
                        line: f.line,
                        what: format!("state {id}"),
                    });
                }
            }
            ("initial_state", 1) => {
                if initial.replace(int(f, 0)?).is_some() {
                    return Err(AspError::Duplicate {
                        line: f.line,
                        what: "initial_state".into(),
                    });
                }
            }
            ("delta", 2) => {
                let key = (int(f, 0)?, int(f, 1)?);
                if drafts.insert(key, Draft::default()).is_some() {
                    return Err(AspError::Duplicate {
                        line: f.line,
                        what: format!("transition {},{}", key.0, key.1),
                    });
                }
            }
            ("delta", 4) => {}
            (name, arity) => {
                return Err(AspError::UnknownPredicate {
                    line: f.line,
                    name: name.to_string(),
                    arity,
                })
            }
        }
    }

    for f in facts.iter().filter(|f| f.name == "delta" && f.args.len() == 4) {
        let (q, k) = (int(f, 0)?, int(f, 1)?);
        let Some(draft) = drafts.get_mut(&(q, k)) else {
            return Err(AspError::DanglingTransition {
                line: f.line,
                state: q,
                transition: k,
            });
        };
        let Term::Ident(role) = &f.args[2] else {
            return Err(malformed(f.line, "third delta argument must be pos, neg or succ"));
        };
        match (role.as_str(), &f.args[3]) {
            ("pos" | "neg", Term::Ident(l)) if l == "last" => {
                let cond = if role == "pos" {
                    LastCondition::Required
                } else {
                    LastCondition::Forbidden
                };
                if draft.guard.last != LastCondition::Unconstrained && draft.guard.last != cond {
                    return Err(malformed(f.line, "contradictory last conditions"));
                }
                draft.guard.last = cond;
            }
            ("pos" | "neg", Term::Int(p)) => {
                let p = AtomId::try_from(*p).map_err(|_| malformed(f.line, "prop id too large"))?;
                if symbols.name(p).is_none_or(str::is_empty) {
                    return Err(AspError::DanglingProp { line: f.line, prop: p });
                }
                if role == "pos" {
                    draft.guard.pos.insert(p);
                } else {
                    draft.guard.neg.insert(p);
                }
            }
            ("succ", Term::Int(s)) => draft.successors.push((*s, f.line)),
            _ => return Err(malformed(f.line, "unrecognized delta/4 fact")),
        }
    }

    if !symbols.is_contiguous() {
        return Err(AspError::Sparse("prop", 1));
    }
    if states.keys().copied().ne(0..states.len()) {
        return Err(AspError::Sparse("state", 0));
    }
    let initial = initial.ok_or(AspError::MissingInitial)?;
    let n = states.len();
    let mut rows: Vec<Vec<Transition>> = vec![Vec::new(); n];
    for ((q, k), draft) in drafts {
        if q >= n {
            return Err(AspError::DanglingState { line: 0, state: q });
        }
        if k != rows[q].len() {
            return Err(AspError::Sparse("transition", 0));
        }
        let mut successors = std::collections::BTreeSet::new();
        for (s, line) in draft.successors {
            if s >= n {
                return Err(AspError::DanglingState { line, state: s });
            }
            successors.insert(s);
        }
        rows[q].push(Transition {
            guard: draft.guard,
            successors,
        });
    }
    if initial >= n {
        return Err(AspError::DanglingState { line: 0, state: initial });
    }
    Ok(Afw::from_parts(symbols, states.into_values().collect(), initial, rows)?)
}
