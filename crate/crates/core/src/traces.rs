//! Trace corpora and the plan-filtering harness.
//!
//! A corpus file holds one trace per line, either as a bare JSON array of
//! letters (`[["b"],["a","b"]]`) or wrapped with an id
//! (`{"id": "p1", "trace": [...]}`). Lines starting with `#` are comments.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::afw::{afw_accepts, compile_afw};
use crate::formula::Formula;
use crate::fsa::{afw_to_nfa, dfa_accepts, first_failure, minimize, nfa_to_dfa};
use crate::semantics::{accepts_semantics, Letter, Trace};

/// The toy grid-robot plans shipped with the crate.
pub const GRID_CORPUS: &str = include_str!("../data/grid_robot.jsonl");

/// Move up any number of times, then right, then wait until the end.
pub const GRID_CONSTRAINT: &str = "< up* ; right* ; wait* > (LAST & wait)";

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: empty trace")]
    EmptyTrace { line: usize },
    #[error("line {line}: atom names must be strings")]
    NonStringAtom { line: usize },
    #[error("line {line}: duplicate trace id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Ordered traces with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceCorpus {
    entries: Vec<(String, Trace)>,
}

impl TraceCorpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a trace; fails with the id if it is already present.
    pub fn push(&mut self, id: impl Into<String>, trace: Trace) -> Result<(), String> {
        let id = id.into();
        if self.entries.iter().any(|(i, _)| *i == id) {
            return Err(id);
        }
        self.entries.push((id, trace));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Trace)> {
        self.entries.iter().map(|(i, t)| (i.as_str(), t))
    }

    pub fn ids(&self) -> Vec<&str> {
        self.entries.iter().map(|(i, _)| i.as_str()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&Trace> {
        self.entries.iter().find(|(i, _)| i == id).map(|(_, t)| t)
    }

    /// Atoms mentioned anywhere in the corpus.
    pub fn atoms(&self) -> BTreeSet<String> {
        self.entries
            .iter()
            .flat_map(|(_, t)| t.letters().iter().flatten().cloned())
            .collect()
    }
}

fn letters(value: &Value, line: usize) -> Result<Trace, TraceError> {
    let malformed = |message: &str| TraceError::Malformed {
        line,
        message: message.to_string(),
    };
    let Value::Array(items) = value else {
        return Err(malformed("a trace must be an array of letters"));
    };
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        let Value::Array(atoms) = item else {
            return Err(malformed("a letter must be an array of atom names"));
        };
        let mut letter = Letter::new();
        for a in atoms {
            let Value::String(name) = a else {
                return Err(TraceError::NonStringAtom { line });
            };
            letter.insert(name.clone());
        }
        out.push(letter);
    }
    Trace::new(out).map_err(|_| TraceError::EmptyTrace { line })
}

/// Reads a corpus. Bare arrays get the id `t<k>` where `k` is the record's
/// index in the corpus.
pub fn read_traces<R: BufRead>(source: R) -> Result<TraceCorpus, TraceError> {
    let mut corpus = TraceCorpus::new();
    for (n, line) in source.lines().enumerate() {
        let line = line?;
        let n = n + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let value: Value = serde_json::from_str(text).map_err(|e| TraceError::Malformed {
            line: n,
            message: e.to_string(),
        })?;
        let (id, trace) = match &value {
            Value::Array(_) => (format!("t{}", corpus.len()), letters(&value, n)?),
            Value::Object(map) => {
                let id = match map.get("id") {
                    Some(Value::String(s)) => s.clone(),
                    _ => {
                        return Err(TraceError::Malformed {
                            line: n,
                            message: "`id` must be a string".into(),
                        })
                    }
                };
                if let Some(extra) = map.keys().find(|k| *k != "id" && *k != "trace") {
                    return Err(TraceError::Malformed {
                        line: n,
                        message: format!("unexpected field `{extra}`"),
                    });
                }
                let trace = map.get("trace").ok_or_else(|| TraceError::Malformed {
                    line: n,
                    message: "missing `trace`".into(),
                })?;
                (id, letters(trace, n)?)
            }
            _ => {
                return Err(TraceError::Malformed {
                    line: n,
                    message: "expected an array or an object".into(),
                })
            }
        };
        corpus
            .push(id, trace)
            .map_err(|id| TraceError::DuplicateId { line: n, id })?;
    }
    Ok(corpus)
}

pub fn parse_traces(text: &str) -> Result<TraceCorpus, TraceError> {
    read_traces(text.as_bytes())
}

/// Writes a corpus so that [`read_traces`] gives it back unchanged: traces
/// whose id is the default one are written bare.
pub fn write_traces<W: Write>(c: &TraceCorpus, mut sink: W) -> io::Result<()> {
    for (k, (id, trace)) in c.entries.iter().enumerate() {
        let letters = serde_json::to_string(trace.letters())?;
        if *id == format!("t{k}") {
            writeln!(sink, "{letters}")?;
        } else {
            writeln!(sink, "{{\"id\": {}, \"trace\": {letters}}}", serde_json::to_string(id)?)?;
        }
    }
    Ok(())
}

/// Which acceptance procedure decides each trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Oracle,
    Afw,
    Dfa,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Oracle, Backend::Afw, Backend::Dfa];
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Oracle => "oracle",
            Backend::Afw => "afw",
            Backend::Dfa => "dfa",
        })
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "oracle" => Ok(Backend::Oracle),
            "afw" => Ok(Backend::Afw),
            "dfa" => Ok(Backend::Dfa),
            other => Err(format!("unknown backend `{other}` (expected oracle, afw or dfa)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub id: String,
    pub accepted: bool,
    /// First letter after which acceptance became impossible; DFA backend
    /// only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterReport {
    pub backend: Backend,
    pub total: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub verdicts: Vec<Verdict>,
    #[serde(serialize_with = "seconds")]
    pub compile_time: Duration,
    #[serde(serialize_with = "seconds")]
    pub check_time: Duration,
}

fn seconds<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl FilterReport {
    pub fn summary(&self) -> String {
        format!(
            "{} of {} traces accepted ({} rejected) by {} in {:.3} ms",
            self.accepted,
            self.total,
            self.rejected,
            self.backend,
            (self.compile_time + self.check_time).as_secs_f64() * 1e3
        )
    }
}

/// Splits `items` into at most `jobs` contiguous chunks, maps them on scoped
/// threads and concatenates the results in order.
fn par_map<T: Sync, U: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let jobs = jobs.max(1).min(items.len().max(1));
    if jobs == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(f).collect::<Vec<U>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("filter worker panicked"))
            .collect()
    })
}

/// Keeps the traces of `c` that satisfy `f` according to `backend`, using
/// `jobs` worker threads. Output order follows the corpus.
pub fn filter_traces(f: &Formula, c: &TraceCorpus, backend: Backend, jobs: usize) -> (TraceCorpus, FilterReport) {
    let started = Instant::now();
    enum Compiled {
        Oracle,
        Afw(crate::afw::Afw),
        Dfa(crate::fsa::Dfa),
    }
    let compiled = match backend {
        Backend::Oracle => Compiled::Oracle,
        Backend::Afw => Compiled::Afw(compile_afw(f)),
        Backend::Dfa => Compiled::Dfa(minimize(&nfa_to_dfa(&afw_to_nfa(&compile_afw(f))))),
    };
    let compile_time = started.elapsed();
    let started = Instant::now();
    let verdicts = par_map(&c.entries, jobs, |(id, t)| {
        let (accepted, failure) = match &compiled {
            Compiled::Oracle => (accepts_semantics(f, t), None),
            Compiled::Afw(a) => (afw_accepts(a, t), None),
            Compiled::Dfa(d) => (dfa_accepts(d, t), first_failure(d, t)),
        };
        Verdict {
            id: id.clone(),
            accepted,
            failure,
        }
    });
    let check_time = started.elapsed();
    let mut kept = TraceCorpus::new();
    for ((id, t), v) in c.entries.iter().zip(&verdicts) {
        if v.accepted {
            kept.entries.push((id.clone(), t.clone()));
        }
    }
    let accepted = kept.len();
    let report = FilterReport {
        backend,
        total: c.len(),
        accepted,
        rejected: c.len() - accepted,
        verdicts,
        compile_time,
        check_time,
    };
    (kept, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    const RUNNING: &str = "< ([ true* ] b)? > < true > a";

    fn write(c: &TraceCorpus) -> String {
        let mut out = Vec::new();
        write_traces(c, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn reads_basic_records() {
        let c = parse_traces("[[\"b\"],[\"a\",\"b\"]]\n").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.get("t0").unwrap().len(), 2);
        let c = parse_traces("[[]]").unwrap();
        assert_eq!(c.get("t0").unwrap().letters(), &[Letter::new()]);
        assert!(matches!(parse_traces("[]"), Err(TraceError::EmptyTrace { line: 1 })));
    }

    #[test]
    fn reports_line_numbers() {
        let text = "# comment\n[[\"a\"]]\n\n[[\"a\"], [1]]\n";
        assert!(matches!(parse_traces(text), Err(TraceError::NonStringAtom { line: 4 })));
        assert!(matches!(parse_traces("[[\"a\"]]\n[[\"a\""), Err(TraceError::Malformed { line: 2, .. })));
        assert!(matches!(parse_traces("\"x\""), Err(TraceError::Malformed { line: 1, .. })));
        assert!(matches!(
            parse_traces("{\"id\": \"t1\", \"trace\": [[]]}\n[[]]"),
            Err(TraceError::DuplicateId { line: 2, .. })
        ));
        assert!(matches!(parse_traces("{\"trace\": [[]]}"), Err(TraceError::Malformed { .. })));
    }

    #[test]
    fn round_trips() {
        for text in [
            "[[\"b\"],[\"a\",\"b\"]]\n",
            "[[]]\n",
            "{\"id\": \"x\", \"trace\": [[\"a\"]]}\n[[\"b\"]]\n",
            GRID_CORPUS,
        ] {
            let c = parse_traces(text).unwrap();
            let again = write(&c);
            assert_eq!(parse_traces(&again).unwrap(), c);
            assert_eq!(write(&parse_traces(&again).unwrap()), again);
        }
    }

    #[test]
    fn running_example_filter() {
        let c = parse_traces("[[\"b\"],[\"a\",\"b\"]]\n[[\"b\"],[\"a\"]]\n[[\"b\"]]\n").unwrap();
        let f = parse_formula(RUNNING).unwrap();
        for backend in Backend::ALL {
            let (kept, report) = filter_traces(&f, &c, backend, 1);
            assert_eq!(kept.ids(), vec!["t0"]);
            assert_eq!((report.total, report.accepted, report.rejected), (3, 1, 2));
        }
        let (_, report) = filter_traces(&f, &c, Backend::Dfa, 1);
        let failures: Vec<Option<usize>> = report.verdicts.iter().map(|v| v.failure).collect();
        assert_eq!(failures, vec![None, Some(1), Some(0)]);
        let (kept, _) = filter_traces(&Formula::True, &c, Backend::Afw, 2);
        assert_eq!(kept, c);
    }

    #[test]
    fn grid_corpus_accepts_monotone_plans() {
        let c = parse_traces(GRID_CORPUS).unwrap();
        assert_eq!(c.len(), 10);
        let f = parse_formula(GRID_CONSTRAINT).unwrap();
        let expected = vec!["plan01", "plan02", "plan03", "plan04", "plan05"];
        for backend in Backend::ALL {
            for jobs in [1, 4] {
                assert_eq!(filter_traces(&f, &c, backend, jobs).0.ids(), expected, "{backend} x{jobs}");
            }
        }
    }

    #[test]
    fn par_map_keeps_order() {
        let items: Vec<usize> = (0..37).collect();
        for jobs in [1, 2, 4, 64] {
            assert_eq!(par_map(&items, jobs, |x| x * 2), items.iter().map(|x| x * 2).collect::<Vec<_>>());
        }
        assert!(par_map(&Vec::<usize>::new(), 4, |x| *x).is_empty());
    }
}
