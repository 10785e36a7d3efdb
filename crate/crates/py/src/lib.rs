//! Python bindings: formulas, alternating automata and DFAs.
//!
//! Traces cross the boundary as lists of letters, each letter a list of
//! atom names.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dynaut::afw::{afw_accepts, afw_stats, compile_afw, Stats};
use dynaut::export::{emit_asp_facts, emit_dot, parse_asp_facts, AutomatonView};
use dynaut::formula::{closure, desugar, nnf, parse_formula, render};
use dynaut::fsa::{
    afw_to_nfa, dfa_accepts, dfa_stats, distinguishing_trace, first_failure, is_empty, minimize, nfa_to_dfa,
    shortest_witness,
};
use dynaut::semantics::{accepts_semantics, Trace};
use dynaut::traces::{filter_traces as filter, parse_traces, Backend, TraceCorpus};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_trace(letters: Vec<Vec<String>>) -> PyResult<Trace> {
    Trace::new(letters.into_iter().map(|l| l.into_iter().collect()).collect())
        .map_err(|_| PyValueError::new_err("a trace needs at least one letter"))
}

fn from_trace(t: &Trace) -> Vec<Vec<String>> {
    t.letters().iter().map(|l| l.iter().cloned().collect()).collect()
}

fn stats_map(s: Stats) -> BTreeMap<&'static str, usize> {
    BTreeMap::from([
        ("states", s.states),
        ("transitions", s.transitions),
        ("max_successors", s.max_successors),
        ("alphabet", s.alphabet),
    ])
}

/// An LDLf formula; LTLf operators are accepted as sugar.
#[pyclass(name = "Formula", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyFormula(dynaut::formula::Formula);

#[pymethods]
impl PyFormula {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_formula(text).map(PyFormula).map_err(value_error)
    }

    fn __str__(&self) -> String {
        render(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", render(&self.0))
    }

    fn atoms(&self) -> Vec<String> {
        self.0.atoms()
    }

    fn depth(&self) -> usize {
        self.0.depth()
    }

    fn desugar(&self) -> Self {
        PyFormula(desugar(&self.0))
    }

    fn nnf(&self) -> Self {
        PyFormula(nnf(&self.0))
    }

    fn closure(&self) -> Vec<Self> {
        closure(&nnf(&self.0)).into_iter().map(PyFormula).collect()
    }

    /// Oracle verdict from the direct semantics.
    fn accepts(&self, trace: Vec<Vec<String>>) -> PyResult<bool> {
        Ok(accepts_semantics(&self.0, &to_trace(trace)?))
    }

    fn to_mona(&self) -> String {
        dynaut::export::emit_mona(&self.0)
    }
}

/// Alternating automaton compiled from a formula or read from ASP facts.
#[pyclass(name = "Afw", frozen)]
struct PyAfw(dynaut::afw::Afw);

#[pymethods]
impl PyAfw {
    #[new]
    fn new(formula: PyRef<'_, PyFormula>) -> Self {
        PyAfw(compile_afw(&formula.0))
    }

    #[staticmethod]
    fn from_asp(text: &str) -> PyResult<Self> {
        parse_asp_facts(text).map(PyAfw).map_err(value_error)
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.0.num_states()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }

    fn stats(&self) -> BTreeMap<&'static str, usize> {
        stats_map(afw_stats(&self.0))
    }

    fn accepts(&self, trace: Vec<Vec<String>>) -> PyResult<bool> {
        Ok(afw_accepts(&self.0, &to_trace(trace)?))
    }

    fn to_asp(&self) -> String {
        emit_asp_facts(&AutomatonView::from(&self.0))
    }

    fn to_dot(&self) -> String {
        emit_dot(&AutomatonView::from(&self.0))
    }

    #[pyo3(signature = (minimal = true))]
    fn to_dfa(&self, minimal: bool) -> PyDfa {
        let d = nfa_to_dfa(&afw_to_nfa(&self.0));
        PyDfa(if minimal { minimize(&d) } else { d })
    }
}

/// Deterministic automaton over minterm letters.
#[pyclass(name = "Dfa", frozen)]
struct PyDfa(dynaut::fsa::Dfa);

#[pymethods]
impl PyDfa {
    #[new]
    #[pyo3(signature = (formula, minimal = true))]
    fn new(formula: PyRef<'_, PyFormula>, minimal: bool) -> Self {
        PyAfw(compile_afw(&formula.0)).to_dfa(minimal)
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.0.num_states()
    }

    fn stats(&self) -> BTreeMap<&'static str, usize> {
        stats_map(dfa_stats(&self.0))
    }

    fn accepts(&self, trace: Vec<Vec<String>>) -> PyResult<bool> {
        Ok(dfa_accepts(&self.0, &to_trace(trace)?))
    }

    /// Index of the letter after which the trace can no longer be accepted.
    fn first_failure(&self, trace: Vec<Vec<String>>) -> PyResult<Option<usize>> {
        Ok(first_failure(&self.0, &to_trace(trace)?))
    }

    fn is_empty(&self) -> bool {
        is_empty(&self.0)
    }

    fn shortest_witness(&self) -> Option<Vec<Vec<String>>> {
        shortest_witness(&self.0).as_ref().map(from_trace)
    }

    fn equivalent(&self, other: PyRef<'_, PyDfa>) -> bool {
        distinguishing_trace(&self.0, &other.0).is_none()
    }

    fn distinguishing_trace(&self, other: PyRef<'_, PyDfa>) -> Option<Vec<Vec<String>>> {
        distinguishing_trace(&self.0, &other.0).as_ref().map(from_trace)
    }

    fn minimize(&self) -> Self {
        PyDfa(minimize(&self.0))
    }

    fn to_asp(&self) -> String {
        emit_asp_facts(&AutomatonView::from(&self.0))
    }

    fn to_dot(&self) -> String {
        emit_dot(&AutomatonView::from(&self.0))
    }
}

/// Parses a trace corpus in the JSON-lines format into `(id, trace)` pairs.
#[pyfunction]
fn read_traces(text: &str) -> PyResult<Vec<(String, Vec<Vec<String>>)>> {
    let corpus = parse_traces(text).map_err(value_error)?;
    Ok(corpus.iter().map(|(id, t)| (id.to_string(), from_trace(t))).collect())
}

/// Ids of the traces accepted by `formula`.
#[pyfunction]
#[pyo3(signature = (formula, traces, backend = "dfa", jobs = 1))]
fn filter_traces(
    formula: PyRef<'_, PyFormula>,
    traces: Vec<(String, Vec<Vec<String>>)>,
    backend: &str,
    jobs: usize,
) -> PyResult<Vec<String>> {
    let backend: Backend = backend.parse().map_err(PyValueError::new_err)?;
    let mut corpus = TraceCorpus::new();
    for (id, letters) in traces {
        corpus
            .push(id, to_trace(letters)?)
            .map_err(|id| PyValueError::new_err(format!("duplicate trace id `{id}`")))?;
    }
    let (kept, _) = filter(&formula.0, &corpus, backend, jobs);
    Ok(kept.ids().into_iter().map(str::to_string).collect())
}

#[pymodule]
fn dynaut_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFormula>()?;
    m.add_class::<PyAfw>()?;
    m.add_class::<PyDfa>()?;
    m.add_function(wrap_pyfunction!(read_traces, m)?)?;
    m.add_function(wrap_pyfunction!(filter_traces, m)?)?;
    Ok(())
}
