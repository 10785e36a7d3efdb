//! Scalable formula families and the size/throughput table.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::afw::{afw_accepts, afw_stats, compile_afw};
use crate::formula::Formula;
use crate::fsa::{afw_to_nfa, dfa_accepts, dfa_stats, minimize, nfa_to_dfa};
use crate::semantics::{Letter, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `F(p1 & X(p2 & ... X pd))`
    NestedNext,
    /// `F(p1 & F(p2 & ... F pd))`
    EventuallyChain,
    /// `p1 U (p2 U ... pd)`
    UntilLadder,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::NestedNext, Family::EventuallyChain, Family::UntilLadder];

    /// The member of depth `d >= 1`, over atoms `p1..pd`.
    pub fn formula(self, d: usize) -> Formula {
        assert!(d >= 1, "depth starts at 1");
        let p = |i: usize| Formula::atom(format!("p{i}"));
        match self {
            Family::NestedNext => {
                let mut inner = p(d);
                for i in (1..d).rev() {
                    inner = Formula::and(p(i), Formula::next(inner));
                }
                Formula::eventually(inner)
            }
            Family::EventuallyChain => {
                let mut inner = Formula::eventually(p(d));
                for i in (1..d).rev() {
                    inner = Formula::eventually(Formula::and(p(i), inner));
                }
                inner
            }
            Family::UntilLadder => {
                let mut inner = p(d);
                for i in (1..d).rev() {
                    inner = Formula::until(p(i), inner);
                }
                inner
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::NestedNext => "nested-next",
            Family::EventuallyChain => "eventually-chain",
            Family::UntilLadder => "until-ladder",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| format!("unknown family `{s}` (expected nested-next, eventually-chain or until-ladder)"))
    }
}

/// One line of the benchmark table.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub family: Family,
    pub depth: usize,
    pub afw_states: usize,
    pub afw_transitions: usize,
    pub nfa_states: usize,
    pub dfa_states: usize,
    pub min_dfa_states: usize,
    pub min_dfa_transitions: usize,
    pub afw_compile_us: u128,
    pub dfa_compile_us: u128,
    pub traces: usize,
    pub afw_check_us: u128,
    pub dfa_check_us: u128,
}

/// Seeded random traces over the atoms `p1..pd`.
pub fn random_traces(seed: u64, atoms: usize, count: usize, max_len: usize) -> Vec<Trace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.max(1));
            let letters = (0..len)
                .map(|_| {
                    (1..=atoms)
                        .filter(|_| rng.gen_bool(0.5))
                        .map(|i| format!("p{i}"))
                        .collect::<Letter>()
                })
                .collect();
            Trace::new(letters).expect("length is at least one")
        })
        .collect()
}

/// Measures sizes, compile times and check throughput for one member.
pub fn bench_row(family: Family, depth: usize, traces: &[Trace]) -> BenchRow {
    let f = family.formula(depth);
    let started = Instant::now();
    let a = compile_afw(&f);
    let afw_compile_us = started.elapsed().as_micros();
    let started = Instant::now();
    let n = afw_to_nfa(&a);
    let d = nfa_to_dfa(&n);
    let m = minimize(&d);
    let dfa_compile_us = started.elapsed().as_micros() + afw_compile_us;

    let started = Instant::now();
    let by_afw: Vec<bool> = traces.iter().map(|t| afw_accepts(&a, t)).collect();
    let afw_check_us = started.elapsed().as_micros();
    let started = Instant::now();
    let by_dfa: Vec<bool> = traces.iter().map(|t| dfa_accepts(&m, t)).collect();
    let dfa_check_us = started.elapsed().as_micros();
    assert_eq!(by_afw, by_dfa, "backends disagree on {f}");

    let afw = afw_stats(&a);
    let min = dfa_stats(&m);
    BenchRow {
        family,
        depth,
        afw_states: afw.states,
        afw_transitions: afw.transitions,
        nfa_states: n.num_states(),
        dfa_states: d.num_states(),
        min_dfa_states: min.states,
        min_dfa_transitions: min.transitions,
        afw_compile_us,
        dfa_compile_us,
        traces: traces.len(),
        afw_check_us,
        dfa_check_us,
    }
}

/// Rows for depths `1..=max_depth`, checked on `traces` random traces each.
pub fn bench(family: Family, depths: impl IntoIterator<Item = usize>, seed: u64, traces: usize) -> Vec<BenchRow> {
    depths
        .into_iter()
        .map(|d| bench_row(family, d, &random_traces(seed, d, traces, 2 * d + 4)))
        .collect()
}

/// CSV with a header line.
pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is UTF-8")
}
