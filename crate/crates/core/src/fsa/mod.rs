//! Dealternation, subset construction, minimization and DFA analyses.

mod analysis;
mod dfa;
mod minimize;
mod nfa;

pub use analysis::{dfa_stats, distinguishing_trace, equivalent, first_failure, is_empty, shortest_witness};
pub use dfa::{dfa_accepts, minterms, nfa_to_dfa, Dfa};
pub use minimize::minimize;
pub use nfa::{afw_to_nfa, nfa_accepts, Nfa, NfaTransition};
