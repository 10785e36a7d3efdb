//! Textual forms of the automata: ASP facts, GraphViz and MONA.

mod asp;
mod dot;
mod mona;
mod view;

pub use asp::{emit_asp_facts, parse_asp_facts, AspError};
pub use dot::emit_dot;
pub use mona::{emit_mona, locate_mona, mona_dfa, mona_variables, parse_mona_dot, run_mona, MonaError};
pub use view::{AutomatonView, ViewKind};
