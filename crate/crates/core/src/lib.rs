pub mod afw;
pub mod bench;
pub mod export;
pub mod formula;
pub mod fsa;
pub mod semantics;
pub mod traces;
