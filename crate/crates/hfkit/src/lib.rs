//! Workbench for definability machinery over hereditarily finite sets:
//! a term compiler for bounded separation, finite constructible stages,
//! Kripke forcing with the full-model name construction, a fuel-bounded
//! set-recursion VM, and realizability checking, each backed by an
//! independent brute-force oracle.

pub mod compile;
pub mod erec;
pub mod formula;
pub mod hf;
pub mod hier;
pub mod kripke;
pub mod names;
pub mod ops;
pub mod oracle;
pub mod realize;
