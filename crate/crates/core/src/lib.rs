//! Partially-commutative context-free grammars and their relatives.
//!
//! Greibach grammars whose non-terminals commute according to an
//! independence relation, together with exact bounded membership, colored
//! derivation trees and certificates, closure constructions, stateless
//! multi-pushdown automata, PA grammars, trace closures of context-free
//! languages and executable pumping conditions.

pub mod acceptance;
pub mod closure;
pub mod engine;
pub mod gallery;
pub mod grammar;
pub mod mpda;
pub mod pa;
pub mod pcg;
pub mod pump;
pub mod trace;
pub mod tree;
pub mod word;

pub use engine::{
    canonical, derive_witness, enumerate, member, successors, swap_reachable, CanonicalTrace, Derivation, EngineError,
    Step,
};
pub use grammar::{dependence, threads, validate, Diagnostic, Grammar, GrammarError, Nt, ThreadPartition};
pub use word::{Letter, Word};
