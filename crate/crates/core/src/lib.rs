//! A logic-neutral deductive-system kernel.
//!
//! The kernel verifies Metamath databases by RPN replay, verifies declarative
//! Russell-style proofs against a context-free expression grammar, checks
//! definitions for conservativity, and translates between the two formats
//! through a scope-flattened intermediate form (SMM).

pub mod grammar;
pub mod mm;
pub mod rus;
pub mod split;
pub mod stats;
pub mod symbol;
pub mod translate;

pub use symbol::{
    apply_substitution, check_disjoint, DisjointPairs, DisjointViolation, Expression, Substitution, Symbol,
};
