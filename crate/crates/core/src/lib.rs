//! Abstraction logic: terms with binders, capture-avoiding substitution,
//! finite-model semantics and an LCF-style proof kernel.

pub mod gen;
pub mod kernel;
pub mod semantics;
pub mod subst;
pub mod syntax;
pub mod terms;
pub mod theories;
