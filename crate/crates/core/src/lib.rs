//! A linear λ-calculus with numbers, pairs and an unbounded recursor.
//!
//! Terms are syntactically linear: every bound variable occurs exactly once.
//! Reduction is *closed*: β, `let` and `rec` redexes only fire when the
//! designated subterms have no free variables, so substitution never needs
//! α-conversion. The crate provides
//!
//! * [`syntax`]: terms, linearity checking, substitution, parsing/printing;
//! * [`typing`]: linear type inference and the relaxed system used to check
//!   compiler intermediates;
//! * [`reduction`]: small-step closed reduction and normalisation;
//! * [`eval`]: big-step call-by-name and call-by-value evaluators;
//! * [`machine`]: an environment-free stack machine;
//! * [`stdlib`]: the standard encodings (arithmetic, erasure, duplication,
//!   fixpoints, minimisation, conditionals);
//! * [`minext`]: the variant with an explicit minimiser and bounded iterator;
//! * [`pcf`]: a PCF front end compiled into the linear calculus;
//! * [`generate`]: a type-directed random generator of well-typed terms.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod eval;
pub mod fuel;
pub mod generate;
pub mod machine;
pub mod minext;
pub mod pcf;
pub mod reduction;
pub mod stdlib;
pub mod syntax;
pub mod typing;

pub use fuel::Fuel;
pub use syntax::{Calculus, Path, Term, TermKind, Var};
pub use typing::LinType;
