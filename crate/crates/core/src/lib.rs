// SPDX-License-Identifier: Apache-2.0

//! Bit-blasting theorem prover for finite properties of Lisp-like terms.
//!
//! Terms are symbolically executed over objects whose bits are Boolean
//! expressions ([`bdd`] or [`aig`] realizations). A goal is proved when its
//! symbolic result can never represent `nil`; otherwise counterexamples are
//! produced and checked against the concrete evaluator in [`lang`].

pub mod aig;
pub mod bdd;
pub mod boolenv;
pub mod counterparts;
pub mod engine;
pub mod file;
pub mod interp;
pub mod lang;
pub mod prover;
pub mod sat;
pub mod shape;
pub mod symobj;

pub use boolenv::{BoolEnv, Policy};
pub use engine::{Bit, Engine, Mode};
pub use lang::{DefEnv, Sym, Term, Value};
pub use symobj::SymObj;
