// SPDX-License-Identifier: Apache-2.0

//! The kernel term language: values, reader, terms, and concrete semantics.

pub mod eval;
pub mod prelude;
pub mod prim;
pub mod sexp;
pub mod term;
pub mod value;

use thiserror::Error;

pub use eval::{call_concrete, eval_concrete, Env, StepBudget, DEFAULT_STEP_LIMIT};
pub use prim::apply_primitive;
pub use term::{parse_defun, parse_term, DefEnv, FunDef, Term};
pub use value::{sym, Sym, Value};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LangError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("malformed form: {0}")]
    Malformed(String),
    #[error("duplicate definition of {0}")]
    DuplicateDefinition(String),
    #[error("cannot redefine primitive {0}")]
    PrimitiveRedefinition(String),
    #[error("unknown top-level form {0}")]
    UnknownForm(String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("unknown function {0}")]
    UnknownFunction(String),
    #[error("{name} expects {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("step limit of {0} function expansions exhausted")]
    StepLimit(u64),
}
