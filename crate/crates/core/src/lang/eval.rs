// SPDX-License-Identifier: Apache-2.0

//! Call-by-value concrete evaluator: the ground truth for all symbolic machinery.

use super::prim::{apply_primitive, is_primitive};
use super::term::{DefEnv, Term};
use super::value::{Sym, Value};
use super::LangError;

/// Default number of function expansions before evaluation gives up.
pub const DEFAULT_STEP_LIMIT: u64 = 10_000_000;

/// Counts function expansions against a fixed limit.
#[derive(Clone, Debug)]
pub struct StepBudget {
    limit: u64,
    used: u64,
}

impl StepBudget {
    pub fn new(limit: u64) -> Self {
        StepBudget { limit, used: 0 }
    }

    pub fn charge(&mut self) -> Result<(), LangError> {
        if self.used >= self.limit {
            return Err(LangError::StepLimit(self.limit));
        }
        self.used += 1;
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.used
    }
}

impl Default for StepBudget {
    fn default() -> Self {
        StepBudget::new(DEFAULT_STEP_LIMIT)
    }
}

/// Variable environment; later entries shadow earlier ones.
pub type Env = Vec<(Sym, Value)>;

fn lookup<'e>(env: &'e [(Sym, Value)], name: &str) -> Option<&'e Value> {
    env.iter().rev().find(|(n, _)| &**n == name).map(|(_, v)| v)
}

/// Evaluates `term` concretely.
pub fn eval_concrete(
    term: &Term,
    env: &[(Sym, Value)],
    defs: &DefEnv,
    steps: &mut StepBudget,
) -> Result<Value, LangError> {
    match term {
        Term::Quote(v) => Ok(v.clone()),
        Term::Var(name) => lookup(env, name)
            .cloned()
            .ok_or_else(|| LangError::UnboundVariable(name.to_string())),
        Term::If(test, then, els) => {
            if eval_concrete(test, env, defs, steps)?.is_nil() {
                eval_concrete(els, env, defs, steps)
            } else {
                eval_concrete(then, env, defs, steps)
            }
        }
        Term::Let {
            bindings,
            body,
            sequential,
        } => {
            let mut inner: Env = env.to_vec();
            if *sequential {
                for (name, t) in bindings {
                    let v = eval_concrete(t, &inner, defs, steps)?;
                    inner.push((name.clone(), v));
                }
            } else {
                let vals = bindings
                    .iter()
                    .map(|(_, t)| eval_concrete(t, env, defs, steps))
                    .collect::<Result<Vec<_>, _>>()?;
                inner.extend(bindings.iter().map(|(n, _)| n.clone()).zip(vals));
            }
            eval_concrete(body, &inner, defs, steps)
        }
        Term::Call(f, args) => {
            let vals = args
                .iter()
                .map(|a| eval_concrete(a, env, defs, steps))
                .collect::<Result<Vec<_>, _>>()?;
            call_concrete(f, &vals, defs, steps)
        }
    }
}

/// Applies a primitive or expands a definition on concrete actuals.
pub fn call_concrete(
    f: &str,
    args: &[Value],
    defs: &DefEnv,
    steps: &mut StepBudget,
) -> Result<Value, LangError> {
    if is_primitive(f) {
        return apply_primitive(f, args);
    }
    let def = defs
        .get(f)
        .ok_or_else(|| LangError::UnknownFunction(f.to_string()))?;
    if def.formals.len() != args.len() {
        return Err(LangError::Arity {
            name: f.to_string(),
            expected: def.formals.len(),
            got: args.len(),
        });
    }
    steps.charge()?;
    let env: Env = def
        .formals
        .iter()
        .cloned()
        .zip(args.iter().cloned())
        .collect();
    eval_concrete(&def.body, &env, defs, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::sexp::read_one;
    use crate::lang::term::{parse_defun, parse_term};

    fn eval(src: &str, defs: &DefEnv) -> Result<Value, LangError> {
        let t = parse_term(&read_one(src).unwrap()).unwrap();
        eval_concrete(&t, &[], defs, &mut StepBudget::default())
    }

    #[test]
    fn basics() {
        let defs = DefEnv::with_prelude();
        assert_eq!(eval("(if nil 1 2)", &defs).unwrap(), Value::int(2));
        assert_eq!(eval("(logcount #b10111)", &defs).unwrap(), Value::int(4));
        assert_eq!(
            eval("(unsigned-byte-p 32 4294967295)", &defs).unwrap(),
            Value::t()
        );
        assert_eq!(
            eval("(unsigned-byte-p 32 4294967296)", &defs).unwrap(),
            Value::nil()
        );
        assert_eq!(eval("(signed-byte-p 4 -8)", &defs).unwrap(), Value::t());
        assert_eq!(eval("(signed-byte-p 4 8)", &defs).unwrap(), Value::nil());
        assert_eq!(
            eval("(let* ((a 1) (b (+ a 1))) (list a b))", &defs)
                .unwrap()
                .to_string(),
            "(1 2)"
        );
        assert_eq!(
            eval("(member 2 '(1 2 3))", &defs).unwrap().to_string(),
            "(2 3)"
        );
        assert_eq!(eval("(or nil 7)", &defs).unwrap(), Value::int(7));
    }

    #[test]
    fn errors() {
        let mut defs = DefEnv::with_prelude();
        assert!(matches!(
            eval("x", &defs),
            Err(LangError::UnboundVariable(_))
        ));
        assert!(matches!(
            eval("(frob 1)", &defs),
            Err(LangError::UnknownFunction(_))
        ));
        assert!(matches!(
            eval("(natp 1 2)", &defs),
            Err(LangError::Arity { .. })
        ));
        defs.define(parse_defun(&read_one("(defun loop (x) (loop x))").unwrap()).unwrap())
            .unwrap();
        let t = parse_term(&read_one("(loop 1)").unwrap()).unwrap();
        let r = eval_concrete(&t, &[], &defs, &mut StepBudget::new(1000));
        assert!(matches!(r, Err(LangError::StepLimit(1000))));
    }

    #[test]
    fn re_evaluation_is_deterministic() {
        let defs = DefEnv::with_prelude();
        let a = eval("(list (ash -7 -2) (logxor 12 -3) (* 1/3 9))", &defs).unwrap();
        let b = eval("(list (ash -7 -2) (logxor 12 -3) (* 1/3 9))", &defs).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "(-2 -15 3)");
    }
}
