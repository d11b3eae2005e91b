// SPDX-License-Identifier: Apache-2.0

//! Symbolic objects: Lisp values some of whose parts are Boolean expressions.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::boolenv::BoolEnv;
use crate::engine::{Bit, Engine, EngineError};
use crate::lang::prim::logbitp;
use crate::lang::{call_concrete, DefEnv, LangError, StepBudget, Sym, Value};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymObj {
    Concrete(Value),
    /// `t` when the expression is true, `nil` otherwise.
    Boolean(Bit),
    /// Two's-complement integer, least significant bit first; the last bit
    /// is the sign.
    Number(Vec<Bit>),
    Ite(Arc<SymObj>, Arc<SymObj>, Arc<SymObj>),
    /// A call the interpreter could not execute symbolically.
    Apply(Sym, Vec<SymObj>),
    /// An unconstrained object.
    Var(Sym),
    Cons(Arc<SymObj>, Arc<SymObj>),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SymEvalError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("no value for unconstrained object {0}")]
    UnboundVar(String),
    #[error(transparent)]
    Lang(#[from] LangError),
}

/// Minimal two's-complement constant bits for `i` (at least one bit).
pub fn int_bits(i: &BigInt) -> Vec<Bit> {
    let magnitude = if i.is_negative() { -i - 1 } else { i.clone() };
    let width = magnitude.bits() + 1;
    (0..width)
        .map(|k| Bit::constant(logbitp(&BigInt::from(k), i)))
        .collect()
}

/// The integer denoted by concrete bits (lsb first, last is the sign).
pub fn bits_to_int(bits: &[bool]) -> BigInt {
    let mut acc = BigInt::zero();
    for (i, &b) in bits.iter().enumerate() {
        if b {
            if i + 1 == bits.len() {
                acc -= BigInt::one() << i;
            } else {
                acc += BigInt::one() << i;
            }
        }
    }
    acc
}

/// Drops redundant sign bits.
pub fn trim_bits(mut bits: Vec<Bit>) -> Vec<Bit> {
    while bits.len() > 1 && bits[bits.len() - 1] == bits[bits.len() - 2] {
        bits.pop();
    }
    bits
}

pub fn sign_extend(bits: &[Bit], width: usize) -> Vec<Bit> {
    let mut out = bits.to_vec();
    let sign = *bits.last().expect("nonempty bit vector");
    while out.len() < width {
        out.push(sign);
    }
    out
}

impl SymObj {
    pub fn nil() -> SymObj {
        SymObj::Concrete(Value::nil())
    }

    pub fn t() -> SymObj {
        SymObj::Concrete(Value::t())
    }

    pub fn int<T: Into<BigInt>>(i: T) -> SymObj {
        SymObj::Concrete(Value::int(i))
    }

    /// `Boolean`, collapsing constants to `t`/`nil`.
    pub fn boolean(b: Bit) -> SymObj {
        match b.as_const() {
            Some(c) => SymObj::Concrete(Value::bool(c)),
            None => SymObj::Boolean(b),
        }
    }

    /// `Number`, trimming redundant sign bits and collapsing constants.
    pub fn number(bits: Vec<Bit>) -> SymObj {
        assert!(!bits.is_empty(), "numbers have at least one bit");
        let bits = trim_bits(bits);
        let consts: Option<Vec<bool>> = bits.iter().map(|b| b.as_const()).collect();
        match consts {
            Some(c) => SymObj::Concrete(Value::Int(bits_to_int(&c))),
            None => SymObj::Number(bits),
        }
    }

    pub fn cons(car: SymObj, cdr: SymObj) -> SymObj {
        match (car, cdr) {
            (SymObj::Concrete(a), SymObj::Concrete(b)) => SymObj::Concrete(Value::cons(a, b)),
            (a, b) => SymObj::Cons(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn ite(test: SymObj, then: SymObj, els: SymObj) -> SymObj {
        SymObj::Ite(Arc::new(test), Arc::new(then), Arc::new(els))
    }

    pub fn as_concrete(&self) -> Option<&Value> {
        match self {
            SymObj::Concrete(v) => Some(v),
            _ => None,
        }
    }

    /// Bits of an integer-valued object (`Number` or concrete integer).
    pub fn int_bits(&self) -> Option<Vec<Bit>> {
        match self {
            SymObj::Number(bits) => Some(bits.clone()),
            SymObj::Concrete(Value::Int(i)) => Some(int_bits(i)),
            _ => None,
        }
    }

    /// The first `Apply` or `Var` inside this object, if any.
    pub fn find_escape(&self) -> Option<&SymObj> {
        match self {
            SymObj::Apply(..) | SymObj::Var(_) => Some(self),
            SymObj::Ite(a, b, c) => a
                .find_escape()
                .or_else(|| b.find_escape())
                .or_else(|| c.find_escape()),
            SymObj::Cons(a, b) => a.find_escape().or_else(|| b.find_escape()),
            _ => None,
        }
    }

    /// Every Boolean expression inside the object.
    pub fn bits(&self, out: &mut Vec<Bit>) {
        match self {
            SymObj::Concrete(_) | SymObj::Var(_) => {}
            SymObj::Boolean(b) => out.push(*b),
            SymObj::Number(bs) => out.extend(bs),
            SymObj::Ite(a, b, c) => {
                a.bits(out);
                b.bits(out);
                c.bits(out);
            }
            SymObj::Apply(_, args) => args.iter().for_each(|a| a.bits(out)),
            SymObj::Cons(a, b) => {
                a.bits(out);
                b.bits(out);
            }
        }
    }

    /// Rebuilds the object with every Boolean expression mapped by `f`.
    pub fn map_bits(&self, f: &mut dyn FnMut(Bit) -> Bit) -> SymObj {
        match self {
            SymObj::Concrete(_) | SymObj::Var(_) => self.clone(),
            SymObj::Boolean(b) => SymObj::boolean(f(*b)),
            SymObj::Number(bs) => SymObj::number(bs.iter().map(|b| f(*b)).collect()),
            SymObj::Ite(a, b, c) => SymObj::ite(a.map_bits(f), b.map_bits(f), c.map_bits(f)),
            SymObj::Apply(name, args) => {
                SymObj::Apply(name.clone(), args.iter().map(|a| a.map_bits(f)).collect())
            }
            SymObj::Cons(a, b) => SymObj::cons(a.map_bits(f), b.map_bits(f)),
        }
    }

    /// Diagnostic rendering: constant bits print as `t`/`nil`, others as `#`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_into(&mut s);
        s
    }

    fn render_into(&self, s: &mut String) {
        let bit = |b: &Bit| match b.as_const() {
            Some(true) => "t",
            Some(false) => "nil",
            None => "#",
        };
        match self {
            SymObj::Concrete(v) => {
                let _ = write!(s, "{v}");
            }
            SymObj::Boolean(b) => {
                let _ = write!(s, "(:g-boolean . {})", bit(b));
            }
            SymObj::Number(bs) => {
                s.push_str("(:g-number (");
                let parts: Vec<&str> = bs.iter().map(bit).collect();
                s.push_str(&parts.join(" "));
                s.push_str("))");
            }
            SymObj::Ite(a, b, c) => {
                s.push_str("(:g-ite ");
                a.render_into(s);
                s.push(' ');
                b.render_into(s);
                s.push_str(" . ");
                c.render_into(s);
                s.push(')');
            }
            SymObj::Apply(name, args) => {
                let _ = write!(s, "(g-apply {name} (");
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        s.push(' ');
                    }
                    a.render_into(s);
                }
                s.push_str("))");
            }
            SymObj::Var(name) => {
                let _ = write!(s, "(:g-var . {name})");
            }
            SymObj::Cons(a, b) => {
                s.push('(');
                a.render_into(s);
                s.push_str(" . ");
                b.render_into(s);
                s.push(')');
            }
        }
    }
}

/// Concrete value of `obj` under a Boolean assignment and unconstrained-object values.
pub fn sym_eval(
    obj: &SymObj,
    benv: &BoolEnv,
    venv: &[(Sym, Value)],
    defs: &DefEnv,
    eng: &Engine,
) -> Result<Value, SymEvalError> {
    Ok(match obj {
        SymObj::Concrete(v) => v.clone(),
        SymObj::Boolean(b) => Value::bool(eng.eval(*b, benv)?),
        SymObj::Number(bits) => Value::Int(bits_to_int(&eng.eval_many(bits, benv)?)),
        SymObj::Ite(test, then, els) => {
            if sym_eval(test, benv, venv, defs, eng)?.is_nil() {
                sym_eval(els, benv, venv, defs, eng)?
            } else {
                sym_eval(then, benv, venv, defs, eng)?
            }
        }
        SymObj::Apply(f, args) => {
            let vals = args
                .iter()
                .map(|a| sym_eval(a, benv, venv, defs, eng))
                .collect::<Result<Vec<_>, _>>()?;
            call_concrete(f, &vals, defs, &mut StepBudget::default())?
        }
        SymObj::Var(name) => venv
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| SymEvalError::UnboundVar(name.to_string()))?,
        SymObj::Cons(a, b) => Value::cons(
            sym_eval(a, benv, venv, defs, eng)?,
            sym_eval(b, benv, venv, defs, eng)?,
        ),
    })
}

/// An object whose `nil`-ness cannot be expressed as a Boolean expression,
/// carrying the escape that blocks it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Indeterminate(pub SymObj);

/// Expression that is true exactly where `obj` evaluates to `nil`.
pub fn nil_possibility(obj: &SymObj, eng: &mut Engine) -> Result<Bit, Indeterminate> {
    match obj {
        SymObj::Concrete(v) => Ok(Bit::constant(v.is_nil())),
        SymObj::Boolean(b) => Ok(eng.not(*b)),
        SymObj::Number(_) | SymObj::Cons(..) => Ok(Bit::FALSE),
        SymObj::Ite(test, then, els) => {
            let c = truth(test, eng)?;
            match c.as_const() {
                Some(true) => nil_possibility(then, eng),
                Some(false) => nil_possibility(els, eng),
                None => {
                    let a = nil_possibility(then, eng)?;
                    let b = nil_possibility(els, eng)?;
                    Ok(eng.ite(c, a, b))
                }
            }
        }
        SymObj::Apply(..) | SymObj::Var(_) => Err(Indeterminate(obj.clone())),
    }
}

/// Expression that is true exactly where `obj` evaluates to non-`nil`.
pub fn truth(obj: &SymObj, eng: &mut Engine) -> Result<Bit, Indeterminate> {
    let n = nil_possibility(obj, eng)?;
    Ok(eng.not(n))
}

fn as_boolean_bit(obj: &SymObj) -> Option<Bit> {
    match obj {
        SymObj::Boolean(b) => Some(*b),
        SymObj::Concrete(v) if v.is_nil() => Some(Bit::FALSE),
        SymObj::Concrete(v) if v.is_t() => Some(Bit::TRUE),
        _ => None,
    }
}

fn as_cons_parts(obj: &SymObj) -> Option<(SymObj, SymObj)> {
    match obj {
        SymObj::Cons(a, b) => Some(((**a).clone(), (**b).clone())),
        SymObj::Concrete(Value::Cons(a, b)) => Some((
            SymObj::Concrete((**a).clone()),
            SymObj::Concrete((**b).clone()),
        )),
        _ => None,
    }
}

/// The object that behaves as `then` where `test` holds and as `els` elsewhere.
pub fn merge_ite(test: Bit, then: SymObj, els: SymObj, eng: &mut Engine) -> SymObj {
    match test.as_const() {
        Some(true) => return then,
        Some(false) => return els,
        None => {}
    }
    if then == els {
        return then;
    }
    if let (Some(a), Some(b)) = (as_boolean_bit(&then), as_boolean_bit(&els)) {
        return SymObj::boolean(eng.ite(test, a, b));
    }
    if let (Some(a), Some(b)) = (then.int_bits(), els.int_bits()) {
        let w = a.len().max(b.len());
        let (a, b) = (sign_extend(&a, w), sign_extend(&b, w));
        let bits = a
            .iter()
            .zip(&b)
            .map(|(x, y)| eng.ite(test, *x, *y))
            .collect();
        return SymObj::number(bits);
    }
    if let (Some((a1, a2)), Some((b1, b2))) = (as_cons_parts(&then), as_cons_parts(&els)) {
        let car = merge_ite(test, a1, b1, eng);
        let cdr = merge_ite(test, a2, b2, eng);
        return SymObj::cons(car, cdr);
    }
    SymObj::ite(SymObj::Boolean(test), then, els)
}
