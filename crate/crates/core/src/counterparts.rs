// SPDX-License-Identifier: Apache-2.0

//! Bit-level symbolic versions of the primitives.
//!
//! Each counterpart agrees with the concrete primitive under every Boolean
//! assignment, unless its result contains an escape (`SymObj::Apply`), in
//! which case the escape records the call left unexecuted.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::boolenv::Policy;
use crate::engine::{Bit, Engine, EngineError};
use crate::lang::{apply_primitive, sym, LangError, Value};
use crate::symobj::{merge_ite, nil_possibility, sign_extend, truth, Indeterminate, SymObj};

/// Default bound on the width of a symbolic shift amount or bit index.
pub const DEFAULT_SHIFT_SPLIT_BOUND: u32 = 8;

/// Left shifts of symbolic numbers beyond this many bits escape instead.
const MAX_LEFT_SHIFT: i64 = 1 << 16;

const COUNTERPARTS: &[&str] = &[
    "binary-+",
    "unary--",
    "binary-*",
    "<",
    "equal",
    "always-equal",
    "not",
    "consp",
    "integerp",
    "rationalp",
    "acl2-numberp",
    "booleanp",
    "symbolp",
    "characterp",
    "stringp",
    "car",
    "cdr",
    "cons",
    "logand",
    "logior",
    "logxor",
    "lognot",
    "ash",
    "logbitp",
    "logcount",
];

pub fn has_counterpart(name: &str) -> bool {
    COUNTERPARTS.contains(&name)
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CounterpartError {
    /// An escape was about to be built while breaking on escapes was requested.
    #[error("escape created: {}", .0.render())]
    Break(SymObj),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Lang(#[from] LangError),
}

type Res = Result<SymObj, CounterpartError>;

/// What a counterpart needs from its caller.
pub struct Ctx<'e> {
    pub eng: &'e mut Engine,
    pub shift_bound: u32,
    pub break_on_apply: bool,
    /// Escapes built so far.
    pub applies: u64,
}

impl<'e> Ctx<'e> {
    pub fn new(eng: &'e mut Engine) -> Self {
        Ctx {
            eng,
            shift_bound: DEFAULT_SHIFT_SPLIT_BOUND,
            break_on_apply: false,
            applies: 0,
        }
    }

    /// The single place escapes are built.
    pub fn make_apply(&mut self, f: &str, args: &[SymObj]) -> Res {
        let obj = SymObj::Apply(sym(f), args.to_vec());
        self.applies += 1;
        if self.break_on_apply {
            return Err(CounterpartError::Break(obj));
        }
        Ok(obj)
    }
}

/// Runs the counterpart of `f`, which must satisfy [`has_counterpart`].
pub fn apply_counterpart(f: &str, args: &[SymObj], ctx: &mut Ctx) -> Res {
    if let Some(vals) = args
        .iter()
        .map(|a| a.as_concrete().cloned())
        .collect::<Option<Vec<_>>>()
    {
        return Ok(SymObj::Concrete(apply_primitive(f, &vals)?));
    }
    match f {
        "cons" => return Ok(SymObj::cons(args[0].clone(), args[1].clone())),
        "equal" => return sym_equal(&args[0], &args[1], ctx),
        "always-equal" => return always_equal(&args[0], &args[1], ctx),
        _ => {}
    }
    // split on the first if-then-else argument
    if let Some(k) = args.iter().position(|a| matches!(a, SymObj::Ite(..))) {
        let SymObj::Ite(test, then, els) = &args[k] else {
            unreachable!()
        };
        let c = match truth(test, ctx.eng) {
            Ok(c) => c,
            Err(_) => return ctx.make_apply(f, args),
        };
        let with = |branch: &SymObj, ctx: &mut Ctx| {
            let mut a = args.to_vec();
            a[k] = branch.clone();
            apply_counterpart(f, &a, ctx)
        };
        return match c.as_const() {
            Some(true) => with(then, ctx),
            Some(false) => with(els, ctx),
            None => {
                let x = with(then, ctx)?;
                let y = with(els, ctx)?;
                Ok(merge_ite(c, x, y, ctx.eng))
            }
        };
    }
    if args
        .iter()
        .any(|a| matches!(a, SymObj::Apply(..) | SymObj::Var(_)))
    {
        return ctx.make_apply(f, args);
    }
    let a = &args[0];
    match f {
        "binary-+" | "binary-*" | "<" => {
            let (Some(x), Some(y)) = (numeric(a), numeric(&args[1])) else {
                return ctx.make_apply(f, args);
            };
            Ok(match f {
                "binary-+" => SymObj::number(add(ctx.eng, &x, &y)),
                "binary-*" => SymObj::number(mul(ctx.eng, &x, &y)),
                _ => SymObj::boolean(less(ctx.eng, &x, &y)),
            })
        }
        "unary--" => match numeric(a) {
            Some(x) => Ok(SymObj::number(neg(ctx.eng, &x))),
            None => ctx.make_apply(f, args),
        },
        "logand" | "logior" | "logxor" => {
            let (x, y) = (integer(a), integer(&args[1]));
            let w = x.len().max(y.len());
            let (x, y) = (sign_extend(&x, w), sign_extend(&y, w));
            let eng = &mut *ctx.eng;
            let bits = x
                .iter()
                .zip(&y)
                .map(|(&p, &q)| match f {
                    "logand" => eng.and(p, q),
                    "logior" => eng.or(p, q),
                    _ => eng.xor(p, q),
                })
                .collect();
            Ok(SymObj::number(bits))
        }
        "lognot" => {
            let x = integer(a);
            let bits = x.iter().map(|&b| ctx.eng.not(b)).collect();
            Ok(SymObj::number(bits))
        }
        "ash" => {
            let x = integer(a);
            split_on_amount(f, args, &args[1], false, ctx, &mut |ctx, k| {
                if k > MAX_LEFT_SHIFT {
                    return ctx.make_apply(f, args);
                }
                Ok(SymObj::number(shift(&x, k)))
            })
        }
        "logbitp" => {
            let x = integer(&args[1]);
            split_on_amount(f, args, a, true, ctx, &mut |_, k| {
                let i = (k.max(0) as usize).min(x.len() - 1);
                Ok(SymObj::boolean(x[i]))
            })
        }
        "logcount" => Ok(SymObj::number(logcount(ctx.eng, &integer(a)))),
        "not" => match nil_possibility(a, ctx.eng) {
            Ok(n) => Ok(SymObj::boolean(n)),
            Err(_) => ctx.make_apply(f, args),
        },
        "car" | "cdr" => Ok(match a {
            SymObj::Cons(x, y) => {
                if f == "car" {
                    (**x).clone()
                } else {
                    (**y).clone()
                }
            }
            _ => SymObj::nil(),
        }),
        _ => Ok(recognize(f, a)),
    }
}

/// Recognizers on a non-concrete, escape-free, non-`Ite` object.
fn recognize(f: &str, a: &SymObj) -> SymObj {
    let is_cons = matches!(a, SymObj::Cons(..));
    let is_number = matches!(a, SymObj::Number(_));
    let is_boolean = matches!(a, SymObj::Boolean(_));
    let answer = match f {
        "consp" => is_cons,
        "integerp" | "rationalp" | "acl2-numberp" => is_number,
        "booleanp" | "symbolp" => is_boolean,
        "characterp" | "stringp" => false,
        other => unreachable!("{other} is not a recognizer"),
    };
    SymObj::Concrete(Value::bool(answer))
}

/// Bits of an operand under `fix` coercion; `None` when the operand is a
/// non-integer number, which has no bit representation.
fn numeric(o: &SymObj) -> Option<Vec<Bit>> {
    match o {
        SymObj::Number(b) => Some(b.clone()),
        SymObj::Concrete(Value::Int(i)) => Some(crate::symobj::int_bits(i)),
        SymObj::Concrete(Value::Rat(_)) => None,
        SymObj::Concrete(_) | SymObj::Boolean(_) | SymObj::Cons(..) => Some(vec![Bit::FALSE]),
        SymObj::Ite(..) | SymObj::Apply(..) | SymObj::Var(_) => None,
    }
}

/// Bits of an operand under `ifix` coercion.
fn integer(o: &SymObj) -> Vec<Bit> {
    match o {
        SymObj::Number(b) => b.clone(),
        SymObj::Concrete(Value::Int(i)) => crate::symobj::int_bits(i),
        _ => vec![Bit::FALSE],
    }
}

fn full_add(eng: &mut Engine, a: Bit, b: Bit, c: Bit) -> (Bit, Bit) {
    let ab = eng.xor(a, b);
    let s = eng.xor(ab, c);
    let g = eng.and(a, b);
    let p = eng.and(ab, c);
    (s, eng.or(g, p))
}

/// `x + y + carry` over exactly `width` bits of the sign-extended operands.
fn add_width(eng: &mut Engine, x: &[Bit], y: &[Bit], mut carry: Bit, width: usize) -> Vec<Bit> {
    let (x, y) = (sign_extend(x, width), sign_extend(y, width));
    let mut out = Vec::with_capacity(width);
    for i in 0..width {
        let (s, c) = full_add(eng, x[i], y[i], carry);
        out.push(s);
        carry = c;
    }
    out
}

pub fn add(eng: &mut Engine, x: &[Bit], y: &[Bit]) -> Vec<Bit> {
    let w = x.len().max(y.len()) + 1;
    add_width(eng, x, y, Bit::FALSE, w)
}

pub fn neg(eng: &mut Engine, x: &[Bit]) -> Vec<Bit> {
    let w = x.len() + 1;
    let inv: Vec<Bit> = sign_extend(x, w).iter().map(|&b| eng.not(b)).collect();
    add_width(eng, &inv, &[Bit::FALSE], Bit::TRUE, w)
}

pub fn less(eng: &mut Engine, x: &[Bit], y: &[Bit]) -> Bit {
    // sign of x - y, computed one bit wider than either operand
    let w = x.len().max(y.len()) + 1;
    let inv: Vec<Bit> = sign_extend(y, w).iter().map(|&b| eng.not(b)).collect();
    let diff = add_width(eng, x, &inv, Bit::TRUE, w);
    diff[w - 1]
}

fn constant_false_count(bits: &[Bit]) -> usize {
    bits.iter().filter(|b| **b == Bit::FALSE).count()
}

pub fn mul(eng: &mut Engine, x: &[Bit], y: &[Bit]) -> Vec<Bit> {
    let w = x.len() + y.len();
    // the operand with more known-zero bits drives the partial products
    let (a, b) =
        if constant_false_count(&sign_extend(x, w)) > constant_false_count(&sign_extend(y, w)) {
            (sign_extend(y, w), sign_extend(x, w))
        } else {
            (sign_extend(x, w), sign_extend(y, w))
        };
    let mut acc = vec![Bit::FALSE; w];
    for (i, &bi) in b.iter().enumerate() {
        if bi == Bit::FALSE {
            continue;
        }
        let mut partial = vec![Bit::FALSE; i];
        partial.extend(a[..w - i].iter().map(|&aj| eng.and(bi, aj)));
        acc = add_width(eng, &acc, &partial, Bit::FALSE, w);
    }
    acc
}

/// `ash` by a constant amount.
fn shift(x: &[Bit], k: i64) -> Vec<Bit> {
    if k >= 0 {
        let mut out = vec![Bit::FALSE; k as usize];
        out.extend_from_slice(x);
        out
    } else {
        let drop = (-k) as usize;
        if drop >= x.len() {
            vec![*x.last().unwrap()]
        } else {
            x[drop..].to_vec()
        }
    }
}

/// Applies `body` to every value of a shift amount or bit index. Symbolic
/// amounts are split into a balanced tree of cases when narrow enough.
fn split_on_amount(
    f: &str,
    args: &[SymObj],
    amount: &SymObj,
    natural: bool,
    ctx: &mut Ctx,
    body: &mut dyn FnMut(&mut Ctx, i64) -> Res,
) -> Res {
    let coerce = |i: &BigInt| -> i64 {
        if natural && i.is_negative() {
            return 0;
        }
        // amounts past any realistic width behave the same as a huge one
        i.to_i64()
            .unwrap_or(if i.is_negative() {
                i64::MIN / 2
            } else {
                i64::MAX / 2
            })
            .clamp(-(1 << 40), 1 << 40)
    };
    match amount {
        SymObj::Concrete(Value::Int(i)) => body(ctx, coerce(i)),
        SymObj::Number(bits) if bits.len() as u32 <= ctx.shift_bound => {
            let bits = bits.clone();
            split_bits(&bits, bits.len(), 0, ctx, &mut |ctx, v| {
                let k = if natural && v < 0 { 0 } else { v };
                body(ctx, k)
            })
        }
        SymObj::Number(_) => ctx.make_apply(f, args),
        _ => body(ctx, 0),
    }
}

/// Enumerates the values of the top `remaining` bits of a two's-complement
/// vector, merging results under each bit's expression.
fn split_bits(
    bits: &[Bit],
    remaining: usize,
    prefix: i64,
    ctx: &mut Ctx,
    body: &mut dyn FnMut(&mut Ctx, i64) -> Res,
) -> Res {
    if remaining == 0 {
        return body(ctx, prefix);
    }
    let pos = remaining - 1;
    let weight = if pos == bits.len() - 1 {
        -(1i64 << pos)
    } else {
        1i64 << pos
    };
    let b = bits[pos];
    match b.as_const() {
        Some(true) => split_bits(bits, pos, prefix + weight, ctx, body),
        Some(false) => split_bits(bits, pos, prefix, ctx, body),
        None => {
            let one = split_bits(bits, pos, prefix + weight, ctx, body)?;
            let zero = split_bits(bits, pos, prefix, ctx, body)?;
            Ok(merge_ite(b, one, zero, ctx.eng))
        }
    }
}

pub fn logcount(eng: &mut Engine, x: &[Bit]) -> Vec<Bit> {
    let sign = *x.last().unwrap();
    // count ones of non-negative numbers, zeros of negative ones
    let mut terms: Vec<Vec<Bit>> = x[..x.len() - 1]
        .iter()
        .map(|&b| vec![eng.xor(b, sign), Bit::FALSE])
        .collect();
    if terms.is_empty() {
        return vec![Bit::FALSE];
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        for pair in terms.chunks(2) {
            next.push(match pair {
                [a, b] => {
                    // sums are non-negative, so one extra bit suffices
                    let w = a.len().max(b.len()) + 1;
                    let mut s = add_width(eng, a, b, Bit::FALSE, w);
                    if s.len() > 2 && s[s.len() - 1] == Bit::FALSE && s[s.len() - 2] == Bit::FALSE {
                        s.pop();
                    }
                    s
                }
                [a] => a.clone(),
                _ => unreachable!(),
            });
        }
        terms = next;
    }
    terms.pop().unwrap()
}

fn boolean_like(o: &SymObj) -> Option<Bit> {
    match o {
        SymObj::Boolean(b) => Some(*b),
        SymObj::Concrete(v) if v.is_nil() => Some(Bit::FALSE),
        SymObj::Concrete(v) if v.is_t() => Some(Bit::TRUE),
        _ => None,
    }
}

fn cons_parts(o: &SymObj) -> Option<(SymObj, SymObj)> {
    match o {
        SymObj::Cons(a, b) => Some(((**a).clone(), (**b).clone())),
        SymObj::Concrete(Value::Cons(a, b)) => Some((
            SymObj::Concrete((**a).clone()),
            SymObj::Concrete((**b).clone()),
        )),
        _ => None,
    }
}

/// Expression that is true exactly where the two objects are `equal`.
pub fn equal_expr(a: &SymObj, b: &SymObj, eng: &mut Engine) -> Result<Bit, Indeterminate> {
    if a == b {
        return Ok(Bit::TRUE);
    }
    match (a, b) {
        (SymObj::Concrete(x), SymObj::Concrete(y)) => return Ok(Bit::constant(x == y)),
        (SymObj::Apply(..) | SymObj::Var(_), _) => return Err(Indeterminate(a.clone())),
        (_, SymObj::Apply(..) | SymObj::Var(_)) => return Err(Indeterminate(b.clone())),
        (SymObj::Ite(t, x, y), o) | (o, SymObj::Ite(t, x, y)) => {
            let c = truth(t, eng)?;
            return match c.as_const() {
                Some(true) => equal_expr(x, o, eng),
                Some(false) => equal_expr(y, o, eng),
                None => {
                    let p = equal_expr(x, o, eng)?;
                    let q = equal_expr(y, o, eng)?;
                    Ok(eng.ite(c, p, q))
                }
            };
        }
        _ => {}
    }
    if let (Some(x), Some(y)) = (integer_like(a), integer_like(b)) {
        let w = x.len().max(y.len());
        let (x, y) = (sign_extend(&x, w), sign_extend(&y, w));
        let mut acc = Bit::TRUE;
        for (p, q) in x.iter().zip(&y) {
            let e = eng.iff(*p, *q);
            acc = eng.and(acc, e);
            if acc == Bit::FALSE {
                break;
            }
        }
        return Ok(acc);
    }
    if let (Some(x), Some(y)) = (boolean_like(a), boolean_like(b)) {
        return Ok(eng.iff(x, y));
    }
    if let (Some((a1, a2)), Some((b1, b2))) = (cons_parts(a), cons_parts(b)) {
        let p = equal_expr(&a1, &b1, eng)?;
        if p == Bit::FALSE {
            return Ok(Bit::FALSE);
        }
        let q = equal_expr(&a2, &b2, eng)?;
        return Ok(eng.and(p, q));
    }
    // different kinds of object are never equal
    Ok(Bit::FALSE)
}

fn integer_like(o: &SymObj) -> Option<Vec<Bit>> {
    match o {
        SymObj::Number(_) | SymObj::Concrete(Value::Int(_)) => o.int_bits(),
        _ => None,
    }
}

fn sym_equal(a: &SymObj, b: &SymObj, ctx: &mut Ctx) -> Res {
    match equal_expr(a, b, ctx.eng) {
        Ok(e) => Ok(SymObj::boolean(e)),
        Err(_) => ctx.make_apply("equal", &[a.clone(), b.clone()]),
    }
}

fn always_equal(a: &SymObj, b: &SymObj, ctx: &mut Ctx) -> Res {
    let args = [a.clone(), b.clone()];
    let e = match equal_expr(a, b, ctx.eng) {
        Ok(e) => e,
        Err(_) => return ctx.make_apply("always-equal", &args),
    };
    if ctx.eng.is_valid(e)? {
        return Ok(SymObj::t());
    }
    let differ = ctx.eng.not(e);
    let support = ctx.eng.support(differ);
    let env = ctx
        .eng
        .witness(differ, Policy::Zeros, &support)?
        .expect("a non-valid equality has a falsifying assignment");
    let mut cube = Bit::TRUE;
    for v in support {
        let x = ctx.eng.var(v);
        let lit = if env.get(v) == Some(true) {
            x
        } else {
            ctx.eng.not(x)
        };
        cube = ctx.eng.and(cube, lit);
    }
    let rest = ctx.make_apply("always-equal", &args)?;
    Ok(SymObj::ite(SymObj::boolean(cube), SymObj::nil(), rest))
}
