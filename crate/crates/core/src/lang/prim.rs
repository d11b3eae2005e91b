// SPDX-License-Identifier: Apache-2.0

//! Concrete semantics of the primitive functions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::value::Value;
use super::LangError;

/// Primitive names with their arities.
pub const PRIMITIVES: &[(&str, usize)] = &[
    ("binary-+", 2),
    ("unary--", 1),
    ("binary-*", 2),
    ("unary-/", 1),
    ("<", 2),
    ("equal", 2),
    ("always-equal", 2),
    ("not", 1),
    ("consp", 1),
    ("integerp", 1),
    ("rationalp", 1),
    ("acl2-numberp", 1),
    ("booleanp", 1),
    ("symbolp", 1),
    ("characterp", 1),
    ("stringp", 1),
    ("car", 1),
    ("cdr", 1),
    ("cons", 2),
    ("logand", 2),
    ("logior", 2),
    ("logxor", 2),
    ("lognot", 1),
    ("ash", 2),
    ("logbitp", 2),
    ("logcount", 1),
    ("evenp", 1),
    ("oddp", 1),
    ("expt", 2),
    ("floor", 2),
    ("mod", 2),
];

const SYNTAX: &[&str] = &[
    "quote", "if", "let", "let*", "cond", "and", "or", "implies", "list", "+", "*", "-", "/", "<=",
    ">", ">=", "=", "/=",
];

pub fn arity(name: &str) -> Option<usize> {
    PRIMITIVES.iter().find(|(n, _)| *n == name).map(|(_, a)| *a)
}

pub fn is_primitive(name: &str) -> bool {
    arity(name).is_some()
}

pub fn is_reserved_syntax(name: &str) -> bool {
    SYNTAX.contains(&name)
}

fn int_to_bits_index(i: &BigInt) -> Option<u64> {
    i.to_u64()
}

fn floor_div(x: &BigRational, y: &BigRational) -> BigInt {
    if y.is_zero() {
        return BigInt::zero();
    }
    (x / y).floor().to_integer()
}

/// `(ash i c)`: arithmetic shift; negative counts shift right (floor).
pub fn ash(i: &BigInt, c: &BigInt) -> BigInt {
    if c.is_negative() {
        let amount = (-c).to_u64().unwrap_or(u64::MAX);
        if amount > i.bits() {
            if i.is_negative() {
                -BigInt::one()
            } else {
                BigInt::zero()
            }
        } else {
            i >> (amount as usize)
        }
    } else if i.is_zero() {
        BigInt::zero()
    } else {
        let amount = c.to_usize().expect("left shift amount out of range");
        i << amount
    }
}

/// Number of ones in a non-negative integer, zeros in a negative one.
pub fn logcount(i: &BigInt) -> u64 {
    if i.is_negative() {
        let n: BigInt = -i - 1;
        n.magnitude().count_ones()
    } else {
        i.magnitude().count_ones()
    }
}

pub fn logbitp(idx: &BigInt, x: &BigInt) -> bool {
    match int_to_bits_index(idx) {
        Some(k) => x.bit(k),
        None => x.is_negative(),
    }
}

fn expt(base: &BigRational, exp: &BigInt) -> BigRational {
    if exp.is_zero() {
        return BigRational::one();
    }
    if base.is_zero() {
        return BigRational::zero();
    }
    let e = exp
        .magnitude()
        .to_u32()
        .expect("exponent out of supported range");
    let p = num_traits::pow(base.clone(), e as usize);
    if exp.is_negative() {
        p.recip()
    } else {
        p
    }
}

/// Applies a primitive to concrete arguments with ACL2's total semantics.
pub fn apply_primitive(name: &str, args: &[Value]) -> Result<Value, LangError> {
    let Some(n) = arity(name) else {
        return Err(LangError::UnknownFunction(name.to_string()));
    };
    if args.len() != n {
        return Err(LangError::Arity {
            name: name.to_string(),
            expected: n,
            got: args.len(),
        });
    }
    let a = &args[0];
    let b = args.get(1);
    let v = match name {
        "binary-+" => Value::number(a.fix() + b.unwrap().fix()),
        "unary--" => Value::number(-a.fix()),
        "binary-*" => Value::number(a.fix() * b.unwrap().fix()),
        "unary-/" => {
            let x = a.fix();
            if x.is_zero() {
                Value::int(0)
            } else {
                Value::number(x.recip())
            }
        }
        "<" => Value::bool(a.fix() < b.unwrap().fix()),
        "equal" | "always-equal" => Value::bool(a == b.unwrap()),
        "not" => Value::bool(a.is_nil()),
        "consp" => Value::bool(matches!(a, Value::Cons(..))),
        "integerp" => Value::bool(matches!(a, Value::Int(_))),
        "rationalp" | "acl2-numberp" => Value::bool(a.is_number()),
        "booleanp" => Value::bool(a.is_nil() || a.is_t()),
        "symbolp" => Value::bool(matches!(a, Value::Sym(_))),
        "characterp" => Value::bool(matches!(a, Value::Char(_))),
        "stringp" => Value::bool(matches!(a, Value::Str(_))),
        "car" => a.car(),
        "cdr" => a.cdr(),
        "cons" => Value::cons(a.clone(), b.unwrap().clone()),
        "logand" => Value::Int(a.ifix() & b.unwrap().ifix()),
        "logior" => Value::Int(a.ifix() | b.unwrap().ifix()),
        "logxor" => Value::Int(a.ifix() ^ b.unwrap().ifix()),
        "lognot" => Value::Int(-a.ifix() - 1),
        "ash" => Value::Int(ash(&a.ifix(), &b.unwrap().ifix())),
        "logbitp" => Value::bool(logbitp(&a.nfix(), &b.unwrap().ifix())),
        "logcount" => Value::int(logcount(&a.ifix())),
        "evenp" | "oddp" => {
            let half = a.fix() * BigRational::new(BigInt::one(), BigInt::from(2));
            Value::bool(half.is_integer() == (name == "evenp"))
        }
        "expt" => {
            // a non-integer exponent behaves as 0, like ACL2's zip test
            let e = b.unwrap().ifix();
            Value::number(expt(&a.fix(), &e))
        }
        "floor" => Value::Int(floor_div(&a.fix(), &b.unwrap().fix())),
        "mod" => {
            let x = a.fix();
            let y = b.unwrap().fix();
            let q = BigRational::from_integer(floor_div(&x, &y));
            Value::number(x - q * y)
        }
        _ => unreachable!("arity table and dispatch disagree on {name}"),
    };
    Ok(v)
}

/// Euclid-free helper used by tests and counterparts: `x mod 2^k` as a non-negative integer.
pub fn low_bits(x: &BigInt, k: u32) -> BigInt {
    x.mod_floor(&(BigInt::one() << k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::sexp::read_one;

    fn ap(name: &str, args: &[&str]) -> Value {
        let vals: Vec<Value> = args.iter().map(|s| read_one(s).unwrap()).collect();
        apply_primitive(name, &vals).unwrap()
    }

    #[test]
    fn non_numbers_are_zero_in_arithmetic() {
        assert_eq!(ap("binary-+", &["t", "3"]), Value::int(3));
        assert_eq!(ap("binary-*", &["(1 . 2)", "3"]), Value::int(0));
        assert_eq!(ap("<", &["nil", "1"]), Value::t());
    }

    #[test]
    fn shifts_and_bitwise() {
        assert_eq!(ap("ash", &["5", "-1"]), Value::int(2));
        assert_eq!(ap("ash", &["-5", "-1"]), Value::int(-3));
        assert_eq!(ap("ash", &["-1", "-100"]), Value::int(-1));
        assert_eq!(ap("ash", &["3", "4"]), Value::int(48));
        // two's-complement oracle: -1 has every bit set
        assert_eq!(ap("logand", &["-1", "#xFF"]), Value::int(255));
        assert_eq!(ap("lognot", &["5"]), Value::int(-6));
        assert_eq!(ap("logand", &["1/2", "7"]), Value::int(0));
    }

    #[test]
    fn logcount_and_logbitp() {
        assert_eq!(ap("logcount", &["#b10111"]), Value::int(4));
        assert_eq!(ap("logcount", &["-1"]), Value::int(0));
        assert_eq!(ap("logcount", &["-8"]), Value::int(3));
        assert_eq!(ap("logbitp", &["0", "5"]), Value::t());
        assert_eq!(ap("logbitp", &["100", "-2"]), Value::t());
        assert_eq!(ap("logbitp", &["100", "7"]), Value::nil());
    }

    #[test]
    fn parity_follows_the_rational_definition() {
        assert_eq!(ap("evenp", &["4"]), Value::t());
        assert_eq!(ap("evenp", &["3"]), Value::nil());
        assert_eq!(ap("evenp", &["abc"]), Value::t());
        assert_eq!(ap("oddp", &["-3"]), Value::t());
        assert_eq!(ap("evenp", &["1/2"]), Value::nil());
    }

    #[test]
    fn partial_operators_are_totalized() {
        assert_eq!(ap("floor", &["7", "0"]), Value::int(0));
        assert_eq!(ap("mod", &["7", "0"]), Value::int(7));
        assert_eq!(ap("floor", &["-7", "2"]), Value::int(-4));
        assert_eq!(ap("mod", &["-7", "2"]), Value::int(1));
        assert_eq!(ap("expt", &["2", "32"]), Value::int(4_294_967_296i64));
        assert_eq!(ap("expt", &["2", "-1"]).to_string(), "1/2");
        assert_eq!(ap("expt", &["0", "0"]), Value::int(1));
        assert_eq!(ap("unary-/", &["0"]), Value::int(0));
    }

    #[test]
    fn car_cdr_of_atoms_are_nil() {
        assert_eq!(ap("car", &["5"]), Value::nil());
        assert_eq!(ap("cdr", &["(1 2)"]).to_string(), "(2)");
    }

    #[test]
    fn arity_is_checked() {
        assert!(matches!(
            apply_primitive("cons", &[Value::nil()]),
            Err(LangError::Arity { .. })
        ));
    }
}
