// SPDX-License-Identifier: Apache-2.0

//! Binding shapes: symbolic-object templates whose Boolean positions are
//! variable indices, plus the value ranges they can represent.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::engine::Engine;
use crate::lang::{Sym, Value};
use crate::symobj::SymObj;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShapeSpec {
    Concrete(Value),
    Boolean(u32),
    Number(Vec<u32>),
    /// Test index, then-shape, else-shape.
    Ite(u32, Box<ShapeSpec>, Box<ShapeSpec>),
    Cons(Box<ShapeSpec>, Box<ShapeSpec>),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ShapeError {
    #[error("malformed binding shape {0}")]
    Malformed(String),
    #[error("{0} cannot appear in a binding")]
    Forbidden(String),
    #[error("Boolean variable index {0} is used more than once")]
    DuplicateIndex(u32),
}

fn bad(v: &Value, why: &str) -> ShapeError {
    ShapeError::Malformed(format!("{v}: {why}"))
}

fn index_of(v: &Value) -> Result<u32, ShapeError> {
    v.as_int()
        .and_then(|i| u32::try_from(i).ok())
        .ok_or_else(|| bad(v, "expected a natural-number index"))
}

/// Parses a shape written in the keyword syntax (`(:g-number (0 1 2))`, ...).
pub fn parse_shape(v: &Value) -> Result<ShapeSpec, ShapeError> {
    let Value::Cons(car, cdr) = v else {
        return Ok(ShapeSpec::Concrete(v.clone()));
    };
    match car.as_symbol() {
        Some(":g-boolean") => Ok(ShapeSpec::Boolean(index_of(cdr)?)),
        Some(":g-number") => {
            let items = cdr.list_items().ok_or_else(|| bad(v, "improper list"))?;
            let [bits] = items.as_slice() else {
                return Err(bad(v, "expected one list of bit indices"));
            };
            let idx = bits
                .list_items()
                .ok_or_else(|| bad(v, "bit indices must be a list"))?
                .iter()
                .map(index_of)
                .collect::<Result<Vec<_>, _>>()?;
            if idx.is_empty() {
                return Err(bad(v, "a number needs at least one bit"));
            }
            Ok(ShapeSpec::Number(idx))
        }
        Some(":g-ite") => {
            let Value::Cons(test, rest) = &**cdr else {
                return Err(bad(v, "expected (:g-ite test then . else)"));
            };
            let Value::Cons(then, els) = &**rest else {
                return Err(bad(v, "expected (:g-ite test then . else)"));
            };
            let test = match parse_shape(test)? {
                ShapeSpec::Boolean(i) => i,
                _ => return Err(bad(v, "the test of a :g-ite binding must be a :g-boolean")),
            };
            Ok(ShapeSpec::Ite(
                test,
                Box::new(parse_shape(then)?),
                Box::new(parse_shape(els)?),
            ))
        }
        Some(k @ (":g-apply" | ":g-var")) => Err(ShapeError::Forbidden(k.to_string())),
        _ => Ok(ShapeSpec::Cons(
            Box::new(parse_shape(car)?),
            Box::new(parse_shape(cdr)?),
        )),
    }
}

/// `(:g-number (start start+by ... start+(n-1)*by))`.
pub fn g_int(start: i64, by: i64, n: i64) -> Result<ShapeSpec, ShapeError> {
    if n <= 0 {
        return Err(ShapeError::Malformed(format!(
            "(g-int {start} {by} {n}): bit count must be positive"
        )));
    }
    let idx = (0..n)
        .map(|k| {
            let i = start + k * by;
            u32::try_from(i).map_err(|_| {
                ShapeError::Malformed(format!(
                    "(g-int {start} {by} {n}) yields negative index {i}"
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ShapeSpec::Number(idx))
}

impl ShapeSpec {
    pub fn indices(&self, out: &mut Vec<u32>) {
        match self {
            ShapeSpec::Concrete(_) => {}
            ShapeSpec::Boolean(i) => out.push(*i),
            ShapeSpec::Number(is) => out.extend(is),
            ShapeSpec::Ite(i, a, b) => {
                out.push(*i);
                a.indices(out);
                b.indices(out);
            }
            ShapeSpec::Cons(a, b) => {
                a.indices(out);
                b.indices(out);
            }
        }
    }

    pub fn to_symobj(&self, eng: &mut Engine) -> SymObj {
        match self {
            ShapeSpec::Concrete(v) => SymObj::Concrete(v.clone()),
            ShapeSpec::Boolean(i) => SymObj::boolean(eng.var(*i)),
            ShapeSpec::Number(is) => SymObj::number(is.iter().map(|i| eng.var(*i)).collect()),
            ShapeSpec::Ite(i, a, b) => {
                let test = SymObj::boolean(eng.var(*i));
                SymObj::ite(test, a.to_symobj(eng), b.to_symobj(eng))
            }
            ShapeSpec::Cons(a, b) => SymObj::cons(a.to_symobj(eng), b.to_symobj(eng)),
        }
    }

    /// The set of values this shape can take.
    pub fn descriptor(&self) -> CoverageDescriptor {
        match self {
            ShapeSpec::Concrete(v) => CoverageDescriptor::FiniteSet(vec![v.clone()]),
            ShapeSpec::Boolean(_) => CoverageDescriptor::BoolRange,
            ShapeSpec::Number(is) => CoverageDescriptor::SignedInt(is.len() as u32),
            ShapeSpec::Ite(_, a, b) => CoverageDescriptor::union(a.descriptor(), b.descriptor()),
            ShapeSpec::Cons(a, b) => {
                CoverageDescriptor::ProductCons(Box::new(a.descriptor()), Box::new(b.descriptor()))
            }
        }
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeSpec::Concrete(v) => write!(f, "{v}"),
            ShapeSpec::Boolean(i) => write!(f, "(:g-boolean . {i})"),
            ShapeSpec::Number(is) => {
                let parts: Vec<String> = is.iter().map(|i| i.to_string()).collect();
                write!(f, "(:g-number ({}))", parts.join(" "))
            }
            ShapeSpec::Ite(i, a, b) => write!(f, "(:g-ite (:g-boolean . {i}) {a} . {b})"),
            ShapeSpec::Cons(a, b) => write!(f, "({a} . {b})"),
        }
    }
}

/// Rejects bindings that reuse a Boolean variable index.
pub fn check_distinct<'a>(
    shapes: impl IntoIterator<Item = &'a ShapeSpec>,
) -> Result<(), ShapeError> {
    let mut seen = BTreeSet::new();
    for s in shapes {
        let mut idx = Vec::new();
        s.indices(&mut idx);
        for i in idx {
            if !seen.insert(i) {
                return Err(ShapeError::DuplicateIndex(i));
            }
        }
    }
    Ok(())
}

/// Builds the symbolic objects for a binding list.
pub fn bind_all(bindings: &[(Sym, ShapeSpec)], eng: &mut Engine) -> Vec<(Sym, SymObj)> {
    bindings
        .iter()
        .map(|(n, s)| (n.clone(), s.to_symobj(eng)))
        .collect()
}

/// A computable description of the values a shape can represent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverageDescriptor {
    /// Integers in `[-2^(w-1), 2^(w-1) - 1]`.
    SignedInt(u32),
    /// `t` and `nil`.
    BoolRange,
    FiniteSet(Vec<Value>),
    ProductCons(Box<CoverageDescriptor>, Box<CoverageDescriptor>),
    IteUnion(Vec<CoverageDescriptor>),
}

impl CoverageDescriptor {
    fn union(a: CoverageDescriptor, b: CoverageDescriptor) -> CoverageDescriptor {
        use CoverageDescriptor::*;
        match (a, b) {
            (FiniteSet(mut x), FiniteSet(y)) => {
                for v in y {
                    if !x.contains(&v) {
                        x.push(v);
                    }
                }
                FiniteSet(x)
            }
            (IteUnion(mut x), IteUnion(y)) => {
                x.extend(y);
                IteUnion(x)
            }
            (IteUnion(mut x), d) | (d, IteUnion(mut x)) => {
                x.push(d);
                IteUnion(x)
            }
            (a, b) => IteUnion(vec![a, b]),
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match self {
            CoverageDescriptor::SignedInt(w) => match v.as_int() {
                Some(i) => {
                    let (lo, hi) = signed_range(*w);
                    &lo <= i && i <= &hi
                }
                None => false,
            },
            CoverageDescriptor::BoolRange => v.is_nil() || v.is_t(),
            CoverageDescriptor::FiniteSet(vs) => vs.contains(v),
            CoverageDescriptor::ProductCons(a, b) => match v {
                Value::Cons(x, y) => a.contains(x) && b.contains(y),
                _ => false,
            },
            CoverageDescriptor::IteUnion(ds) => ds.iter().any(|d| d.contains(v)),
        }
    }

    /// Inclusive integer interval covered, when the descriptor is integer-only.
    pub fn int_interval(&self) -> Option<(BigInt, BigInt)> {
        match self {
            CoverageDescriptor::SignedInt(w) => Some(signed_range(*w)),
            _ => None,
        }
    }
}

impl fmt::Display for CoverageDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverageDescriptor::SignedInt(w) => {
                let (lo, hi) = signed_range(*w);
                write!(f, "{w}-bit signed integers [{lo}, {hi}]")
            }
            CoverageDescriptor::BoolRange => write!(f, "{{t, nil}}"),
            CoverageDescriptor::FiniteSet(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
            CoverageDescriptor::ProductCons(a, b) => write!(f, "cons of {a} and {b}"),
            CoverageDescriptor::IteUnion(ds) => {
                let parts: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
                write!(f, "union of {}", parts.join(" | "))
            }
        }
    }
}

pub fn signed_range(w: u32) -> (BigInt, BigInt) {
    let half = BigInt::one() << (w - 1);
    (-&half, half - 1)
}

/// Whether `i` fits in `w` signed bits.
pub fn fits_signed(i: &BigInt, w: u32) -> bool {
    let (lo, hi) = signed_range(w);
    &lo <= i && i <= &hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolenv::BoolEnv;
    use crate::lang::sexp::read_one;
    use crate::lang::DefEnv;
    use crate::symobj::sym_eval;

    fn shape(src: &str) -> Result<ShapeSpec, ShapeError> {
        parse_shape(&read_one(src).unwrap())
    }

    #[test]
    fn parse_examples() {
        assert_eq!(shape("(:g-boolean . 0)").unwrap(), ShapeSpec::Boolean(0));
        assert_eq!(
            shape("#b0010100").unwrap(),
            ShapeSpec::Concrete(Value::int(20))
        );
        assert_eq!(
            shape("(:g-number (0 1 2))").unwrap(),
            ShapeSpec::Number(vec![0, 1, 2])
        );
        let ite = shape("(:g-ite (:g-boolean . 11) exact . fast)").unwrap();
        assert_eq!(
            ite.descriptor(),
            CoverageDescriptor::FiniteSet(vec![Value::symbol("exact"), Value::symbol("fast")])
        );
        assert!(matches!(
            shape("(:g-number ())"),
            Err(ShapeError::Malformed(_))
        ));
        assert!(matches!(
            shape("(:g-apply foo 1)"),
            Err(ShapeError::Forbidden(_))
        ));
        assert!(matches!(
            shape("(:g-var . x)"),
            Err(ShapeError::Forbidden(_))
        ));
        assert!(matches!(
            shape("(:g-ite (:g-number (1)) a . b)"),
            Err(ShapeError::Malformed(_))
        ));
        let pair = shape("((:g-boolean . 1) . 5)").unwrap();
        assert_eq!(pair.to_string(), "((:g-boolean . 1) . 5)");
    }

    #[test]
    fn g_int_examples() {
        assert_eq!(
            g_int(1, 2, 5).unwrap(),
            ShapeSpec::Number(vec![1, 3, 5, 7, 9])
        );
        assert_eq!(
            g_int(2, 2, 5).unwrap(),
            ShapeSpec::Number(vec![2, 4, 6, 8, 10])
        );
        assert_eq!(g_int(0, 1, 1).unwrap(), ShapeSpec::Number(vec![0]));
        assert_eq!(
            g_int(32, -1, 33).unwrap(),
            ShapeSpec::Number((0..=32).rev().collect())
        );
        assert!(g_int(0, -1, 2).is_err());
        assert!(g_int(0, 1, 0).is_err());
    }

    #[test]
    fn descriptors() {
        let d = g_int(0, 1, 33).unwrap().descriptor();
        assert!(d.contains(&Value::int((1i64 << 32) - 1)));
        assert!(d.contains(&Value::int(-(1i64 << 32))));
        let d = g_int(0, 1, 32).unwrap().descriptor();
        assert!(!d.contains(&Value::int(1i64 << 31)));
        assert!(ShapeSpec::Boolean(0).descriptor().contains(&Value::t()));
        assert!(!ShapeSpec::Boolean(0).descriptor().contains(&Value::int(0)));
    }

    #[test]
    fn duplicate_indices_are_rejected() {
        let a = g_int(0, 1, 4).unwrap();
        let b = g_int(3, 1, 2).unwrap();
        assert_eq!(check_distinct([&a, &b]), Err(ShapeError::DuplicateIndex(3)));
        assert!(check_distinct([&a, &g_int(4, 1, 2).unwrap()]).is_ok());
    }

    /// Every evaluation lands inside the descriptor, and small descriptors
    /// are fully attained.
    #[test]
    fn evaluation_homomorphism() {
        let shapes = [
            "(:g-number (0 1 2 3 4))",
            "(:g-boolean . 0)",
            "(:g-ite (:g-boolean . 0) exact . fast)",
            "((:g-number (0 1)) . (:g-boolean . 2))",
            "(:g-ite (:g-boolean . 3) (:g-number (0 1)) . 7)",
        ];
        let defs = DefEnv::with_prelude();
        for src in shapes {
            let s = shape(src).unwrap();
            let mut eng = Engine::bdd();
            let obj = s.to_symobj(&mut eng);
            let d = s.descriptor();
            let mut seen = BTreeSet::new();
            for m in 0..32 {
                let v = sym_eval(&obj, &BoolEnv::from_mask(m, 5), &[], &defs, &eng).unwrap();
                assert!(d.contains(&v), "{src}: {v}");
                seen.insert(v.to_string());
            }
            if let CoverageDescriptor::SignedInt(w) = d {
                assert_eq!(seen.len(), 1 << w);
            }
        }
    }
}
