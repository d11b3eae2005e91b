// SPDX-License-Identifier: Apache-2.0

//! Concrete ACL2-style values.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Interned-by-value symbol or variable name.
pub type Sym = Arc<str>;

pub fn sym(name: &str) -> Sym {
    Arc::from(name)
}

/// A concrete value of the term language.
///
/// `Rat` never holds an integer-valued rational; use [`Value::number`] to
/// build numbers so the normalization is preserved.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(BigInt),
    Rat(BigRational),
    Char(char),
    Sym(Sym),
    Str(Arc<str>),
    Cons(Arc<Value>, Arc<Value>),
}

impl Value {
    pub fn nil() -> Value {
        Value::Sym(sym("nil"))
    }

    pub fn t() -> Value {
        Value::Sym(sym("t"))
    }

    pub fn bool(b: bool) -> Value {
        if b {
            Value::t()
        } else {
            Value::nil()
        }
    }

    pub fn int<T: Into<BigInt>>(i: T) -> Value {
        Value::Int(i.into())
    }

    pub fn symbol(name: &str) -> Value {
        Value::Sym(sym(name))
    }

    pub fn string(s: &str) -> Value {
        Value::Str(Arc::from(s))
    }

    pub fn cons(car: Value, cdr: Value) -> Value {
        Value::Cons(Arc::new(car), Arc::new(cdr))
    }

    /// Builds a proper list.
    pub fn list<I>(items: I) -> Value
    where
        I: IntoIterator<Item = Value>,
        I::IntoIter: DoubleEndedIterator,
    {
        items
            .into_iter()
            .rev()
            .fold(Value::nil(), |acc, v| Value::cons(v, acc))
    }

    /// Normalizes a rational: integer-valued rationals become `Int`.
    pub fn number(r: BigRational) -> Value {
        if r.is_integer() {
            Value::Int(r.to_integer())
        } else {
            Value::Rat(r)
        }
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Value::Sym(s) if &**s == "nil")
    }

    pub fn is_t(&self) -> bool {
        matches!(self, Value::Sym(s) if &**s == "t")
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Value::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_number(&self) -> bool {
        matches!(self, Value::Int(_) | Value::Rat(_))
    }

    /// ACL2 `fix`: numbers as rationals, everything else 0.
    pub fn fix(&self) -> BigRational {
        match self {
            Value::Int(i) => BigRational::from_integer(i.clone()),
            Value::Rat(r) => r.clone(),
            _ => BigRational::zero(),
        }
    }

    /// ACL2 `ifix`: integers as themselves, everything else 0.
    pub fn ifix(&self) -> BigInt {
        match self {
            Value::Int(i) => i.clone(),
            _ => BigInt::zero(),
        }
    }

    /// ACL2 `nfix`: non-negative integers as themselves, everything else 0.
    pub fn nfix(&self) -> BigInt {
        match self {
            Value::Int(i) if !i.is_negative() => i.clone(),
            _ => BigInt::zero(),
        }
    }

    pub fn car(&self) -> Value {
        match self {
            Value::Cons(a, _) => (**a).clone(),
            _ => Value::nil(),
        }
    }

    pub fn cdr(&self) -> Value {
        match self {
            Value::Cons(_, d) => (**d).clone(),
            _ => Value::nil(),
        }
    }

    /// Elements of a proper list, or `None` for improper lists.
    pub fn list_items(&self) -> Option<Vec<Value>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Value::Cons(a, d) => {
                    out.push((**a).clone());
                    cur = d;
                }
                v if v.is_nil() => return Some(out),
                _ => return None,
            }
        }
    }

    /// Decimal rendering with a hex suffix for integers, as used in reports.
    /// Integers in `#x` notation.
    pub fn hex(&self) -> Option<String> {
        match self {
            Value::Int(i) if i.is_negative() => Some(format!("-#x{:X}", -i)),
            Value::Int(i) => Some(format!("#x{i:X}")),
            _ => None,
        }
    }

    pub fn display_dec_hex(&self) -> String {
        match self.hex() {
            Some(h) => format!("{self} ({h})"),
            None => self.to_string(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.as_int().and_then(|i| i.to_i64())
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::bool(b)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(BigInt::from(i))
    }
}

fn write_char_literal(f: &mut fmt::Formatter<'_>, c: char) -> fmt::Result {
    match c {
        ' ' => write!(f, "#\\Space"),
        '\n' => write!(f, "#\\Newline"),
        '\t' => write!(f, "#\\Tab"),
        c => write!(f, "#\\{c}"),
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Value::Char(c) => write_char_literal(f, *c),
            Value::Sym(s) => write!(f, "{s}"),
            Value::Str(s) => {
                write!(f, "\"")?;
                for c in s.chars() {
                    match c {
                        '"' => write!(f, "\\\"")?,
                        '\\' => write!(f, "\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                write!(f, "\"")
            }
            Value::Cons(a, d) => {
                write!(f, "({a}")?;
                let mut cur: &Value = d;
                loop {
                    match cur {
                        Value::Cons(a, d) => {
                            write!(f, " {a}")?;
                            cur = d;
                        }
                        v if v.is_nil() => break,
                        v => {
                            write!(f, " . {v}")?;
                            break;
                        }
                    }
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
