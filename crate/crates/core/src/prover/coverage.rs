// SPDX-License-Identifier: Apache-2.0

//! Coverage: do the bound shapes represent every input the hypothesis allows?
//!
//! Each variable is checked on its own. Constraints are read off the
//! hypothesis's top-level conjunction; conjuncts outside the recognized
//! fragment are dropped, which only enlarges the set that must be covered.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::lang::{eval_concrete, DefEnv, StepBudget, Sym, Term, Value};
use crate::shape::{CoverageDescriptor, ShapeSpec};

/// How many levels of user definitions are unfolded while looking for
/// recognizable conjuncts.
pub const EXPANSION_DEPTH: u32 = 4;

/// Integer ranges up to this size are checked member by member against
/// descriptors that are not a single signed range.
const ENUMERATION_LIMIT: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageFailure {
    pub var: Sym,
    pub witness: Value,
    /// The values the hypothesis allows for the variable.
    pub required: String,
    /// The values the binding can represent.
    pub covered: String,
}

impl fmt::Display for CoverageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "coverage check failed for {}: the hypothesis allows {}, the binding covers {}; {} = {} is not covered",
            self.var, self.required, self.covered, self.var, self.witness
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Constraint {
    /// Integers, optionally bounded (inclusive).
    Int(Option<BigInt>, Option<BigInt>),
    /// Lower/upper bound that only matters alongside an integer constraint.
    Lower(BigInt),
    Upper(BigInt),
    Bool,
    OneOf(Vec<Value>),
}

impl Constraint {
    fn admits(&self, v: &Value) -> bool {
        match self {
            Constraint::Int(lo, hi) => match v.as_int() {
                Some(i) => lo.as_ref().is_none_or(|l| i >= l) && hi.as_ref().is_none_or(|h| i <= h),
                None => false,
            },
            Constraint::Lower(l) => v.as_int().is_none_or(|i| i >= l),
            Constraint::Upper(h) => v.as_int().is_none_or(|i| i <= h),
            Constraint::Bool => v.is_t() || v.is_nil(),
            Constraint::OneOf(vs) => vs.contains(v),
        }
    }
}

fn closed_value(t: &Term, defs: &DefEnv) -> Option<Value> {
    if let Term::Quote(v) = t {
        return Some(v.clone());
    }
    if !t.free_vars().is_empty() {
        return None;
    }
    eval_concrete(t, &[], defs, &mut StepBudget::new(10_000)).ok()
}

fn const_int(t: &Term, defs: &DefEnv) -> Option<BigInt> {
    closed_value(t, defs)?.as_int().cloned()
}

/// Integer-valued floor/ceiling of a numeric constant.
fn const_bound(t: &Term, defs: &DefEnv, ceil: bool) -> Option<BigInt> {
    let v = closed_value(t, defs)?;
    if !v.is_number() {
        return None;
    }
    let r = v.fix();
    Some(if ceil {
        r.ceil().to_integer()
    } else {
        r.floor().to_integer()
    })
}

fn var_name(t: &Term) -> Option<&Sym> {
    match t {
        Term::Var(v) => Some(v),
        _ => None,
    }
}

fn pow2(k: &BigInt) -> Option<BigInt> {
    let k = k.to_u32().filter(|k| *k <= 1 << 16)?;
    Some(BigInt::one() << k)
}

/// Recognizes one conjunct, returning the variable it constrains.
fn recognize(t: &Term, defs: &DefEnv) -> Option<(Sym, Constraint)> {
    let Term::Call(f, args) = t else { return None };
    match (&**f, args.as_slice()) {
        ("unsigned-byte-p", [k, v]) => {
            let k = const_int(k, defs)?;
            let top = pow2(&k)? - 1;
            Some((
                var_name(v)?.clone(),
                Constraint::Int(Some(BigInt::zero()), Some(top)),
            ))
        }
        ("signed-byte-p", [k, v]) => {
            let k = const_int(k, defs)?;
            if !k.is_positive() {
                return None;
            }
            let half = pow2(&(k - 1))?;
            Some((
                var_name(v)?.clone(),
                Constraint::Int(Some(-&half), Some(half - 1)),
            ))
        }
        ("integerp", [v]) => Some((var_name(v)?.clone(), Constraint::Int(None, None))),
        ("natp", [v]) => Some((
            var_name(v)?.clone(),
            Constraint::Int(Some(BigInt::zero()), None),
        )),
        ("posp", [v]) => Some((
            var_name(v)?.clone(),
            Constraint::Int(Some(BigInt::one()), None),
        )),
        ("booleanp", [v]) => Some((var_name(v)?.clone(), Constraint::Bool)),
        ("equal", [a, b]) => {
            let (v, c) = match (var_name(a), var_name(b)) {
                (Some(v), None) => (v, b),
                (None, Some(v)) => (v, a),
                _ => return None,
            };
            Some((v.clone(), Constraint::OneOf(vec![closed_value(c, defs)?])))
        }
        ("member" | "member-equal", [v, l]) => {
            let items = closed_value(l, defs)?.list_items()?;
            Some((var_name(v)?.clone(), Constraint::OneOf(items)))
        }
        // v < c  and  c < v
        ("<", [a, b]) => match (var_name(a), var_name(b)) {
            (Some(v), None) => {
                let c = const_bound(b, defs, true)?;
                Some((v.clone(), Constraint::Upper(c - 1)))
            }
            (None, Some(v)) => {
                let c = const_bound(a, defs, false)?;
                Some((v.clone(), Constraint::Lower(c + 1)))
            }
            _ => None,
        },
        // not (v < c) is v >= c; not (c < v) is v <= c
        ("not", [Term::Call(lt, inner)]) if &**lt == "<" => match inner.as_slice() {
            [a, b] => match (var_name(a), var_name(b)) {
                (Some(v), None) => {
                    Some((v.clone(), Constraint::Lower(const_bound(b, defs, true)?)))
                }
                (None, Some(v)) => {
                    Some((v.clone(), Constraint::Upper(const_bound(a, defs, false)?)))
                }
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn is_nil_quote(t: &Term) -> bool {
    matches!(t, Term::Quote(v) if v.is_nil())
}

fn collect(
    t: &Term,
    defs: &DefEnv,
    do_not_expand: &[Sym],
    depth: u32,
    out: &mut Vec<(Sym, Constraint)>,
) {
    match t {
        Term::If(a, b, c) if is_nil_quote(c) => {
            collect(a, defs, do_not_expand, depth, out);
            collect(b, defs, do_not_expand, depth, out);
        }
        Term::Let {
            bindings,
            body,
            sequential: false,
        } => {
            let body = body.substitute(bindings);
            collect(&body, defs, do_not_expand, depth, out);
        }
        Term::Call(f, args) => {
            if let Some(c) = recognize(t, defs) {
                out.push(c);
                return;
            }
            if depth == 0 || do_not_expand.contains(f) {
                return;
            }
            if let Some(def) = defs.get(f) {
                if def.formals.len() != args.len() {
                    return;
                }
                let map: Vec<(Sym, Term)> = def
                    .formals
                    .iter()
                    .cloned()
                    .zip(args.iter().cloned())
                    .collect();
                collect(
                    &def.body.substitute(&map),
                    defs,
                    do_not_expand,
                    depth - 1,
                    out,
                );
            }
        }
        _ => {}
    }
}

/// The set a variable must range over, from its recognized constraints.
enum Required {
    Anything,
    Ints(Option<BigInt>, Option<BigInt>),
    Bools,
    Finite(Vec<Value>),
}

impl fmt::Display for Required {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bound =
            |b: &Option<BigInt>, inf: &str| b.as_ref().map_or(inf.to_string(), |b| b.to_string());
        match self {
            Required::Anything => write!(f, "any value"),
            Required::Ints(lo, hi) => write!(
                f,
                "integers in [{}, {}]",
                bound(lo, "-inf"),
                bound(hi, "+inf")
            ),
            Required::Bools => write!(f, "{{t, nil}}"),
            Required::Finite(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

fn required_set(cs: &[Constraint]) -> Required {
    if let Some(Constraint::OneOf(first)) = cs.iter().find(|c| matches!(c, Constraint::OneOf(_))) {
        let mut vs: Vec<Value> = Vec::new();
        for v in first {
            if cs.iter().all(|c| c.admits(v)) && !vs.contains(v) {
                vs.push(v.clone());
            }
        }
        return Required::Finite(vs);
    }
    if cs.iter().any(|c| matches!(c, Constraint::Int(..))) {
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for c in cs {
            let (l, h) = match c {
                Constraint::Int(l, h) => (l.clone(), h.clone()),
                Constraint::Lower(l) => (Some(l.clone()), None),
                Constraint::Upper(h) => (None, Some(h.clone())),
                _ => (None, None),
            };
            if let Some(l) = l {
                lo = Some(lo.map_or(l.clone(), |x| x.max(l)));
            }
            if let Some(h) = h {
                hi = Some(hi.map_or(h.clone(), |x| x.min(h)));
            }
        }
        if cs.contains(&Constraint::Bool) {
            // booleans are not integers
            return Required::Finite(Vec::new());
        }
        return Required::Ints(lo, hi);
    }
    if cs.contains(&Constraint::Bool) {
        return Required::Bools;
    }
    Required::Anything
}

/// Smallest and largest integer a descriptor can represent.
fn int_extent(d: &CoverageDescriptor) -> Option<(BigInt, BigInt)> {
    match d {
        CoverageDescriptor::SignedInt(_) => d.int_interval(),
        CoverageDescriptor::FiniteSet(vs) => {
            let ints: Vec<&BigInt> = vs.iter().filter_map(|v| v.as_int()).collect();
            Some(((*ints.iter().min()?).clone(), (*ints.iter().max()?).clone()))
        }
        CoverageDescriptor::IteUnion(ds) => ds
            .iter()
            .filter_map(int_extent)
            .reduce(|(a, b), (c, e)| (a.min(c), b.max(e))),
        _ => None,
    }
}

/// A value outside the descriptor, preferring one just past its integer range.
fn outside(d: &CoverageDescriptor) -> Value {
    let mut candidates = Vec::new();
    if let Some((_, hi)) = int_extent(d) {
        candidates.push(Value::Int(hi + 1));
    }
    candidates.extend([
        Value::int(0),
        Value::nil(),
        Value::t(),
        Value::cons(Value::int(0), Value::int(0)),
        Value::string(""),
    ]);
    candidates
        .into_iter()
        .find(|v| !d.contains(v))
        .unwrap_or_else(|| Value::symbol("uncovered"))
}

fn uncovered(req: &Required, d: &CoverageDescriptor) -> Option<Value> {
    match req {
        Required::Anything => Some(outside(d)),
        Required::Bools => [Value::nil(), Value::t()]
            .into_iter()
            .find(|v| !d.contains(v)),
        Required::Finite(vs) => vs.iter().find(|v| !d.contains(v)).cloned(),
        Required::Ints(lo, hi) => {
            if let (Some(l), Some(h)) = (lo, hi) {
                if l > h {
                    return None;
                }
            }
            let Some((dlo, dhi)) = int_extent(d) else {
                return Some(Value::Int(
                    lo.clone().or_else(|| hi.clone()).unwrap_or_default(),
                ));
            };
            if hi.as_ref().is_none_or(|h| h > &dhi) {
                let past: BigInt = &dhi + 1;
                let w = lo.clone().map_or(past.clone(), |l| l.max(past));
                return Some(Value::Int(w));
            }
            if lo.as_ref().is_none_or(|l| l < &dlo) {
                let before: BigInt = &dlo - 1;
                let w = hi.clone().map_or(before.clone(), |h| h.min(before));
                return Some(Value::Int(w));
            }
            if matches!(d, CoverageDescriptor::SignedInt(_)) {
                return None;
            }
            // inside the hull of a union: look for holes
            let (l, h) = (lo.clone().unwrap(), hi.clone().unwrap());
            let span = (&h - &l).to_u64().unwrap_or(u64::MAX);
            if span < ENUMERATION_LIMIT {
                let mut i = l;
                while i <= h {
                    let v = Value::Int(i.clone());
                    if !d.contains(&v) {
                        return Some(v);
                    }
                    i += 1;
                }
                None
            } else {
                // too large to enumerate; fail conservatively at the midpoint
                Some(Value::Int((l + h).div_floor(&BigInt::from(2))))
            }
        }
    }
}

/// Checks every variable free in `hyp` or `concl` against its binding.
pub fn check_coverage(
    hyp: &Term,
    concl: &Term,
    bindings: &[(Sym, ShapeSpec)],
    defs: &DefEnv,
    do_not_expand: &[Sym],
) -> Result<(), Box<CoverageFailure>> {
    let mut constraints = Vec::new();
    collect(hyp, defs, do_not_expand, EXPANSION_DEPTH, &mut constraints);
    let mut used = hyp.free_vars();
    used.extend(concl.free_vars());
    for (var, shape) in bindings {
        if !used.contains(var) {
            continue;
        }
        let cs: Vec<Constraint> = constraints
            .iter()
            .filter(|(v, _)| v == var)
            .map(|(_, c)| c.clone())
            .collect();
        let req = required_set(&cs);
        let desc = shape.descriptor();
        if let Some(witness) = uncovered(&req, &desc) {
            return Err(Box::new(CoverageFailure {
                var: var.clone(),
                witness,
                required: req.to_string(),
                covered: desc.to_string(),
            }));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::sexp::read_one;
    use crate::lang::{parse_defun, parse_term, sym};
    use crate::shape::g_int;

    fn term(src: &str) -> Term {
        parse_term(&read_one(src).unwrap()).unwrap()
    }

    fn check(hyp: &str, var: &str, shape: ShapeSpec) -> Result<(), Box<CoverageFailure>> {
        check_coverage(
            &term(hyp),
            &term(var),
            &[(sym(var), shape)],
            &DefEnv::with_prelude(),
            &[],
        )
    }

    #[test]
    fn unsigned_words() {
        assert!(check("(unsigned-byte-p 32 x)", "x", g_int(0, 1, 33).unwrap()).is_ok());
        let f = check("(unsigned-byte-p 32 x)", "x", g_int(0, 1, 32).unwrap()).unwrap_err();
        assert_eq!(f.witness, Value::int(2147483648u64));
        assert_eq!(f.required, "integers in [0, 4294967295]");
    }

    #[test]
    fn signed_and_bounded() {
        assert!(check("(signed-byte-p 8 x)", "x", g_int(0, 1, 8).unwrap()).is_ok());
        let f = check("(signed-byte-p 9 x)", "x", g_int(0, 1, 8).unwrap()).unwrap_err();
        assert_eq!(f.witness, Value::int(128));
        assert!(check(
            "(and (integerp x) (<= -4 x) (< x 4))",
            "x",
            g_int(0, 1, 3).unwrap()
        )
        .is_ok());
        let f = check(
            "(and (integerp x) (<= -5 x) (< x 4))",
            "x",
            g_int(0, 1, 3).unwrap(),
        )
        .unwrap_err();
        assert_eq!(f.witness, Value::int(-5));
        // bounds written with helper constants
        assert!(check(
            "(and (natp x) (< x (expt 2 7)))",
            "x",
            g_int(0, 1, 8).unwrap()
        )
        .is_ok());
    }

    #[test]
    fn finite_and_boolean() {
        assert!(check("(equal op 20)", "op", ShapeSpec::Concrete(Value::int(20))).is_ok());
        assert!(check("(booleanp b)", "b", ShapeSpec::Boolean(0)).is_ok());
        assert!(check("(member x '(1 2 3))", "x", g_int(0, 1, 3).unwrap()).is_ok());
        let f = check("(member x '(1 2 3 4))", "x", g_int(0, 1, 3).unwrap()).unwrap_err();
        assert_eq!(f.witness, Value::int(4));
    }

    #[test]
    fn unconstrained_variables_fail_just_past_the_range() {
        let f = check("t", "x", g_int(0, 1, 5).unwrap()).unwrap_err();
        assert_eq!(f.witness, Value::int(16));
        let f = check("(natp x)", "x", g_int(0, 1, 5).unwrap()).unwrap_err();
        assert_eq!(f.witness, Value::int(16));
    }

    #[test]
    fn user_definitions_are_unfolded_unless_excluded() {
        let mut defs = DefEnv::with_prelude();
        let form = read_one("(defun byte-sized (x) (and (natp x) (< x 256)))").unwrap();
        defs.define(parse_defun(&form).unwrap()).unwrap();
        let b = [(sym("x"), g_int(0, 1, 9).unwrap())];
        assert!(check_coverage(&term("(byte-sized x)"), &term("t"), &b, &defs, &[]).is_ok());
        assert!(check_coverage(
            &term("(byte-sized x)"),
            &term("t"),
            &b,
            &defs,
            &[sym("byte-sized")]
        )
        .is_err());
    }

    #[test]
    fn unused_bindings_are_ignored() {
        let b = [
            (sym("x"), g_int(0, 1, 9).unwrap()),
            (sym("unused"), ShapeSpec::Boolean(20)),
        ];
        assert!(check_coverage(
            &term("(unsigned-byte-p 8 x)"),
            &term("x"),
            &b,
            &DefEnv::with_prelude(),
            &[]
        )
        .is_ok());
    }
}
