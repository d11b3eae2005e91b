// SPDX-License-Identifier: Apache-2.0

//! Term syntax and the function-definition table.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use super::prim;
use super::value::{sym, Sym, Value};
use super::LangError;

#[derive(Clone, PartialEq)]
pub enum Term {
    Quote(Value),
    Var(Sym),
    If(Box<Term>, Box<Term>, Box<Term>),
    Let {
        bindings: Vec<(Sym, Term)>,
        body: Box<Term>,
        sequential: bool,
    },
    Call(Sym, Vec<Term>),
}

impl Term {
    pub fn call(f: &str, args: Vec<Term>) -> Term {
        Term::Call(sym(f), args)
    }

    pub fn var(name: &str) -> Term {
        Term::Var(sym(name))
    }

    pub fn quote(v: Value) -> Term {
        Term::Quote(v)
    }

    pub fn nil() -> Term {
        Term::Quote(Value::nil())
    }

    pub fn ite(test: Term, then: Term, els: Term) -> Term {
        Term::If(Box::new(test), Box::new(then), Box::new(els))
    }

    /// `(and a b ...)` as nested ifs.
    pub fn and(mut terms: Vec<Term>) -> Term {
        match terms.len() {
            0 => Term::Quote(Value::t()),
            1 => terms.pop().unwrap(),
            _ => {
                let first = terms.remove(0);
                Term::ite(first, Term::and(terms), Term::nil())
            }
        }
    }

    /// `(or a b ...)`; each non-final disjunct is evaluated once through a let.
    pub fn or(mut terms: Vec<Term>) -> Term {
        match terms.len() {
            0 => Term::nil(),
            1 => terms.pop().unwrap(),
            _ => {
                let first = terms.remove(0);
                let rest = Term::or(terms);
                if let Term::Quote(_) | Term::Var(_) = first {
                    return Term::ite(first.clone(), first, rest);
                }
                // parenthesized names can never come out of the reader
                let tmp = sym("(or)");
                Term::Let {
                    bindings: vec![(tmp.clone(), first)],
                    body: Box::new(Term::ite(Term::Var(tmp.clone()), Term::Var(tmp), rest)),
                    sequential: false,
                }
            }
        }
    }

    /// Free variables, in sorted order.
    pub fn free_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Sym>, out: &mut BTreeSet<Sym>) {
        match self {
            Term::Quote(_) => {}
            Term::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Term::If(a, b, c) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
                c.collect_free(bound, out);
            }
            Term::Let {
                bindings,
                body,
                sequential,
            } => {
                let mark = bound.len();
                for (name, t) in bindings {
                    t.collect_free(bound, out);
                    if *sequential {
                        bound.push(name.clone());
                    }
                }
                if !*sequential {
                    bound.extend(bindings.iter().map(|(n, _)| n.clone()));
                }
                body.collect_free(bound, out);
                bound.truncate(mark);
            }
            Term::Call(_, args) => {
                for a in args {
                    a.collect_free(bound, out);
                }
            }
        }
    }

    /// Every function name called anywhere in the term.
    pub fn called_functions(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Term::Quote(_) | Term::Var(_) => {}
            Term::If(a, b, c) => {
                a.called_functions(out);
                b.called_functions(out);
                c.called_functions(out);
            }
            Term::Let { bindings, body, .. } => {
                for (_, t) in bindings {
                    t.called_functions(out);
                }
                body.called_functions(out);
            }
            Term::Call(f, args) => {
                out.insert(f.clone());
                for a in args {
                    a.called_functions(out);
                }
            }
        }
    }

    /// Capture-avoiding substitution of terms for free variables.
    ///
    /// Substituted terms are closed or mention only names that the
    /// enclosing lets do not rebind, which is all the coverage extractor needs.
    pub fn substitute(&self, map: &[(Sym, Term)]) -> Term {
        match self {
            Term::Quote(_) => self.clone(),
            Term::Var(v) => map
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, t)| t.clone())
                .unwrap_or_else(|| self.clone()),
            Term::If(a, b, c) => Term::ite(a.substitute(map), b.substitute(map), c.substitute(map)),
            Term::Let {
                bindings,
                body,
                sequential,
            } => {
                let mut inner: Vec<(Sym, Term)> = map.to_vec();
                let mut new_bindings = Vec::with_capacity(bindings.len());
                for (name, t) in bindings {
                    let t = if *sequential {
                        t.substitute(&inner)
                    } else {
                        t.substitute(map)
                    };
                    new_bindings.push((name.clone(), t));
                    inner.retain(|(n, _)| n != name);
                }
                Term::Let {
                    bindings: new_bindings,
                    body: Box::new(body.substitute(&inner)),
                    sequential: *sequential,
                }
            }
            Term::Call(f, args) => {
                Term::Call(f.clone(), args.iter().map(|a| a.substitute(map)).collect())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Quote(v) => {
                if v.is_number()
                    || v.is_nil()
                    || v.is_t()
                    || matches!(v, Value::Char(_) | Value::Str(_))
                    || v.as_symbol().is_some_and(|s| s.starts_with(':'))
                {
                    write!(f, "{v}")
                } else {
                    write!(f, "'{v}")
                }
            }
            Term::Var(v) => write!(f, "{v}"),
            Term::If(a, b, c) => write!(f, "(if {a} {b} {c})"),
            Term::Let {
                bindings,
                body,
                sequential,
            } => {
                write!(f, "({} (", if *sequential { "let*" } else { "let" })?;
                for (i, (n, t)) in bindings.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "({n} {t})")?;
                }
                write!(f, ") {body})")
            }
            Term::Call(name, args) => {
                write!(f, "({name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn bad(form: &Value, msg: &str) -> LangError {
    LangError::Malformed(format!("{msg}: {form}"))
}

fn items(form: &Value) -> Result<Vec<Value>, LangError> {
    form.list_items()
        .ok_or_else(|| bad(form, "improper list in term"))
}

fn is_self_evaluating_symbol(s: &str) -> bool {
    s == "nil" || s == "t" || s.starts_with(':')
}

fn fold_binary(op: &str, identity: i64, args: Vec<Term>) -> Term {
    let mut args = args;
    match args.len() {
        0 => Term::Quote(Value::from(identity)),
        1 => Term::call(
            op,
            vec![Term::Quote(Value::from(identity)), args.pop().unwrap()],
        ),
        _ => {
            let last = args.pop().unwrap();
            let prev = args.pop().unwrap();
            let mut acc = Term::call(op, vec![prev, last]);
            while let Some(a) = args.pop() {
                acc = Term::call(op, vec![a, acc]);
            }
            acc
        }
    }
}

fn expect_arity(form: &Value, args: &[Term], n: usize) -> Result<(), LangError> {
    if args.len() != n {
        return Err(bad(form, &format!("expected {n} argument(s)")));
    }
    Ok(())
}

/// Converts a read s-expression into a term, expanding the built-in
/// syntactic forms (`cond`, `and`, `or`, `list`, variadic arithmetic, ...).
pub fn parse_term(form: &Value) -> Result<Term, LangError> {
    match form {
        Value::Sym(s) if is_self_evaluating_symbol(s) => Ok(Term::Quote(form.clone())),
        Value::Sym(s) => Ok(Term::Var(s.clone())),
        Value::Cons(head, _) => {
            let parts = items(form)?;
            let Value::Sym(op) = &**head else {
                return Err(bad(form, "call head must be a symbol"));
            };
            let rest = &parts[1..];
            match &**op {
                "quote" => {
                    if rest.len() != 1 {
                        return Err(bad(form, "quote takes one argument"));
                    }
                    Ok(Term::Quote(rest[0].clone()))
                }
                "if" => {
                    if rest.len() != 3 {
                        return Err(bad(form, "if takes three arguments"));
                    }
                    Ok(Term::ite(
                        parse_term(&rest[0])?,
                        parse_term(&rest[1])?,
                        parse_term(&rest[2])?,
                    ))
                }
                "let" | "let*" => parse_let(form, rest, &**op == "let*"),
                "cond" => parse_cond(form, rest),
                "and" => Ok(Term::and(parse_args(rest)?)),
                "or" => Ok(Term::or(parse_args(rest)?)),
                "implies" => {
                    let args = parse_args(rest)?;
                    expect_arity(form, &args, 2)?;
                    let mut it = args.into_iter();
                    let (a, b) = (it.next().unwrap(), it.next().unwrap());
                    Ok(Term::ite(
                        a,
                        Term::ite(b, Term::Quote(Value::t()), Term::nil()),
                        Term::Quote(Value::t()),
                    ))
                }
                "list" => Ok(parse_args(rest)?
                    .into_iter()
                    .rev()
                    .fold(Term::nil(), |acc, t| Term::call("cons", vec![t, acc]))),
                "+" => Ok(fold_binary("binary-+", 0, parse_args(rest)?)),
                "*" => Ok(fold_binary("binary-*", 1, parse_args(rest)?)),
                "-" => {
                    let mut args = parse_args(rest)?;
                    match args.len() {
                        1 => Ok(Term::call("unary--", args)),
                        2 => {
                            let b = args.pop().unwrap();
                            let a = args.pop().unwrap();
                            Ok(Term::call(
                                "binary-+",
                                vec![a, Term::call("unary--", vec![b])],
                            ))
                        }
                        _ => Err(bad(form, "- takes one or two arguments")),
                    }
                }
                "/" => {
                    let mut args = parse_args(rest)?;
                    match args.len() {
                        1 => Ok(Term::call("unary-/", args)),
                        2 => {
                            let b = args.pop().unwrap();
                            let a = args.pop().unwrap();
                            Ok(Term::call(
                                "binary-*",
                                vec![a, Term::call("unary-/", vec![b])],
                            ))
                        }
                        _ => Err(bad(form, "/ takes one or two arguments")),
                    }
                }
                "<=" | ">" | ">=" | "=" | "/=" => {
                    let args = parse_args(rest)?;
                    expect_arity(form, &args, 2)?;
                    let mut it = args.into_iter();
                    let (a, b) = (it.next().unwrap(), it.next().unwrap());
                    Ok(match &**op {
                        "<=" => Term::call("not", vec![Term::call("<", vec![b, a])]),
                        ">" => Term::call("<", vec![b, a]),
                        ">=" => Term::call("not", vec![Term::call("<", vec![a, b])]),
                        "=" => Term::call("equal", vec![a, b]),
                        _ => Term::call("not", vec![Term::call("equal", vec![a, b])]),
                    })
                }
                _ => Ok(Term::Call(op.clone(), parse_args(rest)?)),
            }
        }
        _ => Ok(Term::Quote(form.clone())),
    }
}

fn parse_args(forms: &[Value]) -> Result<Vec<Term>, LangError> {
    forms.iter().map(parse_term).collect()
}

fn parse_let(form: &Value, rest: &[Value], sequential: bool) -> Result<Term, LangError> {
    if rest.len() < 2 {
        return Err(bad(form, "let needs bindings and a body"));
    }
    let mut bindings = Vec::new();
    for b in items(&rest[0])? {
        let parts = items(&b)?;
        match parts.as_slice() {
            [Value::Sym(name), init] if !is_self_evaluating_symbol(name) => {
                bindings.push((name.clone(), parse_term(init)?));
            }
            [Value::Sym(name)] if !is_self_evaluating_symbol(name) => {
                bindings.push((name.clone(), Term::nil()));
            }
            _ => return Err(bad(&b, "malformed let binding")),
        }
    }
    if !sequential {
        let mut seen = BTreeSet::new();
        for (n, _) in &bindings {
            if !seen.insert(n.clone()) {
                return Err(bad(form, "duplicate let variable"));
            }
        }
    }
    // (declare ...) forms before the body are accepted and ignored
    let body_forms: Vec<&Value> = rest[1..]
        .iter()
        .filter(|f| f.car().as_symbol() != Some("declare"))
        .collect();
    if body_forms.len() != 1 {
        return Err(bad(form, "let takes exactly one body form"));
    }
    Ok(Term::Let {
        bindings,
        body: Box::new(parse_term(body_forms[0])?),
        sequential,
    })
}

fn parse_cond(form: &Value, clauses: &[Value]) -> Result<Term, LangError> {
    let Some((first, rest)) = clauses.split_first() else {
        return Ok(Term::nil());
    };
    let parts = items(first)?;
    match parts.as_slice() {
        [] => Err(bad(form, "empty cond clause")),
        [test] => Ok(Term::or(vec![parse_term(test)?, parse_cond(form, rest)?])),
        [test, body] => Ok(Term::ite(
            parse_term(test)?,
            parse_term(body)?,
            parse_cond(form, rest)?,
        )),
        _ => Err(bad(first, "cond clause takes one body form")),
    }
}

/// A user (or built-in) function definition.
#[derive(Clone, Debug, PartialEq)]
pub struct FunDef {
    pub name: Sym,
    pub formals: Vec<Sym>,
    pub body: Term,
}

/// Table of function definitions.
#[derive(Clone, Debug, Default)]
pub struct DefEnv {
    defs: HashMap<Sym, Arc<FunDef>>,
}

impl DefEnv {
    /// An empty table; see [`DefEnv::with_prelude`] for the usual starting point.
    pub fn empty() -> Self {
        DefEnv::default()
    }

    /// The table holding the built-in logical definitions (`natp`,
    /// `unsigned-byte-p`, `evenp`, ...).
    pub fn with_prelude() -> Self {
        super::prelude::prelude_defs().clone()
    }

    pub fn get(&self, name: &str) -> Option<&Arc<FunDef>> {
        self.defs.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.defs.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &Sym> {
        self.defs.keys()
    }

    /// Adds a definition, enforcing the table invariants.
    pub fn define(&mut self, def: FunDef) -> Result<(), LangError> {
        let name = def.name.clone();
        if self.defs.contains_key(&name) {
            return Err(LangError::DuplicateDefinition(name.to_string()));
        }
        if prim::is_primitive(&name) && !super::prelude::is_prelude_primitive(&name) {
            return Err(LangError::PrimitiveRedefinition(name.to_string()));
        }
        if prim::is_reserved_syntax(&name) {
            return Err(LangError::PrimitiveRedefinition(name.to_string()));
        }
        let mut seen = BTreeSet::new();
        for f in &def.formals {
            if !seen.insert(f.clone()) {
                return Err(LangError::Malformed(format!(
                    "duplicate formal {f} in definition of {name}"
                )));
            }
        }
        let free: Vec<String> = def
            .body
            .free_vars()
            .into_iter()
            .filter(|v| !def.formals.contains(v))
            .map(|v| v.to_string())
            .collect();
        if !free.is_empty() {
            return Err(LangError::Malformed(format!(
                "free variable(s) {} in definition of {name}",
                free.join(", ")
            )));
        }
        self.defs.insert(name, Arc::new(def));
        Ok(())
    }
}

/// Parses the `(name (formals...) body)` tail of a `defun`.
pub fn parse_defun(form: &Value) -> Result<FunDef, LangError> {
    let parts = items(form)?;
    let [_, Value::Sym(name), formals, rest @ ..] = parts.as_slice() else {
        return Err(bad(form, "malformed defun"));
    };
    let formals = items(formals)?
        .into_iter()
        .map(|f| match f {
            Value::Sym(s) if !is_self_evaluating_symbol(&s) => Ok(s),
            other => Err(bad(&other, "formal must be a variable symbol")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    // skip doc strings and declare forms
    let body_forms: Vec<&Value> = rest
        .iter()
        .filter(|f| !matches!(f, Value::Str(_)) && f.car().as_symbol() != Some("declare"))
        .collect();
    if body_forms.len() != 1 {
        return Err(bad(form, "defun takes exactly one body form"));
    }
    Ok(FunDef {
        name: name.clone(),
        formals,
        body: parse_term(body_forms[0])?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::sexp::read_one;

    fn t(src: &str) -> Term {
        parse_term(&read_one(src).unwrap()).unwrap()
    }

    #[test]
    fn arithmetic_macros_expand_to_binary_primitives() {
        assert_eq!(t("(+ a b c)").to_string(), "(binary-+ a (binary-+ b c))");
        assert_eq!(t("(- a b)").to_string(), "(binary-+ a (unary-- b))");
        assert_eq!(t("(* 1/2 x)").to_string(), "(binary-* 1/2 x)");
        assert_eq!(t("(<= a b)").to_string(), "(not (< b a))");
    }

    #[test]
    fn cond_and_or() {
        assert_eq!(
            t("(cond ((atom x) nil) (t 1))").to_string(),
            "(if (atom x) nil (if t 1 nil))"
        );
        assert_eq!(t("(and a b)").to_string(), "(if a b nil)");
        assert_eq!(t("(or a b)").to_string(), "(if a a b)");
        assert_eq!(
            t("(or (f a) b)").to_string(),
            "(let (((or) (f a))) (if (or) (or) b))"
        );
    }

    #[test]
    fn free_vars_respect_let_scoping() {
        let term = t("(let* ((v (- v 1)) (w (+ v u))) (+ w v))");
        let fv: Vec<String> = term.free_vars().iter().map(|s| s.to_string()).collect();
        assert_eq!(fv, vec!["u", "v"]);
        let par = t("(let ((a b) (b a)) (cons a b))");
        let fv: Vec<String> = par.free_vars().iter().map(|s| s.to_string()).collect();
        assert_eq!(fv, vec!["a", "b"]);
    }

    #[test]
    fn substitution_stops_at_rebinding() {
        let term = t("(let ((x (+ x 1))) (cons x y))");
        let out = term.substitute(&[
            (sym("x"), Term::quote(Value::int(5))),
            (sym("y"), Term::var("z")),
        ]);
        assert_eq!(out.to_string(), "(let ((x (binary-+ 5 1))) (cons x z))");
    }

    #[test]
    fn definitions_are_validated() {
        let mut env = DefEnv::with_prelude();
        let def = parse_defun(&read_one("(defun id (x) x)").unwrap()).unwrap();
        env.define(def.clone()).unwrap();
        assert!(matches!(
            env.define(def),
            Err(LangError::DuplicateDefinition(_))
        ));
        let prim = parse_defun(&read_one("(defun logand (x y) x)").unwrap()).unwrap();
        assert!(matches!(
            env.define(prim),
            Err(LangError::PrimitiveRedefinition(_))
        ));
        let dup = parse_defun(&read_one("(defun f (x x) x)").unwrap()).unwrap();
        assert!(env.define(dup).is_err());
        let free = parse_defun(&read_one("(defun g (x) y)").unwrap()).unwrap();
        assert!(env.define(free).is_err());
    }
}
