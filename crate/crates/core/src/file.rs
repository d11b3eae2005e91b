// SPDX-License-Identifier: Apache-2.0

//! Theorem files: definitions, theorems, and directives, in file order.

use std::fmt;

use thiserror::Error;

use crate::engine::Mode;
use crate::lang::sexp::{read_all, Pos};
use crate::lang::{parse_defun, parse_term, DefEnv, FunDef, LangError, Sym, Term, Value};
use crate::prover::{ParamCase, ParamTheoremSpec, TheoremSpec, ThmOptions};
use crate::shape::{g_int, parse_shape, ShapeSpec};

/// An equality lemma, `(defthm name (equal lhs rhs) ...)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma {
    pub name: Sym,
    pub statement: Term,
}

impl Lemma {
    /// The function, formals, and replacement when the lemma has the form
    /// `(equal (f v1 ... vn) rhs)` with distinct variables `v1 ... vn`.
    pub fn as_rewrite(&self) -> Option<(Sym, Vec<Sym>, Term)> {
        let Term::Call(eq, sides) = &self.statement else {
            return None;
        };
        let [Term::Call(f, args), rhs] = sides.as_slice() else {
            return None;
        };
        if &**eq != "equal" {
            return None;
        }
        let mut formals: Vec<Sym> = Vec::with_capacity(args.len());
        for a in args {
            match a {
                Term::Var(v) if !formals.contains(v) => formals.push(v.clone()),
                _ => return None,
            }
        }
        Some((f.clone(), formals, rhs.clone()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Defun(FunDef),
    Theorem(TheoremSpec),
    ParamTheorem(ParamTheoremSpec),
    Lemma(Lemma),
    PreferredDef { function: Sym, lemma: Sym },
    ConcreteExec(Vec<Sym>),
    SetMode(Mode),
}

impl Event {
    pub fn kind(&self) -> &'static str {
        match self {
            Event::Defun(_) => "defun",
            Event::Theorem(_) => "def-gl-thm",
            Event::ParamTheorem(_) => "def-gl-param-thm",
            Event::Lemma(_) => "defthm",
            Event::PreferredDef { .. } => "set-preferred-def",
            Event::ConcreteExec(_) => "allow-concrete-exec",
            Event::SetMode(Mode::Bdd) => "gl-bdd-mode",
            Event::SetMode(Mode::Aig) => "gl-aig-mode",
        }
    }

    pub fn name(&self) -> String {
        match self {
            Event::Defun(d) => d.name.to_string(),
            Event::Theorem(t) => t.name.clone(),
            Event::ParamTheorem(t) => t.name.clone(),
            Event::Lemma(l) => l.name.to_string(),
            Event::PreferredDef { function, .. } => function.to_string(),
            Event::ConcreteExec(fs) => fs
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            Event::SetMode(m) => m.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Located {
    pub event: Event,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub struct FileError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

fn err_at(pos: Pos, message: impl Into<String>) -> FileError {
    FileError {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

fn strip_package(name: &str) -> &str {
    name.strip_prefix("gl::")
        .or_else(|| name.strip_prefix("GL::"))
        .or_else(|| name.strip_prefix("acl2::"))
        .unwrap_or(name)
}

/// Splits `(head name :key value ...)` into its keyword arguments.
fn keyword_args(items: &[Value]) -> Result<Vec<(String, Value)>, String> {
    if !items.len().is_multiple_of(2) {
        return Err("keyword arguments must come in pairs".into());
    }
    items
        .chunks(2)
        .map(|kv| match kv[0].as_symbol() {
            Some(k) if k.starts_with(':') => Ok((k.to_string(), kv[1].clone())),
            _ => Err(format!("expected a keyword, found {}", kv[0])),
        })
        .collect()
}

fn small_int(v: &Value, what: &str) -> Result<i64, String> {
    v.to_i64()
        .ok_or_else(|| format!("{what} must be an integer, found {v}"))
}

/// Expands the unquoted calls a binding form may use.
fn binding_call(v: &Value) -> Result<Value, String> {
    let items = v
        .list_items()
        .ok_or_else(|| format!("cannot evaluate {v} in a binding"))?;
    match items.first().and_then(|h| h.as_symbol()).map(strip_package) {
        Some("g-int") => {
            let [_, start, by, n] = items.as_slice() else {
                return Err(format!(
                    "{v}: g-int takes a start index, a step, and a bit count"
                ));
            };
            let shape = g_int(
                small_int(start, "g-int start")?,
                small_int(by, "g-int step")?,
                small_int(n, "g-int width")?,
            )
            .map_err(|e| e.to_string())?;
            let ShapeSpec::Number(idx) = shape else {
                unreachable!()
            };
            Ok(Value::list([
                Value::symbol(":g-number"),
                Value::list(idx.into_iter().map(Value::int).collect::<Vec<_>>()),
            ]))
        }
        Some("g-boolean") => {
            let [_, i] = items.as_slice() else {
                return Err(format!("{v}: g-boolean takes one index"));
            };
            Ok(Value::cons(Value::symbol(":g-boolean"), i.clone()))
        }
        Some("quote") if items.len() == 2 => Ok(items[1].clone()),
        _ => Err(format!("cannot evaluate {v} in a binding")),
    }
}

fn expand_quasi(v: &Value) -> Result<Value, String> {
    match v {
        Value::Cons(car, cdr) => {
            if car.as_symbol() == Some("unquote") {
                return binding_call(&cdr.car());
            }
            if car.car().as_symbol() == Some("unquote-splicing") {
                return Err("unquote-splicing is not supported in bindings".into());
            }
            Ok(Value::cons(expand_quasi(car)?, expand_quasi(cdr)?))
        }
        other => Ok(other.clone()),
    }
}

/// The data denoted by a quoted, quasiquoted, or bare binding form.
fn binding_data(v: &Value) -> Result<Value, String> {
    match v.car().as_symbol() {
        Some("quote") => Ok(v.cdr().car()),
        Some("quasiquote") => expand_quasi(&v.cdr().car()),
        _ => expand_quasi(v),
    }
}

fn parse_bindings(v: &Value) -> Result<Vec<(Sym, ShapeSpec)>, String> {
    let data = binding_data(v)?;
    let items = data
        .list_items()
        .ok_or_else(|| format!("bindings must be a list, found {data}"))?;
    items
        .iter()
        .map(|b| match b.list_items().as_deref() {
            Some([Value::Sym(name), shape]) => {
                let shape = parse_shape(shape).map_err(|e| format!("binding for {name}: {e}"))?;
                Ok((name.clone(), shape))
            }
            _ => Err(format!("malformed binding {b}; expected (var shape)")),
        })
        .collect()
}

fn parse_param_bindings(v: &Value) -> Result<Vec<ParamCase>, String> {
    let data = binding_data(v)?;
    let cases = data.list_items().ok_or("param-bindings must be a list")?;
    cases
        .iter()
        .map(|c| {
            let parts = c.list_items().unwrap_or_default();
            let [assign, binds] = parts.as_slice() else {
                return Err(format!(
                    "malformed case {c}; expected (assignments bindings)"
                ));
            };
            let assignment = assign
                .list_items()
                .ok_or_else(|| format!("malformed case assignment {assign}"))?
                .iter()
                .map(|a| match a.list_items().as_deref() {
                    Some([Value::Sym(n), val]) => Ok((n.clone(), val.clone())),
                    _ => Err(format!(
                        "malformed case assignment {a}; expected (var value)"
                    )),
                })
                .collect::<Result<Vec<_>, String>>()?;
            let bindings = parse_bindings(&Value::list([Value::symbol("quote"), binds.clone()]))?;
            Ok(ParamCase {
                assignment,
                bindings,
            })
        })
        .collect()
}

fn symbol_list(v: &Value) -> Result<Vec<Sym>, String> {
    let data = binding_data(v)?;
    let items = data
        .list_items()
        .ok_or_else(|| format!("expected a list of function names, found {data}"))?;
    items
        .iter()
        .map(|i| match i {
            Value::Sym(s) => Ok(s.clone()),
            other => Err(format!("expected a function name, found {other}")),
        })
        .collect()
}

fn term_of(v: &Value) -> Result<Term, String> {
    parse_term(v).map_err(|e| e.to_string())
}

struct ThmParts {
    hyp: Term,
    concl: Option<Term>,
    bindings: Option<Vec<(Sym, ShapeSpec)>>,
    param_bindings: Option<Vec<ParamCase>>,
    param_hyp: Option<Term>,
    cov_bindings: Option<Vec<(Sym, ShapeSpec)>>,
    options: ThmOptions,
}

fn parse_theorem_args(args: &[Value], param: bool) -> Result<ThmParts, String> {
    let mut p = ThmParts {
        hyp: Term::Quote(Value::t()),
        concl: None,
        bindings: None,
        param_bindings: None,
        param_hyp: None,
        cov_bindings: None,
        options: ThmOptions::default(),
    };
    let mut seen: Vec<String> = Vec::new();
    for (k, v) in keyword_args(args)? {
        if seen.contains(&k) {
            return Err(format!("{k} given twice"));
        }
        seen.push(k.clone());
        match k.as_str() {
            ":hyp" => p.hyp = term_of(&v)?,
            ":concl" => p.concl = Some(term_of(&v)?),
            ":g-bindings" if !param => p.bindings = Some(parse_bindings(&v)?),
            ":param-bindings" if param => p.param_bindings = Some(parse_param_bindings(&v)?),
            ":param-hyp" if param => p.param_hyp = Some(term_of(&v)?),
            ":cov-bindings" if param => p.cov_bindings = Some(parse_bindings(&v)?),
            ":do-not-expand" => p.options.do_not_expand = symbol_list(&v)?,
            ":mode" => {
                let name = v
                    .as_symbol()
                    .ok_or_else(|| format!(":mode expects bdd or aig, found {v}"))?;
                p.options.mode = Some(name.trim_start_matches(':').parse()?);
            }
            ":counterexamples" => {
                let n = small_int(&v, ":counterexamples")?;
                p.options.counterexamples = Some(
                    usize::try_from(n)
                        .map_err(|_| ":counterexamples must be non-negative".to_string())?,
                );
            }
            ":seed" => {
                let n = v.as_int().and_then(|i| u64::try_from(i).ok());
                p.options.seed = Some(n.ok_or(":seed must be a non-negative integer")?);
            }
            ":test-side-goals" => p.options.coverage_only = !v.is_nil(),
            ":rule-classes" | ":hints" => {}
            other => return Err(format!("unknown keyword {other}")),
        }
    }
    if p.concl.is_none() {
        return Err("missing :concl".into());
    }
    Ok(p)
}

fn parse_form(form: &Value, scratch: &mut DefEnv) -> Result<Event, String> {
    let items = form
        .list_items()
        .ok_or_else(|| format!("unknown top-level form {form}"))?;
    let head = items
        .first()
        .and_then(|h| h.as_symbol())
        .map(strip_package)
        .ok_or_else(|| format!("unknown top-level form {form}"))?;
    let name_at = |i: usize| -> Result<Sym, String> {
        match items.get(i) {
            Some(Value::Sym(s)) => Ok(s.clone()),
            _ => Err(format!("{head}: expected a name")),
        }
    };
    match head {
        "defun" => {
            let def = parse_defun(form).map_err(|e| e.to_string())?;
            scratch
                .define(def.clone())
                .map_err(|e: LangError| e.to_string())?;
            Ok(Event::Defun(def))
        }
        "def-gl-thm" => {
            let name = name_at(1)?;
            let p = parse_theorem_args(&items[2..], false)?;
            Ok(Event::Theorem(TheoremSpec {
                name: name.to_string(),
                hyp: p.hyp,
                concl: p.concl.unwrap(),
                bindings: p.bindings.ok_or("missing :g-bindings")?,
                options: p.options,
            }))
        }
        "def-gl-param-thm" => {
            let name = name_at(1)?;
            let p = parse_theorem_args(&items[2..], true)?;
            Ok(Event::ParamTheorem(ParamTheoremSpec {
                name: name.to_string(),
                hyp: p.hyp,
                concl: p.concl.unwrap(),
                cases: p.param_bindings.ok_or("missing :param-bindings")?,
                param_hyp: p.param_hyp.unwrap_or(Term::Quote(Value::t())),
                cov_bindings: p.cov_bindings.ok_or("missing :cov-bindings")?,
                options: p.options,
            }))
        }
        "defthm" => {
            let name = name_at(1)?;
            let statement = items.get(2).ok_or("defthm: missing statement")?;
            for (k, _) in keyword_args(&items[3..])? {
                if k != ":rule-classes" && k != ":hints" {
                    return Err(format!("defthm: unknown keyword {k}"));
                }
            }
            Ok(Event::Lemma(Lemma {
                name,
                statement: term_of(statement)?,
            }))
        }
        "set-preferred-def" => {
            if items.len() != 3 {
                return Err("set-preferred-def takes a function name and a lemma name".into());
            }
            Ok(Event::PreferredDef {
                function: name_at(1)?,
                lemma: name_at(2)?,
            })
        }
        "allow-concrete-exec" => {
            let mut fns = Vec::new();
            for a in &items[1..] {
                match a {
                    Value::Sym(s) => fns.push(s.clone()),
                    other => fns.extend(symbol_list(other)?),
                }
            }
            Ok(Event::ConcreteExec(fns))
        }
        "gl-bdd-mode" | "gl-aig-mode" if items.len() == 1 => {
            Ok(Event::SetMode(if head == "gl-bdd-mode" {
                Mode::Bdd
            } else {
                Mode::Aig
            }))
        }
        _ => Err(format!("unknown top-level form ({head} ...)")),
    }
}

/// Parses a whole theorem file.
pub fn parse_file(src: &str) -> Result<Vec<Located>, FileError> {
    let forms = read_all(src).map_err(|e| match e {
        LangError::Syntax { line, col, msg } => FileError {
            line,
            col,
            message: format!("syntax error: {msg}"),
        },
        other => FileError {
            line: 0,
            col: 0,
            message: other.to_string(),
        },
    })?;
    let mut scratch = DefEnv::with_prelude();
    let mut out = Vec::with_capacity(forms.len());
    for (form, pos) in forms {
        let event = parse_form(&form, &mut scratch).map_err(|m| err_at(pos, m))?;
        out.push(Located {
            event,
            line: pos.line,
            col: pos.col,
        });
    }
    Ok(out)
}
