// SPDX-License-Identifier: Apache-2.0

//! Symbolic interpreter over [`SymObj`]s.
//!
//! Arguments are evaluated eagerly. A call is then run concretely (all
//! arguments concrete and the function is a primitive or whitelisted),
//! through a counterpart, through a registered preferred definition, or by
//! expanding its definition, in that order of preference.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::counterparts::{
    apply_counterpart, has_counterpart, CounterpartError, Ctx, DEFAULT_SHIFT_SPLIT_BOUND,
};
use crate::engine::{Engine, EngineError};
use crate::lang::prim::{arity, is_primitive};
use crate::lang::{
    call_concrete, eval_concrete, DefEnv, LangError, StepBudget, Sym, Term, Value,
    DEFAULT_STEP_LIMIT,
};
use crate::symobj::{merge_ite, truth, SymObj};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceMode {
    #[default]
    Off,
    /// One line per call, showing the call as written.
    Calls,
    /// One line per call, showing concrete argument values and `#` for others.
    Values,
}

/// Where trace lines go; standard error when unset.
pub type TraceSink = Arc<Mutex<dyn Write + Send>>;

/// A replacement body used instead of a function's definition.
#[derive(Clone, Debug, PartialEq)]
pub struct PreferredDef {
    pub formals: Vec<Sym>,
    pub body: Term,
}

#[derive(Clone)]
pub struct InterpConfig {
    pub preferred_defs: HashMap<Sym, PreferredDef>,
    pub concrete_exec: BTreeSet<Sym>,
    pub step_limit: u64,
    pub trace: TraceMode,
    pub trace_json: bool,
    pub trace_sink: Option<TraceSink>,
    pub break_on_apply: bool,
    pub shift_bound: u32,
}

impl Default for InterpConfig {
    fn default() -> Self {
        InterpConfig {
            preferred_defs: HashMap::new(),
            concrete_exec: BTreeSet::new(),
            step_limit: DEFAULT_STEP_LIMIT,
            trace: TraceMode::Off,
            trace_json: false,
            trace_sink: None,
            break_on_apply: false,
            shift_bound: DEFAULT_SHIFT_SPLIT_BOUND,
        }
    }
}

impl std::fmt::Debug for InterpConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InterpConfig")
            .field(
                "preferred_defs",
                &self.preferred_defs.keys().collect::<Vec<_>>(),
            )
            .field("concrete_exec", &self.concrete_exec)
            .field("step_limit", &self.step_limit)
            .field("trace", &self.trace)
            .field("break_on_apply", &self.break_on_apply)
            .field("shift_bound", &self.shift_bound)
            .finish()
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PreferredDefError {
    #[error("{0} has no definition or primitive to replace")]
    UnknownFunction(String),
    #[error("replacement for {name} mentions variable(s) {vars} that are not formals")]
    FreeVars { name: String, vars: String },
    #[error("replacement for {name} has {got} formal(s), expected {expected}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("replacement for {name} differs on {args}: original gives {original}, replacement gives {replacement}")]
    Mismatch {
        name: String,
        args: String,
        original: String,
        replacement: String,
    },
}

/// Number of random argument tuples a preferred definition is tested on.
pub const PREFERRED_DEF_SAMPLES: usize = 1000;

fn sample_value(rng: &mut ChaCha8Rng, depth: u32) -> Value {
    let int16 = |rng: &mut ChaCha8Rng| Value::int(rng.gen_range(-(1i64 << 15)..(1i64 << 15)));
    match rng.gen_range(0..10) {
        0..=3 => int16(rng),
        4 => Value::int(rng.gen_range(-4i64..=4)),
        5 => Value::bool(rng.gen()),
        6 | 7 if depth > 0 => {
            let n = rng.gen_range(0..=5);
            Value::list(
                (0..n)
                    .map(|_| sample_value(rng, depth - 1))
                    .collect::<Vec<_>>(),
            )
        }
        8 if depth > 0 => Value::cons(sample_value(rng, depth - 1), sample_value(rng, depth - 1)),
        _ => int16(rng),
    }
}

impl InterpConfig {
    /// Registers `body` as the preferred definition of `name`.
    ///
    /// `formals` defaults to the function's own formals. The replacement is
    /// checked for agreement with the original on seeded random arguments.
    pub fn register_preferred_def(
        &mut self,
        name: &str,
        formals: Option<Vec<Sym>>,
        body: Term,
        defs: &DefEnv,
        seed: u64,
    ) -> Result<(), PreferredDefError> {
        let own_arity = defs
            .get(name)
            .map(|d| d.formals.len())
            .or_else(|| arity(name))
            .ok_or_else(|| PreferredDefError::UnknownFunction(name.to_string()))?;
        let formals = match formals.or_else(|| defs.get(name).map(|d| d.formals.clone())) {
            Some(f) => f,
            None => return Err(PreferredDefError::UnknownFunction(name.to_string())),
        };
        if formals.len() != own_arity {
            return Err(PreferredDefError::Arity {
                name: name.to_string(),
                expected: own_arity,
                got: formals.len(),
            });
        }
        let stray: Vec<String> = body
            .free_vars()
            .into_iter()
            .filter(|v| !formals.contains(v))
            .map(|v| v.to_string())
            .collect();
        if !stray.is_empty() {
            return Err(PreferredDefError::FreeVars {
                name: name.to_string(),
                vars: stray.join(", "),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..PREFERRED_DEF_SAMPLES {
            let args: Vec<Value> = formals.iter().map(|_| sample_value(&mut rng, 2)).collect();
            let original = call_concrete(name, &args, defs, &mut StepBudget::new(100_000));
            let env: Vec<(Sym, Value)> =
                formals.iter().cloned().zip(args.iter().cloned()).collect();
            let replacement = eval_concrete(&body, &env, defs, &mut StepBudget::new(100_000));
            let agree = match (&original, &replacement) {
                (Ok(a), Ok(b)) => a == b,
                (Err(_), Err(_)) => true,
                _ => false,
            };
            if !agree {
                let show = |r: &Result<Value, LangError>| match r {
                    Ok(v) => v.to_string(),
                    Err(e) => format!("error ({e})"),
                };
                let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                return Err(PreferredDefError::Mismatch {
                    name: name.to_string(),
                    args: format!("({})", args.join(" ")),
                    original: show(&original),
                    replacement: show(&replacement),
                });
            }
        }
        self.preferred_defs
            .insert(crate::lang::sym(name), PreferredDef { formals, body });
        Ok(())
    }
}

/// Counters describing one interpretation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InterpStats {
    /// Function expansions plus symbolic `if` merges.
    pub steps: u64,
    pub concrete_calls: u64,
    pub counterpart_calls: u64,
    pub preferred_def_expansions: u64,
    pub definition_expansions: u64,
    pub merges: u64,
    pub escapes: u64,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum InterpError {
    #[error("step limit of {0} exhausted")]
    StepLimit(u64),
    #[error("BDD/AIG node budget exhausted")]
    NodeBudget,
    #[error("escape created: {}", .0.render())]
    Break(SymObj),
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
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Lang(#[from] LangError),
}

impl From<CounterpartError> for InterpError {
    fn from(e: CounterpartError) -> Self {
        match e {
            CounterpartError::Break(obj) => InterpError::Break(obj),
            CounterpartError::Engine(e) => InterpError::Engine(e),
            CounterpartError::Lang(e) => InterpError::Lang(e),
        }
    }
}

pub struct Interp<'a> {
    defs: &'a DefEnv,
    cfg: &'a InterpConfig,
    pub eng: &'a mut Engine,
    pub stats: InterpStats,
}

type Res = Result<SymObj, InterpError>;

impl<'a> Interp<'a> {
    pub fn new(defs: &'a DefEnv, cfg: &'a InterpConfig, eng: &'a mut Engine) -> Self {
        Interp {
            defs,
            cfg,
            eng,
            stats: InterpStats::default(),
        }
    }

    fn charge(&mut self) -> Result<(), InterpError> {
        if self.stats.steps >= self.cfg.step_limit {
            return Err(InterpError::StepLimit(self.cfg.step_limit));
        }
        self.stats.steps += 1;
        Ok(())
    }

    fn check_nodes(&self) -> Result<(), InterpError> {
        if self.eng.is_exhausted() {
            Err(InterpError::NodeBudget)
        } else {
            Ok(())
        }
    }

    pub fn interp(&mut self, term: &Term, env: &[(Sym, SymObj)]) -> Res {
        match term {
            Term::Quote(v) => Ok(SymObj::Concrete(v.clone())),
            Term::Var(name) => env
                .iter()
                .rev()
                .find(|(n, _)| n == name)
                .map(|(_, o)| o.clone())
                .ok_or_else(|| InterpError::UnboundVariable(name.to_string())),
            Term::If(test, then, els) => {
                let t = self.interp(test, env)?;
                match truth(&t, self.eng) {
                    Ok(c) => match c.as_const() {
                        Some(true) => self.interp(then, env),
                        Some(false) => self.interp(els, env),
                        None => {
                            self.charge()?;
                            self.stats.merges += 1;
                            let a = self.interp(then, env)?;
                            let b = self.interp(els, env)?;
                            let m = merge_ite(c, a, b, self.eng);
                            self.check_nodes()?;
                            Ok(m)
                        }
                    },
                    Err(_) => {
                        // the test's truth is unknown: keep both branches behind it
                        self.charge()?;
                        self.stats.merges += 1;
                        let a = self.interp(then, env)?;
                        let b = self.interp(els, env)?;
                        Ok(SymObj::ite(t, a, b))
                    }
                }
            }
            Term::Let {
                bindings,
                body,
                sequential,
            } => {
                let mut inner = env.to_vec();
                if *sequential {
                    for (n, t) in bindings {
                        let v = self.interp(t, &inner)?;
                        inner.push((n.clone(), v));
                    }
                } else {
                    let mut vals = Vec::with_capacity(bindings.len());
                    for (n, t) in bindings {
                        vals.push((n.clone(), self.interp(t, env)?));
                    }
                    inner.extend(vals);
                }
                self.interp(body, &inner)
            }
            Term::Call(f, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.interp(a, env)?);
                }
                self.trace(term, f, &vals);
                self.call(f, &vals)
            }
        }
    }

    fn trace(&self, term: &Term, f: &str, vals: &[SymObj]) {
        if self.cfg.trace == TraceMode::Off {
            return;
        }
        let shown: Vec<Option<String>> = vals
            .iter()
            .map(|v| v.as_concrete().map(|c| c.to_string()))
            .collect();
        let line = if self.cfg.trace_json {
            let args = match self.cfg.trace {
                TraceMode::Values => serde_json::json!(shown),
                _ => serde_json::Value::Null,
            };
            serde_json::json!({"fn": f, "term": term.to_string(), "args": args}).to_string()
        } else {
            match self.cfg.trace {
                TraceMode::Values => {
                    let parts: Vec<String> = shown
                        .into_iter()
                        .map(|s| s.unwrap_or_else(|| "#".to_string()))
                        .collect();
                    if parts.is_empty() {
                        format!("GL> ({f})")
                    } else {
                        format!("GL> ({f} {})", parts.join(" "))
                    }
                }
                _ => format!("GL> {term}"),
            }
        };
        match &self.cfg.trace_sink {
            Some(sink) => {
                if let Ok(mut w) = sink.lock() {
                    let _ = writeln!(w, "{line}");
                }
            }
            None => eprintln!("{line}"),
        }
    }

    /// Applies `f` to already-evaluated arguments.
    pub fn call(&mut self, f: &str, vals: &[SymObj]) -> Res {
        let expected = self
            .defs
            .get(f)
            .map(|d| d.formals.len())
            .or_else(|| arity(f));
        match expected {
            Some(n) if n != vals.len() => {
                return Err(InterpError::Arity {
                    name: f.to_string(),
                    expected: n,
                    got: vals.len(),
                })
            }
            None => return Err(InterpError::UnknownFunction(f.to_string())),
            _ => {}
        }
        if is_primitive(f) || self.cfg.concrete_exec.contains(f) {
            if let Some(concrete) = vals
                .iter()
                .map(|v| v.as_concrete().cloned())
                .collect::<Option<Vec<Value>>>()
            {
                self.stats.concrete_calls += 1;
                let mut budget = StepBudget::new(self.cfg.step_limit - self.stats.steps);
                let r = call_concrete(f, &concrete, self.defs, &mut budget);
                self.stats.steps += budget.used();
                return match r {
                    Ok(v) => Ok(SymObj::Concrete(v)),
                    Err(LangError::StepLimit(_)) => {
                        Err(InterpError::StepLimit(self.cfg.step_limit))
                    }
                    Err(e) => Err(e.into()),
                };
            }
        }
        if has_counterpart(f) {
            self.stats.counterpart_calls += 1;
            let mut ctx = Ctx::new(self.eng);
            ctx.shift_bound = self.cfg.shift_bound;
            ctx.break_on_apply = self.cfg.break_on_apply;
            let r = apply_counterpart(f, vals, &mut ctx);
            self.stats.escapes += ctx.applies;
            let r = r?;
            self.check_nodes()?;
            return Ok(r);
        }
        if let Some(pd) = self.cfg.preferred_defs.get(f) {
            self.charge()?;
            self.stats.preferred_def_expansions += 1;
            let env: Vec<(Sym, SymObj)> = pd
                .formals
                .iter()
                .cloned()
                .zip(vals.iter().cloned())
                .collect();
            return self.interp(&pd.body, &env);
        }
        if let Some(def) = self.defs.get(f) {
            let def = Arc::clone(def);
            self.charge()?;
            self.stats.definition_expansions += 1;
            let env: Vec<(Sym, SymObj)> = def
                .formals
                .iter()
                .cloned()
                .zip(vals.iter().cloned())
                .collect();
            return self.interp(&def.body, &env);
        }
        // a primitive with neither a counterpart nor a definition
        self.stats.escapes += 1;
        let obj = SymObj::Apply(crate::lang::sym(f), vals.to_vec());
        if self.cfg.break_on_apply {
            return Err(InterpError::Break(obj));
        }
        Ok(obj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolenv::BoolEnv;
    use crate::engine::Mode;
    use crate::lang::sexp::{read_all, read_one};
    use crate::lang::{parse_defun, parse_term, sym};
    use crate::symobj::sym_eval;

    const FAST_LOGCOUNT: &str = r#"
(defun 32* (x y) (logand (* x y) (1- (expt 2 32))))
(defun fast-logcount-32 (x)
  (let* ((x (- x (logand (ash x -1) #x55555555)))
         (x (+ (logand x #x33333333) (logand (ash x -2) #x33333333)))
         (x (logand (+ x (ash x -4)) #x0F0F0F0F)))
    (ash (32* x #x01010101) -24)))
"#;

    fn defs_with(src: &str) -> DefEnv {
        let mut defs = DefEnv::with_prelude();
        for (form, _) in read_all(src).unwrap() {
            defs.define(parse_defun(&form).unwrap()).unwrap();
        }
        defs
    }

    fn term(src: &str) -> Term {
        parse_term(&read_one(src).unwrap()).unwrap()
    }

    #[test]
    fn concrete_bindings_follow_the_evaluator() {
        let defs = defs_with(FAST_LOGCOUNT);
        let cfg = InterpConfig::default();
        let mut eng = Engine::bdd();
        let mut it = Interp::new(&defs, &cfg, &mut eng);
        let r = it
            .interp(
                &term("(fast-logcount-32 x)"),
                &[(sym("x"), SymObj::int(0b10111))],
            )
            .unwrap();
        assert_eq!(r, SymObj::int(4));
    }

    #[test]
    fn recognizers_on_numbers() {
        let defs = DefEnv::with_prelude();
        let cfg = InterpConfig::default();
        let mut eng = Engine::bdd();
        let x = SymObj::number((0..4).map(|i| eng.var(i)).collect());
        let mut it = Interp::new(&defs, &cfg, &mut eng);
        assert_eq!(
            it.interp(&term("(consp x)"), &[(sym("x"), x)]).unwrap(),
            SymObj::nil()
        );
    }

    /// Symbolic interpretation agrees with concrete evaluation everywhere.
    #[test]
    fn symbolic_agreement_on_small_inputs() {
        let defs = defs_with(FAST_LOGCOUNT);
        let cases = [
            "(fast-logcount-32 x)",
            "(if (< x y) (- y x) (list x y))",
            "(member x '(1 2 -3))",
            "(let ((z (+ x y))) (if (evenp z) (logcount z) (ash z -1)))",
            "(cond ((equal x 0) 'zero) ((< x 0) 'neg) (t (* x y)))",
            "(unsigned-byte-p 3 x)",
        ];
        for mode in [Mode::Bdd, Mode::Aig] {
            for src in cases {
                let mut eng = Engine::new(mode, 1_000_000);
                let x = SymObj::number((0..4).map(|i| eng.var(i)).collect());
                let y = SymObj::number((4..7).map(|i| eng.var(i)).collect());
                let cfg = InterpConfig::default();
                let bindings = vec![(sym("x"), x.clone()), (sym("y"), y.clone())];
                let mut it = Interp::new(&defs, &cfg, &mut eng);
                let r = it.interp(&term(src), &bindings).unwrap();
                for m in 0..128 {
                    let env = BoolEnv::from_mask(m, 7);
                    let xv = sym_eval(&x, &env, &[], &defs, &eng).unwrap();
                    let yv = sym_eval(&y, &env, &[], &defs, &eng).unwrap();
                    let want = eval_concrete(
                        &term(src),
                        &[(sym("x"), xv), (sym("y"), yv)],
                        &defs,
                        &mut StepBudget::default(),
                    )
                    .unwrap();
                    assert_eq!(
                        sym_eval(&r, &env, &[], &defs, &eng).unwrap(),
                        want,
                        "{src} {mode}"
                    );
                }
            }
        }
    }

    #[test]
    fn evenp_escapes_without_a_preferred_def() {
        let defs = DefEnv::with_prelude();
        let mut cfg = InterpConfig::default();
        let mut eng = Engine::bdd();
        let x = SymObj::number((0..4).map(|i| eng.var(i)).collect());
        let b = vec![(sym("x"), x)];
        let r = Interp::new(&defs, &cfg, &mut eng)
            .interp(&term("(evenp x)"), &b)
            .unwrap();
        assert!(r.find_escape().is_some());

        cfg.register_preferred_def("evenp", None, term("(not (logbitp 0 x))"), &defs, 1)
            .unwrap();
        let mut it = Interp::new(&defs, &cfg, &mut eng);
        let r = it.interp(&term("(evenp x)"), &b).unwrap();
        assert!(r.find_escape().is_none());
        assert_eq!(it.stats.preferred_def_expansions, 1);
        assert_eq!(it.stats.definition_expansions, 0);
    }

    #[test]
    fn counterparts_take_priority_over_preferred_defs() {
        let defs = DefEnv::with_prelude();
        let mut cfg = InterpConfig::default();
        cfg.register_preferred_def(
            "logcount",
            Some(vec![sym("x")]),
            term("(logcount x)"),
            &defs,
            1,
        )
        .unwrap();
        let mut eng = Engine::bdd();
        let x = SymObj::number((0..4).map(|i| eng.var(i)).collect());
        let mut it = Interp::new(&defs, &cfg, &mut eng);
        it.interp(&term("(logcount x)"), &[(sym("x"), x)]).unwrap();
        assert_eq!(it.stats.counterpart_calls, 1);
        assert_eq!(it.stats.preferred_def_expansions, 0);
    }

    #[test]
    fn preferred_def_registration_checks() {
        let defs = DefEnv::with_prelude();
        let mut cfg = InterpConfig::default();
        assert!(cfg
            .register_preferred_def("identity", None, term("x"), &defs, 3)
            .is_ok());
        let err = cfg
            .register_preferred_def("identity", None, term("(+ x 1)"), &defs, 3)
            .unwrap_err();
        assert!(matches!(err, PreferredDefError::Mismatch { .. }), "{err}");
        let err = cfg
            .register_preferred_def("identity", None, term("(+ x y)"), &defs, 3)
            .unwrap_err();
        assert!(matches!(err, PreferredDefError::FreeVars { .. }));
        assert!(matches!(
            cfg.register_preferred_def("no-such-fn", None, term("1"), &defs, 3),
            Err(PreferredDefError::UnknownFunction(_))
        ));
    }

    #[test]
    fn break_on_apply_names_the_call() {
        let defs = DefEnv::with_prelude();
        let cfg = InterpConfig {
            break_on_apply: true,
            ..InterpConfig::default()
        };
        let mut eng = Engine::bdd();
        let x = SymObj::number((0..3).map(|i| eng.var(i)).collect());
        let err = Interp::new(&defs, &cfg, &mut eng)
            .interp(&term("(* 1/2 x)"), &[(sym("x"), x)])
            .unwrap_err();
        let InterpError::Break(SymObj::Apply(f, args)) = &err else {
            panic!("{err:?}")
        };
        assert_eq!(&**f, "binary-*");
        assert_eq!(args[0].as_concrete().unwrap().to_string(), "1/2");
    }

    #[test]
    fn step_limit_is_enforced() {
        let defs = defs_with("(defun spin (x) (if (consp x) (spin x) (spin (cons x x))))");
        let cfg = InterpConfig {
            step_limit: 500,
            ..InterpConfig::default()
        };
        let mut eng = Engine::bdd();
        let b = SymObj::Boolean(eng.var(0));
        let err = Interp::new(&defs, &cfg, &mut eng)
            .interp(&term("(spin x)"), &[(sym("x"), b)])
            .unwrap_err();
        assert_eq!(err, InterpError::StepLimit(500));
    }

    #[test]
    fn tracing() {
        let defs = DefEnv::with_prelude();
        let buf: Arc<Mutex<Vec<u8>>> = Arc::new(Mutex::new(Vec::new()));
        let mut cfg = InterpConfig {
            trace: TraceMode::Calls,
            trace_sink: Some(buf.clone()),
            ..InterpConfig::default()
        };
        let mut eng = Engine::bdd();
        Interp::new(&defs, &cfg, &mut eng)
            .interp(&term("(logcount 5)"), &[])
            .unwrap();
        let out = String::from_utf8(buf.lock().unwrap().clone()).unwrap();
        assert!(
            out.lines()
                .any(|l| l.starts_with("GL> ") && l.contains("logcount")),
            "{out}"
        );

        buf.lock().unwrap().clear();
        cfg.trace = TraceMode::Values;
        let x = SymObj::Boolean(eng.var(0));
        Interp::new(&defs, &cfg, &mut eng)
            .interp(&term("(cons 7 x)"), &[(sym("x"), x)])
            .unwrap();
        let out = String::from_utf8(buf.lock().unwrap().clone()).unwrap();
        assert_eq!(out.trim(), "GL> (cons 7 #)");

        buf.lock().unwrap().clear();
        cfg.trace = TraceMode::Off;
        Interp::new(&defs, &cfg, &mut eng)
            .interp(&term("(logcount 5)"), &[])
            .unwrap();
        assert!(buf.lock().unwrap().is_empty());
    }

    #[test]
    fn indeterminate_tests_keep_both_branches() {
        let defs = DefEnv::with_prelude();
        let cfg = InterpConfig::default();
        let mut eng = Engine::bdd();
        let x = SymObj::number((0..3).map(|i| eng.var(i)).collect());
        let r = Interp::new(&defs, &cfg, &mut eng)
            .interp(&term("(if (expt 2 x) 1 2)"), &[(sym("x"), x)])
            .unwrap();
        assert!(matches!(r, SymObj::Ite(..)));
        assert!(r.find_escape().is_some());
    }
}
