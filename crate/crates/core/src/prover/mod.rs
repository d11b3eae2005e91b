// SPDX-License-Identifier: Apache-2.0

//! Proving goals by symbolic execution.
//!
//! A theorem is a hypothesis, a conclusion, and a shape for each variable.
//! The hypothesis is executed first and used to narrow the bound objects;
//! the conclusion is then executed over the narrowed objects, and the
//! theorem holds when the result can never be `nil`.

pub mod coverage;
mod param;

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::boolenv::{BoolEnv, Policy};
use crate::engine::{Bit, Engine, EngineError, Mode};
use crate::interp::{Interp, InterpConfig, InterpError, InterpStats};
use crate::lang::prim::{arity, is_primitive};
use crate::lang::{eval_concrete, DefEnv, StepBudget, Sym, Term, Value};
use crate::sat::SatError;
use crate::shape::{bind_all, check_distinct, ShapeError, ShapeSpec};
use crate::symobj::{nil_possibility, sym_eval, truth, SymObj};

pub use coverage::{check_coverage, CoverageFailure};
pub use param::prove_param_thm;

/// Stack size for threads that run proofs; concrete execution of deeply
/// recursive definitions recurses on the native stack.
pub const PROOF_STACK_SIZE: usize = 512 << 20;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ThmOptions {
    pub mode: Option<Mode>,
    pub do_not_expand: Vec<Sym>,
    pub counterexamples: Option<usize>,
    pub seed: Option<u64>,
    /// Check coverage only; never yields a proof.
    pub coverage_only: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremSpec {
    pub name: String,
    pub hyp: Term,
    pub concl: Term,
    pub bindings: Vec<(Sym, ShapeSpec)>,
    pub options: ThmOptions,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamCase {
    pub assignment: Vec<(Sym, Value)>,
    pub bindings: Vec<(Sym, ShapeSpec)>,
}

impl ParamCase {
    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .assignment
            .iter()
            .map(|(n, v)| format!("({n} {v})"))
            .collect();
        format!("({})", parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamTheoremSpec {
    pub name: String,
    pub hyp: Term,
    pub concl: Term,
    pub cases: Vec<ParamCase>,
    pub param_hyp: Term,
    pub cov_bindings: Vec<(Sym, ShapeSpec)>,
    pub options: ThmOptions,
}

#[derive(Clone, Debug)]
pub struct ProverConfig {
    pub mode: Mode,
    pub node_budget: usize,
    pub sat_conflicts: u64,
    pub counterexamples: usize,
    pub seed: u64,
    pub coverage_only: bool,
    pub interp: InterpConfig,
    /// In AIG mode, write each check's final CNF here for external solvers.
    pub dimacs_dir: Option<PathBuf>,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig {
            mode: Mode::Bdd,
            node_budget: crate::bdd::DEFAULT_NODE_BUDGET,
            sat_conflicts: crate::sat::DEFAULT_CONFLICT_BUDGET,
            counterexamples: 3,
            seed: 0,
            coverage_only: false,
            interp: InterpConfig::default(),
            dimacs_dir: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Hypothesis,
    Parametrization,
    Conclusion,
    Validity,
    Counterexamples,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Hypothesis => "hypothesis",
            Stage::Parametrization => "parametrization",
            Stage::Conclusion => "conclusion",
            Stage::Validity => "validity check",
            Stage::Counterexamples => "counterexample search",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub values: Vec<(Sym, Value)>,
    /// The bit-selection policy that produced it.
    pub policy: String,
    /// Whether concrete evaluation confirmed hyp true and concl false.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProofResult {
    Proved {
        vacuous: bool,
    },
    /// Coverage-only run that found the bindings sufficient.
    CoverageOk,
    Disproved(Vec<Counterexample>),
    Indeterminate {
        offender: String,
        example: Vec<(Sym, Value)>,
        /// Set when the run stopped at the first escape by request.
        stopped_at_escape: bool,
    },
    CoverageFailed(Box<CoverageFailure>),
    ResourceLimit {
        stage: Stage,
        detail: String,
    },
}

impl ProofResult {
    pub fn kind(&self) -> &'static str {
        match self {
            ProofResult::Proved { .. } => "proved",
            ProofResult::CoverageOk => "coverage-ok",
            ProofResult::Disproved(_) => "disproved",
            ProofResult::Indeterminate { .. } => "indeterminate",
            ProofResult::CoverageFailed(_) => "coverage-failed",
            ProofResult::ResourceLimit { .. } => "resource-limit",
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, ProofResult::Proved { .. } | ProofResult::CoverageOk)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProofStats {
    pub interp: InterpStats,
    /// Boolean-expression nodes allocated, summed over engines.
    pub nodes: usize,
}

impl ProofStats {
    fn absorb(&mut self, s: &InterpStats) {
        let t = &mut self.interp;
        t.steps += s.steps;
        t.concrete_calls += s.concrete_calls;
        t.counterpart_calls += s.counterpart_calls;
        t.preferred_def_expansions += s.preferred_def_expansions;
        t.definition_expansions += s.definition_expansions;
        t.merges += s.merges;
        t.escapes += s.escapes;
    }

    fn add(&mut self, other: &ProofStats) {
        self.absorb(&other.interp);
        self.nodes += other.nodes;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseOutcome {
    pub label: String,
    pub result: ProofResult,
    pub stats: ProofStats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofOutcome {
    pub result: ProofResult,
    /// For case-split theorems, the case whose failure decided the result.
    pub failing_case: Option<String>,
    pub warnings: Vec<String>,
    pub stats: ProofStats,
    pub cases: Vec<CaseOutcome>,
}

/// Problems with the theorem itself rather than with its truth.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProverError {
    #[error("{theorem}: variable {var} has no binding")]
    MissingBinding { theorem: String, var: String },
    #[error("{theorem}: variable {var} is bound twice")]
    DuplicateBinding { theorem: String, var: String },
    #[error("{theorem}: {source}")]
    Shape { theorem: String, source: ShapeError },
    #[error("{theorem}: unknown function {name}")]
    UnknownFunction { theorem: String, name: String },
    #[error("{theorem}: {detail}")]
    Term { theorem: String, detail: String },
    #[error("{theorem}: case assignments must all bind the same variables")]
    InconsistentCases { theorem: String },
}

fn check_functions(theorem: &str, terms: &[&Term], defs: &DefEnv) -> Result<(), ProverError> {
    let mut called = std::collections::BTreeSet::new();
    for t in terms {
        t.called_functions(&mut called);
    }
    for f in called {
        if !defs.contains(&f) && !is_primitive(&f) && arity(&f).is_none() {
            return Err(ProverError::UnknownFunction {
                theorem: theorem.to_string(),
                name: f.to_string(),
            });
        }
    }
    Ok(())
}

pub(crate) fn check_bindings(
    theorem: &str,
    terms: &[&Term],
    bindings: &[(Sym, ShapeSpec)],
    defs: &DefEnv,
) -> Result<(), ProverError> {
    for (i, (n, _)) in bindings.iter().enumerate() {
        if bindings[..i].iter().any(|(m, _)| m == n) {
            return Err(ProverError::DuplicateBinding {
                theorem: theorem.to_string(),
                var: n.to_string(),
            });
        }
    }
    for t in terms {
        if let Some(v) = t
            .free_vars()
            .into_iter()
            .find(|v| !bindings.iter().any(|(n, _)| n == v))
        {
            return Err(ProverError::MissingBinding {
                theorem: theorem.to_string(),
                var: v.to_string(),
            });
        }
    }
    check_distinct(bindings.iter().map(|(_, s)| s)).map_err(|source| ProverError::Shape {
        theorem: theorem.to_string(),
        source,
    })?;
    check_functions(theorem, terms, defs)
}

/// One symbolic check of `hyp => concl` over `bindings`.
pub(crate) struct Check<'a> {
    pub theorem: &'a str,
    pub hyp: &'a Term,
    pub concl: &'a Term,
    pub bindings: &'a [(Sym, ShapeSpec)],
    pub defs: &'a DefEnv,
    pub cfg: &'a ProverConfig,
    pub mode: Mode,
    pub counterexamples: usize,
    pub seed: u64,
}

pub(crate) struct CheckOutcome {
    pub result: ProofResult,
    pub stats: ProofStats,
    pub warnings: Vec<String>,
}

enum Fail {
    Result(Box<ProofResult>),
    Error(ProverError),
}

impl From<ProverError> for Fail {
    fn from(e: ProverError) -> Self {
        Fail::Error(e)
    }
}

fn resource(stage: Stage, detail: impl fmt::Display) -> Fail {
    Fail::Result(Box::new(ProofResult::ResourceLimit {
        stage,
        detail: detail.to_string(),
    }))
}

impl<'a> Check<'a> {
    fn engine_failure(&self, stage: Stage, e: EngineError) -> Fail {
        match e {
            EngineError::Sat(SatError::BudgetExceeded(n)) => {
                resource(stage, format!("SAT conflict budget of {n} exhausted"))
            }
            EngineError::MissingVar(v) => Fail::Error(ProverError::Term {
                theorem: self.theorem.to_string(),
                detail: format!("internal: Boolean variable {v} has no value"),
            }),
        }
    }

    fn interp_failure(&self, stage: Stage, e: InterpError, example: Vec<(Sym, Value)>) -> Fail {
        match e {
            InterpError::StepLimit(n) => resource(stage, format!("step limit of {n} exhausted")),
            InterpError::NodeBudget => resource(stage, "Boolean-expression node budget exhausted"),
            InterpError::Break(obj) => Fail::Result(Box::new(ProofResult::Indeterminate {
                offender: obj.render(),
                example,
                stopped_at_escape: true,
            })),
            InterpError::Engine(e) => self.engine_failure(stage, e),
            other => Fail::Error(ProverError::Term {
                theorem: self.theorem.to_string(),
                detail: other.to_string(),
            }),
        }
    }

    /// Concrete values of the objects under `env`.
    fn values_at(
        &self,
        objs: &[(Sym, SymObj)],
        env: &BoolEnv,
        eng: &Engine,
    ) -> Result<Vec<(Sym, Value)>, Fail> {
        objs.iter()
            .map(|(n, o)| {
                sym_eval(o, env, &[], self.defs, eng)
                    .map(|v| (n.clone(), v))
                    .map_err(|e| {
                        Fail::Error(ProverError::Term {
                            theorem: self.theorem.to_string(),
                            detail: format!("cannot evaluate binding of {n}: {e}"),
                        })
                    })
            })
            .collect()
    }

    fn example(&self, objs: &[(Sym, SymObj)], eng: &Engine) -> Vec<(Sym, Value)> {
        let mut idx = Vec::new();
        for (_, s) in self.bindings {
            s.indices(&mut idx);
        }
        let top = idx.iter().copied().max().map_or(0, |m| m + 1);
        let env = BoolEnv::from_pairs((0..top).map(|i| (i, false)));
        self.values_at(objs, &env, eng).unwrap_or_default()
    }

    fn verify(&self, values: &[(Sym, Value)]) -> bool {
        let limit = self.cfg.interp.step_limit;
        let h = eval_concrete(self.hyp, values, self.defs, &mut StepBudget::new(limit));
        let c = eval_concrete(self.concl, values, self.defs, &mut StepBudget::new(limit));
        matches!((h, c), (Ok(h), Ok(c)) if !h.is_nil() && c.is_nil())
    }

    fn dump_dimacs(
        &self,
        dir: &std::path::Path,
        eng: &mut Engine,
        bad: Bit,
        warnings: &mut Vec<String>,
    ) {
        let Some(aig) = eng.as_aig() else { return };
        let (mut cnf, out) = aig.to_cnf(crate::aig::Lit(bad.0));
        cnf.clauses.push(vec![out]);
        let file: String = self
            .theorem
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        let path = dir.join(format!("{file}.cnf"));
        if let Err(e) = std::fs::write(&path, cnf.to_dimacs()) {
            warnings.push(format!("could not write {}: {e}", path.display()));
        }
    }

    pub fn run(&self) -> Result<CheckOutcome, ProverError> {
        let mut stats = ProofStats::default();
        let mut warnings = Vec::new();
        let mut eng =
            Engine::new(self.mode, self.cfg.node_budget).with_sat_conflicts(self.cfg.sat_conflicts);
        let r = self.pipeline(&mut eng, &mut stats, &mut warnings);
        stats.nodes += eng.node_count();
        let result = match r {
            Ok(r) => r,
            Err(Fail::Result(r)) => *r,
            Err(Fail::Error(e)) => return Err(e),
        };
        Ok(CheckOutcome {
            result,
            stats,
            warnings,
        })
    }

    fn pipeline(
        &self,
        eng: &mut Engine,
        stats: &mut ProofStats,
        warnings: &mut Vec<String>,
    ) -> Result<ProofResult, Fail> {
        let objs = bind_all(self.bindings, eng);
        let mut indices = Vec::new();
        for (_, s) in self.bindings {
            s.indices(&mut indices);
        }
        indices.sort_unstable();

        // hypothesis
        let mut it = Interp::new(self.defs, &self.cfg.interp, eng);
        let h = it.interp(self.hyp, &objs);
        stats.absorb(&it.stats);
        let h = match h {
            Ok(h) => h,
            Err(e) => {
                let ex = self.example(&objs, eng);
                return Err(self.interp_failure(Stage::Hypothesis, e, ex));
            }
        };
        let hyp_bit = match truth(&h, eng) {
            Ok(b) => b,
            Err(ind) => {
                return Ok(ProofResult::Indeterminate {
                    offender: ind.0.find_escape().unwrap_or(&ind.0).render(),
                    example: self.example(&objs, eng),
                    stopped_at_escape: false,
                })
            }
        };

        // narrow the objects to the hypothesis
        let sigma = match eng.parametrize(hyp_bit, &indices) {
            Ok(Some(s)) => s,
            Ok(None) => {
                warnings.push(format!(
                    "{}: the hypothesis is unsatisfiable over the bindings, so the theorem holds vacuously",
                    self.theorem
                ));
                return Ok(ProofResult::Proved { vacuous: true });
            }
            Err(e) => return Err(self.engine_failure(Stage::Parametrization, e)),
        };
        if eng.is_exhausted() {
            return Err(resource(
                Stage::Parametrization,
                "Boolean-expression node budget exhausted",
            ));
        }
        let mut old = Vec::new();
        for (_, o) in &objs {
            o.bits(&mut old);
        }
        old.push(hyp_bit);
        let new = eng.substitute(&old, &sigma);
        let hyp_param = *new.last().unwrap();
        let map: std::collections::HashMap<Bit, Bit> =
            old.iter().copied().zip(new.iter().copied()).collect();
        let pobjs: Vec<(Sym, SymObj)> = objs
            .iter()
            .map(|(n, o)| {
                (
                    n.clone(),
                    o.map_bits(&mut |b| map.get(&b).copied().unwrap_or(b)),
                )
            })
            .collect();

        // conclusion
        let mut it = Interp::new(self.defs, &self.cfg.interp, eng);
        let c = it.interp(self.concl, &pobjs);
        stats.absorb(&it.stats);
        let c = match c {
            Ok(c) => c,
            Err(e) => {
                let ex = self.example(&pobjs, eng);
                return Err(self.interp_failure(Stage::Conclusion, e, ex));
            }
        };
        let nilp = match nil_possibility(&c, eng) {
            Ok(b) => b,
            Err(ind) => {
                return Ok(ProofResult::Indeterminate {
                    offender: ind.0.find_escape().unwrap_or(&ind.0).render(),
                    example: self.example(&pobjs, eng),
                    stopped_at_escape: false,
                })
            }
        };
        let bad = eng.and(nilp, hyp_param);
        if eng.is_exhausted() {
            return Err(resource(
                Stage::Validity,
                "Boolean-expression node budget exhausted",
            ));
        }

        if let Some(dir) = &self.cfg.dimacs_dir {
            self.dump_dimacs(dir, eng, bad, warnings);
        }

        // counterexamples
        let mut cexes: Vec<Counterexample> = Vec::new();
        let wanted = self.counterexamples.max(1);
        let attempts = 2 + 3 * wanted;
        for k in 0..attempts {
            if cexes.len() >= wanted {
                break;
            }
            let policy = match k {
                0 => Policy::Zeros,
                1 => Policy::Ones,
                _ => Policy::Random(self.seed.wrapping_add(k as u64 - 2)),
            };
            let stage = if k == 0 {
                Stage::Validity
            } else {
                Stage::Counterexamples
            };
            let env = match eng.witness(bad, policy, &indices) {
                Ok(Some(env)) => env,
                Ok(None) => break,
                Err(e) => return Err(self.engine_failure(stage, e)),
            };
            let values = self.values_at(&pobjs, &env, eng)?;
            if cexes.iter().any(|c| c.values == values) {
                continue;
            }
            let verified = self.verify(&values);
            cexes.push(Counterexample {
                values,
                policy: policy.name(),
                verified,
            });
        }
        if cexes.is_empty() {
            return Ok(ProofResult::Proved { vacuous: false });
        }
        if cexes.iter().any(|c| c.verified) {
            if cexes.iter().any(|c| !c.verified) {
                warnings.push(format!(
                    "{}: some counterexamples did not survive concrete re-verification",
                    self.theorem
                ));
            }
            Ok(ProofResult::Disproved(cexes))
        } else {
            Ok(ProofResult::Indeterminate {
                offender: "no counterexample survived concrete re-verification".to_string(),
                example: cexes.swap_remove(0).values,
                stopped_at_escape: false,
            })
        }
    }
}

/// Proves one theorem: symbolic execution first, then coverage.
pub fn prove_thm(
    spec: &TheoremSpec,
    defs: &DefEnv,
    cfg: &ProverConfig,
) -> Result<ProofOutcome, ProverError> {
    check_bindings(&spec.name, &[&spec.hyp, &spec.concl], &spec.bindings, defs)?;
    let outcome = |result, stats, warnings| ProofOutcome {
        result,
        failing_case: None,
        warnings,
        stats,
        cases: Vec::new(),
    };
    let cov = || {
        check_coverage(
            &spec.hyp,
            &spec.concl,
            &spec.bindings,
            defs,
            &spec.options.do_not_expand,
        )
    };
    if cfg.coverage_only || spec.options.coverage_only {
        let r = match cov() {
            Ok(()) => ProofResult::CoverageOk,
            Err(f) => ProofResult::CoverageFailed(f),
        };
        return Ok(outcome(r, ProofStats::default(), Vec::new()));
    }
    let check = Check {
        theorem: &spec.name,
        hyp: &spec.hyp,
        concl: &spec.concl,
        bindings: &spec.bindings,
        defs,
        cfg,
        mode: spec.options.mode.unwrap_or(cfg.mode),
        counterexamples: spec.options.counterexamples.unwrap_or(cfg.counterexamples),
        seed: spec.options.seed.unwrap_or(cfg.seed),
    };
    let CheckOutcome {
        mut result,
        stats,
        warnings,
    } = check.run()?;
    if let ProofResult::Proved { .. } = result {
        if let Err(f) = cov() {
            result = ProofResult::CoverageFailed(f);
        }
    }
    Ok(outcome(result, stats, warnings))
}

/// Runs `f` on a thread with [`PROOF_STACK_SIZE`] of stack.
pub fn with_proof_stack<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(PROOF_STACK_SIZE)
            .spawn_scoped(s, f)
            .expect("failed to spawn proof thread")
            .join()
            .unwrap_or_else(|p| std::panic::resume_unwind(p))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::sexp::{read_all, read_one};
    use crate::lang::{parse_defun, parse_term, sym};
    use crate::shape::g_int;

    fn term(src: &str) -> Term {
        parse_term(&read_one(src).unwrap()).unwrap()
    }

    fn thm(hyp: &str, concl: &str, bindings: Vec<(&str, ShapeSpec)>) -> TheoremSpec {
        TheoremSpec {
            name: "t".into(),
            hyp: term(hyp),
            concl: term(concl),
            bindings: bindings.into_iter().map(|(n, s)| (sym(n), s)).collect(),
            options: ThmOptions::default(),
        }
    }

    fn both_modes(spec: &TheoremSpec, defs: &DefEnv) -> Vec<ProofOutcome> {
        [Mode::Bdd, Mode::Aig]
            .into_iter()
            .map(|mode| {
                let cfg = ProverConfig {
                    mode,
                    ..ProverConfig::default()
                };
                prove_thm(spec, defs, &cfg).unwrap()
            })
            .collect()
    }

    #[test]
    fn simple_proofs_and_refutations() {
        let defs = DefEnv::with_prelude();
        let good = thm(
            "(and (unsigned-byte-p 4 x) (unsigned-byte-p 4 y))",
            "(equal (+ x y) (+ y x))",
            vec![
                ("x", g_int(0, 2, 5).unwrap()),
                ("y", g_int(1, 2, 5).unwrap()),
            ],
        );
        for o in both_modes(&good, &defs) {
            assert_eq!(o.result, ProofResult::Proved { vacuous: false });
        }
        let bad = thm(
            "(unsigned-byte-p 4 x)",
            "(< x 9)",
            vec![("x", g_int(0, 1, 5).unwrap())],
        );
        for o in both_modes(&bad, &defs) {
            let ProofResult::Disproved(cs) = &o.result else {
                panic!("{:?}", o.result)
            };
            assert!(cs.iter().all(|c| c.verified));
            // zeros fixes low bits first: among 9..15 bit 0 can be 0, then bit 1
            assert_eq!(cs[0].values[0].1, Value::int(12));
            assert_eq!(cs[1].values[0].1, Value::int(15));
        }
    }

    #[test]
    fn vacuous_hypothesis_warns() {
        let defs = DefEnv::with_prelude();
        let spec = thm(
            "(and (natp x) (< x 0))",
            "nil",
            vec![("x", g_int(0, 1, 4).unwrap())],
        );
        for o in both_modes(&spec, &defs) {
            assert_eq!(o.result, ProofResult::Proved { vacuous: true });
            assert_eq!(o.warnings.len(), 1);
        }
    }

    #[test]
    fn hypothesis_narrows_before_the_conclusion_runs() {
        // without narrowing, (* 1/2 x) on odd x would still escape; the escape
        // itself is what makes this indeterminate either way
        let defs = DefEnv::with_prelude();
        let spec = thm(
            "(and (unsigned-byte-p 4 x) (not (logbitp 0 x)))",
            "(equal (* 1/2 x) (ash x -1))",
            vec![("x", g_int(0, 1, 5).unwrap())],
        );
        for o in both_modes(&spec, &defs) {
            let ProofResult::Indeterminate { offender, .. } = &o.result else {
                panic!("{:?}", o.result)
            };
            assert!(offender.contains("binary-*"), "{offender}");
        }
        let mut cfg = ProverConfig::default();
        cfg.interp.break_on_apply = true;
        let o = prove_thm(&spec, &defs, &cfg).unwrap();
        let ProofResult::Indeterminate {
            offender,
            stopped_at_escape,
            ..
        } = &o.result
        else {
            panic!()
        };
        assert!(stopped_at_escape);
        assert_eq!(
            offender,
            "(g-apply binary-* (1/2 (:g-number (nil # # # nil))))"
        );
    }

    #[test]
    fn coverage_runs_after_a_successful_execution() {
        let defs = DefEnv::with_prelude();
        let spec = thm(
            "(unsigned-byte-p 4 x)",
            "(< x 16)",
            vec![("x", g_int(0, 1, 4).unwrap())],
        );
        let o = prove_thm(&spec, &defs, &ProverConfig::default()).unwrap();
        let ProofResult::CoverageFailed(f) = &o.result else {
            panic!("{:?}", o.result)
        };
        assert_eq!(f.witness, Value::int(8));
        let cfg = ProverConfig {
            coverage_only: true,
            ..ProverConfig::default()
        };
        let o = prove_thm(&spec, &defs, &cfg).unwrap();
        assert!(matches!(o.result, ProofResult::CoverageFailed(_)));
    }

    #[test]
    fn malformed_theorems_are_errors() {
        let defs = DefEnv::with_prelude();
        let spec = thm(
            "(natp x)",
            "(equal x y)",
            vec![("x", g_int(0, 1, 4).unwrap())],
        );
        assert!(matches!(
            prove_thm(&spec, &defs, &ProverConfig::default()),
            Err(ProverError::MissingBinding { .. })
        ));
        let spec = thm(
            "(natp x)",
            "(equal x y)",
            vec![
                ("x", g_int(0, 1, 4).unwrap()),
                ("y", g_int(3, 1, 4).unwrap()),
            ],
        );
        assert!(matches!(
            prove_thm(&spec, &defs, &ProverConfig::default()),
            Err(ProverError::Shape { .. })
        ));
        let spec = thm("(natp x)", "(frob x)", vec![("x", g_int(0, 1, 4).unwrap())]);
        assert!(matches!(
            prove_thm(&spec, &defs, &ProverConfig::default()),
            Err(ProverError::UnknownFunction { .. })
        ));
    }

    /// Proved verdicts agree with exhaustive concrete enumeration.
    #[test]
    fn proofs_match_enumeration_on_small_theorems() {
        let mut defs = DefEnv::with_prelude();
        for (f, _) in
            read_all("(defun avg (a b) (ash (+ a b) -1)) (defun mx (a b) (if (< a b) b a))")
                .unwrap()
        {
            defs.define(parse_defun(&f).unwrap()).unwrap();
        }
        let concls = [
            "(not (< (mx x y) x))",
            "(< (avg x y) 8)",
            "(equal (avg x y) (avg y x))",
            "(<= (avg x y) (mx x y))",
            "(equal (logand x y) (logand y x))",
            "(< (logxor x y) 8)",
            "(equal (logcount (+ x y)) (logcount x))",
        ];
        for concl in concls {
            let spec = thm(
                "(and (unsigned-byte-p 3 x) (unsigned-byte-p 3 y))",
                concl,
                vec![
                    ("x", g_int(0, 1, 4).unwrap()),
                    ("y", g_int(4, 1, 4).unwrap()),
                ],
            );
            let truth = (0..8).all(|x| {
                (0..8).all(|y| {
                    let env = [(sym("x"), Value::int(x)), (sym("y"), Value::int(y))];
                    !eval_concrete(&spec.concl, &env, &defs, &mut StepBudget::default())
                        .unwrap()
                        .is_nil()
                })
            });
            for o in both_modes(&spec, &defs) {
                assert_eq!(
                    matches!(o.result, ProofResult::Proved { .. }),
                    truth,
                    "{concl}"
                );
                if let ProofResult::Disproved(cs) = &o.result {
                    assert!(cs.iter().all(|c| c.verified));
                }
            }
        }
    }
}
