// SPDX-License-Identifier: Apache-2.0

//! Case-split theorems: one check per case plus a completeness check.

use crate::lang::{DefEnv, Sym, Term};

use super::{
    check_bindings, check_coverage, CaseOutcome, Check, ParamCase, ParamTheoremSpec, ProofOutcome,
    ProofResult, ProofStats, ProverConfig, ProverError, PROOF_STACK_SIZE,
};

/// `param_hyp` with the case variables bound to the case's constants.
fn instantiate(param_hyp: &Term, case: &ParamCase) -> Term {
    Term::Let {
        bindings: case
            .assignment
            .iter()
            .map(|(n, v)| (n.clone(), Term::Quote(v.clone())))
            .collect(),
        body: Box::new(param_hyp.clone()),
        sequential: false,
    }
}

fn completeness_label() -> String {
    "completeness".to_string()
}

struct Job<'a> {
    label: String,
    hyp: Term,
    concl: &'a Term,
    bindings: &'a [(Sym, crate::shape::ShapeSpec)],
}

fn run_job(
    spec: &ParamTheoremSpec,
    job: &Job<'_>,
    defs: &DefEnv,
    cfg: &ProverConfig,
) -> Result<(CaseOutcome, Vec<String>), ProverError> {
    let name = format!("{} {}", spec.name, job.label);
    let cov = || {
        check_coverage(
            &job.hyp,
            job.concl,
            job.bindings,
            defs,
            &spec.options.do_not_expand,
        )
    };
    if cfg.coverage_only || spec.options.coverage_only {
        let result = match cov() {
            Ok(()) => ProofResult::CoverageOk,
            Err(f) => ProofResult::CoverageFailed(f),
        };
        let case = CaseOutcome {
            label: job.label.clone(),
            result,
            stats: ProofStats::default(),
        };
        return Ok((case, Vec::new()));
    }
    let check = Check {
        theorem: &name,
        hyp: &job.hyp,
        concl: job.concl,
        bindings: job.bindings,
        defs,
        cfg,
        mode: spec.options.mode.unwrap_or(cfg.mode),
        counterexamples: spec.options.counterexamples.unwrap_or(cfg.counterexamples),
        seed: spec.options.seed.unwrap_or(cfg.seed),
    };
    let out = check.run()?;
    let mut result = out.result;
    if let ProofResult::Proved { .. } = result {
        if let Err(f) = cov() {
            result = ProofResult::CoverageFailed(f);
        }
    }
    let case = CaseOutcome {
        label: job.label.clone(),
        result,
        stats: out.stats,
    };
    Ok((case, out.warnings))
}

/// Proves a case-split theorem.
///
/// Each case conjoins the instantiated case hypothesis with the main
/// hypothesis and is checked over its own bindings. The completeness check
/// shows, over the coverage bindings, that the main hypothesis implies some
/// case hypothesis. Cases run in parallel; results are reported in order.
pub fn prove_param_thm(
    spec: &ParamTheoremSpec,
    defs: &DefEnv,
    cfg: &ProverConfig,
) -> Result<ProofOutcome, ProverError> {
    let case_vars: Vec<Sym> = spec
        .cases
        .first()
        .map(|c| c.assignment.iter().map(|(n, _)| n.clone()).collect())
        .unwrap_or_default();
    for c in &spec.cases {
        let mut names: Vec<Sym> = c.assignment.iter().map(|(n, _)| n.clone()).collect();
        let mut want = case_vars.clone();
        names.sort();
        want.sort();
        if names != want {
            return Err(ProverError::InconsistentCases {
                theorem: spec.name.clone(),
            });
        }
    }

    let mut jobs: Vec<Job<'_>> = spec
        .cases
        .iter()
        .map(|c| Job {
            label: c.label(),
            hyp: Term::and(vec![spec.hyp.clone(), instantiate(&spec.param_hyp, c)]),
            concl: &spec.concl,
            bindings: &c.bindings,
        })
        .collect();
    let disjunction = Term::or(
        spec.cases
            .iter()
            .map(|c| instantiate(&spec.param_hyp, c))
            .collect(),
    );
    jobs.push(Job {
        label: completeness_label(),
        hyp: spec.hyp.clone(),
        concl: &disjunction,
        bindings: &spec.cov_bindings,
    });
    for j in &jobs {
        check_bindings(
            &format!("{} {}", spec.name, j.label),
            &[&j.hyp, j.concl],
            j.bindings,
            defs,
        )?;
    }

    let results: Vec<Result<(CaseOutcome, Vec<String>), ProverError>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|job| {
                std::thread::Builder::new()
                    .stack_size(PROOF_STACK_SIZE)
                    .spawn_scoped(s, move || run_job(spec, job, defs, cfg))
                    .expect("failed to spawn proof thread")
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    });

    let mut cases = Vec::with_capacity(results.len());
    let mut warnings = Vec::new();
    let mut stats = ProofStats::default();
    for r in results {
        let (case, w) = r?;
        stats.add(&case.stats);
        warnings.extend(w);
        cases.push(case);
    }
    let failing = cases.iter().find(|c| !c.result.is_success());
    let (result, failing_case) = match failing {
        Some(c) => (c.result.clone(), Some(c.label.clone())),
        None if cfg.coverage_only || spec.options.coverage_only => (ProofResult::CoverageOk, None),
        None => {
            let vacuous = cases
                .iter()
                .all(|c| matches!(c.result, ProofResult::Proved { vacuous: true }));
            (ProofResult::Proved { vacuous }, None)
        }
    };
    Ok(ProofOutcome {
        result,
        failing_case,
        warnings,
        stats,
        cases,
    })
}
