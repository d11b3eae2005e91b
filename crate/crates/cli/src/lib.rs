// SPDX-License-Identifier: Apache-2.0

//! Runs a theorem file event by event and renders the results.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value as Json};

use blastproof::file::{parse_file, Event, FileError, Lemma};
use blastproof::interp::TraceMode;
use blastproof::lang::prim::is_primitive;
use blastproof::prover::{
    prove_param_thm, prove_thm, CaseOutcome, Counterexample, ProofOutcome, ProofResult,
    ProverConfig,
};
use blastproof::{DefEnv, Mode, Sym, Value};

pub const EXIT_PROVED: i32 = 0;
pub const EXIT_DISPROVED: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub mode: Mode,
    pub seed: u64,
    pub trace: TraceMode,
    pub trace_json: bool,
    pub break_on_apply: bool,
    pub max_steps: u64,
    pub node_budget: usize,
    pub sat_conflicts: u64,
    pub counterexamples: usize,
    pub keep_going: bool,
    pub coverage_only: bool,
    pub dimacs_dir: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        let p = ProverConfig::default();
        RunOptions {
            mode: p.mode,
            seed: p.seed,
            trace: TraceMode::Off,
            trace_json: false,
            break_on_apply: false,
            max_steps: p.interp.step_limit,
            node_budget: p.node_budget,
            sat_conflicts: p.sat_conflicts,
            counterexamples: p.counterexamples,
            keep_going: false,
            coverage_only: false,
            dimacs_dir: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EventOutcome {
    /// A definition or directive that took effect.
    Ack,
    Proof(ProofOutcome),
    /// A theorem or directive that could not be processed.
    Error(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventReport {
    pub kind: &'static str,
    pub name: String,
    pub line: usize,
    pub mode: Option<Mode>,
    pub outcome: EventOutcome,
    pub wall_seconds: f64,
}

impl EventReport {
    fn is_failure(&self) -> bool {
        match &self.outcome {
            EventOutcome::Ack => false,
            EventOutcome::Proof(p) => !p.result.is_success(),
            EventOutcome::Error(_) => true,
        }
    }

    fn status(&self) -> &'static str {
        match &self.outcome {
            EventOutcome::Ack => "ok",
            EventOutcome::Proof(p) => p.result.kind(),
            EventOutcome::Error(_) => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub file: String,
    pub events: Vec<EventReport>,
    pub parse_error: Option<FileError>,
    pub exit_code: i32,
}

fn exit_code(events: &[EventReport]) -> i32 {
    let mut code = EXIT_PROVED;
    for e in events {
        let c = match &e.outcome {
            EventOutcome::Ack => EXIT_PROVED,
            EventOutcome::Error(_) => EXIT_USAGE,
            EventOutcome::Proof(p) => match p.result {
                ProofResult::Proved { .. } | ProofResult::CoverageOk => EXIT_PROVED,
                ProofResult::Disproved(_) => EXIT_DISPROVED,
                _ => EXIT_UNDECIDED,
            },
        };
        // usage errors dominate, then refutations, then undecided results
        let rank = |c: i32| match c {
            EXIT_USAGE => 3,
            EXIT_DISPROVED => 2,
            EXIT_UNDECIDED => 1,
            _ => 0,
        };
        if rank(c) > rank(code) {
            code = c;
        }
    }
    code
}

struct Session<'a> {
    opts: &'a RunOptions,
    defs: DefEnv,
    cfg: ProverConfig,
    lemmas: HashMap<Sym, Lemma>,
}

impl<'a> Session<'a> {
    fn new(opts: &'a RunOptions) -> Self {
        let mut cfg = ProverConfig {
            mode: opts.mode,
            node_budget: opts.node_budget,
            sat_conflicts: opts.sat_conflicts,
            counterexamples: opts.counterexamples,
            seed: opts.seed,
            coverage_only: opts.coverage_only,
            dimacs_dir: opts.dimacs_dir.clone(),
            ..ProverConfig::default()
        };
        cfg.interp.step_limit = opts.max_steps;
        cfg.interp.trace = opts.trace;
        cfg.interp.trace_json = opts.trace_json;
        cfg.interp.break_on_apply = opts.break_on_apply;
        Session {
            opts,
            defs: DefEnv::with_prelude(),
            cfg,
            lemmas: HashMap::new(),
        }
    }

    fn process(&mut self, event: Event) -> (Option<Mode>, EventOutcome) {
        let err = |m: String| (None, EventOutcome::Error(m));
        match event {
            Event::Defun(def) => match self.defs.define(def) {
                Ok(()) => (None, EventOutcome::Ack),
                Err(e) => err(e.to_string()),
            },
            Event::Lemma(l) => {
                self.lemmas.insert(l.name.clone(), l);
                (None, EventOutcome::Ack)
            }
            Event::PreferredDef { function, lemma } => {
                let Some(l) = self.lemmas.get(&lemma) else {
                    return err(format!("no lemma named {lemma}"));
                };
                let Some((f, formals, rhs)) = l.as_rewrite() else {
                    return err(format!(
                        "{lemma} does not have the form (equal (f vars...) term)"
                    ));
                };
                if f != function {
                    return err(format!("{lemma} rewrites {f}, not {function}"));
                }
                match self.cfg.interp.register_preferred_def(
                    &function,
                    Some(formals),
                    rhs,
                    &self.defs,
                    self.opts.seed,
                ) {
                    Ok(()) => (None, EventOutcome::Ack),
                    Err(e) => err(e.to_string()),
                }
            }
            Event::ConcreteExec(fns) => {
                for f in fns {
                    if !self.defs.contains(&f) && !is_primitive(&f) {
                        return err(format!("unknown function {f}"));
                    }
                    self.cfg.interp.concrete_exec.insert(f);
                }
                (None, EventOutcome::Ack)
            }
            Event::SetMode(m) => {
                self.cfg.mode = m;
                (None, EventOutcome::Ack)
            }
            Event::Theorem(spec) => {
                let mode = spec.options.mode.unwrap_or(self.cfg.mode);
                match prove_thm(&spec, &self.defs, &self.cfg) {
                    Ok(o) => (Some(mode), EventOutcome::Proof(o)),
                    Err(e) => err(e.to_string()),
                }
            }
            Event::ParamTheorem(spec) => {
                let mode = spec.options.mode.unwrap_or(self.cfg.mode);
                match prove_param_thm(&spec, &self.defs, &self.cfg) {
                    Ok(o) => (Some(mode), EventOutcome::Proof(o)),
                    Err(e) => err(e.to_string()),
                }
            }
        }
    }
}

/// Runs every event of `src` in order.
pub fn run_source(file: &str, src: &str, opts: &RunOptions) -> RunReport {
    let events = match parse_file(src) {
        Ok(evs) => evs,
        Err(e) => {
            return RunReport {
                file: file.to_string(),
                events: Vec::new(),
                parse_error: Some(e),
                exit_code: EXIT_USAGE,
            }
        }
    };
    let mut session = Session::new(opts);
    let mut reports = Vec::with_capacity(events.len());
    for located in events {
        let kind = located.event.kind();
        let name = located.event.name();
        let start = Instant::now();
        let (mode, outcome) = session.process(located.event);
        let report = EventReport {
            kind,
            name,
            line: located.line,
            mode,
            outcome,
            wall_seconds: start.elapsed().as_secs_f64(),
        };
        let stop = report.is_failure() && !opts.keep_going;
        reports.push(report);
        if stop {
            break;
        }
    }
    RunReport {
        file: file.to_string(),
        exit_code: exit_code(&reports),
        events: reports,
        parse_error: None,
    }
}

/// Reads and runs a theorem file on a thread with a large stack.
pub fn run_file(path: &std::path::Path, opts: &RunOptions) -> Result<RunReport, std::io::Error> {
    let src = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    Ok(blastproof::prover::with_proof_stack(|| {
        run_source(&name, &src, opts)
    }))
}

fn value_json(v: &Value) -> Json {
    json!({"value": v.to_string(), "hex": v.hex()})
}

fn bindings_json(values: &[(Sym, Value)]) -> Json {
    Json::Array(
        values
            .iter()
            .map(|(n, v)| {
                let mut o = value_json(v);
                o["var"] = json!(n.to_string());
                o
            })
            .collect(),
    )
}

fn counterexample_json(c: &Counterexample) -> Json {
    json!({"policy": c.policy, "verified": c.verified, "values": bindings_json(&c.values)})
}

fn result_json(r: &ProofResult) -> Json {
    match r {
        ProofResult::Proved { vacuous } => json!({"vacuous": vacuous}),
        ProofResult::CoverageOk => json!({}),
        ProofResult::Disproved(cs) => {
            json!({"counterexamples": cs.iter().map(counterexample_json).collect::<Vec<_>>()})
        }
        ProofResult::Indeterminate {
            offender,
            example,
            stopped_at_escape,
        } => json!({
            "offender": offender,
            "stopped_at_escape": stopped_at_escape,
            "example": bindings_json(example),
        }),
        ProofResult::CoverageFailed(f) => json!({
            "var": f.var.to_string(),
            "witness": value_json(&f.witness),
            "required": f.required,
            "covered": f.covered,
        }),
        ProofResult::ResourceLimit { stage, detail } => {
            json!({"stage": stage.to_string(), "detail": detail})
        }
    }
}

#[derive(Serialize)]
struct StatsJson {
    steps: u64,
    nodes: usize,
    concrete_calls: u64,
    counterpart_calls: u64,
    preferred_def_expansions: u64,
    definition_expansions: u64,
    merges: u64,
    escapes: u64,
}

fn stats_json(p: &ProofOutcome) -> Json {
    stats_of(&p.stats)
}

fn stats_of(s: &blastproof::prover::ProofStats) -> Json {
    let i = &s.interp;
    serde_json::to_value(StatsJson {
        steps: i.steps,
        nodes: s.nodes,
        concrete_calls: i.concrete_calls,
        counterpart_calls: i.counterpart_calls,
        preferred_def_expansions: i.preferred_def_expansions,
        definition_expansions: i.definition_expansions,
        merges: i.merges,
        escapes: i.escapes,
    })
    .expect("stats serialize")
}

fn case_json(c: &CaseOutcome) -> Json {
    json!({
        "label": c.label,
        "status": c.result.kind(),
        "result": result_json(&c.result),
        "stats": stats_of(&c.stats),
    })
}

/// The report as a JSON document.
pub fn report_json(r: &RunReport) -> Json {
    let events: Vec<Json> = r
        .events
        .iter()
        .map(|e| {
            let mut o = json!({
                "kind": e.kind,
                "name": e.name,
                "line": e.line,
                "status": e.status(),
                "mode": e.mode.map(|m| m.to_string()),
                "wall_seconds": e.wall_seconds,
                "result": Json::Null,
                "stats": Json::Null,
                "warnings": [],
                "failing_case": Json::Null,
                "cases": [],
                "error": Json::Null,
            });
            match &e.outcome {
                EventOutcome::Ack => {}
                EventOutcome::Error(m) => o["error"] = json!(m),
                EventOutcome::Proof(p) => {
                    o["result"] = result_json(&p.result);
                    o["stats"] = stats_json(p);
                    o["warnings"] = json!(p.warnings);
                    o["failing_case"] = json!(p.failing_case);
                    o["cases"] = Json::Array(p.cases.iter().map(case_json).collect());
                }
            }
            o
        })
        .collect();
    json!({
        "file": r.file,
        "exit_code": r.exit_code,
        "parse_error": r.parse_error.as_ref().map(|e| json!({"line": e.line, "col": e.col, "message": e.message})),
        "events": events,
    })
}

fn status_word(r: &ProofResult) -> &'static str {
    match r {
        ProofResult::Proved { vacuous: false } => "PROVED",
        ProofResult::Proved { vacuous: true } => "PROVED (vacuously)",
        ProofResult::CoverageOk => "COVERAGE OK",
        ProofResult::Disproved(_) => "DISPROVED",
        ProofResult::Indeterminate { .. } => "INDETERMINATE",
        ProofResult::CoverageFailed(_) => "COVERAGE FAILED",
        ProofResult::ResourceLimit { .. } => "RESOURCE LIMIT",
    }
}

fn write_bindings(out: &mut String, values: &[(Sym, Value)]) {
    let parts: Vec<String> = values
        .iter()
        .map(|(n, v)| format!("{n} = {}", v.display_dec_hex()))
        .collect();
    out.push_str(&parts.join(", "));
}

fn write_result(out: &mut String, r: &ProofResult, indent: &str) {
    match r {
        ProofResult::Proved { .. } | ProofResult::CoverageOk => {}
        ProofResult::Disproved(cs) => {
            for (i, c) in cs.iter().enumerate() {
                let check = if c.verified {
                    "verified"
                } else {
                    "NOT verified"
                };
                let _ = write!(
                    out,
                    "{indent}counterexample {} ({}, {check}): ",
                    i + 1,
                    c.policy
                );
                write_bindings(out, &c.values);
                out.push('\n');
            }
        }
        ProofResult::Indeterminate {
            offender,
            example,
            stopped_at_escape,
        } => {
            if *stopped_at_escape {
                let _ = writeln!(out, "{indent}escape created: {offender}");
            } else {
                let _ = writeln!(out, "{indent}undecidable term: {offender}");
            }
            if !example.is_empty() {
                let _ = write!(out, "{indent}example inputs: ");
                write_bindings(out, example);
                out.push('\n');
            }
        }
        ProofResult::CoverageFailed(f) => {
            let _ = writeln!(
                out,
                "{indent}the bindings do not cover every input the hypothesis allows"
            );
            let _ = writeln!(out, "{indent}hypothesis allows {} = {}", f.var, f.required);
            let _ = writeln!(out, "{indent}binding covers     {} = {}", f.var, f.covered);
            let _ = writeln!(
                out,
                "{indent}uncovered input: {} = {}",
                f.var,
                f.witness.display_dec_hex()
            );
        }
        ProofResult::ResourceLimit { stage, detail } => {
            let _ = writeln!(out, "{indent}during {stage}: {detail}");
        }
    }
}

/// The report as human-readable text.
pub fn report_text(r: &RunReport) -> String {
    let mut out = String::new();
    if let Some(e) = &r.parse_error {
        let _ = writeln!(out, "{}:{e}", r.file);
        return out;
    }
    for e in &r.events {
        match &e.outcome {
            EventOutcome::Ack => {
                let _ = writeln!(out, "{} {}: ok", e.kind, e.name);
            }
            EventOutcome::Error(m) => {
                let _ = writeln!(out, "{} {}: ERROR (line {}): {m}", e.kind, e.name, e.line);
            }
            EventOutcome::Proof(p) => {
                let mode = e.mode.map(|m| m.to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{} {}: {} [{mode}, {:.3}s, {} steps, {} nodes]",
                    e.kind,
                    e.name,
                    status_word(&p.result),
                    e.wall_seconds,
                    p.stats.interp.steps,
                    p.stats.nodes
                );
                for c in &p.cases {
                    let _ = writeln!(out, "  case {}: {}", c.label, status_word(&c.result));
                }
                if let Some(c) = &p.failing_case {
                    let _ = writeln!(out, "  failing case: {c}");
                }
                write_result(&mut out, &p.result, "  ");
                for w in &p.warnings {
                    let _ = writeln!(out, "  warning: {w}");
                }
            }
        }
    }
    let summary = match r.exit_code {
        EXIT_PROVED => "all events succeeded",
        EXIT_DISPROVED => "a theorem was disproved",
        EXIT_UNDECIDED => "a theorem could not be decided",
        _ => "an event could not be processed",
    };
    let _ = writeln!(
        out,
        "{} events; {summary} (exit {})",
        r.events.len(),
        r.exit_code
    );
    out
}
