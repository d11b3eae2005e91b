// SPDX-License-Identifier: Apache-2.0

//! One interface over the two Boolean-function realizations.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::aig::{Aig, AigError, Lit};
use crate::bdd::{Bdd, BddError, Node};
use crate::boolenv::{BoolEnv, Policy};
use crate::sat::{self, SatError, SatResult, DEFAULT_CONFLICT_BUDGET};

/// A Boolean expression owned by an [`Engine`]. `Bit(0)` is false and
/// `Bit(1)` is true in both modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bit(pub u32);

impl Bit {
    pub const FALSE: Bit = Bit(0);
    pub const TRUE: Bit = Bit(1);

    pub fn constant(b: bool) -> Bit {
        Bit(b as u32)
    }

    pub fn as_const(self) -> Option<bool> {
        match self.0 {
            0 => Some(false),
            1 => Some(true),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Bdd,
    Aig,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Bdd => "bdd",
            Mode::Aig => "aig",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bdd" => Ok(Mode::Bdd),
            "aig" => Ok(Mode::Aig),
            _ => Err(format!("unknown mode {s:?} (expected bdd or aig)")),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("no value for Boolean variable {0}")]
    MissingVar(u32),
    #[error(transparent)]
    Sat(#[from] SatError),
}

impl From<BddError> for EngineError {
    fn from(e: BddError) -> Self {
        match e {
            BddError::MissingVar(v) => EngineError::MissingVar(v),
            other => unreachable!("unexpected BDD error {other}"),
        }
    }
}

impl From<AigError> for EngineError {
    fn from(e: AigError) -> Self {
        match e {
            AigError::MissingVar(v) => EngineError::MissingVar(v),
            AigError::Sat(s) => EngineError::Sat(s),
            AigError::Unsatisfiable => unreachable!("unsatisfiable constraint escaped"),
        }
    }
}

enum Store {
    Bdd(Bdd),
    Aig(Aig),
}

/// A Boolean-expression store in either mode.
pub struct Engine {
    store: Store,
    sat_conflicts: u64,
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $e:expr) => {
        match &mut $self.store {
            Store::Bdd($m) => $e,
            Store::Aig($m) => $e,
        }
    };
}

impl Engine {
    pub fn new(mode: Mode, node_budget: usize) -> Self {
        let store = match mode {
            Mode::Bdd => Store::Bdd(Bdd::with_budget(node_budget)),
            Mode::Aig => Store::Aig(Aig::with_budget(node_budget)),
        };
        Engine {
            store,
            sat_conflicts: DEFAULT_CONFLICT_BUDGET,
        }
    }

    pub fn bdd() -> Self {
        Engine::new(Mode::Bdd, crate::bdd::DEFAULT_NODE_BUDGET)
    }

    pub fn aig() -> Self {
        Engine::new(Mode::Aig, crate::aig::DEFAULT_NODE_BUDGET)
    }

    pub fn with_sat_conflicts(mut self, budget: u64) -> Self {
        self.sat_conflicts = budget;
        self
    }

    pub fn sat_conflicts(&self) -> u64 {
        self.sat_conflicts
    }

    pub fn mode(&self) -> Mode {
        match self.store {
            Store::Bdd(_) => Mode::Bdd,
            Store::Aig(_) => Mode::Aig,
        }
    }

    pub fn as_bdd(&mut self) -> Option<&mut Bdd> {
        match &mut self.store {
            Store::Bdd(b) => Some(b),
            Store::Aig(_) => None,
        }
    }

    pub fn as_aig(&mut self) -> Option<&mut Aig> {
        match &mut self.store {
            Store::Aig(a) => Some(a),
            Store::Bdd(_) => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        match &self.store {
            Store::Bdd(b) => b.is_exhausted(),
            Store::Aig(a) => a.is_exhausted(),
        }
    }

    pub fn node_count(&self) -> usize {
        match &self.store {
            Store::Bdd(b) => b.node_count(),
            Store::Aig(a) => a.node_count(),
        }
    }

    pub fn var(&mut self, index: u32) -> Bit {
        match &mut self.store {
            Store::Bdd(b) => Bit(b.var(index).0),
            Store::Aig(a) => Bit(a.var(index).0),
        }
    }

    pub fn not(&mut self, x: Bit) -> Bit {
        dispatch!(self, s => Bit(s.not(wrap(x)).0))
    }

    pub fn and(&mut self, x: Bit, y: Bit) -> Bit {
        if x == Bit::FALSE || y == Bit::FALSE {
            return Bit::FALSE;
        }
        dispatch!(self, s => Bit(s.and(wrap(x), wrap(y)).0))
    }

    pub fn or(&mut self, x: Bit, y: Bit) -> Bit {
        if x == Bit::TRUE || y == Bit::TRUE {
            return Bit::TRUE;
        }
        dispatch!(self, s => Bit(s.or(wrap(x), wrap(y)).0))
    }

    pub fn xor(&mut self, x: Bit, y: Bit) -> Bit {
        dispatch!(self, s => Bit(s.xor(wrap(x), wrap(y)).0))
    }

    pub fn iff(&mut self, x: Bit, y: Bit) -> Bit {
        dispatch!(self, s => Bit(s.iff(wrap(x), wrap(y)).0))
    }

    pub fn implies(&mut self, x: Bit, y: Bit) -> Bit {
        let nx = self.not(x);
        self.or(nx, y)
    }

    pub fn ite(&mut self, c: Bit, t: Bit, e: Bit) -> Bit {
        match c.as_const() {
            Some(true) => return t,
            Some(false) => return e,
            None if t == e => return t,
            None => {}
        }
        dispatch!(self, s => Bit(s.ite(wrap(c), wrap(t), wrap(e)).0))
    }

    pub fn and_all(&mut self, bits: impl IntoIterator<Item = Bit>) -> Bit {
        bits.into_iter().fold(Bit::TRUE, |acc, b| self.and(acc, b))
    }

    pub fn eval(&self, x: Bit, env: &BoolEnv) -> Result<bool, EngineError> {
        match &self.store {
            Store::Bdd(b) => Ok(b.eval(Node(x.0), env)?),
            Store::Aig(a) => Ok(a.eval(Lit(x.0), env)?),
        }
    }

    pub fn eval_many(&self, xs: &[Bit], env: &BoolEnv) -> Result<Vec<bool>, EngineError> {
        match &self.store {
            Store::Bdd(b) => xs
                .iter()
                .map(|x| b.eval(Node(x.0), env).map_err(EngineError::from))
                .collect(),
            Store::Aig(a) => {
                let lits: Vec<Lit> = xs.iter().map(|x| Lit(x.0)).collect();
                Ok(a.eval_many(&lits, env)?)
            }
        }
    }

    /// Variables in the expression's support (structural in AIG mode).
    pub fn support(&self, x: Bit) -> Vec<u32> {
        match &self.store {
            Store::Bdd(b) => b.support(Node(x.0)),
            Store::Aig(a) => a.support(Lit(x.0)),
        }
    }

    /// Whether the expression is true under every assignment.
    pub fn is_valid(&mut self, x: Bit) -> Result<bool, EngineError> {
        if let Some(c) = x.as_const() {
            return Ok(c);
        }
        match &self.store {
            Store::Bdd(_) => Ok(false),
            Store::Aig(a) => {
                let (cnf, out) = a.to_cnf(Lit(x.0).negate());
                Ok(sat::solve(&cnf, &[out], self.sat_conflicts)? == SatResult::Unsat)
            }
        }
    }

    /// Replaces variables by expressions throughout `xs`.
    pub fn substitute(&mut self, xs: &[Bit], sigma: &[(u32, Bit)]) -> Vec<Bit> {
        if sigma.is_empty() {
            return xs.to_vec();
        }
        match &mut self.store {
            Store::Bdd(b) => {
                let map: HashMap<u32, Node> = sigma.iter().map(|&(v, x)| (v, Node(x.0))).collect();
                xs.iter()
                    .map(|x| Bit(b.compose_partial(Node(x.0), &map).0))
                    .collect()
            }
            Store::Aig(a) => {
                let map: FxHashMap<u32, Lit> = sigma.iter().map(|&(v, x)| (v, Lit(x.0))).collect();
                let lits: Vec<Lit> = xs.iter().map(|x| Lit(x.0)).collect();
                a.compose_partial(&lits, &map)
                    .into_iter()
                    .map(|l| Bit(l.0))
                    .collect()
            }
        }
    }

    /// A substitution over `indices` that narrows the variables to the
    /// models of `constraint`, or `None` when it has no models.
    ///
    /// In BDD mode the substitution's image is exactly the constraint's
    /// models. In AIG mode only variables forced to a constant are replaced.
    pub fn parametrize(
        &mut self,
        constraint: Bit,
        indices: &[u32],
    ) -> Result<Option<Vec<(u32, Bit)>>, EngineError> {
        if constraint == Bit::FALSE {
            return Ok(None);
        }
        let sat_conflicts = self.sat_conflicts;
        match &mut self.store {
            Store::Bdd(b) => match b.parametrize(Node(constraint.0), indices) {
                Ok(sigma) => Ok(Some(
                    sigma.into_iter().map(|(v, n)| (v, Bit(n.0))).collect(),
                )),
                Err(BddError::Unsatisfiable) => Ok(None),
                Err(BddError::UncoveredVar(v)) | Err(BddError::MissingVar(v)) => {
                    Err(EngineError::MissingVar(v))
                }
            },
            Store::Aig(a) => match a.forced_constants(Lit(constraint.0), indices, sat_conflicts) {
                Ok(forced) => Ok(Some(
                    forced
                        .into_iter()
                        .map(|(v, c)| (v, Bit::constant(c)))
                        .collect(),
                )),
                Err(AigError::Unsatisfiable) => Ok(None),
                Err(e) => Err(e.into()),
            },
        }
    }

    /// A satisfying assignment chosen under `policy`, defined on at least
    /// `indices` and the expression's support.
    pub fn witness(
        &mut self,
        x: Bit,
        policy: Policy,
        indices: &[u32],
    ) -> Result<Option<BoolEnv>, EngineError> {
        let upto = indices.iter().copied().max();
        match &self.store {
            Store::Bdd(b) => Ok(b.witness(Node(x.0), policy, upto)),
            Store::Aig(a) => {
                let (cnf, out) = a.to_cnf(Lit(x.0));
                let mut all: Vec<u32> = indices.to_vec();
                all.extend(cnf.var_map.keys());
                if let Some(m) = upto {
                    all.extend(0..=m);
                }
                all.sort_unstable();
                all.dedup();
                Ok(sat::witness_with_policy(
                    &cnf,
                    out,
                    policy,
                    &all,
                    self.sat_conflicts,
                )?)
            }
        }
    }
}

trait Raw: Sized {
    fn from_raw(r: u32) -> Self;
}

impl Raw for Node {
    fn from_raw(r: u32) -> Self {
        Node(r)
    }
}

impl Raw for Lit {
    fn from_raw(r: u32) -> Self {
        Lit(r)
    }
}

fn wrap<T: Raw>(b: Bit) -> T {
    T::from_raw(b.0)
}
