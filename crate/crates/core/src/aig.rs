// SPDX-License-Identifier: Apache-2.0

//! Structurally hashed And-Inverter Graphs and their CNF encoding.
//!
//! A literal is `node * 2 + negated`; node 0 is the constant, so literal 0
//! is false and literal 1 is true. Negation is an edge attribute, which makes
//! `not(not(x)) = x` hold by construction.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::boolenv::{BoolEnv, Policy};
use crate::sat::{SatError, SatResult, Solver};

pub const DEFAULT_NODE_BUDGET: usize = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(pub u32);

impl Lit {
    pub const FALSE: Lit = Lit(0);
    pub const TRUE: Lit = Lit(1);

    pub fn node(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_const(self) -> bool {
        self.0 < 2
    }

    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Gate {
    Const,
    Input(u32),
    And(Lit, Lit),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AigError {
    #[error("no value for variable {0}")]
    MissingVar(u32),
    #[error("constraint is unsatisfiable")]
    Unsatisfiable,
    #[error(transparent)]
    Sat(#[from] SatError),
}

pub struct Aig {
    gates: Vec<Gate>,
    strash: FxHashMap<(Lit, Lit), u32>,
    inputs: FxHashMap<u32, u32>,
    budget: usize,
    exhausted: bool,
}

impl Default for Aig {
    fn default() -> Self {
        Aig::new()
    }
}

impl Aig {
    pub fn new() -> Self {
        Aig::with_budget(DEFAULT_NODE_BUDGET)
    }

    pub fn with_budget(budget: usize) -> Self {
        Aig {
            gates: vec![Gate::Const],
            strash: FxHashMap::default(),
            inputs: FxHashMap::default(),
            budget: budget.max(1),
            exhausted: false,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn node_count(&self) -> usize {
        self.gates.len()
    }

    fn push(&mut self, g: Gate) -> Option<u32> {
        if self.gates.len() >= self.budget {
            self.exhausted = true;
            return None;
        }
        self.gates.push(g);
        Some(self.gates.len() as u32 - 1)
    }

    pub fn var(&mut self, index: u32) -> Lit {
        if let Some(&n) = self.inputs.get(&index) {
            return Lit(n << 1);
        }
        match self.push(Gate::Input(index)) {
            Some(n) => {
                self.inputs.insert(index, n);
                Lit(n << 1)
            }
            None => Lit::FALSE,
        }
    }

    /// The input variable behind a literal's node, if it is an input.
    pub fn input_index(&self, l: Lit) -> Option<u32> {
        match self.gates[l.node() as usize] {
            Gate::Input(i) => Some(i),
            _ => None,
        }
    }

    /// Operands of an AND node, if the literal's node is one.
    pub fn and_operands(&self, l: Lit) -> Option<(Lit, Lit)> {
        match self.gates[l.node() as usize] {
            Gate::And(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn not(&mut self, a: Lit) -> Lit {
        a.negate()
    }

    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        if a == Lit::FALSE || b == Lit::FALSE || a == b.negate() {
            return Lit::FALSE;
        }
        if a == Lit::TRUE || a == b {
            return b;
        }
        if b == Lit::TRUE {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&n) = self.strash.get(&key) {
            return Lit(n << 1);
        }
        match self.push(Gate::And(key.0, key.1)) {
            Some(n) => {
                self.strash.insert(key, n);
                Lit(n << 1)
            }
            None => Lit::FALSE,
        }
    }

    pub fn or(&mut self, a: Lit, b: Lit) -> Lit {
        self.and(a.negate(), b.negate()).negate()
    }

    pub fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        let both = self.and(a, b);
        let neither = self.and(a.negate(), b.negate());
        self.and(both.negate(), neither.negate())
    }

    pub fn iff(&mut self, a: Lit, b: Lit) -> Lit {
        self.xor(a, b).negate()
    }

    pub fn ite(&mut self, c: Lit, t: Lit, e: Lit) -> Lit {
        if c == Lit::TRUE || t == e {
            return t;
        }
        if c == Lit::FALSE {
            return e;
        }
        let on = self.and(c, t);
        let off = self.and(c.negate(), e);
        self.or(on, off)
    }

    /// Nodes of the cones of `roots`, ascending (children before parents).
    fn cone(&self, roots: &[Lit]) -> Vec<u32> {
        let mut seen = FxHashSet::default();
        let mut stack: Vec<u32> = roots.iter().map(|l| l.node()).collect();
        while let Some(n) = stack.pop() {
            if n == 0 || !seen.insert(n) {
                continue;
            }
            if let Gate::And(a, b) = self.gates[n as usize] {
                stack.push(a.node());
                stack.push(b.node());
            }
        }
        let mut nodes: Vec<u32> = seen.into_iter().collect();
        nodes.sort_unstable();
        nodes
    }

    /// Rebuilds `roots` with inputs replaced by `sigma`'s literals; inputs
    /// not in `sigma` stay as themselves.
    pub fn compose_partial(&mut self, roots: &[Lit], sigma: &FxHashMap<u32, Lit>) -> Vec<Lit> {
        let mut map: FxHashMap<u32, Lit> = FxHashMap::default();
        map.insert(0, Lit::FALSE);
        // node operands always have smaller indices, so one ascending pass suffices
        for n in self.cone(roots) {
            let r = match self.gates[n as usize] {
                Gate::Const => Lit::FALSE,
                Gate::Input(i) => sigma.get(&i).copied().unwrap_or(Lit(n << 1)),
                Gate::And(a, b) => {
                    let la = Lit(map[&a.node()].0 ^ (a.0 & 1));
                    let lb = Lit(map[&b.node()].0 ^ (b.0 & 1));
                    self.and(la, lb)
                }
            };
            map.insert(n, r);
        }
        roots
            .iter()
            .map(|l| Lit(map[&l.node()].0 ^ (l.0 & 1)))
            .collect()
    }

    pub fn eval(&self, l: Lit, env: &BoolEnv) -> Result<bool, AigError> {
        Ok(self.eval_many(&[l], env)?[0])
    }

    /// Evaluates several literals sharing one traversal.
    pub fn eval_many(&self, roots: &[Lit], env: &BoolEnv) -> Result<Vec<bool>, AigError> {
        let mut val: FxHashMap<u32, bool> = FxHashMap::default();
        val.insert(0, false);
        let lit = |val: &FxHashMap<u32, bool>, l: Lit| val[&l.node()] ^ l.is_negated();
        for n in self.cone(roots) {
            let v = match self.gates[n as usize] {
                Gate::Const => false,
                Gate::Input(i) => env.get(i).ok_or(AigError::MissingVar(i))?,
                Gate::And(a, b) => lit(&val, a) && lit(&val, b),
            };
            val.insert(n, v);
        }
        Ok(roots.iter().map(|&l| lit(&val, l)).collect())
    }

    /// Input variables in the cone of `l`, ascending.
    pub fn support(&self, l: Lit) -> Vec<u32> {
        let mut vars: Vec<u32> = self
            .cone(&[l])
            .into_iter()
            .filter_map(|n| match self.gates[n as usize] {
                Gate::Input(i) => Some(i),
                _ => None,
            })
            .collect();
        vars.sort_unstable();
        vars
    }

    /// Tseitin encoding of one literal. The output literal is not asserted
    /// by the returned clauses; callers conjoin it themselves.
    pub fn to_cnf(&self, root: Lit) -> (Cnf, i32) {
        if root == Lit::TRUE {
            let cnf = Cnf {
                num_vars: 1,
                ..Cnf::default()
            };
            return (cnf, 1);
        }
        let mut enc = CnfEncoder::new(self);
        let out = enc.encode(root);
        (enc.finish(), out)
    }

    /// Indices whose value is the same in every model of `constraint`.
    pub fn forced_constants(
        &self,
        constraint: Lit,
        indices: &[u32],
        conflict_budget: u64,
    ) -> Result<BTreeMap<u32, bool>, AigError> {
        let mut enc = CnfEncoder::new(self);
        let out = enc.encode(constraint);
        let cnf = enc.finish();
        let mut solver = Solver::new(&cnf, Policy::Zeros);
        let first = match solver.solve(&[out], conflict_budget)? {
            SatResult::Sat(m) => m,
            SatResult::Unsat => return Err(AigError::Unsatisfiable),
        };
        // candidates: mapped indices that agree across every model seen so far
        let mut candidates: BTreeMap<u32, (i32, bool)> = indices
            .iter()
            .filter_map(|i| {
                let v = *cnf.var_map.get(i)?;
                Some((*i, (v as i32, first[v as usize - 1])))
            })
            .collect();
        let mut forced = BTreeMap::new();
        while let Some((&i, &(v, val))) = candidates.iter().next() {
            candidates.remove(&i);
            let flip = if val { -v } else { v };
            match solver.solve(&[out, flip], conflict_budget)? {
                SatResult::Unsat => {
                    forced.insert(i, val);
                }
                SatResult::Sat(m) => {
                    candidates.retain(|_, (cv, cval)| m[*cv as usize - 1] == *cval);
                }
            }
        }
        Ok(forced)
    }
}

/// Clausal form with a map from AIG input indices to CNF variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
    pub var_map: BTreeMap<u32, u32>,
}

impl Cnf {
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for (idx, var) in &self.var_map {
            let _ = writeln!(out, "c input {idx} {var}");
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// Reads DIMACS text. `c input <index> <var>` comments restore the
    /// variable map written by [`Cnf::to_dimacs`].
    pub fn parse_dimacs(src: &str) -> Result<Cnf, String> {
        let mut cnf = Cnf::default();
        let mut declared: Option<(u32, usize)> = None;
        let mut current = Vec::new();
        for (lineno, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('c') {
                let words: Vec<&str> = rest.split_whitespace().collect();
                if let ["input", idx, var] = words[..] {
                    if let (Ok(i), Ok(v)) = (idx.parse(), var.parse()) {
                        cnf.var_map.insert(i, v);
                    }
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let words: Vec<&str> = rest.split_whitespace().collect();
                match words[..] {
                    ["cnf", v, c] => {
                        let v = v
                            .parse()
                            .map_err(|_| format!("line {}: bad header", lineno + 1))?;
                        let c = c
                            .parse()
                            .map_err(|_| format!("line {}: bad header", lineno + 1))?;
                        declared = Some((v, c));
                        cnf.num_vars = v;
                    }
                    _ => return Err(format!("line {}: bad header", lineno + 1)),
                }
                continue;
            }
            if declared.is_none() {
                return Err(format!("line {}: clause before header", lineno + 1));
            }
            for word in line.split_whitespace() {
                let l: i32 = word
                    .parse()
                    .map_err(|_| format!("line {}: bad literal {word}", lineno + 1))?;
                if l == 0 {
                    cnf.clauses.push(std::mem::take(&mut current));
                } else {
                    if l.unsigned_abs() > cnf.num_vars {
                        return Err(format!("line {}: literal {l} out of range", lineno + 1));
                    }
                    current.push(l);
                }
            }
        }
        if !current.is_empty() {
            cnf.clauses.push(current);
        }
        match declared {
            None => Err("missing header".into()),
            Some(_) => Ok(cnf),
        }
    }
}

/// Incremental Tseitin encoder: one fresh variable and three clauses per
/// AND gate, shared across every literal encoded with the same encoder.
pub struct CnfEncoder<'a> {
    aig: &'a Aig,
    cnf: Cnf,
    node_var: FxHashMap<u32, u32>,
    const_var: Option<u32>,
}

impl<'a> CnfEncoder<'a> {
    pub fn new(aig: &'a Aig) -> Self {
        CnfEncoder {
            aig,
            cnf: Cnf::default(),
            node_var: FxHashMap::default(),
            const_var: None,
        }
    }

    fn fresh(&mut self) -> u32 {
        self.cnf.num_vars += 1;
        self.cnf.num_vars
    }

    fn lit_of(&self, l: Lit) -> i32 {
        let v = self.node_var[&l.node()] as i32;
        if l.is_negated() {
            -v
        } else {
            v
        }
    }

    /// Returns the CNF literal equivalent to `root`, adding clauses for its cone.
    pub fn encode(&mut self, root: Lit) -> i32 {
        if root.is_const() {
            let v = match self.const_var {
                Some(v) => v,
                None => {
                    let v = self.fresh();
                    self.const_var = Some(v);
                    self.cnf.clauses.push(vec![v as i32]);
                    v
                }
            };
            return if root == Lit::TRUE {
                v as i32
            } else {
                -(v as i32)
            };
        }
        let nodes = self.aig.cone(&[root]);
        for n in nodes {
            if self.node_var.contains_key(&n) {
                continue;
            }
            let v = self.fresh();
            self.node_var.insert(n, v);
            match self.aig.gates[n as usize] {
                Gate::Const => unreachable!("constant inside a cone"),
                Gate::Input(i) => {
                    self.cnf.var_map.insert(i, v);
                }
                Gate::And(a, b) => {
                    let (x, la, lb) = (v as i32, self.lit_of(a), self.lit_of(b));
                    self.cnf.clauses.push(vec![-x, la]);
                    self.cnf.clauses.push(vec![-x, lb]);
                    self.cnf.clauses.push(vec![x, -la, -lb]);
                }
            }
        }
        self.lit_of(root)
    }

    pub fn finish(self) -> Cnf {
        self.cnf
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::solve;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct recursive evaluation oracle, independent of the AIG.
    #[derive(Clone, Debug)]
    enum F {
        Var(u32),
        Not(Box<F>),
        And(Box<F>, Box<F>),
        Or(Box<F>, Box<F>),
        Xor(Box<F>, Box<F>),
        Ite(Box<F>, Box<F>, Box<F>),
    }

    impl F {
        fn eval(&self, m: u64) -> bool {
            match self {
                F::Var(i) => (m >> i) & 1 == 1,
                F::Not(a) => !a.eval(m),
                F::And(a, b) => a.eval(m) && b.eval(m),
                F::Or(a, b) => a.eval(m) || b.eval(m),
                F::Xor(a, b) => a.eval(m) ^ b.eval(m),
                F::Ite(c, t, e) => {
                    if c.eval(m) {
                        t.eval(m)
                    } else {
                        e.eval(m)
                    }
                }
            }
        }

        fn build(&self, g: &mut Aig) -> Lit {
            match self {
                F::Var(i) => g.var(*i),
                F::Not(a) => {
                    let a = a.build(g);
                    g.not(a)
                }
                F::And(a, b) => {
                    let (a, b) = (a.build(g), b.build(g));
                    g.and(a, b)
                }
                F::Or(a, b) => {
                    let (a, b) = (a.build(g), b.build(g));
                    g.or(a, b)
                }
                F::Xor(a, b) => {
                    let (a, b) = (a.build(g), b.build(g));
                    g.xor(a, b)
                }
                F::Ite(c, t, e) => {
                    let (c, t, e) = (c.build(g), t.build(g), e.build(g));
                    g.ite(c, t, e)
                }
            }
        }

        fn random(rng: &mut ChaCha8Rng, nvars: u32, depth: u32) -> F {
            if depth == 0 || rng.gen_ratio(1, 5) {
                return F::Var(rng.gen_range(0..nvars));
            }
            let op = rng.gen_range(0..5);
            let mut sub = || Box::new(F::random(rng, nvars, depth - 1));
            match op {
                0 => F::Not(sub()),
                1 => F::And(sub(), sub()),
                2 => F::Or(sub(), sub()),
                3 => F::Xor(sub(), sub()),
                _ => F::Ite(sub(), sub(), sub()),
            }
        }
    }

    #[test]
    fn substitution_matches_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let mut g = Aig::new();
            let f = F::random(&mut rng, 5, 5).build(&mut g);
            // vars 0..2 become constants, var 3 becomes !var4
            let c0 = rng.gen::<bool>();
            let c1 = rng.gen::<bool>();
            let v4 = g.var(4);
            let mut sigma = FxHashMap::default();
            sigma.insert(0, Lit(c0 as u32));
            sigma.insert(1, Lit(c1 as u32));
            sigma.insert(3, g.not(v4));
            let h = g.compose_partial(&[f], &sigma)[0];
            for m in 0..32u64 {
                let mut inner = m & !0b1011;
                inner |= c0 as u64 | (c1 as u64) << 1;
                inner |= (((m >> 4) & 1) ^ 1) << 3;
                let env = BoolEnv::from_mask(m, 5);
                assert_eq!(g.eval(h, &env).unwrap(), f_eval(&g, f, inner));
            }
        }
    }

    fn f_eval(g: &Aig, l: Lit, m: u64) -> bool {
        g.eval(l, &BoolEnv::from_mask(m, 5)).unwrap()
    }

    #[test]
    fn local_simplifications() {
        let mut g = Aig::new();
        let x = g.var(0);
        assert_eq!(g.and(x, Lit::TRUE), x);
        assert_eq!(g.and(x, Lit::FALSE), Lit::FALSE);
        assert_eq!(g.and(x, x), x);
        let nx = g.not(x);
        assert_eq!(g.and(x, nx), Lit::FALSE);
        assert_eq!(g.not(nx), x);
        let y = g.var(1);
        let a = g.xor(x, y);
        let na = g.not(a);
        assert_eq!(g.not(na), a);
        assert_eq!(g.xor(x, y), a);
    }

    #[test]
    fn equivalent_builds_need_not_share_nodes() {
        let mut g = Aig::new();
        let x = g.var(0);
        let y = g.var(1);
        let z = g.var(2);
        // x & (y | z) versus (x & y) | (x & z)
        let yz = g.or(y, z);
        let lhs = g.and(x, yz);
        let xy = g.and(x, y);
        let xz = g.and(x, z);
        let rhs = g.or(xy, xz);
        assert_ne!(lhs, rhs);
        for m in 0..8 {
            let env = BoolEnv::from_mask(m, 3);
            assert_eq!(g.eval(lhs, &env).unwrap(), g.eval(rhs, &env).unwrap());
        }
    }

    #[test]
    fn eval_examples() {
        let mut g = Aig::new();
        assert!(g.eval(Lit::TRUE, &BoolEnv::new()).unwrap());
        let b0 = g.var(0);
        let b1 = g.var(1);
        let nb1 = g.not(b1);
        let f = g.and(b0, nb1);
        assert!(g
            .eval(f, &BoolEnv::from_pairs([(0, true), (1, false)]))
            .unwrap());
        assert_eq!(
            g.eval(f, &BoolEnv::from_pairs([(0, true)])),
            Err(AigError::MissingVar(1))
        );
    }

    #[test]
    fn random_builds_match_oracle_and_stay_simplified() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut g = Aig::new();
        for _ in 0..60 {
            let f = F::random(&mut rng, 8, 6);
            let l = f.build(&mut g);
            for m in 0..256 {
                assert_eq!(g.eval(l, &BoolEnv::from_mask(m, 8)).unwrap(), f.eval(m));
            }
        }
        for gate in &g.gates {
            if let Gate::And(a, b) = *gate {
                assert!(!a.is_const() && !b.is_const());
                assert!(a != b && a != b.negate());
            }
        }
    }

    #[test]
    fn cnf_examples() {
        let mut g = Aig::new();
        let (cnf, out) = g.to_cnf(Lit::TRUE);
        assert!(cnf.clauses.is_empty());
        assert!(matches!(
            solve(&cnf, &[out], 100).unwrap(),
            SatResult::Sat(_)
        ));
        let (cnf, out) = g.to_cnf(Lit::FALSE);
        assert_eq!(solve(&cnf, &[out], 100).unwrap(), SatResult::Unsat);

        let b0 = g.var(0);
        let (cnf, out) = g.to_cnf(b0);
        assert_eq!(cnf.num_vars, 1);
        assert_eq!(out, cnf.var_map[&0] as i32);

        let b1 = g.var(1);
        let both = g.and(b0, b1);
        let (cnf, out) = g.to_cnf(both);
        assert_eq!(cnf.num_vars, 3);
        assert_eq!(cnf.clauses.len(), 3);
        // enumerate every model of the CNF with the output asserted
        let mut models = 0;
        for m in 0u32..8 {
            let val = |l: i32| ((m >> (l.unsigned_abs() - 1)) & 1 == 1) == (l > 0);
            if val(out) && cnf.clauses.iter().all(|c| c.iter().any(|&l| val(l))) {
                models += 1;
                assert!(val(cnf.var_map[&0] as i32) && val(cnf.var_map[&1] as i32));
            }
        }
        assert_eq!(models, 1);
    }

    #[test]
    fn cnf_is_equisatisfiable() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut g = Aig::new();
        for _ in 0..200 {
            let f = F::random(&mut rng, 6, 5);
            let l = f.build(&mut g);
            let expected = (0..64).any(|m| f.eval(m));
            let (cnf, out) = g.to_cnf(l);
            match solve(&cnf, &[out], 10_000).unwrap() {
                SatResult::Sat(model) => {
                    assert!(expected);
                    let env = BoolEnv::from_pairs((0..6).map(|i| {
                        (
                            i,
                            cnf.var_map.get(&i).is_some_and(|&v| model[v as usize - 1]),
                        )
                    }));
                    assert!(g.eval(l, &env).unwrap());
                }
                SatResult::Unsat => assert!(!expected),
            }
        }
    }

    #[test]
    fn dimacs_roundtrip() {
        let mut g = Aig::new();
        let b0 = g.var(0);
        let b2 = g.var(2);
        let x = g.xor(b0, b2);
        let (cnf, _) = g.to_cnf(x);
        let text = cnf.to_dimacs();
        assert!(text.contains(&format!("p cnf {} {}", cnf.num_vars, cnf.clauses.len())));
        assert_eq!(Cnf::parse_dimacs(&text).unwrap(), cnf);
        assert!(Cnf::parse_dimacs("1 2 0").is_err());
        assert!(Cnf::parse_dimacs("p cnf 1 1\n2 0").is_err());
    }

    #[test]
    fn forced_constant_examples() {
        let mut g = Aig::new();
        let b3 = g.var(3);
        assert_eq!(
            g.forced_constants(b3, &[3], 1000).unwrap(),
            BTreeMap::from([(3, true)])
        );
        let b0 = g.var(0);
        let b1 = g.var(1);
        let or = g.or(b0, b1);
        assert!(g.forced_constants(or, &[0, 1], 1000).unwrap().is_empty());
        let eq = g.iff(b1, b0);
        let c = g.and(b0, eq);
        assert_eq!(
            g.forced_constants(c, &[0, 1], 1000).unwrap(),
            BTreeMap::from([(0, true), (1, true)])
        );
        assert_eq!(
            g.forced_constants(Lit::FALSE, &[0], 1000),
            Err(AigError::Unsatisfiable)
        );
    }

    #[test]
    fn forced_constants_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut g = Aig::new();
        let mut done = 0;
        while done < 50 {
            let f = F::random(&mut rng, 5, 5);
            let sats: Vec<u64> = (0..32).filter(|&m| f.eval(m)).collect();
            if sats.is_empty() {
                continue;
            }
            let l = f.build(&mut g);
            let forced = g.forced_constants(l, &[0, 1, 2, 3, 4], 10_000).unwrap();
            for i in 0..5 {
                let vals: FxHashSet<bool> = sats.iter().map(|m| (m >> i) & 1 == 1).collect();
                let expect = (vals.len() == 1).then(|| *vals.iter().next().unwrap());
                assert_eq!(forced.get(&i).copied(), expect, "index {i} of {f:?}");
            }
            done += 1;
        }
    }
}
