// SPDX-License-Identifier: Apache-2.0

//! Hash-consed reduced ordered BDDs.
//!
//! Smaller variable indices sit closer to the root. There are no complement
//! edges, so two nodes denote the same function exactly when they are the
//! same stored node.

use std::collections::HashMap;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::boolenv::{BoolEnv, Policy};

/// Default cap on stored nodes before the manager reports exhaustion.
pub const DEFAULT_NODE_BUDGET: usize = 50_000_000;

/// Handle to a node in one [`Bdd`] manager.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node(pub u32);

impl Node {
    pub const FALSE: Node = Node(0);
    pub const TRUE: Node = Node(1);

    pub fn is_const(self) -> bool {
        self.0 < 2
    }
}

const TERMINAL_VAR: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct NodeData {
    var: u32,
    lo: u32,
    hi: u32,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BddError {
    #[error("no value for variable {0}")]
    MissingVar(u32),
    #[error("constraint is unsatisfiable")]
    Unsatisfiable,
    #[error("variable {0} of the constraint is not among the parametrized indices")]
    UncoveredVar(u32),
}

pub struct Bdd {
    nodes: Vec<NodeData>,
    unique: FxHashMap<NodeData, u32>,
    ite_cache: FxHashMap<(u32, u32, u32), u32>,
    budget: usize,
    exhausted: bool,
}

impl Default for Bdd {
    fn default() -> Self {
        Bdd::new()
    }
}

impl Bdd {
    pub fn new() -> Self {
        Bdd::with_budget(DEFAULT_NODE_BUDGET)
    }

    pub fn with_budget(budget: usize) -> Self {
        let terminal = |v| NodeData {
            var: TERMINAL_VAR,
            lo: v,
            hi: v,
        };
        Bdd {
            nodes: vec![terminal(0), terminal(1)],
            unique: FxHashMap::default(),
            ite_cache: FxHashMap::default(),
            budget: budget.max(2),
            exhausted: false,
        }
    }

    /// True once the node budget has been hit. Results computed after that
    /// point are meaningless and must be discarded by the caller.
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn constant(&self, b: bool) -> Node {
        if b {
            Node::TRUE
        } else {
            Node::FALSE
        }
    }

    pub fn var_of(&self, n: Node) -> Option<u32> {
        let v = self.nodes[n.0 as usize].var;
        (v != TERMINAL_VAR).then_some(v)
    }

    /// `(lo, hi)` cofactors of an internal node.
    pub fn children(&self, n: Node) -> Option<(Node, Node)> {
        let d = self.nodes[n.0 as usize];
        (d.var != TERMINAL_VAR).then_some((Node(d.lo), Node(d.hi)))
    }

    fn top(&self, n: u32) -> u32 {
        self.nodes[n as usize].var
    }

    fn mk(&mut self, var: u32, lo: u32, hi: u32) -> u32 {
        if lo == hi {
            return lo;
        }
        let key = NodeData { var, lo, hi };
        if let Some(&id) = self.unique.get(&key) {
            return id;
        }
        if self.nodes.len() >= self.budget {
            self.exhausted = true;
            return 0;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(key);
        self.unique.insert(key, id);
        id
    }

    pub fn var(&mut self, index: u32) -> Node {
        assert!(index != TERMINAL_VAR, "variable index out of range");
        Node(self.mk(index, 0, 1))
    }

    fn cofactors(&self, n: u32, v: u32) -> (u32, u32) {
        let d = self.nodes[n as usize];
        if d.var == v {
            (d.lo, d.hi)
        } else {
            (n, n)
        }
    }

    pub fn ite(&mut self, f: Node, g: Node, h: Node) -> Node {
        Node(self.ite_rec(f.0, g.0, h.0))
    }

    fn ite_rec(&mut self, f: u32, mut g: u32, mut h: u32) -> u32 {
        if f == 1 {
            return g;
        }
        if f == 0 {
            return h;
        }
        if g == f {
            g = 1;
        }
        if h == f {
            h = 0;
        }
        if g == h {
            return g;
        }
        if g == 1 && h == 0 {
            return f;
        }
        if let Some(&r) = self.ite_cache.get(&(f, g, h)) {
            return r;
        }
        let v = self.top(f).min(self.top(g)).min(self.top(h));
        let (f0, f1) = self.cofactors(f, v);
        let (g0, g1) = self.cofactors(g, v);
        let (h0, h1) = self.cofactors(h, v);
        let hi = self.ite_rec(f1, g1, h1);
        let lo = self.ite_rec(f0, g0, h0);
        let r = self.mk(v, lo, hi);
        if !self.exhausted {
            self.ite_cache.insert((f, g, h), r);
        }
        r
    }

    pub fn not(&mut self, f: Node) -> Node {
        self.ite(f, Node::FALSE, Node::TRUE)
    }

    pub fn and(&mut self, f: Node, g: Node) -> Node {
        self.ite(f, g, Node::FALSE)
    }

    pub fn or(&mut self, f: Node, g: Node) -> Node {
        self.ite(f, Node::TRUE, g)
    }

    pub fn xor(&mut self, f: Node, g: Node) -> Node {
        let ng = self.not(g);
        self.ite(f, ng, g)
    }

    pub fn iff(&mut self, f: Node, g: Node) -> Node {
        let ng = self.not(g);
        self.ite(f, g, ng)
    }

    pub fn eval(&self, n: Node, env: &BoolEnv) -> Result<bool, BddError> {
        let mut cur = n.0;
        while cur > 1 {
            let d = self.nodes[cur as usize];
            cur = match env.get(d.var) {
                Some(true) => d.hi,
                Some(false) => d.lo,
                None => return Err(BddError::MissingVar(d.var)),
            };
        }
        Ok(cur == 1)
    }

    /// Variables the function depends on, ascending.
    pub fn support(&self, n: Node) -> Vec<u32> {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut vars = std::collections::BTreeSet::new();
        let mut stack = vec![n.0];
        while let Some(c) = stack.pop() {
            if c <= 1 || !seen.insert(c) {
                continue;
            }
            let d = self.nodes[c as usize];
            vars.insert(d.var);
            stack.push(d.lo);
            stack.push(d.hi);
        }
        vars.into_iter().collect()
    }

    /// Number of stored nodes reachable from `n`, terminals included.
    pub fn dag_size(&self, n: Node) -> usize {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack = vec![n.0];
        while let Some(c) = stack.pop() {
            if !seen.insert(c) || c <= 1 {
                continue;
            }
            let d = self.nodes[c as usize];
            stack.push(d.lo);
            stack.push(d.hi);
        }
        seen.len()
    }

    /// Cofactor with respect to one variable.
    pub fn restrict(&mut self, n: Node, var: u32, value: bool) -> Node {
        let mut memo = FxHashMap::default();
        Node(self.restrict_rec(n.0, var, value, &mut memo))
    }

    fn restrict_rec(
        &mut self,
        n: u32,
        var: u32,
        value: bool,
        memo: &mut FxHashMap<u32, u32>,
    ) -> u32 {
        let d = self.nodes[n as usize];
        if d.var == TERMINAL_VAR || d.var > var {
            return n;
        }
        if d.var == var {
            return if value { d.hi } else { d.lo };
        }
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let lo = self.restrict_rec(d.lo, var, value, memo);
        let hi = self.restrict_rec(d.hi, var, value, memo);
        let r = self.mk(d.var, lo, hi);
        memo.insert(n, r);
        r
    }

    /// Existential quantification over a set of variables.
    pub fn exists(&mut self, n: Node, vars: &[u32]) -> Node {
        if vars.is_empty() {
            return n;
        }
        let mut sorted = vars.to_vec();
        sorted.sort_unstable();
        let mut memo = FxHashMap::default();
        Node(self.exists_rec(n.0, &sorted, &mut memo))
    }

    fn exists_rec(&mut self, n: u32, vars: &[u32], memo: &mut FxHashMap<u32, u32>) -> u32 {
        let d = self.nodes[n as usize];
        if d.var == TERMINAL_VAR || d.var > *vars.last().unwrap() {
            return n;
        }
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let lo = self.exists_rec(d.lo, vars, memo);
        let hi = self.exists_rec(d.hi, vars, memo);
        let r = if vars.binary_search(&d.var).is_ok() {
            self.ite_rec(lo, 1, hi)
        } else {
            self.mk(d.var, lo, hi)
        };
        memo.insert(n, r);
        r
    }

    /// Simultaneous substitution; every support variable must be mapped.
    pub fn compose(&mut self, n: Node, sigma: &HashMap<u32, Node>) -> Result<Node, BddError> {
        if let Some(v) = self.support(n).into_iter().find(|v| !sigma.contains_key(v)) {
            return Err(BddError::MissingVar(v));
        }
        Ok(self.compose_partial(n, sigma))
    }

    /// Simultaneous substitution; unmapped variables stay as themselves.
    pub fn compose_partial(&mut self, n: Node, sigma: &HashMap<u32, Node>) -> Node {
        let mut memo = FxHashMap::default();
        Node(self.compose_rec(n.0, sigma, &mut memo))
    }

    fn compose_rec(
        &mut self,
        n: u32,
        sigma: &HashMap<u32, Node>,
        memo: &mut FxHashMap<u32, u32>,
    ) -> u32 {
        if n <= 1 {
            return n;
        }
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let d = self.nodes[n as usize];
        let lo = self.compose_rec(d.lo, sigma, memo);
        let hi = self.compose_rec(d.hi, sigma, memo);
        let test = match sigma.get(&d.var) {
            Some(s) => s.0,
            None => self.mk(d.var, 0, 1),
        };
        let r = self.ite_rec(test, hi, lo);
        memo.insert(n, r);
        r
    }

    /// A satisfying assignment chosen by `policy`, or `None` for `FALSE`.
    ///
    /// Every variable from 0 through `max(upto, top support variable)` is
    /// assigned. With [`Policy::Zeros`] the result is the lexicographically
    /// least satisfying assignment reading variables in increasing index
    /// order; with [`Policy::Ones`] the greatest.
    pub fn witness(&self, n: Node, policy: Policy, upto: Option<u32>) -> Option<BoolEnv> {
        if n == Node::FALSE {
            return None;
        }
        let mut chooser = policy.chooser();
        let mut env = BoolEnv::new();
        let mut next = 0u32;
        let mut cur = n.0;
        while cur != 1 {
            let d = self.nodes[cur as usize];
            for u in next..d.var {
                env.set(u, chooser.next_pref());
            }
            let pref = chooser.next_pref();
            let (want, other) = if pref { (d.hi, d.lo) } else { (d.lo, d.hi) };
            if want != 0 {
                env.set(d.var, pref);
                cur = want;
            } else {
                env.set(d.var, !pref);
                cur = other;
            }
            next = d.var + 1;
        }
        let last = upto
            .into_iter()
            .chain(self.support(n).last().copied())
            .max();
        if let Some(last) = last {
            for u in next..=last {
                env.set(u, chooser.next_pref());
            }
        }
        Some(env)
    }

    /// Parametrizes a satisfiable constraint over `indices`.
    ///
    /// Returns a substitution whose image, over all assignments of its own
    /// variables, is exactly the set of satisfying assignments of
    /// `constraint` restricted to `indices`. Variables are fixed one at a
    /// time in index order: a variable becomes a constant when the earlier
    /// choices force it, and stays a free parameter otherwise.
    pub fn parametrize(
        &mut self,
        constraint: Node,
        indices: &[u32],
    ) -> Result<Vec<(u32, Node)>, BddError> {
        if constraint == Node::FALSE {
            return Err(BddError::Unsatisfiable);
        }
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if let Some(v) = self
            .support(constraint)
            .into_iter()
            .find(|v| idx.binary_search(v).is_err())
        {
            return Err(BddError::UncoveredVar(v));
        }
        let mut remaining = constraint;
        let mut sigma = Vec::with_capacity(idx.len());
        for (k, &v) in idx.iter().enumerate() {
            let p = self.var(v);
            if !self.support(remaining).contains(&v) {
                sigma.push((v, p));
                continue;
            }
            let later = &idx[k + 1..];
            let r0 = self.restrict(remaining, v, false);
            let r1 = self.restrict(remaining, v, true);
            let can0 = self.exists(r0, later);
            let can1 = self.exists(r1, later);
            let forced_one = self.not(can0);
            let free = self.and(can1, p);
            let s = self.or(forced_one, free);
            sigma.push((v, s));
            remaining = self.ite(s, r1, r0);
        }
        Ok(sigma)
    }

    /// Checks ordering, reducedness, and uniqueness of every stored node.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut seen = FxHashMap::default();
        for (i, d) in self.nodes.iter().enumerate().skip(2) {
            if d.lo == d.hi {
                return Err(format!("node {i} is redundant"));
            }
            for child in [d.lo, d.hi] {
                if child as usize >= i {
                    return Err(format!("node {i} has a forward child"));
                }
                if self.nodes[child as usize].var <= d.var {
                    return Err(format!("node {i} violates the variable order"));
                }
            }
            if seen.insert(*d, i).is_some() {
                return Err(format!("node {i} is duplicated"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent formula oracle: evaluated directly, never through the BDD.
    #[derive(Clone, Debug)]
    enum F {
        Var(u32),
        Not(Box<F>),
        And(Box<F>, Box<F>),
        Or(Box<F>, Box<F>),
        Xor(Box<F>, Box<F>),
    }

    impl F {
        fn eval(&self, env: u64) -> bool {
            match self {
                F::Var(i) => (env >> i) & 1 == 1,
                F::Not(a) => !a.eval(env),
                F::And(a, b) => a.eval(env) && b.eval(env),
                F::Or(a, b) => a.eval(env) || b.eval(env),
                F::Xor(a, b) => a.eval(env) ^ b.eval(env),
            }
        }

        fn build(&self, bdd: &mut Bdd) -> Node {
            match self {
                F::Var(i) => bdd.var(*i),
                F::Not(a) => {
                    let a = a.build(bdd);
                    bdd.not(a)
                }
                F::And(a, b) => {
                    let (a, b) = (a.build(bdd), b.build(bdd));
                    bdd.and(a, b)
                }
                F::Or(a, b) => {
                    let (a, b) = (a.build(bdd), b.build(bdd));
                    bdd.or(a, b)
                }
                F::Xor(a, b) => {
                    let (a, b) = (a.build(bdd), b.build(bdd));
                    bdd.xor(a, b)
                }
            }
        }

        fn random(rng: &mut ChaCha8Rng, nvars: u32, depth: u32) -> F {
            if depth == 0 || rng.gen_ratio(1, 4) {
                return F::Var(rng.gen_range(0..nvars));
            }
            let a = Box::new(F::random(rng, nvars, depth - 1));
            match rng.gen_range(0..4) {
                0 => F::Not(a),
                1 => F::And(a, Box::new(F::random(rng, nvars, depth - 1))),
                2 => F::Or(a, Box::new(F::random(rng, nvars, depth - 1))),
                _ => F::Xor(a, Box::new(F::random(rng, nvars, depth - 1))),
            }
        }
    }

    fn env_of(mask: u64, n: u32) -> BoolEnv {
        BoolEnv::from_mask(mask, n)
    }

    #[test]
    fn variables_are_hash_consed() {
        let mut bdd = Bdd::new();
        let a = bdd.var(0);
        assert_eq!(a, bdd.var(0));
        assert!(bdd.eval(a, &BoolEnv::from_pairs([(0, true)])).unwrap());
        let d = bdd.var(3);
        assert!(!bdd.eval(d, &BoolEnv::from_pairs([(3, false)])).unwrap());
        assert_eq!(bdd.ite(a, Node::TRUE, Node::FALSE), a);
    }

    #[test]
    fn simple_identities() {
        let mut bdd = Bdd::new();
        let x = bdd.var(0);
        let y = bdd.var(1);
        let nx = bdd.not(x);
        assert_eq!(bdd.and(x, nx), Node::FALSE);
        let ny = bdd.not(y);
        let a = bdd.and(x, y);
        let b = bdd.and(x, ny);
        assert_eq!(bdd.or(a, b), x);
        let z = bdd.xor(x, y);
        assert!(!bdd.eval(z, &env_of(0b11, 2)).unwrap());
        assert!(bdd.eval(Node::TRUE, &BoolEnv::new()).unwrap());
    }

    #[test]
    fn eval_reports_missing_vars() {
        let mut bdd = Bdd::new();
        let x = bdd.var(4);
        assert_eq!(bdd.eval(x, &BoolEnv::new()), Err(BddError::MissingVar(4)));
    }

    #[test]
    fn random_nodes_agree_with_truth_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut bdd = Bdd::new();
        for _ in 0..50 {
            let f = F::random(&mut rng, 8, 6);
            let n = f.build(&mut bdd);
            for mask in 0..256 {
                assert_eq!(bdd.eval(n, &env_of(mask, 8)).unwrap(), f.eval(mask));
            }
        }
        bdd.check_invariants().unwrap();
    }

    #[test]
    fn canonicity_on_small_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut bdd = Bdd::new();
        let fs: Vec<(F, Node)> = (0..60)
            .map(|_| {
                let f = F::random(&mut rng, 4, 4);
                let n = f.build(&mut bdd);
                (f, n)
            })
            .collect();
        for (fa, na) in &fs {
            for (fb, nb) in &fs {
                let same = (0..16).all(|m| fa.eval(m) == fb.eval(m));
                assert_eq!(same, na == nb);
            }
        }
    }

    #[test]
    fn witness_policies() {
        let mut bdd = Bdd::new();
        assert_eq!(bdd.witness(Node::FALSE, Policy::Zeros, None), None);
        let b3 = bdd.var(3);
        let w = bdd.witness(b3, Policy::Zeros, None).unwrap();
        assert_eq!(
            w,
            BoolEnv::from_pairs([(0, false), (1, false), (2, false), (3, true)])
        );
        let b0 = bdd.var(0);
        let b1 = bdd.var(1);
        let or = bdd.or(b0, b1);
        let w = bdd.witness(or, Policy::Ones, None).unwrap();
        assert_eq!(w, BoolEnv::from_pairs([(0, true), (1, true)]));
        let w = bdd.witness(or, Policy::Zeros, Some(2)).unwrap();
        assert_eq!(w, BoolEnv::from_pairs([(0, false), (1, true), (2, false)]));
    }

    #[test]
    fn witnesses_are_lexicographic_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut bdd = Bdd::new();
        for _ in 0..100 {
            let f = F::random(&mut rng, 6, 5);
            let n = f.build(&mut bdd);
            // variable 0 is the most significant position of the order
            let key = |m: u64| (0..6).fold(0u64, |acc, i| (acc << 1) | ((m >> i) & 1));
            let sats: Vec<u64> = (0..64).filter(|&m| f.eval(m)).collect();
            let least = sats.iter().copied().min_by_key(|&m| key(m));
            let greatest = sats.iter().copied().max_by_key(|&m| key(m));
            let to_mask =
                |e: BoolEnv| (0..6).fold(0u64, |acc, i| acc | ((e.get(i).unwrap() as u64) << i));
            assert_eq!(bdd.witness(n, Policy::Zeros, Some(5)).map(to_mask), least);
            assert_eq!(bdd.witness(n, Policy::Ones, Some(5)).map(to_mask), greatest);
            if let Some(w) = bdd.witness(n, Policy::Random(9), Some(5)) {
                assert!(bdd.eval(n, &w).unwrap());
            }
        }
    }

    #[test]
    fn compose_examples() {
        let mut bdd = Bdd::new();
        let b0 = bdd.var(0);
        let b1 = bdd.var(1);
        let sigma = HashMap::from([(0, Node::TRUE)]);
        assert_eq!(bdd.compose(b0, &sigma).unwrap(), Node::TRUE);
        let and = bdd.and(b0, b1);
        let id = HashMap::from([(0, b0), (1, b1)]);
        assert_eq!(bdd.compose(and, &id).unwrap(), and);
        assert_eq!(bdd.compose(and, &sigma), Err(BddError::MissingVar(1)));
    }

    #[test]
    fn composition_law_is_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut bdd = Bdd::new();
        for _ in 0..30 {
            let f = F::random(&mut rng, 6, 5);
            let subs: Vec<F> = (0..6).map(|_| F::random(&mut rng, 6, 3)).collect();
            let n = f.build(&mut bdd);
            let sigma: HashMap<u32, Node> = (0..6)
                .map(|i| (i as u32, subs[i].build(&mut bdd)))
                .collect();
            let c = bdd.compose(n, &sigma).unwrap();
            for m in 0..64 {
                let inner = (0..6).fold(0u64, |acc, i| acc | ((subs[i].eval(m) as u64) << i));
                assert_eq!(bdd.eval(c, &env_of(m, 6)).unwrap(), f.eval(inner));
            }
        }
    }

    fn image(bdd: &Bdd, sigma: &[(u32, Node)], n: u32) -> std::collections::BTreeSet<u64> {
        (0..1u64 << n)
            .map(|m| {
                let env = env_of(m, n);
                sigma.iter().fold(0u64, |acc, (i, s)| {
                    acc | ((bdd.eval(*s, &env).unwrap() as u64) << i)
                })
            })
            .collect()
    }

    #[test]
    fn parametrize_examples() {
        let mut bdd = Bdd::new();
        let b0 = bdd.var(0);
        let b1 = bdd.var(1);
        let id = bdd.parametrize(Node::TRUE, &[0, 1]).unwrap();
        assert_eq!(id, vec![(0, b0), (1, b1)]);
        let forced = bdd.parametrize(b0, &[0]).unwrap();
        assert_eq!(forced, vec![(0, Node::TRUE)]);
        let or = bdd.or(b0, b1);
        let sigma = bdd.parametrize(or, &[0, 1]).unwrap();
        let expected: std::collections::BTreeSet<u64> = [0b01, 0b10, 0b11].into();
        assert_eq!(image(&bdd, &sigma, 2), expected);
        assert_eq!(
            bdd.parametrize(Node::FALSE, &[0]),
            Err(BddError::Unsatisfiable)
        );
        assert_eq!(bdd.parametrize(or, &[0]), Err(BddError::UncoveredVar(1)));
    }

    #[test]
    fn parametrize_image_matches_satisfying_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut bdd = Bdd::new();
        let mut checked = 0;
        while checked < 40 {
            let f = F::random(&mut rng, 7, 6);
            let n = f.build(&mut bdd);
            if n == Node::FALSE {
                continue;
            }
            let sigma = bdd.parametrize(n, &(0..7).collect::<Vec<_>>()).unwrap();
            let sat: std::collections::BTreeSet<u64> = (0..128).filter(|&m| f.eval(m)).collect();
            assert_eq!(image(&bdd, &sigma, 7), sat);
            checked += 1;
        }
    }

    #[test]
    fn budget_exhaustion_is_sticky() {
        let mut bdd = Bdd::with_budget(8);
        let mut acc = Node::FALSE;
        for i in 0..20 {
            let v = bdd.var(i);
            acc = bdd.xor(acc, v);
        }
        assert!(bdd.is_exhausted());
        assert!(bdd.node_count() <= 8);
    }
}
