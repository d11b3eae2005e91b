// SPDX-License-Identifier: Apache-2.0

use num_bigint::BigInt;
use proptest::prelude::*;

use blastproof::counterparts::{apply_counterpart, Ctx};
use blastproof::interp::{Interp, InterpConfig};
use blastproof::lang::eval::{eval_concrete, StepBudget};
use blastproof::lang::sexp::read_one;
use blastproof::lang::{parse_term, sym, FunDef};
use blastproof::symobj::{merge_ite, sym_eval};
use blastproof::{Bit, BoolEnv, DefEnv, Engine, Mode, SymObj, Term, Value};

#[derive(Clone, Debug)]
enum Formula {
    Var(u32),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    Ite(Box<Formula>, Box<Formula>, Box<Formula>),
}

const NVARS: u32 = 6;

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = (0..NVARS).prop_map(Formula::Var);
    leaf.prop_recursive(6, 64, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Formula::Not(Box::new(a))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Or(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::Xor(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone(), inner).prop_map(|(a, b, c)| Formula::Ite(
                Box::new(a),
                Box::new(b),
                Box::new(c)
            )),
        ]
    })
}

fn eval(f: &Formula, m: u64) -> bool {
    match f {
        Formula::Var(v) => m >> v & 1 == 1,
        Formula::Not(a) => !eval(a, m),
        Formula::And(a, b) => eval(a, m) && eval(b, m),
        Formula::Or(a, b) => eval(a, m) || eval(b, m),
        Formula::Xor(a, b) => eval(a, m) != eval(b, m),
        Formula::Ite(c, t, e) => {
            if eval(c, m) {
                eval(t, m)
            } else {
                eval(e, m)
            }
        }
    }
}

fn build(eng: &mut Engine, f: &Formula) -> Bit {
    match f {
        Formula::Var(v) => eng.var(*v),
        Formula::Not(a) => {
            let a = build(eng, a);
            eng.not(a)
        }
        Formula::And(a, b) => {
            let (a, b) = (build(eng, a), build(eng, b));
            eng.and(a, b)
        }
        Formula::Or(a, b) => {
            let (a, b) = (build(eng, a), build(eng, b));
            eng.or(a, b)
        }
        Formula::Xor(a, b) => {
            let (a, b) = (build(eng, a), build(eng, b));
            eng.xor(a, b)
        }
        Formula::Ite(c, t, e) => {
            let (c, t, e) = (build(eng, c), build(eng, t), build(eng, e));
            eng.ite(c, t, e)
        }
    }
}

/// Assignment giving the `width`-bit number on variables `first..` the value `v`.
fn assign(env: &mut BoolEnv, first: u32, width: u32, v: i64) {
    for i in 0..width {
        env.set(first + i, v >> i & 1 == 1);
    }
}

fn number(eng: &mut Engine, first: u32, width: u32) -> SymObj {
    SymObj::number((first..first + width).map(|i| eng.var(i)).collect())
}

fn term(src: &str) -> Term {
    parse_term(&read_one(src).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn engines_agree_with_direct_evaluation(f in formula(), m in 0u64..1 << NVARS) {
        let env = BoolEnv::from_mask(m, NVARS);
        for mode in [Mode::Bdd, Mode::Aig] {
            let mut eng = Engine::new(mode, 1_000_000);
            let b = build(&mut eng, &f);
            prop_assert_eq!(eng.eval(b, &env).unwrap(), eval(&f, m));
        }
    }

    #[test]
    fn validity_matches_enumeration(f in formula()) {
        let valid = (0..1u64 << NVARS).all(|m| eval(&f, m));
        for mode in [Mode::Bdd, Mode::Aig] {
            let mut eng = Engine::new(mode, 1_000_000);
            let b = build(&mut eng, &f);
            prop_assert_eq!(eng.is_valid(b).unwrap(), valid);
        }
    }

    #[test]
    fn witnesses_satisfy(f in formula()) {
        let sat = (0..1u64 << NVARS).any(|m| eval(&f, m));
        let indices: Vec<u32> = (0..NVARS).collect();
        for mode in [Mode::Bdd, Mode::Aig] {
            let mut eng = Engine::new(mode, 1_000_000);
            let b = build(&mut eng, &f);
            match eng.witness(b, blastproof::Policy::Random(3), &indices).unwrap() {
                Some(env) => prop_assert!(eng.eval(b, &env).unwrap()),
                None => prop_assert!(!sat),
            }
        }
    }

    #[test]
    fn arithmetic_counterparts_match_concrete(x in -128i64..128, y in -(1i64 << 40)..(1i64 << 40)) {
        let mut eng = Engine::bdd();
        let sx = number(&mut eng, 0, 8);
        let mut env = BoolEnv::new();
        assign(&mut env, 0, 8, x);
        let defs = DefEnv::with_prelude();
        for f in ["binary-+", "binary-*", "<", "logand", "logior", "logxor", "equal", "ash"] {
            let yv = if f == "ash" { y % 20 } else { y };
            let r = apply_counterpart(f, &[sx.clone(), SymObj::int(yv)], &mut Ctx::new(&mut eng)).unwrap();
            let want = blastproof::lang::prim::apply_primitive(f, &[Value::int(x), Value::int(yv)]).unwrap();
            prop_assert_eq!(sym_eval(&r, &env, &[], &defs, &eng).unwrap(), want, "{}", f);
        }
    }

    #[test]
    fn merged_objects_select_by_test(a in -50i64..50, b in -50i64..50, pick in any::<bool>()) {
        let mut eng = Engine::aig();
        let t = eng.var(0);
        let x = number(&mut eng, 1, 8);
        let then = SymObj::cons(x.clone(), SymObj::int(a));
        let els = SymObj::int(b);
        let merged = merge_ite(t, then.clone(), els.clone(), &mut eng);
        let mut env = BoolEnv::new();
        env.set(0, pick);
        assign(&mut env, 1, 8, a);
        let defs = DefEnv::with_prelude();
        let want = sym_eval(if pick { &then } else { &els }, &env, &[], &defs, &eng).unwrap();
        prop_assert_eq!(sym_eval(&merged, &env, &[], &defs, &eng).unwrap(), want);
    }

    #[test]
    fn symbolic_execution_agrees_with_concrete_evaluation(x in 0i64..1 << 12, mode_bdd in any::<bool>()) {
        let mut defs = DefEnv::with_prelude();
        defs.define(FunDef {
            name: sym("popcount-12"),
            formals: vec![sym("x")],
            body: term("(if (zp x) 0 (+ (logand x 1) (popcount-12 (ash x -1))))"),
        })
        .unwrap();
        let goal = term("(list (popcount-12 x) (logcount x) (* 3 x) (if (< x 100) (- x) (logxor x 255)))");
        let mode = if mode_bdd { Mode::Bdd } else { Mode::Aig };
        let mut eng = Engine::new(mode, 1_000_000);
        let sx = number(&mut eng, 0, 13);
        let cfg = InterpConfig::default();
        let sym_result = Interp::new(&defs, &cfg, &mut eng).interp(&goal, &[(sym("x"), sx)]).unwrap();
        let mut env = BoolEnv::new();
        assign(&mut env, 0, 13, x);
        let got = sym_eval(&sym_result, &env, &[], &defs, &eng).unwrap();
        let want = eval_concrete(&goal, &[(sym("x"), Value::Int(BigInt::from(x)))], &defs, &mut StepBudget::new(1_000_000)).unwrap();
        prop_assert_eq!(got, want);
    }
}
