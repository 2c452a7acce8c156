//! Eager reference implementations of each recursor, written directly from
//! the defining equations over explicit finite prefixes, compared against the
//! lazy library versions.

use proptest::prelude::*;
use selrec::harness::check::{evaluate, Evaluated};
use selrec::harness::instance::{parse_instance, Instance};
use selrec::harness::random::{random_instance, RandomParams};
use selrec::selection::{pred, Quantifier, Selection, SkewedSelection};
use selrec::{Fuel, Outcome, Path, Seq, Value};

const DEPTH: usize = 20;

fn padded(t: &[Value]) -> Seq<Value> {
    Seq::zero().prepend(t)
}

fn cat(a: &[Value], b: &[Value]) -> Vec<Value> {
    [a, b].concat()
}

fn snoc(a: &[Value], x: u32) -> Vec<Value> {
    cat(a, &[Value(x)])
}

fn path(a: &[Value], b: &[Value]) -> Path<Value> {
    Path::from(cat(a, b))
}

fn codes(v: &[Value]) -> Vec<u32> {
    (0..DEPTH).map(|i| v.get(i).map_or(0, |x| x.0)).collect()
}

fn q(inst: &Instance, t: &[Value]) -> Outcome {
    inst.outcome.apply(&padded(t)).unwrap()
}

fn stops(inst: &Instance, t: &[Value], at: usize) -> bool {
    inst.length.apply(&q(inst, t)).unwrap() < at
}

/// Tabulates the predicate first, so the functional only sees plain data.
fn tabulate(inst: &Instance, f: impl Fn(u32) -> Outcome) -> Vec<Outcome> {
    (0..inst.x_card).map(f).collect()
}

fn select(sel: &Selection<Value, Outcome>, table: Vec<Outcome>) -> Value {
    sel.apply(&pred(move |x: &Value| Ok(table[x.0 as usize]))).unwrap()
}

fn quantify(phi: &Quantifier<Value, Outcome>, table: Vec<Outcome>) -> Outcome {
    phi.apply(&pred(move |x: &Value| Ok(table[x.0 as usize]))).unwrap()
}

fn skew(eps: &SkewedSelection<Value, Outcome>, table: Vec<Outcome>, k: usize) -> Vec<Value> {
    let s = eps.apply(&pred(move |x: &Value| Ok(table[x.0 as usize]))).unwrap();
    s.prefix(k).unwrap().into_vec()
}

/// `eps_{n+|t|}(q_t)` as a finite list, zeros implied after it. Passing the
/// start path `s` switches to the path-indexed family.
fn eps(inst: &Instance, n: usize, dep: Option<&[Value]>, t: &[Value]) -> Vec<Value> {
    if stops(inst, t, n + t.len()) {
        return Vec::new();
    }
    let table = tabulate(inst, |x| {
        let tx = snoc(t, x);
        q(inst, &cat(&tx, &eps(inst, n, dep, &tx)))
    });
    let sel = match dep {
        Some(s) => inst.dep_selections.at(&path(s, t)),
        None => inst.selections.at(n + t.len()),
    };
    let c = select(&sel, table);
    cat(&[c], &eps(inst, n, dep, &snoc(t, c.0)))
}

fn epq(inst: &Instance, n: usize, dep: Option<&[Value]>, t: &[Value]) -> Outcome {
    if stops(inst, t, n + t.len()) {
        return q(inst, t);
    }
    let table = tabulate(inst, |x| epq(inst, n, dep, &snoc(t, x)));
    let phi = match dep {
        Some(s) => inst.dep_quantifiers.at(&path(s, t)),
        None => inst.quantifiers.at(n + t.len()),
    };
    quantify(&phi, table)
}

/// How many values of a continuation after `t` can still reach `q`.
fn needed(inst: &Instance, t: &[Value]) -> usize {
    inst.outcome.modulus().unwrap().saturating_sub(t.len() + 1)
}

/// First `k` values of the implicitly controlled product after `t`.
fn ips(inst: &Instance, n: usize, dep: Option<&[Value]>, t: &[Value], k: usize) -> Vec<Value> {
    if k == 0 {
        return Vec::new();
    }
    let table = tabulate(inst, |x| {
        let tx = snoc(t, x);
        q(inst, &cat(&tx, &ips(inst, n, dep, &tx, needed(inst, t))))
    });
    let sel = match dep {
        Some(s) => inst.dep_selections.at(&path(s, t)),
        None => inst.selections.at(n + t.len()),
    };
    let c = select(&sel, table);
    cat(&[c], &ips(inst, n, dep, &snoc(t, c.0), k - 1))
}

fn mbr(inst: &Instance, n: usize, dep: Option<&[Value]>, t: &[Value], k: usize) -> Vec<Value> {
    if k == 0 {
        return Vec::new();
    }
    let table = tabulate(inst, |x| {
        let tx = snoc(t, x);
        q(inst, &cat(&tx, &mbr(inst, n, dep, &tx, needed(inst, t))))
    });
    let eps = match dep {
        Some(s) => inst.dep_skewed.at(&path(s, t)),
        None => inst.skewed.at(n + t.len()),
    };
    skew(&eps, table, k)
}

/// `SBR_s` as its finite part before the zeros.
fn sbr(inst: &Instance, s: &[Value]) -> Vec<Value> {
    if inst.omega.apply(&padded(s)).unwrap() < s.len() {
        return s.to_vec();
    }
    let table = tabulate(inst, |x| q(inst, &sbr(inst, &snoc(s, x))));
    let c = select(&inst.dep_selections.at(&Path::from(s.to_vec())), table);
    sbr(inst, &snoc(s, c.0))
}

fn br(inst: &Instance, s: &[Value]) -> Outcome {
    if inst.omega.apply(&padded(s)).unwrap() < s.len() {
        return q(inst, s);
    }
    let table = tabulate(inst, |x| br(inst, &snoc(s, x)));
    quantify(&inst.dep_quantifiers.at(&Path::from(s.to_vec())), table)
}

fn oracle(name: &str, inst: &Instance) -> String {
    let s: Vec<Value> = inst.start.to_vec();
    let n = s.len();
    let d = Some(s.as_slice());
    let seq = |v: Vec<Value>| format!("{:?}", codes(&v));
    let res = |r: Outcome| r.0.to_string();
    match name {
        "eps" => seq(eps(inst, n, None, &[])),
        "EPS" => seq(eps(inst, n, d, &[])),
        "epq" => res(epq(inst, n, None, &[])),
        "EPQ" => res(epq(inst, n, d, &[])),
        "ips" => seq(ips(inst, n, None, &[], DEPTH)),
        "IPS" => seq(ips(inst, n, d, &[], DEPTH)),
        "mbr" => seq(mbr(inst, n, None, &[], DEPTH)),
        "MBR" => seq(mbr(inst, n, d, &[], DEPTH)),
        "SBR" => seq(sbr(inst, &s)),
        "BR" => res(br(inst, &s)),
        _ => unreachable!("no oracle for {name}"),
    }
}

fn library(name: &str, inst: &Instance) -> String {
    match evaluate(name, inst, &Fuel::default(), 0, DEPTH).unwrap() {
        Evaluated::Seq(v) => format!("{v:?}"),
        Evaluated::Result(r) => r.to_string(),
    }
}

const NAMES: [&str; 10] = ["eps", "EPS", "epq", "EPQ", "ips", "IPS", "mbr", "MBR", "SBR", "BR"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn natives_match_eager_oracles(seed in any::<u64>()) {
        let inst = random_instance(seed, &RandomParams::default()).build();
        for name in NAMES {
            prop_assert_eq!(library(name, &inst), oracle(name, &inst), "{} on seed {}", name, seed);
        }
    }
}

/// With an empty start, `MBR′` and `MBR` coincide.
#[test]
fn mbr_prime_from_empty_start() {
    for seed in 0..40 {
        let mut spec = random_instance(seed, &RandomParams::default());
        spec.start.clear();
        let inst = spec.build();
        assert_eq!(library("MBRprime", &inst), oracle("MBR", &inst), "seed {seed}");
    }
}

const PARITY: &str = include_str!("../instances/parity.toml");

/// Values computed by the eager oracles above on the bundled instance.
#[test]
fn bundled_instance_frozen_values() {
    let inst = parse_instance(PARITY).unwrap().build();
    let frozen = [
        ("eps", "[0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]"),
        ("epq", "1"),
        ("ips", "[0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]"),
        ("mbr", "[0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1]"),
        ("SBR", "[1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]"),
        ("BR", "1"),
    ];
    for (name, want) in frozen {
        assert_eq!(oracle(name, &inst), want, "oracle {name}");
        assert_eq!(library(name, &inst), want, "library {name}");
    }
}
