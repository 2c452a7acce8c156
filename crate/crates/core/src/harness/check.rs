//! Running named recursors on instances and comparing derived against native.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::{Instance, InstanceSpec};
use crate::barrec::{
    Br, DepEps, DepEpq, DepIps, DepMbr, Epq, Eps, Ips, Mbr, MbrPrime, Native, Sbr,
};
use crate::error::{EvalError, EvalResult};
use crate::fuel::Fuel;
use crate::interdef::{
    EpqDepViaBr, EpqDepViaIps, EpsDepViaEps, EpsViaEpq, EpsViaEpqOffByOne, IpsDepViaIps,
    IpsDepViaMbr, MbrDepViaMbr, MbrDepViaMbrPrime, MbrPrimeViaMbr, MbrViaIps, SbrViaEpsDep,
};
use crate::seqcore::{Outcome, Seq, Value};

/// The native recursors, by command-line name.
pub const NATIVE: [&str; 11] = [
    "eps", "epq", "EPS", "EPQ", "ips", "IPS", "mbr", "MBR", "MBRprime", "SBR", "BR",
];

/// One derived/native pair of the equivalence matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pair {
    pub derived: &'static str,
    pub native: &'static str,
}

const fn pair(derived: &'static str, native: &'static str) -> Pair {
    Pair { derived, native }
}

pub const MATRIX: [Pair; 11] = [
    pair("eps_via_epq", "eps"),
    pair("EPS_via_eps", "EPS"),
    pair("EPQ_via_BR", "EPQ"),
    pair("SBR_via_EPS", "SBR"),
    pair("IPS_via_ips", "IPS"),
    pair("MBR_via_mbr", "MBR"),
    pair("MBRprime_via_MBR", "MBRprime"),
    pair("MBR_via_MBRprime", "MBR"),
    pair("mbr_via_ips", "mbr"),
    pair("IPS_via_MBR", "IPS"),
    pair("EPQ_via_IPS", "EPQ"),
];

/// A translation with a deliberate off-by-one, for checking the checker.
pub const MUTANT: Pair = pair("eps_via_epq_offbyone", "eps");

pub fn find_pair(derived: &str) -> Option<Pair> {
    MATRIX
        .iter()
        .chain(std::iter::once(&MUTANT))
        .copied()
        .find(|p| p.derived == derived)
}

/// What a recursor produced, forced to a finite form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evaluated {
    Seq(Vec<u32>),
    Result(u32),
}

impl std::fmt::Display for Evaluated {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Evaluated::Seq(v) => {
                let items: Vec<String> = v.iter().map(u32::to_string).collect();
                write!(f, "[{}]", items.join(", "))
            }
            Evaluated::Result(r) => write!(f, "{r}"),
        }
    }
}

fn force(s: EvalResult<Seq<Value>>, from: usize, to: usize) -> EvalResult<Evaluated> {
    let s = s?;
    (from..to)
        .map(|i| s.at(i).map(|v| v.0))
        .collect::<EvalResult<_>>()
        .map(Evaluated::Seq)
}

fn result(r: EvalResult<Outcome>) -> EvalResult<Evaluated> {
    r.map(|o| Evaluated::Result(o.0))
}

/// Evaluates a native or derived recursor on the instance, forcing sequence
/// outputs on the index range `from..to`.
pub fn evaluate(name: &str, inst: &Instance, fuel: &Fuel, from: usize, to: usize) -> EvalResult<Evaluated> {
    let (s, n, q, l) = (&inst.start, inst.start.len(), &inst.outcome, &inst.length);
    let f = fuel;
    let seq = |r| force(r, from, to);
    match name {
        "eps" => seq(Native.eps(n, &inst.selections, l, q, f)),
        "epq" => result(Native.epq(n, &inst.quantifiers, l, q, f)),
        "EPS" => seq(Native.eps_dep(s, &inst.dep_selections, l, q, f)),
        "EPQ" => result(Native.epq_dep(s, &inst.dep_quantifiers, l, q, f)),
        "ips" => seq(Native.ips(n, &inst.selections, q, f)),
        "IPS" => seq(Native.ips_dep(s, &inst.dep_selections, q, f)),
        "mbr" => seq(Native.mbr(n, &inst.skewed, q, f)),
        "MBR" => seq(Native.mbr_dep(s, &inst.dep_skewed, q, f)),
        "MBRprime" => seq(Native.mbr_prime(s, &inst.dep_skewed, q, f)),
        "SBR" => seq(Native.sbr(s, &inst.sbr_selections, &inst.omega, f)),
        "BR" => result(Native.br(s, &inst.dep_quantifiers, &inst.omega, q, f)),

        "eps_via_epq" => seq(EpsViaEpq(Native).eps(n, &inst.selections, l, q, f)),
        "eps_via_epq_offbyone" => seq(EpsViaEpqOffByOne(Native).eps(n, &inst.selections, l, q, f)),
        "EPS_via_eps" => seq(EpsDepViaEps(Native).eps_dep(s, &inst.dep_selections, l, q, f)),
        "EPQ_via_BR" => result(EpqDepViaBr(Native).epq_dep(s, &inst.dep_quantifiers, l, q, f)),
        "SBR_via_EPS" => seq(SbrViaEpsDep(Native).sbr(s, &inst.sbr_selections, &inst.omega, f)),
        "IPS_via_ips" => seq(IpsDepViaIps(Native).ips_dep(s, &inst.dep_selections, q, f)),
        "MBR_via_mbr" => seq(MbrDepViaMbr(Native).mbr_dep(s, &inst.dep_skewed, q, f)),
        "MBRprime_via_MBR" => seq(MbrPrimeViaMbr(Native).mbr_prime(s, &inst.dep_skewed, q, f)),
        "MBR_via_MBRprime" => seq(MbrDepViaMbrPrime(Native).mbr_dep(s, &inst.dep_skewed, q, f)),
        "mbr_via_ips" => seq(MbrViaIps(Native).mbr(n, &inst.skewed, q, f)),
        "IPS_via_MBR" => seq(IpsDepViaMbr(Native).ips_dep(s, &inst.dep_selections, q, f)),
        "EPQ_via_IPS" => result(EpqDepViaIps(Native).epq_dep(s, &inst.dep_quantifiers, l, q, f)),
        other => Err(EvalError::ContractViolation(format!("unknown recursor {other}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub seed: u64,
    /// First differing position of a sequence output; 0 for results and errors.
    pub index: usize,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub derived: String,
    pub native: String,
    pub instances: usize,
    pub pass: bool,
    pub fuel_used: u64,
    pub failures: Vec<Failure>,
}

fn describe(r: &EvalResult<Evaluated>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

fn first_difference(a: &Evaluated, b: &Evaluated) -> usize {
    match (a, b) {
        (Evaluated::Seq(x), Evaluated::Seq(y)) => {
            x.iter().zip(y).position(|(p, q)| p != q).unwrap_or(0)
        }
        _ => 0,
    }
}

/// Compares one instance. Returns the fuel spent by both sides.
fn check_one(pair: Pair, seed: u64, spec: &InstanceSpec, depth: usize, fuel: u64) -> (u64, Option<Failure>) {
    let inst = spec.build();
    let budget = spec.fuel.unwrap_or(fuel);
    let (fa, fb) = (Fuel::new(budget), Fuel::new(budget));
    let native = evaluate(pair.native, &inst, &fa, 0, depth);
    let derived = evaluate(pair.derived, &inst, &fb, 0, depth);
    let spent = fa.used() + fb.used();
    let failure = match (&native, &derived) {
        (Ok(a), Ok(b)) if a == b => None,
        (Ok(a), Ok(b)) => Some(first_difference(a, b)),
        _ => Some(0),
    }
    .map(|index| Failure {
        seed,
        index,
        expected: describe(&native),
        got: describe(&derived),
    });
    (spent, failure)
}

/// Evaluates the pair on every instance, in parallel, and merges the
/// outcomes in seed order.
pub fn check_equivalence(pair: Pair, instances: &[(u64, InstanceSpec)], depth: usize, fuel: u64) -> CheckReport {
    let outcomes: Vec<(u64, Option<Failure>)> = instances
        .par_iter()
        .map(|(seed, spec)| check_one(pair, *seed, spec, depth, fuel))
        .collect();
    let failures: Vec<Failure> = outcomes.iter().filter_map(|(_, f)| f.clone()).collect();
    CheckReport {
        derived: pair.derived.into(),
        native: pair.native.into(),
        instances: instances.len(),
        pass: failures.is_empty(),
        fuel_used: outcomes.iter().map(|(u, _)| u).sum(),
        failures,
    }
}
