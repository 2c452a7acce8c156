//! Property checks run by the suite, grouped by module.

use std::rc::Rc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::InstanceSpec;
use crate::barrec::{eps, ipq_diverging, successor_quantifiers, OmegaFn};
use crate::error::{EvalError, EvalResult};
use crate::fuel::Fuel;
use crate::selection::{
    pred, prod_quant, prod_sel, sel_to_quant, table_selection, Pred, Selection,
};
use crate::seqcore::{Outcome, OutcomeFn, Path, Seq, Value};
use crate::spector::{chi, chi_plus, main_spec_witness, solve_spector_equations, verify_spector};

/// Failure messages kept per property; the count is always exact.
const KEPT: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub cases: u64,
    pub failed: u64,
    pub pass: bool,
    pub examples: Vec<String>,
}

struct Tally {
    name: &'static str,
    cases: u64,
    failed: u64,
    examples: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            cases: 0,
            failed: 0,
            examples: Vec::new(),
        }
    }

    fn record(&mut self, outcome: Result<(), String>) {
        self.cases += 1;
        if let Err(msg) = outcome {
            self.failed += 1;
            if self.examples.len() < KEPT {
                self.examples.push(msg);
            }
        }
    }

    fn merge(mut self, other: Tally) -> Self {
        self.cases += other.cases;
        self.failed += other.failed;
        let room = KEPT.saturating_sub(self.examples.len());
        self.examples.extend(other.examples.into_iter().take(room));
        self
    }

    fn finish(self) -> PropertyReport {
        PropertyReport {
            name: self.name.into(),
            cases: self.cases,
            failed: self.failed,
            pass: self.failed == 0,
            examples: self.examples,
        }
    }
}

fn flatten<T>(r: EvalResult<Result<(), String>>, ctx: T) -> Result<(), String>
where
    T: std::fmt::Display,
{
    match r {
        Ok(inner) => inner.map_err(|m| format!("{ctx}: {m}")),
        Err(e) => Err(format!("{ctx}: {e}")),
    }
}

fn seeded(
    name: &'static str,
    instances: &[(u64, InstanceSpec)],
    fuel: u64,
    check: impl Fn(&InstanceSpec, &Fuel, &mut Tally, u64) + Sync,
) -> PropertyReport {
    instances
        .par_iter()
        .map(|(seed, spec)| {
            let mut t = Tally::new(name);
            let budget = spec.fuel.unwrap_or(fuel);
            check(spec, &Fuel::new(budget), &mut t, *seed);
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::new(name), Tally::merge)
        .finish()
}

fn sample_seqs() -> Vec<Seq<Value>> {
    vec![
        Seq::zero(),
        Seq::constant(Value(1)),
        Seq::from_fn(|i| Ok(Value((i % 2) as u32))),
        Seq::from_fn(|i| Ok(Value(((i * 7 + 3) % 5) as u32))),
    ]
}

fn boolean_paths(max_len: usize) -> Vec<Path<Value>> {
    let mut out = vec![Path::empty()];
    let mut layer = vec![Path::empty()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|p| [p.snoc(Value(0)), p.snoc(Value(1))])
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn seqcore_properties() -> Vec<PropertyReport> {
    let mut shift = Tally::new("shift_law");
    let mut over = Tally::new("overwrite_law");
    for a in sample_seqs() {
        for n in 0..=10 {
            for i in 0..=20 {
                let ok = a.shift(n).at(i) == a.at(n + i);
                shift.record(if ok { Ok(()) } else { Err(format!("n={n} i={i}")) });
            }
        }
        for s in boolean_paths(3) {
            let o = a.overwrite(&s);
            for i in 0..=10 {
                let want = if i < s.len() { Ok(s[i]) } else { a.at(i + s.len()) };
                let ok = o.at(i) == want;
                over.record(if ok { Ok(()) } else { Err(format!("s={s:?} i={i}")) });
            }
        }
    }
    vec![shift.finish(), over.finish()]
}

/// All 16 selection functions on booleans, as tables over predicate graphs.
pub fn all_boolean_selections() -> Vec<Selection<Value, Outcome>> {
    (0u32..16)
        .map(|bits| {
            let table: Rc<[Value]> = (0..4).map(|k| Value((bits >> k) & 1)).collect();
            table_selection(2, 2, table)
        })
        .collect()
}

/// All 16 boolean predicates on pairs of booleans.
pub fn all_pair_predicates() -> Vec<Pred<Path<Value>, Outcome>> {
    (0u32..16)
        .map(|bits| {
            pred(move |s: &Path<Value>| Ok(Outcome((bits >> (2 * s[0].0 + s[1].0)) & 1)))
        })
        .collect()
}

pub fn selection_properties() -> Vec<PropertyReport> {
    let mut t = Tally::new("product_homomorphism");
    let sels = all_boolean_selections();
    let preds = all_pair_predicates();
    for (i, e) in sels.iter().enumerate() {
        for (j, d) in sels.iter().enumerate() {
            let lhs = sel_to_quant(&prod_sel(e, d));
            let rhs = prod_quant(&sel_to_quant(e), &sel_to_quant(d));
            for (k, p) in preds.iter().enumerate() {
                let r = lhs.apply(p).and_then(|a| Ok((a, rhs.apply(p)?)));
                t.record(match r {
                    Ok((a, b)) if a == b => Ok(()),
                    Ok((a, b)) => Err(format!("ε={i} δ={j} p={k}: {a} vs {b}")),
                    Err(e) => Err(format!("ε={i} δ={j} p={k}: {e}")),
                });
            }
        }
    }
    vec![t.finish()]
}

/// How far along `eps` the prefix lemma and the unwinding formula are checked.
pub const LEMMA_POSITIONS: usize = 10;

/// `α = ᾱi * eps_{n+i}(q_{ᾱi})` for `i ≤ 10`, compared to `depth`.
fn prefix_lemma(spec: &InstanceSpec, fuel: &Fuel, depth: usize) -> EvalResult<Result<(), String>> {
    let inst = spec.build();
    let n = inst.start.len();
    let (fam, l, q) = (&inst.selections, &inst.length, &inst.outcome);
    let alpha = eps(n, fam, l, q, fuel)?;
    let want = alpha.prefix(depth)?;
    for i in 0..=LEMMA_POSITIONS {
        let t = alpha.prefix(i)?;
        let got = eps(n + i, fam, l, &q.restrict(&t), fuel)?.prepend(&t).prefix(depth)?;
        if got != want {
            return Ok(Err(format!("i={i}: {want:?} vs {got:?}")));
        }
    }
    Ok(Ok(()))
}

/// `eps_n(q)(i)` is `0` if `l(q_t(0̄)) < n + i`, and otherwise
/// `ε_{n+i}(λx. q_{t*x}(eps_{n+i+1}(q_{t*x})))`, with `t` the first `i` values.
fn unwinding(spec: &InstanceSpec, fuel: &Fuel) -> EvalResult<Result<(), String>> {
    let inst = spec.build();
    let n = inst.start.len();
    let (fam, l, q) = (&inst.selections, &inst.length, &inst.outcome);
    let alpha = eps(n, fam, l, q, fuel)?;
    for i in 0..=LEMMA_POSITIONS {
        let t = alpha.prefix(i)?;
        let want = if l.apply(&q.restrict(&t).apply(&Seq::zero())?)? < n + i {
            Value(0)
        } else {
            let (fam2, l2, q2, f2) = (fam.clone(), l.clone(), q.clone(), fuel.clone());
            fam.at(n + i).apply(&pred(move |x: &Value| {
                let qtx = q2.restrict(&t.snoc(*x));
                qtx.apply(&eps(n + i + 1, &fam2, &l2, &qtx, &f2)?)
            }))?
        };
        let got = alpha.at(i)?;
        if got != want {
            return Ok(Err(format!("i={i}: formula gives {want}, eps gives {got}")));
        }
    }
    Ok(Ok(()))
}

/// `ipq` under `φ_n(p) = 1 + p(0)` must run out of every budget.
pub fn ipq_divergence(budgets: &[u64]) -> PropertyReport {
    let mut t = Tally::new("ipq_divergence");
    let q = OutcomeFn::constant(Outcome(0));
    for &b in budgets {
        let r = ipq_diverging(0, &successor_quantifiers::<Value>(), &q, &Fuel::new(b));
        t.record(match r {
            Err(EvalError::FuelExhausted { .. }) => Ok(()),
            other => Err(format!("budget {b}: {other:?}")),
        });
    }
    t.finish()
}

pub fn barrec_properties(instances: &[(u64, InstanceSpec)], depth: usize, fuel: u64) -> Vec<PropertyReport> {
    vec![
        seeded("eps_prefix_lemma", instances, fuel, |spec, f, t, seed| {
            t.record(flatten(prefix_lemma(spec, f, depth), format!("seed {seed}")))
        }),
        seeded("eps_unwinding", instances, fuel, |spec, f, t, seed| {
            t.record(flatten(unwinding(spec, f), format!("seed {seed}")))
        }),
        ipq_divergence(&[100, 10_000, 100_000]),
    ]
}

/// Every table of a boolean `ω` with the given modulus and values `≤ bound`.
pub fn omega_tables(modulus: usize, bound: u32) -> Vec<Vec<u32>> {
    let rows = 1usize << modulus;
    let mut out = vec![Vec::new()];
    for _ in 0..rows {
        out = out
            .into_iter()
            .flat_map(|t| (0..=bound).map(move |v| [t.clone(), vec![v]].concat()))
            .collect();
    }
    out
}

pub fn table_omega(modulus: usize, bound: u32, table: &[u32]) -> OmegaFn<Value> {
    let table: Rc<[u32]> = table.into();
    OmegaFn::new(move |a: &Seq<Value>| {
        let mut idx = 0;
        for i in 0..modulus {
            idx = 2 * idx + a.at(i)?.0 as usize;
        }
        Ok(table[idx] as usize)
    })
    .with_modulus(modulus)
    .with_bound(bound as usize)
}

/// Boolean sequences of period at most 2.
pub fn periodic_seqs() -> Vec<Seq<Value>> {
    [[0, 0], [1, 1], [0, 1], [1, 0]]
        .into_iter()
        .map(|p| Seq::from_fn(move |i| Ok(Value(p[i % 2]))))
        .collect()
}

fn chi_cases(t_min: &mut Tally, t_plus: &mut Tally) -> EvalResult<()> {
    for modulus in 0..=2 {
        for bound in 0..=3u32 {
            for table in omega_tables(modulus, bound) {
                let omega = table_omega(modulus, bound, &table);
                for (a_idx, alpha) in periodic_seqs().iter().enumerate() {
                    let ctx = format!("m={modulus} b={bound} table={table:?} α#{a_idx}");
                    let at = |n: usize| omega.apply(&alpha.init_seg_zero(n)?);
                    let mut naive = None;
                    for n in 0..=bound as usize + 2 {
                        if at(n)? < n {
                            naive = Some(n);
                            break;
                        }
                    }
                    let got = chi(&omega, alpha);
                    t_min.record(match (naive, &got) {
                        (Some(n), Ok(g)) if n == *g => Ok(()),
                        _ => Err(format!("{ctx}: scan {naive:?}, chi {got:?}")),
                    });
                    for k in 0..=3 {
                        let r = chi_plus(k, &omega, alpha).and_then(|n| {
                            let mut ok = at(n)? < n + k;
                            for i in 0..n {
                                ok &= at(i)? >= i + k;
                            }
                            Ok((n, ok))
                        });
                        t_plus.record(match r {
                            Ok((_, true)) => Ok(()),
                            other => Err(format!("{ctx} k={k}: {other:?}")),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn chi_properties() -> Vec<PropertyReport> {
    let mut t_min = Tally::new("chi_minimality");
    let mut t_plus = Tally::new("chi_plus_clause_i");
    if let Err(e) = chi_cases(&mut t_min, &mut t_plus) {
        t_min.record(Err(e.to_string()));
    }
    vec![t_min.finish(), t_plus.finish()]
}

fn main_spec_holds(spec: &InstanceSpec, fuel: &Fuel) -> EvalResult<Result<(), String>> {
    let inst = spec.build();
    let w = main_spec_witness(&inst.selections, &inst.length, &inst.outcome, fuel)?;
    for row in w.check()? {
        if !(row.selection_holds && row.outcome_holds) {
            return Ok(Err(format!("n={}: {row:?}", row.n)));
        }
    }
    Ok(Ok(()))
}

fn solution_verifies(spec: &InstanceSpec, fuel: &Fuel) -> EvalResult<Result<(), String>> {
    let inst = spec.build();
    let sol = solve_spector_equations(&inst.selections, &inst.outcome, &inst.omega, &inst.domain(), fuel)?;
    let report = verify_spector(&sol, &inst.selections, &inst.outcome, &inst.omega)?;
    Ok(if report.all_pass() {
        Ok(())
    } else {
        Err(format!("{:?}", report.equations))
    })
}

pub fn spector_properties(instances: &[(u64, InstanceSpec)], fuel: u64) -> Vec<PropertyReport> {
    let mut out = chi_properties();
    out.push(seeded("main_spec_witness", instances, fuel, |spec, f, t, seed| {
        t.record(flatten(main_spec_holds(spec, f), format!("seed {seed}")))
    }));
    out.push(seeded("spector_solution", instances, fuel, |spec, f, t, seed| {
        t.record(flatten(solution_verifies(spec, f), format!("seed {seed}")))
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::random::{random_instance, RandomParams};

    #[test]
    fn omega_table_enumeration_sizes() {
        assert_eq!(omega_tables(0, 3).len(), 4);
        assert_eq!(omega_tables(2, 1).len(), 16);
        assert!(omega_tables(1, 2).iter().all(|t| t.len() == 2));
    }

    #[test]
    fn fixed_properties_pass() {
        for r in seqcore_properties()
            .into_iter()
            .chain(selection_properties())
            .chain(chi_properties())
        {
            assert!(r.pass, "{r:?}");
        }
        assert!(ipq_divergence(&[1, 100]).pass);
    }

    #[test]
    fn seeded_properties_pass_on_a_few_seeds() {
        let p = RandomParams::default();
        let inst: Vec<_> = (0..8).map(|s| (s, random_instance(s, &p))).collect();
        for r in barrec_properties(&inst, 20, 100_000)
            .into_iter()
            .chain(spector_properties(&inst, 100_000))
        {
            assert!(r.pass, "{r:?}");
        }
    }
}
