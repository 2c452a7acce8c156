//! Spector's search functional and the system of equations it solves.

use std::fmt;
use std::rc::Rc;

use crate::barrec::{eps, LengthFn, OmegaFn};
use crate::error::{EvalError, EvalResult};
use crate::fuel::Fuel;
use crate::selection::{pred, Family, Pred, SelectionFamily};
use crate::seqcore::{Ground, OutcomeFn, Seq};

/// `α^ω(i) = 0` once some `k ≤ i + 1` has `ω(ᾱk * 0̄) < k`, and `α(i)` before.
pub fn alpha_omega<X: Ground>(omega: &OmegaFn<X>, alpha: &Seq<X>) -> Seq<X> {
    let (omega, alpha) = (omega.clone(), alpha.clone());
    // The condition is monotone in i, so remember the first index where it holds.
    let first_hit: Rc<std::cell::Cell<Option<usize>>> = Rc::new(std::cell::Cell::new(None));
    Seq::from_fn(move |i| {
        if first_hit.get().is_some_and(|k| k <= i + 1) {
            return Ok(X::zero());
        }
        for k in 0..=i + 1 {
            if omega.apply(&alpha.init_seg_zero(k)?)? < k {
                first_hit.set(Some(first_hit.get().map_or(k, |h| h.min(k))));
                return Ok(X::zero());
            }
        }
        alpha.at(i)
    })
}

/// Least `n` with `ω(ᾱn * 0̄) < n`, searched only up to `ω(α^ω) + 1`.
pub fn chi<X: Ground>(omega: &OmegaFn<X>, alpha: &Seq<X>) -> EvalResult<usize> {
    let limit = omega.apply(&alpha_omega(omega, alpha))? + 1;
    for n in 0..=limit {
        if omega.apply(&alpha.init_seg_zero(n)?)? < n {
            if let Some(b) = omega.bound() {
                if n > b + 1 {
                    return Err(EvalError::ContractViolation(format!(
                        "stopping point {n} exceeds declared bound {b} + 1"
                    )));
                }
            }
            return Ok(n);
        }
    }
    Err(EvalError::SearchFailed(format!(
        "no n ≤ {limit} with ω(ᾱn·0) < n"
    )))
}

/// Least `n` with `ω(ᾱn * 0̄) < n + k`, bounded by `χ(ω ∸ k)(α)`.
pub fn chi_plus<X: Ground>(k: usize, omega: &OmegaFn<X>, alpha: &Seq<X>) -> EvalResult<usize> {
    let limit = chi(&omega.monus(k), alpha)?;
    for i in 0..=limit {
        if omega.apply(&alpha.init_seg_zero(i)?)? < i + k {
            return Ok(i);
        }
    }
    Err(EvalError::SearchFailed(format!(
        "no i ≤ {limit} with ω(ᾱi·0) < i + {k}"
    )))
}

/// The sequence `α = eps_0(q)` together with the predicates
/// `p_n(x) = q_{ᾱn * x}(eps_{n+1}(q_{ᾱn * x}))` that witness it.
pub struct MainSpecWitness<X, R> {
    pub alpha: Seq<X>,
    family: SelectionFamily<X, R>,
    l: LengthFn<R>,
    q: OutcomeFn<X, R>,
    fuel: Fuel,
}

impl<X: Ground, R: Clone + 'static> MainSpecWitness<X, R> {
    pub fn p(&self, n: usize) -> EvalResult<Pred<X, R>> {
        let prefix = self.alpha.prefix(n)?;
        let (family, l, q, fuel) = (
            self.family.clone(),
            self.l.clone(),
            self.q.clone(),
            self.fuel.clone(),
        );
        Ok(pred(move |x: &X| {
            let qx = q.restrict(&prefix.snoc(x.clone()));
            qx.apply(&eps(n + 1, &family, &l, &qx, &fuel)?)
        }))
    }

    /// Checks `α(n) = ε_n(p_n)` and `p_n(α(n)) = q(α)` for all `n ≤ l(q(α))`.
    pub fn check(&self) -> EvalResult<Vec<WitnessCheck<X, R>>>
    where
        X: PartialEq,
        R: PartialEq,
    {
        let r = self.q.apply(&self.alpha)?;
        let top = self.l.apply(&r)?;
        let mut out = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let p = self.p(n)?;
            let chosen = self.family.at(n).apply(&p)?;
            let at_n = self.alpha.at(n)?;
            let value = p(&at_n)?;
            out.push(WitnessCheck {
                n,
                selection_holds: chosen == at_n,
                outcome_holds: value == r,
                chosen,
                at_n,
                value,
                outcome: r.clone(),
            });
        }
        Ok(out)
    }
}

/// One row of [`MainSpecWitness::check`].
#[derive(Clone, Debug)]
pub struct WitnessCheck<X, R> {
    pub n: usize,
    pub selection_holds: bool,
    pub outcome_holds: bool,
    pub chosen: X,
    pub at_n: X,
    pub value: R,
    pub outcome: R,
}

pub fn main_spec_witness<X: Ground, R: Clone + 'static>(
    family: &SelectionFamily<X, R>,
    l: &LengthFn<R>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<MainSpecWitness<X, R>> {
    Ok(MainSpecWitness {
        alpha: eps(0, family, l, q, fuel)?,
        family: family.clone(),
        l: l.clone(),
        q: q.clone(),
        fuel: fuel.clone(),
    })
}

/// A solution `(n, α, p)` of `n = ω(α)`, `α(n) = ε_n(p)`, `p(α(n)) = q(α)`,
/// with `p` tabulated over the finite domain.
#[derive(Clone)]
pub struct SpectorSolution<X, R> {
    pub n: usize,
    pub alpha: Seq<X>,
    pub p: Vec<(X, R)>,
}

impl<X: PartialEq + fmt::Debug, R: Clone + fmt::Debug> SpectorSolution<X, R> {
    pub fn lookup(&self, x: &X) -> EvalResult<R> {
        self.p
            .iter()
            .find(|(y, _)| y == x)
            .map(|(_, r)| r.clone())
            .ok_or_else(|| EvalError::ContractViolation(format!("{x:?} outside tabulated domain")))
    }
}

/// Solves Spector's equations by running `eps` on `R × ℕ` with
/// `q'(α) = (q(α), ω(α))` and the second projection as length.
pub fn solve_spector_equations<X, R>(
    family: &SelectionFamily<X, R>,
    q: &OutcomeFn<X, R>,
    omega: &OmegaFn<X>,
    domain: &[X],
    fuel: &Fuel,
) -> EvalResult<SpectorSolution<X, R>>
where
    X: Ground,
    R: Clone + 'static,
{
    let lifted: SelectionFamily<X, (R, usize)> = {
        let family = family.clone();
        Family::new(move |n| family.at(n).pull_back(|r: &(R, usize)| Ok(r.0.clone())))
    };
    let q2 = {
        let (q, omega) = (q.clone(), omega.clone());
        OutcomeFn::new(move |a: &Seq<X>| Ok((q.apply(a)?, omega.apply(a)?)))
    };
    let l = LengthFn::new(|r: &(R, usize)| Ok(r.1));
    let witness = main_spec_witness(&lifted, &l, &q2, fuel)?;
    let n = omega.apply(&witness.alpha)?;
    let p2 = witness.p(n)?;
    let p = domain
        .iter()
        .map(|x| Ok((x.clone(), p2(x)?.0)))
        .collect::<EvalResult<_>>()?;
    Ok(SpectorSolution {
        n,
        alpha: witness.alpha,
        p,
    })
}

/// One evaluated equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationCheck {
    pub name: &'static str,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectorReport {
    pub equations: Vec<EquationCheck>,
}

impl SpectorReport {
    pub fn all_pass(&self) -> bool {
        self.equations.iter().all(|e| e.pass)
    }
}

fn equation<T: PartialEq + fmt::Debug>(name: &'static str, lhs: T, rhs: T) -> EquationCheck {
    EquationCheck {
        name,
        pass: lhs == rhs,
        lhs: format!("{lhs:?}"),
        rhs: format!("{rhs:?}"),
    }
}

/// Evaluates both sides of each of the three equations.
pub fn verify_spector<X, R>(
    sol: &SpectorSolution<X, R>,
    family: &SelectionFamily<X, R>,
    q: &OutcomeFn<X, R>,
    omega: &OmegaFn<X>,
) -> EvalResult<SpectorReport>
where
    X: Ground + PartialEq + fmt::Debug,
    R: Clone + PartialEq + fmt::Debug + 'static,
{
    let table = Rc::new(sol.p.clone());
    let p = {
        let table = Rc::clone(&table);
        pred(move |x: &X| {
            table
                .iter()
                .find(|(y, _)| y == x)
                .map(|(_, r)| r.clone())
                .ok_or_else(|| EvalError::ContractViolation(format!("{x:?} outside domain")))
        })
    };
    let at_n = sol.alpha.at(sol.n)?;
    Ok(SpectorReport {
        equations: vec![
            equation("n = ω(α)", sol.n, omega.apply(&sol.alpha)?),
            equation("α(n) = ε_n(p)", at_n.clone(), family.at(sol.n).apply(&p)?),
            equation("p(α(n)) = q(α)", p(&at_n)?, q.apply(&sol.alpha)?),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::{argmin, hilbert};
    use crate::seqcore::{Outcome, Path, Value};

    fn head_omega() -> OmegaFn<Value> {
        OmegaFn::new(|a: &Seq<Value>| Ok(a.at(0)?.0 as usize)).with_modulus(1)
    }

    #[test]
    fn alpha_omega_examples() {
        let five = Seq::constant(Value(5));
        let got = alpha_omega(&OmegaFn::constant(0), &five);
        assert_eq!(got.prefix(10).unwrap(), Path::from(vec![Value(0); 10]));
        let big = OmegaFn::new(|_| Ok(100));
        let got = alpha_omega(&big, &five);
        assert_eq!(got.prefix(10).unwrap(), Path::from(vec![Value(5); 10]));
        let got = alpha_omega(&head_omega(), &Seq::zero());
        assert_eq!(got.prefix(10).unwrap(), Path::from(vec![Value(0); 10]));
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi(&OmegaFn::constant(0), &Seq::<Value>::zero()).unwrap(), 1);
        assert_eq!(chi(&head_omega(), &Seq::constant(Value(5))).unwrap(), 6);
        assert_eq!(chi(&head_omega(), &Seq::zero()).unwrap(), 1);
    }

    #[test]
    fn chi_plus_examples() {
        let alpha = Seq::constant(Value(1));
        for omega in [OmegaFn::constant(2), head_omega()] {
            assert_eq!(chi_plus(0, &omega, &alpha).unwrap(), chi(&omega, &alpha).unwrap());
        }
        assert_eq!(chi_plus(2, &OmegaFn::constant(3), &alpha).unwrap(), 2);
        assert_eq!(chi_plus(5, &OmegaFn::constant(0), &alpha).unwrap(), 0);
    }

    fn count_tt2() -> OutcomeFn<Value, Outcome> {
        OutcomeFn::with_modulus(2, |a: &Seq<Value>| Ok(Outcome(a.at(0)?.0 + a.at(1)?.0)))
    }

    #[test]
    fn solutions_verify() {
        let fuel = Fuel::default();
        let fam = Family::constant(argmin(2));
        let domain = [Value(0), Value(1)];
        for omega in [OmegaFn::constant(0), OmegaFn::constant(2)] {
            let sol = solve_spector_equations(&fam, &count_tt2(), &omega, &domain, &fuel).unwrap();
            let report = verify_spector(&sol, &fam, &count_tt2(), &omega).unwrap();
            assert!(report.all_pass(), "{report:?}");
        }
    }

    #[test]
    fn perturbed_solutions_fail() {
        let fuel = Fuel::default();
        let fam = Family::constant(argmin(2));
        let omega = OmegaFn::constant(2);
        let domain = [Value(0), Value(1)];
        let sol = solve_spector_equations(&fam, &count_tt2(), &omega, &domain, &fuel).unwrap();

        let mut bumped = sol.clone();
        bumped.n += 1;
        let report = verify_spector(&bumped, &fam, &count_tt2(), &omega).unwrap();
        assert!(!report.equations[0].pass);

        // argmin on a non-constant p has a unique answer, so flipping α(n) breaks it.
        let mut flipped = sol.clone();
        let n = sol.n;
        let old = sol.alpha.clone();
        flipped.alpha = Seq::from_fn(move |i| {
            let v = old.at(i)?;
            Ok(if i == n { Value(1 - v.0) } else { v })
        });
        let p = &sol.p;
        if p[0].1 != p[1].1 {
            let report = verify_spector(&flipped, &fam, &count_tt2(), &omega).unwrap();
            assert!(!report.equations[1].pass);
        }
    }

    #[test]
    fn main_spec_equations_hold() {
        let fuel = Fuel::default();
        let fam = Family::constant(hilbert());
        let q = OutcomeFn::with_modulus(2, |a: &Seq<Value>| {
            Ok(Outcome::from_bool(a.at(0)?.is_tt() && !a.at(1)?.is_tt()))
        });
        for l in [LengthFn::constant(0), LengthFn::constant(3), LengthFn::identity()] {
            let w = main_spec_witness(&fam, &l, &q, &fuel).unwrap();
            for row in w.check().unwrap() {
                assert!(row.selection_holds && row.outcome_holds, "{row:?}");
            }
        }
    }
}
