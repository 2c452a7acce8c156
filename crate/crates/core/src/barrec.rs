//! The bar-recursive combinators, each implemented straight from its
//! defining equation.
//!
//! Every recursor comes as a trait so that translated implementations (see
//! [`crate::interdef`]) can stand in wherever a native one is expected. The
//! unit struct [`Native`] implements all of them.
//!
//! Sequence-valued recursors return lazily evaluated [`Seq`]s. The stopping
//! tests of `eps`/`EPS` are evaluated eagerly; everything below a branch is
//! deferred until read. `ips`, `IPS`, `mbr` and `MBR` have no stopping test at
//! all and only terminate because the outcome function stops reading.

use std::fmt;
use std::rc::Rc;

use crate::error::{EvalError, EvalResult};
use crate::fuel::Fuel;
use crate::selection::{
    pred, DepQuantifierFamily, Family, Pred, DepSelectionFamily, DepSkewedFamily, PathFamily, Quantifier,
    QuantifierFamily, Selection, SelectionFamily, SkewedFamily,
};
use crate::seqcore::{Ground, Outcome, OutcomeFn, Path, Seq};

/// `l : R → ℕ`, the control value extracted from an outcome.
pub struct LengthFn<R>(Rc<dyn Fn(&R) -> EvalResult<usize>>);

impl<R> Clone for LengthFn<R> {
    fn clone(&self) -> Self {
        LengthFn(Rc::clone(&self.0))
    }
}

impl<R: 'static> LengthFn<R> {
    pub fn new(f: impl Fn(&R) -> EvalResult<usize> + 'static) -> Self {
        LengthFn(Rc::new(f))
    }

    pub fn constant(n: usize) -> Self {
        LengthFn::new(move |_| Ok(n))
    }

    pub fn apply(&self, r: &R) -> EvalResult<usize> {
        (self.0)(r)
    }

    /// `l ∘ f`
    pub fn compose<S: 'static>(&self, f: impl Fn(&S) -> EvalResult<R> + 'static) -> LengthFn<S> {
        let l = self.clone();
        LengthFn::new(move |s| l.apply(&f(s)?))
    }
}

impl LengthFn<Outcome> {
    pub fn identity() -> Self {
        LengthFn::new(|r: &Outcome| Ok(r.0 as usize))
    }
}

/// `ω : Seq → ℕ` with an optional modulus and an optional bound `B`.
///
/// A declared bound turns the stopping condition of `SBR`/`BR` into a checked
/// contract: recursion from `s` can go no deeper than `B + 1`.
pub struct OmegaFn<X> {
    f: Rc<dyn Fn(&Seq<X>) -> EvalResult<usize>>,
    modulus: Option<usize>,
    bound: Option<usize>,
}

impl<X> Clone for OmegaFn<X> {
    fn clone(&self) -> Self {
        OmegaFn {
            f: Rc::clone(&self.f),
            modulus: self.modulus,
            bound: self.bound,
        }
    }
}

impl<X> fmt::Debug for OmegaFn<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OmegaFn")
            .field("modulus", &self.modulus)
            .field("bound", &self.bound)
            .finish()
    }
}

impl<X: Clone + 'static> OmegaFn<X> {
    pub fn new(f: impl Fn(&Seq<X>) -> EvalResult<usize> + 'static) -> Self {
        OmegaFn {
            f: Rc::new(f),
            modulus: None,
            bound: None,
        }
    }

    pub fn constant(b: usize) -> Self {
        OmegaFn::new(move |_| Ok(b)).with_modulus(0).with_bound(b)
    }

    pub fn with_modulus(mut self, modulus: usize) -> Self {
        self.modulus = Some(modulus);
        self
    }

    pub fn with_bound(mut self, bound: usize) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn modulus(&self) -> Option<usize> {
        self.modulus
    }

    pub fn bound(&self) -> Option<usize> {
        self.bound
    }

    pub fn apply(&self, alpha: &Seq<X>) -> EvalResult<usize> {
        let v = (self.f)(alpha)?;
        match self.bound {
            Some(b) if v > b => Err(EvalError::ContractViolation(format!(
                "omega returned {v}, above its bound {b}"
            ))),
            _ => Ok(v),
        }
    }

    /// `λβ. ω(β) ∸ k`
    pub fn monus(&self, k: usize) -> Self {
        let inner = self.clone();
        OmegaFn {
            f: Rc::new(move |a| Ok(inner.apply(a)?.saturating_sub(k))),
            modulus: self.modulus,
            bound: self.bound.map(|b| b.saturating_sub(k)),
        }
    }
}

/// Selections whose outcomes are whole sequences, as consumed by `SBR`.
pub type SeqSelectionFamily<X> = PathFamily<X, Selection<X, Seq<X>>>;

pub trait Eps {
    fn eps<X: Ground, R: Clone + 'static>(
        &self,
        n: usize,
        family: &SelectionFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>>;
}

pub trait Epq {
    fn epq<X: Ground, R: Clone + 'static>(
        &self,
        n: usize,
        family: &QuantifierFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<R>;
}

/// Dependent explicitly controlled product of selections (`EPS`).
pub trait DepEps {
    fn eps_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSelectionFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>>;
}

/// Dependent explicitly controlled product of quantifiers (`EPQ`).
pub trait DepEpq {
    fn epq_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepQuantifierFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<R>;
}

pub trait Ips {
    fn ips<X: Ground, R: Clone + 'static>(
        &self,
        n: usize,
        family: &SelectionFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>>;
}

/// Dependent implicitly controlled product (`IPS`).
pub trait DepIps {
    fn ips_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSelectionFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>>;
}

pub trait Mbr {
    fn mbr<X: Ground, R: Clone + 'static>(
        &self,
        n: usize,
        family: &SkewedFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>>;
}

/// Dependent iterated skewed product (`MBR`).
pub trait DepMbr {
    fn mbr_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSkewedFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>>;
}

/// Modified bar recursion on full sequences (`MBR′`).
pub trait MbrPrime {
    fn mbr_prime<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSkewedFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>>;
}

/// Spector's restricted bar recursion.
pub trait Sbr {
    fn sbr<X: Ground>(
        &self,
        s: &Path<X>,
        family: &SeqSelectionFamily<X>,
        omega: &OmegaFn<X>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>>;
}

/// General bar recursion with a quantifier family.
pub trait Br {
    fn br<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepQuantifierFamily<X, R>,
        omega: &OmegaFn<X>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<R>;
}

/// Direct implementations of every recursor.
#[derive(Clone, Copy, Debug, Default)]
pub struct Native;

fn stops<X: Ground, R: Clone + 'static>(
    l: &LengthFn<R>,
    q: &OutcomeFn<X, R>,
    depth: usize,
) -> EvalResult<Option<R>> {
    let r = q.apply(&Seq::zero())?;
    Ok(if l.apply(&r)? < depth { Some(r) } else { None })
}

pub fn eps<X: Ground, R: Clone + 'static>(
    n: usize,
    family: &SelectionFamily<X, R>,
    l: &LengthFn<R>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<Seq<X>> {
    fuel.unfold(|| {
        if stops(l, q, n)?.is_some() {
            return Ok(Seq::zero());
        }
        let (fam, l1, q1, f1) = (family.clone(), l.clone(), q.clone(), fuel.clone());
        let head = move || {
            let (fam2, l2, q2, f2) = (fam.clone(), l1.clone(), q1.clone(), f1.clone());
            fam.at(n).apply(&pred(move |x: &X| {
                let qx = q2.restrict_one(x);
                qx.apply(&eps(n + 1, &fam2, &l2, &qx, &f2)?)
            }))
        };
        let (fam, l, q, fuel) = (family.clone(), l.clone(), q.clone(), fuel.clone());
        let tail = move |c: &X| eps(n + 1, &fam, &l, &q.restrict_one(c), &fuel);
        Ok(Seq::cons_lazy(head, tail))
    })
}

pub fn epq<X: Ground, R: Clone + 'static>(
    n: usize,
    family: &QuantifierFamily<X, R>,
    l: &LengthFn<R>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<R> {
    fuel.unfold(|| {
        if let Some(r) = stops(l, q, n)? {
            return Ok(r);
        }
        let (fam, l2, q2, f2) = (family.clone(), l.clone(), q.clone(), fuel.clone());
        family.at(n).apply(&pred(move |x: &X| {
            epq(n + 1, &fam, &l2, &q2.restrict_one(x), &f2)
        }))
    })
}

pub fn eps_dep<X: Ground, R: Clone + 'static>(
    s: &Path<X>,
    family: &DepSelectionFamily<X, R>,
    l: &LengthFn<R>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<Seq<X>> {
    fuel.unfold(|| {
        if stops(l, q, s.len())?.is_some() {
            return Ok(Seq::zero());
        }
        let (s1, fam, l1, q1, f1) = (s.clone(), family.clone(), l.clone(), q.clone(), fuel.clone());
        let head = move || {
            let (s2, fam2, l2, q2, f2) = (s1.clone(), fam.clone(), l1.clone(), q1.clone(), f1.clone());
            fam.at(&s1).apply(&pred(move |x: &X| {
                let qx = q2.restrict_one(x);
                qx.apply(&eps_dep(&s2.snoc(x.clone()), &fam2, &l2, &qx, &f2)?)
            }))
        };
        let (s, fam, l, q, fuel) = (s.clone(), family.clone(), l.clone(), q.clone(), fuel.clone());
        let tail = move |c: &X| eps_dep(&s.snoc(c.clone()), &fam, &l, &q.restrict_one(c), &fuel);
        Ok(Seq::cons_lazy(head, tail))
    })
}

pub fn epq_dep<X: Ground, R: Clone + 'static>(
    s: &Path<X>,
    family: &DepQuantifierFamily<X, R>,
    l: &LengthFn<R>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<R> {
    fuel.unfold(|| {
        if let Some(r) = stops(l, q, s.len())? {
            return Ok(r);
        }
        let (s2, fam, l2, q2, f2) = (s.clone(), family.clone(), l.clone(), q.clone(), fuel.clone());
        family.at(s).apply(&pred(move |x: &X| {
            epq_dep(&s2.snoc(x.clone()), &fam, &l2, &q2.restrict_one(x), &f2)
        }))
    })
}

pub fn ips<X: Ground, R: Clone + 'static>(
    n: usize,
    family: &SelectionFamily<X, R>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<Seq<X>> {
    fuel.unfold(|| {
        let (fam, q1, f1) = (family.clone(), q.clone(), fuel.clone());
        let head = move || {
            let (fam2, q2, f2) = (fam.clone(), q1.clone(), f1.clone());
            fam.at(n).apply(&pred(move |x: &X| {
                let qx = q2.restrict_one(x);
                qx.apply(&ips(n + 1, &fam2, &qx, &f2)?)
            }))
        };
        let (fam, q, fuel) = (family.clone(), q.clone(), fuel.clone());
        let tail = move |c: &X| ips(n + 1, &fam, &q.restrict_one(c), &fuel);
        Ok(Seq::cons_lazy(head, tail))
    })
}

pub fn ips_dep<X: Ground, R: Clone + 'static>(
    s: &Path<X>,
    family: &DepSelectionFamily<X, R>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<Seq<X>> {
    fuel.unfold(|| {
        let (s1, fam, q1, f1) = (s.clone(), family.clone(), q.clone(), fuel.clone());
        let head = move || {
            let (s2, fam2, q2, f2) = (s1.clone(), fam.clone(), q1.clone(), f1.clone());
            fam.at(&s1).apply(&pred(move |x: &X| {
                let qx = q2.restrict_one(x);
                qx.apply(&ips_dep(&s2.snoc(x.clone()), &fam2, &qx, &f2)?)
            }))
        };
        let (s, fam, q, fuel) = (s.clone(), family.clone(), q.clone(), fuel.clone());
        let tail = move |c: &X| ips_dep(&s.snoc(c.clone()), &fam, &q.restrict_one(c), &fuel);
        Ok(Seq::cons_lazy(head, tail))
    })
}

/// The naive implicitly controlled product of quantifiers,
/// `ipq_n(φ)(q) = φ_n(λx. ipq_{n+1}(φ)(q_x))`.
///
/// It has no base case, so it only returns if the quantifiers never consult
/// their predicate. For `φ_n(p) = 1 + p(0)` it unfolds forever and always ends
/// in [`EvalError::FuelExhausted`].
pub fn ipq_diverging<X: Ground, R: Clone + 'static>(
    n: usize,
    family: &QuantifierFamily<X, R>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<R> {
    fuel.unfold(|| {
        let (fam, q2, f2) = (family.clone(), q.clone(), fuel.clone());
        family.at(n).apply(&pred(move |x: &X| {
            ipq_diverging(n + 1, &fam, &q2.restrict_one(x), &f2)
        }))
    })
}

pub fn mbr<X: Ground, R: Clone + 'static>(
    n: usize,
    family: &SkewedFamily<X, R>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<Seq<X>> {
    fuel.unfold(|| {
        let (fam, q1, f1) = (family.clone(), q.clone(), fuel.clone());
        Ok(Seq::lazy(move || {
            let (fam2, q2, f2) = (fam.clone(), q1.clone(), f1.clone());
            fam.at(n).apply(&pred(move |x: &X| {
                let qx = q2.restrict_one(x);
                qx.apply(&mbr(n + 1, &fam2, &qx, &f2)?)
            }))
        }))
    })
}

pub fn mbr_dep<X: Ground, R: Clone + 'static>(
    s: &Path<X>,
    family: &DepSkewedFamily<X, R>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<Seq<X>> {
    fuel.unfold(|| {
        let (s1, fam, q1, f1) = (s.clone(), family.clone(), q.clone(), fuel.clone());
        Ok(Seq::lazy(move || {
            let (s2, fam2, q2, f2) = (s1.clone(), fam.clone(), q1.clone(), f1.clone());
            fam.at(&s1).apply(&pred(move |x: &X| {
                let qx = q2.restrict_one(x);
                qx.apply(&mbr_dep(&s2.snoc(x.clone()), &fam2, &qx, &f2)?)
            }))
        }))
    })
}

pub fn mbr_prime<X: Ground, R: Clone + 'static>(
    s: &Path<X>,
    family: &DepSkewedFamily<X, R>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<Seq<X>> {
    fuel.unfold(|| {
        let (s1, fam, q1, f1) = (s.clone(), family.clone(), q.clone(), fuel.clone());
        let rest = Seq::lazy(move || {
            let (s2, fam2, q2, f2) = (s1.clone(), fam.clone(), q1.clone(), f1.clone());
            fam.at(&s1).apply(&pred(move |x: &X| {
                q2.apply(&mbr_prime(&s2.snoc(x.clone()), &fam2, &q2, &f2)?)
            }))
        });
        Ok(rest.prepend(s))
    })
}

pub fn sbr<X: Ground>(
    s: &Path<X>,
    family: &SeqSelectionFamily<X>,
    omega: &OmegaFn<X>,
    fuel: &Fuel,
) -> EvalResult<Seq<X>> {
    fuel.unfold(|| {
        if omega.apply(&Seq::zero().prepend(s))? < s.len() {
            return Ok(Seq::zero().overwrite(s));
        }
        let (s2, fam, om, f2) = (s.clone(), family.clone(), omega.clone(), fuel.clone());
        let c = family
            .at(s)
            .apply(&pred(move |x: &X| sbr(&s2.snoc(x.clone()), &fam, &om, &f2)))?;
        sbr(&s.snoc(c), family, omega, fuel)
    })
}

pub fn br<X: Ground, R: Clone + 'static>(
    s: &Path<X>,
    family: &DepQuantifierFamily<X, R>,
    omega: &OmegaFn<X>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<R> {
    fuel.unfold(|| {
        let ext = Seq::zero().prepend(s);
        if omega.apply(&ext)? < s.len() {
            return q.apply(&ext);
        }
        let (s2, fam, om, q2, f2) = (s.clone(), family.clone(), omega.clone(), q.clone(), fuel.clone());
        family.at(s).apply(&pred(move |x: &X| {
            br(&s2.snoc(x.clone()), &fam, &om, &q2, &f2)
        }))
    })
}

impl Eps for Native {
    fn eps<X: Ground, R: Clone + 'static>(
        &self,
        n: usize,
        family: &SelectionFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        eps(n, family, l, q, fuel)
    }
}

impl Epq for Native {
    fn epq<X: Ground, R: Clone + 'static>(
        &self,
        n: usize,
        family: &QuantifierFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<R> {
        epq(n, family, l, q, fuel)
    }
}

impl DepEps for Native {
    fn eps_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSelectionFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        eps_dep(s, family, l, q, fuel)
    }
}

impl DepEpq for Native {
    fn epq_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepQuantifierFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<R> {
        epq_dep(s, family, l, q, fuel)
    }
}

impl Ips for Native {
    fn ips<X: Ground, R: Clone + 'static>(
        &self,
        n: usize,
        family: &SelectionFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        ips(n, family, q, fuel)
    }
}

impl DepIps for Native {
    fn ips_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSelectionFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        ips_dep(s, family, q, fuel)
    }
}

impl Mbr for Native {
    fn mbr<X: Ground, R: Clone + 'static>(
        &self,
        n: usize,
        family: &SkewedFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        mbr(n, family, q, fuel)
    }
}

impl DepMbr for Native {
    fn mbr_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSkewedFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        mbr_dep(s, family, q, fuel)
    }
}

impl MbrPrime for Native {
    fn mbr_prime<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSkewedFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        mbr_prime(s, family, q, fuel)
    }
}

impl Sbr for Native {
    fn sbr<X: Ground>(
        &self,
        s: &Path<X>,
        family: &SeqSelectionFamily<X>,
        omega: &OmegaFn<X>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        sbr(s, family, omega, fuel)
    }
}

impl Br for Native {
    fn br<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepQuantifierFamily<X, R>,
        omega: &OmegaFn<X>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<R> {
        br(s, family, omega, q, fuel)
    }
}

/// `φ_n(p) = 1 + p(0)`: the quantifier family under which no implicitly
/// controlled product of quantifiers can exist.
pub fn successor_quantifiers<X: Ground>() -> QuantifierFamily<X, Outcome> {
    Family::constant(Quantifier::new(|p: &Pred<X, Outcome>| {
        Ok(Outcome(p(&X::zero())?.0.saturating_add(1)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::{hilbert, max_quant, SkewedSelection};
    use crate::seqcore::Value;

    fn tt() -> Value {
        Value(1)
    }

    fn codes(s: &Seq<Value>, n: usize) -> Vec<u32> {
        s.prefix(n).unwrap().iter().map(|v| v.0).collect()
    }

    fn path(codes: &[u32]) -> Path<Value> {
        codes.iter().map(|&c| Value(c)).collect()
    }

    fn and2() -> OutcomeFn<Value, Outcome> {
        OutcomeFn::with_modulus(2, |a: &Seq<Value>| {
            Ok(Outcome::from_bool(a.at(0)?.is_tt() && a.at(1)?.is_tt()))
        })
    }

    /// Picks the first `x` with `p(x) = 0`, else `ff`.
    fn zero_seeker() -> Selection<Value, Outcome> {
        Selection::new(|p: &Pred<Value, Outcome>| {
            for x in [Value(0), Value(1)] {
                if p(&x)?.0 == 0 {
                    return Ok(x);
                }
            }
            Ok(Value(0))
        })
    }

    #[test]
    fn eps_examples() {
        let fuel = Fuel::default();
        let q0 = OutcomeFn::constant(Outcome(0));
        let fam = Family::constant(zero_seeker());
        let got = eps(1, &fam, &LengthFn::identity(), &q0, &fuel).unwrap();
        assert_eq!(codes(&got, 10), vec![0; 10]);

        let q = OutcomeFn::with_modulus(1, |a: &Seq<Value>| {
            Ok(Outcome(if a.at(0)?.is_tt() { 0 } else { 1 }))
        });
        let got = eps(0, &fam, &LengthFn::identity(), &q, &fuel).unwrap();
        assert_eq!(codes(&got, 6), vec![1, 0, 0, 0, 0, 0]);

        for n in 1..4 {
            let got = eps(n, &fam, &LengthFn::constant(0), &and2(), &fuel).unwrap();
            assert_eq!(codes(&got, 10), vec![0; 10]);
        }
    }

    #[test]
    fn epq_examples() {
        let fuel = Fuel::default();
        let ex = Family::constant(max_quant(2));
        let r = epq(2, &ex, &LengthFn::constant(0), &OutcomeFn::constant(Outcome(1)), &fuel);
        assert_eq!(r.unwrap(), Outcome(1));
        // With l ≡ 0 the recursion stops at depth 1: ∃x (x ∧ 0) = ff.
        let r = epq(0, &ex, &LengthFn::constant(0), &and2(), &fuel).unwrap();
        assert_eq!(r, Outcome(0));
        // With l ≡ 1 it unfolds twice: ∃x∃y (x ∧ y) = tt.
        let r = epq(0, &ex, &LengthFn::constant(1), &and2(), &fuel).unwrap();
        assert_eq!(r, Outcome(1));
        let r = epq(0, &ex, &LengthFn::constant(1), &OutcomeFn::constant(Outcome(0)), &fuel);
        assert_eq!(r.unwrap(), Outcome(0));
    }

    #[test]
    fn dependent_base_cases() {
        let fuel = Fuel::default();
        let fam = PathFamily::from_family(&Family::constant(hilbert()));
        let s = path(&[1]);
        let got = eps_dep(&s, &fam, &LengthFn::constant(0), &and2(), &fuel).unwrap();
        assert_eq!(codes(&got, 8), vec![0; 8]);
        let qfam = PathFamily::from_family(&Family::constant(max_quant(2)));
        let q = OutcomeFn::with_modulus(1, |a: &Seq<Value>| Ok(Outcome(1 - a.at(0)?.0)));
        let r = epq_dep(&s, &qfam, &LengthFn::constant(0), &q, &fuel).unwrap();
        assert_eq!(r, Outcome(1));
    }

    #[test]
    fn ips_examples() {
        let fuel = Fuel::default();
        let got = ips(0, &Family::constant(hilbert()), &and2(), &fuel).unwrap();
        assert_eq!(codes(&got, 10), vec![1; 10]);

        let pick2 = Selection::new(|_: &Pred<Value, Outcome>| Ok(Value(2)));
        let got = ips(3, &Family::constant(pick2), &OutcomeFn::constant(Outcome(1)), &fuel).unwrap();
        assert_eq!(codes(&got, 10), vec![2; 10]);

        let got = ips(0, &Family::constant(hilbert()), &OutcomeFn::constant(Outcome(0)), &fuel);
        assert_eq!(got.unwrap().at(0).unwrap(), Value(0));
    }

    #[test]
    fn ips_output_is_lazy() {
        // Building the sequence does no work; only reads do.
        let fuel = Fuel::new(1);
        let got = ips(0, &Family::constant(hilbert()), &and2(), &fuel).unwrap();
        assert_eq!(fuel.remaining(), 0);
        assert!(matches!(got.at(0), Err(EvalError::FuelExhausted { .. })));
    }

    fn head_then_zeros() -> SkewedSelection<Value, Outcome> {
        SkewedSelection::new(|p| Ok(Seq::cons(hilbert().apply(p)?, &Seq::zero())))
    }

    #[test]
    fn mbr_examples() {
        let fuel = Fuel::default();
        let c = Seq::constant(Value(1));
        let fam = Family::constant(SkewedSelection::new(move |_| Ok(c.clone())));
        let got = mbr(0, &fam, &and2(), &fuel).unwrap();
        assert_eq!(codes(&got, 10), vec![1; 10]);

        let q = OutcomeFn::with_modulus(1, |a: &Seq<Value>| Ok(Outcome(a.at(0)?.0)));
        let got = mbr(0, &Family::constant(head_then_zeros()), &q, &fuel).unwrap();
        assert_eq!(codes(&got, 6), vec![1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn mbr_prime_examples() {
        let fuel = Fuel::default();
        let fam = PathFamily::from_family(&Family::constant(head_then_zeros()));
        let s = path(&[0, 1, 0]);
        let got = mbr_prime(&s, &fam, &and2(), &fuel).unwrap();
        assert_eq!(got.prefix(3).unwrap(), s);

        let c = Seq::constant(Value(2));
        let fam = PathFamily::from_family(&Family::constant(SkewedSelection::new(move |_| Ok(c.clone()))));
        let got = mbr_prime(&s, &fam, &and2(), &fuel).unwrap();
        assert_eq!(codes(&got, 6), vec![0, 1, 0, 2, 2, 2]);
    }

    fn seq_selection(pick: u32) -> SeqSelectionFamily<Value> {
        PathFamily::new(move |_| Selection::new(move |_| Ok(Value(pick))))
    }

    #[test]
    fn sbr_examples() {
        let fuel = Fuel::default();
        let s = path(&[1]);
        let got = sbr(&s, &seq_selection(1), &OmegaFn::constant(0), &fuel).unwrap();
        assert_eq!(codes(&got, 4), vec![1, 0, 0, 0]);

        let got = sbr(&Path::empty(), &seq_selection(1), &OmegaFn::constant(0), &fuel).unwrap();
        assert_eq!(codes(&got, 4), vec![1, 0, 0, 0]);

        for b in 0..5 {
            let got = sbr(&Path::empty(), &seq_selection(1), &OmegaFn::constant(b), &fuel).unwrap();
            let mut want = vec![1; b + 1];
            want.extend([0; 3]);
            assert_eq!(codes(&got, b + 4), want);
        }
    }

    #[test]
    fn sbr_rejects_omega_above_bound() {
        let omega = OmegaFn::new(|_| Ok(7)).with_bound(3);
        let got = sbr(&Path::empty(), &seq_selection(1), &omega, &Fuel::default());
        assert!(matches!(got, Err(EvalError::ContractViolation(_))));
    }

    #[test]
    fn br_examples() {
        let fuel = Fuel::default();
        let ex = PathFamily::from_family(&Family::constant(max_quant(2)));
        let q = and2();
        let r = br(&path(&[1]), &ex, &OmegaFn::constant(0), &q, &fuel).unwrap();
        assert_eq!(r, q.apply(&Seq::zero().prepend(&path(&[1]))).unwrap());
        let r = br(&Path::empty(), &ex, &OmegaFn::constant(1), &q, &fuel).unwrap();
        assert_eq!(r, Outcome(1));
        let r = br(&path(&[0]), &ex, &OmegaFn::constant(0), &OutcomeFn::constant(Outcome(3)), &fuel);
        assert_eq!(r.unwrap(), Outcome(3));
    }

    #[test]
    fn ipq_exhausts_every_budget() {
        for budget in [0, 1, 10, 1000] {
            let got = ipq_diverging(0, &successor_quantifiers::<Value>(), &and2(), &Fuel::new(budget));
            assert_eq!(got, Err(EvalError::FuelExhausted { spent: budget }));
        }
        let projection = Family::constant(Quantifier::new(|p: &Pred<Value, Outcome>| p(&Value(0))));
        let got = ipq_diverging(0, &projection, &OutcomeFn::constant(Outcome(2)), &Fuel::new(100_000));
        assert!(matches!(got, Err(EvalError::FuelExhausted { .. })));
    }

    #[test]
    fn lazy_tail_not_forced_by_head() {
        let fuel = Fuel::default();
        let fam = Family::constant(hilbert());
        let q = OutcomeFn::with_modulus(1, |a: &Seq<Value>| Ok(Outcome(a.at(0)?.0)));
        let got = eps(0, &fam, &LengthFn::constant(5), &q, &fuel).unwrap();
        let before = fuel.used();
        assert_eq!(got.at(0).unwrap(), tt());
        assert!(fuel.used() > before);
    }
}
