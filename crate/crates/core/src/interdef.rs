//! Recursors defined from one another.
//!
//! Each struct here wraps a source recursor and implements a target recursor
//! trait by encoding the target's arguments into the source's types, running
//! the source once, and decoding the answer. Wrapping [`Native`] gives a
//! derived recursor that can be compared against the native target; wrapping
//! another translation gives a chain.
//!
//! [`Native`]: crate::barrec::Native

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use crate::barrec::{
    Br, DepEps, DepEpq, DepIps, DepMbr, Epq, Eps, Ips, LengthFn, Mbr, MbrPrime, OmegaFn, Sbr,
    SeqSelectionFamily,
};
use crate::error::{EvalError, EvalResult};
use crate::fuel::Fuel;
use crate::selection::{
    pred, DepQuantifierFamily, DepSelectionFamily, DepSkewedFamily, Family, PathFamily, Pred,
    Quantifier, QuantifierFamily, Selection, SelectionFamily, SkewedFamily, SkewedSelection,
};
use crate::seqcore::{Ground, OutcomeFn, Path, Seq};
use crate::spector::chi_plus;

/// A function from finite paths, used as a sequence element.
pub struct PathFn<X, O>(Rc<dyn Fn(&Path<X>) -> EvalResult<O>>);

impl<X, O> Clone for PathFn<X, O> {
    fn clone(&self) -> Self {
        PathFn(Rc::clone(&self.0))
    }
}

impl<X: 'static, O: 'static> PathFn<X, O> {
    pub fn new(f: impl Fn(&Path<X>) -> EvalResult<O> + 'static) -> Self {
        PathFn(Rc::new(f))
    }

    pub fn constant(o: O) -> Self
    where
        O: Clone,
    {
        PathFn::new(move |_| Ok(o.clone()))
    }

    pub fn call(&self, t: &Path<X>) -> EvalResult<O> {
        (self.0)(t)
    }
}

impl<X: Ground, O: Clone + 'static> PathFn<X, O> {
    /// Like [`PathFn::new`], but remembers each answer. The same function is
    /// typically consulted at the same path many times over while an outer
    /// recursion re-decodes its argument.
    pub fn memoized(f: impl Fn(&Path<X>) -> EvalResult<O> + 'static) -> Self {
        let seen: RefCell<Vec<(Path<X>, O)>> = RefCell::new(Vec::new());
        PathFn::new(move |t: &Path<X>| {
            let hit = seen.borrow().iter().find_map(|(k, o)| {
                let same = k.len() == t.len() && k.iter().zip(t.iter()).all(|(a, b)| a.same(b));
                same.then(|| o.clone())
            });
            if let Some(o) = hit {
                return Ok(o);
            }
            let o = f(t)?;
            seen.borrow_mut().push((t.clone(), o.clone()));
            Ok(o)
        })
    }
}

impl<X: 'static, O: Ground> Ground for PathFn<X, O> {
    fn zero() -> Self {
        PathFn::new(|_| Ok(O::zero()))
    }

    fn same(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }
}

impl<X, O> fmt::Debug for PathFn<X, O> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PathFn(..)")
    }
}

/// A payload with a boolean tag telling genuine entries from padding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flagged<P> {
    pub flag: bool,
    pub payload: P,
}

impl<P: Ground> Ground for Flagged<P> {
    fn zero() -> Self {
        Flagged {
            flag: false,
            payload: P::zero(),
        }
    }

    fn same(&self, other: &Self) -> bool {
        self.flag == other.flag && self.payload.same(&other.payload)
    }
}

/// A non-empty finite block of values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chunk<X>(Rc<[X]>);

impl<X: Clone> Chunk<X> {
    pub fn new(items: &[X]) -> EvalResult<Self> {
        if items.is_empty() {
            return Err(EvalError::ContractViolation("empty chunk".into()));
        }
        Ok(Chunk(items.into()))
    }

    /// `G(x) = ⟨x⟩`
    pub fn single(x: X) -> Self {
        Chunk(Rc::from(vec![x]))
    }

    pub fn items(&self) -> &[X] {
        &self.0
    }
}

impl<X: Ground> Ground for Chunk<X> {
    fn zero() -> Self {
        Chunk::single(X::zero())
    }

    fn same(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(other.0.iter()).all(|(a, b)| a.same(b))
    }
}

impl<X: fmt::Debug> fmt::Debug for Chunk<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// `X ⊎ R`
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tagged<X, R> {
    Plain(X),
    Res(R),
}

impl<X: Ground, R: Clone + 'static> Ground for Tagged<X, R> {
    fn zero() -> Self {
        Tagged::Plain(X::zero())
    }

    fn same(&self, other: &Self) -> bool {
        match (self, other) {
            (Tagged::Plain(a), Tagged::Plain(b)) => a.same(b),
            _ => false,
        }
    }
}

impl<X: Ground, R> Tagged<X, R> {
    /// The `X` component, or `0` for a result cell.
    pub fn check(&self) -> X {
        match self {
            Tagged::Plain(x) => x.clone(),
            Tagged::Res(_) => X::zero(),
        }
    }
}

// ---------------------------------------------------------------------------
// Course-of-values decoding for path-indexed families.

/// `α^s(i) = α(i)(s * ᾱ^s i)`
pub fn s_construction<X: Ground>(alpha: &Seq<PathFn<X, X>>, s: &Path<X>) -> Seq<X> {
    let alpha = alpha.clone();
    let s = s.clone();
    Seq::from_history(move |i, prev: &[X]| alpha.at(i)?.call(&s.concat(prev)))
}

/// `ε̃_k(P) = λt. ε_t(λy. P(λ_. y))`, one simple selection per position that
/// defers the choice until the path is known.
pub fn lift_dep_selections<X: Ground, R: Clone + 'static>(
    family: &DepSelectionFamily<X, R>,
) -> SelectionFamily<PathFn<X, X>, R> {
    let fam = family.clone();
    let sel = Selection::new(move |p: &Pred<PathFn<X, X>, R>| {
        let fam = fam.clone();
        let p = Rc::clone(p);
        Ok(PathFn::memoized(move |t: &Path<X>| {
            let p = Rc::clone(&p);
            fam.at(t)
                .apply(&pred(move |y: &X| p(&PathFn::constant(y.clone()))))
        }))
    });
    Family::constant(sel)
}

/// `q^s(α) = q(α^s)`
fn outcome_via_s<X: Ground, R: Clone + 'static>(
    q: &OutcomeFn<X, R>,
    s: &Path<X>,
) -> OutcomeFn<PathFn<X, X>, R> {
    let (q1, s) = (q.clone(), s.clone());
    let f = move |a: &Seq<PathFn<X, X>>| q1.apply(&s_construction(a, &s));
    match q.modulus() {
        Some(d) => OutcomeFn::with_modulus(d, f),
        None => OutcomeFn::new(f),
    }
}

// ---------------------------------------------------------------------------

/// `eps` from `epq`, using `R' = Seq X`:
/// `eps_n(q) = (epq_n^{l∘q^n}(φ^{ε,q^n})(f^n))^n`.
#[derive(Clone, Copy, Debug, Default)]
pub struct EpsViaEpq<E>(pub E);

/// Same construction with the final shift off by one. Only used to check
/// that the comparison harness catches a wrong translation.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, Default)]
pub struct EpsViaEpqOffByOne<E>(pub E);

fn eps_via_epq_shifted<E: Epq, X: Ground, R: Clone + 'static>(
    source: &E,
    n: usize,
    shift: usize,
    family: &SelectionFamily<X, R>,
    l: &LengthFn<R>,
    q: &OutcomeFn<X, R>,
    fuel: &Fuel,
) -> EvalResult<Seq<X>> {
    let qn = q.shifted(n);
    let phi = {
        let (family, qn) = (family.clone(), qn.clone());
        Family::new(move |i| {
            let (eps_i, qn) = (family.at(i), qn.clone());
            Quantifier::new(move |p: &Pred<X, Seq<X>>| {
                let (qn, p2) = (qn.clone(), Rc::clone(p));
                let x = eps_i.apply(&pred(move |x: &X| qn.apply(&p2(x)?)))?;
                p(&x)
            })
        })
    };
    let l2 = {
        let qn = qn.clone();
        l.compose(move |alpha: &Seq<X>| qn.apply(alpha))
    };
    let pad = vec![X::zero(); n];
    let f = OutcomeFn::new(move |alpha: &Seq<X>| Ok(alpha.prepend(&pad)));
    Ok(source.epq(n, &phi, &l2, &f, fuel)?.shift(shift))
}

impl<E: Epq> Eps for EpsViaEpq<E> {
    fn eps<X: Ground, R: Clone + 'static>(
        &self,
        n: usize,
        family: &SelectionFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        eps_via_epq_shifted(&self.0, n, n, family, l, q, fuel)
    }
}

impl<E: Epq> Eps for EpsViaEpqOffByOne<E> {
    fn eps<X: Ground, R: Clone + 'static>(
        &self,
        n: usize,
        family: &SelectionFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        eps_via_epq_shifted(&self.0, n, n + 1, family, l, q, fuel)
    }
}

/// `EPS` from `eps` over path-function elements:
/// `EPS_s(q) = (eps_{|s|}(ε̃)(q^s))^s`.
#[derive(Clone, Copy, Debug, Default)]
pub struct EpsDepViaEps<E>(pub E);

impl<E: Eps> DepEps for EpsDepViaEps<E> {
    fn eps_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSelectionFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        let lifted = lift_dep_selections(family);
        let alpha = self.0.eps(s.len(), &lifted, l, &outcome_via_s(q, s), fuel)?;
        Ok(s_construction(&alpha, s))
    }
}

/// `EPQ` from `BR`: `EPQ_s(q) = BR_s^{l∘q^{|s|}}(φ)(q^{|s|})`.
#[derive(Clone, Copy, Debug, Default)]
pub struct EpqDepViaBr<B>(pub B);

impl<B: Br> DepEpq for EpqDepViaBr<B> {
    fn epq_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepQuantifierFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<R> {
        let qs = q.shifted(s.len());
        let omega = {
            let (l, qs) = (l.clone(), qs.clone());
            OmegaFn::new(move |alpha| l.apply(&qs.apply(alpha)?))
        };
        self.0.br(s, family, &omega, &qs, fuel)
    }
}

/// `SBR` from `EPS` with `R = Seq × ℕ` and `l` the second projection:
/// `SBR_s = s * EPS_s(ε̃)((q^ω)_s)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SbrViaEpsDep<E>(pub E);

impl<E: DepEps> Sbr for SbrViaEpsDep<E> {
    fn sbr<X: Ground>(
        &self,
        s: &Path<X>,
        family: &SeqSelectionFamily<X>,
        omega: &OmegaFn<X>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        let lifted = {
            let family = family.clone();
            PathFamily::new(move |t: &Path<X>| {
                family.at(t).pull_back(|r: &(Seq<X>, usize)| Ok(r.0.clone()))
            })
        };
        let q = {
            let omega = omega.clone();
            OutcomeFn::new(move |alpha: &Seq<X>| Ok((alpha.clone(), omega.apply(alpha)?)))
        };
        let l = LengthFn::new(|r: &(Seq<X>, usize)| Ok(r.1));
        let tail = self.0.eps_dep(s, &lifted, &l, &q.restrict(s), fuel)?;
        Ok(tail.prepend(s))
    }
}

/// `IPS` from `ips`: `IPS_s(q) = (ips_{|s|}(ε̃)(q^s))^s`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IpsDepViaIps<I>(pub I);

impl<I: Ips> DepIps for IpsDepViaIps<I> {
    fn ips_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSelectionFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        let lifted = lift_dep_selections(family);
        let alpha = self.0.ips(s.len(), &lifted, &outcome_via_s(q, s), fuel)?;
        Ok(s_construction(&alpha, s))
    }
}

// ---------------------------------------------------------------------------
// MBR from mbr: flagged path-to-tail functions.

/// Element type of the encoding: a flag and a path-indexed tail.
pub type TailCell<X> = Flagged<PathFn<X, Seq<X>>>;

/// `x̂ = (tt, λ_. x * 0̄)`
pub fn hat<X: Ground>(x: &X) -> TailCell<X> {
    let tail = Seq::cons(x.clone(), &Seq::zero());
    Flagged {
        flag: true,
        payload: PathFn::constant(tail),
    }
}

/// `α^[s]`: at each index, continue the tail produced by the most recent
/// `tt`-flagged cell, applied to the path decoded so far.
pub fn bracket_decode<X: Ground>(alpha: &Seq<TailCell<X>>, s: &Path<X>) -> Seq<X> {
    let alpha = alpha.clone();
    let s = s.clone();
    let tails: RefCell<HashMap<usize, Seq<X>>> = RefCell::new(HashMap::new());
    Seq::from_history(move |i, prev: &[X]| {
        let mut start = None;
        for n in (0..=i).rev() {
            let cell = alpha.at(n)?;
            if cell.flag {
                start = Some((n, cell.payload));
                break;
            }
        }
        let Some((n, g)) = start else {
            return Ok(X::zero());
        };
        let cached = tails.borrow().get(&n).cloned();
        let tail = match cached {
            Some(t) => t,
            None => {
                let t = g.call(&s.concat(&prev[..n]))?;
                tails.borrow_mut().insert(n, t.clone());
                t
            }
        };
        tail.at(i - n)
    })
}

/// `q^[s](α) = q(α^[s])`
fn outcome_via_bracket<X: Ground, R: Clone + 'static>(
    q: &OutcomeFn<X, R>,
    s: &Path<X>,
) -> OutcomeFn<TailCell<X>, R> {
    let (q1, s) = (q.clone(), s.clone());
    let f = move |a: &Seq<TailCell<X>>| q1.apply(&bracket_decode(a, &s));
    match q.modulus() {
        Some(d) => OutcomeFn::with_modulus(d, f),
        None => OutcomeFn::new(f),
    }
}

/// `MBR` from `mbr`: `MBR_s(q) = (mbr_{|s|}(ε̃)(q^[s]))^[s]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct MbrDepViaMbr<M>(pub M);

impl<M: Mbr> DepMbr for MbrDepViaMbr<M> {
    fn mbr_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSkewedFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        let fam = family.clone();
        let skewed = SkewedSelection::new(move |p: &Pred<TailCell<X>, R>| {
            let (fam, p) = (fam.clone(), Rc::clone(p));
            let head = Flagged {
                flag: true,
                payload: PathFn::memoized(move |t: &Path<X>| {
                    let p = Rc::clone(&p);
                    fam.at(t).apply(&pred(move |x: &X| p(&hat(x))))
                }),
            };
            Ok(Seq::cons(head, &Seq::zero()))
        });
        let alpha = self
            .0
            .mbr(s.len(), &Family::constant(skewed), &outcome_via_bracket(q, s), fuel)?;
        Ok(bracket_decode(&alpha, s))
    }
}

/// `MBR′` from `MBR`: `MBR′_s(q) = s * MBR_s(q_s)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct MbrPrimeViaMbr<M>(pub M);

impl<M: DepMbr> MbrPrime for MbrPrimeViaMbr<M> {
    fn mbr_prime<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSkewedFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        Ok(self.0.mbr_dep(s, family, &q.restrict(s), fuel)?.prepend(s))
    }
}

/// `MBR` from `MBR′`: `MBR_s(q) = MBR′_⟨⟩(λt. ε_{s*t})(q)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct MbrDepViaMbrPrime<M>(pub M);

impl<M: MbrPrime> DepMbr for MbrDepViaMbrPrime<M> {
    fn mbr_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSkewedFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        self.0.mbr_prime(&Path::empty(), &family.rebased(s), q, fuel)
    }
}

// ---------------------------------------------------------------------------
// mbr from ips: each position holds a whole flagged row.

/// `x̂ = (tt, x), (tt, 0), (tt, 0), …`
pub fn hat_row<X: Ground>(x: &X) -> Seq<Flagged<X>> {
    let first = Flagged {
        flag: true,
        payload: x.clone(),
    };
    let rest = Flagged {
        flag: true,
        payload: X::zero(),
    };
    Seq::cons(first, &Seq::constant(rest))
}

/// `α̃`: read row heads while they are `tt`-flagged, then follow the first
/// `ff`-flagged row to the end.
pub fn flatten_rows<X: Ground>(alpha: &Seq<Seq<Flagged<X>>>) -> Seq<X> {
    let alpha = alpha.clone();
    Seq::from_fn(move |j| {
        for k in 0..j {
            let row = alpha.at(k)?;
            if !row.at(0)?.flag {
                return Ok(row.at(j - k)?.payload);
            }
        }
        Ok(alpha.at(j)?.at(0)?.payload)
    })
}

/// `mbr` from `ips`: `mbr_i(q) = (ips_i(ε̃)(q̃)(0))¹`.
#[derive(Clone, Copy, Debug, Default)]
pub struct MbrViaIps<I>(pub I);

impl<I: Ips> Mbr for MbrViaIps<I> {
    fn mbr<X: Ground, R: Clone + 'static>(
        &self,
        n: usize,
        family: &SkewedFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        let lifted = {
            let family = family.clone();
            Family::new(move |i| {
                let eps_i = family.at(i);
                Selection::new(move |f: &Pred<Seq<Flagged<X>>, R>| {
                    let f = Rc::clone(f);
                    let row = eps_i.apply(&pred(move |x: &X| f(&hat_row(x))))?;
                    Ok(row.map(|x: &X| Flagged {
                        flag: false,
                        payload: x.clone(),
                    }))
                })
            })
        };
        let q_tilde = {
            let q1 = q.clone();
            let f = move |a: &Seq<Seq<Flagged<X>>>| q1.apply(&flatten_rows(a));
            match q.modulus() {
                Some(d) => OutcomeFn::with_modulus(d, f),
                None => OutcomeFn::new(f),
            }
        };
        let rows = self.0.ips(n, &lifted, &q_tilde, fuel)?;
        Ok(Seq::lazy(move || Ok(rows.at(0)?.map(|c: &Flagged<X>| c.payload.clone()))))
    }
}

// ---------------------------------------------------------------------------
// IPS from MBR: chunked sequences.

/// `F`: concatenation of an infinite sequence of chunks.
pub fn concat_chunks<X: Ground>(alpha: &Seq<Chunk<X>>) -> Seq<X> {
    let alpha = alpha.clone();
    Seq::from_fn(move |i| {
        let mut offset = i;
        let mut k = 0;
        loop {
            let chunk = alpha.at(k)?;
            if offset < chunk.items().len() {
                return Ok(chunk.items()[offset].clone());
            }
            offset -= chunk.items().len();
            k += 1;
        }
    })
}

/// `F*`: concatenation of a finite sequence of chunks.
pub fn concat_path<X: Clone>(chunks: &[Chunk<X>]) -> Path<X> {
    chunks.iter().flat_map(|c| c.items().iter().cloned()).collect()
}

/// `G*`: each value as a singleton chunk.
pub fn singletons<X: Clone>(s: &[X]) -> Path<Chunk<X>> {
    s.iter().cloned().map(Chunk::single).collect()
}

/// `ν_r(P)(i) = G(ε_{F*(r * t^i)}(λx. P(⟨F*(t^i) * x⟩)))` with `t^i` the first
/// `i` chunks already produced.
pub fn chunk_selections<X: Ground, R: Clone + 'static>(
    family: &DepSelectionFamily<X, R>,
) -> DepSkewedFamily<Chunk<X>, R> {
    let family = family.clone();
    PathFamily::new(move |r: &Path<Chunk<X>>| {
        let (family, base) = (family.clone(), concat_path(r));
        SkewedSelection::new(move |p: &Pred<Chunk<X>, R>| {
            let (family, base, p) = (family.clone(), base.clone(), Rc::clone(p));
            Ok(Seq::from_history(move |_, prev: &[Chunk<X>]| {
                let done = concat_path(prev);
                let (p, done2) = (Rc::clone(&p), done.clone());
                let x = family.at(&base.concat(&done)).apply(&pred(move |x: &X| {
                    p(&Chunk::new(&done2.snoc(x.clone()))?)
                }))?;
                Ok(Chunk::single(x))
            }))
        })
    })
}

/// `IPS` from `MBR` over chunks: `IPS_s(q) = F(MBR_{G*(s)}(ν)(q ∘ F))`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IpsDepViaMbr<M>(pub M);

impl<M: DepMbr> DepIps for IpsDepViaMbr<M> {
    fn ips_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepSelectionFamily<X, R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<Seq<X>> {
        let q_tilde = {
            let q1 = q.clone();
            let f = move |a: &Seq<Chunk<X>>| q1.apply(&concat_chunks(a));
            match q.modulus() {
                Some(d) => OutcomeFn::with_modulus(d, f),
                None => OutcomeFn::new(f),
            }
        };
        let nu = chunk_selections(family);
        let chunks = self.0.mbr_dep(&singletons(s), &nu, &q_tilde, fuel)?;
        Ok(concat_chunks(&chunks))
    }
}

// ---------------------------------------------------------------------------
// EPQ from IPS: quantifiers as selections on X ⊎ R.

/// `ψ̃_t(F) = inj_R(ψ_ť(λx. F(inj_X x)))`
pub fn tagged_selections<X: Ground, R: Clone + 'static>(
    family: &DepQuantifierFamily<X, R>,
) -> DepSelectionFamily<Tagged<X, R>, R> {
    let family = family.clone();
    PathFamily::new(move |t: &Path<Tagged<X, R>>| {
        let psi = family.at(&t.map(Tagged::check));
        Selection::new(move |f: &Pred<Tagged<X, R>, R>| {
            let f = Rc::clone(f);
            Ok(Tagged::Res(psi.apply(&pred(move |x: &X| f(&Tagged::Plain(x.clone()))))?))
        })
    })
}

/// `q^{l,s}`: find the first stopping point `n` of `l ∘ q` on the plain
/// reading of `α`; return the first result cell before `n` if there is one,
/// otherwise `q` on the zero extension of the first `n` values.
pub fn stopping_outcome<X: Ground, R: Clone + 'static>(
    q: &OutcomeFn<X, R>,
    l: &LengthFn<R>,
    depth: usize,
) -> OutcomeFn<Tagged<X, R>, R> {
    let omega = {
        let (q, l) = (q.clone(), l.clone());
        OmegaFn::new(move |beta| l.apply(&q.apply(beta)?))
    };
    let q = q.clone();
    OutcomeFn::new(move |alpha: &Seq<Tagged<X, R>>| {
        let plain = alpha.map(Tagged::check);
        let n = chi_plus(depth, &omega, &plain)?;
        for i in 0..n {
            if let Tagged::Res(a) = alpha.at(i)? {
                return Ok(a);
            }
        }
        q.apply(&plain.init_seg_zero(n)?)
    })
}

/// `EPQ` from `IPS`: `EPQ_s(q) = q^{l,s}(IPS_{s̃}(ψ̃)(q^{l,s}))`.
///
/// Relies on `l ∘ q` being bounded, so the stopping search always succeeds.
#[derive(Clone, Copy, Debug, Default)]
pub struct EpqDepViaIps<I>(pub I);

impl<I: DepIps> DepEpq for EpqDepViaIps<I> {
    fn epq_dep<X: Ground, R: Clone + 'static>(
        &self,
        s: &Path<X>,
        family: &DepQuantifierFamily<X, R>,
        l: &LengthFn<R>,
        q: &OutcomeFn<X, R>,
        fuel: &Fuel,
    ) -> EvalResult<R> {
        let qls = stopping_outcome(q, l, s.len());
        let s_tagged: Path<Tagged<X, R>> = s.map(|x| Tagged::Plain(x.clone()));
        let alpha = self.0.ips_dep(&s_tagged, &tagged_selections(family), &qls, fuel)?;
        qls.apply(&alpha)
    }
}

/// Adapts a position-indexed quantifier family for `EPQ`-style callers.
pub fn quantifiers_by_length<X: Ground, R: Clone + 'static>(
    family: &QuantifierFamily<X, R>,
) -> DepQuantifierFamily<X, R> {
    PathFamily::from_family(family)
}
