//! Selection functions `(X → R) → X`, quantifiers `(X → R) → R`, and the
//! binary products between them.
//!
//! Pairs are represented as two-element [`Path`]s, so finite and infinite
//! products share one representation.

use std::rc::Rc;

use crate::error::{EvalError, EvalResult};
use crate::seqcore::{Outcome, Path, Seq, Value};

/// A generalised predicate `p : X → R`.
pub type Pred<X, R> = Rc<dyn Fn(&X) -> EvalResult<R>>;

pub fn pred<X, R>(f: impl Fn(&X) -> EvalResult<R> + 'static) -> Pred<X, R> {
    Rc::new(f)
}

/// `ε : (X → R) → X`
pub struct Selection<X, R>(Rc<dyn Fn(&Pred<X, R>) -> EvalResult<X>>);

/// `φ : (X → R) → R`
pub struct Quantifier<X, R>(Rc<dyn Fn(&Pred<X, R>) -> EvalResult<R>>);

/// `ε : (X → R) → Seq X`, a selection that commits to a whole tail at once.
pub struct SkewedSelection<X, R>(Rc<dyn Fn(&Pred<X, R>) -> EvalResult<Seq<X>>>);

macro_rules! functional {
    ($name:ident, $out:ty) => {
        impl<X, R> Clone for $name<X, R> {
            fn clone(&self) -> Self {
                $name(Rc::clone(&self.0))
            }
        }

        impl<X: 'static, R: 'static> $name<X, R> {
            pub fn new(f: impl Fn(&Pred<X, R>) -> EvalResult<$out> + 'static) -> Self {
                $name(Rc::new(f))
            }

            pub fn apply(&self, p: &Pred<X, R>) -> EvalResult<$out> {
                (self.0)(p)
            }

            pub fn apply_fn(&self, p: impl Fn(&X) -> EvalResult<R> + 'static) -> EvalResult<$out> {
                (self.0)(&pred(p))
            }
        }
    };
}

functional!(Selection, X);
functional!(Quantifier, R);
functional!(SkewedSelection, Seq<X>);

macro_rules! pull_back {
    ($name:ident) => {
        impl<X: 'static, R: 'static> $name<X, R> {
            /// Precomposes the predicate: `λp. self(f ∘ p)`.
            pub fn pull_back<R2: 'static>(
                &self,
                f: impl Fn(&R2) -> EvalResult<R> + 'static,
            ) -> $name<X, R2> {
                let inner = self.clone();
                let f = Rc::new(f);
                $name::new(move |p: &Pred<X, R2>| {
                    let p = Rc::clone(p);
                    let f = Rc::clone(&f);
                    inner.apply(&pred(move |x| f(&p(x)?)))
                })
            }
        }
    };
}

pull_back!(Selection);
pull_back!(SkewedSelection);

impl<X, R> std::fmt::Debug for Selection<X, R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Selection(..)")
    }
}

/// A family indexed by position, `n ↦ ε_n`.
pub struct Family<S>(Rc<dyn Fn(usize) -> S>);

/// A family indexed by the path taken so far, `s ↦ ε_s`.
pub struct PathFamily<X, S>(Rc<dyn Fn(&Path<X>) -> S>);

impl<S> Clone for Family<S> {
    fn clone(&self) -> Self {
        Family(Rc::clone(&self.0))
    }
}

impl<X, S> Clone for PathFamily<X, S> {
    fn clone(&self) -> Self {
        PathFamily(Rc::clone(&self.0))
    }
}

impl<S: 'static> Family<S> {
    pub fn new(f: impl Fn(usize) -> S + 'static) -> Self {
        Family(Rc::new(f))
    }

    pub fn constant(s: S) -> Self
    where
        S: Clone,
    {
        Family::new(move |_| s.clone())
    }

    pub fn at(&self, n: usize) -> S {
        (self.0)(n)
    }
}

impl<X: 'static, S: 'static> PathFamily<X, S> {
    pub fn new(f: impl Fn(&Path<X>) -> S + 'static) -> Self {
        PathFamily(Rc::new(f))
    }

    pub fn at(&self, s: &Path<X>) -> S {
        (self.0)(s)
    }

    /// The family that only looks at `|s|`.
    pub fn from_family(family: &Family<S>) -> Self {
        let family = family.clone();
        PathFamily::new(move |s: &Path<X>| family.at(s.len()))
    }

    /// `λt. ε_{s * t}`
    pub fn rebased(&self, s: &Path<X>) -> Self
    where
        X: Clone,
    {
        let inner = self.clone();
        let s = s.clone();
        PathFamily::new(move |t: &Path<X>| inner.at(&s.concat(t)))
    }
}

pub type SelectionFamily<X, R> = Family<Selection<X, R>>;
pub type QuantifierFamily<X, R> = Family<Quantifier<X, R>>;
pub type SkewedFamily<X, R> = Family<SkewedSelection<X, R>>;
pub type DepSelectionFamily<X, R> = PathFamily<X, Selection<X, R>>;
pub type DepQuantifierFamily<X, R> = PathFamily<X, Quantifier<X, R>>;
pub type DepSkewedFamily<X, R> = PathFamily<X, SkewedSelection<X, R>>;

/// The quantifier a selection function attains: `p ↦ p(ε p)`.
pub fn sel_to_quant<X: 'static, R: 'static>(eps: &Selection<X, R>) -> Quantifier<X, R> {
    let eps = eps.clone();
    Quantifier::new(move |p| p(&eps.apply(p)?))
}

fn pair<X: Clone>(x: &X, y: &X) -> Path<X> {
    Path::from(vec![x.clone(), y.clone()])
}

/// `(φ ⊗ ψ)(p) = φ(λx. ψ(λy. p(x,y)))`
pub fn prod_quant<X, R>(phi: &Quantifier<X, R>, psi: &Quantifier<X, R>) -> Quantifier<Path<X>, R>
where
    X: Clone + 'static,
    R: 'static,
{
    let psi = psi.clone();
    dep_prod_quant(phi, move |_| psi.clone())
}

/// `(ε ⊗ δ)(p) = (a, b(a))` where `b(x) = δ(λy. p(x,y))` and
/// `a = ε(λx. p(x, b(x)))`.
pub fn prod_sel<X, R>(eps: &Selection<X, R>, delta: &Selection<X, R>) -> Selection<Path<X>, R>
where
    X: Clone + 'static,
    R: 'static,
{
    let delta = delta.clone();
    dep_prod_sel(eps, move |_| delta.clone())
}

/// Dependent product: the second factor is chosen after seeing the first move.
pub fn dep_prod_sel<X, R>(
    eps: &Selection<X, R>,
    delta: impl Fn(&X) -> Selection<X, R> + 'static,
) -> Selection<Path<X>, R>
where
    X: Clone + 'static,
    R: 'static,
{
    let eps = eps.clone();
    let delta = Rc::new(delta);
    Selection::new(move |p: &Pred<Path<X>, R>| {
        let b = {
            let p = Rc::clone(p);
            let delta = Rc::clone(&delta);
            Rc::new(move |x: &X| {
                let p = Rc::clone(&p);
                let x0 = x.clone();
                delta(x).apply(&pred(move |y| p(&pair(&x0, y))))
            })
        };
        let a = {
            let p = Rc::clone(p);
            let b = Rc::clone(&b);
            eps.apply(&pred(move |x| p(&pair(x, &b(x)?))))?
        };
        Ok(pair(&a, &b(&a)?))
    })
}

pub fn dep_prod_quant<X, R>(
    phi: &Quantifier<X, R>,
    psi: impl Fn(&X) -> Quantifier<X, R> + 'static,
) -> Quantifier<Path<X>, R>
where
    X: Clone + 'static,
    R: 'static,
{
    let phi = phi.clone();
    let psi = Rc::new(psi);
    Quantifier::new(move |p: &Pred<Path<X>, R>| {
        let p = Rc::clone(p);
        let psi = Rc::clone(&psi);
        phi.apply(&pred(move |x: &X| {
            let p = Rc::clone(&p);
            let x0 = x.clone();
            psi(x).apply(&pred(move |y| p(&pair(&x0, y))))
        }))
    })
}

/// Skewed product: `(ε ⊗̃ δ)(p) = ε(λx. p(x * b(x)))` with `b(x) = δ(λy. p(x * y))`.
///
/// The pair `(x, tail)` is the sequence `x * tail`, and the whole output of the
/// skewed selection is the result.
pub fn skewed_prod<X, R>(
    eps: &SkewedSelection<X, R>,
    delta: &Selection<Seq<X>, R>,
) -> Selection<Seq<X>, R>
where
    X: Clone + 'static,
    R: 'static,
{
    let delta = delta.clone();
    dep_skewed_prod(eps, move |_| delta.clone())
}

pub fn dep_skewed_prod<X, R>(
    eps: &SkewedSelection<X, R>,
    delta: impl Fn(&X) -> Selection<Seq<X>, R> + 'static,
) -> Selection<Seq<X>, R>
where
    X: Clone + 'static,
    R: 'static,
{
    let eps = eps.clone();
    let delta = Rc::new(delta);
    Selection::new(move |p: &Pred<Seq<X>, R>| {
        let p = Rc::clone(p);
        let delta = Rc::clone(&delta);
        eps.apply(&pred(move |x: &X| {
            let px = {
                let p = Rc::clone(&p);
                let x0 = x.clone();
                pred(move |y: &Seq<X>| p(&Seq::cons(x0.clone(), y)))
            };
            let b = delta(x).apply(&px)?;
            px(&b)
        }))
    })
}

/// Right-nested finite product `ε_0 ⊗ (ε_1 ⊗ (… ⊗ ε_{k-1}))` on paths of length `k`.
pub fn finite_prod<X, R>(list: &[Selection<X, R>]) -> Selection<Path<X>, R>
where
    X: Clone + 'static,
    R: 'static,
{
    let Some((head, rest)) = list.split_first() else {
        return Selection::new(|_| Ok(Path::empty()));
    };
    let head = head.clone();
    let tail = finite_prod(rest);
    Selection::new(move |p: &Pred<Path<X>, R>| {
        let b = {
            let p = Rc::clone(p);
            let tail = tail.clone();
            Rc::new(move |x: &X| {
                let p = Rc::clone(&p);
                let x0 = x.clone();
                tail.apply(&pred(move |t: &Path<X>| p(&cons_path(&x0, t))))
            })
        };
        let a = {
            let p = Rc::clone(p);
            let b = Rc::clone(&b);
            head.apply(&pred(move |x| p(&cons_path(x, &b(x)?))))?
        };
        Ok(cons_path(&a, &b(&a)?))
    })
}

fn cons_path<X: Clone>(x: &X, t: &[X]) -> Path<X> {
    std::iter::once(x.clone()).chain(t.iter().cloned()).collect()
}

fn domain(x_card: u32) -> impl Iterator<Item = Value> {
    (0..x_card).map(Value)
}

fn best_by(
    x_card: u32,
    p: &Pred<Value, Outcome>,
    better: fn(Outcome, Outcome) -> bool,
) -> EvalResult<(Value, Outcome)> {
    let mut best: Option<(Value, Outcome)> = None;
    for x in domain(x_card) {
        let r = p(&x)?;
        if best.is_none_or(|(_, b)| better(r, b)) {
            best = Some((x, r));
        }
    }
    best.ok_or_else(|| EvalError::ContractViolation("empty domain".into()))
}

/// Least code among the minimisers of `p`.
pub fn argmin(x_card: u32) -> Selection<Value, Outcome> {
    Selection::new(move |p| Ok(best_by(x_card, p, |r, b| r < b)?.0))
}

/// Least code among the maximisers of `p`.
pub fn argmax(x_card: u32) -> Selection<Value, Outcome> {
    Selection::new(move |p| Ok(best_by(x_card, p, |r, b| r > b)?.0))
}

pub fn min_quant(x_card: u32) -> Quantifier<Value, Outcome> {
    Quantifier::new(move |p| Ok(best_by(x_card, p, |r, b| r < b)?.1))
}

pub fn max_quant(x_card: u32) -> Quantifier<Value, Outcome> {
    Quantifier::new(move |p| Ok(best_by(x_card, p, |r, b| r > b)?.1))
}

/// Boolean Hilbert choice: pick `tt` iff `p(tt) = tt`.
pub fn hilbert() -> Selection<Value, Outcome> {
    Selection::new(|p: &Pred<Value, Outcome>| {
        let tt = Value(1);
        Ok(if p(&tt)?.is_tt() { tt } else { Value(0) })
    })
}

/// Index of a predicate's graph: `Σ_x p(x) · r_card^x`.
pub fn graph_index(x_card: u32, r_card: u32, p: &Pred<Value, Outcome>) -> EvalResult<usize> {
    let mut key = 0usize;
    let mut weight = 1usize;
    for x in domain(x_card) {
        key += p(&x)?.0 as usize * weight;
        weight *= r_card as usize;
    }
    Ok(key)
}

/// A selection given by its full table over predicate graphs.
pub fn table_selection(x_card: u32, r_card: u32, table: Rc<[Value]>) -> Selection<Value, Outcome> {
    Selection::new(move |p| Ok(table[graph_index(x_card, r_card, p)?]))
}

pub fn table_quantifier(x_card: u32, r_card: u32, table: Rc<[Outcome]>) -> Quantifier<Value, Outcome> {
    Quantifier::new(move |p| Ok(table[graph_index(x_card, r_card, p)?]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tt() -> Value {
        Value(1)
    }

    fn ff() -> Value {
        Value(0)
    }

    fn bool_pred(f: fn(bool) -> bool) -> Pred<Value, Outcome> {
        pred(move |x: &Value| Ok(Outcome::from_bool(f(x.is_tt()))))
    }

    fn pair_pred(f: fn(bool, bool) -> bool) -> Pred<Path<Value>, Outcome> {
        pred(move |xy: &Path<Value>| Ok(Outcome::from_bool(f(xy[0].is_tt(), xy[1].is_tt()))))
    }

    /// All 16 boolean predicates on pairs, by truth table index.
    fn all_pair_preds() -> Vec<Pred<Path<Value>, Outcome>> {
        (0..16u32)
            .map(|t| {
                pred(move |xy: &Path<Value>| {
                    let bit = xy[0].0 * 2 + xy[1].0;
                    Ok(Outcome((t >> bit) & 1))
                })
            })
            .collect()
    }

    /// All 16 boolean selection functions, as tables over the 4 predicate graphs.
    fn all_bool_selections() -> Vec<Selection<Value, Outcome>> {
        (0..16u32)
            .map(|t| {
                let table: Rc<[Value]> = (0..4).map(|g| Value((t >> g) & 1)).collect();
                table_selection(2, 2, table)
            })
            .collect()
    }

    #[test]
    fn sel_to_quant_examples() {
        let q = sel_to_quant(&hilbert());
        assert_eq!(q.apply(&bool_pred(|x| x)).unwrap(), Outcome(1));
        assert_eq!(q.apply(&bool_pred(|_| false)).unwrap(), Outcome(0));
        assert_eq!(hilbert().apply(&bool_pred(|x| !x)).unwrap(), ff());
        assert_eq!(q.apply(&bool_pred(|x| !x)).unwrap(), Outcome(1));
    }

    fn brute_exists_exists(f: fn(bool, bool) -> bool) -> bool {
        [false, true].iter().any(|&x| [false, true].iter().any(|&y| f(x, y)))
    }

    fn brute_forall_exists(f: fn(bool, bool) -> bool) -> bool {
        [false, true].iter().all(|&x| [false, true].iter().any(|&y| f(x, y)))
    }

    #[test]
    fn prod_quant_examples() {
        let ex = max_quant(2);
        let all = min_quant(2);
        let and = |x: bool, y: bool| x && y;
        let or = |x: bool, y: bool| x || y;
        let got = prod_quant(&ex, &ex).apply(&pair_pred(and)).unwrap();
        assert_eq!(got.is_tt(), brute_exists_exists(and));
        let got = prod_quant(&all, &sel_to_quant(&argmax(2))).apply(&pair_pred(or)).unwrap();
        assert_eq!(got.is_tt(), brute_forall_exists(or));
        for r in 0..3 {
            let phi = sel_to_quant(&argmin(3));
            let c = prod_quant(&phi, &phi).apply_fn(move |_| Ok(Outcome(r))).unwrap();
            assert_eq!(c, Outcome(r));
        }
    }

    #[test]
    fn prod_sel_examples() {
        let h = hilbert();
        let prod = prod_sel(&h, &h);
        let got = prod.apply(&pair_pred(|x, y| x && y)).unwrap();
        assert_eq!(got, Path::from(vec![tt(), tt()]));
        let got = prod.apply(&pair_pred(|_, _| false)).unwrap();
        assert_eq!(got, Path::from(vec![ff(), ff()]));
        let got = prod.apply(&pair_pred(|x, _| !x)).unwrap();
        // b(x) = tt when p(x,·) is constant tt, and ff otherwise; a = ε(λx.¬x) = ff.
        let b_ff = h.apply(&bool_pred(|_| true)).unwrap();
        assert_eq!(got, Path::from(vec![ff(), b_ff]));
    }

    #[test]
    fn product_homomorphism_exhaustive() {
        let sels = all_bool_selections();
        let preds = all_pair_preds();
        for e in &sels {
            for d in &sels {
                let lhs = sel_to_quant(&prod_sel(e, d));
                let rhs = prod_quant(&sel_to_quant(e), &sel_to_quant(d));
                for p in &preds {
                    assert_eq!(lhs.apply(p).unwrap(), rhs.apply(p).unwrap());
                }
            }
        }
    }

    #[test]
    fn dependent_products() {
        let sels = all_bool_selections();
        for e in sels.iter().step_by(3) {
            for d in sels.iter().step_by(5) {
                let simple = prod_sel(e, d);
                let d2 = d.clone();
                let dep = dep_prod_sel(e, move |_| d2.clone());
                for p in &all_pair_preds() {
                    assert_eq!(simple.apply(p).unwrap(), dep.apply(p).unwrap());
                }
            }
        }

        // δ(tt) picks tt, δ(ff) picks ff; p(x,y) = y.
        let pick = |v: Value| Selection::new(move |_| Ok(v));
        let dep = dep_prod_sel(&hilbert(), move |x: &Value| pick(*x));
        let got = dep.apply(&pair_pred(|_, y| y)).unwrap();
        // p(x, b(x)) = b(x) = x, so a = ε(id) = tt and b(a) = tt.
        assert_eq!(got, Path::from(vec![tt(), tt()]));

        let delta = |x: &Value| if x.is_tt() { argmax(2) } else { argmin(2) };
        let lhs = sel_to_quant(&dep_prod_sel(&hilbert(), delta));
        let rhs = dep_prod_quant(&sel_to_quant(&hilbert()), move |x| sel_to_quant(&delta(x)));
        for p in &all_pair_preds() {
            assert_eq!(lhs.apply(p).unwrap(), rhs.apply(p).unwrap());
        }
    }

    fn const_skewed(c: Seq<Value>) -> SkewedSelection<Value, Outcome> {
        SkewedSelection::new(move |_| Ok(c.clone()))
    }

    /// Lifts an ordinary selection to a skewed one by appending zeros.
    fn head_only(eps: Selection<Value, Outcome>) -> SkewedSelection<Value, Outcome> {
        SkewedSelection::new(move |p| Ok(Seq::cons(eps.apply(p)?, &Seq::zero())))
    }

    #[test]
    fn skewed_products() {
        let tail_sel: Selection<Seq<Value>, Outcome> = Selection::new(|_| Ok(Seq::constant(Value(1))));
        let c = Seq::constant(Value(1));
        let got = skewed_prod(&const_skewed(c), &tail_sel)
            .apply_fn(|a: &Seq<Value>| Ok(Outcome(a.at(0)?.0)))
            .unwrap();
        assert_eq!(got.prefix(5).unwrap(), Path::from(vec![Value(1); 5]));

        let head = |a: &Seq<Value>| Ok(Outcome(a.at(0)?.0));
        let got = skewed_prod(&head_only(hilbert()), &tail_sel).apply_fn(head).unwrap();
        assert_eq!(got.at(0).unwrap(), hilbert().apply(&bool_pred(|x| x)).unwrap());

        let t2 = tail_sel.clone();
        let dep = dep_skewed_prod(&head_only(argmin(2)), move |_| t2.clone());
        let simple = skewed_prod(&head_only(argmin(2)), &tail_sel);
        let q = |a: &Seq<Value>| Ok(Outcome(a.at(0)?.0 ^ a.at(1)?.0));
        assert_eq!(
            dep.apply_fn(q).unwrap().prefix(4).unwrap(),
            simple.apply_fn(q).unwrap().prefix(4).unwrap()
        );
    }

    #[test]
    fn finite_products() {
        let h = hilbert();
        for p in all_pair_preds() {
            let two = finite_prod(&[h.clone(), argmin(2)]).apply(&p).unwrap();
            assert_eq!(two, prod_sel(&h, &argmin(2)).apply(&p).unwrap());
        }
        let single = finite_prod(&[argmax(2)]);
        for f in [|x: bool| x, |x: bool| !x, |_| true, |_| false] {
            let p = bool_pred(f);
            let got = single.apply_fn(move |t: &Path<Value>| p(&t[0])).unwrap();
            assert_eq!(got[0], argmax(2).apply(&bool_pred(f)).unwrap());
        }
        let three = finite_prod(&[h.clone(), h.clone(), h.clone()]);
        let got = three
            .apply_fn(|t: &Path<Value>| Ok(Outcome::from_bool(t.iter().all(|v| v.is_tt()))))
            .unwrap();
        assert_eq!(got, Path::from(vec![tt(); 3]));
    }

    #[test]
    fn table_selection_keys_by_graph() {
        // Picks whichever point p sends to the larger code, least on ties.
        let table: Rc<[Value]> = (0..9)
            .map(|g: u32| if g / 3 > g % 3 { Value(1) } else { Value(0) })
            .collect();
        let eps = table_selection(2, 3, table);
        assert_eq!(eps.apply_fn(|x: &Value| Ok(Outcome(x.0 * 2))).unwrap(), Value(1));
        assert_eq!(eps.apply_fn(|x: &Value| Ok(Outcome(2 - x.0))).unwrap(), Value(0));
    }

    proptest! {
        #[test]
        fn finite_prod_matches_manual_nesting(truth in 0u32..256, e0 in 0u32..16, e1 in 0u32..16, e2 in 0u32..16) {
            let sels = all_bool_selections();
            let (a, b, c) = (sels[e0 as usize].clone(), sels[e1 as usize].clone(), sels[e2 as usize].clone());
            let p = move |t: &Path<Value>| {
                let bit = t[0].0 * 4 + t[1].0 * 2 + t[2].0;
                Ok(Outcome((truth >> bit) & 1))
            };
            let folded = finite_prod(&[a.clone(), b.clone(), c.clone()]).apply_fn(p).unwrap();
            // Manual nesting: a ⊗ (b ⊗ c), flattening the inner pair.
            let inner = prod_sel(&b, &c);
            let b_of = move |x: Value| {
                inner.apply_fn(move |yz: &Path<Value>| p(&Path::from(vec![x, yz[0], yz[1]])))
            };
            let b2 = b_of.clone();
            let x = a.apply_fn(move |x: &Value| {
                let yz = b2(*x)?;
                p(&Path::from(vec![*x, yz[0], yz[1]]))
            }).unwrap();
            let yz = b_of(x).unwrap();
            prop_assert_eq!(folded, Path::from(vec![x, yz[0], yz[1]]));
        }

        #[test]
        fn argmin_attains_min(codes in proptest::collection::vec(0u32..5, 3)) {
            let codes: Rc<[u32]> = codes.into();
            let c2 = Rc::clone(&codes);
            let x = argmin(3).apply_fn(move |x: &Value| Ok(Outcome(c2[x.0 as usize]))).unwrap();
            let m = *codes.iter().min().unwrap();
            prop_assert_eq!(codes[x.0 as usize], m);
            prop_assert_eq!(codes.iter().position(|&c| c == m).unwrap(), x.0 as usize);
        }
    }
}
