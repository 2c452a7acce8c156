//! Lazy, memoized infinite sequences and the finite-prefix algebra around them.
//!
//! A [`Seq`] is a call-by-need stream: each index is computed on first read and
//! cached afterwards, so repeated reads are cheap and deterministic. All of the
//! recursors build their outputs from the constructors here, and rely on tails
//! staying unevaluated until something actually looks at them.

use std::cell::{Cell, OnceCell, RefCell};
use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, EvalResult};
use crate::fuel::with_stack;

/// A type with a canonical inhabitant, used to pad finite prefixes into
/// infinite sequences.
pub trait Ground: Clone + 'static {
    fn zero() -> Self;

    /// A cheap equality test that may answer `false` for equal elements but
    /// never `true` for different ones. Used as a memoization key.
    fn same(&self, other: &Self) -> bool;
}

/// An element of the finite ground type, encoded as a small natural.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Value(pub u32);

impl Value {
    pub const fn code(self) -> u32 {
        self.0
    }

    /// Boolean view: code 1 is `tt`, code 0 is `ff`.
    pub const fn is_tt(self) -> bool {
        self.0 == 1
    }

    pub const fn from_bool(b: bool) -> Self {
        Value(b as u32)
    }
}

impl Ground for Value {
    fn zero() -> Self {
        Value(0)
    }

    fn same(&self, other: &Self) -> bool {
        self == other
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of the finite result type, encoded as a small natural.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Outcome(pub u32);

impl Outcome {
    pub const fn code(self) -> u32 {
        self.0
    }

    pub const fn is_tt(self) -> bool {
        self.0 == 1
    }

    pub const fn from_bool(b: bool) -> Self {
        Outcome(b as u32)
    }
}

impl fmt::Debug for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite sequence `⟨s_0, …, s_{n-1}⟩`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Path<T>(Vec<T>);

impl<T> Path<T> {
    pub fn empty() -> Self {
        Path(Vec::new())
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }
}

impl<T: Clone> Path<T> {
    /// `s * x`
    pub fn snoc(&self, x: T) -> Self {
        let mut items = Vec::with_capacity(self.0.len() + 1);
        items.extend_from_slice(&self.0);
        items.push(x);
        Path(items)
    }

    /// `s * t`
    pub fn concat(&self, tail: &[T]) -> Self {
        let mut items = Vec::with_capacity(self.0.len() + tail.len());
        items.extend_from_slice(&self.0);
        items.extend_from_slice(tail);
        Path(items)
    }

    pub fn truncated(&self, n: usize) -> Self {
        Path(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Path<U> {
        Path(self.0.iter().map(f).collect())
    }
}

impl<T> Default for Path<T> {
    fn default() -> Self {
        Path::empty()
    }
}

impl<T> Deref for Path<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> From<Vec<T>> for Path<T> {
    fn from(items: Vec<T>) -> Self {
        Path(items)
    }
}

impl<T: Clone> From<&[T]> for Path<T> {
    fn from(items: &[T]) -> Self {
        Path(items.to_vec())
    }
}

impl<T> FromIterator<T> for Path<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Path(iter.into_iter().collect())
    }
}

impl<T: fmt::Debug> fmt::Debug for Path<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x:?}")?;
        }
        write!(f, "⟩")
    }
}

/// An infinite, lazily evaluated sequence with a per-index memo table.
pub struct Seq<T>(Rc<Node<T>>);

struct Node<T> {
    source: Source<T>,
    cache: RefCell<HashMap<usize, T>>,
    calls: Cell<u64>,
}

type Thunk<T> = Rc<dyn Fn() -> EvalResult<T>>;

enum Source<T> {
    Constant(T),
    Pointwise(Rc<dyn Fn(usize) -> EvalResult<T>>),
    /// Course-of-values: index `i` is computed from the already computed prefix.
    History(Rc<dyn Fn(usize, &[T]) -> EvalResult<T>>),
    Deferred {
        make: Thunk<Seq<T>>,
        forced: OnceCell<Seq<T>>,
    },
    Cons {
        head: Thunk<T>,
        tail: Rc<dyn Fn(&T) -> EvalResult<Seq<T>>>,
        forced_tail: OnceCell<Seq<T>>,
    },
}

impl<T> Clone for Seq<T> {
    fn clone(&self) -> Self {
        Seq(Rc::clone(&self.0))
    }
}

impl<T> fmt::Debug for Seq<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seq(<{} cached>)", self.0.cache.borrow().len())
    }
}

impl<T: Ground> Ground for Seq<T> {
    fn zero() -> Self {
        Seq::zero()
    }

    fn same(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }
}

impl<T: Clone + 'static> Seq<T> {
    fn with_source(source: Source<T>) -> Self {
        Seq(Rc::new(Node {
            source,
            cache: RefCell::new(HashMap::new()),
            calls: Cell::new(0),
        }))
    }

    pub fn constant(x: T) -> Self {
        Seq::with_source(Source::Constant(x))
    }

    pub fn from_fn(f: impl Fn(usize) -> EvalResult<T> + 'static) -> Self {
        Seq::with_source(Source::Pointwise(Rc::new(f)))
    }

    /// Builds a sequence by course-of-values: `f(i, ⟨α(0), …, α(i-1)⟩)`.
    pub fn from_history(f: impl Fn(usize, &[T]) -> EvalResult<T> + 'static) -> Self {
        Seq::with_source(Source::History(Rc::new(f)))
    }

    /// A sequence produced by `make` on first read.
    pub fn lazy(make: impl Fn() -> EvalResult<Seq<T>> + 'static) -> Self {
        Seq::with_source(Source::Deferred {
            make: Rc::new(make),
            forced: OnceCell::new(),
        })
    }

    /// `c * tail(c)` where neither `c` nor the tail is computed until read.
    pub fn cons_lazy(
        head: impl Fn() -> EvalResult<T> + 'static,
        tail: impl Fn(&T) -> EvalResult<Seq<T>> + 'static,
    ) -> Self {
        Seq::with_source(Source::Cons {
            head: Rc::new(head),
            tail: Rc::new(tail),
            forced_tail: OnceCell::new(),
        })
    }

    /// `x * α`
    pub fn cons(x: T, tail: &Seq<T>) -> Self {
        tail.prepend(std::slice::from_ref(&x))
    }

    /// Reads index `i`, computing and caching it on first access.
    pub fn at(&self, i: usize) -> EvalResult<T> {
        if let Source::Constant(x) = &self.0.source {
            return Ok(x.clone());
        }
        if let Some(v) = self.0.cache.borrow().get(&i) {
            return Ok(v.clone());
        }
        let v = with_stack(|| self.compute(i))?;
        self.0.cache.borrow_mut().entry(i).or_insert_with(|| v.clone());
        Ok(v)
    }

    fn compute(&self, i: usize) -> EvalResult<T> {
        let node = &self.0;
        match &node.source {
            Source::Constant(x) => Ok(x.clone()),
            Source::Pointwise(f) => {
                node.calls.set(node.calls.get() + 1);
                f(i)
            }
            Source::History(f) => {
                let mut prefix = Vec::with_capacity(i);
                for j in 0..i {
                    prefix.push(self.at(j)?);
                }
                node.calls.set(node.calls.get() + 1);
                f(i, &prefix)
            }
            Source::Deferred { make, forced } => {
                let inner = match forced.get() {
                    Some(s) => s.clone(),
                    None => {
                        node.calls.set(node.calls.get() + 1);
                        let s = make()?;
                        let _ = forced.set(s.clone());
                        s
                    }
                };
                inner.at(i)
            }
            Source::Cons {
                head,
                tail,
                forced_tail,
            } => {
                if i == 0 {
                    node.calls.set(node.calls.get() + 1);
                    return head();
                }
                let rest = match forced_tail.get() {
                    Some(s) => s.clone(),
                    None => {
                        let c = self.at(0)?;
                        let s = tail(&c)?;
                        let _ = forced_tail.set(s.clone());
                        s
                    }
                };
                rest.at(i - 1)
            }
        }
    }

    /// How many times this sequence's own generator has run.
    pub fn generator_calls(&self) -> u64 {
        self.0.calls.get()
    }

    /// `⟨α(0), …, α(n-1)⟩`
    pub fn prefix(&self, n: usize) -> EvalResult<Path<T>> {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// `⟨α(k), …, α(n)⟩`, empty when `n < k`.
    pub fn segment(&self, k: usize, n: usize) -> EvalResult<Path<T>> {
        if n < k {
            return Ok(Path::empty());
        }
        (k..=n).map(|i| self.at(i)).collect()
    }

    /// `s * α`
    pub fn prepend(&self, s: &[T]) -> Self {
        if s.is_empty() {
            return self.clone();
        }
        let s: Rc<[T]> = s.into();
        let rest = self.clone();
        Seq::from_fn(move |i| {
            if i < s.len() {
                Ok(s[i].clone())
            } else {
                rest.at(i - s.len())
            }
        })
    }

    /// `s @ α`: `s_i` below `|s|`, and `α(i + |s|)` from there on.
    pub fn overwrite(&self, s: &[T]) -> Self {
        if s.is_empty() {
            return self.clone();
        }
        let s: Rc<[T]> = s.into();
        let rest = self.clone();
        Seq::from_fn(move |i| {
            if i < s.len() {
                Ok(s[i].clone())
            } else {
                rest.at(i + s.len())
            }
        })
    }

    /// `α^n = λi. α(i + n)`
    pub fn shift(&self, n: usize) -> Self {
        if n == 0 {
            return self.clone();
        }
        let inner = self.clone();
        Seq::from_fn(move |i| inner.at(i + n))
    }

    pub fn map<U: Clone + 'static>(&self, f: impl Fn(&T) -> U + 'static) -> Seq<U> {
        let inner = self.clone();
        Seq::from_fn(move |i| inner.at(i).map(|x| f(&x)))
    }

    pub fn try_map<U: Clone + 'static>(
        &self,
        f: impl Fn(&T) -> EvalResult<U> + 'static,
    ) -> Seq<U> {
        let inner = self.clone();
        Seq::from_fn(move |i| f(&inner.at(i)?))
    }

    /// Same values, but any read at or beyond `limit` is a contract violation.
    /// Used to check that an outcome function honours its declared modulus.
    pub fn guarded(&self, limit: usize) -> Self {
        let inner = self.clone();
        Seq::from_fn(move |i| {
            if i >= limit {
                Err(EvalError::ContractViolation(format!(
                    "read index {i} beyond declared modulus {limit}"
                )))
            } else {
                inner.at(i)
            }
        })
    }
}

impl<T: Ground> Seq<T> {
    /// The constant sequence `0̄`.
    pub fn zero() -> Self {
        Seq::constant(T::zero())
    }

    /// `ᾱn * 0̄`, the zero extension of the length-`n` prefix.
    pub fn init_seg_zero(&self, n: usize) -> EvalResult<Self> {
        Ok(Seq::zero().prepend(&self.prefix(n)?))
    }
}

/// The zero sequence of the ground type.
pub fn zero_seq() -> Seq<Value> {
    Seq::zero()
}

pub fn seq_at<T: Clone + 'static>(alpha: &Seq<T>, i: usize) -> EvalResult<T> {
    alpha.at(i)
}

pub fn overwrite<T: Clone + 'static>(s: &[T], alpha: &Seq<T>) -> Seq<T> {
    alpha.overwrite(s)
}

pub fn shift<T: Clone + 'static>(alpha: &Seq<T>, n: usize) -> Seq<T> {
    alpha.shift(n)
}

pub fn init_seg<T: Clone + 'static>(alpha: &Seq<T>, n: usize) -> EvalResult<Path<T>> {
    alpha.prefix(n)
}

pub fn init_seg_zero<T: Ground>(alpha: &Seq<T>, n: usize) -> EvalResult<Seq<T>> {
    alpha.init_seg_zero(n)
}

pub fn segment<T: Clone + 'static>(alpha: &Seq<T>, k: usize, n: usize) -> EvalResult<Path<T>> {
    alpha.segment(k, n)
}

/// An outcome functional `q : Seq → R`, optionally carrying a modulus of
/// continuity `d` (it reads only indices `< d`).
///
/// Restrictions `q_s` are accumulated into a single shared prefix, so
/// `q_{x}_{y}` costs one prepend rather than two and restricting is O(1).
pub struct OutcomeFn<T, R> {
    base: Rc<dyn Fn(&Seq<T>) -> EvalResult<R>>,
    prefix: Trail<T>,
    modulus: Option<usize>,
}

/// Persistent snoc-list; clones share their common history.
struct Trail<T>(Option<Rc<TrailNode<T>>>);

struct TrailNode<T> {
    last: T,
    init: Trail<T>,
}

impl<T> Clone for Trail<T> {
    fn clone(&self) -> Self {
        Trail(self.0.clone())
    }
}

impl<T: Clone> Trail<T> {
    fn push(&self, x: T) -> Self {
        Trail(Some(Rc::new(TrailNode {
            last: x,
            init: self.clone(),
        })))
    }

    fn to_vec(&self) -> Vec<T> {
        let mut items = Vec::new();
        let mut cur = &self.0;
        while let Some(node) = cur {
            items.push(node.last.clone());
            cur = &node.init.0;
        }
        items.reverse();
        items
    }
}

impl<T> Drop for Trail<T> {
    // Unlinks iteratively so long trails do not overflow the stack.
    fn drop(&mut self) {
        let mut cur = self.0.take();
        while let Some(node) = cur {
            match Rc::try_unwrap(node) {
                Ok(mut node) => cur = node.init.0.take(),
                Err(_) => break,
            }
        }
    }
}

impl<T, R> Clone for OutcomeFn<T, R>
where
    T: Clone,
{
    fn clone(&self) -> Self {
        OutcomeFn {
            base: Rc::clone(&self.base),
            prefix: self.prefix.clone(),
            modulus: self.modulus,
        }
    }
}

impl<T: Clone + 'static, R: 'static> OutcomeFn<T, R> {
    pub fn new(f: impl Fn(&Seq<T>) -> EvalResult<R> + 'static) -> Self {
        OutcomeFn {
            base: Rc::new(f),
            prefix: Trail(None),
            modulus: None,
        }
    }

    pub fn with_modulus(modulus: usize, f: impl Fn(&Seq<T>) -> EvalResult<R> + 'static) -> Self {
        OutcomeFn {
            modulus: Some(modulus),
            ..OutcomeFn::new(f)
        }
    }

    pub fn constant(r: R) -> Self
    where
        R: Clone,
    {
        OutcomeFn::with_modulus(0, move |_| Ok(r.clone()))
    }

    pub fn modulus(&self) -> Option<usize> {
        self.modulus
    }

    pub fn apply(&self, alpha: &Seq<T>) -> EvalResult<R> {
        if self.prefix.0.is_none() {
            (self.base)(alpha)
        } else {
            (self.base)(&alpha.prepend(&self.prefix.to_vec()))
        }
    }

    /// `q_s = λα. q(s * α)`
    pub fn restrict(&self, s: &[T]) -> Self {
        OutcomeFn {
            base: Rc::clone(&self.base),
            prefix: s.iter().fold(self.prefix.clone(), |t, x| t.push(x.clone())),
            modulus: self.modulus.map(|d| d.saturating_sub(s.len())),
        }
    }

    /// `q_x`
    pub fn restrict_one(&self, x: &T) -> Self {
        self.restrict(std::slice::from_ref(x))
    }

    /// `q^n = λα. q(α^n)`
    pub fn shifted(&self, n: usize) -> Self {
        let q = self.clone();
        let f = move |a: &Seq<T>| q.apply(&a.shift(n));
        match self.modulus {
            Some(d) => OutcomeFn::with_modulus(d + n, f),
            None => OutcomeFn::new(f),
        }
    }
}

/// `q_s`
pub fn restrict_outcome<T: Clone + 'static, R: 'static>(
    q: &OutcomeFn<T, R>,
    s: &[T],
) -> OutcomeFn<T, R> {
    q.restrict(s)
}
