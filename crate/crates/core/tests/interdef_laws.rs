//! Algebraic facts the translations rely on, checked on sampled and
//! exhaustively enumerated arguments.

use proptest::prelude::*;
use selrec::interdef::{
    bracket_decode, concat_chunks, concat_path, hat, s_construction, singletons, Chunk, Flagged,
    PathFn, TailCell,
};
use selrec::{Path, Seq, Value};

const DEPTH: usize = 10;

fn codes(s: &Seq<Value>) -> Vec<u32> {
    s.prefix(DEPTH).unwrap().iter().map(|v| v.0).collect()
}

fn vals(xs: &[u32]) -> Path<Value> {
    xs.iter().map(|&x| Value(x)).collect()
}

/// A path function mixing the salt with the path's length and contents.
fn hashed(salt: u32, x_card: u32) -> PathFn<Value, Value> {
    PathFn::new(move |t: &Path<Value>| {
        let h = t.iter().fold(salt.wrapping_mul(31) ^ t.len() as u32, |h, v| {
            h.wrapping_mul(17).wrapping_add(v.0 + 1)
        });
        Ok(Value(h % x_card))
    })
}

fn hashed_seq(salts: Vec<u32>, x_card: u32) -> Seq<PathFn<Value, Value>> {
    Seq::from_fn(move |i| Ok(hashed(salts[i % salts.len()].wrapping_add(i as u32), x_card)))
}

proptest! {
    /// `(d * α)^s = d(s) * α^{s * d(s)}`
    #[test]
    fn s_construction_unfolds_one_step(
        salt in any::<u32>(),
        salts in prop::collection::vec(any::<u32>(), 1..4),
        s in prop::collection::vec(0u32..3, 0..4),
    ) {
        let x_card = 3;
        let d = hashed(salt, x_card);
        let alpha = hashed_seq(salts, x_card);
        let s = vals(&s);
        let lhs = s_construction(&Seq::cons(d.clone(), &alpha), &s);
        let ds = d.call(&s).unwrap();
        let rhs = Seq::cons(ds, &s_construction(&alpha, &s.snoc(ds)));
        prop_assert_eq!(codes(&lhs), codes(&rhs));
    }

    /// `(q^[s])_x̂ = (q_x)^[s*x]`, stated on the decoded sequences.
    #[test]
    fn bracket_decode_absorbs_hat(
        x in 0u32..2,
        s in prop::collection::vec(0u32..2, 0..3),
        flags in prop::collection::vec(any::<bool>(), DEPTH),
        salts in prop::collection::vec(any::<u32>(), DEPTH),
    ) {
        let cells: Vec<TailCell<Value>> = flags
            .iter()
            .zip(&salts)
            .map(|(&flag, &salt)| {
                let f = hashed(salt, 2);
                Flagged {
                    flag,
                    payload: PathFn::new(move |t: &Path<Value>| {
                        let f = f.clone();
                        let t = t.clone();
                        Ok(Seq::from_fn(move |i| f.call(&t.snoc(Value(i as u32)))))
                    }),
                }
            })
            .collect();
        let beta = Seq::from_fn(move |i| Ok(cells.get(i).cloned().unwrap_or(Flagged { flag: false, payload: PathFn::constant(Seq::zero()) })));
        let s = vals(&s);
        let x = Value(x);
        let lhs = bracket_decode(&Seq::cons(hat(&x), &beta), &s);
        let rhs = Seq::cons(x, &bracket_decode(&beta, &s.snoc(x)));
        prop_assert_eq!(codes(&lhs), codes(&rhs));
    }

    /// `(q ∘ F)_⟨s⟩ = (q_s) ∘ F`, stated on the concatenations.
    #[test]
    fn concatenation_absorbs_a_leading_chunk(
        s in prop::collection::vec(0u32..2, 1..4),
        rows in prop::collection::vec(prop::collection::vec(0u32..2, 1..3), 1..4),
    ) {
        let chunks: Vec<Chunk<Value>> = rows.iter().map(|r| Chunk::new(&vals(r)).unwrap()).collect();
        let alpha = Seq::from_fn(move |i| Ok(chunks[i % chunks.len()].clone()));
        let head = Chunk::new(&vals(&s)).unwrap();
        let lhs = concat_chunks(&Seq::cons(head, &alpha));
        let rhs = concat_chunks(&alpha).prepend(&vals(&s));
        prop_assert_eq!(codes(&lhs), codes(&rhs));
    }
}

/// Every list of non-empty boolean chunks with at most `total` values overall.
fn chunk_lists(total: usize) -> Vec<Vec<Chunk<Value>>> {
    fn words(len: usize) -> Vec<Vec<Value>> {
        (0..1u32 << len)
            .map(|bits| (0..len).map(|i| Value((bits >> i) & 1)).collect())
            .collect()
    }
    let mut out = vec![Vec::new()];
    let mut frontier = vec![(Vec::<Chunk<Value>>::new(), 0usize)];
    while let Some((list, used)) = frontier.pop() {
        for len in 1..=total - used {
            for w in words(len) {
                let mut next = list.clone();
                next.push(Chunk::new(&w).unwrap());
                out.push(next.clone());
                frontier.push((next, used + len));
            }
        }
    }
    out
}

#[test]
fn chunk_laws_exhaustive() {
    let lists = chunk_lists(5);
    let small = chunk_lists(2);
    for s in &lists {
        let flat = concat_path(s);
        // F*(G*(s)) = s, read on the flattened values.
        assert_eq!(concat_path(&singletons(&flat)), flat);
        // F(λi. G(v_i))(i) = v_i
        let v = flat.clone();
        if !v.is_empty() {
            let g = Seq::from_fn(move |i| Ok(Chunk::single(v[i % v.len()])));
            let f = concat_chunks(&g);
            for i in 0..DEPTH {
                assert_eq!(f.at(i).unwrap(), flat[i % flat.len()]);
            }
        }
        for t in &small {
            let st: Vec<Chunk<Value>> = s.iter().chain(t).cloned().collect();
            // F*(s * t) = F*(s) * F*(t)
            assert_eq!(concat_path(&st), flat.concat(&concat_path(t)));
            // F*(G*(s) * t) = s * F*(t)
            let gs: Vec<Chunk<Value>> = singletons(&flat).iter().chain(t).cloned().collect();
            assert_eq!(concat_path(&gs), flat.concat(&concat_path(t)));
        }
    }
    assert!(lists.len() > 100);
}
