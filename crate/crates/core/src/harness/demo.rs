//! Two small worked uses of the library: solving a finite game by a product
//! of selections, and finding a witness for a predicate on infinite
//! boolean sequences with `ips`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::barrec::ips;
use crate::error::{EvalError, EvalResult};
use crate::fuel::Fuel;
use crate::selection::{argmax, argmin, finite_prod, hilbert, pred, Family, Selection};
use crate::seqcore::{Outcome, OutcomeFn, Path, Seq, Value};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameReport {
    pub depth: usize,
    pub payoffs: Vec<u32>,
    pub play: Vec<u32>,
    pub value: u32,
    pub oracle_play: Vec<u32>,
    pub oracle_value: u32,
    pub agrees: bool,
    /// Some mover along the play had two equally good moves.
    pub tie: bool,
}

fn leaf(moves: &[u32]) -> usize {
    moves.iter().fold(0, |acc, &m| 2 * acc + m as usize)
}

/// Game value below `prefix`; player 0 maximises at even depths.
fn minimax_value(payoffs: &[u32], depth: usize, prefix: &mut Vec<u32>) -> u32 {
    if prefix.len() == depth {
        return payoffs[leaf(prefix)];
    }
    let maximise = prefix.len().is_multiple_of(2);
    let children = [0, 1].map(|m| {
        prefix.push(m);
        let v = minimax_value(payoffs, depth, prefix);
        prefix.pop();
        v
    });
    if maximise {
        children[0].max(children[1])
    } else {
        children[0].min(children[1])
    }
}

/// Optimal line with least-move tie-breaking, and whether any mover on it
/// was indifferent.
fn minimax(payoffs: &[u32], depth: usize) -> (u32, Vec<u32>, bool) {
    let mut line = Vec::with_capacity(depth);
    let mut tie = false;
    while line.len() < depth {
        let children = [0, 1].map(|m| {
            line.push(m);
            let v = minimax_value(payoffs, depth, &mut line);
            line.pop();
            v
        });
        tie |= children[0] == children[1];
        let maximise = line.len() % 2 == 0;
        let pick = if maximise { children[1] > children[0] } else { children[1] < children[0] };
        line.push(pick as u32);
    }
    (payoffs[leaf(&line)], line, tie)
}

pub fn demo_game(depth: usize, payoffs: &[u32]) -> EvalResult<GameReport> {
    if depth == 0 || payoffs.len() != 1 << depth {
        return Err(EvalError::ContractViolation(format!(
            "a depth-{depth} game needs {} payoffs and depth ≥ 1",
            1usize << depth
        )));
    }
    let players: Vec<Selection<Value, Outcome>> = (0..depth)
        .map(|i| if i % 2 == 0 { argmax(2) } else { argmin(2) })
        .collect();
    let table = payoffs.to_vec();
    let p = pred(move |s: &Path<Value>| {
        let moves: Vec<u32> = s.iter().map(|v| v.0).collect();
        Ok(Outcome(table[leaf(&moves)]))
    });
    let play: Vec<u32> = finite_prod(&players).apply(&p)?.iter().map(|v| v.0).collect();
    let (oracle_value, oracle_play, tie) = minimax(payoffs, depth);
    let value = payoffs[leaf(&play)];
    Ok(GameReport {
        depth,
        payoffs: payoffs.to_vec(),
        agrees: play == oracle_play && value == oracle_value,
        play,
        value,
        oracle_play,
        oracle_value,
        tie,
    })
}

pub fn random_payoffs(depth: usize, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..1usize << depth).map(|_| rng.gen_range(0..10)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub modulus: usize,
    pub table: Vec<bool>,
    pub witness: Vec<u32>,
    pub holds: bool,
    pub brute_force_exists: bool,
    pub agrees: bool,
}

/// Runs `ips` with Hilbert's choice at every position on the predicate
/// given by `table` over the first `modulus` booleans.
pub fn demo_search(modulus: usize, table: &[bool], fuel: &Fuel) -> EvalResult<SearchReport> {
    if table.len() != 1 << modulus {
        return Err(EvalError::ContractViolation(format!(
            "a modulus-{modulus} predicate needs {} rows",
            1usize << modulus
        )));
    }
    let rows = table.to_vec();
    let q = OutcomeFn::with_modulus(modulus, move |a: &Seq<Value>| {
        let mut idx = 0;
        for i in 0..modulus {
            idx = 2 * idx + a.at(i)?.0 as usize;
        }
        Ok(Outcome::from_bool(rows[idx]))
    });
    let alpha = ips(0, &Family::constant(hilbert()), &q, fuel)?;
    let holds = q.apply(&alpha)?.is_tt();
    let brute_force_exists = table.iter().any(|&b| b);
    Ok(SearchReport {
        modulus,
        table: table.to_vec(),
        witness: alpha.prefix(modulus)?.iter().map(|v| v.0).collect(),
        holds,
        brute_force_exists,
        agrees: holds == brute_force_exists,
    })
}

pub fn random_predicate(modulus: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..1usize << modulus).map(|_| rng.gen_bool(0.3)).collect()
}
