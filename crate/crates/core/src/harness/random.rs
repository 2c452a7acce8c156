//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::instance::{
    FamilyKind, FamilySpec, InstanceSpec, LengthKind, LengthSpec, OmegaSpec, OutcomeSpec,
    QuantifierSpec, SkewedSpec,
};

/// Upper limits for generated instances. Lower limits are 2 for both
/// cardinalities and 0 elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub max_x_card: u32,
    pub max_r_card: u32,
    pub max_modulus: usize,
    /// Largest value of `l` and of `ω`.
    pub max_bound: u32,
    pub max_start: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            max_x_card: 3,
            max_r_card: 3,
            max_modulus: 3,
            max_bound: 4,
            max_start: 2,
        }
    }
}

fn kind(rng: &mut ChaCha8Rng) -> FamilyKind {
    *[
        FamilyKind::Argmin,
        FamilyKind::Argmax,
        FamilyKind::Table,
        FamilyKind::Parity,
    ]
    .choose(rng)
    .unwrap()
}

fn keys(rng: &mut ChaCha8Rng, kind: FamilyKind, r_card: u32) -> Vec<Vec<u32>> {
    if matches!(kind, FamilyKind::Argmin | FamilyKind::Argmax) {
        return Vec::new();
    }
    let classes = rng.gen_range(1..=2);
    (0..classes)
        .map(|_| {
            let mut ranks: Vec<u32> = (0..r_card).collect();
            ranks.shuffle(rng);
            ranks
        })
        .collect()
}

fn table(rng: &mut ChaCha8Rng, rows: usize, max: u32) -> Vec<u32> {
    (0..rows).map(|_| rng.gen_range(0..=max)).collect()
}

/// Deterministic in `seed`; always passes validation.
pub fn random_instance(seed: u64, params: &RandomParams) -> InstanceSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_card = rng.gen_range(2..=params.max_x_card.max(2));
    let r_card = rng.gen_range(2..=params.max_r_card.max(2));
    let start_len = rng.gen_range(0..=params.max_start);
    let start = (0..start_len).map(|_| rng.gen_range(0..x_card)).collect();

    let k = kind(&mut rng);
    let selection = FamilySpec {
        kind: k,
        keys: keys(&mut rng, k, r_card),
    };
    let k = kind(&mut rng);
    let quantifier = QuantifierSpec {
        kind: k,
        keys: keys(&mut rng, k, r_card),
        sum: rng.gen_bool(0.5),
    };
    let k = kind(&mut rng);
    let skewed = SkewedSpec {
        kind: k,
        keys: keys(&mut rng, k, r_card),
        tail_step: rng.gen_range(0..x_card),
    };

    let modulus = rng.gen_range(0..=params.max_modulus);
    let outcome = OutcomeSpec {
        modulus,
        table: table(&mut rng, (x_card as usize).pow(modulus as u32), r_card - 1),
    };

    let length = if r_card - 1 <= params.max_bound && rng.gen_bool(0.5) {
        LengthSpec {
            kind: LengthKind::Identity,
            table: Vec::new(),
        }
    } else {
        LengthSpec {
            kind: LengthKind::Table,
            table: table(&mut rng, r_card as usize, params.max_bound),
        }
    };

    let bound = rng.gen_range(0..=params.max_bound);
    let w_modulus = rng.gen_range(0..=params.max_modulus);
    let omega = OmegaSpec {
        modulus: w_modulus,
        bound: bound as usize,
        table: table(&mut rng, (x_card as usize).pow(w_modulus as u32), bound),
    };

    InstanceSpec {
        x_card,
        r_card,
        start,
        fuel: None,
        depth: None,
        selection,
        quantifier,
        skewed,
        outcome,
        length,
        omega,
    }
}
