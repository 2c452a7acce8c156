//! Instance documents: a TOML description of every argument the recursors
//! take, validated up front and then turned into live functionals.

use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::barrec::{LengthFn, OmegaFn, SeqSelectionFamily};
use crate::error::{EvalError, EvalResult};
use crate::fuel::DEFAULT_FUEL;
use crate::selection::{
    DepQuantifierFamily, DepSelectionFamily, DepSkewedFamily, Family, PathFamily, Pred,
    Quantifier, QuantifierFamily, Selection, SelectionFamily, SkewedFamily, SkewedSelection,
};
use crate::seqcore::{Outcome, OutcomeFn, Path, Seq, Value};

pub const MAX_X_CARD: u32 = 4;
pub const MAX_R_CARD: u32 = 8;
pub const MAX_MODULUS: usize = 4;
pub const DEFAULT_DEPTH: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub x_card: u32,
    pub r_card: u32,
    #[serde(default)]
    pub start: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuel: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default)]
    pub selection: FamilySpec,
    #[serde(default)]
    pub quantifier: QuantifierSpec,
    #[serde(default)]
    pub skewed: SkewedSpec,
    pub outcome: OutcomeSpec,
    #[serde(default)]
    pub length: LengthSpec,
    #[serde(default)]
    pub omega: OmegaSpec,
}

/// How a family picks its member at a position.
///
/// `table` cycles through `keys` by position (or path length); `parity`
/// cycles by path length plus the sum of the path's codes, so dependent
/// families really depend on earlier choices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    #[default]
    Argmin,
    Argmax,
    Table,
    Parity,
}

/// Selections that minimise a rank over result codes: `keys[c][r]` is the
/// rank of result `r` in class `c`, ties go to the least value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub keys: Vec<Vec<u32>>,
}

/// Quantifiers: either attained by the ranked selection, or (with `sum`)
/// `(keys[c][0] + Σ_x p(x)) mod r_card`, which no selection attains in general.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantifierSpec {
    pub kind: FamilyKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub keys: Vec<Vec<u32>>,
    #[serde(default)]
    pub sum: bool,
}

/// Skewed selections: `x` chosen by rank, then the sequence `i ↦ x + step·i mod x_card`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkewedSpec {
    pub kind: FamilyKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub keys: Vec<Vec<u32>>,
    #[serde(default)]
    pub tail_step: u32,
}

/// A function of the first `modulus` values, tabulated big-endian.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeSpec {
    pub modulus: usize,
    pub table: Vec<u32>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthKind {
    #[default]
    Identity,
    Table,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthSpec {
    pub kind: LengthKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSpec {
    pub modulus: usize,
    pub bound: usize,
    pub table: Vec<u32>,
}

impl Default for OmegaSpec {
    fn default() -> Self {
        OmegaSpec {
            modulus: 0,
            bound: 0,
            table: vec![0],
        }
    }
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> HarnessError {
    HarnessError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceSpec, HarnessError> {
    let spec: InstanceSpec = toml::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

impl InstanceSpec {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("instance specs always serialize")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(1..=MAX_X_CARD).contains(&self.x_card) {
            return Err(invalid("x_card", format!("must be in 1..={MAX_X_CARD}")));
        }
        if !(1..=MAX_R_CARD).contains(&self.r_card) {
            return Err(invalid("r_card", format!("must be in 1..={MAX_R_CARD}")));
        }
        for (i, &v) in self.start.iter().enumerate() {
            if v >= self.x_card {
                return Err(invalid(format!("start[{i}]"), format!("{v} is not below x_card")));
            }
        }
        if self.fuel == Some(0) {
            return Err(invalid("fuel", "must be positive"));
        }
        self.check_keys("selection", self.selection.kind, &self.selection.keys)?;
        self.check_keys("quantifier", self.quantifier.kind, &self.quantifier.keys)?;
        self.check_keys("skewed", self.skewed.kind, &self.skewed.keys)?;
        if self.skewed.tail_step >= self.x_card {
            return Err(invalid("skewed.tail_step", "must be below x_card"));
        }

        let o = &self.outcome;
        if o.modulus > MAX_MODULUS {
            return Err(invalid("outcome.modulus", format!("must be at most {MAX_MODULUS}")));
        }
        self.check_table("outcome.table", o.modulus, &o.table, self.r_card - 1)?;

        if self.length.kind == LengthKind::Table && self.length.table.len() != self.r_card as usize {
            return Err(invalid(
                "length.table",
                format!("needs one entry per result code ({})", self.r_card),
            ));
        }

        let w = &self.omega;
        if w.modulus > MAX_MODULUS {
            return Err(invalid("omega.modulus", format!("must be at most {MAX_MODULUS}")));
        }
        self.check_table("omega.table", w.modulus, &w.table, w.bound as u32)
            .map_err(|e| match e {
                HarnessError::Validation { message, .. } => invalid("omega", message),
                other => other,
            })?;
        Ok(())
    }

    fn check_keys(&self, name: &str, kind: FamilyKind, keys: &[Vec<u32>]) -> Result<(), HarnessError> {
        if matches!(kind, FamilyKind::Table | FamilyKind::Parity) && keys.is_empty() {
            return Err(invalid(format!("{name}.keys"), "table and parity families need keys"));
        }
        for (c, row) in keys.iter().enumerate() {
            if row.len() != self.r_card as usize {
                return Err(invalid(
                    format!("{name}.keys[{c}]"),
                    format!("needs one rank per result code ({})", self.r_card),
                ));
            }
        }
        Ok(())
    }

    fn check_table(&self, name: &str, modulus: usize, table: &[u32], max: u32) -> Result<(), HarnessError> {
        let rows = (self.x_card as usize).pow(modulus as u32);
        if table.len() != rows {
            return Err(invalid(
                name,
                format!("has {} rows, expected x_card^modulus = {rows}", table.len()),
            ));
        }
        if let Some((i, v)) = table.iter().enumerate().find(|(_, &v)| v > max) {
            return Err(invalid(name, format!("row {i} is {v}, above the maximum {max}")));
        }
        Ok(())
    }

    pub fn build(&self) -> Instance {
        Instance::new(self)
    }
}

/// The live functionals described by an [`InstanceSpec`].
pub struct Instance {
    pub x_card: u32,
    pub r_card: u32,
    pub start: Path<Value>,
    pub fuel: u64,
    pub depth: usize,
    pub selections: SelectionFamily<Value, Outcome>,
    pub dep_selections: DepSelectionFamily<Value, Outcome>,
    pub quantifiers: QuantifierFamily<Value, Outcome>,
    pub dep_quantifiers: DepQuantifierFamily<Value, Outcome>,
    pub skewed: SkewedFamily<Value, Outcome>,
    pub dep_skewed: DepSkewedFamily<Value, Outcome>,
    pub outcome: OutcomeFn<Value, Outcome>,
    pub length: LengthFn<Outcome>,
    pub omega: OmegaFn<Value>,
    /// `ε^SBR_s(p) = ε_s(q ∘ p)`
    pub sbr_selections: SeqSelectionFamily<Value>,
}

fn rank_rows(kind: FamilyKind, keys: &[Vec<u32>], r_card: u32) -> Rc<[Rc<[u32]>]> {
    match kind {
        FamilyKind::Argmin => Rc::from(vec![Rc::from((0..r_card).collect::<Vec<_>>())]),
        FamilyKind::Argmax => Rc::from(vec![Rc::from((0..r_card).rev().collect::<Vec<_>>())]),
        FamilyKind::Table | FamilyKind::Parity => {
            keys.iter().map(|k| Rc::from(k.as_slice())).collect()
        }
    }
}

fn class_of_path(kind: FamilyKind, s: &Path<Value>, classes: usize) -> usize {
    let sum: usize = s.iter().map(|v| v.0 as usize).sum();
    match kind {
        FamilyKind::Parity => (s.len() + sum) % classes,
        _ => s.len() % classes,
    }
}

fn rank(ranks: &[u32], r: Outcome) -> EvalResult<u32> {
    ranks
        .get(r.0 as usize)
        .copied()
        .ok_or_else(|| EvalError::ContractViolation(format!("result code {} out of range", r.0)))
}

/// Least value whose result has the least rank.
fn ranked_choice(x_card: u32, ranks: &[u32], p: &Pred<Value, Outcome>) -> EvalResult<(Value, Outcome)> {
    let mut best: Option<(Value, Outcome, u32)> = None;
    for x in 0..x_card {
        let r = p(&Value(x))?;
        let k = rank(ranks, r)?;
        if best.is_none_or(|(_, _, b)| k < b) {
            best = Some((Value(x), r, k));
        }
    }
    best.map(|(x, r, _)| (x, r))
        .ok_or_else(|| EvalError::ContractViolation("empty domain".into()))
}

fn ranked_selection(x_card: u32, ranks: Rc<[u32]>) -> Selection<Value, Outcome> {
    Selection::new(move |p| Ok(ranked_choice(x_card, &ranks, p)?.0))
}

fn ranked_quantifier(x_card: u32, r_card: u32, ranks: Rc<[u32]>, sum: bool) -> Quantifier<Value, Outcome> {
    Quantifier::new(move |p: &Pred<Value, Outcome>| {
        if sum {
            let mut total = ranks[0];
            for x in 0..x_card {
                total += p(&Value(x))?.0;
            }
            Ok(Outcome(total % r_card))
        } else {
            Ok(ranked_choice(x_card, &ranks, p)?.1)
        }
    })
}

fn ranked_skewed(x_card: u32, ranks: Rc<[u32]>, step: u32) -> SkewedSelection<Value, Outcome> {
    SkewedSelection::new(move |p| {
        let x = ranked_choice(x_card, &ranks, p)?.0;
        Ok(Seq::from_fn(move |i| {
            Ok(Value((x.0 + step * i as u32) % x_card))
        }))
    })
}

/// Big-endian index of the first `modulus` values.
fn table_index(alpha: &Seq<Value>, modulus: usize, x_card: u32) -> EvalResult<usize> {
    let mut idx = 0usize;
    for i in 0..modulus {
        let v = alpha.at(i)?;
        if v.0 >= x_card {
            return Err(EvalError::ContractViolation(format!(
                "value {} at index {i} is not below x_card {x_card}",
                v.0
            )));
        }
        idx = idx * x_card as usize + v.0 as usize;
    }
    Ok(idx)
}

impl Instance {
    pub fn new(spec: &InstanceSpec) -> Self {
        let (x_card, r_card) = (spec.x_card, spec.r_card);

        let sel_rows = rank_rows(spec.selection.kind, &spec.selection.keys, r_card);
        let selections = {
            let rows = Rc::clone(&sel_rows);
            Family::new(move |n| ranked_selection(x_card, Rc::clone(&rows[n % rows.len()])))
        };
        let dep_selections = {
            let (rows, kind) = (Rc::clone(&sel_rows), spec.selection.kind);
            PathFamily::new(move |s: &Path<Value>| {
                ranked_selection(x_card, Rc::clone(&rows[class_of_path(kind, s, rows.len())]))
            })
        };

        let q_rows = rank_rows(spec.quantifier.kind, &spec.quantifier.keys, r_card);
        let sum = spec.quantifier.sum;
        let quantifiers = {
            let rows = Rc::clone(&q_rows);
            Family::new(move |n| ranked_quantifier(x_card, r_card, Rc::clone(&rows[n % rows.len()]), sum))
        };
        let dep_quantifiers = {
            let (rows, kind) = (Rc::clone(&q_rows), spec.quantifier.kind);
            PathFamily::new(move |s: &Path<Value>| {
                let c = class_of_path(kind, s, rows.len());
                ranked_quantifier(x_card, r_card, Rc::clone(&rows[c]), sum)
            })
        };

        let k_rows = rank_rows(spec.skewed.kind, &spec.skewed.keys, r_card);
        let step = spec.skewed.tail_step;
        let skewed = {
            let rows = Rc::clone(&k_rows);
            Family::new(move |n| ranked_skewed(x_card, Rc::clone(&rows[n % rows.len()]), step))
        };
        let dep_skewed = {
            let (rows, kind) = (Rc::clone(&k_rows), spec.skewed.kind);
            PathFamily::new(move |s: &Path<Value>| {
                ranked_skewed(x_card, Rc::clone(&rows[class_of_path(kind, s, rows.len())]), step)
            })
        };

        let outcome = {
            let table: Rc<[u32]> = spec.outcome.table.as_slice().into();
            let d = spec.outcome.modulus;
            OutcomeFn::with_modulus(d, move |a: &Seq<Value>| {
                Ok(Outcome(table[table_index(a, d, x_card)?]))
            })
        };

        let length = match spec.length.kind {
            LengthKind::Identity => LengthFn::identity(),
            LengthKind::Table => {
                let table: Rc<[u32]> = spec.length.table.as_slice().into();
                LengthFn::new(move |r: &Outcome| {
                    table
                        .get(r.0 as usize)
                        .map(|&v| v as usize)
                        .ok_or_else(|| EvalError::ContractViolation(format!("no length for {}", r.0)))
                })
            }
        };

        let omega = {
            let table: Rc<[u32]> = spec.omega.table.as_slice().into();
            let m = spec.omega.modulus;
            OmegaFn::new(move |a: &Seq<Value>| Ok(table[table_index(a, m, x_card)?] as usize))
                .with_modulus(m)
                .with_bound(spec.omega.bound)
        };

        let sbr_selections = {
            let (fam, q) = (dep_selections.clone(), outcome.clone());
            PathFamily::new(move |s: &Path<Value>| {
                let q = q.clone();
                fam.at(s).pull_back(move |a: &Seq<Value>| q.apply(a))
            })
        };

        Instance {
            x_card,
            r_card,
            start: spec.start.iter().map(|&v| Value(v)).collect(),
            fuel: spec.fuel.unwrap_or(DEFAULT_FUEL),
            depth: spec.depth.unwrap_or(DEFAULT_DEPTH),
            selections,
            dep_selections,
            quantifiers,
            dep_quantifiers,
            skewed,
            dep_skewed,
            outcome,
            length,
            omega,
            sbr_selections,
        }
    }

    pub fn domain(&self) -> Vec<Value> {
        (0..self.x_card).map(Value).collect()
    }
}
