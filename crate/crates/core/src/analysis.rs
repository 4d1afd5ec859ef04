//! Analytical performance model of collective resolution.
//!
//! Four structural probabilities are estimated from gold-labeled data:
//! attribute identification `a_I(e)`, attribute ambiguity `a_A(e1,e2)`,
//! identifying relationship `r_I(e)` and ambiguous relationship `r_A(e1,e2)`.
//! The recall and imprecision recursions then predict how accuracy evolves with
//! expansion depth.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::{EntityId, GoldLabeling, RefIdx};
use crate::similarity::Scorer;

type Pair = (EntityId, EntityId);

fn pair(a: EntityId, b: EntityId) -> Pair {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StructuralProbs {
    /// Defined for entities with at least two references.
    pub a_i: BTreeMap<EntityId, f64>,
    /// Entity pairs with at least one δ-similar cross pair; other pairs use `default_a_a`.
    pub a_a: BTreeMap<Pair, f64>,
    /// Defined for entities with at least one δ-similar within pair.
    pub r_i: BTreeMap<EntityId, f64>,
    pub r_a: BTreeMap<Pair, f64>,
    /// Row `e`: share of `e`'s co-occurrence incidences involving each neighbor entity.
    pub neighbor_weights: BTreeMap<EntityId, BTreeMap<EntityId, f64>>,
    pub default_a_i: f64,
    pub default_r_i: f64,
    pub default_a_a: f64,
    pub default_r_a: f64,
}

impl StructuralProbs {
    /// Uniform probabilities over a given neighbor structure.
    pub fn uniform(neighbor_weights: BTreeMap<EntityId, BTreeMap<EntityId, f64>>, a_i: f64, r_i: f64, a_a: f64, r_a: f64) -> Self {
        StructuralProbs { neighbor_weights, default_a_i: a_i, default_r_i: r_i, default_a_a: a_a, default_r_a: r_a, ..Default::default() }
    }

    pub fn a_i(&self, e: EntityId) -> f64 {
        self.a_i.get(&e).copied().unwrap_or(self.default_a_i)
    }

    pub fn r_i(&self, e: EntityId) -> f64 {
        self.r_i.get(&e).copied().unwrap_or(self.default_r_i)
    }

    pub fn a_a(&self, e1: EntityId, e2: EntityId) -> f64 {
        self.a_a.get(&pair(e1, e2)).copied().unwrap_or(self.default_a_a)
    }

    pub fn r_a(&self, e1: EntityId, e2: EntityId) -> f64 {
        self.r_a.get(&pair(e1, e2)).copied().unwrap_or(self.default_r_a)
    }

    fn row(&self, e: EntityId) -> impl Iterator<Item = (EntityId, f64)> + '_ {
        self.neighbor_weights.get(&e).into_iter().flat_map(|m| m.iter().map(|(k, v)| (*k, *v)))
    }
}

fn entity_members(gold: &GoldLabeling) -> Vec<Vec<RefIdx>> {
    gold.members()
}

/// Estimates `a_I` and `a_A` from ε-similarity between references.
pub fn estimate_attribute_probs(scorer: &Scorer<'_>, gold: &GoldLabeling) -> (BTreeMap<EntityId, f64>, BTreeMap<Pair, f64>) {
    let members = entity_members(gold);
    let mut a_i = BTreeMap::new();
    for (e, refs) in members.iter().enumerate() {
        if refs.len() < 2 {
            continue;
        }
        let (mut hit, mut total) = (0usize, 0usize);
        for (i, x) in refs.iter().enumerate() {
            for y in &refs[i + 1..] {
                total += 1;
                hit += scorer.epsilon_similar(*x, *y) as usize;
            }
        }
        a_i.insert(e as EntityId, hit as f64 / total as f64);
    }
    // ε-similar pairs are δ-similar, so cross pairs outside the blocking output score 0.
    let all: Vec<RefIdx> = scorer.dataset().ref_ids().collect();
    let mut hits: BTreeMap<Pair, usize> = BTreeMap::new();
    for (x, y) in scorer.block_candidates(&all) {
        let (ex, ey) = (gold.entity(x), gold.entity(y));
        if ex != ey {
            *hits.entry(pair(ex, ey)).or_default() += scorer.epsilon_similar(x, y) as usize;
        }
    }
    let a_a = hits
        .into_iter()
        .map(|((e1, e2), h)| ((e1, e2), h as f64 / (members[e1 as usize].len() * members[e2 as usize].len()) as f64))
        .collect();
    (a_i, a_a)
}

/// Co-occurring references of `r` excluding `skip`.
fn partners(scorer: &Scorer<'_>, r: RefIdx) -> Vec<RefIdx> {
    scorer.dataset().cooccurring(r)
}

/// Whether δ-similar references `x` (entity `e`) and `y` have identifying
/// relationships: co-referent co-occurring references of another entity.
pub fn has_identifying(scorer: &Scorer<'_>, gold: &GoldLabeling, x: RefIdx, y: RefIdx) -> bool {
    let e = gold.entity(x);
    let py = partners(scorer, y);
    partners(scorer, x).iter().filter(|a| **a != y).any(|a| {
        let ea = gold.entity(*a);
        ea != e && py.iter().any(|b| *b != x && b != a && gold.entity(*b) == ea)
    })
}

/// Whether δ-similar references `x` and `y` of different entities have ambiguous
/// relationships: co-occurring references of two different entities that are
/// themselves δ-similar.
pub fn has_ambiguous(scorer: &Scorer<'_>, gold: &GoldLabeling, x: RefIdx, y: RefIdx) -> bool {
    let py = partners(scorer, y);
    partners(scorer, x)
        .iter()
        .filter(|a| **a != y)
        .any(|a| py.iter().any(|b| *b != x && b != a && gold.entity(*a) != gold.entity(*b) && scorer.delta_similar(*a, *b)))
}

/// Estimates `r_I` and `r_A` over δ-similar reference pairs.
pub fn estimate_relational_probs(scorer: &Scorer<'_>, gold: &GoldLabeling) -> (BTreeMap<EntityId, f64>, BTreeMap<Pair, f64>) {
    let all: Vec<RefIdx> = scorer.dataset().ref_ids().collect();
    let mut within: BTreeMap<EntityId, (usize, usize)> = BTreeMap::new();
    let mut cross: BTreeMap<Pair, (usize, usize)> = BTreeMap::new();
    for (x, y) in scorer.block_candidates(&all) {
        let (ex, ey) = (gold.entity(x), gold.entity(y));
        if ex == ey {
            let slot = within.entry(ex).or_default();
            slot.0 += has_identifying(scorer, gold, x, y) as usize;
            slot.1 += 1;
        } else {
            let slot = cross.entry(pair(ex, ey)).or_default();
            slot.0 += has_ambiguous(scorer, gold, x, y) as usize;
            slot.1 += 1;
        }
    }
    let frac = |(h, t): (usize, usize)| h as f64 / t as f64;
    (within.into_iter().map(|(k, v)| (k, frac(v))).collect(), cross.into_iter().map(|(k, v)| (k, frac(v))).collect())
}

/// Empirical neighbor distribution of every entity from gold-labeled hyper-edges.
pub fn estimate_neighbor_weights(scorer: &Scorer<'_>, gold: &GoldLabeling) -> BTreeMap<EntityId, BTreeMap<EntityId, f64>> {
    let ds = scorer.dataset();
    let mut counts: BTreeMap<EntityId, BTreeMap<EntityId, f64>> = BTreeMap::new();
    for h in ds.hyperedges() {
        for a in &h.refs {
            for b in &h.refs {
                let (ea, eb) = (gold.entity(*a), gold.entity(*b));
                if a != b && ea != eb {
                    *counts.entry(ea).or_default().entry(eb).or_default() += 1.0;
                }
            }
        }
    }
    for row in counts.values_mut() {
        let total: f64 = row.values().sum();
        row.values_mut().for_each(|v| *v /= total);
    }
    counts
}

/// All structural probabilities. Undefined `a_I` / `r_I` values fall back to 0.
pub fn estimate_all(scorer: &Scorer<'_>, gold: &GoldLabeling) -> StructuralProbs {
    let (a_i, a_a) = estimate_attribute_probs(scorer, gold);
    let (r_i, r_a) = estimate_relational_probs(scorer, gold);
    let undefined = gold.num_entities() - r_i.len();
    if undefined > 0 {
        log::info!("{undefined} entities have no δ-similar reference pair; r_I treated as 0");
    }
    StructuralProbs { a_i, a_a, r_i, r_a, neighbor_weights: estimate_neighbor_weights(scorer, gold), ..Default::default() }
}

/// Predicted recall of entity `e` with relational evidence `depth` levels deep.
pub fn predict_recall(probs: &StructuralProbs, e: EntityId, depth: usize) -> f64 {
    let mut memo = HashMap::new();
    recall_rec(probs, e, depth, &mut memo)
}

fn recall_rec(probs: &StructuralProbs, e: EntityId, d: usize, memo: &mut HashMap<(EntityId, usize), f64>) -> f64 {
    if let Some(v) = memo.get(&(e, d)) {
        return *v;
    }
    let a = probs.a_i(e);
    let v = if d == 0 {
        a
    } else {
        let nbr: Vec<(EntityId, f64)> = probs.row(e).collect();
        let sum: f64 = nbr.iter().map(|(n, p)| p * recall_rec(probs, *n, d - 1, memo)).sum();
        a + (1.0 - a) * probs.r_i(e) * sum
    };
    memo.insert((e, d), v);
    v
}

/// Predicted imprecision between entities `e1` and `e2`.
pub fn predict_imprecision(probs: &StructuralProbs, e1: EntityId, e2: EntityId, depth: usize) -> f64 {
    let mut memo = HashMap::new();
    imprecision_rec(probs, e1, e2, depth, &mut memo)
}

fn imprecision_rec(probs: &StructuralProbs, e1: EntityId, e2: EntityId, d: usize, memo: &mut HashMap<(Pair, usize), f64>) -> f64 {
    let key = (pair(e1, e2), d);
    if let Some(v) = memo.get(&key) {
        return *v;
    }
    let a = probs.a_a(e1, e2);
    let v = if d == 0 {
        a
    } else {
        let n1: Vec<(EntityId, f64)> = probs.row(e1).collect();
        let n2: Vec<(EntityId, f64)> = probs.row(e2).collect();
        let mut sum = 0.0;
        for (i, pi) in &n1 {
            for (j, pj) in &n2 {
                sum += pi * pj * imprecision_rec(probs, *i, *j, d - 1, memo);
            }
        }
        a + (1.0 - a) * probs.r_a(e1, e2) * sum
    };
    memo.insert(key, v);
    v
}

/// `a·Σ_{i=0..n} ((1−a)·r)^i` in closed form.
pub fn closed_form_gp(a: f64, r: f64, n: u32) -> f64 {
    // 1 − q written without cancellation for q = (1−a)·r close to 1.
    let one_minus_q = (1.0 - r) + a * r;
    let terms = n as f64 + 1.0;
    if one_minus_q <= 0.0 {
        return a * terms;
    }
    let q = (1.0 - a) * r;
    if q == 0.0 {
        return a;
    }
    let one_minus_qn = -((terms * (-one_minus_q).ln_1p()).exp_m1());
    a * one_minus_qn / one_minus_q
}

/// Tab-separated `entity depth recall` rows for every entity of the labeling.
pub fn recall_table(probs: &StructuralProbs, gold: &GoldLabeling, max_depth: usize) -> String {
    let mut out = String::from("entity\tdepth\trecall\n");
    for e in 0..gold.num_entities() as EntityId {
        for d in 0..=max_depth {
            let _ = writeln!(out, "{}\t{}\t{:.6}", gold.entity_name(e), d, predict_recall(probs, e, d));
        }
    }
    out
}
