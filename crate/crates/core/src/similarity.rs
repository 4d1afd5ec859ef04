//! Attribute similarity, cluster neighborhoods and the combined measure used
//! by the clusterer.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{AttributeKind, BlockKey, Dataset, EdgeIdx, NameId, NameInfo, RefIdx};
use crate::error::{Error, Result};

/// Attribute key for the reference name (or numeric value on synthetic data).
pub const NAME_ATTR: &str = "name";

/// Token-level match threshold used inside Soft TF-IDF.
pub const TOKEN_MATCH_THRESHOLD: f64 = 0.9;

/// Width of the range over which numeric similarity decays from 1 to 0.
pub const NUMERIC_SCALE: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborhoodMode {
    #[default]
    Set,
    Multiset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilarityConfig {
    pub alpha: f64,
    pub attr_weights: BTreeMap<String, f64>,
    pub epsilon: f64,
    pub delta: f64,
    pub merge_threshold: f64,
    #[serde(default)]
    pub neighborhood: NeighborhoodMode,
}

fn default_weights() -> BTreeMap<String, f64> {
    BTreeMap::from([(NAME_ATTR.to_owned(), 1.0)])
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            alpha: 0.5,
            attr_weights: default_weights(),
            epsilon: 0.99,
            delta: 0.5,
            merge_threshold: 0.7,
            neighborhood: NeighborhoodMode::Set,
        }
    }
}

impl SimilarityConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must lie in [0,1], got {v}")))
            }
        };
        unit("alpha", self.alpha)?;
        unit("epsilon", self.epsilon)?;
        unit("delta", self.delta)?;
        unit("merge_threshold", self.merge_threshold)?;
        if self.epsilon < self.delta {
            return Err(Error::InvalidConfig(format!("epsilon ({}) must not be below delta ({})", self.epsilon, self.delta)));
        }
        if self.attr_weights.is_empty() {
            return Err(Error::InvalidConfig("attr_weights is empty".into()));
        }
        if let Some((k, w)) = self.attr_weights.iter().find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidConfig(format!("weight for `{k}` is {w}")));
        }
        let total: f64 = self.attr_weights.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("attribute weights sum to {total}, not 1")));
        }
        Ok(())
    }
}

/// Jaro similarity of two strings, compared character-wise.
pub fn jaro(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut a_hit = vec![false; a.len()];
    let mut b_hit = vec![false; b.len()];
    let mut matches = 0usize;
    for (i, ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_hit[j] && b[j] == *ca {
                a_hit[i] = true;
                b_hit[j] = true;
                matches += 1;
                break;
            }
        }
    }
    if matches == 0 {
        return 0.0;
    }
    let a_seq = a.iter().zip(&a_hit).filter(|(_, h)| **h).map(|(c, _)| c);
    let b_seq = b.iter().zip(&b_hit).filter(|(_, h)| **h).map(|(c, _)| c);
    let half_transpositions = a_seq.zip(b_seq).filter(|(x, y)| x != y).count();
    let m = matches as f64;
    let t = (half_transpositions / 2) as f64;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

/// Jaro-Winkler with the usual prefix boost (at most 4 characters, scale 0.1),
/// applied when the Jaro score exceeds 0.7.
pub fn jaro_winkler(a: &str, b: &str) -> f64 {
    let j = jaro(a, b);
    if j <= 0.7 {
        return j;
    }
    let prefix = a.chars().zip(b.chars()).take(4).take_while(|(x, y)| x == y).count();
    (j + prefix as f64 * 0.1 * (1.0 - j)).min(1.0)
}

/// Corpus-level token statistics for Soft TF-IDF.
#[derive(Debug, Clone, Default)]
pub struct NameStats {
    df: HashMap<String, usize>,
    n_docs: usize,
}

/// L2-normalized token weight vector of one name.
pub type TokenVector = Vec<(String, f64)>;

impl NameStats {
    /// Document frequencies over all references of the dataset (one name per reference).
    pub fn from_dataset(ds: &Dataset) -> Self {
        let mut df: HashMap<String, usize> = HashMap::new();
        for r in ds.ref_ids() {
            let info = ds.ref_name_info(r);
            let distinct: BTreeSet<&String> = info.tokens.iter().collect();
            for t in distinct {
                *df.entry(t.clone()).or_default() += 1;
            }
        }
        NameStats { df, n_docs: ds.len() }
    }

    pub fn vector(&self, tokens: &[String]) -> TokenVector {
        let mut tf: BTreeMap<&str, usize> = BTreeMap::new();
        for t in tokens {
            *tf.entry(t.as_str()).or_default() += 1;
        }
        let n = self.n_docs.max(1) as f64;
        let mut v: TokenVector = tf
            .iter()
            .map(|(t, c)| {
                let df = self.df.get(*t).copied().unwrap_or(0).max(1) as f64;
                (t.to_string(), (1.0 + *c as f64).ln() * (1.0 + n / df).ln())
            })
            .collect();
        let norm = v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|(_, w)| *w /= norm);
        }
        v
    }
}

/// One direction of Soft TF-IDF: every token of `s` is paired with its best
/// Jaro-Winkler match in `t` when that match clears the token threshold.
fn soft_tfidf_directed(s: &TokenVector, t: &TokenVector) -> f64 {
    let mut total = 0.0;
    for (ws, vs) in s {
        let best = t.iter().map(|(wt, vt)| (jaro_winkler(ws, wt), *vt)).fold(None::<(f64, f64)>, |acc, cur| match acc {
            Some(a) if a.0 >= cur.0 => Some(a),
            _ => Some(cur),
        });
        if let Some((sim, vt)) = best {
            if sim >= TOKEN_MATCH_THRESHOLD {
                total += vs * vt * sim;
            }
        }
    }
    total
}

/// Symmetric Soft TF-IDF between two token vectors, clamped to [0,1].
pub fn soft_tfidf(a: &TokenVector, b: &TokenVector) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let s = 0.5 * (soft_tfidf_directed(a, b) + soft_tfidf_directed(b, a));
    s.clamp(0.0, 1.0)
}

/// Name similarity of two raw names under the given corpus statistics.
pub fn name_sim(n1: &str, n2: &str, stats: &NameStats) -> f64 {
    let a = NameInfo::parse(n1);
    let b = NameInfo::parse(n2);
    soft_tfidf(&stats.vector(&a.tokens), &stats.vector(&b.tokens))
}

/// Similarity of two numeric attributes: 1 at equality, 0 once they are
/// [`NUMERIC_SCALE`] apart.
pub fn numeric_sim(x: f64, y: f64) -> f64 {
    1.0 - ((x - y).abs() / NUMERIC_SCALE).min(1.0)
}

/// Candidate rule for names: first initials agree, last names start with the
/// same character and are at most two edits apart.
pub fn delta_rule(a: &NameInfo, b: &NameInfo) -> bool {
    a.first_initial == b.first_initial
        && !a.last.is_empty()
        && a.last.chars().next() == b.last.chars().next()
        && strsim::levenshtein(&a.last, &b.last) <= 2
}

/// Lowercased alphanumeric tokens of free text.
pub fn text_tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(str::to_lowercase)
}

fn cosine(a: &BTreeMap<String, u32>, b: &BTreeMap<String, u32>) -> f64 {
    let dot: f64 = a.iter().filter_map(|(k, x)| b.get(k).map(|y| (*x as f64) * (*y as f64))).sum();
    let na: f64 = a.values().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(0.0, 1.0)
    }
}

/// Aggregated attributes of a cluster, mergeable in O(size of the smaller profile).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClusterProfile {
    pub name_counts: BTreeMap<NameId, u32>,
    pub value_sum: f64,
    pub size: u32,
    pub bags: BTreeMap<String, BTreeMap<String, u32>>,
}

impl ClusterProfile {
    pub fn singleton(ds: &Dataset, r: RefIdx, attrs: &[String]) -> Self {
        let mut p = ClusterProfile { size: 1, ..Default::default() };
        p.name_counts.insert(ds.name_id(r), 1);
        if ds.kind() == AttributeKind::Numeric {
            p.value_sum = ds.value(r);
        }
        let reference = ds.reference(r);
        for a in attrs {
            if let Some(text) = reference.extra_attrs.get(a) {
                let bag = p.bags.entry(a.clone()).or_default();
                for t in text_tokens(text) {
                    *bag.entry(t).or_default() += 1;
                }
            }
        }
        p
    }

    pub fn of_members(ds: &Dataset, members: &[RefIdx], attrs: &[String]) -> Self {
        let mut p = ClusterProfile::default();
        for r in members {
            p.absorb(&ClusterProfile::singleton(ds, *r, attrs));
        }
        p
    }

    pub fn absorb(&mut self, other: &ClusterProfile) {
        for (n, c) in &other.name_counts {
            *self.name_counts.entry(*n).or_default() += c;
        }
        self.value_sum += other.value_sum;
        self.size += other.size;
        for (a, bag) in &other.bags {
            let mine = self.bags.entry(a.clone()).or_default();
            for (t, c) in bag {
                *mine.entry(t.clone()).or_default() += c;
            }
        }
    }

    /// Most frequent name, ties broken by the lexicographically smallest normalized name.
    pub fn representative(&self, ds: &Dataset) -> Option<NameId> {
        self.name_counts
            .iter()
            .max_by(|(n1, c1), (n2, c2)| c1.cmp(c2).then_with(|| ds.name_info(**n2).normalized.cmp(&ds.name_info(**n1).normalized)))
            .map(|(n, _)| *n)
    }

    pub fn mean_value(&self) -> f64 {
        if self.size == 0 {
            0.0
        } else {
            self.value_sum / self.size as f64
        }
    }
}

/// Attribute similarity machinery bound to one dataset.
#[derive(Debug, Clone)]
pub struct Scorer<'a> {
    ds: &'a Dataset,
    cfg: SimilarityConfig,
    vectors: Vec<TokenVector>,
    stats: NameStats,
    extra_attrs: Vec<String>,
}

impl<'a> Scorer<'a> {
    pub fn new(ds: &'a Dataset, cfg: SimilarityConfig) -> Result<Self> {
        cfg.validate()?;
        let stats = NameStats::from_dataset(ds);
        let vectors = ds.names().iter().map(|n| stats.vector(&n.tokens)).collect();
        let extra_attrs = cfg.attr_weights.keys().filter(|k| *k != NAME_ATTR).cloned().collect();
        Ok(Scorer { ds, cfg, vectors, stats, extra_attrs })
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.ds
    }

    pub fn config(&self) -> &SimilarityConfig {
        &self.cfg
    }

    pub fn stats(&self) -> &NameStats {
        &self.stats
    }

    /// Attributes other than the name that take part in attribute similarity.
    pub fn extra_attrs(&self) -> &[String] {
        &self.extra_attrs
    }

    pub fn name_id_sim(&self, a: NameId, b: NameId) -> f64 {
        if a == b {
            return 1.0;
        }
        soft_tfidf(&self.vectors[a.index()], &self.vectors[b.index()])
    }

    /// Similarity of the primary attribute (name or numeric value) of two references.
    pub fn primary_sim(&self, a: RefIdx, b: RefIdx) -> f64 {
        match self.ds.kind() {
            AttributeKind::Name => self.name_id_sim(self.ds.name_id(a), self.ds.name_id(b)),
            AttributeKind::Numeric => numeric_sim(self.ds.value(a), self.ds.value(b)),
        }
    }

    /// Similarity of a raw query value to a reference's primary attribute.
    pub fn value_sim(&self, value: &str, r: RefIdx) -> f64 {
        match self.ds.kind() {
            AttributeKind::Name => {
                let info = NameInfo::parse(value);
                soft_tfidf(&self.stats.vector(&info.tokens), &self.vectors[self.ds.name_id(r).index()])
            }
            AttributeKind::Numeric => match value.trim().parse::<f64>() {
                Ok(x) => numeric_sim(x, self.ds.value(r)),
                Err(_) => 0.0,
            },
        }
    }

    pub fn rule_ok(&self, a: RefIdx, b: RefIdx) -> bool {
        match self.ds.kind() {
            AttributeKind::Name => delta_rule(self.ds.ref_name_info(a), self.ds.ref_name_info(b)),
            AttributeKind::Numeric => true,
        }
    }

    pub fn delta_similar(&self, a: RefIdx, b: RefIdx) -> bool {
        self.rule_ok(a, b) && self.primary_sim(a, b) >= self.cfg.delta
    }

    pub fn epsilon_similar(&self, a: RefIdx, b: RefIdx) -> bool {
        self.rule_ok(a, b) && self.primary_sim(a, b) >= self.cfg.epsilon
    }

    /// Largest numeric distance that is still δ-similar.
    pub fn delta_radius(&self) -> f64 {
        NUMERIC_SCALE * (1.0 - self.cfg.delta)
    }

    pub fn profile(&self, members: &[RefIdx]) -> ClusterProfile {
        ClusterProfile::of_members(self.ds, members, &self.extra_attrs)
    }

    pub fn singleton_profile(&self, r: RefIdx) -> ClusterProfile {
        ClusterProfile::singleton(self.ds, r, &self.extra_attrs)
    }

    /// Weighted attribute similarity between two cluster profiles.
    pub fn attribute_sim(&self, a: &ClusterProfile, b: &ClusterProfile) -> f64 {
        let mut total = 0.0;
        for (attr, w) in &self.cfg.attr_weights {
            if *w == 0.0 {
                continue;
            }
            let s = if attr == NAME_ATTR {
                match self.ds.kind() {
                    AttributeKind::Name => match (a.representative(self.ds), b.representative(self.ds)) {
                        (Some(x), Some(y)) => self.name_id_sim(x, y),
                        _ => 0.0,
                    },
                    AttributeKind::Numeric => numeric_sim(a.mean_value(), b.mean_value()),
                }
            } else {
                match (a.bags.get(attr), b.bags.get(attr)) {
                    (Some(x), Some(y)) => cosine(x, y),
                    _ => 0.0,
                }
            };
            total += w * s;
        }
        total.clamp(0.0, 1.0)
    }

    /// Attribute similarity of two single references.
    pub fn ref_attr_sim(&self, a: RefIdx, b: RefIdx) -> f64 {
        self.attribute_sim(&self.singleton_profile(a), &self.singleton_profile(b))
    }

    /// Unordered δ-similar pairs among `refs` (each pair once, smaller index first).
    pub fn block_candidates(&self, refs: &[RefIdx]) -> Vec<(RefIdx, RefIdx)> {
        let mut sorted: Vec<RefIdx> = refs.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut out = Vec::new();
        match self.ds.kind() {
            AttributeKind::Name => {
                let mut blocks: BTreeMap<BlockKey, Vec<RefIdx>> = BTreeMap::new();
                for r in &sorted {
                    blocks.entry(self.ds.ref_name_info(*r).block_key()).or_default().push(*r);
                }
                for block in blocks.values() {
                    // Group by name so that the pair test runs once per name pair.
                    let mut by_name: BTreeMap<NameId, Vec<RefIdx>> = BTreeMap::new();
                    for r in block {
                        by_name.entry(self.ds.name_id(*r)).or_default().push(*r);
                    }
                    let groups: Vec<(&NameId, &Vec<RefIdx>)> = by_name.iter().collect();
                    for (i, (n1, g1)) in groups.iter().enumerate() {
                        let self_ok = {
                            let info = self.ds.name_info(**n1);
                            delta_rule(info, info)
                        };
                        if self_ok {
                            for (x, a) in g1.iter().enumerate() {
                                for b in &g1[x + 1..] {
                                    out.push(ordered(*a, *b));
                                }
                            }
                        }
                        for (n2, g2) in &groups[i + 1..] {
                            let ok = delta_rule(self.ds.name_info(**n1), self.ds.name_info(**n2))
                                && self.name_id_sim(**n1, **n2) >= self.cfg.delta;
                            if ok {
                                for a in g1.iter() {
                                    for b in g2.iter() {
                                        out.push(ordered(*a, *b));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            AttributeKind::Numeric => {
                let radius = self.delta_radius();
                let mut by_value: Vec<(f64, RefIdx)> = sorted.iter().map(|r| (self.ds.value(*r), *r)).collect();
                by_value.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                for (i, (x, a)) in by_value.iter().enumerate() {
                    for (y, b) in &by_value[i + 1..] {
                        if y - x > radius {
                            break;
                        }
                        if numeric_sim(*x, *y) >= self.cfg.delta {
                            out.push(ordered(*a, *b));
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn ordered(a: RefIdx, b: RefIdx) -> (RefIdx, RefIdx) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Union of the hyper-edges of a cluster's members.
pub fn hyperedge_set(ds: &Dataset, members: &[RefIdx]) -> BTreeSet<EdgeIdx> {
    members.iter().flat_map(|r| ds.reference(*r).hyperedges.iter().copied()).collect()
}

/// Multiset of cluster labels spanned by a cluster's hyper-edges, excluding the
/// cluster's own label and references without a label.
pub fn neighborhood<L, F>(ds: &Dataset, members: &[RefIdx], own: L, label: F) -> BTreeMap<L, u32>
where
    L: Ord + Copy,
    F: Fn(RefIdx) -> Option<L>,
{
    let mut out = BTreeMap::new();
    for h in hyperedge_set(ds, members) {
        for r in &ds.hyperedge(h).refs {
            if let Some(l) = label(*r) {
                if l != own {
                    *out.entry(l).or_default() += 1;
                }
            }
        }
    }
    out
}

/// Jaccard coefficient of two label collections. Under [`NeighborhoodMode::Set`]
/// multiplicities are ignored; under `Multiset` it is Σmin / Σmax. Two empty
/// neighborhoods score 0.
pub fn jaccard<L: Ord>(a: &BTreeMap<L, u32>, b: &BTreeMap<L, u32>, mode: NeighborhoodMode) -> f64 {
    let (mut inter, mut union) = (0u64, 0u64);
    let mut ia = a.iter().peekable();
    let mut ib = b.iter().peekable();
    let weight = |c: u32| match mode {
        NeighborhoodMode::Set => 1u64,
        NeighborhoodMode::Multiset => c as u64,
    };
    loop {
        match (ia.peek(), ib.peek()) {
            (Some((ka, ca)), Some((kb, cb))) => match ka.cmp(kb) {
                std::cmp::Ordering::Less => {
                    union += weight(**ca);
                    ia.next();
                }
                std::cmp::Ordering::Greater => {
                    union += weight(**cb);
                    ib.next();
                }
                std::cmp::Ordering::Equal => {
                    let (x, y) = (weight(**ca), weight(**cb));
                    inter += x.min(y);
                    union += x.max(y);
                    ia.next();
                    ib.next();
                }
            },
            (Some((_, ca)), None) => {
                union += weight(**ca);
                ia.next();
            }
            (None, Some((_, cb))) => {
                union += weight(**cb);
                ib.next();
            }
            (None, None) => break,
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Relational similarity of two neighborhoods.
pub fn relational_sim<L: Ord>(a: &BTreeMap<L, u32>, b: &BTreeMap<L, u32>, mode: NeighborhoodMode) -> f64 {
    jaccard(a, b, mode)
}

/// `(1 − α)·attribute + α·relational`.
pub fn combined_sim(attribute: f64, relational: f64, alpha: f64) -> f64 {
    ((1.0 - alpha) * attribute + alpha * relational).clamp(0.0, 1.0)
}
