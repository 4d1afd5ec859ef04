//! Relevant-set extraction for a query: attribute and hyper-edge expansion,
//! their adaptive variants, and ambiguity estimation.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{AttributeKind, Dataset, NameInfo, RefIdx};
use crate::error::{Error, Result};
use crate::similarity::{delta_rule, numeric_sim, Scorer, NUMERIC_SCALE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpansionParams {
    /// Cut-off depth.
    pub d_star: usize,
    /// Restrict attribute expansion beyond level 0 to exact name matches
    /// (ε-similar values for numeric attributes).
    pub exact_beyond_level0: bool,
    /// Bound on hyper-edge expansion growth per level.
    pub adaptive_h: Option<f64>,
    /// Fraction of the frontier that is attribute-expanded.
    pub adaptive_a: Option<f64>,
    /// Use depth 1 for queries whose last name has few distinct first initials.
    pub adaptive_depth: bool,
    /// Number of distinct first initials below which the depth drops to 1. 0 disables the rule.
    pub initials_cutoff: usize,
}

impl Default for ExpansionParams {
    fn default() -> Self {
        ExpansionParams {
            d_star: 1,
            exact_beyond_level0: true,
            adaptive_h: None,
            adaptive_a: None,
            adaptive_depth: false,
            initials_cutoff: 10,
        }
    }
}

impl ExpansionParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(h) = self.adaptive_h {
            if !(h >= 1.0 && h.is_finite()) {
                return Err(Error::InvalidConfig(format!("h_max must be at least 1, got {h}")));
            }
        }
        if let Some(a) = self.adaptive_a {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::InvalidConfig(format!("a_max must lie in (0,1], got {a}")));
            }
        }
        Ok(())
    }
}

/// Secondary attribute used by the conditional ambiguity estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Secondary {
    #[default]
    FirstInitial,
    Forenames,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmbiguityMode {
    /// Share of references carrying exactly the value.
    Naive,
    /// Distinct secondary values observed for the value's last name, over |R|.
    #[default]
    Conditional,
}

/// Ambiguity estimates for attribute values, built once per dataset.
#[derive(Debug, Clone)]
pub struct AmbiguityEstimator<'a> {
    ds: &'a Dataset,
    mode: AmbiguityMode,
    secondary: Secondary,
    secondaries: HashMap<String, BTreeSet<String>>,
    initials: HashMap<String, BTreeSet<char>>,
    /// Half-width of the window counted by numeric estimates.
    numeric_window: f64,
    mu_r: f64,
}

/// Default half-width of the numeric ambiguity window (the occupied range of an entity).
pub const NUMERIC_WINDOW: f64 = 3.0;

impl<'a> AmbiguityEstimator<'a> {
    pub fn new(ds: &'a Dataset, mode: AmbiguityMode, secondary: Secondary) -> Self {
        let mut secondaries: HashMap<String, BTreeSet<String>> = HashMap::new();
        let mut initials: HashMap<String, BTreeSet<char>> = HashMap::new();
        if ds.kind() == AttributeKind::Name {
            for info in ds.names() {
                let sec = match secondary {
                    Secondary::FirstInitial => info.first_initial.map(String::from).unwrap_or_default(),
                    Secondary::Forenames => info.forenames.clone(),
                };
                secondaries.entry(info.last.clone()).or_default().insert(sec);
                if let Some(c) = info.first_initial {
                    initials.entry(info.last.clone()).or_default().insert(c);
                }
            }
        }
        let mu_r = if ds.num_names() == 0 { 0.0 } else { ds.len() as f64 / ds.num_names() as f64 };
        AmbiguityEstimator { ds, mode, secondary, secondaries, initials, numeric_window: NUMERIC_WINDOW, mu_r }
    }

    pub fn with_numeric_window(mut self, w: f64) -> Self {
        self.numeric_window = w;
        self
    }

    pub fn mode(&self) -> AmbiguityMode {
        self.mode
    }

    pub fn secondary(&self) -> Secondary {
        self.secondary
    }

    /// Average number of references per distinct name.
    pub fn mu_r(&self) -> f64 {
        self.mu_r
    }

    fn total(&self) -> f64 {
        self.ds.len().max(1) as f64
    }

    /// Estimated ambiguity of a raw attribute value; 0 for unseen values.
    pub fn estimate(&self, value: &str) -> f64 {
        match self.ds.kind() {
            AttributeKind::Name => self.estimate_name(&NameInfo::parse(value)),
            AttributeKind::Numeric => value.trim().parse::<f64>().map(|x| self.estimate_numeric(x)).unwrap_or(0.0),
        }
    }

    pub fn estimate_name(&self, info: &NameInfo) -> f64 {
        match self.mode {
            AmbiguityMode::Naive => {
                let n = self.ds.lookup_name_id(&info.normalized).map_or(0, |n| self.ds.refs_with_name(n).len());
                n as f64 / self.total()
            }
            AmbiguityMode::Conditional => self.secondaries.get(&info.last).map_or(0, BTreeSet::len) as f64 / self.total(),
        }
    }

    pub fn estimate_numeric(&self, x: f64) -> f64 {
        self.ds.refs_in_range(x - self.numeric_window, x + self.numeric_window).len() as f64 / self.total()
    }

    /// Ambiguity of a reference's own attribute value.
    pub fn estimate_ref(&self, r: RefIdx) -> f64 {
        match self.ds.kind() {
            AttributeKind::Name => self.estimate_name(self.ds.ref_name_info(r)),
            AttributeKind::Numeric => self.estimate_numeric(self.ds.value(r)),
        }
    }

    /// Number of distinct first initials seen with a last name.
    pub fn distinct_initials(&self, last: &str) -> usize {
        self.initials.get(last).map_or(0, BTreeSet::len)
    }
}

/// Depth to use for a query under `params`.
pub fn adaptive_depth(est: &AmbiguityEstimator<'_>, params: &ExpansionParams, value: &str) -> usize {
    if !params.adaptive_depth || params.initials_cutoff == 0 || est.ds.kind() != AttributeKind::Name {
        return params.d_star;
    }
    let info = NameInfo::parse(value);
    if est.distinct_initials(&info.last) < params.initials_cutoff {
        params.d_star.min(1)
    } else {
        params.d_star
    }
}

fn sorted_unique(mut v: Vec<RefIdx>) -> Vec<RefIdx> {
    v.sort_unstable();
    v.dedup();
    v
}

/// References whose attribute equals `value` or is δ-similar to it.
pub fn x_a(scorer: &Scorer<'_>, value: &str) -> Vec<RefIdx> {
    let ds = scorer.dataset();
    let delta = scorer.config().delta;
    match ds.kind() {
        AttributeKind::Name => {
            let info = NameInfo::parse(value);
            let mut out = ds.lookup_name(value);
            let mut verdict: HashMap<u32, bool> = HashMap::new();
            for r in ds.block(&info.block_key()) {
                let n = ds.name_id(*r);
                let ok = *verdict.entry(n.0).or_insert_with(|| delta_rule(&info, ds.name_info(n)) && scorer.value_sim(value, *r) >= delta);
                if ok {
                    out.push(*r);
                }
            }
            sorted_unique(out)
        }
        AttributeKind::Numeric => {
            let Ok(x) = value.trim().parse::<f64>() else { return Vec::new() };
            let radius = scorer.delta_radius();
            sorted_unique(
                ds.refs_in_range(x - radius, x + radius).iter().filter(|(y, _)| numeric_sim(x, *y) >= delta).map(|(_, r)| *r).collect(),
            )
        }
    }
}

/// δ-based attribute expansion of a set of references.
pub fn x_a_refs(scorer: &Scorer<'_>, refs: &[RefIdx]) -> Vec<RefIdx> {
    let ds = scorer.dataset();
    let mut out = Vec::new();
    let mut seen_values: HashSet<String> = HashSet::new();
    for r in refs {
        let value = match ds.kind() {
            AttributeKind::Name => ds.ref_name_info(*r).normalized.clone(),
            AttributeKind::Numeric => ds.reference(*r).name.clone(),
        };
        if seen_values.insert(value.clone()) {
            out.extend(x_a(scorer, &value));
        }
    }
    sorted_unique(out)
}

/// References sharing a hyper-edge with any input reference, excluding the inputs.
pub fn x_h(ds: &Dataset, refs: &[RefIdx]) -> Vec<RefIdx> {
    let input: HashSet<RefIdx> = refs.iter().copied().collect();
    let mut out = Vec::new();
    for r in refs {
        for h in &ds.reference(*r).hyperedges {
            out.extend(ds.hyperedge(*h).refs.iter().filter(|o| !input.contains(o)));
        }
    }
    sorted_unique(out)
}

/// References with the same normalized name as any input reference (inputs included).
pub fn x_a_exact(ds: &Dataset, refs: &[RefIdx]) -> Vec<RefIdx> {
    let names: BTreeSet<_> = refs.iter().map(|r| ds.name_id(*r)).collect();
    sorted_unique(names.into_iter().flat_map(|n| ds.refs_with_name(n).iter().copied()).collect())
}

/// Restricted attribute expansion used beyond level 0: exact name matches, or
/// for numeric attributes (where exact equality carries no signal) the
/// ε-similar references.
pub fn x_a_conservative(scorer: &Scorer<'_>, refs: &[RefIdx]) -> Vec<RefIdx> {
    let ds = scorer.dataset();
    match ds.kind() {
        AttributeKind::Name => x_a_exact(ds, refs),
        AttributeKind::Numeric => {
            let eps = scorer.config().epsilon;
            let radius = NUMERIC_SCALE * (1.0 - eps);
            let mut out = refs.to_vec();
            for r in refs {
                let x = ds.value(*r);
                out.extend(ds.refs_in_range(x - radius, x + radius).iter().filter(|(y, _)| numeric_sim(x, *y) >= eps).map(|(_, o)| *o));
            }
            sorted_unique(out)
        }
    }
}

fn by_ambiguity(est: &AmbiguityEstimator<'_>, refs: &[RefIdx]) -> Vec<(f64, RefIdx)> {
    let ds = est.ds;
    let mut scored: Vec<(f64, RefIdx)> = refs.iter().map(|r| (est.estimate_ref(*r), *r)).collect();
    scored.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| ds.ref_name_info(a.1).normalized.cmp(&ds.ref_name_info(b.1).normalized))
            .then_with(|| a.1.cmp(&b.1))
    });
    scored
}

/// The `floor(h_max·|frontier|)` least ambiguous references of `x_h(frontier)`.
pub fn adaptive_x_h(ds: &Dataset, frontier: &[RefIdx], h_max: f64, est: &AmbiguityEstimator<'_>) -> Vec<RefIdx> {
    let all = x_h(ds, frontier);
    let k = (h_max * frontier.len() as f64).floor() as usize;
    if k >= all.len() {
        return all;
    }
    sorted_unique(by_ambiguity(est, &all).into_iter().take(k).map(|(_, r)| r).collect())
}

/// The `ceil(a_max·|frontier|)` most ambiguous frontier references.
pub fn most_ambiguous(frontier: &[RefIdx], a_max: f64, est: &AmbiguityEstimator<'_>) -> Vec<RefIdx> {
    let k = (a_max * frontier.len() as f64).ceil() as usize;
    let mut ranked = by_ambiguity(est, frontier);
    // Most ambiguous first; ties keep the name/id order.
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    sorted_unique(ranked.into_iter().take(k).map(|(_, r)| r).collect())
}

/// Exact attribute expansion of only the most ambiguous frontier references.
pub fn adaptive_x_a(ds: &Dataset, frontier: &[RefIdx], a_max: f64, est: &AmbiguityEstimator<'_>) -> Vec<RefIdx> {
    let picked = most_ambiguous(frontier, a_max, est);
    let out = x_a_exact(ds, &picked);
    log::debug!(
        "adaptive A-expansion: {} of {} expanded, {} refs (about {:.1} expected)",
        picked.len(),
        frontier.len(),
        out.len(),
        est.mu_r() * picked.len() as f64
    );
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RelevantSet {
    /// Disjoint levels; level `i` holds references first reached at depth `i`.
    pub levels: Vec<Vec<RefIdx>>,
    /// Depth actually used (after adaptive depth selection).
    pub depth: usize,
}

impl RelevantSet {
    pub fn answerable(&self) -> bool {
        self.levels.first().is_some_and(|l| !l.is_empty())
    }

    pub fn union(&self) -> Vec<RefIdx> {
        sorted_unique(self.levels.iter().flatten().copied().collect())
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// The deepest non-empty level, if any beyond level 0.
    pub fn outermost(&self) -> Option<&[RefIdx]> {
        self.levels.iter().skip(1).rev().find(|l| !l.is_empty()).map(Vec::as_slice)
    }

    /// One line per level: `level<TAB>ref ids`.
    pub fn dump(&self, ds: &Dataset) -> String {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let ids: Vec<&str> = l.iter().map(|r| ds.reference(*r).id.as_str()).collect();
                format!("{i}\t{}\n", ids.join(" "))
            })
            .collect()
    }
}

/// Builds the leveled relevant set for `Q(R.Name = value)`.
///
/// Level 0 is the attribute expansion of the value. Odd levels expand the
/// previous level through hyper-edges, even levels through attributes. Each
/// level only keeps references not seen at an earlier level.
pub fn build_relevant_set(scorer: &Scorer<'_>, est: &AmbiguityEstimator<'_>, value: &str, params: &ExpansionParams) -> Result<RelevantSet> {
    params.validate()?;
    let ds = scorer.dataset();
    let depth = adaptive_depth(est, params, value);
    let level0 = x_a(scorer, value);
    if level0.is_empty() {
        return Ok(RelevantSet { levels: vec![Vec::new()], depth });
    }
    let mut seen: HashSet<RefIdx> = level0.iter().copied().collect();
    // Operators apply to the full previous expansion (an attribute expansion
    // contains the references it expanded); levels only keep what is new.
    let mut frontier = level0.clone();
    let mut levels = vec![level0];
    for i in 1..=depth {
        let raw = if i % 2 == 1 {
            match params.adaptive_h {
                Some(h) => adaptive_x_h(ds, &frontier, h, est),
                None => x_h(ds, &frontier),
            }
        } else {
            let expand = match params.adaptive_a {
                Some(a) => most_ambiguous(&frontier, a, est),
                None => frontier.clone(),
            };
            if params.exact_beyond_level0 {
                x_a_conservative(scorer, &expand)
            } else {
                x_a_refs(scorer, &expand)
            }
        };
        levels.push(raw.iter().copied().filter(|r| seen.insert(*r)).collect());
        frontier = raw;
    }
    Ok(RelevantSet { levels, depth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest_str, RUNNING_EXAMPLE};
    use crate::similarity::SimilarityConfig;
    use proptest::prelude::*;

    fn r(i: u32) -> RefIdx {
        RefIdx(i - 1)
    }

    fn rs(v: &[u32]) -> Vec<RefIdx> {
        v.iter().map(|i| r(*i)).collect()
    }

    fn running() -> Dataset {
        ingest_str(RUNNING_EXAMPLE).unwrap()
    }

    #[test]
    fn conservative_expansion_on_numeric_values() {
        let text = "{\"meta\":{\"attribute_kind\":\"numeric\"}}\n{\"pub_id\":\"h1\",\"authors\":[\"1.0\",\"1.5\",\"5.0\"]}\n{\"pub_id\":\"h2\",\"authors\":[\"0.8\"]}\n";
        let ds = ingest_str(text).unwrap();
        let cfg = SimilarityConfig { epsilon: 0.9, ..SimilarityConfig::default() };
        let sc = Scorer::new(&ds, cfg).unwrap();
        // ε = 0.9 keeps values within 0.6 of an input.
        assert_eq!(x_a_conservative(&sc, &rs(&[1])), rs(&[1, 2, 4]));
        assert_eq!(x_a_conservative(&sc, &rs(&[3])), rs(&[3]));
        let names = running();
        let sc = Scorer::new(&names, SimilarityConfig::default()).unwrap();
        assert_eq!(x_a_conservative(&sc, &rs(&[2])), x_a_exact(&names, &rs(&[2])));
    }

    #[test]
    fn attribute_expansion() {
        let ds = running();
        let sc = Scorer::new(&ds, SimilarityConfig::default()).unwrap();
        assert_eq!(x_a(&sc, "W. Wang"), rs(&[1, 4, 8, 9]));
        assert_eq!(x_a(&sc, "W. W. Wang"), rs(&[1, 4, 8, 9]));
        assert!(x_a(&sc, "Q. Nobody").is_empty());
    }

    #[test]
    fn hyperedge_expansion() {
        let ds = running();
        assert_eq!(x_h(&ds, &rs(&[1])), rs(&[2, 3]));
        assert!(x_h(&ds, &[]).is_empty());
        assert_eq!(x_h(&ds, &rs(&[1, 4, 8, 9])), rs(&[2, 3, 5, 6, 7, 10]));
    }

    #[test]
    fn exact_expansion() {
        let ds = running();
        assert_eq!(x_a_exact(&ds, &rs(&[2])), rs(&[2, 7]));
        assert_eq!(x_a_exact(&ds, &rs(&[6])), rs(&[6]));
        assert!(x_a_exact(&ds, &[]).is_empty());
    }

    #[test]
    fn relevant_set_levels() {
        let ds = running();
        let sc = Scorer::new(&ds, SimilarityConfig::default()).unwrap();
        let est = AmbiguityEstimator::new(&ds, AmbiguityMode::Conditional, Secondary::FirstInitial);
        let p = |d| ExpansionParams { d_star: d, ..Default::default() };
        let rel = build_relevant_set(&sc, &est, "W. Wang", &p(0)).unwrap();
        assert_eq!(rel.levels, vec![rs(&[1, 4, 8, 9])]);
        let rel = build_relevant_set(&sc, &est, "W. Wang", &p(1)).unwrap();
        assert_eq!(rel.levels[1], rs(&[2, 3, 5, 6, 7, 10]));
        let rel = build_relevant_set(&sc, &est, "W. Wang", &p(3)).unwrap();
        assert_eq!(rel.union().len(), 10);
        assert_eq!(rel.levels.len(), 4);
        let none = build_relevant_set(&sc, &est, "Nonexistent", &p(3)).unwrap();
        assert!(!none.answerable());
    }

    #[test]
    fn ambiguity_estimates() {
        let ds = running();
        let naive = AmbiguityEstimator::new(&ds, AmbiguityMode::Naive, Secondary::FirstInitial);
        assert!((naive.estimate("W Wang") - 0.3).abs() < 1e-12);
        assert!((naive.estimate("L. Li") - 0.1).abs() < 1e-12);
        assert_eq!(naive.estimate("Q. Nobody"), 0.0);
        let cond = AmbiguityEstimator::new(&ds, AmbiguityMode::Conditional, Secondary::FirstInitial);
        assert!((cond.estimate("W. Wang") - 0.1).abs() < 1e-12);
        let fore = AmbiguityEstimator::new(&ds, AmbiguityMode::Conditional, Secondary::Forenames);
        assert!((fore.estimate("W. Wang") - 0.2).abs() < 1e-12);
        assert!((fore.estimate("A. Ansari") - 0.1).abs() < 1e-12);
        assert!((naive.mu_r() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_depth_rule() {
        let mut text = String::new();
        for (i, c) in "abcdefghijkl".chars().enumerate() {
            text.push_str(&format!("{{\"pub_id\":\"p{i}\",\"authors\":[\"{c}. Smith\",\"A. Few\"]}}\n"));
        }
        let ds = ingest_str(&text).unwrap();
        let est = AmbiguityEstimator::new(&ds, AmbiguityMode::Conditional, Secondary::FirstInitial);
        let p = ExpansionParams { d_star: 3, adaptive_depth: true, initials_cutoff: 10, ..Default::default() };
        assert_eq!(adaptive_depth(&est, &p, "A. Few"), 1);
        assert_eq!(adaptive_depth(&est, &p, "A. Smith"), 3);
        let off = ExpansionParams { initials_cutoff: 0, ..p };
        assert_eq!(adaptive_depth(&est, &off, "A. Few"), 3);
    }

    #[test]
    fn adaptive_h_prefers_least_ambiguous() {
        let ds = running();
        let est = AmbiguityEstimator::new(&ds, AmbiguityMode::Conditional, Secondary::FirstInitial);
        let frontier = rs(&[1, 4, 8, 9]);
        assert_eq!(adaptive_x_h(&ds, &frontier, 100.0, &est), x_h(&ds, &frontier));
        // All co-author last names have one initial; ties fall back to name order.
        assert_eq!(adaptive_x_h(&ds, &frontier, 1.0, &est), rs(&[2, 3, 5, 10]));
        assert!(adaptive_x_h(&ds, &[], 2.0, &est).is_empty());
    }

    #[test]
    fn adaptive_a_expands_most_ambiguous() {
        let ds = running();
        let est = AmbiguityEstimator::new(&ds, AmbiguityMode::Naive, Secondary::FirstInitial);
        let frontier = rs(&[2, 3, 5, 6, 10]);
        assert_eq!(adaptive_x_a(&ds, &frontier, 1.0, &est), x_a_exact(&ds, &frontier));
        // Five references, a_max = 0.2: only one (an Ansari, the most frequent name) expands.
        assert_eq!(most_ambiguous(&frontier, 0.2, &est), rs(&[3]));
        assert_eq!(adaptive_x_a(&ds, &frontier, 0.2, &est), rs(&[3, 5, 10]));
        assert!(adaptive_x_a(&ds, &[], 0.2, &est).is_empty());
    }

    fn random_corpus(authors: &[Vec<u8>]) -> Dataset {
        const NAMES: [&str; 7] = ["J. Smith", "J. Smyth", "A. Lee", "B. Lee", "B. Kim", "J. W. Smith", "C. Kim"];
        let mut text = String::new();
        for (i, a) in authors.iter().enumerate() {
            let names: Vec<String> = a.iter().map(|n| format!("\"{}\"", NAMES[*n as usize % NAMES.len()])).collect();
            text.push_str(&format!("{{\"pub_id\":\"p{i}\",\"authors\":[{}]}}\n", names.join(",")));
        }
        ingest_str(&text).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn coverage_and_bounds(
            authors in prop::collection::vec(prop::collection::vec(0u8..7, 1..4), 1..15),
            d in 0usize..4,
            h in 1.0..3.0f64,
            a in 0.05..=1.0f64,
        ) {
            let ds = random_corpus(&authors);
            let sc = Scorer::new(&ds, SimilarityConfig::default()).unwrap();
            let est = AmbiguityEstimator::new(&ds, AmbiguityMode::Conditional, Secondary::FirstInitial);
            let plain = |d| build_relevant_set(&sc, &est, "J. Smith", &ExpansionParams { d_star: d, ..Default::default() }).unwrap();
            let lo: BTreeSet<RefIdx> = plain(d).union().into_iter().collect();
            let hi: BTreeSet<RefIdx> = plain(d + 1).union().into_iter().collect();
            prop_assert!(lo.is_subset(&hi));

            let base = plain(d);
            for (i, level) in base.levels.iter().enumerate() {
                if level.is_empty() { continue; }
                let hx = adaptive_x_h(&ds, level, h, &est);
                prop_assert!(hx.len() as f64 <= (h * level.len() as f64).floor());
                let full: BTreeSet<RefIdx> = x_h(&ds, level).into_iter().collect();
                prop_assert!(hx.iter().all(|r| full.contains(r)));
                let picked = most_ambiguous(level, a, &est);
                prop_assert!(picked.len() <= (a * level.len() as f64).ceil() as usize);
                let ax: BTreeSet<RefIdx> = adaptive_x_a(&ds, level, a, &est).into_iter().collect();
                let exact: BTreeSet<RefIdx> = x_a_exact(&ds, level).into_iter().collect();
                prop_assert!(ax.is_subset(&exact), "level {}", i);
            }
        }
    }
}
