//! Greedy collective relational clustering.
//!
//! Clusters start from a bootstrap partition. The most similar candidate pair
//! is merged repeatedly; after each merge the similarities of every pair whose
//! relational neighborhood changed are recomputed. Stale queue entries are
//! skipped lazily on extraction.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, EdgeIdx, NameId, NameInfo, RefIdx};
use crate::error::{Error, Result};
use crate::similarity::{combined_sim, jaccard, ClusterProfile, Scorer};

pub type ClusterId = u32;

/// Initial partition of the references handed to the clusterer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Bootstrap {
    /// One cluster per reference.
    #[default]
    Singletons,
    /// Merge references with identical normalized names when the name's
    /// estimated ambiguity is strictly below `max_ambiguity`.
    ExactName { max_ambiguity: f64 },
}

/// Builds the initial partition of `refs`. Clusters are ordered by their smallest member.
pub fn bootstrap<F>(ds: &Dataset, refs: &[RefIdx], mode: Bootstrap, ambiguity: F) -> Vec<Vec<RefIdx>>
where
    F: Fn(&NameInfo) -> f64,
{
    let mut sorted = refs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out: Vec<Vec<RefIdx>> = match mode {
        Bootstrap::Singletons => sorted.iter().map(|r| vec![*r]).collect(),
        Bootstrap::ExactName { max_ambiguity } => {
            let mut groups: BTreeMap<NameId, Vec<RefIdx>> = BTreeMap::new();
            let mut out = Vec::new();
            let mut verdict: HashMap<NameId, bool> = HashMap::new();
            for r in &sorted {
                let n = ds.name_id(*r);
                let low = *verdict.entry(n).or_insert_with(|| ambiguity(ds.name_info(n)) < max_ambiguity);
                if low {
                    groups.entry(n).or_default().push(*r);
                } else {
                    out.push(vec![*r]);
                }
            }
            out.extend(groups.into_values());
            out
        }
    };
    out.sort_by_key(|c| c[0]);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopReason {
    /// The best remaining candidate fell below the merge threshold.
    Threshold,
    /// No candidate pairs were left.
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeRecord {
    /// Similarity of the pair when it was extracted from the queue.
    pub sim: f64,
    pub c1: ClusterId,
    pub c2: ClusterId,
    pub merged: ClusterId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcerResult {
    pub clusters: Vec<Vec<RefIdx>>,
    pub merge_log: Vec<MergeRecord>,
    pub stopped_reason: StopReason,
    /// Bootstrap partition; cluster `i` has id `i` in the merge log.
    pub initial: Vec<Vec<RefIdx>>,
}

impl RcerResult {
    /// Partition obtained by stopping at `threshold` instead: the merge-log
    /// prefix before the first merge whose similarity is below `threshold`.
    pub fn partition_at(&self, threshold: f64) -> Vec<Vec<RefIdx>> {
        let mut members: Vec<Option<Vec<RefIdx>>> = self.initial.iter().cloned().map(Some).collect();
        for m in &self.merge_log {
            if m.sim < threshold {
                break;
            }
            let mut a = members[m.c1 as usize].take().expect("merge log references a live cluster");
            let b = members[m.c2 as usize].take().expect("merge log references a live cluster");
            a.extend(b);
            debug_assert_eq!(members.len(), m.merged as usize);
            members.push(Some(a));
        }
        normalize_partition(members.into_iter().flatten().collect())
    }

    /// Merge log as one `sim c1 c2 -> merged` line per merge.
    pub fn merge_log_text(&self) -> String {
        let mut s = String::new();
        for m in &self.merge_log {
            let _ = writeln!(s, "{:.6} {} {} -> {}", m.sim, m.c1, m.c2, m.merged);
        }
        s
    }

    /// Distinct merge similarities in the log, descending.
    pub fn merge_sims(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.merge_log.iter().map(|m| m.sim).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v.dedup();
        v
    }
}

/// Sorts members within clusters and clusters by first member.
pub fn normalize_partition(mut clusters: Vec<Vec<RefIdx>>) -> Vec<Vec<RefIdx>> {
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters.retain(|c| !c.is_empty());
    clusters.sort_by_key(|c| c[0]);
    clusters
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    sim: f64,
    c1: ClusterId,
    c2: ClusterId,
    stamp: u64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    /// Max-heap order: higher similarity first, then the lexicographically
    /// smaller pair, then the newer stamp.
    fn cmp(&self, other: &Self) -> Ordering {
        self.sim
            .total_cmp(&other.sim)
            .then_with(|| (other.c1, other.c2).cmp(&(self.c1, self.c2)))
            .then_with(|| self.stamp.cmp(&other.stamp))
    }
}

#[derive(Debug, Clone)]
struct ClusterState {
    members: Vec<u32>,
    profile: ClusterProfile,
    edges: Vec<EdgeIdx>,
    nbr: BTreeMap<ClusterId, u32>,
    candidates: BTreeSet<ClusterId>,
}

/// Incremental clustering state over one reference scope.
#[derive(Debug)]
pub struct Clusterer<'s, 'd> {
    scorer: &'s Scorer<'d>,
    refs: Vec<RefIdx>,
    local: HashMap<RefIdx, u32>,
    label: Vec<ClusterId>,
    clusters: Vec<Option<ClusterState>>,
    heap: BinaryHeap<Entry>,
    stamps: HashMap<(ClusterId, ClusterId), (u64, f64)>,
    next_stamp: u64,
    initial: Vec<Vec<RefIdx>>,
    log: Vec<MergeRecord>,
}

fn key(a: ClusterId, b: ClusterId) -> (ClusterId, ClusterId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl<'s, 'd> Clusterer<'s, 'd> {
    /// Sets up clusters from `initial` (a partition of the scope) and queues
    /// every cluster pair containing a blocked reference pair.
    pub fn new(scorer: &'s Scorer<'d>, initial: Vec<Vec<RefIdx>>) -> Result<Self> {
        Self::with_filter(scorer, initial, |_, _| true)
    }

    /// Like [`Clusterer::new`], but only blocked reference pairs accepted by
    /// `keep` make their clusters candidates.
    pub fn with_filter<F>(scorer: &'s Scorer<'d>, initial: Vec<Vec<RefIdx>>, keep: F) -> Result<Self>
    where
        F: Fn(RefIdx, RefIdx) -> bool,
    {
        let ds = scorer.dataset();
        let initial = normalize_partition(initial);
        let mut refs: Vec<RefIdx> = initial.iter().flatten().copied().collect();
        refs.sort_unstable();
        let mut local = HashMap::with_capacity(refs.len());
        for (i, r) in refs.iter().enumerate() {
            if local.insert(*r, i as u32).is_some() {
                return Err(Error::NotAPartition(format!("reference {} appears twice", ds.reference(*r).id)));
            }
        }
        let mut label = vec![0; refs.len()];
        let mut clusters = Vec::with_capacity(initial.len() * 2);
        for (cid, members) in initial.iter().enumerate() {
            let local_members: Vec<u32> = members.iter().map(|r| local[r]).collect();
            for m in &local_members {
                label[*m as usize] = cid as ClusterId;
            }
            let mut edges: Vec<EdgeIdx> = members.iter().flat_map(|r| ds.reference(*r).hyperedges.iter().copied()).collect();
            edges.sort_unstable();
            edges.dedup();
            clusters.push(Some(ClusterState {
                members: local_members,
                profile: scorer.profile(members),
                edges,
                nbr: BTreeMap::new(),
                candidates: BTreeSet::new(),
            }));
        }
        let mut this = Clusterer {
            scorer,
            refs,
            local,
            label,
            clusters,
            heap: BinaryHeap::new(),
            stamps: HashMap::new(),
            next_stamp: 0,
            initial,
            log: Vec::new(),
        };
        for cid in 0..this.clusters.len() as ClusterId {
            let nbr = this.compute_nbr(cid);
            this.state_mut(cid).nbr = nbr;
        }
        for (a, b) in scorer.block_candidates(&this.refs) {
            let (ca, cb) = (this.label_of(a), this.label_of(b));
            if ca != cb && keep(a, b) {
                this.state_mut(ca).candidates.insert(cb);
                this.state_mut(cb).candidates.insert(ca);
            }
        }
        for cid in 0..this.clusters.len() as ClusterId {
            let cands: Vec<ClusterId> = this.state(cid).candidates.range(cid + 1..).copied().collect();
            for other in cands {
                this.requeue(cid, other);
            }
        }
        Ok(this)
    }

    fn label_of(&self, r: RefIdx) -> ClusterId {
        self.label[self.local[&r] as usize]
    }

    fn state(&self, c: ClusterId) -> &ClusterState {
        self.clusters[c as usize].as_ref().expect("live cluster")
    }

    fn state_mut(&mut self, c: ClusterId) -> &mut ClusterState {
        self.clusters[c as usize].as_mut().expect("live cluster")
    }

    pub fn is_live(&self, c: ClusterId) -> bool {
        self.clusters.get(c as usize).is_some_and(Option::is_some)
    }

    fn compute_nbr(&self, c: ClusterId) -> BTreeMap<ClusterId, u32> {
        let ds = self.scorer.dataset();
        let mut nbr = BTreeMap::new();
        for h in &self.state(c).edges {
            for r in &ds.hyperedge(*h).refs {
                if let Some(l) = self.local.get(r) {
                    let lab = self.label[*l as usize];
                    if lab != c {
                        *nbr.entry(lab).or_insert(0) += 1;
                    }
                }
            }
        }
        nbr
    }

    /// Current combined similarity of two live clusters, computed from their state.
    pub fn similarity(&self, a: ClusterId, b: ClusterId) -> f64 {
        let (sa, sb) = (self.state(a), self.state(b));
        let cfg = self.scorer.config();
        let attr = self.scorer.attribute_sim(&sa.profile, &sb.profile);
        let rel = if cfg.alpha > 0.0 { jaccard(&sa.nbr, &sb.nbr, cfg.neighborhood) } else { 0.0 };
        combined_sim(attr, rel, cfg.alpha)
    }

    fn requeue(&mut self, a: ClusterId, b: ClusterId) {
        let (c1, c2) = key(a, b);
        let sim = self.similarity(c1, c2);
        let stamp = self.next_stamp;
        self.next_stamp += 1;
        self.stamps.insert((c1, c2), (stamp, sim));
        self.heap.push(Entry { sim, c1, c2, stamp });
    }

    /// Queued similarity of a live candidate pair.
    pub fn queued_sim(&self, a: ClusterId, b: ClusterId) -> Option<f64> {
        if !self.is_live(a) || !self.is_live(b) {
            return None;
        }
        self.stamps.get(&key(a, b)).map(|(_, s)| *s)
    }

    /// All live candidate pairs with their queued similarities.
    pub fn queued_pairs(&self) -> Vec<((ClusterId, ClusterId), f64)> {
        let mut out: Vec<_> =
            self.stamps.iter().filter(|((a, b), _)| self.is_live(*a) && self.is_live(*b)).map(|(k, (_, s))| (*k, *s)).collect();
        out.sort_by_key(|x| x.0);
        out
    }

    /// Removes and returns the best valid queue entry, skipping stale ones.
    pub fn pop_best(&mut self) -> Option<(f64, ClusterId, ClusterId)> {
        while let Some(e) = self.heap.pop() {
            if !self.is_live(e.c1) || !self.is_live(e.c2) {
                continue;
            }
            match self.stamps.get(&(e.c1, e.c2)) {
                Some((s, _)) if *s == e.stamp => return Some((e.sim, e.c1, e.c2)),
                _ => continue,
            }
        }
        None
    }

    /// Looks at the best valid entry without removing it.
    pub fn peek_best(&mut self) -> Option<(f64, ClusterId, ClusterId)> {
        let best = self.pop_best()?;
        let (sim, c1, c2) = best;
        let stamp = self.stamps[&(c1, c2)].0;
        self.heap.push(Entry { sim, c1, c2, stamp });
        Some(best)
    }

    /// Merges two live clusters into a fresh cluster and updates every affected
    /// similarity. Returns the new cluster id.
    pub fn merge(&mut self, a: ClusterId, b: ClusterId) -> Result<ClusterId> {
        if a == b {
            return Err(Error::SelfMerge(a));
        }
        for c in [a, b] {
            if !self.is_live(c) {
                return Err(Error::RetiredCluster(c));
            }
        }
        let sim = self.stamps.get(&key(a, b)).map(|(_, s)| *s).unwrap_or_else(|| self.similarity(a, b));
        let sa = self.clusters[a as usize].take().expect("checked live");
        let sb = self.clusters[b as usize].take().expect("checked live");
        let new = self.clusters.len() as ClusterId;

        let mut members = sa.members;
        members.extend(sb.members);
        for m in &members {
            self.label[*m as usize] = new;
        }
        let mut profile = sa.profile;
        profile.absorb(&sb.profile);
        let mut edges = sa.edges;
        edges.extend(sb.edges);
        edges.sort_unstable();
        edges.dedup();
        let mut candidates: BTreeSet<ClusterId> = sa.candidates.union(&sb.candidates).copied().collect();
        candidates.remove(&a);
        candidates.remove(&b);
        self.stamps.remove(&key(a, b));
        self.clusters.push(Some(ClusterState { members, profile, edges, nbr: BTreeMap::new(), candidates: candidates.clone() }));
        let nbr = self.compute_nbr(new);
        let neighbors: Vec<ClusterId> = nbr.keys().copied().collect();
        self.state_mut(new).nbr = nbr;

        for n in &candidates {
            let st = self.state_mut(*n);
            st.candidates.remove(&a);
            st.candidates.remove(&b);
            st.candidates.insert(new);
            self.stamps.remove(&key(*n, a));
            self.stamps.remove(&key(*n, b));
        }
        for k in &neighbors {
            let st = self.state_mut(*k);
            let moved = st.nbr.remove(&a).unwrap_or(0) + st.nbr.remove(&b).unwrap_or(0);
            if moved > 0 {
                st.nbr.insert(new, moved);
            }
        }

        for n in &candidates {
            self.requeue(new, *n);
        }
        let mut done: BTreeSet<(ClusterId, ClusterId)> = BTreeSet::new();
        for k in neighbors {
            let cands: Vec<ClusterId> = self.state(k).candidates.iter().copied().collect();
            for n in cands {
                if n == new {
                    continue;
                }
                if done.insert(key(k, n)) {
                    self.requeue(k, n);
                }
            }
        }
        self.log.push(MergeRecord { sim, c1: a.min(b), c2: a.max(b), merged: new });
        Ok(new)
    }

    /// Runs to completion: merges while the best similarity is at least `threshold`.
    pub fn run(mut self, threshold: f64) -> RcerResult {
        let stopped_reason = loop {
            let Some((sim, c1, c2)) = self.pop_best() else {
                break StopReason::Exhausted;
            };
            if sim < threshold {
                break StopReason::Threshold;
            }
            self.merge(c1, c2).expect("valid queue entries refer to live clusters");
        };
        RcerResult { clusters: self.clusters(), merge_log: self.log, stopped_reason, initial: self.initial }
    }

    /// Live clusters as sorted reference lists.
    pub fn clusters(&self) -> Vec<Vec<RefIdx>> {
        normalize_partition(self.clusters.iter().flatten().map(|c| c.members.iter().map(|m| self.refs[*m as usize]).collect()).collect())
    }

    pub fn live_ids(&self) -> Vec<ClusterId> {
        (0..self.clusters.len() as ClusterId).filter(|c| self.is_live(*c)).collect()
    }

    pub fn members(&self, c: ClusterId) -> Vec<RefIdx> {
        let mut v: Vec<RefIdx> = self.state(c).members.iter().map(|m| self.refs[*m as usize]).collect();
        v.sort_unstable();
        v
    }

    pub fn merge_log(&self) -> &[MergeRecord] {
        &self.log
    }
}

/// Clusters `initial` down to `threshold`.
pub fn run_rcer(scorer: &Scorer<'_>, initial: Vec<Vec<RefIdx>>, threshold: f64) -> Result<RcerResult> {
    if threshold.is_nan() {
        return Err(Error::InvalidConfig("threshold is NaN".into()));
    }
    Ok(Clusterer::new(scorer, initial)?.run(threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest_str, RUNNING_EXAMPLE};
    use crate::similarity::{hyperedge_set, neighborhood, SimilarityConfig};
    use proptest::prelude::*;

    fn r(i: u32) -> RefIdx {
        RefIdx(i - 1)
    }

    fn singletons(ds: &Dataset) -> Vec<Vec<RefIdx>> {
        let refs: Vec<RefIdx> = ds.ref_ids().collect();
        bootstrap(ds, &refs, Bootstrap::Singletons, |_| 0.0)
    }

    #[test]
    fn bootstrap_modes() {
        let ds = ingest_str(RUNNING_EXAMPLE).unwrap();
        assert_eq!(singletons(&ds).len(), 10);
        assert!(bootstrap(&ds, &[], Bootstrap::Singletons, |_| 0.0).is_empty());
        let refs: Vec<RefIdx> = ds.ref_ids().collect();
        let parts = bootstrap(&ds, &refs, Bootstrap::ExactName { max_ambiguity: 0.15 }, |n| if n.last == "ansari" { 0.1 } else { 1.0 });
        assert!(parts.contains(&vec![r(3), r(5), r(10)]));
        assert_eq!(parts.len(), 8);
    }

    #[test]
    fn merge_unions_members_and_edges() {
        let ds = ingest_str(RUNNING_EXAMPLE).unwrap();
        let sc = Scorer::new(&ds, SimilarityConfig::default()).unwrap();
        let mut cl = Clusterer::new(&sc, singletons(&ds)).unwrap();
        let c = cl.merge(0, 3).unwrap();
        assert_eq!(cl.members(c), [r(1), r(4)]);
        let edges: Vec<String> = hyperedge_set(&ds, &cl.members(c)).iter().map(|h| ds.hyperedge(*h).id.clone()).collect();
        assert_eq!(edges, ["h1", "h2"]);
        assert!(matches!(cl.merge(0, 7), Err(Error::RetiredCluster(0))));
        assert!(matches!(cl.merge(7, 7), Err(Error::SelfMerge(7))));
        assert_eq!(cl.clusters().len(), 9);
    }

    #[test]
    fn high_threshold_keeps_bootstrap() {
        let ds = ingest_str(RUNNING_EXAMPLE).unwrap();
        let sc = Scorer::new(&ds, SimilarityConfig::default()).unwrap();
        let res = run_rcer(&sc, singletons(&ds), 1.0 + 1e-9).unwrap();
        assert_eq!(res.clusters, singletons(&ds));
        assert!(res.merge_log.is_empty());
    }

    #[test]
    fn identical_names_attribute_only() {
        let ds = ingest_str("{\"pub_id\":\"a\",\"authors\":[\"J. Doe\"]}\n{\"pub_id\":\"b\",\"authors\":[\"J. Doe\"]}").unwrap();
        let cfg = SimilarityConfig { alpha: 0.0, merge_threshold: 0.5, ..Default::default() };
        let sc = Scorer::new(&ds, cfg).unwrap();
        let res = run_rcer(&sc, singletons(&ds), 0.5).unwrap();
        assert_eq!(res.clusters, vec![vec![RefIdx(0), RefIdx(1)]]);
        assert_eq!(res.stopped_reason, StopReason::Exhausted);
    }

    #[test]
    fn partition_at_matches_direct_runs() {
        let ds = ingest_str(RUNNING_EXAMPLE).unwrap();
        let sc = Scorer::new(&ds, SimilarityConfig::default()).unwrap();
        let full = run_rcer(&sc, singletons(&ds), 0.0).unwrap();
        for t in [0.0, 0.2, 0.25, 0.3, 0.45, 0.5, 0.6, 0.9] {
            let direct = run_rcer(&sc, singletons(&ds), t).unwrap();
            assert_eq!(full.partition_at(t), direct.clusters, "threshold {t}");
        }
    }

    /// Recomputes every candidate pair's similarity from the current partition alone.
    fn naive_pairs(cl: &Clusterer<'_, '_>, sc: &Scorer<'_>) -> Vec<((ClusterId, ClusterId), f64)> {
        let ds = sc.dataset();
        let live = cl.live_ids();
        let mut label: HashMap<RefIdx, ClusterId> = HashMap::new();
        for c in &live {
            for m in cl.members(*c) {
                label.insert(m, *c);
            }
        }
        let scope: Vec<RefIdx> = label.keys().copied().collect();
        let blocked: BTreeSet<(RefIdx, RefIdx)> = sc.block_candidates(&scope).into_iter().collect();
        let mut out = Vec::new();
        for (i, a) in live.iter().enumerate() {
            for b in &live[i + 1..] {
                let (ma, mb) = (cl.members(*a), cl.members(*b));
                let is_cand = ma.iter().any(|x| mb.iter().any(|y| blocked.contains(&key2(*x, *y))));
                if !is_cand {
                    continue;
                }
                let na = neighborhood(ds, &ma, *a, |r| label.get(&r).copied());
                let nb = neighborhood(ds, &mb, *b, |r| label.get(&r).copied());
                let attr = sc.attribute_sim(&sc.profile(&ma), &sc.profile(&mb));
                let rel = jaccard(&na, &nb, sc.config().neighborhood);
                out.push(((*a, *b), combined_sim(attr, rel, sc.config().alpha)));
            }
        }
        out
    }

    fn key2(a: RefIdx, b: RefIdx) -> (RefIdx, RefIdx) {
        if a < b {
            (a, b)
        } else {
            (b, a)
        }
    }

    fn random_corpus(authors: &[Vec<u8>]) -> Dataset {
        const NAMES: [&str; 8] = ["J. Smith", "J. Smyth", "J. Smith", "A. Lee", "A. Lee", "B. Kim", "J. W. Smith", "B. Kin"];
        let mut text = String::new();
        for (i, a) in authors.iter().enumerate() {
            let names: Vec<String> = a.iter().map(|n| format!("\"{}\"", NAMES[*n as usize % NAMES.len()])).collect();
            text.push_str(&format!("{{\"pub_id\":\"p{i}\",\"authors\":[{}]}}\n", names.join(",")));
        }
        ingest_str(&text).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// After every merge, the queued similarities equal a from-scratch recomputation
        /// and the live clusters partition the scope.
        #[test]
        fn incremental_matches_naive(
            authors in prop::collection::vec(prop::collection::vec(0u8..8, 1..4), 1..12),
            alpha in 0.0..=1.0f64,
            multiset in any::<bool>(),
        ) {
            let ds = random_corpus(&authors);
            prop_assume!(ds.len() <= 50);
            let cfg = SimilarityConfig {
                alpha,
                neighborhood: if multiset { crate::similarity::NeighborhoodMode::Multiset } else { crate::similarity::NeighborhoodMode::Set },
                ..Default::default()
            };
            let sc = Scorer::new(&ds, cfg).unwrap();
            let mut cl = Clusterer::new(&sc, singletons(&ds)).unwrap();
            loop {
                let naive = naive_pairs(&cl, &sc);
                let queued = cl.queued_pairs();
                prop_assert_eq!(naive.len(), queued.len());
                for ((k1, s1), (k2, s2)) in naive.iter().zip(&queued) {
                    prop_assert_eq!(k1, k2);
                    prop_assert!((s1 - s2).abs() < 1e-12, "{:?}: {} vs {}", k1, s1, s2);
                }
                let total: usize = cl.clusters().iter().map(Vec::len).sum();
                prop_assert_eq!(total, ds.len());
                let Some((_, a, b)) = cl.pop_best() else { break };
                cl.merge(a, b).unwrap();
            }
        }

        #[test]
        fn deterministic_merge_log(authors in prop::collection::vec(prop::collection::vec(0u8..8, 1..4), 1..10)) {
            let ds = random_corpus(&authors);
            let sc = Scorer::new(&ds, SimilarityConfig::default()).unwrap();
            let a = run_rcer(&sc, singletons(&ds), 0.0).unwrap();
            let b = run_rcer(&sc, singletons(&ds), 0.0).unwrap();
            prop_assert_eq!(a.merge_log_text(), b.merge_log_text());
        }
    }
}
