//! Pairwise evaluation, baseline resolvers and synthetic trend experiments.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{EntityId, GoldLabeling, RefIdx};
use crate::error::{Error, Result};
use crate::query::{project, Engine, EngineConfig};
use crate::rcer::normalize_partition;
use crate::similarity::Scorer;
use crate::synthgen::{generate, render_value, GenParams, SyntheticOutput};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairwiseMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl PairwiseMetrics {
    /// Metrics from pair counts. No predicted pairs gives precision 1, no gold
    /// pairs gives recall 1.
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let precision = if tp + fp == 0 { 1.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if tp + fn_ == 0 { 1.0 } else { tp as f64 / (tp + fn_) as f64 };
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        PairwiseMetrics { precision, recall, f1, tp, fp, fn_ }
    }
}

impl fmt::Display for PairwiseMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "precision={:.4} recall={:.4} f1={:.4} tp={} fp={} fn={}",
            self.precision, self.recall, self.f1, self.tp, self.fp, self.fn_
        )
    }
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn gold_pairs(gold: &GoldLabeling, scope: &[RefIdx]) -> u64 {
    let mut per_entity: HashMap<EntityId, u64> = HashMap::new();
    for r in scope {
        *per_entity.entry(gold.entity(*r)).or_default() += 1;
    }
    per_entity.values().map(|k| choose2(*k)).sum()
}

fn check_scope(gold: &GoldLabeling, scope: &[RefIdx]) -> Result<HashSet<RefIdx>> {
    let mut set = HashSet::with_capacity(scope.len());
    for r in scope {
        if r.index() >= gold.len() {
            return Err(Error::InvalidGold(format!("reference #{} is not labeled", r.0)));
        }
        if !set.insert(*r) {
            return Err(Error::NotAPartition(format!("scope lists reference #{} twice", r.0)));
        }
    }
    Ok(set)
}

/// Pairwise metrics of a predicted partition of `scope`.
pub fn pairwise_metrics(pred: &[Vec<RefIdx>], gold: &GoldLabeling, scope: &[RefIdx]) -> Result<PairwiseMetrics> {
    let mut remaining = check_scope(gold, scope)?;
    let mut predicted = 0u64;
    let mut tp = 0u64;
    for cluster in pred {
        let mut per_entity: HashMap<EntityId, u64> = HashMap::new();
        for r in cluster {
            if !remaining.remove(r) {
                return Err(Error::NotAPartition(format!("reference #{} is outside the scope or repeated", r.0)));
            }
            *per_entity.entry(gold.entity(*r)).or_default() += 1;
        }
        predicted += choose2(cluster.len() as u64);
        tp += per_entity.values().map(|k| choose2(*k)).sum::<u64>();
    }
    if let Some(r) = remaining.iter().min() {
        return Err(Error::NotAPartition(format!("reference #{} is not covered", r.0)));
    }
    let truth = gold_pairs(gold, scope);
    Ok(PairwiseMetrics::from_counts(tp, predicted - tp, truth - tp))
}

/// Metrics of raw pairwise decisions (no transitive closure). Pairs outside
/// `scope` or repeated are rejected.
pub fn metrics_from_pairs(pairs: &[(RefIdx, RefIdx)], gold: &GoldLabeling, scope: &[RefIdx]) -> Result<PairwiseMetrics> {
    let set = check_scope(gold, scope)?;
    let mut seen = HashSet::with_capacity(pairs.len());
    let (mut tp, mut fp) = (0u64, 0u64);
    for &(a, b) in pairs {
        let key = if a < b { (a, b) } else { (b, a) };
        if a == b || !set.contains(&a) || !set.contains(&b) || !seen.insert(key) {
            return Err(Error::NotAPartition(format!("invalid decision pair (#{}, #{})", a.0, b.0)));
        }
        if gold.entity(a) == gold.entity(b) {
            tp += 1;
        } else {
            fp += 1;
        }
    }
    let truth = gold_pairs(gold, scope);
    Ok(PairwiseMetrics::from_counts(tp, fp, truth - tp))
}

/// Connected components of `refs` under the accepted pairs.
pub fn transitive_closure(refs: &[RefIdx], pairs: &[(RefIdx, RefIdx)]) -> Vec<Vec<RefIdx>> {
    let pos: HashMap<RefIdx, usize> = refs.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let mut parent: Vec<usize> = (0..refs.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in pairs {
        let (Some(&i), Some(&j)) = (pos.get(a), pos.get(b)) else { continue };
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let mut groups: BTreeMap<usize, Vec<RefIdx>> = BTreeMap::new();
    for (i, r) in refs.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(*r);
    }
    normalize_partition(groups.into_values().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineKind {
    A,
    AStar,
    NR,
    NRStar,
    Rcer,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 5] = [BaselineKind::A, BaselineKind::AStar, BaselineKind::NR, BaselineKind::NRStar, BaselineKind::Rcer];

    fn relational(self) -> bool {
        matches!(self, BaselineKind::NR | BaselineKind::NRStar)
    }

    fn closed(self) -> bool {
        matches!(self, BaselineKind::AStar | BaselineKind::NRStar)
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineKind::A => "A",
            BaselineKind::AStar => "A*",
            BaselineKind::NR => "NR",
            BaselineKind::NRStar => "NR*",
            BaselineKind::Rcer => "RC-ER",
        })
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(BaselineKind::A),
            "a*" | "a_star" | "astar" => Ok(BaselineKind::AStar),
            "nr" => Ok(BaselineKind::NR),
            "nr*" | "nr_star" | "nrstar" => Ok(BaselineKind::NRStar),
            "rcer" | "rc-er" | "rc_er" => Ok(BaselineKind::Rcer),
            _ => Err(Error::InvalidConfig(format!("unknown resolver `{s}`"))),
        }
    }
}

/// Greedy one-to-one best-match average of attribute similarities between two
/// reference sets, divided by the smaller set size. Empty sets give 0.
pub fn best_match_average(scorer: &Scorer<'_>, a: &[RefIdx], b: &[RefIdx]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut cross: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            cross.push((scorer.ref_attr_sim(*x, *y), i, j));
        }
    }
    cross.sort_by(|p, q| q.0.total_cmp(&p.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut total = 0.0;
    for (s, i, j) in cross {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            total += s;
        }
    }
    total / a.len().min(b.len()) as f64
}

/// Pair score of the attribute baseline.
pub fn score_a(scorer: &Scorer<'_>, x: RefIdx, y: RefIdx) -> f64 {
    scorer.ref_attr_sim(x, y)
}

/// Pair score of the naive relational baseline.
pub fn score_nr(scorer: &Scorer<'_>, x: RefIdx, y: RefIdx) -> f64 {
    let ds = scorer.dataset();
    let alpha = scorer.config().alpha;
    let rel = best_match_average(scorer, &ds.cooccurring(x), &ds.cooccurring(y));
    (1.0 - alpha) * scorer.ref_attr_sim(x, y) + alpha * rel
}

/// Blocked pairs of a reference set with their baseline scores.
#[derive(Debug, Clone)]
pub struct ScoredPairs {
    pub refs: Vec<RefIdx>,
    pub pairs: Vec<(RefIdx, RefIdx, f64)>,
}

impl ScoredPairs {
    /// Scores every blocked pair among `refs`. `kind` must be a pairwise baseline.
    pub fn new(scorer: &Scorer<'_>, refs: &[RefIdx], kind: BaselineKind) -> Self {
        let mut refs = refs.to_vec();
        refs.sort_unstable();
        refs.dedup();
        let pairs = scorer
            .block_candidates(&refs)
            .into_iter()
            .map(|(x, y)| {
                let s = if kind.relational() { score_nr(scorer, x, y) } else { score_a(scorer, x, y) };
                (x, y, s)
            })
            .collect();
        ScoredPairs { refs, pairs }
    }

    /// Pairs whose score reaches `threshold`.
    pub fn accepted(&self, threshold: f64) -> Vec<(RefIdx, RefIdx)> {
        self.pairs.iter().filter(|p| p.2 >= threshold).map(|p| (p.0, p.1)).collect()
    }

    pub fn closure(&self, threshold: f64) -> Vec<Vec<RefIdx>> {
        transitive_closure(&self.refs, &self.accepted(threshold))
    }
}

/// Attribute baseline as a partition: closure of accepted pairs.
pub fn baseline_a(scorer: &Scorer<'_>, refs: &[RefIdx], threshold: f64) -> Vec<Vec<RefIdx>> {
    ScoredPairs::new(scorer, refs, BaselineKind::A).closure(threshold)
}

/// Naive relational baseline as a partition: closure of accepted pairs.
pub fn baseline_nr(scorer: &Scorer<'_>, refs: &[RefIdx], threshold: f64) -> Vec<Vec<RefIdx>> {
    ScoredPairs::new(scorer, refs, BaselineKind::NR).closure(threshold)
}

/// Maximum-F1 entry; ties go to the lowest threshold.
pub fn best_of(sweep: &[(f64, PairwiseMetrics)]) -> Result<(f64, PairwiseMetrics)> {
    let mut best: Option<(f64, PairwiseMetrics)> = None;
    for &(t, m) in sweep {
        best = match best {
            Some((bt, bm)) if bm.f1 > m.f1 || (bm.f1 == m.f1 && bt <= t) => Some((bt, bm)),
            _ => Some((t, m)),
        };
    }
    best.ok_or_else(|| Error::InvalidConfig("threshold list is empty".into()))
}

/// Runs `resolver` at every threshold and keeps the best F1.
pub fn best_f1_over_thresholds<F>(thresholds: &[f64], mut resolver: F) -> Result<(f64, PairwiseMetrics)>
where
    F: FnMut(f64) -> Result<PairwiseMetrics>,
{
    let sweep = thresholds.iter().map(|t| Ok((*t, resolver(*t)?))).collect::<Result<Vec<_>>>()?;
    best_of(&sweep)
}

/// Evaluates one resolver over a whole reference set at each threshold. RC-ER
/// runs once down to the lowest threshold and replays its merge log.
pub fn sweep(
    engine: &Engine<'_>,
    kind: BaselineKind,
    refs: &[RefIdx],
    gold: &GoldLabeling,
    thresholds: &[f64],
) -> Result<Vec<(f64, PairwiseMetrics)>> {
    let Some(lowest) = thresholds.iter().copied().reduce(f64::min) else {
        return Ok(Vec::new());
    };
    match kind {
        BaselineKind::Rcer => {
            let res = engine.cluster_refs(refs, lowest)?;
            thresholds.iter().map(|t| Ok((*t, pairwise_metrics(&res.partition_at(*t), gold, refs)?))).collect()
        }
        _ => {
            let scored = ScoredPairs::new(engine.scorer(), refs, kind);
            thresholds
                .iter()
                .map(|t| {
                    let m = if kind.closed() {
                        pairwise_metrics(&scored.closure(*t), gold, &scored.refs)?
                    } else {
                        metrics_from_pairs(&scored.accepted(*t), gold, &scored.refs)?
                    };
                    Ok((*t, m))
                })
                .collect()
        }
    }
}

/// Query-time sweep: RC-ER over the relevant set of `value`, evaluated on the
/// level-0 references. Unanswerable queries give an empty sweep.
pub fn sweep_query(
    engine: &Engine<'_>,
    value: &str,
    gold: &GoldLabeling,
    thresholds: &[f64],
) -> Result<(usize, Vec<(f64, PairwiseMetrics)>)> {
    let Some(lowest) = thresholds.iter().copied().reduce(f64::min) else {
        return Ok((0, Vec::new()));
    };
    let relevant = engine.extract(value)?;
    if !relevant.answerable() {
        return Ok((relevant.len(), Vec::new()));
    }
    let res = engine.cluster(&relevant, lowest)?;
    let scope = &relevant.levels[0];
    let out = thresholds
        .iter()
        .map(|t| Ok((*t, pairwise_metrics(&project(&res.partition_at(*t), scope), gold, scope)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((relevant.len(), out))
}

/// `n` evenly spaced thresholds from `lo` to `hi` inclusive.
pub fn threshold_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendKind {
    /// Vary the neighbor co-occurrence probability; track recall.
    PrRecall,
    /// Vary the ambiguous relationship probability; track precision.
    PraPrecision,
    /// Vary the expansion depth of a most-ambiguous query; track both.
    LevelConvergence,
}

impl FromStr for TrendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "pr_recall" => Ok(TrendKind::PrRecall),
            "pra_precision" => Ok(TrendKind::PraPrecision),
            "level_convergence" => Ok(TrendKind::LevelConvergence),
            _ => Err(Error::InvalidConfig(format!("unknown trend experiment `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Precision,
    Recall,
    F1,
}

impl Metric {
    pub fn of(self, m: &PairwiseMetrics) -> f64 {
        match self {
            Metric::Precision => m.precision,
            Metric::Recall => m.recall,
            Metric::F1 => m.f1,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::F1 => "f1",
        })
    }
}

#[derive(Debug, Clone)]
pub struct TrendSpec {
    pub kind: TrendKind,
    /// p_r values, p_r_a values, or expansion depths, depending on `kind`.
    pub settings: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Generator parameters; the varied field and the seed are overwritten.
    pub gen: GenParams,
    pub engine: EngineConfig,
}

impl TrendSpec {
    /// The defaults of each study: 100 entities, 200 relationships and 500
    /// hyper-edges for the relationship studies, 500/500/2500 for the depth study.
    pub fn standard(kind: TrendKind, runs: usize, base_seed: u64) -> Self {
        let (settings, gen) = match kind {
            TrendKind::PrRecall => (vec![0.2, 0.5, 1.0], GenParams { p_r_a: 0.3, ..GenParams::default() }),
            TrendKind::PraPrecision => (vec![0.0, 0.3, 0.6], GenParams::default()),
            TrendKind::LevelConvergence => {
                (vec![0.0, 1.0, 2.0, 3.0], GenParams { n_entities: 500, n_relationships: 500, n_hyperedges: 2500, ..GenParams::default() })
            }
        };
        TrendSpec {
            kind,
            settings,
            thresholds: threshold_grid(0.25, 0.475, 10),
            seeds: (0..runs as u64).map(|i| base_seed + i).collect(),
            gen,
            engine: synthetic_engine_config(),
        }
    }

    pub fn metrics(&self) -> Vec<Metric> {
        match self.kind {
            TrendKind::PrRecall => vec![Metric::Recall],
            TrendKind::PraPrecision => vec![Metric::Precision],
            TrendKind::LevelConvergence => vec![Metric::Recall, Metric::Precision],
        }
    }
}

/// Engine configuration used for numeric synthetic data.
pub fn synthetic_engine_config() -> EngineConfig {
    let mut cfg = EngineConfig::default();
    cfg.similarity.alpha = 0.5;
    cfg.similarity.delta = 0.5;
    cfg.similarity.epsilon = 0.9;
    cfg
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub setting: f64,
    pub threshold: f64,
    pub mean: f64,
    pub stddev: f64,
    pub n_runs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendReport {
    pub kind: TrendKind,
    pub metric: Metric,
    pub rows: Vec<TrendRow>,
}

impl TrendReport {
    /// Mean curve of one setting, in threshold order.
    pub fn curve(&self, setting: f64) -> Vec<f64> {
        self.rows.iter().filter(|r| r.setting == setting).map(|r| r.mean).collect()
    }

    /// Average of a setting's curve over the threshold grid.
    pub fn grid_mean(&self, setting: f64) -> f64 {
        let c = self.curve(setting);
        if c.is_empty() {
            f64::NAN
        } else {
            c.iter().sum::<f64>() / c.len() as f64
        }
    }

    /// Tab-separated table with a header line.
    pub fn to_tsv(&self) -> String {
        let mut s = format!("# {}\nsetting\tthreshold\tmean\tstddev\tn_runs\n", self.metric);
        for r in &self.rows {
            let _ = writeln!(s, "{}\t{:.4}\t{:.6}\t{:.6}\t{}", r.setting, r.threshold, r.mean, r.stddev, r.n_runs);
        }
        s
    }
}

/// Value of the most ambiguous attribute: the entity whose occupied range
/// overlaps the most others (lowest id on ties).
pub fn most_ambiguous_value(out: &SyntheticOutput) -> String {
    let w = &out.world;
    let best = (0..w.len() as u32).max_by(|a, b| w.ambiguous_with(*a).len().cmp(&w.ambiguous_with(*b).len()).then(b.cmp(a)));
    render_value(best.map_or(0.0, |e| w.entities[e as usize].x))
}

/// Per-threshold metrics of one run of one setting.
fn run_once(spec: &TrendSpec, setting: f64, seed: u64) -> Result<Vec<PairwiseMetrics>> {
    let mut gen = spec.gen.clone();
    gen.seed = seed;
    match spec.kind {
        TrendKind::PrRecall => gen.p_r = setting,
        TrendKind::PraPrecision => gen.p_r_a = setting,
        TrendKind::LevelConvergence => {}
    }
    let out = generate(&gen)?;
    let mut cfg = spec.engine.clone();
    if spec.kind == TrendKind::LevelConvergence {
        cfg.expansion.d_star = setting as usize;
    }
    let engine = Engine::new(&out.dataset, cfg)?;
    let sw = match spec.kind {
        TrendKind::LevelConvergence => sweep_query(&engine, &most_ambiguous_value(&out), &out.gold, &spec.thresholds)?.1,
        _ => {
            let refs: Vec<RefIdx> = out.dataset.ref_ids().collect();
            sweep(&engine, BaselineKind::Rcer, &refs, &out.gold, &spec.thresholds)?
        }
    };
    Ok(sw.into_iter().map(|(_, m)| m).collect())
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

/// Runs a trend study, parallel over seeds, and aggregates each tracked metric.
/// Runs whose query is unanswerable are skipped.
pub fn run_trend_experiment(spec: &TrendSpec) -> Result<Vec<TrendReport>> {
    if spec.thresholds.is_empty() || spec.seeds.is_empty() || spec.settings.is_empty() {
        return Err(Error::InvalidConfig("trend experiment needs settings, thresholds and seeds".into()));
    }
    let mut per_setting: Vec<Vec<Vec<PairwiseMetrics>>> = Vec::new();
    for s in &spec.settings {
        let runs = spec.seeds.par_iter().map(|seed| run_once(spec, *s, *seed)).collect::<Result<Vec<_>>>()?;
        per_setting.push(runs.into_iter().filter(|r| !r.is_empty()).collect());
    }
    let reports = spec
        .metrics()
        .into_iter()
        .map(|metric| {
            let mut rows = Vec::new();
            for (s, runs) in spec.settings.iter().zip(&per_setting) {
                for (i, t) in spec.thresholds.iter().enumerate() {
                    let vals: Vec<f64> = runs.iter().map(|r| metric.of(&r[i])).collect();
                    let (mean, stddev) = if vals.is_empty() { (f64::NAN, f64::NAN) } else { mean_std(&vals) };
                    rows.push(TrendRow { setting: *s, threshold: *t, mean, stddev, n_runs: vals.len() });
                }
            }
            TrendReport { kind: spec.kind, metric, rows }
        })
        .collect();
    Ok(reports)
}

/// Fraction of grid points where consecutive settings violate the expected
/// ordering. `increasing` means later settings should score at least as high.
pub fn ordering_violations(report: &TrendReport, settings: &[f64], increasing: bool) -> (usize, usize) {
    let curves: Vec<Vec<f64>> = settings.iter().map(|s| report.curve(*s)).collect();
    let mut bad = 0;
    let mut total = 0;
    for w in curves.windows(2) {
        for (lo, hi) in w[0].iter().zip(&w[1]) {
            total += 1;
            let ok = if increasing { hi >= lo } else { hi <= lo };
            if !ok {
                bad += 1;
            }
        }
    }
    (bad, total)
}
