//! The query-time resolution pipeline: extract the relevant references for a
//! name, cluster them, and project the clusters onto the query's own references.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, RefIdx};
use crate::error::{Error, Result};
use crate::expansion::{build_relevant_set, AmbiguityEstimator, AmbiguityMode, ExpansionParams, RelevantSet, Secondary};
use crate::rcer::{bootstrap, normalize_partition, Bootstrap, Clusterer, RcerResult};
use crate::similarity::{Scorer, SimilarityConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionConfig {
    pub bootstrap: Bootstrap,
    pub ambiguity: AmbiguityMode,
    pub secondary: Secondary,
    /// Require ε-similarity for candidate pairs inside the outermost expansion level.
    pub epsilon_outermost: bool,
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        ResolutionConfig {
            bootstrap: Bootstrap::Singletons,
            ambiguity: AmbiguityMode::Conditional,
            secondary: Secondary::FirstInitial,
            epsilon_outermost: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub similarity: SimilarityConfig,
    pub expansion: ExpansionParams,
    pub resolution: ResolutionConfig,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        self.similarity.validate()?;
        self.expansion.validate()?;
        if let Bootstrap::ExactName { max_ambiguity } = self.resolution.bootstrap {
            if !(0.0..=1.0).contains(&max_ambiguity) {
                return Err(Error::InvalidConfig(format!("bootstrap cutoff {max_ambiguity} outside [0,1]")));
            }
        }
        Ok(())
    }
}

/// Result of one query.
#[derive(Debug, Clone, Serialize)]
pub struct QueryAnswer {
    pub value: String,
    pub relevant: RelevantSet,
    /// Clusters restricted to the level-0 references, ordered by first member.
    pub clusters: Vec<Vec<RefIdx>>,
    /// Clusters over the whole relevant set.
    pub all_clusters: Vec<Vec<RefIdx>>,
    pub threshold: f64,
    pub extraction_time: Duration,
    pub resolution_time: Duration,
}

impl QueryAnswer {
    pub fn answerable(&self) -> bool {
        self.relevant.answerable()
    }
}

/// Restricts a partition to `scope`, dropping clusters that become empty.
pub fn project(clusters: &[Vec<RefIdx>], scope: &[RefIdx]) -> Vec<Vec<RefIdx>> {
    let keep: HashSet<RefIdx> = scope.iter().copied().collect();
    normalize_partition(clusters.iter().map(|c| c.iter().copied().filter(|r| keep.contains(r)).collect()).collect())
}

/// A dataset bundled with its similarity machinery and ambiguity estimates.
#[derive(Debug)]
pub struct Engine<'a> {
    scorer: Scorer<'a>,
    est: AmbiguityEstimator<'a>,
    cfg: EngineConfig,
}

impl<'a> Engine<'a> {
    pub fn new(ds: &'a Dataset, cfg: EngineConfig) -> Result<Self> {
        cfg.validate()?;
        let scorer = Scorer::new(ds, cfg.similarity.clone())?;
        let est = AmbiguityEstimator::new(ds, cfg.resolution.ambiguity, cfg.resolution.secondary);
        Ok(Engine { scorer, est, cfg })
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.scorer.dataset()
    }

    pub fn scorer(&self) -> &Scorer<'a> {
        &self.scorer
    }

    pub fn estimator(&self) -> &AmbiguityEstimator<'a> {
        &self.est
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    /// Extraction phase only.
    pub fn extract(&self, value: &str) -> Result<RelevantSet> {
        if value.trim().is_empty() {
            return Err(Error::InvalidConfig("query value is empty".into()));
        }
        build_relevant_set(&self.scorer, &self.est, value, &self.cfg.expansion)
    }

    /// Bootstrap partition of `refs` under the configured mode.
    pub fn bootstrap(&self, refs: &[RefIdx]) -> Vec<Vec<RefIdx>> {
        bootstrap(self.dataset(), refs, self.cfg.resolution.bootstrap, |info| self.est.estimate(&info.normalized))
    }

    /// Clusters a relevant set down to `threshold`.
    pub fn cluster(&self, relevant: &RelevantSet, threshold: f64) -> Result<RcerResult> {
        let refs = relevant.union();
        let initial = self.bootstrap(&refs);
        let outer: HashSet<RefIdx> = match relevant.outermost() {
            Some(level) if self.cfg.resolution.epsilon_outermost => level.iter().copied().collect(),
            _ => HashSet::new(),
        };
        let clusterer = Clusterer::with_filter(&self.scorer, initial, |a, b| {
            !(outer.contains(&a) || outer.contains(&b)) || self.scorer.epsilon_similar(a, b)
        })?;
        Ok(clusterer.run(threshold))
    }

    /// Clusters an arbitrary reference set (no expansion levels).
    pub fn cluster_refs(&self, refs: &[RefIdx], threshold: f64) -> Result<RcerResult> {
        Ok(Clusterer::new(&self.scorer, self.bootstrap(refs))?.run(threshold))
    }

    /// Answers `Q(R.Name = value)` at the configured merge threshold.
    pub fn resolve(&self, value: &str) -> Result<QueryAnswer> {
        self.resolve_at(value, self.cfg.similarity.merge_threshold)
    }

    pub fn resolve_at(&self, value: &str, threshold: f64) -> Result<QueryAnswer> {
        let t0 = Instant::now();
        let relevant = self.extract(value)?;
        let extraction_time = t0.elapsed();
        let t1 = Instant::now();
        let (clusters, all_clusters) = if relevant.answerable() {
            let res = self.cluster(&relevant, threshold)?;
            (project(&res.clusters, &relevant.levels[0]), res.clusters)
        } else {
            (Vec::new(), Vec::new())
        };
        let resolution_time = t1.elapsed();
        Ok(QueryAnswer { value: value.to_owned(), relevant, clusters, all_clusters, threshold, extraction_time, resolution_time })
    }

    /// Answers "which references denote the same entity as reference `ref_id`":
    /// resolve the reference's own name, then keep the cluster containing it.
    pub fn resolve_ref(&self, ref_id: &str) -> Result<QueryAnswer> {
        self.resolve_ref_at(ref_id, self.cfg.similarity.merge_threshold)
    }

    pub fn resolve_ref_at(&self, ref_id: &str, threshold: f64) -> Result<QueryAnswer> {
        let r = self.dataset().resolve_ref(ref_id)?;
        let value = self.dataset().reference(r).name.clone();
        let mut ans = self.resolve_at(&value, threshold)?;
        ans.clusters.retain(|c| c.contains(&r));
        Ok(ans)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest_str, RUNNING_EXAMPLE};

    fn r(i: u32) -> RefIdx {
        RefIdx(i - 1)
    }

    fn running_config() -> EngineConfig {
        EngineConfig {
            similarity: SimilarityConfig { alpha: 0.5, merge_threshold: 0.7, ..Default::default() },
            expansion: ExpansionParams { d_star: 3, ..Default::default() },
            resolution: ResolutionConfig {
                bootstrap: Bootstrap::ExactName { max_ambiguity: 0.15 },
                secondary: Secondary::Forenames,
                ..Default::default()
            },
        }
    }

    #[test]
    fn running_example_query() {
        let ds = ingest_str(RUNNING_EXAMPLE).unwrap();
        let engine = Engine::new(&ds, running_config()).unwrap();
        let ans = engine.resolve("W. Wang").unwrap();
        assert_eq!(ans.clusters, vec![vec![r(1), r(4), r(9)], vec![r(8)]]);
        let by_ref = engine.resolve_ref("r1").unwrap();
        assert_eq!(by_ref.clusters, vec![vec![r(1), r(4), r(9)]]);
        let none = engine.resolve("Nonexistent").unwrap();
        assert!(!none.answerable() && none.clusters.is_empty());
        assert!(engine.resolve_ref("r77").is_err());
    }

    #[test]
    fn projection() {
        let p = project(&[vec![r(1), r(2)], vec![r(3)]], &[r(2), r(3)]);
        assert_eq!(p, vec![vec![r(2)], vec![r(3)]]);
    }
}
