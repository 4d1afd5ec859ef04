//! Synthetic data with controllable attribute and relational ambiguity.
//!
//! Generation has two stages. First a world of entities with a real-valued
//! attribute and symmetric entity relationships is created. Then hyper-edges
//! are sampled from it: an initiator entity plus neighbors drawn without
//! replacement, each observed through a unit-variance Gaussian reference.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::corpus::{AttributeKind, Dataset, DatasetBuilder, GoldLabeling, PublicationRecord};
use crate::error::{Error, Result};

/// Half-width of the range occupied by an entity's references.
pub const OCCUPIED_HALF_WIDTH: f64 = 3.0;
/// Spacing of the grid used for fresh attribute values.
pub const GRID_SPACING: f64 = 12.0;

/// Stream id of the hyper-edge generation stage.
const HYPEREDGE_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n_entities: usize,
    pub n_relationships: usize,
    pub n_hyperedges: usize,
    /// Probability that a new entity reuses an existing entity's attribute range.
    pub p_a: f64,
    /// Probability that a relationship is constructed to be ambiguous.
    pub p_r_a: f64,
    /// Probability of adding one more co-occurring entity to a hyper-edge.
    pub p_c: f64,
    /// Probability that an added co-occurring entity is a true neighbor of the
    /// initiator rather than a random entity.
    pub p_r: f64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { n_entities: 100, n_relationships: 200, n_hyperedges: 500, p_a: 0.3, p_r_a: 0.0, p_c: 0.5, p_r: 1.0, seed: 0 }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} must lie in [0,1], got {v}")))
            }
        };
        prob("p_a", self.p_a)?;
        prob("p_r_a", self.p_r_a)?;
        prob("p_r", self.p_r)?;
        if !(0.0..1.0).contains(&self.p_c) {
            return Err(Error::InvalidParams(format!("p_c must lie in [0,1), got {}", self.p_c)));
        }
        if self.n_entities == 0 {
            return Err(Error::InvalidParams("at least one entity is required".into()));
        }
        if self.n_hyperedges == 0 {
            return Err(Error::InvalidParams("at least one hyper-edge is required".into()));
        }
        let max_edges = self.n_entities * (self.n_entities - 1) / 2;
        if self.n_relationships > max_edges {
            return Err(Error::InvalidParams(format!(
                "{} relationships do not fit between {} entities",
                self.n_relationships, self.n_entities
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthEntity {
    pub x: f64,
    /// The attribute was drawn inside an existing entity's occupied range.
    pub reused: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SyntheticWorld {
    pub entities: Vec<SynthEntity>,
    /// Sorted adjacency lists; symmetric.
    pub neighbors: Vec<Vec<u32>>,
    /// Relationships in creation order, smaller id first.
    pub edges: Vec<(u32, u32)>,
    /// Relationships built through the ambiguous construction.
    pub ambiguous_constructed: usize,
    /// Ambiguous draws that fell back to a non-ambiguous relationship at the time.
    pub ambiguous_fallbacks: usize,
    /// Ambiguous draws still unmet after all relationships were added.
    pub ambiguous_unmet: usize,
    /// Non-ambiguous draws that had to accept an ambiguous relationship.
    pub forced_accepts: usize,
    /// Per entity: the other entities whose occupied ranges intersect its own.
    amb: Vec<Vec<u32>>,
}

impl SyntheticWorld {
    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    /// Occupied ranges of two distinct entities intersect.
    pub fn attr_ambiguous(&self, i: u32, j: u32) -> bool {
        i != j && (self.entities[i as usize].x - self.entities[j as usize].x).abs() < 2.0 * OCCUPIED_HALF_WIDTH
    }

    pub fn ambiguous_with(&self, i: u32) -> &[u32] {
        &self.amb[i as usize]
    }

    pub fn occupied_range(&self, i: u32) -> (f64, f64) {
        let x = self.entities[i as usize].x;
        (x - OCCUPIED_HALF_WIDTH, x + OCCUPIED_HALF_WIDTH)
    }

    fn build_ambiguity(&mut self) {
        let n = self.entities.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by(|a, b| self.entities[*a as usize].x.total_cmp(&self.entities[*b as usize].x));
        let mut amb = vec![Vec::new(); n];
        for (k, i) in order.iter().enumerate() {
            for j in &order[k + 1..] {
                if self.entities[*j as usize].x - self.entities[*i as usize].x >= 2.0 * OCCUPIED_HALF_WIDTH {
                    break;
                }
                amb[*i as usize].push(*j);
                amb[*j as usize].push(*i);
            }
        }
        for l in &mut amb {
            l.sort_unstable();
        }
        self.amb = amb;
    }

    /// Whether relationship `(i, j)` forms an ambiguous pair with some other
    /// relationship `(a, b)`: `a` is attribute-ambiguous with `i` and `b` with `j`.
    pub fn is_ambiguous_relationship(&self, i: u32, j: u32) -> bool {
        self.amb_witness(i, j) || self.amb_witness(j, i)
    }

    fn amb_witness(&self, i: u32, j: u32) -> bool {
        self.amb[i as usize].iter().any(|a| {
            self.neighbors[*a as usize].iter().any(|b| self.attr_ambiguous(*b, j) && !((*a == j && *b == i) || (*a == i && *b == j)))
        })
    }

    /// Share of relationships that are ambiguous in the final world.
    pub fn ambiguous_fraction(&self) -> f64 {
        if self.edges.is_empty() {
            return 0.0;
        }
        let n = self.edges.iter().filter(|(i, j)| self.is_ambiguous_relationship(*i, *j)).count();
        n as f64 / self.edges.len() as f64
    }

    fn connected(&self, i: u32, j: u32) -> bool {
        self.neighbors[i as usize].binary_search(&j).is_ok()
    }

    fn connect(&mut self, i: u32, j: u32) {
        for (a, b) in [(i, j), (j, i)] {
            let list = &mut self.neighbors[a as usize];
            let pos = list.binary_search(&b).unwrap_err();
            list.insert(pos, b);
        }
        self.edges.push((i.min(j), i.max(j)));
    }

    /// Entities `c` that would make `(i, c)` ambiguous through an existing relationship.
    fn ambiguous_candidates(&self, i: u32) -> Vec<u32> {
        let mut out = BTreeSet::new();
        for a in &self.amb[i as usize] {
            for b in &self.neighbors[*a as usize] {
                for c in &self.amb[*b as usize] {
                    if *c != i && !self.connected(i, *c) {
                        out.insert(*c);
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

/// Creates `n_entities` entities. A new attribute lands inside an existing
/// occupied range with probability `p_a`; otherwise it takes a free grid slot
/// whose range intersects no existing range.
pub fn create_entities(params: &GenParams, rng: &mut ChaCha8Rng) -> SyntheticWorld {
    let n = params.n_entities;
    let slots = 4 * n + 16;
    let mut entities: Vec<SynthEntity> = Vec::with_capacity(n);
    for _ in 0..n {
        if !entities.is_empty() && rng.random_bool(params.p_a) {
            let base = entities[rng.random_range(0..entities.len())].x;
            let x = rng.random_range(base - OCCUPIED_HALF_WIDTH..=base + OCCUPIED_HALF_WIDTH);
            entities.push(SynthEntity { x, reused: true });
        } else {
            let x = loop {
                let x = rng.random_range(0..slots) as f64 * GRID_SPACING;
                if entities.iter().all(|e| (e.x - x).abs() >= 2.0 * OCCUPIED_HALF_WIDTH) {
                    break x;
                }
            };
            entities.push(SynthEntity { x, reused: false });
        }
    }
    let mut world = SyntheticWorld { neighbors: vec![Vec::new(); n], entities, ..Default::default() };
    world.build_ambiguity();
    world
}

/// Rejection attempts before a non-ambiguous draw accepts whatever it has.
const MAX_ATTEMPTS: usize = 200;

/// Adds `n_relationships` symmetric relationships, each ambiguous with probability `p_r_a`.
pub fn add_relationships(world: &mut SyntheticWorld, params: &GenParams, rng: &mut ChaCha8Rng) {
    let n = world.len() as u32;
    if n < 2 {
        return;
    }
    // Ambiguous draws that found no construction are retried on later draws,
    // so the overall constructed share still tracks `p_r_a`.
    let mut pending = 0usize;
    for _ in 0..params.n_relationships {
        let mut i = rng.random_range(0..n);
        let wanted = rng.random_bool(params.p_r_a);
        if wanted {
            pending += 1;
        }
        if pending > 0 {
            let mut cands = world.ambiguous_candidates(i);
            if cands.is_empty() {
                let mut order: Vec<u32> = (0..n).collect();
                order.shuffle(rng);
                if let Some((k, c)) = order.iter().find_map(|k| {
                    let c = world.ambiguous_candidates(*k);
                    (!c.is_empty()).then_some((*k, c))
                }) {
                    i = k;
                    cands = c;
                }
            }
            if !cands.is_empty() {
                let j = cands[rng.random_range(0..cands.len())];
                world.connect(i, j);
                world.ambiguous_constructed += 1;
                pending -= 1;
                continue;
            }
            if wanted {
                world.ambiguous_fallbacks += 1;
            }
        }
        // Non-ambiguous relationship: rejection-sample a partner.
        let mut fallback = None;
        let mut chosen = None;
        for _ in 0..MAX_ATTEMPTS {
            let j = rng.random_range(0..n);
            if j == i || world.connected(i, j) {
                continue;
            }
            if !world.is_ambiguous_relationship(i, j) {
                chosen = Some(j);
                break;
            }
            fallback.get_or_insert(j);
        }
        let j = match (chosen, fallback) {
            (Some(j), _) => j,
            (None, Some(j)) => {
                world.forced_accepts += 1;
                j
            }
            (None, None) => {
                // Every sampled partner was already connected; scan for any free one.
                let free: Vec<u32> = (0..n).filter(|j| *j != i && !world.connected(i, *j)).collect();
                if free.is_empty() {
                    let pairs: Vec<(u32, u32)> =
                        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|(a, b)| !world.connected(*a, *b)).collect();
                    let (a, b) = pairs[rng.random_range(0..pairs.len())];
                    world.forced_accepts += 1;
                    world.connect(a, b);
                    continue;
                }
                world.forced_accepts += 1;
                free[rng.random_range(0..free.len())]
            }
        };
        world.connect(i, j);
    }
    world.ambiguous_unmet = pending;
}

/// Renders a reference attribute as text.
pub fn render_value(x: f64) -> String {
    format!("{x:.4}")
}

#[derive(Debug, Clone)]
pub struct SyntheticOutput {
    pub dataset: Dataset,
    pub gold: GoldLabeling,
    pub world: SyntheticWorld,
    /// Entity of each hyper-edge's initiator.
    pub initiators: Vec<u32>,
}

/// Samples `n_hyperedges` hyper-edges from the world.
pub fn generate_hyperedges(world: &SyntheticWorld, params: &GenParams, rng: &mut ChaCha8Rng) -> Result<(Dataset, GoldLabeling, Vec<u32>)> {
    let n = world.len() as u32;
    let mut builder = DatasetBuilder::new(AttributeKind::Numeric);
    let mut labels: Vec<String> = Vec::new();
    let mut initiators = Vec::with_capacity(params.n_hyperedges);
    for h in 0..params.n_hyperedges {
        let e = rng.random_range(0..n);
        initiators.push(e);
        let mut members = vec![e];
        let mut available = world.neighbors[e as usize].clone();
        let mut noise = vec![StandardNormal.sample(rng)];
        // Every extension step consumes the same draws whatever p_r is, so runs
        // that differ only in p_r share sizes, neighbor picks and noise.
        while !available.is_empty() && rng.random_bool(params.p_c) {
            let k = rng.random_range(0..available.len());
            let keep_neighbor = rng.random::<f64>() < params.p_r;
            let u: f64 = rng.random();
            noise.push(StandardNormal.sample(rng));
            let neighbor = available.swap_remove(k);
            if keep_neighbor {
                members.push(neighbor);
                continue;
            }
            let others: Vec<u32> =
                (0..n).filter(|o| !members.contains(o) && world.neighbors[e as usize].binary_search(o).is_err()).collect();
            if others.is_empty() {
                members.push(neighbor);
            } else {
                members.push(others[((u * others.len() as f64) as usize).min(others.len() - 1)]);
            }
        }
        let mut authors = Vec::with_capacity(members.len());
        for (m, z) in members.iter().zip(&noise) {
            authors.push(render_value(world.entities[*m as usize].x + z));
            labels.push(format!("e{m}"));
        }
        let rec = PublicationRecord {
            pub_id: format!("h{}", h + 1),
            authors,
            ref_ids: None,
            author_attrs: Default::default(),
            attrs: Default::default(),
        };
        builder.add_record(rec, h + 1)?;
    }
    let ds = builder.build();
    let gold = GoldLabeling::from_names(&labels);
    Ok((ds, gold, initiators))
}

/// Runs both generation stages with separate random streams derived from `seed`.
pub fn generate(params: &GenParams) -> Result<SyntheticOutput> {
    params.validate()?;
    let mut world_rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut world = create_entities(params, &mut world_rng);
    add_relationships(&mut world, params, &mut world_rng);
    let mut edge_rng = ChaCha8Rng::seed_from_u64(params.seed);
    edge_rng.set_stream(HYPEREDGE_STREAM);
    let (dataset, gold, initiators) = generate_hyperedges(&world, params, &mut edge_rng)?;
    Ok(SyntheticOutput { dataset, gold, world, initiators })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(n: usize, m: usize, r: usize) -> GenParams {
        GenParams { n_entities: n, n_relationships: m, n_hyperedges: r, ..Default::default() }
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn fresh_ranges_are_disjoint() {
        let p = GenParams { p_a: 0.0, ..params(200, 0, 1) };
        let w = create_entities(&p, &mut rng(3));
        for i in 0..200 {
            for j in i + 1..200 {
                assert!(!w.attr_ambiguous(i, j));
            }
        }
    }

    #[test]
    fn full_reuse_lands_in_range() {
        let p = GenParams { p_a: 1.0, ..params(2, 0, 1) };
        let w = create_entities(&p, &mut rng(5));
        let (lo, hi) = w.occupied_range(0);
        assert!(w.entities[1].reused && (lo..=hi).contains(&w.entities[1].x));
    }

    #[test]
    fn reuse_rate_tracks_p_a() {
        let p = GenParams { p_a: 0.5, ..params(1000, 0, 1) };
        let mean: f64 =
            (0..20).map(|s| create_entities(&p, &mut rng(s)).entities.iter().filter(|e| e.reused).count() as f64 / 1000.0).sum::<f64>()
                / 20.0;
        assert!((mean - 0.5).abs() <= 0.05, "{mean}");
    }

    #[test]
    fn relationships_without_ambiguity() {
        for seed in 0..20 {
            let out = generate(&GenParams { p_r_a: 0.0, seed, ..params(100, 200, 10) }).unwrap();
            assert_eq!(out.world.edges.len(), 200);
            assert_eq!(out.world.forced_accepts, 0);
            assert_eq!(out.world.ambiguous_fraction(), 0.0);
        }
        let out = generate(&params(10, 0, 5)).unwrap();
        assert!(out.world.neighbors.iter().all(Vec::is_empty));
    }

    #[test]
    fn ambiguous_construction_rate() {
        let runs = 20;
        let mut total = 0.0;
        for seed in 0..runs {
            let out = generate(&GenParams { p_r_a: 0.6, seed, ..params(100, 200, 10) }).unwrap();
            let w = &out.world;
            total += w.ambiguous_constructed as f64 / 200.0;
            let sym = w.neighbors.iter().enumerate().all(|(i, l)| l.iter().all(|j| w.neighbors[*j as usize].contains(&(i as u32))));
            assert!(sym);
        }
        let mean = total / runs as f64;
        assert!((mean - 0.6).abs() <= 0.07, "{mean}");
    }

    #[test]
    fn hyperedge_sizes() {
        let out = generate(&GenParams { p_c: 0.0, ..params(50, 100, 300) }).unwrap();
        assert!(out.dataset.hyperedges().iter().all(|h| h.refs.len() == 1));
        let lonely = generate(&GenParams { p_c: 0.9, ..params(30, 0, 100) }).unwrap();
        assert!(lonely.dataset.hyperedges().iter().all(|h| h.refs.len() == 1));
        // Dense graph: neighbors rarely run out, so sizes are close to geometric.
        let mut mean = 0.0;
        for seed in 0..20 {
            let out = generate(&GenParams { p_c: 0.5, seed, ..params(60, 1200, 500) }).unwrap();
            mean += out.dataset.len() as f64 / 500.0;
        }
        mean /= 20.0;
        assert!((mean - 2.0).abs() <= 0.1, "{mean}");
    }

    #[test]
    fn replication_settings_expressible() {
        let a = generate(&GenParams { seed: 7, ..params(100, 200, 500) }).unwrap();
        assert_eq!(a.dataset.hyperedges().len(), 500);
        let b = generate(&GenParams { seed: 7, ..params(500, 500, 2500) }).unwrap();
        let avg_deg = b.world.neighbors.iter().map(Vec::len).sum::<usize>() as f64 / 500.0;
        assert_eq!(avg_deg, 2.0);
        assert_eq!(b.dataset.hyperedges().len(), 2500);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn deterministic_and_consistent(seed in any::<u64>(), p_c in 0.0..0.95f64, p_a in 0.0..=1.0f64, p_r in 0.0..=1.0f64) {
            let p = GenParams { seed, p_c, p_a, p_r, ..params(40, 60, 80) };
            let a = generate(&p).unwrap();
            let b = generate(&p).unwrap();
            let (mut ta, mut tb) = (Vec::new(), Vec::new());
            a.dataset.write_records(&mut ta).unwrap();
            b.dataset.write_records(&mut tb).unwrap();
            prop_assert_eq!(ta, tb);
            prop_assert_eq!(a.dataset.hyperedges().len(), 80);
            let sizes: usize = a.dataset.hyperedges().iter().map(|h| h.refs.len()).sum();
            prop_assert_eq!(sizes, a.dataset.len());
            prop_assert_eq!(a.gold.len(), a.dataset.len());
            for e in 0..a.gold.num_entities() as u32 {
                let id: usize = a.gold.entity_name(e)[1..].parse().unwrap();
                prop_assert!(id < 40);
            }
            for h in a.dataset.hyperedges() {
                let ents: BTreeSet<&str> = h.refs.iter().map(|r| a.gold.entity_name(a.gold.entity(*r))).collect();
                prop_assert_eq!(ents.len(), h.refs.len());
            }
        }
    }
}
