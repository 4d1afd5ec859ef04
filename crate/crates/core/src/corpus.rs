//! Reference datasets: ingestion, the immutable lookup indexes, snapshots and
//! gold labelings.
//!
//! A [`Dataset`] holds one [`Reference`] per observed author occurrence and one
//! [`HyperEdge`] per publication. Records are read from newline-delimited JSON:
//!
//! ```text
//! {"pub_id":"p1","authors":["W. Wang","C. Chen","A. Ansari"],"title":"A mouse immunity model"}
//! ```
//!
//! An optional first line `{"meta":{"attribute_kind":"numeric"}}` marks datasets
//! whose reference attribute is a real number rendered as text (synthetic data).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a reference inside its [`Dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RefIdx(pub u32);

/// Index of a hyper-edge inside its [`Dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeIdx(pub u32);

/// Index of a distinct normalized name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NameId(pub u32);

impl RefIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl NameId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// How the reference name attribute is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    /// Person names compared with token-level string similarity.
    #[default]
    Name,
    /// A real-valued attribute rendered as text.
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub id: String,
    /// The observed name, as written in the record.
    pub name: String,
    pub extra_attrs: BTreeMap<String, String>,
    pub hyperedges: Vec<EdgeIdx>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperEdge {
    pub id: String,
    pub refs: Vec<RefIdx>,
    pub extra_attrs: BTreeMap<String, String>,
}

/// Parsed form of a normalized person name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameInfo {
    pub normalized: String,
    pub tokens: Vec<String>,
    /// Last token, or empty for an empty name.
    pub last: String,
    /// All tokens before the last one, joined by a space.
    pub forenames: String,
    pub first_initial: Option<char>,
}

impl NameInfo {
    pub fn parse(raw: &str) -> Self {
        let normalized = normalize_name(raw);
        let tokens: Vec<String> = normalized.split(' ').filter(|t| !t.is_empty()).map(str::to_owned).collect();
        let (last, forenames, first_initial) = match tokens.split_last() {
            Some((last, rest)) => (last.clone(), rest.join(" "), rest.first().and_then(|t| t.chars().next())),
            None => (String::new(), String::new(), None),
        };
        NameInfo { normalized, tokens, last, forenames, first_initial }
    }

    /// Key used by the block index: first initial and first character of the last name.
    pub fn block_key(&self) -> BlockKey {
        BlockKey::Name(self.first_initial, self.last.chars().next())
    }
}

/// Case-fold, treat periods as token separators, collapse whitespace.
///
/// `"W. Wang"`, `"W Wang"` and `"w.  wang"` all normalize to `"w wang"`.
pub fn normalize_name(raw: &str) -> String {
    let lowered = raw.to_lowercase();
    lowered.split(|c: char| c.is_whitespace() || c == '.').filter(|t| !t.is_empty()).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockKey {
    Name(Option<char>, Option<char>),
    /// Unit-width bucket of a numeric attribute.
    Bucket(i64),
}

/// One publication as read from (or written to) a record file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub authors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_ids: Option<Vec<String>>,
    /// Per-author attributes (e.g. affiliation), copied onto each reference.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub author_attrs: BTreeMap<String, String>,
    /// Publication attributes such as title and keywords.
    #[serde(flatten)]
    pub attrs: BTreeMap<String, serde_json::Value>,
}

/// Publication attributes that are also treated as attributes of every author reference.
pub const SHARED_ATTRS: &[&str] = &["keywords", "affiliation"];

#[derive(Debug, Deserialize)]
struct MetaLine {
    meta: Meta,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Meta {
    #[serde(default)]
    attribute_kind: AttributeKind,
}

/// An immutable reference dataset with its lookup indexes.
#[derive(Debug, Clone)]
pub struct Dataset {
    kind: AttributeKind,
    references: Vec<Reference>,
    hyperedges: Vec<HyperEdge>,
    ref_lookup: HashMap<String, RefIdx>,
    edge_lookup: HashMap<String, EdgeIdx>,
    ref_name: Vec<NameId>,
    names: Vec<NameInfo>,
    name_lookup: HashMap<String, NameId>,
    /// Normalized name -> references carrying it.
    name_index: Vec<Vec<RefIdx>>,
    block_index: HashMap<BlockKey, Vec<RefIdx>>,
    /// Numeric datasets only: parsed value per reference.
    values: Vec<f64>,
    /// Numeric datasets only: references sorted by value.
    sorted_values: Vec<(f64, RefIdx)>,
}

/// Incrementally assembles a [`Dataset`] from publication records.
#[derive(Debug, Default)]
pub struct DatasetBuilder {
    kind: AttributeKind,
    references: Vec<Reference>,
    hyperedges: Vec<HyperEdge>,
    ref_lookup: HashMap<String, RefIdx>,
    edge_lookup: HashMap<String, EdgeIdx>,
}

impl DatasetBuilder {
    pub fn new(kind: AttributeKind) -> Self {
        DatasetBuilder { kind, ..Default::default() }
    }

    /// Adds one publication. `line` is only used for error messages.
    pub fn add_record(&mut self, rec: PublicationRecord, line: usize) -> Result<()> {
        let malformed = |reason: String| Error::MalformedRecord { line, reason };
        if rec.pub_id.trim().is_empty() {
            return Err(malformed("empty pub_id".into()));
        }
        if rec.authors.is_empty() {
            return Err(malformed(format!("publication `{}` has no authors", rec.pub_id)));
        }
        if let Some(ids) = &rec.ref_ids {
            if ids.len() != rec.authors.len() {
                return Err(malformed("ref_ids and authors differ in length".into()));
            }
        }
        if self.edge_lookup.contains_key(&rec.pub_id) {
            return Err(Error::DuplicatePublication(rec.pub_id));
        }

        let mut edge_attrs = BTreeMap::new();
        for (key, value) in &rec.attrs {
            let text = attr_text(value).ok_or_else(|| malformed(format!("field `{key}` is not text")))?;
            edge_attrs.insert(key.clone(), text);
        }
        let mut ref_attrs = rec.author_attrs.clone();
        for key in SHARED_ATTRS {
            if let Some(v) = edge_attrs.get(*key) {
                ref_attrs.entry((*key).to_owned()).or_insert_with(|| v.clone());
            }
        }

        let edge = EdgeIdx(self.hyperedges.len() as u32);
        let mut members = Vec::with_capacity(rec.authors.len());
        for (slot, author) in rec.authors.iter().enumerate() {
            if author.trim().is_empty() {
                return Err(malformed(format!("empty author name at position {slot}")));
            }
            if self.kind == AttributeKind::Numeric && author.trim().parse::<f64>().is_err() {
                return Err(malformed(format!("`{author}` is not a numeric attribute")));
            }
            let id = match &rec.ref_ids {
                Some(ids) => ids[slot].clone(),
                None => format!("r{}", self.references.len() + 1),
            };
            if self.ref_lookup.contains_key(&id) {
                return Err(Error::DuplicateReference(id));
            }
            let idx = RefIdx(self.references.len() as u32);
            self.ref_lookup.insert(id.clone(), idx);
            self.references.push(Reference { id, name: author.clone(), extra_attrs: ref_attrs.clone(), hyperedges: vec![edge] });
            members.push(idx);
        }
        self.edge_lookup.insert(rec.pub_id.clone(), edge);
        self.hyperedges.push(HyperEdge { id: rec.pub_id, refs: members, extra_attrs: edge_attrs });
        Ok(())
    }

    pub fn build(self) -> Dataset {
        let DatasetBuilder { kind, references, hyperedges, ref_lookup, edge_lookup } = self;
        let mut names = Vec::new();
        let mut name_lookup: HashMap<String, NameId> = HashMap::new();
        let mut name_index: Vec<Vec<RefIdx>> = Vec::new();
        let mut ref_name = Vec::with_capacity(references.len());
        let mut block_index: HashMap<BlockKey, Vec<RefIdx>> = HashMap::new();
        let mut values = Vec::new();

        for (i, r) in references.iter().enumerate() {
            let idx = RefIdx(i as u32);
            let info = match kind {
                AttributeKind::Name => NameInfo::parse(&r.name),
                AttributeKind::Numeric => numeric_info(&r.name),
            };
            let id = *name_lookup.entry(info.normalized.clone()).or_insert_with(|| {
                names.push(info.clone());
                name_index.push(Vec::new());
                NameId((names.len() - 1) as u32)
            });
            name_index[id.index()].push(idx);
            ref_name.push(id);
            let key = match kind {
                AttributeKind::Name => info.block_key(),
                AttributeKind::Numeric => {
                    let v: f64 = r.name.trim().parse().expect("validated at ingest");
                    values.push(v);
                    BlockKey::Bucket(v.floor() as i64)
                }
            };
            block_index.entry(key).or_default().push(idx);
        }
        let mut sorted_values: Vec<(f64, RefIdx)> = values.iter().enumerate().map(|(i, v)| (*v, RefIdx(i as u32))).collect();
        sorted_values.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        Dataset {
            kind,
            references,
            hyperedges,
            ref_lookup,
            edge_lookup,
            ref_name,
            names,
            name_lookup,
            name_index,
            block_index,
            values,
            sorted_values,
        }
    }
}

fn numeric_info(raw: &str) -> NameInfo {
    let normalized = raw.trim().to_owned();
    NameInfo { tokens: vec![normalized.clone()], last: normalized.clone(), forenames: String::new(), first_initial: None, normalized }
}

fn attr_text(value: &serde_json::Value) -> Option<String> {
    match value {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Array(items) => {
            let parts: Option<Vec<&str>> = items.iter().map(|v| v.as_str()).collect();
            parts.map(|p| p.join(" "))
        }
        serde_json::Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// Reads newline-delimited publication records.
pub fn ingest<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut builder: Option<DatasetBuilder> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(trimmed).map_err(|e| Error::MalformedRecord { line: lineno, reason: e.to_string() })?;
        if value.get("meta").is_some() {
            if builder.is_some() {
                return Err(Error::MalformedRecord { line: lineno, reason: "meta line must come first".into() });
            }
            let meta: MetaLine =
                serde_json::from_value(value).map_err(|e| Error::MalformedRecord { line: lineno, reason: e.to_string() })?;
            builder = Some(DatasetBuilder::new(meta.meta.attribute_kind));
            continue;
        }
        let rec: PublicationRecord =
            serde_json::from_value(value).map_err(|e| Error::MalformedRecord { line: lineno, reason: e.to_string() })?;
        builder.get_or_insert_with(|| DatasetBuilder::new(AttributeKind::Name)).add_record(rec, lineno)?;
    }
    Ok(builder.unwrap_or_else(|| DatasetBuilder::new(AttributeKind::Name)).build())
}

pub fn ingest_str(text: &str) -> Result<Dataset> {
    ingest(text.as_bytes())
}

pub fn ingest_path(path: &std::path::Path) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    ingest(std::io::BufReader::new(file))
}

const SNAPSHOT_MAGIC: &str = "QTRES-SNAPSHOT";
const SNAPSHOT_VERSION: u32 = 1;

/// Loads a snapshot or a record file, telling them apart by the snapshot header.
pub fn load_path(path: &std::path::Path) -> Result<Dataset> {
    let mut reader = std::io::BufReader::new(std::fs::File::open(path)?);
    if reader.fill_buf()?.starts_with(SNAPSHOT_MAGIC.as_bytes()) {
        Dataset::read_snapshot(reader)
    } else {
        ingest(reader)
    }
}

#[derive(Serialize, Deserialize)]
struct SnapshotBody {
    attribute_kind: AttributeKind,
    records: Vec<PublicationRecord>,
}

impl Dataset {
    pub fn kind(&self) -> AttributeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.references.len()
    }

    pub fn is_empty(&self) -> bool {
        self.references.is_empty()
    }

    pub fn references(&self) -> &[Reference] {
        &self.references
    }

    pub fn hyperedges(&self) -> &[HyperEdge] {
        &self.hyperedges
    }

    pub fn reference(&self, r: RefIdx) -> &Reference {
        &self.references[r.index()]
    }

    pub fn hyperedge(&self, h: EdgeIdx) -> &HyperEdge {
        &self.hyperedges[h.index()]
    }

    pub fn ref_ids(&self) -> impl Iterator<Item = RefIdx> + '_ {
        (0..self.references.len() as u32).map(RefIdx)
    }

    pub fn resolve_ref(&self, id: &str) -> Result<RefIdx> {
        self.ref_lookup.get(id).copied().ok_or_else(|| Error::UnknownReference(id.to_owned()))
    }

    pub fn resolve_edge(&self, id: &str) -> Option<EdgeIdx> {
        self.edge_lookup.get(id).copied()
    }

    pub fn name_id(&self, r: RefIdx) -> NameId {
        self.ref_name[r.index()]
    }

    pub fn name_info(&self, n: NameId) -> &NameInfo {
        &self.names[n.index()]
    }

    pub fn ref_name_info(&self, r: RefIdx) -> &NameInfo {
        self.name_info(self.name_id(r))
    }

    pub fn names(&self) -> &[NameInfo] {
        &self.names
    }

    pub fn num_names(&self) -> usize {
        self.names.len()
    }

    /// References carrying exactly this normalized name.
    pub fn refs_with_name(&self, n: NameId) -> &[RefIdx] {
        &self.name_index[n.index()]
    }

    pub fn lookup_name_id(&self, raw: &str) -> Option<NameId> {
        let key = match self.kind {
            AttributeKind::Name => normalize_name(raw),
            AttributeKind::Numeric => raw.trim().to_owned(),
        };
        self.name_lookup.get(&key).copied()
    }

    /// References whose normalized name equals the normalized input.
    pub fn lookup_name(&self, raw: &str) -> Vec<RefIdx> {
        self.lookup_name_id(raw).map(|n| self.refs_with_name(n).to_vec()).unwrap_or_default()
    }

    pub fn block(&self, key: &BlockKey) -> &[RefIdx] {
        self.block_index.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn block_index(&self) -> &HashMap<BlockKey, Vec<RefIdx>> {
        &self.block_index
    }

    /// Numeric attribute of a reference (numeric datasets only).
    pub fn value(&self, r: RefIdx) -> f64 {
        self.values[r.index()]
    }

    /// References whose numeric attribute lies in `[lo, hi]`, ascending by value.
    pub fn refs_in_range(&self, lo: f64, hi: f64) -> &[(f64, RefIdx)] {
        let start = self.sorted_values.partition_point(|(v, _)| *v < lo);
        let end = self.sorted_values.partition_point(|(v, _)| *v <= hi);
        &self.sorted_values[start..end.max(start)]
    }

    pub fn sorted_values(&self) -> &[(f64, RefIdx)] {
        &self.sorted_values
    }

    /// References sharing a hyper-edge with `r`, excluding `r`. Sorted, deduplicated.
    pub fn cooccurring(&self, r: RefIdx) -> Vec<RefIdx> {
        let mut out: Vec<RefIdx> =
            self.reference(r).hyperedges.iter().flat_map(|h| self.hyperedge(*h).refs.iter().copied()).filter(|o| *o != r).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Like [`Dataset::cooccurring`] but addressed by external reference id.
    pub fn cooccurring_by_id(&self, id: &str) -> Result<Vec<RefIdx>> {
        Ok(self.cooccurring(self.resolve_ref(id)?))
    }

    /// Converts the dataset back into publication records (one per hyper-edge).
    pub fn to_records(&self) -> Vec<PublicationRecord> {
        self.hyperedges
            .iter()
            .map(|h| {
                let first = h.refs.first().map(|r| self.reference(*r));
                let mut author_attrs = first.map(|r| r.extra_attrs.clone()).unwrap_or_default();
                author_attrs.retain(|k, v| h.extra_attrs.get(k) != Some(v));
                PublicationRecord {
                    pub_id: h.id.clone(),
                    authors: h.refs.iter().map(|r| self.reference(*r).name.clone()).collect(),
                    ref_ids: Some(h.refs.iter().map(|r| self.reference(*r).id.clone()).collect()),
                    author_attrs,
                    attrs: h.extra_attrs.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect(),
                }
            })
            .collect()
    }

    /// Writes the dataset in record-file form (readable by [`ingest`]).
    pub fn write_records<W: Write>(&self, mut out: W) -> Result<()> {
        if self.kind != AttributeKind::Name {
            writeln!(out, "{}", serde_json::json!({ "meta": Meta { attribute_kind: self.kind } }))?;
        }
        for rec in self.to_records() {
            serde_json::to_writer(&mut out, &rec)?;
            writeln!(out)?;
        }
        Ok(())
    }

    /// Writes a versioned snapshot: a header line followed by a JSON body.
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{SNAPSHOT_MAGIC} {SNAPSHOT_VERSION}")?;
        let body = SnapshotBody { attribute_kind: self.kind, records: self.to_records() };
        serde_json::to_writer(&mut out, &body)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn read_snapshot<R: BufRead>(mut input: R) -> Result<Dataset> {
        let mut header = String::new();
        input.read_line(&mut header)?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(SNAPSHOT_MAGIC) {
            return Err(Error::InvalidSnapshot("missing header".into()));
        }
        let version: u32 = parts.next().and_then(|v| v.parse().ok()).ok_or_else(|| Error::InvalidSnapshot("missing version".into()))?;
        if version != SNAPSHOT_VERSION {
            return Err(Error::InvalidSnapshot(format!("unsupported version {version}")));
        }
        let body: SnapshotBody = serde_json::from_reader(input)?;
        let mut builder = DatasetBuilder::new(body.attribute_kind);
        for (i, rec) in body.records.into_iter().enumerate() {
            builder.add_record(rec, i + 2)?;
        }
        Ok(builder.build())
    }

    /// Full scan of the bidirectional reference/hyper-edge invariants.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        for (i, r) in self.references.iter().enumerate() {
            for h in &r.hyperedges {
                let edge = self.hyperedges.get(h.index()).ok_or_else(|| format!("{} -> missing edge", r.id))?;
                if !edge.refs.contains(&RefIdx(i as u32)) {
                    return Err(format!("{} lists {} but not vice versa", r.id, edge.id));
                }
            }
        }
        for h in &self.hyperedges {
            if h.refs.is_empty() {
                return Err(format!("{} is empty", h.id));
            }
            let distinct: HashSet<_> = h.refs.iter().collect();
            if distinct.len() != h.refs.len() {
                return Err(format!("{} repeats a reference", h.id));
            }
            for r in &h.refs {
                let eid = self.edge_lookup[&h.id];
                if !self.reference(*r).hyperedges.contains(&eid) {
                    return Err(format!("{} lists {} but not vice versa", h.id, self.reference(*r).id));
                }
            }
        }
        let indexed: usize = self.name_index.iter().map(Vec::len).sum();
        let blocked: usize = self.block_index.values().map(Vec::len).sum();
        if indexed != self.len() || blocked != self.len() {
            return Err("indexes do not cover the reference set exactly".into());
        }
        Ok(())
    }
}

/// Gold entity assignment for every reference of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldLabeling {
    entity_of: Vec<u32>,
    entity_names: Vec<String>,
}

/// Dense entity identifier within a [`GoldLabeling`].
pub type EntityId = u32;

impl GoldLabeling {
    /// Builds a labeling from per-reference entity names (indexed by [`RefIdx`]).
    pub fn from_names<S: AsRef<str>>(labels: &[S]) -> Self {
        let mut lookup: HashMap<&str, u32> = HashMap::new();
        let mut entity_names = Vec::new();
        let mut entity_of = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            let id = *lookup.entry(l).or_insert_with(|| {
                entity_names.push(l.to_owned());
                (entity_names.len() - 1) as u32
            });
            entity_of.push(id);
        }
        GoldLabeling { entity_of, entity_names }
    }

    /// Parses a two-column `ref_id entity_id` file. Must cover every reference exactly once.
    pub fn parse<R: BufRead>(reader: R, ds: &Dataset) -> Result<Self> {
        let mut labels: Vec<Option<String>> = vec![None; ds.len()];
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut cols = trimmed.split_whitespace();
            let (Some(rid), Some(eid), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::InvalidGold(format!("line {}: expected two columns", lineno + 1)));
            };
            let r = ds.resolve_ref(rid)?;
            if labels[r.index()].replace(eid.to_owned()).is_some() {
                return Err(Error::InvalidGold(format!("reference `{rid}` labeled twice")));
            }
        }
        let mut names = Vec::with_capacity(labels.len());
        for (i, l) in labels.into_iter().enumerate() {
            match l {
                Some(l) => names.push(l),
                None => return Err(Error::InvalidGold(format!("reference `{}` has no entity", ds.reference(RefIdx(i as u32)).id))),
            }
        }
        Ok(Self::from_names(&names))
    }

    pub fn parse_path(path: &std::path::Path, ds: &Dataset) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::parse(std::io::BufReader::new(file), ds)
    }

    pub fn write<W: Write>(&self, ds: &Dataset, mut out: W) -> Result<()> {
        for r in ds.ref_ids() {
            writeln!(out, "{} {}", ds.reference(r).id, self.entity_name(self.entity(r)))?;
        }
        Ok(())
    }

    pub fn entity(&self, r: RefIdx) -> EntityId {
        self.entity_of[r.index()]
    }

    pub fn entity_name(&self, e: EntityId) -> &str {
        &self.entity_names[e as usize]
    }

    pub fn num_entities(&self) -> usize {
        self.entity_names.len()
    }

    pub fn len(&self) -> usize {
        self.entity_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entity_of.is_empty()
    }

    /// References of each entity, indexed by [`EntityId`].
    pub fn members(&self) -> Vec<Vec<RefIdx>> {
        let mut out = vec![Vec::new(); self.entity_names.len()];
        for (i, e) in self.entity_of.iter().enumerate() {
            out[*e as usize].push(RefIdx(i as u32));
        }
        out
    }
}

impl fmt::Display for RefIdx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// The four-paper running example used throughout the tests and the README.
pub const RUNNING_EXAMPLE: &str = r#"{"pub_id":"h1","authors":["W. Wang","C. Chen","A. Ansari"],"title":"A mouse immunity model"}
{"pub_id":"h2","authors":["W. Wang","A. Ansari"],"title":"A better mouse immunity model"}
{"pub_id":"h3","authors":["L. Li","C. Chen","W. Wang"],"title":"Measuring protein-bound fluxetine"}
{"pub_id":"h4","authors":["W. W. Wang","A. Ansari"],"title":"Autoimmunity in biliary cirrhosis"}
"#;

/// Gold entities of the running example, in `ref_id entity_id` form.
pub const RUNNING_EXAMPLE_GOLD: &str =
    "r1 wang1\nr2 chen1\nr3 ansari\nr4 wang1\nr5 ansari\nr6 li\nr7 chen2\nr8 wang2\nr9 wang1\nr10 ansari\n";
