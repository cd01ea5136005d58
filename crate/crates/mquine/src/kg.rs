//! Triple datasets: vocabularies, splits, and adjacency indexes.
//!
//! The observed set used for sampling and Z-statistics is always the train
//! split; the valid/test splits only participate in evaluation (and, under
//! the all-splits filter, in candidate exclusion).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub type EntityId = u32;
pub type RelationId = u32;

/// A (head, relation, tail) fact with dense vocabulary ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub h: EntityId,
    pub r: RelationId,
    pub t: EntityId,
}

impl Triple {
    pub fn new(h: EntityId, r: RelationId, t: EntityId) -> Self {
        Triple { h, r, t }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.h, self.r, self.t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

/// A bijective name ↔ dense-id map. Ids are assigned in first-appearance
/// order, which keeps checkpoints reproducible across loads.
#[derive(Clone, Debug, Default)]
pub struct Vocab {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocab {
    pub fn new() -> Self {
        Vocab::default()
    }

    /// Returns the id for `name`, inserting it if unseen.
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// SHA-256 over the newline-terminated name list; used to bind
    /// checkpoints to the dataset they were trained on.
    pub fn sha256(&self) -> String {
        let mut hasher = Sha256::new();
        for name in &self.names {
            hasher.update(name.as_bytes());
            hasher.update(b"\n");
        }
        hex_string(&hasher.finalize())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Per-split counts of duplicate lines dropped at load time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadStats {
    pub duplicates: [usize; 3],
}

impl LoadStats {
    pub fn total_duplicates(&self) -> usize {
        self.duplicates.iter().sum()
    }
}

type AdjIndex = HashMap<(u32, u32), Vec<u32>>;

/// An immutable triple store with the adjacency indexes needed by sampling,
/// Z-statistics, and filtered ranking.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeGraph {
    pub entities: Vocab,
    pub relations: Vocab,
    pub train: Vec<Triple>,
    pub valid: Vec<Triple>,
    pub test: Vec<Triple>,
    pub stats: LoadStats,
    /// (h, r) → sorted tails, train split only.
    by_hr: AdjIndex,
    /// (r, t) → sorted heads, train split only.
    by_rt: AdjIndex,
    /// Same indexes over train ∪ valid ∪ test, for all-splits filtering.
    by_hr_all: AdjIndex,
    by_rt_all: AdjIndex,
    /// relation → sorted entities with at least one outgoing train edge.
    heads_by_rel: Vec<Vec<EntityId>>,
}

impl KnowledgeGraph {
    /// Loads `train.txt`, `valid.txt`, `test.txt` from `dir`. Lines are
    /// `head<TAB>relation<TAB>tail`. If `entities.dict` / `relations.dict`
    /// (`id<TAB>name`) are present they fix the vocabularies; otherwise ids
    /// are assigned by first appearance scanning train, then valid, then test.
    pub fn load(dir: impl AsRef<Path>) -> Result<KnowledgeGraph> {
        let dir = dir.as_ref();
        let mut entities = match read_dict(&dir.join("entities.dict"))? {
            Some(v) => v,
            None => Vocab::new(),
        };
        let mut relations = match read_dict(&dir.join("relations.dict"))? {
            Some(v) => v,
            None => Vocab::new(),
        };
        let fixed_entities = !entities.is_empty();
        let fixed_relations = !relations.is_empty();

        let mut splits: [Vec<Triple>; 3] = Default::default();
        let mut stats = LoadStats::default();
        for (idx, split) in [Split::Train, Split::Valid, Split::Test].iter().enumerate() {
            let path = dir.join(format!("{}.txt", split.name()));
            if !path.exists() {
                return Err(Error::MissingFile(path));
            }
            let file_name = path.display().to_string();
            let reader = BufReader::new(fs::File::open(&path)?);
            let mut seen = HashSet::new();
            for (lineno, line) in reader.lines().enumerate() {
                let line = line?;
                if line.is_empty() {
                    continue;
                }
                let mut fields = line.split('\t');
                let (h, r, t) = match (fields.next(), fields.next(), fields.next(), fields.next())
                {
                    (Some(h), Some(r), Some(t), None) => (h, r, t),
                    _ => {
                        return Err(Error::MalformedLine {
                            file: file_name.clone(),
                            line: lineno + 1,
                        })
                    }
                };
                let h = intern_checked(&mut entities, fixed_entities, h, &file_name, lineno + 1)?;
                let r = intern_checked(&mut relations, fixed_relations, r, &file_name, lineno + 1)?;
                let t = intern_checked(&mut entities, fixed_entities, t, &file_name, lineno + 1)?;
                let triple = Triple::new(h, r, t);
                if seen.insert(triple) {
                    splits[idx].push(triple);
                } else {
                    stats.duplicates[idx] += 1;
                }
            }
        }
        let [train, valid, test] = splits;
        let mut kg = KnowledgeGraph::from_parts(entities, relations, train, valid, test);
        kg.stats = stats;
        Ok(kg)
    }

    /// Assembles a graph from already-interned triples and builds the indexes.
    pub fn from_parts(
        entities: Vocab,
        relations: Vocab,
        train: Vec<Triple>,
        valid: Vec<Triple>,
        test: Vec<Triple>,
    ) -> KnowledgeGraph {
        let mut by_hr: AdjIndex = HashMap::new();
        let mut by_rt: AdjIndex = HashMap::new();
        let mut by_hr_all: AdjIndex = HashMap::new();
        let mut by_rt_all: AdjIndex = HashMap::new();
        for t in &train {
            by_hr.entry((t.h, t.r)).or_default().push(t.t);
            by_rt.entry((t.r, t.t)).or_default().push(t.h);
        }
        for t in train.iter().chain(&valid).chain(&test) {
            by_hr_all.entry((t.h, t.r)).or_default().push(t.t);
            by_rt_all.entry((t.r, t.t)).or_default().push(t.h);
        }
        for index in [&mut by_hr, &mut by_rt, &mut by_hr_all, &mut by_rt_all] {
            for v in index.values_mut() {
                v.sort_unstable();
                v.dedup();
            }
        }
        let mut heads_by_rel = vec![Vec::new(); relations.len()];
        for &(h, r) in by_hr.keys() {
            heads_by_rel[r as usize].push(h);
        }
        for v in &mut heads_by_rel {
            v.sort_unstable();
        }
        KnowledgeGraph {
            entities,
            relations,
            train,
            valid,
            test,
            stats: LoadStats::default(),
            by_hr,
            by_rt,
            by_hr_all,
            by_rt_all,
            heads_by_rel,
        }
    }

    /// Writes `train.txt`, `valid.txt`, `test.txt` under `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        for (split, triples) in [
            (Split::Train, &self.train),
            (Split::Valid, &self.valid),
            (Split::Test, &self.test),
        ] {
            let mut f = fs::File::create(dir.join(format!("{}.txt", split.name())))?;
            for t in triples {
                writeln!(
                    f,
                    "{}\t{}\t{}",
                    self.entities.name(t.h),
                    self.relations.name(t.r),
                    self.entities.name(t.t)
                )?;
            }
        }
        Ok(())
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn split(&self, split: Split) -> &[Triple] {
        match split {
            Split::Train => &self.train,
            Split::Valid => &self.valid,
            Split::Test => &self.test,
        }
    }

    fn check_entity(&self, e: EntityId) {
        assert!(
            (e as usize) < self.entities.len(),
            "entity id {e} out of range (|E| = {})",
            self.entities.len()
        );
    }

    fn check_relation(&self, r: RelationId) {
        assert!(
            (r as usize) < self.relations.len(),
            "relation id {r} out of range (|R| = {})",
            self.relations.len()
        );
    }

    /// True iff (h, r, t) is in the train split (the observed set 𝒪).
    pub fn observed(&self, h: EntityId, r: RelationId, t: EntityId) -> bool {
        self.by_hr
            .get(&(h, r))
            .is_some_and(|tails| tails.binary_search(&t).is_ok())
    }

    /// Sorted tails t with (e, r, t) observed in train.
    pub fn neighbors_out(&self, e: EntityId, r: RelationId) -> &[EntityId] {
        self.check_entity(e);
        self.check_relation(r);
        self.by_hr.get(&(e, r)).map_or(&[], Vec::as_slice)
    }

    /// Sorted heads h with (h, r, e) observed in train.
    pub fn neighbors_in(&self, e: EntityId, r: RelationId) -> &[EntityId] {
        self.check_entity(e);
        self.check_relation(r);
        self.by_rt.get(&(r, e)).map_or(&[], Vec::as_slice)
    }

    /// Tails observed for (h, r) across all three splits.
    pub fn tails_all_splits(&self, h: EntityId, r: RelationId) -> &[EntityId] {
        self.by_hr_all.get(&(h, r)).map_or(&[], Vec::as_slice)
    }

    /// Heads observed for (r, t) across all three splits.
    pub fn heads_all_splits(&self, r: RelationId, t: EntityId) -> &[EntityId] {
        self.by_rt_all.get(&(r, t)).map_or(&[], Vec::as_slice)
    }

    /// Sorted entities with at least one outgoing train edge under `r`.
    pub fn heads_of_relation(&self, r: RelationId) -> &[EntityId] {
        self.check_relation(r);
        &self.heads_by_rel[r as usize]
    }

    /// The complement 𝓔 \ by_hr[(h, r)]: every entity that is not a
    /// train-observed tail for the query.
    pub fn unobserved_tails(&self, h: EntityId, r: RelationId) -> Vec<EntityId> {
        let observed = self.neighbors_out(h, r);
        complement(self.num_entities(), observed)
    }

    /// The complement 𝓔 \ by_rt[(r, t)] on the head side.
    pub fn unobserved_heads(&self, r: RelationId, t: EntityId) -> Vec<EntityId> {
        let observed = self.neighbors_in(t, r);
        complement(self.num_entities(), observed)
    }
}

/// All ids in [0, n) absent from the sorted slice `observed`.
fn complement(n: usize, observed: &[EntityId]) -> Vec<EntityId> {
    let mut out = Vec::with_capacity(n - observed.len());
    let mut it = observed.iter().copied().peekable();
    for e in 0..n as EntityId {
        if it.peek() == Some(&e) {
            it.next();
        } else {
            out.push(e);
        }
    }
    out
}

fn intern_checked(
    vocab: &mut Vocab,
    fixed: bool,
    name: &str,
    file: &str,
    line: usize,
) -> Result<u32> {
    if fixed {
        vocab.id(name).ok_or_else(|| Error::MalformedDict {
            file: file.to_string(),
            line,
            msg: format!("name {name:?} not present in the dictionary file"),
        })
    } else {
        Ok(vocab.intern(name))
    }
}

/// Reads an `id<TAB>name` dictionary if the file exists. Ids must be exactly
/// 0..n-1 (any order in the file).
fn read_dict(path: &Path) -> Result<Option<Vocab>> {
    if !path.exists() {
        return Ok(None);
    }
    let file_name = path.display().to_string();
    let reader = BufReader::new(fs::File::open(path)?);
    let mut pairs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (id, name) = match (fields.next(), fields.next(), fields.next()) {
            (Some(id), Some(name), None) => (id, name),
            _ => {
                return Err(Error::MalformedDict {
                    file: file_name,
                    line: lineno + 1,
                    msg: "expected id<TAB>name".to_string(),
                })
            }
        };
        let id: usize = id.parse().map_err(|_| Error::MalformedDict {
            file: file_name.clone(),
            line: lineno + 1,
            msg: format!("bad id {id:?}"),
        })?;
        pairs.push((id, name.to_string()));
    }
    pairs.sort();
    let mut vocab = Vocab::new();
    for (expect, (id, name)) in pairs.iter().enumerate() {
        if *id != expect {
            return Err(Error::MalformedDict {
                file: file_name,
                line: 0,
                msg: format!("ids are not dense: expected {expect}, found {id}"),
            });
        }
        vocab.intern(name);
    }
    Ok(Some(vocab))
}

/// Convenience constructor for tests and synthetic experiments.
#[derive(Default)]
pub struct GraphBuilder {
    entities: Vocab,
    relations: Vocab,
    train: Vec<Triple>,
    valid: Vec<Triple>,
    test: Vec<Triple>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        GraphBuilder::default()
    }

    pub fn entity(&mut self, name: &str) -> EntityId {
        self.entities.intern(name)
    }

    pub fn relation(&mut self, name: &str) -> RelationId {
        self.relations.intern(name)
    }

    pub fn add(&mut self, split: Split, h: &str, r: &str, t: &str) -> Triple {
        let triple = Triple::new(
            self.entities.intern(h),
            self.relations.intern(r),
            self.entities.intern(t),
        );
        match split {
            Split::Train => self.train.push(triple),
            Split::Valid => self.valid.push(triple),
            Split::Test => self.test.push(triple),
        }
        triple
    }

    pub fn train(&mut self, h: &str, r: &str, t: &str) -> Triple {
        self.add(Split::Train, h, r, t)
    }

    pub fn add_ids(&mut self, split: Split, triple: Triple) {
        match split {
            Split::Train => self.train.push(triple),
            Split::Valid => self.valid.push(triple),
            Split::Test => self.test.push(triple),
        }
    }

    pub fn build(self) -> KnowledgeGraph {
        KnowledgeGraph::from_parts(
            self.entities,
            self.relations,
            self.train,
            self.valid,
            self.test,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_dataset(dir: &Path, train: &str, valid: &str, test: &str) {
        for (name, body) in [("train.txt", train), ("valid.txt", valid), ("test.txt", test)] {
            let mut f = fs::File::create(dir.join(name)).unwrap();
            f.write_all(body.as_bytes()).unwrap();
        }
    }

    #[test]
    fn empty_files_load_to_empty_graph() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(dir.path(), "", "", "");
        let kg = KnowledgeGraph::load(dir.path()).unwrap();
        assert_eq!(kg.num_entities(), 0);
        assert_eq!(kg.num_relations(), 0);
        assert!(kg.train.is_empty() && kg.valid.is_empty() && kg.test.is_empty());
    }

    #[test]
    fn small_train_file_builds_expected_indexes() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(dir.path(), "a\tr\tb\nc\tr\tb\nc\tr\td\n", "", "");
        let kg = KnowledgeGraph::load(dir.path()).unwrap();
        assert_eq!(kg.num_entities(), 4);
        assert_eq!(kg.num_relations(), 1);
        assert_eq!(kg.train.len(), 3);
        let c = kg.entities.id("c").unwrap();
        let r = kg.relations.id("r").unwrap();
        let b = kg.entities.id("b").unwrap();
        let d = kg.entities.id("d").unwrap();
        assert_eq!(kg.neighbors_out(c, r), &[b, d]);
        assert_eq!(kg.neighbors_in(b, r), &[kg.entities.id("a").unwrap(), c]);
    }

    #[test]
    fn duplicate_lines_are_dropped_with_a_count() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(dir.path(), "a\tr\tb\na\tr\tb\n", "", "");
        let kg = KnowledgeGraph::load(dir.path()).unwrap();
        assert_eq!(kg.train.len(), 1);
        assert_eq!(kg.stats.duplicates, [1, 0, 0]);
    }

    #[test]
    fn malformed_line_reports_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(dir.path(), "a\tr\tb\nbroken line\n", "", "");
        let err = KnowledgeGraph::load(dir.path()).unwrap_err();
        match err {
            Error::MalformedLine { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn missing_file_is_fatal() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(dir.path(), "", "", "");
        fs::remove_file(dir.path().join("valid.txt")).unwrap();
        assert!(matches!(
            KnowledgeGraph::load(dir.path()),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn entities_only_in_eval_splits_are_retained() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(dir.path(), "a\tr\tb\n", "a\tr\tc\n", "d\tr\tb\n");
        let kg = KnowledgeGraph::load(dir.path()).unwrap();
        assert_eq!(kg.num_entities(), 4);
        // Unseen-in-train entities index nothing but remain legal candidates.
        let c = kg.entities.id("c").unwrap();
        let r = kg.relations.id("r").unwrap();
        assert!(kg.neighbors_out(c, r).is_empty());
    }

    #[test]
    fn unobserved_tails_is_exact_complement() {
        let mut b = GraphBuilder::new();
        for name in ["a", "b", "c", "d"] {
            b.entity(name);
        }
        b.train("a", "r", "b");
        b.train("a", "r", "c");
        let kg = b.build();
        let a = kg.entities.id("a").unwrap();
        let r = kg.relations.id("r").unwrap();
        let expect = vec![a, kg.entities.id("d").unwrap()];
        assert_eq!(kg.unobserved_tails(a, r), expect);
        // No observed tails → every entity.
        let c = kg.entities.id("c").unwrap();
        assert_eq!(kg.unobserved_tails(c, r).len(), kg.num_entities());
    }

    #[test]
    fn dict_files_fix_id_assignment() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(dir.path(), "a\tr\tb\n", "", "");
        fs::write(dir.path().join("entities.dict"), "0\tb\n1\ta\n").unwrap();
        fs::write(dir.path().join("relations.dict"), "0\tr\n").unwrap();
        let kg = KnowledgeGraph::load(dir.path()).unwrap();
        assert_eq!(kg.entities.id("b"), Some(0));
        assert_eq!(kg.entities.id("a"), Some(1));
    }

    #[test]
    fn roundtrip_through_files_preserves_graph() {
        let mut b = GraphBuilder::new();
        b.train("a", "r", "b");
        b.train("c", "r", "b");
        b.add(Split::Valid, "a", "r", "c");
        b.add(Split::Test, "c", "s", "a");
        let kg = b.build();
        let dir = tempfile::tempdir().unwrap();
        kg.write_dir(dir.path()).unwrap();
        let re = KnowledgeGraph::load(dir.path()).unwrap();
        assert_eq!(re.entities.names(), kg.entities.names());
        assert_eq!(re.relations.names(), kg.relations.names());
        assert_eq!(re.train, kg.train);
        assert_eq!(re.valid, kg.valid);
        assert_eq!(re.test, kg.test);
    }
}
