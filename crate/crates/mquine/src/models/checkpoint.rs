//! Binary checkpoint format.
//!
//! Layout: magic `MQ5E`, format version (u32 LE), model kind tag (u32 LE),
//! d (u32 LE), entity count (u64 LE), relation count (u64 LE), then the
//! entity and relation parameter arrays as little-endian f64 in declared
//! order. A JSON sidecar at `<path>.json` records the hyperparameters and
//! the SHA-256 of both vocabularies so evaluation can refuse a checkpoint
//! that does not match its dataset.

use super::{Hyperparams, ModelKind, ModelState};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 4] = b"MQ5E";
const VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckpointMeta {
    pub model_kind: ModelKind,
    pub dim: usize,
    pub n_entities: usize,
    pub n_relations: usize,
    pub hyperparams: Hyperparams,
    pub entity_vocab_sha256: String,
    pub relation_vocab_sha256: String,
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".json");
    path.with_file_name(name)
}

pub fn save_checkpoint(
    state: &ModelState,
    path: impl AsRef<Path>,
    entity_vocab_sha256: &str,
    relation_vocab_sha256: &str,
) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&state.kind.tag().to_le_bytes())?;
    w.write_all(&(state.dim as u32).to_le_bytes())?;
    w.write_all(&(state.n_entities as u64).to_le_bytes())?;
    w.write_all(&(state.n_relations as u64).to_le_bytes())?;
    for v in state.entity_params.iter().chain(&state.relation_params) {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;

    let meta = CheckpointMeta {
        model_kind: state.kind,
        dim: state.dim,
        n_entities: state.n_entities,
        n_relations: state.n_relations,
        hyperparams: state.hyper,
        entity_vocab_sha256: entity_vocab_sha256.to_string(),
        relation_vocab_sha256: relation_vocab_sha256.to_string(),
    };
    let json = serde_json::to_string_pretty(&meta)?;
    fs::write(sidecar_path(path), json)?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(ModelState, CheckpointMeta)> {
    let path = path.as_ref();
    let meta: CheckpointMeta = serde_json::from_str(
        &fs::read_to_string(sidecar_path(path))
            .map_err(|e| Error::Checkpoint(format!("missing sidecar for {}: {e}", path.display())))?,
    )?;

    let mut r = BufReader::new(
        fs::File::open(path)
            .map_err(|e| Error::Checkpoint(format!("cannot open {}: {e}", path.display())))?,
    );
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint("bad magic bytes".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let kind = ModelKind::from_tag(read_u32(&mut r)?)?;
    let dim = read_u32(&mut r)? as usize;
    let n_entities = read_u64(&mut r)? as usize;
    let n_relations = read_u64(&mut r)? as usize;
    if kind != meta.model_kind || dim != meta.dim {
        return Err(Error::Checkpoint(
            "sidecar disagrees with binary header".into(),
        ));
    }
    let mut entity_params = vec![0.0; n_entities * kind.entity_stride(dim)];
    let mut relation_params = vec![0.0; n_relations * kind.relation_stride(dim)];
    read_f64s(&mut r, &mut entity_params)?;
    read_f64s(&mut r, &mut relation_params)?;
    let state = ModelState {
        kind,
        dim,
        n_entities,
        n_relations,
        entity_params,
        relation_params,
        hyper: meta.hyperparams,
    };
    Ok((state, meta))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64s(r: &mut impl Read, out: &mut [f64]) -> Result<()> {
    let mut b = [0u8; 8];
    for v in out {
        r.read_exact(&mut b)?;
        *v = f64::from_le_bytes(b);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_preserves_state_exactly() {
        let hyper = Hyperparams {
            d: 3,
            ..Hyperparams::default()
        };
        let state = ModelState::init(ModelKind::MQuinE, 5, 2, hyper, 123, 0.1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_checkpoint(&state, &path, "ehash", "rhash").unwrap();
        let (loaded, meta) = load_checkpoint(&path).unwrap();
        assert_eq!(loaded, state);
        assert_eq!(meta.entity_vocab_sha256, "ehash");
        assert_eq!(meta.model_kind, ModelKind::MQuinE);
    }

    #[test]
    fn save_is_byte_stable() {
        let hyper = Hyperparams {
            d: 2,
            ..Hyperparams::default()
        };
        let state = ModelState::init(ModelKind::TransE, 4, 1, hyper, 7, 0.1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (p1, p2) = (dir.path().join("a.ckpt"), dir.path().join("b.ckpt"));
        save_checkpoint(&state, &p1, "x", "y").unwrap();
        save_checkpoint(&state, &p2, "x", "y").unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        assert_eq!(
            fs::read(sidecar_path(&p1)).unwrap(),
            fs::read(sidecar_path(&p2)).unwrap()
        );
    }

    #[test]
    fn corrupt_magic_is_rejected() {
        let hyper = Hyperparams {
            d: 2,
            ..Hyperparams::default()
        };
        let state = ModelState::init(ModelKind::DistMult, 2, 1, hyper, 0, 0.1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ckpt");
        save_checkpoint(&state, &path, "x", "y").unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[0] = b'X';
        fs::write(&path, bytes).unwrap();
        assert!(matches!(load_checkpoint(&path), Err(Error::Checkpoint(_))));
    }
}
