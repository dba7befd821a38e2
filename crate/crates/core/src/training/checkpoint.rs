// Copyright 2026 The c2rnet Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Versioned binary checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! b"C2RNCKPT" | u32 version | u8 kind
//! u32 meta_len | meta_len bytes of "key=value\n" lines, keys sorted
//! u32 n_params | n_params × (u32 name_len | name | u32 rows | u32 cols | rows·cols × f64)
//! ```
//!
//! Parameters keep store order, so save → load → save is byte-identical.

use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ndp_branch::NdpModel;
use crate::nn::{Matrix, ParamStore};
use crate::rst_parser::{C2RNet, FusionMode, LabelInventory};
use crate::treebank::RelationInventory;

use super::{TrainingConfig, TrainingError};

pub const MAGIC: &[u8; 8] = b"C2RNCKPT";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckpointError {
    #[error("not a checkpoint (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(u32),
    #[error("checkpoint is truncated")]
    Truncated,
    #[error("malformed checkpoint: {0}")]
    Malformed(String),
    #[error("expected a {expected} checkpoint, found {found}")]
    WrongKind {
        expected: CheckpointKind,
        found: CheckpointKind,
    },
    #[error("checkpoint metadata lacks '{0}'")]
    MissingMeta(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckpointKind {
    Ndp,
    C2RNet,
}

impl std::fmt::Display for CheckpointKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CheckpointKind::Ndp => "NDP",
            CheckpointKind::C2RNet => "C2RNet",
        })
    }
}

impl CheckpointKind {
    fn code(self) -> u8 {
        match self {
            CheckpointKind::Ndp => 0,
            CheckpointKind::C2RNet => 1,
        }
    }

    fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(CheckpointKind::Ndp),
            1 => Some(CheckpointKind::C2RNet),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub kind: CheckpointKind,
    pub meta: BTreeMap<String, String>,
    pub params: ParamStore,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn unhex(s: &str) -> Option<Vec<u8>> {
    if !s.len().is_multiple_of(2) {
        return None;
    }
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(s.get(i..i + 2)?, 16).ok())
        .collect()
}

fn base_meta(config: &TrainingConfig, epoch: usize, rng: &ChaCha8Rng) -> BTreeMap<String, String> {
    let mut meta: BTreeMap<String, String> = config
        .to_map()
        .into_iter()
        .map(|(k, v)| (format!("config.{k}"), v))
        .collect();
    meta.insert("epoch".into(), epoch.to_string());
    meta.insert("seed".into(), config.seed.to_string());
    meta.insert("rng.seed".into(), hex(&rng.get_seed()));
    meta.insert("rng.stream".into(), rng.get_stream().to_string());
    meta.insert("rng.word_pos".into(), rng.get_word_pos().to_string());
    meta
}

impl Checkpoint {
    pub fn ndp(model: &NdpModel, config: &TrainingConfig, epoch: usize, rng: &ChaCha8Rng) -> Self {
        Checkpoint {
            kind: CheckpointKind::Ndp,
            meta: base_meta(config, epoch, rng),
            params: model.store.clone(),
        }
    }

    pub fn c2rnet(model: &C2RNet, config: &TrainingConfig, epoch: usize, rng: &ChaCha8Rng) -> Self {
        let mut meta = base_meta(config, epoch, rng);
        meta.insert("model.fusion".into(), model.fusion().to_string());
        meta.insert("model.labels".into(), model.labels().to_strings().join(" "));
        meta.insert("model.relations".into(), model.relations.names().join(" "));
        meta.insert("model.dropout".into(), model.dropout.to_string());
        Checkpoint {
            kind: CheckpointKind::C2RNet,
            meta,
            params: model.store.clone(),
        }
    }

    pub fn get(&self, key: &str) -> Result<&str, CheckpointError> {
        self.meta
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| CheckpointError::MissingMeta(key.to_string()))
    }

    fn expect_kind(&self, expected: CheckpointKind) -> Result<(), CheckpointError> {
        if self.kind != expected {
            return Err(CheckpointError::WrongKind {
                expected,
                found: self.kind,
            });
        }
        Ok(())
    }

    pub fn epoch(&self) -> Result<usize, CheckpointError> {
        self.get("epoch")?
            .parse()
            .map_err(|_| CheckpointError::Malformed("epoch".into()))
    }

    /// Training configuration at save time.
    pub fn config(&self) -> Result<TrainingConfig, TrainingError> {
        let mut c = TrainingConfig::default();
        for (k, v) in &self.meta {
            if let Some(key) = k.strip_prefix("config.") {
                c.set(key, v).map_err(CheckpointError::Malformed)?;
            }
        }
        Ok(c)
    }

    /// Random generator state at save time.
    pub fn rng(&self) -> Result<ChaCha8Rng, CheckpointError> {
        let bad = |k: &str| CheckpointError::Malformed(format!("bad {k}"));
        let seed: [u8; 32] = unhex(self.get("rng.seed")?)
            .and_then(|v| v.try_into().ok())
            .ok_or_else(|| bad("rng.seed"))?;
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(
            self.get("rng.stream")?
                .parse()
                .map_err(|_| bad("rng.stream"))?,
        );
        rng.set_word_pos(
            self.get("rng.word_pos")?
                .parse()
                .map_err(|_| bad("rng.word_pos"))?,
        );
        Ok(rng)
    }

    pub fn to_ndp_model(&self) -> Result<NdpModel, TrainingError> {
        self.expect_kind(CheckpointKind::Ndp)?;
        let dropout = self.config()?.dropout;
        Ok(NdpModel::from_store(self.params.clone(), dropout)?)
    }

    pub fn to_c2rnet(&self) -> Result<C2RNet, TrainingError> {
        self.expect_kind(CheckpointKind::C2RNet)?;
        let fusion: FusionMode = self
            .get("model.fusion")?
            .parse()
            .map_err(CheckpointError::Malformed)?;
        let relations = RelationInventory::new(self.get("model.relations")?.split_whitespace())
            .map_err(|e| CheckpointError::Malformed(e.to_string()))?;
        let labels: Vec<&str> = self.get("model.labels")?.split_whitespace().collect();
        let labels = LabelInventory::parse(&labels, &relations)?;
        let dropout: f64 = self
            .get("model.dropout")?
            .parse()
            .map_err(|_| CheckpointError::Malformed("model.dropout".into()))?;
        Ok(C2RNet::from_store(
            self.params.clone(),
            fusion,
            labels,
            relations,
            dropout,
        )?)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.kind.code());
        let meta: String = self
            .meta
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        out.extend_from_slice(&(meta.len() as u32).to_le_bytes());
        out.extend_from_slice(meta.as_bytes());
        out.extend_from_slice(&(self.params.len() as u32).to_le_bytes());
        for (_, name, m) in self.params.iter() {
            out.extend_from_slice(&(name.len() as u32).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
            out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
            for v in m.data() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CheckpointError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(CheckpointError::BadMagic);
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(CheckpointError::UnsupportedVersion(version));
        }
        let kind_code = r.take(1)?[0];
        let kind = CheckpointKind::from_code(kind_code)
            .ok_or_else(|| CheckpointError::Malformed(format!("unknown kind {kind_code}")))?;
        let meta_len = r.u32()? as usize;
        let meta_text = std::str::from_utf8(r.take(meta_len)?)
            .map_err(|_| CheckpointError::Malformed("metadata is not UTF-8".into()))?;
        let mut meta = BTreeMap::new();
        for line in meta_text.lines() {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CheckpointError::Malformed(format!("metadata line '{line}'")))?;
            meta.insert(k.to_string(), v.to_string());
        }
        let n = r.u32()? as usize;
        let mut params = ParamStore::new();
        for _ in 0..n {
            let len = r.u32()? as usize;
            let name = std::str::from_utf8(r.take(len)?)
                .map_err(|_| CheckpointError::Malformed("parameter name is not UTF-8".into()))?
                .to_string();
            let rows = r.u32()? as usize;
            let cols = r.u32()? as usize;
            let raw = r.take(
                rows.checked_mul(cols)
                    .and_then(|x| x.checked_mul(8))
                    .ok_or(CheckpointError::Truncated)?,
            )?;
            let data = raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect();
            if params.id(&name).is_some() {
                return Err(CheckpointError::Malformed(format!(
                    "duplicate parameter '{name}'"
                )));
            }
            params.add(name, Matrix::from_vec(rows, cols, data));
        }
        if r.pos != bytes.len() {
            return Err(CheckpointError::Malformed("trailing bytes".into()));
        }
        Ok(Checkpoint { kind, meta, params })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TrainingError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|source| TrainingError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TrainingError> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|source| TrainingError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Checkpoint::from_bytes(&bytes)?)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        let end = self.pos.checked_add(n).ok_or(CheckpointError::Truncated)?;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or(CheckpointError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    fn sample() -> Checkpoint {
        let model = NdpModel::new(4, 0.5, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        rng.next_u64();
        Checkpoint::ndp(&model, &TrainingConfig::default(), 3, &rng)
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let c = sample();
        let bytes = c.to_bytes();
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_bytes(), bytes);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.ckpt");
        c.save(&p).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), bytes);
        assert_eq!(Checkpoint::load(&p).unwrap(), c);
    }

    #[test]
    fn rng_state_and_config_restore() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        rng.next_u64();
        let c = sample();
        let mut restored = c.rng().unwrap();
        assert_eq!(restored.next_u64(), rng.next_u64());
        assert_eq!(c.config().unwrap(), TrainingConfig::default());
        assert_eq!(c.epoch().unwrap(), 3);
        assert_eq!(
            c.to_ndp_model().unwrap().store,
            NdpModel::new(4, 0.5, 2).store
        );
    }

    #[test]
    fn corrupt_inputs() {
        let bytes = sample().to_bytes();
        assert_eq!(
            Checkpoint::from_bytes(b"nonsense"),
            Err(CheckpointError::BadMagic)
        );
        assert_eq!(
            Checkpoint::from_bytes(&bytes[..bytes.len() - 3]),
            Err(CheckpointError::Truncated)
        );
        let mut v = bytes.clone();
        v[8] = 9;
        assert_eq!(
            Checkpoint::from_bytes(&v),
            Err(CheckpointError::UnsupportedVersion(9))
        );
        assert!(matches!(
            sample().to_c2rnet(),
            Err(TrainingError::Checkpoint(CheckpointError::WrongKind { .. }))
        ));
    }
}
