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

//! Token embedding providers shared by both branches.
//!
//! Two sources are supported: a keyed hash embedder that needs no model
//! weights, and a precomputed table of frozen vectors exported from an
//! external language model.
//!
//! # Precomputed file format
//!
//! UTF-8 text. The first line is a header, followed by one record per line:
//!
//! ```text
//! c2rnet-embeddings v1 dim=<dim> count=<records>
//! <doc_id>\t<token_index>\t<v0> <v1> ... <v{dim-1}>
//! ```
//!
//! Values are decimal floats; every record must carry exactly `dim` values.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::nn::Matrix;
use crate::treebank::Document;

pub const EMBEDDING_FILE_MAGIC: &str = "c2rnet-embeddings";
pub const EMBEDDING_FILE_VERSION: &str = "v1";

#[derive(Debug, thiserror::Error)]
pub enum EmbeddingError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: record has dimension {found}, header declares {expected}")]
    DimensionMismatch {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("no embedding for token {token_index} of document '{doc_id}'")]
    MissingEmbedding { doc_id: String, token_index: usize },
    #[error("document '{0}' has no tokens")]
    EmptyDocument(String),
    #[error("embedding dimension must be at least 1")]
    ZeroDimension,
}

/// Source of per-token vectors. Lookups are pure.
pub trait EmbeddingProvider: Send + Sync {
    fn dim(&self) -> usize;

    fn embed_token(
        &self,
        doc_id: &str,
        token_index: usize,
        token: &str,
    ) -> Result<Vec<f64>, EmbeddingError>;
}

/// Deterministic hash embedding with entries uniform in `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HashEmbedder {
    dim: usize,
    seed: u64,
}

impl HashEmbedder {
    pub fn new(dim: usize, seed: u64) -> Result<Self, EmbeddingError> {
        if dim == 0 {
            return Err(EmbeddingError::ZeroDimension);
        }
        Ok(HashEmbedder { dim, seed })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Vector for `token`: entry `i` is a keyed 64-bit hash of `(token, i, seed)`
/// mapped linearly onto `[-1, 1]`.
pub fn hash_embed(token: &str, dim: usize, seed: u64) -> Vec<f64> {
    let token_hash = fnv1a(token.as_bytes());
    let keyed = splitmix64(token_hash ^ splitmix64(seed));
    (0..dim as u64)
        .map(|i| {
            let h = splitmix64(keyed ^ splitmix64(i.wrapping_add(0x632b_e59b_d9b4_e019)));
            // 53 high bits -> [0, 1], then onto [-1, 1]
            let unit = (h >> 11) as f64 / ((1u64 << 53) - 1) as f64;
            2.0 * unit - 1.0
        })
        .collect()
}

impl EmbeddingProvider for HashEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed_token(
        &self,
        _doc_id: &str,
        _token_index: usize,
        token: &str,
    ) -> Result<Vec<f64>, EmbeddingError> {
        Ok(hash_embed(token, self.dim, self.seed))
    }
}

/// Frozen vectors keyed by `(doc_id, token_index)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecomputedEmbeddings {
    dim: usize,
    table: HashMap<(String, usize), Vec<f64>>,
}

impl PrecomputedEmbeddings {
    pub fn new(dim: usize) -> Result<Self, EmbeddingError> {
        if dim == 0 {
            return Err(EmbeddingError::ZeroDimension);
        }
        Ok(PrecomputedEmbeddings {
            dim,
            table: HashMap::new(),
        })
    }

    /// Panics if `vector.len() != dim`.
    pub fn insert(&mut self, doc_id: impl Into<String>, token_index: usize, vector: Vec<f64>) {
        assert_eq!(vector.len(), self.dim, "vector dimension mismatch");
        self.table.insert((doc_id.into(), token_index), vector);
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Serializes in the documented text format with records sorted by key.
    pub fn to_text(&self) -> String {
        let mut keys: Vec<&(String, usize)> = self.table.keys().collect();
        keys.sort();
        let mut out = format!(
            "{EMBEDDING_FILE_MAGIC} {EMBEDDING_FILE_VERSION} dim={} count={}\n",
            self.dim,
            keys.len()
        );
        for key in keys {
            let values: Vec<String> = self.table[key].iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{}\t{}\t{}\n", key.0, key.1, values.join(" ")));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EmbeddingError> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|source| EmbeddingError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

impl EmbeddingProvider for PrecomputedEmbeddings {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed_token(
        &self,
        doc_id: &str,
        token_index: usize,
        _token: &str,
    ) -> Result<Vec<f64>, EmbeddingError> {
        self.table
            .get(&(doc_id.to_string(), token_index))
            .cloned()
            .ok_or_else(|| EmbeddingError::MissingEmbedding {
                doc_id: doc_id.to_string(),
                token_index,
            })
    }
}

/// Reads a precomputed embedding file.
pub fn load_precomputed(path: impl AsRef<Path>) -> Result<PrecomputedEmbeddings, EmbeddingError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| EmbeddingError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format = |line: usize, message: String| EmbeddingError::Format {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| format(1, "empty file".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != EMBEDDING_FILE_MAGIC {
        return Err(format(1, format!("bad header '{header}'")));
    }
    if parts[1] != EMBEDDING_FILE_VERSION {
        return Err(format(1, format!("unsupported version '{}'", parts[1])));
    }
    let field = |p: &str, key: &str| -> Result<usize, EmbeddingError> {
        p.strip_prefix(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| format(1, format!("expected {key}<integer>, found '{p}'")))
    };
    let dim = field(parts[2], "dim=")?;
    let count = field(parts[3], "count=")?;
    let mut table = PrecomputedEmbeddings::new(dim)?;
    let mut seen = 0;
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.splitn(3, '\t');
        let (Some(doc_id), Some(index), Some(values)) = (cols.next(), cols.next(), cols.next())
        else {
            return Err(format(
                lineno,
                "expected doc_id<TAB>token_index<TAB>values".into(),
            ));
        };
        let index: usize = index
            .parse()
            .map_err(|_| format(lineno, format!("invalid token index '{index}'")))?;
        let vector = values
            .split_whitespace()
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| format(lineno, format!("invalid value: {e}")))?;
        if vector.len() != dim {
            return Err(EmbeddingError::DimensionMismatch {
                path: path.to_path_buf(),
                line: lineno,
                expected: dim,
                found: vector.len(),
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(format(lineno, "non-finite value".into()));
        }
        table.insert(doc_id, index, vector);
        seen += 1;
    }
    if seen != count {
        return Err(format(
            1,
            format!("header declares {count} records, found {seen}"),
        ));
    }
    Ok(table)
}

/// `n_tokens × dim` matrix whose row `t` is the vector of token `t`.
pub fn embed_document(
    doc: &Document,
    provider: &dyn EmbeddingProvider,
) -> Result<Matrix, EmbeddingError> {
    if doc.n_tokens() == 0 {
        return Err(EmbeddingError::EmptyDocument(doc.doc_id().to_string()));
    }
    let dim = provider.dim();
    let mut data = Vec::with_capacity(doc.n_tokens() * dim);
    for (t, token) in doc.tokens().iter().enumerate() {
        let v = provider.embed_token(doc.doc_id(), t, token)?;
        debug_assert_eq!(v.len(), dim);
        data.extend(v);
    }
    Ok(Matrix::from_vec(doc.n_tokens(), dim, data))
}
