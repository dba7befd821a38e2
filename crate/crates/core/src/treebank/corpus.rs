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

//! Native line-delimited corpus format.
//!
//! Each non-empty line is one JSON object:
//!
//! ```text
//! {"doc_id": "wsj_0600", "tokens": ["The", "bank", ...],
//!  "edu_boundaries": [4, 9, 13], "sentence_boundaries": [2, 3],
//!  "paragraph_starts": [0], "tree": "(NS elaboration ...)",
//!  "ndp_labels": ["MainEvent", "Evaluation"]}
//! ```
//!
//! `tree` and `ndp_labels` are optional. A corpus path is either one file or
//! a directory whose `*.jsonl` files are read together.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ndp_corpus::ContentType;

use super::document::Document;
use super::text::{parse_tree_text, serialize_tree};
use super::tree::RelationInventory;
use super::TreebankError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub tokens: Vec<String>,
    pub edu_boundaries: Vec<usize>,
    pub sentence_boundaries: Vec<usize>,
    pub paragraph_starts: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ndp_labels: Option<Vec<String>>,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record{}: {message}", doc_id.as_ref().map(|d| format!(" '{d}'")).unwrap_or_default())]
    Malformed {
        path: PathBuf,
        line: usize,
        doc_id: Option<String>,
        message: String,
    },
    #[error("document '{doc_id}': {source}")]
    Invalid {
        doc_id: String,
        #[source]
        source: TreebankError,
    },
    #[error("document '{doc_id}', sentence {sentence}: unknown content type label '{label}'")]
    UnknownLabel {
        doc_id: String,
        sentence: usize,
        label: String,
    },
    #[error("duplicate doc_id '{0}'")]
    DuplicateDocId(String),
    #[error("no corpus files found under {0}")]
    NoFiles(PathBuf),
}

impl DocumentRecord {
    /// Converts and validates. With `inventory == None` the tree is dropped unparsed.
    pub fn into_document(
        self,
        inventory: Option<&RelationInventory>,
    ) -> Result<Document, CorpusError> {
        let doc_id = self.doc_id.clone();
        let invalid = |source| CorpusError::Invalid {
            doc_id: doc_id.clone(),
            source,
        };
        let mut doc = Document::new(
            self.doc_id.clone(),
            self.tokens,
            self.edu_boundaries,
            self.sentence_boundaries,
            self.paragraph_starts.into_iter().collect(),
        )
        .map_err(invalid)?;
        if doc.n_edus() == 0 {
            return Err(invalid(TreebankError::InvalidDocument {
                doc_id: doc_id.clone(),
                message: "document has no EDUs".into(),
            }));
        }
        if let (Some(text), Some(inventory)) = (self.tree, inventory) {
            let tree = parse_tree_text(&text, doc.n_edus(), inventory).map_err(invalid)?;
            doc = doc.with_tree(tree).map_err(invalid)?;
        }
        if let Some(labels) = self.ndp_labels {
            let parsed = labels
                .iter()
                .enumerate()
                .map(|(s, l)| {
                    l.parse::<ContentType>()
                        .map_err(|_| CorpusError::UnknownLabel {
                            doc_id: doc_id.clone(),
                            sentence: s,
                            label: l.clone(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            doc = doc.with_ndp_labels(parsed).map_err(invalid)?;
        }
        Ok(doc)
    }

    pub fn from_document(doc: &Document) -> Self {
        DocumentRecord {
            doc_id: doc.doc_id().to_string(),
            tokens: doc.tokens().to_vec(),
            edu_boundaries: doc.edu_boundaries().to_vec(),
            sentence_boundaries: doc.sentence_boundaries().to_vec(),
            paragraph_starts: doc.paragraph_starts().iter().copied().collect(),
            tree: doc.gold_tree().map(serialize_tree),
            ndp_labels: doc
                .ndp_labels()
                .map(|ls| ls.iter().map(|l| l.name().to_string()).collect()),
        }
    }
}

fn corpus_files(path: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let io = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let meta = fs::metadata(path).map_err(io)?;
    if meta.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CorpusError::NoFiles(path.to_path_buf()));
    }
    Ok(files)
}

fn read_file(
    path: &Path,
    inventory: Option<&RelationInventory>,
) -> Result<Vec<Document>, CorpusError> {
    let file = fs::File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DocumentRecord = serde_json::from_str(&line).map_err(|e| {
            let doc_id = serde_json::from_str::<serde_json::Value>(&line)
                .ok()
                .and_then(|v| v.get("doc_id").and_then(|d| d.as_str()).map(str::to_string));
            CorpusError::Malformed {
                path: path.to_path_buf(),
                line: i + 1,
                doc_id,
                message: e.to_string(),
            }
        })?;
        docs.push(record.into_document(inventory)?);
    }
    Ok(docs)
}

/// Loads every document under `path`, sorted by `doc_id`.
pub fn load_corpus(
    path: impl AsRef<Path>,
    inventory: &RelationInventory,
) -> Result<Vec<Document>, CorpusError> {
    load_documents(path.as_ref(), Some(inventory))
}

/// Like [`load_corpus`] but ignores any `tree` field.
pub fn load_corpus_without_trees(path: impl AsRef<Path>) -> Result<Vec<Document>, CorpusError> {
    load_documents(path.as_ref(), None)
}

fn load_documents(
    path: &Path,
    inventory: Option<&RelationInventory>,
) -> Result<Vec<Document>, CorpusError> {
    let files = corpus_files(path)?;
    let per_file = files
        .par_iter()
        .map(|f| read_file(f, inventory))
        .collect::<Result<Vec<_>, _>>()?;
    let mut docs: Vec<Document> = per_file.into_iter().flatten().collect();
    docs.sort_by(|a, b| a.doc_id().cmp(b.doc_id()));
    if let Some(w) = docs.windows(2).find(|w| w[0].doc_id() == w[1].doc_id()) {
        return Err(CorpusError::DuplicateDocId(w[0].doc_id().to_string()));
    }
    Ok(docs)
}

/// Writes documents in the native format, one line each, in the given order.
pub fn write_corpus<W: Write>(mut out: W, docs: &[Document]) -> std::io::Result<()> {
    for d in docs {
        let line = serde_json::to_string(&DocumentRecord::from_document(d))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn save_corpus(path: impl AsRef<Path>, docs: &[Document]) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let io = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut buf = Vec::new();
    write_corpus(&mut buf, docs).map_err(io)?;
    fs::write(path, buf).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv() -> RelationInventory {
        RelationInventory::new(["elaboration", "list"]).unwrap()
    }

    fn record(id: &str) -> String {
        format!(
            r#"{{"doc_id":"{id}","tokens":["a","b","c"],"edu_boundaries":[1,2,3],"sentence_boundaries":[1,3],"paragraph_starts":[0],"tree":"(NS elaboration (leaf 1) (NN list (leaf 2) (leaf 3)))"}}"#
        )
    }

    #[test]
    fn directory_of_three_sorted() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("b.jsonl"),
            format!("{}\n{}\n", record("d3"), record("d1")),
        )
        .unwrap();
        fs::write(dir.path().join("a.jsonl"), format!("{}\n", record("d2"))).unwrap();
        fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let docs = load_corpus(dir.path(), &inv()).unwrap();
        let ids: Vec<&str> = docs.iter().map(|d| d.doc_id()).collect();
        assert_eq!(ids, ["d1", "d2", "d3"]);
    }

    #[test]
    fn boundary_mismatch_names_document() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        fs::write(
            &p,
            r#"{"doc_id":"bad","tokens":["a","b"],"edu_boundaries":[1,3],"sentence_boundaries":[2],"paragraph_starts":[0]}"#,
        )
        .unwrap();
        let err = load_corpus(&p, &inv()).unwrap_err();
        assert!(
            matches!(&err, CorpusError::Invalid { doc_id, .. } if doc_id == "bad"),
            "{err}"
        );
    }

    #[test]
    fn tree_leaf_count_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        fs::write(
            &p,
            r#"{"doc_id":"short","tokens":["a","b"],"edu_boundaries":[1,2],"sentence_boundaries":[2],"paragraph_starts":[0],"tree":"(NS elaboration (leaf 1) (NN list (leaf 2) (leaf 3)))"}"#,
        )
        .unwrap();
        let err = load_corpus(&p, &inv()).unwrap_err();
        assert!(
            matches!(
                &err,
                CorpusError::Invalid {
                    source: TreebankError::LeafCountMismatch { .. },
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn malformed_reports_field() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        fs::write(&p, r#"{"doc_id":"x","tokens":["a"]}"#).unwrap();
        let err = load_corpus(&p, &inv()).unwrap_err().to_string();
        assert!(
            err.contains("'x'") && err.contains("edu_boundaries"),
            "{err}"
        );
    }

    #[test]
    fn duplicate_ids_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        fs::write(&p, format!("{}\n{}\n", record("d1"), record("d1"))).unwrap();
        assert!(matches!(
            load_corpus(&p, &inv()),
            Err(CorpusError::DuplicateDocId(_))
        ));
    }

    #[test]
    fn write_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        fs::write(&p, record("d1")).unwrap();
        let docs = load_corpus(&p, &inv()).unwrap();
        let out = dir.path().join("out.jsonl");
        save_corpus(&out, &docs).unwrap();
        assert_eq!(fs::read_to_string(&out).unwrap().trim_end(), record("d1"));
    }
}
