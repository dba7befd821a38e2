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

//! Sentence-labeled news discourse profiling corpora.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::treebank::{load_corpus_without_trees, CorpusError, Document, TreebankError};

/// News content type of a sentence. Codes are the declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ContentType {
    MainEvent,
    Consequence,
    PreviousEvent,
    CurrentContext,
    HistoricalEvent,
    AnecdotalEvent,
    Evaluation,
    Expectation,
}

pub const NUM_CONTENT_TYPES: usize = 8;

const ALL: [ContentType; NUM_CONTENT_TYPES] = [
    ContentType::MainEvent,
    ContentType::Consequence,
    ContentType::PreviousEvent,
    ContentType::CurrentContext,
    ContentType::HistoricalEvent,
    ContentType::AnecdotalEvent,
    ContentType::Evaluation,
    ContentType::Expectation,
];

/// All content types in code order.
pub fn content_types() -> [ContentType; NUM_CONTENT_TYPES] {
    ALL
}

impl ContentType {
    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<ContentType> {
        ALL.get(code).copied()
    }

    /// Canonical spelling used in corpus files.
    pub fn name(self) -> &'static str {
        match self {
            ContentType::MainEvent => "MainEvent",
            ContentType::Consequence => "Consequence",
            ContentType::PreviousEvent => "PreviousEvent",
            ContentType::CurrentContext => "CurrentContext",
            ContentType::HistoricalEvent => "HistoricalEvent",
            ContentType::AnecdotalEvent => "AnecdotalEvent",
            ContentType::Evaluation => "Evaluation",
            ContentType::Expectation => "Expectation",
        }
    }
}

impl fmt::Display for ContentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown content type '{0}'")]
pub struct UnknownContentType(pub String);

impl FromStr for ContentType {
    type Err = UnknownContentType;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL.iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| UnknownContentType(s.to_string()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum NdpCorpusError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("document '{0}' has no ndp_labels")]
    MissingLabels(String),
    #[error("document '{doc_id}' appears in both the {first} and {second} splits")]
    OverlappingSplits {
        doc_id: String,
        first: &'static str,
        second: &'static str,
    },
}

/// Documents with one content type per sentence.
#[derive(Clone, Debug, PartialEq)]
pub struct NdpCorpus {
    documents: Vec<Document>,
}

impl NdpCorpus {
    pub fn new(documents: Vec<Document>) -> Result<Self, NdpCorpusError> {
        for d in &documents {
            match d.ndp_labels() {
                None => return Err(NdpCorpusError::MissingLabels(d.doc_id().to_string())),
                Some(l) if l.len() != d.n_sentences() => {
                    return Err(CorpusError::Invalid {
                        doc_id: d.doc_id().to_string(),
                        source: TreebankError::LabelCountMismatch {
                            doc_id: d.doc_id().to_string(),
                            sentences: d.n_sentences(),
                            labels: l.len(),
                        },
                    }
                    .into())
                }
                Some(_) => {}
            }
        }
        Ok(NdpCorpus { documents })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn sentence_count(&self) -> usize {
        self.documents.iter().map(|d| d.n_sentences()).sum()
    }

    /// Per-type sentence counts in code order.
    pub fn label_histogram(&self) -> [usize; NUM_CONTENT_TYPES] {
        let mut h = [0; NUM_CONTENT_TYPES];
        for d in &self.documents {
            for l in d.ndp_labels().unwrap_or_default() {
                h[l.code()] += 1;
            }
        }
        h
    }
}

/// Loads a labeled corpus; every document must carry `ndp_labels`.
pub fn load_ndp_corpus(path: impl AsRef<Path>) -> Result<NdpCorpus, NdpCorpusError> {
    NdpCorpus::new(load_corpus_without_trees(path)?)
}

/// Train/dev/test splits that share no doc_id.
#[derive(Clone, Debug)]
pub struct NdpSplits {
    pub train: NdpCorpus,
    pub dev: NdpCorpus,
    pub test: NdpCorpus,
}

impl NdpSplits {
    pub fn new(train: NdpCorpus, dev: NdpCorpus, test: NdpCorpus) -> Result<Self, NdpCorpusError> {
        let ids = |c: &NdpCorpus| -> BTreeSet<String> {
            c.documents.iter().map(|d| d.doc_id().to_string()).collect()
        };
        let named = [
            ("train", ids(&train)),
            ("dev", ids(&dev)),
            ("test", ids(&test)),
        ];
        for i in 0..named.len() {
            for j in i + 1..named.len() {
                if let Some(id) = named[i].1.intersection(&named[j].1).next() {
                    return Err(NdpCorpusError::OverlappingSplits {
                        doc_id: id.clone(),
                        first: named[i].0,
                        second: named[j].0,
                    });
                }
            }
        }
        Ok(NdpSplits { train, dev, test })
    }
}
