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

//! Optimization loops, checkpoints, evaluation and probing.

mod checkpoint;
mod config;
mod evaluate;
mod loops;

use std::path::PathBuf;

pub use checkpoint::{Checkpoint, CheckpointError, CheckpointKind};
pub use config::{LabelSet, TrainingConfig};
pub use evaluate::{
    average_scores, embedder_from_config, evaluate, evaluate_checkpoint, ndp_accuracy,
    parse_documents, probe_ndp, EvaluationReport, GoldDecoder, ModelDecoder, TreeDecoder,
};
pub use loops::{
    train_c2rnet, train_c2rnet_with, train_ndp, train_ndp_with, write_run_log, EpochRecord,
    TrainOutcome,
};

use crate::embedding::EmbeddingError;
use crate::metrics::MetricsError;
use crate::ndp_branch::NdpError;
use crate::ndp_corpus::NdpCorpusError;
use crate::rst_parser::RstError;
use crate::treebank::{CorpusError, TreebankError};

#[derive(Debug, thiserror::Error)]
pub enum TrainingError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("document '{0}' has no gold tree")]
    MissingTree(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Treebank(#[from] TreebankError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    NdpCorpus(#[from] NdpCorpusError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Rst(#[from] RstError),
    #[error(transparent)]
    Ndp(#[from] NdpError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
}

impl TrainingError {
    /// True for problems with user-supplied inputs, as opposed to failures
    /// while running.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            TrainingError::Io { .. }
                | TrainingError::Checkpoint(_)
                | TrainingError::Corpus(CorpusError::Io { .. })
                | TrainingError::Embedding(EmbeddingError::Io { .. })
        )
    }
}
