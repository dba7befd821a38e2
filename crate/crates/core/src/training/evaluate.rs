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

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::analysis::{
    default_groups, span_group_accuracy, threshold_table, Basis, SpanGroupReport, ThresholdReport,
    DEFAULT_THRESHOLDS,
};
use crate::embedding::{embed_document, load_precomputed, EmbeddingProvider, HashEmbedder};
use crate::metrics::{average, score_both, ParsevalScore};
use crate::ndp_branch::{NdpBranch, NdpModel};
use crate::ndp_corpus::NdpCorpus;
use crate::nn::ParamStore;
use crate::rst_parser::C2RNet;
use crate::treebank::{Document, RstTree};

use super::loops::accuracy_on;
use super::{Checkpoint, TrainingConfig, TrainingError};

/// Produces one tree per document.
pub trait TreeDecoder: Sync {
    fn decode(&self, doc: &Document) -> Result<RstTree, TrainingError>;
}

/// Greedy decoding with a trained model.
pub struct ModelDecoder<'a> {
    pub model: &'a C2RNet,
    pub embedder: &'a dyn EmbeddingProvider,
}

impl TreeDecoder for ModelDecoder<'_> {
    fn decode(&self, doc: &Document) -> Result<RstTree, TrainingError> {
        let tokens = embed_document(doc, self.embedder)?;
        Ok(self.model.decode(doc, &tokens)?)
    }
}

/// Returns each document's gold tree.
pub struct GoldDecoder;

impl TreeDecoder for GoldDecoder {
    fn decode(&self, doc: &Document) -> Result<RstTree, TrainingError> {
        doc.gold_tree()
            .cloned()
            .ok_or_else(|| TrainingError::MissingTree(doc.doc_id().to_string()))
    }
}

/// Copies of `docs` carrying decoded trees, in input order.
pub fn parse_documents(
    decoder: &dyn TreeDecoder,
    docs: &[Document],
) -> Result<Vec<Document>, TrainingError> {
    docs.par_iter()
        .map(|d| Ok(d.clone().with_tree(decoder.decode(d)?)?))
        .collect()
}

/// Scores under both conventions with span-length breakdowns.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationReport {
    pub orig: ParsevalScore,
    pub rst: ParsevalScore,
    pub groups: SpanGroupReport,
    pub thresholds: ThresholdReport,
}

fn tree_map(docs: &[Document]) -> Result<BTreeMap<String, RstTree>, TrainingError> {
    docs.iter()
        .map(|d| {
            let t = d
                .gold_tree()
                .ok_or_else(|| TrainingError::MissingTree(d.doc_id().to_string()))?;
            Ok((d.doc_id().to_string(), t.clone()))
        })
        .collect()
}

/// Decodes every document of `docs` and scores it against its gold tree.
pub fn evaluate(
    decoder: &dyn TreeDecoder,
    docs: &[Document],
) -> Result<EvaluationReport, TrainingError> {
    let gold = tree_map(docs)?;
    let pred = tree_map(&parse_documents(decoder, docs)?)?;
    let [orig, rst] = score_both(&pred, &gold)?;
    Ok(EvaluationReport {
        orig,
        rst,
        groups: span_group_accuracy(&pred, &gold, &default_groups(), Basis::Gold)?,
        thresholds: threshold_table(&pred, &gold, &DEFAULT_THRESHOLDS, Basis::Gold)?,
    })
}

pub fn evaluate_checkpoint(
    checkpoint: &Checkpoint,
    docs: &[Document],
    embedder: &dyn EmbeddingProvider,
) -> Result<EvaluationReport, TrainingError> {
    let model = checkpoint.to_c2rnet()?;
    let width = model.config().dims.token_dim;
    if width != embedder.dim() {
        return Err(TrainingError::ShapeMismatch(format!(
            "checkpoint expects {width}-dimensional tokens, embedder gives {}",
            embedder.dim()
        )));
    }
    evaluate(
        &ModelDecoder {
            model: &model,
            embedder,
        },
        docs,
    )
}

/// Column means across runs: `[original, rst]`.
pub fn average_scores(reports: &[EvaluationReport]) -> Option<[[f64; 4]; 2]> {
    let orig: Vec<[f64; 4]> = reports.iter().map(|r| r.orig.values()).collect();
    let rst: Vec<[f64; 4]> = reports.iter().map(|r| r.rst.values()).collect();
    Some([average(&orig)?, average(&rst)?])
}

/// Sentence accuracy in percent.
pub fn ndp_accuracy(
    model: &NdpModel,
    corpus: &NdpCorpus,
    embedder: &dyn EmbeddingProvider,
) -> Result<f64, TrainingError> {
    let docs = corpus.documents();
    let tokens = docs
        .par_iter()
        .map(|d| embed_document(d, embedder))
        .collect::<Result<Vec<_>, _>>()?;
    accuracy_on(model, docs, &tokens)
}

/// Accuracy of the C2RNet NDP body paired with the original classifier head.
pub fn probe_ndp(
    c2rnet: &Checkpoint,
    original: &Checkpoint,
    corpus: &NdpCorpus,
    embedder: &dyn EmbeddingProvider,
) -> Result<f64, TrainingError> {
    let body_source = c2rnet.to_c2rnet()?;
    if body_source.ndp.is_none() {
        return Err(TrainingError::Config(format!(
            "fusion mode {} has no NDP branch to probe",
            body_source.fusion()
        )));
    }
    let head_source = original.to_ndp_model()?;
    let mut store = ParamStore::new();
    for name in NdpBranch::body_names() {
        store.add(&name, take(&body_source.store, &name)?);
    }
    let body_dim = store
        .get(store.id(&NdpBranch::body_names()[0]).expect("just added"))
        .cols();
    for name in NdpBranch::head_names() {
        store.add(&name, take(&head_source.store, &name)?);
    }
    let head_dim = head_source.dim();
    if body_dim != head_dim {
        return Err(TrainingError::ShapeMismatch(format!(
            "NDP body has dimension {body_dim}, original head expects {head_dim}"
        )));
    }
    let probe = NdpModel::from_store(store, 0.0)?;
    ndp_accuracy(&probe, corpus, embedder)
}

fn take(store: &ParamStore, name: &str) -> Result<crate::nn::Matrix, TrainingError> {
    store
        .id(name)
        .map(|id| store.get(id).clone())
        .ok_or_else(|| TrainingError::ShapeMismatch(format!("parameter '{name}' is missing")))
}

/// Hash embeddings, or the precomputed vectors named by the config.
pub fn embedder_from_config(
    config: &TrainingConfig,
) -> Result<Box<dyn EmbeddingProvider>, TrainingError> {
    match &config.embeddings_file {
        None => Ok(Box::new(HashEmbedder::new(
            config.embedding_dim,
            config.embedding_seed,
        )?)),
        Some(path) => {
            let e = load_precomputed(path)?;
            if e.dim() != config.embedding_dim {
                return Err(TrainingError::Config(format!(
                    "{} holds {}-dimensional vectors, config says embedding_dim = {}",
                    path.display(),
                    e.dim(),
                    config.embedding_dim
                )));
            }
            Ok(Box::new(e))
        }
    }
}
