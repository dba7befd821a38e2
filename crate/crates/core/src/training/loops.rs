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
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::embedding::{embed_document, EmbeddingProvider};
use crate::metrics::score;
use crate::ndp_branch::{Granularity, NdpModel};
use crate::ndp_corpus::NdpCorpus;
use crate::nn::{Adam, Gradients, Graph, Matrix, ParamId, ParamStore};
use crate::rst_parser::{C2RNet, LabelInventory, ModelConfig};
use crate::treebank::{Convention, Document, RstTree};

use super::{Checkpoint, CheckpointKind, LabelSet, TrainingConfig, TrainingError};

/// One line of the run log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpochRecord {
    pub phase: &'static str,
    pub epoch: usize,
    /// Mean per-document training loss.
    pub loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_full_f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ndp_frozen: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    pub log: Vec<EpochRecord>,
}

/// Writes records as JSON lines.
pub fn write_run_log<W: Write>(mut out: W, log: &[EpochRecord]) -> std::io::Result<()> {
    for r in log {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    Ok(())
}

/// Generator for shuffling and dropout, independent of initialization.
fn training_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

fn embed_all(
    docs: &[Document],
    embedder: &dyn EmbeddingProvider,
) -> Result<Vec<Matrix>, TrainingError> {
    Ok(docs
        .par_iter()
        .map(|d| embed_document(d, embedder))
        .collect::<Result<Vec<_>, _>>()?)
}

/// One pass over `order` in batches; returns the mean loss.
fn run_epoch(
    store: &mut ParamStore,
    adam: &mut Adam,
    rng: &mut ChaCha8Rng,
    order: &[usize],
    batch_size: usize,
    trainable: &dyn Fn(ParamId) -> bool,
    loss_fn: &dyn Fn(&mut Graph, usize) -> Result<crate::nn::Var, TrainingError>,
) -> Result<f64, TrainingError> {
    let mut total = 0.0;
    for batch in order.chunks(batch_size) {
        let mut grads = Gradients::zeros_like(store);
        for &i in batch {
            let mut g = Graph::training(store, rng);
            let l = loss_fn(&mut g, i)?;
            total += g.value(l).get(0, 0);
            grads.accumulate(&g.backward(l));
        }
        if batch.len() > 1 {
            grads.scale(1.0 / batch.len() as f64);
        }
        adam.step(store, &grads, trainable);
    }
    Ok(total / order.len().max(1) as f64)
}

pub fn train_ndp(
    config: &TrainingConfig,
    corpus: &NdpCorpus,
    embedder: &dyn EmbeddingProvider,
) -> Result<TrainOutcome, TrainingError> {
    train_ndp_with(config, corpus, embedder, &mut |_, _| {})
}

/// Adam on the sentence-level content-type loss. `observer` runs after
/// every epoch.
pub fn train_ndp_with(
    config: &TrainingConfig,
    corpus: &NdpCorpus,
    embedder: &dyn EmbeddingProvider,
    observer: &mut dyn FnMut(&EpochRecord, &NdpModel),
) -> Result<TrainOutcome, TrainingError> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(TrainingError::EmptyCorpus);
    }
    let docs = corpus.documents();
    let tokens = embed_all(docs, embedder)?;
    let gold: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| {
            d.ndp_labels()
                .unwrap_or_default()
                .iter()
                .map(|l| l.code())
                .collect()
        })
        .collect();
    let ranges: Vec<_> = docs
        .iter()
        .map(|d| Granularity::Sentence.ranges(d))
        .collect();

    let mut model = NdpModel::new(embedder.dim(), config.dropout, config.seed);
    let mut adam = Adam::new(config.learning_rate, config.adam_epsilon);
    let mut rng = training_rng(config.seed);
    let mut log = Vec::with_capacity(config.epochs);
    let mut order: Vec<usize> = (0..docs.len()).collect();
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let branch = model.branch.clone();
        let dropout = model.dropout;
        let loss = run_epoch(
            &mut model.store,
            &mut adam,
            &mut rng,
            &order,
            config.batch_size,
            &|_| true,
            &|g, i| {
                let x = g.constant(tokens[i].clone());
                let s = branch.segments(g, x, &ranges[i], dropout)?;
                let p = branch.classify(g, s.mixed, dropout);
                Ok(g.nll(p, &gold[i]))
            },
        )?;
        let record = EpochRecord {
            phase: "ndp",
            epoch,
            loss,
            train_accuracy: Some(accuracy_on(&model, docs, &tokens)?),
            train_full_f: None,
            ndp_frozen: None,
        };
        observer(&record, &model);
        log.push(record);
    }
    Ok(TrainOutcome {
        checkpoint: Checkpoint::ndp(&model, config, config.epochs, &rng),
        log,
    })
}

/// Sentence accuracy in percent over pre-embedded documents.
pub(super) fn accuracy_on(
    model: &NdpModel,
    docs: &[Document],
    tokens: &[Matrix],
) -> Result<f64, TrainingError> {
    let per_doc = docs
        .par_iter()
        .zip(tokens)
        .map(|(d, t)| {
            let pred = model.predict(d, t)?;
            let gold = d.ndp_labels().unwrap_or_default();
            Ok((
                pred.iter().zip(gold).filter(|(p, g)| p == g).count(),
                gold.len(),
            ))
        })
        .collect::<Result<Vec<_>, TrainingError>>()?;
    let (hit, total) = per_doc.iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(if total == 0 {
        0.0
    } else {
        100.0 * hit as f64 / total as f64
    })
}

pub fn train_c2rnet(
    config: &TrainingConfig,
    docs: &[Document],
    embedder: &dyn EmbeddingProvider,
    ndp_checkpoint: Option<&Checkpoint>,
) -> Result<TrainOutcome, TrainingError> {
    train_c2rnet_with(config, docs, embedder, ndp_checkpoint, &mut |_, _| {})
}

/// Adam on the teacher-forced RST loss. NDP parameters stay fixed through
/// epoch `ndp_freeze_epochs` and then receive RST gradients only.
pub fn train_c2rnet_with(
    config: &TrainingConfig,
    docs: &[Document],
    embedder: &dyn EmbeddingProvider,
    ndp_checkpoint: Option<&Checkpoint>,
    observer: &mut dyn FnMut(&EpochRecord, &C2RNet),
) -> Result<TrainOutcome, TrainingError> {
    config.validate()?;
    if docs.is_empty() {
        return Err(TrainingError::EmptyCorpus);
    }
    let trees: Vec<&RstTree> = docs
        .iter()
        .map(|d| {
            d.gold_tree()
                .ok_or_else(|| TrainingError::MissingTree(d.doc_id().to_string()))
        })
        .collect::<Result<_, _>>()?;
    let relations = config.relation_inventory()?;
    let labels = match config.labels {
        LabelSet::Observed => LabelInventory::observed(trees.iter().copied())?,
        LabelSet::Full => LabelInventory::full(&relations)?,
    };
    if let Some((_, r)) = labels
        .pairs()
        .iter()
        .find(|(_, r)| !relations.contains(r.as_str()))
    {
        return Err(TrainingError::Config(format!(
            "training trees use relation '{r}', which is not in the configured inventory"
        )));
    }
    let ndp_store = match ndp_checkpoint {
        Some(c) if config.fusion.uses_ndp() => {
            if c.kind != CheckpointKind::Ndp {
                return Err(TrainingError::Config(format!(
                    "fusion mode {} needs an NDP checkpoint, got a {} checkpoint",
                    config.fusion, c.kind
                )));
            }
            Some(&c.params)
        }
        _ => None,
    };
    let model_config = ModelConfig {
        dims: config.rst_dims(embedder.dim()),
        fusion: config.fusion,
        dropout: config.dropout,
    };
    let mut model = C2RNet::new(model_config, labels, relations, ndp_store, config.seed)?;
    let tokens = embed_all(docs, embedder)?;

    let mut is_rst = vec![false; model.store.len()];
    for id in model.rst_params() {
        is_rst[id.index()] = true;
    }
    let mut is_ndp = vec![false; model.store.len()];
    for id in model.ndp_params() {
        is_ndp[id.index()] = true;
    }

    let mut adam = Adam::new(config.learning_rate, config.adam_epsilon);
    let mut rng = training_rng(config.seed);
    let mut log = Vec::with_capacity(config.epochs);
    let mut order: Vec<usize> = (0..docs.len()).collect();
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let frozen = epoch <= config.ndp_freeze_epochs;
        let trainable = |id: ParamId| is_rst[id.index()] || (!frozen && is_ndp[id.index()]);
        // graphs read parameter values from `store`; `model` only supplies the layout
        let mut store = std::mem::replace(&mut model.store, ParamStore::new());
        let loss = run_epoch(
            &mut store,
            &mut adam,
            &mut rng,
            &order,
            config.batch_size,
            &trainable,
            &|g, i| Ok(model.loss(g, &docs[i], &tokens[i], trees[i])?),
        );
        model.store = store;
        let loss = loss?;
        let eval_now =
            epoch == config.epochs || (config.eval_every > 0 && epoch % config.eval_every == 0);
        let record = EpochRecord {
            phase: "rst",
            epoch,
            loss,
            train_accuracy: None,
            train_full_f: if eval_now {
                Some(full_f_on(&model, docs, &tokens)?)
            } else {
                None
            },
            ndp_frozen: model.ndp.is_some().then_some(frozen),
        };
        observer(&record, &model);
        log.push(record);
    }
    Ok(TrainOutcome {
        checkpoint: Checkpoint::c2rnet(&model, config, config.epochs, &rng),
        log,
    })
}

/// Original-Parseval Full-F of greedy decodes against the gold trees.
pub(super) fn full_f_on(
    model: &C2RNet,
    docs: &[Document],
    tokens: &[Matrix],
) -> Result<f64, TrainingError> {
    let pred = docs
        .par_iter()
        .zip(tokens)
        .map(|(d, t)| Ok((d.doc_id().to_string(), model.decode(d, t)?)))
        .collect::<Result<BTreeMap<_, _>, TrainingError>>()?;
    let gold: BTreeMap<String, RstTree> = docs
        .iter()
        .filter_map(|d| Some((d.doc_id().to_string(), d.gold_tree()?.clone())))
        .collect();
    Ok(score(&pred, &gold, Convention::Original)?.f())
}
