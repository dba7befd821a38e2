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

use c2rnet::embedding::HashEmbedder;
use c2rnet::ndp_corpus::NdpCorpus;
use c2rnet::rst_parser::FusionMode;
use c2rnet::synthetic::{ndp_documents, treebank_documents, NdpSpec, TreebankSpec};
use c2rnet::training::{
    ndp_accuracy, probe_ndp, train_c2rnet, train_ndp, Checkpoint, TrainingConfig,
};
use c2rnet::treebank::{Document, RelationInventory};

fn config(seed: u64, epochs: usize) -> TrainingConfig {
    TrainingConfig {
        fusion: FusionMode::NdpEmbedding,
        epochs,
        ndp_freeze_epochs: 0,
        embedding_dim: 16,
        h1: 8,
        h2: 8,
        para_dim: 4,
        split_hidden: 8,
        learning_rate: 5e-3,
        seed,
        ..TrainingConfig::default()
    }
}

fn ndp_checkpoint(seed: u64, epochs: usize, documents: usize) -> Checkpoint {
    let corpus = NdpCorpus::new(ndp_documents(&NdpSpec {
        documents,
        seed: 3,
        ..NdpSpec::default()
    }))
    .unwrap();
    train_ndp(
        &config(seed, epochs),
        &corpus,
        &HashEmbedder::new(16, 0).unwrap(),
    )
    .unwrap()
    .checkpoint
}

fn treebank() -> Vec<Document> {
    let spec = TreebankSpec {
        documents: 2,
        min_edus: 3,
        max_edus: 5,
        ..TreebankSpec::default()
    };
    treebank_documents(&spec, &RelationInventory::coarse())
}

#[test]
fn random_body_under_trained_head_loses_accuracy() {
    let head = ndp_checkpoint(11, 40, 10);
    let embedder = HashEmbedder::new(16, 0).unwrap();
    let test = NdpCorpus::new(ndp_documents(&NdpSpec {
        documents: 40,
        seed: 123,
        ..NdpSpec::default()
    }))
    .unwrap();
    let trained = ndp_accuracy(&head.to_ndp_model().unwrap(), &test, &embedder).unwrap();
    let probes: Vec<f64> = (0..3)
        .map(|s| {
            let fresh = ndp_checkpoint(100 + s, 0, 2);
            let c2r = train_c2rnet(&config(200 + s, 0), &treebank(), &embedder, Some(&fresh))
                .unwrap()
                .checkpoint;
            probe_ndp(&c2r, &head, &test, &embedder).unwrap()
        })
        .collect();
    let mean = probes.iter().sum::<f64>() / probes.len() as f64;
    assert!(trained > 80.0, "trained head {trained}");
    // local pooling has no value map, so a random body still passes the
    // averaged cue vector through; accuracy drops but stays above chance
    assert!(
        mean < trained - 25.0,
        "random bodies {probes:?}, trained {trained:.1}%"
    );
    assert!(probes.iter().all(|&p| p < trained));
}
