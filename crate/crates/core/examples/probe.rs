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

//! Trains an NDP model, fuses it into the parser, and measures how the
//! branch body drifts by classifying with the original head before and
//! after RST training.
//!
//! cargo run --release --example probe -- [rst_epochs]

use c2rnet::embedding::HashEmbedder;
use c2rnet::ndp_corpus::NdpCorpus;
use c2rnet::rst_parser::FusionMode;
use c2rnet::synthetic::{ndp_documents, treebank_documents, NdpSpec, TreebankSpec};
use c2rnet::training::{ndp_accuracy, probe_ndp, train_c2rnet, train_ndp, TrainingConfig};
use c2rnet::treebank::RelationInventory;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rst_epochs: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse())
        .transpose()?
        .unwrap_or(80);
    let config = TrainingConfig {
        fusion: FusionMode::NdpEmbedding,
        embedding_dim: 32,
        h1: 32,
        h2: 32,
        ndp_freeze_epochs: 0,
        ..TrainingConfig::default()
    };
    let embedder = HashEmbedder::new(config.embedding_dim, config.embedding_seed)?;
    let ndp_train = NdpCorpus::new(ndp_documents(&NdpSpec::default()))?;
    let ndp_test = NdpCorpus::new(ndp_documents(&NdpSpec {
        seed: 5,
        ..NdpSpec::default()
    }))?;
    let ndp = train_ndp(
        &TrainingConfig {
            epochs: 60,
            ..config.clone()
        },
        &ndp_train,
        &embedder,
    )?
    .checkpoint;
    let original = ndp_accuracy(&ndp.to_ndp_model()?, &ndp_test, &embedder)?;
    println!("original NDP test accuracy   {original:.1}%");

    let rst = treebank_documents(&TreebankSpec::default(), &RelationInventory::coarse());
    for epochs in [0, rst_epochs] {
        let c2r = train_c2rnet(
            &TrainingConfig {
                epochs,
                ..config.clone()
            },
            &rst,
            &embedder,
            Some(&ndp),
        )?;
        let probed = probe_ndp(&c2r.checkpoint, &ndp, &ndp_test, &embedder)?;
        println!("after {epochs:>3} RST epochs, probe {probed:.1}%");
    }
    Ok(())
}
