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

//! Pretrains the NDP branch, transfers it into the parser, and trains the
//! parser in both fusion modes with the freeze schedule. Prints training
//! and held-out scores.
//!
//! cargo run --release --example train_c2rnet_fusion -- [epochs]

use c2rnet::embedding::HashEmbedder;
use c2rnet::metrics::format_table;
use c2rnet::ndp_corpus::NdpCorpus;
use c2rnet::rst_parser::FusionMode;
use c2rnet::synthetic::{ndp_documents, treebank_documents, NdpSpec, TreebankSpec};
use c2rnet::training::{evaluate_checkpoint, train_c2rnet, train_ndp, TrainingConfig};
use c2rnet::treebank::RelationInventory;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let epochs: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse())
        .transpose()?
        .unwrap_or(120);
    let base = TrainingConfig {
        embedding_dim: 32,
        h1: 32,
        h2: 32,
        epochs,
        ndp_freeze_epochs: epochs.min(40),
        ..TrainingConfig::default()
    };
    let embedder = HashEmbedder::new(base.embedding_dim, base.embedding_seed)?;

    let ndp_corpus = NdpCorpus::new(ndp_documents(&NdpSpec::default()))?;
    let ndp_config = TrainingConfig {
        epochs: 60,
        ndp_freeze_epochs: 0,
        ..base.clone()
    };
    let ndp = train_ndp(&ndp_config, &ndp_corpus, &embedder)?;
    println!(
        "NDP training accuracy {:.1}%",
        ndp.log.last().and_then(|r| r.train_accuracy).unwrap_or(0.0)
    );

    let inv = RelationInventory::coarse();
    let train = treebank_documents(&TreebankSpec::default(), &inv);
    let test = treebank_documents(
        &TreebankSpec {
            seed: 1,
            ..TreebankSpec::default()
        },
        &inv,
    );
    for fusion in FusionMode::ALL {
        let config = TrainingConfig {
            fusion,
            ..base.clone()
        };
        let source = fusion.uses_ndp().then_some(&ndp.checkpoint);
        let outcome = train_c2rnet(&config, &train, &embedder, source)?;
        let on_train = evaluate_checkpoint(&outcome.checkpoint, &train, &embedder)?;
        let on_test = evaluate_checkpoint(&outcome.checkpoint, &test, &embedder)?;
        println!("\n{fusion}");
        print!("{}", format_table("train", &[on_train.orig, on_train.rst]));
        print!("{}", format_table("held-out", &[on_test.orig, on_test.rst]));
    }
    Ok(())
}
