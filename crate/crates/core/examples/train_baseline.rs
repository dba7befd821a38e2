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

//! Overfits the baseline parser (no NDP fusion) on a synthetic treebank and
//! prints the training-set Full-F as it improves.
//!
//! cargo run --release --example train_baseline -- [epochs] [dropout] [learning_rate]

use c2rnet::embedding::HashEmbedder;
use c2rnet::rst_parser::FusionMode;
use c2rnet::synthetic::{treebank_documents, TreebankSpec};
use c2rnet::training::{train_c2rnet_with, TrainingConfig};
use c2rnet::treebank::RelationInventory;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let epochs: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(300);
    let dropout: f64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(0.5);
    let learning_rate: f64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(5e-4);

    let docs = treebank_documents(&TreebankSpec::default(), &RelationInventory::coarse());
    let config = TrainingConfig {
        fusion: FusionMode::None,
        epochs,
        ndp_freeze_epochs: 0,
        dropout,
        h1: 32,
        h2: 32,
        eval_every: 10,
        learning_rate,
        ..TrainingConfig::default()
    };
    let embedder = HashEmbedder::new(config.embedding_dim, config.embedding_seed)?;
    let start = std::time::Instant::now();
    let outcome = train_c2rnet_with(&config, &docs, &embedder, None, &mut |r, _| {
        if let Some(f) = r.train_full_f {
            println!(
                "epoch {:>4}  loss {:.4}  train Full-F {:.1}  ({:.0?})",
                r.epoch,
                r.loss,
                f,
                start.elapsed()
            );
        }
    })?;
    let first = outcome.log.first().map(|r| r.loss).unwrap_or(0.0);
    let last = outcome.log.last().map(|r| r.loss).unwrap_or(0.0);
    println!("loss {first:.4} -> {last:.4}");
    Ok(())
}
