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

//! Trains the NDP branch on synthetic documents whose sentences carry a
//! label-specific cue word, then saves the checkpoint.
//!
//! cargo run --release --example train_ndp -- [epochs] [out.ckpt]

use c2rnet::embedding::HashEmbedder;
use c2rnet::ndp_corpus::NdpCorpus;
use c2rnet::synthetic::{ndp_documents, NdpSpec};
use c2rnet::training::{train_ndp_with, TrainingConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let epochs: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(200);
    let out = args.next();

    let corpus = NdpCorpus::new(ndp_documents(&NdpSpec::default()))?;
    let config = TrainingConfig {
        epochs,
        ndp_freeze_epochs: 0,
        seed: 7,
        ..TrainingConfig::default()
    };
    let embedder = HashEmbedder::new(config.embedding_dim, config.embedding_seed)?;
    let outcome = train_ndp_with(&config, &corpus, &embedder, &mut |r, _| {
        if r.epoch % 20 == 0 || r.epoch == 1 {
            println!(
                "epoch {:>4}  loss {:.4}  train accuracy {:.1}%",
                r.epoch,
                r.loss,
                r.train_accuracy.unwrap_or(0.0)
            );
        }
    })?;
    if let Some(path) = out {
        outcome.checkpoint.save(&path)?;
        println!("saved {path}");
    }
    Ok(())
}
