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

//! Local and global attention of an untrained NDP branch on one document,
//! followed by the content-type distribution of each sentence.

use c2rnet::embedding::{embed_document, HashEmbedder};
use c2rnet::ndp_branch::NdpModel;
use c2rnet::treebank::Document;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = Document::from_edus(
        "news",
        &[
            vec!["officials", "announced", "new", "rules"],
            vec!["prices", "rose", "last", "year"],
            vec!["analysts", "expect", "more"],
        ],
    )?;
    let tokens = embed_document(&doc, &HashEmbedder::new(8, 0)?)?;
    let model = NdpModel::new(8, 0.0, 1);
    let first = doc.sentence_tokens(0);
    let local = model.local_attention(&tokens.slice_rows(first.start, first.len()))?;
    println!("word weights in sentence 1: {:.3?}", local.weights);
    let seg = model.segment_embeddings(&tokens, &doc.sentence_token_ranges())?;
    let (weights, _) = model.global_attention(&seg.local)?;
    for s in 0..doc.n_sentences() {
        println!("sentence {} attends to {:.3?}", s + 1, weights.row(s));
    }
    let probs = model.sentence_probabilities(&doc, &tokens)?;
    for (s, label) in model.predict(&doc, &tokens)?.iter().enumerate() {
        println!(
            "sentence {}: {label} (p = {:.3})",
            s + 1,
            probs.get(s, label.code())
        );
    }
    Ok(())
}
