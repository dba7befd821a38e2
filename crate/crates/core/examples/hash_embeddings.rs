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

//! Deterministic hash embeddings: the same token always maps to the same
//! vector, and a document becomes one row per token.

use c2rnet::embedding::{embed_document, EmbeddingProvider, HashEmbedder};
use c2rnet::treebank::Document;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let embedder = HashEmbedder::new(6, 42)?;
    let a = embedder.embed_token("d1", 0, "bank")?;
    let b = embedder.embed_token("d2", 7, "bank")?;
    assert_eq!(a, b);
    println!("bank -> {a:.3?}");
    let doc = Document::from_edus("d1", &[vec!["the", "bank"], vec!["said", "so"]])?;
    let m = embed_document(&doc, &embedder)?;
    println!("document matrix: {} x {}", m.rows(), m.cols());
    Ok(())
}
