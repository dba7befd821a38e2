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

//! Parses a bracketed RST tree, validates it and lists its constituents
//! under both Parseval conventions.
//!
//! cargo run --example parse_tree -- "(NS elaboration (leaf 1) (NN list (leaf 2) (leaf 3)))"

use c2rnet::treebank::{
    constituents, parse_tree_text, serialize_tree, Convention, RelationInventory,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "(NS elaboration (leaf 1) (NN list (leaf 2) (leaf 3)))".to_string());
    let inventory =
        RelationInventory::new(["elaboration", "list", "joint", "contrast", "attribution"])?;
    let n = text.matches("leaf").count();
    let tree = parse_tree_text(&text, n, &inventory)?;
    println!("canonical: {}", serialize_tree(&tree));
    println!(
        "EDUs: {}, internal nodes: {}",
        tree.leaf_count(),
        tree.internal_nodes().len()
    );
    for conv in Convention::BOTH {
        println!("\n{conv}:");
        for c in constituents(&tree, conv) {
            println!("  {c}");
        }
    }
    Ok(())
}
