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

//! Scores a predicted tree whose root relation is wrong against its gold
//! tree, under Original Parseval and RST-Parseval.

use std::collections::BTreeMap;

use c2rnet::metrics::{format_table, score_both};
use c2rnet::treebank::{parse_tree_text, RelationInventory};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inv = RelationInventory::new(["elaboration", "list"])?;
    let gold = parse_tree_text(
        "(NS elaboration (leaf 1) (NN list (leaf 2) (leaf 3)))",
        3,
        &inv,
    )?;
    let pred = parse_tree_text("(NS list (leaf 1) (NN list (leaf 2) (leaf 3)))", 3, &inv)?;
    let gold = BTreeMap::from([("doc".to_string(), gold)]);
    let pred = BTreeMap::from([("doc".to_string(), pred)]);
    let scores = score_both(&pred, &gold)?;
    for s in &scores {
        println!("{:<18} {}", s.convention.name(), s.quadruple());
    }
    println!();
    print!("{}", format_table("root perturbed", &scores));
    Ok(())
}
