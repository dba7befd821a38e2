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

//! Nuclearity and relation accuracy by span length, and the threshold
//! table, for a small prediction with errors on short and long spans.

use std::collections::BTreeMap;

use c2rnet::analysis::{
    default_groups, format_groups, format_thresholds, span_group_accuracy, threshold_table, Basis,
    DEFAULT_THRESHOLDS,
};
use c2rnet::treebank::{parse_tree_text, RelationInventory};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inv = RelationInventory::new(["elaboration", "joint", "contrast", "attribution"])?;
    let gold = "(NS elaboration (leaf 1) (NN joint (NS elaboration (leaf 2) (leaf 3)) (NN joint (leaf 4) (NS attribution (leaf 5) (leaf 6)))))";
    let pred = "(SN contrast (NS elaboration (leaf 1) (leaf 2)) (NN joint (leaf 3) (NN joint (leaf 4) (NS attribution (leaf 5) (leaf 6)))))";
    let gold = BTreeMap::from([("doc".to_string(), parse_tree_text(gold, 6, &inv)?)]);
    let pred = BTreeMap::from([("doc".to_string(), parse_tree_text(pred, 6, &inv)?)]);
    for basis in [Basis::Gold, Basis::Predicted] {
        println!("basis: {}", basis.name());
        print!(
            "{}",
            format_groups(&span_group_accuracy(
                &pred,
                &gold,
                &default_groups(),
                basis
            )?)
        );
        let table = threshold_table(&pred, &gold, &DEFAULT_THRESHOLDS[..4], basis)?;
        print!("{}", format_thresholds(&table));
        println!("weighted consistency holds: {}\n", table.is_consistent());
    }
    Ok(())
}
