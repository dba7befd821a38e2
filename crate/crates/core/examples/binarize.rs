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

//! Converts a multinuclear list with three members into the right-branching
//! binary form scored by Parseval.

use c2rnet::treebank::{binarize, serialize_tree, NaryNode, Nuclearity, RelationInventory};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inventory = RelationInventory::coarse();
    let joint = inventory.label("joint")?;
    let elaboration = inventory.label("elaboration")?;
    // (elaboration (leaf 1) satellite: (joint (leaf 2) (leaf 3) (leaf 4)))
    let nary = NaryNode::binary(
        Nuclearity::NS,
        elaboration,
        NaryNode::Leaf(1),
        NaryNode::multinuclear(
            joint,
            vec![NaryNode::Leaf(2), NaryNode::Leaf(3), NaryNode::Leaf(4)],
        ),
    );
    let tree = binarize(&nary)?;
    println!("{}", serialize_tree(&tree));
    Ok(())
}
