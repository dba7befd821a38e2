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

use super::tree::{Nuclearity, Relation, Role, RstNode, RstTree};
use super::TreebankError;

/// Tree node with any number of children, as found in source annotations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NaryNode {
    Leaf(usize),
    Internal {
        relation: Relation,
        children: Vec<(Role, NaryNode)>,
    },
}

impl NaryNode {
    /// All children are nuclei.
    pub fn multinuclear(relation: Relation, children: Vec<NaryNode>) -> Self {
        NaryNode::Internal {
            relation,
            children: children.into_iter().map(|c| (Role::Nucleus, c)).collect(),
        }
    }

    pub fn binary(
        nuclearity: Nuclearity,
        relation: Relation,
        left: NaryNode,
        right: NaryNode,
    ) -> Self {
        let (l, r) = nuclearity.roles();
        NaryNode::Internal {
            relation,
            children: vec![(l, left), (r, right)],
        }
    }
}

/// Right-branching binarization.
///
/// Children `c1 .. cm` become `(c1 (c2 (... cm)))`. Every new node carries the
/// original relation; its nuclearity pairs the left child's role with
/// nucleus if the remaining right group holds any nucleus, else satellite.
/// A multinuclear node therefore expands to an `NN` chain.
pub fn binarize(tree: &NaryNode) -> Result<RstTree, TreebankError> {
    Ok(RstTree::new(binarize_node(tree)?))
}

fn binarize_node(node: &NaryNode) -> Result<RstNode, TreebankError> {
    match node {
        NaryNode::Leaf(edu) => Ok(RstNode::leaf(*edu)),
        NaryNode::Internal { relation, children } => {
            if children.len() < 2 {
                return Err(TreebankError::TooFewChildren {
                    found: children.len(),
                });
            }
            if children.iter().all(|(r, _)| *r == Role::Satellite) {
                return Err(TreebankError::NoNucleus);
            }
            let mut converted = children
                .iter()
                .map(|(role, c)| Ok((*role, binarize_node(c)?)))
                .collect::<Result<Vec<_>, TreebankError>>()?;
            let (mut right_role, mut acc) = converted.pop().expect("at least two children");
            while let Some((left_role, left)) = converted.pop() {
                let nuclearity = Nuclearity::from_roles(left_role, right_role)
                    .expect("satellite-only groups are rejected above");
                acc = RstNode::internal(nuclearity, relation.clone(), left, acc);
                if left_role == Role::Nucleus {
                    right_role = Role::Nucleus;
                }
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{serialize_tree, RelationInventory, Span};

    fn inv() -> RelationInventory {
        RelationInventory::new(["joint", "elaboration", "list"]).unwrap()
    }

    #[test]
    fn three_way_joint() {
        let joint = inv().label("joint").unwrap();
        let n = NaryNode::multinuclear(joint, (1..=3).map(NaryNode::Leaf).collect());
        let t = binarize(&n).unwrap();
        assert_eq!(
            serialize_tree(&t),
            "(NN joint (leaf 1) (NN joint (leaf 2) (leaf 3)))"
        );
    }

    #[test]
    fn four_way_chain_spans() {
        let joint = inv().label("joint").unwrap();
        let n = NaryNode::multinuclear(joint, (1..=4).map(NaryNode::Leaf).collect());
        let t = binarize(&n).unwrap();
        let spans: Vec<Span> = t.internal_nodes().iter().map(|n| n.span).collect();
        assert_eq!(
            spans,
            vec![Span::new(1, 4), Span::new(2, 4), Span::new(3, 4)]
        );
    }

    #[test]
    fn binary_input_is_unchanged() {
        let i = inv();
        let n = NaryNode::binary(
            Nuclearity::NS,
            i.label("elaboration").unwrap(),
            NaryNode::Leaf(1),
            NaryNode::binary(
                Nuclearity::NN,
                i.label("list").unwrap(),
                NaryNode::Leaf(2),
                NaryNode::Leaf(3),
            ),
        );
        assert_eq!(
            serialize_tree(&binarize(&n).unwrap()),
            "(NS elaboration (leaf 1) (NN list (leaf 2) (leaf 3)))"
        );
    }

    #[test]
    fn satellites_on_both_sides() {
        let rel = inv().label("elaboration").unwrap();
        let n = NaryNode::Internal {
            relation: rel,
            children: vec![
                (Role::Satellite, NaryNode::Leaf(1)),
                (Role::Nucleus, NaryNode::Leaf(2)),
                (Role::Satellite, NaryNode::Leaf(3)),
            ],
        };
        assert_eq!(
            serialize_tree(&binarize(&n).unwrap()),
            "(SN elaboration (leaf 1) (NS elaboration (leaf 2) (leaf 3)))"
        );
    }

    #[test]
    fn rejects_unary_nodes() {
        let n = NaryNode::multinuclear(inv().label("joint").unwrap(), vec![NaryNode::Leaf(1)]);
        assert!(matches!(
            binarize(&n),
            Err(TreebankError::TooFewChildren { found: 1 })
        ));
    }
}
