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

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::tree::{NodeKind, Nuclearity, Role, RstNode, RstTree, Span, SPAN_LABEL};

/// Constituent extraction convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    /// Original Parseval: one constituent per internal node, labeled with the
    /// node's nuclearity pattern and relation.
    Original,
    /// RST-Parseval: one constituent per non-root node, labeled with the
    /// node's role under its parent.
    Rst,
}

impl Convention {
    pub const BOTH: [Convention; 2] = [Convention::Original, Convention::Rst];

    pub fn name(self) -> &'static str {
        match self {
            Convention::Original => "Original Parseval",
            Convention::Rst => "RST Parseval",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Convention::Original => "orig",
            Convention::Rst => "rst",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledConstituent {
    pub span: Span,
    pub nuclearity_tag: String,
    pub relation_tag: String,
}

impl LabeledConstituent {
    pub fn new(span: Span, nuclearity_tag: &str, relation_tag: &str) -> Self {
        LabeledConstituent {
            span,
            nuclearity_tag: nuclearity_tag.to_string(),
            relation_tag: relation_tag.to_string(),
        }
    }
}

impl fmt::Display for LabeledConstituent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.span.first, self.span.last, self.nuclearity_tag, self.relation_tag
        )
    }
}

/// Constituents of `tree`; the Original convention includes the root.
pub fn constituents(tree: &RstTree, convention: Convention) -> BTreeSet<LabeledConstituent> {
    constituents_with(tree, convention, true)
}

/// `include_root` only affects the Original convention; RST-Parseval never
/// scores the root.
pub fn constituents_with(
    tree: &RstTree,
    convention: Convention,
    include_root: bool,
) -> BTreeSet<LabeledConstituent> {
    let mut out = BTreeSet::new();
    match convention {
        Convention::Original => collect_original(tree.root(), true, include_root, &mut out),
        Convention::Rst => collect_rst(tree.root(), &mut out),
    }
    out
}

fn collect_original(
    node: &RstNode,
    is_root: bool,
    include_root: bool,
    out: &mut BTreeSet<LabeledConstituent>,
) {
    if let NodeKind::Internal {
        nuclearity,
        relation,
        children,
    } = &node.kind
    {
        if !is_root || include_root {
            out.insert(LabeledConstituent::new(
                node.span,
                nuclearity.as_str(),
                relation.as_str(),
            ));
        }
        collect_original(&children[0], false, include_root, out);
        collect_original(&children[1], false, include_root, out);
    }
}

fn collect_rst(node: &RstNode, out: &mut BTreeSet<LabeledConstituent>) {
    if let NodeKind::Internal {
        nuclearity,
        relation,
        children,
    } = &node.kind
    {
        let (left_role, right_role) = nuclearity.roles();
        for (child, role) in [(&children[0], left_role), (&children[1], right_role)] {
            let rel = if role == Role::Satellite || *nuclearity == Nuclearity::NN {
                relation.as_str()
            } else {
                SPAN_LABEL
            };
            out.insert(LabeledConstituent::new(child.span, role.tag(), rel));
            collect_rst(child, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{parse_tree_text, RelationInventory};

    fn three_edu_tree() -> RstTree {
        let inv = RelationInventory::new(["elaboration", "list"]).unwrap();
        parse_tree_text(
            "(NS elaboration (leaf 1) (NN list (leaf 2) (leaf 3)))",
            3,
            &inv,
        )
        .unwrap()
    }

    fn set(items: &[(usize, usize, &str, &str)]) -> BTreeSet<LabeledConstituent> {
        items
            .iter()
            .map(|&(a, b, n, r)| LabeledConstituent::new(Span::new(a, b), n, r))
            .collect()
    }

    #[test]
    fn three_edu_original() {
        assert_eq!(
            constituents(&three_edu_tree(), Convention::Original),
            set(&[(1, 3, "NS", "elaboration"), (2, 3, "NN", "list")])
        );
    }

    #[test]
    fn three_edu_original_without_root() {
        assert_eq!(
            constituents_with(&three_edu_tree(), Convention::Original, false),
            set(&[(2, 3, "NN", "list")])
        );
    }

    #[test]
    fn three_edu_rst() {
        assert_eq!(
            constituents(&three_edu_tree(), Convention::Rst),
            set(&[
                (1, 1, "N", "span"),
                (2, 3, "S", "elaboration"),
                (2, 2, "N", "list"),
                (3, 3, "N", "list"),
            ])
        );
    }

    #[test]
    fn single_leaf_has_no_constituents() {
        let t = RstTree::single_leaf();
        assert!(constituents(&t, Convention::Original).is_empty());
        assert!(constituents(&t, Convention::Rst).is_empty());
    }
}
