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

use std::fmt;

use super::document::Document;
use super::tree::{NodeKind, RstNode, RstTree, Span, SPAN_LABEL};

/// One broken tree invariant. Violations are data; validation never fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The tree does not cover exactly the document's EDUs. `found` is the
    /// number of EDUs the root span claims.
    LeafCountMismatch {
        expected: usize,
        found: usize,
    },
    RootNotAtFirstEdu {
        span: Span,
    },
    DegenerateLeafSpan {
        span: Span,
    },
    NonAdjacentChildren {
        parent: Span,
        left: Span,
        right: Span,
    },
    ChildrenDoNotCoverParent {
        parent: Span,
        left: Span,
        right: Span,
    },
    ReservedRelation {
        span: Span,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LeafCountMismatch { expected, found } => {
                write!(f, "tree covers {found} EDUs but document has {expected}")
            }
            Violation::RootNotAtFirstEdu { span } => {
                write!(f, "root span {span} does not start at EDU 1")
            }
            Violation::DegenerateLeafSpan { span } => write!(f, "leaf with multi-EDU span {span}"),
            Violation::NonAdjacentChildren {
                parent,
                left,
                right,
            } => {
                write!(
                    f,
                    "children {left} and {right} of {parent} are not adjacent"
                )
            }
            Violation::ChildrenDoNotCoverParent {
                parent,
                left,
                right,
            } => {
                write!(
                    f,
                    "children {left} and {right} do not cover parent {parent}"
                )
            }
            Violation::ReservedRelation { span } => {
                write!(f, "node {span} uses the reserved relation '{SPAN_LABEL}'")
            }
        }
    }
}

/// All invariant violations of `tree` relative to a document of `n_edus` EDUs.
pub fn validate_tree(tree: &RstTree, n_edus: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    check_node(tree.root(), &mut out);
    let root = tree.root().span;
    if root.first != 1 {
        out.push(Violation::RootNotAtFirstEdu { span: root });
    }
    let covered = root.last.saturating_add(1).saturating_sub(root.first);
    if covered != n_edus {
        out.push(Violation::LeafCountMismatch {
            expected: n_edus,
            found: covered,
        });
    }
    out
}

/// All invariant violations of `tree` relative to `doc`.
pub fn validate(tree: &RstTree, doc: &Document) -> Vec<Violation> {
    validate_tree(tree, doc.n_edus())
}

fn check_node(node: &RstNode, out: &mut Vec<Violation>) {
    match &node.kind {
        NodeKind::Leaf => {
            if !node.span.is_leaf() {
                out.push(Violation::DegenerateLeafSpan { span: node.span });
            }
        }
        NodeKind::Internal {
            relation, children, ..
        } => {
            let (l, r) = (&children[0], &children[1]);
            if relation.as_str() == SPAN_LABEL {
                out.push(Violation::ReservedRelation { span: node.span });
            }
            if l.span.last + 1 != r.span.first {
                out.push(Violation::NonAdjacentChildren {
                    parent: node.span,
                    left: l.span,
                    right: r.span,
                });
            } else if l.span.first != node.span.first || r.span.last != node.span.last {
                out.push(Violation::ChildrenDoNotCoverParent {
                    parent: node.span,
                    left: l.span,
                    right: r.span,
                });
            }
            check_node(l, out);
            check_node(r, out);
        }
    }
}
