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
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TreebankError;

/// Inclusive 1-based EDU range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub first: usize,
    pub last: usize,
}

impl Span {
    pub fn new(first: usize, last: usize) -> Self {
        Span { first, last }
    }

    pub fn leaf(edu: usize) -> Self {
        Span {
            first: edu,
            last: edu,
        }
    }

    /// Number of EDUs subsumed.
    pub fn len(&self) -> usize {
        self.last + 1 - self.first
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_leaf(&self) -> bool {
        self.first == self.last
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.last)
    }
}

/// Nucleus/satellite pattern of the two children of a binary node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Nuclearity {
    NN,
    NS,
    SN,
}

impl Nuclearity {
    pub const ALL: [Nuclearity; 3] = [Nuclearity::NN, Nuclearity::NS, Nuclearity::SN];

    pub fn as_str(self) -> &'static str {
        match self {
            Nuclearity::NN => "NN",
            Nuclearity::NS => "NS",
            Nuclearity::SN => "SN",
        }
    }

    /// Roles of the (left, right) children.
    pub fn roles(self) -> (Role, Role) {
        match self {
            Nuclearity::NN => (Role::Nucleus, Role::Nucleus),
            Nuclearity::NS => (Role::Nucleus, Role::Satellite),
            Nuclearity::SN => (Role::Satellite, Role::Nucleus),
        }
    }

    pub fn from_roles(left: Role, right: Role) -> Option<Nuclearity> {
        match (left, right) {
            (Role::Nucleus, Role::Nucleus) => Some(Nuclearity::NN),
            (Role::Nucleus, Role::Satellite) => Some(Nuclearity::NS),
            (Role::Satellite, Role::Nucleus) => Some(Nuclearity::SN),
            (Role::Satellite, Role::Satellite) => None,
        }
    }
}

impl fmt::Display for Nuclearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Nuclearity {
    type Err = TreebankError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "NN" => Ok(Nuclearity::NN),
            "NS" => Ok(Nuclearity::NS),
            "SN" => Ok(Nuclearity::SN),
            other => Err(TreebankError::UnknownNuclearity(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Nucleus,
    Satellite,
}

impl Role {
    pub fn tag(self) -> &'static str {
        match self {
            Role::Nucleus => "N",
            Role::Satellite => "S",
        }
    }
}

/// Pseudo-label used for nuclei of mononuclear relations in RST-Parseval.
pub const SPAN_LABEL: &str = "span";

/// Lowercase rhetorical relation name. Membership in an inventory is checked
/// by [`RelationInventory::label`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Relation(String);

impl Relation {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The 18 coarse relation classes commonly used with RST-DT.
pub const COARSE_RELATIONS: [&str; 18] = [
    "attribution",
    "background",
    "cause",
    "comparison",
    "condition",
    "contrast",
    "elaboration",
    "enablement",
    "evaluation",
    "explanation",
    "joint",
    "manner-means",
    "same-unit",
    "summary",
    "temporal",
    "textual-organization",
    "topic-change",
    "topic-comment",
];

/// Set of admissible relation labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationInventory {
    names: Vec<String>,
}

impl RelationInventory {
    /// Names are lowercased, deduplicated and sorted. `span` is rejected.
    pub fn new<I, S>(names: I) -> Result<Self, TreebankError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out: Vec<String> = Vec::new();
        for n in names {
            let n = n.as_ref().trim().to_lowercase();
            if n.is_empty() {
                continue;
            }
            if n == SPAN_LABEL {
                return Err(TreebankError::ReservedRelation);
            }
            if n.chars().any(|c| c.is_whitespace() || c == '(' || c == ')') {
                return Err(TreebankError::UnknownRelation(n));
            }
            out.push(n);
        }
        out.sort();
        out.dedup();
        Ok(RelationInventory { names: out })
    }

    pub fn coarse() -> Self {
        Self::new(COARSE_RELATIONS).expect("static inventory is valid")
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .is_ok()
    }

    /// Validated label for `name`.
    pub fn label(&self, name: &str) -> Result<Relation, TreebankError> {
        if name == SPAN_LABEL {
            return Err(TreebankError::ReservedRelation);
        }
        if self.contains(name) {
            Ok(Relation(name.to_string()))
        } else {
            Err(TreebankError::UnknownRelation(name.to_string()))
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = Relation> + '_ {
        self.names.iter().map(|n| Relation(n.clone()))
    }
}

impl Default for RelationInventory {
    fn default() -> Self {
        Self::coarse()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    Internal {
        nuclearity: Nuclearity,
        relation: Relation,
        children: Box<[RstNode; 2]>,
    },
}

/// Node of a binary RST constituency tree.
///
/// Constructors do not check span invariants; [`validate`](super::validate)
/// reports violations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RstNode {
    pub span: Span,
    pub kind: NodeKind,
}

impl RstNode {
    pub fn leaf(edu: usize) -> Self {
        RstNode {
            span: Span::leaf(edu),
            kind: NodeKind::Leaf,
        }
    }

    /// Internal node whose span is the hull of its children.
    pub fn internal(
        nuclearity: Nuclearity,
        relation: Relation,
        left: RstNode,
        right: RstNode,
    ) -> Self {
        let span = Span::new(left.span.first, right.span.last);
        Self::with_span(span, nuclearity, relation, left, right)
    }

    pub fn with_span(
        span: Span,
        nuclearity: Nuclearity,
        relation: Relation,
        left: RstNode,
        right: RstNode,
    ) -> Self {
        RstNode {
            span,
            kind: NodeKind::Internal {
                nuclearity,
                relation,
                children: Box::new([left, right]),
            },
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf)
    }

    pub fn children(&self) -> Option<(&RstNode, &RstNode)> {
        match &self.kind {
            NodeKind::Leaf => None,
            NodeKind::Internal { children, .. } => Some((&children[0], &children[1])),
        }
    }

    pub fn nuclearity(&self) -> Option<Nuclearity> {
        match &self.kind {
            NodeKind::Leaf => None,
            NodeKind::Internal { nuclearity, .. } => Some(*nuclearity),
        }
    }

    pub fn relation(&self) -> Option<&Relation> {
        match &self.kind {
            NodeKind::Leaf => None,
            NodeKind::Internal { relation, .. } => Some(relation),
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a RstNode)) {
        f(self);
        if let Some((l, r)) = self.children() {
            l.walk(f);
            r.walk(f);
        }
    }
}

/// Binary labeled constituency tree over a document's EDUs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RstTree {
    root: RstNode,
}

impl RstTree {
    pub fn new(root: RstNode) -> Self {
        RstTree { root }
    }

    pub fn single_leaf() -> Self {
        RstTree::new(RstNode::leaf(1))
    }

    pub fn root(&self) -> &RstNode {
        &self.root
    }

    pub fn into_root(self) -> RstNode {
        self.root
    }

    pub fn leaf_count(&self) -> usize {
        let mut n = 0;
        self.root.walk(&mut |node| {
            if node.is_leaf() {
                n += 1;
            }
        });
        n
    }

    /// Internal nodes in pre-order.
    pub fn internal_nodes(&self) -> Vec<&RstNode> {
        let mut out = Vec::new();
        self.root.walk(&mut |node| {
            if !node.is_leaf() {
                out.push(node);
            }
        });
        out
    }

    /// Relations used anywhere in the tree.
    pub fn relations(&self) -> Vec<&Relation> {
        self.internal_nodes()
            .into_iter()
            .filter_map(|n| n.relation())
            .collect()
    }
}
