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

//! RST trees, annotated documents and the native corpus format.

mod binarize;
mod constituents;
mod corpus;
mod document;
mod text;
mod tree;
mod validate;

pub use binarize::{binarize, NaryNode};
pub use constituents::{constituents, constituents_with, Convention, LabeledConstituent};
pub use corpus::{
    load_corpus, load_corpus_without_trees, save_corpus, write_corpus, CorpusError, DocumentRecord,
};
pub use document::Document;
pub use text::{parse_tree_text, serialize_tree};
pub use tree::{
    NodeKind, Nuclearity, Relation, RelationInventory, Role, RstNode, RstTree, Span,
    COARSE_RELATIONS, SPAN_LABEL,
};
pub use validate::{validate, validate_tree, Violation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TreebankError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("internal node is missing a child (at byte {position})")]
    MissingChild { position: usize },
    #[error("tree has {found} leaves but the document has {expected} EDUs")]
    LeafCountMismatch { expected: usize, found: usize },
    #[error("children {left} and {right} are not adjacent")]
    NonAdjacentChildren { left: Span, right: Span },
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("unknown relation label '{0}'")]
    UnknownRelation(String),
    #[error("unknown nuclearity '{0}'")]
    UnknownNuclearity(String),
    #[error("the label 'span' is reserved and cannot appear in a tree")]
    ReservedRelation,
    #[error("n-ary node has {found} children; at least 2 are required")]
    TooFewChildren { found: usize },
    #[error("n-ary node has no nucleus")]
    NoNucleus,
    #[error("document '{doc_id}': {message}")]
    InvalidDocument { doc_id: String, message: String },
    #[error("document '{doc_id}' has {sentences} sentences but {labels} content type labels")]
    LabelCountMismatch {
        doc_id: String,
        sentences: usize,
        labels: usize,
    },
}
