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

//! RST branch: two BiLSTM layers with optional NDP fusion, and a greedy
//! top-down decoder that picks a split point and a joint
//! (nuclearity, relation) label for every multi-EDU span.

mod model;
mod parser;

use std::fmt;
use std::str::FromStr;

use crate::ndp_branch::NdpError;
use crate::ndp_corpus::NUM_CONTENT_TYPES;
use crate::nn::{argmax, Matrix};
use crate::treebank::{Nuclearity, Relation, RelationInventory, RstTree, Span, TreebankError};

pub use model::{para_flags, C2RNet, EduStates, ModelConfig};
pub use parser::{RstDims, RstParser, RST_PREFIX};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RstError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid span {span} for a document of {n_edus} EDUs")]
    InvalidSpan { span: Span, n_edus: usize },
    #[error("spans {left} and {right} are not adjacent")]
    NonAdjacent { left: Span, right: Span },
    #[error("label pair ({nuclearity}, {relation}) is not in the model's label inventory")]
    UnknownLabelPair {
        nuclearity: Nuclearity,
        relation: String,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Ndp(#[from] NdpError),
    #[error(transparent)]
    Treebank(#[from] TreebankError),
}

/// How NDP output enters the second RST layer. Changes parameter shapes,
/// so it is fixed when a model is created.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FusionMode {
    None,
    NdpEmbedding,
    NdpOneHot,
}

impl FusionMode {
    pub const ALL: [FusionMode; 3] = [
        FusionMode::None,
        FusionMode::NdpEmbedding,
        FusionMode::NdpOneHot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FusionMode::None => "none",
            FusionMode::NdpEmbedding => "ndp-embedding",
            FusionMode::NdpOneHot => "ndp-one-hot",
        }
    }

    pub fn uses_ndp(self) -> bool {
        self != FusionMode::None
    }

    /// Columns appended to the first-layer EDU vectors.
    pub fn extra_width(self, token_dim: usize) -> usize {
        match self {
            FusionMode::None => 0,
            FusionMode::NdpEmbedding => token_dim,
            FusionMode::NdpOneHot => NUM_CONTENT_TYPES,
        }
    }
}

impl fmt::Display for FusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FusionMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                format!("unknown fusion mode '{s}' (expected none, ndp-embedding or ndp-one-hot)")
            })
    }
}

/// Sorted, duplicate-free (nuclearity, relation) pairs scored by the label head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelInventory {
    pairs: Vec<(Nuclearity, Relation)>,
}

impl LabelInventory {
    pub fn new(pairs: impl IntoIterator<Item = (Nuclearity, Relation)>) -> Result<Self, RstError> {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort();
        pairs.dedup();
        if pairs.is_empty() {
            return Err(RstError::Config("label inventory is empty".into()));
        }
        Ok(LabelInventory { pairs })
    }

    /// Pairs occurring in the given trees.
    pub fn observed<'a>(trees: impl IntoIterator<Item = &'a RstTree>) -> Result<Self, RstError> {
        let mut pairs = Vec::new();
        for t in trees {
            for node in t.internal_nodes() {
                if let (Some(n), Some(r)) = (node.nuclearity(), node.relation()) {
                    pairs.push((n, r.clone()));
                }
            }
        }
        LabelInventory::new(pairs)
    }

    /// Every nuclearity with every relation.
    pub fn full(relations: &RelationInventory) -> Result<Self, RstError> {
        LabelInventory::new(
            Nuclearity::ALL
                .into_iter()
                .flat_map(|n| relations.labels().map(move |r| (n, r))),
        )
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(Nuclearity, Relation)] {
        &self.pairs
    }

    pub fn get(&self, i: usize) -> Option<&(Nuclearity, Relation)> {
        self.pairs.get(i)
    }

    pub fn index(&self, nuclearity: Nuclearity, relation: &Relation) -> Option<usize> {
        self.pairs
            .binary_search_by(|(n, r)| (*n, r).cmp(&(nuclearity, relation)))
            .ok()
    }

    /// `"NS:elaboration"` strings, in inventory order.
    pub fn to_strings(&self) -> Vec<String> {
        self.pairs.iter().map(|(n, r)| format!("{n}:{r}")).collect()
    }

    pub fn parse<S: AsRef<str>>(
        items: &[S],
        relations: &RelationInventory,
    ) -> Result<Self, RstError> {
        let pairs = items
            .iter()
            .map(|s| {
                let s = s.as_ref();
                let (n, r) = s
                    .split_once(':')
                    .ok_or_else(|| RstError::Config(format!("malformed label pair '{s}'")))?;
                Ok((n.parse::<Nuclearity>()?, relations.label(r)?))
            })
            .collect::<Result<Vec<_>, RstError>>()?;
        LabelInventory::new(pairs)
    }
}

/// One greedy decision of the decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitDecision {
    pub span: Span,
    /// The span splits between EDU `split_at` and `split_at + 1`.
    pub split_at: usize,
    pub nuclearity: Nuclearity,
    pub relation: Relation,
    pub split_probs: Vec<f64>,
    pub label_probs: Vec<f64>,
}

/// Row-wise argmax as one-hot rows.
pub fn one_hot(scores: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(scores.rows(), scores.cols());
    for r in 0..scores.rows() {
        out.set(r, argmax(scores.row(r)), 1.0);
    }
    out
}

/// Row-wise concatenation of first-layer EDU vectors with the NDP input.
/// One-hot mode accepts class scores and keeps only each row's argmax.
pub fn fuse(
    local: &Matrix,
    ndp_input: Option<&Matrix>,
    mode: FusionMode,
) -> Result<Matrix, RstError> {
    match (mode, ndp_input) {
        (FusionMode::None, None) => Ok(local.clone()),
        (FusionMode::None, Some(_)) => Err(RstError::ShapeMismatch(
            "fusion mode none takes no NDP input".into(),
        )),
        (_, None) => Err(RstError::ShapeMismatch(format!(
            "fusion mode {mode} requires NDP input"
        ))),
        (_, Some(x)) => {
            if x.rows() != local.rows() {
                return Err(RstError::ShapeMismatch(format!(
                    "{} EDU rows but {} NDP rows",
                    local.rows(),
                    x.rows()
                )));
            }
            match mode {
                FusionMode::NdpOneHot => {
                    if x.cols() != NUM_CONTENT_TYPES {
                        return Err(RstError::ShapeMismatch(format!(
                            "one-hot fusion needs {NUM_CONTENT_TYPES} columns, got {}",
                            x.cols()
                        )));
                    }
                    Ok(Matrix::concat_cols(&[local, &one_hot(x)]))
                }
                _ => Ok(Matrix::concat_cols(&[local, x])),
            }
        }
    }
}

#[cfg(test)]
mod contract_tests {
    use super::*;

    fn inv() -> RelationInventory {
        RelationInventory::new(["elaboration", "list", "joint"]).unwrap()
    }

    #[test]
    fn fuse_contract() {
        let local = Matrix::from_vec(2, 4, (0..8).map(f64::from).collect());
        assert_eq!(fuse(&local, None, FusionMode::None).unwrap(), local);

        let ndp = Matrix::from_vec(2, 3, vec![9.0; 6]);
        let f = fuse(&local, Some(&ndp), FusionMode::NdpEmbedding).unwrap();
        assert_eq!(f.shape(), (2, 7));
        assert_eq!(f.slice_cols(0, 4), local);

        let mut scores = Matrix::zeros(2, 8);
        scores.set(0, 2, 0.9);
        scores.set(1, 2, 0.4);
        let f = fuse(&local, Some(&scores), FusionMode::NdpOneHot).unwrap();
        let mut e2 = vec![0.0; 8];
        e2[2] = 1.0;
        assert_eq!(f.slice_cols(4, 8).row(0), e2.as_slice());
        assert_eq!(f.slice_cols(4, 8).row(1), e2.as_slice());

        assert!(fuse(&local, Some(&ndp), FusionMode::NdpOneHot).is_err());
        assert!(fuse(&local, None, FusionMode::NdpEmbedding).is_err());
        assert!(fuse(&local, Some(&ndp), FusionMode::None).is_err());
    }

    #[test]
    fn label_inventory_sorted_and_indexed() {
        let inv = inv();
        let el = inv.label("elaboration").unwrap();
        let list = inv.label("list").unwrap();
        let labels = LabelInventory::new([
            (Nuclearity::NS, el.clone()),
            (Nuclearity::NN, list.clone()),
            (Nuclearity::NS, el.clone()),
        ])
        .unwrap();
        assert_eq!(labels.len(), 2);
        assert_eq!(labels.index(Nuclearity::NN, &list), Some(0));
        assert_eq!(labels.index(Nuclearity::NS, &el), Some(1));
        assert_eq!(labels.index(Nuclearity::SN, &el), None);
        let back = LabelInventory::parse(&labels.to_strings(), &inv).unwrap();
        assert_eq!(back, labels);
        assert_eq!(LabelInventory::full(&inv).unwrap().len(), 9);
    }

    #[test]
    fn fusion_mode_names_round_trip() {
        for m in FusionMode::ALL {
            assert_eq!(m.name().parse::<FusionMode>().unwrap(), m);
        }
        assert!("both".parse::<FusionMode>().is_err());
    }
}
