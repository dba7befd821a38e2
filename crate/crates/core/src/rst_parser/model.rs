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

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::parser::{RstDims, RstParser};
use super::{FusionMode, LabelInventory, RstError, SplitDecision};
use crate::ndp_branch::{Granularity, NdpBranch, NdpError};
use crate::ndp_corpus::NUM_CONTENT_TYPES;
use crate::nn::{argmax, Graph, Matrix, ParamId, ParamStore, Var};
use crate::treebank::{validate, Document, RelationInventory, RstTree, Span};

/// Architecture choices fixed at model creation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelConfig {
    pub dims: RstDims,
    pub fusion: FusionMode,
    pub dropout: f64,
}

/// Joint model: RST branch plus, in fusion modes, an NDP branch sharing one
/// parameter store.
#[derive(Clone, Debug)]
pub struct C2RNet {
    pub store: ParamStore,
    pub ndp: Option<NdpBranch>,
    pub rst: RstParser,
    pub relations: RelationInventory,
    pub dropout: f64,
}

/// Intermediate EDU representations of one document.
#[derive(Clone, Copy, Debug)]
pub struct EduStates {
    pub local: Var,
    pub fused: Var,
    pub global: Var,
}

impl C2RNet {
    /// Fresh RST parameters from `seed`. Fusion modes copy the NDP
    /// parameters of `ndp_source` verbatim.
    pub fn new(
        config: ModelConfig,
        labels: LabelInventory,
        relations: RelationInventory,
        ndp_source: Option<&ParamStore>,
        seed: u64,
    ) -> Result<Self, RstError> {
        let mut store = ParamStore::new();
        let ndp = match (config.fusion, ndp_source) {
            (FusionMode::None, _) => None,
            (mode, None) => {
                return Err(RstError::Config(format!(
                    "fusion mode {mode} needs a pretrained NDP checkpoint"
                )))
            }
            (_, Some(src)) => {
                let branch =
                    NdpBranch::bind(src).map_err(|e| ndp_config_error(config.fusion, e))?;
                for (id, name, value) in src.iter() {
                    if branch.all_params().contains(&id) {
                        store.add(name, value.clone());
                    }
                }
                let branch =
                    NdpBranch::bind(&store).map_err(|e| ndp_config_error(config.fusion, e))?;
                if branch.dim != config.dims.token_dim {
                    return Err(RstError::Config(format!(
                        "NDP branch dim {} differs from token dim {}",
                        branch.dim, config.dims.token_dim
                    )));
                }
                Some(branch)
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rst = RstParser::init(&mut store, config.dims, config.fusion, labels, &mut rng);
        Ok(C2RNet {
            store,
            ndp,
            rst,
            relations,
            dropout: config.dropout,
        })
    }

    /// Rebinds a model to a loaded parameter store.
    pub fn from_store(
        store: ParamStore,
        fusion: FusionMode,
        labels: LabelInventory,
        relations: RelationInventory,
        dropout: f64,
    ) -> Result<Self, RstError> {
        let ndp = if fusion.uses_ndp() {
            Some(NdpBranch::bind(&store).map_err(|e| ndp_config_error(fusion, e))?)
        } else {
            None
        };
        let rst = RstParser::bind(&store, fusion, labels)?;
        Ok(C2RNet {
            store,
            ndp,
            rst,
            relations,
            dropout,
        })
    }

    pub fn fusion(&self) -> FusionMode {
        self.rst.fusion
    }

    pub fn labels(&self) -> &LabelInventory {
        &self.rst.labels
    }

    pub fn config(&self) -> ModelConfig {
        ModelConfig {
            dims: self.rst.dims,
            fusion: self.fusion(),
            dropout: self.dropout,
        }
    }

    pub fn rst_params(&self) -> Vec<ParamId> {
        self.rst.params()
    }

    /// NDP body and head, or empty in baseline mode.
    pub fn ndp_params(&self) -> Vec<ParamId> {
        self.ndp
            .as_ref()
            .map(|b| b.all_params())
            .unwrap_or_default()
    }

    fn check_tokens(&self, doc: &Document, tokens: &Matrix) -> Result<(), RstError> {
        if tokens.shape() != (doc.n_tokens(), self.rst.dims.token_dim) {
            return Err(RstError::ShapeMismatch(format!(
                "token matrix {:?} for document '{}' with {} tokens and model dim {}",
                tokens.shape(),
                doc.doc_id(),
                doc.n_tokens(),
                self.rst.dims.token_dim
            )));
        }
        Ok(())
    }

    /// NDP input to fusion: mixed EDU embeddings, or one-hot sentence
    /// predictions repeated for each EDU of the sentence.
    pub fn ndp_features(
        &self,
        g: &mut Graph,
        doc: &Document,
        tokens: Var,
    ) -> Result<Option<Var>, RstError> {
        let Some(ndp) = &self.ndp else {
            return Ok(None);
        };
        match self.fusion() {
            FusionMode::None => Ok(None),
            FusionMode::NdpEmbedding => {
                let s = ndp.segments(g, tokens, &Granularity::Edu.ranges(doc), self.dropout)?;
                Ok(Some(s.mixed))
            }
            FusionMode::NdpOneHot => {
                let s = ndp.segments(g, tokens, &Granularity::Sentence.ranges(doc), 0.0)?;
                let probs = ndp.classify(g, s.mixed, 0.0);
                let probs = g.value(probs).clone();
                let mut onehot = Matrix::zeros(doc.n_edus(), NUM_CONTENT_TYPES);
                for sent in 0..doc.n_sentences() {
                    let class = argmax(probs.row(sent));
                    for e in doc.sentence_edus(sent) {
                        onehot.set(e, class, 1.0);
                    }
                }
                Ok(Some(g.constant(onehot)))
            }
        }
    }

    pub fn edu_states(
        &self,
        g: &mut Graph,
        doc: &Document,
        tokens: &Matrix,
    ) -> Result<EduStates, RstError> {
        self.check_tokens(doc, tokens)?;
        let x = g.constant(tokens.clone());
        let local = self
            .rst
            .encode_edus(g, x, &doc.edu_token_ranges(), self.dropout);
        let ndp = self.ndp_features(g, doc, x)?;
        let fused = self.rst.fuse(g, local, ndp, self.dropout)?;
        let global = self.rst.contextualize(g, fused);
        Ok(EduStates {
            local,
            fused,
            global,
        })
    }

    /// Teacher-forced loss node for `gold`.
    pub fn loss(
        &self,
        g: &mut Graph,
        doc: &Document,
        tokens: &Matrix,
        gold: &RstTree,
    ) -> Result<Var, RstError> {
        if gold.leaf_count() == 1 {
            return Ok(g.constant(Matrix::zeros(1, 1)));
        }
        let states = self.edu_states(g, doc, tokens)?;
        self.rst.loss(g, states.global, gold, &para_flags(doc))
    }

    pub fn rst_loss(
        &self,
        doc: &Document,
        tokens: &Matrix,
        gold: &RstTree,
    ) -> Result<f64, RstError> {
        let mut g = Graph::new(&self.store);
        let l = self.loss(&mut g, doc, tokens, gold)?;
        Ok(g.value(l).get(0, 0))
    }

    pub fn decode(&self, doc: &Document, tokens: &Matrix) -> Result<RstTree, RstError> {
        Ok(self.decode_with_trace(doc, tokens)?.0)
    }

    /// Greedy decode plus the decision made at every internal node, in
    /// pre-order. Single-EDU documents skip the network entirely.
    pub fn decode_with_trace(
        &self,
        doc: &Document,
        tokens: &Matrix,
    ) -> Result<(RstTree, Vec<SplitDecision>), RstError> {
        if doc.n_edus() == 1 {
            return Ok((RstTree::single_leaf(), Vec::new()));
        }
        let mut g = Graph::new(&self.store);
        let states = self.edu_states(&mut g, doc, tokens)?;
        let (tree, trace) = self.rst.decode(&mut g, states.global, &para_flags(doc))?;
        debug_assert!(validate(&tree, doc).is_empty());
        Ok((tree, trace))
    }

    /// First-layer EDU vectors, `n × 2·h1`.
    pub fn encode_edus(&self, doc: &Document, tokens: &Matrix) -> Result<Matrix, RstError> {
        self.check_tokens(doc, tokens)?;
        let mut g = Graph::new(&self.store);
        let x = g.constant(tokens.clone());
        let local = self
            .rst
            .encode_edus(&mut g, x, &doc.edu_token_ranges(), 0.0);
        Ok(g.value(local).clone())
    }

    /// Inference-mode NDP input as a plain matrix.
    pub fn ndp_input(&self, doc: &Document, tokens: &Matrix) -> Result<Option<Matrix>, RstError> {
        self.check_tokens(doc, tokens)?;
        let mut g = Graph::new(&self.store);
        let x = g.constant(tokens.clone());
        Ok(self
            .ndp_features(&mut g, doc, x)?
            .map(|v| g.value(v).clone()))
    }

    /// Second-layer EDU vectors for an already fused matrix.
    pub fn contextualize(&self, fused: &Matrix) -> Result<Matrix, RstError> {
        if fused.cols() != self.rst.fused_width() || fused.rows() == 0 {
            return Err(RstError::ShapeMismatch(format!(
                "fused matrix {:?}, expected width {}",
                fused.shape(),
                self.rst.fused_width()
            )));
        }
        let mut g = Graph::new(&self.store);
        let x = g.constant(fused.clone());
        let out = self.rst.contextualize(&mut g, x);
        Ok(g.value(out).clone())
    }

    pub fn global_edus(&self, doc: &Document, tokens: &Matrix) -> Result<Matrix, RstError> {
        let mut g = Graph::new(&self.store);
        let s = self.edu_states(&mut g, doc, tokens)?;
        Ok(g.value(s.global).clone())
    }

    pub fn split_distribution(
        &self,
        span: Span,
        global: &Matrix,
        para_starts: &[bool],
    ) -> Result<Vec<f64>, RstError> {
        self.check_global(global)?;
        let mut g = Graph::new(&self.store);
        let x = g.constant(global.clone());
        let p = self.rst.split_distribution(&mut g, x, span, para_starts)?;
        Ok(g.value(p).data().to_vec())
    }

    pub fn label_distribution(
        &self,
        left: Span,
        right: Span,
        global: &Matrix,
    ) -> Result<Vec<f64>, RstError> {
        self.check_global(global)?;
        let mut g = Graph::new(&self.store);
        let x = g.constant(global.clone());
        let p = self.rst.label_distribution(&mut g, x, left, right)?;
        Ok(g.value(p).data().to_vec())
    }

    fn check_global(&self, global: &Matrix) -> Result<(), RstError> {
        if global.cols() != 2 * self.rst.dims.h2 {
            return Err(RstError::ShapeMismatch(format!(
                "EDU matrix width {}, expected {}",
                global.cols(),
                2 * self.rst.dims.h2
            )));
        }
        Ok(())
    }
}

/// `flags[e]` is true when 0-based EDU `e` opens a paragraph.
pub fn para_flags(doc: &Document) -> Vec<bool> {
    (0..doc.n_edus()).map(|e| doc.starts_paragraph(e)).collect()
}

fn ndp_config_error(mode: FusionMode, e: NdpError) -> RstError {
    RstError::Config(format!(
        "fusion mode {mode} needs an NDP checkpoint with an {NUM_CONTENT_TYPES}-way head ({e})"
    ))
}
