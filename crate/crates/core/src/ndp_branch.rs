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

//! Content-structure encoder and content-type classifier.
//!
//! Two attention stages turn token vectors into segment embeddings:
//!
//! * local (additive) attention inside each segment:
//!   `u_t = tanh(x_t·W1 + b1)`, `a = softmax_t(u_t·v)`, `local = Σ a_t x_t`
//! * global scaled dot-product self-attention across the document's
//!   local segment embeddings.
//!
//! The mixed embedding is `local + global`. A linear softmax head maps mixed
//! embeddings to the eight content types. Segments are sentences when
//! training on NDP data and EDUs when feeding the RST branch; both use the
//! same parameters.
//!
//! Matrices follow the row-vector convention, so the classifier weight is
//! stored as `dim × 8`.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ndp_corpus::{ContentType, NUM_CONTENT_TYPES};
use crate::nn::{xavier, Graph, Matrix, ParamId, ParamStore, Var, PROB_EPSILON};
use crate::treebank::Document;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NdpError {
    #[error("segment has no tokens")]
    EmptySegment,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("missing or malformed NDP parameter '{0}'")]
    MissingParam(String),
}

/// Which spans of a document are treated as segments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Granularity {
    Sentence,
    Edu,
}

impl Granularity {
    pub fn ranges(self, doc: &Document) -> Vec<Range<usize>> {
        match self {
            Granularity::Sentence => doc.sentence_token_ranges(),
            Granularity::Edu => doc.edu_token_ranges(),
        }
    }
}

/// Parameter layout of the NDP branch inside a [`ParamStore`].
#[derive(Clone, Debug, PartialEq)]
pub struct NdpBranch {
    pub dim: usize,
    pub w1: ParamId,
    pub b1: ParamId,
    pub v: ParamId,
    pub wq: ParamId,
    pub wk: ParamId,
    pub wv: ParamId,
    pub wc: ParamId,
    pub bc: ParamId,
}

pub const NDP_PREFIX: &str = "ndp";
const BODY_NAMES: [&str; 6] = ["w1", "b1", "v", "wq", "wk", "wv"];
const HEAD_NAMES: [&str; 2] = ["wc", "bc"];

/// Forward-pass outputs for one document.
#[derive(Clone, Copy, Debug)]
pub struct SegmentVars {
    pub local: Var,
    pub global: Var,
    pub mixed: Var,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentEmbeddings {
    pub local: Matrix,
    pub global: Matrix,
    pub mixed: Matrix,
}

impl NdpBranch {
    pub fn init(store: &mut ParamStore, dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let p = |n: &str| format!("{NDP_PREFIX}.{n}");
        let w1 = store.add(p("w1"), xavier(rng, dim, dim));
        let b1 = store.add(p("b1"), Matrix::zeros(1, dim));
        let v = store.add(p("v"), xavier(rng, dim, 1));
        let wq = store.add(p("wq"), xavier(rng, dim, dim));
        let wk = store.add(p("wk"), xavier(rng, dim, dim));
        let wv = store.add(p("wv"), xavier(rng, dim, dim));
        let wc = store.add(p("wc"), xavier(rng, dim, NUM_CONTENT_TYPES));
        let bc = store.add(p("bc"), Matrix::zeros(1, NUM_CONTENT_TYPES));
        NdpBranch {
            dim,
            w1,
            b1,
            v,
            wq,
            wk,
            wv,
            wc,
            bc,
        }
    }

    /// Recovers the layout by name and checks every shape.
    pub fn bind(store: &ParamStore) -> Result<Self, NdpError> {
        let id = |n: &str| {
            let name = format!("{NDP_PREFIX}.{n}");
            store.id(&name).ok_or(NdpError::MissingParam(name))
        };
        let w1 = id("w1")?;
        let dim = store.get(w1).rows();
        let branch = NdpBranch {
            dim,
            w1,
            b1: id("b1")?,
            v: id("v")?,
            wq: id("wq")?,
            wk: id("wk")?,
            wv: id("wv")?,
            wc: id("wc")?,
            bc: id("bc")?,
        };
        let expect = [
            (branch.w1, (dim, dim)),
            (branch.b1, (1, dim)),
            (branch.v, (dim, 1)),
            (branch.wq, (dim, dim)),
            (branch.wk, (dim, dim)),
            (branch.wv, (dim, dim)),
            (branch.wc, (dim, NUM_CONTENT_TYPES)),
            (branch.bc, (1, NUM_CONTENT_TYPES)),
        ];
        for (pid, shape) in expect {
            if store.get(pid).shape() != shape {
                return Err(NdpError::ShapeMismatch(format!(
                    "{} is {:?}, expected {:?}",
                    store.name(pid),
                    store.get(pid).shape(),
                    shape
                )));
            }
        }
        Ok(branch)
    }

    /// Attention body (everything except the classifier head).
    pub fn body_params(&self) -> [ParamId; 6] {
        [self.w1, self.b1, self.v, self.wq, self.wk, self.wv]
    }

    pub fn head_params(&self) -> [ParamId; 2] {
        [self.wc, self.bc]
    }

    pub fn all_params(&self) -> Vec<ParamId> {
        let mut v = self.body_params().to_vec();
        v.extend(self.head_params());
        v
    }

    pub fn body_names() -> Vec<String> {
        BODY_NAMES
            .iter()
            .map(|n| format!("{NDP_PREFIX}.{n}"))
            .collect()
    }

    pub fn head_names() -> Vec<String> {
        HEAD_NAMES
            .iter()
            .map(|n| format!("{NDP_PREFIX}.{n}"))
            .collect()
    }

    /// Returns (weights `1 × m`, pooled `1 × dim`).
    pub fn local_attention(&self, g: &mut Graph, x: Var) -> (Var, Var) {
        let w1 = g.param(self.w1);
        let b1 = g.param(self.b1);
        let v = g.param(self.v);
        let pre = g.affine(x, w1, b1);
        let u = g.tanh(pre);
        let scores = g.matmul(u, v);
        let scores = g.transpose(scores);
        let weights = g.softmax_rows(scores);
        let pooled = g.matmul(weights, x);
        (weights, pooled)
    }

    /// Returns (weights `n × n`, attended `n × dim`).
    pub fn global_attention(&self, g: &mut Graph, local: Var) -> (Var, Var) {
        let wq = g.param(self.wq);
        let wk = g.param(self.wk);
        let wv = g.param(self.wv);
        let q = g.matmul(local, wq);
        let k = g.matmul(local, wk);
        let values = g.matmul(local, wv);
        let kt = g.transpose(k);
        let scores = g.matmul(q, kt);
        let scores = g.scale(scores, 1.0 / (self.dim as f64).sqrt());
        let weights = g.softmax_rows(scores);
        let out = g.matmul(weights, values);
        (weights, out)
    }

    /// Local, global and mixed embeddings for the given token ranges.
    /// Dropout is applied to the token vectors on training graphs.
    pub fn segments(
        &self,
        g: &mut Graph,
        tokens: Var,
        ranges: &[Range<usize>],
        dropout: f64,
    ) -> Result<SegmentVars, NdpError> {
        if ranges.is_empty() {
            return Err(NdpError::EmptySegment);
        }
        let width = g.value(tokens).cols();
        if width != self.dim {
            return Err(NdpError::ShapeMismatch(format!(
                "token vectors have width {width}, branch expects {}",
                self.dim
            )));
        }
        let tokens = g.dropout(tokens, dropout);
        let mut pooled = Vec::with_capacity(ranges.len());
        for r in ranges {
            if r.is_empty() {
                return Err(NdpError::EmptySegment);
            }
            let x = g.slice_rows(tokens, r.start, r.len());
            pooled.push(self.local_attention(g, x).1);
        }
        let local = g.concat_rows(&pooled);
        let (_, global) = self.global_attention(g, local);
        let mixed = g.add(local, global);
        Ok(SegmentVars {
            local,
            global,
            mixed,
        })
    }

    /// Per-segment content type distribution `n × 8`.
    pub fn classify(&self, g: &mut Graph, mixed: Var, dropout: f64) -> Var {
        let mixed = g.dropout(mixed, dropout);
        let wc = g.param(self.wc);
        let bc = g.param(self.bc);
        let logits = g.affine(mixed, wc, bc);
        g.softmax_rows(logits)
    }
}

/// Attention weights and pooled output of one segment.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalAttention {
    pub weights: Vec<f64>,
    pub output: Vec<f64>,
}

/// Standalone NDP model: parameters plus layout.
#[derive(Clone, Debug, PartialEq)]
pub struct NdpModel {
    pub store: ParamStore,
    pub branch: NdpBranch,
    pub dropout: f64,
}

impl NdpModel {
    pub fn new(dim: usize, dropout: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut store = ParamStore::new();
        let branch = NdpBranch::init(&mut store, dim, &mut rng);
        NdpModel {
            store,
            branch,
            dropout,
        }
    }

    pub fn from_store(store: ParamStore, dropout: f64) -> Result<Self, NdpError> {
        let branch = NdpBranch::bind(&store)?;
        Ok(NdpModel {
            store,
            branch,
            dropout,
        })
    }

    pub fn dim(&self) -> usize {
        self.branch.dim
    }

    pub fn local_attention(&self, tokens: &Matrix) -> Result<LocalAttention, NdpError> {
        if tokens.rows() == 0 {
            return Err(NdpError::EmptySegment);
        }
        self.check_width(tokens)?;
        let mut g = Graph::new(&self.store);
        let x = g.constant(tokens.clone());
        let (w, out) = self.branch.local_attention(&mut g, x);
        Ok(LocalAttention {
            weights: g.value(w).data().to_vec(),
            output: g.value(out).data().to_vec(),
        })
    }

    /// Returns (weights `n × n`, output `n × dim`).
    pub fn global_attention(&self, local: &Matrix) -> Result<(Matrix, Matrix), NdpError> {
        if local.rows() == 0 {
            return Err(NdpError::EmptySegment);
        }
        self.check_width(local)?;
        let mut g = Graph::new(&self.store);
        let x = g.constant(local.clone());
        let (w, out) = self.branch.global_attention(&mut g, x);
        Ok((g.value(w).clone(), g.value(out).clone()))
    }

    pub fn classify(&self, mixed: &Matrix) -> Result<Matrix, NdpError> {
        self.check_width(mixed)?;
        let mut g = Graph::new(&self.store);
        let x = g.constant(mixed.clone());
        let p = self.branch.classify(&mut g, x, 0.0);
        Ok(g.value(p).clone())
    }

    pub fn segment_embeddings(
        &self,
        tokens: &Matrix,
        ranges: &[Range<usize>],
    ) -> Result<SegmentEmbeddings, NdpError> {
        let mut g = Graph::new(&self.store);
        let x = g.constant(tokens.clone());
        let s = self.branch.segments(&mut g, x, ranges, 0.0)?;
        Ok(SegmentEmbeddings {
            local: g.value(s.local).clone(),
            global: g.value(s.global).clone(),
            mixed: g.value(s.mixed).clone(),
        })
    }

    /// Content-type distribution per sentence of `doc`.
    pub fn sentence_probabilities(
        &self,
        doc: &Document,
        tokens: &Matrix,
    ) -> Result<Matrix, NdpError> {
        let mut g = Graph::new(&self.store);
        let x = g.constant(tokens.clone());
        let s = self
            .branch
            .segments(&mut g, x, &Granularity::Sentence.ranges(doc), 0.0)?;
        let p = self.branch.classify(&mut g, s.mixed, 0.0);
        Ok(g.value(p).clone())
    }

    pub fn predict(&self, doc: &Document, tokens: &Matrix) -> Result<Vec<ContentType>, NdpError> {
        let p = self.sentence_probabilities(doc, tokens)?;
        Ok((0..p.rows())
            .map(|r| ContentType::from_code(p.argmax_row(r)).expect("8 columns"))
            .collect())
    }

    fn check_width(&self, m: &Matrix) -> Result<(), NdpError> {
        if m.cols() != self.dim() {
            return Err(NdpError::ShapeMismatch(format!(
                "input width {} does not match branch dim {}",
                m.cols(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Elementwise sum of local and global segment embeddings.
pub fn mix(local: &Matrix, global: &Matrix) -> Result<Matrix, NdpError> {
    if local.shape() != global.shape() {
        return Err(NdpError::ShapeMismatch(format!(
            "local {:?} vs global {:?}",
            local.shape(),
            global.shape()
        )));
    }
    Ok(local.add(global))
}

/// Mean negative log probability of the gold classes. Probabilities are
/// floored at `1e-12` before the log, so a zero gold probability costs
/// about 27.6 rather than infinity.
pub fn ndp_loss(probs: &Matrix, gold: &[ContentType]) -> Result<f64, NdpError> {
    if probs.rows() != gold.len() || probs.cols() != NUM_CONTENT_TYPES {
        return Err(NdpError::ShapeMismatch(format!(
            "probabilities {:?} vs {} gold labels",
            probs.shape(),
            gold.len()
        )));
    }
    if gold.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = gold
        .iter()
        .enumerate()
        .map(|(r, c)| -probs.get(r, c.code()).max(PROB_EPSILON).ln())
        .sum();
    Ok(total / gold.len() as f64)
}
