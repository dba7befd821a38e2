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

use std::ops::Range;

use rand::Rng;

use super::{FusionMode, LabelInventory, RstError, SplitDecision};
use crate::nn::{argmax, xavier, BiLstm, Graph, Matrix, ParamId, ParamStore, Var};
use crate::treebank::{RstNode, RstTree, Span};

pub const RST_PREFIX: &str = "rst";

/// Layer sizes of the RST branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RstDims {
    pub token_dim: usize,
    /// Hidden size per direction of the token-level BiLSTM.
    pub h1: usize,
    /// Hidden size per direction of the EDU-level BiLSTM.
    pub h2: usize,
    /// Width of the paragraph-boundary embedding.
    pub para_dim: usize,
    pub split_hidden: usize,
}

/// Parameter layout of the RST branch.
///
/// The split scorer sees, for a candidate split after EDU `k` of span
/// `(i, j)`, the row `[g_k ; g_{k+1} ; mean(g_i..g_j) ; para(k+1)]` where
/// `para` looks up row 1 of the boundary table when EDU `k+1` opens a
/// paragraph and row 0 otherwise.
#[derive(Clone, Debug)]
pub struct RstParser {
    pub dims: RstDims,
    pub fusion: FusionMode,
    pub labels: LabelInventory,
    pub enc1: BiLstm,
    pub enc2: BiLstm,
    pub para: ParamId,
    pub split_w1: ParamId,
    pub split_b1: ParamId,
    pub split_w2: ParamId,
    pub label_w: ParamId,
    pub label_b: ParamId,
}

fn name(part: &str) -> String {
    format!("{RST_PREFIX}.{part}")
}

impl RstParser {
    pub fn init<R: Rng>(
        store: &mut ParamStore,
        dims: RstDims,
        fusion: FusionMode,
        labels: LabelInventory,
        rng: &mut R,
    ) -> Self {
        let enc1 = BiLstm::init(store, &name("enc1"), dims.token_dim, dims.h1, rng);
        let fused = 2 * dims.h1 + fusion.extra_width(dims.token_dim);
        let enc2 = BiLstm::init(store, &name("enc2"), fused, dims.h2, rng);
        let g = 2 * dims.h2;
        let para = store.add(name("para"), xavier(rng, 2, dims.para_dim));
        let split_w1 = store.add(
            name("split.w1"),
            xavier(rng, 3 * g + dims.para_dim, dims.split_hidden),
        );
        let split_b1 = store.add(name("split.b1"), Matrix::zeros(1, dims.split_hidden));
        let split_w2 = store.add(name("split.w2"), xavier(rng, dims.split_hidden, 1));
        let label_w = store.add(name("label.w"), xavier(rng, 2 * g, labels.len()));
        let label_b = store.add(name("label.b"), Matrix::zeros(1, labels.len()));
        RstParser {
            dims,
            fusion,
            labels,
            enc1,
            enc2,
            para,
            split_w1,
            split_b1,
            split_w2,
            label_w,
            label_b,
        }
    }

    /// Recovers the layout from named parameters and checks consistency.
    pub fn bind(
        store: &ParamStore,
        fusion: FusionMode,
        labels: LabelInventory,
    ) -> Result<Self, RstError> {
        let missing =
            |what: &str| RstError::Config(format!("checkpoint lacks consistent {what} parameters"));
        let id = |part: &str| store.id(&name(part)).ok_or_else(|| missing(part));
        let enc1 = BiLstm::bind(store, &name("enc1")).ok_or_else(|| missing("rst.enc1"))?;
        let enc2 = BiLstm::bind(store, &name("enc2")).ok_or_else(|| missing("rst.enc2"))?;
        let para = id("para")?;
        let split_w1 = id("split.w1")?;
        let split_b1 = id("split.b1")?;
        let split_w2 = id("split.w2")?;
        let label_w = id("label.w")?;
        let label_b = id("label.b")?;
        let dims = RstDims {
            token_dim: enc1.input_dim(),
            h1: enc1.hidden(),
            h2: enc2.hidden(),
            para_dim: store.get(para).cols(),
            split_hidden: store.get(split_w1).cols(),
        };
        let g = 2 * dims.h2;
        let checks = [
            (
                "rst.enc2 input",
                enc2.input_dim(),
                2 * dims.h1 + fusion.extra_width(dims.token_dim),
            ),
            ("rst.para rows", store.get(para).rows(), 2),
            (
                "rst.split.w1 rows",
                store.get(split_w1).rows(),
                3 * g + dims.para_dim,
            ),
            (
                "rst.split.b1",
                store.get(split_b1).cols(),
                dims.split_hidden,
            ),
            (
                "rst.split.w2 rows",
                store.get(split_w2).rows(),
                dims.split_hidden,
            ),
            ("rst.label.w rows", store.get(label_w).rows(), 2 * g),
            ("rst.label.w cols", store.get(label_w).cols(), labels.len()),
            ("rst.label.b cols", store.get(label_b).cols(), labels.len()),
        ];
        for (what, found, expected) in checks {
            if found != expected {
                return Err(RstError::ShapeMismatch(format!(
                    "{what} is {found}, expected {expected}"
                )));
            }
        }
        Ok(RstParser {
            dims,
            fusion,
            labels,
            enc1,
            enc2,
            para,
            split_w1,
            split_b1,
            split_w2,
            label_w,
            label_b,
        })
    }

    pub fn params(&self) -> Vec<ParamId> {
        let mut v = self.enc1.params().to_vec();
        v.extend(self.enc2.params());
        v.extend([
            self.para,
            self.split_w1,
            self.split_b1,
            self.split_w2,
            self.label_w,
            self.label_b,
        ]);
        v
    }

    pub fn fused_width(&self) -> usize {
        self.enc2.input_dim()
    }

    /// Mean-pooled token BiLSTM states per EDU, `n × 2·h1`. Each EDU is run
    /// from a zero state, so EDUs with equal tokens get equal rows.
    pub fn encode_edus(
        &self,
        g: &mut Graph,
        tokens: Var,
        edus: &[Range<usize>],
        dropout: f64,
    ) -> Var {
        let tokens = g.dropout(tokens, dropout);
        let rows: Vec<Var> = edus
            .iter()
            .map(|r| {
                let x = g.slice_rows(tokens, r.start, r.len());
                let h = self.enc1.run(g, x);
                g.mean_rows(h)
            })
            .collect();
        g.concat_rows(&rows)
    }

    pub fn fuse(
        &self,
        g: &mut Graph,
        local: Var,
        ndp: Option<Var>,
        dropout: f64,
    ) -> Result<Var, RstError> {
        let fused = match ndp {
            None => local,
            Some(x) => {
                if g.value(x).rows() != g.value(local).rows() {
                    return Err(RstError::ShapeMismatch(
                        "NDP rows differ from EDU rows".into(),
                    ));
                }
                g.concat_cols(&[local, x])
            }
        };
        let width = g.value(fused).cols();
        if width != self.fused_width() {
            return Err(RstError::ShapeMismatch(format!(
                "fused width {width} but the {} model expects {}",
                self.fusion,
                self.fused_width()
            )));
        }
        Ok(g.dropout(fused, dropout))
    }

    /// EDU-level BiLSTM, `n × 2·h2`.
    pub fn contextualize(&self, g: &mut Graph, fused: Var) -> Var {
        self.enc2.run(g, fused)
    }

    fn check_span(&self, g: &Graph, global: Var, span: Span) -> Result<usize, RstError> {
        let n = g.value(global).rows();
        if span.first < 1 || span.first > span.last || span.last > n {
            return Err(RstError::InvalidSpan { span, n_edus: n });
        }
        Ok(n)
    }

    /// Softmax over the `j − i` split points of `span`, as a `1 × (j−i)` row.
    /// `para_starts[e]` tells whether 0-based EDU `e` opens a paragraph.
    pub fn split_distribution(
        &self,
        g: &mut Graph,
        global: Var,
        span: Span,
        para_starts: &[bool],
    ) -> Result<Var, RstError> {
        let n = self.check_span(g, global, span)?;
        if span.is_leaf() {
            return Err(RstError::InvalidSpan { span, n_edus: n });
        }
        let (i, j) = (span.first, span.last);
        let m = j - i;
        let gw = 2 * self.dims.h2;
        let w1 = g.param(self.split_w1);
        let w_left = g.slice_rows(w1, 0, gw);
        let w_right = g.slice_rows(w1, gw, gw);
        let w_mean = g.slice_rows(w1, 2 * gw, gw);
        let w_para = g.slice_rows(w1, 3 * gw, self.dims.para_dim);

        // candidate k (1-based) reads rows k-1 and k
        let left = g.slice_rows(global, i - 1, m);
        let right = g.slice_rows(global, i, m);
        let whole = g.slice_rows(global, i - 1, m + 1);
        let mean = g.mean_rows(whole);
        let flags: Vec<usize> = (i..j)
            .map(|k| usize::from(para_starts.get(k).copied().unwrap_or(false)))
            .collect();
        let table = g.param(self.para);
        let para = g.gather_rows(table, &flags);

        let a = g.matmul(left, w_left);
        let b = g.matmul(right, w_right);
        let c = g.matmul(para, w_para);
        let shared = g.matmul(mean, w_mean);
        let b1 = g.param(self.split_b1);
        let shared = g.add(shared, b1);
        let pre = g.sum(&[a, b, c]);
        let pre = g.add_row(pre, shared);
        let hidden = g.tanh(pre);
        let w2 = g.param(self.split_w2);
        let scores = g.matmul(hidden, w2);
        let scores = g.transpose(scores);
        Ok(g.softmax_rows(scores))
    }

    /// Softmax over the label inventory for joining `left` and `right`.
    pub fn label_distribution(
        &self,
        g: &mut Graph,
        global: Var,
        left: Span,
        right: Span,
    ) -> Result<Var, RstError> {
        self.check_span(g, global, left)?;
        self.check_span(g, global, right)?;
        if left.last + 1 != right.first {
            return Err(RstError::NonAdjacent { left, right });
        }
        let l = g.slice_rows(global, left.first - 1, left.len());
        let l = g.mean_rows(l);
        let r = g.slice_rows(global, right.first - 1, right.len());
        let r = g.mean_rows(r);
        let x = g.concat_cols(&[l, r]);
        let w = g.param(self.label_w);
        let b = g.param(self.label_b);
        let logits = g.affine(x, w, b);
        Ok(g.softmax_rows(logits))
    }

    /// Greedy top-down decoding of EDUs `1..=n`. Ties go to the smallest
    /// split index and the first label pair in inventory order.
    pub fn decode(
        &self,
        g: &mut Graph,
        global: Var,
        para_starts: &[bool],
    ) -> Result<(RstTree, Vec<SplitDecision>), RstError> {
        let n = g.value(global).rows();
        let mut trace = Vec::with_capacity(n.saturating_sub(1));
        let root = self.decode_span(g, global, Span::new(1, n), para_starts, &mut trace)?;
        Ok((RstTree::new(root), trace))
    }

    fn decode_span(
        &self,
        g: &mut Graph,
        global: Var,
        span: Span,
        para_starts: &[bool],
        trace: &mut Vec<SplitDecision>,
    ) -> Result<RstNode, RstError> {
        if span.is_leaf() {
            return Ok(RstNode::leaf(span.first));
        }
        let sp = self.split_distribution(g, global, span, para_starts)?;
        let split_probs = g.value(sp).data().to_vec();
        let k = span.first + argmax(&split_probs);
        let (left, right) = (Span::new(span.first, k), Span::new(k + 1, span.last));
        let lp = self.label_distribution(g, global, left, right)?;
        let label_probs = g.value(lp).data().to_vec();
        let (nuclearity, relation) = self.labels.pairs()[argmax(&label_probs)].clone();
        trace.push(SplitDecision {
            span,
            split_at: k,
            nuclearity,
            relation: relation.clone(),
            split_probs,
            label_probs,
        });
        let l = self.decode_span(g, global, left, para_starts, trace)?;
        let r = self.decode_span(g, global, right, para_starts, trace)?;
        Ok(RstNode::internal(nuclearity, relation, l, r))
    }

    /// Teacher-forced loss: split and label cross-entropy summed over gold
    /// internal nodes, divided by their count. Zero for single-EDU trees.
    pub fn loss(
        &self,
        g: &mut Graph,
        global: Var,
        gold: &RstTree,
        para_starts: &[bool],
    ) -> Result<Var, RstError> {
        let nodes = gold.internal_nodes();
        if nodes.is_empty() {
            return Ok(g.constant(Matrix::zeros(1, 1)));
        }
        let mut terms = Vec::with_capacity(2 * nodes.len());
        for node in &nodes {
            let (l, r) = node.children().expect("internal node");
            let nuc = node.nuclearity().expect("internal node");
            let rel = node.relation().expect("internal node");
            let pair = self
                .labels
                .index(nuc, rel)
                .ok_or_else(|| RstError::UnknownLabelPair {
                    nuclearity: nuc,
                    relation: rel.to_string(),
                })?;
            let sp = self.split_distribution(g, global, node.span, para_starts)?;
            terms.push(g.nll(sp, &[l.span.last - node.span.first]));
            let lp = self.label_distribution(g, global, l.span, r.span)?;
            terms.push(g.nll(lp, &[pair]));
        }
        let total = g.sum(&terms);
        Ok(g.scale(total, 1.0 / nodes.len() as f64))
    }
}
