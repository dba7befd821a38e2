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

//! Reverse-mode automatic differentiation over [`Matrix`] values.
//!
//! A [`Graph`] records every operation of one forward pass. Calling
//! [`Graph::backward`] on a `1 × 1` node walks the tape in reverse and
//! returns gradients for every parameter that was read through
//! [`Graph::param`].

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Matrix, ParamId, ParamStore};

/// Node handle inside a [`Graph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Debug)]
enum Op {
    Leaf,
    Param(ParamId),
    MatMul(Var, Var),
    Add(Var, Var),
    AddRow(Var, Var),
    Mul(Var, Var),
    MulConst(Var, Matrix),
    Scale(Var, f64),
    Tanh(Var),
    Sigmoid(Var),
    LstmGates(Var),
    SoftmaxRows(Var),
    Transpose(Var),
    ConcatCols(Vec<Var>),
    ConcatRows(Vec<Var>),
    SliceRows(Var, usize),
    SliceCols(Var, usize),
    GatherRows(Var, Vec<usize>),
    MeanRows(Var),
    Sum(Vec<Var>),
    Nll(Var, Vec<usize>),
}

struct Node {
    value: Matrix,
    op: Op,
}

/// Probability floor applied before taking logs in [`Graph::nll`].
pub const PROB_EPSILON: f64 = 1e-12;

/// Per-parameter gradients produced by [`Graph::backward`].
#[derive(Clone, Debug, Default)]
pub struct Gradients {
    grads: Vec<Option<Matrix>>,
}

impl Gradients {
    pub fn zeros_like(store: &ParamStore) -> Self {
        Gradients {
            grads: vec![None; store.len()],
        }
    }

    pub fn get(&self, id: ParamId) -> Option<&Matrix> {
        self.grads.get(id.0).and_then(|g| g.as_ref())
    }

    pub fn accumulate(&mut self, other: &Gradients) {
        if self.grads.len() < other.grads.len() {
            self.grads.resize(other.grads.len(), None);
        }
        for (mine, theirs) in self.grads.iter_mut().zip(&other.grads) {
            if let Some(t) = theirs {
                match mine {
                    Some(m) => m.add_assign(t),
                    None => *mine = Some(t.clone()),
                }
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for g in self.grads.iter_mut().flatten() {
            *g = g.scale(s);
        }
    }

    pub fn is_nonzero(&self, id: ParamId) -> bool {
        self.get(id)
            .is_some_and(|g| g.data().iter().any(|v| *v != 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &Matrix)> {
        self.grads
            .iter()
            .enumerate()
            .filter_map(|(i, g)| g.as_ref().map(|g| (ParamId(i), g)))
    }
}

/// Forward tape. Training graphs carry an RNG for dropout masks.
pub struct Graph<'s> {
    store: &'s ParamStore,
    nodes: Vec<Node>,
    params: HashMap<ParamId, Var>,
    rng: Option<&'s mut ChaCha8Rng>,
}

impl<'s> Graph<'s> {
    /// Inference graph: dropout is the identity.
    pub fn new(store: &'s ParamStore) -> Self {
        Graph {
            store,
            nodes: Vec::new(),
            params: HashMap::new(),
            rng: None,
        }
    }

    pub fn training(store: &'s ParamStore, rng: &'s mut ChaCha8Rng) -> Self {
        Graph {
            store,
            nodes: Vec::new(),
            params: HashMap::new(),
            rng: Some(rng),
        }
    }

    pub fn is_training(&self) -> bool {
        self.rng.is_some()
    }

    pub fn store(&self) -> &ParamStore {
        self.store
    }

    pub fn value(&self, v: Var) -> &Matrix {
        &self.nodes[v.0].value
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Matrix, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn constant(&mut self, value: Matrix) -> Var {
        self.push(value, Op::Leaf)
    }

    /// Reads a parameter; repeated reads share one node.
    pub fn param(&mut self, id: ParamId) -> Var {
        if let Some(v) = self.params.get(&id) {
            return *v;
        }
        let value = self.store.get(id).clone();
        let v = self.push(value, Op::Param(id));
        self.params.insert(id, v);
        v
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let value = self.value(a).matmul(self.value(b));
        self.push(value, Op::MatMul(a, b))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let value = self.value(a).add(self.value(b));
        self.push(value, Op::Add(a, b))
    }

    /// Adds the `1 × n` row `row` to every row of `a`.
    pub fn add_row(&mut self, a: Var, row: Var) -> Var {
        let r = self.value(row);
        assert_eq!(r.rows(), 1, "add_row expects a row vector");
        let mut value = self.value(a).clone();
        assert_eq!(value.cols(), r.cols(), "add_row width mismatch");
        for i in 0..value.rows() {
            for (v, b) in value.row_mut(i).iter_mut().zip(r.data()) {
                *v += b;
            }
        }
        self.push(value, Op::AddRow(a, row))
    }

    /// `x · W + b` with `b` broadcast over rows.
    pub fn affine(&mut self, x: Var, w: Var, b: Var) -> Var {
        let xw = self.matmul(x, w);
        self.add_row(xw, b)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let value = self.value(a).zip_map(self.value(b), |x, y| x * y);
        self.push(value, Op::Mul(a, b))
    }

    pub fn scale(&mut self, a: Var, s: f64) -> Var {
        let value = self.value(a).scale(s);
        self.push(value, Op::Scale(a, s))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let value = self.value(a).map(f64::tanh);
        self.push(value, Op::Tanh(a))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let value = self.value(a).map(sigmoid);
        self.push(value, Op::Sigmoid(a))
    }

    /// Gate activation for a fused `[i | f | g | o]` pre-activation block:
    /// sigmoid on i, f, o and tanh on g. Width must be a multiple of 4.
    pub fn lstm_gates(&mut self, a: Var) -> Var {
        let x = self.value(a);
        assert_eq!(x.cols() % 4, 0, "lstm gate width must be 4h");
        let h = x.cols() / 4;
        let mut value = x.clone();
        for r in 0..value.rows() {
            for (c, v) in value.row_mut(r).iter_mut().enumerate() {
                *v = if (2 * h..3 * h).contains(&c) {
                    v.tanh()
                } else {
                    sigmoid(*v)
                };
            }
        }
        self.push(value, Op::LstmGates(a))
    }

    pub fn softmax_rows(&mut self, a: Var) -> Var {
        let value = self.value(a).softmax_rows();
        self.push(value, Op::SoftmaxRows(a))
    }

    pub fn transpose(&mut self, a: Var) -> Var {
        let value = self.value(a).transpose();
        self.push(value, Op::Transpose(a))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        let mats: Vec<&Matrix> = parts.iter().map(|p| self.value(*p)).collect();
        let value = Matrix::concat_cols(&mats);
        self.push(value, Op::ConcatCols(parts.to_vec()))
    }

    pub fn concat_rows(&mut self, parts: &[Var]) -> Var {
        let mats: Vec<&Matrix> = parts.iter().map(|p| self.value(*p)).collect();
        let value = Matrix::concat_rows(&mats);
        self.push(value, Op::ConcatRows(parts.to_vec()))
    }

    pub fn slice_rows(&mut self, a: Var, start: usize, len: usize) -> Var {
        let value = self.value(a).slice_rows(start, len);
        self.push(value, Op::SliceRows(a, start))
    }

    pub fn slice_cols(&mut self, a: Var, start: usize, len: usize) -> Var {
        let value = self.value(a).slice_cols(start, len);
        self.push(value, Op::SliceCols(a, start))
    }

    pub fn gather_rows(&mut self, a: Var, indices: &[usize]) -> Var {
        let src = self.value(a);
        let rows: Vec<&[f64]> = indices.iter().map(|&i| src.row(i)).collect();
        let value = Matrix::from_rows(&rows);
        let value = if indices.is_empty() {
            Matrix::zeros(0, src.cols())
        } else {
            value
        };
        self.push(value, Op::GatherRows(a, indices.to_vec()))
    }

    pub fn mean_rows(&mut self, a: Var) -> Var {
        let value = self.value(a).mean_rows();
        self.push(value, Op::MeanRows(a))
    }

    /// Sum of same-shaped nodes.
    pub fn sum(&mut self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty(), "sum of nothing");
        let mut value = self.value(parts[0]).clone();
        for p in &parts[1..] {
            value.add_assign(self.value(*p));
        }
        self.push(value, Op::Sum(parts.to_vec()))
    }

    /// Mean over rows of `-ln max(p[r, gold[r]], PROB_EPSILON)`.
    pub fn nll(&mut self, probs: Var, gold: &[usize]) -> Var {
        let p = self.value(probs);
        assert_eq!(p.rows(), gold.len(), "nll gold length mismatch");
        let total: f64 = gold
            .iter()
            .enumerate()
            .map(|(r, &g)| -p.get(r, g).max(PROB_EPSILON).ln())
            .sum();
        let value = Matrix::from_vec(1, 1, vec![total / gold.len() as f64]);
        self.push(value, Op::Nll(probs, gold.to_vec()))
    }

    /// Inverted dropout. Identity on inference graphs or when `rate == 0`.
    pub fn dropout(&mut self, a: Var, rate: f64) -> Var {
        if rate <= 0.0 {
            return a;
        }
        let Some(rng) = self.rng.as_deref_mut() else {
            return a;
        };
        let (rows, cols) = self.nodes[a.0].value.shape();
        let keep = 1.0 - rate;
        let mask: Vec<f64> = (0..rows * cols)
            .map(|_| {
                if rng.gen::<f64>() < keep {
                    1.0 / keep
                } else {
                    0.0
                }
            })
            .collect();
        let mask = Matrix::from_vec(rows, cols, mask);
        let value = self.value(a).zip_map(&mask, |x, m| x * m);
        self.push(value, Op::MulConst(a, mask))
    }

    /// Gradients of the scalar node `loss` with respect to every parameter read.
    pub fn backward(&self, loss: Var) -> Gradients {
        assert_eq!(self.value(loss).shape(), (1, 1), "backward needs a scalar");
        let mut grads: Vec<Option<Matrix>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Matrix::filled(1, 1, 1.0));
        let mut out = Gradients::zeros_like(self.store);

        for i in (0..=loss.0).rev() {
            let Some(dy) = grads[i].take() else { continue };
            let node = &self.nodes[i];
            let y = &node.value;
            match &node.op {
                Op::Leaf => {}
                Op::Param(id) => {
                    let slot = &mut out.grads[id.0];
                    match slot {
                        Some(g) => g.add_assign(&dy),
                        None => *slot = Some(dy),
                    }
                }
                Op::MatMul(a, b) => {
                    let da = dy.matmul_t(self.value(*b));
                    let db = self.value(*a).t_matmul(&dy);
                    acc(&mut grads, *a, da);
                    acc(&mut grads, *b, db);
                }
                Op::Add(a, b) => {
                    acc(&mut grads, *b, dy.clone());
                    acc(&mut grads, *a, dy);
                }
                Op::AddRow(a, row) => {
                    let mut dr = vec![0.0; dy.cols()];
                    for r in 0..dy.rows() {
                        for (d, v) in dr.iter_mut().zip(dy.row(r)) {
                            *d += v;
                        }
                    }
                    acc(&mut grads, *row, Matrix::from_vec(1, dy.cols(), dr));
                    acc(&mut grads, *a, dy);
                }
                Op::Mul(a, b) => {
                    let da = dy.zip_map(self.value(*b), |d, v| d * v);
                    let db = dy.zip_map(self.value(*a), |d, v| d * v);
                    acc(&mut grads, *a, da);
                    acc(&mut grads, *b, db);
                }
                Op::MulConst(a, mask) => acc(&mut grads, *a, dy.zip_map(mask, |d, m| d * m)),
                Op::Scale(a, s) => acc(&mut grads, *a, dy.scale(*s)),
                Op::Tanh(a) => acc(&mut grads, *a, dy.zip_map(y, |d, t| d * (1.0 - t * t))),
                Op::Sigmoid(a) => acc(&mut grads, *a, dy.zip_map(y, |d, s| d * s * (1.0 - s))),
                Op::LstmGates(a) => {
                    let h = y.cols() / 4;
                    let mut dx = dy;
                    for r in 0..dx.rows() {
                        let yr = y.row(r);
                        for (c, d) in dx.row_mut(r).iter_mut().enumerate() {
                            let v = yr[c];
                            *d *= if (2 * h..3 * h).contains(&c) {
                                1.0 - v * v
                            } else {
                                v * (1.0 - v)
                            };
                        }
                    }
                    acc(&mut grads, *a, dx);
                }
                Op::SoftmaxRows(a) => {
                    let mut dx = dy;
                    for r in 0..dx.rows() {
                        let yr = y.row(r);
                        let dot: f64 = dx.row(r).iter().zip(yr).map(|(d, v)| d * v).sum();
                        for (d, v) in dx.row_mut(r).iter_mut().zip(yr) {
                            *d = v * (*d - dot);
                        }
                    }
                    acc(&mut grads, *a, dx);
                }
                Op::Transpose(a) => acc(&mut grads, *a, dy.transpose()),
                Op::ConcatCols(parts) => {
                    let mut start = 0;
                    for p in parts {
                        let w = self.value(*p).cols();
                        acc(&mut grads, *p, dy.slice_cols(start, w));
                        start += w;
                    }
                }
                Op::ConcatRows(parts) => {
                    let mut start = 0;
                    for p in parts {
                        let h = self.value(*p).rows();
                        acc(&mut grads, *p, dy.slice_rows(start, h));
                        start += h;
                    }
                }
                Op::SliceRows(a, start) => {
                    let src = self.value(*a);
                    let mut dx = Matrix::zeros(src.rows(), src.cols());
                    for r in 0..dy.rows() {
                        dx.row_mut(start + r).copy_from_slice(dy.row(r));
                    }
                    acc(&mut grads, *a, dx);
                }
                Op::SliceCols(a, start) => {
                    let src = self.value(*a);
                    let mut dx = Matrix::zeros(src.rows(), src.cols());
                    for r in 0..dy.rows() {
                        dx.row_mut(r)[*start..start + dy.cols()].copy_from_slice(dy.row(r));
                    }
                    acc(&mut grads, *a, dx);
                }
                Op::GatherRows(a, idx) => {
                    let src = self.value(*a);
                    let mut dx = Matrix::zeros(src.rows(), src.cols());
                    for (r, &i) in idx.iter().enumerate() {
                        for (d, v) in dx.row_mut(i).iter_mut().zip(dy.row(r)) {
                            *d += v;
                        }
                    }
                    acc(&mut grads, *a, dx);
                }
                Op::MeanRows(a) => {
                    let src = self.value(*a);
                    let inv = 1.0 / src.rows() as f64;
                    let mut dx = Matrix::zeros(src.rows(), src.cols());
                    for r in 0..src.rows() {
                        for (d, v) in dx.row_mut(r).iter_mut().zip(dy.data()) {
                            *d = v * inv;
                        }
                    }
                    acc(&mut grads, *a, dx);
                }
                Op::Sum(parts) => {
                    for p in parts {
                        acc(&mut grads, *p, dy.clone());
                    }
                }
                Op::Nll(probs, gold) => {
                    let p = self.value(*probs);
                    let scale = dy.get(0, 0) / gold.len() as f64;
                    let mut dx = Matrix::zeros(p.rows(), p.cols());
                    for (r, &g) in gold.iter().enumerate() {
                        let v = p.get(r, g);
                        if v > PROB_EPSILON {
                            dx.set(r, g, -scale / v);
                        }
                    }
                    acc(&mut grads, *probs, dx);
                }
            }
        }
        out
    }
}

fn acc(grads: &mut [Option<Matrix>], v: Var, g: Matrix) {
    match &mut grads[v.0] {
        Some(existing) => existing.add_assign(&g),
        slot @ None => *slot = Some(g),
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
