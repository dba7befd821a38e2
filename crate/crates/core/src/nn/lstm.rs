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

use rand::Rng;

use super::{params::xavier, Graph, Matrix, ParamId, ParamStore, Var};

/// One direction of an LSTM layer with fused `[i | f | g | o]` gate weights.
#[derive(Clone, Debug)]
pub struct LstmCell {
    pub input_dim: usize,
    pub hidden: usize,
    pub w_input: ParamId,
    pub w_hidden: ParamId,
    pub bias: ParamId,
}

impl LstmCell {
    pub fn init<R: Rng>(
        store: &mut ParamStore,
        prefix: &str,
        input_dim: usize,
        hidden: usize,
        rng: &mut R,
    ) -> Self {
        let w_input = store.add(
            format!("{prefix}.w_input"),
            xavier(rng, input_dim, 4 * hidden),
        );
        let w_hidden = store.add(
            format!("{prefix}.w_hidden"),
            xavier(rng, hidden, 4 * hidden),
        );
        // forget-gate bias starts at 1
        let mut b = Matrix::zeros(1, 4 * hidden);
        for c in hidden..2 * hidden {
            b.set(0, c, 1.0);
        }
        let bias = store.add(format!("{prefix}.bias"), b);
        LstmCell {
            input_dim,
            hidden,
            w_input,
            w_hidden,
            bias,
        }
    }

    pub fn bind(store: &ParamStore, prefix: &str) -> Option<Self> {
        let w_input = store.id(&format!("{prefix}.w_input"))?;
        let w_hidden = store.id(&format!("{prefix}.w_hidden"))?;
        let bias = store.id(&format!("{prefix}.bias"))?;
        let (input_dim, four_h) = store.get(w_input).shape();
        let hidden = four_h / 4;
        let consistent = four_h % 4 == 0
            && store.get(w_hidden).shape() == (hidden, four_h)
            && store.get(bias).shape() == (1, four_h);
        consistent.then_some(LstmCell {
            input_dim,
            hidden,
            w_input,
            w_hidden,
            bias,
        })
    }

    /// Runs over the rows of `x` from zero state. `reverse` walks the rows
    /// backwards; output row `t` always corresponds to input row `t`.
    pub fn run(&self, g: &mut Graph, x: Var, reverse: bool) -> Var {
        let steps = g.value(x).rows();
        let wx = g.param(self.w_input);
        let wh = g.param(self.w_hidden);
        let b = g.param(self.bias);
        let projected = g.affine(x, wx, b);
        let h = self.hidden;

        let mut outputs: Vec<Option<Var>> = vec![None; steps];
        let mut state: Option<(Var, Var)> = None;
        let order: Vec<usize> = if reverse {
            (0..steps).rev().collect()
        } else {
            (0..steps).collect()
        };
        for t in order {
            let mut pre = g.slice_rows(projected, t, 1);
            if let Some((h_prev, _)) = state {
                let rec = g.matmul(h_prev, wh);
                pre = g.add(pre, rec);
            }
            let gates = g.lstm_gates(pre);
            let i = g.slice_cols(gates, 0, h);
            let f = g.slice_cols(gates, h, h);
            let cand = g.slice_cols(gates, 2 * h, h);
            let o = g.slice_cols(gates, 3 * h, h);
            let mut c = g.mul(i, cand);
            if let Some((_, c_prev)) = state {
                let keep = g.mul(f, c_prev);
                c = g.add(c, keep);
            }
            let c_act = g.tanh(c);
            let h_t = g.mul(o, c_act);
            outputs[t] = Some(h_t);
            state = Some((h_t, c));
        }
        let outputs: Vec<Var> = outputs
            .into_iter()
            .map(|o| o.expect("every step visited"))
            .collect();
        g.concat_rows(&outputs)
    }
}

/// Bidirectional LSTM; output rows are `[forward ; backward]` of width `2·hidden`.
#[derive(Clone, Debug)]
pub struct BiLstm {
    pub forward: LstmCell,
    pub backward: LstmCell,
}

impl BiLstm {
    pub fn init<R: Rng>(
        store: &mut ParamStore,
        prefix: &str,
        input_dim: usize,
        hidden: usize,
        rng: &mut R,
    ) -> Self {
        BiLstm {
            forward: LstmCell::init(store, &format!("{prefix}.fwd"), input_dim, hidden, rng),
            backward: LstmCell::init(store, &format!("{prefix}.bwd"), input_dim, hidden, rng),
        }
    }

    pub fn bind(store: &ParamStore, prefix: &str) -> Option<Self> {
        let forward = LstmCell::bind(store, &format!("{prefix}.fwd"))?;
        let backward = LstmCell::bind(store, &format!("{prefix}.bwd"))?;
        (forward.input_dim == backward.input_dim && forward.hidden == backward.hidden)
            .then_some(BiLstm { forward, backward })
    }

    pub fn input_dim(&self) -> usize {
        self.forward.input_dim
    }

    pub fn hidden(&self) -> usize {
        self.forward.hidden
    }

    pub fn output_dim(&self) -> usize {
        2 * self.forward.hidden
    }

    pub fn run(&self, g: &mut Graph, x: Var) -> Var {
        let f = self.forward.run(g, x, false);
        let b = self.backward.run(g, x, true);
        g.concat_cols(&[f, b])
    }

    pub fn params(&self) -> [ParamId; 6] {
        [
            self.forward.w_input,
            self.forward.w_hidden,
            self.forward.bias,
            self.backward.w_input,
            self.backward.w_hidden,
            self.backward.bias,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn output_shape_and_direction_alignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut store = ParamStore::new();
        let lstm = BiLstm::init(&mut store, "l", 3, 2, &mut rng);
        let x = Matrix::from_rows(&[[1.0, 0.0, 0.5], [0.2, -0.3, 0.1], [0.0, 1.0, 1.0]]);
        let mut g = Graph::new(&store);
        let xv = g.constant(x.clone());
        let out = lstm.run(&mut g, xv);
        assert_eq!(g.value(out).shape(), (3, 4));

        // the backward half of the last row sees only the last input
        let mut g2 = Graph::new(&store);
        let last = g2.constant(x.slice_rows(2, 1));
        let single = lstm.backward.run(&mut g2, last, true);
        assert_eq!(&g.value(out).row(2)[2..], g2.value(single).row(0));
    }

    #[test]
    fn bind_recovers_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut store = ParamStore::new();
        BiLstm::init(&mut store, "enc", 5, 3, &mut rng);
        let bound = BiLstm::bind(&store, "enc").unwrap();
        assert_eq!((bound.input_dim(), bound.hidden()), (5, 3));
        assert!(BiLstm::bind(&store, "missing").is_none());
    }
}
