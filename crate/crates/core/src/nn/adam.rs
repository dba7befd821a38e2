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

use super::{Gradients, Matrix, ParamId, ParamStore};

/// Adam with per-parameter step counters and bias correction.
///
/// A parameter's moments and step count start when it first receives an
/// update, so parameters that stay frozen for a while begin fresh.
#[derive(Clone, Debug)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    state: Vec<Option<Moments>>,
}

#[derive(Clone, Debug)]
struct Moments {
    step: u64,
    m: Matrix,
    v: Matrix,
}

impl Adam {
    pub fn new(learning_rate: f64, epsilon: f64) -> Self {
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon,
            state: Vec::new(),
        }
    }

    /// Applies one update to every parameter that has a gradient and passes `trainable`.
    pub fn step(
        &mut self,
        store: &mut ParamStore,
        grads: &Gradients,
        trainable: impl Fn(ParamId) -> bool,
    ) {
        if self.state.len() < store.len() {
            self.state.resize(store.len(), None);
        }
        for (id, grad) in grads.iter() {
            if !trainable(id) {
                continue;
            }
            let (rows, cols) = grad.shape();
            let moments = self.state[id.index()].get_or_insert_with(|| Moments {
                step: 0,
                m: Matrix::zeros(rows, cols),
                v: Matrix::zeros(rows, cols),
            });
            moments.step += 1;
            let bc1 = 1.0 - self.beta1.powi(moments.step as i32);
            let bc2 = 1.0 - self.beta2.powi(moments.step as i32);
            let param = store.get_mut(id).data_mut();
            let m = moments.m.data_mut();
            let v = moments.v.data_mut();
            for (k, &g) in grad.data().iter().enumerate() {
                m[k] = self.beta1 * m[k] + (1.0 - self.beta1) * g;
                v[k] = self.beta2 * v[k] + (1.0 - self.beta2) * g * g;
                let m_hat = m[k] / bc1;
                let v_hat = v[k] / bc2;
                param[k] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Graph;

    #[test]
    fn minimizes_a_quadratic() {
        let mut store = ParamStore::new();
        let x = store.add("x", Matrix::row_vector(&[3.0, -2.0]));
        let mut adam = Adam::new(0.1, 1e-8);
        for _ in 0..500 {
            let grads = {
                let mut g = Graph::new(&store);
                let xv = g.param(x);
                let sq = g.mul(xv, xv);
                let t = g.transpose(sq);
                let s = g.mean_rows(t);
                g.backward(s)
            };
            adam.step(&mut store, &grads, |_| true);
        }
        assert!(store.get(x).data().iter().all(|v| v.abs() < 1e-2));
    }

    #[test]
    fn frozen_parameters_are_untouched() {
        let mut store = ParamStore::new();
        let x = store.add("x", Matrix::row_vector(&[1.0]));
        let mut g = Graph::new(&store);
        let xv = g.param(x);
        let sq = g.mul(xv, xv);
        let grads = g.backward(sq);
        let before = store.clone();
        Adam::new(0.1, 1e-8).step(&mut store, &grads, |_| false);
        assert_eq!(store, before);
    }
}
