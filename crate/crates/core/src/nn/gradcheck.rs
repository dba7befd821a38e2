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

//! Central finite differences, used as an oracle for [`Graph::backward`](super::Graph::backward).

use super::{Gradients, Matrix, ParamStore};

/// Denominator floor of the relative error, so parameters whose true
/// gradient is (near) zero are judged by absolute error.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-4;

/// Numeric gradient of `f` for every scalar in `store`, indexed by parameter.
pub fn central_differences(
    store: &ParamStore,
    step: f64,
    f: impl Fn(&ParamStore) -> f64,
) -> Vec<Matrix> {
    let mut work = store.clone();
    store
        .ids()
        .map(|id| {
            let (rows, cols) = store.get(id).shape();
            let mut out = Matrix::zeros(rows, cols);
            for k in 0..rows * cols {
                let orig = store.get(id).data()[k];
                work.get_mut(id).data_mut()[k] = orig + step;
                let plus = f(&work);
                work.get_mut(id).data_mut()[k] = orig - step;
                let minus = f(&work);
                work.get_mut(id).data_mut()[k] = orig;
                out.data_mut()[k] = (plus - minus) / (2.0 * step);
            }
            out
        })
        .collect()
}

/// Largest `|a - n| / max(|a|, |n|, RELATIVE_ERROR_FLOOR)` over all scalars.
pub fn max_relative_error(store: &ParamStore, analytic: &Gradients, numeric: &[Matrix]) -> f64 {
    let mut worst = 0.0f64;
    for id in store.ids() {
        let n = &numeric[id.index()];
        for (k, nv) in n.data().iter().enumerate() {
            let a = analytic.get(id).map_or(0.0, |g| g.data()[k]);
            let denom = a.abs().max(nv.abs()).max(RELATIVE_ERROR_FLOOR);
            worst = worst.max((a - nv).abs() / denom);
        }
    }
    worst
}
