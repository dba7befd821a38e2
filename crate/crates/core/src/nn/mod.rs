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

//! Minimal dense-matrix and reverse-mode autodiff toolkit backing both branches.

mod adam;
pub mod gradcheck;
mod graph;
mod lstm;
mod matrix;
pub mod params;

pub use adam::Adam;
pub use graph::{sigmoid, Gradients, Graph, Var, PROB_EPSILON};
pub use lstm::{BiLstm, LstmCell};
pub use matrix::{argmax, Matrix};
pub use params::{xavier, ParamId, ParamStore};
