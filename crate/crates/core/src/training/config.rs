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

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::rst_parser::{FusionMode, RstDims};
use crate::treebank::RelationInventory;

use super::TrainingError;

/// Which (nuclearity, relation) pairs the label head scores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelSet {
    /// Pairs seen in the training trees.
    Observed,
    /// Every nuclearity with every relation of the inventory.
    Full,
}

/// Hyperparameters and data locations. Serialized as flat `key = value`
/// lines; `#` starts a comment.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub adam_epsilon: f64,
    pub epochs: usize,
    pub ndp_freeze_epochs: usize,
    pub dropout: f64,
    pub seed: u64,
    /// Documents per optimizer step; gradients are averaged over the batch.
    pub batch_size: usize,
    pub fusion: FusionMode,
    pub embedding_dim: usize,
    pub embedding_seed: u64,
    /// Precomputed vectors; hash embeddings are used when absent.
    pub embeddings_file: Option<PathBuf>,
    pub h1: usize,
    pub h2: usize,
    pub para_dim: usize,
    pub split_hidden: usize,
    pub labels: LabelSet,
    /// Comma-separated relation names, or `coarse`.
    pub relations: String,
    /// Training-set Full-F is logged every this many epochs and at the
    /// last epoch; `0` logs it only at the last epoch.
    pub eval_every: usize,
    pub train_path: Option<PathBuf>,
    pub dev_path: Option<PathBuf>,
    pub test_path: Option<PathBuf>,
    pub ndp_checkpoint: Option<PathBuf>,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            learning_rate: 5e-4,
            adam_epsilon: 1e-6,
            epochs: 150,
            ndp_freeze_epochs: 40,
            dropout: 0.5,
            seed: 0,
            batch_size: 1,
            fusion: FusionMode::NdpEmbedding,
            embedding_dim: 64,
            embedding_seed: 0,
            embeddings_file: None,
            h1: 128,
            h2: 256,
            para_dim: 16,
            split_hidden: 128,
            labels: LabelSet::Observed,
            relations: "coarse".into(),
            eval_every: 0,
            train_path: None,
            dev_path: None,
            test_path: None,
            ndp_checkpoint: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("'{key}' expects a number, got '{value}'"))
}

fn path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

impl TrainingConfig {
    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key {
            "learning_rate" => self.learning_rate = parse_num(key, v)?,
            "adam_epsilon" => self.adam_epsilon = parse_num(key, v)?,
            "epochs" => self.epochs = parse_num(key, v)?,
            "ndp_freeze_epochs" => self.ndp_freeze_epochs = parse_num(key, v)?,
            "dropout" => self.dropout = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "batch_size" => self.batch_size = parse_num(key, v)?,
            "fusion" => self.fusion = v.parse()?,
            "embedding_dim" => self.embedding_dim = parse_num(key, v)?,
            "embedding_seed" => self.embedding_seed = parse_num(key, v)?,
            "embeddings_file" => self.embeddings_file = path(v),
            "h1" => self.h1 = parse_num(key, v)?,
            "h2" => self.h2 = parse_num(key, v)?,
            "para_dim" => self.para_dim = parse_num(key, v)?,
            "split_hidden" => self.split_hidden = parse_num(key, v)?,
            "labels" => {
                self.labels = match v {
                    "observed" => LabelSet::Observed,
                    "full" => LabelSet::Full,
                    _ => return Err(format!("'labels' expects observed or full, got '{v}'")),
                }
            }
            "relations" => self.relations = v.to_string(),
            "eval_every" => self.eval_every = parse_num(key, v)?,
            "train_path" => self.train_path = path(v),
            "dev_path" => self.dev_path = path(v),
            "test_path" => self.test_path = path(v),
            "ndp_checkpoint" => self.ndp_checkpoint = path(v),
            _ => return Err(format!("unknown config key '{key}'")),
        }
        Ok(())
    }

    /// Defaults overridden by the lines of `text`.
    pub fn parse(text: &str) -> Result<Self, TrainingError> {
        let mut c = TrainingConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                TrainingError::Config(format!("line {}: expected key = value", i + 1))
            })?;
            c.set(k.trim(), v)
                .map_err(|m| TrainingError::Config(format!("line {}: {m}", i + 1)))?;
        }
        Ok(c)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, TrainingError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| TrainingError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        TrainingConfig::parse(&text)
    }

    /// Every field, keyed as in the file format.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let p = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        let entries = [
            ("learning_rate", format!("{:e}", self.learning_rate)),
            ("adam_epsilon", format!("{:e}", self.adam_epsilon)),
            ("epochs", self.epochs.to_string()),
            ("ndp_freeze_epochs", self.ndp_freeze_epochs.to_string()),
            ("dropout", self.dropout.to_string()),
            ("seed", self.seed.to_string()),
            ("batch_size", self.batch_size.to_string()),
            ("fusion", self.fusion.to_string()),
            ("embedding_dim", self.embedding_dim.to_string()),
            ("embedding_seed", self.embedding_seed.to_string()),
            ("embeddings_file", p(&self.embeddings_file)),
            ("h1", self.h1.to_string()),
            ("h2", self.h2.to_string()),
            ("para_dim", self.para_dim.to_string()),
            ("split_hidden", self.split_hidden.to_string()),
            (
                "labels",
                match self.labels {
                    LabelSet::Observed => "observed".into(),
                    LabelSet::Full => "full".into(),
                },
            ),
            ("relations", self.relations.clone()),
            ("eval_every", self.eval_every.to_string()),
            ("train_path", p(&self.train_path)),
            ("dev_path", p(&self.dev_path)),
            ("test_path", p(&self.test_path)),
            ("ndp_checkpoint", p(&self.ndp_checkpoint)),
        ];
        entries
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.to_map() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn validate(&self) -> Result<(), TrainingError> {
        let fail = |m: String| Err(TrainingError::Config(m));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if self.adam_epsilon.is_nan() || self.adam_epsilon <= 0.0 {
            return fail(format!(
                "adam_epsilon must be positive, got {}",
                self.adam_epsilon
            ));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return fail(format!("dropout must be in [0, 1), got {}", self.dropout));
        }
        if self.ndp_freeze_epochs > self.epochs {
            return fail(format!(
                "ndp_freeze_epochs ({}) exceeds epochs ({})",
                self.ndp_freeze_epochs, self.epochs
            ));
        }
        for (k, v) in [
            ("batch_size", self.batch_size),
            ("embedding_dim", self.embedding_dim),
            ("h1", self.h1),
            ("h2", self.h2),
            ("para_dim", self.para_dim),
            ("split_hidden", self.split_hidden),
        ] {
            if v == 0 {
                return fail(format!("{k} must be at least 1"));
            }
        }
        self.relation_inventory()?;
        Ok(())
    }

    pub fn relation_inventory(&self) -> Result<RelationInventory, TrainingError> {
        if self.relations.trim() == "coarse" {
            return Ok(RelationInventory::coarse());
        }
        RelationInventory::new(
            self.relations
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty()),
        )
        .map_err(|e| TrainingError::Config(format!("relations: {e}")))
    }

    pub fn rst_dims(&self, token_dim: usize) -> RstDims {
        RstDims {
            token_dim,
            h1: self.h1,
            h2: self.h2,
            para_dim: self.para_dim,
            split_hidden: self.split_hidden,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule() {
        let c = TrainingConfig::default();
        assert_eq!(c.learning_rate, 5e-4);
        assert_eq!(c.adam_epsilon, 1e-6);
        assert_eq!(c.epochs, 150);
        assert_eq!(c.ndp_freeze_epochs, 40);
        assert_eq!(c.dropout, 0.5);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn text_round_trip() {
        let c = TrainingConfig {
            fusion: FusionMode::NdpOneHot,
            relations: "elaboration, list".into(),
            train_path: Some("data/train.jsonl".into()),
            learning_rate: 1e-3,
            ..TrainingConfig::default()
        };
        let back = TrainingConfig::parse(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn comments_and_unknown_keys() {
        let c = TrainingConfig::parse("# comment\nepochs = 3  # trailing\n\nseed=9\n").unwrap();
        assert_eq!((c.epochs, c.seed), (3, 9));
        let err = TrainingConfig::parse("epochs = 3\nlr = 1")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2") && err.contains("'lr'"), "{err}");
        assert!(TrainingConfig::parse("epochs three").is_err());
    }

    #[test]
    fn invariants() {
        let with = |f: fn(&mut TrainingConfig)| {
            let mut c = TrainingConfig::default();
            f(&mut c);
            c.validate()
        };
        assert!(with(|c| c.ndp_freeze_epochs = 200).is_err());
        assert!(with(|c| c.batch_size = 0).is_err());
        assert!(with(|c| c.adam_epsilon = f64::NAN).is_err());
        assert!(with(|c| {
            c.epochs = 0;
            c.ndp_freeze_epochs = 0;
        })
        .is_ok());
        assert!(with(|c| c.relations = "span".into()).is_err());
    }
}
