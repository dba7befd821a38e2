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

//! Seeded generators for trees and documents used by tests, examples and
//! desk-scale experiments.
//!
//! Treebank documents carry learnable structure: the EDU that opens the
//! right child of a node starts with a cue token naming the node's depth,
//! nuclearity and relation, so a parser can recover every split by reading
//! the shallowest cue. NDP documents plant a label-specific cue word in
//! every sentence.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ndp_corpus::{content_types, ContentType};
use crate::treebank::{Document, Nuclearity, Relation, RelationInventory, RstNode, RstTree};

const FILLER: [&str; 16] = [
    "the",
    "a",
    "market",
    "said",
    "company",
    "shares",
    "year",
    "report",
    "price",
    "new",
    "also",
    "would",
    "officials",
    "on",
    "in",
    "was",
];

/// Uniformly random split points, nuclearity and relation over `n ≥ 1` EDUs.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, relations: &RelationInventory) -> RstTree {
    assert!(n >= 1, "a tree needs at least one EDU");
    let labels: Vec<Relation> = relations.labels().collect();
    RstTree::new(random_node(rng, 1, n, &labels))
}

fn random_node<R: Rng>(rng: &mut R, first: usize, last: usize, labels: &[Relation]) -> RstNode {
    if first == last {
        return RstNode::leaf(first);
    }
    let k = rng.gen_range(first..last);
    let nuc = *Nuclearity::ALL.choose(rng).expect("three patterns");
    let rel = labels.choose(rng).expect("non-empty inventory").clone();
    let l = random_node(rng, first, k, labels);
    let r = random_node(rng, k + 1, last, labels);
    RstNode::internal(nuc, rel, l, r)
}

/// Settings for [`treebank_documents`].
#[derive(Clone, Debug)]
pub struct TreebankSpec {
    pub documents: usize,
    pub min_edus: usize,
    pub max_edus: usize,
    /// Relations drawn for internal nodes.
    pub relations: Vec<String>,
    pub seed: u64,
}

impl Default for TreebankSpec {
    fn default() -> Self {
        TreebankSpec {
            documents: 20,
            min_edus: 5,
            max_edus: 10,
            relations: ["elaboration", "joint", "attribution", "contrast"]
                .map(String::from)
                .to_vec(),
            seed: 0,
        }
    }
}

/// Cue token opening the right child of a node at `depth`.
pub fn split_cue(depth: usize, nuclearity: Nuclearity, relation: &Relation) -> String {
    format!("<d{depth}_{nuclearity}_{relation}>")
}

/// Documents with gold trees, 1–2 EDUs per sentence and paragraph breaks
/// at some sentence starts.
pub fn treebank_documents(spec: &TreebankSpec, relations: &RelationInventory) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let labels: Vec<Relation> = spec
        .relations
        .iter()
        .map(|r| {
            relations
                .label(r)
                .expect("generator relations are in the inventory")
        })
        .collect();
    (0..spec.documents)
        .map(|d| {
            let n = rng.gen_range(spec.min_edus..=spec.max_edus);
            let tree = RstTree::new(random_node(&mut rng, 1, n, &labels));
            let mut cues: Vec<Option<String>> = vec![None; n];
            plant_cues(tree.root(), 0, &mut cues);
            let edus: Vec<Vec<String>> = cues
                .into_iter()
                .map(|cue| {
                    let mut words: Vec<String> = cue.into_iter().collect();
                    for _ in 0..rng.gen_range(1..=3) {
                        words.push(FILLER.choose(&mut rng).expect("filler").to_string());
                    }
                    words
                })
                .collect();
            let (sentences, paragraphs) = layout(&mut rng, n);
            let mut tokens = Vec::new();
            let mut bounds = Vec::new();
            for e in edus {
                tokens.extend(e);
                bounds.push(tokens.len());
            }
            Document::new(format!("syn{d:03}"), tokens, bounds, sentences, paragraphs)
                .and_then(|doc| doc.with_tree(tree))
                .expect("generator builds valid documents")
        })
        .collect()
}

fn plant_cues(node: &RstNode, depth: usize, cues: &mut [Option<String>]) {
    if let (Some((l, r)), Some(nuc), Some(rel)) =
        (node.children(), node.nuclearity(), node.relation())
    {
        cues[r.span.first - 1] = Some(split_cue(depth, nuc, rel));
        plant_cues(l, depth + 1, cues);
        plant_cues(r, depth + 1, cues);
    }
}

fn layout<R: Rng>(rng: &mut R, n: usize) -> (Vec<usize>, BTreeSet<usize>) {
    let mut sentences = Vec::new();
    let mut e = 0;
    while e < n {
        e = (e + rng.gen_range(1..=2)).min(n);
        sentences.push(e);
    }
    let mut paragraphs = BTreeSet::from([0]);
    for w in sentences.windows(2) {
        if rng.gen_bool(0.3) {
            paragraphs.insert(w[0]);
        }
    }
    (sentences, paragraphs)
}

/// Settings for [`ndp_documents`].
#[derive(Clone, Debug)]
pub struct NdpSpec {
    pub documents: usize,
    pub min_sentences: usize,
    pub max_sentences: usize,
    pub seed: u64,
}

impl Default for NdpSpec {
    fn default() -> Self {
        NdpSpec {
            documents: 30,
            min_sentences: 4,
            max_sentences: 8,
            seed: 0,
        }
    }
}

/// Cue word planted in every sentence labeled `label`.
pub fn label_cue(label: ContentType) -> String {
    format!("<{}>", label.name().to_lowercase())
}

/// Documents whose sentences each carry one content-type label and the
/// matching cue word at a random position. Every sentence is one EDU.
pub fn ndp_documents(spec: &NdpSpec) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let types = content_types();
    (0..spec.documents)
        .map(|d| {
            let n = rng.gen_range(spec.min_sentences..=spec.max_sentences);
            let labels: Vec<ContentType> = (0..n)
                .map(|_| *types.choose(&mut rng).expect("8 types"))
                .collect();
            let sentences: Vec<Vec<String>> = labels
                .iter()
                .map(|&l| {
                    let mut words: Vec<String> = (0..rng.gen_range(2..=5))
                        .map(|_| FILLER.choose(&mut rng).expect("filler").to_string())
                        .collect();
                    let at = rng.gen_range(0..=words.len());
                    words.insert(at, label_cue(l));
                    words
                })
                .collect();
            Document::from_edus(format!("ndp{d:03}"), &sentences)
                .and_then(|doc| doc.with_ndp_labels(labels))
                .expect("generator builds valid documents")
        })
        .collect()
}
