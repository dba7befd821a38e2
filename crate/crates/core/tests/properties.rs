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

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use c2rnet::embedding::{embed_document, EmbeddingProvider, HashEmbedder};
use c2rnet::metrics::{oracle_score, score, Column};
use c2rnet::ndp_branch::{mix, NdpModel};
use c2rnet::nn::Matrix;
use c2rnet::synthetic::random_tree;
use c2rnet::treebank::{
    constituents, parse_tree_text, serialize_tree, validate_tree, Convention, Document,
    RelationInventory, RstTree,
};

fn inventory() -> RelationInventory {
    RelationInventory::new(["elaboration", "list", "joint", "contrast", "attribution"]).unwrap()
}

fn tree(seed: u64, n: usize) -> RstTree {
    random_tree(&mut ChaCha8Rng::seed_from_u64(seed), n, &inventory())
}

fn matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let e = HashEmbedder::new(cols, seed).unwrap();
    let data = (0..rows)
        .flat_map(|r| e.embed_token("m", r, &format!("row{r}")).unwrap())
        .collect();
    Matrix::from_vec(rows, cols, data)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tree_text_round_trips(seed in any::<u64>(), n in 1usize..30) {
        let t = tree(seed, n);
        let text = serialize_tree(&t);
        let back = parse_tree_text(&text, n, &inventory()).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(serialize_tree(&back), text);
        prop_assert!(validate_tree(&t, n).is_empty());
    }

    #[test]
    fn constituent_counts(seed in any::<u64>(), n in 1usize..40) {
        let t = tree(seed, n);
        prop_assert_eq!(constituents(&t, Convention::Original).len(), n - 1);
        prop_assert_eq!(constituents(&t, Convention::Rst).len(), 2 * n - 2);
        let spans: BTreeSet<_> = constituents(&t, Convention::Rst).into_iter().map(|c| c.span).collect();
        prop_assert_eq!(spans.len(), 2 * n - 2);
    }

    #[test]
    fn score_matches_oracle(seeds in prop::collection::vec((any::<u64>(), any::<u64>(), 1usize..9), 1..6)) {
        let mut pred = BTreeMap::new();
        let mut gold = BTreeMap::new();
        for (i, (a, b, n)) in seeds.into_iter().enumerate() {
            pred.insert(format!("d{i}"), tree(a, n));
            gold.insert(format!("d{i}"), tree(b, n));
        }
        for conv in Convention::BOTH {
            let s = score(&pred, &gold, conv).unwrap();
            prop_assert_eq!(&s, &oracle_score(&pred, &gold, conv).unwrap());
            for c in Column::ALL {
                prop_assert!((0.0..=100.0).contains(&s.column(c)));
            }
            // a correct label implies a correct span
            prop_assert!(s.column(Column::Full) <= s.column(Column::Nuclearity));
            prop_assert!(s.column(Column::Full) <= s.column(Column::Relation));
            prop_assert!(s.column(Column::Nuclearity) <= s.column(Column::Span));
        }
    }

    #[test]
    fn self_scoring_is_perfect(seed in any::<u64>(), n in 1usize..20) {
        let gold = BTreeMap::from([("d".to_string(), tree(seed, n))]);
        for conv in Convention::BOTH {
            prop_assert_eq!(score(&gold, &gold, conv).unwrap().values(), [100.0; 4]);
        }
    }

    #[test]
    fn hash_embeddings_are_pure(token in "[a-z]{1,8}", dim in 1usize..32, seed in any::<u64>()) {
        let e = HashEmbedder::new(dim, seed).unwrap();
        let a = e.embed_token("x", 0, &token).unwrap();
        prop_assert_eq!(a.len(), dim);
        prop_assert_eq!(&a, &e.embed_token("y", 9, &token).unwrap());
        prop_assert!(a.iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn attention_and_classifier_rows_are_distributions(
        seed in any::<u64>(),
        sentence_lengths in prop::collection::vec(1usize..6, 1..5),
    ) {
        let model = NdpModel::new(6, 0.0, seed);
        let edus: Vec<Vec<String>> = sentence_lengths
            .iter()
            .enumerate()
            .map(|(s, &len)| (0..len).map(|w| format!("w{s}_{w}")).collect())
            .collect();
        let doc = Document::from_edus("p", &edus).unwrap();
        let tokens = embed_document(&doc, &HashEmbedder::new(6, seed).unwrap()).unwrap();
        for r in doc.sentence_token_ranges() {
            let local = model.local_attention(&tokens.slice_rows(r.start, r.len())).unwrap();
            prop_assert!((local.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let emb = model.segment_embeddings(&tokens, &doc.sentence_token_ranges()).unwrap();
        prop_assert_eq!(&emb.mixed, &mix(&emb.local, &emb.global).unwrap());
        prop_assert_eq!(&mix(&emb.local, &emb.global).unwrap(), &mix(&emb.global, &emb.local).unwrap());
        let (weights, _) = model.global_attention(&emb.local).unwrap();
        let probs = model.classify(&emb.mixed).unwrap();
        for r in 0..doc.n_sentences() {
            prop_assert!((weights.row(r).iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!((probs.row(r).iter().sum::<f64>() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn classifier_is_per_segment(seed in any::<u64>(), n in 1usize..6) {
        let model = NdpModel::new(5, 0.0, seed);
        let mixed = matrix(n, 5, seed);
        let all = model.classify(&mixed).unwrap();
        for r in 0..n {
            let one = model.classify(&mixed.slice_rows(r, 1)).unwrap();
            prop_assert_eq!(one.row(0), all.row(r));
        }
    }
}
