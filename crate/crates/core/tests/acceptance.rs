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

//! Acceptance suite. Each criterion is one test that prints a PASS or FAIL line.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use c2rnet::analysis::{
    span_group_accuracy, threshold_table, Basis, SpanGroup, Tally, DEFAULT_THRESHOLDS,
};
use c2rnet::embedding::{embed_document, HashEmbedder};
use c2rnet::metrics::{oracle_score, score, score_both};
use c2rnet::ndp_branch::NdpModel;
use c2rnet::ndp_corpus::NdpCorpus;
use c2rnet::nn::gradcheck::{central_differences, max_relative_error};
use c2rnet::nn::{Graph, ParamStore};
use c2rnet::rst_parser::{C2RNet, FusionMode, LabelInventory, ModelConfig, RstDims};
use c2rnet::synthetic::{ndp_documents, random_tree, treebank_documents, NdpSpec, TreebankSpec};
use c2rnet::training::{
    evaluate_checkpoint, ndp_accuracy, probe_ndp, train_c2rnet, train_c2rnet_with, train_ndp,
    TrainingConfig,
};
use c2rnet::treebank::{
    constituents, parse_tree_text, save_corpus, validate, Convention, Document, LabeledConstituent,
    RelationInventory, RstTree, Span,
};

/// Runs `body`, prints the criterion's verdict outside the test harness
/// capture, and re-raises any failure.
fn criterion(number: u32, name: &str, body: impl FnOnce()) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let verdict = if outcome.is_ok() { "PASS" } else { "FAIL" };
    let line = format!(
        "acceptance {number:02} {verdict}  {name}  ({:.1}s)\n",
        start.elapsed().as_secs_f64()
    );
    let _ = std::io::stdout().write_all(line.as_bytes());
    if let Err(panic) = outcome {
        resume_unwind(panic);
    }
}

fn tree_map(docs: &[Document]) -> BTreeMap<String, RstTree> {
    docs.iter()
        .map(|d| {
            (
                d.doc_id().to_string(),
                d.gold_tree().expect("gold tree").clone(),
            )
        })
        .collect()
}

fn single(id: &str, tree: RstTree) -> BTreeMap<String, RstTree> {
    BTreeMap::from([(id.to_string(), tree)])
}

#[test]
fn criterion_01_metric_oracle_equivalence() {
    criterion(1, "score equals oracle_score on 500 random pairs", || {
        let start = Instant::now();
        let inv = RelationInventory::new(["elaboration", "list", "joint", "contrast"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut pooled_pred = BTreeMap::new();
        let mut pooled_gold = BTreeMap::new();
        for i in 0..500 {
            let n = 2 + i % 7;
            let pred = random_tree(&mut rng, n, &inv);
            let gold = random_tree(&mut rng, n, &inv);
            let id = format!("pair{i:03}");
            let (p, g) = (single(&id, pred.clone()), single(&id, gold.clone()));
            for conv in Convention::BOTH {
                let fast = score(&p, &g, conv).unwrap();
                let oracle = oracle_score(&p, &g, conv).unwrap();
                assert_eq!(fast, oracle, "{id} {conv}");
                assert_eq!(fast.values(), oracle.values());
            }
            pooled_pred.insert(id.clone(), pred);
            pooled_gold.insert(id, gold);
        }
        for conv in Convention::BOTH {
            assert_eq!(
                score(&pooled_pred, &pooled_gold, conv).unwrap(),
                oracle_score(&pooled_pred, &pooled_gold, conv).unwrap()
            );
        }
        assert!(
            start.elapsed() < Duration::from_secs(30),
            "took {:?}",
            start.elapsed()
        );
    });
}

#[test]
fn criterion_02_identity_scoring() {
    criterion(2, "gold against gold scores 100 everywhere", || {
        let inv = RelationInventory::coarse();
        for seed in 0..3 {
            let spec = TreebankSpec {
                seed,
                min_edus: 1,
                ..TreebankSpec::default()
            };
            let gold = tree_map(&treebank_documents(&spec, &inv));
            for s in score_both(&gold, &gold).unwrap() {
                assert_eq!(s.rounded(), [100.0; 4], "{}", s.convention);
            }
        }
    });
}

#[test]
fn criterion_03_root_relation_hand_case() {
    criterion(3, "root relation elaboration -> list", || {
        let inv = RelationInventory::new(["elaboration", "list"]).unwrap();
        let gold = parse_tree_text(
            "(NS elaboration (leaf 1) (NN list (leaf 2) (leaf 3)))",
            3,
            &inv,
        )
        .unwrap();
        let pred =
            parse_tree_text("(NS list (leaf 1) (NN list (leaf 2) (leaf 3)))", 3, &inv).unwrap();
        let c = |a, b, n: &str, r: &str| LabeledConstituent::new(Span::new(a, b), n, r);

        let orig_gold = BTreeSet::from([c(1, 3, "NS", "elaboration"), c(2, 3, "NN", "list")]);
        let orig_pred = BTreeSet::from([c(1, 3, "NS", "list"), c(2, 3, "NN", "list")]);
        assert_eq!(constituents(&gold, Convention::Original), orig_gold);
        assert_eq!(constituents(&pred, Convention::Original), orig_pred);
        let rst_gold = BTreeSet::from([
            c(1, 1, "N", "span"),
            c(2, 3, "S", "elaboration"),
            c(2, 2, "N", "list"),
            c(3, 3, "N", "list"),
        ]);
        let rst_pred = BTreeSet::from([
            c(1, 1, "N", "span"),
            c(2, 3, "S", "list"),
            c(2, 2, "N", "list"),
            c(3, 3, "N", "list"),
        ]);
        assert_eq!(constituents(&gold, Convention::Rst), rst_gold);
        assert_eq!(constituents(&pred, Convention::Rst), rst_pred);

        let (p, g) = (single("d", pred), single("d", gold));
        assert_eq!(
            score(&p, &g, Convention::Original).unwrap().rounded(),
            [100.0, 100.0, 50.0, 50.0]
        );
        assert_eq!(
            score(&p, &g, Convention::Rst).unwrap().rounded(),
            [100.0, 100.0, 75.0, 75.0]
        );
    });
}

#[test]
fn criterion_04_constituent_count_law() {
    criterion(
        4,
        "n-1 original and 2n-2 RST constituents over 1000 trees",
        || {
            let inv = RelationInventory::coarse();
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            for i in 0..1000 {
                let n = 1 + i % 40;
                let t = random_tree(&mut rng, n, &inv);
                assert_eq!(constituents(&t, Convention::Original).len(), n - 1);
                assert_eq!(constituents(&t, Convention::Rst).len(), 2 * n - 2);
            }
        },
    );
}

#[test]
fn criterion_05_baseline_overfit() {
    criterion(
        5,
        "baseline reaches training Full-F >= 95 within 300 epochs",
        || {
            let start = Instant::now();
            let docs = treebank_documents(&TreebankSpec::default(), &RelationInventory::coarse());
            assert_eq!(docs.len(), 20);
            let config = TrainingConfig {
                fusion: FusionMode::None,
                epochs: 300,
                ndp_freeze_epochs: 0,
                embedding_dim: 64,
                h1: 32,
                h2: 32,
                seed: 5,
                ..TrainingConfig::default()
            };
            let embedder = HashEmbedder::new(64, 0).unwrap();
            let out = train_c2rnet(&config, &docs, &embedder, None).unwrap();
            let full_f = out.log.last().unwrap().train_full_f.unwrap();
            assert!(full_f >= 95.0, "training Full-F {full_f}");
            let report = evaluate_checkpoint(&out.checkpoint, &docs, &embedder).unwrap();
            assert_eq!(report.orig.f(), full_f);
            assert!(start.elapsed() < Duration::from_secs(600));
        },
    );
}

#[test]
fn criterion_06_ndp_overfit() {
    criterion(6, "NDP training accuracy >= 95% within 200 epochs", || {
        let corpus = NdpCorpus::new(ndp_documents(&NdpSpec::default())).unwrap();
        assert_eq!(corpus.len(), 30);
        let config = TrainingConfig {
            epochs: 200,
            ndp_freeze_epochs: 0,
            seed: 7,
            ..TrainingConfig::default()
        };
        let embedder = HashEmbedder::new(config.embedding_dim, 0).unwrap();
        let out = train_ndp(&config, &corpus, &embedder).unwrap();
        let logged = out.log.last().unwrap().train_accuracy.unwrap();
        assert!(logged >= 95.0, "training accuracy {logged}");
        let recomputed =
            ndp_accuracy(&out.checkpoint.to_ndp_model().unwrap(), &corpus, &embedder).unwrap();
        assert_eq!(recomputed, logged);
    });
}

fn small_fusion_config(fusion: FusionMode, epochs: usize, freeze: usize) -> TrainingConfig {
    TrainingConfig {
        fusion,
        epochs,
        ndp_freeze_epochs: freeze,
        embedding_dim: 16,
        h1: 8,
        h2: 8,
        para_dim: 4,
        split_hidden: 8,
        learning_rate: 5e-3,
        seed: 11,
        ..TrainingConfig::default()
    }
}

fn small_ndp_checkpoint(epochs: usize) -> c2rnet::training::Checkpoint {
    let corpus = NdpCorpus::new(ndp_documents(&NdpSpec {
        documents: 10,
        seed: 3,
        ..NdpSpec::default()
    }))
    .unwrap();
    let config = TrainingConfig {
        ndp_freeze_epochs: 0,
        ..small_fusion_config(FusionMode::NdpEmbedding, epochs, 0)
    };
    train_ndp(&config, &corpus, &HashEmbedder::new(16, 0).unwrap())
        .unwrap()
        .checkpoint
}

fn small_treebank(documents: usize, seed: u64) -> Vec<Document> {
    let spec = TreebankSpec {
        documents,
        min_edus: 3,
        max_edus: 7,
        seed,
        ..TreebankSpec::default()
    };
    treebank_documents(&spec, &RelationInventory::coarse())
}

#[test]
fn criterion_07_freeze_schedule() {
    criterion(
        7,
        "NDP bytes fixed through epoch 40, changed by epoch 45",
        || {
            let ndp = small_ndp_checkpoint(5);
            let transferred = {
                let m = NdpModel::from_store(ndp.params.clone(), 0.0).unwrap();
                m.store.snapshot_bytes(&m.branch.all_params())
            };
            let config = small_fusion_config(FusionMode::NdpEmbedding, 45, 40);
            let docs = small_treebank(4, 1);
            let mut snapshots = Vec::new();
            train_c2rnet_with(
                &config,
                &docs,
                &HashEmbedder::new(16, 0).unwrap(),
                Some(&ndp),
                &mut |_, m: &C2RNet| snapshots.push(m.store.snapshot_bytes(&m.ndp_params())),
            )
            .unwrap();
            assert_eq!(snapshots.len(), 45);
            for (epoch, s) in snapshots.iter().enumerate().take(40) {
                assert_eq!(
                    *s,
                    transferred,
                    "NDP parameters moved at epoch {}",
                    epoch + 1
                );
            }
            assert_ne!(snapshots[44], transferred);
        },
    );
}

#[test]
fn criterion_08_gradient_checks() {
    criterion(
        8,
        "analytic gradients match central differences at dim 4",
        || {
            // NDP loss
            let ndp = NdpModel::new(4, 0.0, 8);
            let doc = Document::from_edus("g", &[vec!["a", "b", "c"], vec!["d"], vec!["e", "f"]])
                .unwrap()
                .with_ndp_labels(
                    [0, 5, 2]
                        .map(|c| c2rnet::ndp_corpus::ContentType::from_code(c).unwrap())
                        .to_vec(),
                )
                .unwrap();
            let tokens = embed_document(&doc, &HashEmbedder::new(4, 2).unwrap()).unwrap();
            let ranges = doc.sentence_token_ranges();
            let gold = [0, 5, 2];
            let ndp_loss = |s: &ParamStore| {
                let mut g = Graph::new(s);
                let x = g.constant(tokens.clone());
                let seg = ndp.branch.segments(&mut g, x, &ranges, 0.0).unwrap();
                let p = ndp.branch.classify(&mut g, seg.mixed, 0.0);
                let l = g.nll(p, &gold);
                (g.value(l).get(0, 0), g.backward(l))
            };
            let (_, analytic) = ndp_loss(&ndp.store);
            let numeric = central_differences(&ndp.store, 1e-4, |s| ndp_loss(s).0);
            let err = max_relative_error(&ndp.store, &analytic, &numeric);
            assert!(err < 1e-3, "ndp_loss relative error {err}");

            // RST loss, fused with the NDP branch
            let relations = RelationInventory::new(["elaboration", "list"]).unwrap();
            let labels =
                LabelInventory::parse(&["NS:elaboration", "NN:list", "SN:elaboration"], &relations)
                    .unwrap();
            let config = ModelConfig {
                dims: RstDims {
                    token_dim: 4,
                    h1: 3,
                    h2: 3,
                    para_dim: 2,
                    split_hidden: 3,
                },
                fusion: FusionMode::NdpEmbedding,
                dropout: 0.0,
            };
            let model =
                C2RNet::new(config, labels, relations.clone(), Some(&ndp.store), 9).unwrap();
            let rst_doc =
                Document::from_edus("r", &[vec!["a", "b"], vec!["c"], vec!["d", "e"], vec!["f"]])
                    .unwrap();
            let rst_tokens = embed_document(&rst_doc, &HashEmbedder::new(4, 2).unwrap()).unwrap();
            let tree = parse_tree_text(
                "(NS elaboration (NN list (leaf 1) (leaf 2)) (SN elaboration (leaf 3) (leaf 4)))",
                4,
                &relations,
            )
            .unwrap();
            let rst_loss = |s: &ParamStore| {
                let mut g = Graph::new(s);
                let l = model.loss(&mut g, &rst_doc, &rst_tokens, &tree).unwrap();
                (g.value(l).get(0, 0), g.backward(l))
            };
            let (_, analytic) = rst_loss(&model.store);
            let numeric = central_differences(&model.store, 1e-4, |s| rst_loss(s).0);
            let err = max_relative_error(&model.store, &analytic, &numeric);
            assert!(err < 1e-3, "rst_loss relative error {err}");
        },
    );
}

#[test]
fn criterion_09_probing_identity() {
    criterion(
        9,
        "probe after transfer equals original NDP test accuracy",
        || {
            let ndp = small_ndp_checkpoint(30);
            let config = small_fusion_config(FusionMode::NdpEmbedding, 0, 0);
            let embedder = HashEmbedder::new(16, 0).unwrap();
            let c2r = train_c2rnet(&config, &small_treebank(3, 2), &embedder, Some(&ndp))
                .unwrap()
                .checkpoint;
            let test = NdpCorpus::new(ndp_documents(&NdpSpec {
                documents: 12,
                seed: 99,
                ..NdpSpec::default()
            }))
            .unwrap();
            let original = ndp_accuracy(&ndp.to_ndp_model().unwrap(), &test, &embedder).unwrap();
            let probed = probe_ndp(&c2r, &ndp, &test, &embedder).unwrap();
            assert_eq!(probed, original);
            assert!(
                original > 50.0,
                "the NDP checkpoint should have learned the cues: {original}"
            );
        },
    );
}

/// Three documents with planted nuclearity and relation errors.
fn analysis_fixture() -> (BTreeMap<String, RstTree>, BTreeMap<String, RstTree>) {
    let inv = RelationInventory::new(["elaboration", "joint", "contrast", "attribution"]).unwrap();
    let docs = [
        (
            "a",
            4,
            "(NS elaboration (NN joint (leaf 1) (leaf 2)) (NS attribution (leaf 3) (leaf 4)))",
            "(NS elaboration (NN contrast (leaf 1) (leaf 2)) (SN attribution (leaf 3) (leaf 4)))",
        ),
        (
            "b",
            6,
            "(NS elaboration (leaf 1) (NN joint (NS elaboration (leaf 2) (leaf 3)) (NN joint (leaf 4) (NS attribution (leaf 5) (leaf 6)))))",
            "(SN contrast (NS elaboration (leaf 1) (leaf 2)) (NN joint (leaf 3) (NN joint (leaf 4) (NS attribution (leaf 5) (leaf 6)))))",
        ),
        (
            "c",
            7,
            "(NN joint (NS elaboration (leaf 1) (NS elaboration (leaf 2) (leaf 3))) (NS contrast (NN joint (leaf 4) (leaf 5)) (NS elaboration (leaf 6) (leaf 7))))",
            "(NN joint (NS elaboration (leaf 1) (NS elaboration (leaf 2) (leaf 3))) (NS elaboration (NN joint (leaf 4) (leaf 5)) (NN elaboration (leaf 6) (leaf 7))))",
        ),
    ];
    let mut gold = BTreeMap::new();
    let mut pred = BTreeMap::new();
    for (id, n, g, p) in docs {
        gold.insert(id.to_string(), parse_tree_text(g, n, &inv).unwrap());
        pred.insert(id.to_string(), parse_tree_text(p, n, &inv).unwrap());
    }
    (pred, gold)
}

fn tally(nuclearity_correct: usize, relation_correct: usize, total: usize) -> Tally {
    Tally {
        nuclearity_correct,
        relation_correct,
        total,
    }
}

#[test]
fn criterion_10_span_analysis_fixture() {
    criterion(10, "hand-computed group report and threshold table", || {
        let (pred, gold) = analysis_fixture();
        // Gold nodes as (length, nuclearity correct, relation correct):
        //   a: (4,✓,✓) (2,✓,✗) (2,✗,✓)
        //   b: (6,✗,✗) (5,✗,✗) (2,✗,✗) (3,✓,✓) (2,✓,✓)
        //   c: (7,✓,✓) (3,✓,✓) (2,✓,✓) (4,✓,✗) (2,✓,✓) (2,✗,✓)
        let groups = vec![
            SpanGroup::new(2, Some(2)),
            SpanGroup::new(3, Some(5)),
            SpanGroup::new(6, None),
        ];
        let report = span_group_accuracy(&pred, &gold, &groups, Basis::Gold).unwrap();
        let rows: Vec<Tally> = report.rows.iter().map(|r| r.tally).collect();
        assert_eq!(rows, [tally(4, 5, 7), tally(4, 3, 5), tally(1, 1, 2)]);
        let acc: Vec<(Option<f64>, Option<f64>)> = report
            .rows
            .iter()
            .map(|r| (r.tally.nuclearity_accuracy(), r.tally.relation_accuracy()))
            .collect();
        assert_eq!(acc[0], (Some(400.0 / 7.0), Some(500.0 / 7.0)));
        assert_eq!(acc[1], (Some(80.0), Some(60.0)));
        assert_eq!(acc[2], (Some(50.0), Some(50.0)));

        let table = threshold_table(&pred, &gold, &DEFAULT_THRESHOLDS, Basis::Gold).unwrap();
        assert_eq!(table.overall, tally(9, 9, 14));
        let expected: BTreeMap<usize, (Tally, Tally)> = BTreeMap::from([
            (3, (tally(3, 2, 5), tally(6, 7, 9))),
            (4, (tally(1, 1, 3), tally(8, 8, 11))),
            (5, (tally(1, 1, 2), tally(8, 8, 12))),
            (6, (tally(1, 1, 1), tally(8, 8, 13))),
        ]);
        for row in &table.rows {
            let (above, below) = expected
                .get(&row.threshold)
                .copied()
                .unwrap_or((tally(0, 0, 0), tally(9, 9, 14)));
            assert_eq!(
                (row.above, row.at_or_below),
                (above, below),
                "threshold {}",
                row.threshold
            );
            assert!(
                row.is_consistent(&table.overall),
                "threshold {}",
                row.threshold
            );
            // weighted accuracies reproduce the overall accuracy
            let weighted = |f: fn(&Tally) -> Option<f64>| {
                [row.above, row.at_or_below]
                    .iter()
                    .map(|t| f(t).unwrap_or(0.0) * t.total as f64)
                    .sum::<f64>()
                    / table.overall.total as f64
            };
            assert!((weighted(Tally::nuclearity_accuracy) - 900.0 / 14.0).abs() < 1e-9);
            assert!((weighted(Tally::relation_accuracy) - 900.0 / 14.0).abs() < 1e-9);
        }
        assert!(table.is_consistent());
    });
}

fn run_cli(dir: &Path, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_c2rnet"))
        .args(args)
        .current_dir(dir)
        .env_remove("C2RNET_DATA_DIR")
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

#[test]
fn criterion_11_determinism() {
    criterion(
        11,
        "train-rst + parse + score are byte-identical across runs",
        || {
            let runs: Vec<_> = (0..2)
            .map(|_| {
                let dir = tempfile::tempdir().unwrap();
                let p = dir.path();
                std::fs::write(
                    p.join("run.cfg"),
                    "fusion = none\nepochs = 4\nndp_freeze_epochs = 0\nembedding_dim = 16\nh1 = 8\nh2 = 8\nseed = 21\n",
                )
                .unwrap();
                save_corpus(p.join("train.jsonl"), &small_treebank(5, 3)).unwrap();
                save_corpus(p.join("test.jsonl"), &small_treebank(4, 4)).unwrap();
                run_cli(p, &["train-rst", "--config", "run.cfg", "--train", "train.jsonl", "--out", "model.ckpt", "--log", "run.log"]);
                run_cli(p, &["parse", "--config", "run.cfg", "--checkpoint", "model.ckpt", "--input", "test.jsonl", "--out", "pred.jsonl"]);
                let stdout = run_cli(p, &["score", "--config", "run.cfg", "--pred", "pred.jsonl", "--gold", "test.jsonl", "--out", "score.json"]);
                let files: Vec<Vec<u8>> = ["model.ckpt", "run.log", "pred.jsonl", "score.json"]
                    .iter()
                    .map(|f| std::fs::read(p.join(f)).unwrap())
                    .collect();
                (files, stdout)
            })
            .collect();
            assert_eq!(runs[0], runs[1]);
        },
    );
}

#[test]
fn criterion_12_one_hot_variant() {
    criterion(
        12,
        "one-hot fusion trains, emits valid trees and scores differently",
        || {
            let ndp = small_ndp_checkpoint(20);
            let embedder = HashEmbedder::new(16, 0).unwrap();
            let train = small_treebank(6, 5);
            let test = small_treebank(6, 6);
            let run = |fusion| {
                let config = small_fusion_config(fusion, 8, 4);
                let ckpt = train_c2rnet(&config, &train, &embedder, Some(&ndp))
                    .unwrap()
                    .checkpoint;
                let model = ckpt.to_c2rnet().unwrap();
                for d in &test {
                    let t = embed_document(d, &embedder).unwrap();
                    let tree = model.decode(d, &t).unwrap();
                    assert!(validate(&tree, d).is_empty(), "{}", d.doc_id());
                }
                let report = evaluate_checkpoint(&ckpt, &test, &embedder).unwrap();
                (report.orig.values(), report.rst.values(), ckpt.params)
            };
            let one_hot = run(FusionMode::NdpOneHot);
            let embedding = run(FusionMode::NdpEmbedding);
            assert_ne!(
                (one_hot.0, one_hot.1),
                (embedding.0, embedding.1),
                "scores coincide"
            );
            assert_ne!(one_hot.2, embedding.2);
        },
    );
}
