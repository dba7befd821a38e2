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

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use c2rnet::synthetic::{ndp_documents, treebank_documents, NdpSpec, TreebankSpec};
use c2rnet::treebank::{save_corpus, Document, RelationInventory};

fn c2rnet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_c2rnet"))
        .args(args)
        .current_dir(dir)
        .env_remove("C2RNET_DATA_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn treebank(dir: &Path, name: &str, documents: usize) -> PathBuf {
    let spec = TreebankSpec {
        documents,
        min_edus: 3,
        max_edus: 6,
        ..TreebankSpec::default()
    };
    let path = dir.join(name);
    save_corpus(
        &path,
        &treebank_documents(&spec, &RelationInventory::coarse()),
    )
    .unwrap();
    path
}

const SMALL: &str = "epochs = 3\nndp_freeze_epochs = 1\nembedding_dim = 8\nh1 = 6\nh2 = 6\npara_dim = 4\nsplit_hidden = 6\nfusion = none\n";

#[test]
fn identical_files_score_100_twice() {
    let dir = tempfile::tempdir().unwrap();
    let gold = treebank(dir.path(), "gold.jsonl", 4);
    let o = c2rnet(
        &[
            "score",
            "--pred",
            gold.to_str().unwrap(),
            "--gold",
            gold.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("100.0/100.0/100.0/100.0").count(), 2, "{out}");
    assert!(out.contains("orig 100.0/100.0/100.0/100.0"));
    assert!(out.contains("rst 100.0/100.0/100.0/100.0"));
}

#[test]
fn mismatched_doc_sets_exit_1_naming_the_document() {
    let dir = tempfile::tempdir().unwrap();
    treebank(dir.path(), "gold.jsonl", 4);
    treebank(dir.path(), "pred.jsonl", 3);
    let o = c2rnet(
        &["score", "--pred", "pred.jsonl", "--gold", "gold.jsonl"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("syn003"), "{}", stderr(&o));
}

#[test]
fn parse_single_edu_documents() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.cfg"), SMALL).unwrap();
    treebank(dir.path(), "train.jsonl", 3);
    let o = c2rnet(
        &[
            "train-rst",
            "--config",
            "small.cfg",
            "--train",
            "train.jsonl",
            "--out",
            "model.ckpt",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let docs: Vec<Document> = (0..2)
        .map(|i| Document::from_edus(format!("one{i}"), &[vec!["a", "sentence"]]).unwrap())
        .collect();
    save_corpus(dir.path().join("one.jsonl"), &docs).unwrap();
    let o = c2rnet(
        &[
            "parse",
            "--checkpoint",
            "model.ckpt",
            "--input",
            "one.jsonl",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2);
    for line in out.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["tree"], "(leaf 1)");
    }
}

#[test]
fn data_dir_resolves_relative_inputs() {
    let data = tempfile::tempdir().unwrap();
    let work = tempfile::tempdir().unwrap();
    treebank(data.path(), "gold.jsonl", 2);
    let o = Command::new(env!("CARGO_BIN_EXE_c2rnet"))
        .args(["score", "--pred", "gold.jsonl", "--gold", "gold.jsonl"])
        .current_dir(work.path())
        .env("C2RNET_DATA_DIR", data.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn usage_errors_and_help() {
    let dir = tempfile::tempdir().unwrap();
    let o = c2rnet(&["score", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = c2rnet(&["--help"], dir.path());
    assert!(o.status.success());
    let help = stdout(&o);
    for flag in ["--config", "--seed", "--out", "--data-dir"] {
        assert!(help.contains(flag), "{help}");
    }
    for cmd in [
        "train-ndp",
        "train-rst",
        "parse",
        "score",
        "analyze",
        "probe",
        "validate",
    ] {
        assert!(help.contains(cmd), "{help}");
    }
    let o = c2rnet(&["train-rst", "--help"], dir.path());
    for flag in ["--train", "--ndp-checkpoint", "--fusion", "--log"] {
        assert!(stdout(&o).contains(flag));
    }
}

#[test]
fn missing_files_are_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = c2rnet(
        &["score", "--pred", "nope.jsonl", "--gold", "nope.jsonl"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn validate_reports_bad_records() {
    let dir = tempfile::tempdir().unwrap();
    treebank(dir.path(), "good.jsonl", 2);
    let o = c2rnet(&["validate", "--corpus", "good.jsonl"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("2 documents"));
    std::fs::write(
        dir.path().join("bad.jsonl"),
        r#"{"doc_id":"x","tokens":["a","b"],"edu_boundaries":[1,2],"sentence_boundaries":[2],"paragraph_starts":[0],"tree":"(NS elaboration (leaf 1) (leaf 3))"}"#,
    )
    .unwrap();
    let o = c2rnet(&["validate", "--corpus", "bad.jsonl"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("'x'"), "{}", stderr(&o));
    let o = c2rnet(&["validate", "--corpus", "good.jsonl", "--ndp"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn ndp_fusion_workflow_with_probe_and_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(
        p.join("small.cfg"),
        SMALL.replace("fusion = none", "fusion = ndp-embedding"),
    )
    .unwrap();
    let ndp_spec = NdpSpec {
        documents: 4,
        min_sentences: 3,
        max_sentences: 4,
        seed: 1,
    };
    save_corpus(p.join("ndp.jsonl"), &ndp_documents(&ndp_spec)).unwrap();
    treebank(p, "train.jsonl", 3);
    let ok = |o: Output| {
        assert!(o.status.success(), "{}", stderr(&o));
        stdout(&o)
    };
    ok(c2rnet(
        &[
            "train-ndp",
            "--config",
            "small.cfg",
            "--train",
            "ndp.jsonl",
            "--out",
            "ndp.ckpt",
            "--log",
            "ndp.log",
        ],
        p,
    ));
    assert_eq!(
        std::fs::read_to_string(p.join("ndp.log"))
            .unwrap()
            .lines()
            .count(),
        3
    );
    ok(c2rnet(
        &[
            "train-rst",
            "--config",
            "small.cfg",
            "--train",
            "train.jsonl",
            "--ndp-checkpoint",
            "ndp.ckpt",
            "--out",
            "c2r.ckpt",
        ],
        p,
    ));
    let probe = ok(c2rnet(
        &[
            "probe",
            "--checkpoint",
            "c2r.ckpt",
            "--ndp-checkpoint",
            "ndp.ckpt",
            "--test",
            "ndp.jsonl",
            "--out",
            "probe.json",
        ],
        p,
    ));
    assert!(probe.contains("probed accuracy"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p.join("probe.json")).unwrap()).unwrap();
    assert!(report["probed_accuracy"].is_number());

    ok(c2rnet(
        &[
            "parse",
            "--checkpoint",
            "c2r.ckpt",
            "--input",
            "train.jsonl",
            "--out",
            "pred.jsonl",
        ],
        p,
    ));
    let analysis = ok(c2rnet(
        &[
            "analyze",
            "--pred",
            "pred.jsonl",
            "--gold",
            "train.jsonl",
            "--compare",
            "train.jsonl",
            "--basis",
            "predicted",
        ],
        p,
    ));
    assert!(
        analysis.contains("basis: predicted") && analysis.contains("first minus second"),
        "{analysis}"
    );
    let eval = ok(c2rnet(
        &[
            "evaluate",
            "--checkpoint",
            "c2r.ckpt",
            "--checkpoint",
            "c2r.ckpt",
            "--test",
            "train.jsonl",
        ],
        p,
    ));
    assert!(eval.contains("mean over 2 run(s)"), "{eval}");

    let o = c2rnet(
        &[
            "train-rst",
            "--config",
            "small.cfg",
            "--train",
            "train.jsonl",
            "--out",
            "x.ckpt",
        ],
        p,
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("NDP checkpoint"));
}
