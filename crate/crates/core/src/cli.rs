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

//! Command-line workflows. Exit codes: 0 success, 1 invalid input, 2 failure
//! while running.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::analysis::{
    compare_groups, compare_thresholds, default_groups, format_differences, format_groups,
    format_thresholds, span_group_accuracy, threshold_table, Basis, DEFAULT_THRESHOLDS,
};
use crate::metrics::{format_table, score_both, MetricsError, ParsevalScore};
use crate::ndp_corpus::{load_ndp_corpus, NdpCorpusError};
use crate::rst_parser::FusionMode;
use crate::training::{
    average_scores, embedder_from_config, evaluate_checkpoint, ndp_accuracy, parse_documents,
    probe_ndp, train_c2rnet, train_ndp, write_run_log, Checkpoint, EvaluationReport, ModelDecoder,
    TrainingConfig, TrainingError,
};
use crate::treebank::{
    load_corpus, load_corpus_without_trees, validate, write_corpus, Convention, CorpusError,
    Document, RstTree,
};

/// Relative input paths are resolved against this directory when it is set.
pub const DATA_DIR_ENV: &str = "C2RNET_DATA_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "c2rnet",
    version,
    about = "Top-down RST discourse parsing and Parseval evaluation"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Flat key = value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file: checkpoint, predictions or JSON report depending on the command
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory that relative input paths are resolved against
    #[arg(long, global = true, env = DATA_DIR_ENV)]
    pub data_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train the NDP sentence classifier
    TrainNdp {
        /// Labeled NDP corpus (defaults to the configured train_path)
        #[arg(long)]
        train: Option<PathBuf>,
        /// Write the per-epoch run log here as JSON lines
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Train the RST parser, optionally fused with a pretrained NDP branch
    TrainRst {
        /// RST corpus with gold trees (defaults to the configured train_path)
        #[arg(long)]
        train: Option<PathBuf>,
        /// Pretrained NDP checkpoint (defaults to the configured ndp_checkpoint)
        #[arg(long)]
        ndp_checkpoint: Option<PathBuf>,
        /// Overrides the configured fusion mode: none, ndp-embedding or ndp-one-hot
        #[arg(long)]
        fusion: Option<FusionMode>,
        /// Write the per-epoch run log here as JSON lines
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Decode documents into trees; writes a corpus file with predicted trees
    Parse {
        /// Trained RST checkpoint
        #[arg(long)]
        checkpoint: PathBuf,
        /// Documents to parse; any gold trees are ignored
        #[arg(long)]
        input: PathBuf,
    },
    /// Parseval scores of predicted against gold trees under both conventions
    Score {
        /// Corpus holding predicted trees
        #[arg(long)]
        pred: PathBuf,
        /// Corpus holding gold trees
        #[arg(long)]
        gold: PathBuf,
    },
    /// Evaluate checkpoints on a test corpus; several checkpoints are averaged
    Evaluate {
        /// Trained RST checkpoint; repeat for multi-seed averaging
        #[arg(long, required = true)]
        checkpoint: Vec<PathBuf>,
        /// Test corpus with gold trees (defaults to the configured test_path)
        #[arg(long)]
        test: Option<PathBuf>,
    },
    /// Accuracy by span length and by span-length threshold
    Analyze {
        /// Corpus holding predicted trees
        #[arg(long)]
        pred: PathBuf,
        /// Corpus holding gold trees
        #[arg(long)]
        gold: PathBuf,
        /// Second system's predictions; reports first minus second
        #[arg(long)]
        compare: Option<PathBuf>,
        /// Which tree's nodes are judged: gold or predicted
        #[arg(long, default_value = "gold")]
        basis: Basis,
    },
    /// Accuracy of the trained parser's NDP body under the original NDP head
    Probe {
        /// Trained RST checkpoint with an NDP branch
        #[arg(long)]
        checkpoint: PathBuf,
        /// The NDP checkpoint the branch was initialized from
        #[arg(long)]
        ndp_checkpoint: PathBuf,
        /// Labeled NDP test corpus
        #[arg(long)]
        test: PathBuf,
    },
    /// Check a corpus for format errors and invalid trees
    Validate {
        /// Corpus file or directory
        #[arg(long)]
        corpus: PathBuf,
        /// Also require ndp_labels on every document
        #[arg(long)]
        ndp: bool,
    },
}

/// Failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CliError {}

impl From<TrainingError> for CliError {
    fn from(e: TrainingError) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        TrainingError::from(e).into()
    }
}

impl From<NdpCorpusError> for CliError {
    fn from(e: NdpCorpusError) -> Self {
        TrainingError::from(e).into()
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(stdout) => {
            print!("{stdout}");
            0
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Runs a parsed command and returns what it prints on success.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let ctx = Context::new(&cli.global)?;
    match &cli.command {
        Command::TrainNdp { train, log } => ctx.train_ndp(train.as_deref(), log.as_deref()),
        Command::TrainRst {
            train,
            ndp_checkpoint,
            fusion,
            log,
        } => ctx.train_rst(
            train.as_deref(),
            ndp_checkpoint.as_deref(),
            *fusion,
            log.as_deref(),
        ),
        Command::Parse { checkpoint, input } => ctx.parse(checkpoint, input),
        Command::Score { pred, gold } => ctx.score(pred, gold),
        Command::Evaluate { checkpoint, test } => ctx.evaluate(checkpoint, test.as_deref()),
        Command::Analyze {
            pred,
            gold,
            compare,
            basis,
        } => ctx.analyze(pred, gold, compare.as_deref(), *basis),
        Command::Probe {
            checkpoint,
            ndp_checkpoint,
            test,
        } => ctx.probe(checkpoint, ndp_checkpoint, test),
        Command::Validate { corpus, ndp } => ctx.validate(corpus, *ndp),
    }
}

struct Context {
    config: TrainingConfig,
    out: Option<PathBuf>,
    data_dir: Option<PathBuf>,
}

impl Context {
    fn new(global: &GlobalArgs) -> Result<Self, CliError> {
        let data_dir = global.data_dir.clone();
        let mut config = match &global.config {
            Some(p) => TrainingConfig::load(p)?,
            None => TrainingConfig::default(),
        };
        if let Some(seed) = global.seed {
            config.seed = seed;
        }
        for p in [
            &mut config.train_path,
            &mut config.dev_path,
            &mut config.test_path,
            &mut config.ndp_checkpoint,
            &mut config.embeddings_file,
        ] {
            *p = p.as_deref().map(|p| resolve(data_dir.as_deref(), p));
        }
        Ok(Context {
            config,
            out: global.out.clone(),
            data_dir,
        })
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        resolve(self.data_dir.as_deref(), path)
    }

    fn input(
        &self,
        flag: Option<&Path>,
        configured: &Option<PathBuf>,
        what: &str,
    ) -> Result<PathBuf, CliError> {
        flag.map(|p| self.resolve(p))
            .or_else(|| configured.clone())
            .ok_or_else(|| CliError::Validation(format!("no {what} given (flag or config)")))
    }

    fn out_path(&self, command: &str) -> Result<&Path, CliError> {
        self.out
            .as_deref()
            .ok_or_else(|| CliError::Validation(format!("{command} needs --out")))
    }

    fn write(&self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        std::fs::write(path, bytes)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
    }

    /// Writes `report` to --out when given.
    fn write_report(&self, report: &serde_json::Value) -> Result<(), CliError> {
        if let Some(path) = &self.out {
            let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
            text.push('\n');
            self.write(path, text.as_bytes())?;
        }
        Ok(())
    }

    fn write_log(
        &self,
        path: Option<&Path>,
        log: &[crate::training::EpochRecord],
    ) -> Result<(), CliError> {
        if let Some(path) = path {
            let mut buf = Vec::new();
            write_run_log(&mut buf, log).map_err(|e| CliError::Runtime(e.to_string()))?;
            self.write(path, &buf)?;
        }
        Ok(())
    }

    fn load_trees(&self, path: &Path) -> Result<BTreeMap<String, RstTree>, CliError> {
        let relations = self.config.relation_inventory()?;
        let docs = load_corpus(self.resolve(path), &relations)?;
        tree_map(&docs)
    }

    fn train_ndp(&self, train: Option<&Path>, log: Option<&Path>) -> Result<String, CliError> {
        let out = self.out_path("train-ndp")?;
        let corpus =
            load_ndp_corpus(self.input(train, &self.config.train_path, "training corpus")?)?;
        let embedder = embedder_from_config(&self.config)?;
        let outcome = train_ndp(&self.config, &corpus, embedder.as_ref())?;
        outcome.checkpoint.save(out)?;
        self.write_log(log, &outcome.log)?;
        let model = outcome.checkpoint.to_ndp_model()?;
        let acc = ndp_accuracy(&model, &corpus, embedder.as_ref())?;
        Ok(format!(
            "trained NDP for {} epochs on {} documents; training accuracy {acc:.1}%\ncheckpoint: {}\n",
            self.config.epochs,
            corpus.len(),
            out.display()
        ))
    }

    fn train_rst(
        &self,
        train: Option<&Path>,
        ndp_checkpoint: Option<&Path>,
        fusion: Option<FusionMode>,
        log: Option<&Path>,
    ) -> Result<String, CliError> {
        let out = self.out_path("train-rst")?;
        let mut config = self.config.clone();
        if let Some(f) = fusion {
            config.fusion = f;
        }
        let relations = config.relation_inventory()?;
        let docs = load_corpus(
            self.input(train, &config.train_path, "training corpus")?,
            &relations,
        )?;
        let ndp = match (
            config.fusion.uses_ndp(),
            ndp_checkpoint
                .map(|p| self.resolve(p))
                .or(config.ndp_checkpoint.clone()),
        ) {
            (true, Some(p)) => Some(Checkpoint::load(p)?),
            (true, None) => {
                return Err(CliError::Validation(format!(
                    "fusion mode {} needs an NDP checkpoint (--ndp-checkpoint or ndp_checkpoint)",
                    config.fusion
                )))
            }
            (false, _) => None,
        };
        let embedder = embedder_from_config(&config)?;
        let outcome = train_c2rnet(&config, &docs, embedder.as_ref(), ndp.as_ref())?;
        outcome.checkpoint.save(out)?;
        self.write_log(log, &outcome.log)?;
        let full_f = outcome.log.last().and_then(|r| r.train_full_f);
        let mut msg = format!(
            "trained RST parser ({}) for {} epochs on {} documents",
            config.fusion,
            config.epochs,
            docs.len()
        );
        if let Some(f) = full_f {
            let _ = write!(msg, "; training Full-F {f:.1}");
        }
        let _ = writeln!(msg, "\ncheckpoint: {}", out.display());
        Ok(msg)
    }

    fn parse(&self, checkpoint: &Path, input: &Path) -> Result<String, CliError> {
        let ckpt = Checkpoint::load(self.resolve(checkpoint))?;
        let model = ckpt.to_c2rnet()?;
        let embedder = embedder_from_config(&ckpt.config()?)?;
        let docs = load_corpus_without_trees(self.resolve(input))?;
        let parsed = parse_documents(
            &ModelDecoder {
                model: &model,
                embedder: embedder.as_ref(),
            },
            &docs,
        )?;
        let mut buf = Vec::new();
        write_corpus(&mut buf, &parsed).map_err(|e| CliError::Runtime(e.to_string()))?;
        match &self.out {
            Some(path) => {
                self.write(path, &buf)?;
                Ok(format!(
                    "parsed {} documents into {}\n",
                    parsed.len(),
                    path.display()
                ))
            }
            None => Ok(String::from_utf8(buf).expect("JSON is UTF-8")),
        }
    }

    fn score(&self, pred: &Path, gold: &Path) -> Result<String, CliError> {
        let pred = self.load_trees(pred)?;
        let gold = self.load_trees(gold)?;
        let scores = score_both(&pred, &gold)?;
        self.write_report(&json!({ "documents": gold.len(), "scores": scores }))?;
        Ok(score_lines(&scores, gold.len()))
    }

    fn evaluate(&self, checkpoints: &[PathBuf], test: Option<&Path>) -> Result<String, CliError> {
        let relations = self.config.relation_inventory()?;
        let docs = load_corpus(
            self.input(test, &self.config.test_path, "test corpus")?,
            &relations,
        )?;
        let reports = checkpoints
            .iter()
            .map(|p| {
                let ckpt = Checkpoint::load(self.resolve(p))?;
                let embedder = embedder_from_config(&ckpt.config()?)?;
                Ok(evaluate_checkpoint(&ckpt, &docs, embedder.as_ref())?)
            })
            .collect::<Result<Vec<EvaluationReport>, CliError>>()?;
        let [orig, rst] = average_scores(&reports).expect("at least one checkpoint");
        let mut out = String::new();
        for (path, r) in checkpoints.iter().zip(&reports) {
            let _ = writeln!(out, "{}", path.display());
            out.push_str(&score_lines(&[r.orig.clone(), r.rst.clone()], docs.len()));
        }
        let fmt = |v: [f64; 4]| {
            v.map(|x| format!("{:.1}", crate::metrics::round1(x)))
                .join("/")
        };
        let _ = writeln!(out, "mean over {} run(s)", reports.len());
        let _ = writeln!(out, "{} {}", Convention::Original.key(), fmt(orig));
        let _ = writeln!(out, "{} {}", Convention::Rst.key(), fmt(rst));
        if let [only] = reports.as_slice() {
            out.push('\n');
            out.push_str(&format_groups(&only.groups));
            out.push('\n');
            out.push_str(&format_thresholds(&only.thresholds));
        }
        self.write_report(&json!({
            "runs": reports.iter().map(|r| json!({"scores": [&r.orig, &r.rst], "groups": r.groups, "thresholds": r.thresholds})).collect::<Vec<_>>(),
            "mean": { "original": orig, "rst": rst },
        }))?;
        Ok(out)
    }

    fn analyze(
        &self,
        pred: &Path,
        gold: &Path,
        compare: Option<&Path>,
        basis: Basis,
    ) -> Result<String, CliError> {
        let gold = self.load_trees(gold)?;
        let pred = self.load_trees(pred)?;
        let groups = span_group_accuracy(&pred, &gold, &default_groups(), basis)?;
        let thresholds = threshold_table(&pred, &gold, &DEFAULT_THRESHOLDS, basis)?;
        let mut out = format!("basis: {}\n\n", basis.name());
        out.push_str(&format_groups(&groups));
        out.push('\n');
        out.push_str(&format_thresholds(&thresholds));
        let mut report =
            json!({ "basis": basis.name(), "groups": groups, "thresholds": thresholds });
        if let Some(other) = compare {
            let other = self.load_trees(other)?;
            let other_groups = span_group_accuracy(&other, &gold, &default_groups(), basis)?;
            let other_thresholds = threshold_table(&other, &gold, &DEFAULT_THRESHOLDS, basis)?;
            let by_group = compare_groups(&groups, &other_groups);
            let by_threshold = compare_thresholds(&thresholds, &other_thresholds);
            out.push_str("\ndifference by span length (first minus second)\n");
            out.push_str(&format_differences(&by_group));
            out.push_str("\ndifference above each threshold (first minus second)\n");
            out.push_str(&format_differences(&by_threshold));
            report["difference"] = json!({ "groups": by_group, "thresholds": by_threshold });
        }
        self.write_report(&report)?;
        Ok(out)
    }

    fn probe(
        &self,
        checkpoint: &Path,
        ndp_checkpoint: &Path,
        test: &Path,
    ) -> Result<String, CliError> {
        let c2r = Checkpoint::load(self.resolve(checkpoint))?;
        let ndp = Checkpoint::load(self.resolve(ndp_checkpoint))?;
        let corpus = load_ndp_corpus(self.resolve(test))?;
        let embedder = embedder_from_config(&ndp.config()?)?;
        let original = ndp_accuracy(&ndp.to_ndp_model()?, &corpus, embedder.as_ref())?;
        let probed = probe_ndp(&c2r, &ndp, &corpus, embedder.as_ref())?;
        self.write_report(&json!({ "original_accuracy": original, "probed_accuracy": probed }))?;
        Ok(format!(
            "original NDP accuracy {original:.1}%\nprobed accuracy {probed:.1}%\n"
        ))
    }

    fn validate(&self, corpus: &Path, ndp: bool) -> Result<String, CliError> {
        let relations = self.config.relation_inventory()?;
        let path = self.resolve(corpus);
        let docs = load_corpus(&path, &relations)?;
        if ndp {
            crate::ndp_corpus::NdpCorpus::new(docs.clone())?;
        }
        let mut problems = Vec::new();
        for d in &docs {
            if let Some(t) = d.gold_tree() {
                problems.extend(
                    validate(t, d)
                        .into_iter()
                        .map(|v| format!("{}: {v}", d.doc_id())),
                );
            }
        }
        if !problems.is_empty() {
            return Err(CliError::Validation(problems.join("\n")));
        }
        let trees = docs.iter().filter(|d| d.gold_tree().is_some()).count();
        let edus: usize = docs.iter().map(Document::n_edus).sum();
        Ok(format!(
            "{}: {} documents, {edus} EDUs, {trees} trees; no problems found\n",
            path.display(),
            docs.len()
        ))
    }
}

fn resolve(data_dir: Option<&Path>, path: &Path) -> PathBuf {
    match data_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn tree_map(docs: &[Document]) -> Result<BTreeMap<String, RstTree>, CliError> {
    docs.iter()
        .map(|d| {
            let t = d.gold_tree().ok_or_else(|| {
                CliError::Validation(format!("document '{}' has no tree", d.doc_id()))
            })?;
            Ok((d.doc_id().to_string(), t.clone()))
        })
        .collect()
}

fn score_lines(scores: &[ParsevalScore], documents: usize) -> String {
    let mut out = String::new();
    for s in scores {
        let _ = write!(out, "{} {}", s.convention.key(), s.quadruple());
        if s.is_vacuous() {
            out.push_str(" (no constituents)");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "documents: {documents}");
    out.push_str(&format_table("system", scores));
    out
}
