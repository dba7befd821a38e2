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

//! Micro-averaged Parseval scoring.
//!
//! Constituents from all documents are pooled before computing F1, so
//! long documents weigh more than short ones. Four columns are reported:
//! span only (S), span + nuclearity (N), span + relation (R) and all three (F).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::treebank::{constituents, Convention, LabeledConstituent, RstTree, Span};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("document '{doc_id}' is missing from the {side} trees")]
    DocSetMismatch { doc_id: String, side: &'static str },
    #[error("document '{doc_id}': predicted tree has {predicted} EDUs, gold has {gold}")]
    LeafCountMismatch {
        doc_id: String,
        predicted: usize,
        gold: usize,
    },
    #[error("matched count {matched} exceeds predicted {predicted} or gold {gold}")]
    MatchedExceedsCount {
        matched: usize,
        predicted: usize,
        gold: usize,
    },
}

/// `200·m / (p + g)`. Two empty sets score 100; one empty set scores 0.
pub fn micro_f1(matched: usize, predicted: usize, gold: usize) -> Result<f64, MetricsError> {
    if matched > predicted || matched > gold {
        return Err(MetricsError::MatchedExceedsCount {
            matched,
            predicted,
            gold,
        });
    }
    Ok(match (predicted, gold) {
        (0, 0) => 100.0,
        (0, _) | (_, 0) => 0.0,
        _ => 200.0 * matched as f64 / (predicted + gold) as f64,
    })
}

/// One decimal, ties away from zero.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Column {
    Span,
    Nuclearity,
    Relation,
    Full,
}

impl Column {
    pub const ALL: [Column; 4] = [
        Column::Span,
        Column::Nuclearity,
        Column::Relation,
        Column::Full,
    ];

    pub fn letter(self) -> &'static str {
        match self {
            Column::Span => "S",
            Column::Nuclearity => "N",
            Column::Relation => "R",
            Column::Full => "F",
        }
    }

    fn matches(self, a: &LabeledConstituent, b: &LabeledConstituent) -> bool {
        match self {
            Column::Span => true,
            Column::Nuclearity => a.nuclearity_tag == b.nuclearity_tag,
            Column::Relation => a.relation_tag == b.relation_tag,
            Column::Full => {
                a.nuclearity_tag == b.nuclearity_tag && a.relation_tag == b.relation_tag
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub matched: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl Counts {
    fn merge(self, other: Counts) -> Counts {
        Counts {
            matched: self.matched + other.matched,
            predicted: self.predicted + other.predicted,
            gold: self.gold + other.gold,
        }
    }

    pub fn f1(&self) -> f64 {
        micro_f1(self.matched, self.predicted, self.gold)
            .expect("counts from a scorer are consistent")
    }
}

/// Pooled counts for all four columns under one convention.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParsevalScore {
    pub convention: Convention,
    pub counts: [Counts; 4],
}

impl ParsevalScore {
    pub fn column(&self, c: Column) -> f64 {
        self.counts[c as usize].f1()
    }

    pub fn s(&self) -> f64 {
        self.column(Column::Span)
    }

    pub fn n(&self) -> f64 {
        self.column(Column::Nuclearity)
    }

    pub fn r(&self) -> f64 {
        self.column(Column::Relation)
    }

    pub fn f(&self) -> f64 {
        self.column(Column::Full)
    }

    /// Unrounded `[S, N, R, F]`.
    pub fn values(&self) -> [f64; 4] {
        [self.s(), self.n(), self.r(), self.f()]
    }

    /// `[S, N, R, F]` at reporting precision.
    pub fn rounded(&self) -> [f64; 4] {
        self.values().map(round1)
    }

    /// True when every column pooled zero predicted and zero gold constituents.
    pub fn is_vacuous(&self) -> bool {
        self.counts.iter().all(|c| c.predicted == 0 && c.gold == 0)
    }

    /// `"S/N/R/F"` with one decimal each.
    pub fn quadruple(&self) -> String {
        let [s, n, r, f] = self.rounded();
        format!("{s:.1}/{n:.1}/{r:.1}/{f:.1}")
    }
}

/// Pairs predicted and gold trees by doc_id, checking both sets agree.
pub fn align<'a>(
    pred: &'a BTreeMap<String, RstTree>,
    gold: &'a BTreeMap<String, RstTree>,
) -> Result<Vec<(&'a str, &'a RstTree, &'a RstTree)>, MetricsError> {
    if let Some(id) = gold.keys().find(|k| !pred.contains_key(*k)) {
        return Err(MetricsError::DocSetMismatch {
            doc_id: id.clone(),
            side: "predicted",
        });
    }
    if let Some(id) = pred.keys().find(|k| !gold.contains_key(*k)) {
        return Err(MetricsError::DocSetMismatch {
            doc_id: id.clone(),
            side: "gold",
        });
    }
    gold.iter()
        .map(|(id, g)| {
            let p = &pred[id];
            if p.leaf_count() != g.leaf_count() {
                return Err(MetricsError::LeafCountMismatch {
                    doc_id: id.clone(),
                    predicted: p.leaf_count(),
                    gold: g.leaf_count(),
                });
            }
            Ok((id.as_str(), p, g))
        })
        .collect()
}

fn by_span(tree: &RstTree, convention: Convention) -> HashMap<Span, LabeledConstituent> {
    constituents(tree, convention)
        .into_iter()
        .map(|c| (c.span, c))
        .collect()
}

/// Pooled Parseval score.
pub fn score(
    pred: &BTreeMap<String, RstTree>,
    gold: &BTreeMap<String, RstTree>,
    convention: Convention,
) -> Result<ParsevalScore, MetricsError> {
    let pairs = align(pred, gold)?;
    let per_doc: Vec<[Counts; 4]> = pairs
        .par_iter()
        .map(|(_, p, g)| {
            let p = by_span(p, convention);
            let g = by_span(g, convention);
            Column::ALL.map(|col| Counts {
                matched: g
                    .iter()
                    .filter(|(span, gc)| p.get(span).is_some_and(|pc| col.matches(pc, gc)))
                    .count(),
                predicted: p.len(),
                gold: g.len(),
            })
        })
        .collect();
    let counts = per_doc.into_iter().fold([Counts::default(); 4], |acc, d| {
        [0, 1, 2, 3].map(|i| acc[i].merge(d[i]))
    });
    Ok(ParsevalScore { convention, counts })
}

/// Reference scorer: explicit intersections of materialized, projected
/// constituent sets tagged by document.
pub fn oracle_score(
    pred: &BTreeMap<String, RstTree>,
    gold: &BTreeMap<String, RstTree>,
    convention: Convention,
) -> Result<ParsevalScore, MetricsError> {
    let pairs = align(pred, gold)?;
    type Key = (String, Span, Option<String>, Option<String>);
    let project = |doc: &str, c: &LabeledConstituent, col: Column| -> Key {
        let nuc =
            matches!(col, Column::Nuclearity | Column::Full).then(|| c.nuclearity_tag.clone());
        let rel = matches!(col, Column::Relation | Column::Full).then(|| c.relation_tag.clone());
        (doc.to_string(), c.span, nuc, rel)
    };
    let mut counts = [Counts::default(); 4];
    for col in Column::ALL {
        let mut ps: BTreeSet<Key> = BTreeSet::new();
        let mut gs: BTreeSet<Key> = BTreeSet::new();
        for (doc, p, g) in &pairs {
            ps.extend(
                constituents(p, convention)
                    .iter()
                    .map(|c| project(doc, c, col)),
            );
            gs.extend(
                constituents(g, convention)
                    .iter()
                    .map(|c| project(doc, c, col)),
            );
        }
        counts[col as usize] = Counts {
            matched: ps.intersection(&gs).count(),
            predicted: ps.len(),
            gold: gs.len(),
        };
    }
    Ok(ParsevalScore { convention, counts })
}

/// Both conventions, Original first.
pub fn score_both(
    pred: &BTreeMap<String, RstTree>,
    gold: &BTreeMap<String, RstTree>,
) -> Result<[ParsevalScore; 2], MetricsError> {
    Ok([
        score(pred, gold, Convention::Original)?,
        score(pred, gold, Convention::Rst)?,
    ])
}

/// Column-wise mean of reports from several runs over the same convention.
pub fn average(runs: &[[f64; 4]]) -> Option<[f64; 4]> {
    if runs.is_empty() {
        return None;
    }
    let n = runs.len() as f64;
    Some([0, 1, 2, 3].map(|c| runs.iter().map(|r| r[c]).sum::<f64>() / n))
}

/// Fixed-width table, one row per score.
pub fn format_table(system: &str, scores: &[ParsevalScore]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<20} {:<18} {:>6} {:>6} {:>6} {:>6}",
        "system", "metric", "S", "N", "R", "F"
    );
    for s in scores {
        let [a, b, c, d] = s.rounded();
        let _ = writeln!(
            out,
            "{:<20} {:<18} {:>6.1} {:>6.1} {:>6.1} {:>6.1}{}",
            system,
            s.convention.name(),
            a,
            b,
            c,
            d,
            if s.is_vacuous() {
                "  (no constituents)"
            } else {
                ""
            }
        );
    }
    out
}
