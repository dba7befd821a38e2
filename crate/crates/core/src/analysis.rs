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

//! Accuracy stratified by span length.
//!
//! A node counts as correct for nuclearity when the other tree has an
//! internal node with the same span and nuclearity pattern, and likewise
//! for relation. [`Basis::Gold`] iterates gold nodes and looks them up in
//! the prediction; [`Basis::Predicted`] does the reverse. Span length is the
//! number of EDUs a node subsumes.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::metrics::{align, round1, MetricsError};
use crate::treebank::{Nuclearity, RstTree, Span};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Basis {
    #[default]
    Gold,
    Predicted,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Gold => "gold",
            Basis::Predicted => "predicted",
        }
    }
}

impl std::str::FromStr for Basis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gold" => Ok(Basis::Gold),
            "predicted" => Ok(Basis::Predicted),
            _ => Err(format!("unknown basis '{s}' (expected gold or predicted)")),
        }
    }
}

/// Correct counts out of `total` nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub nuclearity_correct: usize,
    pub relation_correct: usize,
    pub total: usize,
}

impl Tally {
    fn add(&mut self, nuc: bool, rel: bool) {
        self.total += 1;
        self.nuclearity_correct += usize::from(nuc);
        self.relation_correct += usize::from(rel);
    }

    /// Percentage, or `None` for an empty tally.
    pub fn nuclearity_accuracy(&self) -> Option<f64> {
        pct(self.nuclearity_correct, self.total)
    }

    pub fn relation_accuracy(&self) -> Option<f64> {
        pct(self.relation_correct, self.total)
    }
}

fn pct(correct: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| 100.0 * correct as f64 / total as f64)
}

/// Inclusive span-length range; `max == None` is unbounded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanGroup {
    pub min: usize,
    pub max: Option<usize>,
}

impl SpanGroup {
    pub fn new(min: usize, max: Option<usize>) -> Self {
        SpanGroup { min, max }
    }

    pub fn contains(&self, len: usize) -> bool {
        len >= self.min && self.max.is_none_or(|m| len <= m)
    }
}

impl fmt::Display for SpanGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.max {
            Some(m) if m == self.min => write!(f, "{m}"),
            Some(m) => write!(f, "{}-{m}", self.min),
            None => write!(f, "{}+", self.min),
        }
    }
}

/// Short (2), medium (3 to 5) and long (6 or more) spans.
pub fn default_groups() -> Vec<SpanGroup> {
    vec![
        SpanGroup::new(2, Some(2)),
        SpanGroup::new(3, Some(5)),
        SpanGroup::new(6, None),
    ]
}

pub const DEFAULT_THRESHOLDS: [usize; 11] = [3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 15];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupRow {
    pub group: SpanGroup,
    pub tally: Tally,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpanGroupReport {
    pub basis: Basis,
    pub rows: Vec<GroupRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub threshold: usize,
    /// Nodes longer than `threshold`.
    pub above: Tally,
    /// Nodes of length at most `threshold`.
    pub at_or_below: Tally,
}

impl ThresholdRow {
    /// `count> · acc> + count≤ · acc≤` equals the overall correct count for
    /// both label kinds (accuracies in percent, empty sides contribute 0).
    pub fn is_consistent(&self, overall: &Tally) -> bool {
        let weighted = |t: &Tally, acc: Option<f64>| t.total as f64 * acc.unwrap_or(0.0) / 100.0;
        let nuc = weighted(&self.above, self.above.nuclearity_accuracy())
            + weighted(&self.at_or_below, self.at_or_below.nuclearity_accuracy());
        let rel = weighted(&self.above, self.above.relation_accuracy())
            + weighted(&self.at_or_below, self.at_or_below.relation_accuracy());
        self.above.total + self.at_or_below.total == overall.total
            && (nuc - overall.nuclearity_correct as f64).abs() < 1e-9
            && (rel - overall.relation_correct as f64).abs() < 1e-9
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub basis: Basis,
    pub overall: Tally,
    pub rows: Vec<ThresholdRow>,
}

impl ThresholdReport {
    pub fn is_consistent(&self) -> bool {
        self.rows.iter().all(|r| r.is_consistent(&self.overall))
    }
}

/// (span length, nuclearity correct, relation correct) for every scored node.
fn judged_nodes(
    pred: &BTreeMap<String, RstTree>,
    gold: &BTreeMap<String, RstTree>,
    basis: Basis,
) -> Result<Vec<(usize, bool, bool)>, MetricsError> {
    let mut out = Vec::new();
    for (_, p, g) in align(pred, gold)? {
        let (scored, reference) = match basis {
            Basis::Gold => (g, p),
            Basis::Predicted => (p, g),
        };
        let lookup: HashMap<Span, (Nuclearity, &str)> = reference
            .internal_nodes()
            .into_iter()
            .filter_map(|n| Some((n.span, (n.nuclearity()?, n.relation()?.as_str()))))
            .collect();
        for node in scored.internal_nodes() {
            let (Some(nuc), Some(rel)) = (node.nuclearity(), node.relation()) else {
                continue;
            };
            let hit = lookup.get(&node.span);
            out.push((
                node.span.len(),
                hit.is_some_and(|(n, _)| *n == nuc),
                hit.is_some_and(|(_, r)| *r == rel.as_str()),
            ));
        }
    }
    Ok(out)
}

pub fn span_group_accuracy(
    pred: &BTreeMap<String, RstTree>,
    gold: &BTreeMap<String, RstTree>,
    groups: &[SpanGroup],
    basis: Basis,
) -> Result<SpanGroupReport, MetricsError> {
    let nodes = judged_nodes(pred, gold, basis)?;
    let rows = groups
        .iter()
        .map(|group| {
            let mut tally = Tally::default();
            for &(_, nuc, rel) in nodes.iter().filter(|(len, ..)| group.contains(*len)) {
                tally.add(nuc, rel);
            }
            GroupRow {
                group: group.clone(),
                tally,
            }
        })
        .collect();
    Ok(SpanGroupReport { basis, rows })
}

pub fn threshold_table(
    pred: &BTreeMap<String, RstTree>,
    gold: &BTreeMap<String, RstTree>,
    thresholds: &[usize],
    basis: Basis,
) -> Result<ThresholdReport, MetricsError> {
    let nodes = judged_nodes(pred, gold, basis)?;
    let mut overall = Tally::default();
    for &(_, nuc, rel) in &nodes {
        overall.add(nuc, rel);
    }
    let rows = thresholds
        .iter()
        .map(|&t| {
            let mut row = ThresholdRow {
                threshold: t,
                above: Tally::default(),
                at_or_below: Tally::default(),
            };
            for &(len, nuc, rel) in &nodes {
                if len > t {
                    row.above.add(nuc, rel);
                } else {
                    row.at_or_below.add(nuc, rel);
                }
            }
            row
        })
        .collect();
    Ok(ThresholdReport {
        basis,
        overall,
        rows,
    })
}

/// `a − b` per accuracy; `None` where either side is undefined.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Difference {
    pub label: String,
    pub nuclearity: Option<f64>,
    pub relation: Option<f64>,
}

fn diff(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? - b?)
}

/// Per-group gaps between system `a` and system `b`. Groups are paired by position.
pub fn compare_groups(a: &SpanGroupReport, b: &SpanGroupReport) -> Vec<Difference> {
    a.rows
        .iter()
        .zip(&b.rows)
        .map(|(x, y)| Difference {
            label: x.group.to_string(),
            nuclearity: diff(x.tally.nuclearity_accuracy(), y.tally.nuclearity_accuracy()),
            relation: diff(x.tally.relation_accuracy(), y.tally.relation_accuracy()),
        })
        .collect()
}

/// Gaps on the ">" side of every threshold.
pub fn compare_thresholds(a: &ThresholdReport, b: &ThresholdReport) -> Vec<Difference> {
    a.rows
        .iter()
        .zip(&b.rows)
        .map(|(x, y)| Difference {
            label: format!(">{}", x.threshold),
            nuclearity: diff(x.above.nuclearity_accuracy(), y.above.nuclearity_accuracy()),
            relation: diff(x.above.relation_accuracy(), y.above.relation_accuracy()),
        })
        .collect()
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{:.1}", round1(x)))
}

pub fn format_groups(report: &SpanGroupReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} {:>6} {:>8} {:>8}",
        "length", "nodes", "nuc", "rel"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<8} {:>6} {:>8} {:>8}",
            r.group.to_string(),
            r.tally.total,
            cell(r.tally.nuclearity_accuracy()),
            cell(r.tally.relation_accuracy())
        );
    }
    out
}

pub fn format_thresholds(report: &ThresholdReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<6} {:>6} {:>8} {:>8} {:>6} {:>8} {:>8}",
        "t", "n>t", "nuc>t", "rel>t", "n<=t", "nuc<=t", "rel<=t"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<6} {:>6} {:>8} {:>8} {:>6} {:>8} {:>8}",
            r.threshold,
            r.above.total,
            cell(r.above.nuclearity_accuracy()),
            cell(r.above.relation_accuracy()),
            r.at_or_below.total,
            cell(r.at_or_below.nuclearity_accuracy()),
            cell(r.at_or_below.relation_accuracy())
        );
    }
    out
}

pub fn format_differences(rows: &[Difference]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<8} {:>8} {:>8}", "span", "d_nuc", "d_rel");
    for d in rows {
        let _ = writeln!(
            out,
            "{:<8} {:>8} {:>8}",
            d.label,
            cell(d.nuclearity),
            cell(d.relation)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{parse_tree_text, RelationInventory};

    fn inv() -> RelationInventory {
        RelationInventory::new(["elaboration", "list", "joint"]).unwrap()
    }

    fn one(id: &str, text: &str, n: usize) -> BTreeMap<String, RstTree> {
        BTreeMap::from([(id.to_string(), parse_tree_text(text, n, &inv()).unwrap())])
    }

    const FIVE: &str = "(NS elaboration (NN list (leaf 1) (leaf 2)) (NS elaboration (leaf 3) (NN joint (leaf 4) (leaf 5))))";

    #[test]
    fn identity_is_perfect_everywhere() {
        let gold = one("d", FIVE, 5);
        let g = span_group_accuracy(&gold, &gold, &default_groups(), Basis::Gold).unwrap();
        assert_eq!(g.rows[0].tally.nuclearity_accuracy(), Some(100.0));
        assert_eq!(g.rows[1].tally.relation_accuracy(), Some(100.0));
        assert_eq!(g.rows[2].tally.nuclearity_accuracy(), None);
        let t = threshold_table(&gold, &gold, &DEFAULT_THRESHOLDS, Basis::Gold).unwrap();
        assert!(t.is_consistent());
        assert_eq!(t.rows[0].above.nuclearity_accuracy(), Some(100.0));
        // the longest span is the 5-EDU root
        assert_eq!(t.rows[2].above.total, 0);
        assert_eq!(t.rows[2].above.nuclearity_accuracy(), None);
        assert_eq!(t.rows[2].at_or_below, t.overall);
    }

    #[test]
    fn group_counts_cover_all_internal_nodes() {
        let gold = one("d", FIVE, 5);
        let g = span_group_accuracy(&gold, &gold, &default_groups(), Basis::Gold).unwrap();
        let total: usize = g.rows.iter().map(|r| r.tally.total).sum();
        assert_eq!(total, 4);
        assert_eq!(
            g.rows.iter().map(|r| r.tally.total).collect::<Vec<_>>(),
            [2, 2, 0]
        );
    }

    #[test]
    fn basis_changes_denominator() {
        let gold = one("d", FIVE, 5);
        let pred = one(
            "d",
            "(NS elaboration (leaf 1) (NN list (leaf 2) (NN joint (leaf 3) (NS elaboration (leaf 4) (leaf 5)))))",
            5,
        );
        let by_gold = span_group_accuracy(&pred, &gold, &default_groups(), Basis::Gold).unwrap();
        let by_pred =
            span_group_accuracy(&pred, &gold, &default_groups(), Basis::Predicted).unwrap();
        // gold 2-spans (1,2) and (4,5); only (4,5) exists in pred, with NS
        assert_eq!(by_gold.rows[0].tally.total, 2);
        assert_eq!(by_gold.rows[0].tally.nuclearity_correct, 0);
        assert_eq!(by_gold.rows[0].tally.relation_correct, 0);
        // predicted 2-span (4,5) labeled NS elaboration; gold has NN joint
        assert_eq!(by_pred.rows[0].tally.total, 1);
        assert_eq!(by_pred.rows[1].tally.total, 3);
    }

    #[test]
    fn difference_rows() {
        let gold = one("d", FIVE, 5);
        let pred = one(
            "d",
            "(NS elaboration (NN list (leaf 1) (leaf 2)) (NS elaboration (leaf 3) (NS joint (leaf 4) (leaf 5))))",
            5,
        );
        let a = span_group_accuracy(&gold, &gold, &default_groups(), Basis::Gold).unwrap();
        let b = span_group_accuracy(&pred, &gold, &default_groups(), Basis::Gold).unwrap();
        let d = compare_groups(&a, &b);
        assert_eq!(d[0].nuclearity, Some(50.0));
        assert_eq!(d[0].relation, Some(0.0));
        assert_eq!(d[2].nuclearity, None);
        assert!(format_differences(&d).contains("n/a"));
    }
}
