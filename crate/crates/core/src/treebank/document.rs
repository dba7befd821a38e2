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

use std::collections::BTreeSet;
use std::ops::Range;

use crate::ndp_corpus::ContentType;

use super::tree::RstTree;
use super::validate::validate_tree;
use super::TreebankError;

/// A document with gold EDU, sentence and paragraph structure.
///
/// Boundaries are end-exclusive: EDU `e` (0-based) covers tokens
/// `edu_boundaries[e-1] .. edu_boundaries[e]`; sentence `s` covers EDUs
/// `sentence_boundaries[s-1] .. sentence_boundaries[s]`. Paragraph starts are
/// 0-based EDU indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    doc_id: String,
    tokens: Vec<String>,
    edu_boundaries: Vec<usize>,
    sentence_boundaries: Vec<usize>,
    paragraph_starts: BTreeSet<usize>,
    gold_tree: Option<RstTree>,
    ndp_labels: Option<Vec<ContentType>>,
}

impl Document {
    pub fn new(
        doc_id: impl Into<String>,
        tokens: Vec<String>,
        edu_boundaries: Vec<usize>,
        sentence_boundaries: Vec<usize>,
        paragraph_starts: BTreeSet<usize>,
    ) -> Result<Self, TreebankError> {
        let doc = Document {
            doc_id: doc_id.into(),
            tokens,
            edu_boundaries,
            sentence_boundaries,
            paragraph_starts,
            gold_tree: None,
            ndp_labels: None,
        };
        doc.check_structure()?;
        Ok(doc)
    }

    /// One sentence and one paragraph per EDU; handy for fixtures.
    pub fn from_edus<S: AsRef<str>>(
        doc_id: impl Into<String>,
        edus: &[Vec<S>],
    ) -> Result<Self, TreebankError> {
        let mut tokens = Vec::new();
        let mut bounds = Vec::new();
        for edu in edus {
            tokens.extend(edu.iter().map(|t| t.as_ref().to_string()));
            bounds.push(tokens.len());
        }
        let n = edus.len();
        let sentences = (1..=n).collect();
        let paragraphs = if n > 0 { [0].into() } else { BTreeSet::new() };
        Document::new(doc_id, tokens, bounds, sentences, paragraphs)
    }

    fn invalid(&self, message: String) -> TreebankError {
        TreebankError::InvalidDocument {
            doc_id: self.doc_id.clone(),
            message,
        }
    }

    fn check_structure(&self) -> Result<(), TreebankError> {
        let mut prev = 0;
        for (e, &b) in self.edu_boundaries.iter().enumerate() {
            if b <= prev {
                return Err(self.invalid(format!(
                    "edu_boundaries must be strictly increasing and positive (EDU {e} ends at {b})"
                )));
            }
            prev = b;
        }
        if prev != self.tokens.len() {
            return Err(self.invalid(format!(
                "last EDU boundary {prev} does not equal token count {}",
                self.tokens.len()
            )));
        }
        let n_edus = self.edu_boundaries.len();
        let mut prev = 0;
        for &b in &self.sentence_boundaries {
            if b <= prev || b > n_edus {
                return Err(self.invalid(format!(
                    "sentence boundary {b} is not increasing within 1..={n_edus}"
                )));
            }
            prev = b;
        }
        if prev != n_edus {
            return Err(self.invalid(format!(
                "last sentence boundary {prev} does not equal EDU count {n_edus}"
            )));
        }
        if n_edus > 0 && !self.paragraph_starts.contains(&0) {
            return Err(self.invalid("paragraph_starts must contain 0".into()));
        }
        let sentence_starts: BTreeSet<usize> = std::iter::once(0)
            .chain(self.sentence_boundaries.iter().copied())
            .filter(|&s| s < n_edus)
            .collect();
        if let Some(p) = self
            .paragraph_starts
            .iter()
            .find(|p| !sentence_starts.contains(p))
        {
            return Err(self.invalid(format!("paragraph start {p} is not a sentence-start EDU")));
        }
        Ok(())
    }

    pub fn with_tree(mut self, tree: RstTree) -> Result<Self, TreebankError> {
        if let Some(v) = validate_tree(&tree, self.n_edus()).into_iter().next() {
            return Err(self.invalid(format!("gold tree: {v}")));
        }
        self.gold_tree = Some(tree);
        Ok(self)
    }

    pub fn with_ndp_labels(mut self, labels: Vec<ContentType>) -> Result<Self, TreebankError> {
        if labels.len() != self.n_sentences() {
            return Err(TreebankError::LabelCountMismatch {
                doc_id: self.doc_id.clone(),
                sentences: self.n_sentences(),
                labels: labels.len(),
            });
        }
        self.ndp_labels = Some(labels);
        Ok(self)
    }

    pub fn without_tree(mut self) -> Self {
        self.gold_tree = None;
        self
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn edu_boundaries(&self) -> &[usize] {
        &self.edu_boundaries
    }

    pub fn sentence_boundaries(&self) -> &[usize] {
        &self.sentence_boundaries
    }

    pub fn paragraph_starts(&self) -> &BTreeSet<usize> {
        &self.paragraph_starts
    }

    pub fn gold_tree(&self) -> Option<&RstTree> {
        self.gold_tree.as_ref()
    }

    pub fn ndp_labels(&self) -> Option<&[ContentType]> {
        self.ndp_labels.as_deref()
    }

    pub fn n_tokens(&self) -> usize {
        self.tokens.len()
    }

    pub fn n_edus(&self) -> usize {
        self.edu_boundaries.len()
    }

    pub fn n_sentences(&self) -> usize {
        self.sentence_boundaries.len()
    }

    /// Token range of 0-based EDU `e`.
    pub fn edu_tokens(&self, e: usize) -> Range<usize> {
        let start = if e == 0 {
            0
        } else {
            self.edu_boundaries[e - 1]
        };
        start..self.edu_boundaries[e]
    }

    /// EDU range of 0-based sentence `s`.
    pub fn sentence_edus(&self, s: usize) -> Range<usize> {
        let start = if s == 0 {
            0
        } else {
            self.sentence_boundaries[s - 1]
        };
        start..self.sentence_boundaries[s]
    }

    /// Token range of 0-based sentence `s`.
    pub fn sentence_tokens(&self, s: usize) -> Range<usize> {
        let edus = self.sentence_edus(s);
        self.edu_tokens(edus.start).start..self.edu_tokens(edus.end - 1).end
    }

    pub fn edu_token_ranges(&self) -> Vec<Range<usize>> {
        (0..self.n_edus()).map(|e| self.edu_tokens(e)).collect()
    }

    pub fn sentence_token_ranges(&self) -> Vec<Range<usize>> {
        (0..self.n_sentences())
            .map(|s| self.sentence_tokens(s))
            .collect()
    }

    /// Whether the 0-based EDU `e` begins a paragraph.
    pub fn starts_paragraph(&self, e: usize) -> bool {
        self.paragraph_starts.contains(&e)
    }
}
