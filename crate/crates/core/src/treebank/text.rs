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

//! Bracketed tree text.
//!
//! ```text
//! node := "(" NUC REL node node ")" | "(leaf" INT ")"
//! NUC  := "NN" | "NS" | "SN"
//! ```
//!
//! The canonical form uses single spaces and no trailing whitespace, e.g.
//! `(NS elaboration (leaf 1) (NN list (leaf 2) (leaf 3)))`.

use super::tree::{NodeKind, RelationInventory, RstNode, RstTree};
use super::validate::{validate_tree, Violation};
use super::TreebankError;

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { text, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Next token and its byte offset.
    fn peek(&mut self) -> Option<(usize, Token<'a>)> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let c = rest.chars().next()?;
        let tok = match c {
            '(' => Token::Open,
            ')' => Token::Close,
            _ => {
                let end = rest
                    .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
                    .unwrap_or(rest.len());
                Token::Atom(&rest[..end])
            }
        };
        Some((self.pos, tok))
    }

    fn next(&mut self) -> Option<(usize, Token<'a>)> {
        let (pos, tok) = self.peek()?;
        self.pos = pos
            + match tok {
                Token::Open | Token::Close => 1,
                Token::Atom(a) => a.len(),
            };
        Some((pos, tok))
    }
}

fn syntax(position: usize, message: impl Into<String>) -> TreebankError {
    TreebankError::Syntax {
        position,
        message: message.into(),
    }
}

struct Parser<'a, 'i> {
    lexer: Lexer<'a>,
    inventory: &'i RelationInventory,
}

impl Parser<'_, '_> {
    fn expect_atom(&mut self, what: &str) -> Result<(usize, String), TreebankError> {
        match self.lexer.next() {
            Some((pos, Token::Atom(a))) => Ok((pos, a.to_string())),
            Some((pos, _)) => Err(syntax(pos, format!("expected {what}"))),
            None => Err(syntax(
                self.lexer.text.len(),
                format!("expected {what}, found end of input"),
            )),
        }
    }

    fn expect_close(&mut self) -> Result<(), TreebankError> {
        match self.lexer.next() {
            Some((_, Token::Close)) => Ok(()),
            Some((pos, _)) => Err(syntax(pos, "expected ')'")),
            None => Err(syntax(
                self.lexer.text.len(),
                "expected ')', found end of input",
            )),
        }
    }

    fn node(&mut self) -> Result<RstNode, TreebankError> {
        match self.lexer.next() {
            Some((_, Token::Open)) => {}
            Some((pos, Token::Close)) => return Err(TreebankError::MissingChild { position: pos }),
            Some((pos, Token::Atom(_))) => return Err(syntax(pos, "expected '('")),
            None => {
                return Err(syntax(
                    self.lexer.text.len(),
                    "expected '(', found end of input",
                ))
            }
        }
        let (pos, head) = self.expect_atom("nuclearity or 'leaf'")?;
        if head == "leaf" {
            let (pos, num) = self.expect_atom("leaf number")?;
            let edu: usize = num
                .parse()
                .map_err(|_| syntax(pos, format!("invalid leaf number '{num}'")))?;
            self.expect_close()?;
            return Ok(RstNode::leaf(edu));
        }
        let nuclearity = head
            .parse()
            .map_err(|_| syntax(pos, format!("expected NN, NS, SN or leaf, found '{head}'")))?;
        let (_, rel) = self.expect_atom("relation")?;
        let relation = self.inventory.label(&rel)?;
        let left = self.node()?;
        let right = self.node()?;
        self.expect_close()?;
        Ok(RstNode::internal(nuclearity, relation, left, right))
    }
}

/// Parses and validates a bracketed tree over `n_edus` EDUs.
pub fn parse_tree_text(
    text: &str,
    n_edus: usize,
    inventory: &RelationInventory,
) -> Result<RstTree, TreebankError> {
    let mut parser = Parser {
        lexer: Lexer::new(text),
        inventory,
    };
    let root = parser.node()?;
    if let Some((pos, _)) = parser.lexer.peek() {
        return Err(syntax(pos, "trailing input after tree"));
    }
    let tree = RstTree::new(root);
    if let Some(v) = validate_tree(&tree, n_edus).into_iter().next() {
        return Err(match v {
            Violation::LeafCountMismatch { expected, found } => {
                TreebankError::LeafCountMismatch { expected, found }
            }
            Violation::NonAdjacentChildren { left, right, .. } => {
                TreebankError::NonAdjacentChildren { left, right }
            }
            other => TreebankError::InvalidTree(other.to_string()),
        });
    }
    Ok(tree)
}

/// Canonical text form.
pub fn serialize_tree(tree: &RstTree) -> String {
    let mut out = String::new();
    write_node(tree.root(), &mut out);
    out
}

fn write_node(node: &RstNode, out: &mut String) {
    match &node.kind {
        NodeKind::Leaf => {
            out.push_str("(leaf ");
            out.push_str(&node.span.first.to_string());
            out.push(')');
        }
        NodeKind::Internal {
            nuclearity,
            relation,
            children,
        } => {
            out.push('(');
            out.push_str(nuclearity.as_str());
            out.push(' ');
            out.push_str(relation.as_str());
            out.push(' ');
            write_node(&children[0], out);
            out.push(' ');
            write_node(&children[1], out);
            out.push(')');
        }
    }
}

impl std::fmt::Display for RstTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&serialize_tree(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::tree::{Nuclearity, Span};

    fn inv() -> RelationInventory {
        RelationInventory::new(["elaboration", "list", "joint"]).unwrap()
    }

    const THREE_EDU_TREE: &str = "(NS elaboration (leaf 1) (NN list (leaf 2) (leaf 3)))";

    #[test]
    fn three_edu_tree_round_trip() {
        let t = parse_tree_text(THREE_EDU_TREE, 3, &inv()).unwrap();
        assert_eq!(t.root().span, Span::new(1, 3));
        assert_eq!(t.root().nuclearity(), Some(Nuclearity::NS));
        let (_, right) = t.root().children().unwrap();
        assert_eq!(right.span, Span::new(2, 3));
        assert_eq!(t.internal_nodes().len(), 2);
        assert_eq!(serialize_tree(&t), THREE_EDU_TREE);
    }

    #[test]
    fn single_leaf() {
        let t = parse_tree_text("(leaf 1)", 1, &inv()).unwrap();
        assert!(t.internal_nodes().is_empty());
        assert_eq!(serialize_tree(&t), "(leaf 1)");
    }

    #[test]
    fn missing_child() {
        let err = parse_tree_text("(NS elaboration (leaf 1))", 2, &inv()).unwrap_err();
        assert!(
            matches!(err, TreebankError::MissingChild { position: 24 }),
            "{err:?}"
        );
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_tree_text("(XX list (leaf 1) (leaf 2))", 2, &inv()).unwrap_err();
        assert!(
            matches!(err, TreebankError::Syntax { position: 1, .. }),
            "{err:?}"
        );
        let err = parse_tree_text("(leaf 1) junk", 1, &inv()).unwrap_err();
        assert!(
            matches!(err, TreebankError::Syntax { position: 9, .. }),
            "{err:?}"
        );
        let err = parse_tree_text("(NN list (leaf 1) (leaf 2) (leaf 3))", 3, &inv()).unwrap_err();
        assert!(
            matches!(err, TreebankError::Syntax { position: 27, .. }),
            "{err:?}"
        );
        let err = parse_tree_text("(NN list (leaf 1)", 2, &inv()).unwrap_err();
        assert!(
            matches!(err, TreebankError::Syntax { position: 17, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn semantic_errors() {
        let err = parse_tree_text(THREE_EDU_TREE, 4, &inv()).unwrap_err();
        assert!(matches!(
            err,
            TreebankError::LeafCountMismatch {
                expected: 4,
                found: 3
            }
        ));
        let err = parse_tree_text("(NN list (leaf 1) (leaf 3))", 2, &inv()).unwrap_err();
        assert!(
            matches!(err, TreebankError::NonAdjacentChildren { .. }),
            "{err:?}"
        );
        let err = parse_tree_text("(NN contrast (leaf 1) (leaf 2))", 2, &inv()).unwrap_err();
        assert!(matches!(err, TreebankError::UnknownRelation(r) if r == "contrast"));
        let err = parse_tree_text("(NN span (leaf 1) (leaf 2))", 2, &inv()).unwrap_err();
        assert!(matches!(err, TreebankError::ReservedRelation));
    }

    #[test]
    fn parse_tolerates_extra_whitespace_but_serializes_canonically() {
        let t = parse_tree_text(
            "( NS  elaboration\n(leaf 1)\t(NN list (leaf 2) (leaf 3) ) )",
            3,
            &inv(),
        )
        .unwrap();
        assert_eq!(serialize_tree(&t), THREE_EDU_TREE);
    }
}
