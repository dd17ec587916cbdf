//! Annotated problems, the line-delimited corpus format and gold labels.
//!
//! One record per line, each a JSON object:
//!
//! ```text
//! {"id": "...", "text": "...",
//!  "tokens": [{"text","pos","head","deprel","chunk","sentence_id"[,"lemma"]}, ...],
//!  "quantities": [{"index": 0, "value": "74", "token": 3}, ...],
//!  "answer": "12", "gold_tree": "(- q1 q0)", "fold": 0}
//! ```
//!
//! `head` is a global token index (or -1 for a sentence root). Numbers are
//! decimal strings so gold answers stay exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{is_monotonic, lca_map, monotonize, ExprError, ExprTree, LcaMap};
use crate::rational::{is_numeric, parse_decimal, to_decimal_string, Rational};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{id}: malformed record: {msg}")]
    Format { id: String, msg: String },
    #[error("{id}: gold tree evaluates to {got}, answer is {expected}")]
    GoldMismatch { id: String, expected: String, got: String },
    #[error("{id}: invalid gold tree: {msg}")]
    InvalidGold { id: String, msg: String },
    #[error("cannot read corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("{} malformed record(s); first at line {}: {}", .0.len(), .0[0].line, .0[0].error)]
    Aggregate(Vec<LocatedError>),
}

/// A record-level error with its 1-based line number.
#[derive(Debug, Error)]
#[error("line {line}: {error}")]
pub struct LocatedError {
    pub line: usize,
    pub error: Box<CorpusError>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub pos: String,
    pub head: i64,
    pub deprel: String,
    pub chunk: String,
    pub sentence_id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<String>,
}

impl Token {
    /// Lemma column when present, surface form otherwise; lowercased.
    pub fn lemma_or_text(&self) -> String {
        self.lemma.as_deref().unwrap_or(&self.text).to_lowercase()
    }

    pub fn head_index(&self) -> Option<usize> {
        usize::try_from(self.head).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantity {
    pub index: usize,
    pub value: Rational,
    pub token_position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantityRecord {
    pub index: usize,
    pub value: String,
    pub token: usize,
}

/// Raw on-disk form of a problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemRecord {
    pub id: String,
    pub text: String,
    pub tokens: Vec<Token>,
    pub quantities: Vec<QuantityRecord>,
    pub answer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_tree: Option<String>,
    pub fold: i64,
}

/// A validated problem. The gold tree, when present, is read-once, monotonic,
/// over known quantities, and evaluates exactly to `answer`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub id: String,
    pub text: String,
    pub tokens: Vec<Token>,
    pub quantities: Vec<Quantity>,
    pub gold_tree: Option<ExprTree>,
    pub answer: Rational,
    pub fold: i64,
}

/// Training targets derived from a gold tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldLabels {
    pub relevance: BTreeMap<usize, bool>,
    /// Over pairs of relevant quantities only.
    pub lca: LcaMap,
}

impl Problem {
    pub fn from_record(rec: ProblemRecord) -> Result<Problem, CorpusError> {
        let id = rec.id.clone();
        let format = |msg: String| CorpusError::Format { id: id.clone(), msg };

        let n = rec.tokens.len();
        let mut last_sentence = 0;
        for (i, tok) in rec.tokens.iter().enumerate() {
            if tok.sentence_id < last_sentence {
                return Err(format(format!("token {i}: sentence ids must be non-decreasing")));
            }
            last_sentence = tok.sentence_id;
            match tok.head {
                -1 => {}
                h if h < 0 || h as usize >= n => return Err(format(format!("token {i}: head {h} out of range"))),
                h if h as usize == i => return Err(format(format!("token {i}: head points to itself"))),
                h if rec.tokens[h as usize].sentence_id != tok.sentence_id => {
                    return Err(format(format!("token {i}: head {h} is in another sentence")))
                }
                _ => {}
            }
        }

        let mut quantities = Vec::with_capacity(rec.quantities.len());
        for (pos, q) in rec.quantities.iter().enumerate() {
            if q.index != pos {
                return Err(format(format!("quantity {pos} has index {}", q.index)));
            }
            let tok = rec
                .tokens
                .get(q.token)
                .ok_or_else(|| format(format!("quantity {pos}: token {} out of range", q.token)))?;
            if !is_numeric(&tok.text) {
                return Err(format(format!("quantity {pos}: token {:?} is not numeric", tok.text)));
            }
            if let Some(prev) = quantities.last() {
                let prev: &Quantity = prev;
                if prev.token_position >= q.token {
                    return Err(format(format!("quantity {pos}: not ordered by token position")));
                }
            }
            let value = parse_decimal(&q.value).map_err(|e| format(format!("quantity {pos}: {e}")))?;
            quantities.push(Quantity { index: q.index, value, token_position: q.token });
        }

        let answer = parse_decimal(&rec.answer).map_err(|e| format(format!("answer: {e}")))?;

        let gold_tree = match &rec.gold_tree {
            None => None,
            Some(text) => {
                let tree: ExprTree = text.parse().map_err(|e: ExprError| format(format!("gold_tree: {e}")))?;
                if !tree.is_valid() {
                    return Err(CorpusError::InvalidGold { id, msg: format!("{tree} uses a quantity more than once") });
                }
                if let Some(&bad) = tree.leaves().iter().find(|&&i| i >= quantities.len()) {
                    return Err(CorpusError::InvalidGold {
                        id,
                        msg: format!("q{bad} is not a quantity of the problem"),
                    });
                }
                let values: Vec<Rational> = quantities.iter().map(|q| q.value.clone()).collect();
                match tree.evaluate(&values) {
                    Ok(v) if v == answer => {}
                    Ok(v) => {
                        return Err(CorpusError::GoldMismatch {
                            id,
                            expected: to_decimal_string(&answer),
                            got: to_decimal_string(&v),
                        })
                    }
                    Err(e) => {
                        return Err(CorpusError::GoldMismatch {
                            id,
                            expected: to_decimal_string(&answer),
                            got: e.to_string(),
                        })
                    }
                }
                Some(if is_monotonic(&tree) { tree } else { monotonize(&tree) })
            }
        };

        Ok(Problem { id: rec.id, text: rec.text, tokens: rec.tokens, quantities, gold_tree, answer, fold: rec.fold })
    }

    pub fn to_record(&self) -> ProblemRecord {
        ProblemRecord {
            id: self.id.clone(),
            text: self.text.clone(),
            tokens: self.tokens.clone(),
            quantities: self
                .quantities
                .iter()
                .map(|q| QuantityRecord { index: q.index, value: to_decimal_string(&q.value), token: q.token_position })
                .collect(),
            answer: to_decimal_string(&self.answer),
            gold_tree: self.gold_tree.as_ref().map(ExprTree::to_string),
            fold: self.fold,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("records always serialize")
    }

    /// Quantity values indexed by quantity index.
    pub fn values(&self) -> Vec<Rational> {
        self.quantities.iter().map(|q| q.value.clone()).collect()
    }

    pub fn sentence_of(&self, token: usize) -> usize {
        self.tokens[token].sentence_id
    }

    /// Token range of the sentence with the given id.
    pub fn sentence_range(&self, sentence_id: usize) -> Range<usize> {
        let start = self.tokens.iter().position(|t| t.sentence_id == sentence_id).unwrap_or(0);
        let end = self.tokens[start..]
            .iter()
            .position(|t| t.sentence_id != sentence_id)
            .map_or(self.tokens.len(), |k| start + k);
        start..end
    }

    /// Display text of a quantity as it appears in the problem.
    pub fn quantity_text(&self, index: usize) -> String {
        to_decimal_string(&self.quantities[index].value)
    }
}

/// Parses one corpus line.
pub fn parse_problem(line: &str) -> Result<Problem, CorpusError> {
    let rec: ProblemRecord = serde_json::from_str(line)
        .map_err(|e| CorpusError::Format { id: "<record>".to_string(), msg: e.to_string() })?;
    Problem::from_record(rec)
}

/// Relevance from leaf membership and LCA labels from the monotonic gold tree.
/// `None` when the problem has no gold tree.
pub fn derive_labels(p: &Problem) -> Option<GoldLabels> {
    let gold = p.gold_tree.as_ref()?;
    let used: BTreeSet<usize> = gold.leaf_set();
    let relevance = p.quantities.iter().map(|q| (q.index, used.contains(&q.index))).collect();
    Some(GoldLabels { relevance, lca: lca_map(&monotonize(gold)) })
}

/// Parsed problems plus the records that failed, in file order.
#[derive(Debug, Default)]
pub struct Corpus {
    pub problems: Vec<Problem>,
    pub errors: Vec<LocatedError>,
}

/// Parses newline-delimited records. Blank lines are skipped. In strict mode
/// any bad record fails the whole load.
pub fn parse_corpus(text: &str, strict: bool) -> Result<Corpus, CorpusError> {
    let mut corpus = Corpus::default();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_problem(line) {
            Ok(p) => corpus.problems.push(p),
            Err(e) => corpus.errors.push(LocatedError { line: k + 1, error: Box::new(e) }),
        }
    }
    if strict && !corpus.errors.is_empty() {
        return Err(CorpusError::Aggregate(corpus.errors));
    }
    Ok(corpus)
}

pub fn load_corpus(path: impl AsRef<Path>, strict: bool) -> Result<Corpus, CorpusError> {
    let text = fs::read_to_string(path)?;
    parse_corpus(&text, strict)
}
