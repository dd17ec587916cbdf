//! Lowest-common-ancestor operation labels.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ExprError, ExprTree, Op};

/// Operation at the LCA of two quantities, with subtraction and division
/// split by whether the first quantity sits in the left subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LcaLabel {
    Plus,
    Times,
    Minus,
    MinusReverse,
    Div,
    DivReverse,
}

impl LcaLabel {
    pub const ALL: [LcaLabel; 6] =
        [LcaLabel::Plus, LcaLabel::Times, LcaLabel::Minus, LcaLabel::MinusReverse, LcaLabel::Div, LcaLabel::DivReverse];

    /// Label for an LCA node with operation `op`; `in_order` is true when the
    /// first quantity is under the left child.
    pub fn from_op(op: Op, in_order: bool) -> LcaLabel {
        match (op, in_order) {
            (Op::Add, _) => LcaLabel::Plus,
            (Op::Mul, _) => LcaLabel::Times,
            (Op::Sub, true) => LcaLabel::Minus,
            (Op::Sub, false) => LcaLabel::MinusReverse,
            (Op::Div, true) => LcaLabel::Div,
            (Op::Div, false) => LcaLabel::DivReverse,
        }
    }

    pub fn op(self) -> Op {
        match self {
            LcaLabel::Plus => Op::Add,
            LcaLabel::Times => Op::Mul,
            LcaLabel::Minus | LcaLabel::MinusReverse => Op::Sub,
            LcaLabel::Div | LcaLabel::DivReverse => Op::Div,
        }
    }

    /// Label seen from the other quantity of the pair.
    pub fn reverse(self) -> LcaLabel {
        match self {
            LcaLabel::Minus => LcaLabel::MinusReverse,
            LcaLabel::MinusReverse => LcaLabel::Minus,
            LcaLabel::Div => LcaLabel::DivReverse,
            LcaLabel::DivReverse => LcaLabel::Div,
            other => other,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            LcaLabel::Plus => "PLUS",
            LcaLabel::Times => "TIMES",
            LcaLabel::Minus => "MINUS",
            LcaLabel::MinusReverse => "MINUS_REVERSE",
            LcaLabel::Div => "DIV",
            LcaLabel::DivReverse => "DIV_REVERSE",
        }
    }
}

impl fmt::Display for LcaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LcaLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LcaLabel::ALL.into_iter().find(|l| l.name() == s).ok_or_else(|| format!("unknown LCA label {s:?}"))
    }
}

/// LCA labels keyed by quantity pairs `(qi, qj)` with `qi < qj`.
pub type LcaMap = BTreeMap<(usize, usize), LcaLabel>;

fn path_to(t: &ExprTree, index: usize, path: &mut Vec<bool>) -> bool {
    match t {
        ExprTree::Leaf(i) => *i == index,
        ExprTree::Node(_, l, r) => {
            path.push(false);
            if path_to(l, index, path) {
                return true;
            }
            path.pop();
            path.push(true);
            if path_to(r, index, path) {
                return true;
            }
            path.pop();
            false
        }
    }
}

/// LCA label of the ordered pair `(qi, qj)`.
pub fn lca_label(tree: &ExprTree, qi: usize, qj: usize) -> Result<LcaLabel, ExprError> {
    let mut pi = Vec::new();
    let mut pj = Vec::new();
    if !path_to(tree, qi, &mut pi) {
        return Err(ExprError::MissingQuantity(qi));
    }
    if !path_to(tree, qj, &mut pj) {
        return Err(ExprError::MissingQuantity(qj));
    }
    let mut node = tree;
    for (step, (&a, &b)) in pi.iter().zip(&pj).enumerate() {
        let ExprTree::Node(op, l, r) = node else { unreachable!("paths only descend through internal nodes") };
        if a != b {
            return Ok(LcaLabel::from_op(*op, !pi[step]));
        }
        node = if a { r } else { l };
    }
    // Equal paths mean qi == qj, or a repeated index in an invalid tree.
    Err(ExprError::MissingQuantity(qj))
}

fn fill_map(t: &ExprTree, map: &mut LcaMap) {
    if let ExprTree::Node(op, l, r) = t {
        let right = r.leaves();
        for a in l.leaves() {
            for &b in &right {
                let key = (a.min(b), a.max(b));
                map.insert(key, LcaLabel::from_op(*op, a < b));
            }
        }
        fill_map(l, map);
        fill_map(r, map);
    }
}

/// Labels for every pair of distinct leaves.
pub fn lca_map(tree: &ExprTree) -> LcaMap {
    let mut map = LcaMap::new();
    fill_map(tree, &mut map);
    map
}

pub fn lca_equivalent(t1: &ExprTree, t2: &ExprTree) -> Result<bool, ExprError> {
    if t1.leaf_set() != t2.leaf_set() {
        return Err(ExprError::LeafSetMismatch);
    }
    Ok(lca_map(t1) == lca_map(t2))
}
