//! Read-once arithmetic expression trees.
//!
//! Leaves refer to quantities by index; internal nodes carry one of the four
//! basic operations. Everything here is pure and works on immutable values.
//!
//! The text form is prefix notation, `(* (+ q0 q1) q2)`, and the printer and
//! parser round-trip exactly.

mod chain;
mod enumerate;
mod lca;
pub mod rewrite;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use thiserror::Error;

use crate::rational::Rational;

pub use chain::{canonicalize, chains, is_monotonic, monotonize, root_chain, Chain, ChainKind, ChainTerm, Role};
pub use enumerate::{enumerate_trees, random_tree, MAX_ENUMERATION_LEAVES};
pub use lca::{lca_equivalent, lca_label, lca_map, LcaLabel, LcaMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("division by zero")]
    DivByZero,
    #[error("quantity q{0} is not present")]
    MissingQuantity(usize),
    #[error("trees are over different leaf sets")]
    LeafSetMismatch,
    #[error("{0} quantities exceed the enumeration limit of {MAX_ENUMERATION_LEAVES}")]
    TooManyQuantities(usize),
    #[error("cannot parse expression at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::Add, Op::Sub, Op::Mul, Op::Div];

    pub fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
            Op::Div => '/',
        }
    }

    pub fn from_symbol(c: char) -> Option<Op> {
        match c {
            '+' => Some(Op::Add),
            '-' => Some(Op::Sub),
            '*' => Some(Op::Mul),
            '/' => Some(Op::Div),
            _ => None,
        }
    }

    pub fn kind(self) -> ChainKind {
        match self {
            Op::Add | Op::Sub => ChainKind::AddSub,
            Op::Mul | Op::Div => ChainKind::MulDiv,
        }
    }

    /// `+` and `*`; the operand order does not matter.
    pub fn is_commutative(self) -> bool {
        matches!(self, Op::Add | Op::Mul)
    }

    pub fn apply(self, a: &Rational, b: &Rational) -> Result<Rational, ExprError> {
        Ok(match self {
            Op::Add => a + b,
            Op::Sub => a - b,
            Op::Mul => a * b,
            Op::Div => {
                if b.is_zero() {
                    return Err(ExprError::DivByZero);
                }
                a / b
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExprTree {
    Leaf(usize),
    Node(Op, Box<ExprTree>, Box<ExprTree>),
}

impl ExprTree {
    pub fn leaf(index: usize) -> Self {
        ExprTree::Leaf(index)
    }

    pub fn node(op: Op, left: ExprTree, right: ExprTree) -> Self {
        ExprTree::Node(op, Box::new(left), Box::new(right))
    }

    pub fn op(&self) -> Option<Op> {
        match self {
            ExprTree::Leaf(_) => None,
            ExprTree::Node(op, _, _) => Some(*op),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, ExprTree::Leaf(_))
    }

    /// Leaf indices in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            ExprTree::Leaf(i) => out.push(*i),
            ExprTree::Node(_, l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    pub fn leaf_set(&self) -> BTreeSet<usize> {
        self.leaves().into_iter().collect()
    }

    pub fn min_leaf(&self) -> usize {
        match self {
            ExprTree::Leaf(i) => *i,
            ExprTree::Node(_, l, r) => l.min_leaf().min(r.min_leaf()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ExprTree::Leaf(_) => 1,
            ExprTree::Node(_, l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn contains_leaf(&self, index: usize) -> bool {
        match self {
            ExprTree::Leaf(i) => *i == index,
            ExprTree::Node(_, l, r) => l.contains_leaf(index) || r.contains_leaf(index),
        }
    }

    /// Read-once check: no quantity index repeats among the leaves.
    pub fn is_valid(&self) -> bool {
        let leaves = self.leaves();
        let set: BTreeSet<_> = leaves.iter().collect();
        set.len() == leaves.len()
    }

    /// Exact value of the tree; `values[i]` is the value of quantity `i`.
    pub fn evaluate(&self, values: &[Rational]) -> Result<Rational, ExprError> {
        match self {
            ExprTree::Leaf(i) => values.get(*i).cloned().ok_or(ExprError::MissingQuantity(*i)),
            ExprTree::Node(op, l, r) => {
                let a = l.evaluate(values)?;
                let b = r.evaluate(values)?;
                op.apply(&a, &b)
            }
        }
    }

    /// Conventional infix form with minimal parentheses, leaves rendered by `leaf`.
    pub fn to_infix_with(&self, leaf: &dyn Fn(usize) -> String) -> String {
        fn prec(op: Op) -> u8 {
            match op {
                Op::Add | Op::Sub => 1,
                Op::Mul | Op::Div => 2,
            }
        }
        fn go(t: &ExprTree, leaf: &dyn Fn(usize) -> String, out: &mut String) {
            match t {
                ExprTree::Leaf(i) => out.push_str(&leaf(*i)),
                ExprTree::Node(op, l, r) => {
                    let p = prec(*op);
                    let left_paren = l.op().is_some_and(|lo| prec(lo) < p);
                    let right_paren = r.op().is_some_and(|ro| prec(ro) < p || (prec(ro) == p && !op.is_commutative()));
                    wrap(l, left_paren, leaf, out);
                    out.push(' ');
                    out.push(op.symbol());
                    out.push(' ');
                    wrap(r, right_paren, leaf, out);
                }
            }
        }
        fn wrap(t: &ExprTree, paren: bool, leaf: &dyn Fn(usize) -> String, out: &mut String) {
            if paren {
                out.push('(');
            }
            go(t, leaf, out);
            if paren {
                out.push(')');
            }
        }
        let mut out = String::new();
        go(self, leaf, &mut out);
        out
    }
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprTree::Leaf(i) => write!(f, "q{i}"),
            ExprTree::Node(op, l, r) => write!(f, "({} {} {})", op.symbol(), l, r),
        }
    }
}

impl FromStr for ExprTree {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parser = Parser { src: s.as_bytes(), pos: 0 };
        let tree = parser.tree()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(tree)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ExprError {
        ExprError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn tree(&mut self) -> Result<ExprTree, ExprError> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let op = self
                    .src
                    .get(self.pos)
                    .and_then(|&c| Op::from_symbol(c as char))
                    .ok_or_else(|| self.error("expected operator"))?;
                self.pos += 1;
                let left = self.tree()?;
                let right = self.tree()?;
                self.skip_ws();
                if self.src.get(self.pos) != Some(&b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(ExprTree::node(op, left, right))
            }
            Some(b'q') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.error("expected quantity index"));
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                digits.parse().map(ExprTree::Leaf).map_err(|_| self.error("quantity index out of range"))
            }
            Some(_) => Err(self.error("expected '(' or leaf")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Shorthand for tests and fixtures: panics on malformed input.
pub fn tree(s: &str) -> ExprTree {
    s.parse().unwrap_or_else(|e| panic!("bad tree {s:?}: {e}"))
}
