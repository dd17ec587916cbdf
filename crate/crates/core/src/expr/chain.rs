//! Operation chains, monotonic trees and canonical ordering.

use super::{ExprError, ExprTree, Op};
use crate::rational::Rational;
use num_traits::{One, Zero};

/// Operation family of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChainKind {
    /// Addition and subtraction nodes.
    AddSub,
    /// Multiplication and division nodes.
    MulDiv,
}

impl ChainKind {
    fn joiner(self) -> Op {
        match self {
            ChainKind::AddSub => Op::Add,
            ChainKind::MulDiv => Op::Mul,
        }
    }

    fn inverse(self) -> Op {
        match self {
            ChainKind::AddSub => Op::Sub,
            ChainKind::MulDiv => Op::Div,
        }
    }
}

/// How a chain term enters the chain expression. For multiplication-division
/// chains `Plus` means numerator and `Minus` means denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Plus,
    Minus,
}

impl Role {
    fn flip(self) -> Role {
        match self {
            Role::Plus => Role::Minus,
            Role::Minus => Role::Plus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainTerm {
    pub role: Role,
    pub tree: ExprTree,
}

/// A maximal connected set of same-family internal nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub kind: ChainKind,
    /// Pre-order positions (over all nodes, leaves included) of the chain's nodes.
    pub nodes: Vec<usize>,
    /// Subtrees hanging off the chain, left to right.
    pub terms: Vec<ChainTerm>,
}

impl Chain {
    /// Signed combination of the chain terms.
    pub fn evaluate(&self, values: &[Rational]) -> Result<Rational, ExprError> {
        let mut plus = match self.kind {
            ChainKind::AddSub => Rational::zero(),
            ChainKind::MulDiv => Rational::one(),
        };
        let mut minus = plus.clone();
        for term in &self.terms {
            let v = term.tree.evaluate(values)?;
            let acc = match term.role {
                Role::Plus => &mut plus,
                Role::Minus => &mut minus,
            };
            match self.kind {
                ChainKind::AddSub => *acc += v,
                ChainKind::MulDiv => *acc *= v,
            }
        }
        match self.kind {
            ChainKind::AddSub => Ok(plus - minus),
            ChainKind::MulDiv => Op::Div.apply(&plus, &minus),
        }
    }
}

fn node_count(t: &ExprTree) -> usize {
    match t {
        ExprTree::Leaf(_) => 1,
        ExprTree::Node(_, l, r) => 1 + node_count(l) + node_count(r),
    }
}

/// Walks the chain rooted at `t` (which must be an internal node of family
/// `kind`), recording node ids and signed terms with their pre-order ids.
fn collect_chain(
    t: &ExprTree,
    id: usize,
    role: Role,
    kind: ChainKind,
    nodes: &mut Vec<usize>,
    terms: &mut Vec<(usize, ChainTerm)>,
) {
    match t {
        ExprTree::Node(op, l, r) if op.kind() == kind => {
            nodes.push(id);
            let right_role = if op.is_commutative() { role } else { role.flip() };
            collect_chain(l, id + 1, role, kind, nodes, terms);
            collect_chain(r, id + 1 + node_count(l), right_role, kind, nodes, terms);
        }
        _ => terms.push((id, ChainTerm { role, tree: t.clone() })),
    }
}

fn chains_from(t: &ExprTree, id: usize, out: &mut Vec<Chain>) {
    let Some(op) = t.op() else { return };
    let mut nodes = Vec::new();
    let mut terms = Vec::new();
    collect_chain(t, id, Role::Plus, op.kind(), &mut nodes, &mut terms);
    let index = out.len();
    out.push(Chain { kind: op.kind(), nodes, terms: Vec::new() });
    for (term_id, term) in &terms {
        chains_from(&term.tree, *term_id, out);
    }
    out[index].terms = terms.into_iter().map(|(_, term)| term).collect();
}

/// Partition of the internal nodes into maximal chains, ordered by the
/// pre-order position of each chain's topmost node. When the root is an
/// internal node the first chain contains it.
pub fn chains(tree: &ExprTree) -> Vec<Chain> {
    let mut out = Vec::new();
    chains_from(tree, 0, &mut out);
    out
}

/// The chain containing the root, if the root is an internal node.
pub fn root_chain(tree: &ExprTree) -> Option<Chain> {
    let op = tree.op()?;
    let mut nodes = Vec::new();
    let mut terms = Vec::new();
    collect_chain(tree, 0, Role::Plus, op.kind(), &mut nodes, &mut terms);
    Some(Chain { kind: op.kind(), nodes, terms: terms.into_iter().map(|(_, term)| term).collect() })
}

/// True iff no subtraction (division) node is a child of an addition
/// (multiplication) node and no subtraction or division node has a child of
/// the same operation.
pub fn is_monotonic(tree: &ExprTree) -> bool {
    match tree {
        ExprTree::Leaf(_) => true,
        ExprTree::Node(op, l, r) => {
            let edge_ok = |child: &ExprTree| {
                !matches!(
                    (op, child.op()),
                    (Op::Add, Some(Op::Sub))
                        | (Op::Mul, Some(Op::Div))
                        | (Op::Sub, Some(Op::Sub))
                        | (Op::Div, Some(Op::Div))
                )
            };
            edge_ok(l) && edge_ok(r) && is_monotonic(l) && is_monotonic(r)
        }
    }
}

/// Left-leaning comb `((t0 op t1) op t2) ...` over terms sorted by minimum leaf.
fn comb(op: Op, mut terms: Vec<ExprTree>) -> ExprTree {
    terms.sort_by_key(ExprTree::min_leaf);
    let mut iter = terms.into_iter();
    let first = iter.next().expect("comb over at least one term");
    iter.fold(first, |acc, t| ExprTree::node(op, acc, t))
}

/// Rebuilds every chain as a single inverse node (subtraction or division)
/// over two sorted combs: plus-role terms on the left, minus-role terms on the
/// right. Chains without minus-role terms become a plain sorted comb. Term
/// subtrees are converted recursively, so the output is monotonic and already
/// canonical.
pub fn monotonize(tree: &ExprTree) -> ExprTree {
    let Some(op) = tree.op() else {
        return tree.clone();
    };
    let kind = op.kind();
    let mut nodes = Vec::new();
    let mut terms = Vec::new();
    collect_chain(tree, 0, Role::Plus, kind, &mut nodes, &mut terms);
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    for (_, term) in terms {
        let converted = monotonize(&term.tree);
        match term.role {
            Role::Plus => plus.push(converted),
            Role::Minus => minus.push(converted),
        }
    }
    let left = comb(kind.joiner(), plus);
    if minus.is_empty() {
        left
    } else {
        ExprTree::node(kind.inverse(), left, comb(kind.joiner(), minus))
    }
}

fn collect_same_op(t: &ExprTree, op: Op, out: &mut Vec<ExprTree>) {
    match t {
        ExprTree::Node(o, l, r) if *o == op => {
            collect_same_op(l, op, out);
            collect_same_op(r, op, out);
        }
        _ => out.push(canonicalize(t)),
    }
}

/// Sorts the terms of every maximal addition-only and multiplication-only
/// sub-chain by minimum leaf index and rebuilds it as a left-leaning comb.
/// Subtraction and division nodes keep their operand order.
pub fn canonicalize(tree: &ExprTree) -> ExprTree {
    match tree {
        ExprTree::Leaf(_) => tree.clone(),
        ExprTree::Node(op, _, _) if op.is_commutative() => {
            let mut terms = Vec::new();
            collect_same_op(tree, *op, &mut terms);
            comb(*op, terms)
        }
        ExprTree::Node(op, l, r) => ExprTree::node(*op, canonicalize(l), canonicalize(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::tree;
    use crate::rational::from_int;

    /// The expression (3*5)+7-8-9 with 3,5,7,8,9 as q0..q4.
    const MIXED_LEFT: &str = "(+ (* q0 q1) (- (- q2 q3) q4))";
    const MIXED_RIGHT: &str = "(- (+ (* q0 q1) q2) (+ q3 q4))";

    fn signed(chain: &Chain) -> Vec<(Role, String)> {
        chain.terms.iter().map(|t| (t.role, t.tree.to_string())).collect()
    }

    #[test]
    fn monotonic_predicate_on_mixed_chains() {
        assert!(!is_monotonic(&tree(MIXED_LEFT)));
        assert!(is_monotonic(&tree(MIXED_RIGHT)));
        assert!(is_monotonic(&tree("q0")));
        for op in ["+", "-", "*", "/"] {
            assert!(is_monotonic(&tree(&format!("({op} q0 q1)"))));
        }
        assert!(!is_monotonic(&tree("(- (- q0 q1) q2)")));
        assert!(!is_monotonic(&tree("(* q0 (/ q1 q2))")));
        assert!(!is_monotonic(&tree("(/ q0 (/ q1 q2))")));
        assert!(is_monotonic(&tree("(- q0 (+ q1 q2))")));
        assert!(is_monotonic(&tree("(+ q0 (/ q1 q2))")));
    }

    #[test]
    fn mixed_chain_terms() {
        let cs = chains(&tree(MIXED_LEFT));
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].kind, ChainKind::AddSub);
        assert_eq!(
            signed(&cs[0]),
            vec![
                (Role::Plus, "(* q0 q1)".to_string()),
                (Role::Plus, "q2".to_string()),
                (Role::Minus, "q3".to_string()),
                (Role::Minus, "q4".to_string()),
            ]
        );
        // Pre-order ids: 0 root +, 1 *, 2 q0, 3 q1, 4 -, 5 -, 6 q2, 7 q3, 8 q4.
        assert_eq!(cs[0].nodes, vec![0, 4, 5]);
        assert_eq!(cs[1].kind, ChainKind::MulDiv);
        assert_eq!(cs[1].nodes, vec![1]);
    }

    #[test]
    fn leaf_has_no_chains() {
        assert!(chains(&tree("q3")).is_empty());
        assert!(root_chain(&tree("q3")).is_none());
    }

    #[test]
    fn multiplication_division_chain_terms() {
        let cs = chains(&tree("(* (/ q0 q1) q2)"));
        assert_eq!(cs.len(), 1);
        assert_eq!(
            signed(&cs[0]),
            vec![(Role::Plus, "q0".to_string()), (Role::Minus, "q1".to_string()), (Role::Plus, "q2".to_string()),]
        );
        let values: Vec<_> = [6, 4, 10].iter().map(|&v| from_int(v)).collect();
        assert_eq!(cs[0].evaluate(&values).unwrap(), tree("(* (/ q0 q1) q2)").evaluate(&values).unwrap());
    }

    #[test]
    fn monotonize_mixed_chains() {
        assert_eq!(monotonize(&tree(MIXED_LEFT)).to_string(), MIXED_RIGHT);
    }

    #[test]
    fn monotonize_all_plus_chain_is_sorted_comb() {
        assert_eq!(monotonize(&tree("(+ q2 (+ q0 q1))")).to_string(), "(+ (+ q0 q1) q2)");
        assert_eq!(monotonize(&tree("(/ q0 (/ q1 q2))")).to_string(), "(/ (* q0 q2) q1)");
    }

    #[test]
    fn canonicalize_sorts_commutative_subchains() {
        assert_eq!(canonicalize(&tree("(+ q1 q0)")).to_string(), "(+ q0 q1)");
        assert_eq!(canonicalize(&tree("(* (+ q0 q1) q2)")).to_string(), "(* (+ q0 q1) q2)");
        assert_eq!(canonicalize(&tree("(* (+ q2 q3) q0)")).to_string(), "(* q0 (+ q2 q3))");
        assert_eq!(canonicalize(&tree("(- (+ q4 (* q1 q0)) (+ q3 q2))")).to_string(), "(- (+ (* q0 q1) q4) (+ q2 q3))");
    }

    #[test]
    fn monotonize_fixes_monotonic_input_up_to_canonical_order() {
        for s in [MIXED_RIGHT, "(- (+ q3 q1) q0)", "(/ (* q2 (+ q1 q0)) q3)"] {
            let t = tree(s);
            assert!(is_monotonic(&t));
            assert_eq!(monotonize(&t), canonicalize(&t));
        }
    }
}
