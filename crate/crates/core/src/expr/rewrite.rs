//! Chain-preserving rewrites: commuting `+`/`*` operands and re-associating
//! within an addition-subtraction or multiplication-division chain.
//!
//! Every rule preserves the value of the expression (away from division by
//! zero) and the multiset of signed chain terms, so the closure of a tree under
//! these rules is a family of trees for one and the same expression.

use std::collections::{HashSet, VecDeque};

use super::{ExprTree, Op};

fn same_family(a: Op, b: Op) -> bool {
    a.kind() == b.kind()
}

fn node(op: Op, l: ExprTree, r: ExprTree) -> ExprTree {
    ExprTree::node(op, l, r)
}

/// Rules applicable at the root of `t`.
fn rewrites_at_root(t: &ExprTree) -> Vec<ExprTree> {
    let ExprTree::Node(op, l, r) = t else {
        return Vec::new();
    };
    let (op, l, r) = (*op, l.as_ref(), r.as_ref());
    let mut out = Vec::new();
    if op.is_commutative() {
        // a J b -> b J a
        out.push(node(op, r.clone(), l.clone()));
    }
    if let ExprTree::Node(rop, b, c) = r {
        if same_family(op, *rop) {
            let a = l.clone();
            let (b, c) = (b.as_ref().clone(), c.as_ref().clone());
            out.push(match (op.is_commutative(), rop.is_commutative()) {
                // a + (b + c) -> (a + b) + c
                (true, true) => node(op, node(op, a, b), c),
                // a + (b - c) -> (a + b) - c
                (true, false) => node(*rop, node(op, a, b), c),
                // a - (b + c) -> (a - b) - c
                (false, true) => node(op, node(op, a, b), c),
                // a - (b - c) -> (a - b) + c
                (false, false) => {
                    let joiner = if op == Op::Sub { Op::Add } else { Op::Mul };
                    node(joiner, node(op, a, b), c)
                }
            });
        }
    }
    if let ExprTree::Node(lop, a, b) = l {
        if same_family(op, *lop) {
            let c = r.clone();
            let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
            match (lop.is_commutative(), op.is_commutative()) {
                // (a + b) + c -> a + (b + c)
                (true, true) => out.push(node(op, a, node(op, b, c))),
                // (a + b) - c -> a + (b - c)
                (true, false) => out.push(node(*lop, a.clone(), node(op, b.clone(), c.clone()))),
                // (a - b) - c -> a - (b + c)
                (false, false) => {
                    let joiner = if op == Op::Sub { Op::Add } else { Op::Mul };
                    out.push(node(op, a, node(joiner, b, c)));
                }
                // (a - b) + c -> a - (b - c)  and  (a - b) + c -> (a + c) - b
                (false, true) => {
                    out.push(node(*lop, a.clone(), node(*lop, b.clone(), c.clone())));
                    out.push(node(*lop, node(op, a, c), b));
                }
            }
            if lop.is_commutative() && !op.is_commutative() {
                // (a + c) - b -> (a - b) + c
                let (a2, c2) = match l {
                    ExprTree::Node(_, a, c) => (a.as_ref().clone(), c.as_ref().clone()),
                    ExprTree::Leaf(_) => unreachable!(),
                };
                out.push(node(*lop, node(op, a2, r.clone()), c2));
            }
        }
    }
    out
}

/// All trees one rewrite away from `t`, at any position.
pub fn rewrite_neighbors(t: &ExprTree) -> Vec<ExprTree> {
    let mut out = rewrites_at_root(t);
    if let ExprTree::Node(op, l, r) = t {
        for nl in rewrite_neighbors(l) {
            out.push(ExprTree::node(*op, nl, r.as_ref().clone()));
        }
        for nr in rewrite_neighbors(r) {
            out.push(ExprTree::node(*op, l.as_ref().clone(), nr));
        }
    }
    out
}

/// Breadth-first closure of `t` under the rewrite rules, starting with `t`
/// itself. Stops early once `limit` trees have been collected.
pub fn rewrite_closure(t: &ExprTree, limit: usize) -> Vec<ExprTree> {
    let mut seen = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(t.clone());
    queue.push_back(t.clone());
    while let Some(cur) = queue.pop_front() {
        order.push(cur.clone());
        if order.len() >= limit {
            break;
        }
        for next in rewrite_neighbors(&cur) {
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    order
}
