//! Brute-force tree enumeration and random sampling, used as test oracles.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{ExprError, ExprTree, Op};

/// Hard cap on the number of leaves `enumerate_trees` accepts.
pub const MAX_ENUMERATION_LEAVES: usize = 6;

fn all_trees(indices: Vec<usize>) -> Box<dyn Iterator<Item = ExprTree>> {
    let n = indices.len();
    if n == 1 {
        return Box::new(std::iter::once(ExprTree::Leaf(indices[0])));
    }
    let full = (1u32 << n) - 1;
    Box::new((1..full).flat_map(move |mask| {
        let (left, right): (Vec<_>, Vec<_>) = (0..n).partition(|&k| mask & (1 << k) != 0);
        let left: Vec<usize> = left.into_iter().map(|k| indices[k]).collect();
        let right: Vec<usize> = right.into_iter().map(|k| indices[k]).collect();
        Op::ALL.into_iter().flat_map(move |op| {
            let right = right.clone();
            all_trees(left.clone())
                .flat_map(move |lt| all_trees(right.clone()).map(move |rt| ExprTree::node(op, lt.clone(), rt)))
        })
    }))
}

/// Every tree that uses each index exactly once: all binary shapes, all leaf
/// orders and all operation assignments, in a fixed order. Duplicate indices
/// are collapsed. An optional predicate filters the stream.
pub fn enumerate_trees<'a>(
    indices: &[usize],
    filter: Option<&'a dyn Fn(&ExprTree) -> bool>,
) -> Result<Box<dyn Iterator<Item = ExprTree> + 'a>, ExprError> {
    let mut set = indices.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.len() > MAX_ENUMERATION_LEAVES {
        return Err(ExprError::TooManyQuantities(set.len()));
    }
    if set.is_empty() {
        return Ok(Box::new(std::iter::empty()));
    }
    let trees = all_trees(set);
    Ok(match filter {
        Some(pred) => Box::new(trees.filter(move |t| pred(t))),
        None => trees,
    })
}

/// A random valid tree over exactly the given indices: shuffled leaves,
/// uniform split points and uniform operations.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, indices: &[usize]) -> ExprTree {
    assert!(!indices.is_empty(), "random_tree needs at least one index");
    let mut leaves = indices.to_vec();
    leaves.shuffle(rng);
    build_random(rng, &leaves)
}

fn build_random<R: Rng + ?Sized>(rng: &mut R, leaves: &[usize]) -> ExprTree {
    if leaves.len() == 1 {
        return ExprTree::Leaf(leaves[0]);
    }
    let split = rng.gen_range(1..leaves.len());
    let op = Op::ALL[rng.gen_range(0..4)];
    ExprTree::node(op, build_random(rng, &leaves[..split]), build_random(rng, &leaves[split..]))
}
