//! Arithmetic word problem solving over monotonic expression trees.

pub mod corpus;
pub mod eval;
pub mod expr;
pub mod features;
pub mod fixtures;
pub mod infer;
pub mod learn;
pub mod rational;
pub mod schema;
