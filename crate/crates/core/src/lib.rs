//! Resolution of rational maps from the affine plane to one-dimensional
//! weighted projective stacks `P(w1, w2)`.
//!
//! The pipeline resolves the base locus of the coarse map by point blow-ups,
//! blows up further until the boundary is a simple normal crossings divisor,
//! computes the minimal root index of each boundary component and presents
//! the resulting root stack locally as a quotient, including stabilizer maps
//! and relative coarse spaces where the lift is not representable.

pub mod algebra;
pub mod blowup;
pub mod job;
pub mod parser;
pub mod pipeline;
pub mod report;
pub mod root_index;
pub mod snc;
pub mod stack;
