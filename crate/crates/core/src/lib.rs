//! Exact symbolic kernel for graded polynomial algebras, homological vector fields,
//! and double and multiple Lie algebroids.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod algebroid;
pub mod bracket;
pub mod doubles;
pub mod drinfeld;
pub mod dsl;
pub mod error;
pub mod fields;
pub mod multifold;
pub mod report;
pub mod verdict;

pub use error::{Error, Result};
pub use fields::{check_weight, is_homological, related, Derivation};
pub use verdict::{Residual, Verdict};
