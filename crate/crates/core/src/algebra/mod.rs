//! Free graded-commutative polynomial algebras over the rationals.

pub mod chart;
pub mod linalg;
pub mod poly;
pub mod subst;

pub use chart::{Chart, ChartBuilder, DirSet, Generator, Parity, Role, Weight};
pub use poly::{rat, ratio, GradedPoly, Monomial, Rational};
pub use subst::Substitution;
