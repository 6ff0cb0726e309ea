//! Exact arithmetic substrate: rationals, sparse multivariate polynomials,
//! gcds, resultants and rational common zeros.

mod gcd;
mod poly;
mod resultant;
pub mod univariate;
mod zeros;

use thiserror::Error;

pub use gcd::{
    gcd, gcd_with_cofactors, pseudo_remainder, squarefree_part, strip_common_factors,
    vanishing_order,
};
pub use poly::{Monomial, MultiPoly};
pub use resultant::{bareiss_determinant, resultant, resultant_in, sylvester_matrix};
pub use zeros::{rational_common_zeros, rational_common_zeros_on_axis, CommonZeros, Point};

/// Arbitrary-precision rational; always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("variable `{0}` has no assignment")]
    MissingAssignment(String),
    #[error("substitution images use different variable lists")]
    VariableMismatch,
    #[error("vanishing order of the zero polynomial is infinite")]
    InfiniteOrder,
    #[error("cannot measure vanishing order along a constant")]
    InvalidDivisor,
    #[error("resultant needs positive degree in the eliminated variable")]
    DegenerateResultant,
    #[error("inputs share a common component; common zero set is not finite")]
    NotZeroDimensional,
    #[error("gcd of two zero polynomials is undefined")]
    UndefinedGcd,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("internal invariant violated: {0}")]
    InternalInvariant(&'static str),
}

/// Shorthand for integer rationals.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Variable list from string slices.
pub fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
