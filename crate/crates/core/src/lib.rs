//! Exact kernel for real Picard-Vessiot extensions of diagonal linear
//! difference systems over `R_alg(x)`.

pub mod diffring;
pub mod field;
pub mod funcfield;
pub mod galois;
pub mod lattice;
pub mod numbers;
pub mod poly;
pub mod pv;
pub mod seqmodel;

pub use field::{ConstField, Field};
pub use numbers::{GaussianAlgebraic, RealAlgebraic};
pub use poly::Polynomial;

/// Polynomials over the real algebraic numbers.
pub type RealPoly = Polynomial<RealAlgebraic>;
/// Polynomials over the Gaussian algebraic numbers.
pub type ComplexPoly = Polynomial<GaussianAlgebraic>;
pub type RatFunc = funcfield::RationalFunction<RealAlgebraic>;
pub type ComplexRatFunc = funcfield::RationalFunction<GaussianAlgebraic>;
