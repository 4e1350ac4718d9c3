//! Theta-body relaxations of the tensor nuclear norm.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`] holds dense tensors, multi-indices, matricizations and
//!   random low-rank generation.
//! * [`linalg`] holds the small dense kernels (Jacobi eigensolver, one-sided
//!   Jacobi SVD) shared by the rest of the crate.
//! * [`grobner`] is exact multivariate polynomial arithmetic in grevlex
//!   order together with division and a Buchberger-criterion verifier.
//! * [`ideal`] builds the determinantal ideals of rank-one unit-norm
//!   tensors, their standard-monomial bases and combinatorial moment
//!   matrices.
//! * [`sdp`] is a dense operator-splitting semidefinite solver.
//! * [`norms`] computes theta norms, theta-norm minimisation and the matrix
//!   nuclear-norm SDP.
//! * [`recovery`] runs seeded Gaussian-measurement recovery experiments.
//!
//! Numeric code is generic over the scalar type; the aliases below fix the
//! usual choices.

pub mod error;
pub mod grobner;
pub mod ideal;
pub mod linalg;
pub mod norms;
pub mod recovery;
pub mod sdp;
pub mod tensor;

pub use error::{Error, Result};

use num_rational::BigRational;

/// Dense tensor with `f64` entries.
pub type Tensor = tensor::DenseTensor<f64>;
/// Dense tensor with `f32` entries.
pub type Tensor32 = tensor::DenseTensor<f32>;
/// Dense matrix with `f64` entries.
pub type Matrix = linalg::Matrix<f64>;
/// Polynomial with exact rational coefficients.
pub type Poly = grobner::Polynomial<BigRational>;
/// Exact rational scalar used by all algebraic code.
pub type Rational = BigRational;
/// Moment structure with exact rational coefficients.
pub type RationalMomentStructure = ideal::MomentStructure<BigRational>;
/// Certified Groebner basis with exact rational coefficients.
pub type RationalGroebnerBasis = grobner::GroebnerBasis<BigRational>;
