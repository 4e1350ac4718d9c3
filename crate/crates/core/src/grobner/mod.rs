//! Sparse multivariate polynomials over a field, grevlex order, division,
//! and a Buchberger-criterion verifier.
//!
//! Variables are tensor entries identified by their packed (last index
//! fastest) offset; a smaller offset is a larger variable.

mod basis;
mod division;
mod monomial;
mod polynomial;
mod text;

pub use basis::{buchberger_check, is_reduced, BuchbergerReport, GroebnerBasis};
pub use division::{divide, s_polynomial, Division};
pub use monomial::{grevlex_cmp, Monomial, Var};
pub use polynomial::{Coefficient, Polynomial};
pub use text::{parse, to_text};
