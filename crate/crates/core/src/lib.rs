//! Exact computer algebra for Poisson vertex algebras, classical affine and
//! fractional W-algebras, BRST complexes and integrable hierarchies.

pub mod brst;
pub mod diffalg;
pub mod dsred;
pub mod hamflow;
pub mod liealg;
pub mod linalg;
pub mod parse;
pub mod pva;
pub mod wmin;

pub use diffalg::{q, qf, Alg, DiffAlgebra, DiffPoly, GenId, Jet, Monomial, Parity, Q};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("polynomials live in different algebras")]
    AlgebraMismatch,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("linear solve failed: {0}")]
    Solve(String),
    #[error("shape violation: {0}")]
    Shape(String),
    #[error("series did not terminate: {0}")]
    Divergence(String),
    #[error("check failed: {0}")]
    Check(String),
}
