// SPDX-License-Identifier: MIT OR Apache-2.0
//! Θ-stratification data and K-theoretic index formulas for gauged maps from a
//! smooth projective curve into a linear representation of a split reductive group.
//!
//! Exact rational arithmetic is used for every combinatorial quantity. The index
//! engine evaluates at root-of-unity base points in multiprecision complex floats.

pub mod fans;
pub mod ggw;
pub mod hnopt;
pub mod lattice;
pub mod linalg;
pub mod par;
pub mod poly;
pub mod quadforms;
pub mod rootdata;
pub mod scalar;
pub mod series;
pub mod strata;
pub mod twindex;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid root datum: {0}")]
    InvalidDatum(String),
    #[error("Weyl group exceeds the cap of {0} elements")]
    WeylCap(usize),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unbounded scan: {0}")]
    Unbounded(String),
    #[error("fixed point iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("z-support leak: {0}")]
    ZSupportLeak(String),
    #[error("recursion depth limit {0} exceeded")]
    DepthLimit(usize),
    #[error("integer gate failed: {0}")]
    IntegerGate(String),
}

impl Error {
    pub fn is_integer_gate(&self) -> bool {
        matches!(self, Error::IntegerGate(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
