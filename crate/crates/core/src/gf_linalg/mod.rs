//! Exact linear algebra over prime fields: ranks, echelon forms, the factor
//! maps `tau`, `tau2`, the pivot right inverse, and matrix codes.

mod echelon;
mod encode;
mod field;
mod matrix;

use thiserror::Error;

pub use echelon::{
    full_rank_decomposition, is_rcef, is_rref, pivot_right_inverse, rank_and_rref, rcef_decompose, rref_pivots, tau,
    tau2, tau2_from_decomposition, RcefDecomposition, Rref,
};
pub use encode::{code_space, mat_decode, mat_encode};
pub(crate) use encode::encode_digits;
pub use field::{PrimeField, MAX_PRIME};
pub use matrix::{FFMatrix, GLMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not a prime in [2, 65536]")]
    NotPrime(u32),
    #[error("entry {entry} is outside [0, {p})")]
    EntryOutOfRange { entry: i64, p: u32 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrices are over different fields")]
    FieldMismatch,
    #[error("matrix is singular")]
    Singular,
    #[error("rank {rank} is below the required {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("matrix has rank 0")]
    ZeroMatrix,
    #[error("matrix is not in reduced row echelon form")]
    NotRref,
    #[error("code overflow: {0}")]
    Overflow(String),
    #[error("parse error: {0}")]
    Parse(String),
}
