//! Antilexicographic orders, rigid surjections, set partitions and Boolean
//! matrices.
//!
//! Enumeration orders are fixed: partitions and ordered Boolean matrices come
//! in restricted-growth order, rigid surjections lexicographically by value
//! table. Witness selection downstream depends on these orders.

mod antilex;
mod boolean;
mod partition;
mod rigid;

use thiserror::Error;

use crate::gf_linalg::GfError;

pub use antilex::{antilex_cmp, min_preimage, AntilexOrder};
pub use boolean::{bool_alg_cmp, enumerate_ba, enumerate_oba, permutation_matrix, pi_factor, BooleanMatrix};
pub use partition::{coarsenings, enumerate_partitions, SetPartition};
pub use rigid::{
    enumerate_epi, is_rigid_on_chain, is_rigid_surjection, linear_map_is_rigid, linear_map_table, matrix_rows_map, phi,
    Codomain, EpiEnumerator, RigidSurjection,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("need 1 <= k <= n, got n={n}, k={k}")]
    BadArity { n: usize, k: usize },
    #[error("matrix is not in reduced row echelon form with full row rank")]
    NotRref,
    #[error("not a Boolean partition matrix: {0}")]
    NotBooleanPartition(String),
    #[error("not a set partition: {0}")]
    NotPartition(String),
    #[error("domain of size {n} cannot map onto {s} points")]
    TooSmallDomain { n: usize, s: usize },
    #[error("value table is not a rigid surjection")]
    NotRigid,
    #[error("codomain is not a vector space")]
    NotVectorCodomain,
    #[error("enumeration too large")]
    TooLarge,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Gf(#[from] GfError),
}
