//! Desk-scale Ramsey witness search.
//!
//! Five kinds of colored universes are supported:
//!
//! | kind           | universe                    | witness              | factor     |
//! |----------------|-----------------------------|----------------------|------------|
//! | `full_rank`    | `n x k` matrices of rank k  | `R` in `E_{n,m}`     | `tau`      |
//! | `grassmannian` | `Gr(k, F^n)` as RCEF bases  | `R` in `E_{n,m}`     | constant   |
//! | `square`       | `n x n` matrices of rank k  | `(R0, R1)`           | `tau2`     |
//! | `boolean`      | `M^ba_{n,k}`                | `R` in `M^oba_{n,m}` | `pi`       |
//! | `epi`          | rigid surjections `n -> k`  | `gamma: n -> m`      | constant   |
//!
//! Structures are identified by integer codes (see [`crate::gf_linalg::mat_encode`];
//! rigid surjections use the same base-`s` digit convention on value tables).
//! "Least witness" means least code, and exhaustive search visits 2-colorings
//! in lexicographic order of their color vectors over the code-sorted
//! universe, so every reported object is canonical and independent of the
//! worker count.

mod coloring;
mod frame;
mod search;
mod uniqueness;
mod universe;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf_linalg::{GfError, PrimeField};

pub use coloring::ColoringTable;
pub use frame::{Candidate, Frame};
pub use search::{
    exhaust_colorings, min_n_search, verify_witness, witness_search, ExhaustOptions, ExhaustReport, MinNEntry, MinNReport,
    SearchMode, SearchOutcome, WitnessReport,
};
pub use uniqueness::{factor_image_size, tau_surjective_on};
pub use universe::{enumerate_rank, enumerate_rcef, enumerate_structures, MAX_UNIVERSE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RamseyError {
    #[error("universe exceeds the desk-scale limit")]
    UniverseTooLarge,
    #[error("coloring kind does not match the request: {0}")]
    KindMismatch(String),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("invalid coloring: {0}")]
    BadColoring(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Gf(#[from] GfError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    FullRank,
    Grassmannian,
    Square,
    Boolean,
    Epi,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::FullRank, Kind::Grassmannian, Kind::Square, Kind::Boolean, Kind::Epi];

    pub fn name(self) -> &'static str {
        match self {
            Kind::FullRank => "full_rank",
            Kind::Grassmannian => "grassmannian",
            Kind::Square => "square",
            Kind::Boolean => "boolean",
            Kind::Epi => "epi",
        }
    }

    /// Whether the structures are matrices over `GF(p)` (so `p` matters).
    pub fn uses_field(self) -> bool {
        matches!(self, Kind::FullRank | Kind::Grassmannian | Kind::Square)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = RamseyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.name().replace('_', "-") == s)
            .ok_or_else(|| RamseyError::Parse(format!("unknown kind {s:?}")))
    }
}

/// `p` is ignored by `boolean` and `epi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub p: u32,
    pub n: usize,
    pub k: usize,
}

impl Params {
    pub fn check(&self, kind: Kind) -> Result<(), RamseyError> {
        if self.k == 0 {
            return Err(RamseyError::BadParams("k must be at least 1".into()));
        }
        if kind.uses_field() {
            PrimeField::new(self.p)?;
        }
        Ok(())
    }

    pub fn field(&self) -> Result<PrimeField, RamseyError> {
        Ok(PrimeField::new(self.p)?)
    }
}
