//! Executable Ramsey factorization theory for matrices.
//!
//! Two halves live here:
//!
//! * exact algebra over prime fields ([`gf_linalg`], [`combinat`]) and the
//!   desk-scale witness search built on it ([`ramsey`]);
//! * a numerical engine over the reals for norms on `R^k`, operator norms,
//!   the intrinsic, gap, Banach–Mazur and extrinsic metrics, and the
//!   constructions around them ([`metrics`]).
//!
//! [`verify`] bundles the invariants of both halves into seeded, reproducible
//! suites.

pub mod combinat;
pub mod gf_linalg;
pub mod metrics;
pub mod ramsey;
pub mod verify;

pub(crate) mod par;
