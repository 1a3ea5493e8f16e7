//! Norms on `R^k` and the metrics built from them.
//!
//! Every numerical result is a [`MetricValue`] tagged with how much it can be
//! trusted: `exact` (closed form, vertex enumeration or a linear program),
//! `upper`/`lower` (one-sided bounds from optimizers) or `estimate`
//! (sampling). Checks that combine values only do so in valid directions.
//!
//! Scalars are real throughout.

mod alpha;
mod amalgam;
mod auerbach;
mod bm;
mod dual_lift;
mod gap;
mod lp;
mod norm;
mod nu2;
mod opnorm;
mod oscillation;
mod polytope;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use alpha::{alpha_extrinsic, extrinsic_witness, ExtrinsicWitness};
pub use amalgam::{amalgam_norm, Amalgam, PropertyCheck, ISOMETRY_TOL};
pub use auerbach::{auerbach_basis, AuerbachBasis, AUERBACH_TOL};
pub use bm::{bm_upper, omega, BmOptions, BmResult};
pub use dual_lift::{dual_min_lift, DualLift};
pub use gap::{gap_metric, gap_sampled, SubspaceRep};
pub use norm::NormSpec;
pub use nu2::{diameter_claim_check, nu2_tools, DiameterCheck, NormPairClass, Nu2Report, NU2_REL_TOL};
pub use opnorm::{inv_norm, inv_norm_with, op_norm, op_norm_with, AscentOptions, LinOp};
pub use oscillation::{oscillation, LIPSCHITZ_TOL};
pub use polytope::{polar_vertices, vertices_of};

pub(crate) use lp::polyhedral_distance;
pub(crate) use norm::matrix_to_rows;

/// Default absolute slack for inequality checks.
pub const SLACK: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("subspaces live in different ambient spaces")]
    AmbientMismatch,
    #[error("subspaces have different dimensions")]
    DimMismatch,
    #[error("operator is not injective")]
    NotInjective,
    #[error("basis is rank deficient")]
    RankDeficient,
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("dual norm not computable for {0}")]
    DualNotComputable(String),
    #[error("operator does not map into an l_inf space")]
    NotIntoEllInfty,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("bound not certified: {0}")]
    Uncertified(String),
    #[error("coloring is not 1-Lipschitz: {0}")]
    LipschitzViolation(String),
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Exact,
    Upper,
    Lower,
    Estimate,
}

impl Certificate {
    /// Certificate of `max(a, b)` (or of any expression monotone in both).
    pub fn join(self, other: Certificate) -> Certificate {
        use Certificate::*;
        match (self, other) {
            (Exact, c) | (c, Exact) => c,
            (Upper, Upper) => Upper,
            (Lower, Lower) => Lower,
            _ => Estimate,
        }
    }

    /// Certificate of `1 / x` given the certificate of `x`.
    pub fn flip(self) -> Certificate {
        match self {
            Certificate::Upper => Certificate::Lower,
            Certificate::Lower => Certificate::Upper,
            c => c,
        }
    }

    pub fn is_exact(self) -> bool {
        self == Certificate::Exact
    }

    /// Whether the value is known not to underestimate the truth.
    pub fn bounds_above(self) -> bool {
        matches!(self, Certificate::Exact | Certificate::Upper)
    }

    /// Whether the value is known not to overestimate the truth.
    pub fn bounds_below(self) -> bool {
        matches!(self, Certificate::Exact | Certificate::Lower)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certificate::Exact => "exact",
            Certificate::Upper => "upper",
            Certificate::Lower => "lower",
            Certificate::Estimate => "estimate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub certificate: Certificate,
    pub method: String,
    /// Absolute numerical tolerance of `value` under its certificate.
    pub tolerance: f64,
    /// Companion upper bound when `value` is only a lower bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

impl MetricValue {
    pub fn new(value: f64, certificate: Certificate, method: impl Into<String>, tolerance: f64) -> Self {
        Self { value, certificate, method: method.into(), tolerance, upper: None }
    }

    pub fn exact(value: f64, method: impl Into<String>, tolerance: f64) -> Self {
        Self::new(value, Certificate::Exact, method, tolerance)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metric values serialize")
    }
}

/// Absolute tolerance for closed-form and vertex evaluations.
pub(crate) const EXACT_TOL: f64 = 1e-12;
/// Absolute tolerance attached to LP-derived values.
pub(crate) const LP_TOL: f64 = 1e-9;
/// Relative singular-value threshold for rank decisions.
pub(crate) const RANK_TOL: f64 = 1e-10;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<(), MetricsError> {
    if expected == got {
        Ok(())
    } else {
        Err(MetricsError::DimensionMismatch { expected, got })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_join() {
        use Certificate::*;
        assert_eq!(Exact.join(Exact), Exact);
        assert_eq!(Exact.join(Lower), Lower);
        assert_eq!(Upper.join(Lower), Estimate);
        assert_eq!(Lower.flip(), Upper);
    }

    #[test]
    fn metric_value_json() {
        let v = MetricValue::exact(0.5, "svd", 1e-12);
        let json = v.to_json();
        assert!(json.contains("\"certificate\": \"exact\""));
        assert!(!json.contains("upper"));
        let back: MetricValue = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
