//! Pairs of norms from rank-`k` factorizations `T = T0 T1^t`.

use nalgebra::DMatrix;

use super::bm::{bm_upper, omega, BmOptions};
use super::dual_lift::dual_min_lift;
use super::norm::matrix_to_rows;
use super::opnorm::op_norm;
use super::{Certificate, LinOp, MetricValue, MetricsError, NormSpec};

/// Relative slack for the membership/composite-bound comparisons.
pub const NU2_REL_TOL: f64 = 1e-6;

/// A representative `(m0, m1)` of a `GL(k)` orbit of pairs; `m1` is a norm
/// on the dual coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct NormPairClass {
    pub m0: NormSpec,
    pub m1: NormSpec,
}

impl NormPairClass {
    /// `(Delta . m0, Delta . m1)` where `Delta . m = m o Delta^{-1}` and the
    /// dual side moves by the transpose.
    pub fn act(&self, delta: &DMatrix<f64>) -> Result<NormPairClass, MetricsError> {
        let inv = delta.clone().try_inverse().ok_or(MetricsError::NotInjective)?;
        Ok(NormPairClass {
            m0: NormSpec::pushforward(matrix_to_rows(&inv), self.m0.clone())?,
            m1: NormSpec::pushforward(matrix_to_rows(&delta.transpose()), self.m1.clone())?,
        })
    }

    /// `omega(m0*, m1)`.
    pub fn omega_dual(&self) -> Result<MetricValue, MetricsError> {
        omega(&self.m0.dual()?, &self.m1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Nu2Report {
    pub pair: NormPairClass,
    pub lambda: f64,
    pub omega: MetricValue,
    pub in_dk_lambda: bool,
    /// `||T0 T1^t||` from `E*` to `E`.
    pub composite_norm: MetricValue,
    /// `min { a : Ball(Im T) in a T(Ball(E*)) }`.
    pub composite_inv_norm: MetricValue,
}

impl Nu2Report {
    /// Membership implies both composite bounds are at most `lambda`.
    pub fn membership_implies_bounds(&self) -> bool {
        let lim = self.lambda * (1.0 + NU2_REL_TOL);
        !self.in_dk_lambda || (self.composite_norm.value <= lim && self.composite_inv_norm.value <= lim)
    }

    /// Composite bounds at most `lambda` imply membership.
    pub fn bounds_imply_membership(&self) -> bool {
        let lim = self.lambda * (1.0 - NU2_REL_TOL);
        let small = self.composite_norm.value <= lim && self.composite_inv_norm.value <= lim;
        !small || self.in_dk_lambda
    }
}

pub fn nu2_tools(t0: &LinOp, t1: &LinOp, lambda: f64) -> Result<Nu2Report, MetricsError> {
    let k = t0.matrix.ncols();
    if t1.matrix.ncols() != k {
        return Err(MetricsError::RankMismatch(format!("factor widths {k} and {}", t1.matrix.ncols())));
    }
    if t0.codomain != t1.codomain {
        return Err(MetricsError::RankMismatch("factors map into different spaces".into()));
    }
    for op in [t0, t1] {
        if !op.is_injective() {
            return Err(MetricsError::RankMismatch(format!("factor has rank below {k}")));
        }
    }
    let e = &t0.codomain;
    let pair = NormPairClass { m0: t0.pushforward()?, m1: t1.pushforward()? };
    let w = pair.omega_dual()?;
    let in_dk_lambda = w.value <= lambda.ln() + w.tolerance;

    let composite = LinOp::new(&t0.matrix * t1.matrix.transpose(), e.dual()?, e.clone())?;
    let composite_norm = op_norm(&composite)?;
    // ||T^{-1}|| is the norm of Id : m0 -> m1*, and m1* is the least lift
    let composite_inv_norm = match pair.m0.vertices() {
        Some(vertices) => {
            let mut worst = 0.0f64;
            let mut cert = Certificate::Exact;
            let mut tol = 0.0f64;
            for v in &vertices {
                let lift = dual_min_lift(t1, v)?;
                worst = worst.max(lift.value.value);
                cert = cert.join(lift.value.certificate);
                tol = tol.max(lift.value.tolerance);
            }
            MetricValue::new(worst, cert, "vertex_lifts", tol)
        }
        None => op_norm(&LinOp::identity(pair.m0.clone(), pair.m1.dual()?)?)?,
    };
    Ok(Nu2Report { pair, lambda, omega: w, in_dk_lambda, composite_norm, composite_inv_norm })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiameterCheck {
    /// `omega(m0, Delta . n0) + omega(m1, Delta . n1)`.
    pub omega2: MetricValue,
    pub bm: MetricValue,
    /// `2 (log lambda + bm)`.
    pub bound: f64,
    pub delta: DMatrix<f64>,
}

impl DiameterCheck {
    pub fn holds(&self) -> bool {
        self.omega2.value <= self.bound + self.omega2.tolerance + super::SLACK
    }
}

/// Moves `b` by the balanced Banach–Mazur minimizer between `a.m0` and `b.m0`
/// and compares the resulting `omega_2` distance with `2 (log lambda + bm)`.
pub fn diameter_claim_check(a: &NormPairClass, b: &NormPairClass, lambda: f64, opts: &BmOptions) -> Result<DiameterCheck, MetricsError> {
    let bm = bm_upper(&a.m0, &b.m0, opts)?;
    let moved = b.act(&bm.delta.clone().try_inverse().ok_or(MetricsError::NotInjective)?)?;
    let w0 = omega(&a.m0, &moved.m0)?;
    let w1 = omega(&a.m1, &moved.m1)?;
    let omega2 = MetricValue::new(
        w0.value + w1.value,
        w0.certificate.join(w1.certificate),
        format!("sum({}, {})", w0.method, w1.method),
        w0.tolerance + w1.tolerance,
    );
    let bound = 2.0 * (lambda.ln() + bm.value.value);
    Ok(DiameterCheck { omega2, bm: bm.value, bound, delta: bm.delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inclusion(n: usize, k: usize, scale: f64, e: NormSpec) -> LinOp {
        LinOp::new(DMatrix::from_fn(n, k, |i, j| if i == j { scale } else { 0.0 }), NormSpec::l2(k), e).unwrap()
    }

    #[test]
    fn isometric_inclusions() {
        let t = inclusion(4, 2, 1.0, NormSpec::l2(4));
        let r = nu2_tools(&t, &t, 1.0).unwrap();
        assert!(r.omega.value.abs() < 1e-12);
        assert!((r.composite_norm.value - 1.0).abs() < 1e-9);
        assert!((r.composite_inv_norm.value - 1.0).abs() < 1e-9);
        assert!(r.in_dk_lambda);
    }

    #[test]
    fn scaled_second_factor() {
        let t0 = inclusion(3, 2, 1.0, NormSpec::l2(3));
        let t1 = inclusion(3, 2, 2.0, NormSpec::l2(3));
        let r = nu2_tools(&t0, &t1, 2.0).unwrap();
        assert!((r.composite_norm.value - 2.0).abs() < 1e-9);
        assert!(r.in_dk_lambda);
        assert!(!nu2_tools(&t0, &t1, 1.5).unwrap().in_dk_lambda);
        assert!(r.membership_implies_bounds());
    }

    #[test]
    fn composite_bound_on_random_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let e = NormSpec::linf(4);
        for _ in 0..10 {
            let t0 = LinOp::new(DMatrix::from_fn(4, 2, |_, _| rng.gen_range(-1.0..1.0)), NormSpec::l2(2), e.clone()).unwrap();
            let t1 = LinOp::new(DMatrix::from_fn(4, 2, |_, _| rng.gen_range(-1.0..1.0)), NormSpec::l2(2), e.clone()).unwrap();
            let probe = nu2_tools(&t0, &t1, 1.0).unwrap();
            let lambda = probe.omega.value.exp();
            let r = nu2_tools(&t0, &t1, lambda).unwrap();
            assert!(r.in_dk_lambda);
            assert!(r.membership_implies_bounds());
            let top = r.composite_norm.value.max(r.composite_inv_norm.value);
            assert!((top.ln() - r.omega.value).abs() < 1e-7, "{} vs {}", top.ln(), r.omega.value);
        }
    }

    #[test]
    fn rank_mismatch() {
        let t0 = inclusion(3, 2, 1.0, NormSpec::l2(3));
        let t1 = LinOp::new(DMatrix::from_element(3, 1, 1.0), NormSpec::l2(1), NormSpec::l2(3)).unwrap();
        assert!(matches!(nu2_tools(&t0, &t1, 2.0), Err(MetricsError::RankMismatch(_))));
    }

    #[test]
    fn diameter_bound_on_linf_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let e = NormSpec::linf(4);
        let mut pairs = Vec::new();
        let mut lambda = 1.0f64;
        for _ in 0..2 {
            let t0 = LinOp::new(DMatrix::from_fn(4, 2, |_, _| rng.gen_range(-1.0..1.0)), NormSpec::l2(2), e.clone()).unwrap();
            let t1 = LinOp::new(DMatrix::from_fn(4, 2, |_, _| rng.gen_range(-1.0..1.0)), NormSpec::l2(2), e.clone()).unwrap();
            let r = nu2_tools(&t0, &t1, 1.0).unwrap();
            lambda = lambda.max(r.omega.value.exp());
            pairs.push(r.pair);
        }
        let opts = BmOptions { starts: 3, iters: 150, ..Default::default() };
        let c = diameter_claim_check(&pairs[0], &pairs[1], lambda, &opts).unwrap();
        assert!(c.holds(), "{} > {}", c.omega2.value, c.bound);
    }
}
