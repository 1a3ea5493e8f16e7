//! A common isometric home for `F` and `G` given `T : F -> G`.
//!
//! On `F + G` take
//! `m(x, y) = max(||T x / ||T|| + y||_G, max_{g in D} |g(y) / ||T|| + (T^t g)(x) / ||T^t g||_{F*}|)`
//! where `D` holds least-norm lifts through `T^t` of the extreme points of
//! `Ball(F*)` scaled by `1 / ||T^{-1}||`. `H` is the quotient by the kernel of
//! `m`, coordinatized by an orthonormal basis `Q` of the row space of the
//! matrix `M` whose rows define `m`.

use nalgebra::DMatrix;

use super::alpha::sphere_grid;
use super::dual_lift::dual_min_lift;
use super::gap::{gap_metric, SubspaceRep};
use super::norm::matrix_to_rows;
use super::opnorm::{inv_norm, op_norm};
use super::{LinOp, MetricValue, MetricsError, NormSpec, RANK_TOL};

/// Grid resolution of the dual-sphere net used when `Ball(F*)` is not a polytope.
const NET_RES: usize = 8;
/// Largest allowed deviation of `I` or `J` from an isometry.
pub const ISOMETRY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Amalgam {
    pub h: NormSpec,
    pub i: LinOp,
    pub j: LinOp,
    pub t: LinOp,
    pub t_norm: MetricValue,
    pub t_inv_norm: MetricValue,
    /// Number of functionals in `D`.
    pub d_size: usize,
    /// Net resolution when `D` comes from a sampled dual sphere.
    pub net_resolution: Option<usize>,
    /// `max |1 - ||I||, 1 - ||I^{-1}||, ...|` over both embeddings.
    pub isometry_defect: f64,
}

/// One side of a checked inequality `lhs <= bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyCheck {
    pub lhs: MetricValue,
    pub bound: f64,
    /// Whether the hypotheses of the inequality hold for this `T`.
    pub applicable: bool,
}

impl PropertyCheck {
    pub fn holds(&self, slack: f64) -> bool {
        !self.applicable || self.lhs.value <= self.bound + slack + self.lhs.tolerance
    }

    pub fn margin(&self) -> f64 {
        self.bound - self.lhs.value
    }
}

fn upper_value(v: &MetricValue, what: &str) -> Result<f64, MetricsError> {
    if v.certificate.bounds_above() {
        Ok(v.value)
    } else {
        v.upper.ok_or_else(|| MetricsError::Uncertified(format!("{what} is only a {} bound", v.certificate)))
    }
}

pub fn amalgam_norm(f: &NormSpec, g: &NormSpec, t: &LinOp) -> Result<Amalgam, MetricsError> {
    if t.domain != *f || t.codomain != *g {
        return Err(MetricsError::InvalidNorm("operator norms do not match F and G".into()));
    }
    if !t.is_injective() {
        return Err(MetricsError::NotInjective);
    }
    let (a, b) = (f.dim(), g.dim());
    let t_norm = op_norm(t)?;
    let t_inv_norm = inv_norm(t)?;
    let tn = upper_value(&t_norm, "||T||")?;
    let tin = upper_value(&t_inv_norm, "||T^-1||")?;

    let (extreme, net_resolution) = match f.facets() {
        Some(facets) => (half(&facets), None),
        None => (half(&sphere_grid(&f.dual()?, NET_RES)?), Some(NET_RES)),
    };
    let mut m = DMatrix::zeros(b + extreme.len(), a + b);
    m.view_mut((0, 0), (b, a)).copy_from(&(&t.matrix / tn));
    m.view_mut((0, a), (b, b)).fill_with_identity();
    for (r, phi) in extreme.iter().enumerate() {
        let scaled: Vec<f64> = phi.iter().map(|v| v / tin).collect();
        let lift = dual_min_lift(t, &scaled)?;
        let ttg: Vec<f64> = (0..a).map(|c| (0..b).map(|i| t.matrix[(i, c)] * lift.g[i]).sum()).collect();
        let s = f.dual_eval(&ttg)?;
        for c in 0..a {
            m[(b + r, c)] = ttg[c] / s;
        }
        for c in 0..b {
            m[(b + r, a + c)] = lift.g[c] / tn;
        }
    }
    let q = row_space(&m);
    let h = NormSpec::pushforward(
        matrix_to_rows(&(&m * &q)),
        NormSpec::max_sum(vec![g.clone(), NormSpec::linf(extreme.len())])?,
    )?;
    let qt = q.transpose();
    let i = LinOp::new(qt.columns(0, a).into_owned(), f.clone(), h.clone())?;
    let j = LinOp::new(qt.columns(a, b).into_owned(), g.clone(), h.clone())?;
    let mut isometry_defect = 0.0f64;
    for e in [&i, &j] {
        isometry_defect = isometry_defect.max((op_norm(e)?.value - 1.0).abs()).max((inv_norm(e)?.value - 1.0).abs());
    }
    if net_resolution.is_none() && isometry_defect > ISOMETRY_TOL {
        return Err(MetricsError::Uncertified(format!("embeddings are off by {isometry_defect}")));
    }
    Ok(Amalgam {
        h,
        i,
        j,
        t: t.clone(),
        t_norm,
        t_inv_norm,
        d_size: extreme.len(),
        net_resolution,
        isometry_defect,
    })
}

impl Amalgam {
    fn norms(&self) -> (f64, f64) {
        let up = |v: &MetricValue| if v.certificate.bounds_above() { v.value } else { v.upper.unwrap_or(v.value) };
        (up(&self.t_norm), up(&self.t_inv_norm))
    }

    /// `||I - J T|| <= ||T|| ||T^{-1}|| - 1` when both norms are at least 1.
    pub fn property_i(&self) -> Result<PropertyCheck, MetricsError> {
        let (tn, tin) = self.norms();
        let diff = LinOp::new(&self.i.matrix - &self.j.matrix * &self.t.matrix, self.i.domain.clone(), self.h.clone())?;
        Ok(PropertyCheck {
            lhs: op_norm(&diff)?,
            bound: tn * tin - 1.0,
            applicable: tn >= 1.0 - 1e-9 && tin >= 1.0 - 1e-9,
        })
    }

    /// `gap_H(Im I, Im J) <= ||T^{-1}|| - 1` when `dim F = dim G` and `||T|| = 1`.
    pub fn property_ii(&self) -> Result<PropertyCheck, MetricsError> {
        let (tn, tin) = self.norms();
        let applicable = self.i.matrix.ncols() == self.j.matrix.ncols() && (tn - 1.0).abs() <= 1e-9;
        let u = SubspaceRep::new(self.h.clone(), self.i.matrix.clone())?;
        let w = SubspaceRep::new(self.h.clone(), self.j.matrix.clone())?;
        let lhs = if applicable { gap_metric(&u, &w)? } else { MetricValue::exact(0.0, "not_applicable", 0.0) };
        Ok(PropertyCheck { lhs, bound: tin - 1.0, applicable })
    }
}

/// Orthonormal columns spanning the row space of `m`.
fn row_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let top = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > RANK_TOL * top).collect();
    DMatrix::from_fn(m.ncols(), keep.len(), |r, c| vt[(keep[c], r)])
}

fn half(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| q.iter().zip(p).all(|(x, y)| (x + y).abs() <= 1e-12)) {
            out.push(p.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn isometry_gives_zero() {
        let f = NormSpec::linf(2);
        let t = LinOp::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]), f.clone(), f.clone()).unwrap();
        let am = amalgam_norm(&f, &f, &t).unwrap();
        let p = am.property_i().unwrap();
        assert!(p.applicable && p.lhs.value <= 1e-8, "{}", p.lhs.value);
        assert!(am.isometry_defect <= ISOMETRY_TOL);
    }

    #[test]
    fn diagonal_contraction() {
        let f = NormSpec::linf(2);
        let delta = 0.1;
        let t = LinOp::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0 / (1.0 + delta)]), f.clone(), f.clone()).unwrap();
        let am = amalgam_norm(&f, &f, &t).unwrap();
        assert!((am.t_inv_norm.value - 1.1).abs() < 1e-9);
        let p = am.property_i().unwrap();
        assert!(p.lhs.value <= delta + 1e-6, "{}", p.lhs.value);
        let q = am.property_ii().unwrap();
        assert!(q.applicable);
        assert!(q.lhs.value <= delta + 1e-6, "{}", q.lhs.value);
    }

    #[test]
    fn random_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..6 {
            let (f, g) = if trial % 2 == 0 { (NormSpec::linf(2), NormSpec::l1(2)) } else { (NormSpec::l1(2), NormSpec::l2(2)) };
            let raw = LinOp::new(DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0)), f.clone(), g.clone()).unwrap();
            let n = op_norm(&raw).unwrap().value;
            let t = LinOp::new(&raw.matrix / n, f.clone(), g.clone()).unwrap();
            let am = amalgam_norm(&f, &g, &t).unwrap();
            assert!(am.property_i().unwrap().holds(1e-6));
            assert!(am.property_ii().unwrap().holds(1e-6));
        }
    }

    #[test]
    fn rejects_rank_loss() {
        let f = NormSpec::l1(2);
        let t = LinOp::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]), f.clone(), f.clone()).unwrap();
        assert_eq!(amalgam_norm(&f, &f, &t).err(), Some(MetricsError::NotInjective));
    }
}
