//! The extrinsic metric: Hausdorff distance between dual unit balls,
//! measured in the dual of a reference norm, and the pair of `l_inf`
//! embeddings that realizes it.

use argmin::core::{CostFunction, Error as ArgminError, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::DMatrix;

use super::lp::{polyhedral_distance, LinearProgram};
use super::opnorm::exact_op_norm;
use super::{check_dim, dot, omega, Certificate, LinOp, MetricValue, MetricsError, NormSpec, LP_TOL};

const SAMPLE_RES: usize = 48;
/// How far `nu(T)` may sit from the declared norm before it is rejected.
const REPRESENTS_TOL: f64 = 1e-7;

/// `alpha_X(m, n)`: Hausdorff distance in `X*` between `Ball((X, m)*)` and
/// `Ball((X, n)*)`.
pub fn alpha_extrinsic(x: &NormSpec, m: &NormSpec, n: &NormSpec) -> Result<MetricValue, MetricsError> {
    check_dim(x.dim(), m.dim())?;
    check_dim(x.dim(), n.dim())?;
    if m == n {
        return Ok(MetricValue::exact(0.0, "identical", 0.0));
    }
    // vertices of a dual ball are the facets of the primal one, and facets
    // of X* are the vertices of Ball(X)
    if let (Some(xv), Some(mf), Some(mv), Some(nf), Some(nv)) = (x.vertices(), m.facets(), m.vertices(), n.facets(), n.vertices()) {
        let directed = |from: &[Vec<f64>], to_ball: &[Vec<f64>]| -> Result<f64, MetricsError> {
            let mut worst = 0.0f64;
            for a in half(from) {
                worst = worst.max(polyhedral_distance(&a, &xv, to_ball, None)?.0);
            }
            Ok(worst)
        };
        let v = directed(&mf, &nv)?.max(directed(&nf, &mv)?);
        return Ok(MetricValue::exact(v, "polar_lp", LP_TOL));
    }
    let (xd, md, nd) = (x.dual()?, m.dual()?, n.dual()?);
    let mut value = 0.0f64;
    for (from, to) in [(&md, &nd), (&nd, &md)] {
        for p in sphere_grid(from, SAMPLE_RES)? {
            value = value.max(distance_between(&xd, to, &p)?);
        }
    }
    let mesh = 2.0 / SAMPLE_RES as f64;
    Ok(MetricValue::new(value, Certificate::Estimate, format!("sampled_grid_{SAMPLE_RES}"), mesh))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtrinsicWitness {
    pub t_prime: LinOp,
    pub u_prime: LinOp,
    /// `||T' - U'||` from `X` to `l_inf^{2N}`.
    pub distance: MetricValue,
}

/// Given `T, U : R^k -> l_inf^N` with `nu(T) = m` and `nu(U) = n`, builds
/// `T' = xi T` and `U' = eta U` into `l_inf^{2N}` from the nearest-point
/// functionals `f_j, g_j` in `Ball(l_1^N)`:
/// `xi = [I; F]`, `eta = [G; I]`.
pub fn extrinsic_witness(x: &NormSpec, m: &NormSpec, n: &NormSpec, t: &LinOp, u: &LinOp) -> Result<ExtrinsicWitness, MetricsError> {
    let k = x.dim();
    for op in [t, u] {
        if !matches!(op.codomain, NormSpec::P { p, .. } if p.is_infinite()) {
            return Err(MetricsError::NotIntoEllInfty);
        }
        check_dim(k, op.domain.dim())?;
    }
    check_dim(t.codomain.dim(), u.codomain.dim())?;
    for (op, norm) in [(t, m), (u, n)] {
        let w = omega(&op.pushforward()?, norm)?;
        if w.value > REPRESENTS_TOL {
            return Err(MetricsError::InvalidNorm(format!("operator does not represent {norm} (omega = {})", w.value)));
        }
    }
    let xv = x.vertices().ok_or_else(|| MetricsError::DualNotComputable(x.describe()))?;
    let big_n = t.matrix.nrows();
    let mut f = DMatrix::zeros(big_n, big_n);
    let mut g = DMatrix::zeros(big_n, big_n);
    for j in 0..big_n {
        let tj: Vec<f64> = t.matrix.row(j).iter().copied().collect();
        let uj: Vec<f64> = u.matrix.row(j).iter().copied().collect();
        let gj = nearest_in_l1_image(&tj, &u.matrix, &xv)?;
        let fj = nearest_in_l1_image(&uj, &t.matrix, &xv)?;
        g.row_mut(j).copy_from_slice(&gj);
        f.row_mut(j).copy_from_slice(&fj);
    }
    let id = DMatrix::<f64>::identity(big_n, big_n);
    let xi = stack(&id, &f);
    let eta = stack(&g, &id);
    let out = NormSpec::linf(2 * big_n);
    let t_prime = LinOp::new(&xi * &t.matrix, x.clone(), out.clone())?;
    let u_prime = LinOp::new(&eta * &u.matrix, x.clone(), out.clone())?;
    let diff = LinOp::new(&t_prime.matrix - &u_prime.matrix, x.clone(), out)?;
    let distance = exact_op_norm(&diff).ok_or_else(|| MetricsError::DualNotComputable(x.describe()))?;
    Ok(ExtrinsicWitness { t_prime, u_prime, distance })
}

/// `argmin_{||g||_1 <= 1} ||target - A^t g||_{X*}`, with `||.||_{X*}` the max
/// over `xv` (vertices of `Ball(X)`).
fn nearest_in_l1_image(target: &[f64], a: &DMatrix<f64>, xv: &[Vec<f64>]) -> Result<Vec<f64>, MetricsError> {
    let rows = a.nrows();
    let mut lp = LinearProgram::minimize();
    let t = lp.var(1.0, 0.0, f64::INFINITY);
    let pos: Vec<usize> = (0..rows).map(|_| lp.var(0.0, 0.0, f64::INFINITY)).collect();
    let neg: Vec<usize> = (0..rows).map(|_| lp.var(0.0, 0.0, f64::INFINITY)).collect();
    let budget: Vec<(usize, f64)> = pos.iter().chain(&neg).map(|&v| (v, 1.0)).collect();
    lp.le(&budget, 1.0);
    for v in xv {
        // v.target - sum_i g_i (a_i . v) <= t
        let av: Vec<f64> = (0..rows).map(|i| (0..v.len()).map(|c| a[(i, c)] * v[c]).sum()).collect();
        let mut terms: Vec<(usize, f64)> = Vec::with_capacity(2 * rows + 1);
        for i in 0..rows {
            terms.push((pos[i], -av[i]));
            terms.push((neg[i], av[i]));
        }
        terms.push((t, -1.0));
        lp.le(&terms, -dot(v, target));
    }
    let sol = lp.solve()?;
    Ok((0..rows).map(|i| sol.values[pos[i]] - sol.values[neg[i]]).collect())
}

fn stack(top: &DMatrix<f64>, bottom: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.rows_mut(0, top.nrows()).copy_from(top);
    out.rows_mut(top.nrows(), bottom.nrows()).copy_from(bottom);
    out
}

fn half(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let is_neg = |q: &Vec<f64>| q.iter().zip(p).all(|(a, b)| (a + b).abs() <= 1e-12);
        if !out.iter().any(is_neg) {
            out.push(p.clone());
        }
    }
    out
}

/// Normalized cube-surface grid on the unit sphere of `norm`.
pub(crate) fn sphere_grid(norm: &NormSpec, res: usize) -> Result<Vec<Vec<f64>>, MetricsError> {
    let k = norm.dim();
    let ticks: Vec<f64> = (0..=res).map(|i| -1.0 + 2.0 * i as f64 / res as f64).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let c: Vec<f64> = idx.iter().map(|&i| ticks[i]).collect();
        if c.iter().any(|v| v.abs() == 1.0) {
            let s = norm.eval(&c)?;
            out.push(c.iter().map(|v| v / s).collect());
        }
        let mut i = 0;
        while i < k && idx[i] == res {
            idx[i] = 0;
            i += 1;
        }
        if i == k {
            return Ok(out);
        }
        idx[i] += 1;
    }
}

/// `min { measure(p - y) : ball(y) <= 1 }` by Nelder–Mead on the radial
/// retraction `z -> z / max(1, ball(z))`.
fn distance_between(measure: &NormSpec, ball: &NormSpec, p: &[f64]) -> Result<f64, MetricsError> {
    let cost = TwoNormDistance { measure, ball, p };
    let s = ball.eval(p)?.max(1.0);
    let x0: Vec<f64> = p.iter().map(|v| v / s).collect();
    let start = cost.value(&x0);
    let mut simplex = vec![x0.clone()];
    for i in 0..x0.len() {
        let mut v = x0.clone();
        v[i] -= 0.1;
        simplex.push(v);
    }
    let run = || -> Result<f64, ArgminError> {
        let solver = NelderMead::new(simplex).with_sd_tolerance(1e-14)?;
        let res = Executor::new(TwoNormDistance { measure, ball, p }, solver).configure(|s| s.max_iters(400)).run()?;
        Ok(res.state().best_cost)
    };
    Ok(run().map_or(start, |v| v.min(start)))
}

struct TwoNormDistance<'a> {
    measure: &'a NormSpec,
    ball: &'a NormSpec,
    p: &'a [f64],
}

impl TwoNormDistance<'_> {
    fn value(&self, z: &[f64]) -> f64 {
        let s = self.ball.eval(z).unwrap_or(f64::INFINITY).max(1.0);
        let diff: Vec<f64> = self.p.iter().zip(z).map(|(a, b)| a - b / s).collect();
        self.measure.eval(&diff).unwrap_or(f64::INFINITY)
    }
}

impl CostFunction for TwoNormDistance<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, z: &Self::Param) -> Result<f64, ArgminError> {
        Ok(self.value(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(r.len(), r[0].len(), |i, j| r[i][j])
    }

    #[test]
    fn square_against_cross_polytope() {
        let (x, m, n) = (NormSpec::linf(2), NormSpec::linf(2), NormSpec::l1(2));
        let a = alpha_extrinsic(&x, &m, &n).unwrap();
        assert!(a.certificate.is_exact());
        assert!((a.value - 1.0).abs() < 1e-8);
        assert_eq!(alpha_extrinsic(&x, &m, &m).unwrap().value, 0.0);
        // both sides of the comparison with omega
        let w = omega(&m, &n).unwrap().value;
        assert!(w / 2.0 <= a.value && a.value <= 2.0 * w);
    }

    #[test]
    fn witness_realizes_alpha() {
        let (x, m, n) = (NormSpec::linf(2), NormSpec::linf(2), NormSpec::l1(2));
        let t = LinOp::new(DMatrix::identity(2, 2), x.clone(), NormSpec::linf(2)).unwrap();
        let u = LinOp::new(rows(&[&[1.0, 1.0], &[1.0, -1.0]]), x.clone(), NormSpec::linf(2)).unwrap();
        let w = extrinsic_witness(&x, &m, &n, &t, &u).unwrap();
        assert!((w.distance.value - 1.0).abs() < 1e-8);
        // the new maps still represent m and n
        assert!(omega(&w.t_prime.pushforward().unwrap(), &m).unwrap().value < 1e-9);
        assert!(omega(&w.u_prime.pushforward().unwrap(), &n).unwrap().value < 1e-9);
        let same = extrinsic_witness(&x, &m, &m, &t, &t).unwrap();
        assert!(same.distance.value < 1e-9);
    }

    #[test]
    fn witness_preconditions() {
        let x = NormSpec::linf(2);
        let t = LinOp::new(DMatrix::identity(2, 2), x.clone(), NormSpec::l2(2)).unwrap();
        assert_eq!(extrinsic_witness(&x, &x, &x, &t, &t).err(), Some(MetricsError::NotIntoEllInfty));
        let t = LinOp::new(DMatrix::identity(2, 2), x.clone(), NormSpec::linf(2)).unwrap();
        assert!(matches!(extrinsic_witness(&x, &NormSpec::l1(2), &x, &t, &t), Err(MetricsError::InvalidNorm(_))));
    }

    #[test]
    fn sampled_route_is_close_for_smooth_norms() {
        let x = NormSpec::l2(2);
        let m = NormSpec::p(2, 3.0).unwrap();
        let n = NormSpec::linf(2);
        let a = alpha_extrinsic(&x, &m, &n).unwrap();
        assert_eq!(a.certificate, Certificate::Estimate);
        let w = omega(&m, &n).unwrap().value;
        assert!(a.value > 0.0 && a.value <= 2.0 * w);
    }
}
