//! The intrinsic metric and Banach–Mazur upper bounds.

use argmin::core::{CostFunction, Error as ArgminError, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::opnorm::{exact_op_norm_parts, op_norm_with};
use super::{check_dim, Certificate, LinOp, MetricValue, MetricsError, NormSpec, AscentOptions};
use crate::par;

/// `log max(||Id||_{m -> n}, ||Id||_{n -> m})`.
pub fn omega(m: &NormSpec, n: &NormSpec) -> Result<MetricValue, MetricsError> {
    check_dim(m.dim(), n.dim())?;
    if m == n {
        return Ok(MetricValue::exact(0.0, "identical", 0.0));
    }
    let a = op_norm_with(&LinOp::identity(m.clone(), n.clone())?, &AscentOptions::default())?;
    let b = op_norm_with(&LinOp::identity(n.clone(), m.clone())?, &AscentOptions::default())?;
    let top = a.value.max(b.value);
    let tolerance = (a.tolerance / a.value).max(b.tolerance / b.value);
    let mut out = MetricValue::new(
        top.ln().max(0.0),
        a.certificate.join(b.certificate),
        format!("log_max({}, {})", a.method, b.method),
        tolerance,
    );
    if let (Some(ua), Some(ub)) = (a.upper.or(a.certificate.bounds_above().then_some(a.value)), b.upper.or(b.certificate.bounds_above().then_some(b.value))) {
        if !out.certificate.bounds_above() {
            out.upper = Some(ua.max(ub).ln().max(0.0));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BmOptions {
    pub starts: usize,
    pub iters: usize,
    pub seed: u64,
    pub jobs: usize,
    /// Tried before the generated starts.
    pub extra_starts: Vec<DMatrix<f64>>,
}

impl Default for BmOptions {
    fn default() -> Self {
        Self { starts: 8, iters: 400, seed: 0, jobs: 1, extra_starts: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BmResult {
    pub value: MetricValue,
    /// Minimizer, scaled so that `||Delta||_{m -> n} = ||Delta^{-1}||_{n -> m}`.
    pub delta: DMatrix<f64>,
}

/// Upper bound on `d_BM(m, n)`: Nelder–Mead on `log(||D|| ||D^{-1}||)` from
/// the identity, a Hadamard-type matrix when `k` is a power of two, the extra
/// starts, then seeded random matrices, `opts.starts` runs in total.
pub fn bm_upper(m: &NormSpec, n: &NormSpec, opts: &BmOptions) -> Result<BmResult, MetricsError> {
    let k = m.dim();
    check_dim(k, n.dim())?;
    let m = m.to_polyhedral().unwrap_or_else(|| m.clone());
    let n = n.to_polyhedral().unwrap_or_else(|| n.clone());
    if k == 1 {
        let delta = balance(&m, &n, DMatrix::identity(1, 1))?.0;
        return Ok(BmResult { value: MetricValue::exact(0.0, "one_dimensional", 0.0), delta });
    }
    let mut starts: Vec<DMatrix<f64>> = vec![DMatrix::identity(k, k)];
    if k.is_power_of_two() {
        starts.push(DMatrix::from_fn(k, k, |i, j| if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 }));
    }
    starts.extend(opts.extra_starts.iter().filter(|s| s.shape() == (k, k)).cloned());
    let fixed = starts.len();
    let total = opts.starts.max(fixed);
    let runs = par::map_indexed(total, opts.jobs, |i| {
        let start = if i < fixed {
            starts[i].clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0))
        };
        descend(&m, &n, start, opts.iters)
    });
    let mut best: Option<(f64, DMatrix<f64>)> = None;
    for (v, d) in runs {
        if best.as_ref().map_or(true, |(b, _)| v < *b) {
            best = Some((v, d));
        }
    }
    let (_, delta) = best.expect("at least one start");
    let (delta, a, b) = balance(&m, &n, delta)?;
    let certificate = if a.certificate.is_exact() && b.certificate.is_exact() { Certificate::Upper } else { Certificate::Estimate };
    let value = (a.value * b.value).ln().max(0.0);
    let tolerance = a.tolerance / a.value + b.tolerance / b.value;
    Ok(BmResult { value: MetricValue::new(value, certificate, "nelder_mead", tolerance), delta })
}

/// Rescales `delta` so both operator norms agree; returns them as well.
fn balance(m: &NormSpec, n: &NormSpec, delta: DMatrix<f64>) -> Result<(DMatrix<f64>, MetricValue, MetricValue), MetricsError> {
    let inv = delta.clone().try_inverse().ok_or(MetricsError::NotInjective)?;
    let a = op_norm_with(&LinOp::new(delta.clone(), m.clone(), n.clone())?, &AscentOptions::default())?;
    let b = op_norm_with(&LinOp::new(inv, n.clone(), m.clone())?, &AscentOptions::default())?;
    let c = (b.value / a.value).sqrt();
    let scale = |v: &MetricValue, s: f64| MetricValue { value: v.value * s, tolerance: v.tolerance * s, ..v.clone() };
    Ok((delta * c, scale(&a, c), scale(&b, 1.0 / c)))
}

struct Distortion<'a> {
    m: &'a NormSpec,
    n: &'a NormSpec,
    k: usize,
}

impl Distortion<'_> {
    fn value(&self, d: &DMatrix<f64>) -> f64 {
        let Some(inv) = d.clone().try_inverse() else {
            return f64::INFINITY;
        };
        let fast = AscentOptions { starts: 8, iters: 50, ..Default::default() };
        let norm = |t: &DMatrix<f64>, a: &NormSpec, b: &NormSpec| match exact_op_norm_parts(t, a, b) {
            Some(v) => v.value,
            None => LinOp::new(t.clone(), a.clone(), b.clone())
                .and_then(|op| op_norm_with(&op, &fast))
                .map_or(f64::INFINITY, |v| v.value),
        };
        let v = (norm(d, self.m, self.n) * norm(&inv, self.n, self.m)).ln();
        if v.is_finite() { v } else { f64::INFINITY }
    }
}

impl CostFunction for Distortion<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<Self::Output, ArgminError> {
        Ok(self.value(&DMatrix::from_column_slice(self.k, self.k, p)))
    }
}

fn descend(m: &NormSpec, n: &NormSpec, start: DMatrix<f64>, iters: usize) -> (f64, DMatrix<f64>) {
    let k = start.nrows();
    let cost = Distortion { m, n, k };
    let x0: Vec<f64> = start.iter().copied().collect();
    let v0 = cost.value(&start);
    let scale = x0.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-3);
    let mut simplex = vec![x0.clone()];
    for i in 0..x0.len() {
        let mut v = x0.clone();
        v[i] += 0.25 * scale;
        simplex.push(v);
    }
    let run = || -> Result<(f64, Vec<f64>), ArgminError> {
        let solver = NelderMead::new(simplex).with_sd_tolerance(1e-13)?;
        let res = Executor::new(Distortion { m, n, k }, solver).configure(|s| s.max_iters(iters as u64)).run()?;
        let state = res.state();
        let p = state.best_param.clone().unwrap_or_else(|| x0.clone());
        Ok((state.best_cost, p))
    };
    match run() {
        Ok((v, p)) if v < v0 => (v, DMatrix::from_column_slice(k, k, &p)),
        _ => (v0, start),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_examples() {
        let (l1, l2, linf) = (NormSpec::l1(2), NormSpec::l2(2), NormSpec::linf(2));
        let v = omega(&l1, &linf).unwrap();
        assert!(v.certificate.is_exact());
        assert!((v.value - 2f64.ln()).abs() < 1e-12);
        let v = omega(&l2, &linf).unwrap();
        assert!(v.certificate.is_exact());
        assert!((v.value - 2f64.sqrt().ln()).abs() < 1e-12);
        assert_eq!(omega(&l1, &l1).unwrap().value, 0.0);
        assert_eq!(omega(&l1, &linf).unwrap().value, omega(&linf, &l1).unwrap().value);
        assert!(omega(&l1, &NormSpec::l1(3)).is_err());
    }

    #[test]
    fn omega_through_polytopes_matches_closed_form() {
        let a = omega(&NormSpec::l1(3).to_polyhedral().unwrap(), &NormSpec::linf(3).to_polyhedral().unwrap()).unwrap();
        assert!((a.value - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn bm_examples() {
        let r = bm_upper(&NormSpec::l1(1), &NormSpec::p(1, 3.0).unwrap(), &BmOptions::default()).unwrap();
        assert_eq!(r.value.value, 0.0);
        let r = bm_upper(&NormSpec::l1(2), &NormSpec::linf(2), &BmOptions::default()).unwrap();
        assert!(r.value.value <= 1e-6, "{}", r.value.value);
        assert_eq!(r.value.certificate, Certificate::Upper);
        let r = bm_upper(&NormSpec::l2(2), &NormSpec::linf(2), &BmOptions::default()).unwrap();
        assert!(r.value.value <= 2f64.sqrt().ln() + 1e-6);
        // balanced minimizer realizes half the distortion in omega
        let moved = NormSpec::pushforward(
            crate::metrics::norm::matrix_to_rows(&r.delta),
            NormSpec::linf(2),
        )
        .unwrap();
        let w = omega(&NormSpec::l2(2), &moved).unwrap();
        assert!((w.value - r.value.value / 2.0).abs() < 1e-9, "{} vs {}", w.value, r.value.value);
    }

    #[test]
    fn bm_is_seeded() {
        let m = NormSpec::from_points(&[vec![1.0, 0.2], vec![0.1, 1.0], vec![0.8, -0.7]]).unwrap();
        let n = NormSpec::p(2, 3.0).unwrap();
        let opts = BmOptions { starts: 4, iters: 80, seed: 3, ..Default::default() };
        let a = bm_upper(&m, &n, &opts).unwrap();
        let b = bm_upper(&m, &n, &BmOptions { jobs: 3, ..opts }).unwrap();
        assert_eq!(a.value.value.to_bits(), b.value.value.to_bits());
        assert_eq!(a.delta, b.delta);
    }
}
