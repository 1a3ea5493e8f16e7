use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lp::LinearProgram;
use super::norm::{matrix_to_rows, rank_of, rows_to_matrix};
use super::{check_dim, dot, Certificate, MetricValue, MetricsError, NormSpec, EXACT_TOL, LP_TOL};
use crate::par;

/// A real `n x m` matrix viewed as an operator between two normed spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LinOpFile", into = "LinOpFile")]
pub struct LinOp {
    pub matrix: DMatrix<f64>,
    pub domain: NormSpec,
    pub codomain: NormSpec,
}

impl LinOp {
    pub fn new(matrix: DMatrix<f64>, domain: NormSpec, codomain: NormSpec) -> Result<Self, MetricsError> {
        check_dim(domain.dim(), matrix.ncols())?;
        check_dim(codomain.dim(), matrix.nrows())?;
        Ok(Self { matrix, domain, codomain })
    }

    pub fn from_rows(rows: &[Vec<f64>], domain: NormSpec, codomain: NormSpec) -> Result<Self, MetricsError> {
        if rows.iter().any(|r| r.len() != domain.dim()) {
            return Err(MetricsError::DimensionMismatch {
                expected: domain.dim(),
                got: rows.iter().map(Vec::len).find(|&l| l != domain.dim()).unwrap_or(0),
            });
        }
        Self::new(rows_to_matrix(rows), domain, codomain)
    }

    pub fn identity(domain: NormSpec, codomain: NormSpec) -> Result<Self, MetricsError> {
        let k = domain.dim();
        Self::new(DMatrix::identity(k, k), domain, codomain)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(x)).iter().copied().collect()
    }

    pub fn is_injective(&self) -> bool {
        rank_of(&self.matrix) == self.matrix.ncols()
    }

    /// The pushforward norm `x -> ||T x||` on the domain's coordinates.
    pub fn pushforward(&self) -> Result<NormSpec, MetricsError> {
        NormSpec::pushforward(matrix_to_rows(&self.matrix), self.codomain.clone())
    }

    pub fn parse_json(text: &str) -> Result<Self, MetricsError> {
        serde_json::from_str(text).map_err(|e| MetricsError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("operators serialize")
    }
}

#[derive(Serialize, Deserialize)]
struct LinOpFile {
    matrix: Vec<Vec<f64>>,
    domain: NormSpec,
    codomain: NormSpec,
}

impl TryFrom<LinOpFile> for LinOp {
    type Error = MetricsError;

    fn try_from(f: LinOpFile) -> Result<Self, Self::Error> {
        LinOp::from_rows(&f.matrix, f.domain, f.codomain)
    }
}

impl From<LinOp> for LinOpFile {
    fn from(t: LinOp) -> Self {
        LinOpFile { matrix: matrix_to_rows(&t.matrix), domain: t.domain, codomain: t.codomain }
    }
}

/// Multi-start projected ascent on the Euclidean sphere: starts at the
/// coordinate vectors, then at seeded uniform points of the cube; gradient by
/// central differences; backtracking (Armijo) steps from length 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AscentOptions {
    pub starts: usize,
    pub iters: usize,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self { starts: 32, iters: 200, seed: 0, jobs: 1 }
    }
}

pub fn op_norm(t: &LinOp) -> Result<MetricValue, MetricsError> {
    op_norm_with(t, &AscentOptions::default())
}

pub fn op_norm_with(t: &LinOp, opts: &AscentOptions) -> Result<MetricValue, MetricsError> {
    if let Some(v) = exact_op_norm(t) {
        return Ok(v);
    }
    let (value, _) = ascent(t.domain.dim(), opts, |x| {
        let d = t.domain.eval(x).unwrap_or(f64::NAN);
        t.codomain.eval(&t.apply(x)).unwrap_or(f64::NAN) / d
    });
    let mut out = MetricValue::new(value, Certificate::Lower, "projected_ascent", EXACT_TOL * value.max(1.0));
    out.upper = euclidean_factor_bound(t);
    Ok(out)
}

pub fn inv_norm(t: &LinOp) -> Result<MetricValue, MetricsError> {
    inv_norm_with(t, &AscentOptions::default())
}

pub fn inv_norm_with(t: &LinOp, opts: &AscentOptions) -> Result<MetricValue, MetricsError> {
    if !t.is_injective() {
        return Err(MetricsError::NotInjective);
    }
    if let (Some(a), Some(b)) = (t.domain.euclidean_form(), t.codomain.euclidean_form()) {
        let m = euclidean_core(&a, &b, &t.matrix)?;
        let s = m.svd(false, false).singular_values.min();
        return Ok(MetricValue::exact(1.0 / s, "svd", EXACT_TOL / (s * s)));
    }
    if let Some(dom_facets) = t.domain.facets() {
        let halves = half_facets(&dom_facets);
        if let Some(b) = t.codomain.euclidean_form() {
            // min ||B T x||_2 over a.x = 1 is (a^t G^{-1} a)^{-1/2}, G = (BT)^t (BT)
            let bt = b * &t.matrix;
            let gram = bt.transpose() * &bt;
            let chol = gram.cholesky().ok_or(MetricsError::NotInjective)?;
            let mut worst = f64::INFINITY;
            for a in &halves {
                let av = DVector::from_column_slice(a);
                worst = worst.min(1.0 / av.dot(&chol.solve(&av)).sqrt());
            }
            return Ok(MetricValue::exact(1.0 / worst, "facet_qp", EXACT_TOL / (worst * worst)));
        }
        if let Some(cod_facets) = t.codomain.facets() {
            let mut worst = f64::INFINITY;
            for a in &halves {
                worst = worst.min(facet_min(t, a, &cod_facets)?);
            }
            return Ok(MetricValue::exact(1.0 / worst, "facet_lp", LP_TOL / (worst * worst)));
        }
    }
    let (value, _) = ascent(t.domain.dim(), opts, |x| {
        let tx = t.codomain.eval(&t.apply(x)).unwrap_or(f64::NAN);
        t.domain.eval(x).unwrap_or(f64::NAN) / tx
    });
    Ok(MetricValue::new(value, Certificate::Lower, "projected_ascent", EXACT_TOL * value.max(1.0)))
}

/// Closed-form, vertex or facet evaluation when one applies.
pub(crate) fn exact_op_norm(t: &LinOp) -> Option<MetricValue> {
    exact_op_norm_parts(&t.matrix, &t.domain, &t.codomain)
}

pub(crate) fn exact_op_norm_parts(matrix: &DMatrix<f64>, domain: &NormSpec, codomain: &NormSpec) -> Option<MetricValue> {
    let apply = |x: &[f64]| -> Vec<f64> { (matrix * DVector::from_column_slice(x)).iter().copied().collect() };
    if matrix.iter().all(|&v| v == 0.0) {
        return Some(MetricValue::exact(0.0, "zero", 0.0));
    }
    if let (NormSpec::P { dim, p }, NormSpec::P { p: q, .. }) = (domain, codomain) {
        if *matrix == DMatrix::identity(*dim, *dim) {
            // ||Id||_{p -> q} = k^{max(0, 1/q - 1/p)}
            let e = (1.0 / q - 1.0 / p).max(0.0);
            return Some(MetricValue::exact((*dim as f64).powf(e), "identity_closed_form", EXACT_TOL));
        }
    }
    if let (Some(a), Some(b)) = (domain.euclidean_form(), codomain.euclidean_form()) {
        let m = euclidean_core(&a, &b, matrix).ok()?;
        let s = m.svd(false, false).singular_values.max();
        return Some(MetricValue::exact(s, "svd", EXACT_TOL * s.max(1.0)));
    }
    if let Some(vs) = domain.vertices() {
        let mut best = 0.0f64;
        for v in &vs {
            best = best.max(codomain.eval(&apply(v)).ok()?);
        }
        return Some(MetricValue::exact(best, "domain_vertices", EXACT_TOL * best.max(1.0)));
    }
    if let Some(cs) = codomain.facets() {
        let tt = matrix.transpose();
        let mut best = 0.0f64;
        for c in &cs {
            let pulled: Vec<f64> = (&tt * DVector::from_column_slice(c)).iter().copied().collect();
            best = best.max(domain.dual_eval(&pulled).ok()?);
        }
        return Some(MetricValue::exact(best, "codomain_facets", EXACT_TOL * best.max(1.0)));
    }
    None
}

/// `||T|| <= ||Id||_{X -> l2} ||T||_{2 -> 2} ||Id||_{l2 -> Y}` when both
/// identity norms are exactly computable.
fn euclidean_factor_bound(t: &LinOp) -> Option<f64> {
    let (m, n) = (t.domain.dim(), t.codomain.dim());
    let into = exact_op_norm(&LinOp::identity(t.domain.clone(), NormSpec::l2(m)).ok()?)?;
    let out = exact_op_norm(&LinOp::identity(NormSpec::l2(n), t.codomain.clone()).ok()?)?;
    let s = t.matrix.clone().svd(false, false).singular_values.max();
    Some(into.value * s * out.value)
}

/// `B T R^{-1}` for the thin QR `A = Q R`: the operator in orthonormal
/// coordinates of the two Euclidean forms.
fn euclidean_core(a: &DMatrix<f64>, b: &DMatrix<f64>, t: &DMatrix<f64>) -> Result<DMatrix<f64>, MetricsError> {
    let r = a.clone().qr().r();
    let r_inv = r.try_inverse().ok_or(MetricsError::NotInjective)?;
    Ok(b * t * r_inv)
}

/// One facet from each `+-` pair (by symmetry the other gives the same value).
fn half_facets(facets: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for a in facets {
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        let same = |x: &Vec<f64>, y: &Vec<f64>| x.iter().zip(y).all(|(p, q)| (p - q).abs() <= 1e-12);
        if !out.iter().any(|b| same(b, &neg) || same(b, a)) {
            out.push(a.clone());
        }
    }
    out
}

/// `min ||T x|| over a.x = 1` for a polyhedral codomain.
fn facet_min(t: &LinOp, a: &[f64], cod_facets: &[Vec<f64>]) -> Result<f64, MetricsError> {
    let m = t.matrix.ncols();
    let mut lp = LinearProgram::minimize();
    let s = lp.var(1.0, 0.0, f64::INFINITY);
    let x: Vec<usize> = (0..m).map(|_| lp.free(0.0)).collect();
    for c in cod_facets {
        let ct: Vec<f64> = (0..m).map(|j| (0..t.matrix.nrows()).map(|i| c[i] * t.matrix[(i, j)]).sum()).collect();
        let mut terms: Vec<(usize, f64)> = x.iter().zip(&ct).map(|(&v, &w)| (v, w)).collect();
        terms.push((s, -1.0));
        lp.le(&terms, 0.0);
    }
    let terms: Vec<(usize, f64)> = x.iter().zip(a).map(|(&v, &w)| (v, w)).collect();
    lp.eq(&terms, 1.0);
    Ok(lp.solve()?.objective)
}

/// Maximizes a scale-invariant `f` over `R^k \ {0}`; returns the best value
/// and point. Ties go to the lowest start index.
pub(crate) fn ascent<F>(k: usize, opts: &AscentOptions, f: F) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let runs = par::map_indexed(opts.starts.max(1), opts.jobs, |i| {
        let start = if i < k {
            let mut e = vec![0.0; k];
            e[i] = 1.0;
            e
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        climb(start, opts.iters, &f)
    });
    let mut best = (f64::NEG_INFINITY, vec![0.0; k]);
    for (v, x) in runs {
        if v > best.0 {
            best = (v, x);
        }
    }
    best
}

fn climb<F: Fn(&[f64]) -> f64>(start: Vec<f64>, iters: usize, f: &F) -> (f64, Vec<f64>) {
    let normalize = |x: &mut Vec<f64>| {
        let n = dot(x, x).sqrt();
        if n > 0.0 {
            x.iter_mut().for_each(|v| *v /= n);
        }
    };
    let mut x = start;
    normalize(&mut x);
    let mut v = f(&x);
    if !v.is_finite() {
        return (f64::NEG_INFINITY, x);
    }
    let h = 1e-6;
    for _ in 0..iters {
        let mut g: Vec<f64> = (0..x.len())
            .map(|i| {
                let mut a = x.clone();
                let mut b = x.clone();
                a[i] += h;
                b[i] -= h;
                (f(&a) - f(&b)) / (2.0 * h)
            })
            .collect();
        let radial = dot(&g, &x);
        g.iter_mut().zip(&x).for_each(|(gi, xi)| *gi -= radial * xi);
        let g2 = dot(&g, &g);
        if !(g2 > 1e-24) {
            break;
        }
        let mut step = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let mut y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            normalize(&mut y);
            let w = f(&y);
            if w.is_finite() && w >= v + 1e-4 * step * g2 {
                x = y;
                v = w;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (v, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> DMatrix<f64> {
        rows_to_matrix(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn zero_map() {
        let t = LinOp::new(DMatrix::zeros(2, 3), NormSpec::p(3, 3.0).unwrap(), NormSpec::l2(2)).unwrap();
        let v = op_norm(&t).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(v.certificate.is_exact());
    }

    #[test]
    fn sup_to_l1_identity() {
        let t = LinOp::identity(NormSpec::linf(2), NormSpec::l1(2)).unwrap();
        let v = op_norm(&t).unwrap();
        assert_eq!(v.value, 2.0);
        assert!(v.certificate.is_exact());
        // through an explicit polytope instead of the closed form
        let t = LinOp::identity(NormSpec::linf(2).to_polyhedral().unwrap(), NormSpec::l1(2)).unwrap();
        assert_eq!(op_norm(&t).unwrap().value, 2.0);
    }

    #[test]
    fn golden_ratio_shear() {
        let t = LinOp::new(mat(&[&[1.0, 1.0], &[0.0, 1.0]]), NormSpec::l2(2), NormSpec::l2(2)).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let n = op_norm(&t).unwrap();
        let i = inv_norm(&t).unwrap();
        assert!((n.value - phi).abs() < 1e-12);
        // T^{-1} = [[1, -1], [0, 1]] has the same singular values
        assert!((i.value - phi).abs() < 1e-12);
        let smallest = 1.0 / i.value;
        assert!((smallest - 1.0 / phi).abs() < 1e-12);
        assert!(n.certificate.is_exact() && i.certificate.is_exact());
    }

    #[test]
    fn exact_routes_agree() {
        let m = mat(&[&[1.0, -2.0, 0.5], &[0.3, 1.0, 1.0]]);
        let a = LinOp::new(m.clone(), NormSpec::l1(3), NormSpec::linf(2)).unwrap();
        let by_vertices = exact_op_norm(&a).unwrap();
        // the facet route: force it with a domain that has no vertex list
        let b = LinOp::new(m.clone(), NormSpec::p(3, 1.0 + 1e-12).unwrap(), NormSpec::linf(2)).unwrap();
        let by_facets = exact_op_norm(&b).unwrap();
        assert_eq!(by_facets.method, "codomain_facets");
        assert!((by_vertices.value - by_facets.value).abs() < 1e-9);
    }

    #[test]
    fn inverse_norm_routes() {
        let m = mat(&[&[2.0, 1.0], &[0.0, 1.0], &[1.0, -1.0]]);
        let lp = inv_norm(&LinOp::new(m.clone(), NormSpec::linf(2), NormSpec::l1(3)).unwrap()).unwrap();
        assert_eq!(lp.method, "facet_lp");
        let asc = inv_norm(&LinOp::new(m.clone(), NormSpec::p(2, 1e9).unwrap(), NormSpec::p(3, 1.0 + 1e-9).unwrap()).unwrap()).unwrap();
        assert_eq!(asc.certificate, Certificate::Lower);
        assert!((lp.value - asc.value).abs() < 1e-4, "{} vs {}", lp.value, asc.value);
        let qp = inv_norm(&LinOp::new(m.clone(), NormSpec::l1(2), NormSpec::l2(3)).unwrap()).unwrap();
        assert_eq!(qp.method, "facet_qp");
        let asc = inv_norm(&LinOp::new(m, NormSpec::p(2, 1.0 + 1e-9).unwrap(), NormSpec::l2(3)).unwrap()).unwrap();
        assert!((qp.value - asc.value).abs() < 1e-4);
        let flat = LinOp::new(mat(&[&[1.0, 2.0], &[2.0, 4.0]]), NormSpec::l2(2), NormSpec::l2(2)).unwrap();
        assert_eq!(inv_norm(&flat).err(), Some(MetricsError::NotInjective));
    }

    #[test]
    fn ascent_is_a_lower_bound_with_upper_companion() {
        let m = mat(&[&[1.0, 2.0], &[-1.0, 0.5]]);
        let t = LinOp::new(m, NormSpec::p(2, 3.0).unwrap(), NormSpec::p(2, 1.5).unwrap()).unwrap();
        let v = op_norm(&t).unwrap();
        assert_eq!(v.certificate, Certificate::Lower);
        let up = v.upper.unwrap();
        assert!(v.value <= up + 1e-12);
        // a grid search never beats the ascent by more than the grid error
        let mut grid = 0.0f64;
        for i in 0..20000 {
            let th = i as f64 * std::f64::consts::TAU / 20000.0;
            let x = [th.cos(), th.sin()];
            grid = grid.max(t.codomain.eval(&t.apply(&x)).unwrap() / t.domain.eval(&x).unwrap());
        }
        assert!(grid <= v.value + 1e-6);
        let again = op_norm_with(&t, &AscentOptions { jobs: 4, ..Default::default() }).unwrap();
        assert_eq!(again.value.to_bits(), v.value.to_bits());
    }

    #[test]
    fn json_round_trip() {
        let t = LinOp::new(mat(&[&[1.0, 0.0], &[0.0, 2.0], &[1.0, 1.0]]), NormSpec::l2(2), NormSpec::linf(3)).unwrap();
        assert_eq!(LinOp::parse_json(&t.to_json()).unwrap(), t);
        assert!(LinOp::parse_json(r#"{"matrix": [[1, 2]], "domain": {"dim": 3, "variant": "p", "p": 1}, "codomain": {"dim": 1, "variant": "p", "p": 1}}"#).is_err());
    }
}
