//! The gap (opening) metric between subspaces.

use argmin::core::{CostFunction, Error as ArgminError, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, DVector};

use super::lp::polyhedral_distance;
use super::norm::matrix_to_rows;
use super::polytope::vertices_of;
use super::{check_dim, Certificate, MetricValue, MetricsError, NormSpec, EXACT_TOL, LP_TOL, RANK_TOL};

/// Default grid resolution for sampled gap values.
const SAMPLE_RES: usize = 64;

/// A subspace of a normed space, spanned by the columns of `basis`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceRep {
    pub ambient: NormSpec,
    pub basis: DMatrix<f64>,
}

impl SubspaceRep {
    pub fn new(ambient: NormSpec, basis: DMatrix<f64>) -> Result<Self, MetricsError> {
        check_dim(ambient.dim(), basis.nrows())?;
        if basis.ncols() == 0 {
            return Err(MetricsError::RankDeficient);
        }
        let s = basis.clone().svd(false, false).singular_values;
        if !(s.min() > RANK_TOL * s.max()) {
            return Err(MetricsError::RankDeficient);
        }
        Ok(Self { ambient, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The norm induced on coefficient vectors.
    pub fn induced(&self) -> Result<NormSpec, MetricsError> {
        NormSpec::pushforward(matrix_to_rows(&self.basis), self.ambient.clone())
    }
}

fn compatible(u: &SubspaceRep, w: &SubspaceRep) -> Result<(), MetricsError> {
    if u.ambient != w.ambient {
        return Err(MetricsError::AmbientMismatch);
    }
    if u.dim() != w.dim() {
        return Err(MetricsError::DimMismatch);
    }
    Ok(())
}

/// Hausdorff distance between `Ball(U)` and `Ball(W)` in the ambient norm.
pub fn gap_metric(u: &SubspaceRep, w: &SubspaceRep) -> Result<MetricValue, MetricsError> {
    compatible(u, w)?;
    if let Some(a) = u.ambient.euclidean_form() {
        let v = directed_euclidean(&a, &u.basis, &w.basis).max(directed_euclidean(&a, &w.basis, &u.basis));
        return Ok(MetricValue::exact(v, "principal_angles", EXACT_TOL));
    }
    if let Some(facets) = u.ambient.facets() {
        let v = directed_polyhedral(&facets, u, w)?.max(directed_polyhedral(&facets, w, u)?);
        return Ok(MetricValue::exact(v, "vertex_lp", LP_TOL));
    }
    gap_sampled(u, w, SAMPLE_RES)
}

/// Largest distance from a grid of unit vectors of each subspace to the other
/// unit ball. The grid is the surface of the cube `[-1, 1]^k` in coefficient
/// space at spacing `2 / res`, normalized; `tolerance` is the largest ambient
/// distance between neighbouring samples.
pub fn gap_sampled(u: &SubspaceRep, w: &SubspaceRep, res: usize) -> Result<MetricValue, MetricsError> {
    compatible(u, w)?;
    let res = res.max(1);
    let mut value = 0.0f64;
    let mut mesh = 0.0f64;
    for (from, to) in [(u, w), (w, u)] {
        let grid = cube_surface(from.dim(), res);
        let points: Vec<Vec<f64>> = grid
            .iter()
            .map(|c| {
                let x: Vec<f64> = (&from.basis * DVector::from_column_slice(c)).iter().copied().collect();
                let n = from.ambient.eval(&x)?;
                Ok(x.iter().map(|v| v / n).collect())
            })
            .collect::<Result<_, MetricsError>>()?;
        for (i, c) in grid.iter().enumerate() {
            value = value.max(distance_to_ball(&from.ambient, &points[i], &to.basis)?);
            for (j, d) in grid.iter().enumerate().skip(i + 1) {
                let step = c.iter().zip(d).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if step <= 2.0 / res as f64 + 1e-12 {
                    let diff: Vec<f64> = points[i].iter().zip(&points[j]).map(|(a, b)| a - b).collect();
                    mesh = mesh.max(from.ambient.eval(&diff)?);
                }
            }
        }
    }
    Ok(MetricValue::new(value, Certificate::Estimate, format!("sampled_grid_{res}"), mesh))
}

/// `sup_{x in U, ||x||_2 <= 1} dist(x, W)` after the change of variables
/// `A`: the sine of the largest principal angle.
fn directed_euclidean(a: &DMatrix<f64>, bu: &DMatrix<f64>, bw: &DMatrix<f64>) -> f64 {
    let qu = (a * bu).qr().q();
    let qw = (a * bw).qr().q();
    let resid = &qu - &qw * (qw.transpose() * &qu);
    resid.svd(false, false).singular_values.max().min(1.0)
}

fn directed_polyhedral(facets: &[Vec<f64>], from: &SubspaceRep, to: &SubspaceRep) -> Result<f64, MetricsError> {
    let k = from.dim();
    let section: Vec<Vec<f64>> = facets
        .iter()
        .map(|a| (0..k).map(|j| (0..a.len()).map(|i| a[i] * from.basis[(i, j)]).sum()).collect())
        .collect();
    let to_rows = matrix_to_rows(&to.basis);
    let mut worst = 0.0f64;
    for c in vertices_of(&section, k)? {
        let x: Vec<f64> = (&from.basis * DVector::from_column_slice(&c)).iter().copied().collect();
        worst = worst.max(polyhedral_distance(&x, facets, facets, Some(&to_rows))?.0);
    }
    Ok(worst)
}

/// `dist(x, Ball(span basis))` in `ambient`.
pub(crate) fn distance_to_ball(ambient: &NormSpec, x: &[f64], basis: &DMatrix<f64>) -> Result<f64, MetricsError> {
    if let Some(a) = ambient.euclidean_form() {
        // project in the transformed inner product, then clip radially
        let ab = &a * basis;
        let ax = &a * DVector::from_column_slice(x);
        let q = ab.qr().q();
        let proj = &q * (q.transpose() * &ax);
        let n = proj.norm();
        let nearest = if n > 1.0 { proj / n } else { proj };
        return Ok((ax - nearest).norm());
    }
    if let Some(facets) = ambient.facets() {
        return Ok(polyhedral_distance(x, &facets, &facets, Some(&matrix_to_rows(basis)))?.0);
    }
    let k = basis.ncols();
    let cost = BallDistance { ambient, x, basis };
    let lsq = basis.clone().svd(true, true).solve(&DVector::from_column_slice(x), 1e-12).map_err(|e| MetricsError::Lp(e.into()))?;
    let x0: Vec<f64> = lsq.iter().copied().collect();
    let mut simplex = vec![x0.clone()];
    for i in 0..k {
        let mut v = x0.clone();
        v[i] += 0.1;
        simplex.push(v);
    }
    let start = cost.value(&x0);
    let run = || -> Result<f64, ArgminError> {
        let solver = NelderMead::new(simplex).with_sd_tolerance(1e-14)?;
        let res = Executor::new(BallDistance { ambient, x, basis }, solver).configure(|s| s.max_iters(500)).run()?;
        Ok(res.state().best_cost)
    };
    Ok(run().map_or(start, |v| v.min(start)))
}

struct BallDistance<'a> {
    ambient: &'a NormSpec,
    x: &'a [f64],
    basis: &'a DMatrix<f64>,
}

impl BallDistance<'_> {
    fn value(&self, d: &[f64]) -> f64 {
        let y = self.basis * DVector::from_column_slice(d);
        let y: Vec<f64> = y.iter().copied().collect();
        let n = self.ambient.eval(&y).unwrap_or(f64::INFINITY).max(1.0);
        let diff: Vec<f64> = self.x.iter().zip(&y).map(|(a, b)| a - b / n).collect();
        self.ambient.eval(&diff).unwrap_or(f64::INFINITY)
    }
}

impl CostFunction for BallDistance<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, ArgminError> {
        Ok(self.value(p))
    }
}

/// Grid points of the surface of `[-1, 1]^k`, one from each `+-` pair.
fn cube_surface(k: usize, res: usize) -> Vec<Vec<f64>> {
    let ticks: Vec<f64> = (0..=res).map(|i| -1.0 + 2.0 * i as f64 / res as f64).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let c: Vec<f64> = idx.iter().map(|&i| ticks[i]).collect();
        let on_surface = c.iter().any(|v| v.abs() == 1.0);
        let first = c.iter().find(|v| **v != 0.0).copied().unwrap_or(0.0);
        if on_surface && first > 0.0 {
            out.push(c);
        }
        let mut i = 0;
        while i < k && idx[i] == res {
            idx[i] = 0;
            i += 1;
        }
        if i == k {
            return out;
        }
        idx[i] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(ambient: NormSpec, v: &[f64]) -> SubspaceRep {
        SubspaceRep::new(ambient, DMatrix::from_column_slice(v.len(), 1, v)).unwrap()
    }

    #[test]
    fn same_subspace_is_at_zero() {
        let u = SubspaceRep::new(NormSpec::linf(3), DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 2.0])).unwrap();
        let w = SubspaceRep::new(NormSpec::linf(3), DMatrix::from_row_slice(3, 2, &[2.0, 1.0, 3.0, 2.0, 2.0, 2.0])).unwrap();
        assert!(gap_metric(&u, &w).unwrap().value < 1e-9);
        assert_eq!(gap_metric(&u, &u).unwrap().value, 0.0);
    }

    #[test]
    fn lines_in_the_plane() {
        let th = std::f64::consts::PI / 6.0;
        let a = line(NormSpec::l2(2), &[1.0, 0.0]);
        let b = line(NormSpec::l2(2), &[th.cos(), th.sin()]);
        let v = gap_metric(&a, &b).unwrap();
        assert!((v.value - 0.5).abs() < 1e-12);
        let s = gap_sampled(&a, &b, 8).unwrap();
        assert!((s.value - 0.5).abs() < 1e-12);
        let x = line(NormSpec::l1(2), &[1.0, 0.0]);
        let y = line(NormSpec::l1(2), &[0.0, 1.0]);
        assert!((gap_metric(&x, &y).unwrap().value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn errors() {
        let a = line(NormSpec::l2(2), &[1.0, 0.0]);
        let b = line(NormSpec::l1(2), &[1.0, 0.0]);
        assert_eq!(gap_metric(&a, &b).err(), Some(MetricsError::AmbientMismatch));
        let plane = SubspaceRep::new(NormSpec::l2(2), DMatrix::identity(2, 2)).unwrap();
        assert_eq!(gap_metric(&a, &plane).err(), Some(MetricsError::DimMismatch));
        assert_eq!(
            SubspaceRep::new(NormSpec::l2(2), DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0])).err(),
            Some(MetricsError::RankDeficient)
        );
    }

    #[test]
    fn sampling_tracks_exact_values() {
        let amb = NormSpec::linf(3);
        let u = SubspaceRep::new(amb.clone(), DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.3, 0.2])).unwrap();
        let w = SubspaceRep::new(amb, DMatrix::from_row_slice(3, 2, &[1.0, 0.1, 0.0, 1.0, -0.2, 0.4])).unwrap();
        let exact = gap_metric(&u, &w).unwrap();
        let sampled = gap_sampled(&u, &w, 40).unwrap();
        assert!(sampled.value <= exact.value + 1e-9);
        assert!(exact.value <= sampled.value + sampled.tolerance + 1e-9);
        // non-polyhedral, non-Euclidean ambient goes through sampling
        let amb = NormSpec::p(3, 3.0).unwrap();
        let u = SubspaceRep::new(amb.clone(), u.basis.clone()).unwrap();
        let w = SubspaceRep::new(amb, w.basis.clone()).unwrap();
        let v = gap_metric(&u, &w).unwrap();
        assert_eq!(v.certificate, Certificate::Estimate);
        assert!(v.value > 0.0 && v.value < 1.0);
    }
}
