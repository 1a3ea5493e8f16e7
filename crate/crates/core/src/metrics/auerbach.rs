//! Auerbach bases by determinant maximization over the unit ball.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MetricsError, NormSpec};

/// Slack allowed on the dual norms of the biorthogonal functionals.
pub const AUERBACH_TOL: f64 = 1e-6;
const MAX_DIM: usize = 6;
const SWEEPS: usize = 500;

#[derive(Clone, Debug, PartialEq)]
pub struct AuerbachBasis {
    /// `x_j`, each of norm one.
    pub basis: Vec<Vec<f64>>,
    /// Biorthogonal functionals `x_j^*` with `x_i^*(x_j) = delta_ij`.
    pub functionals: Vec<Vec<f64>>,
    pub det: f64,
    /// `max_j ||x_j^*||_*`.
    pub max_functional_norm: f64,
}

impl AuerbachBasis {
    /// Columns are the basis vectors.
    pub fn matrix(&self) -> DMatrix<f64> {
        let k = self.basis.len();
        DMatrix::from_fn(k, k, |i, j| self.basis[j][i])
    }
}

/// Coordinate ascent on `|det(x_0, .., x_{k-1})|` with `x_j` in the ball:
/// replacing column `j` by `y` scales the determinant by `(X^{-1} y)_j`, so
/// the best `y` is the support point of row `j` of `X^{-1}`. Start 0 is the
/// normalized standard basis; the others are seeded random matrices. The
/// first start whose functionals certify is returned.
pub fn auerbach_basis(spec: &NormSpec, starts: usize, seed: u64) -> Result<AuerbachBasis, MetricsError> {
    let k = spec.dim();
    if k == 0 || k > MAX_DIM {
        return Err(MetricsError::InvalidNorm(format!("auerbach bases need 1 <= dim <= {MAX_DIM}")));
    }
    let mut worst = f64::INFINITY;
    for s in 0..starts.max(1) {
        let start = if s == 0 {
            DMatrix::identity(k, k)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0))
        };
        let Some(x) = climb(spec, normalize(spec, start)?)? else {
            continue;
        };
        let inv = x.clone().try_inverse().ok_or(MetricsError::RankDeficient)?;
        let mut max_functional_norm = 0.0f64;
        for r in 0..k {
            let row: Vec<f64> = inv.row(r).iter().copied().collect();
            max_functional_norm = max_functional_norm.max(spec.dual_eval(&row)?);
        }
        if max_functional_norm <= 1.0 + AUERBACH_TOL {
            return Ok(AuerbachBasis {
                basis: (0..k).map(|j| x.column(j).iter().copied().collect()).collect(),
                functionals: (0..k).map(|r| inv.row(r).iter().copied().collect()).collect(),
                det: x.determinant(),
                max_functional_norm,
            });
        }
        worst = worst.min(max_functional_norm);
    }
    Err(MetricsError::BudgetExhausted(format!("best functional norm {worst} after {starts} starts")))
}

fn normalize(spec: &NormSpec, mut x: DMatrix<f64>) -> Result<DMatrix<f64>, MetricsError> {
    for j in 0..x.ncols() {
        let col: Vec<f64> = x.column(j).iter().copied().collect();
        let n = spec.eval(&col)?;
        if n == 0.0 {
            return Err(MetricsError::RankDeficient);
        }
        x.column_mut(j).scale_mut(1.0 / n);
    }
    Ok(x)
}

fn climb(spec: &NormSpec, mut x: DMatrix<f64>) -> Result<Option<DMatrix<f64>>, MetricsError> {
    let k = x.ncols();
    if x.determinant().abs() < 1e-12 {
        return Ok(None);
    }
    for _ in 0..SWEEPS {
        let mut moved = false;
        for j in 0..k {
            let Some(inv) = x.clone().try_inverse() else {
                return Ok(None);
            };
            let row: Vec<f64> = inv.row(j).iter().copied().collect();
            let y = spec.support(&row)?;
            let gain: f64 = row.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>().abs();
            if gain > 1.0 + 1e-12 {
                // keep unit norm exactly
                let n = spec.eval(&y)?;
                x.set_column(j, &DVector::from_iterator(k, y.iter().map(|v| v / n)));
                moved = true;
            }
        }
        if !moved {
            return Ok(Some(x));
        }
    }
    Ok(Some(x))
}
