//! Least dual-norm lifts: `min { ||g||_{E*} : T^t g = f }`, which is the dual
//! norm of `f` for the pushforward norm `nu(T)`.

use argmin::core::{CostFunction, Error as ArgminError, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, DVector};

use super::lp::LinearProgram;
use super::{check_dim, dot, Certificate, LinOp, MetricValue, MetricsError, NormSpec, EXACT_TOL, LP_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct DualLift {
    pub value: MetricValue,
    /// A minimizer `g` in the codomain's dual coordinates.
    pub g: Vec<f64>,
}

pub fn dual_min_lift(t: &LinOp, f: &[f64]) -> Result<DualLift, MetricsError> {
    check_dim(t.domain.dim(), f.len())?;
    let tt = t.matrix.transpose();
    let fv = DVector::from_column_slice(f);
    let g0 = tt.clone().svd(true, true).solve(&fv, 1e-13).map_err(|e| MetricsError::Lp(e.into()))?;
    if (&tt * &g0 - &fv).norm() > 1e-9 * (1.0 + fv.norm()) {
        return Err(MetricsError::Infeasible);
    }
    let n = t.matrix.nrows();
    match &t.codomain {
        NormSpec::P { p, .. } if *p == 2.0 => {
            let g: Vec<f64> = g0.iter().copied().collect();
            let value = dot(&g, &g).sqrt();
            return Ok(DualLift { value: MetricValue::exact(value, "pseudoinverse", EXACT_TOL * value.max(1.0)), g });
        }
        NormSpec::P { p, .. } if p.is_infinite() => {
            // dual l1: split g = g+ - g-
            let mut lp = LinearProgram::minimize();
            let pos: Vec<usize> = (0..n).map(|_| lp.var(1.0, 0.0, f64::INFINITY)).collect();
            let neg: Vec<usize> = (0..n).map(|_| lp.var(1.0, 0.0, f64::INFINITY)).collect();
            for (c, &fc) in f.iter().enumerate() {
                let terms: Vec<(usize, f64)> = (0..n).flat_map(|i| [(pos[i], t.matrix[(i, c)]), (neg[i], -t.matrix[(i, c)])]).collect();
                lp.eq(&terms, fc);
            }
            let sol = lp.solve()?;
            let g = (0..n).map(|i| sol.values[pos[i]] - sol.values[neg[i]]).collect();
            return Ok(DualLift { value: MetricValue::exact(sol.objective, "l1_lp", LP_TOL), g });
        }
        _ => {}
    }
    if let Some(vertices) = t.codomain.vertices() {
        // dual norm of g is max over vertices v of v.g
        let mut lp = LinearProgram::minimize();
        let s = lp.var(1.0, 0.0, f64::INFINITY);
        let g: Vec<usize> = (0..n).map(|_| lp.free(0.0)).collect();
        for v in &vertices {
            let mut terms: Vec<(usize, f64)> = g.iter().zip(v).map(|(&gi, &vi)| (gi, vi)).collect();
            terms.push((s, -1.0));
            lp.le(&terms, 0.0);
        }
        for (c, &fc) in f.iter().enumerate() {
            let terms: Vec<(usize, f64)> = (0..n).map(|i| (g[i], t.matrix[(i, c)])).collect();
            lp.eq(&terms, fc);
        }
        let sol = lp.solve()?;
        let gv = g.iter().map(|&i| sol.values[i]).collect();
        return Ok(DualLift { value: MetricValue::exact(sol.objective, "vertex_lp", LP_TOL), g: gv });
    }
    // g = g0 + N z over the kernel of T^t
    t.codomain.dual_eval(&vec![0.0; n])?;
    let kernel = kernel_basis(&tt);
    let g0: Vec<f64> = g0.iter().copied().collect();
    let cost = LiftCost { norm: &t.codomain, g0: &g0, kernel: &kernel };
    let z0 = vec![0.0; kernel.ncols()];
    let start = cost.value(&z0);
    if kernel.ncols() == 0 {
        return Ok(DualLift { value: MetricValue::exact(start, "unique_lift", EXACT_TOL * start.max(1.0)), g: g0 });
    }
    let mut simplex = vec![z0.clone()];
    for i in 0..z0.len() {
        let mut v = z0.clone();
        v[i] += 0.1 * (1.0 + start);
        simplex.push(v);
    }
    let run = || -> Result<(f64, Vec<f64>), ArgminError> {
        let solver = NelderMead::new(simplex).with_sd_tolerance(1e-14)?;
        let res = Executor::new(LiftCost { norm: &t.codomain, g0: &g0, kernel: &kernel }, solver)
            .configure(|s| s.max_iters(2000))
            .run()?;
        let st = res.state();
        Ok((st.best_cost, st.best_param.clone().unwrap_or_default()))
    };
    let (value, z) = match run() {
        Ok((v, z)) if v < start => (v, z),
        _ => (start, z0),
    };
    let g = cost.lift(&z);
    // any feasible g gives an upper bound on the minimum
    Ok(DualLift { value: MetricValue::new(value, Certificate::Upper, "kernel_nelder_mead", 1e-9 * value.max(1.0)), g })
}

/// Orthonormal basis (columns) of the kernel of `m`.
fn kernel_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let c = m.ncols();
    let gram = m.transpose() * m;
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let cols: Vec<usize> = (0..c).filter(|&i| eig.eigenvalues[i].abs() <= 1e-12 * top).collect();
    DMatrix::from_fn(c, cols.len(), |i, j| eig.eigenvectors[(i, cols[j])])
}

struct LiftCost<'a> {
    norm: &'a NormSpec,
    g0: &'a [f64],
    kernel: &'a DMatrix<f64>,
}

impl LiftCost<'_> {
    fn lift(&self, z: &[f64]) -> Vec<f64> {
        let shift = self.kernel * DVector::from_column_slice(z);
        self.g0.iter().zip(shift.iter()).map(|(a, b)| a + b).collect()
    }

    fn value(&self, z: &[f64]) -> f64 {
        self.norm.dual_eval(&self.lift(z)).unwrap_or(f64::INFINITY)
    }
}

impl CostFunction for LiftCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, z: &Self::Param) -> Result<f64, ArgminError> {
        Ok(self.value(z))
    }
}
