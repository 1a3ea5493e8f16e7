//! Thin layer over `microlp`.

use microlp::{ComparisonOp, Error as LpError, OptimizationDirection, Problem, SolveOutcome, Variable};

use super::MetricsError;

pub(crate) struct LinearProgram {
    problem: Problem,
    vars: Vec<Variable>,
}

pub(crate) struct LpSolution {
    pub objective: f64,
    pub values: Vec<f64>,
}

impl LinearProgram {
    pub fn minimize() -> Self {
        Self { problem: Problem::new(OptimizationDirection::Minimize), vars: Vec::new() }
    }

    /// Adds a variable with objective coefficient `obj`; bounds may be infinite.
    pub fn var(&mut self, obj: f64, lo: f64, hi: f64) -> usize {
        self.vars.push(self.problem.add_var(obj, (lo, hi)));
        self.vars.len() - 1
    }

    pub fn free(&mut self, obj: f64) -> usize {
        self.var(obj, f64::NEG_INFINITY, f64::INFINITY)
    }

    fn add(&mut self, terms: &[(usize, f64)], op: ComparisonOp, rhs: f64) {
        let expr: Vec<(Variable, f64)> = terms.iter().filter(|(_, c)| *c != 0.0).map(|&(v, c)| (self.vars[v], c)).collect();
        self.problem.add_constraint(expr.as_slice(), op, rhs);
    }

    pub fn le(&mut self, terms: &[(usize, f64)], rhs: f64) {
        self.add(terms, ComparisonOp::Le, rhs)
    }

    pub fn eq(&mut self, terms: &[(usize, f64)], rhs: f64) {
        self.add(terms, ComparisonOp::Eq, rhs)
    }

    pub fn solve(self) -> Result<LpSolution, MetricsError> {
        match self.problem.solve() {
            Ok(SolveOutcome::Solution(sol)) => {
                let values = self.vars.iter().map(|&v| sol[v]).collect();
                Ok(LpSolution { objective: sol.objective(), values })
            }
            Ok(SolveOutcome::Interrupted(_)) => Err(MetricsError::Lp("solver interrupted".into())),
            Err(LpError::Infeasible) => Err(MetricsError::Infeasible),
            Err(e) => Err(MetricsError::Lp(e.to_string())),
        }
    }
}

/// Distance, in the norm whose unit ball is `{z : c.z <= 1 for c in measure}`,
/// from `point` to the polytope `{M d : b.(M d) <= 1 for b in ball}`. `map` is
/// the `n x k` matrix `M` given by rows (identity when `None`). Returns the
/// distance and a nearest point.
pub(crate) fn polyhedral_distance(
    point: &[f64],
    measure: &[Vec<f64>],
    ball: &[Vec<f64>],
    map: Option<&[Vec<f64>]>,
) -> Result<(f64, Vec<f64>), MetricsError> {
    let n = point.len();
    let k = map.map_or(n, |m| m.first().map_or(0, Vec::len));
    let image = |d: &[f64]| -> Vec<f64> {
        match map {
            Some(m) => m.iter().map(|row| super::dot(row, d)).collect(),
            None => d.to_vec(),
        }
    };
    // coefficients of a functional pulled back through M
    let pull = |c: &[f64]| -> Vec<f64> {
        match map {
            Some(m) => (0..k).map(|j| (0..n).map(|i| c[i] * m[i][j]).sum()).collect(),
            None => c.to_vec(),
        }
    };
    let mut lp = LinearProgram::minimize();
    let t = lp.var(1.0, 0.0, f64::INFINITY);
    let d: Vec<usize> = (0..k).map(|_| lp.free(0.0)).collect();
    for c in measure {
        // c.(p - M d) <= t
        let pc = pull(c);
        let mut terms: Vec<(usize, f64)> = d.iter().zip(&pc).map(|(&v, &a)| (v, -a)).collect();
        terms.push((t, -1.0));
        lp.le(&terms, -super::dot(c, point));
    }
    for b in ball {
        let pb = pull(b);
        let terms: Vec<(usize, f64)> = d.iter().zip(&pb).map(|(&v, &a)| (v, a)).collect();
        lp.le(&terms, 1.0);
    }
    let sol = lp.solve()?;
    let coeffs: Vec<f64> = d.iter().map(|&v| sol.values[v]).collect();
    Ok((sol.objective.max(0.0), image(&coeffs)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l1_facets() -> Vec<Vec<f64>> {
        vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]
    }

    fn linf_facets() -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]
    }

    #[test]
    fn small_lp() {
        // min x + y, x >= 1, y >= 2
        let mut lp = LinearProgram::minimize();
        let x = lp.var(1.0, 1.0, f64::INFINITY);
        let y = lp.free(1.0);
        lp.le(&[(y, -1.0)], -2.0);
        let sol = lp.solve().unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-12);
        assert!((sol.values[x] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_is_reported() {
        let mut lp = LinearProgram::minimize();
        let x = lp.free(1.0);
        lp.le(&[(x, 1.0)], -1.0);
        lp.le(&[(x, -1.0)], -1.0);
        assert_eq!(lp.solve().err(), Some(MetricsError::Infeasible));
    }

    #[test]
    fn corner_to_cross_polytope() {
        // (1,1) to the l1 ball, measured in l1
        let (d, y) = polyhedral_distance(&[1.0, 1.0], &l1_facets(), &l1_facets(), None).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        assert!(y.iter().map(|v| v.abs()).sum::<f64>() <= 1.0 + 1e-9);
        // e0 to the line spanned by e1 (unit l1 segment), measured in l1
        let line = [vec![0.0], vec![1.0]];
        let (d, _) = polyhedral_distance(&[1.0, 0.0], &l1_facets(), &l1_facets(), Some(&line)).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        let (d, _) = polyhedral_distance(&[0.5, 0.5], &linf_facets(), &l1_facets(), None).unwrap();
        assert!(d.abs() < 1e-9);
    }
}
