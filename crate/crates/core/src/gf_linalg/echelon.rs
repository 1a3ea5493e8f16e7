//! Echelon forms and the factor maps built from them.
//!
//! Conventions: a matrix is in RREF when its nonzero rows come first, each
//! nonzero row has leading entry 1, leading entries move strictly right, and
//! every pivot column is a unit vector. RCEF means the transpose is in RREF.

use super::{FFMatrix, GLMatrix, GfError};

/// Result of Gauss–Jordan elimination: `u * a == r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub r: FFMatrix,
    pub u: GLMatrix,
    pub rank: usize,
    /// Pivot column of each nonzero row, strictly increasing.
    pub pivots: Vec<usize>,
}

/// Gauss–Jordan elimination with leftmost-pivot selection.
pub fn rank_and_rref(a: &FFMatrix) -> Rref {
    let field = a.field();
    let (rows, cols) = a.shape();
    let mut r = a.clone();
    let mut u = FFMatrix::identity(field, rows);
    let mut pivots = Vec::new();
    let mut next = 0usize;
    for c in 0..cols {
        if next == rows {
            break;
        }
        let Some(pr) = (next..rows).find(|&i| r.get(i, c) != 0) else {
            continue;
        };
        if pr != next {
            swap_rows(&mut r, pr, next);
            swap_rows(&mut u, pr, next);
        }
        let inv = field.inv(r.get(next, c)).expect("pivot is nonzero");
        scale_row(&mut r, next, inv);
        scale_row(&mut u, next, inv);
        for i in 0..rows {
            if i != next {
                let factor = r.get(i, c);
                if factor != 0 {
                    axpy_row(&mut r, i, next, field.neg(factor));
                    axpy_row(&mut u, i, next, field.neg(factor));
                }
            }
        }
        pivots.push(c);
        next += 1;
    }
    Rref {
        r,
        u: GLMatrix::from_trusted(u),
        rank: pivots.len(),
        pivots,
    }
}

fn swap_rows(m: &mut FFMatrix, a: usize, b: usize) {
    for j in 0..m.cols() {
        let (x, y) = (m.get(a, j), m.get(b, j));
        m.set(a, j, y);
        m.set(b, j, x);
    }
}

fn scale_row(m: &mut FFMatrix, i: usize, s: u32) {
    let f = m.field();
    for j in 0..m.cols() {
        let v = f.mul(m.get(i, j), s);
        m.set(i, j, v);
    }
}

/// row[dst] += s * row[src]
fn axpy_row(m: &mut FFMatrix, dst: usize, src: usize, s: u32) {
    let f = m.field();
    for j in 0..m.cols() {
        let v = f.add(m.get(dst, j), f.mul(s, m.get(src, j)));
        m.set(dst, j, v);
    }
}

/// Pivot columns if `a` is in RREF, `None` otherwise.
pub fn rref_pivots(a: &FFMatrix) -> Option<Vec<usize>> {
    let (rows, cols) = a.shape();
    let mut pivots: Vec<usize> = Vec::new();
    let mut seen_zero_row = false;
    for i in 0..rows {
        match a.row(i).iter().position(|&x| x != 0) {
            None => seen_zero_row = true,
            Some(lead) => {
                if seen_zero_row || a.get(i, lead) != 1 {
                    return None;
                }
                if pivots.last().is_some_and(|&prev| prev >= lead) {
                    return None;
                }
                pivots.push(lead);
            }
        }
    }
    for (i, &c) in pivots.iter().enumerate() {
        if (0..rows).any(|l| l != i && a.get(l, c) != 0) {
            return None;
        }
    }
    debug_assert!(pivots.iter().all(|&c| c < cols));
    Some(pivots)
}

pub fn is_rref(a: &FFMatrix) -> bool {
    rref_pivots(a).is_some()
}

pub fn is_rcef(a: &FFMatrix) -> bool {
    is_rref(&a.transpose())
}

/// The 0/1 right inverse of a full-row-rank RREF matrix: a `cols x rows`
/// matrix with ones at `(pivot_i, i)`.
pub fn pivot_right_inverse(a: &FFMatrix) -> Result<FFMatrix, GfError> {
    let pivots = rref_pivots(a).ok_or(GfError::NotRref)?;
    if pivots.len() != a.rows() {
        return Err(GfError::RankDeficient {
            rank: pivots.len(),
            expected: a.rows(),
        });
    }
    let mut ia = FFMatrix::zeros(a.field(), a.cols(), a.rows());
    for (i, &j) in pivots.iter().enumerate() {
        ia.set(j, i, 1);
    }
    Ok(ia)
}

/// Column-echelon decomposition of a full-column-rank matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RcefDecomposition {
    /// `a * tau`, in RCEF.
    pub r: FFMatrix,
    /// The unique invertible matrix with `a * tau` in RCEF.
    pub tau: GLMatrix,
    /// Right inverse of `r^t` built from its pivot positions.
    pub ia: FFMatrix,
}

pub fn rcef_decompose(a: &FFMatrix) -> Result<RcefDecomposition, GfError> {
    let rr = rank_and_rref(&a.transpose());
    if rr.rank < a.cols() {
        return Err(GfError::RankDeficient {
            rank: rr.rank,
            expected: a.cols(),
        });
    }
    // U a^t = R^t  <=>  a U^t = R
    let r = rr.r.transpose();
    let tau = rr.u.transpose();
    let ia = pivot_right_inverse(&rr.r)?;
    Ok(RcefDecomposition { r, tau, ia })
}

/// `tau(a)`: the unique invertible matrix making `a * tau(a)` RCEF.
pub fn tau(a: &FFMatrix) -> Result<GLMatrix, GfError> {
    Ok(rcef_decompose(a)?.tau)
}

/// `a = b * c` with `b` of full column rank and `c` of full row rank.
///
/// `b` collects the pivot columns of `a`, `c` the nonzero rows of its RREF.
pub fn full_rank_decomposition(a: &FFMatrix) -> Result<(FFMatrix, FFMatrix), GfError> {
    let rr = rank_and_rref(a);
    if rr.rank == 0 {
        return Err(GfError::ZeroMatrix);
    }
    let b = a.select_columns(&rr.pivots);
    let c = rr.r.top_rows(rr.rank);
    Ok((b, c))
}

/// `tau2(a)` for a square matrix of rank `k >= 1`: the unique `Gamma` in
/// `GL(F^k)` with `a = a0 * Gamma * a1^t` for `a0`, `a1` of rank `k` in RCEF.
pub fn tau2(a: &FFMatrix) -> Result<GLMatrix, GfError> {
    if !a.is_square() {
        return Err(GfError::Shape(format!("tau2 needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let (b, c) = full_rank_decomposition(a)?;
    tau2_from_decomposition(&b, &c)
}

/// `tau2` computed from a caller-supplied full rank decomposition `a = b * c`.
///
/// With `b * tau_b = r_b` and `c^t * tau_c = r_c` both RCEF,
/// `a = r_b * (tau_b^-1 * tau_c^-t) * r_c^t`.
pub fn tau2_from_decomposition(b: &FFMatrix, c: &FFMatrix) -> Result<GLMatrix, GfError> {
    if b.cols() != c.rows() {
        return Err(GfError::Shape("decomposition factors do not compose".into()));
    }
    let tb = rcef_decompose(b)?.tau;
    let tc = rcef_decompose(&c.transpose())?.tau;
    Ok(tb.inverse().mul(&tc.inverse().transpose()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf_linalg::PrimeField;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn m(p: u32, rows: &[Vec<i64>]) -> FFMatrix {
        FFMatrix::from_rows(f(p), rows).unwrap()
    }

    fn f5_example() -> FFMatrix {
        m(5, &[vec![1, 2, 0, 3, 0, 1], vec![0, 0, 1, 4, 0, 2], vec![0, 0, 0, 0, 1, 3]])
    }

    #[test]
    fn f5_example_is_its_own_rref() {
        let a = f5_example();
        let rr = rank_and_rref(&a);
        assert!(is_rref(&a));
        assert_eq!(rr.rank, 3);
        assert_eq!(rr.r, a);
        assert_eq!(rr.u, GLMatrix::identity(f(5), 3));
        assert_eq!(rr.pivots, vec![0, 2, 4]);
    }

    #[test]
    fn identity_case() {
        let id = FFMatrix::identity(f(2), 3);
        let rr = rank_and_rref(&id);
        assert_eq!((rr.r, rr.u.into_matrix(), rr.rank), (id.clone(), id, 3));
    }

    #[test]
    fn rref_rejects_non_unit_pivot_columns() {
        assert!(!is_rref(&m(3, &[vec![1, 1], vec![0, 1]])));
        assert!(!is_rref(&m(3, &[vec![0, 0], vec![0, 1]])));
        assert!(!is_rref(&m(3, &[vec![2, 0], vec![0, 1]])));
        assert!(is_rref(&m(3, &[vec![1, 2, 0], vec![0, 0, 1]])));
    }

    #[test]
    fn small_rcef_example_over_f2() {
        let a = m(2, &[vec![1, 1], vec![1, 0], vec![0, 1]]);
        let d = rcef_decompose(&a).unwrap();
        assert_eq!(d.r, m(2, &[vec![1, 0], vec![0, 1], vec![1, 1]]));
        assert_eq!(d.tau.as_matrix(), &m(2, &[vec![0, 1], vec![1, 1]]));
    }

    #[test]
    fn rank_deficient_rcef_is_an_error() {
        let a = m(2, &[vec![1, 1], vec![1, 1]]);
        assert!(matches!(rcef_decompose(&a), Err(GfError::RankDeficient { rank: 1, expected: 2 })));
    }

    #[test]
    fn full_rank_decomposition_cases() {
        let inv = m(5, &[vec![2, 1], vec![1, 1]]);
        let (b, c) = full_rank_decomposition(&inv).unwrap();
        assert_eq!(b, inv);
        assert_eq!(c, FFMatrix::identity(f(5), 2));

        let ones = m(2, &[vec![1, 1], vec![1, 1]]);
        let (b, c) = full_rank_decomposition(&ones).unwrap();
        assert_eq!(b, m(2, &[vec![1], vec![1]]));
        assert_eq!(c, m(2, &[vec![1, 1]]));
        assert_eq!(b.mul(&c).unwrap(), ones);

        assert!(matches!(full_rank_decomposition(&FFMatrix::zeros(f(3), 2, 2)), Err(GfError::ZeroMatrix)));
    }

    #[test]
    fn tau2_of_invertible_is_itself() {
        let a = m(3, &[vec![2, 1, 0], vec![0, 1, 1], vec![1, 0, 2]]);
        assert_eq!(a.rank(), 3);
        assert_eq!(tau2(&a).unwrap().as_matrix(), &a);
    }
}
