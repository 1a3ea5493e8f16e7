use std::cmp::Ordering;

use crate::gf_linalg::{FFMatrix, PrimeField};

use super::rigid::EpiEnumerator;
use super::CombinatError;

/// An `n x k` 0/1 matrix over `F_2` whose columns are the indicator vectors
/// of a partition of the row set into `k` blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanMatrix {
    assign: Vec<usize>,
    k: usize,
}

fn f2() -> PrimeField {
    PrimeField::new(2).expect("2 is prime")
}

impl BooleanMatrix {
    pub fn new(m: &FFMatrix) -> Result<Self, CombinatError> {
        if m.field().order() != 2 {
            return Err(CombinatError::NotBooleanPartition("matrix is not over F_2".into()));
        }
        let mut assign = Vec::with_capacity(m.rows());
        for i in 0..m.rows() {
            let ones: Vec<usize> = (0..m.cols()).filter(|&j| m.get(i, j) == 1).collect();
            if ones.len() != 1 {
                return Err(CombinatError::NotBooleanPartition(format!("row {i} has {} ones", ones.len())));
            }
            assign.push(ones[0]);
        }
        Self::from_assignment(m.cols(), assign)
    }

    /// Row `i` gets its single 1 in column `assign[i]`.
    pub fn from_assignment(k: usize, assign: Vec<usize>) -> Result<Self, CombinatError> {
        let mut hit = vec![false; k];
        for &c in &assign {
            if c >= k {
                return Err(CombinatError::NotBooleanPartition(format!("column {c} out of range")));
            }
            hit[c] = true;
        }
        if let Some(j) = hit.iter().position(|h| !h) {
            return Err(CombinatError::NotBooleanPartition(format!("column {j} is zero")));
        }
        Ok(Self { assign, k })
    }

    pub fn rows(&self) -> usize {
        self.assign.len()
    }

    pub fn cols(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    pub fn to_matrix(&self) -> FFMatrix {
        let mut m = FFMatrix::zeros(f2(), self.assign.len(), self.k);
        for (i, &c) in self.assign.iter().enumerate() {
            m.set(i, c, 1);
        }
        m
    }

    fn column_minima(&self) -> Vec<usize> {
        let mut mins = vec![usize::MAX; self.k];
        for (i, &c) in self.assign.iter().enumerate() {
            mins[c] = mins[c].min(i);
        }
        mins
    }

    /// Column minima strictly increasing.
    pub fn is_oba(&self) -> bool {
        self.column_minima().windows(2).all(|w| w[0] < w[1])
    }
}

/// The `k x k` permutation matrix `P` with `P[perm[j]][j] = 1`, so that
/// `(A P)` has column `j` equal to column `perm[j]` of `A`.
pub fn permutation_matrix(perm: &[usize]) -> FFMatrix {
    let k = perm.len();
    let mut p = FFMatrix::zeros(f2(), k, k);
    for (j, &i) in perm.iter().enumerate() {
        p.set(i, j, 1);
    }
    p
}

/// `A = A_ord * P(sigma)` with `A_ord` ordered; `sigma[j]` is the position
/// of column `j` of `A` once columns are sorted by their minima.
pub fn pi_factor(a: &BooleanMatrix) -> (BooleanMatrix, Vec<usize>) {
    let mins = a.column_minima();
    let mut by_min: Vec<usize> = (0..a.k).collect();
    by_min.sort_by_key(|&j| mins[j]);
    let mut sigma = vec![0; a.k];
    for (pos, &j) in by_min.iter().enumerate() {
        sigma[j] = pos;
    }
    let assign = a.assign.iter().map(|&c| sigma[c]).collect();
    (BooleanMatrix { assign, k: a.k }, sigma)
}

/// All of `M^ba_{n,k}`, ordered by assignment vector (lexicographic).
pub fn enumerate_ba(n: usize, k: usize) -> Result<Vec<BooleanMatrix>, CombinatError> {
    if k > n {
        return Err(CombinatError::TooSmallDomain { n, s: k });
    }
    let total = k.checked_pow(n as u32).ok_or(CombinatError::TooLarge)?;
    let mut out = Vec::new();
    for mut c in 0..total {
        let mut assign = vec![0; n];
        for x in assign.iter_mut().rev() {
            *x = c % k;
            c /= k;
        }
        if let Ok(b) = BooleanMatrix::from_assignment(k, assign) {
            out.push(b);
        }
    }
    Ok(out)
}

/// All of `M^oba_{n,k}`: assignments are exactly the restricted-growth
/// strings with `k` symbols.
pub fn enumerate_oba(n: usize, k: usize) -> Result<Vec<BooleanMatrix>, CombinatError> {
    let e = EpiEnumerator::new(n, k)?;
    Ok(e.iter().map(|assign| BooleanMatrix { assign, k }).collect())
}

/// Canonical order on `P(k)` (subsets as bitmasks): `s < t` iff the least
/// element of the symmetric difference belongs to `s`.
pub fn bool_alg_cmp(s: u64, t: u64) -> Ordering {
    let d = s ^ t;
    if d == 0 {
        Ordering::Equal
    } else if s & (d & d.wrapping_neg()) != 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oba_has_identity_factor() {
        let a = BooleanMatrix::from_assignment(3, vec![0, 1, 0, 2]).unwrap();
        assert!(a.is_oba());
        let (ord, sigma) = pi_factor(&a);
        assert_eq!(ord, a);
        assert_eq!(sigma, vec![0, 1, 2]);
    }

    #[test]
    fn swapped_columns() {
        let a = BooleanMatrix::new(&FFMatrix::from_rows(f2(), &[vec![0, 1], vec![1, 0]]).unwrap()).unwrap();
        let (ord, sigma) = pi_factor(&a);
        assert_eq!(sigma, vec![1, 0]);
        assert_eq!(ord.to_matrix(), FFMatrix::identity(f2(), 2));
        assert_eq!(ord.to_matrix().mul(&permutation_matrix(&sigma)).unwrap(), a.to_matrix());
    }

    #[test]
    fn rejects_non_partitions() {
        let two_ones = FFMatrix::from_rows(f2(), &[vec![1, 1], vec![0, 1]]).unwrap();
        assert!(BooleanMatrix::new(&two_ones).is_err());
        let zero_col = FFMatrix::from_rows(f2(), &[vec![1, 0], vec![1, 0]]).unwrap();
        assert!(BooleanMatrix::new(&zero_col).is_err());
    }

    #[test]
    fn ba_is_oba_times_symmetric_group() {
        let fact = |k: usize| (1..=k).product::<usize>();
        for n in 1..=6 {
            for k in 1..=n.min(3) {
                let ba = enumerate_ba(n, k).unwrap();
                let oba = enumerate_oba(n, k).unwrap();
                assert_eq!(ba.len(), oba.len() * fact(k));
                let mut seen = std::collections::BTreeSet::new();
                for a in &ba {
                    let (ord, sigma) = pi_factor(a);
                    assert!(ord.is_oba());
                    assert_eq!(ord.to_matrix().mul(&permutation_matrix(&sigma)).unwrap(), a.to_matrix());
                    assert!(seen.insert((ord.assignment().to_vec(), sigma)));
                }
                assert!(oba.iter().all(|b| b.is_oba()));
            }
        }
    }

    #[test]
    fn boolean_algebra_order_is_total() {
        for k in 0..=5u32 {
            let all: Vec<u64> = (0..1u64 << k).collect();
            for &a in &all {
                for &b in &all {
                    assert_eq!(bool_alg_cmp(a, b), bool_alg_cmp(b, a).reverse());
                    for &c in &all {
                        if bool_alg_cmp(a, b) == Ordering::Less && bool_alg_cmp(b, c) == Ordering::Less {
                            assert_eq!(bool_alg_cmp(a, c), Ordering::Less);
                        }
                    }
                }
            }
        }
        assert_eq!(bool_alg_cmp(0b1, 0b0), Ordering::Less);
    }
}
