use std::cmp::Ordering;

use crate::gf_linalg::{pivot_right_inverse, FFMatrix, PrimeField};

use super::CombinatError;

/// Compares two vectors of `F^k` antilexicographically: the highest index
/// that differs decides, using the field order `0 < 1 < ... < p-1`.
pub fn antilex_cmp(v: &[u32], w: &[u32]) -> Result<Ordering, CombinatError> {
    if v.len() != w.len() {
        return Err(CombinatError::DimensionMismatch(v.len(), w.len()));
    }
    Ok(v.iter().rev().cmp(w.iter().rev()))
}

/// `(F^k, <_alex)` as an explicitly indexed linear order.
///
/// The vector of rank `i` has coordinate `j` equal to the `j`-th base-`p`
/// digit of `i`, so rank order and antilexicographic order coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AntilexOrder {
    field: PrimeField,
    dim: usize,
}

impl AntilexOrder {
    pub fn new(field: PrimeField, dim: usize) -> Self {
        Self { field, dim }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `p^dim`, or `None` if it overflows `usize`.
    pub fn size(&self) -> Option<usize> {
        (self.field.order() as usize).checked_pow(self.dim as u32)
    }

    pub fn rank(&self, v: &[u32]) -> usize {
        debug_assert_eq!(v.len(), self.dim);
        let p = self.field.order() as usize;
        v.iter().rev().fold(0usize, |acc, &x| acc * p + x as usize)
    }

    pub fn unrank(&self, mut idx: usize) -> Vec<u32> {
        let p = self.field.order() as usize;
        let mut v = Vec::with_capacity(self.dim);
        for _ in 0..self.dim {
            v.push((idx % p) as u32);
            idx /= p;
        }
        v
    }

    /// All of `F^k`, ascending.
    pub fn iter(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.size().expect("antilex order too large to enumerate")).map(move |i| self.unrank(i))
    }
}

/// The antilexicographically least `x` with `a * x = w`, for `a` in RREF with
/// full row rank. This is the pivot spread `I_A * w`.
pub fn min_preimage(a: &FFMatrix, w: &[u32]) -> Result<Vec<u32>, CombinatError> {
    if w.len() != a.rows() {
        return Err(CombinatError::DimensionMismatch(w.len(), a.rows()));
    }
    let ia = pivot_right_inverse(a).map_err(|_| CombinatError::NotRref)?;
    Ok(ia.apply(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn equal_vectors_compare_equal() {
        assert_eq!(antilex_cmp(&[1, 2, 0], &[1, 2, 0]).unwrap(), Ordering::Equal);
        assert!(antilex_cmp(&[1], &[1, 0]).is_err());
    }

    #[test]
    fn f2_squared_ascending() {
        let mut all: Vec<Vec<u32>> = vec![vec![1, 1], vec![0, 1], vec![1, 0], vec![0, 0]];
        all.sort_by(|a, b| antilex_cmp(a, b).unwrap());
        assert_eq!(all, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        // u_0 is the second element
        assert_eq!(all[1], vec![1, 0]);
        let order = AntilexOrder::new(f(2), 2);
        assert_eq!(order.iter().collect::<Vec<_>>(), all);
    }

    #[test]
    fn f3_squared_prefix() {
        let order = AntilexOrder::new(f(3), 2);
        let first: Vec<Vec<u32>> = order.iter().take(4).collect();
        assert_eq!(first, vec![vec![0, 0], vec![1, 0], vec![2, 0], vec![0, 1]]);
    }

    #[test]
    fn rank_matches_comparison() {
        let order = AntilexOrder::new(f(3), 3);
        let all: Vec<Vec<u32>> = order.iter().collect();
        for (i, v) in all.iter().enumerate() {
            assert_eq!(order.rank(v), i);
            if i > 0 {
                assert_eq!(antilex_cmp(&all[i - 1], v).unwrap(), Ordering::Less);
            }
        }
    }

    #[test]
    fn spread_of_the_f5_example() {
        let a = FFMatrix::from_rows(
            f(5),
            &[vec![1, 2, 0, 3, 0, 1], vec![0, 0, 1, 4, 0, 2], vec![0, 0, 0, 0, 1, 3]],
        )
        .unwrap();
        assert_eq!(min_preimage(&a, &[1, 2, 3]).unwrap(), vec![1, 0, 2, 0, 3, 0]);
        assert_eq!(min_preimage(&a, &[0, 0, 0]).unwrap(), vec![0; 6]);
    }

    #[test]
    fn min_preimage_requires_rref() {
        let a = FFMatrix::from_rows(f(2), &[vec![1, 1], vec![1, 0]]).unwrap();
        assert!(matches!(min_preimage(&a, &[1, 0]), Err(CombinatError::NotRref)));
    }

    #[test]
    fn min_preimage_matches_exhaustive_scan_over_f2() {
        let a = FFMatrix::from_rows(f(2), &[vec![1, 1, 0, 1], vec![0, 0, 1, 1]]).unwrap();
        let dom = AntilexOrder::new(f(2), 4);
        for w in AntilexOrder::new(f(2), 2).iter() {
            // first preimage in ascending antilex order is the minimum
            let brute = dom.iter().find(|x| a.apply(x) == w).unwrap();
            assert_eq!(min_preimage(&a, &w).unwrap(), brute);
        }
    }
}
