//! Integer codes for small matrices.
//!
//! A matrix is read in row-major order and entry `i` contributes
//! `entry * p^i`: the first entry is the least significant digit. Codes are
//! therefore portable across runs and machines, and "least" structures
//! (witness tie-breaking, coloring tables) are compared by code.

use super::{FFMatrix, GfError, PrimeField};

/// Base-`p` row-major code of `a`.
pub fn mat_encode(a: &FFMatrix) -> Result<u64, GfError> {
    encode_digits(a.entries(), a.field().order() as u64)
}

pub fn mat_decode(code: u64, rows: usize, cols: usize, field: PrimeField) -> Result<FFMatrix, GfError> {
    let p = field.order() as u64;
    let n = rows * cols;
    check_width(p, n)?;
    let mut rest = code;
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        data.push((rest % p) as u32);
        rest /= p;
    }
    if rest != 0 {
        return Err(GfError::Overflow(format!(
            "code {code} exceeds the range of {rows}x{cols} matrices over GF({p})"
        )));
    }
    FFMatrix::from_residues(field, rows, cols, data)
}

/// Number of distinct codes for `rows x cols` matrices, if it fits in `u64`.
pub fn code_space(field: PrimeField, rows: usize, cols: usize) -> Option<u64> {
    (field.order() as u64).checked_pow(u32::try_from(rows * cols).ok()?)
}

/// Base-`base` code of a digit string, first digit least significant.
pub(crate) fn encode_digits(digits: &[u32], base: u64) -> Result<u64, GfError> {
    check_width(base, digits.len())?;
    let mut code = 0u64;
    for &d in digits.iter().rev() {
        code = code * base + d as u64;
    }
    Ok(code)
}

fn check_width(base: u64, len: usize) -> Result<(), GfError> {
    let fits = u32::try_from(len)
        .ok()
        .and_then(|l| (base as u128).checked_pow(l))
        .is_some_and(|span| span <= 1u128 << 64);
    if fits {
        Ok(())
    } else {
        Err(GfError::Overflow(format!("{len} digits in base {base} exceed 64 bits")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_identity_codes() {
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(mat_encode(&FFMatrix::zeros(f2, 3, 3)).unwrap(), 0);
        assert_eq!(mat_encode(&FFMatrix::identity(f2, 2)).unwrap(), 9);
        assert_eq!(mat_decode(9, 2, 2, f2).unwrap(), FFMatrix::identity(f2, 2));
    }

    #[test]
    fn first_entry_is_least_significant() {
        let f3 = PrimeField::new(3).unwrap();
        let a = FFMatrix::from_rows(f3, &[vec![2, 1]]).unwrap();
        assert_eq!(mat_encode(&a).unwrap(), 2 + 3);
    }

    #[test]
    fn overflow_is_reported() {
        let f3 = PrimeField::new(3).unwrap();
        assert!(matches!(mat_encode(&FFMatrix::zeros(f3, 9, 9)), Err(GfError::Overflow(_))));
        let f2 = PrimeField::new(2).unwrap();
        assert!(mat_encode(&FFMatrix::zeros(f2, 8, 8)).is_ok());
        assert!(mat_decode(16, 2, 2, f2).is_err());
    }
}
