use crate::combinat::{enumerate_ba, enumerate_oba, EpiEnumerator};
use crate::gf_linalg::{encode_digits, mat_decode, mat_encode, FFMatrix, PrimeField};

use super::{Kind, Params, RamseyError};

/// Hard cap on universe sizes and on brute-force scans.
pub const MAX_UNIVERSE: u64 = 1 << 26;

/// `E_{n,k}`: the `n x k` rank-`k` matrices in RCEF, ascending by code.
///
/// Built from pivot patterns of the transposed RREF rather than by filtering
/// all matrices.
pub fn enumerate_rcef(field: PrimeField, n: usize, k: usize) -> Result<Vec<FFMatrix>, RamseyError> {
    if k > n {
        return Ok(Vec::new());
    }
    let p = field.order() as u64;
    let mut out = Vec::new();
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // free slots of the k x n RREF: row i, columns after its pivot that are not pivots
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| (pivots[i] + 1..n).filter(|c| !pivots.contains(c)).map(move |c| (i, c)))
            .collect();
        let count = p
            .checked_pow(free.len() as u32)
            .filter(|&c| c + out.len() as u64 <= MAX_UNIVERSE)
            .ok_or(RamseyError::UniverseTooLarge)?;
        for mut code in 0..count {
            let mut r = FFMatrix::zeros(field, k, n);
            for (i, &c) in pivots.iter().enumerate() {
                r.set(i, c, 1);
            }
            for &(i, c) in &free {
                r.set(i, c, (code % p) as u32);
                code /= p;
            }
            out.push(r.transpose());
        }
        if !next_combination(&mut pivots, n) {
            break;
        }
    }
    sort_by_code(&mut out)?;
    Ok(out)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn sort_by_code(v: &mut Vec<FFMatrix>) -> Result<(), RamseyError> {
    let mut keyed: Vec<(u64, FFMatrix)> = v.drain(..).map(|m| Ok((mat_encode(&m)?, m))).collect::<Result<_, RamseyError>>()?;
    keyed.sort_by_key(|(c, _)| *c);
    v.extend(keyed.into_iter().map(|(_, m)| m));
    Ok(())
}

/// All `rows x cols` matrices of rank `rank`, ascending by code.
pub fn enumerate_rank(field: PrimeField, rows: usize, cols: usize, rank: usize) -> Result<Vec<FFMatrix>, RamseyError> {
    let total = crate::gf_linalg::code_space(field, rows, cols)
        .filter(|&t| t <= MAX_UNIVERSE)
        .ok_or(RamseyError::UniverseTooLarge)?;
    let mut out = Vec::new();
    for code in 0..total {
        let m = mat_decode(code, rows, cols, field)?;
        if m.rank() == rank {
            out.push(m);
        }
    }
    Ok(out)
}

/// Code of a rigid surjection value table into `s` points (base `max(s, 2)`).
pub(crate) fn epi_code(values: &[usize], s: usize) -> Result<u64, RamseyError> {
    let digits: Vec<u32> = values.iter().map(|&v| v as u32).collect();
    Ok(encode_digits(&digits, s.max(2) as u64)?)
}

pub(crate) fn epi_tables(n: usize, s: usize) -> Result<Vec<Vec<usize>>, RamseyError> {
    let e = EpiEnumerator::new(n, s).map_err(|_| RamseyError::BadParams(format!("no rigid surjection {n} -> {s}")))?;
    if e.count() > MAX_UNIVERSE as u128 {
        return Err(RamseyError::UniverseTooLarge);
    }
    let mut v: Vec<(u64, Vec<usize>)> = e.iter().map(|t| Ok((epi_code(&t, s)?, t))).collect::<Result<_, RamseyError>>()?;
    v.sort_by_key(|(c, _)| *c);
    Ok(v.into_iter().map(|(_, t)| t).collect())
}

pub(crate) fn ba_matrices(n: usize, k: usize, ordered: bool) -> Result<Vec<FFMatrix>, RamseyError> {
    let f2 = PrimeField::new(2)?;
    if crate::gf_linalg::code_space(f2, n, k).map_or(true, |t| t > MAX_UNIVERSE) {
        return Err(RamseyError::UniverseTooLarge);
    }
    let raw = if ordered { enumerate_oba(n, k) } else { enumerate_ba(n, k) };
    let mut v: Vec<FFMatrix> = raw.map_err(|e| RamseyError::BadParams(e.to_string()))?.iter().map(|b| b.to_matrix()).collect();
    sort_by_code(&mut v)?;
    Ok(v)
}

/// Codes of the colored universe of `kind` at `params`, ascending.
pub fn enumerate_structures(kind: Kind, params: &Params) -> Result<Vec<u64>, RamseyError> {
    params.check(kind)?;
    let (n, k) = (params.n, params.k);
    let codes = match kind {
        Kind::FullRank => codes_of(&enumerate_rank(params.field()?, n, k, k)?)?,
        Kind::Grassmannian => codes_of(&enumerate_rcef(params.field()?, n, k)?)?,
        Kind::Square => codes_of(&enumerate_rank(params.field()?, n, n, k)?)?,
        Kind::Boolean => {
            if k > n {
                Vec::new()
            } else {
                codes_of(&ba_matrices(n, k, false)?)?
            }
        }
        Kind::Epi => {
            if k > n {
                Vec::new()
            } else {
                epi_tables(n, k)?.iter().map(|t| epi_code(t, k)).collect::<Result<_, _>>()?
            }
        }
    };
    Ok(codes)
}

pub(crate) fn codes_of(ms: &[FFMatrix]) -> Result<Vec<u64>, RamseyError> {
    ms.iter().map(|m| Ok(mat_encode(m)?)).collect()
}
