use std::collections::{BTreeSet, HashMap};

use crate::gf_linalg::{mat_encode, rcef_decompose, tau, FFMatrix, PrimeField};

use super::universe::enumerate_rank;
use super::{Frame, Kind, RamseyError};

/// Largest group used as-is for orbit canonization; bigger ones are replaced
/// by their permutation-matrix subgroup.
const MAX_GROUP: u128 = 200;

/// Whether `tau` maps `R * GL(F^k)` onto `GL(F^k)`, for `R` of full column
/// rank `k`.
pub fn tau_surjective_on(r: &FFMatrix) -> Result<bool, RamseyError> {
    let k = r.cols();
    let field = r.field();
    let gl = enumerate_rank(field, k, k, k)?;
    let mut seen = BTreeSet::new();
    for a in &gl {
        seen.insert(mat_encode(tau(&r.mul(a)?)?.as_matrix())?);
    }
    Ok(seen.len() == gl.len())
}

/// For a competing factor `mu` on `R * GL(F^k)`: the number of values it
/// takes there, provided `tau` is a function of `mu` on that set (`None`
/// otherwise). Any such `mu` takes at least `|GL(F^k)|` values.
pub fn factor_image_size<F>(r: &FFMatrix, mu: F) -> Result<Option<usize>, RamseyError>
where
    F: Fn(&FFMatrix) -> u64,
{
    let k = r.cols();
    let mut through: HashMap<u64, u64> = HashMap::new();
    for a in enumerate_rank(r.field(), k, k, k)? {
        let ra = r.mul(&a)?;
        let t = mat_encode(tau(&ra)?.as_matrix())?;
        if *through.entry(mu(&ra)).or_insert(t) != t {
            return Ok(None);
        }
    }
    Ok(Some(through.len()))
}

/// Permutations of the frame's universe under which the set of candidate
/// witnesses is invariant: left `GL(F^n)` on subspaces (`grassmannian`),
/// right `GL(F^k)` on matrices (`full_rank`). Other kinds get none.
pub(crate) fn symmetry_perms(frame: &Frame) -> Result<Vec<Vec<usize>>, RamseyError> {
    let (n, k) = (frame.params.n, frame.params.k);
    let index: HashMap<u64, usize> = frame.universe.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let act = |image: &dyn Fn(&FFMatrix) -> Result<FFMatrix, RamseyError>| -> Result<Vec<usize>, RamseyError> {
        frame
            .universe
            .iter()
            .map(|&code| {
                let a = crate::gf_linalg::mat_decode(code, n, k, frame.params.field()?)?;
                let b = image(&a)?;
                index
                    .get(&mat_encode(&b)?)
                    .copied()
                    .ok_or_else(|| RamseyError::Internal("group action left the universe".into()))
            })
            .collect()
    };
    let mut perms = Vec::new();
    match frame.kind {
        Kind::Grassmannian => {
            for g in group(frame.params.field()?, n)? {
                perms.push(act(&|a: &FFMatrix| Ok(rcef_decompose(&g.mul(a)?)?.r))?);
            }
        }
        Kind::FullRank => {
            let field = frame.params.field()?;
            if field.gl_order(k as u32).is_some_and(|o| o <= MAX_GROUP) {
                for h in enumerate_rank(field, k, k, k)? {
                    perms.push(act(&|a: &FFMatrix| Ok(a.mul(&h)?))?);
                }
            }
        }
        _ => {}
    }
    Ok(perms)
}

/// `GL(F^n)` when small, else the permutation matrices.
fn group(field: PrimeField, n: usize) -> Result<Vec<FFMatrix>, RamseyError> {
    if field.gl_order(n as u32).is_some_and(|o| o <= MAX_GROUP) {
        return enumerate_rank(field, n, n, n);
    }
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut g = FFMatrix::zeros(field, n, n);
        for (j, &i) in perm.iter().enumerate() {
            g.set(i, j, 1);
        }
        out.push(g);
        if !next_permutation(&mut perm) {
            return Ok(out);
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("successor exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ramsey::{enumerate_rcef, Params};

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn tau_is_onto_gl() {
        for (p, n, k) in [(2, 3, 1), (2, 3, 2), (2, 4, 2), (3, 3, 2)] {
            for r in enumerate_rcef(f(p), n, k).unwrap() {
                assert!(tau_surjective_on(&r).unwrap());
            }
        }
    }

    #[test]
    fn competing_factors_need_gl_many_values() {
        let r = enumerate_rcef(f(2), 4, 2).unwrap().remove(3);
        let gl = f(2).gl_order(2).unwrap() as usize;
        assert_eq!(factor_image_size(&r, |a| mat_encode(&tau(a).unwrap()).unwrap()).unwrap(), Some(gl));
        let finer = factor_image_size(&r, |a| mat_encode(a).unwrap()).unwrap().unwrap();
        assert!(finer >= gl);
        assert_eq!(factor_image_size(&r, |_| 0).unwrap(), None);
    }

    #[test]
    fn symmetry_group_sizes() {
        let frame = Frame::build(Kind::Grassmannian, &Params { p: 2, n: 3, k: 1 }, 2).unwrap();
        assert_eq!(symmetry_perms(&frame).unwrap().len(), 168);
        let frame = Frame::build(Kind::Square, &Params { p: 2, n: 2, k: 1 }, 1).unwrap();
        assert!(symmetry_perms(&frame).unwrap().is_empty());
    }
}
