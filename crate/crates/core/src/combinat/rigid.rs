use std::cmp::Ordering;
use std::fmt;

use crate::gf_linalg::{FFMatrix, PrimeField};

use super::{AntilexOrder, CombinatError};

/// True iff `values` (the value table of a map on the chain `0 < 1 < ... < n-1`)
/// hits every element of `codomain` and first occurrences appear in
/// increasing `cmp` order.
pub fn is_rigid_surjection<T, F>(values: &[T], codomain: &[T], cmp: F) -> bool
where
    T: PartialEq,
    F: Fn(&T, &T) -> Ordering,
{
    let mut firsts: Vec<&T> = Vec::new();
    for v in values {
        if !firsts.contains(&v) {
            firsts.push(v);
        }
    }
    if firsts.len() != codomain.len() || !codomain.iter().all(|c| firsts.contains(&c)) {
        return false;
    }
    firsts.windows(2).all(|w| cmp(w[0], w[1]) == Ordering::Less)
}

/// Rigidity of a value table on a chain codomain `{0 < ... < s-1}`: a
/// restricted-growth string using exactly `s` symbols.
pub fn is_rigid_on_chain(values: &[usize], s: usize) -> bool {
    let mut next = 0usize;
    for &v in values {
        if v > next || v >= s {
            return false;
        }
        if v == next {
            next += 1;
        }
    }
    next == s
}

/// Codomain of a rigid surjection. Only the two orders used by the theory are
/// supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Codomain {
    Chain(usize),
    Vectors(AntilexOrder),
}

impl Codomain {
    pub fn size(&self) -> usize {
        match self {
            Codomain::Chain(s) => *s,
            Codomain::Vectors(o) => o.size().expect("codomain too large"),
        }
    }
}

/// A rigid surjection from the chain `n` onto a [`Codomain`], stored as the
/// table of codomain ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidSurjection {
    codomain: Codomain,
    values: Vec<usize>,
}

impl RigidSurjection {
    pub fn new(codomain: Codomain, values: Vec<usize>) -> Result<Self, CombinatError> {
        if !is_rigid_on_chain(&values, codomain.size()) {
            return Err(CombinatError::NotRigid);
        }
        Ok(Self { codomain, values })
    }

    /// Builds from the vectors `f(0), ..., f(n-1)` of `F^k`.
    pub fn from_vectors(field: PrimeField, k: usize, vectors: &[Vec<u32>]) -> Result<Self, CombinatError> {
        let order = AntilexOrder::new(field, k);
        let mut values = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != k {
                return Err(CombinatError::DimensionMismatch(v.len(), k));
            }
            if v.iter().any(|&x| x >= field.order()) {
                return Err(CombinatError::Parse(format!("entry out of range in {v:?}")));
            }
            values.push(order.rank(v));
        }
        Self::new(Codomain::Vectors(order), values)
    }

    pub fn codomain(&self) -> Codomain {
        self.codomain
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Parses `"n s"` followed by `n` values.
    pub fn parse_text(text: &str) -> Result<Self, CombinatError> {
        let nums = parse_numbers(text)?;
        if nums.len() < 2 {
            return Err(CombinatError::Parse("missing header \"n |S|\"".into()));
        }
        let (n, s) = (nums[0], nums[1]);
        if nums.len() != 2 + n {
            return Err(CombinatError::Parse(format!("expected {n} values, found {}", nums.len() - 2)));
        }
        Self::new(Codomain::Chain(s), nums[2..].to_vec())
    }

    pub fn to_text(&self) -> String {
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        format!("{} {}\n{}\n", self.values.len(), self.codomain.size(), vals.join(" "))
    }
}

impl fmt::Display for RigidSurjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub(crate) fn parse_numbers(text: &str) -> Result<Vec<usize>, CombinatError> {
    text.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| CombinatError::Parse(format!("{t:?}: {e}"))))
        .collect()
}

/// `Phi(f)`: the `n x k` matrix whose `j`-th row is `f(j)`.
pub fn phi(f: &RigidSurjection) -> Result<FFMatrix, CombinatError> {
    let Codomain::Vectors(order) = f.codomain else {
        return Err(CombinatError::NotVectorCodomain);
    };
    let n = f.values.len();
    let k = order.dim();
    let mut data = Vec::with_capacity(n * k);
    for &v in &f.values {
        data.extend(order.unrank(v));
    }
    Ok(FFMatrix::from_residues(order.field(), n, k, data)?)
}

/// Inverse of [`phi`]: reads the rows of an `n x k` matrix as a map into
/// `F^k`; `None` unless that map is a rigid surjection.
pub fn matrix_rows_map(a: &FFMatrix) -> Option<RigidSurjection> {
    let rows: Vec<Vec<u32>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
    RigidSurjection::from_vectors(a.field(), a.cols(), &rows).ok()
}

/// Value table of `T_A : F^n -> F^k`, `x -> A x`, over the domain in
/// antilex order, as codomain ranks.
pub fn linear_map_table(a: &FFMatrix) -> Vec<usize> {
    let dom = AntilexOrder::new(a.field(), a.cols());
    let cod = AntilexOrder::new(a.field(), a.rows());
    dom.iter().map(|x| cod.rank(&a.apply(&x))).collect()
}

/// Whether `T_A` is a rigid surjection `(F^n, <_alex) -> (F^k, <_alex)`.
pub fn linear_map_is_rigid(a: &FFMatrix) -> bool {
    let Some(size) = AntilexOrder::new(a.field(), a.rows()).size() else {
        return false;
    };
    is_rigid_on_chain(&linear_map_table(a), size)
}

/// Rigid surjections `n -> s` (chain codomain) as restricted-growth strings,
/// in lexicographic order of value tables. Supports O(n) unranking so index
/// ranges can be split across workers.
#[derive(Clone, Debug)]
pub struct EpiEnumerator {
    n: usize,
    s: usize,
    // ways[rem][used] = completions of `rem` more positions given `used` symbols
    ways: Vec<Vec<u128>>,
}

impl EpiEnumerator {
    pub fn new(n: usize, s: usize) -> Result<Self, CombinatError> {
        if s > n {
            return Err(CombinatError::TooSmallDomain { n, s });
        }
        let mut ways = vec![vec![0u128; s + 2]; n + 1];
        ways[0][s] = 1;
        for rem in 1..=n {
            for used in 0..=s {
                let stay = (used as u128).saturating_mul(ways[rem - 1][used]);
                let grow = if used < s { ways[rem - 1][used + 1] } else { 0 };
                ways[rem][used] = stay.saturating_add(grow);
            }
        }
        Ok(Self { n, s, ways })
    }

    /// Number of rigid surjections (the Stirling number `S(n, s)`), saturating.
    pub fn count(&self) -> u128 {
        self.ways[self.n][0]
    }

    pub fn nth(&self, mut idx: u128) -> Option<Vec<usize>> {
        if idx >= self.count() {
            return None;
        }
        let mut out = Vec::with_capacity(self.n);
        let mut used = 0usize;
        for pos in 0..self.n {
            let rem = self.n - pos - 1;
            let per = self.ways[rem][used];
            let existing = (used as u128) * per;
            if idx < existing {
                out.push((idx / per) as usize);
                idx %= per;
            } else {
                idx -= existing;
                out.push(used);
                used += 1;
            }
        }
        Some(out)
    }

    /// Enumerates indices `range` in order.
    pub fn range(&self, range: std::ops::Range<u128>) -> impl Iterator<Item = Vec<usize>> + '_ {
        let end = range.end.min(self.count());
        let mut cur = if range.start < end { self.nth(range.start) } else { None };
        let mut idx = range.start;
        std::iter::from_fn(move || {
            if idx >= end {
                return None;
            }
            let out = cur.take()?;
            idx += 1;
            if idx < end {
                cur = next_rgs(&out, self.s);
            }
            Some(out)
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.range(0..self.count())
    }
}

/// Lexicographic successor among restricted-growth strings with exactly `s`
/// symbols.
fn next_rgs(cur: &[usize], s: usize) -> Option<Vec<usize>> {
    let n = cur.len();
    let mut prefix_max = vec![0usize; n + 1]; // symbols used in cur[..i]
    for i in 0..n {
        prefix_max[i + 1] = prefix_max[i].max(cur[i] + 1);
    }
    for i in (0..n).rev() {
        let used = prefix_max[i];
        for v in cur[i] + 1..=used.min(s - 1) {
            let now = used.max(v + 1);
            let rem = n - i - 1;
            if now + rem >= s {
                // smallest completion: zeros then the missing symbols at the end
                let mut out = cur[..i].to_vec();
                out.push(v);
                let missing = s - now;
                out.extend(std::iter::repeat(0).take(rem - missing));
                out.extend(now..s);
                return Some(out);
            }
        }
    }
    None
}

/// All rigid surjections `n -> codomain`, lexicographic by value table.
pub fn enumerate_epi(n: usize, codomain: Codomain) -> Result<Vec<RigidSurjection>, CombinatError> {
    let e = EpiEnumerator::new(n, codomain.size())?;
    Ok(e.iter().map(|values| RigidSurjection { codomain, values }).collect())
}
