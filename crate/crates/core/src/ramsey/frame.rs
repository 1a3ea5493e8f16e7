//! Precomputed witness structure for one `(kind, params, m)`.
//!
//! Each candidate witness owns a partition of its sub-universe into groups
//! (one group per factor value). A coloring admits the candidate as a witness
//! iff every group is monochromatic, which turns the search into cheap
//! bitmask tests.

use std::collections::HashMap;

use crate::combinat::{pi_factor, BooleanMatrix};
use crate::gf_linalg::{encode_digits, mat_encode, tau, tau2, FFMatrix};

use super::universe::{ba_matrices, enumerate_rank, enumerate_rcef, epi_code, epi_tables};
use super::{enumerate_structures, Kind, Params, RamseyError};

#[derive(Clone, Debug)]
pub struct Candidate {
    /// Codes of the witness structure(s): `[R]`, or `[R0, R1]` for `square`.
    pub encoding: Vec<u64>,
    /// Factor value code of each group.
    pub factor_codes: Vec<u64>,
    /// Universe indices per group.
    pub groups: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct Frame {
    pub kind: Kind,
    pub params: Params,
    pub m: usize,
    pub universe: Vec<u64>,
    pub candidates: Vec<Candidate>,
}

struct Grouper {
    by_factor: Vec<(u64, Vec<usize>)>,
}

impl Grouper {
    fn new() -> Self {
        Self { by_factor: Vec::new() }
    }

    fn push(&mut self, factor: u64, elem: usize) {
        match self.by_factor.iter_mut().find(|(f, _)| *f == factor) {
            Some((_, v)) => v.push(elem),
            None => self.by_factor.push((factor, vec![elem])),
        }
    }

    fn finish(mut self, encoding: Vec<u64>) -> Candidate {
        self.by_factor.sort_by_key(|(f, _)| *f);
        let (factor_codes, groups) = self.by_factor.into_iter().unzip();
        Candidate { encoding, factor_codes, groups }
    }
}

impl Frame {
    pub fn build(kind: Kind, params: &Params, m: usize) -> Result<Self, RamseyError> {
        params.check(kind)?;
        if m < params.k {
            return Err(RamseyError::BadParams(format!("m = {m} is below k = {}", params.k)));
        }
        let universe = enumerate_structures(kind, params)?;
        let index: HashMap<u64, usize> = universe.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let lookup = |code: u64| -> Result<usize, RamseyError> {
            index
                .get(&code)
                .copied()
                .ok_or_else(|| RamseyError::Internal(format!("structure {code} escaped the universe")))
        };
        let (n, k) = (params.n, params.k);
        let mut candidates = Vec::new();
        match kind {
            Kind::FullRank | Kind::Grassmannian => {
                let field = params.field()?;
                let domain = if kind == Kind::FullRank {
                    enumerate_rank(field, m, k, k)?
                } else {
                    enumerate_rcef(field, m, k)?
                };
                let factors: Vec<u64> = domain
                    .iter()
                    .map(|a| if kind == Kind::FullRank { Ok(mat_encode(tau(a)?.as_matrix())?) } else { Ok(0) })
                    .collect::<Result<_, RamseyError>>()?;
                for r in enumerate_rcef(field, n, m)? {
                    let mut g = Grouper::new();
                    for (a, &fc) in domain.iter().zip(&factors) {
                        g.push(fc, lookup(mat_encode(&r.mul(a)?)?)?);
                    }
                    candidates.push(g.finish(vec![mat_encode(&r)?]));
                }
            }
            Kind::Square => {
                let field = params.field()?;
                let domain = enumerate_rank(field, m, m, k)?;
                let factors: Vec<u64> = domain.iter().map(|a| Ok(mat_encode(tau2(a)?.as_matrix())?)).collect::<Result<_, RamseyError>>()?;
                let reps = enumerate_rcef(field, n, m)?;
                for r0 in &reps {
                    let left: Vec<FFMatrix> = domain.iter().map(|a| r0.mul(a)).collect::<Result<_, _>>()?;
                    for r1 in &reps {
                        let r1t = r1.transpose();
                        let mut g = Grouper::new();
                        for (la, &fc) in left.iter().zip(&factors) {
                            g.push(fc, lookup(mat_encode(&la.mul(&r1t)?)?)?);
                        }
                        candidates.push(g.finish(vec![mat_encode(r0)?, mat_encode(r1)?]));
                    }
                }
            }
            Kind::Boolean => {
                if m <= n {
                    let domain = ba_matrices(m, k, false)?;
                    let factors: Vec<u64> = domain
                        .iter()
                        .map(|b| {
                            let (_, sigma) = pi_factor(&BooleanMatrix::new(b).expect("enumerated Boolean matrix"));
                            let digits: Vec<u32> = sigma.iter().map(|&s| s as u32).collect();
                            Ok(encode_digits(&digits, k.max(2) as u64)?)
                        })
                        .collect::<Result<_, RamseyError>>()?;
                    for r in ba_matrices(n, m, true)? {
                        let mut g = Grouper::new();
                        for (b, &fc) in domain.iter().zip(&factors) {
                            g.push(fc, lookup(mat_encode(&r.mul(b)?)?)?);
                        }
                        candidates.push(g.finish(vec![mat_encode(&r)?]));
                    }
                }
            }
            Kind::Epi => {
                if m <= n {
                    let domain = epi_tables(m, k)?;
                    for gamma in epi_tables(n, m)? {
                        let mut g = Grouper::new();
                        for sigma in &domain {
                            let comp: Vec<usize> = gamma.iter().map(|&x| sigma[x]).collect();
                            g.push(0, lookup(epi_code(&comp, k)?)?);
                        }
                        candidates.push(g.finish(vec![epi_code(&gamma, m)?]));
                    }
                }
            }
        }
        candidates.sort_by(|a, b| a.encoding.cmp(&b.encoding));
        Ok(Self { kind, params: *params, m, universe, candidates })
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    /// Whether `colors` (indexed like the universe) admits candidate `i`.
    pub fn admits(&self, i: usize, colors: &[u32]) -> bool {
        self.candidates[i].groups.iter().all(|g| g.iter().all(|&e| colors[e] == colors[g[0]]))
    }

    /// Per-candidate group bitmasks, element `j` at bit `N - 1 - j`. Requires
    /// `N <= 64`.
    pub(crate) fn group_masks(&self) -> Vec<Vec<u64>> {
        let n = self.universe.len();
        self.candidates
            .iter()
            .map(|c| c.groups.iter().map(|g| g.iter().fold(0u64, |acc, &e| acc | 1 << (n - 1 - e))).collect())
            .collect()
    }
}
