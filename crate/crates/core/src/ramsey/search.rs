use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combinat::{is_rigid_on_chain, pi_factor, BooleanMatrix};
use crate::gf_linalg::{encode_digits, is_rcef, mat_decode, mat_encode, rcef_decompose, tau, tau2, FFMatrix, PrimeField};
use crate::par;

use super::universe::{ba_matrices, enumerate_rank, epi_code, epi_tables};
use super::{uniqueness, ColoringTable, Frame, Kind, Params, RamseyError};

/// Largest universe searched exhaustively with `r = 2`.
pub const MAX_EXHAUSTIVE: usize = 26;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub found: bool,
    pub witness_encoding: Vec<u64>,
    pub factor_table: BTreeMap<u64, u32>,
    /// Candidates examined, in enumeration order, up to and including the
    /// witness.
    pub nodes: u64,
    pub millis: u64,
}

fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

/// Least witness (by code) for `c` with parameter `m`.
pub fn witness_search(c: &ColoringTable, m: usize, jobs: usize) -> Result<WitnessReport, RamseyError> {
    let start = Instant::now();
    let frame = Frame::build(c.kind, &c.params, m)?;
    let colors = c.aligned(&frame.universe)?;
    let hit = par::first_index(frame.candidates.len(), jobs, |i| frame.admits(i, &colors));
    let report = match hit {
        Some(i) => {
            let cand = &frame.candidates[i];
            let factor_table = cand
                .factor_codes
                .iter()
                .zip(&cand.groups)
                .map(|(&f, g)| (f, colors[g[0]]))
                .collect();
            WitnessReport {
                found: true,
                witness_encoding: cand.encoding.clone(),
                factor_table,
                nodes: i as u64 + 1,
                millis: elapsed_ms(start),
            }
        }
        None => WitnessReport {
            found: false,
            witness_encoding: Vec::new(),
            factor_table: BTreeMap::new(),
            nodes: frame.candidates.len() as u64,
            millis: elapsed_ms(start),
        },
    };
    Ok(report)
}

/// Re-checks a witness from scratch without the search frame.
///
/// Returns the factor table when the factorization holds and `None` when two
/// structures with equal factor value get different colors.
pub fn verify_witness(c: &ColoringTable, m: usize, encoding: &[u64]) -> Result<Option<BTreeMap<u64, u32>>, RamseyError> {
    let Params { n, k, .. } = c.params;
    let want_len = if c.kind == Kind::Square { 2 } else { 1 };
    if encoding.len() != want_len {
        return Err(RamseyError::KindMismatch(format!(
            "{} witnesses have {want_len} component(s), got {}",
            c.kind,
            encoding.len()
        )));
    }
    let color = |code: u64| {
        c.table
            .get(&code)
            .copied()
            .ok_or_else(|| RamseyError::BadColoring(format!("structure {code} is uncolored")))
    };
    // (element code, factor code) pairs of the induced sub-universe
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    match c.kind {
        Kind::FullRank | Kind::Grassmannian => {
            let field = c.params.field()?;
            let r = rcef_witness(encoding[0], n, m, field)?;
            for a in enumerate_rank(field, m, k, k)? {
                let ra = r.mul(&a)?;
                if c.kind == Kind::FullRank {
                    pairs.push((mat_encode(&ra)?, mat_encode(tau(&a)?.as_matrix())?));
                } else {
                    pairs.push((mat_encode(&rcef_decompose(&ra)?.r)?, 0));
                }
            }
        }
        Kind::Square => {
            let field = c.params.field()?;
            let r0 = rcef_witness(encoding[0], n, m, field)?;
            let r1t = rcef_witness(encoding[1], n, m, field)?.transpose();
            for a in enumerate_rank(field, m, m, k)? {
                pairs.push((mat_encode(&r0.mul(&a)?.mul(&r1t)?)?, mat_encode(tau2(&a)?.as_matrix())?));
            }
        }
        Kind::Boolean => {
            let f2 = PrimeField::new(2)?;
            let r = mat_decode(encoding[0], n, m, f2)?;
            if !BooleanMatrix::new(&r).is_ok_and(|b| b.is_oba()) {
                return Err(RamseyError::KindMismatch("witness is not an ordered Boolean matrix".into()));
            }
            for b in ba_matrices(m, k, false)? {
                let rb = r.mul(&b)?;
                let bm = BooleanMatrix::new(&rb).map_err(|e| RamseyError::Internal(e.to_string()))?;
                let (_, sigma) = pi_factor(&bm);
                let digits: Vec<u32> = sigma.iter().map(|&s| s as u32).collect();
                pairs.push((mat_encode(&rb)?, encode_digits(&digits, k.max(2) as u64)?));
            }
        }
        Kind::Epi => {
            let base = m.max(2) as u64;
            let mut rest = encoding[0];
            let mut gamma = Vec::with_capacity(n);
            for _ in 0..n {
                gamma.push((rest % base) as usize);
                rest /= base;
            }
            if rest != 0 || !is_rigid_on_chain(&gamma, m) {
                return Err(RamseyError::KindMismatch("witness is not a rigid surjection".into()));
            }
            for sigma in epi_tables(m, k)? {
                let comp: Vec<usize> = gamma.iter().map(|&x| sigma[x]).collect();
                pairs.push((epi_code(&comp, k)?, 0));
            }
        }
    }
    let mut factor_table = BTreeMap::new();
    for (code, f) in pairs {
        let col = color(code)?;
        if *factor_table.entry(f).or_insert(col) != col {
            return Ok(None);
        }
    }
    Ok(Some(factor_table))
}

fn rcef_witness(code: u64, n: usize, m: usize, field: PrimeField) -> Result<FFMatrix, RamseyError> {
    let r = mat_decode(code, n, m, field)?;
    if !is_rcef(&r) || r.rank() != m {
        return Err(RamseyError::KindMismatch(format!("witness {code} is not a rank-{m} RCEF matrix")));
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    AllPass,
    Counterexample(ColoringTable),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Trivial,
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug)]
pub struct ExhaustOptions {
    pub jobs: usize,
    /// Skip colorings that are not least in their symmetry orbit.
    pub canonize: bool,
    /// Sampled mode with this many random colorings.
    pub samples: Option<u64>,
    pub seed: u64,
}

impl Default for ExhaustOptions {
    fn default() -> Self {
        Self { jobs: 1, canonize: false, samples: None, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct ExhaustReport {
    pub outcome: SearchOutcome,
    pub mode: SearchMode,
    pub universe: usize,
    pub candidates: usize,
    /// Colorings visited up to and including the counterexample.
    pub nodes: u64,
    pub millis: u64,
}

impl ExhaustReport {
    pub fn all_pass(&self) -> bool {
        self.outcome == SearchOutcome::AllPass
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (outcome, cx) = match &self.outcome {
            SearchOutcome::AllPass => ("all_pass", serde_json::Value::Null),
            SearchOutcome::Counterexample(t) => ("counterexample", serde_json::to_value(&t.table).unwrap_or_default()),
        };
        serde_json::json!({
            "outcome": outcome,
            "mode": self.mode,
            "universe": self.universe,
            "candidates": self.candidates,
            "nodes": self.nodes,
            "counterexample": cx,
            "millis": self.millis,
        })
    }
}

/// Checks every `r`-coloring of the universe (or a seeded sample) for a
/// witness and returns the first coloring without one.
///
/// Exhaustive mode (`r = 2`) fixes the color of the first element to 0, which
/// is harmless by color-swap symmetry, and walks color vectors in
/// lexicographic order; the counterexample returned is the lexicographically
/// least one. With `canonize`, colorings that are not least in their orbit
/// under the kind's symmetry group and color swap are skipped; the least
/// counterexample is always orbit-least, so the answer is unchanged.
pub fn exhaust_colorings(
    kind: Kind,
    params: &Params,
    r: u32,
    m: usize,
    opts: &ExhaustOptions,
) -> Result<ExhaustReport, RamseyError> {
    let start = Instant::now();
    if r == 0 {
        return Err(RamseyError::BadParams("r must be positive".into()));
    }
    let frame = Frame::build(kind, params, m)?;
    let n_elems = frame.universe.len();
    let report = |outcome, mode, nodes| ExhaustReport {
        outcome,
        mode,
        universe: n_elems,
        candidates: frame.candidates.len(),
        nodes,
        millis: elapsed_ms(start),
    };

    if r == 1 || n_elems == 0 {
        let outcome = if frame.candidates.is_empty() {
            SearchOutcome::Counterexample(ColoringTable::constant(kind, *params, &frame.universe))
        } else {
            SearchOutcome::AllPass
        };
        return Ok(report(outcome, SearchMode::Trivial, 1));
    }

    if let Some(samples) = opts.samples {
        let hit = par::first_u64(0, samples, opts.jobs, |s| {
            let colors = sample_coloring(opts.seed, s, n_elems, r);
            !(0..frame.candidates.len()).any(|i| frame.admits(i, &colors))
        });
        let outcome = match hit {
            Some(s) => {
                let colors = sample_coloring(opts.seed, s, n_elems, r);
                SearchOutcome::Counterexample(confirm(&frame, r, &colors)?)
            }
            None => SearchOutcome::AllPass,
        };
        let nodes = hit.map_or(samples, |s| s + 1);
        return Ok(report(outcome, SearchMode::Sampled, nodes));
    }

    if r != 2 {
        return Err(RamseyError::BadParams("exhaustive mode needs r = 2; pass a sample count for r >= 3".into()));
    }
    if n_elems > MAX_EXHAUSTIVE {
        return Err(RamseyError::UniverseTooLarge);
    }
    let masks = frame.group_masks();
    let perms = if opts.canonize { uniqueness::symmetry_perms(&frame)? } else { Vec::new() };
    let full = if n_elems == 64 { u64::MAX } else { (1u64 << n_elems) - 1 };
    let total = 1u64 << (n_elems - 1);
    let hit = par::first_u64(0, total, opts.jobs, |x| {
        if !perms.is_empty() && !is_orbit_least(x, &perms, n_elems, full) {
            return false;
        }
        !masks.iter().any(|groups| groups.iter().all(|&g| x & g == 0 || x & g == g))
    });
    let outcome = match hit {
        Some(x) => {
            let colors: Vec<u32> = (0..n_elems).map(|j| ((x >> (n_elems - 1 - j)) & 1) as u32).collect();
            SearchOutcome::Counterexample(confirm(&frame, 2, &colors)?)
        }
        None => SearchOutcome::AllPass,
    };
    Ok(report(outcome, SearchMode::Exhaustive, hit.map_or(total, |x| x + 1)))
}

fn sample_coloring(seed: u64, index: u64, n: usize, r: u32) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..n).map(|_| rng.gen_range(0..r)).collect()
}

/// Wraps a counterexample and re-verifies through the independent checker.
fn confirm(frame: &Frame, r: u32, colors: &[u32]) -> Result<ColoringTable, RamseyError> {
    let table = ColoringTable::from_colors(frame.kind, frame.params, r, &frame.universe, colors)?;
    for cand in &frame.candidates {
        if verify_witness(&table, frame.m, &cand.encoding)?.is_some() {
            return Err(RamseyError::Internal(format!("counterexample admits witness {:?}", cand.encoding)));
        }
    }
    Ok(table)
}

fn permute_mask(x: u64, perm: &[usize], n: usize) -> u64 {
    let mut y = 0u64;
    for (j, &pj) in perm.iter().enumerate() {
        if x >> (n - 1 - j) & 1 == 1 {
            y |= 1 << (n - 1 - pj);
        }
    }
    y
}

fn is_orbit_least(x: u64, perms: &[Vec<usize>], n: usize, full: u64) -> bool {
    perms.iter().all(|p| {
        let y = permute_mask(x, p, n);
        y >= x && (!y & full) >= x
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MinNEntry {
    pub n: usize,
    pub outcome: String,
    pub universe: usize,
    pub candidates: usize,
    pub nodes: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinNReport {
    /// Least `n` in range with `AllPass`, if any.
    pub min_n: Option<usize>,
    pub log: Vec<MinNEntry>,
    pub millis: u64,
}

/// Scans `n` upward through `n_range` and stops at the first `AllPass`.
pub fn min_n_search(
    kind: Kind,
    p: u32,
    k: usize,
    r: u32,
    m: usize,
    n_range: std::ops::Range<usize>,
    opts: &ExhaustOptions,
) -> Result<MinNReport, RamseyError> {
    let start = Instant::now();
    let mut log = Vec::new();
    for n in n_range {
        let rep = exhaust_colorings(kind, &Params { p, n, k }, r, m, opts)?;
        let pass = rep.all_pass();
        log.push(MinNEntry {
            n,
            outcome: if pass { "all_pass" } else { "counterexample" }.into(),
            universe: rep.universe,
            candidates: rep.candidates,
            nodes: rep.nodes,
        });
        if pass {
            return Ok(MinNReport { min_n: Some(n), log, millis: elapsed_ms(start) });
        }
    }
    Ok(MinNReport { min_n: None, log, millis: elapsed_ms(start) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fano(n: usize) -> Params {
        Params { p: 2, n, k: 1 }
    }

    #[test]
    fn constant_coloring_takes_first_witness() {
        let frame = Frame::build(Kind::FullRank, &Params { p: 3, n: 3, k: 1 }, 2).unwrap();
        let c = ColoringTable::constant(Kind::FullRank, frame.params, &frame.universe);
        let rep = witness_search(&c, 2, 1).unwrap();
        assert!(rep.found);
        assert_eq!(rep.nodes, 1);
        assert_eq!(rep.witness_encoding, frame.candidates[0].encoding);
        assert!(verify_witness(&c, 2, &rep.witness_encoding).unwrap().is_some());
    }

    #[test]
    fn bicolored_line_has_no_witness() {
        // codes over F_2 as 2x1 columns: (1,0) -> 1, (0,1) -> 2, (1,1) -> 3
        let c = ColoringTable::new(Kind::Grassmannian, fano(2), 2, [(1, 0), (2, 0), (3, 1)].into_iter().collect()).unwrap();
        let rep = witness_search(&c, 2, 1).unwrap();
        assert!(!rep.found);
        assert_eq!(rep.nodes, 1);
    }

    #[test]
    fn fano_plane_is_not_two_colorable() {
        let opts = ExhaustOptions::default();
        let three = exhaust_colorings(Kind::Grassmannian, &fano(3), 2, 2, &opts).unwrap();
        assert!(three.all_pass());
        assert_eq!(three.nodes, 64);
        let two = exhaust_colorings(Kind::Grassmannian, &fano(2), 2, 2, &opts).unwrap();
        let SearchOutcome::Counterexample(t) = two.outcome else { panic!("expected counterexample") };
        // lexicographically least: 0, 0, 1
        assert_eq!(t.table.values().copied().collect::<Vec<_>>(), vec![0, 0, 1]);
    }

    #[test]
    fn canonization_does_not_change_answers() {
        for n in 2..=3 {
            for kind in [Kind::Grassmannian, Kind::FullRank] {
                let plain = exhaust_colorings(kind, &fano(n), 2, 2, &ExhaustOptions::default()).unwrap();
                let canon =
                    exhaust_colorings(kind, &fano(n), 2, 2, &ExhaustOptions { canonize: true, ..Default::default() }).unwrap();
                assert_eq!(plain.outcome, canon.outcome);
            }
        }
    }

    #[test]
    fn r_one_is_trivial() {
        let rep = exhaust_colorings(Kind::Square, &Params { p: 2, n: 2, k: 1 }, 1, 1, &ExhaustOptions::default()).unwrap();
        assert!(rep.all_pass());
        assert_eq!(rep.mode, SearchMode::Trivial);
        // m > n: no candidate witness at all
        let rep = exhaust_colorings(Kind::Grassmannian, &fano(1), 1, 2, &ExhaustOptions::default()).unwrap();
        assert!(!rep.all_pass());
    }

    #[test]
    fn min_n_for_lines_in_planes() {
        let opts = ExhaustOptions::default();
        for kind in [Kind::Grassmannian, Kind::FullRank] {
            let rep = min_n_search(kind, 2, 1, 2, 2, 2..5, &opts).unwrap();
            assert_eq!(rep.min_n, Some(3));
            assert_eq!(rep.log.len(), 2);
        }
        let rep = min_n_search(Kind::Epi, 0, 1, 1, 2, 1..5, &opts).unwrap();
        assert_eq!(rep.min_n, Some(2));
    }

    #[test]
    fn sampled_mode_is_seeded() {
        let params = Params { p: 2, n: 3, k: 1 };
        let opts = ExhaustOptions { samples: Some(50), seed: 7, ..Default::default() };
        let a = exhaust_colorings(Kind::Grassmannian, &params, 3, 2, &opts).unwrap();
        let b = exhaust_colorings(Kind::Grassmannian, &params, 3, 2, &ExhaustOptions { jobs: 4, ..opts.clone() }).unwrap();
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.nodes, b.nodes);
        // the Fano plane is 3-colorable without monochromatic lines
        assert!(!a.all_pass());
    }

    #[test]
    fn exhaustive_r3_requires_sampling() {
        assert!(exhaust_colorings(Kind::Grassmannian, &fano(3), 3, 2, &ExhaustOptions::default()).is_err());
    }
}
