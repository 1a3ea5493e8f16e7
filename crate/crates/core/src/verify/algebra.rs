//! Exact checks over prime fields: echelon forms, `tau`, `tau2`, rigid
//! surjections and the counting identities.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{CheckDef, CheckKind, Ctx, Outcome, Step, Tally};
use crate::combinat::{
    antilex_cmp, bool_alg_cmp, enumerate_ba, enumerate_epi, enumerate_oba, enumerate_partitions, linear_map_is_rigid, matrix_rows_map,
    min_preimage, permutation_matrix, phi, pi_factor, AntilexOrder, Codomain,
};
use crate::gf_linalg::{
    is_rcef, is_rref, pivot_right_inverse, rank_and_rref, tau, tau2, tau2_from_decomposition, FFMatrix, GLMatrix, PrimeField,
};
use crate::ramsey::{enumerate_rank, enumerate_rcef};

const PRIMES: [u32; 3] = [2, 3, 5];

pub(crate) fn random_matrix(rng: &mut ChaCha8Rng, field: PrimeField, rows: usize, cols: usize) -> FFMatrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(0..field.order())).collect();
    FFMatrix::from_residues(field, rows, cols, data).expect("residues in range")
}

/// Uniform among matrices of rank `rank`, by rejection.
pub(crate) fn random_of_rank(rng: &mut ChaCha8Rng, field: PrimeField, rows: usize, cols: usize, rank: usize) -> FFMatrix {
    if rank == rows.min(cols) {
        loop {
            let a = random_matrix(rng, field, rows, cols);
            if a.rank() == rank {
                return a;
            }
        }
    }
    let b = random_of_rank(rng, field, rows, rank, rank);
    let c = random_of_rank(rng, field, rank, cols, rank);
    b.mul(&c).expect("shapes compose")
}

fn random_gl(rng: &mut ChaCha8Rng, field: PrimeField, k: usize) -> GLMatrix {
    GLMatrix::new(random_of_rank(rng, field, k, k, k)).expect("full rank")
}

/// Random `rows x cols` RREF matrix of full row rank.
fn random_rref(rng: &mut ChaCha8Rng, field: PrimeField, rows: usize, cols: usize) -> FFMatrix {
    rank_and_rref(&random_of_rank(rng, field, rows, cols, rows)).r
}

/// Random `rows x cols` RCEF matrix of full column rank.
fn random_rcef(rng: &mut ChaCha8Rng, field: PrimeField, rows: usize, cols: usize) -> FFMatrix {
    random_rref(rng, field, cols, rows).transpose()
}

fn field(p: u32) -> PrimeField {
    PrimeField::new(p).expect("small prime")
}

fn pick_field(rng: &mut ChaCha8Rng) -> PrimeField {
    field(*PRIMES.choose(rng).expect("nonempty"))
}

pub(crate) fn gf_checks() -> Vec<CheckDef> {
    vec![
        CheckDef { name: "tau_unique_in_gl", anchor: "echelon:tau", kind: CheckKind::Certified, run: tau_unique_in_gl },
        CheckDef { name: "tau_right_invariance", anchor: "echelon:tau", kind: CheckKind::Certified, run: tau_right_invariance },
        CheckDef { name: "echelon_closure", anchor: "echelon:closure", kind: CheckKind::Certified, run: echelon_closure },
        CheckDef { name: "pivot_right_inverse", anchor: "echelon:pivots", kind: CheckKind::Certified, run: pivot_inverse },
        CheckDef { name: "rref_unique", anchor: "echelon:rref", kind: CheckKind::Certified, run: rref_unique },
        CheckDef { name: "tau2_well_defined", anchor: "echelon:tau2", kind: CheckKind::Certified, run: tau2_well_defined },
        CheckDef { name: "gl_order", anchor: "counting:gl_order", kind: CheckKind::Certified, run: gl_order },
    ]
}

/// Exactly one `g` in `GL(F^k)` puts `A g` in RCEF, and it is `tau(A)`.
fn tau_unique_in_gl(_: &Ctx) -> Outcome {
    let mut t = Tally::new();
    for p in [2, 3] {
        let f = field(p);
        for k in 1..=2 {
            let gl = enumerate_rank(f, k, k, k)?;
            for n in k..=3 {
                for a in enumerate_rank(f, n, k, k)? {
                    let mut hits = Vec::new();
                    for g in &gl {
                        if is_rcef(&a.mul(g)?) {
                            hits.push(g);
                        }
                    }
                    t.check(hits.len() == 1 && hits[0] == tau(&a)?.as_matrix());
                }
            }
        }
    }
    Ok(t)
}

/// Checks `tau(R B) = tau(B)` and `A tau(A)` in RCEF, for `R` in RCEF.
pub(crate) fn tau_right_invariance_trials(rng: &mut ChaCha8Rng, trials: u64, t: &mut Tally) -> Step {
    for _ in 0..trials {
        let f = pick_field(rng);
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=n);
        let k = rng.gen_range(1..=m);
        let r = random_rcef(rng, f, n, m);
        let b = random_of_rank(rng, f, m, k, k);
        let tb = tau(&b)?;
        t.check(is_rcef(&b.mul(tb.as_matrix())?) && tau(&r.mul(&b)?)? == tb);
    }
    Ok(())
}

fn tau_right_invariance(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    tau_right_invariance_trials(&mut ctx.rng("tau_right_invariance"), ctx.trials(500), &mut t)?;
    Ok(t)
}

fn echelon_closure(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng("echelon_closure");
    let mut t = Tally::new();
    for _ in 0..ctx.trials(500) {
        let f = pick_field(&mut rng);
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=n);
        let k = rng.gen_range(1..=m);
        let a = random_rcef(&mut rng, f, n, m);
        let b = random_rcef(&mut rng, f, m, k);
        t.check(is_rcef(&a.mul(&b)?));
        let a = random_rref(&mut rng, f, k, m);
        let b = random_rref(&mut rng, f, m, n);
        t.check(is_rref(&a.mul(&b)?));
    }
    Ok(t)
}

pub(crate) fn pivot_inverse_trials(rng: &mut ChaCha8Rng, trials: u64, t: &mut Tally) -> Step {
    for _ in 0..trials {
        let f = pick_field(rng);
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(1..=n);
        let a = random_rref(rng, f, k, n);
        t.check(a.mul(&pivot_right_inverse(&a)?)? == FFMatrix::identity(f, k));
    }
    Ok(())
}

fn pivot_inverse(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    pivot_inverse_trials(&mut ctx.rng("pivot_right_inverse"), ctx.trials(500), &mut t)?;
    Ok(t)
}

/// `rref(A)` is in RREF, is fixed by `rref`, and is the same for every `U A`.
pub(crate) fn rref_unique_on(rng: &mut ChaCha8Rng, a: &FFMatrix, t: &mut Tally) -> Step {
    let r = rank_and_rref(a);
    let ok = is_rref(&r.r)
        && rank_and_rref(&r.r).r == r.r
        && r.u.as_matrix().mul(a)? == r.r
        && rank_and_rref(&random_gl(rng, a.field(), a.rows()).as_matrix().mul(a)?).r == r.r;
    t.check(ok);
    Ok(())
}

fn rref_unique(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng("rref_unique");
    let mut t = Tally::new();
    let f2 = field(2);
    for n in 1..=4 {
        for code in 0..1u64 << (2 * n) {
            let data = (0..2 * n).map(|i| (code >> i & 1) as u32).collect();
            rref_unique_on(&mut rng, &FFMatrix::from_residues(f2, 2, n, data)?, &mut t)?;
        }
    }
    for _ in 0..ctx.trials(500) {
        let f = pick_field(&mut rng);
        let (r, c) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let a = random_matrix(&mut rng, f, r, c);
        rref_unique_on(&mut rng, &a, &mut t)?;
    }
    Ok(t)
}

/// `tau2` agrees across `decomps` factorizations `(B G, G^-1 C)`.
pub(crate) fn tau2_trials(rng: &mut ChaCha8Rng, trials: u64, decomps: usize, t: &mut Tally) -> Step {
    for _ in 0..trials {
        let f = pick_field(rng);
        let k = rng.gen_range(1..=3);
        let n = rng.gen_range(k..=k + 3);
        let b = random_of_rank(rng, f, n, k, k);
        let c = random_of_rank(rng, f, k, n, k);
        let gamma = tau2(&b.mul(&c)?)?;
        let mut ok = true;
        for _ in 0..decomps {
            let g = random_gl(rng, f, k);
            ok &= tau2_from_decomposition(&b.mul(g.as_matrix())?, &g.inverse().as_matrix().mul(&c)?)? == gamma;
        }
        t.check(ok);
    }
    Ok(())
}

fn tau2_well_defined(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    tau2_trials(&mut ctx.rng("tau2_well_defined"), ctx.trials(200), 10, &mut t)?;
    Ok(t)
}

fn gl_order(_: &Ctx) -> Outcome {
    let mut t = Tally::new();
    for (p, k) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2)] {
        let f = field(p);
        t.check(f.gl_order(k as u32) == Some(enumerate_rank(f, k, k, k)?.len() as u128));
    }
    Ok(t)
}

pub(crate) fn combinat_checks() -> Vec<CheckDef> {
    vec![
        CheckDef { name: "rref_rigid_equivalence", anchor: "rigid:rref_equivalence", kind: CheckKind::Certified, run: rref_rigid },
        CheckDef { name: "phi_roundtrip", anchor: "rigid:phi", kind: CheckKind::Certified, run: phi_roundtrip },
        CheckDef { name: "min_preimage_brute_force", anchor: "antilex:spread", kind: CheckKind::Certified, run: min_preimage_brute },
        CheckDef { name: "f5_example", anchor: "antilex:spread", kind: CheckKind::Certified, run: f5_example },
        CheckDef { name: "pi_factor_bijection", anchor: "boolean:pi_factor", kind: CheckKind::Certified, run: pi_factor_bijection },
        CheckDef { name: "bool_alg_order_total", anchor: "boolean:order", kind: CheckKind::Certified, run: bool_alg_total },
        CheckDef { name: "counting_oracles", anchor: "counting:oracles", kind: CheckKind::Certified, run: counting_oracles },
    ]
}

/// RREF iff `x -> A x` is rigid and every unit vector is a column.
pub(crate) fn rref_rigid_tally() -> Outcome {
    let mut t = Tally::new();
    let f2 = field(2);
    for k in 1..=2 {
        for n in k..=4 {
            for a in enumerate_rank(f2, k, n, k)? {
                let units = (0..k).all(|i| (0..n).any(|j| a.col(j).iter().enumerate().all(|(r, &v)| v == u32::from(r == i))));
                t.check(is_rref(&a) == (linear_map_is_rigid(&a) && units));
            }
        }
    }
    Ok(t)
}

fn rref_rigid(_: &Ctx) -> Outcome {
    rref_rigid_tally()
}

fn phi_roundtrip(_: &Ctx) -> Outcome {
    let mut t = Tally::new();
    for (p, k, ns) in [(2, 1, 2..=5), (2, 2, 4..=6), (2, 3, 8..=9), (3, 1, 3..=5), (3, 2, 9..=10), (5, 1, 5..=6)] {
        let order = AntilexOrder::new(field(p), k);
        for n in ns {
            for f in enumerate_epi(n, Codomain::Vectors(order))? {
                let a = phi(&f)?;
                t.check(is_rcef(&a) && a.rank() == k && matrix_rows_map(&a).as_ref() == Some(&f));
            }
        }
    }
    Ok(t)
}

/// Antilex-least solution of `A x = w` by scanning all of `F^n`.
pub(crate) fn brute_min_preimage(a: &FFMatrix, w: &[u32]) -> Option<Vec<u32>> {
    let order = AntilexOrder::new(a.field(), a.cols());
    let mut best: Option<Vec<u32>> = None;
    for x in order.iter() {
        if a.apply(&x) == w {
            let better = best.as_ref().map_or(true, |b| antilex_cmp(&x, b).map_or(false, |o| o.is_lt()));
            if better {
                best = Some(x);
            }
        }
    }
    best
}

fn min_preimage_brute(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng("min_preimage_brute_force");
    let mut t = Tally::new();
    for _ in 0..ctx.trials(200) {
        let (p, max_n) = *[(2, 12), (3, 7), (5, 5)].choose(&mut rng).expect("nonempty");
        let f = field(p);
        let n = rng.gen_range(1..=max_n);
        let k = rng.gen_range(1..=n);
        let a = random_rref(&mut rng, f, k, n);
        let w: Vec<u32> = (0..k).map(|_| rng.gen_range(0..p)).collect();
        t.check(brute_min_preimage(&a, &w) == Some(min_preimage(&a, &w)?));
    }
    Ok(t)
}

pub(crate) fn f5_matrix() -> FFMatrix {
    FFMatrix::from_rows(field(5), &[vec![1, 2, 0, 3, 0, 1], vec![0, 0, 1, 4, 0, 2], vec![0, 0, 0, 0, 1, 3]]).expect("valid entries")
}

fn f5_example(_: &Ctx) -> Outcome {
    let mut t = Tally::new();
    let a = f5_matrix();
    let mut ia = FFMatrix::zeros(field(5), 6, 3);
    for (row, col) in [(0, 0), (2, 1), (4, 2)] {
        ia.set(row, col, 1);
    }
    t.check(is_rref(&a));
    t.check(pivot_right_inverse(&a)? == ia);
    t.check(min_preimage(&a, &[1, 2, 3])? == vec![1, 0, 2, 0, 3, 0]);
    Ok(t)
}

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

fn pi_factor_bijection(_: &Ctx) -> Outcome {
    let mut t = Tally::new();
    for n in 1..=6 {
        for k in 1..=n.min(4) {
            let all = enumerate_ba(n, k)?;
            let mut images = BTreeSet::new();
            for a in &all {
                let (ord, sigma) = pi_factor(a);
                let back = ord.to_matrix().mul(&permutation_matrix(&sigma))?;
                t.check(ord.is_oba() && back == a.to_matrix());
                images.insert((ord.assignment().to_vec(), sigma));
            }
            t.check(images.len() == all.len() && all.len() == enumerate_oba(n, k)?.len() * factorial(k));
        }
    }
    Ok(t)
}

fn bool_alg_total(_: &Ctx) -> Outcome {
    let mut t = Tally::new();
    for k in 1..=5u32 {
        let size = 1u64 << k;
        for s in 0..size {
            for u in 0..size {
                let st = bool_alg_cmp(s, u);
                t.check(st == bool_alg_cmp(u, s).reverse() && (st.is_eq() == (s == u)));
                for v in 0..size {
                    if st.is_lt() && bool_alg_cmp(u, v).is_lt() {
                        t.check(bool_alg_cmp(s, v).is_lt());
                    }
                }
            }
        }
    }
    Ok(t)
}

pub(crate) fn counting_tally() -> Outcome {
    let mut t = Tally::new();
    let f2 = field(2);
    t.check(enumerate_rcef(f2, 3, 1)?.len() == 7);
    t.check(enumerate_rcef(f2, 3, 2)?.len() == 7);
    t.check(enumerate_rank(f2, 3, 2, 2)?.len() == 42);
    t.check(f2.gl_order(2) == Some(6));
    t.check(enumerate_rank(f2, 2, 2, 2)?.len() == 6);
    // partitions of 4 into 2 blocks, rigid surjections 4 -> 3
    t.check(enumerate_partitions(4, 2)?.count() == 7);
    t.check(enumerate_oba(4, 3)?.len() == 6);
    Ok(t)
}

fn counting_oracles(_: &Ctx) -> Outcome {
    counting_tally()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn random_of_rank_hits_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let f = pick_field(&mut rng);
            let (r, c) = (rng.gen_range(1..6), rng.gen_range(1..6));
            let k = rng.gen_range(1..=r.min(c));
            assert_eq!(random_of_rank(&mut rng, f, r, c, k).rank(), k);
            assert!(is_rcef(&random_rcef(&mut rng, f, r.max(c), r.min(c))));
        }
    }

    #[test]
    fn brute_force_agrees_on_small_case() {
        let a = FFMatrix::from_rows(field(2), &[vec![1, 1]]).unwrap();
        assert_eq!(brute_min_preimage(&a, &[1]), Some(vec![1, 0]));
    }
}
