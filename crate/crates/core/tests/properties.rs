use std::cmp::Ordering;

use proptest::prelude::*;

use ramsey_core::combinat::{antilex_cmp, matrix_rows_map, min_preimage, phi, AntilexOrder, Codomain, RigidSurjection};
use ramsey_core::gf_linalg::{is_rcef, is_rref, rank_and_rref, tau, FFMatrix, PrimeField};
use ramsey_core::metrics::{omega, NormSpec};
use ramsey_core::ramsey::{enumerate_structures, ColoringTable, Kind, Params};

fn field(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn matrix() -> impl Strategy<Value = FFMatrix> {
    (prop::sample::select(vec![2u32, 3, 5]), 1usize..=6, 1usize..=6).prop_flat_map(|(p, r, c)| {
        prop::collection::vec(0..p, r * c).prop_map(move |d| FFMatrix::from_residues(field(p), r, c, d).unwrap())
    })
}

fn full_column_rank() -> impl Strategy<Value = FFMatrix> {
    matrix().prop_filter("full column rank", |a| a.rank() == a.cols())
}

/// Rigid surjections `n -> F_p^k`, built as restricted-growth strings: each
/// position reuses a seen value or takes the next new one.
fn rigid_onto_vectors() -> impl Strategy<Value = RigidSurjection> {
    (prop::sample::select(vec![(2u32, 1usize), (2, 2), (3, 1), (2, 3)]), 0usize..=4).prop_flat_map(|((p, k), extra)| {
        let s = (p as usize).pow(k as u32);
        prop::collection::vec(any::<usize>(), s + extra).prop_map(move |picks| {
            let n = picks.len();
            let mut next = 0;
            let values: Vec<usize> = picks
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let forced = s - next == n - i;
                    let u = if next == 0 || forced { next } else { c % (next + 1) };
                    if u == next && next < s {
                        next += 1;
                        u
                    } else {
                        u.min(next - 1)
                    }
                })
                .collect();
            RigidSurjection::new(Codomain::Vectors(AntilexOrder::new(field(p), k)), values).unwrap()
        })
    })
}

fn vec_pair(p: u32, k: usize) -> impl Strategy<Value = (Vec<u32>, Vec<u32>, Vec<u32>)> {
    let v = || prop::collection::vec(0..p, k);
    (v(), v(), v())
}

fn lp_norm(dim: usize) -> impl Strategy<Value = NormSpec> {
    prop_oneof![Just(NormSpec::l1(dim)), Just(NormSpec::l2(dim)), Just(NormSpec::linf(dim)), (1.0f64..8.0).prop_map(move |p| NormSpec::p(dim, p).unwrap())]
}

fn polytope(dim: usize) -> impl Strategy<Value = NormSpec> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, dim), dim + 1..dim + 5)
        .prop_filter_map("full-dimensional hull", |pts| NormSpec::from_points(&pts).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rref_is_idempotent_and_row_invariant(a in matrix()) {
        let r = rank_and_rref(&a);
        prop_assert!(is_rref(&r.r));
        prop_assert_eq!(&rank_and_rref(&r.r).r, &r.r);
        prop_assert_eq!(r.u.as_matrix().mul(&a).unwrap(), r.r.clone());
        prop_assert_eq!(r.rank, a.rank());
    }

    #[test]
    fn tau_puts_into_rcef_and_is_left_invariant((b, r) in full_column_rank().prop_flat_map(|b| {
        let (f, m) = (b.field(), b.rows());
        let r = (m..=m + 2)
            .prop_flat_map(move |n| prop::collection::vec(0..f.order(), n * m).prop_map(move |d| FFMatrix::from_residues(f, m, n, d).unwrap()));
        (Just(b), r.prop_filter("full row rank", |r| r.rank() == r.rows()))
    })) {
        let t = tau(&b).unwrap();
        prop_assert!(is_rcef(&b.mul(t.as_matrix()).unwrap()));
        let r = rank_and_rref(&r).r.transpose();
        prop_assert!(is_rcef(&r));
        prop_assert_eq!(tau(&r.mul(&b).unwrap()).unwrap(), t);
    }

    #[test]
    fn antilex_is_a_total_order((a, b, c) in vec_pair(3, 4)) {
        let ab = antilex_cmp(&a, &b).unwrap();
        prop_assert_eq!(ab.reverse(), antilex_cmp(&b, &a).unwrap());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        if ab != Ordering::Greater && antilex_cmp(&b, &c).unwrap() != Ordering::Greater {
            prop_assert_ne!(antilex_cmp(&a, &c).unwrap(), Ordering::Greater);
        }
        let o = AntilexOrder::new(field(3), 4);
        prop_assert_eq!(o.rank(&a).cmp(&o.rank(&b)), ab);
        prop_assert_eq!(o.unrank(o.rank(&a)), a);
    }

    #[test]
    fn min_preimage_is_least_solution(a in matrix().prop_filter("small onto", |a| a.rank() == a.rows() && a.cols() <= 5), idx in any::<usize>()) {
        let a = rank_and_rref(&a).r;
        let f = a.field();
        let cod = AntilexOrder::new(f, a.rows());
        let w = cod.unrank(idx % cod.size().unwrap());
        let x = min_preimage(&a, &w).unwrap();
        prop_assert_eq!(a.apply(&x), w.clone());
        let dom = AntilexOrder::new(f, a.cols());
        let least = dom.iter().find(|y| a.apply(y) == w).unwrap();
        prop_assert_eq!(x, least);
    }

    #[test]
    fn phi_round_trips(f in rigid_onto_vectors()) {
        let a = phi(&f).unwrap();
        prop_assert!(is_rcef(&a));
        prop_assert_eq!(a.rank(), a.cols());
        prop_assert_eq!(matrix_rows_map(&a), Some(f));
    }

    #[test]
    fn coloring_csv_round_trips(n in 1usize..=4, colors in prop::collection::vec(0u32..3, 15)) {
        let params = Params { p: 2, n, k: 1 };
        let universe = enumerate_structures(Kind::Grassmannian, &params).unwrap();
        let c = ColoringTable::from_colors(Kind::Grassmannian, params, 3, &universe, &colors[..universe.len()]).unwrap();
        prop_assert_eq!(ColoringTable::parse_csv(&c.to_csv()).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_axioms(n in prop_oneof![lp_norm(3), polytope(3)], x in prop::collection::vec(-3.0f64..3.0, 3), y in prop::collection::vec(-3.0f64..3.0, 3), s in -4.0f64..4.0) {
        let nx = n.eval(&x).unwrap();
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let scaled: Vec<f64> = x.iter().map(|a| s * a).collect();
        prop_assert!(nx >= 0.0);
        prop_assert!(n.eval(&sum).unwrap() <= nx + n.eval(&y).unwrap() + 1e-9);
        prop_assert!((n.eval(&scaled).unwrap() - s.abs() * nx).abs() <= 1e-9 * (1.0 + nx));
        prop_assert!(n.eval(&[0.0; 3]).unwrap() == 0.0);
        // Hölder pairing with the dual norm
        prop_assert!(x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() <= nx * n.dual_eval(&y).unwrap() + 1e-7);
    }

    #[test]
    fn norm_json_round_trips(n in prop_oneof![lp_norm(2), polytope(2)]) {
        prop_assert_eq!(NormSpec::parse_json(&n.to_json()).unwrap(), n);
    }

    #[test]
    fn omega_symmetric_and_vanishing(m in polytope(2), n in polytope(2)) {
        let (a, b) = (omega(&m, &n).unwrap(), omega(&n, &m).unwrap());
        prop_assert!((a.value - b.value).abs() <= 1e-9);
        prop_assert!(a.value >= 0.0);
        prop_assert_eq!(omega(&m, &m).unwrap().value, 0.0);
    }
}

#[test]
fn omega_between_lp_spaces() {
    // log of d^{|1/p - 1/q|}
    let inv = |p: f64| if p.is_infinite() { 0.0 } else { 1.0 / p };
    for d in 2..=3 {
        for (p, q) in [(1.0, 2.0), (1.0, f64::INFINITY), (2.0, f64::INFINITY)] {
            let w = omega(&NormSpec::p(d, p).unwrap(), &NormSpec::p(d, q).unwrap()).unwrap();
            let want = (inv(p) - inv(q)).abs() * (d as f64).ln();
            assert!((w.value - want).abs() <= 1e-9, "d={d} p={p} q={q}: {} vs {want}", w.value);
        }
    }
}
