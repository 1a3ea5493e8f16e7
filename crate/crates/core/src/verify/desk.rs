//! Desk-scale Ramsey searches with known answers.

use super::{CheckDef, CheckKind, Ctx, Outcome, Tally};
use crate::gf_linalg::PrimeField;
use crate::ramsey::{enumerate_rcef, exhaust_colorings, min_n_search, tau_surjective_on, ExhaustOptions, ExhaustReport, Kind, Params};

pub(crate) fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef { name: "fano_all_pass_n3", anchor: "ramsey:grassmannian", kind: CheckKind::Certified, run: fano_all_pass },
        CheckDef { name: "fano_counterexample_n2", anchor: "ramsey:grassmannian", kind: CheckKind::Certified, run: fano_counterexample },
        CheckDef { name: "min_n_is_3", anchor: "ramsey:grassmannian", kind: CheckKind::Certified, run: min_n_is_3 },
        CheckDef { name: "full_rank_matches_grassmannian", anchor: "ramsey:full_rank", kind: CheckKind::Certified, run: full_rank_matches },
        CheckDef { name: "canonize_agrees", anchor: "ramsey:canonization", kind: CheckKind::Certified, run: canonize_agrees },
        CheckDef { name: "jobs_invariant", anchor: "ramsey:determinism", kind: CheckKind::Certified, run: jobs_invariant },
        CheckDef { name: "tau_surjective", anchor: "ramsey:uniqueness", kind: CheckKind::Certified, run: tau_surjective },
    ]
}

fn fano(n: usize) -> Params {
    Params { p: 2, n, k: 1 }
}

fn run(kind: Kind, n: usize, opts: &ExhaustOptions) -> Result<ExhaustReport, crate::ramsey::RamseyError> {
    exhaust_colorings(kind, &fano(n), 2, 2, opts)
}

/// The report without its wall-clock field.
fn stable(r: &ExhaustReport) -> serde_json::Value {
    let mut v = r.to_json();
    if let Some(o) = v.as_object_mut() {
        o.remove("millis");
    }
    v
}

fn opts(ctx: &Ctx) -> ExhaustOptions {
    ExhaustOptions { jobs: ctx.jobs, ..Default::default() }
}

fn fano_all_pass(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    let r = run(Kind::Grassmannian, 3, &opts(ctx))?;
    t.check(r.all_pass() && r.universe == 7);
    Ok(t)
}

fn fano_counterexample(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    t.check(!run(Kind::Grassmannian, 2, &opts(ctx))?.all_pass());
    Ok(t)
}

fn min_n_is_3(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    let r = min_n_search(Kind::Grassmannian, 2, 1, 2, 2, 1..6, &opts(ctx))?;
    t.check(r.min_n == Some(3));
    Ok(t)
}

fn full_rank_matches(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    for n in 1..=3 {
        let a = run(Kind::FullRank, n, &opts(ctx))?;
        let b = run(Kind::Grassmannian, n, &opts(ctx))?;
        t.check(a.all_pass() == b.all_pass() && a.universe == b.universe);
    }
    Ok(t)
}

fn canonize_agrees(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    for kind in [Kind::Grassmannian, Kind::FullRank] {
        for n in 2..=3 {
            let plain = run(kind, n, &opts(ctx))?;
            let canon = run(kind, n, &ExhaustOptions { canonize: true, ..opts(ctx) })?;
            t.check(plain.outcome == canon.outcome);
        }
    }
    Ok(t)
}

fn jobs_invariant(_: &Ctx) -> Outcome {
    let mut t = Tally::new();
    for kind in [Kind::Grassmannian, Kind::FullRank] {
        for n in 2..=3 {
            let one = run(kind, n, &ExhaustOptions { jobs: 1, ..Default::default() })?;
            let four = run(kind, n, &ExhaustOptions { jobs: 4, ..Default::default() })?;
            t.check(stable(&one) == stable(&four));
        }
    }
    let sampled = |jobs| exhaust_colorings(Kind::Grassmannian, &fano(3), 3, 2, &ExhaustOptions { jobs, samples: Some(64), seed: 7, canonize: false });
    t.check(stable(&sampled(1)?) == stable(&sampled(4)?));
    Ok(t)
}

fn tau_surjective(_: &Ctx) -> Outcome {
    let mut t = Tally::new();
    for p in [2, 3] {
        let f = PrimeField::new(p)?;
        for k in 1..=2 {
            for n in k..=3 {
                for r in enumerate_rcef(f, n, k)? {
                    t.check(tau_surjective_on(&r)?);
                }
            }
        }
    }
    Ok(t)
}
