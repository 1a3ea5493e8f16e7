//! Numerical checks: metric axioms, exact examples and the appendix
//! constructions.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{CheckDef, CheckKind, Ctx, Outcome, Step, Tally};
use crate::metrics::{
    alpha_extrinsic, amalgam_norm, auerbach_basis, diameter_claim_check, dual_min_lift, extrinsic_witness, gap_metric, inv_norm,
    matrix_to_rows, nu2_tools, omega, op_norm, oscillation, polyhedral_distance, BmOptions, LinOp, MetricsError, NormSpec, SubspaceRep,
    SLACK,
};

pub(crate) fn axiom_checks() -> Vec<CheckDef> {
    vec![
        CheckDef { name: "omega_examples", anchor: "metrics:omega", kind: CheckKind::Certified, run: omega_examples },
        CheckDef { name: "omega_axioms", anchor: "metrics:omega", kind: CheckKind::Certified, run: omega_axioms },
        CheckDef { name: "gap_sine", anchor: "metrics:gap", kind: CheckKind::Certified, run: gap_sine },
        CheckDef { name: "alpha_example", anchor: "metrics:alpha", kind: CheckKind::Certified, run: alpha_example },
        CheckDef { name: "norm_axioms", anchor: "metrics:norm", kind: CheckKind::Certified, run: norm_axioms },
        CheckDef { name: "multiplication_isometry", anchor: "metrics:isometry", kind: CheckKind::Certified, run: multiplication_isometry },
    ]
}

pub(crate) fn appendix_checks() -> Vec<CheckDef> {
    vec![
        CheckDef { name: "alpha_bounds", anchor: "appendix:alpha_bounds", kind: CheckKind::Certified, run: alpha_bounds },
        CheckDef { name: "extrinsic_witness", anchor: "appendix:alpha_bounds", kind: CheckKind::Certified, run: extrinsic_agreement },
        CheckDef { name: "amalgam_properties", anchor: "appendix:amalgamation", kind: CheckKind::Consistency, run: amalgam_properties },
        CheckDef { name: "auerbach_map", anchor: "appendix:auerbach", kind: CheckKind::Consistency, run: auerbach_map },
        CheckDef { name: "dual_lift_routes", anchor: "appendix:dual_lift", kind: CheckKind::Certified, run: dual_lift_routes },
        CheckDef { name: "nu2_composite_bound", anchor: "appendix:nu2", kind: CheckKind::Consistency, run: nu2_composite_bound },
        CheckDef { name: "diameter_claim", anchor: "appendix:nu2", kind: CheckKind::Consistency, run: diameter_claim },
        CheckDef { name: "oscillation", anchor: "appendix:oscillation", kind: CheckKind::Certified, run: oscillation_check },
    ]
}

fn cert_margin(exact: bool) -> f64 {
    if exact {
        f64::INFINITY
    } else {
        -1.0
    }
}

fn worst(t: &mut Tally, margins: &[f64]) {
    t.margin(margins.iter().copied().fold(f64::INFINITY, f64::min));
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_dmatrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0))
}

/// Symmetric hull of a few random points, full-dimensional.
pub(crate) fn random_polytope(rng: &mut ChaCha8Rng, dim: usize) -> NormSpec {
    loop {
        let pts: Vec<Vec<f64>> = (0..dim + 1).map(|_| random_vec(rng, dim)).collect();
        if let Ok(n) = NormSpec::from_points(&pts) {
            return n;
        }
    }
}

/// One of each of the antipodal pairs.
fn half(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| q.iter().zip(p).all(|(a, b)| (a + b).abs() <= 1e-12)) {
            out.push(p.clone());
        }
    }
    out
}

fn omega_examples(_: &Ctx) -> Outcome {
    let mut t = Tally::new();
    for (m, want) in [(NormSpec::l1(2), 2f64.ln()), (NormSpec::l2(2), 2f64.sqrt().ln())] {
        let w = omega(&m, &NormSpec::linf(2))?;
        worst(&mut t, &[1e-12 - (w.value - want).abs(), cert_margin(w.certificate.is_exact())]);
    }
    Ok(t)
}

fn omega_axioms(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng("omega_axioms");
    let mut t = Tally::new();
    for _ in 0..ctx.trials(30) {
        let [a, b, c] = [0, 1, 2].map(|_| random_polytope(&mut rng, 2));
        let (ab, ba, bc, ac) = (omega(&a, &b)?, omega(&b, &a)?, omega(&b, &c)?, omega(&a, &c)?);
        let exact = [&ab, &ba, &bc, &ac].iter().all(|v| v.certificate.is_exact());
        worst(
            &mut t,
            &[
                1e-9 - (ab.value - ba.value).abs(),
                ab.value + bc.value + 1e-9 - ac.value,
                ab.value,
                -omega(&a, &a)?.value.abs(),
                cert_margin(exact),
            ],
        );
    }
    Ok(t)
}

pub(crate) fn gap_sine_tally() -> Outcome {
    let mut t = Tally::new();
    let e = NormSpec::l2(2);
    let u = SubspaceRep::new(e.clone(), DMatrix::from_column_slice(2, 1, &[1.0, 0.0]))?;
    for i in 1..=20 {
        let theta = i as f64 * std::f64::consts::FRAC_PI_2 / 20.0;
        let w = SubspaceRep::new(e.clone(), DMatrix::from_column_slice(2, 1, &[theta.cos(), theta.sin()]))?;
        t.close(gap_metric(&u, &w)?.value, theta.sin(), 1e-6);
    }
    Ok(t)
}

fn gap_sine(_: &Ctx) -> Outcome {
    gap_sine_tally()
}

fn alpha_example(_: &Ctx) -> Outcome {
    let mut t = Tally::new();
    let a = alpha_extrinsic(&NormSpec::linf(2), &NormSpec::linf(2), &NormSpec::l1(2))?;
    worst(&mut t, &[1e-8 - (a.value - 1.0).abs(), cert_margin(a.certificate.is_exact())]);
    Ok(t)
}

fn random_norm(rng: &mut ChaCha8Rng, dim: usize) -> Result<NormSpec, MetricsError> {
    Ok(match rng.gen_range(0..5) {
        0 => NormSpec::p(dim, rng.gen_range(1.0..6.0))?,
        1 => NormSpec::linf(dim),
        2 => random_polytope(rng, dim),
        3 => loop {
            if let Ok(n) = NormSpec::pushforward(matrix_to_rows(&random_dmatrix(rng, dim + 1, dim)), NormSpec::l1(dim + 1)) {
                break n;
            }
        },
        _ => NormSpec::max_sum(vec![NormSpec::l2(1), NormSpec::p(dim - 1, 3.0)?])?,
    })
}

fn norm_axioms(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng("norm_axioms");
    let mut t = Tally::new();
    for _ in 0..ctx.trials(200) {
        let dim = rng.gen_range(2..=3);
        let n = random_norm(&mut rng, dim)?;
        let (x, y, f) = (random_vec(&mut rng, dim), random_vec(&mut rng, dim), random_vec(&mut rng, dim));
        let s = rng.gen_range(-3.0..3.0);
        let (nx, ny) = (n.eval(&x)?, n.eval(&y)?);
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let scaled: Vec<f64> = x.iter().map(|a| s * a).collect();
        let fx: f64 = f.iter().zip(&x).map(|(a, b)| a * b).sum();
        let tol = 1e-9 * (1.0 + nx + ny);
        worst(
            &mut t,
            &[
                nx + ny + tol - n.eval(&sum)?,
                tol - (n.eval(&scaled)? - s.abs() * nx).abs(),
                nx,
                n.dual_eval(&f)? * nx + tol - fx.abs(),
            ],
        );
    }
    Ok(t)
}

/// Left multiplication by an isometric embedding keeps `||A - B||` and the
/// pushforward norms; a non-isometric one does not.
fn multiplication_isometry(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng("multiplication_isometry");
    let mut t = Tally::new();
    let (k, n) = (2, 3);
    let x = NormSpec::linf(k);
    let pad = |m: &DMatrix<f64>| {
        let mut out = DMatrix::zeros(m.nrows() + 1, m.ncols());
        out.rows_mut(0, m.nrows()).copy_from(m);
        out
    };
    for _ in 0..ctx.trials(50) {
        let a = random_dmatrix(&mut rng, n, k);
        let b = random_dmatrix(&mut rng, n, k);
        let d = op_norm(&LinOp::new(&a - &b, x.clone(), NormSpec::linf(n))?)?;
        let dj = op_norm(&LinOp::new(pad(&a) - pad(&b), x.clone(), NormSpec::linf(n + 1))?)?;
        let op = LinOp::new(a.clone(), x.clone(), NormSpec::linf(n))?;
        let opj = LinOp::new(pad(&a), x.clone(), NormSpec::linf(n + 1))?;
        let margins = [1e-9 - (d.value - dj.value).abs(), if op.is_injective() { 1e-9 - omega(&op.pushforward()?, &opj.pushforward()?)?.value } else { 0.0 }];
        worst(&mut t, &margins);
    }
    let a = DMatrix::from_row_slice(n, k, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let r = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0]));
    let d = op_norm(&LinOp::new(a.clone(), x.clone(), NormSpec::linf(n))?)?.value;
    let dr = op_norm(&LinOp::new(&r * &a, x, NormSpec::linf(n))?)?.value;
    t.margin((dr - d).abs() - 0.5);
    Ok(t)
}

/// Norm whose ball sits between `Ball(X) / lambda` and `lambda Ball(X)`:
/// rescaled vertices of `X` plus a few points at `X`-norm in that range.
fn in_omega_ball(rng: &mut ChaCha8Rng, x: &NormSpec, lambda: f64) -> Result<NormSpec, MetricsError> {
    let xv = x.vertices().ok_or_else(|| MetricsError::InvalidNorm("polyhedral X expected".into()))?;
    let mut pts: Vec<Vec<f64>> = half(&xv).iter().map(|v| {
        let s = rng.gen_range(1.0 / lambda..=lambda);
        v.iter().map(|c| s * c).collect()
    }).collect();
    for _ in 0..2 {
        let p = random_vec(rng, x.dim());
        let s = rng.gen_range(1.0 / lambda..=lambda) / x.eval(&p)?;
        pts.push(p.iter().map(|c| s * c).collect());
    }
    NormSpec::from_points(&pts)
}

/// `omega(m, n) / lambda <= alpha_X(m, n) <= lambda omega(m, n)` for `m`, `n`
/// within `log lambda` of `X`.
pub(crate) fn alpha_bounds_trials(rng: &mut ChaCha8Rng, trials: u64, t: &mut Tally) -> Step {
    for i in 0..trials {
        let dim = 2 + (i % 2) as usize;
        let lambda = if rng.gen_bool(0.5) { 1.5 } else { 2.0 };
        let x = random_polytope(rng, dim);
        let m = in_omega_ball(rng, &x, lambda)?;
        let n = in_omega_ball(rng, &x, lambda)?;
        let (xm, xn) = (omega(&x, &m)?, omega(&x, &n)?);
        let w = omega(&m, &n)?;
        let a = alpha_extrinsic(&x, &m, &n)?;
        let exact = [&xm, &xn, &w, &a].iter().all(|v| v.certificate.is_exact());
        worst(
            t,
            &[
                lambda.ln() + 1e-9 - xm.value.max(xn.value),
                a.value - w.value / lambda + SLACK,
                lambda * w.value - a.value + SLACK,
                cert_margin(exact),
            ],
        );
    }
    Ok(())
}

fn alpha_bounds(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    alpha_bounds_trials(&mut ctx.rng("alpha_bounds"), ctx.trials(20), &mut t)?;
    Ok(t)
}

/// `x -> (f.x)_f` over half the facets of `m`, padded with zero rows to `rows`.
fn facet_operator(x: &NormSpec, m: &NormSpec, rows: usize) -> Result<LinOp, MetricsError> {
    let f = half(&m.facets().ok_or_else(|| MetricsError::InvalidNorm("polyhedral norm expected".into()))?);
    let k = x.dim();
    LinOp::new(DMatrix::from_fn(rows, k, |i, j| f.get(i).map_or(0.0, |r| r[j])), x.clone(), NormSpec::linf(rows))
}

pub(crate) fn extrinsic_trials(rng: &mut ChaCha8Rng, trials: u64, t: &mut Tally) -> Step {
    for _ in 0..trials {
        let x = random_polytope(rng, 2);
        let m = random_polytope(rng, 2);
        let n = random_polytope(rng, 2);
        let rows = half(&m.facets().unwrap_or_default()).len().max(half(&n.facets().unwrap_or_default()).len());
        let tm = facet_operator(&x, &m, rows)?;
        let un = facet_operator(&x, &n, rows)?;
        let w = extrinsic_witness(&x, &m, &n, &tm, &un)?;
        let a = alpha_extrinsic(&x, &m, &n)?;
        worst(
            t,
            &[
                1e-7 - (w.distance.value - a.value).abs(),
                1e-9 - omega(&w.t_prime.pushforward()?, &m)?.value,
                1e-9 - omega(&w.u_prime.pushforward()?, &n)?.value,
                cert_margin(w.distance.certificate.is_exact() && a.certificate.is_exact()),
            ],
        );
    }
    Ok(())
}

fn extrinsic_agreement(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    extrinsic_trials(&mut ctx.rng("extrinsic_witness"), ctx.trials(15), &mut t)?;
    Ok(t)
}

/// Properties i) and ii) of the amalgamated norm for a random `T` with
/// `||T|| = 1`.
pub(crate) fn amalgam_trials(rng: &mut ChaCha8Rng, trials: u64, t: &mut Tally) -> Step {
    let mut done = 0;
    while done < trials {
        let a = rng.gen_range(1..=3);
        let b = rng.gen_range(a..=3);
        let f = match rng.gen_range(0..3) {
            0 => NormSpec::linf(a),
            1 => NormSpec::l1(a),
            _ if a >= 2 => random_polytope(rng, a),
            _ => NormSpec::linf(a),
        };
        // sampled gaps in H stay cheap only for small subspaces
        let g = match rng.gen_range(0..3) {
            0 if a <= 2 => NormSpec::l2(b),
            1 => NormSpec::l1(b),
            _ => NormSpec::linf(b),
        };
        let raw = LinOp::new(random_dmatrix(rng, b, a), f.clone(), g.clone())?;
        if !raw.is_injective() {
            continue;
        }
        let s = op_norm(&raw)?.value;
        let op = LinOp::new(&raw.matrix / s, f.clone(), g.clone())?;
        let am = amalgam_norm(&f, &g, &op)?;
        let (p1, p2) = (am.property_i()?, am.property_ii()?);
        let m1 = if p1.applicable { p1.margin() + 1e-6 + p1.lhs.tolerance } else { f64::INFINITY };
        let m2 = if p2.applicable { p2.margin() + 1e-6 + p2.lhs.tolerance } else { f64::INFINITY };
        worst(t, &[m1, m2, 1e-6 - am.isometry_defect]);
        done += 1;
    }
    Ok(())
}

fn amalgam_properties(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    amalgam_trials(&mut ctx.rng("amalgam_properties"), ctx.trials(15), &mut t)?;
    Ok(t)
}

/// Subspaces `V`, `W` of `l_inf^4` with `k Lambda < 1/3`: the map sending an
/// Auerbach basis of `V` to nearest points of `Ball(W)` has
/// `||T|| ||T^{-1}|| <= (1 + k Lambda) / (1 - k Lambda)`.
pub(crate) fn auerbach_trials(rng: &mut ChaCha8Rng, trials: u64, t: &mut Tally) -> Step {
    let (n, k) = (4, 2);
    let e = NormSpec::linf(n);
    let facets = e.facets().ok_or_else(|| MetricsError::InvalidNorm("l_inf has facets".into()))?;
    let mut done = 0;
    while done < trials {
        let bv = random_dmatrix(rng, n, k);
        let eps = rng.gen_range(0.005..0.08);
        let bw = &bv + random_dmatrix(rng, n, k) * eps;
        let (Ok(v), Ok(w)) = (SubspaceRep::new(e.clone(), bv.clone()), SubspaceRep::new(e.clone(), bw.clone())) else {
            continue;
        };
        let lam = gap_metric(&v, &w)?.value;
        let kl = k as f64 * lam;
        if kl >= 1.0 / 3.0 {
            continue;
        }
        let ab = auerbach_basis(&v.induced()?, 8, done)?;
        let xs = &bv * ab.matrix();
        let w_rows = matrix_to_rows(&bw);
        let svd = bw.clone().svd(true, true);
        let mut tm = DMatrix::zeros(k, k);
        let mut near = f64::INFINITY;
        for j in 0..k {
            let xj: Vec<f64> = xs.column(j).iter().copied().collect();
            let (dist, y) = polyhedral_distance(&xj, &facets, &facets, Some(&w_rows))?;
            near = near.min(lam + 1e-9 - dist);
            let c = svd.solve(&DVector::from_vec(y), 1e-13).map_err(|e| MetricsError::Lp(e.into()))?;
            tm.set_column(j, &c);
        }
        let domain = NormSpec::pushforward(matrix_to_rows(&xs), e.clone())?;
        let op = LinOp::new(tm, domain, w.induced()?)?;
        let (nt, ni) = (op_norm(&op)?.value, inv_norm(&op)?.value);
        worst(t, &[near, (1.0 + kl) / (1.0 - kl) + 1e-7 - nt * ni]);
        done += 1;
    }
    Ok(())
}

fn auerbach_map(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    auerbach_trials(&mut ctx.rng("auerbach_map"), ctx.trials(15), &mut t)?;
    Ok(t)
}

/// The least lift through `T^t` equals the dual of the pushforward norm.
pub(crate) fn dual_lift_trials(rng: &mut ChaCha8Rng, trials: u64, t: &mut Tally) -> Step {
    let mut done = 0;
    while done < trials {
        let n = rng.gen_range(1..=5);
        let k = rng.gen_range(1..=n);
        let codomain = if done % 2 == 0 { NormSpec::l2(n) } else { NormSpec::linf(n) };
        let op = LinOp::new(random_dmatrix(rng, n, k), NormSpec::l2(k), codomain)?;
        if !op.is_injective() {
            continue;
        }
        let f = random_vec(rng, k);
        let lift = dual_min_lift(&op, &f)?;
        let other = op.pushforward()?.dual_eval(&f)?;
        let back: Vec<f64> = (0..k).map(|c| (0..n).map(|i| op.matrix[(i, c)] * lift.g[i]).sum()).collect();
        let resid = back.iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst(t, &[1e-7 - (lift.value.value - other).abs(), 1e-8 - resid, cert_margin(lift.value.certificate.is_exact())]);
        done += 1;
    }
    Ok(())
}

fn dual_lift_routes(ctx: &Ctx) -> Outcome {
    let mut t = Tally::new();
    dual_lift_trials(&mut ctx.rng("dual_lift_routes"), ctx.trials(100), &mut t)?;
    Ok(t)
}

fn random_factor(rng: &mut ChaCha8Rng, e: &NormSpec) -> Result<LinOp, MetricsError> {
    LinOp::new(random_dmatrix(rng, e.dim(), 2), NormSpec::l2(2), e.clone())
}

/// At `lambda = exp(omega)` the pair is in `D_k(lambda)` and the larger
/// composite bound is exactly `lambda`.
fn nu2_composite_bound(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng("nu2_composite_bound");
    let mut t = Tally::new();
    let e = NormSpec::linf(4);
    for _ in 0..ctx.trials(10) {
        let (t0, t1) = (random_factor(&mut rng, &e)?, random_factor(&mut rng, &e)?);
        let lambda = nu2_tools(&t0, &t1, 1.0)?.omega.value.exp();
        let r = nu2_tools(&t0, &t1, lambda)?;
        let top = r.composite_norm.value.max(r.composite_inv_norm.value);
        let ok = r.in_dk_lambda && r.membership_implies_bounds() && r.bounds_imply_membership();
        worst(&mut t, &[1e-7 - (top.ln() - r.omega.value).abs(), cert_margin(ok)]);
    }
    Ok(t)
}

fn diameter_claim(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng("diameter_claim");
    let mut t = Tally::new();
    let e = NormSpec::linf(4);
    let opts = BmOptions { starts: 3, iters: 150, seed: 1, jobs: 1, extra_starts: Vec::new() };
    for _ in 0..ctx.trials(2) {
        let mut pairs = Vec::new();
        let mut lambda = 1.0f64;
        for _ in 0..2 {
            let r = nu2_tools(&random_factor(&mut rng, &e)?, &random_factor(&mut rng, &e)?, 1.0)?;
            lambda = lambda.max(r.omega.value.exp());
            pairs.push(r.pair);
        }
        let c = diameter_claim_check(&pairs[0], &pairs[1], lambda, &opts)?;
        t.below(c.omega2.value, c.bound, c.omega2.tolerance + SLACK);
    }
    Ok(t)
}

fn l2_dist(a: &Vec<f64>, b: &Vec<f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Oscillation matches a brute-force maximum for 1-Lipschitz colorings and
/// rejects a 2-Lipschitz one.
fn oscillation_check(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng("oscillation");
    let mut t = Tally::new();
    let abs = |a: &f64, b: &f64| (a - b).abs();
    for _ in 0..ctx.trials(50) {
        let pts: Vec<Vec<f64>> = (0..12).map(|_| random_vec(&mut rng, 2)).collect();
        let center = random_vec(&mut rng, 2);
        let cap = rng.gen_range(0.1..2.0);
        let color = |p: &Vec<f64>| l2_dist(p, &center).min(cap);
        let osc = oscillation(&pts, l2_dist, color, abs)?;
        let colors: Vec<f64> = pts.iter().map(color).collect();
        let brute = colors.iter().flat_map(|a| colors.iter().map(move |b| (a - b).abs())).fold(0.0, f64::max);
        let doubled = |p: &Vec<f64>| 2.0 * l2_dist(p, &center);
        let pair = vec![center.clone(), vec![center[0] + 0.5, center[1]]];
        let rejects = oscillation(&pair, l2_dist, doubled, abs).is_err();
        worst(&mut t, &[1e-12 - (osc - brute).abs(), cert_margin(rejects)]);
    }
    Ok(t)
}
