//! `ramsey`: echelon decompositions, desk-scale Ramsey searches, norm
//! metrics and the verification suites from the command line.
//!
//! Exit codes: 0 success, 1 refutation (no witness, counterexample, failed
//! certified check), 2 usage or input error.

use std::fs;
use std::io::Write;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ramsey_core::gf_linalg::{full_rank_decomposition, rcef_decompose, tau2, FFMatrix};
use ramsey_core::metrics::{
    alpha_extrinsic, auerbach_basis, bm_upper, dual_min_lift, gap_metric, inv_norm, omega, op_norm, BmOptions, LinOp, MetricValue, NormSpec,
    SubspaceRep,
};
use ramsey_core::ramsey::{
    enumerate_structures, exhaust_colorings, min_n_search, witness_search, ColoringTable, ExhaustOptions, Kind, Params, SearchOutcome,
};
use ramsey_core::verify::{check_names, run_suite, SuiteConfig, SUITES};

#[derive(Parser)]
#[command(name = "ramsey", version, about = "Ramsey factors of matrices over prime fields, and norm metrics on R^k")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Column-echelon decomposition `A tau = R` of a full column rank matrix.
    Rcef(IoArgs),
    /// The `GL(k)` factor of a square matrix of rank `k`.
    Tau2(IoArgs),
    /// List the encoded structures of a kind.
    Enumerate(EnumerateArgs),
    /// Search a coloring for a monochromatic witness.
    Witness(WitnessArgs),
    /// Check every coloring (or a seeded sample) for a witness.
    Exhaust(ExhaustArgs),
    /// Least `n` in a range for which every coloring has a witness.
    MinN(MinNArgs),
    /// Norm evaluations and metrics; prints `{value, certificate, method, tolerance}`.
    Metric(MetricArgs),
    /// Run verification suites and print the JSON report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Matrix text file: `p rows cols`, then the rows.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StructureArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: Kind,
    /// Field order; ignored by `boolean` and `epi`.
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    s: StructureArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    /// Coloring CSV with header `kind,p,n,k,r`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    s: StructureArgs,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// Random colorings to sample instead of exhausting; needs --seed.
    #[arg(long, requires = "seed")]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Skip colorings that are not least in their symmetry orbit.
    #[arg(long, conflicts_with = "budget")]
    canonize: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl SearchArgs {
    fn options(&self) -> ExhaustOptions {
        ExhaustOptions { jobs: self.jobs.max(1), canonize: self.canonize, samples: self.budget, seed: self.seed.unwrap_or(0) }
    }
}

#[derive(Args)]
struct ExhaustArgs {
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    n: usize,
    /// Also write a counterexample, if any, as coloring CSV.
    #[arg(long)]
    counterexample: Option<PathBuf>,
}

#[derive(Args)]
struct MinNArgs {
    #[command(flatten)]
    search: SearchArgs,
    /// `lo..hi` (half-open) or `lo..=hi`.
    #[arg(long, value_parser = parse_range, default_value = "1..8")]
    n_range: Range<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricKind {
    /// `||vec||_m`.
    Eval,
    Omega,
    OpNorm,
    InvNorm,
    Gap,
    Alpha,
    /// Banach–Mazur upper bound; needs --seed.
    Bm,
    DualLift,
    /// Needs --seed.
    Auerbach,
}

#[derive(Args)]
struct MetricArgs {
    #[arg(value_enum)]
    what: MetricKind,
    /// Norm as `lP:DIM` (`l1:2`, `linf:3`, `l2.5:2`) or `@file.json`.
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Reference norm for `alpha`.
    #[arg(long)]
    x: Option<String>,
    /// Operator JSON `{matrix, domain, codomain}`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Subspace bases for `gap`: rows of the ambient-by-k matrix, as JSON or `@file`.
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    w: Option<String>,
    /// Vector (comma separated or JSON) for `eval` and `dual-lift`.
    #[arg(long)]
    vec: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Optimizer starts for `bm` and `auerbach`.
    #[arg(long)]
    budget: Option<usize>,
    /// Refute when the reported tolerance exceeds this.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run, comma separated; all when omitted.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    /// Run only these `suite/check` names, comma separated.
    #[arg(long, value_delimiter = ',')]
    check: Vec<String>,
    #[arg(long, required_unless_present = "list")]
    seed: Option<u64>,
    /// Trial count for every randomized check.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    no_timing: bool,
    /// Print the check names instead of running them.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<Kind, String> {
    s.parse::<Kind>().map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<Range<usize>, String> {
    let bad = || format!("expected lo..hi or lo..=hi, got {s:?}");
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi = match hi.strip_prefix('=') {
        Some(h) => h.trim().parse::<usize>().map_err(|_| bad())? + 1,
        None => hi.trim().parse().map_err(|_| bad())?,
    };
    if lo >= hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..hi)
}

/// Success or refutation; errors become exit code 2.
enum Verdict {
    Ok,
    Refuted,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Inline text, or the contents of a file when prefixed with `@`.
fn inline_or_file(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(p) => read(Path::new(p)),
        None => Ok(s.to_string()),
    }
}

fn norm_arg(s: &Option<String>, flag: &str) -> Result<NormSpec> {
    let s = s.as_deref().ok_or_else(|| anyhow!("--{flag} is required"))?;
    Ok(match s.strip_prefix('@') {
        Some(p) => NormSpec::parse_json(&read(Path::new(p))?)?,
        None => NormSpec::parse_shorthand(s)?,
    })
}

fn vec_arg(s: &Option<String>) -> Result<Vec<f64>> {
    let s = inline_or_file(s.as_deref().ok_or_else(|| anyhow!("--vec is required"))?)?;
    let t = s.trim();
    if t.starts_with('[') {
        return Ok(serde_json::from_str(t)?);
    }
    t.split(',').map(|v| v.trim().parse::<f64>().with_context(|| format!("bad entry {v:?}"))).collect()
}

fn rows_arg(s: &Option<String>, flag: &str) -> Result<Vec<Vec<f64>>> {
    let s = inline_or_file(s.as_deref().ok_or_else(|| anyhow!("--{flag} is required"))?)?;
    Ok(serde_json::from_str(s.trim()).with_context(|| format!("--{flag} must be a JSON list of rows"))?)
}

fn op_arg(path: &Option<PathBuf>) -> Result<LinOp> {
    let path = path.as_ref().ok_or_else(|| anyhow!("--input (operator JSON) is required"))?;
    Ok(LinOp::parse_json(&read(path)?)?)
}

fn matrix_input(path: &Path) -> Result<FFMatrix> {
    Ok(FFMatrix::parse_text(&read(path)?)?)
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn emit_json(output: &Option<PathBuf>, mut v: Value, no_timing: bool) -> Result<()> {
    if no_timing {
        strip_timing(&mut v);
    }
    emit(output, &serde_json::to_string_pretty(&v)?)
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(o) => {
            o.remove("millis");
            o.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn cmd_rcef(a: &IoArgs) -> Result<Verdict> {
    let m = matrix_input(&a.input)?;
    let d = rcef_decompose(&m)?;
    let v = json!({
        "p": m.field().order(),
        "rank": m.cols(),
        "r": d.r.to_nested(),
        "tau": d.tau.as_matrix().to_nested(),
        "ia": d.ia.to_nested(),
    });
    emit_json(&a.output, v, false)?;
    Ok(Verdict::Ok)
}

fn cmd_tau2(a: &IoArgs) -> Result<Verdict> {
    let m = matrix_input(&a.input)?;
    let gamma = tau2(&m)?;
    let (b, c) = full_rank_decomposition(&m)?;
    let v = json!({
        "p": m.field().order(),
        "rank": gamma.dim(),
        "gamma": gamma.as_matrix().to_nested(),
        "b": b.to_nested(),
        "c": c.to_nested(),
    });
    emit_json(&a.output, v, false)?;
    Ok(Verdict::Ok)
}

fn cmd_enumerate(a: &EnumerateArgs) -> Result<Verdict> {
    let params = Params { p: a.s.p, n: a.n, k: a.s.k };
    let codes = enumerate_structures(a.s.kind, &params)?;
    let v = json!({
        "kind": a.s.kind.name(),
        "p": params.p,
        "n": params.n,
        "k": params.k,
        "count": codes.len(),
        "encodings": codes,
    });
    emit_json(&a.output, v, false)?;
    Ok(Verdict::Ok)
}

fn cmd_witness(a: &WitnessArgs) -> Result<Verdict> {
    let table = ColoringTable::parse_csv(&read(&a.input)?)?;
    let rep = witness_search(&table, a.m, a.jobs.max(1))?;
    emit_json(&a.output, serde_json::to_value(&rep)?, a.no_timing)?;
    Ok(if rep.found { Verdict::Ok } else { Verdict::Refuted })
}

fn cmd_exhaust(a: &ExhaustArgs) -> Result<Verdict> {
    let s = &a.search;
    let params = Params { p: s.s.p, n: a.n, k: s.s.k };
    let rep = exhaust_colorings(s.s.kind, &params, s.r, s.m, &s.options())?;
    if let (Some(path), SearchOutcome::Counterexample(t)) = (&a.counterexample, &rep.outcome) {
        fs::write(path, t.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    emit_json(&s.output, rep.to_json(), s.no_timing)?;
    Ok(if rep.all_pass() { Verdict::Ok } else { Verdict::Refuted })
}

fn cmd_min_n(a: &MinNArgs) -> Result<Verdict> {
    let s = &a.search;
    let rep = min_n_search(s.s.kind, s.s.p, s.s.k, s.r, s.m, a.n_range.clone(), &s.options())?;
    emit_json(&s.output, serde_json::to_value(&rep)?, s.no_timing)?;
    Ok(if rep.min_n.is_some() { Verdict::Ok } else { Verdict::Refuted })
}

fn need_seed(a: &MetricArgs, what: &str) -> Result<u64> {
    a.seed.ok_or_else(|| anyhow!("{what} is randomized; pass --seed"))
}

fn cmd_metric(a: &MetricArgs) -> Result<Verdict> {
    let (value, extra): (MetricValue, Value) = match a.what {
        MetricKind::Eval => {
            let m = norm_arg(&a.m, "m")?;
            let x = vec_arg(&a.vec)?;
            (MetricValue::exact(m.eval(&x)?, "norm_eval", 0.0), Value::Null)
        }
        MetricKind::Omega => (omega(&norm_arg(&a.m, "m")?, &norm_arg(&a.n, "n")?)?, Value::Null),
        MetricKind::OpNorm => (op_norm(&op_arg(&a.input)?)?, Value::Null),
        MetricKind::InvNorm => (inv_norm(&op_arg(&a.input)?)?, Value::Null),
        MetricKind::Gap => {
            let e = norm_arg(&a.m, "m")?;
            let basis = |flag: &str, s: &Option<String>| -> Result<SubspaceRep> {
                let rows = rows_arg(s, flag)?;
                let cols = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != cols) {
                    bail!("--{flag} has ragged rows");
                }
                let m = ramsey_core::metrics::LinOp::from_rows(&rows, NormSpec::l2(cols.max(1)), e.clone())?.matrix;
                Ok(SubspaceRep::new(e.clone(), m)?)
            };
            (gap_metric(&basis("u", &a.u)?, &basis("w", &a.w)?)?, Value::Null)
        }
        MetricKind::Alpha => (alpha_extrinsic(&norm_arg(&a.x, "x")?, &norm_arg(&a.m, "m")?, &norm_arg(&a.n, "n")?)?, Value::Null),
        MetricKind::Bm => {
            let seed = need_seed(a, "bm")?;
            let opts = BmOptions { starts: a.budget.unwrap_or(8), seed, jobs: a.jobs.max(1), ..Default::default() };
            let r = bm_upper(&norm_arg(&a.m, "m")?, &norm_arg(&a.n, "n")?, &opts)?;
            let delta: Vec<Vec<f64>> = r.delta.row_iter().map(|row| row.iter().copied().collect()).collect();
            (r.value, json!({ "delta": delta }))
        }
        MetricKind::DualLift => {
            let r = dual_min_lift(&op_arg(&a.input)?, &vec_arg(&a.vec)?)?;
            (r.value, json!({ "g": r.g }))
        }
        MetricKind::Auerbach => {
            let seed = need_seed(a, "auerbach")?;
            let m = norm_arg(&a.m, "m")?;
            let b = auerbach_basis(&m, a.budget.unwrap_or(8), seed)?;
            let v = MetricValue::exact(b.max_functional_norm, "auerbach_functionals", 0.0);
            (v, json!({ "basis": b.basis, "functionals": b.functionals, "det": b.det }))
        }
    };
    let mut out = serde_json::to_value(&value)?;
    if let (Value::Object(o), Value::Object(e)) = (&mut out, extra) {
        o.extend(e);
    }
    emit_json(&a.output, out, false)?;
    Ok(match a.tol {
        Some(tol) if value.tolerance > tol => Verdict::Refuted,
        _ => Verdict::Ok,
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<Verdict> {
    let suites: Vec<String> = if a.suite.is_empty() { SUITES.iter().map(|s| s.to_string()).collect() } else { a.suite.clone() };
    if a.list {
        let mut names = Vec::new();
        for s in &suites {
            names.extend(check_names(s)?);
        }
        emit(&a.output, &names.join("\n"))?;
        return Ok(Verdict::Ok);
    }
    let cfg = SuiteConfig { suites, checks: a.check.clone(), seed: a.seed.unwrap_or(0), jobs: a.jobs.max(1), trials: a.budget, timing: !a.no_timing };
    let report = run_suite(&cfg)?;
    emit(&a.output, &report.to_json())?;
    Ok(if report.certified_pass { Verdict::Ok } else { Verdict::Refuted })
}

fn run(cli: &Cli) -> Result<Verdict> {
    match &cli.cmd {
        Cmd::Rcef(a) => cmd_rcef(a),
        Cmd::Tau2(a) => cmd_tau2(a),
        Cmd::Enumerate(a) => cmd_enumerate(a),
        Cmd::Witness(a) => cmd_witness(a),
        Cmd::Exhaust(a) => cmd_exhaust(a),
        Cmd::MinN(a) => cmd_min_n(a),
        Cmd::Metric(a) => cmd_metric(a),
        Cmd::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Refuted) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

