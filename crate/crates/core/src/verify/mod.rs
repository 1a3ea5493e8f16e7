//! Named, seeded suites of invariant checks with a JSON report.
//!
//! Every check draws its randomness from a stream derived from the seed and
//! its own name, so reports do not depend on scheduling. Checks whose
//! verdict rests on an optimizer are marked [`CheckKind::Consistency`] and
//! cannot fail the certified verdict.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::par;

mod algebra;
mod analysis;
mod desk;

pub const SUITES: [&str; 5] = ["gf_invariants", "combinat_equivalences", "ramsey_desk", "metric_axioms", "appendix_constructions"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub suites: Vec<String>,
    /// Full `suite/check` names to keep; empty keeps every check.
    pub checks: Vec<String>,
    pub seed: u64,
    /// Worker threads for suites and for searches inside checks.
    pub jobs: usize,
    /// Replaces the default trial count of every randomized check.
    pub trials: Option<u64>,
    /// Record wall-clock time per check. Off gives byte-stable reports.
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { suites: Vec::new(), checks: Vec::new(), seed: 0, jobs: 1, trials: None, timing: true }
    }
}

impl SuiteConfig {
    pub fn all() -> Self {
        Self { suites: SUITES.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Exact or LP-certified arithmetic.
    Certified,
    /// Relies on optimizer output.
    Consistency,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub suite: String,
    pub paper_anchor: String,
    pub kind: CheckKind,
    pub trials: u64,
    pub failures: u64,
    /// Least `bound + slack - value` seen; negative iff some trial failed.
    pub worst_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub suites: Vec<String>,
    pub overall_pass: bool,
    /// No failures among certified checks.
    pub certified_pass: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

type CheckError = Box<dyn std::error::Error + Send + Sync>;
type Outcome = Result<Tally, CheckError>;
type Step = Result<(), CheckError>;

/// Running pass/fail count for one check.
#[derive(Clone, Debug)]
pub(crate) struct Tally {
    trials: u64,
    failures: u64,
    worst: f64,
}

impl Tally {
    pub(crate) fn new() -> Self {
        Self { trials: 0, failures: 0, worst: f64::INFINITY }
    }

    /// One trial; passes iff `margin >= 0`.
    pub(crate) fn margin(&mut self, margin: f64) {
        self.trials += 1;
        let m = if margin.is_nan() { -f64::MAX } else { margin.clamp(-f64::MAX, f64::MAX) + 0.0 };
        if m < 0.0 {
            self.failures += 1;
        }
        self.worst = self.worst.min(m);
    }

    pub(crate) fn check(&mut self, ok: bool) {
        self.margin(if ok { 0.0 } else { -1.0 });
    }

    /// `|got - want| <= tol`.
    pub(crate) fn close(&mut self, got: f64, want: f64, tol: f64) {
        self.margin(tol - (got - want).abs());
    }

    /// `value <= bound + slack`.
    pub(crate) fn below(&mut self, value: f64, bound: f64, slack: f64) {
        self.margin(bound + slack - value);
    }
}

/// What a check gets to see of the configuration.
pub(crate) struct Ctx {
    seed: u64,
    trials: Option<u64>,
    pub(crate) jobs: usize,
}

impl Ctx {
    /// Stream keyed by the check name.
    pub(crate) fn rng(&self, name: &str) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3)));
        rng
    }

    pub(crate) fn trials(&self, default: u64) -> u64 {
        self.trials.unwrap_or(default)
    }
}

pub(crate) struct CheckDef {
    pub(crate) name: &'static str,
    pub(crate) anchor: &'static str,
    pub(crate) kind: CheckKind,
    pub(crate) run: fn(&Ctx) -> Outcome,
}

fn checks_of(suite: &str) -> Vec<CheckDef> {
    match suite {
        "gf_invariants" => algebra::gf_checks(),
        "combinat_equivalences" => algebra::combinat_checks(),
        "ramsey_desk" => desk::checks(),
        "metric_axioms" => analysis::axiom_checks(),
        "appendix_constructions" => analysis::appendix_checks(),
        _ => Vec::new(),
    }
}

/// Names of the checks a suite runs, sorted.
pub fn check_names(suite: &str) -> Result<Vec<String>, VerifyError> {
    if !SUITES.contains(&suite) {
        return Err(VerifyError::UnknownSuite(suite.into()));
    }
    let mut names: Vec<String> = checks_of(suite).iter().map(|c| format!("{suite}/{}", c.name)).collect();
    names.sort();
    Ok(names)
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport, VerifyError> {
    let mut suites: Vec<String> = Vec::new();
    for s in &config.suites {
        if !SUITES.contains(&s.as_str()) {
            return Err(VerifyError::UnknownSuite(s.clone()));
        }
        if !suites.contains(s) {
            suites.push(s.clone());
        }
    }
    let ctx = Ctx { seed: config.seed, trials: config.trials, jobs: config.jobs.max(1) };
    let mut work: Vec<(String, CheckDef)> = suites.iter().flat_map(|s| checks_of(s).into_iter().map(move |c| (s.clone(), c))).collect();
    if !config.checks.is_empty() {
        for c in &config.checks {
            if !work.iter().any(|(s, d)| format!("{s}/{}", d.name) == *c) {
                return Err(VerifyError::UnknownCheck(c.clone()));
            }
        }
        work.retain(|(s, d)| config.checks.contains(&format!("{s}/{}", d.name)));
    }
    let run_one = |(suite, def): &(String, CheckDef)| {
        let name = format!("{suite}/{}", def.name);
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| (def.run)(&ctx)));
        let millis = config.timing.then(|| start.elapsed().as_millis() as u64);
        let (tally, error) = match outcome {
            Ok(Ok(t)) => (t, None),
            Ok(Err(e)) => (Tally::new(), Some(e.to_string())),
            Err(_) => (Tally::new(), Some("check panicked".to_string())),
        };
        let failures = tally.failures + u64::from(error.is_some());
        let worst_margin = if error.is_some() {
            -1.0
        } else if tally.trials == 0 {
            0.0
        } else {
            tally.worst
        };
        CheckResult {
            name,
            suite: suite.clone(),
            paper_anchor: def.anchor.to_string(),
            kind: def.kind,
            trials: tally.trials,
            failures,
            worst_margin,
            error,
            millis,
        }
    };
    let mut checks: Vec<CheckResult> = if ctx.jobs <= 1 {
        work.iter().map(run_one).collect()
    } else {
        par::with_jobs(ctx.jobs, || work.par_iter().map(run_one).collect())
    };
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let overall_pass = checks.iter().all(CheckResult::passed);
    let certified_pass = checks.iter().filter(|c| c.kind == CheckKind::Certified).all(CheckResult::passed);
    Ok(SuiteReport { seed: config.seed, suites, overall_pass, certified_pass, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_passes() {
        let r = run_suite(&SuiteConfig::default()).unwrap();
        assert!(r.checks.is_empty());
        assert!(r.overall_pass && r.certified_pass);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let cfg = SuiteConfig { suites: vec!["gf_invariants".into(), "nope".into()], ..Default::default() };
        assert_eq!(run_suite(&cfg).err(), Some(VerifyError::UnknownSuite("nope".into())));
    }

    #[test]
    fn check_filter() {
        let cfg = |c: &str| SuiteConfig { suites: vec!["gf_invariants".into()], checks: vec![c.into()], timing: false, ..Default::default() };
        let r = run_suite(&cfg("gf_invariants/gl_order")).unwrap();
        assert_eq!(r.checks.len(), 1);
        assert_eq!(run_suite(&cfg("ramsey_desk/min_n_is_3")).err(), Some(VerifyError::UnknownCheck("ramsey_desk/min_n_is_3".into())));
    }

    #[test]
    fn tally_margins() {
        let mut t = Tally::new();
        t.close(1.0, 1.0 + 1e-9, 1e-8);
        t.below(2.0, 1.0, 0.5);
        t.margin(f64::NAN);
        assert_eq!((t.trials, t.failures), (3, 2));
        assert!(t.worst.is_finite() && t.worst < 0.0);
    }

    #[test]
    fn streams_differ_by_name() {
        use rand::Rng;
        let ctx = Ctx { seed: 1, trials: None, jobs: 1 };
        let a: u64 = ctx.rng("a").gen();
        let b: u64 = ctx.rng("b").gen();
        assert_ne!(a, b);
        assert_eq!(a, ctx.rng("a").gen::<u64>());
    }

    fn run(suite: &str) -> SuiteReport {
        run_suite(&SuiteConfig { suites: vec![suite.into()], timing: false, ..Default::default() }).unwrap()
    }

    fn assert_passes(suite: &str) {
        let r = run(suite);
        assert!(r.overall_pass, "{}", r.to_json());
        assert_eq!(r.checks.len(), check_names(suite).unwrap().len());
        assert!(r.checks.iter().all(|c| c.trials > 0 && c.worst_margin.is_finite() && c.millis.is_none()));
    }

    #[test]
    fn gf_invariants_pass() {
        assert_passes("gf_invariants");
    }

    #[test]
    fn combinat_equivalences_pass() {
        assert_passes("combinat_equivalences");
    }

    #[test]
    fn ramsey_desk_pass() {
        let r = run("ramsey_desk");
        assert!(r.check("ramsey_desk/fano_all_pass_n3").unwrap().passed());
        assert!(r.check("ramsey_desk/fano_counterexample_n2").unwrap().passed());
        assert_passes("ramsey_desk");
    }

    #[test]
    fn metric_axioms_pass() {
        assert_passes("metric_axioms");
    }

    #[test]
    fn appendix_constructions_pass() {
        assert_passes("appendix_constructions");
    }

    #[test]
    fn byte_identical_across_jobs() {
        let cfg = |jobs| SuiteConfig {
            suites: vec!["gf_invariants".into(), "metric_axioms".into()],
            checks: Vec::new(),
            seed: 11,
            jobs,
            trials: Some(5),
            timing: false,
        };
        let a = run_suite(&cfg(1)).unwrap().to_json();
        assert_eq!(a, run_suite(&cfg(1)).unwrap().to_json());
        assert_eq!(a, run_suite(&cfg(4)).unwrap().to_json());
    }
}
