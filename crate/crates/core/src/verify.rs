//! Seeded sampling of exact rational points and the property suites that
//! bundle every identity of the catalogue, cube and Lax modules into
//! runnable, reportable checks.
//!
//! Every suite is a list of cases (one per equation, system, catalogue entry
//! or normalisation rule) run over a number of sampled points.  Each trial
//! draws its point from a seed derived from the base seed, the case label and
//! the trial number, so reports are identical whether trials run serially or
//! in parallel and whether or not other cases are filtered out.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::catalogue::{
    evaluate, evaluate_cleared, fourleg_residual, leg_spec, leg_unit_residual, paired_a_equation,
    symmetry_residual, Deltas, EqType, FaceEquation, FacePoint, Family, LegArg, LegRole,
    ParamPair, Slot, Symmetry,
};
use crate::cube::{
    assemble_system, run_cafcc, solve_corner, CafccInit, CubeParams, EquationSystem, Fault,
    FaultKind, SystemConfig, Vertex,
};
use crate::exactnum::{make_surd, s, NumError, Scalar, SurdKind, SurdParam};
use crate::lax::{
    assemble_quadruple_with, build_lax_a, build_lax_b, catalogue_det,
    catalogue_lax, catalogue_scale, invert, normalization, proof_residual, put_on_shell, residual,
    rule_residual, Approach, Branch, LaxEntry, LaxKey, LaxPoint, Matrix2, NormalizationRule,
    PropId,
};

/// Version of the [`SuiteReport`] JSON layout.
pub const SCHEMA_VERSION: &str = "1";

/// Errors raised while sampling or running suites.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("scope selects no cases for suite {0}")]
    EmptyScope(String),
    #[error("no usable sample for {case} after {retries} attempts (trial seed {seed})")]
    RetriesExhausted { case: String, seed: u64, retries: u32 },
    #[error("unknown suite {0}")]
    UnknownSuite(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// How points are drawn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Largest absolute numerator and largest denominator of a sampled value.
    pub height_bound: u32,
    /// Labels that must never be sampled as zero.
    pub nonzero_slots: BTreeSet<String>,
    /// Labels delivered as a surd parametrisation of the given kind.
    pub surd_slots: BTreeMap<String, SurdKind>,
    /// Attempts before a trial gives up on degenerate samples.
    pub max_retries: u32,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            height_bound: 12,
            nonzero_slots: BTreeSet::new(),
            surd_slots: BTreeMap::new(),
            max_retries: 32,
        }
    }
}

impl SamplerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn nonzero<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.nonzero_slots.extend(labels.into_iter().map(Into::into));
        self
    }

    pub fn surd(mut self, label: impl Into<String>, kind: SurdKind) -> Self {
        self.surd_slots.insert(label.into(), kind);
        self
    }
}

/// A sampled point: one value per label, plus the surd behind each surd slot.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Assignment {
    pub values: BTreeMap<String, Scalar>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub surds: BTreeMap<String, SurdParam>,
}

impl Assignment {
    /// The value of `label`.
    ///
    /// # Panics
    /// If `label` was not part of the sampled shape.
    pub fn get(&self, label: &str) -> &Scalar {
        self.values
            .get(label)
            .unwrap_or_else(|| panic!("label {label} not sampled"))
    }

    pub fn surd(&self, label: &str) -> Option<&SurdParam> {
        self.surds.get(label)
    }
}

fn draw(rng: &mut ChaCha8Rng, h: i64) -> Scalar {
    let p = rng.random_range(-h..=h);
    let q = rng.random_range(1..=h);
    Scalar::ratio(p, q).expect("positive denominator")
}

fn draw_nonzero(rng: &mut ChaCha8Rng, h: i64, cfg: &SamplerConfig, label: &str) -> Result<Scalar, VerifyError> {
    for _ in 0..cfg.max_retries.max(1) {
        let v = draw(rng, h);
        if !v.is_zero() {
            return Ok(v);
        }
    }
    Err(VerifyError::RetriesExhausted {
        case: format!("nonzero draw for {label}"),
        seed: cfg.seed,
        retries: cfg.max_retries,
    })
}

/// Draws one value per label of `shape`, deterministically in `cfg.seed`.
pub fn sample_point(cfg: &SamplerConfig, shape: &[&str]) -> Result<Assignment, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let h = i64::from(cfg.height_bound.max(1));
    let mut out = Assignment::default();
    for &label in shape {
        if let Some(&kind) = cfg.surd_slots.get(label) {
            let seed = draw_nonzero(&mut rng, h, cfg, label)?;
            let sp = make_surd(kind, seed)?;
            out.values.insert(label.to_string(), sp.value.clone());
            out.surds.insert(label.to_string(), sp);
        } else if cfg.nonzero_slots.contains(label) {
            out.values.insert(label.to_string(), draw_nonzero(&mut rng, h, cfg, label)?);
        } else {
            out.values.insert(label.to_string(), draw(&mut rng, h));
        }
    }
    Ok(out)
}

/// A downstream signal that a sample is degenerate and must be redrawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rejected;

impl<E: std::error::Error> From<E> for Rejected {
    fn from(_: E) -> Self {
        Rejected
    }
}

/// Samples points until `check` accepts one, returning the accepted value
/// and point.
pub fn sample_with<T>(
    cfg: &SamplerConfig,
    shape: &[&str],
    mut check: impl FnMut(&Assignment) -> Result<T, Rejected>,
) -> Result<(T, Assignment, u64), VerifyError> {
    for attempt in 0..cfg.max_retries {
        let seed = attempt_seed(cfg.seed, attempt);
        let sub = SamplerConfig {
            seed,
            ..cfg.clone()
        };
        let a = sample_point(&sub, shape)?;
        if let Ok(t) = check(&a) {
            return Ok((t, a, seed));
        }
    }
    Err(VerifyError::RetriesExhausted {
        case: "sample".into(),
        seed: cfg.seed,
        retries: cfg.max_retries,
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Seed of trial `trial` of the case labelled `label`.
pub fn trial_seed(base: u64, label: &str, trial: u32) -> u64 {
    splitmix64(splitmix64(base ^ fnv1a(label)) ^ u64::from(trial))
}

fn attempt_seed(trial: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        trial
    } else {
        splitmix64(trial ^ (u64::from(attempt) << 32))
    }
}

// ---------------------------------------------------------------------------
// Suites, scopes and reports
// ---------------------------------------------------------------------------

/// The runnable property suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Cafcc,
    Structure,
    Symmetry,
    Fourleg,
    LegUnit,
    LaxCompat,
    LaxOffshell,
    Det,
    BuilderVsCatalogue,
    ProofOracle,
    InverseLaw,
    SpectralSweep,
    NegativeControl,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Cafcc,
        Suite::Structure,
        Suite::Symmetry,
        Suite::Fourleg,
        Suite::LegUnit,
        Suite::LaxCompat,
        Suite::LaxOffshell,
        Suite::Det,
        Suite::BuilderVsCatalogue,
        Suite::ProofOracle,
        Suite::InverseLaw,
        Suite::SpectralSweep,
        Suite::NegativeControl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Cafcc => "cafcc",
            Suite::Structure => "structure",
            Suite::Symmetry => "symmetry",
            Suite::Fourleg => "fourleg",
            Suite::LegUnit => "leg_unit",
            Suite::LaxCompat => "lax_compat",
            Suite::LaxOffshell => "lax_offshell",
            Suite::Det => "det",
            Suite::BuilderVsCatalogue => "builder_vs_catalogue",
            Suite::ProofOracle => "proof_oracle",
            Suite::InverseLaw => "inverse_law",
            Suite::SpectralSweep => "spectral_sweep",
            Suite::NegativeControl => "negative_control",
        }
    }

    /// Trials per case when none are requested.
    pub fn default_trials(self) -> u32 {
        match self {
            Suite::Cafcc => 100,
            Suite::SpectralSweep | Suite::NegativeControl => 10,
            _ => 50,
        }
    }

    /// One-line description for listings.
    pub fn describe(self) -> &'static str {
        match self {
            Suite::Cafcc => "six-step consistency of every admissible system",
            Suite::Structure => "affine-linearity in each corner and face degree at most two",
            Suite::Symmetry => "the three face reflections, including expected violations",
            Suite::Fourleg => "four-leg forms vanish on solutions",
            Suite::LegUnit => "unit relation of type-A legs",
            Suite::LaxCompat => "normalised Lax equations vanish on solutions",
            Suite::LaxOffshell => "normalised Lax residuals are nonzero and of rank one off solutions",
            Suite::Det => "closed-form determinants",
            Suite::BuilderVsCatalogue => "generic builders reproduce the closed-form matrices",
            Suite::ProofOracle => "computed residuals equal the closed-form proof residuals",
            Suite::InverseLaw => "inverse and transport laws of the builders",
            Suite::SpectralSweep => "Lax equations hold for every spectral parameter value",
            Suite::NegativeControl => "faults and wrong normalisations are detected",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = VerifyError;

    fn from_str(st: &str) -> Result<Self, Self::Err> {
        let key = st.trim().replace('-', "_");
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == key)
            .ok_or_else(|| VerifyError::UnknownSuite(st.to_string()))
    }
}

/// Filters restricting which cases a suite runs; empty filters select all.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scope {
    pub families: Vec<Family>,
    pub deltas: Option<Deltas>,
    pub configs: Vec<SystemConfig>,
    pub props: Vec<PropId>,
    pub variant: Option<u8>,
    pub eps: Option<i8>,
    pub branch: Option<Branch>,
    /// Fault injected into every system of the `cafcc` suite.
    pub fault: Option<Fault>,
}

impl Scope {
    fn family_ok(&self, f: Family) -> bool {
        self.families.is_empty() || self.families.contains(&f)
    }

    fn deltas_ok(&self, d: &Deltas) -> bool {
        self.deltas.as_ref().is_none_or(|x| x == d)
    }

    fn equation_ok(&self, eq: &FaceEquation) -> bool {
        self.family_ok(eq.family()) && self.deltas_ok(eq.deltas())
    }

    fn config_ok(&self, c: &SystemConfig) -> bool {
        let listed = self.configs.is_empty() || self.configs.contains(c);
        let fam = self.families.is_empty() || c.families().iter().any(|f| self.families.contains(f));
        listed && fam && self.deltas_ok(c.equation_for(7).deltas())
    }

    fn key_ok(&self, k: &LaxKey) -> bool {
        let fam: Family = k.entry.name().parse().expect("entry names are family names");
        self.family_ok(fam) && self.deltas_ok(k.deltas())
    }

    fn rule_ok(&self, r: &NormalizationRule) -> bool {
        let key = r.key().expect("rules carry valid keys");
        (self.props.is_empty() || self.props.contains(&r.prop))
            && self.key_ok(&key)
            && self.variant.is_none_or(|v| v == r.variant)
            && self.eps.is_none_or(|e| e == r.eps || e == r.eps2)
            && self.branch.is_none_or(|b| b == r.branch)
    }
}

/// One exact failure, with enough data to reproduce it: `seed` regenerates
/// `point` via [`sample_point`] with the case's shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub case: String,
    pub seed: u64,
    pub point: Value,
    pub residual: Value,
}

/// The outcome of one suite run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub trials: u64,
    /// Cases skipped because the perturbation they test is a no-op.
    pub skipped: Vec<String>,
    pub failures: Vec<FailureRecord>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<u64>,
}

impl SuiteReport {
    /// Labels of the failing cases, deduplicated, in report order.
    pub fn failing_cases(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.failures
            .iter()
            .map(|f| f.case.as_str())
            .filter(|c| seen.insert(*c))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Case machinery
// ---------------------------------------------------------------------------

/// What a single sampled check found.
enum Verdict {
    /// The identity holds (the checked quantity is exactly zero).
    Holds,
    /// The identity fails; carries the nonzero residual.
    Violated(Value),
    /// The perturbation under test does not change anything at this point.
    Inert,
    /// A failure regardless of expectation (e.g. a residual of the wrong
    /// rank where only non-vanishing is asserted).
    Broken(Value),
}

type Check = Box<dyn Fn(&Assignment, u64) -> Result<Verdict, Rejected> + Send + Sync>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Expect {
    /// Must hold at every trial.
    Identity,
    /// Must fail at every trial; accidental zeros are resampled.
    NonVanishing,
    /// Must fail at some trial (negative control).
    Detect,
}

struct Case {
    label: String,
    shape: Vec<String>,
    surds: Vec<(String, SurdKind)>,
    expect: Expect,
    check: Check,
}

impl Case {
    fn new(label: impl Into<String>, shape: Vec<String>, expect: Expect, check: Check) -> Case {
        Case {
            label: label.into(),
            shape,
            surds: Vec::new(),
            expect,
            check,
        }
    }

    fn with_surd(mut self, label: &str, kind: Option<SurdKind>) -> Case {
        if let Some(k) = kind {
            self.surds.push((label.to_string(), k));
        }
        self
    }

    fn cfg(&self, base: &SamplerConfig, seed: u64) -> SamplerConfig {
        let mut cfg = base.clone().with_seed(seed).nonzero(self.shape.iter().cloned());
        for (l, k) in &self.surds {
            cfg = cfg.surd(l.clone(), *k);
        }
        cfg
    }
}

fn zero_or(res: Value, is_zero: bool) -> Verdict {
    if is_zero {
        Verdict::Holds
    } else {
        Verdict::Violated(res)
    }
}

fn scalar_verdict(v: Scalar) -> Verdict {
    let z = v.is_zero();
    zero_or(json!(v), z)
}

fn matrix_verdict(m: Matrix2) -> Verdict {
    let z = m.is_zero();
    zero_or(json!(m), z)
}

enum TrialResult {
    Pass,
    Fail(FailureRecord),
    Inert,
}

fn snapshot(a: &Assignment) -> Value {
    serde_json::to_value(a).expect("assignments serialise")
}

/// Runs one trial of an identity or non-vanishing case.
fn run_trial(case: &Case, base: &SamplerConfig, trial: u32) -> Result<TrialResult, VerifyError> {
    let tseed = trial_seed(base.seed, &case.label, trial);
    let shape: Vec<&str> = case.shape.iter().map(String::as_str).collect();
    let mut zero_seen = None;
    for attempt in 0..base.max_retries {
        let seed = attempt_seed(tseed, attempt);
        let a = sample_point(&case.cfg(base, seed), &shape)?;
        let fail = |residual: Value| {
            TrialResult::Fail(FailureRecord {
                case: case.label.clone(),
                seed,
                point: snapshot(&a),
                residual,
            })
        };
        match ((case.check)(&a, seed), case.expect) {
            (Err(Rejected), _) => continue,
            (Ok(Verdict::Broken(r)), _) => return Ok(fail(r)),
            (Ok(Verdict::Holds), Expect::Identity) => return Ok(TrialResult::Pass),
            (Ok(Verdict::Violated(r)), Expect::Identity) => return Ok(fail(r)),
            (Ok(Verdict::Violated(_)), _) => return Ok(TrialResult::Pass),
            (Ok(Verdict::Holds), _) => {
                zero_seen.get_or_insert((seed, snapshot(&a)));
            }
            (Ok(Verdict::Inert), _) => return Ok(TrialResult::Inert),
        }
    }
    match zero_seen {
        Some((seed, point)) => Ok(TrialResult::Fail(FailureRecord {
            case: case.label.clone(),
            seed,
            point,
            residual: json!("0"),
        })),
        None => Err(VerifyError::RetriesExhausted {
            case: case.label.clone(),
            seed: tseed,
            retries: base.max_retries,
        }),
    }
}

/// Runs a detection case: passes as soon as one trial violates the
/// identity; skipped when every trial reports the perturbation inert.
fn run_detect(case: &Case, base: &SamplerConfig, trials: u32) -> Result<(u64, TrialResult), VerifyError> {
    let shape: Vec<&str> = case.shape.iter().map(String::as_str).collect();
    let mut inert = true;
    let mut last = None;
    for trial in 0..trials {
        let tseed = trial_seed(base.seed, &case.label, trial);
        let (verdict, a, seed) = sample_with(&case.cfg(base, tseed), &shape, |a| (case.check)(a, tseed))
            .map_err(|_| VerifyError::RetriesExhausted {
                case: case.label.clone(),
                seed: tseed,
                retries: base.max_retries,
            })?;
        match verdict {
            Verdict::Violated(_) | Verdict::Broken(_) => {
                return Ok((u64::from(trial) + 1, TrialResult::Pass))
            }
            Verdict::Holds => inert = false,
            Verdict::Inert => {}
        }
        last = Some((seed, a));
    }
    if inert {
        return Ok((u64::from(trials), TrialResult::Inert));
    }
    let (seed, a) = last.expect("at least one trial");
    Ok((
        u64::from(trials),
        TrialResult::Fail(FailureRecord {
            case: case.label.clone(),
            seed,
            point: snapshot(&a),
            residual: json!("undetected"),
        }),
    ))
}

/// Runs `suite` over the cases selected by `scope`, `trials` points per case
/// (the suite default when `None`).
pub fn run_suite(
    suite: Suite,
    scope: &Scope,
    trials: Option<u32>,
    cfg: &SamplerConfig,
) -> Result<SuiteReport, VerifyError> {
    let start = Instant::now();
    let cases = cases_for(suite, scope);
    if cases.is_empty() {
        return Err(VerifyError::EmptyScope(suite.name().into()));
    }
    let trials = trials.unwrap_or_else(|| suite.default_trials()).max(1);
    let mut report = SuiteReport {
        schema: SCHEMA_VERSION.into(),
        suite: suite.name().into(),
        seed: cfg.seed,
        cases: cases.len(),
        trials: 0,
        skipped: Vec::new(),
        failures: Vec::new(),
        pass: false,
        wall_time_ms: None,
    };
    let record = |label: &str, r: TrialResult, report: &mut SuiteReport| match r {
        TrialResult::Pass => {}
        TrialResult::Fail(f) => report.failures.push(f),
        TrialResult::Inert => {
            if report.skipped.last().map(String::as_str) != Some(label) {
                report.skipped.push(label.to_string());
            }
        }
    };
    let detect: Vec<&Case> = cases.iter().filter(|c| c.expect == Expect::Detect).collect();
    let each: Vec<(&Case, u32)> = cases
        .iter()
        .filter(|c| c.expect != Expect::Detect)
        .flat_map(|c| (0..trials).map(move |t| (c, t)))
        .collect();
    let results: Vec<Result<TrialResult, VerifyError>> =
        each.par_iter().map(|(c, t)| run_trial(c, cfg, *t)).collect();
    for ((c, _), r) in each.iter().zip(results) {
        report.trials += 1;
        record(&c.label, r?, &mut report);
    }
    let results: Vec<Result<(u64, TrialResult), VerifyError>> =
        detect.par_iter().map(|c| run_detect(c, cfg, trials)).collect();
    for (c, r) in detect.iter().zip(results) {
        let (n, r) = r?;
        report.trials += n;
        record(&c.label, r, &mut report);
    }
    report.pass = report.failures.is_empty();
    report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    Ok(report)
}

/// Runs every suite with at least one case in `scope`, in [`Suite::ALL`]
/// order.
pub fn run_all(scope: &Scope, trials: Option<u32>, cfg: &SamplerConfig) -> Result<Vec<SuiteReport>, VerifyError> {
    let mut out = Vec::new();
    for suite in Suite::ALL {
        match run_suite(suite, scope, trials, cfg) {
            Err(VerifyError::EmptyScope(_)) => continue,
            r => out.push(r?),
        }
    }
    if out.is_empty() {
        return Err(VerifyError::EmptyScope("all".into()));
    }
    Ok(out)
}

/// Labels of the cases `suite` would run under `scope`.
pub fn case_labels(suite: Suite, scope: &Scope) -> Vec<String> {
    cases_for(suite, scope).into_iter().map(|c| c.label).collect()
}

fn cases_for(suite: Suite, scope: &Scope) -> Vec<Case> {
    match suite {
        Suite::Cafcc => cafcc_cases(scope),
        Suite::Structure => structure_cases(scope),
        Suite::Symmetry => symmetry_cases(scope),
        Suite::Fourleg => fourleg_cases(scope),
        Suite::LegUnit => leg_unit_cases(scope),
        Suite::LaxCompat => rule_cases(scope, Expect::Identity, lax_compat_check, 0),
        Suite::LaxOffshell => rule_cases(scope, Expect::NonVanishing, lax_offshell_check, 0),
        Suite::Det => det_cases(scope),
        Suite::BuilderVsCatalogue => builder_cases(scope),
        Suite::ProofOracle => rule_cases(scope, Expect::Identity, proof_oracle_check, 0),
        Suite::InverseLaw => inverse_cases(scope),
        Suite::SpectralSweep => rule_cases(scope, Expect::Identity, spectral_check, SPECTRAL_VALUES - 1),
        Suite::NegativeControl => negative_cases(scope),
    }
}

// ---------------------------------------------------------------------------
// Shapes
// ---------------------------------------------------------------------------

const PARAMS: [&str; 6] = ["a1", "a2", "b1", "b2", "g1", "g2"];

fn labels(parts: &[&str]) -> Vec<String> {
    parts.iter().map(|p| p.to_string()).collect()
}

fn cube_shape() -> Vec<String> {
    let mut v = labels(&PARAMS);
    v.extend(Vertex::ALL.iter().map(|x| x.name().to_string()));
    v
}

fn cube_params(a: &Assignment) -> CubeParams {
    let p = |i: &str, j: &str| ParamPair::new(a.get(i).clone(), a.get(j).clone());
    CubeParams {
        alpha: p("a1", "a2"),
        beta: p("b1", "b2"),
        gamma: p("g1", "g2"),
    }
}

fn vertex_values(a: &Assignment) -> BTreeMap<Vertex, Scalar> {
    Vertex::ALL
        .iter()
        .filter_map(|v| a.values.get(v.name()).map(|x| (*v, x.clone())))
        .collect()
}

fn lax_point(a: &Assignment) -> LaxPoint {
    LaxPoint {
        values: vertex_values(a),
        params: cube_params(a),
        surd: a.surd("zn").cloned(),
    }
}

fn face_shape() -> Vec<String> {
    labels(&["a1", "a2", "b1", "b2", "x", "xa", "xb", "xc", "xd"])
}

fn face_point(a: &Assignment) -> FacePoint {
    FacePoint::new(
        a.get("x").clone(),
        [
            a.get("xa").clone(),
            a.get("xb").clone(),
            a.get("xc").clone(),
            a.get("xd").clone(),
        ],
        ParamPair::new(a.get("a1").clone(), a.get("a2").clone()),
        ParamPair::new(a.get("b1").clone(), a.get("b2").clone()),
    )
}

// ---------------------------------------------------------------------------
// Catalogue suites
// ---------------------------------------------------------------------------

fn cafcc_cases(scope: &Scope) -> Vec<Case> {
    let fault = scope.fault;
    SystemConfig::admissible()
        .into_iter()
        .filter(|c| scope.config_ok(c))
        .map(|config| {
            let mut system = assemble_system(&config).expect("admissible");
            if let Some(f) = fault {
                system = system.with_fault(f);
            }
            let mut shape = labels(&PARAMS);
            shape.extend(labels(&["x", "xa", "xb", "xc", "zn", "zw"]));
            let label = match fault {
                Some(f) => format!("{} [{}]", config.id(), f),
                None => config.id(),
            };
            Case::new(
                label,
                shape,
                Expect::Identity,
                Box::new(move |a, seed| cafcc_verdict(&system, a, seed)),
            )
        })
        .collect()
}

fn cafcc_verdict(system: &EquationSystem, a: &Assignment, seed: u64) -> Result<Verdict, Rejected> {
    let init = CafccInit {
        x: a.get("x").clone(),
        xa: a.get("xa").clone(),
        xb: a.get("xb").clone(),
        xc: a.get("xc").clone(),
        zn: a.get("zn").clone(),
        zw: a.get("zw").clone(),
    };
    let report = run_cafcc(system, &init, &cube_params(a), seed)?;
    Ok(if report.pass {
        Verdict::Holds
    } else {
        Verdict::Violated(json!({
            "step3": report.step3_values,
            "step4": report.step4_values,
            "step5": report.step5_values,
            "step6": report.step6_residual,
        }))
    })
}

fn structure_cases(scope: &Scope) -> Vec<Case> {
    FaceEquation::all()
        .into_iter()
        .filter(|e| scope.equation_ok(e))
        .map(|eq| {
            let mut shape = face_shape();
            shape.push("h".into());
            Case::new(
                eq.id(),
                shape,
                Expect::Identity,
                Box::new(move |a, _| {
                    let p = face_point(a);
                    let h = a.get("h");
                    let mut res = BTreeMap::new();
                    for slot in Slot::ALL {
                        let c = &p.corners[slot.index()];
                        let at = |k: i64| evaluate(&eq, &p.with_corner(slot, c + h * s(k)));
                        let d2 = at(0)? - at(1)? * s(2) + at(2)?;
                        res.insert(format!("{slot:?}").to_lowercase(), d2);
                    }
                    let at = |k: i64| {
                        let mut q = p.clone();
                        q.x = &p.x + h * s(k);
                        evaluate_cleared(&eq, &q)
                    };
                    let d3 = at(3)? - at(2)? * s(3) + at(1)? * s(3) - at(0)?;
                    res.insert("face".into(), d3);
                    let ok = res.values().all(Scalar::is_zero);
                    Ok(zero_or(json!(res), ok))
                }),
            )
        })
        .collect()
}

fn symmetry_cases(scope: &Scope) -> Vec<Case> {
    let mut out = Vec::new();
    for eq in FaceEquation::all().into_iter().filter(|e| scope.equation_ok(e)) {
        for sym in Symmetry::ALL {
            let odd = sym.expected_for(eq.eq_type());
            let label = format!(
                "{} {} ({})",
                eq.id(),
                sym.name(),
                if odd { "odd" } else { "not odd" }
            );
            let expect = if odd { Expect::Identity } else { Expect::NonVanishing };
            let eq = eq.clone();
            out.push(Case::new(
                label,
                face_shape(),
                expect,
                Box::new(move |a, _| Ok(scalar_verdict(symmetry_residual(&eq, &face_point(a), sym)?))),
            ));
        }
    }
    out
}

/// The surd kind the face variable needs in the four-leg form of `eq`.
pub fn fourleg_surd(eq: &FaceEquation) -> Option<SurdKind> {
    let role = match eq.eq_type() {
        EqType::A => LegRole::A,
        EqType::B => LegRole::B,
        EqType::C => LegRole::C,
    };
    let inner = leg_spec(eq, role).and_then(|s| s.surd);
    let outer = paired_a_equation(eq)
        .and_then(|a| leg_spec(&a, LegRole::A))
        .and_then(|s| s.surd);
    inner.or(outer)
}

fn fourleg_cases(scope: &Scope) -> Vec<Case> {
    FaceEquation::all()
        .into_iter()
        .filter(|e| scope.equation_ok(e))
        .map(|eq| {
            let kind = fourleg_surd(&eq);
            Case::new(
                eq.id(),
                face_shape(),
                Expect::Identity,
                Box::new(move |a, _| {
                    let p = face_point(a);
                    let xd = solve_corner(&eq, Slot::D, &p)?;
                    let on = p.with_corner(Slot::D, xd);
                    Ok(scalar_verdict(fourleg_residual(&eq, &on, a.surd("x"))?))
                }),
            )
            .with_surd("x", kind)
        })
        .collect()
}

fn leg_unit_cases(scope: &Scope) -> Vec<Case> {
    FaceEquation::all()
        .into_iter()
        .filter(|e| e.eq_type() == EqType::A && scope.equation_ok(e))
        .map(|eq| {
            let kind = leg_spec(&eq, LegRole::A).and_then(|s| s.surd);
            Case::new(
                eq.id(),
                labels(&["a", "b", "x", "y"]),
                Expect::Identity,
                Box::new(move |a, _| {
                    let x = match a.surd("x") {
                        Some(sp) => LegArg::Surd(sp.clone()),
                        None => LegArg::Plain(a.get("x").clone()),
                    };
                    Ok(scalar_verdict(leg_unit_residual(&eq, &x, a.get("y"), a.get("a"), a.get("b"))?))
                }),
            )
            .with_surd("x", kind)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Lax suites
// ---------------------------------------------------------------------------

type RuleCheck = fn(&NormalizationRule, &Assignment, u64) -> Result<Verdict, Rejected>;

/// One case per normalisation rule in scope; `extra` additional nonzero
/// labels `s1, s2, …` are sampled alongside the cube.
fn rule_cases(scope: &Scope, expect: Expect, check: RuleCheck, extra: usize) -> Vec<Case> {
    NormalizationRule::all()
        .into_iter()
        .filter(|r| scope.rule_ok(r))
        .map(|rule| {
            let mut shape = cube_shape();
            shape.extend((1..=extra).map(|i| format!("s{i}")));
            let kind = rule.surd_kind();
            Case::new(rule.label(), shape, expect, Box::new(move |a, seed| check(&rule, a, seed))).with_surd("zn", kind)
        })
        .collect()
}

fn on_shell(rule: &NormalizationRule, a: &Assignment) -> Result<LaxPoint, Rejected> {
    let system = assemble_system(&rule.prop.system(&rule.deltas)?)?;
    let mut point = lax_point(a);
    put_on_shell(&system, rule.prop.approach(), &mut point)?;
    Ok(point)
}

fn lax_compat_check(rule: &NormalizationRule, a: &Assignment, _: u64) -> Result<Verdict, Rejected> {
    let point = on_shell(rule, a)?;
    Ok(matrix_verdict(rule_residual(rule, &point)?))
}

/// Whether the proof residual of `prop` is displayed as a rank-one matrix.
pub fn rank_one_expected(prop: PropId) -> bool {
    prop != PropId::P4_8
}

fn lax_offshell_check(rule: &NormalizationRule, a: &Assignment, _: u64) -> Result<Verdict, Rejected> {
    let r = rule_residual(rule, &lax_point(a))?;
    if r.is_zero() {
        return Ok(Verdict::Holds);
    }
    if rank_one_expected(rule.prop) && !r.det().is_zero() {
        return Ok(Verdict::Broken(json!({ "residual": r, "det": r.det() })));
    }
    Ok(Verdict::Violated(json!(r)))
}

fn proof_oracle_check(rule: &NormalizationRule, a: &Assignment, seed: u64) -> Result<Verdict, Rejected> {
    let point = if seed.is_multiple_of(2) { on_shell(rule, a)? } else { lax_point(a) };
    let r = rule_residual(rule, &point)?;
    let pr = proof_residual(rule, &point)?.scale(&s(rule.prop.proof_sign()));
    let diff = &r - &pr;
    let z = diff.is_zero();
    Ok(zero_or(json!({ "computed": r, "displayed": pr }), z))
}

/// Number of spectral-parameter values checked per on-shell point.
pub const SPECTRAL_VALUES: usize = 10;

fn spectral_check(rule: &NormalizationRule, a: &Assignment, _: u64) -> Result<Verdict, Rejected> {
    let base = on_shell(rule, a)?;
    let mut values = vec![a.get(match rule.prop.approach() {
        Approach::A => "b1",
        Approach::B => "a2",
    })
    .clone()];
    values.extend((1..SPECTRAL_VALUES).map(|i| a.get(&format!("s{i}")).clone()));
    if values.iter().collect::<BTreeSet<_>>().len() != values.len() {
        return Err(Rejected);
    }
    let mut bad = BTreeMap::new();
    for v in values {
        let mut point = base.clone();
        match rule.prop.approach() {
            Approach::A => point.params.beta.first = v.clone(),
            Approach::B => point.params.alpha.second = v.clone(),
        }
        let r = rule_residual(rule, &point)?;
        if !r.is_zero() {
            bad.insert(v.to_string(), r);
        }
    }
    let z = bad.is_empty();
    Ok(zero_or(json!(bad), z))
}

fn det_cases(scope: &Scope) -> Vec<Case> {
    let mut out: Vec<Case> = LaxKey::all()
        .into_iter()
        .filter(|k| k.has_det() && scope.key_ok(k))
        .map(|key| {
            Case::new(
                key.id(),
                labels(&["a1", "a2", "b1", "b2", "x", "x1", "x2"]),
                Expect::Identity,
                Box::new(move |a, _| {
                    let (al, be) = key_pairs(a);
                    let (x, x1, x2) = (a.get("x"), a.get("x1"), a.get("x2"));
                    let k = catalogue_scale(&key, &al, &be);
                    let bld = key.builder(x, x1, x2, &al, &be)?.det() * k.square();
                    let cat = catalogue_det(&key, x, x1, x2, &al, &be)?;
                    let z = bld == cat;
                    Ok(zero_or(json!({ "builder": bld, "closed_form": cat }), z))
                }),
            )
        })
        .collect();
    let b3 = LaxKey::new(LaxEntry::B3, Deltas::three(Scalar::half(), s(0), Scalar::half())).expect("admissible");
    if scope.key_ok(&b3) {
        out.push(
            Case::new(
                format!("{} surd factor", b3.id()),
                labels(&["a1", "b1", "x", "x2"]),
                Expect::Identity,
                Box::new(|a, _| {
                    let (a1, b1, x) = (a.get("a1"), a.get("b1"), a.get("x"));
                    let sp = a.surd("x2").ok_or(Rejected)?;
                    let xc = &sp.value;
                    let quad = x * xc - a1 / (s(2) * b1) - b1 / (s(2) * a1) * x * x;
                    let lhs = s(-2) * a1 * b1 * quad;
                    let rhs = (b1 * x - a1 * sp.bar()) * (b1 * x - a1 * sp.bar_conjugate());
                    let z = lhs == rhs;
                    Ok(zero_or(json!({ "quadric": lhs, "factorised": rhs }), z))
                }),
            )
            .with_surd("x2", Some(SurdKind::Hyperbolic)),
        );
    }
    out
}

fn key_pairs(a: &Assignment) -> (ParamPair, ParamPair) {
    (
        ParamPair::new(a.get("a1").clone(), a.get("a2").clone()),
        ParamPair::new(a.get("b1").clone(), a.get("b2").clone()),
    )
}

fn builder_cases(scope: &Scope) -> Vec<Case> {
    LaxKey::all()
        .into_iter()
        .filter(|k| scope.key_ok(k))
        .map(|key| {
            Case::new(
                key.id(),
                labels(&["a1", "a2", "b1", "b2", "x", "x1", "x2"]),
                Expect::Identity,
                Box::new(move |a, _| {
                    let (al, be) = key_pairs(a);
                    let (x, x1, x2) = (a.get("x"), a.get("x1"), a.get("x2"));
                    let bld = key.builder(x, x1, x2, &al, &be)?.scale(&catalogue_scale(&key, &al, &be));
                    let cat = catalogue_lax(&key, x, x1, x2, &al, &be)?;
                    let z = bld == cat;
                    Ok(zero_or(json!({ "builder": bld, "closed_form": cat }), z))
                }),
            )
        })
        .collect()
}

fn inverse_cases(scope: &Scope) -> Vec<Case> {
    let mut out = Vec::new();
    for eq in FaceEquation::all().into_iter().filter(|e| scope.equation_ok(e)) {
        let t = eq.eq_type();
        if t != EqType::B {
            let e = eq.clone();
            out.push(Case::new(
                format!("inverse-A {}", eq.id()),
                face_shape(),
                Expect::Identity,
                Box::new(move |a, _| {
                    let p = face_point(a);
                    let [xa, xb, ..] = &p.corners;
                    let m = build_lax_a(&e, &p.x, xa, xb, &p.alpha, &p.beta)?;
                    if m.det().is_zero() {
                        return Err(Rejected);
                    }
                    let r = build_lax_a(&e, &p.x, xb, xa, &p.alpha, &p.beta.hat())?;
                    let prod = &r * &m;
                    let ok = prod.as_scalar_multiple_of_identity().is_some_and(|l| !l.is_zero());
                    Ok(zero_or(json!(prod), ok))
                }),
            ));
            let e = eq.clone();
            out.push(Case::new(
                format!("transport-A {}", eq.id()),
                face_shape(),
                Expect::Identity,
                Box::new(move |a, _| {
                    let p = face_point(a);
                    let [xa, xb, xc, _] = &p.corners;
                    let xd = solve_corner(&e, Slot::D, &p)?;
                    let v = build_lax_a(&e, &p.x, xa, xb, &p.alpha, &p.beta)?.apply(xc);
                    if v[1].is_zero() {
                        return Err(Rejected);
                    }
                    let ok = (&v[0] - &v[1] * &xd).is_zero();
                    Ok(zero_or(json!({ "image": v, "xd": xd }), ok))
                }),
            ));
        }
        if t == EqType::C {
            let e = eq.clone();
            out.push(Case::new(
                format!("inverse-B {}", eq.id()),
                face_shape(),
                Expect::Identity,
                Box::new(move |a, _| {
                    let p = face_point(a);
                    let [xa, _, xc, _] = &p.corners;
                    let m = build_lax_b(&e, &p.x, xa, xc, &p.alpha, &p.beta)?;
                    let prod = &invert(&m)? * &m;
                    let ok = prod == Matrix2::identity();
                    Ok(zero_or(json!(prod), ok))
                }),
            ));
            let e = eq.clone();
            out.push(Case::new(
                format!("transport-B {}", eq.id()),
                face_shape(),
                Expect::Identity,
                Box::new(move |a, _| {
                    let p = face_point(a);
                    let [xa, _, xc, xd] = &p.corners;
                    let xb = solve_corner(&e, Slot::B, &p)?;
                    let v = build_lax_b(&e, &p.x, xa, xc, &p.alpha, &p.beta)?.apply(xd);
                    if v[1].is_zero() {
                        return Err(Rejected);
                    }
                    let ok = (&v[0] - &v[1] * &xb).is_zero();
                    Ok(zero_or(json!({ "image": v, "xb": xb }), ok))
                }),
            ));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Negative controls
// ---------------------------------------------------------------------------

/// A deliberately wrong normalisation of a Lax matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WrongNorm {
    /// The displayed factor times the matrix's own face variable.
    TimesCenter,
    /// The reciprocal of the displayed factor.
    Reciprocal,
    /// The displayed factor without the parameter-only scale `κ`.
    Unscaled,
}

impl WrongNorm {
    pub const ALL: [WrongNorm; 3] = [WrongNorm::TimesCenter, WrongNorm::Reciprocal, WrongNorm::Unscaled];

    pub fn name(self) -> &'static str {
        match self {
            WrongNorm::TimesCenter => "times-center",
            WrongNorm::Reciprocal => "reciprocal",
            WrongNorm::Unscaled => "unscaled",
        }
    }
}

/// The residual of `rule`'s quadruple with a wrong normalisation.
pub fn wrong_residual(rule: &NormalizationRule, wrong: WrongNorm, point: &LaxPoint) -> Result<Matrix2, crate::lax::LaxError> {
    let system = assemble_system(&rule.prop.system(&rule.deltas)?)?;
    let key = rule.key()?;
    let q = assemble_quadruple_with(&system, rule.prop.approach(), point, |x, x1, x2, al, be| {
        let kappa = catalogue_scale(&key, al, be);
        let d = normalization(rule, x, x1, x2, al, be, point.surd.as_ref())?;
        Ok(match wrong {
            WrongNorm::TimesCenter => kappa * d * x,
            WrongNorm::Reciprocal => kappa * d.recip()?,
            WrongNorm::Unscaled => d,
        })
    })?;
    Ok(residual(&q))
}

fn negative_cases(scope: &Scope) -> Vec<Case> {
    let mut out = Vec::new();
    for config in SystemConfig::admissible().into_iter().filter(|c| scope.config_ok(c)) {
        let clean = assemble_system(&config).expect("admissible");
        for index in 1..=14u8 {
            for kind in FaultKind::ALL {
                let fault = Fault { index, kind };
                let faulty = clean.clone().with_fault(fault);
                let clean = clean.clone();
                out.push(Case::new(
                    format!("{} [{}]", config.id(), fault),
                    cube_shape(),
                    Expect::Detect,
                    Box::new(move |a, seed| {
                        let values = vertex_values(a);
                        let params = cube_params(a);
                        let fp = |sys: &EquationSystem| sys.face_point(index, &values, &params).ok_or(Rejected);
                        let before = clean.evaluate_at(index, &fp(&clean)?)?;
                        let after = faulty.evaluate_at(index, &fp(&faulty)?)?;
                        let verdict = cafcc_verdict(&faulty, a, seed)?;
                        Ok(match verdict {
                            Verdict::Holds if before == after => Verdict::Inert,
                            v => v,
                        })
                    }),
                ));
            }
        }
    }
    for rule in NormalizationRule::all().into_iter().filter(|r| scope.rule_ok(r)) {
        for wrong in WrongNorm::ALL {
            let label = format!("{} [{}]", rule.label(), wrong.name());
            let rule = rule.clone();
            let kind = rule.surd_kind();
            out.push(
                Case::new(
                    label,
                    cube_shape(),
                    Expect::Detect,
                    Box::new(move |a, _| {
                        let point = on_shell(&rule, a)?;
                        let good = rule_residual(&rule, &point)?;
                        let bad = wrong_residual(&rule, wrong, &point)?;
                        if !good.is_zero() {
                            return Err(Rejected);
                        }
                        if bad.is_zero() && wrong_is_noop(&rule, wrong, &point)? {
                            return Ok(Verdict::Inert);
                        }
                        Ok(matrix_verdict(bad))
                    }),
                )
                .with_surd("zn", kind),
            );
        }
    }
    out
}

/// Whether `wrong` is a no-op on solutions at `point`.
///
/// With `r_i` the ratio of the wrong factor to the displayed one for `L_i`,
/// the wrong residual on shell is `(r4·r2 − r3·r1)·L4·L2` for approach A
/// and `(r2/r4 − r1/r3)·L4·L2` for approach B (where `L3`, `L4` enter
/// inverted), so the perturbation is invisible exactly when those
/// coefficients vanish.
fn wrong_is_noop(rule: &NormalizationRule, wrong: WrongNorm, point: &LaxPoint) -> Result<bool, Rejected> {
    let system = assemble_system(&rule.prop.system(&rule.deltas)?)?;
    let ratios = std::sync::Mutex::new(Vec::new());
    let key = rule.key()?;
    assemble_quadruple_with(&system, rule.prop.approach(), point, |x, x1, x2, al, be| {
        let kappa = catalogue_scale(&key, al, be);
        let d = normalization(rule, x, x1, x2, al, be, point.surd.as_ref())?;
        let good = &kappa * &d;
        let bad = match wrong {
            WrongNorm::TimesCenter => &good * x,
            WrongNorm::Reciprocal => kappa * d.recip()?,
            WrongNorm::Unscaled => d,
        };
        ratios.lock().expect("unpoisoned").push(bad.checked_div(&good)?);
        Ok(s(1))
    })?;
    let r = ratios.into_inner().expect("unpoisoned");
    Ok(match rule.prop.approach() {
        Approach::A => &r[3] * &r[1] == &r[2] * &r[0],
        Approach::B => &r[1] * &r[2] == &r[0] * &r[3],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let cfg = SamplerConfig::default().with_seed(42).nonzero(["a1"]);
        let a = sample_point(&cfg, &["a1", "x"]).unwrap();
        let b = sample_point(&cfg, &["a1", "x"]).unwrap();
        assert_eq!(a, b);
        let other = sample_point(&cfg.clone().with_seed(43), &["a1", "x"]).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn nonzero_slots_are_nonzero() {
        for seed in 0..300 {
            let cfg = SamplerConfig {
                height_bound: 1,
                ..SamplerConfig::default()
            }
            .with_seed(seed)
            .nonzero(["a1"]);
            assert!(!sample_point(&cfg, &["a1"]).unwrap().get("a1").is_zero());
        }
    }

    #[test]
    fn surd_slots_carry_rational_roots() {
        let cfg = SamplerConfig::default().with_seed(5).surd("zn", SurdKind::Hyperbolic);
        let a = sample_point(&cfg, &["zn"]).unwrap();
        let sp = a.surd("zn").unwrap();
        assert_eq!(&sp.value, a.get("zn"));
        assert_eq!(sp.root.square(), sp.value.square() - 1);
    }

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn empty_scope_is_an_error() {
        let scope = Scope {
            families: vec![Family::B3],
            ..Scope::default()
        };
        assert!(matches!(
            run_suite(Suite::LegUnit, &scope, Some(1), &SamplerConfig::default()),
            Err(VerifyError::EmptyScope(_))
        ));
    }

    #[test]
    fn reports_are_order_independent() {
        let scope = Scope {
            families: vec![Family::A2],
            ..Scope::default()
        };
        let cfg = SamplerConfig::default().with_seed(9);
        let mut a = run_suite(Suite::Fourleg, &scope, Some(3), &cfg).unwrap();
        let mut b = run_suite(Suite::Fourleg, &scope, Some(3), &cfg).unwrap();
        a.wall_time_ms = None;
        b.wall_time_ms = None;
        assert_eq!(a, b);
        assert!(a.pass);
    }
}
