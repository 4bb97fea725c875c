//! `cafcc` — command-line front end to the face-centered quad equation
//! verifier.
//!
//! Verbs: `list`, `eval`, `solve`, `cafcc`, `lax`, `suite`, `crosscheck`.
//! All numbers on input and output are exact rationals (`p` or `p/q`).
//! Exit codes: 0 when every requested check passes, 1 on a check failure,
//! 2 on a usage error, 3 on an internal error.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use cafcc_core::catalogue::{evaluate, evaluate_cleared, Deltas, FaceEquation, FacePoint, Family, ParamPair, Slot};
use cafcc_core::cube::{solve_corner, CubeError, Fault, SystemConfig};
use cafcc_core::lax::{Branch, PropId};
use cafcc_core::verify::{run_suite, SamplerConfig, Scope, Suite, SuiteReport, VerifyError};
use cafcc_core::{s, Scalar};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::output::Output;

/// Failures that end a command, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Check(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::EmptyScope(_) | VerifyError::UnknownSuite(_) => CliError::Usage(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cafcc", version, about = "Exact verification of face-centered quad equations")]
struct Cli {
    /// Base seed for all sampled points.
    #[arg(long, global = true, env = "CAFCC_SEED", default_value_t = 0)]
    seed: u64,

    /// Also write the JSON report to FILE; `-` prints it to stdout in
    /// place of the text report.
    #[arg(long, global = true, value_name = "FILE")]
    json: Option<PathBuf>,

    /// Include wall-clock timings in reports (makes JSON run-dependent).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List equations, systems, propositions and suites.
    List,
    /// Evaluate one face equation at a point.
    Eval {
        /// Equation identifier, e.g. `A3:d=1`, `B3:1/2,0,1/2`, `D1`.
        #[arg(long = "eq")]
        eq: FaceEquation,
        #[command(flatten)]
        point: PointArgs,
        /// Evaluate the denominator-cleared polynomial.
        #[arg(long)]
        cleared: bool,
    },
    /// Solve one face equation for a corner slot.
    Solve {
        #[arg(long = "eq")]
        eq: FaceEquation,
        /// The corner to solve for: a, b, c or d.
        #[arg(long)]
        slot: Slot,
        /// The other three corners in slot order (a four-value list also
        /// works; the target entry is ignored).
        #[command(flatten)]
        point: PointArgs,
    },
    /// Run the six-step consistency check on one or all systems.
    Cafcc {
        /// System identifier such as `A3:d=0` or `ABC:A2,B2,C2:1,0,1`, or `all`.
        #[arg(long, default_value = "all")]
        config: ConfigArg,
        #[arg(long)]
        trials: Option<u32>,
        /// Corrupt one equation, `INDEX:KIND` with KIND one of unhat-alpha,
        /// unhat-beta, swap-alpha-beta, offset.
        #[arg(long)]
        inject_fault: Option<Fault>,
    },
    /// Check Lax compatibility, off-shell non-vanishing and the proof
    /// residual for the selected normalisations.
    Lax {
        #[arg(long)]
        prop: Option<PropId>,
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long)]
        trials: Option<u32>,
    },
    /// Run property suites.
    Suite {
        /// A suite name or `all`.
        #[arg(long, default_value = "all")]
        name: SuiteArg,
        #[arg(long)]
        trials: Option<u32>,
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long)]
        prop: Option<PropId>,
        #[command(flatten)]
        rule: RuleArgs,
        /// Corrupt one equation of every system in the cafcc suite.
        #[arg(long)]
        inject_fault: Option<Fault>,
    },
    /// Compare generic Lax builders with the closed-form catalogue.
    Crosscheck {
        #[arg(long, value_enum)]
        what: Crosscheck,
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long)]
        trials: Option<u32>,
    },
}

/// A face point given as `--corners` and/or `--point key=value,...`.
#[derive(Debug, Args)]
struct PointArgs {
    /// Comma-separated corner values in slot order a, b, c, d.
    #[arg(long, allow_hyphen_values = true)]
    corners: Option<String>,
    /// Comma-separated `key=value` pairs with keys x, a, b, c, d, alpha1,
    /// alpha2, beta1, beta2. Unset values default to x=1, alpha=(2,3),
    /// beta=(5,7), corners 0.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
}

#[derive(Debug, Args)]
struct FilterArgs {
    /// Restrict to these families (comma-separated).
    #[arg(long, value_delimiter = ',')]
    family: Vec<Family>,
    /// Restrict to one δ-regime, e.g. `1/2,0,1/2` or `d=1`.
    #[arg(long, allow_hyphen_values = true)]
    deltas: Option<String>,
    /// Restrict to one system.
    #[arg(long)]
    config: Option<SystemConfig>,
}

#[derive(Debug, Args)]
struct RuleArgs {
    /// Normalisation variant (1 or 2).
    #[arg(long)]
    variant: Option<u8>,
    /// Sign choice ε = +1 or -1.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_eps)]
    eps: Option<i8>,
    /// Surd branch: plus or minus.
    #[arg(long)]
    branch: Option<Branch>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Crosscheck {
    BuilderVsCatalogue,
    Det,
}

#[derive(Debug, Clone)]
enum ConfigArg {
    All,
    One(Box<SystemConfig>),
}

impl std::str::FromStr for ConfigArg {
    type Err = CubeError;

    fn from_str(st: &str) -> Result<Self, Self::Err> {
        if st == "all" {
            Ok(ConfigArg::All)
        } else {
            st.parse().map(|c| ConfigArg::One(Box::new(c)))
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum SuiteArg {
    All,
    One(Suite),
}

impl std::str::FromStr for SuiteArg {
    type Err = VerifyError;

    fn from_str(st: &str) -> Result<Self, Self::Err> {
        if st == "all" {
            Ok(SuiteArg::All)
        } else {
            st.parse().map(SuiteArg::One)
        }
    }
}

fn parse_eps(st: &str) -> Result<i8, String> {
    match st {
        "1" | "+1" | "+" | "plus" => Ok(1),
        "-1" | "-" | "minus" => Ok(-1),
        _ => Err(format!("expected +1 or -1, got {st}")),
    }
}

fn parse_scalar(st: &str) -> Result<Scalar, CliError> {
    st.parse()
        .map_err(|e| CliError::Usage(format!("bad number {st:?}: {e}")))
}

fn parse_list(st: &str) -> Result<Vec<Scalar>, CliError> {
    st.split(',').map(parse_scalar).collect()
}

/// Parses a δ-regime; absent trailing components are zero.
fn parse_deltas(st: &str) -> Result<Deltas, CliError> {
    let body = st.trim().strip_prefix("d=").unwrap_or(st.trim());
    let mut v = parse_list(body)?;
    if v.len() > 3 {
        return Err(CliError::Usage(format!("at most three deltas, got {st:?}")));
    }
    v.resize(3, s(0));
    let [d1, d2, d3]: [Scalar; 3] = v.try_into().expect("three entries");
    Ok(Deltas::three(d1, d2, d3))
}

impl PointArgs {
    /// Builds the face point; `skip` names a slot whose corner the caller
    /// will solve for, so a three-value `--corners` list fills the others.
    fn face_point(&self, skip: Option<Slot>) -> Result<FacePoint, CliError> {
        let mut x = s(1);
        let mut corners = [s(0), s(0), s(0), s(0)];
        let mut alpha = ParamPair::new(s(2), s(3));
        let mut beta = ParamPair::new(s(5), s(7));
        if let Some(list) = &self.corners {
            let v = parse_list(list)?;
            let targets: Vec<usize> = match (v.len(), skip) {
                (4, _) => (0..4).collect(),
                (3, Some(slot)) => (0..4).filter(|&i| i != slot.index()).collect(),
                _ => {
                    let want = if skip.is_some() { "3 or 4" } else { "4" };
                    return Err(CliError::Usage(format!("--corners needs {want} values, got {}", v.len())));
                }
            };
            for (i, val) in targets.into_iter().zip(v) {
                corners[i] = val;
            }
        }
        if let Some(spec) = &self.point {
            for item in spec.split(',') {
                let (k, val) = item
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("expected key=value in --point, got {item:?}")))?;
                let val = parse_scalar(val)?;
                match k.trim() {
                    "x" => x = val,
                    "a" | "xa" => corners[0] = val,
                    "b" | "xb" => corners[1] = val,
                    "c" | "xc" => corners[2] = val,
                    "d" | "xd" => corners[3] = val,
                    "alpha1" => alpha.first = val,
                    "alpha2" => alpha.second = val,
                    "beta1" => beta.first = val,
                    "beta2" => beta.second = val,
                    other => return Err(CliError::Usage(format!("unknown --point key {other:?}"))),
                }
            }
        }
        Ok(FacePoint::new(x, corners, alpha, beta))
    }
}

impl FilterArgs {
    fn apply(&self, scope: &mut Scope) -> Result<(), CliError> {
        scope.families = self.family.clone();
        scope.deltas = self.deltas.as_deref().map(parse_deltas).transpose()?;
        if let Some(c) = &self.config {
            scope.configs = vec![c.clone()];
        }
        Ok(())
    }
}

impl RuleArgs {
    fn apply(&self, scope: &mut Scope) {
        scope.variant = self.variant;
        scope.eps = self.eps;
        scope.branch = self.branch;
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut out = Output::new(cli.seed, cli.json.clone(), cli.timing);
    let cfg = SamplerConfig::default().with_seed(cli.seed);
    let suites = |list: &[Suite], scope: &Scope, trials: Option<u32>| -> Result<Vec<SuiteReport>, CliError> {
        let mut reports = Vec::new();
        for &suite in list {
            match run_suite(suite, scope, trials, &cfg) {
                Err(VerifyError::EmptyScope(_)) if list.len() > 1 => continue,
                r => reports.push(r?),
            }
        }
        if reports.is_empty() {
            return Err(CliError::Usage("the filters select no cases".into()));
        }
        Ok(reports)
    };

    match &cli.command {
        Command::List => out.list(),
        Command::Eval { eq, point, cleared } => {
            let p = point.face_point(None)?;
            let f = if *cleared { evaluate_cleared } else { evaluate };
            let value = f(eq, &p).map_err(|e| CliError::Usage(format!("cannot evaluate {eq} here: {e}")))?;
            out.eval(eq, &p, *cleared, &value)
        }
        Command::Solve { eq, slot, point } => {
            let p = point.face_point(Some(*slot))?;
            let value = solve_corner(eq, *slot, &p).map_err(|e| CliError::Check(format!("cannot solve {eq}: {e}")))?;
            let check = evaluate(eq, &p.with_corner(*slot, value.clone()))
                .map_err(|e| CliError::Internal(format!("solution leaves the domain: {e}")))?;
            out.solve(eq, *slot, &p, &value, &check)
        }
        Command::Cafcc { config, trials, inject_fault } => {
            let mut scope = Scope {
                fault: *inject_fault,
                ..Scope::default()
            };
            if let ConfigArg::One(c) = config {
                scope.configs = vec![(**c).clone()];
            }
            let reports = suites(&[Suite::Cafcc], &scope, *trials)?;
            out.reports("cafcc", reports)
        }
        Command::Lax { prop, rule, trials } => {
            let mut scope = Scope {
                props: prop.iter().copied().collect(),
                ..Scope::default()
            };
            rule.apply(&mut scope);
            let list = [Suite::LaxCompat, Suite::LaxOffshell, Suite::ProofOracle];
            let reports = suites(&list, &scope, *trials)?;
            out.reports("lax", reports)
        }
        Command::Suite {
            name,
            trials,
            filter,
            prop,
            rule,
            inject_fault,
        } => {
            let mut scope = Scope {
                props: prop.iter().copied().collect(),
                fault: *inject_fault,
                ..Scope::default()
            };
            filter.apply(&mut scope)?;
            rule.apply(&mut scope);
            let list: Vec<Suite> = match name {
                SuiteArg::All => Suite::ALL.to_vec(),
                SuiteArg::One(s) => vec![*s],
            };
            let reports = suites(&list, &scope, *trials)?;
            out.reports("suite", reports)
        }
        Command::Crosscheck { what, filter, trials } => {
            let mut scope = Scope::default();
            filter.apply(&mut scope)?;
            let suite = match what {
                Crosscheck::BuilderVsCatalogue => Suite::BuilderVsCatalogue,
                Crosscheck::Det => Suite::Det,
            };
            let reports = suites(&[suite], &scope, *trials)?;
            out.reports("crosscheck", reports)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cafcc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
