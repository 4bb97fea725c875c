//! Acceptance battery: one line per criterion, exit status nonzero if any
//! criterion fails.
//!
//! The seed defaults to 0 and can be overridden with `CAFCC_SEED`.

use std::process::ExitCode;
use std::time::Instant;

use cafcc_core::verify::{run_suite, SamplerConfig, Scope, Suite, SuiteReport};

struct Criterion {
    number: u8,
    title: &'static str,
    runs: &'static [(Suite, u32)],
}

const CRITERIA: [Criterion; 7] = [
    Criterion {
        number: 1,
        title: "CAFCC battery",
        runs: &[(Suite::Cafcc, 100)],
    },
    Criterion {
        number: 2,
        title: "Lax compatibility on and off solutions",
        runs: &[(Suite::LaxCompat, 50), (Suite::LaxOffshell, 20)],
    },
    Criterion {
        number: 3,
        title: "proof-residual oracle",
        runs: &[(Suite::ProofOracle, 50)],
    },
    Criterion {
        number: 4,
        title: "builder/catalogue equivalence and determinants",
        runs: &[(Suite::BuilderVsCatalogue, 50), (Suite::Det, 50)],
    },
    Criterion {
        number: 5,
        title: "structural identities",
        runs: &[
            (Suite::Structure, 50),
            (Suite::Symmetry, 50),
            (Suite::LegUnit, 50),
            (Suite::Fourleg, 50),
        ],
    },
    Criterion {
        number: 6,
        title: "spectral sweep",
        runs: &[(Suite::SpectralSweep, 10)],
    },
    Criterion {
        number: 7,
        title: "negative controls",
        runs: &[(Suite::NegativeControl, 10)],
    },
];

fn summarize(r: &SuiteReport) -> String {
    let mut line = format!("{} {} cases/{} trials", r.suite, r.cases, r.trials);
    if !r.skipped.is_empty() {
        line.push_str(&format!(", {} no-op skipped", r.skipped.len()));
    }
    if !r.pass {
        line.push_str(&format!(", failing: {}", r.failing_cases().join("; ")));
    }
    line
}

fn main() -> ExitCode {
    let seed = std::env::var("CAFCC_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0);
    let cfg = SamplerConfig::default().with_seed(seed);
    println!("acceptance battery, seed {seed}");
    let mut all = true;
    for c in &CRITERIA {
        let start = Instant::now();
        let mut pass = true;
        let mut parts = Vec::new();
        for &(suite, trials) in c.runs {
            match run_suite(suite, &Scope::default(), Some(trials), &cfg) {
                Ok(r) => {
                    pass &= r.pass;
                    parts.push(summarize(&r));
                }
                Err(e) => {
                    pass = false;
                    parts.push(format!("{suite} error: {e}"));
                }
            }
        }
        all &= pass;
        println!(
            "criterion {}: {} — {} [{}] ({:.1}s)",
            c.number,
            if pass { "PASS" } else { "FAIL" },
            c.title,
            parts.join(" | "),
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: some criteria fail");
        ExitCode::FAILURE
    }
}
