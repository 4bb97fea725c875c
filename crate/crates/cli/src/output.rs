//! Rendering of command results as text or as JSON envelopes.
//!
//! Every JSON document carries the schema version, the command and the
//! seed. Wall-clock timings are dropped unless `--timing` is given, so the
//! JSON for a fixed command line and seed is byte-stable.

use std::path::PathBuf;

use cafcc_core::catalogue::{FaceEquation, FacePoint, Family, Slot};
use cafcc_core::cube::SystemConfig;
use cafcc_core::lax::{NormalizationRule, PropId};
use cafcc_core::verify::{Suite, SuiteReport, SCHEMA_VERSION};
use cafcc_core::Scalar;
use serde_json::{json, Value};

use crate::CliError;

/// Failures listed per suite in the text report before truncation.
const TEXT_FAILURE_LIMIT: usize = 10;

/// Where and how a command reports.
pub struct Output {
    seed: u64,
    /// `None`: text only; `-`: JSON on stdout; otherwise text on stdout
    /// and JSON to the file.
    json: Option<PathBuf>,
    timing: bool,
}

impl Output {
    pub fn new(seed: u64, json: Option<PathBuf>, timing: bool) -> Self {
        Output { seed, json, timing }
    }

    fn envelope(&self, command: &str, body: Value) -> Value {
        let mut doc = json!({
            "schema": SCHEMA_VERSION,
            "command": command,
            "seed": self.seed,
        });
        if let (Value::Object(doc), Value::Object(body)) = (&mut doc, body) {
            doc.extend(body);
        }
        doc
    }

    /// Prints `text` and/or writes `doc`, depending on the JSON mode.
    fn emit(&self, text: &str, doc: Value) -> Result<(), CliError> {
        let rendered = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
        match &self.json {
            None => print!("{text}"),
            Some(path) if path.as_os_str() == "-" => println!("{rendered}"),
            Some(path) => {
                print!("{text}");
                std::fs::write(path, format!("{rendered}\n"))
                    .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
            }
        }
        Ok(())
    }

    pub fn list(&mut self) -> Result<(), CliError> {
        let families: Vec<Value> = Family::ALL
            .iter()
            .map(|f| {
                let eqs: Vec<String> = FaceEquation::all()
                    .iter()
                    .filter(|e| e.family() == *f)
                    .map(FaceEquation::id)
                    .collect();
                json!({ "family": f.to_string(), "type": format!("{:?}", f.eq_type()), "equations": eqs })
            })
            .collect();
        let systems: Vec<String> = SystemConfig::admissible().iter().map(SystemConfig::id).collect();
        let rules = NormalizationRule::all();
        let props: Vec<Value> = PropId::ALL
            .iter()
            .map(|p| {
                let labels: Vec<String> = rules.iter().filter(|r| r.prop == *p).map(|r| r.label()).collect();
                json!({ "prop": p.name(), "entry": p.entry().name(), "rules": labels })
            })
            .collect();
        let suites: Vec<Value> = Suite::ALL
            .iter()
            .map(|s| json!({ "name": s.name(), "default_trials": s.default_trials(), "description": s.describe() }))
            .collect();

        let mut text = String::from("equations:\n");
        for f in &families {
            text += &format!("  {} (type {}): {}\n", f["family"].as_str().unwrap_or_default(), f["type"].as_str().unwrap_or_default(), join(&f["equations"]));
        }
        text += "systems:\n";
        for s in &systems {
            text += &format!("  {s}\n");
        }
        text += "propositions:\n";
        for p in &props {
            text += &format!("  {} ({}):\n", p["prop"].as_str().unwrap_or_default(), p["entry"].as_str().unwrap_or_default());
            for r in p["rules"].as_array().into_iter().flatten() {
                text += &format!("    {}\n", r.as_str().unwrap_or_default());
            }
        }
        text += "suites:\n";
        for s in &suites {
            text += &format!(
                "  {:<22} {:>4} trials  {}\n",
                s["name"].as_str().unwrap_or_default(),
                s["default_trials"],
                s["description"].as_str().unwrap_or_default()
            );
        }
        let doc = self.envelope(
            "list",
            json!({ "families": families, "systems": systems, "propositions": props, "suites": suites }),
        );
        self.emit(&text, doc)
    }

    pub fn eval(&mut self, eq: &FaceEquation, p: &FacePoint, cleared: bool, value: &Scalar) -> Result<(), CliError> {
        let doc = self.envelope(
            "eval",
            json!({ "equation": eq.id(), "cleared": cleared, "point": p, "value": value }),
        );
        self.emit(&format!("{value}\n"), doc)
    }

    pub fn solve(
        &mut self,
        eq: &FaceEquation,
        slot: Slot,
        p: &FacePoint,
        value: &Scalar,
        check: &Scalar,
    ) -> Result<(), CliError> {
        let doc = self.envelope(
            "solve",
            json!({ "equation": eq.id(), "slot": slot, "point": p, "value": value, "residual": check }),
        );
        self.emit(&format!("{value}\n"), doc)?;
        if check.is_zero() {
            Ok(())
        } else {
            Err(CliError::Check(format!("substituting the solution leaves residual {check}")))
        }
    }

    /// Reports suite results; fails with a check error if any suite failed.
    pub fn reports(&mut self, command: &str, mut reports: Vec<SuiteReport>) -> Result<(), CliError> {
        if !self.timing {
            for r in &mut reports {
                r.wall_time_ms = None;
            }
        }
        let pass = reports.iter().all(|r| r.pass);
        let mut text = String::new();
        for r in &reports {
            text += &render_report(r);
        }
        text += &format!("seed: {}\nresult: {}\n", self.seed, verdict(pass));
        let doc = self.envelope(command, json!({ "pass": pass, "reports": reports }));
        self.emit(&text, doc)?;
        if pass {
            Ok(())
        } else {
            let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.suite.as_str()).collect();
            Err(CliError::Check(format!("failing suites: {}", failed.join(", "))))
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn join(list: &Value) -> String {
    list.as_array()
        .into_iter()
        .flatten()
        .filter_map(Value::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_report(r: &SuiteReport) -> String {
    let mut text = format!(
        "{:<22} {}  {} cases, {} trials",
        r.suite,
        verdict(r.pass),
        r.cases,
        r.trials
    );
    if !r.skipped.is_empty() {
        text += &format!(", {} no-op skipped", r.skipped.len());
    }
    if let Some(ms) = r.wall_time_ms {
        text += &format!(", {ms} ms");
    }
    text.push('\n');
    for f in r.failures.iter().take(TEXT_FAILURE_LIMIT) {
        text += &format!("  FAIL {} (seed {}): residual {}\n", f.case, f.seed, f.residual);
    }
    if r.failures.len() > TEXT_FAILURE_LIMIT {
        text += &format!("  ... {} more failures\n", r.failures.len() - TEXT_FAILURE_LIMIT);
    }
    text
}
