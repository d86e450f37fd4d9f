//! Report assembly and rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use kf_core::algebra::Limits;
use kf_core::hecke;
use kf_core::io::SCHEMA;
use kf_core::linalg::DenseMatrix;

use crate::checks::{self, matrix_literals, Block};
use crate::job::{self, Check, JobSpec};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub kind: &'static str,
    pub input: String,
    pub field: String,
    pub g: usize,
    pub n: usize,
    pub d: Option<usize>,
    pub max_degree: usize,
    pub budget_mb: u64,
    /// Keyed by check name, so ordering is independent of scheduling.
    pub checks: BTreeMap<String, Block>,
    pub passed: bool,
    /// Wall-clock milliseconds per check; the only nondeterministic field.
    pub timings: BTreeMap<String, u64>,
}

pub fn run(job: &JobSpec) -> Result<Report, CliError> {
    let limits: Limits = job::limits_for_budget(job.budget_mb);
    let subject = job::resolve(job)?;
    let t = job.max_degree.unwrap_or_else(|| Limits::default_cutoff(subject.g()));
    if job.checks.contains(&Check::Gorenstein) && subject.form.is_some() && subject.d.is_none() {
        return Err(CliError::Usage("gorenstein needs shape hypotheses: pass --hypothesis N=<n>,D=<d>".into()));
    }
    let checks: Vec<Check> = job.checks.iter().copied().collect();
    let results: Vec<(Check, Result<Block, CliError>, u64)> = checks
        .par_iter()
        .map(|&c| {
            let start = Instant::now();
            let r = checks::run(c, &subject, t, limits);
            (c, r, start.elapsed().as_millis() as u64)
        })
        .collect();
    let mut blocks = BTreeMap::new();
    let mut timings = BTreeMap::new();
    for (c, r, ms) in results {
        blocks.insert(c.name().to_string(), r?);
        timings.insert(c.name().to_string(), ms);
    }
    let passed = blocks.values().all(|b| b.passed);
    Ok(Report {
        schema: SCHEMA,
        kind: "report",
        input: job.input.to_string(),
        field: subject.field.to_string(),
        g: subject.g(),
        n: subject.n,
        d: subject.d,
        max_degree: t,
        budget_mb: job.budget_mb,
        checks: blocks,
        passed,
        timings,
    })
}

fn verdict(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kf report ({})", self.schema);
        let _ = writeln!(s, "input      {}", self.input);
        let _ = writeln!(s, "field      {}", self.field);
        let d = self.d.map_or("-".to_string(), |d| d.to_string());
        let _ = writeln!(s, "shape      g={} N={} D={}", self.g, self.n, d);
        let _ = writeln!(s, "cutoff     total degree {}", self.max_degree);
        for (name, b) in &self.checks {
            let _ = writeln!(s, "\n[{}] {name}", verdict(b.passed));
            let _ = writeln!(s, "  {}", b.summary);
            let _ = writeln!(s, "  criterion: {}", b.realizes);
            for c in &b.caveats {
                let _ = writeln!(s, "  note: {c}");
            }
            if let Some(w) = b.details.get("witness").filter(|w| !w.is_null()) {
                let _ = writeln!(s, "  witness: {w}");
            }
        }
        let _ = writeln!(s, "\noverall    {}", verdict(self.passed));
        let times: Vec<String> = self.timings.iter().map(|(k, v)| format!("{k}={v}ms")).collect();
        let _ = writeln!(s, "timings    {}", times.join(" "));
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HeckeCase {
    pub q: Option<String>,
    pub k: Vec<Vec<String>>,
    pub report: hecke::HeckeReport,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeckeRun {
    pub schema: &'static str,
    pub kind: &'static str,
    pub field: String,
    pub b: Vec<Vec<String>>,
    pub cases: Vec<HeckeCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub passed: bool,
}

impl HeckeRun {
    pub fn new(b: &DenseMatrix, cases: &[(Option<String>, DenseMatrix)]) -> Result<Self, CliError> {
        let cases = cases
            .iter()
            .map(|(q, k)| {
                let report = hecke::hecke_report(b, k).map_err(|e| CliError::Usage(e.to_string()))?;
                let passed = report.eq_yb && report.yang_baxter && report.hecke && report.relation_equivalent;
                Ok(HeckeCase { q: q.clone(), k: matrix_literals(k), report, passed })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let passed = !cases.is_empty() && cases.iter().all(|c| c.passed);
        Ok(HeckeRun { schema: SCHEMA, kind: "hecke-report", field: b.field().to_string(), b: matrix_literals(b), cases, error: None, passed })
    }

    pub fn obstructed(b: &DenseMatrix, reason: String) -> Self {
        HeckeRun {
            schema: SCHEMA,
            kind: "hecke-report",
            field: b.field().to_string(),
            b: matrix_literals(b),
            cases: Vec::new(),
            error: Some(reason),
            passed: false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kf hecke report ({}), field {}", self.schema, self.field);
        let _ = writeln!(s, "B = {}", json!(self.b));
        if let Some(e) = &self.error {
            let _ = writeln!(s, "[FAIL] {e}");
        }
        for c in &self.cases {
            let q = c.q.as_deref().unwrap_or("(given K)");
            let r = &c.report;
            let _ = writeln!(
                s,
                "[{}] q={q}: eqYB {} | Yang-Baxter {} | Hecke {} (eigenvalue {}) | relations span B {} | flip {}",
                verdict(c.passed),
                r.eq_yb,
                r.yang_baxter,
                r.hecke,
                r.eigenvalue,
                r.relation_equivalent,
                r.is_flip
            );
        }
        let _ = writeln!(s, "overall {}", verdict(self.passed));
        s
    }
}
