//! The `kf` command-line front-end.
//!
//! Exit codes: 0 all checks pass (or `--report-only`), 1 some check failed,
//! 2 usage or parse error, 3 budget exceeded.

pub mod checks;
pub mod job;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use kf_core::algebra::Limits;
use kf_core::catalog::{self, CatalogObject};
use kf_core::hecke;
use kf_core::io;
use kf_core::linalg::DenseMatrix;
use kf_core::scalar::FieldSpec;

use job::{Emit, Hypothesis, InputRef, JobSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kf", version, about = "Exact analysis of graded algebras presented by multilinear forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run checks on a form or presentation.
    Analyze(AnalyzeArgs),
    /// Verify a Hecke symmetry built from a bilinear form.
    Hecke(HeckeArgs),
    /// Inspect the built-in catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Write a catalog entry as a `kf/1` JSON file.
    Export(ExportArgs),
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    /// List entries with their parameters and defaults.
    List {
        #[arg(long, value_enum, default_value_t = EmitArg::Text)]
        emit: EmitArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EmitArg {
    Json,
    Text,
}

impl From<EmitArg> for Emit {
    fn from(e: EmitArg) -> Self {
        match e {
            EmitArg::Json => Emit::Json,
            EmitArg::Text => Emit::Text,
        }
    }
}

fn parse_field(s: &str) -> Result<FieldSpec, String> {
    s.parse::<FieldSpec>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["input", "catalog"]))]
pub struct AnalyzeArgs {
    /// A `kf/1` form or presentation file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// A catalog reference, `name` or `name:key=value,...`.
    #[arg(long)]
    pub catalog: Option<String>,
    /// `q` or `fp:<p>`; a field recorded in the input file takes precedence.
    #[arg(long, value_parser = parse_field)]
    pub field: Option<FieldSpec>,
    /// Comma-separated checks.
    #[arg(long, default_value = "preregular,koszul")]
    pub check: String,
    /// Shape hypotheses, `N=<n>,D=<d>`.
    #[arg(long)]
    pub hypothesis: Option<Hypothesis>,
    /// Total-degree cutoff for truncated certifications.
    #[arg(long)]
    pub max_degree: Option<usize>,
    #[arg(long, value_enum, default_value_t = EmitArg::Text)]
    pub emit: EmitArg,
    /// Memory budget; requests needing larger tensor spaces stop with exit code 3.
    #[arg(long, default_value_t = 512)]
    pub budget_mb: u64,
    /// Exit 0 whatever the verdicts.
    #[arg(long)]
    pub report_only: bool,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("operator").args(["k", "standard_q"]))]
pub struct HeckeArgs {
    /// The bilinear form's matrix: a `kf/1` matrix file or inline rows `a,b;c,d`.
    #[arg(long = "B", alias = "b")]
    pub b: String,
    /// The companion matrix K (file or inline).
    #[arg(long = "K", alias = "k")]
    pub k: Option<String>,
    /// Build the standard solution K = q·B⁻¹ for this q.
    #[arg(long)]
    pub standard_q: Option<String>,
    #[arg(long, value_parser = parse_field)]
    pub field: Option<FieldSpec>,
    #[arg(long, value_enum, default_value_t = EmitArg::Text)]
    pub emit: EmitArg,
    #[arg(long, default_value_t = 512)]
    pub budget_mb: u64,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// A catalog reference, `name` or `name:key=value,...`.
    #[arg(long)]
    pub catalog: String,
    #[arg(long, value_parser = parse_field)]
    pub field: Option<FieldSpec>,
    /// Export the presented algebra instead of the form.
    #[arg(long)]
    pub presentation: bool,
    /// Write here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Text for standard output and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

pub fn execute(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Hecke(h) => hecke_cmd(h),
        Command::Catalog { action: CatalogAction::List { emit } } => Ok(Outcome { stdout: catalog_list(emit.into()), code: 0 }),
        Command::Export(e) => export(e),
    }
}

pub fn job_from_args(a: AnalyzeArgs) -> Result<JobSpec, CliError> {
    let input = match (a.input, a.catalog) {
        (Some(p), None) => InputRef::File(p),
        (None, Some(c)) => InputRef::Catalog(c),
        _ => return Err(CliError::Usage("give exactly one of --input, --catalog".into())),
    };
    let checks = job::parse_checks(&a.check).map_err(CliError::Usage)?;
    if checks.is_empty() {
        return Err(CliError::Usage("no checks requested".into()));
    }
    Ok(JobSpec {
        input,
        field: a.field,
        hypothesis: a.hypothesis.unwrap_or_default(),
        max_degree: a.max_degree,
        checks,
        emit: a.emit.into(),
        budget_mb: a.budget_mb,
        report_only: a.report_only,
    })
}

fn analyze(a: AnalyzeArgs) -> Result<Outcome, CliError> {
    let job = job_from_args(a)?;
    let rep = report::run(&job)?;
    let code = if rep.passed || job.report_only { 0 } else { 1 };
    let stdout = match job.emit {
        Emit::Json => rep.to_json(),
        Emit::Text => rep.to_text(),
    };
    Ok(Outcome { stdout, code })
}

fn read_matrix(spec: &str, f: FieldSpec) -> Result<DenseMatrix, CliError> {
    let path = std::path::Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {spec}: {e}")))?;
        return io::matrix_from_json(&text, f).map_err(|e| CliError::Parse(format!("{spec}: {e}")));
    }
    let rows = spec
        .split(';')
        .map(|r| r.split(',').map(|x| f.parse_scalar(x.trim())).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Parse(format!("matrix `{spec}`: {e}")))?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Parse(format!("matrix `{spec}` is not square")));
    }
    Ok(DenseMatrix::from_rows(f, rows))
}

fn hecke_cmd(h: HeckeArgs) -> Result<Outcome, CliError> {
    let f = h.field.unwrap_or(FieldSpec::Rationals);
    let b = read_matrix(&h.b, f)?;
    let g = b.nrows();
    // The Yang-Baxter check works with dense g³ × g³ matrices.
    let needed = (g as u128).pow(6) * 64;
    if needed > u128::from(h.budget_mb) << 20 {
        return Err(CliError::Budget(format!("g = {g} needs about {} MiB", needed >> 20)));
    }
    let f = b.field();
    let cases: Vec<(Option<String>, DenseMatrix)> = match (&h.k, &h.standard_q) {
        (Some(k), _) => vec![(None, read_matrix(k, f)?)],
        (None, Some(q)) => {
            let q = f.parse_scalar(q).map_err(|e| CliError::Parse(format!("q: {e}")))?;
            let (_, k) = hecke::standard_hecke(&b, &q).map_err(|e| CliError::Usage(e.to_string()))?;
            vec![(Some(q.to_string()), k)]
        }
        (None, None) => match hecke::standard_roots(&b) {
            Ok(roots) => roots
                .iter()
                .map(|q| hecke::standard_hecke(&b, q).map(|(_, k)| (Some(q.to_string()), k)))
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(e.to_string()))?,
            Err(e) => {
                let r = report::HeckeRun::obstructed(&b, e.to_string());
                let stdout = if matches!(Emit::from(h.emit), Emit::Json) { r.to_json() } else { r.to_text() };
                return Ok(Outcome { stdout, code: 1 });
            }
        },
    };
    let r = report::HeckeRun::new(&b, &cases)?;
    let code = if r.passed { 0 } else { 1 };
    let stdout = match Emit::from(h.emit) {
        Emit::Json => r.to_json(),
        Emit::Text => r.to_text(),
    };
    Ok(Outcome { stdout, code })
}

fn catalog_list(emit: Emit) -> String {
    match emit {
        Emit::Json => serde_json::to_string_pretty(&catalog::ENTRIES).expect("plain data") + "\n",
        Emit::Text => {
            let mut out = String::new();
            for e in catalog::ENTRIES {
                let field = catalog::default_field(e.name);
                out.push_str(&format!("{:<20} field {:<6} params: {}\n", e.name, field.to_string(), if e.params.is_empty() { "-" } else { e.params }));
                if !e.constraints.is_empty() {
                    out.push_str(&format!("{:<20} constraints: {}\n", "", e.constraints));
                }
            }
            out
        }
    }
}

fn export(e: ExportArgs) -> Result<Outcome, CliError> {
    let (name, _) = catalog::parse_reference(&e.catalog).map_err(|x| CliError::Parse(x.to_string()))?;
    let f = e.field.unwrap_or_else(|| catalog::default_field(&name));
    let entry = catalog::build(&e.catalog, Some(f)).map_err(|x| CliError::Parse(x.to_string()))?;
    let text = match (&entry.object, e.presentation) {
        (CatalogObject::Form { w, .. }, false) => io::form_to_json(w),
        (obj, _) => io::presentation_to_json(&obj.presentation().map_err(|x| CliError::Usage(x.to_string()))?),
    } + "\n";
    match e.output {
        Some(path) => {
            std::fs::write(&path, &text).map_err(|x| CliError::Usage(format!("cannot write {}: {x}", path.display())))?;
            Ok(Outcome { stdout: String::new(), code: 0 })
        }
        None => Ok(Outcome { stdout: text, code: 0 }),
    }
}

/// Limits used for `analyze` under the given budget.
pub fn limits(job: &JobSpec) -> Limits {
    job::limits_for_budget(job.budget_mb)
}
