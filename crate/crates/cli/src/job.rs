//! Job specification and input resolution.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use kf_core::algebra::{Limits, Presentation};
use kf_core::catalog::{self, Expected};
use kf_core::io::{self, Document};
use kf_core::scalar::FieldSpec;
use kf_core::tensor::MultilinearForm;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Preregular,
    ThreeRegular,
    Koszul,
    Gorenstein,
    Frobenius,
    Dim2,
    Orbit,
    Infinitesimal,
    VolumeCycle,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::Preregular,
        Check::ThreeRegular,
        Check::Koszul,
        Check::Gorenstein,
        Check::Frobenius,
        Check::Dim2,
        Check::Orbit,
        Check::Infinitesimal,
        Check::VolumeCycle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Preregular => "preregular",
            Check::ThreeRegular => "3regular",
            Check::Koszul => "koszul",
            Check::Gorenstein => "gorenstein",
            Check::Frobenius => "frobenius",
            Check::Dim2 => "dim2",
            Check::Orbit => "orbit",
            Check::Infinitesimal => "infinitesimal",
            Check::VolumeCycle => "volume-cycle",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Check::ALL
            .into_iter()
            .find(|c| c.name() == t)
            .ok_or_else(|| {
                let names: Vec<_> = Check::ALL.iter().map(|c| c.name()).collect();
                format!("unknown check `{t}` (known: {})", names.join(", "))
            })
    }
}

pub fn parse_checks(csv: &str) -> Result<BTreeSet<Check>, String> {
    csv.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

/// `N=<n>,D=<d>`; either part may be omitted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Hypothesis {
    pub n: Option<usize>,
    pub d: Option<usize>,
}

impl FromStr for Hypothesis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut h = Hypothesis::default();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got `{part}`"))?;
            let v: usize = v.trim().parse().map_err(|_| format!("`{}` is not a nonnegative integer", v.trim()))?;
            match k.trim() {
                "N" | "n" if v >= 2 => h.n = Some(v),
                "N" | "n" => return Err("N must be at least 2".into()),
                "D" | "d" if v >= 2 => h.d = Some(v),
                "D" | "d" => return Err("D must be at least 2".into()),
                other => return Err(format!("unknown hypothesis `{other}` (expected N or D)")),
            }
        }
        Ok(h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputRef {
    File(PathBuf),
    Catalog(String),
}

impl fmt::Display for InputRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputRef::File(p) => write!(f, "file:{}", p.display()),
            InputRef::Catalog(r) => write!(f, "catalog:{r}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Emit {
    Json,
    #[default]
    Text,
}

#[derive(Debug, Clone)]
pub struct JobSpec {
    pub input: InputRef,
    pub field: Option<FieldSpec>,
    pub hypothesis: Hypothesis,
    pub max_degree: Option<usize>,
    pub checks: BTreeSet<Check>,
    pub emit: Emit,
    pub budget_mb: u64,
    pub report_only: bool,
}

/// Roughly 256 bytes per tensor coordinate across the sparse structures that touch it.
pub fn limits_for_budget(budget_mb: u64) -> Limits {
    let coords = budget_mb.saturating_mul(1 << 20) / 256;
    Limits { max_coords: usize::try_from(coords).unwrap_or(usize::MAX).max(1) }
}

/// The object under analysis, with shape data resolved from hypotheses, catalog and defaults.
#[derive(Debug, Clone)]
pub struct Subject {
    pub label: String,
    pub field: FieldSpec,
    pub form: Option<MultilinearForm>,
    pub presentation: Presentation,
    pub n: usize,
    pub d: Option<usize>,
    pub expected: Option<Expected>,
}

impl Subject {
    pub fn g(&self) -> usize {
        self.presentation.g()
    }

    pub fn form(&self) -> Result<&MultilinearForm, CliError> {
        self.form.as_ref().ok_or_else(|| CliError::Usage("this check needs a multilinear form, not a bare presentation".into()))
    }
}

fn default_n(w: &MultilinearForm) -> usize {
    if w.degree() <= 2 {
        2
    } else {
        w.degree() - 1
    }
}

fn from_form(label: String, w: MultilinearForm, hyp: Hypothesis, n_default: Option<usize>, d_default: Option<usize>, expected: Option<Expected>) -> Result<Subject, CliError> {
    let n = hyp.n.or(n_default).unwrap_or_else(|| default_n(&w));
    if w.degree() < n && w.degree() != 2 {
        return Err(CliError::Usage(format!("form of degree {} cannot present relations of degree N = {n}", w.degree())));
    }
    // Built from the contractions directly: degenerate forms still get a presentation, and
    // the preregularity verdict is left to the checks.
    let rows = w.contractions(w.degree().saturating_sub(n));
    let presentation = Presentation::homogeneous(w.field(), w.g(), n, &rows, "A(w,N)")
        .map_err(|e| CliError::Usage(format!("cannot build A(w, {n}): {e}")))?;
    Ok(Subject { label, field: w.field(), form: Some(w), presentation, n, d: hyp.d.or(d_default), expected })
}

pub fn resolve(job: &JobSpec) -> Result<Subject, CliError> {
    match &job.input {
        InputRef::Catalog(reference) => {
            let (name, _) = catalog::parse_reference(reference).map_err(|e| CliError::Parse(e.to_string()))?;
            let f = job.field.unwrap_or_else(|| catalog::default_field(&name));
            let entry = catalog::build(reference, Some(f)).map_err(|e| CliError::Parse(e.to_string()))?;
            let label = reference.clone();
            let expected = Some(entry.expected.clone());
            match entry.object.form() {
                Some((w, n)) => from_form(label, w.clone(), job.hypothesis, Some(n), entry.expected.d, expected),
                None => {
                    let presentation = entry.object.presentation().map_err(|e| CliError::Parse(e.to_string()))?;
                    presentation_subject(label, presentation, job.hypothesis, entry.expected.d, expected)
                }
            }
        }
        InputRef::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let fallback = job.field.unwrap_or(FieldSpec::Rationals);
            let doc = io::document_from_json(&text, fallback).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            let label = path.display().to_string();
            match doc {
                Document::Form(w) => from_form(label, w, job.hypothesis, None, None, None),
                Document::Presentation(p) => presentation_subject(label, p, job.hypothesis, None, None),
                Document::Matrix(_) => Err(CliError::Usage("matrix files are inputs to `kf hecke`, not `kf analyze`".into())),
            }
        }
    }
}

fn presentation_subject(label: String, p: Presentation, hyp: Hypothesis, d_default: Option<usize>, expected: Option<Expected>) -> Result<Subject, CliError> {
    let n = p.homogeneous_degree().map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(h) = hyp.n.filter(|&h| h != n) {
        return Err(CliError::Usage(format!("hypothesis N={h} contradicts the presentation's relation degree {n}")));
    }
    Ok(Subject { label, field: p.field(), form: None, presentation: p, n, d: hyp.d.or(d_default), expected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
        }
        assert!(parse_checks("koszul,,bogus").is_err());
        assert_eq!(parse_checks("koszul, preregular,koszul").unwrap().len(), 2);
    }

    #[test]
    fn hypotheses() {
        assert_eq!("N=2,D=3".parse::<Hypothesis>().unwrap(), Hypothesis { n: Some(2), d: Some(3) });
        assert_eq!("D=4".parse::<Hypothesis>().unwrap(), Hypothesis { n: None, d: Some(4) });
        assert!("N=1".parse::<Hypothesis>().is_err());
        assert!("X=3".parse::<Hypothesis>().is_err());
        assert!("N".parse::<Hypothesis>().is_err());
    }

    #[test]
    fn budget_scales() {
        assert_eq!(limits_for_budget(512).max_coords, 1 << 21);
        assert_eq!(limits_for_budget(0).max_coords, 1);
    }
}
