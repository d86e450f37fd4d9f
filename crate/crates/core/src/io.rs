//! Versioned JSON files for forms, presentations and matrices (`"schema": "kf/1"`).
//!
//! Indices in files are 1-based; scalars are string literals (`"3"`, `"-1/2"`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Presentation};
use crate::linalg::{DenseMatrix, SVec};
use crate::scalar::{FieldSpec, Scalar, ScalarError};
use crate::tensor::{encode0, gpow, MultilinearForm, TensorError};

pub const SCHEMA: &str = "kf/1";

/// Hard cap on `g^n` accepted from files, so hostile inputs cannot request huge ambient spaces.
pub const MAX_AMBIENT: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {reason}")]
    Parse { line: usize, column: usize, reason: String },
    #[error("invalid document: {0}")]
    Schema(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse { line: e.line(), column: e.column(), reason: e.to_string() }
    }
}

type Result<T> = std::result::Result<T, IoError>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFile {
    pub schema: String,
    #[serde(default = "form_kind")]
    pub kind: String,
    pub g: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub entries: Vec<(Vec<usize>, String)>,
}

fn form_kind() -> String {
    "form".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationBlock {
    pub degree: usize,
    pub vectors: Vec<Vec<(Vec<usize>, String)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationFile {
    pub schema: String,
    #[serde(default = "presentation_kind")]
    pub kind: String,
    pub g: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    pub relations: Vec<RelationBlock>,
}

fn presentation_kind() -> String {
    "presentation".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub schema: String,
    #[serde(default = "matrix_kind")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub rows: Vec<Vec<String>>,
}

fn matrix_kind() -> String {
    "matrix".into()
}

/// A parsed input document of any kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Form(MultilinearForm),
    Presentation(Presentation),
    Matrix(DenseMatrix),
}

fn check_schema(schema: &str, kind: &str, expected: &str) -> Result<()> {
    if schema != SCHEMA {
        return Err(IoError::Schema(format!("unsupported schema `{schema}`, expected `{SCHEMA}`")));
    }
    if kind != expected {
        return Err(IoError::Schema(format!("expected kind `{expected}`, found `{kind}`")));
    }
    Ok(())
}

/// The file's own field wins; `fallback` applies when the file has none.
fn resolve_field(declared: Option<&str>, fallback: FieldSpec) -> Result<FieldSpec> {
    match declared {
        Some(s) => Ok(s.parse::<FieldSpec>()?),
        None => Ok(fallback),
    }
}

fn check_ambient(g: usize, n: usize) -> Result<usize> {
    if g == 0 {
        return Err(IoError::Schema("g must be positive".into()));
    }
    crate::tensor::checked_pow(g, n, MAX_AMBIENT).map_err(IoError::from)
}

fn index_code(g: usize, n: usize, idx: &[usize]) -> Result<usize> {
    if idx.len() != n {
        return Err(IoError::Schema(format!("index {idx:?} has length {}, expected {n}", idx.len())));
    }
    if let Some(bad) = idx.iter().find(|&&x| x == 0 || x > g) {
        return Err(IoError::Schema(format!("index entry {bad} outside 1..={g}")));
    }
    let zero: Vec<usize> = idx.iter().map(|x| x - 1).collect();
    Ok(encode0(g, &zero))
}

fn terms_to_vec(f: FieldSpec, g: usize, n: usize, terms: &[(Vec<usize>, String)]) -> Result<SVec> {
    let pairs = terms
        .iter()
        .map(|(idx, lit)| Ok((index_code(g, n, idx)?, f.parse_scalar(lit)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SVec::from_pairs(pairs))
}

fn vec_to_terms(g: usize, n: usize, v: &SVec) -> Vec<(Vec<usize>, String)> {
    v.iter().map(|(c, s)| (crate::tensor::digits0(g, n, *c).into_iter().map(|d| d + 1).collect(), s.to_string())).collect()
}

pub fn form_from_json(text: &str, fallback: FieldSpec) -> Result<MultilinearForm> {
    let file: FormFile = serde_json::from_str(text)?;
    check_schema(&file.schema, &file.kind, "form")?;
    let f = resolve_field(file.field.as_deref(), fallback)?;
    check_ambient(file.g, file.m)?;
    let v = terms_to_vec(f, file.g, file.m, &file.entries)?;
    Ok(MultilinearForm::from_vector(f, file.g, file.m, v))
}

pub fn form_to_json(w: &MultilinearForm) -> String {
    let file = FormFile {
        schema: SCHEMA.into(),
        kind: form_kind(),
        g: w.g(),
        m: w.degree(),
        field: Some(w.field().to_string()),
        entries: vec_to_terms(w.g(), w.degree(), w.vector()),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

pub fn presentation_from_json(text: &str, fallback: FieldSpec) -> Result<Presentation> {
    let file: PresentationFile = serde_json::from_str(text)?;
    check_schema(&file.schema, &file.kind, "presentation")?;
    let f = resolve_field(file.field.as_deref(), fallback)?;
    let mut p = Presentation::free(f, file.g, file.label.clone());
    if file.g == 0 {
        return Err(IoError::Schema("g must be positive".into()));
    }
    for block in &file.relations {
        if block.degree == 0 {
            return Err(IoError::Schema("relations must have positive degree".into()));
        }
        check_ambient(file.g, block.degree)?;
        let vs = block.vectors.iter().map(|t| terms_to_vec(f, file.g, block.degree, t)).collect::<Result<Vec<_>>>()?;
        p.add_relations(block.degree, &vs)?;
    }
    Ok(p)
}

pub fn presentation_to_json(p: &Presentation) -> String {
    let g = p.g();
    let file = PresentationFile {
        schema: SCHEMA.into(),
        kind: presentation_kind(),
        g,
        field: Some(p.field().to_string()),
        label: p.label.clone(),
        relations: p
            .relations()
            .iter()
            .map(|(&n, s)| RelationBlock { degree: n, vectors: s.basis().iter().map(|v| vec_to_terms(g, n, v)).collect() })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

pub fn matrix_from_json(text: &str, fallback: FieldSpec) -> Result<DenseMatrix> {
    let file: MatrixFile = serde_json::from_str(text)?;
    check_schema(&file.schema, &file.kind, "matrix")?;
    let f = resolve_field(file.field.as_deref(), fallback)?;
    let n = file.rows.len();
    if n == 0 || n > 64 {
        return Err(IoError::Schema(format!("matrix must have between 1 and 64 rows, got {n}")));
    }
    let cols = file.rows[0].len();
    if file.rows.iter().any(|r| r.len() != cols) || cols == 0 {
        return Err(IoError::Schema("rows must be nonempty and of equal length".into()));
    }
    let rows = file
        .rows
        .iter()
        .map(|r| r.iter().map(|lit| f.parse_scalar(lit).map_err(IoError::from)).collect::<Result<Vec<Scalar>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(DenseMatrix::from_rows(f, rows))
}

pub fn matrix_to_json(m: &DenseMatrix) -> String {
    let file = MatrixFile {
        schema: SCHEMA.into(),
        kind: matrix_kind(),
        field: Some(m.field().to_string()),
        rows: (0..m.nrows()).map(|i| m.row(i).iter().map(Scalar::to_string).collect()).collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

/// Dispatches on the `kind` tag.
pub fn document_from_json(text: &str, fallback: FieldSpec) -> Result<Document> {
    #[derive(Deserialize)]
    struct Probe {
        kind: Option<String>,
        entries: Option<serde_json::Value>,
        rows: Option<serde_json::Value>,
    }
    let probe: Probe = serde_json::from_str(text)?;
    let kind = probe.kind.unwrap_or_else(|| {
        if probe.entries.is_some() {
            "form".into()
        } else if probe.rows.is_some() {
            "matrix".into()
        } else {
            "presentation".into()
        }
    });
    match kind.as_str() {
        "form" => Ok(Document::Form(form_from_json(text, fallback)?)),
        "presentation" => Ok(Document::Presentation(presentation_from_json(text, fallback)?)),
        "matrix" => Ok(Document::Matrix(matrix_from_json(text, fallback)?)),
        other => Err(IoError::Schema(format!("unknown kind `{other}`"))),
    }
}

/// Number of coordinates of the ambient `E^{⊗n}` (for callers sizing work up front).
pub fn ambient(g: usize, n: usize) -> usize {
    gpow(g, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn form_round_trip() {
        for name in ["sklyanin3:p=1/2,q=3", "yang_mills", "typeE", "qdefD:D=4"] {
            let e = catalog::build(name, None).unwrap();
            let (w, _) = e.object.form().unwrap();
            let text = form_to_json(w);
            let back = form_from_json(&text, FieldSpec::Rationals).unwrap();
            assert_eq!(&back, w, "{name}");
        }
    }

    #[test]
    fn presentation_round_trip() {
        for name in ["self_duality", "yang_mills", "manin_plane"] {
            let p = catalog::build(name, None).unwrap().object.presentation().unwrap();
            let back = presentation_from_json(&presentation_to_json(&p), FieldSpec::Rationals).unwrap();
            assert_eq!(back.relations(), p.relations());
        }
    }

    #[test]
    fn matrix_round_trip_and_dispatch() {
        let f = FieldSpec::prime(101).unwrap();
        let m = DenseMatrix::from_i64(f, &[&[0, -1], &[3, 0]]);
        let text = matrix_to_json(&m);
        assert_eq!(document_from_json(&text, FieldSpec::Rationals).unwrap(), Document::Matrix(m));
    }

    #[test]
    fn vectors_merge_per_degree() {
        let text = r#"{"schema":"kf/1","kind":"presentation","g":2,"relations":[
            {"degree":2,"vectors":[[[[1,2],"1"],[[2,1],"-1"]]]},
            {"degree":2,"vectors":[[[[1,1],"1"]]]}]}"#;
        let p = presentation_from_json(text, FieldSpec::Rationals).unwrap();
        assert_eq!(p.relation_space(2).dim(), 2);
    }

    #[test]
    fn errors_carry_positions_and_reasons() {
        let e = form_from_json("{\n  \"schema\": \"kf/1\",\n  \"g\": 2,,\n}", FieldSpec::Rationals).unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 3, .. }), "{e:?}");
        let e = form_from_json(r#"{"schema":"kf/2","g":2,"m":2,"entries":[]}"#, FieldSpec::Rationals).unwrap_err();
        assert!(matches!(e, IoError::Schema(_)));
        let e = form_from_json(r#"{"schema":"kf/1","g":2,"m":2,"entries":[[[1,3],"1"]]}"#, FieldSpec::Rationals).unwrap_err();
        assert!(matches!(e, IoError::Schema(_)));
        let e = form_from_json(r#"{"schema":"kf/1","g":2,"m":2,"entries":[[[1,2],"1/0"]]}"#, FieldSpec::Rationals).unwrap_err();
        assert!(matches!(e, IoError::Scalar(_)));
        let e = form_from_json(r#"{"schema":"kf/1","g":1000,"m":9,"entries":[]}"#, FieldSpec::Rationals).unwrap_err();
        assert!(matches!(e, IoError::Tensor(_)));
    }
}
