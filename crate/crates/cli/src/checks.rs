//! One function per check; each yields a [`Block`] or a run-level error.

use serde::Serialize;
use serde_json::{json, Value};

use kf_core::algebra::{AlgebraError, Limits};
use kf_core::hochschild::{self, HochschildError};
use kf_core::koszul::{self, KoszulContext, KoszulError};
use kf_core::linalg::{DenseMatrix, SVec};
use kf_core::regularity::{self, CwdComplex, RegularityError};
use kf_core::scalar::Scalar;
use kf_core::tensor::{self, PreregularOutcome, TensorError};

use crate::job::{Check, Subject};
use crate::CliError;

/// Verdict of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub passed: bool,
    pub summary: String,
    /// The criterion the check implements, in words.
    pub realizes: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub caveats: Vec<String>,
    pub details: Value,
}

impl Block {
    fn new(passed: bool, summary: impl Into<String>, realizes: &'static str, details: Value) -> Self {
        Block { passed, summary: summary.into(), realizes, caveats: Vec::new(), details }
    }

    /// A check that ran into a mathematical obstruction (singular twist, no solution, …).
    fn obstructed(realizes: &'static str, reason: String) -> Self {
        Block::new(false, format!("obstructed: {reason}"), realizes, json!({ "error": reason }))
    }
}

// Errors are sorted into: resource exhaustion (exit 3), malformed request (exit 2), and
// mathematical obstructions that simply make the check fail.
enum Kind {
    Budget,
    Shape,
    Domain,
}

fn tensor_kind(e: &TensorError) -> Kind {
    match e {
        TensorError::DegreeOverflow { .. } => Kind::Budget,
        TensorError::ShapeMismatch(_) | TensorError::AmbientMismatch(..) | TensorError::FieldMismatch(..) => Kind::Shape,
        _ => Kind::Domain,
    }
}

fn algebra_kind(e: &AlgebraError) -> Kind {
    match e {
        AlgebraError::DegreeOverflow { .. } => Kind::Budget,
        AlgebraError::Tensor(t) => tensor_kind(t),
        AlgebraError::NotHomogeneous(_) | AlgebraError::FieldMismatch(..) | AlgebraError::BadRelation(_) => Kind::Shape,
        _ => Kind::Domain,
    }
}

fn koszul_kind(e: &KoszulError) -> Kind {
    match e {
        KoszulError::Algebra(a) => algebra_kind(a),
        _ => Kind::Domain,
    }
}

fn regularity_kind(e: &RegularityError) -> Kind {
    match e {
        RegularityError::ShapeError(_) | RegularityError::NotBilinear(_) => Kind::Shape,
        RegularityError::Koszul(k) => koszul_kind(k),
        RegularityError::Algebra(a) => algebra_kind(a),
        RegularityError::Tensor(t) => tensor_kind(t),
        _ => Kind::Domain,
    }
}

fn hochschild_kind(e: &HochschildError) -> Kind {
    match e {
        HochschildError::NotQuadratic(_) => Kind::Shape,
        HochschildError::Regularity(r) => regularity_kind(r),
        HochschildError::Algebra(a) => algebra_kind(a),
        _ => Kind::Domain,
    }
}

/// Obstructions become failed blocks; budget and shape errors abort the run.
fn sort(kind: Kind, msg: String, realizes: &'static str) -> Result<Block, CliError> {
    match kind {
        Kind::Budget => Err(CliError::Budget(msg)),
        Kind::Shape => Err(CliError::Usage(msg)),
        Kind::Domain => Ok(Block::obstructed(realizes, msg)),
    }
}

macro_rules! attempt {
    ($e:expr, $kind:ident, $realizes:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return sort($kind(&err), err.to_string(), $realizes),
        }
    };
}

pub fn matrix_literals(m: &DenseMatrix) -> Vec<Vec<String>> {
    m.rows_vec().iter().map(|r| r.iter().map(Scalar::to_string).collect()).collect()
}

fn vector_literals(v: &SVec) -> Vec<(usize, String)> {
    v.iter().map(|(i, s)| (*i, s.to_string())).collect()
}

/// The transvection `e_1 ↦ e_1 + e_2`: invertible over every field and sparse enough that
/// the transformed relations stay small.
fn transvection(f: kf_core::scalar::FieldSpec, g: usize) -> DenseMatrix {
    DenseMatrix::from_rows(f, (0..g).map(|i| (0..g).map(|j| f.int(i64::from(i == j || (i == 0 && j == 1)))).collect()).collect())
}

const PREREGULAR: &str = "nondegenerate in the first slot and twisted-cyclic for a unique invertible Q";
const THREE_REGULAR: &str = "two-slot intertwiners of the (N+1)-form are scalar; agrees with A^!*_{N+1} = K·w";
const KOSZUL: &str = "Koszul complex acyclic in positive degrees, and P_A(t)·Q_A(t) = 1, up to the cutoff";
const GORENSTEIN: &str = "W-complex exact with W = A^!* in the resolution degrees, A' Frobenius, palindromic ranks";
const FROBENIUS: &str = "quotient of A^! by the radical of the pairing into the top degree is Frobenius and twisted-cyclic";
const DIM2: &str = "bilinear form presents a regular algebra of dimension 2 with series 1/(1 - g t + t^2)";
const ORBIT: &str = "GL(g)-transformed form gives the same series and the conjugated twist";
const INFINITESIMAL: &str = "first-order twisted cyclicity around the determinant form has traceless Q-dot";
const VOLUME: &str = "1 ⊗ w is a nontrivial Hochschild cycle with coefficients twisted by Q_w";

pub fn run(check: Check, s: &Subject, t: usize, limits: Limits) -> Result<Block, CliError> {
    match check {
        Check::Preregular => preregular(s),
        Check::ThreeRegular => three_regular(s, limits),
        Check::Koszul => koszul_check(s, t, limits),
        Check::Gorenstein => gorenstein(s, t, limits),
        Check::Frobenius => frobenius(s, limits),
        Check::Dim2 => dim2(s, t, limits),
        Check::Orbit => orbit(s, t, limits),
        Check::Infinitesimal => infinitesimal(s),
        Check::VolumeCycle => volume_cycle(s, limits),
    }
}

fn preregular(s: &Subject) -> Result<Block, CliError> {
    let w = s.form()?;
    Ok(match tensor::is_preregular(w) {
        PreregularOutcome::Pass { q } => {
            let mut details = json!({ "q": matrix_literals(&q) });
            if let Some(expected) = s.expected.as_ref().and_then(|e| e.q_w.as_ref()) {
                details["q_matches_catalog"] = json!(expected == &q);
            }
            Block::new(true, "preregular; twisting matrix found", PREREGULAR, details)
        }
        PreregularOutcome::Failure { condition, witness, detail } => {
            let witness: Option<Vec<String>> = witness.map(|v| v.iter().map(Scalar::to_string).collect());
            Block::new(
                false,
                format!("fails {condition:?}: {detail}"),
                PREREGULAR,
                json!({ "condition": condition, "slot_witness": witness, "detail": detail }),
            )
        }
    })
}

fn three_regular(s: &Subject, limits: Limits) -> Result<Block, CliError> {
    let w = s.form()?;
    if w.degree() != s.n + 1 {
        return Err(CliError::Usage(format!("3regular needs a form of degree N+1 = {}, got {}", s.n + 1, w.degree())));
    }
    let r = attempt!(tensor::is_3_regular(w, s.n), tensor_kind, THREE_REGULAR);
    let iii = attempt!(tensor::satisfies_iii_prime(w, s.n), tensor_kind, THREE_REGULAR);
    let eq = attempt!(regularity::three_regular_equivalence(w, s.n, limits), regularity_kind, THREE_REGULAR);
    let passed = r.passed && eq.agree;
    let witness = r.witness.as_ref().map(|(a, b)| json!([matrix_literals(a), matrix_literals(b)]));
    let mut b = Block::new(
        passed,
        format!("3-regular: {}; (iii'): {}; top dual component is the line of w: {}", r.passed, iii, eq.cond_c),
        THREE_REGULAR,
        json!({
            "three_regular": r.passed,
            "intertwiner_nullity": r.nullity,
            "iii_prime": iii,
            "cond_a": eq.cond_a,
            "cond_c": eq.cond_c,
            "agree": eq.agree,
            "witness": witness,
        }),
    );
    b.caveats.push("conditions are tested over the given field, not over its algebraic closure".into());
    Ok(b)
}

fn koszul_check(s: &Subject, t: usize, limits: Limits) -> Result<Block, CliError> {
    let ctx = attempt!(KoszulContext::new(&s.presentation, t, limits), koszul_kind, KOSZUL);
    let rep = attempt!(koszul::koszulity_check(&ctx, t), koszul_kind, KOSZUL);
    let a: Vec<u64> = ctx.basis.dims().0;
    let dual: Vec<u64> = (0..=t).map(|k| ctx.dual_dim(k) as u64).collect();
    let pskn = koszul::pskn_series(&a, &dual, s.n);
    let passed = rep.koszul_up_to_cutoff() && pskn.passed;
    let mut summary = format!("Koszul up to degree {t}: {}; series identity: {}", rep.koszul_up_to_cutoff(), pskn.passed);
    if let Some((deg, k, d)) = rep.first_failure {
        summary.push_str(&format!("; first homology H_{k} of dimension {d} in degree {deg}"));
    }
    let mut b = Block::new(
        passed,
        summary,
        KOSZUL,
        json!({ "cutoff": t, "dims": a, "dual_dims": dual, "homology": rep.homology, "first_failure": rep.first_failure, "pskn_product": pskn.product }),
    );
    b.caveats.push(format!("certification is truncated at total degree {t}"));
    Ok(b)
}

fn gorenstein(s: &Subject, t: usize, limits: Limits) -> Result<Block, CliError> {
    let d = s.d;
    match &s.form {
        Some(w) => {
            let d = d.ok_or_else(|| CliError::Usage("gorenstein on a form needs --hypothesis D=<d> (and N)".into()))?;
            let v = attempt!(regularity::check_koszul_gorenstein(w, s.n, d, t, limits), regularity_kind, GORENSTEIN);
            let mut details = serde_json::to_value(&v).expect("plain data");
            let mut summary = format!("Koszul-Gorenstein of dimension {d} up to degree {t}: {}", v.passed);
            if let Some((deg, pos, dim)) = v.cwd.first_failure {
                summary.push_str(&format!("; W-complex not exact at homological position {pos} (degree {deg}, dim {dim})"));
                let c = attempt!(CwdComplex::new(w, s.n, d, deg, limits), regularity_kind, GORENSTEIN);
                let slice = attempt!(c.slice(deg), regularity_kind, GORENSTEIN);
                let vector = slice.homology_witness(pos).map(|z| vector_literals(&z));
                details["witness"] = json!({
                    "degree": deg,
                    "position": pos,
                    "homology_dim": dim,
                    "space": slice.labels.get(pos),
                    "vector": vector,
                });
            }
            let mut b = Block::new(v.passed, summary, GORENSTEIN, details);
            b.caveats.push(format!("certification is truncated at total degree {t}"));
            Ok(b)
        }
        None => {
            let g = attempt!(regularity::presentation_gorenstein(&s.presentation, t, limits), regularity_kind, GORENSTEIN);
            let d_ok = d.is_none() || g.d == d;
            let passed = g.gorenstein && d_ok;
            let summary = match g.d {
                Some(found) => format!("Koszul: {}; dual vanishes past dimension {found}; Gorenstein: {}", g.koszul_up_to_cutoff, g.gorenstein),
                None => format!("Koszul: {}; no finite dimension visible up to degree {t}", g.koszul_up_to_cutoff),
            };
            let mut details = serde_json::to_value(&g).expect("plain data");
            details["hypothesis_d_matches"] = json!(d_ok);
            let mut b = Block::new(passed, summary, GORENSTEIN, details);
            b.caveats.push(format!("certification is truncated at total degree {t}"));
            Ok(b)
        }
    }
}

fn frobenius(s: &Subject, limits: Limits) -> Result<Block, CliError> {
    let mut details = json!({});
    let mut passed = true;
    let mut parts = Vec::new();
    if let Some(w) = &s.form {
        let fr = attempt!(regularity::frobenius_quotient_f(w, s.n, limits), regularity_kind, FROBENIUS);
        let ok = fr.nondegenerate && fr.twisted_cyclic != Some(false) && fr.sigma_is_automorphism != Some(false);
        passed &= ok;
        parts.push(format!("F(w,N) dims {:?}, nondegenerate: {}", fr.dims, fr.nondegenerate));
        details["f"] = serde_json::to_value(&fr).expect("plain data");
    }
    match s.d {
        Some(d) => {
            let ap = attempt!(regularity::aprime_algebra(&s.presentation, d, limits), regularity_kind, FROBENIUS);
            passed &= ap.frobenius;
            parts.push(format!("A' dims {:?}, Frobenius: {}", ap.dims, ap.frobenius));
            details["a_prime"] = serde_json::to_value(&ap).expect("plain data");
        }
        None if s.form.is_none() => {
            return Err(CliError::Usage("frobenius on a presentation needs --hypothesis D=<d>".into()));
        }
        None => {}
    }
    Ok(Block::new(passed, parts.join("; "), FROBENIUS, details))
}

fn dim2(s: &Subject, t: usize, limits: Limits) -> Result<Block, CliError> {
    let w = s.form()?;
    let a = attempt!(regularity::dim2_analyze(w, t, limits), regularity_kind, DIM2);
    let passed = a.regular && a.series_match && a.koszul_up_to_cutoff;
    let summary = match (&a.classification, &a.degenerate_branch) {
        (Some(c), _) => format!("regular; class {c:?}; series matches: {}", a.series_match),
        (None, Some(branch)) => format!("degenerate form ({branch})"),
        (None, None) => "degenerate form".to_string(),
    };
    Ok(Block::new(passed, summary, DIM2, serde_json::to_value(&a).expect("plain data")))
}

fn orbit(s: &Subject, t: usize, limits: Limits) -> Result<Block, CliError> {
    let w = s.form()?;
    let l = transvection(s.field, w.g());
    let o = attempt!(regularity::orbit_consistency(w, &l, s.n, t, limits), regularity_kind, ORBIT);
    let passed = o.dims_equal && o.q_conjugated;
    let mut details = serde_json::to_value(&o).expect("plain data");
    details["transform"] = json!(matrix_literals(&l));
    Ok(Block::new(passed, format!("series preserved: {}; twist conjugated: {}", o.dims_equal, o.q_conjugated), ORBIT, details))
}

fn infinitesimal(s: &Subject) -> Result<Block, CliError> {
    let w = s.form()?;
    let it = attempt!(tensor::infinitesimal_twist(w), tensor_kind, INFINITESIMAL);
    let details = json!({ "q_dot": matrix_literals(&it.q_dot), "traceless": it.traceless });
    Ok(Block::new(it.traceless, format!("Q-dot solved; traceless: {}", it.traceless), INFINITESIMAL, details))
}

fn volume_cycle(s: &Subject, limits: Limits) -> Result<Block, CliError> {
    let w = s.form()?;
    let v = attempt!(hochschild::is_volume_cycle(w, s.n, limits), hochschild_kind, VOLUME);
    let passed = v.cycle && v.nontrivial;
    Ok(Block::new(
        passed,
        format!("cycle: {}; not a boundary: {}", v.cycle, v.nontrivial),
        VOLUME,
        serde_json::to_value(&v).expect("plain data"),
    ))
}
