//! Tensors on `E^{⊗n}`, subspaces in canonical form, multilinear forms and
//! the nondegeneracy conditions on them.
//!
//! Coordinates of `E^{⊗n}` are indexed by the row-major encoding of
//! multi-indices (leftmost slot most significant). A matrix `L` acts on `E`
//! by `L e_λ = Σ_μ L[μ][λ] e_μ`, so `L^μ_λ` is row `μ`, column `λ`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::linalg::{self, DenseMatrix, Echelon, SVec};
use crate::scalar::{FieldSpec, Scalar};

/// A `g × g` matrix acting on the generator space.
pub type EndoMatrix = DenseMatrix;

/// Largest coordinate-space dimension accepted by default.
pub const DEFAULT_MAX_DIM: usize = 1 << 21;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("ambient mismatch: (g={0}, n={1}) vs (g={2}, n={3})")]
    AmbientMismatch(usize, usize, usize, usize),
    #[error("degree overflow: {g}^{n} coordinates exceed the limit {limit}")]
    DegreeOverflow { g: usize, n: usize, limit: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("no invertible solution (affine solution set dimension: {affine_dim:?})")]
    NoSolution { affine_dim: Option<usize> },
    #[error("form is not invariant under the given matrix")]
    NotInvariant,
    #[error("field characteristic {p} divides the degree {m}")]
    CharacteristicDividesDegree { p: u64, m: usize },
    #[error("index out of range: {0}")]
    BadIndex(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
}

/// `g^n`, or `DegreeOverflow` if it exceeds `limit`.
pub fn checked_pow(g: usize, n: usize, limit: usize) -> Result<usize, TensorError> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc = acc
            .checked_mul(g)
            .filter(|&a| a <= limit)
            .ok_or(TensorError::DegreeOverflow { g, n, limit })?;
    }
    Ok(acc)
}

/// Unchecked `g^n` for internal sizes already validated by a caller.
pub fn gpow(g: usize, n: usize) -> usize {
    g.pow(n as u32)
}

/// A multi-index `(λ_1, …, λ_n)` with 1-based digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    g: usize,
    digits: Vec<usize>,
}

impl MultiIndex {
    pub fn new(g: usize, digits: Vec<usize>) -> Result<Self, TensorError> {
        if let Some(d) = digits.iter().find(|&&d| d == 0 || d > g) {
            return Err(TensorError::BadIndex(format!("digit {d} not in 1..={g}")));
        }
        Ok(MultiIndex { g, digits })
    }

    pub fn decode(g: usize, n: usize, code: usize) -> Self {
        MultiIndex { g, digits: digits0(g, n, code).into_iter().map(|d| d + 1).collect() }
    }

    pub fn encode(&self) -> usize {
        self.digits.iter().fold(0, |acc, d| acc * self.g + (d - 1))
    }

    pub fn degree(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Zero-based digits of `code` in base `g`, `n` of them, most significant first.
pub fn digits0(g: usize, n: usize, mut code: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for k in (0..n).rev() {
        d[k] = code % g;
        code /= g;
    }
    d
}

/// Inverse of [`digits0`].
pub fn encode0(g: usize, digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, d| acc * g + d)
}

/// Word rendering with `x1, x2, …` or letters for `g ≤ 3`.
pub fn word_name(g: usize, n: usize, code: usize) -> String {
    if n == 0 {
        return "1".into();
    }
    let d = digits0(g, n, code);
    if g <= 3 {
        d.iter().map(|&k| ['x', 'y', 'z'][k]).collect()
    } else {
        d.iter().map(|k| format!("x{}", k + 1)).collect::<Vec<_>>().join("")
    }
}

/// Applies `M` to one tensor slot: `e_{…λ…} ↦ Σ_μ M[μ][λ] e_{…μ…}`.
pub fn apply_slot(v: &SVec, g: usize, n: usize, slot: usize, m: &DenseMatrix) -> SVec {
    let stride = gpow(g, n - 1 - slot);
    let mut pairs = Vec::with_capacity(v.nnz() * g);
    for (code, c) in v.iter() {
        let lam = (code / stride) % g;
        let base = code - lam * stride;
        for mu in 0..g {
            let f = m.get(mu, lam);
            if !f.is_zero() {
                pairs.push((base + mu * stride, c * f));
            }
        }
    }
    SVec::from_pairs(pairs)
}

/// `M^{⊗n}` applied to a tensor.
pub fn apply_tensor_power(v: &SVec, g: usize, n: usize, m: &DenseMatrix) -> SVec {
    (0..n).fold(v.clone(), |acc, s| apply_slot(&acc, g, n, s, m))
}

/// Cyclic rotation moving the first `j` slots to the end.
pub fn rotate_left(v: &SVec, g: usize, n: usize, j: usize) -> SVec {
    let j = j % n.max(1);
    if j == 0 {
        return v.clone();
    }
    let hi = gpow(g, n - j);
    let lo = gpow(g, j);
    v.map_indices(|c| (c % hi) * lo + c / hi)
}

/// Tensor product of `a ∈ E^{⊗p}` and `b ∈ E^{⊗q}` where `dim_b = g^q`.
pub fn tensor_product(a: &SVec, b: &SVec, dim_b: usize) -> SVec {
    let mut out = Vec::with_capacity(a.nnz() * b.nnz());
    for (i, x) in a.iter() {
        for (j, y) in b.iter() {
            out.push((i * dim_b + j, x * y));
        }
    }
    SVec::from_sorted(out)
}

// ---------------------------------------------------------------------------
// subspaces

/// A subspace of `E^{⊗n}` held by its reduced row echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    g: usize,
    n: usize,
    field: FieldSpec,
    rows: Vec<SVec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceOp {
    Sum,
    Intersect,
    Equals,
    Contains,
}

/// Result of [`subspace_ops`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubspaceOpResult {
    Space(Subspace),
    Bool(bool),
}

impl Subspace {
    pub fn span(field: FieldSpec, g: usize, n: usize, vectors: &[SVec]) -> Self {
        Subspace { g, n, field, rows: linalg::rref(field, vectors) }
    }

    pub fn zero(field: FieldSpec, g: usize, n: usize) -> Self {
        Subspace { g, n, field, rows: Vec::new() }
    }

    pub fn full(field: FieldSpec, g: usize, n: usize) -> Self {
        Subspace { g, n, field, rows: (0..gpow(g, n)).map(|i| SVec::unit(i, field)).collect() }
    }

    /// Wraps rows already known to be in reduced echelon form.
    pub(crate) fn from_rref(field: FieldSpec, g: usize, n: usize, rows: Vec<SVec>) -> Self {
        Subspace { g, n, field, rows }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        gpow(self.g, self.n)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn basis(&self) -> &[SVec] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.leading().unwrap()).collect()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), TensorError> {
        if (self.g, self.n) != (other.g, other.n) {
            return Err(TensorError::AmbientMismatch(self.g, self.n, other.g, other.n));
        }
        if self.field != other.field {
            return Err(TensorError::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, TensorError> {
        self.check_ambient(other)?;
        let mut all = self.rows.clone();
        all.extend(other.rows.iter().cloned());
        Ok(Subspace::span(self.field, self.g, self.n, &all))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, TensorError> {
        self.check_ambient(other)?;
        let rows = linalg::intersect(self.field, self.ambient_dim(), &self.rows, &other.rows);
        Ok(Subspace::from_rref(self.field, self.g, self.n, rows))
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool, TensorError> {
        self.check_ambient(other)?;
        let e = self.echelon();
        Ok(other.rows.iter().all(|r| e.contains(r)))
    }

    pub fn contains_vector(&self, v: &SVec) -> bool {
        self.echelon().contains(v)
    }

    pub fn echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.field);
        e.extend(&self.rows);
        e
    }

    /// Coordinates of `v` (assumed to lie in the subspace) in the RREF basis:
    /// its entries at the pivot columns.
    pub fn coordinates(&self, v: &SVec) -> Vec<Scalar> {
        self.rows
            .iter()
            .map(|r| v.get(r.leading().unwrap()).cloned().unwrap_or_else(|| self.field.zero()))
            .collect()
    }

    /// Annihilator under the standard pairing of `E^{⊗n}` with its dual.
    pub fn annihilator(&self) -> Subspace {
        let dim = self.ambient_dim();
        let piv = self.pivots();
        let mut is_piv = vec![false; dim];
        for &p in &piv {
            is_piv[p] = true;
        }
        // For RREF rows r_i with pivot p_i, the annihilator is spanned by
        // e_f - Σ_i r_i[f] e_{p_i} over free columns f.
        let mut by_free: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
        for r in &self.rows {
            let p = r.leading().unwrap();
            for (f, v) in r.iter().skip(1) {
                by_free.entry(*f).or_default().push((p, -v));
            }
        }
        let mut rows = Vec::new();
        for f in (0..dim).filter(|&f| !is_piv[f]) {
            let mut ent = by_free.remove(&f).unwrap_or_default();
            ent.push((f, self.field.one()));
            rows.push(SVec::from_pairs(ent));
        }
        Subspace::span(self.field, self.g, self.n, &rows)
    }

    /// `self ⊗ E^{⊗k}` inside `E^{⊗(n+k)}`.
    pub fn tensor_right(&self, k: usize) -> Subspace {
        let d = gpow(self.g, k);
        let rows: Vec<SVec> = self
            .rows
            .iter()
            .flat_map(|r| (0..d).map(move |j| r.map_indices(|i| i * d + j)))
            .collect();
        Subspace::span(self.field, self.g, self.n + k, &rows)
    }

    /// `E^{⊗k} ⊗ self` inside `E^{⊗(k+n)}`.
    pub fn tensor_left(&self, k: usize) -> Subspace {
        let d = gpow(self.g, k);
        let w = self.ambient_dim();
        let rows: Vec<SVec> = (0..d).flat_map(|i| self.rows.iter().map(move |r| r.shifted(i * w))).collect();
        Subspace::span(self.field, self.g, self.n + k, &rows)
    }

    /// Image under `L^{⊗n}`.
    pub fn image_under(&self, l: &EndoMatrix) -> Subspace {
        let rows: Vec<SVec> = self.rows.iter().map(|r| apply_tensor_power(r, self.g, self.n, l)).collect();
        Subspace::span(self.field, self.g, self.n, &rows)
    }
}

pub fn subspace_ops(a: &Subspace, b: &Subspace, op: SubspaceOp) -> Result<SubspaceOpResult, TensorError> {
    Ok(match op {
        SubspaceOp::Sum => SubspaceOpResult::Space(a.sum(b)?),
        SubspaceOp::Intersect => SubspaceOpResult::Space(a.intersect(b)?),
        SubspaceOp::Equals => {
            a.check_ambient(b)?;
            SubspaceOpResult::Bool(a == b)
        }
        SubspaceOp::Contains => SubspaceOpResult::Bool(a.contains(b)?),
    })
}

// ---------------------------------------------------------------------------
// multilinear forms

/// A multilinear form `w` on `E = K^g` of degree `m`, stored by its nonzero
/// components `W_λ` keyed by encoded multi-index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultilinearForm {
    g: usize,
    m: usize,
    field: FieldSpec,
    comps: SVec,
}

impl MultilinearForm {
    pub fn zero(field: FieldSpec, g: usize, m: usize) -> Self {
        MultilinearForm { g, m, field, comps: SVec::new() }
    }

    /// From a component vector in `E^{⊗m}` coordinates.
    pub fn from_vector(field: FieldSpec, g: usize, m: usize, comps: SVec) -> Self {
        MultilinearForm { g, m, field, comps }
    }

    /// From `(0-based digits, value)` pairs; repeated indices are summed.
    pub fn from_terms(
        field: FieldSpec,
        g: usize,
        m: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, Scalar)>,
    ) -> Result<Self, TensorError> {
        let mut pairs = Vec::new();
        for (d, v) in terms {
            if d.len() != m {
                return Err(TensorError::ShapeMismatch(format!("index of length {} in a degree-{m} form", d.len())));
            }
            if let Some(x) = d.iter().find(|&&x| x >= g) {
                return Err(TensorError::BadIndex(format!("digit {} not in 1..={g}", x + 1)));
            }
            if v.field() != field {
                return Err(TensorError::FieldMismatch(field, v.field()));
            }
            pairs.push((encode0(g, &d), v));
        }
        Ok(MultilinearForm { g, m, field, comps: SVec::from_pairs(pairs) })
    }

    /// Parses words over `x, y, z` (g ≤ 3) with integer coefficients, e.g. `[(1, "xyz")]`.
    pub fn from_words(field: FieldSpec, g: usize, terms: &[(Scalar, &str)]) -> Result<Self, TensorError> {
        let m = terms.first().map_or(0, |(_, w)| w.len());
        let conv = terms.iter().map(|(c, w)| {
            let d: Vec<usize> = w
                .chars()
                .map(|ch| match ch {
                    'x' => 0,
                    'y' => 1,
                    'z' => 2,
                    'w' => 3,
                    _ => usize::MAX,
                })
                .collect();
            (d, c.clone())
        });
        Self::from_terms(field, g, m, conv)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn vector(&self) -> &SVec {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_zero()
    }

    pub fn component(&self, digits0: &[usize]) -> Scalar {
        self.comps.get(encode0(self.g, digits0)).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Nonzero components as `(0-based digits, value)`.
    pub fn terms(&self) -> Vec<(Vec<usize>, Scalar)> {
        self.comps.iter().map(|(c, v)| (digits0(self.g, self.m, *c), v.clone())).collect()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        MultilinearForm { comps: self.comps.scale(c), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.g, self.m), (other.g, other.m));
        MultilinearForm { comps: self.comps.add(&other.comps, self.field), ..self.clone() }
    }

    /// Rows of the flattening fixing slot `k` (0-based): row `μ` collects `W` with `λ_k = μ`.
    pub fn slot_flattening(&self, k: usize) -> Vec<SVec> {
        let g = self.g;
        let stride = gpow(g, self.m - 1 - k);
        let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); g];
        for (c, v) in self.comps.iter() {
            let mu = (c / stride) % g;
            let rest = (c / (stride * g)) * stride + c % stride;
            rows[mu].push((rest, v.clone()));
        }
        rows.into_iter().map(SVec::from_pairs).collect()
    }

    /// Rows indexed by the first `s` slots, columns by the remaining ones.
    pub fn leading_flattening(&self, s: usize) -> Vec<SVec> {
        let cols = gpow(self.g, self.m - s);
        let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); gpow(self.g, s)];
        for (c, v) in self.comps.iter() {
            rows[c / cols].push((c % cols, v.clone()));
        }
        rows.into_iter().map(SVec::from_sorted).collect()
    }

    /// Contraction of the first `k` slots with the basis vectors: the vector
    /// `Σ_μ W_{λμ} e_μ ∈ E^{⊗(m−k)}` for each `λ` of length `k`.
    pub fn contractions(&self, k: usize) -> Vec<SVec> {
        self.leading_flattening(k)
    }
}

/// `(w∘L)_λ = Σ_μ W_μ L^{μ_1}_{λ_1}⋯L^{μ_m}_{λ_m}`.
pub fn gl_action(w: &MultilinearForm, l: &EndoMatrix) -> MultilinearForm {
    let lt = l.transpose();
    MultilinearForm { comps: apply_tensor_power(&w.comps, w.g, w.m, &lt), ..w.clone() }
}

/// The form `(X_1,…,X_m) ↦ w(Q X_m, X_1, …, X_{m−1})`.
pub fn twisted_rotation(w: &MultilinearForm, q: &EndoMatrix) -> MultilinearForm {
    let u = apply_slot(&w.comps, w.g, w.m, 0, &q.transpose());
    MultilinearForm { comps: rotate_left(&u, w.g, w.m, 1), ..w.clone() }
}

pub fn is_q_cyclic(w: &MultilinearForm, q: &EndoMatrix) -> bool {
    twisted_rotation(w, q) == *w
}

/// Outcome of [`solve_twisting`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Twisting {
    pub q: EndoMatrix,
    pub unique: bool,
    /// Dimension of the affine space of (not necessarily invertible) solutions.
    pub affine_dim: usize,
}

/// Linear equations `rhs_λ = Σ_μ Q^μ_{λ_m} W_{μλ_1…λ_{m−1}}` in the `g²` unknowns
/// `Q^μ_ν` (variable index `μ g + ν`), returned as (rows, rhs). Every index in
/// the support of either side gets an equation.
fn twisting_system(w: &MultilinearForm, rhs_vec: &SVec) -> (Vec<SVec>, Vec<Scalar>) {
    let (g, m, f) = (w.g, w.m, w.field);
    let tail = gpow(g, m - 1);
    let mut eqs: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
    for (c, v) in w.comps.iter() {
        let mu = c / tail;
        let rest = c % tail;
        for nu in 0..g {
            eqs.entry(rest * g + nu).or_default().push((mu * g + nu, v.clone()));
        }
    }
    for (c, _) in rhs_vec.iter() {
        eqs.entry(*c).or_default();
    }
    let mut rows = Vec::with_capacity(eqs.len());
    let mut rhs = Vec::with_capacity(eqs.len());
    for (lam, coeffs) in eqs {
        rows.push(SVec::from_pairs(coeffs));
        rhs.push(rhs_vec.get(lam).cloned().unwrap_or_else(|| f.zero()));
    }
    (rows, rhs)
}

fn matrix_from_vars(f: FieldSpec, g: usize, x: &[Scalar]) -> EndoMatrix {
    DenseMatrix::from_rows(f, (0..g).map(|i| x[i * g..(i + 1) * g].to_vec()).collect())
}

/// Solves the twisted-cyclicity equations for `Q`.
pub fn solve_twisting(w: &MultilinearForm) -> Result<Twisting, TensorError> {
    let (g, f) = (w.g, w.field);
    if w.is_zero() {
        return Err(TensorError::NoSolution { affine_dim: Some(g * g) });
    }
    let (rows, rhs) = twisting_system(w, &w.comps);
    let sol = linalg::solve(f, g * g, &rows, &rhs).ok_or(TensorError::NoSolution { affine_dim: None })?;
    let affine_dim = sol.kernel.len();
    let mut candidates = vec![sol.particular.clone()];
    // Deterministic probes through the solution set when it is not a point.
    for shift in 1..=(3 * affine_dim as i64) {
        let mut x = sol.particular.clone();
        for (i, k) in sol.kernel.iter().enumerate() {
            let c = f.int((shift + i as i64) * (i as i64 + 1) + 1);
            for (xj, kj) in x.iter_mut().zip(k) {
                *xj = &*xj + &(&c * kj);
            }
        }
        candidates.push(x);
    }
    for x in candidates {
        let q = matrix_from_vars(f, g, &x);
        if q.is_invertible() {
            return Ok(Twisting { q, unique: affine_dim == 0, affine_dim });
        }
    }
    Err(TensorError::NoSolution { affine_dim: Some(affine_dim) })
}

/// Per-slot verdicts of the one-site nondegeneracy condition.
pub fn one_site_nondegenerate(w: &MultilinearForm) -> Vec<bool> {
    (0..w.m).map(|k| linalg::rank(w.field, &w.slot_flattening(k)) == w.g).collect()
}

/// A nonzero `X` with `w(X, ·, …, ·) = 0`, if one exists.
pub fn first_slot_witness(w: &MultilinearForm) -> Option<Vec<Scalar>> {
    let rows = w.slot_flattening(0);
    linalg::kernel(w.field, gpow(w.g, w.m - 1), &rows)
        .first()
        .map(|k| k.to_dense(w.g, w.field))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum PreregularCondition {
    /// First-slot nondegeneracy.
    FirstSlot,
    /// Existence of an invertible twisting matrix.
    Twisting,
    /// Invariance of the form under its twisting matrix.
    Invariance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PreregularOutcome {
    Pass { q: EndoMatrix },
    Failure { condition: PreregularCondition, witness: Option<Vec<Scalar>>, detail: String },
}

impl PreregularOutcome {
    pub fn q(&self) -> Option<&EndoMatrix> {
        match self {
            PreregularOutcome::Pass { q } => Some(q),
            _ => None,
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self, PreregularOutcome::Pass { .. })
    }
}

pub fn is_preregular(w: &MultilinearForm) -> PreregularOutcome {
    if let Some(x) = first_slot_witness(w) {
        return PreregularOutcome::Failure {
            condition: PreregularCondition::FirstSlot,
            witness: Some(x),
            detail: "w(X, ...) vanishes identically for a nonzero X".into(),
        };
    }
    match solve_twisting(w) {
        Ok(t) => {
            if gl_action(w, &t.q) != *w {
                return PreregularOutcome::Failure {
                    condition: PreregularCondition::Invariance,
                    witness: None,
                    detail: "w∘Q ≠ w".into(),
                };
            }
            PreregularOutcome::Pass { q: t.q }
        }
        Err(e) => PreregularOutcome::Failure {
            condition: PreregularCondition::Twisting,
            witness: None,
            detail: e.to_string(),
        },
    }
}

/// The projection `π_Q(w)(X_1,…,X_m) = (1/m) Σ_k w(QX_k,…,QX_m,X_1,…,X_{k−1})`.
pub fn pi_q(w: &MultilinearForm, q: &EndoMatrix) -> Result<MultilinearForm, TensorError> {
    let (g, m, f) = (w.g, w.m, w.field);
    if f.divides(m as u64) {
        return Err(TensorError::CharacteristicDividesDegree { p: f.characteristic(), m });
    }
    if gl_action(w, q) != *w {
        return Err(TensorError::NotInvariant);
    }
    let qt = q.transpose();
    let mut acc = SVec::new();
    let mut u = w.comps.clone();
    // u_j = w with Q applied to the first j slots
    for j in 1..=m {
        u = apply_slot(&u, g, m, j - 1, &qt);
        acc = acc.add(&rotate_left(&u, g, m, j), f);
    }
    let inv_m = f.int(m as i64).inv().expect("m invertible");
    Ok(MultilinearForm { comps: acc.scale(&inv_m), ..w.clone() })
}

/// Outcome of the two-slot intertwiner test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeRegularity {
    pub passed: bool,
    /// Dimension of the solution space of `(L_0, L_1)`; 1 means scalars only.
    pub nullity: usize,
    /// A non-scalar solution when the test fails.
    pub witness: Option<(EndoMatrix, EndoMatrix)>,
}

/// Solves `w(L_0X_0, X_1,…,X_N) = w(X_0, L_1X_1, …, X_N)` for `(L_0, L_1)`.
pub fn is_3_regular(w: &MultilinearForm, n: usize) -> Result<ThreeRegularity, TensorError> {
    let (g, m, f) = (w.g, w.m, w.field);
    if m != n + 1 {
        return Err(TensorError::ShapeMismatch(format!("degree {m} but N+1 = {}", n + 1)));
    }
    if !is_preregular(w).passed() {
        return Err(TensorError::NoSolution { affine_dim: None });
    }
    let s0 = gpow(g, m - 1);
    let s1 = gpow(g, m - 2);
    let gg = g * g;
    let mut eqs: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
    for (c, v) in w.comps.iter() {
        // term in L_0: W_{μ rest} L0[μ][λ0] contributes to equation (λ0, rest)
        let mu = c / s0;
        let rest = c % s0;
        for l0 in 0..g {
            eqs.entry(l0 * s0 + rest).or_default().push((mu * g + l0, v.clone()));
        }
        // term in L_1: −W_{λ0 μ rest'} L1[μ][λ1] contributes to equation (λ0, λ1, rest')
        let lam0 = c / s0;
        let mu1 = (c / s1) % g;
        let rest1 = c % s1;
        for l1 in 0..g {
            eqs.entry(lam0 * s0 + l1 * s1 + rest1).or_default().push((gg + mu1 * g + l1, -v));
        }
    }
    let rows: Vec<SVec> = eqs.into_values().map(SVec::from_pairs).collect();
    let rhs = vec![f.zero(); rows.len()];
    let sol = linalg::solve(f, 2 * gg, &rows, &rhs).expect("homogeneous system");
    let nullity = sol.kernel.len();
    let mut witness = None;
    if nullity != 1 {
        let id_pair: Vec<Scalar> = (0..2 * gg).map(|i| if (i % gg) % (g + 1) == 0 { f.one() } else { f.zero() }).collect();
        let id = SVec::from_dense(&id_pair);
        let mut e = Echelon::new(f);
        e.insert(&id);
        for k in &sol.kernel {
            let kv = SVec::from_dense(k);
            if e.insert(&kv) {
                witness = Some((matrix_from_vars(f, g, &k[..gg]), matrix_from_vars(f, g, &k[gg..])));
                break;
            }
        }
    }
    Ok(ThreeRegularity { passed: nullity == 1, nullity, witness })
}

/// Rank condition on the flattening over the first two slots.
pub fn satisfies_iii_prime(w: &MultilinearForm, n: usize) -> Result<bool, TensorError> {
    if w.m != n + 1 {
        return Err(TensorError::ShapeMismatch(format!("degree {} but N+1 = {}", w.m, n + 1)));
    }
    Ok(linalg::rank(w.field, &w.leading_flattening(2)) == w.g * w.g)
}

/// The totally antisymmetric form `ε` of degree `m = g`, `ε_{1…g} = 1`.
pub fn levi_civita(field: FieldSpec, g: usize) -> MultilinearForm {
    let mut terms = Vec::new();
    let mut perm: Vec<usize> = (0..g).collect();
    permutations(&mut perm, 0, &mut |p| {
        terms.push((p.to_vec(), field.int(permutation_sign(p))));
    });
    MultilinearForm::from_terms(field, g, g, terms).expect("valid indices")
}

pub fn permutation_sign(p: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Calls `f` on every permutation of `p[k..]` (Heap-free recursive swap).
pub fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Outcome of [`infinitesimal_twist`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfinitesimalTwist {
    pub q_dot: EndoMatrix,
    pub traceless: bool,
}

/// First-order twisted cyclicity around `ε`: solves
/// `Ẇ_λ = Q̇^μ_{λ_g} ε_{μλ_1…λ_{g−1}} + (−1)^{g−1} Ẇ_{λ_gλ_1…λ_{g−1}}` for `Q̇`.
pub fn infinitesimal_twist(wdot: &MultilinearForm) -> Result<InfinitesimalTwist, TensorError> {
    let (g, m, f) = (wdot.g, wdot.m, wdot.field);
    if m != g {
        return Err(TensorError::ShapeMismatch(format!("degree {m} must equal g = {g}")));
    }
    let eps = levi_civita(f, g);
    let sign = f.int(if (g - 1) % 2 == 0 { 1 } else { -1 });
    // rhs_λ = Ẇ_λ − (−1)^{g−1} Ẇ_{λ_g λ_1 … λ_{g−1}}
    let rot = rotate_left(&wdot.comps, g, m, 1);
    let rhs_vec = wdot.comps.add_scaled(&-&sign, &rot);
    let (rows, rhs) = twisting_system(&eps, &rhs_vec);
    let sol = linalg::solve(f, g * g, &rows, &rhs).ok_or(TensorError::NoSolution { affine_dim: None })?;
    let q_dot = matrix_from_vars(f, g, &sol.particular);
    let traceless = q_dot.trace().is_zero();
    Ok(InfinitesimalTwist { q_dot, traceless })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn bilinear(f: FieldSpec, b: &[&[i64]]) -> MultilinearForm {
        let g = b.len();
        let mut t = Vec::new();
        for (i, row) in b.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                t.push((vec![i, j], f.int(v)));
            }
        }
        MultilinearForm::from_terms(f, g, 2, t).unwrap()
    }

    #[test]
    fn multi_index_roundtrip() {
        let m = MultiIndex::new(3, vec![2, 1, 3]).unwrap();
        assert_eq!(m.encode(), 9 + 2);
        assert_eq!(MultiIndex::decode(3, 3, 11), m);
        assert!(MultiIndex::new(3, vec![4]).is_err());
    }

    #[test]
    fn subspace_examples() {
        let f = q();
        let a = Subspace::span(f, 2, 2, &[SVec::unit(0, f)]);
        let b = Subspace::span(f, 2, 2, &[SVec::unit(0, f), SVec::unit(1, f)]);
        assert!(b.contains(&a).unwrap());
        assert!(!a.contains(&b).unwrap());
        let c = Subspace::span(f, 3, 1, &[SVec::unit(0, f), SVec::unit(1, f)]);
        let d = Subspace::span(f, 3, 1, &[SVec::unit(1, f), SVec::unit(2, f)]);
        assert_eq!(c.intersect(&d).unwrap(), Subspace::span(f, 3, 1, &[SVec::unit(1, f)]));
        assert!(a.sum(&c).is_err());
    }

    #[test]
    fn annihilator_is_involutive() {
        let f = q();
        let s = Subspace::span(f, 2, 2, &[SVec::from_dense(&[f.int(1), f.int(2), f.zero(), f.int(-1)])]);
        let a = s.annihilator();
        assert_eq!(a.dim(), 3);
        for r in a.basis() {
            assert!(r.dot(&s.basis()[0], f).is_zero());
        }
        assert_eq!(a.annihilator(), s);
    }

    #[test]
    fn gl_action_on_eps_q() {
        let f = q();
        // B = [[0,-1],[q,0]] with q = 3, L = diag(c,1) with c = 5
        let b = bilinear(f, &[&[0, -1], &[3, 0]]);
        let l = DenseMatrix::from_i64(f, &[&[5, 0], &[0, 1]]);
        assert_eq!(gl_action(&b, &l), bilinear(f, &[&[0, -5], &[15, 0]]));
        assert_eq!(gl_action(&b, &DenseMatrix::identity(f, 2)), b);
    }

    #[test]
    fn twisting_of_symplectic_form() {
        let f = q();
        let b = bilinear(f, &[&[0, -1], &[1, 0]]);
        let t = solve_twisting(&b).unwrap();
        assert_eq!(t.q, DenseMatrix::scalar(f, 2, &f.int(-1)));
        assert!(t.unique);
        // Q_b = (B^{-1})^t B in general
        let bm = DenseMatrix::from_i64(f, &[&[2, 1], &[-3, 4]]);
        let w = bilinear(f, &[&[2, 1], &[-3, 4]]);
        let expect = bm.inverse().unwrap().transpose().mul(&bm);
        assert_eq!(solve_twisting(&w).unwrap().q, expect);
    }

    #[test]
    fn twisting_of_epsilon() {
        for g in 2..=4 {
            let e = levi_civita(q(), g);
            let sign = if g % 2 == 1 { 1 } else { -1 };
            assert_eq!(solve_twisting(&e).unwrap().q, DenseMatrix::scalar(q(), g, &q().int(sign)));
        }
    }

    #[test]
    fn degenerate_bilinear() {
        let f = q();
        let b = bilinear(f, &[&[1, 0], &[0, 0]]);
        assert_eq!(one_site_nondegenerate(&b), vec![false, false]);
        match is_preregular(&b) {
            PreregularOutcome::Failure { condition, witness, .. } => {
                assert_eq!(condition, PreregularCondition::FirstSlot);
                assert_eq!(witness.unwrap(), vec![f.zero(), f.one()]);
            }
            _ => panic!("degenerate form accepted"),
        }
        assert!(!is_preregular(&MultilinearForm::zero(f, 2, 3)).passed());
    }

    #[test]
    fn projection_pi_q() {
        let f = q();
        let e = levi_civita(f, 3);
        let id = DenseMatrix::identity(f, 3);
        assert_eq!(pi_q(&e, &id).unwrap(), e);
        let p3 = FieldSpec::prime(3).unwrap();
        assert!(matches!(
            pi_q(&levi_civita(p3, 3), &DenseMatrix::identity(p3, 3)),
            Err(TensorError::CharacteristicDividesDegree { .. })
        ));
        // a non-cyclic invariant form gets projected to a cyclic one
        let w = MultilinearForm::from_words(f, 2, &[(f.one(), "xxy")]).unwrap();
        let id2 = DenseMatrix::identity(f, 2);
        let p = pi_q(&w, &id2).unwrap();
        assert!(is_q_cyclic(&p, &id2));
        assert_eq!(pi_q(&p, &id2).unwrap(), p);
        let diag = DenseMatrix::from_i64(f, &[&[2, 0], &[0, 3]]);
        assert_eq!(pi_q(&w, &diag), Err(TensorError::NotInvariant));
    }

    #[test]
    fn epsilon_three_regular_but_not_iii_prime() {
        let f = q();
        for g in 3..=4 {
            let e = levi_civita(f, g);
            let r = is_3_regular(&e, g - 1).unwrap();
            assert!(r.passed, "g={g}");
            assert!(!satisfies_iii_prime(&e, g - 1).unwrap());
        }
        assert!(is_3_regular(&levi_civita(f, 3), 3).is_err());
    }

    #[test]
    fn infinitesimal_twist_examples() {
        let f = q();
        for g in 2..=4 {
            let z = MultilinearForm::zero(f, g, g);
            let t = infinitesimal_twist(&z).unwrap();
            assert!(t.q_dot.is_zero() && t.traceless);
            let t = infinitesimal_twist(&levi_civita(f, g)).unwrap();
            assert!(t.q_dot.is_zero());
        }
        // a direction breaking first-order cyclicity (every bilinear direction is admissible)
        let bad = MultilinearForm::from_words(f, 3, &[(f.one(), "xxy")]).unwrap();
        assert!(infinitesimal_twist(&bad).is_err());
    }

    #[test]
    fn rotation_helpers() {
        let f = q();
        let v = SVec::unit(encode0(3, &[0, 1, 2]), f);
        let r = rotate_left(&v, 3, 3, 1);
        assert_eq!(r, SVec::unit(encode0(3, &[1, 2, 0]), f));
        assert_eq!(rotate_left(&r, 3, 3, 2), v);
        assert_eq!(word_name(3, 3, encode0(3, &[0, 1, 2])), "xyz");
    }
}
