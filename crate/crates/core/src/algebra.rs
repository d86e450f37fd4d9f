//! Connected graded algebras `T(E)/(R)` given by homogeneous relations.
//!
//! Normal forms are built degree by degree: `A_n` is the quotient of
//! `A_{n−1} ⊗ E` by the images of `A_{n−N} ⊗ R_N`, reduced in the lexicographic
//! word order. Because leading words of a graded ideal form a monomial ideal
//! for that order, the surviving words are exactly the non-pivot columns of
//! the reduced echelon form of the ideal component in `E^{⊗n}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{self, Echelon, SVec, SparseMatrix};
use crate::scalar::FieldSpec;
use crate::tensor::{self, encode0, gpow, EndoMatrix, Subspace, TensorError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("relations of degree {0} are not allowed (degree must be at least 2)")]
    DegreeTooLow(usize),
    #[error("relations in degree {degree} lie partly in the ideal of lower relations (witness {witness})")]
    IndependenceViolation { degree: usize, witness: String },
    #[error("presentation is not homogeneous (relation degrees {0:?})")]
    NotHomogeneous(Vec<usize>),
    #[error("degree overflow: degree {degree} needs {needed} coordinates, limit {limit}")]
    DegreeOverflow { degree: usize, needed: usize, limit: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("unsupported dimension D = {0} (closed forms exist for D = 2, 3)")]
    UnsupportedDimension(usize),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("relation vector has wrong shape: {0}")]
    BadRelation(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Coordinate-count guard shared by all degree-wise constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_coords: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_coords: tensor::DEFAULT_MAX_DIM }
    }
}

impl Limits {
    pub fn check(&self, degree: usize, needed: usize) -> Result<(), AlgebraError> {
        if needed > self.max_coords {
            return Err(AlgebraError::DegreeOverflow { degree, needed, limit: self.max_coords });
        }
        Ok(())
    }

    /// Default degree cutoff for `g` generators.
    pub fn default_cutoff(g: usize) -> usize {
        if g <= 3 {
            8
        } else {
            6
        }
    }
}

/// Generators `x^1…x^g` and one relation subspace per degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    g: usize,
    field: FieldSpec,
    relations: BTreeMap<usize, Subspace>,
    pub label: String,
}

impl Presentation {
    /// The free algebra on `g` generators.
    pub fn free(field: FieldSpec, g: usize, label: impl Into<String>) -> Self {
        Presentation { g, field, relations: BTreeMap::new(), label: label.into() }
    }

    /// An `N`-homogeneous presentation spanned by `vectors ⊂ E^{⊗N}`.
    pub fn homogeneous(
        field: FieldSpec,
        g: usize,
        n: usize,
        vectors: &[SVec],
        label: impl Into<String>,
    ) -> Result<Self, AlgebraError> {
        let mut p = Self::free(field, g, label);
        p.add_relations(n, vectors)?;
        Ok(p)
    }

    /// Adds relation vectors of degree `n`, merging with any already present.
    pub fn add_relations(&mut self, n: usize, vectors: &[SVec]) -> Result<(), AlgebraError> {
        if n < 2 {
            return Err(AlgebraError::DegreeTooLow(n));
        }
        let dim = gpow(self.g, n);
        for v in vectors {
            if v.iter().any(|(i, _)| *i >= dim) {
                return Err(AlgebraError::BadRelation(format!("index out of range for degree {n}")));
            }
            if let Some((_, s)) = v.iter().next() {
                if s.field() != self.field {
                    return Err(AlgebraError::FieldMismatch(self.field, s.field()));
                }
            }
        }
        let mut all: Vec<SVec> = self.relations.get(&n).map(|s| s.basis().to_vec()).unwrap_or_default();
        all.extend(vectors.iter().cloned());
        let s = Subspace::span(self.field, self.g, n, &all);
        if s.is_zero() {
            self.relations.remove(&n);
        } else {
            self.relations.insert(n, s);
        }
        Ok(())
    }

    pub fn with_subspace(mut self, s: Subspace) -> Self {
        if !s.is_zero() {
            self.relations.insert(s.degree(), s);
        }
        self
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn relations(&self) -> &BTreeMap<usize, Subspace> {
        &self.relations
    }

    pub fn relation_degrees(&self) -> Vec<usize> {
        self.relations.keys().copied().collect()
    }

    /// The single relation degree `N` of a homogeneous presentation.
    pub fn homogeneous_degree(&self) -> Result<usize, AlgebraError> {
        let d = self.relation_degrees();
        if d.len() == 1 {
            Ok(d[0])
        } else {
            Err(AlgebraError::NotHomogeneous(d))
        }
    }

    pub fn relation_space(&self, n: usize) -> Subspace {
        self.relations.get(&n).cloned().unwrap_or_else(|| Subspace::zero(self.field, self.g, n))
    }

    /// The opposite algebra (all words reversed).
    pub fn reversed(&self) -> Presentation {
        let mut out = Self::free(self.field, self.g, format!("{}^op", self.label));
        for (&n, s) in &self.relations {
            let rows: Vec<SVec> = s.basis().iter().map(|r| r.map_indices(|c| reverse_code(self.g, n, c))).collect();
            out.add_relations(n, &rows).expect("same shape");
        }
        out
    }
}

fn reverse_code(g: usize, n: usize, c: usize) -> usize {
    let mut d = tensor::digits0(g, n, c);
    d.reverse();
    encode0(g, &d)
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (g={}, field {}", self.label, self.g, self.field)?;
        for (n, s) in &self.relations {
            write!(f, ", {} relation(s) in degree {}", s.dim(), n)?;
        }
        write!(f, ")")
    }
}

/// Dimensions `a_0, a_1, …` of graded components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct HilbertSeries(pub Vec<u64>);

impl HilbertSeries {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn truncated(&self, n: usize) -> HilbertSeries {
        HilbertSeries(self.0.iter().take(n + 1).copied().collect())
    }
}

impl fmt::Display for HilbertSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Normal words and multiplication tables of `A_0 … A_max`.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    g: usize,
    field: FieldSpec,
    words: Vec<Vec<usize>>,
    pos: Vec<HashMap<usize, usize>>,
    /// `right[n][i·g + λ]` is the normal form of `b_i x^λ` in `A_{n+1}`.
    right: Vec<Vec<SVec>>,
}

impl GradedBasis {
    pub fn g(&self) -> usize {
        self.g
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn max_degree(&self) -> usize {
        self.words.len() - 1
    }

    pub fn dim(&self, n: usize) -> usize {
        self.words[n].len()
    }

    pub fn dims(&self) -> HilbertSeries {
        HilbertSeries(self.words.iter().map(|w| w.len() as u64).collect())
    }

    /// Codes (in `E^{⊗n}`) of the normal words spanning `A_n`, increasing.
    pub fn words(&self, n: usize) -> &[usize] {
        &self.words[n]
    }

    /// Position of a normal word in `A_n`'s basis.
    pub fn position(&self, n: usize, code: usize) -> Option<usize> {
        self.pos[n].get(&code).copied()
    }

    /// `a · x^λ` for `a ∈ A_n`.
    pub fn mul_letter(&self, n: usize, a: &SVec, letter: usize) -> SVec {
        let mut acc = SVec::new();
        for (i, c) in a.iter() {
            acc = acc.add_scaled(c, &self.right[n][i * self.g + letter]);
        }
        acc
    }

    /// `a · w` for `a ∈ A_n` and a word `w` given by 0-based letters.
    pub fn mul_word(&self, n: usize, a: &SVec, word: &[usize]) -> SVec {
        let mut acc = a.clone();
        for (k, &l) in word.iter().enumerate() {
            if acc.is_zero() {
                break;
            }
            acc = self.mul_letter(n + k, &acc, l);
        }
        acc
    }

    /// Normal form of the word with code `code` in `E^{⊗n}`.
    pub fn nf_word(&self, n: usize, code: usize) -> SVec {
        let one = SVec::unit(0, self.field);
        self.mul_word(0, &one, &tensor::digits0(self.g, n, code))
    }

    /// Normal form of a tensor in `E^{⊗n}`, as coordinates in `A_n`.
    pub fn normal_form(&self, n: usize, v: &SVec) -> SVec {
        let mut acc = SVec::new();
        for (c, s) in v.iter() {
            acc = acc.add_scaled(s, &self.nf_word(n, *c));
        }
        acc
    }

    /// Embeds coordinates of `A_n` back into `E^{⊗n}` via the normal words.
    pub fn lift(&self, n: usize, a: &SVec) -> SVec {
        SVec::from_pairs(a.iter().map(|(i, s)| (self.words[n][*i], s.clone())))
    }

    /// Product `a · b` of `a ∈ A_p` and `b ∈ A_q`.
    pub fn multiply(&self, p: usize, a: &SVec, q: usize, b: &SVec) -> SVec {
        let mut acc = SVec::new();
        for (j, c) in b.iter() {
            let w = tensor::digits0(self.g, q, self.words[q][*j]);
            acc = acc.add_scaled(c, &self.mul_word(p, a, &w));
        }
        acc
    }

    /// `x^λ · a` for `a ∈ A_n`.
    pub fn left_letter(&self, n: usize, letter: usize, a: &SVec) -> SVec {
        let x = SVec::unit(self.pos[1][&letter], self.field);
        self.multiply(1, &x, n, a)
    }

    /// Matrix of right multiplication `A_n ⊗ E → A_{n+1}`, columns `i·g + λ`.
    pub fn multiplication_matrix(&self, n: usize) -> SparseMatrix {
        SparseMatrix::from_cols(self.field, self.dim(n + 1), self.right[n].clone())
    }

    /// Matrix of left multiplication `E ⊗ A_n → A_{n+1}`, columns `λ·dim A_n + i`.
    pub fn left_multiplication_matrix(&self, n: usize) -> SparseMatrix {
        let d = self.dim(n);
        let cols: Vec<SVec> = (0..self.g * d)
            .into_par_iter()
            .map(|c| self.left_letter(n, c / d, &SVec::unit(c % d, self.field)))
            .collect();
        SparseMatrix::from_cols(self.field, self.dim(n + 1), cols)
    }

    /// The ideal component `I_n ⊂ E^{⊗n}` in reduced echelon form: rows
    /// `e_w − NF(w)` over the non-normal words `w`.
    pub fn ideal_component(&self, n: usize) -> Subspace {
        let total = gpow(self.g, n);
        let rows: Vec<SVec> = (0..total)
            .into_par_iter()
            .filter(|c| !self.pos[n].contains_key(c))
            .map(|c| {
                let nf = self.lift(n, &self.nf_word(n, c));
                SVec::unit(c, self.field).sub(&nf, self.field)
            })
            .collect();
        Subspace::from_rref(self.field, self.g, n, rows)
    }
}

/// Builds normal words and multiplication tables up to degree `nmax`.
pub fn monomial_basis(p: &Presentation, nmax: usize, limits: Limits) -> Result<GradedBasis, AlgebraError> {
    let (g, f) = (p.g, p.field);
    let mut b = GradedBasis {
        g,
        field: f,
        words: vec![vec![0]],
        pos: vec![HashMap::from([(0, 0)])],
        right: Vec::new(),
    };
    for n in 1..=nmax {
        let prev = b.dim(n - 1);
        let cand = prev * g;
        limits.check(n, cand)?;
        let mut gens: Vec<SVec> = Vec::new();
        for (&deg, rel) in p.relations.range(..=n) {
            let lower = n - deg;
            let gens_deg: Vec<SVec> = (0..b.dim(lower))
                .into_par_iter()
                .flat_map_iter(|i| {
                    let unit = SVec::unit(i, f);
                    rel.basis()
                        .iter()
                        .map(|r| {
                            let mut acc = SVec::new();
                            for (code, c) in r.iter() {
                                let w = tensor::digits0(g, deg, *code);
                                // prefix lands in A_{n−1}, last letter indexes the candidate column
                                let pre = b.mul_word(lower, &unit, &w[..deg - 1]);
                                let last = w[deg - 1];
                                let placed = SVec::from_sorted(
                                    pre.iter().map(|(k, s)| (k * g + last, s.clone())).collect(),
                                );
                                acc = acc.add_scaled(c, &placed);
                            }
                            acc
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
            gens.extend(gens_deg);
        }
        let rref = linalg::rref(f, &gens);
        let mut is_piv = vec![false; cand];
        for r in &rref {
            is_piv[r.leading().unwrap()] = true;
        }
        let free: Vec<usize> = (0..cand).filter(|&c| !is_piv[c]).collect();
        let mut new_pos = vec![usize::MAX; cand];
        for (k, &c) in free.iter().enumerate() {
            new_pos[c] = k;
        }
        let mut table: Vec<SVec> = vec![SVec::new(); cand];
        for &c in &free {
            table[c] = SVec::unit(new_pos[c], f);
        }
        for r in &rref {
            let lead = r.leading().unwrap();
            table[lead] = SVec::from_sorted(r.iter().skip(1).map(|(c, s)| (new_pos[*c], -s)).collect());
        }
        b.right.push(table);
        let words: Vec<usize> = free.iter().map(|&c| b.words[n - 1][c / g] * g + c % g).collect();
        b.pos.push(words.iter().enumerate().map(|(k, &w)| (w, k)).collect());
        b.words.push(words);
    }
    Ok(b)
}

/// Degree-`n` piece of the two-sided ideal generated by the relations.
pub fn ideal_component(p: &Presentation, n: usize, limits: Limits) -> Result<Subspace, AlgebraError> {
    limits.check(n, tensor::checked_pow(p.g, n, limits.max_coords)?)?;
    Ok(monomial_basis(p, n, limits)?.ideal_component(n))
}

pub fn dims(p: &Presentation, nmax: usize, limits: Limits) -> Result<HilbertSeries, AlgebraError> {
    Ok(monomial_basis(p, nmax, limits)?.dims())
}

pub fn multiplication_matrix(b: &GradedBasis, n: usize) -> SparseMatrix {
    b.multiplication_matrix(n)
}

/// Checks that no relation of degree `n` lies in the ideal generated by lower-degree relations.
pub fn validate_presentation(p: &Presentation, limits: Limits) -> Result<(), AlgebraError> {
    let degrees = p.relation_degrees();
    for (k, &n) in degrees.iter().enumerate().skip(1) {
        let mut lower = Presentation::free(p.field, p.g, "lower");
        for &d in &degrees[..k] {
            lower = lower.with_subspace(p.relation_space(d));
        }
        let basis = monomial_basis(&lower, n, limits)?;
        let rel = p.relation_space(n);
        let images: Vec<SVec> = rel.basis().iter().map(|r| basis.normal_form(n, r)).collect();
        let ker = linalg::kernel(p.field, basis.dim(n), &images);
        if let Some(c) = ker.first() {
            let mut w = SVec::new();
            for (i, s) in c.iter() {
                w = w.add_scaled(s, &rel.basis()[*i]);
            }
            return Err(AlgebraError::IndependenceViolation { degree: n, witness: render_tensor(p.g, n, &w) });
        }
    }
    Ok(())
}

/// Human-readable form of a tensor, e.g. `x y - 2 y x`.
pub fn render_tensor(g: usize, n: usize, v: &SVec) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = v.iter().map(|(c, s)| format!("({s}){}", tensor::word_name(g, n, *c))).collect();
    parts.join(" + ")
}

/// The quadratic-dual presentation `A(E*, R^⊥)`.
pub fn koszul_dual(p: &Presentation) -> Result<Presentation, AlgebraError> {
    let n = p.homogeneous_degree()?;
    let perp = p.relation_space(n).annihilator();
    Ok(Presentation::free(p.field, p.g, format!("{}^!", p.label)).with_subspace(perp))
}

/// Whether `L^{⊗N}` preserves every relation space.
pub fn is_graded_automorphism(p: &Presentation, l: &EndoMatrix) -> Result<bool, AlgebraError> {
    if !l.is_invertible() {
        return Err(AlgebraError::SingularMatrix);
    }
    Ok(p.relations.values().all(|r| r.contains(&r.image_under(l)).unwrap_or(false)))
}

/// Expansion of `1/(1 − g t + t²)` (D = 2) or `1/(1 − g t + g t^N − t^{N+1})` (D = 3).
pub fn reference_series(d: usize, g: usize, n: usize, nmax: usize) -> Result<HilbertSeries, AlgebraError> {
    let denom: Vec<(usize, i64)> = match d {
        2 => vec![(1, g as i64), (2, -1)],
        3 => vec![(1, g as i64), (n, -(g as i64)), (n + 1, 1)],
        _ => return Err(AlgebraError::UnsupportedDimension(d)),
    };
    // a_k = Σ c_j a_{k−j} for the recurrence read off the denominator.
    let mut a: Vec<i64> = Vec::with_capacity(nmax + 1);
    for k in 0..=nmax {
        let mut v = if k == 0 { 1 } else { 0 };
        for &(j, c) in &denom {
            if j <= k {
                v += c * a[k - j];
            }
        }
        a.push(v);
    }
    Ok(HilbertSeries(a.into_iter().map(|x| x as u64).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Growth {
    Polynomial,
    Exponential,
}

pub fn growth_class(d: usize, g: usize, n: usize) -> Result<Growth, AlgebraError> {
    let poly = match d {
        2 => g == 2,
        3 => (g == 3 && n == 2) || (g == 2 && n == 3),
        _ => return Err(AlgebraError::UnsupportedDimension(d)),
    };
    Ok(if poly { Growth::Polynomial } else { Growth::Exponential })
}

/// Convenience: a tensor from `(coefficient, word)` pairs over letters `x, y, z, w`.
pub fn tensor_from_words(f: FieldSpec, g: usize, terms: &[(i64, &str)]) -> SVec {
    SVec::from_pairs(terms.iter().map(|(c, w)| {
        let d: Vec<usize> = w.chars().map(|ch| "xyzw".find(ch).expect("letter")).collect();
        (encode0(g, &d), f.int(*c))
    }))
}

/// Brute-force ideal component: the span of every placement `E^{⊗i} ⊗ R ⊗ E^{⊗j}`.
pub fn ideal_component_by_placement(p: &Presentation, n: usize) -> Subspace {
    let mut e = Echelon::new(p.field);
    for (&deg, rel) in p.relations.range(..=n) {
        for i in 0..=(n - deg) {
            let j = n - deg - i;
            let placed = rel.tensor_right(j).tensor_left(i);
            e.extend(placed.basis());
        }
    }
    Subspace::from_rref(p.field, p.g, n, e.rref())
}
