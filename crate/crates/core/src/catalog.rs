//! Named algebras and forms, each bundled with the properties it is expected to have.
//!
//! Entries are addressed as `name` or `name:key=value,key=value`; every
//! parameter has a default so a bare name always builds.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{self, AlgebraError, Growth, HilbertSeries, Presentation};
use crate::linalg::{DenseMatrix, SVec};
use crate::scalar::{FieldSpec, Scalar, ScalarError};
use crate::tensor::{self, encode0, EndoMatrix, MultilinearForm, TensorError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("bad parameters for {entry}: {reason}")]
    BadParameters { entry: String, reason: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

type Result<T> = std::result::Result<T, CatalogError>;

/// What an entry builds: a form (with its homogeneity degree) or a bare presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogObject {
    Form { w: MultilinearForm, n: usize },
    Presentation(Presentation),
}

impl CatalogObject {
    pub fn presentation(&self) -> Result<Presentation> {
        match self {
            CatalogObject::Presentation(p) => Ok(p.clone()),
            CatalogObject::Form { w, n } => {
                let rows = w.contractions(w.degree() - n);
                Ok(Presentation::homogeneous(w.field(), w.g(), *n, &rows, "A(w,N)")?)
            }
        }
    }

    pub fn form(&self) -> Option<(&MultilinearForm, usize)> {
        match self {
            CatalogObject::Form { w, n } => Some((w, *n)),
            CatalogObject::Presentation(_) => None,
        }
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            CatalogObject::Form { w, .. } => w.field(),
            CatalogObject::Presentation(p) => p.field(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Expected {
    #[serde(skip)]
    pub q_w: Option<EndoMatrix>,
    pub dims_prefix: Vec<u64>,
    pub koszul: Option<bool>,
    pub gorenstein: Option<bool>,
    pub d: Option<usize>,
    pub n: usize,
    pub growth: Option<Growth>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub object: CatalogObject,
    pub expected: Expected,
}

/// Static description for `catalog list`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntryInfo {
    pub name: &'static str,
    pub params: &'static str,
    pub constraints: &'static str,
}

pub const ENTRIES: &[EntryInfo] = &[
    EntryInfo { name: "sklyanin3", params: "p=1, q=2", constraints: "(p,q) != (0,0) and (p^3+1, q^3+1) != (0,0)" },
    EntryInfo { name: "qdef3", params: "q=2, a=2, b=3, c=1/6", constraints: "abc = 1, q != 0" },
    EntryInfo { name: "typeE", params: "zeta=4 (field defaults to fp:19)", constraints: "zeta of multiplicative order 9" },
    EntryInfo { name: "counterexample_d", params: "", constraints: "" },
    EntryInfo { name: "yang_mills", params: "g=4, metric=euclidean|lorentzian", constraints: "2 <= g <= 12" },
    EntryInfo { name: "super_yang_mills", params: "g=4, metric=euclidean|lorentzian", constraints: "2 <= g <= 12" },
    EntryInfo { name: "self_duality", params: "", constraints: "" },
    EntryInfo { name: "super_self_duality", params: "", constraints: "uses i when -1 is a square, else rescales S4" },
    EntryInfo { name: "epsilon_algebra", params: "g=4, N=3", constraints: "8 >= g >= N >= 2" },
    EntryInfo { name: "qdefD", params: "D=3, qMN=<scalar> for M<N (default M+N)", constraints: "q^{MN} q^{NM} = 1, all nonzero" },
    EntryInfo { name: "extended_sklyanin", params: "u1=2, u2=3, u3=5", constraints: "u_k != 0 and none of the six relations trivial" },
    EntryInfo { name: "manin_plane", params: "q=2", constraints: "q^2 - q != 0" },
    EntryInfo { name: "jordan_plane", params: "", constraints: "" },
    EntryInfo { name: "polynomial_plane", params: "", constraints: "" },
];

/// Splits `name:k=v,k=v` into its parts.
pub fn parse_reference(reference: &str) -> Result<(String, BTreeMap<String, String>)> {
    let (name, rest) = reference.split_once(':').unwrap_or((reference, ""));
    let mut params = BTreeMap::new();
    for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| CatalogError::BadParameters {
            entry: name.to_string(),
            reason: format!("expected key=value, got `{kv}`"),
        })?;
        params.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok((name.trim().to_string(), params))
}

/// The field an entry uses when none is specified.
pub fn default_field(name: &str) -> FieldSpec {
    match name {
        "typeE" => FieldSpec::prime(19).expect("19 is prime"),
        _ => FieldSpec::Rationals,
    }
}

struct Params<'a> {
    entry: &'a str,
    f: FieldSpec,
    raw: &'a BTreeMap<String, String>,
    used: BTreeMap<String, String>,
}

impl<'a> Params<'a> {
    fn scalar(&mut self, key: &str, default: &str) -> Result<Scalar> {
        let lit = self.raw.get(key).map(String::as_str).unwrap_or(default);
        self.used.insert(key.to_string(), lit.to_string());
        Ok(self.f.parse_scalar(lit)?)
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        let v = match self.raw.get(key) {
            Some(s) => s.parse().map_err(|_| self.bad(format!("{key} must be a nonnegative integer")))?,
            None => default,
        };
        self.used.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    fn word(&mut self, key: &str, default: &str) -> String {
        let v = self.raw.get(key).cloned().unwrap_or_else(|| default.to_string());
        self.used.insert(key.to_string(), v.clone());
        v
    }

    fn bad(&self, reason: impl Into<String>) -> CatalogError {
        CatalogError::BadParameters { entry: self.entry.to_string(), reason: reason.into() }
    }

    fn finish(self) -> Result<BTreeMap<String, String>> {
        if let Some(k) = self.raw.keys().find(|k| !self.used.contains_key(*k)) {
            return Err(self.bad(format!("unknown parameter `{k}`")));
        }
        Ok(self.used)
    }
}

/// Accumulates `(coefficient, word)` terms of a form given 0-based letter digits.
struct FormBuilder {
    f: FieldSpec,
    g: usize,
    m: usize,
    terms: Vec<(Vec<usize>, Scalar)>,
}

impl FormBuilder {
    fn new(f: FieldSpec, g: usize, m: usize) -> Self {
        FormBuilder { f, g, m, terms: Vec::new() }
    }

    fn add(&mut self, c: Scalar, digits: &[usize]) {
        self.terms.push((digits.to_vec(), c));
    }

    /// Words over `x, y, z, w` (digits 0..4).
    fn words(&mut self, c: &Scalar, words: &[&str]) {
        for w in words {
            let d: Vec<usize> = w.chars().map(|ch| "xyzw".find(ch).expect("letter")).collect();
            self.add(c.clone(), &d);
        }
    }

    fn build(self) -> Result<MultilinearForm> {
        Ok(MultilinearForm::from_terms(self.f, self.g, self.m, self.terms)?)
    }
}

fn metric(p: &mut Params, g: usize) -> Result<DenseMatrix> {
    let f = p.f;
    match p.word("metric", "euclidean").as_str() {
        "euclidean" => Ok(DenseMatrix::identity(f, g)),
        "lorentzian" => {
            let mut d = vec![f.one(); g];
            d[0] = f.int(-1);
            Ok(DenseMatrix::diagonal(f, &d))
        }
        other => Err(p.bad(format!("metric must be euclidean or lorentzian, got `{other}`"))),
    }
}

fn pow_series(len: usize, denom: &[i64]) -> Vec<u64> {
    let mut a: Vec<i64> = Vec::with_capacity(len);
    for k in 0..len {
        let mut v = i64::from(k == 0);
        for (j, &c) in denom.iter().enumerate().skip(1) {
            if j <= k {
                v -= c * a[k - j];
            }
        }
        a.push(v);
    }
    a.into_iter().map(|x| x as u64).collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn commutator(f: FieldSpec, g: usize, a: usize, b: usize, sign: i64) -> SVec {
    SVec::from_pairs(vec![(encode0(g, &[a, b]), f.one()), (encode0(g, &[b, a]), f.int(sign))])
}

pub fn build(reference: &str, field: Option<FieldSpec>) -> Result<CatalogEntry> {
    let (name, raw) = parse_reference(reference)?;
    build_with(&name, &raw, field.unwrap_or_else(|| default_field(&name)))
}

pub fn build_with(name: &str, raw: &BTreeMap<String, String>, f: FieldSpec) -> Result<CatalogEntry> {
    let mut p = Params { entry: name, f, raw, used: BTreeMap::new() };
    let one = f.one();
    let (object, expected) = match name {
        "sklyanin3" => {
            let (pp, q) = (p.scalar("p", "1")?, p.scalar("q", "2")?);
            if pp.is_zero() && q.is_zero() {
                return Err(p.bad("(p,q) = (0,0)"));
            }
            if (&pp.pow(3) + &one).is_zero() && (&q.pow(3) + &one).is_zero() {
                return Err(p.bad("(p^3+1, q^3+1) = (0,0)"));
            }
            let mut b = FormBuilder::new(f, 3, 3);
            b.words(&one, &["xyz", "yzx", "zxy"]);
            b.words(&-&q, &["xzy", "yxz", "zyx"]);
            b.words(&-&pp, &["xxx", "yyy", "zzz"]);
            (
                CatalogObject::Form { w: b.build()?, n: 2 },
                Expected {
                    q_w: Some(DenseMatrix::identity(f, 3)),
                    dims_prefix: vec![1, 3, 6, 10, 15, 21],
                    koszul: Some(true),
                    gorenstein: Some(true),
                    d: Some(3),
                    n: 2,
                    growth: Some(Growth::Polynomial),
                    notes: vec!["generic parameters assumed; special (p,q) can degenerate".into()],
                },
            )
        }
        "qdef3" => {
            let q = p.scalar("q", "2")?;
            let a = p.scalar("a", "2")?;
            let bb = p.scalar("b", "3")?;
            let c = p.scalar("c", "1/6")?;
            if !(&(&a * &bb) * &c).is_one() {
                return Err(p.bad("abc != 1"));
            }
            if q.is_zero() {
                return Err(p.bad("q = 0"));
            }
            let mut b = FormBuilder::new(f, 3, 3);
            b.words(&bb, &["xyz"]);
            b.words(&c, &["yzx"]);
            b.words(&a, &["zxy"]);
            b.words(&-&(&q * &(&a * &bb)), &["xzy"]);
            b.words(&-&(&q * &(&bb * &c)), &["yxz"]);
            b.words(&-&(&q * &(&c * &a)), &["zyx"]);
            // forced by w(X_1,X_2,X_3) = w(Q X_3, X_1, X_2); the inverse of diag(b/c, c/a, a/b)
            let qw = DenseMatrix::diagonal(f, &[c.try_div(&bb)?, a.try_div(&c)?, bb.try_div(&a)?]);
            (
                CatalogObject::Form { w: b.build()?, n: 2 },
                Expected {
                    q_w: Some(qw),
                    dims_prefix: vec![1, 3, 6, 10, 15, 21],
                    koszul: Some(true),
                    gorenstein: Some(true),
                    d: Some(3),
                    n: 2,
                    growth: Some(Growth::Polynomial),
                    notes: vec!["twist is diag(c/b, a/c, b/a) under the cyclicity convention used throughout".into()],
                },
            )
        }
        "typeE" => {
            if matches!(f, FieldSpec::Rationals) {
                return Err(p.bad("needs a prime field containing a primitive 9th root of unity"));
            }
            let z = p.scalar("zeta", "4")?;
            if crate::scalar::multiplicative_order(&z) != Some(9) {
                return Err(p.bad("zeta must have multiplicative order 9"));
            }
            let zi = z.inv()?;
            let mut b = FormBuilder::new(f, 3, 3);
            b.words(&one, &["xzx", "yxy", "zyz"]);
            b.words(&z, &["zxx"]);
            b.words(&zi, &["xxz"]);
            b.words(&z.pow(4), &["xyy"]);
            b.words(&zi.pow(4), &["yyx"]);
            b.words(&z.pow(7), &["yzz"]);
            b.words(&zi.pow(7), &["zzy"]);
            (
                CatalogObject::Form { w: b.build()?, n: 2 },
                Expected {
                    q_w: Some(DenseMatrix::diagonal(f, &[z.clone(), z.pow(4), z.pow(7)])),
                    dims_prefix: vec![1, 3, 6, 10, 15, 21],
                    koszul: Some(true),
                    gorenstein: Some(true),
                    d: Some(3),
                    n: 2,
                    growth: Some(Growth::Polynomial),
                    notes: vec!["det Q_w = zeta^3 != 1".into()],
                },
            )
        }
        "counterexample_d" => {
            let mut b = FormBuilder::new(f, 3, 3);
            b.words(&one, &["xxx", "yyy", "xyz", "yzx", "zxy"]);
            (
                CatalogObject::Form { w: b.build()?, n: 2 },
                Expected {
                    q_w: Some(DenseMatrix::identity(f, 3)),
                    dims_prefix: vec![1, 3, 6],
                    koszul: None,
                    gorenstein: Some(false),
                    d: Some(3),
                    n: 2,
                    growth: None,
                    notes: vec!["3-regular but the W-complex is not exact at position 2".into()],
                },
            )
        }
        "yang_mills" | "super_yang_mills" => {
            let g = p.usize("g", 4)?;
            if !(2..=12).contains(&g) {
                return Err(p.bad("g must lie in 2..=12"));
            }
            let gm = metric(&mut p, g)?;
            let sup = name == "super_yang_mills";
            let mut b = FormBuilder::new(f, g, 4);
            for a1 in 0..g {
                for a2 in 0..g {
                    for a3 in 0..g {
                        for a4 in 0..g {
                            let t12_34 = gm.get(a1, a2) * gm.get(a3, a4);
                            let t23_41 = gm.get(a2, a3) * gm.get(a4, a1);
                            let v = if sup {
                                &t23_41 - &t12_34
                            } else {
                                let t13_24 = gm.get(a1, a3) * gm.get(a2, a4);
                                &(&t12_34 + &t23_41) - &(&f.int(2) * &t13_24)
                            };
                            if !v.is_zero() {
                                b.add(v, &[a1, a2, a3, a4]);
                            }
                        }
                    }
                }
            }
            let qw = if sup { DenseMatrix::scalar(f, g, &f.int(-1)) } else { DenseMatrix::identity(f, g) };
            let dims = algebra::reference_series(3, g, 3, 5)?.0;
            (
                CatalogObject::Form { w: b.build()?, n: 3 },
                Expected {
                    q_w: Some(qw),
                    dims_prefix: dims,
                    koszul: Some(true),
                    gorenstein: Some(true),
                    d: Some(3),
                    n: 3,
                    growth: Some(algebra::growth_class(3, g, 3)?),
                    notes: if sup { vec!["g^{mu nu} S_mu S_nu is central".into()] } else { vec![] },
                },
            )
        }
        "self_duality" | "super_self_duality" => {
            let g = 4;
            let sup = name == "super_self_duality";
            let mut rels = Vec::new();
            let mut notes = Vec::new();
            // i when available, else absorb it into S4
            let i_unit = if sup {
                match f.int(-1).sqrt() {
                    Some(i) => i,
                    None => {
                        notes.push("no square root of -1 in the field: S4 replaced by i*S4".into());
                        one.clone()
                    }
                }
            } else {
                one.clone()
            };
            for (k, l, m) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                let lhs = commutator(f, g, 3, k, if sup { 1 } else { -1 }).scale(&i_unit);
                rels.push(lhs.sub(&commutator(f, g, l, m, -1), f));
            }
            let pres = Presentation::homogeneous(f, g, 2, &rels, name)?;
            (
                CatalogObject::Presentation(pres),
                Expected {
                    q_w: None,
                    dims_prefix: pow_series(6, &[1, -4, 3]),
                    koszul: Some(true),
                    gorenstein: Some(false),
                    d: Some(2),
                    n: 2,
                    growth: Some(Growth::Exponential),
                    notes,
                },
            )
        }
        "epsilon_algebra" => {
            let g = p.usize("g", 4)?;
            let n = p.usize("N", 3)?;
            if !(g >= n && n >= 2) {
                return Err(p.bad("need g >= N >= 2"));
            }
            // g! terms in the form
            if g > 8 {
                return Err(p.bad("g must be at most 8"));
            }
            let w = tensor::levi_civita(f, g);
            let sign = if g % 2 == 1 { 1 } else { -1 };
            let (d, dims, koszul) = if n == 2 {
                (Some(g), (0..6).map(|k| binomial(k + g as u64 - 1, g as u64 - 1)).collect(), Some(true))
            } else if (g - 1) % n == 0 {
                let pp = (g - 1) / n;
                let dims = if pp == 1 { algebra::reference_series(3, g, n, 5)?.0 } else { vec![1, g as u64] };
                (Some(2 * pp + 1), dims, Some(true))
            } else {
                (None, vec![1, g as u64], None)
            };
            (
                CatalogObject::Form { w, n },
                Expected {
                    q_w: Some(DenseMatrix::scalar(f, g, &f.int(sign))),
                    dims_prefix: dims,
                    koszul,
                    gorenstein: koszul,
                    d,
                    n,
                    growth: None,
                    notes: vec![],
                },
            )
        }
        "qdefD" => {
            let d = p.usize("D", 3)?;
            if !(2..=7).contains(&d) {
                return Err(p.bad("D must lie in 2..=7"));
            }
            // q[μ][ν] with q^{νμ} = 1/q^{μν}
            let mut q = vec![vec![one.clone(); d]; d];
            #[allow(clippy::needless_range_loop)]
            for mu in 0..d {
                for nu in mu + 1..d {
                    let key = format!("q{}{}", mu + 1, nu + 1);
                    let v = p.scalar(&key, &(mu + nu + 2).to_string())?;
                    if v.is_zero() {
                        return Err(p.bad(format!("{key} = 0")));
                    }
                    q[nu][mu] = v.inv()?;
                    q[mu][nu] = v;
                }
            }
            let mut b = FormBuilder::new(f, d, d);
            let mut perm: Vec<usize> = (0..d).collect();
            tensor::permutations(&mut perm, 0, &mut |pi: &[usize]| {
                let mut chi = one.clone();
                for i in 0..d {
                    for j in i + 1..d {
                        if pi[i] > pi[j] {
                            chi = &chi * &-&q[pi[j]][pi[i]];
                        }
                    }
                }
                b.add(chi, pi);
            });
            // Q^μ_μ = ∏_{λ≠μ}(−q^{μλ}) under the same convention as qdef3
            let diag: Vec<Scalar> = (0..d)
                .map(|mu| (0..d).filter(|&l| l != mu).fold(one.clone(), |acc, l| &acc * &-&q[mu][l]))
                .collect();
            (
                CatalogObject::Form { w: b.build()?, n: 2 },
                Expected {
                    q_w: Some(DenseMatrix::diagonal(f, &diag)),
                    dims_prefix: (0..6).map(|k| binomial(k + d as u64 - 1, d as u64 - 1)).collect(),
                    koszul: Some(true),
                    gorenstein: Some(true),
                    d: Some(d),
                    n: 2,
                    growth: Some(Growth::Polynomial),
                    notes: vec![],
                },
            )
        }
        "extended_sklyanin" => {
            let u = [one.clone(), p.scalar("u1", "2")?, p.scalar("u2", "3")?, p.scalar("u3", "5")?];
            if u.iter().any(Scalar::is_zero) {
                return Err(p.bad("u_k must be nonzero"));
            }
            let half = f.int(2).inv()?;
            // cos θ = (e + 1/e)/2 and i sin θ = (e − 1/e)/2 for e = e^{iθ}
            let cos = |e: &Scalar| -> Result<Scalar> { Ok(&(e + &e.inv()?) * &half) };
            let isin = |e: &Scalar| -> Result<Scalar> { Ok(&(e - &e.inv()?) * &half) };
            let ratio = |a: usize, b: usize| -> Result<Scalar> { Ok(u[a].try_div(&u[b])?) };
            let g = 4;
            let mut rels = Vec::new();
            for (k, l, m) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
                let (c0k, s0k) = (cos(&ratio(0, k)?)?, isin(&ratio(0, k)?)?);
                let (clm, slm) = (cos(&ratio(l, m)?)?, isin(&ratio(l, m)?)?);
                let r1 = commutator(f, g, 0, k, -1).scale(&c0k).sub(&commutator(f, g, l, m, 1).scale(&slm), f);
                let r2 = commutator(f, g, l, m, -1).scale(&clm).sub(&commutator(f, g, 0, k, 1).scale(&s0k), f);
                if r1.is_zero() || r2.is_zero() {
                    return Err(p.bad("one of the six relations is trivial"));
                }
                rels.push(r1);
                rels.push(r2);
            }
            let mut b = FormBuilder::new(f, g, 4);
            let eps = tensor::levi_civita(f, 4);
            for (idx, s) in eps.terms() {
                // U = u_α u_γ / (u_β u_δ)
                let e = (&u[idx[0]] * &u[idx[2]]).try_div(&(&u[idx[1]] * &u[idx[3]]))?;
                b.add(-&(&s * &cos(&e)?), &idx);
            }
            for mu in 0..g {
                for nu in 0..g {
                    let e = ratio(mu, nu)?.pow(2);
                    let v = isin(&e)?;
                    if !v.is_zero() {
                        b.add(v, &[mu, nu, mu, nu]);
                    }
                }
            }
            let w = b.build()?;
            let from_rel = Presentation::homogeneous(f, g, 2, &rels, name)?;
            let from_w = CatalogObject::Form { w: w.clone(), n: 2 }.presentation()?;
            let mut notes = vec!["parameters are u_k = e^{i(phi_k - phi_0)}".to_string()];
            if from_rel.relation_space(2) != from_w.relation_space(2) {
                notes.push("form relations differ from the six displayed relations".into());
            }
            (
                CatalogObject::Form { w, n: 2 },
                Expected {
                    q_w: Some(DenseMatrix::scalar(f, g, &f.int(-1))),
                    dims_prefix: (0..6).map(|k| binomial(k + 3, 3)).collect(),
                    koszul: Some(true),
                    gorenstein: Some(true),
                    d: Some(4),
                    n: 2,
                    growth: Some(Growth::Polynomial),
                    notes,
                },
            )
        }
        "manin_plane" | "jordan_plane" | "polynomial_plane" => {
            let bm = match name {
                "manin_plane" => {
                    let q = p.scalar("q", "2")?;
                    if (&(&q * &q) - &q).is_zero() {
                        return Err(p.bad("q^2 - q = 0"));
                    }
                    DenseMatrix::from_rows(f, vec![vec![f.zero(), f.int(-1)], vec![q, f.zero()]])
                }
                "jordan_plane" => DenseMatrix::from_i64(f, &[&[0, -1], &[1, 1]]),
                _ => DenseMatrix::from_i64(f, &[&[0, -1], &[1, 0]]),
            };
            let mut b = FormBuilder::new(f, 2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    b.add(bm.get(i, j).clone(), &[i, j]);
                }
            }
            let qb = bm.transpose().inverse().map(|t| t.mul(&bm));
            (
                CatalogObject::Form { w: b.build()?, n: 2 },
                Expected {
                    q_w: qb,
                    dims_prefix: (1..=7).collect(),
                    koszul: Some(true),
                    gorenstein: Some(true),
                    d: Some(2),
                    n: 2,
                    growth: Some(Growth::Polynomial),
                    notes: vec![],
                },
            )
        }
        other => return Err(CatalogError::UnknownEntry(other.to_string())),
    };
    let params = p.finish()?;
    Ok(CatalogEntry { name: name.to_string(), params, object, expected })
}

/// The expected series as a [`HilbertSeries`].
impl Expected {
    pub fn series(&self) -> HilbertSeries {
        HilbertSeries(self.dims_prefix.clone())
    }
}

/// `g^{μν} x_μ x_ν`.
pub fn casimir(gm: &DenseMatrix) -> SVec {
    let g = gm.nrows();
    SVec::from_pairs((0..g).flat_map(|a| (0..g).map(move |b| (a, b))).map(|(a, b)| (encode0(g, &[a, b]), gm.get(a, b).clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Limits;
    use crate::tensor::{solve_twisting, Subspace};

    fn fp() -> FieldSpec {
        FieldSpec::prime(1_000_003).unwrap()
    }

    #[test]
    fn every_entry_builds_with_defaults() {
        for e in ENTRIES {
            let entry = build(e.name, None).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert!(entry.object.presentation().is_ok());
        }
    }

    #[test]
    fn reference_parsing() {
        let (n, p) = parse_reference("sklyanin3:p=1/2,q=2").unwrap();
        assert_eq!(n, "sklyanin3");
        assert_eq!(p["p"], "1/2");
        assert!(build("sklyanin3:r=1", None).is_err());
        assert!(matches!(build("nope", None), Err(CatalogError::UnknownEntry(_))));
    }

    #[test]
    fn parameter_constraints() {
        assert!(build("sklyanin3:p=0,q=0", None).is_err());
        assert!(build("sklyanin3:p=-1,q=-1", None).is_err());
        assert!(build("qdef3:a=1,b=1,c=2", None).is_err());
        assert!(build("manin_plane:q=1", None).is_err());
        assert!(build("typeE:zeta=2", None).is_err());
        assert!(build("typeE", Some(FieldSpec::Rationals)).is_err());
    }

    #[test]
    fn sklyanin_relations_match_display() {
        let f = FieldSpec::Rationals;
        let e = build("sklyanin3:p=1/2,q=3", None).unwrap();
        let p = e.object.presentation().unwrap();
        let (pp, q) = (f.ratio(1, 2).unwrap(), f.int(3));
        let rel = |a: &str, b: &str, c: &str| {
            SVec::from_pairs(vec![
                (encode0(3, &idx(a)), f.one()),
                (encode0(3, &idx(b)), -&q),
                (encode0(3, &idx(c)), -&pp),
            ])
        };
        let expect = Subspace::span(f, 3, 2, &[rel("xy", "yx", "zz"), rel("yz", "zy", "xx"), rel("zx", "xz", "yy")]);
        assert_eq!(p.relation_space(2), expect);
    }

    fn idx(w: &str) -> Vec<usize> {
        w.chars().map(|c| "xyzw".find(c).unwrap()).collect()
    }

    #[test]
    fn twisting_matrices_match_records() {
        for name in ["sklyanin3", "qdef3", "typeE", "counterexample_d", "yang_mills", "super_yang_mills", "epsilon_algebra", "manin_plane", "jordan_plane", "polynomial_plane", "extended_sklyanin", "qdefD"] {
            let e = build(name, None).unwrap();
            let (w, _) = e.object.form().unwrap();
            let t = solve_twisting(w).unwrap();
            assert_eq!(Some(&t.q), e.expected.q_w.as_ref(), "{name}");
        }
    }

    #[test]
    fn qdef3_displayed_twist_is_the_inverse() {
        let f = FieldSpec::Rationals;
        let e = build("qdef3:q=2,a=2,b=3,c=1/6", None).unwrap();
        let (w, _) = e.object.form().unwrap();
        let shown = DenseMatrix::diagonal(f, &[f.int(18), f.ratio(1, 12).unwrap(), f.ratio(2, 3).unwrap()]);
        assert!(!tensor::is_q_cyclic(w, &shown));
        assert!(tensor::is_q_cyclic(w, &shown.inverse().unwrap()));
    }

    #[test]
    fn qdef_d_relations() {
        let f = FieldSpec::Rationals;
        let e = build("qdefD:D=3,q12=2,q13=5,q23=7", None).unwrap();
        let p = e.object.presentation().unwrap();
        let q = [[1, 2, 5], [0, 1, 7]];
        let mut rels = Vec::new();
        #[allow(clippy::needless_range_loop)]
        for mu in 0..3 {
            for nu in mu + 1..3 {
                rels.push(SVec::from_pairs(vec![(encode0(3, &[mu, nu]), f.one()), (encode0(3, &[nu, mu]), f.int(-q[mu][nu]))]));
            }
        }
        assert_eq!(p.relation_space(2), Subspace::span(f, 3, 2, &rels));
    }

    #[test]
    fn extended_sklyanin_relations_agree() {
        for field in [FieldSpec::Rationals, fp()] {
            let e = build("extended_sklyanin:u1=2,u2=3,u3=7", Some(field)).unwrap();
            assert_eq!(e.expected.notes.len(), 1, "{:?}", e.expected.notes);
        }
    }

    #[test]
    fn yang_mills_relations_match_display() {
        let f = fp();
        let e = build("yang_mills:g=3", Some(f)).unwrap();
        let p = e.object.presentation().unwrap();
        // Σ_λ [x_λ,[x_λ,x_ν]] = Σ_λ (λλν − 2 λνλ + νλλ)
        let rels: Vec<SVec> = (0..3)
            .map(|nu| {
                SVec::from_pairs((0..3).flat_map(|l| {
                    vec![
                        (encode0(3, &[l, l, nu]), f.one()),
                        (encode0(3, &[l, nu, l]), f.int(-2)),
                        (encode0(3, &[nu, l, l]), f.one()),
                    ]
                }))
            })
            .collect();
        assert_eq!(p.relation_space(3), Subspace::span(f, 3, 3, &rels));
    }

    #[test]
    fn super_yang_mills_casimir_central() {
        let f = fp();
        let e = build("super_yang_mills", Some(f)).unwrap();
        let p = e.object.presentation().unwrap();
        let c = casimir(&DenseMatrix::identity(f, 4));
        for l in 0..4 {
            let x = SVec::unit(l, f);
            let v = tensor::tensor_product(&x, &c, 16).sub(&tensor::tensor_product(&c, &x, 4), f);
            assert!(p.relation_space(3).contains_vector(&v));
        }
    }

    #[test]
    fn self_duality_series() {
        let f = fp();
        let e = build("self_duality", Some(f)).unwrap();
        let d = algebra::dims(&e.object.presentation().unwrap(), 5, Limits::default()).unwrap();
        assert_eq!(d.0, e.expected.dims_prefix);
        assert_eq!(&d.0[..4], &[1, 4, 13, 40]);
        let s = build("super_self_duality", Some(FieldSpec::prime(13).unwrap())).unwrap();
        assert!(s.expected.notes.is_empty());
        let d = algebra::dims(&s.object.presentation().unwrap(), 5, Limits::default()).unwrap();
        assert_eq!(d.0, e.expected.dims_prefix);
    }
}
