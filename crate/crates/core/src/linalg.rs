//! Exact sparse and dense linear algebra.
//!
//! Elimination runs on a specialised element type per field (`u32` residues
//! for `F_p`, big rationals for `Q`); [`Scalar`] values are converted at the
//! boundary only. Pivots are always chosen at the smallest column index, so
//! every echelon form produced here is canonical.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::scalar::{add_mod, inv_mod, mul_mod, FieldSpec, Scalar};

/// A sparse vector: strictly increasing indices, no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SVec {
    entries: Vec<(usize, Scalar)>,
}

impl SVec {
    pub fn new() -> Self {
        SVec { entries: Vec::new() }
    }

    /// Builds from arbitrary (index, value) pairs, summing duplicates.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut map: std::collections::BTreeMap<usize, Scalar> = std::collections::BTreeMap::new();
        for (i, v) in pairs {
            if v.is_zero() {
                continue;
            }
            match map.get_mut(&i) {
                Some(acc) => *acc = &*acc + &v,
                None => {
                    map.insert(i, v);
                }
            }
        }
        SVec {
            entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    /// Builds from pairs already sorted by index with no zeros or repeats.
    pub fn from_sorted(entries: Vec<(usize, Scalar)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(_, v)| !v.is_zero()));
        SVec { entries }
    }

    pub fn unit(i: usize, field: FieldSpec) -> Self {
        SVec { entries: vec![(i, field.one())] }
    }

    pub fn from_dense(values: &[Scalar]) -> Self {
        SVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize, field: FieldSpec) -> Vec<Scalar> {
        let mut out = vec![field.zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Scalar)> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn scale(&self, c: &Scalar) -> SVec {
        if c.is_zero() {
            return SVec::new();
        }
        SVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Scalar, other: &SVec) -> SVec {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, c * y));
                        b.next();
                    } else {
                        let s = x + &(c * y);
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, c * y));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SVec { entries: out }
    }

    pub fn add(&self, other: &SVec, field: FieldSpec) -> SVec {
        self.add_scaled(&field.one(), other)
    }

    pub fn sub(&self, other: &SVec, field: FieldSpec) -> SVec {
        self.add_scaled(&field.int(-1), other)
    }

    pub fn dot(&self, other: &SVec, field: FieldSpec) -> Scalar {
        let mut acc = field.zero();
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() && b < other.entries.len() {
            let (i, x) = &self.entries[a];
            let (j, y) = &other.entries[b];
            match i.cmp(j) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc = &acc + &(x * y);
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// Reindexes through `f`, summing collisions.
    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> SVec {
        SVec::from_pairs(self.entries.iter().map(|(i, v)| (f(*i), v.clone())))
    }

    /// Shifts every index by `offset`.
    pub fn shifted(&self, offset: usize) -> SVec {
        SVec {
            entries: self.entries.iter().map(|(i, v)| (i + offset, v.clone())).collect(),
        }
    }

    /// Restriction to indices in `[lo, hi)`, re-based at `lo`.
    pub fn window(&self, lo: usize, hi: usize) -> SVec {
        SVec {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| *i >= lo && *i < hi)
                .map(|(i, v)| (i - lo, v.clone()))
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Scalar)> {
        self.entries.iter()
    }
}

// ---------------------------------------------------------------------------
// elimination engine

pub(crate) trait Arith: Clone + Send + Sync {
    type E: Clone + Send + Sync + PartialEq + fmt::Debug;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn lift(&self, s: &Scalar) -> Self::E;
    fn lower(&self, e: &Self::E) -> Scalar;
}

#[derive(Clone)]
pub(crate) struct ModArith {
    p: u32,
}

impl Arith for ModArith {
    type E = u32;
    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        add_mod(*a, *b, self.p)
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        mul_mod(*a, *b, self.p)
    }
    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u32) -> u32 {
        inv_mod(*a, self.p)
    }
    fn lift(&self, s: &Scalar) -> u32 {
        s.residue().expect("modular scalar")
    }
    fn lower(&self, e: &u32) -> Scalar {
        Scalar::Modular { value: *e, modulus: self.p }
    }
}

#[derive(Clone)]
pub(crate) struct RatArith;

impl Arith for RatArith {
    type E = BigRational;
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn lift(&self, s: &Scalar) -> BigRational {
        s.as_rational().expect("rational scalar").clone()
    }
    fn lower(&self, e: &BigRational) -> Scalar {
        Scalar::Rational(Box::new(e.clone()))
    }
}

type Row<E> = Vec<(usize, E)>;

/// `a - c * b` on sorted sparse rows.
fn axpy<A: Arith>(ar: &A, a: &Row<A::E>, c: &A::E, b: &Row<A::E>) -> Row<A::E> {
    let nc = ar.neg(c);
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, ar.mul(&nc, &b[j].1)));
            j += 1;
        } else {
            let s = ar.add(&a[i].1, &ar.mul(&nc, &b[j].1));
            if !ar.is_zero(&s) {
                out.push((a[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[derive(Clone)]
struct Core<A: Arith> {
    ar: A,
    rows: Vec<Row<A::E>>,
    pivot_of: HashMap<usize, usize>,
}

impl<A: Arith> Core<A> {
    fn new(ar: A) -> Self {
        Core { ar, rows: Vec::new(), pivot_of: HashMap::new() }
    }

    fn lift(&self, v: &SVec) -> Row<A::E> {
        v.entries.iter().map(|(i, s)| (*i, self.ar.lift(s))).collect()
    }

    fn lower(&self, r: &Row<A::E>) -> SVec {
        SVec {
            entries: r.iter().map(|(i, e)| (*i, self.ar.lower(e))).collect(),
        }
    }

    /// Leading-term reduction against the current pivots.
    fn reduce_leading(&self, mut r: Row<A::E>) -> Row<A::E> {
        let mut start = 0;
        while start < r.len() {
            let (c, ref v) = r[start];
            match self.pivot_of.get(&c) {
                Some(&k) => {
                    let v = v.clone();
                    r = axpy(&self.ar, &r, &v, &self.rows[k]);
                    // entries before `start` are untouched: pivot rows lead at `c`
                }
                None => start += 1,
            }
        }
        r
    }

    fn insert(&mut self, r: Row<A::E>) -> bool {
        let r = self.reduce_first(r);
        if r.is_empty() {
            return false;
        }
        let lead = r[0].0;
        let inv = self.ar.inv(&r[0].1);
        let r: Row<A::E> = r.into_iter().map(|(i, e)| (i, self.ar.mul(&e, &inv))).collect();
        self.pivot_of.insert(lead, self.rows.len());
        self.rows.push(r);
        true
    }

    /// Reduces until the leading column is not a pivot.
    fn reduce_first(&self, mut r: Row<A::E>) -> Row<A::E> {
        while let Some((c, v)) = r.first() {
            match self.pivot_of.get(c) {
                Some(&k) => {
                    let v = v.clone();
                    r = axpy(&self.ar, &r, &v, &self.rows[k]);
                }
                None => break,
            }
        }
        r
    }

    /// Fully reduced rows sorted by pivot column.
    fn rref(&self) -> Vec<Row<A::E>> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&k| std::cmp::Reverse(self.rows[k][0].0));
        let mut done: HashMap<usize, Row<A::E>> = HashMap::new();
        for k in order {
            let row = &self.rows[k];
            let lead = row[0].0;
            let mut r = row.clone();
            for (c, _) in row.iter().skip(1) {
                if let Some(red) = done.get(c) {
                    if let Ok(pos) = r.binary_search_by_key(c, |(i, _)| *i) {
                        let v = r[pos].1.clone();
                        r = axpy(&self.ar, &r, &v, red);
                    }
                }
            }
            done.insert(lead, r);
        }
        let mut out: Vec<(usize, Row<A::E>)> = done.into_iter().collect();
        out.sort_by_key(|(c, _)| *c);
        out.into_iter().map(|(_, r)| r).collect()
    }
}

#[derive(Clone)]
enum Engine {
    Modular(Core<ModArith>),
    Rational(Core<RatArith>),
}

macro_rules! dispatch {
    ($self:expr, $core:ident => $body:expr) => {
        match &$self.engine {
            Engine::Modular($core) => $body,
            Engine::Rational($core) => $body,
        }
    };
    (mut $self:expr, $core:ident => $body:expr) => {
        match &mut $self.engine {
            Engine::Modular($core) => $body,
            Engine::Rational($core) => $body,
        }
    };
}

/// Incremental row echelon form over an exact field.
#[derive(Clone)]
pub struct Echelon {
    field: FieldSpec,
    engine: Engine,
}

impl Echelon {
    pub fn new(field: FieldSpec) -> Self {
        let engine = match field {
            FieldSpec::PrimeField(p) => Engine::Modular(Core::new(ModArith { p })),
            FieldSpec::Rationals => Engine::Rational(Core::new(RatArith)),
        };
        Echelon { field, engine }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Adds a row; returns whether it was independent of the previous ones.
    pub fn insert(&mut self, v: &SVec) -> bool {
        dispatch!(mut self, core => {
            let r = core.lift(v);
            core.insert(r)
        })
    }

    pub fn extend<'a>(&mut self, vs: impl IntoIterator<Item = &'a SVec>) {
        for v in vs {
            self.insert(v);
        }
    }

    pub fn rank(&self) -> usize {
        dispatch!(self, core => core.rows.len())
    }

    /// Remainder of `v` after leading-term reduction; zero iff `v` lies in the row space.
    pub fn reduce(&self, v: &SVec) -> SVec {
        dispatch!(self, core => {
            let r = core.reduce_leading(core.lift(v));
            core.lower(&r)
        })
    }

    pub fn contains(&self, v: &SVec) -> bool {
        dispatch!(self, core => core.reduce_first(core.lift(v)).is_empty())
    }

    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = dispatch!(self, core => core.pivot_of.keys().copied().collect());
        p.sort_unstable();
        p
    }

    /// The reduced row echelon basis, sorted by pivot column.
    pub fn rref(&self) -> Vec<SVec> {
        dispatch!(self, core => core.rref().iter().map(|r| core.lower(r)).collect())
    }
}

pub fn rank(field: FieldSpec, vs: &[SVec]) -> usize {
    let mut e = Echelon::new(field);
    e.extend(vs);
    e.rank()
}

pub fn rref(field: FieldSpec, vs: &[SVec]) -> Vec<SVec> {
    let mut e = Echelon::new(field);
    e.extend(vs);
    e.rref()
}

/// Basis of the linear relations among `vs`: coefficient vectors `c` in
/// `K^{vs.len()}` with `sum_j c_j vs[j] = 0`. `width` bounds the indices of `vs`.
pub fn kernel(field: FieldSpec, width: usize, vs: &[SVec]) -> Vec<SVec> {
    let mut e = Echelon::new(field);
    for (j, v) in vs.iter().enumerate() {
        let mut aug = v.entries.clone();
        aug.push((width + j, field.one()));
        e.insert(&SVec::from_sorted(aug));
    }
    e.rref()
        .into_iter()
        .filter(|r| r.leading().is_some_and(|c| c >= width))
        .map(|r| r.window(width, width + vs.len()))
        .collect()
}

/// Intersection of two row spaces inside `K^width` (Zassenhaus).
pub fn intersect(field: FieldSpec, width: usize, a: &[SVec], b: &[SVec]) -> Vec<SVec> {
    let mut e = Echelon::new(field);
    for v in a {
        let mut ent = v.entries.clone();
        ent.extend(v.entries.iter().map(|(i, s)| (i + width, s.clone())));
        e.insert(&SVec::from_sorted(ent));
    }
    for v in b {
        e.insert(v);
    }
    let tail: Vec<SVec> = e
        .rref()
        .into_iter()
        .filter(|r| r.leading().is_some_and(|c| c >= width))
        .map(|r| r.window(width, 2 * width))
        .collect();
    rref(field, &tail)
}

/// Solution set of a linear system `A x = b`, `A` given by sparse rows over `nvars` unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<Scalar>,
    pub kernel: Vec<Vec<Scalar>>,
}

pub fn solve(field: FieldSpec, nvars: usize, rows: &[SVec], rhs: &[Scalar]) -> Option<AffineSolution> {
    assert_eq!(rows.len(), rhs.len());
    let mut e = Echelon::new(field);
    for (r, b) in rows.iter().zip(rhs) {
        let mut ent = r.entries.clone();
        if !b.is_zero() {
            ent.push((nvars, b.clone()));
        }
        e.insert(&SVec::from_sorted(ent));
    }
    let basis = e.rref();
    if basis.iter().any(|r| r.leading() == Some(nvars)) {
        return None;
    }
    let mut particular = vec![field.zero(); nvars];
    let mut is_pivot = vec![false; nvars];
    for r in &basis {
        let lead = r.leading().unwrap();
        is_pivot[lead] = true;
        if let Some(b) = r.get(nvars) {
            particular[lead] = b.clone();
        }
    }
    let mut kernel = Vec::new();
    for f in (0..nvars).filter(|&f| !is_pivot[f]) {
        let mut k = vec![field.zero(); nvars];
        k[f] = field.one();
        for r in &basis {
            if let Some(v) = r.get(f) {
                k[r.leading().unwrap()] = -v;
            }
        }
        kernel.push(k);
    }
    Some(AffineSolution { particular, kernel })
}

// ---------------------------------------------------------------------------
// matrices

/// A sparse matrix stored by columns: `cols[j]` is the image of basis vector `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub field: FieldSpec,
    pub cols: Vec<SVec>,
}

impl SparseMatrix {
    pub fn zero(field: FieldSpec, nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, field, cols: vec![SVec::new(); ncols] }
    }

    pub fn from_cols(field: FieldSpec, nrows: usize, cols: Vec<SVec>) -> Self {
        debug_assert!(cols.iter().all(|c| c.entries.last().is_none_or(|(i, _)| *i < nrows)));
        SparseMatrix { nrows, ncols: cols.len(), field, cols }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        Self::from_cols(field, n, (0..n).map(|i| SVec::unit(i, field)).collect())
    }

    pub fn apply(&self, v: &SVec) -> SVec {
        let mut acc = SVec::new();
        for (j, c) in v.iter() {
            acc = acc.add_scaled(c, &self.cols[*j]);
        }
        acc
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, other.nrows, "shape mismatch in composition");
        SparseMatrix::from_cols(self.field, self.nrows, other.cols.iter().map(|c| self.apply(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(SVec::is_zero)
    }

    pub fn rank(&self) -> usize {
        rank(self.field, &self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(SVec::nnz).sum()
    }

    /// Basis of the kernel, as vectors in the source space.
    pub fn kernel(&self) -> Vec<SVec> {
        kernel(self.field, self.nrows, &self.cols)
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        SparseMatrix::from_cols(
            self.field,
            self.nrows,
            self.cols.iter().zip(&other.cols).map(|(a, b)| a.sub(b, self.field)).collect(),
        )
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        SparseMatrix::from_cols(
            self.field,
            self.nrows,
            self.cols.iter().zip(&other.cols).map(|(a, b)| a.add(b, self.field)).collect(),
        )
    }

    /// `(row, col, value)` triplets, column-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, Scalar)> {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, v)| (*i, j, v.clone())))
            .collect()
    }

    /// Text export: a `rows cols` header followed by one `row col value` line per entry.
    pub fn to_triplet_text(&self) -> String {
        let mut s = format!("{} {}\n", self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            s.push_str(&format!("{i} {j} {v}\n"));
        }
        s
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.field, self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m.set(i, j, v);
        }
        m
    }
}

/// A dense matrix of scalars, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DenseMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl DenseMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        DenseMatrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn scalar(field: FieldSpec, n: usize, c: &Scalar) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn diagonal(field: FieldSpec, d: &[Scalar]) -> Self {
        let mut m = Self::zeros(field, d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        DenseMatrix { field, rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Self {
        Self::from_rows(field, rows.iter().map(|r| r.iter().map(|&v| field.int(v)).collect()).collect())
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> DenseMatrix {
        DenseMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).fold(self.field.zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn row_svecs(&self) -> Vec<SVec> {
        (0..self.rows).map(|i| SVec::from_dense(self.row(i))).collect()
    }

    pub fn rank(&self) -> usize {
        rank(self.field, &self.row_svecs())
    }

    /// Kronecker product, left factor most significant.
    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let mut out = Self::zeros(self.field, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if !b.is_zero() {
                            out.set(i * other.rows + k, j * other.cols + l, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn inverse(&self) -> Option<DenseMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let rows: Vec<SVec> = (0..n)
            .map(|i| {
                let mut ent: Vec<(usize, Scalar)> = self
                    .row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, v.clone()))
                    .collect();
                ent.push((n + i, self.field.one()));
                SVec::from_sorted(ent)
            })
            .collect();
        let r = rref(self.field, &rows);
        if r.len() < n || r.iter().take(n).enumerate().any(|(i, row)| row.leading() != Some(i)) {
            return None;
        }
        let mut inv = Self::zeros(self.field, n, n);
        for (i, row) in r.iter().enumerate() {
            for (j, v) in row.iter() {
                if *j >= n {
                    inv.set(i, j - n, v.clone());
                }
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self) -> Scalar {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self.field.one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return self.field.zero();
            };
            if piv != col {
                for j in 0..n {
                    let t = a.get(piv, j).clone();
                    let u = a.get(col, j).clone();
                    a.set(piv, j, u);
                    a.set(col, j, t);
                }
                det = -det;
            }
            let p = a.get(col, col).clone();
            det = &det * &p;
            let pinv = p.inv().expect("nonzero pivot");
            for r in col + 1..n {
                let f = a.get(r, col) * &pinv;
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a.get(r, j) - &(&f * a.get(col, j));
                    a.set(r, j, v);
                }
            }
        }
        det
    }

    /// Coefficients `c_0..c_n` of `det(x I - A)`, lowest degree first.
    /// Uses the division-free Berkowitz recursion, so it is valid in any characteristic.
    pub fn charpoly(&self) -> Vec<Scalar> {
        assert!(self.is_square());
        let f = self.field;
        let n = self.rows;
        let mut vect: Vec<Scalar> = vec![f.one()];
        for r in 0..n {
            // leading principal submatrix of size r, column/row r
            let a_rr = self.get(r, r).clone();
            let col: Vec<Scalar> = (0..r).map(|i| self.get(i, r).clone()).collect();
            let row: Vec<Scalar> = (0..r).map(|j| self.get(r, j).clone()).collect();
            // Toeplitz column: [1, -a_rr, -R C, -R A C, -R A^2 C, ...]
            let mut t = vec![f.one(), -&a_rr];
            let mut cur = col.clone();
            for _ in 0..r {
                let rc = row.iter().zip(&cur).fold(f.zero(), |acc, (x, y)| &acc + &(x * y));
                t.push(-rc);
                // cur = A_r * cur
                let next: Vec<Scalar> = (0..r)
                    .map(|i| (0..r).fold(f.zero(), |acc, j| &acc + &(self.get(i, j) * &cur[j])))
                    .collect();
                cur = next;
            }
            // new = T * vect where T is (r+2)x(r+1) lower-triangular Toeplitz
            let mut new = vec![f.zero(); r + 2];
            for (i, slot) in new.iter_mut().enumerate() {
                for (j, v) in vect.iter().enumerate() {
                    if i >= j && i - j < t.len() {
                        *slot = &*slot + &(&t[i - j] * v);
                    }
                }
            }
            vect = new;
        }
        // vect holds coefficients highest degree first
        vect.reverse();
        vect
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fp() -> FieldSpec {
        FieldSpec::prime(101).unwrap()
    }

    fn v(f: FieldSpec, xs: &[i64]) -> SVec {
        SVec::from_dense(&xs.iter().map(|&x| f.int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn rref_is_canonical() {
        for f in [FieldSpec::Rationals, fp()] {
            let a = rref(f, &[v(f, &[1, 2, 3]), v(f, &[2, 4, 7])]);
            let b = rref(f, &[v(f, &[3, 6, 10]), v(f, &[0, 0, 5])]);
            assert_eq!(a, b);
            assert_eq!(a[0], v(f, &[1, 2, 0]));
            assert_eq!(a[1], v(f, &[0, 0, 1]));
        }
    }

    #[test]
    fn kernel_and_intersection() {
        let f = FieldSpec::Rationals;
        let k = kernel(f, 2, &[v(f, &[1, 0]), v(f, &[0, 1]), v(f, &[1, 1])]);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], v(f, &[1, 1, -1]));
        let i = intersect(f, 3, &[v(f, &[1, 0, 0]), v(f, &[0, 1, 0])], &[v(f, &[0, 1, 0]), v(f, &[0, 0, 1])]);
        assert_eq!(i, vec![v(f, &[0, 1, 0])]);
    }

    #[test]
    fn solve_affine() {
        let f = FieldSpec::Rationals;
        // x + y = 2, inconsistent variant
        let sol = solve(f, 2, &[v(f, &[1, 1])], &[f.int(2)]).unwrap();
        assert_eq!(sol.particular, vec![f.int(2), f.zero()]);
        assert_eq!(sol.kernel, vec![vec![f.int(-1), f.one()]]);
        assert!(solve(f, 2, &[v(f, &[1, 1]), v(f, &[2, 2])], &[f.int(1), f.int(3)]).is_none());
    }

    #[test]
    fn dense_inverse_det_charpoly() {
        let f = FieldSpec::Rationals;
        let m = DenseMatrix::from_i64(f, &[&[2, 1], &[7, 4]]);
        assert_eq!(m.det(), f.one());
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), DenseMatrix::identity(f, 2));
        // x^2 - 6x + 1
        assert_eq!(m.charpoly(), vec![f.one(), f.int(-6), f.one()]);
        let s = DenseMatrix::from_i64(f, &[&[1, 2], &[2, 4]]);
        assert!(s.inverse().is_none());
        assert_eq!(s.det(), f.zero());
        let m3 = DenseMatrix::from_i64(f, &[&[1, 2, 0], &[0, 1, 3], &[4, 0, 1]]);
        // det(xI - A) = x^3 - 3x^2 + 3x - 25
        assert_eq!(m3.charpoly(), vec![f.int(-25), f.int(3), f.int(-3), f.one()]);
        assert_eq!(m3.det(), f.int(25));
    }

    #[test]
    fn sparse_matrix_ops() {
        let f = fp();
        let a = SparseMatrix::from_cols(f, 2, vec![v(f, &[1, 0]), v(f, &[1, 1]), v(f, &[0, 1])]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(a.apply(&k[0]).is_zero());
        let t = a.to_triplet_text();
        assert!(t.starts_with("2 3\n0 0 1\n"));
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 1..7)) {
            let f = fp();
            let vs: Vec<SVec> = rows.iter().map(|r| v(f, r)).collect();
            let r = rank(f, &vs);
            let k = kernel(f, 5, &vs);
            prop_assert_eq!(r + k.len(), vs.len());
            let m = SparseMatrix::from_cols(f, 5, vs.clone());
            for c in &k {
                prop_assert!(m.apply(c).is_zero());
            }
        }
    }
}
