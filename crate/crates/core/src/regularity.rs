//! From a preregular multilinear form to its algebra, and the finite checks
//! certifying Koszulity, Gorenstein duality and the Frobenius quotients,
//! all truncated at an explicit degree cutoff.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{self, AlgebraError, GradedBasis, HilbertSeries, Limits, Presentation};
use crate::koszul::{self, ComplexSlice, KoszulContext, KoszulError};
use crate::linalg::{self, DenseMatrix, SVec};
use crate::scalar::{FieldSpec, Scalar};
use crate::tensor::{self, EndoMatrix, MultilinearForm, PreregularOutcome, Subspace, TensorError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegularityError {
    #[error("form is not preregular: {0}")]
    NotPreregular(String),
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("form is not bilinear (degree {0})")]
    NotBilinear(usize),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error(transparent)]
    Koszul(#[from] KoszulError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

type Result<T> = std::result::Result<T, RegularityError>;

fn require_preregular(w: &MultilinearForm) -> Result<EndoMatrix> {
    match tensor::is_preregular(w) {
        PreregularOutcome::Pass { q } => Ok(q),
        PreregularOutcome::Failure { condition, detail, .. } => {
            Err(RegularityError::NotPreregular(format!("{condition:?}: {detail}")))
        }
    }
}

/// The relations `Σ_μ W_{λμ} x^{μ_1}⋯x^{μ_N} = 0` over all `λ` of length `m − N`.
pub fn algebra_from_form(w: &MultilinearForm, n: usize) -> Result<Presentation> {
    let m = w.degree();
    if !(m >= n && n >= 2) {
        return Err(RegularityError::ShapeError(format!("need m >= N >= 2, got m={m}, N={n}")));
    }
    require_preregular(w)?;
    let rows = w.contractions(m - n);
    let p = Presentation::homogeneous(w.field(), w.g(), n, &rows, format!("A(w,{n})"))?;
    if m == n + 1 && p.relation_space(n).dim() != w.g() {
        return Err(RegularityError::ShapeError(format!(
            "expected {} independent relations, found {}",
            w.g(),
            p.relation_space(n).dim()
        )));
    }
    Ok(p)
}

/// `W_n ⊂ E^{⊗n}` for `0 ≤ n ≤ m`: everything below `N`, contractions of `w` from `N` on.
pub fn w_spaces(w: &MultilinearForm, n: usize) -> Result<Vec<Subspace>> {
    require_preregular(w)?;
    Ok(w_spaces_unchecked(w, n))
}

fn w_spaces_unchecked(w: &MultilinearForm, n: usize) -> Vec<Subspace> {
    let (g, m, f) = (w.g(), w.degree(), w.field());
    (0..=m)
        .map(|k| {
            if k < n {
                Subspace::full(f, g, k)
            } else {
                Subspace::span(f, g, k, &w.contractions(m - k))
            }
        })
        .collect()
}

/// `ν_N(2k) = Nk`, `ν_N(2k+1) = Nk + 1`.
pub fn nu(n: usize, k: usize) -> usize {
    n * (k / 2) + (k % 2)
}

/// Shape constraints linking `m`, `N` and `D`.
pub fn kgd_shape_validate(m: usize, n: usize, d: usize) -> Result<()> {
    if n < 2 {
        return Err(RegularityError::ShapeError(format!("N = {n} must be at least 2")));
    }
    if n == 2 {
        if m != d {
            return Err(RegularityError::ShapeError(format!("for N = 2 need m = D, got m={m}, D={d}")));
        }
        return Ok(());
    }
    if d.is_multiple_of(2) || d < 3 {
        return Err(RegularityError::ShapeError(format!("for N >= 3 need D = 2p+1 with p >= 1, got D={d}")));
    }
    let p = (d - 1) / 2;
    if m != n * p + 1 {
        return Err(RegularityError::ShapeError(format!("for N = {n}, D = {d} need m = {}, got m={m}", n * p + 1)));
    }
    Ok(())
}

/// Homology of the W-complex, one row per total degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CwdTable {
    pub cutoff: usize,
    /// `(t, dims of H_0..H_D)` for `t = 0..=cutoff`.
    pub homology: Vec<(usize, Vec<usize>)>,
    /// `(t, position, dim)` of the first nonzero homology at a positive position or positive degree.
    pub first_failure: Option<(usize, usize, usize)>,
}

impl CwdTable {
    pub fn acyclic(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// The complex `0 → A⊗W_{ν(D)} → … → A⊗W_1 → A → 0` realised as a contraction of the
/// sub-N-complex `A ⊗ W`.
#[derive(Debug, Clone)]
pub struct CwdComplex {
    pub ctx: KoszulContext,
    pub d: usize,
}

impl CwdComplex {
    pub fn new(w: &MultilinearForm, n: usize, d: usize, t_max: usize, limits: Limits) -> Result<Self> {
        kgd_shape_validate(w.degree(), n, d)?;
        let p = algebra_from_form(w, n)?;
        let basis = algebra::monomial_basis(&p, t_max, limits)?;
        Ok(Self::with_basis(w, n, d, p, basis))
    }

    pub fn with_basis(w: &MultilinearForm, n: usize, d: usize, p: Presentation, basis: GradedBasis) -> Self {
        let (g, f) = (w.g(), w.field());
        let mut spaces = w_spaces_unchecked(w, n);
        while spaces.len() <= basis.max_degree() {
            let k = spaces.len();
            spaces.push(Subspace::zero(f, g, k));
        }
        CwdComplex { ctx: KoszulContext::from_parts(p, n, basis, spaces), d }
    }

    pub fn slice(&self, t: usize) -> Result<ComplexSlice> {
        let mut s = self.ctx.contraction(self.ctx.n - 1, 0, t)?;
        for l in &mut s.labels {
            *l = l.replace("A!*", "W");
        }
        Ok(s)
    }

    /// Coordinates of `a ⊗ v` at `position` of the slice of total degree `t`,
    /// `a ∈ A_{t−ν}` in normal-word coordinates and `v ∈ W_ν ⊂ E^{⊗ν}`.
    pub fn element(&self, t: usize, position: usize, a: &SVec, v: &SVec) -> SVec {
        let n = nu(self.ctx.n, position);
        let coords = SVec::from_dense(&self.ctx.duals[n].coordinates(v));
        debug_assert!(t >= n && a.iter().all(|(i, _)| *i < self.ctx.basis.dim(t - n)));
        tensor::tensor_product(a, &coords, self.ctx.dual_dim(n))
    }

    pub fn table(&self, t_max: usize) -> Result<CwdTable> {
        let homology: Vec<(usize, Vec<usize>)> = (0..=t_max)
            .into_par_iter()
            .map(|t| self.slice(t).map(|s| (t, s.homology_dims())))
            .collect::<Result<_>>()?;
        let first_failure = homology
            .iter()
            .flat_map(|(t, h)| {
                h.iter().enumerate().filter(move |(k, &dim)| {
                    // H_0 in degree 0 is the ground field
                    if *t == 0 && *k == 0 {
                        dim != 1
                    } else {
                        dim != 0
                    }
                })
                .map(move |(k, &dim)| (*t, k, dim))
            })
            .next();
        Ok(CwdTable { cutoff: t_max, homology, first_failure })
    }
}

/// Whether `v` is a cycle at position `k` of `s` that is not a boundary.
pub fn is_nontrivial_cycle(s: &ComplexSlice, k: usize, v: &SVec) -> (bool, bool) {
    let in_kernel = k == 0 || s.maps[k - 1].apply(v).is_zero();
    let in_image = match s.maps.get(k) {
        Some(m) => {
            let mut e = linalg::Echelon::new(s.field);
            e.extend(&m.cols);
            e.contains(v)
        }
        None => v.is_zero(),
    };
    (in_kernel, in_image)
}

pub fn cwd_complex(w: &MultilinearForm, n: usize, d: usize, t_max: usize, limits: Limits) -> Result<(CwdComplex, CwdTable)> {
    let c = CwdComplex::new(w, n, d, t_max, limits)?;
    let t = c.table(t_max)?;
    Ok((c, t))
}

// ---------------------------------------------------------------------------
// Frobenius quotients

/// Pairing data of a graded quotient `B/ℐ` with `ℐ_n` the radical of `(x, y) ↦ ω(xy)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrobeniusData {
    /// Degree carrying the functional.
    pub top: usize,
    /// Dimensions of the ambient algebra in degrees `0..=top`.
    pub ambient_dims: Vec<usize>,
    /// Dimensions of `ℐ_n`.
    pub ideal_dims: Vec<usize>,
    /// Dimensions of the quotient.
    pub dims: Vec<usize>,
    /// Gram matrices of the quotient pairing `ℱ_{top−n} × ℱ_n`, rendered as rows of literals.
    #[serde(skip)]
    pub gram: Vec<DenseMatrix>,
    /// Left and right radicals agree in every degree (so the quotient pairing is perfect).
    pub nondegenerate: bool,
    /// `ω(xy) = ω(σ(y)x)` on all basis pairs, when a twist was supplied.
    pub twisted_cyclic: Option<bool>,
    /// `σ` preserves the relations of the ambient algebra.
    pub sigma_is_automorphism: Option<bool>,
}

/// Generic pairing analysis. `product(a, i, b, j)` multiplies basis element `i`
/// of degree `a` by basis element `j` of degree `b`; `omega` lists the values of
/// the functional on the basis of degree `top`.
fn pairing_analysis(
    f: FieldSpec,
    top: usize,
    dims: &[usize],
    product: &(dyn Fn(usize, usize, usize, usize) -> SVec + Sync),
    omega: &SVec,
) -> (Vec<usize>, Vec<usize>, Vec<DenseMatrix>, bool) {
    let grams: Vec<DenseMatrix> = (0..=top)
        .into_par_iter()
        .map(|n| {
            let rows = dims[top - n];
            let cols = dims[n];
            let mut g = DenseMatrix::zeros(f, rows, cols);
            for x in 0..rows {
                for y in 0..cols {
                    g.set(x, y, product(top - n, x, n, y).dot(omega, f));
                }
            }
            g
        })
        .collect();
    // right radical of G_n lives in degree n, left radical in degree top − n
    let right_rad: Vec<Subspace> = (0..=top)
        .map(|n| {
            let cols: Vec<SVec> = (0..dims[n]).map(|y| SVec::from_dense(&column(&grams[n], y))).collect();
            let ker = linalg::kernel(f, dims[top - n], &cols);
            Subspace::from_vectors(f, dims[n], &ker)
        })
        .collect();
    let left_rad: Vec<Subspace> = (0..=top)
        .map(|n| {
            let rows: Vec<SVec> = grams[n].row_svecs();
            let ker = linalg::kernel(f, dims[n], &rows);
            Subspace::from_vectors(f, dims[top - n], &ker)
        })
        .collect();
    let nondegenerate = (0..=top).all(|n| left_rad[n] == right_rad[top - n]);
    let ideal_dims: Vec<usize> = right_rad.iter().map(Subspace::dim).collect();
    let qdims: Vec<usize> = (0..=top).map(|n| dims[n] - ideal_dims[n]).collect();
    let reduced = grams.iter().map(invertible_core).collect();
    (ideal_dims, qdims, reduced, nondegenerate)
}

fn column(m: &DenseMatrix, j: usize) -> Vec<Scalar> {
    (0..m.nrows()).map(|i| m.get(i, j).clone()).collect()
}

/// The submatrix on a maximal independent set of rows and of columns (invertible).
fn invertible_core(m: &DenseMatrix) -> DenseMatrix {
    let f = m.field();
    let mut er = linalg::Echelon::new(f);
    let rows: Vec<usize> = (0..m.nrows()).filter(|&i| er.insert(&SVec::from_dense(m.row(i)))).collect();
    let mut ec = linalg::Echelon::new(f);
    let cols: Vec<usize> = (0..m.ncols()).filter(|&j| ec.insert(&SVec::from_dense(&column(m, j)))).collect();
    DenseMatrix::from_rows(f, rows.iter().map(|&i| cols.iter().map(|&j| m.get(i, j).clone()).collect()).collect())
}

impl Subspace {
    /// A subspace of a plain coordinate space `K^dim` (stored with `g = dim`, degree 1).
    pub fn from_vectors(f: FieldSpec, dim: usize, vs: &[SVec]) -> Subspace {
        Subspace::span(f, dim.max(1), 1, vs)
    }
}

/// `A^!` with enough degrees for the quotient constructions.
struct DualAlgebra {
    basis: GradedBasis,
}

impl DualAlgebra {
    fn new(p: &Presentation, nmax: usize, limits: Limits) -> Result<Self> {
        let dual = algebra::koszul_dual(p)?;
        Ok(DualAlgebra { basis: algebra::monomial_basis(&dual, nmax, limits)? })
    }

    fn product(&self, a: usize, i: usize, b: usize, j: usize) -> SVec {
        let f = self.basis.field();
        self.basis.multiply(a, &SVec::unit(i, f), b, &SVec::unit(j, f))
    }

    /// Values `W_u` on the normal words `u` of degree `m`.
    fn omega(&self, w: &MultilinearForm) -> SVec {
        let m = w.degree();
        let vals: Vec<Scalar> = self.basis.words(m).iter().map(|&u| w.vector().get(u).cloned().unwrap_or_else(|| w.field().zero())).collect();
        SVec::from_dense(&vals)
    }

    /// `σ(y)` for `y ∈ A^!_n`, with `σ(x*_ν) = Σ_μ Q^μ_ν x*_μ` extended multiplicatively.
    fn sigma(&self, q: &EndoMatrix, n: usize, y: &SVec) -> SVec {
        let lifted = self.basis.lift(n, y);
        let moved = tensor::apply_tensor_power(&lifted, self.basis.g(), n, q);
        self.basis.normal_form(n, &moved)
    }
}

/// `ℱ(w,N) = A^!/ℐ` with the pairing `(x, y) ↦ ω_w(xy)` and twisted cyclicity against `σ_w`.
pub fn frobenius_quotient_f(w: &MultilinearForm, n: usize, limits: Limits) -> Result<FrobeniusData> {
    let q = require_preregular(w)?;
    let p = algebra_from_form(w, n)?;
    let m = w.degree();
    let dual = DualAlgebra::new(&p, m, limits)?;
    let f = w.field();
    let dims: Vec<usize> = (0..=m).map(|k| dual.basis.dim(k)).collect();
    let omega = dual.omega(w);
    let prod = |a: usize, i: usize, b: usize, j: usize| dual.product(a, i, b, j);
    let (ideal_dims, qdims, gram, nondegenerate) = pairing_analysis(f, m, &dims, &prod, &omega);
    // ω(xy) = ω(σ(y)x) on all basis pairs
    let twisted = (0..=m).into_par_iter().all(|a| {
        let b = m - a;
        (0..dims[a]).all(|i| {
            (0..dims[b]).all(|j| {
                let lhs = dual.product(a, i, b, j).dot(&omega, f);
                let sy = dual.sigma(&q, b, &SVec::unit(j, f));
                let rhs = dual.basis.multiply(b, &sy, a, &SVec::unit(i, f)).dot(&omega, f);
                lhs == rhs
            })
        })
    });
    // σ_w preserves R^⊥: Q^{⊗N} R^⊥ ⊂ R^⊥
    let perp = p.relation_space(n).annihilator();
    let sigma_auto = perp.contains(&perp.image_under(&q)).unwrap_or(false);
    Ok(FrobeniusData {
        top: m,
        ambient_dims: dims,
        ideal_dims,
        dims: qdims,
        gram,
        nondegenerate,
        twisted_cyclic: Some(twisted),
        sigma_is_automorphism: Some(sigma_auto),
    })
}

/// The algebra `A'` with `A'_n = A^!_{ν(n)}` and its Frobenius analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct APrime {
    pub n: usize,
    /// Dimensions of `A'_0 … A'_{D+1}`.
    pub dims: Vec<usize>,
    /// Degree of the top nonzero component, if any within range.
    pub top: Option<usize>,
    /// `A'_D` is a line, `A'_{D+1} = 0`, and every pairing `A'_k × A'_{D−k}` is perfect.
    pub frobenius: bool,
    /// Dims of `ℱ' = A'/ℐ'` with `ℐ'` the radical of the pairing into `A'_D`.
    pub quotient: FrobeniusData,
    /// Odd-odd products vanish.
    pub odd_products_vanish: bool,
}

/// Builds `A'` for a homogeneous presentation and tests it for the Frobenius property
/// with top degree `d`.
pub fn aprime_algebra(p: &Presentation, d: usize, limits: Limits) -> Result<APrime> {
    let n = p.homogeneous_degree()?;
    let f = p.field();
    let maxdeg = nu(n, d + 1);
    let dual = DualAlgebra::new(p, maxdeg, limits)?;
    let dims: Vec<usize> = (0..=d + 1).map(|k| dual.basis.dim(nu(n, k))).collect();
    let top = (0..=d + 1).rev().find(|&k| dims[k] > 0);
    let prod = |a: usize, i: usize, b: usize, j: usize| -> SVec {
        let (na, nb) = (nu(n, a), nu(n, b));
        if na + nb != nu(n, a + b) {
            return SVec::new();
        }
        dual.product(na, i, nb, j)
    };
    // functional: the first basis vector of A'_D when that space is a line
    let omega = if dims[d] == 1 { SVec::unit(0, f) } else { SVec::new() };
    let (ideal_dims, qdims, gram, nondeg) = pairing_analysis(f, d, &dims[..=d], &prod, &omega);
    // the invertible core must be the whole Gram matrix
    let perfect = gram.iter().enumerate().all(|(k, g)| g.nrows() == dims[d - k] && g.ncols() == dims[k]);
    let frobenius = dims[d] == 1 && dims[d + 1] == 0 && ideal_dims.iter().all(|&x| x == 0) && nondeg && perfect;
    let odd = (0..=d).filter(|k| k % 2 == 1).all(|a| {
        (0..=d - a).filter(|b| b % 2 == 1).all(|b| {
            (0..dims[a]).all(|i| (0..dims[b]).all(|j| prod(a, i, b, j).is_zero()))
        })
    });
    Ok(APrime {
        n,
        dims,
        top,
        frobenius,
        quotient: FrobeniusData {
            top: d,
            ambient_dims: (0..=d).map(|k| dual.basis.dim(nu(n, k))).collect(),
            ideal_dims,
            dims: qdims,
            gram,
            nondegenerate: nondeg,
            twisted_cyclic: None,
            sigma_is_automorphism: None,
        },
        odd_products_vanish: odd,
    })
}

/// Combined verdict of the Koszul-Gorenstein certification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularityVerdict {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub cutoff: usize,
    pub shape_ok: bool,
    /// `W_{ν(k)} = A^!*_{ν(k)}` for `k ≤ D` (and `A^!*` vanishes beyond).
    pub w_equals_dual: Vec<bool>,
    pub dims_w: Vec<usize>,
    pub dims_dual: Vec<usize>,
    pub palindromic: bool,
    pub aprime_frobenius: bool,
    pub cwd: CwdTable,
    pub hilbert: HilbertSeries,
    pub passed: bool,
}

pub fn check_koszul_gorenstein(w: &MultilinearForm, n: usize, d: usize, t_max: usize, limits: Limits) -> Result<RegularityVerdict> {
    let m = w.degree();
    kgd_shape_validate(m, n, d)?;
    let p = algebra_from_form(w, n)?;
    let basis = algebra::monomial_basis(&p, t_max, limits)?;
    let hilbert = basis.dims();
    let cwd = CwdComplex::with_basis(w, n, d, p.clone(), basis);
    let table = cwd.table(t_max)?;
    let duals = koszul::dual_components(&p, nu(n, d + 1), limits)?;
    let ws = w_spaces_unchecked(w, n);
    let w_equals_dual: Vec<bool> = (0..=d)
        .map(|k| {
            let deg = nu(n, k);
            ws[deg] == duals[deg]
        })
        .chain(std::iter::once(duals[nu(n, d + 1)].is_zero()))
        .collect();
    let dims_w: Vec<usize> = (0..=d).map(|k| ws[nu(n, k)].dim()).collect();
    let dims_dual: Vec<usize> = (0..=d).map(|k| duals[nu(n, k)].dim()).collect();
    let palindromic = (0..=d).all(|k| dims_w[k] == dims_w[d - k]);
    let ap = aprime_algebra(&p, d, limits)?;
    let passed = table.acyclic() && w_equals_dual.iter().all(|&b| b) && ap.frobenius && palindromic;
    Ok(RegularityVerdict {
        m,
        n,
        d,
        cutoff: t_max,
        shape_ok: true,
        w_equals_dual,
        dims_w,
        dims_dual,
        palindromic,
        aprime_frobenius: ap.frobenius,
        cwd: table,
        hilbert,
        passed,
    })
}

/// Presentation-level Gorenstein probe for a homogeneous algebra: Koszulity of `A`
/// up to the cutoff, and the Frobenius property of `A'` with `D` read off from the
/// last nonzero dual component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresentationGorenstein {
    pub koszul_up_to_cutoff: bool,
    pub dual_dims: Vec<usize>,
    pub d: Option<usize>,
    pub resolution_dims: Vec<usize>,
    pub palindromic: bool,
    pub aprime_frobenius: bool,
    pub gorenstein: bool,
}

pub fn presentation_gorenstein(p: &Presentation, t_max: usize, limits: Limits) -> Result<PresentationGorenstein> {
    let n = p.homogeneous_degree()?;
    let ctx = KoszulContext::new(p, t_max, limits)?;
    let kz = koszul::koszulity_check(&ctx, t_max)?;
    let dual_dims: Vec<usize> = (0..=t_max).map(|k| ctx.dual_dim(k)).collect();
    // D = last position k with A^!*_{ν(k)} ≠ 0 inside the computed range
    let mut d = None;
    let mut k = 0;
    while nu(n, k) <= t_max {
        if ctx.dual_dim(nu(n, k)) > 0 {
            d = Some(k);
        }
        k += 1;
    }
    let bounded = nu(n, k) > t_max && d.is_some_and(|dd| nu(n, dd + 1) <= t_max);
    let (resolution_dims, palindromic, aprime_frobenius) = match d {
        Some(dd) if bounded => {
            let dims: Vec<usize> = (0..=dd).map(|k| ctx.dual_dim(nu(n, k))).collect();
            let pal = (0..=dd).all(|k| dims[k] == dims[dd - k]);
            let ap = aprime_algebra(p, dd, limits)?;
            (dims, pal, ap.frobenius)
        }
        _ => (Vec::new(), false, false),
    };
    let gorenstein = kz.koszul_up_to_cutoff() && palindromic && aprime_frobenius;
    Ok(PresentationGorenstein {
        koszul_up_to_cutoff: kz.koszul_up_to_cutoff(),
        dual_dims,
        d: if bounded { d } else { None },
        resolution_dims,
        palindromic,
        aprime_frobenius,
        gorenstein,
    })
}

/// Both sides of the equivalence between `A^!*_{N+1} = K·w` and 3-regularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThreeRegularEquivalence {
    pub cond_a: bool,
    pub cond_c: bool,
    pub agree: bool,
}

pub fn three_regular_equivalence(w: &MultilinearForm, n: usize, limits: Limits) -> Result<ThreeRegularEquivalence> {
    if w.degree() != n + 1 {
        return Err(RegularityError::ShapeError(format!("need m = N+1, got m={}, N={n}", w.degree())));
    }
    let p = algebra_from_form(w, n)?;
    let top = koszul::dual_component(&p, n + 1, limits)?.space;
    let line = Subspace::span(w.field(), w.g(), n + 1, &[w.vector().clone()]);
    let cond_a = top == line;
    let cond_c = tensor::is_3_regular(w, n)?.passed;
    Ok(ThreeRegularEquivalence { cond_a, cond_c, agree: cond_a == cond_c })
}

// ---------------------------------------------------------------------------
// dimension 2

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Dim2Class {
    /// Antisymmetric form: the polynomial algebra in two variables.
    Polynomial,
    /// Symmetric part of rank 1.
    Jordanian,
    /// Symmetric part of rank 2; the invariant is the characteristic polynomial of `Q_b`.
    Manin { q_charpoly: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dim2Analysis {
    pub regular: bool,
    pub dims: HilbertSeries,
    pub series_match: bool,
    pub symmetric_rank: usize,
    pub classification: Option<Dim2Class>,
    pub koszul_up_to_cutoff: bool,
    /// For degenerate forms: `"D=2"` or `"D=inf"` (symmetric rank-one form).
    pub degenerate_branch: Option<String>,
    /// Degenerate symmetric rank-one branch: every dual component up to the cutoff is nonzero.
    pub dual_nonzero_to_cutoff: Option<bool>,
}

pub fn bilinear_matrix(b: &MultilinearForm) -> DenseMatrix {
    let g = b.g();
    let f = b.field();
    DenseMatrix::from_rows(f, (0..g).map(|i| (0..g).map(|j| b.component(&[i, j])).collect()).collect())
}

pub fn dim2_analyze(b: &MultilinearForm, cutoff: usize, limits: Limits) -> Result<Dim2Analysis> {
    if b.degree() != 2 {
        return Err(RegularityError::NotBilinear(b.degree()));
    }
    let (g, f) = (b.g(), b.field());
    let bm = bilinear_matrix(b);
    let regular = !bm.det().is_zero();
    let relation = Presentation::homogeneous(f, g, 2, &[b.vector().clone()], "A(b,2)")?;
    let dims = algebra::dims(&relation, cutoff, limits)?;
    let reference = algebra::reference_series(2, g, 2, cutoff)?;
    let series_match = dims == reference;
    let sym = bm.add(&bm.transpose());
    let symmetric_rank = sym.rank();
    let classification = if g == 2 && regular {
        Some(match symmetric_rank {
            0 => Dim2Class::Polynomial,
            1 => Dim2Class::Jordanian,
            _ => {
                let qb = bm.inverse().ok_or(RegularityError::SingularMatrix)?.transpose().mul(&bm);
                Dim2Class::Manin { q_charpoly: qb.charpoly().iter().map(Scalar::to_string).collect() }
            }
        })
    } else {
        None
    };
    let ctx = KoszulContext::new(&relation, cutoff, limits)?;
    let koszul_up_to_cutoff = koszul::koszulity_check(&ctx, cutoff)?.koszul_up_to_cutoff();
    let (degenerate_branch, dual_nonzero_to_cutoff) = if regular {
        (None, None)
    } else {
        let sym_rank_one = bm == bm.transpose() && bm.rank() == 1;
        if sym_rank_one {
            (Some("D=inf".to_string()), Some((0..=cutoff).all(|k| ctx.dual_dim(k) > 0)))
        } else {
            (Some("D=2".to_string()), None)
        }
    };
    Ok(Dim2Analysis {
        regular,
        dims,
        series_match,
        symmetric_rank,
        classification,
        koszul_up_to_cutoff,
        degenerate_branch,
        dual_nonzero_to_cutoff,
    })
}

/// Orbit check: equal Hilbert series and conjugated twisting matrices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitConsistency {
    pub dims_equal: bool,
    pub q_conjugated: bool,
    pub dims: HilbertSeries,
}

pub fn orbit_consistency(w: &MultilinearForm, l: &EndoMatrix, n: usize, t_max: usize, limits: Limits) -> Result<OrbitConsistency> {
    let linv = l.inverse().ok_or(RegularityError::SingularMatrix)?;
    let q = require_preregular(w)?;
    let wl = tensor::gl_action(w, l);
    let ql = require_preregular(&wl)?;
    let d1 = algebra::dims(&algebra_from_form(w, n)?, t_max, limits)?;
    let d2 = algebra::dims(&algebra_from_form(&wl, n)?, t_max, limits)?;
    Ok(OrbitConsistency { dims_equal: d1 == d2, q_conjugated: ql == linv.mul(&q).mul(l), dims: d1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tensor_from_words;

    fn lim() -> Limits {
        Limits::default()
    }

    fn fp() -> FieldSpec {
        FieldSpec::prime(1_000_003).unwrap()
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
    fn shapes() {
        assert!(kgd_shape_validate(4, 3, 3).is_ok());
        assert!(kgd_shape_validate(4, 2, 4).is_ok());
        assert!(kgd_shape_validate(5, 3, 3).is_err());
        assert!(kgd_shape_validate(3, 2, 4).is_err());
        assert_eq!((0..6).map(|k| nu(3, k)).collect::<Vec<_>>(), vec![0, 1, 3, 4, 6, 7]);
    }

    #[test]
    fn quantum_plane_relation() {
        let f = FieldSpec::Rationals;
        let b = bilinear(f, &[&[0, -1], &[5, 0]]);
        let p = algebra_from_form(&b, 2).unwrap();
        let expect = Subspace::span(f, 2, 2, &[tensor_from_words(f, 2, &[(1, "xy"), (-5, "yx")])]);
        assert_eq!(p.relation_space(2), expect);
    }

    #[test]
    fn polynomial_algebra_from_epsilon() {
        let f = fp();
        let e = tensor::levi_civita(f, 3);
        let ws = w_spaces(&e, 2).unwrap();
        assert_eq!(ws.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![1, 3, 3, 1]);
        let v = check_koszul_gorenstein(&e, 2, 3, 5, lim()).unwrap();
        assert!(v.passed, "{v:?}");
        assert_eq!(v.hilbert.0, vec![1, 3, 6, 10, 15, 21]);
        let eq = three_regular_equivalence(&e, 2, lim()).unwrap();
        assert!(eq.cond_a && eq.cond_c && eq.agree);
    }

    #[test]
    fn exterior_frobenius_quotient() {
        let f = fp();
        let e = tensor::levi_civita(f, 4);
        let fr = frobenius_quotient_f(&e, 3, lim()).unwrap();
        assert_eq!(fr.dims, vec![1, 4, 6, 4, 1]);
        assert!(fr.nondegenerate);
        assert_eq!(fr.twisted_cyclic, Some(true));
        for (n, g) in fr.gram.iter().enumerate() {
            assert!(g.is_square() && g.nrows() == fr.dims[n] && g.is_invertible());
        }
    }

    #[test]
    fn epsilon_n3_certified() {
        let f = fp();
        let e = tensor::levi_civita(f, 4);
        let v = check_koszul_gorenstein(&e, 3, 3, 6, lim()).unwrap();
        assert!(v.passed, "{v:?}");
        let ap = aprime_algebra(&algebra_from_form(&e, 3).unwrap(), 3, lim()).unwrap();
        assert!(ap.frobenius && ap.odd_products_vanish);
    }

    #[test]
    fn dim2_cases() {
        let f = FieldSpec::Rationals;
        let a = dim2_analyze(&bilinear(f, &[&[0, -1], &[1, 0]]), 6, lim()).unwrap();
        assert!(a.regular && a.series_match && a.koszul_up_to_cutoff);
        assert_eq!(a.classification, Some(Dim2Class::Polynomial));
        let j = dim2_analyze(&bilinear(f, &[&[0, -1], &[1, 1]]), 6, lim()).unwrap();
        assert_eq!(j.classification, Some(Dim2Class::Jordanian));
        let m = dim2_analyze(&bilinear(f, &[&[0, -1], &[3, 0]]), 6, lim()).unwrap();
        assert!(matches!(m.classification, Some(Dim2Class::Manin { .. })));
        let d = dim2_analyze(&bilinear(f, &[&[1, 0], &[0, 0]]), 6, lim()).unwrap();
        assert!(!d.regular);
        assert_eq!(d.degenerate_branch.as_deref(), Some("D=inf"));
        assert_eq!(d.dual_nonzero_to_cutoff, Some(true));
        assert!(d.koszul_up_to_cutoff);
    }

    #[test]
    fn orbit_with_identity() {
        let f = fp();
        let e = tensor::levi_civita(f, 3);
        let o = orbit_consistency(&e, &DenseMatrix::identity(f, 3), 2, 4, lim()).unwrap();
        assert!(o.dims_equal && o.q_conjugated);
        let l = DenseMatrix::from_i64(f, &[&[1, 2, 0], &[0, 1, 3], &[4, 0, 1]]);
        let o = orbit_consistency(&e, &l, 2, 4, lim()).unwrap();
        assert!(o.dims_equal && o.q_conjugated);
    }
}
