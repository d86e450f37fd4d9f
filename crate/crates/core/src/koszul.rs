//! Dual component spaces `A^!*_n ⊂ E^{⊗n}`, the Koszul N-complex, its
//! contractions, and the bimodule and small complexes built from them.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{self, AlgebraError, GradedBasis, Limits, Presentation};
use crate::linalg::{Echelon, SVec, SparseMatrix};
use crate::scalar::FieldSpec;
use crate::tensor::{gpow, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KoszulError {
    #[error("contraction indices must satisfy 0 <= r < p <= N-1 (got p={p}, r={r}, N={n})")]
    BadContractionIndices { p: usize, r: usize, n: usize },
    #[error("degree {requested} is beyond the prepared cutoff {cutoff}")]
    BeyondCutoff { requested: usize, cutoff: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `A^!*_n`: the intersection of all placements of `R` in `E^{⊗n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualComponent {
    pub n: usize,
    pub space: Subspace,
}

/// Computes `A^!*_0 … A^!*_nmax` via `A^!*_n = (A^!*_{n−1} ⊗ E) ∩ (E^{⊗(n−N)} ⊗ R)`.
pub fn dual_components(p: &Presentation, nmax: usize, limits: Limits) -> Result<Vec<Subspace>, KoszulError> {
    let n_rel = p.homogeneous_degree()?;
    let (g, f) = (p.g(), p.field());
    let r = p.relation_space(n_rel);
    let mut out: Vec<Subspace> = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        if n < n_rel {
            limits.check(n, gpow(g, n))?;
            out.push(Subspace::full(f, g, n));
            continue;
        }
        if n == n_rel {
            out.push(r.clone());
            continue;
        }
        let prev = &out[n - 1];
        if prev.is_zero() {
            out.push(Subspace::zero(f, g, n));
            continue;
        }
        limits.check(n, gpow(g, n))?;
        let a = prev.tensor_right(1);
        let b = r.tensor_left(n - n_rel);
        out.push(a.intersect(&b).map_err(AlgebraError::from)?);
    }
    Ok(out)
}

pub fn dual_component(p: &Presentation, n: usize, limits: Limits) -> Result<DualComponent, KoszulError> {
    let mut all = dual_components(p, n, limits)?;
    Ok(DualComponent { n, space: all.pop().unwrap() })
}

/// One total-degree slice of a chain complex (or N-complex) of finite-dimensional spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexSlice {
    pub field: FieldSpec,
    pub total_degree: usize,
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    /// `maps[k] : C_{k+1} → C_k`.
    pub maps: Vec<SparseMatrix>,
}

impl ComplexSlice {
    /// Whether every composite of `step` consecutive maps vanishes.
    pub fn composites_vanish(&self, step: usize) -> bool {
        if step == 0 || self.maps.len() < step {
            return true;
        }
        (0..=self.maps.len() - step).all(|k| {
            let mut acc = self.maps[k].clone();
            for j in 1..step {
                acc = acc.compose(&self.maps[k + j]);
            }
            acc.is_zero()
        })
    }

    /// `dim H_k` for every position, via two ranks per position.
    pub fn homology_dims(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.maps.par_iter().map(SparseMatrix::rank).collect();
        (0..self.dims.len())
            .map(|k| {
                let out = if k >= 1 { ranks[k - 1] } else { 0 };
                let inc = ranks.get(k).copied().unwrap_or(0);
                self.dims[k] - out - inc
            })
            .collect()
    }

    /// A cycle at position `k` that is not a boundary, if any.
    pub fn homology_witness(&self, k: usize) -> Option<SVec> {
        let f = self.field;
        let cycles = if k == 0 {
            (0..self.dims[0]).map(|i| SVec::unit(i, f)).collect()
        } else {
            self.maps[k - 1].kernel()
        };
        let mut e = Echelon::new(f);
        if let Some(m) = self.maps.get(k) {
            e.extend(&m.cols);
        }
        cycles.into_iter().find(|z| e.insert(z))
    }

    /// Alternating sum of dimensions.
    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().enumerate().map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }
}

/// Everything needed to assemble Koszul-type complexes up to a total degree.
#[derive(Debug, Clone)]
pub struct KoszulContext {
    pub presentation: Presentation,
    pub n: usize,
    pub cutoff: usize,
    pub basis: GradedBasis,
    pub duals: Vec<Subspace>,
    /// `left[n][j][λ]`: coordinates in `A^!*_{n−1}` of the `λ`-th left slice of basis vector `j` of `A^!*_n`.
    left: Vec<Vec<Vec<SVec>>>,
    right: Vec<Vec<Vec<SVec>>>,
}

impl KoszulContext {
    pub fn new(p: &Presentation, cutoff: usize, limits: Limits) -> Result<Self, KoszulError> {
        let n = p.homogeneous_degree()?;
        let basis = algebra::monomial_basis(p, cutoff, limits)?;
        let duals = dual_components(p, cutoff, limits)?;
        Ok(Self::from_parts(p.clone(), n, basis, duals))
    }

    pub fn from_parts(presentation: Presentation, n: usize, basis: GradedBasis, duals: Vec<Subspace>) -> Self {
        let cutoff = basis.max_degree().min(duals.len() - 1);
        let g = presentation.g();
        let mut left = vec![Vec::new()];
        let mut right = vec![Vec::new()];
        for d in 1..=cutoff {
            let prev = &duals[d - 1];
            let w = gpow(g, d - 1);
            let (l, r): (Vec<Vec<SVec>>, Vec<Vec<SVec>>) = duals[d]
                .basis()
                .par_iter()
                .map(|v| {
                    let l = (0..g).map(|lam| SVec::from_dense(&prev.coordinates(&v.window(lam * w, (lam + 1) * w)))).collect();
                    let r = (0..g)
                        .map(|lam| {
                            let part = SVec::from_sorted(
                                v.iter().filter(|(c, _)| c % g == lam).map(|(c, s)| (c / g, s.clone())).collect(),
                            );
                            SVec::from_dense(&prev.coordinates(&part))
                        })
                        .collect();
                    (l, r)
                })
                .unzip();
            left.push(l);
            right.push(r);
        }
        KoszulContext { presentation, n, cutoff, basis, duals, left, right }
    }

    pub fn field(&self) -> FieldSpec {
        self.presentation.field()
    }

    pub fn g(&self) -> usize {
        self.presentation.g()
    }

    pub fn dual_dim(&self, n: usize) -> usize {
        self.duals.get(n).map_or(0, Subspace::dim)
    }

    fn check(&self, t: usize) -> Result<(), KoszulError> {
        if t > self.cutoff {
            return Err(KoszulError::BeyondCutoff { requested: t, cutoff: self.cutoff });
        }
        Ok(())
    }

    /// `d : A_{t−n} ⊗ A^!*_n → A_{t−n+1} ⊗ A^!*_{n−1}`, `a ⊗ v ↦ Σ_λ a x^λ ⊗ v_λ`.
    fn d_step(&self, t: usize, n: usize) -> SparseMatrix {
        let f = self.field();
        let g = self.g();
        let a = t - n;
        let k_src = self.dual_dim(n);
        let k_dst = self.dual_dim(n - 1);
        let rows = self.basis.dim(a + 1) * k_dst;
        let cols: Vec<SVec> = (0..self.basis.dim(a) * k_src)
            .into_par_iter()
            .map(|c| {
                let (i, j) = (c / k_src, c % k_src);
                let mut pairs = Vec::new();
                for lam in 0..g {
                    let prod = self.basis.mul_letter(a, &SVec::unit(i, f), lam);
                    for (pp, x) in prod.iter() {
                        for (q, y) in self.left[n][j][lam].iter() {
                            pairs.push((pp * k_dst + q, x * y));
                        }
                    }
                }
                SVec::from_pairs(pairs)
            })
            .collect();
        SparseMatrix::from_cols(f, rows, cols)
    }

    /// The Koszul N-complex at total degree `t`: positions `n = 0…t`, `C_n = A_{t−n} ⊗ A^!*_n`.
    pub fn ncomplex_slice(&self, t: usize) -> Result<ComplexSlice, KoszulError> {
        self.check(t)?;
        let dims = (0..=t).map(|n| self.basis.dim(t - n) * self.dual_dim(n)).collect();
        let labels = (0..=t).map(|n| format!("A_{}⊗A!*_{}", t - n, n)).collect();
        let maps = (1..=t).into_par_iter().map(|n| self.d_step(t, n)).collect();
        Ok(ComplexSlice { field: self.field(), total_degree: t, labels, dims, maps })
    }

    /// Dual degree at homological position `j` of the contraction `C_{p,r}`.
    pub fn contraction_degree(&self, p: usize, r: usize, j: usize) -> usize {
        self.n * (j / 2) + r + if j % 2 == 1 { self.n - p } else { 0 }
    }

    /// The contraction `C_{p,r}` of the N-complex: alternating powers `d^{N−p}` and `d^p`.
    pub fn contraction(&self, p: usize, r: usize, t: usize) -> Result<ComplexSlice, KoszulError> {
        if !(r < p && p < self.n) {
            return Err(KoszulError::BadContractionIndices { p, r, n: self.n });
        }
        let full = self.ncomplex_slice(t)?;
        let mut positions = Vec::new();
        let mut j = 0;
        while self.contraction_degree(p, r, j) <= t {
            positions.push(self.contraction_degree(p, r, j));
            j += 1;
        }
        let dims = positions.iter().map(|&n| full.dims[n]).collect();
        let labels = positions.iter().map(|&n| full.labels[n].clone()).collect();
        let maps = positions
            .windows(2)
            .map(|w| {
                // d^{w1−w0} from C_{w1} down to C_{w0}
                let mut acc = full.maps[w[0]].clone();
                for n in w[0] + 1..w[1] {
                    acc = acc.compose(&full.maps[n]);
                }
                acc
            })
            .collect();
        Ok(ComplexSlice { field: self.field(), total_degree: t, labels, dims, maps })
    }

    /// The Koszul complex `C_{N−1,0}` at total degree `t`.
    pub fn koszul_complex(&self, t: usize) -> Result<ComplexSlice, KoszulError> {
        self.contraction(self.n - 1, 0, t)
    }

    /// Positions of the bimodule complex: `⊕_{a+b = t−ν} A_a ⊗ A^!*_ν ⊗ A_b`.
    fn bimodule_layout(&self, t: usize, nu: usize) -> Vec<(usize, usize)> {
        // (a, offset) per block
        let k = self.dual_dim(nu);
        let mut off = 0;
        let mut out = Vec::new();
        if nu > t {
            return out;
        }
        for a in 0..=t - nu {
            out.push((a, off));
            off += self.basis.dim(a) * k * self.basis.dim(t - nu - a);
        }
        out.push((usize::MAX, off));
        out
    }

    fn layout_dim(layout: &[(usize, usize)]) -> usize {
        layout.last().map_or(0, |l| l.1)
    }

    /// `d_L` (`left = true`) or `d_R` on `A ⊗ A^!*_n ⊗ A` at total degree `t`.
    fn bimodule_step(&self, t: usize, n: usize, left: bool) -> SparseMatrix {
        let f = self.field();
        let g = self.g();
        let src = self.bimodule_layout(t, n);
        let dst = self.bimodule_layout(t, n - 1);
        let (ks, kd) = (self.dual_dim(n), self.dual_dim(n - 1));
        let mut cols = Vec::with_capacity(Self::layout_dim(&src));
        for &(a, _) in &src[..src.len().saturating_sub(1)] {
            let b = t - n - a;
            let (da, db) = (self.basis.dim(a), self.basis.dim(b));
            // destination block: left → (a+1, b), right → (a, b+1)
            let (a2, b2) = if left { (a + 1, b) } else { (a, b + 1) };
            let off2 = dst[a2].1;
            let db2 = self.basis.dim(b2);
            let block: Vec<SVec> = (0..da * ks * db)
                .into_par_iter()
                .map(|c| {
                    let i = c / (ks * db);
                    let j = (c / db) % ks;
                    let l = c % db;
                    let mut pairs = Vec::new();
                    for lam in 0..g {
                        let (xa, xb, split) = if left {
                            (
                                self.basis.mul_letter(a, &SVec::unit(i, f), lam),
                                SVec::unit(l, f),
                                &self.left[n][j][lam],
                            )
                        } else {
                            (
                                SVec::unit(i, f),
                                self.basis.left_letter(b, lam, &SVec::unit(l, f)),
                                &self.right[n][j][lam],
                            )
                        };
                        for (p, x) in xa.iter() {
                            for (q, y) in split.iter() {
                                let xy = x * y;
                                for (r, z) in xb.iter() {
                                    pairs.push((off2 + (p * kd + q) * db2 + r, &xy * z));
                                }
                            }
                        }
                    }
                    SVec::from_pairs(pairs)
                })
                .collect();
            cols.extend(block);
        }
        SparseMatrix::from_cols(f, Self::layout_dim(&dst), cols)
    }

    /// The bimodule Koszul complex at total degree `t`, positions `j` with `A^!*_{ν_N(j)}` in the middle.
    pub fn bimodule_slice(&self, t: usize) -> Result<ComplexSlice, KoszulError> {
        self.check(t)?;
        self.two_sided_slice(t, |n, left| self.bimodule_step(t, n, left), |nu| {
            Self::layout_dim(&self.bimodule_layout(t, nu))
        }, "A⊗A!*⊗A")
    }

    /// `δ_L` or `δ_R` on `A ⊗ A^!*_n` (coefficients `M = A`) at total degree `t`:
    /// `m ⊗ v ↦ Σ m x^λ ⊗ v_λ` or `Σ x^λ m ⊗ v'_λ`.
    fn small_step(&self, t: usize, n: usize, left: bool) -> SparseMatrix {
        let f = self.field();
        let g = self.g();
        let a = t - n;
        let (ks, kd) = (self.dual_dim(n), self.dual_dim(n - 1));
        let cols: Vec<SVec> = (0..self.basis.dim(a) * ks)
            .into_par_iter()
            .map(|c| {
                let (i, j) = (c / ks, c % ks);
                let mut pairs = Vec::new();
                for lam in 0..g {
                    let unit = SVec::unit(i, f);
                    let (prod, split) = if left {
                        (self.basis.mul_letter(a, &unit, lam), &self.left[n][j][lam])
                    } else {
                        (self.basis.left_letter(a, lam, &unit), &self.right[n][j][lam])
                    };
                    for (p, x) in prod.iter() {
                        for (q, y) in split.iter() {
                            pairs.push((p * kd + q, x * y));
                        }
                    }
                }
                SVec::from_pairs(pairs)
            })
            .collect();
        SparseMatrix::from_cols(f, self.basis.dim(a + 1) * kd, cols)
    }

    /// The small complex with coefficients in `A` at total degree `t`.
    pub fn small_slice(&self, t: usize) -> Result<ComplexSlice, KoszulError> {
        self.check(t)?;
        self.two_sided_slice(t, |n, left| self.small_step(t, n, left), |nu| {
            if nu > t {
                0
            } else {
                self.basis.dim(t - nu) * self.dual_dim(nu)
            }
        }, "A⊗A!*")
    }

    /// Assembles `δ'`: `d_L − d_R` out of odd positions, `Σ_p d_L^p d_R^{N−1−p}` out of even ones.
    fn two_sided_slice(
        &self,
        t: usize,
        step: impl Fn(usize, bool) -> SparseMatrix + Sync,
        dim_at: impl Fn(usize) -> usize,
        name: &str,
    ) -> Result<ComplexSlice, KoszulError> {
        let nn = self.n;
        let nu = |j: usize| nn * (j / 2) + (j % 2);
        let mut positions = Vec::new();
        let mut j = 0;
        while nu(j) <= t {
            positions.push(nu(j));
            j += 1;
        }
        let dims: Vec<usize> = positions.iter().map(|&n| dim_at(n)).collect();
        let labels = positions.iter().map(|n| format!("{name}_{n}")).collect();
        let maxdeg = *positions.last().unwrap();
        let dl: Vec<SparseMatrix> = (1..=maxdeg).into_par_iter().map(|n| step(n, true)).collect();
        let dr: Vec<SparseMatrix> = (1..=maxdeg).into_par_iter().map(|n| step(n, false)).collect();
        let mut maps = Vec::new();
        for (idx, w) in positions.windows(2).enumerate() {
            let (lo, hi) = (w[0], w[1]);
            // source position idx+1 is odd exactly when idx is even
            if idx % 2 == 0 {
                maps.push(dl[hi - 1].sub(&dr[hi - 1]));
            } else {
                let s = hi - lo;
                let mut acc: Option<SparseMatrix> = None;
                for pl in 0..=s {
                    // d_L^{pl} d_R^{s−pl}: first s−pl right steps from hi, then pl left steps
                    let mut m: Option<SparseMatrix> = None;
                    let mut deg = hi;
                    for k in 0..s {
                        let use_left = k >= s - pl;
                        let st = if use_left { &dl[deg - 1] } else { &dr[deg - 1] };
                        m = Some(match m {
                            None => st.clone(),
                            Some(prev) => st.compose(&prev),
                        });
                        deg -= 1;
                    }
                    let m = m.unwrap();
                    acc = Some(match acc {
                        None => m,
                        Some(a) => a.add(&m),
                    });
                }
                maps.push(acc.unwrap());
            }
        }
        Ok(ComplexSlice { field: self.field(), total_degree: t, labels, dims, maps })
    }
}

/// Homology table and verdict of the truncated Koszulity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KoszulityReport {
    pub cutoff: usize,
    /// `homology[t]` lists `dim H_k` for `k = 0, 1, …` at total degree `t ≥ 1`.
    pub homology: Vec<(usize, Vec<usize>)>,
    /// `(t, k, dim)` of the first nonzero homology at a positive position.
    pub first_failure: Option<(usize, usize, usize)>,
}

impl KoszulityReport {
    pub fn koszul_up_to_cutoff(&self) -> bool {
        self.first_failure.is_none()
    }
}

pub fn koszulity_check(ctx: &KoszulContext, t_max: usize) -> Result<KoszulityReport, KoszulError> {
    ctx.check(t_max)?;
    let homology: Vec<(usize, Vec<usize>)> = (1..=t_max)
        .into_par_iter()
        .map(|t| ctx.koszul_complex(t).map(|s| (t, s.homology_dims())))
        .collect::<Result<_, _>>()?;
    let first_failure = homology
        .iter()
        .flat_map(|(t, h)| h.iter().enumerate().filter(|(_, &d)| d != 0).map(move |(k, &d)| (*t, k, d)))
        .next();
    Ok(KoszulityReport { cutoff: t_max, homology, first_failure })
}

/// Truncated product `P_A(t) · Q_A(t)` where `Q_A(t) = Σ (a^!_{Nn} t^{Nn} − a^!_{Nn+1} t^{Nn+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsknReport {
    pub passed: bool,
    pub product: Vec<i64>,
}

pub fn pskn_series(a_dims: &[u64], dual_dims: &[u64], n: usize) -> PsknReport {
    let len = a_dims.len().min(dual_dims.len());
    let mut q = vec![0i64; len];
    for (k, slot) in q.iter_mut().enumerate() {
        if k % n == 0 {
            *slot = dual_dims[k] as i64;
        } else if k % n == 1 {
            *slot = -(dual_dims[k] as i64);
        }
    }
    let product: Vec<i64> = (0..len).map(|k| (0..=k).map(|i| a_dims[i] as i64 * q[k - i]).sum()).collect();
    let passed = product.iter().enumerate().all(|(k, &c)| c == if k == 0 { 1 } else { 0 });
    PsknReport { passed, product }
}

pub fn pskn_check(p: &Presentation, t_max: usize, limits: Limits) -> Result<PsknReport, KoszulError> {
    let n = p.homogeneous_degree()?;
    let a = algebra::dims(p, t_max, limits)?;
    let d = algebra::dims(&algebra::koszul_dual(p)?, t_max, limits)?;
    Ok(pskn_series(&a.0, &d.0, n))
}

/// Matrix export helper for slices: `# map k` headers followed by triplets.
pub fn slice_to_text(s: &ComplexSlice) -> String {
    let mut out = String::new();
    for (k, m) in s.maps.iter().enumerate() {
        out.push_str(&format!("# map {} -> {} ({} -> {})\n", k + 1, k, s.labels[k + 1], s.labels[k]));
        out.push_str(&m.to_triplet_text());
    }
    out
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

    fn polynomial(f: FieldSpec, g: usize) -> Presentation {
        let mut rels = Vec::new();
        let letters = ["x", "y", "z", "w"];
        for i in 0..g {
            for j in i + 1..g {
                let ij = format!("{}{}", letters[i], letters[j]);
                let ji = format!("{}{}", letters[j], letters[i]);
                rels.push(tensor_from_words(f, g, &[(1, &ij), (-1, &ji)]));
            }
        }
        Presentation::homogeneous(f, g, 2, &rels, "poly").unwrap()
    }

    fn x_squared(f: FieldSpec) -> Presentation {
        Presentation::homogeneous(f, 2, 2, &[tensor_from_words(f, 2, &[(1, "xx")])], "x^2").unwrap()
    }

    #[test]
    fn dual_components_of_polynomial_ring() {
        let f = fp();
        let p = polynomial(f, 3);
        let d = dual_components(&p, 4, lim()).unwrap();
        let dims: Vec<usize> = d.iter().map(Subspace::dim).collect();
        assert_eq!(dims, vec![1, 3, 3, 1, 0]);
        assert_eq!(d[2], p.relation_space(2));
        let x = dual_components(&x_squared(f), 5, lim()).unwrap();
        for (n, s) in x.iter().enumerate().skip(2) {
            assert_eq!(s.dim(), 1);
            assert_eq!(s.basis()[0], SVec::unit(0, f), "degree {n}");
        }
    }

    #[test]
    fn koszul_complex_of_polynomial_ring_is_exact() {
        let f = fp();
        let ctx = KoszulContext::new(&polynomial(f, 3), 5, lim()).unwrap();
        for t in 0..=5 {
            let s = ctx.ncomplex_slice(t).unwrap();
            assert!(s.composites_vanish(2));
        }
        let r = koszulity_check(&ctx, 5).unwrap();
        assert!(r.koszul_up_to_cutoff(), "{r:?}");
        assert_eq!(ctx.koszul_complex(3).unwrap(), ctx.ncomplex_slice(3).unwrap());
    }

    #[test]
    fn x_squared_is_koszul() {
        let ctx = KoszulContext::new(&x_squared(fp()), 6, lim()).unwrap();
        assert!(koszulity_check(&ctx, 6).unwrap().koszul_up_to_cutoff());
    }

    #[test]
    fn cubic_ncomplex_and_contractions() {
        let f = fp();
        // a cubic algebra: x^2 y = y x^2, x y^2 = y^2 x (cubic Artin-Schelter type)
        let p = Presentation::homogeneous(
            f,
            2,
            3,
            &[
                tensor_from_words(f, 2, &[(1, "xxy"), (-1, "yxx")]),
                tensor_from_words(f, 2, &[(1, "xyy"), (-1, "yyx")]),
            ],
            "cubic",
        )
        .unwrap();
        let ctx = KoszulContext::new(&p, 6, lim()).unwrap();
        for t in 0..=6 {
            let s = ctx.ncomplex_slice(t).unwrap();
            assert!(s.composites_vanish(3), "t={t}");
            for (pp, r) in [(1, 0), (2, 0), (2, 1)] {
                assert!(ctx.contraction(pp, r, t).unwrap().composites_vanish(2));
            }
        }
        assert!(matches!(ctx.contraction(1, 1, 2), Err(KoszulError::BadContractionIndices { .. })));
        assert!(koszulity_check(&ctx, 6).unwrap().koszul_up_to_cutoff());
        assert!(pskn_check(&p, 6, lim()).unwrap().passed);
    }

    #[test]
    fn pskn_polynomial() {
        let r = pskn_check(&polynomial(fp(), 2), 6, lim()).unwrap();
        assert!(r.passed);
        assert_eq!(r.product, vec![1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn bimodule_and_small_complexes() {
        let f = fp();
        for p in [polynomial(f, 2), x_squared(f)] {
            let ctx = KoszulContext::new(&p, 4, lim()).unwrap();
            for t in 0..=4 {
                let b = ctx.bimodule_slice(t).unwrap();
                assert!(b.composites_vanish(2));
                // H_0 of the bimodule resolution is A_t
                assert_eq!(b.homology_dims()[0], ctx.basis.dim(t), "t={t} dims={:?} h={:?}", b.dims, b.homology_dims());
                let s = ctx.small_slice(t).unwrap();
                assert!(s.composites_vanish(2));
            }
        }
        let ctx = KoszulContext::new(&polynomial(f, 2), 4, lim()).unwrap();
        for t in 0..=4 {
            assert_eq!(ctx.small_slice(t).unwrap().homology_dims()[0], ctx.basis.dim(t));
        }
        let z = ctx.bimodule_slice(0).unwrap();
        assert_eq!(z.dims, vec![1]);
    }

    #[test]
    fn witness_and_euler() {
        let f = fp();
        let ctx = KoszulContext::new(&polynomial(f, 2), 4, lim()).unwrap();
        let s = ctx.koszul_complex(3).unwrap();
        assert_eq!(s.euler_characteristic(), 0);
        assert!(s.homology_witness(1).is_none());
        let t0 = ctx.koszul_complex(0).unwrap();
        assert_eq!(t0.homology_dims(), vec![1]);
        assert!(t0.homology_witness(0).is_some());
    }
}
