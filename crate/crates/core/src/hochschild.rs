//! Hochschild chains with coefficients in the twisted bimodule `^wA`, and the
//! volume cycle `𝟙 ⊗ w` of a quadratic algebra `A(w, 2)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{self, AlgebraError, GradedBasis, Limits};
use crate::linalg::{Echelon, SVec};
use crate::regularity::{self, RegularityError};
use crate::scalar::{FieldSpec, Scalar};
use crate::tensor::{self, EndoMatrix, MultilinearForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HochschildError {
    #[error("volume cycles are only defined here for quadratic algebras (N = 2), got N = {0}")]
    NotQuadratic(usize),
    #[error("chain of internal degree {degree} exceeds the computed basis (max degree {limit})")]
    DegreeOverflow { degree: usize, limit: usize },
    #[error("twist is not invertible")]
    SingularTwist,
    #[error(transparent)]
    Regularity(#[from] RegularityError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

type Result<T> = std::result::Result<T, HochschildError>;

/// A chain `Σ c · a_0 ⊗ a_1 ⊗ … ⊗ a_k` over basis elements; each slot is `(degree, index)`.
pub type Chain = BTreeMap<Vec<(usize, usize)>, Scalar>;

fn add_term(c: &mut Chain, key: Vec<(usize, usize)>, v: Scalar) {
    if v.is_zero() {
        return;
    }
    match c.get_mut(&key) {
        Some(x) => {
            let s = &*x + &v;
            if s.is_zero() {
                c.remove(&key);
            } else {
                *x = s;
            }
        }
        None => {
            c.insert(key, v);
        }
    }
}

pub fn internal_degree(key: &[(usize, usize)]) -> usize {
    key.iter().map(|(d, _)| d).sum()
}

/// `A` as a bimodule over itself with the left action twisted by `(−1)^{(m−1)·deg a} (σ^w)⁻¹`.
#[derive(Debug, Clone)]
pub struct TwistedBimodule {
    pub basis: GradedBasis,
    pub m: usize,
    /// `(σ^w)⁻¹` on generators, acting by `x_ν ↦ Σ_ρ S[ρ][ν] x_ρ`.
    sigma_inv: EndoMatrix,
}

impl TwistedBimodule {
    /// `sigma` is `σ^w` on generators (for `^wA` this is `Q_w^t`).
    pub fn new(basis: GradedBasis, m: usize, sigma: &EndoMatrix) -> Result<Self> {
        let sigma_inv = sigma.inverse().ok_or(HochschildError::SingularTwist)?;
        Ok(TwistedBimodule { basis, m, sigma_inv })
    }

    pub fn field(&self) -> FieldSpec {
        self.basis.field()
    }

    /// `(σ^w)⁻¹(a)` for `a ∈ A_n`.
    pub fn sigma_inv(&self, n: usize, a: &SVec) -> SVec {
        let lifted = self.basis.lift(n, a);
        let moved = tensor::apply_tensor_power(&lifted, self.basis.g(), n, &self.sigma_inv);
        self.basis.normal_form(n, &moved)
    }

    /// `a · ξ = (−1)^{(m−1)·deg a} (σ^w)⁻¹(a) ξ`.
    pub fn left_action(&self, p: usize, a: &SVec, q: usize, xi: &SVec) -> SVec {
        let f = self.field();
        let v = self.basis.multiply(p, &self.sigma_inv(p, a), q, xi);
        if ((self.m - 1) * p) % 2 == 1 {
            v.scale(&f.int(-1))
        } else {
            v
        }
    }

    fn check(&self, c: &Chain) -> Result<()> {
        let limit = self.basis.max_degree();
        for key in c.keys() {
            let degree = internal_degree(key);
            if degree > limit {
                return Err(HochschildError::DegreeOverflow { degree, limit });
            }
        }
        Ok(())
    }

    /// Hochschild boundary. With `normalized`, terms with a unit in a slot `i ≥ 1` are dropped.
    pub fn boundary(&self, c: &Chain, normalized: bool) -> Result<Chain> {
        self.check(c)?;
        let f = self.field();
        let parts: Vec<Chain> = c
            .par_iter()
            .map(|(key, coef)| {
                let mut out = Chain::new();
                let k = key.len() - 1;
                if k == 0 {
                    return out;
                }
                let unit = |i: usize| SVec::unit(key[i].1, f);
                let mut push = |slots: Vec<(usize, usize)>, v: &SVec, pos: usize, sign: &Scalar| {
                    let deg = slots[pos].0;
                    for (idx, s) in v.iter() {
                        let mut kk = slots.clone();
                        kk[pos] = (deg, *idx);
                        add_term(&mut out, kk, &(sign * coef) * s);
                    }
                };
                for i in 0..k {
                    let sign = if i % 2 == 0 { f.one() } else { f.int(-1) };
                    let (di, dj) = (key[i].0, key[i + 1].0);
                    let prod = self.basis.multiply(di, &unit(i), dj, &unit(i + 1));
                    let mut slots: Vec<(usize, usize)> = key[..i].to_vec();
                    slots.push((di + dj, 0));
                    slots.extend_from_slice(&key[i + 2..]);
                    push(slots, &prod, i, &sign);
                }
                let sign = if k % 2 == 0 { f.one() } else { f.int(-1) };
                let (dk, d0) = (key[k].0, key[0].0);
                let prod = self.left_action(dk, &unit(k), d0, &unit(0));
                let mut slots = vec![(dk + d0, 0)];
                slots.extend_from_slice(&key[1..k]);
                push(slots, &prod, 0, &sign);
                if normalized {
                    out.retain(|kk, _| kk[1..].iter().all(|(d, _)| *d > 0));
                }
                out
            })
            .collect();
        let mut total = Chain::new();
        for part in parts {
            for (k, v) in part {
                add_term(&mut total, k, v);
            }
        }
        Ok(total)
    }

    /// Basis of normalized `k`-chains (`k + 1` slots) of internal degree `t`.
    pub fn normalized_chain_basis(&self, k: usize, t: usize) -> Vec<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.enumerate(k + 1, t, &mut cur, &mut out);
        out
    }

    fn enumerate(&self, slots: usize, left: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if cur.len() == slots {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let min = if cur.is_empty() { 0 } else { 1 };
        let remaining_slots = slots - cur.len() - 1;
        for d in min..=left {
            if left - d < remaining_slots {
                break;
            }
            for i in 0..self.basis.dim(d) {
                cur.push((d, i));
                self.enumerate(slots, left - d, cur, out);
                cur.pop();
            }
        }
    }

    /// Whether `c` lies in the image of the normalized boundary from `(k+1)`-chains
    /// of the same internal degree.
    pub fn is_boundary(&self, c: &Chain) -> Result<bool> {
        let Some(first) = c.keys().next() else { return Ok(true) };
        let (k, t) = (first.len() - 1, internal_degree(first));
        let sources = self.normalized_chain_basis(k + 1, t);
        let targets = self.normalized_chain_basis(k, t);
        let index: BTreeMap<&Vec<(usize, usize)>, usize> = targets.iter().enumerate().map(|(i, kk)| (kk, i)).collect();
        let f = self.field();
        let to_vec = |ch: &Chain| -> SVec {
            SVec::from_pairs(ch.iter().filter_map(|(kk, v)| index.get(kk).map(|&i| (i, v.clone()))).collect::<Vec<_>>())
        };
        let mut e = Echelon::new(f);
        for s in &sources {
            let mut single = Chain::new();
            single.insert(s.clone(), f.one());
            e.insert(&to_vec(&self.boundary(&single, true)?));
        }
        Ok(e.contains(&to_vec(c)))
    }
}

/// `Σ W_{λ_1…λ_m} 𝟙 ⊗ x_{λ_1} ⊗ … ⊗ x_{λ_m}`.
pub fn volume_chain(w: &MultilinearForm) -> Chain {
    let m = w.degree();
    let mut c = Chain::new();
    for (digits, v) in w.terms() {
        let mut key = vec![(0, 0)];
        key.extend(digits.iter().map(|&d| (1, d)));
        debug_assert_eq!(key.len(), m + 1);
        add_term(&mut c, key, v);
    }
    c
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VolumeCycle {
    pub cycle: bool,
    pub nontrivial: bool,
    pub boundary_terms: usize,
}

/// `^wA` for `A = A(w, 2)` with basis up to degree `max_degree`.
pub fn twisted_bimodule(w: &MultilinearForm, max_degree: usize, limits: Limits) -> Result<TwistedBimodule> {
    let p = regularity::algebra_from_form(w, 2)?;
    let q = tensor::solve_twisting(w).map_err(RegularityError::from)?.q;
    let basis = algebra::monomial_basis(&p, max_degree, limits)?;
    TwistedBimodule::new(basis, w.degree(), &q.transpose())
}

pub fn is_volume_cycle(w: &MultilinearForm, n: usize, limits: Limits) -> Result<VolumeCycle> {
    if n != 2 {
        return Err(HochschildError::NotQuadratic(n));
    }
    let module = twisted_bimodule(w, w.degree(), limits)?;
    let c = volume_chain(w);
    let b = module.boundary(&c, true)?;
    let nontrivial = !c.is_empty() && !module.is_boundary(&c)?;
    Ok(VolumeCycle { cycle: b.is_empty(), nontrivial, boundary_terms: b.len() })
}
