//! Exact ground-field arithmetic.
//!
//! Two fields are supported: the rationals (arbitrary precision) and prime
//! fields `F_p` with `p < 2^31`, so that a product of two residues always fits
//! in a `u64`. Every scalar carries its field; mixing fields is an error.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("invalid field spec `{0}`: expected `q` or `fp:<prime below 2^31>`")]
    BadFieldSpec(String),
    #[error("invalid scalar literal `{literal}`: {reason}")]
    BadLiteral { literal: String, reason: String },
    #[error("no element of order {order} in F_{p}")]
    NotFound { p: u32, order: u64 },
}

/// The ground field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u32),
}

impl FieldSpec {
    /// Validated constructor for `F_p`.
    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if p >= (1 << 31) || !is_prime(p) {
            return Err(ScalarError::BadFieldSpec(format!("fp:{p}")));
        }
        Ok(FieldSpec::PrimeField(p as u32))
    }

    pub fn characteristic(self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => p as u64,
        }
    }

    /// True when the integer `n` is zero in this field.
    pub fn divides(self, n: u64) -> bool {
        match self {
            FieldSpec::Rationals => n == 0,
            FieldSpec::PrimeField(p) => n.is_multiple_of(p as u64),
        }
    }

    pub fn zero(self) -> Scalar {
        Scalar::from_i64(self, 0)
    }

    pub fn one(self) -> Scalar {
        Scalar::from_i64(self, 1)
    }

    pub fn int(self, v: i64) -> Scalar {
        Scalar::from_i64(self, v)
    }

    /// `num/den` in this field.
    pub fn ratio(self, num: i64, den: i64) -> Result<Scalar, ScalarError> {
        Scalar::from_i64(self, num).try_div(&Scalar::from_i64(self, den))
    }

    pub fn parse_scalar(self, literal: &str) -> Result<Scalar, ScalarError> {
        Scalar::parse(self, literal)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::PrimeField(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Rationals);
        }
        let bad = || ScalarError::BadFieldSpec(s.to_string());
        let rest = t.strip_prefix("fp:").ok_or_else(bad)?;
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) || rest.len() > 12 {
            return Err(bad());
        }
        let p: u64 = rest.parse().map_err(|_| bad())?;
        FieldSpec::prime(p).map_err(|_| bad())
    }
}

/// An exact field element tagged with its field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(Box<BigRational>),
    Modular { value: u32, modulus: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Neg,
}

impl Scalar {
    pub fn from_i64(field: FieldSpec, v: i64) -> Scalar {
        match field {
            FieldSpec::Rationals => Scalar::Rational(Box::new(BigRational::from_integer(v.into()))),
            FieldSpec::PrimeField(p) => Scalar::Modular {
                value: v.rem_euclid(p as i64) as u32,
                modulus: p,
            },
        }
    }

    pub fn from_rational(field: FieldSpec, r: &BigRational) -> Result<Scalar, ScalarError> {
        match field {
            FieldSpec::Rationals => Ok(Scalar::Rational(Box::new(r.clone()))),
            FieldSpec::PrimeField(p) => {
                let num = reduce_bigint(r.numer(), p);
                let den = reduce_bigint(r.denom(), p);
                if den == 0 {
                    return Err(ScalarError::DivisionByZero);
                }
                Ok(Scalar::Modular {
                    value: mul_mod(num, inv_mod(den, p), p),
                    modulus: p,
                })
            }
        }
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rationals,
            Scalar::Modular { modulus, .. } => FieldSpec::PrimeField(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
        }
    }

    /// The residue for `F_p` elements.
    pub fn residue(&self) -> Option<u32> {
        match self {
            Scalar::Modular { value, .. } => Some(*value),
            Scalar::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Modular { .. } => None,
        }
    }

    fn check(&self, other: &Scalar) -> Result<(), ScalarError> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(ScalarError::FieldMismatch(self.field(), other.field()))
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(Box::new(&**a + &**b)),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, .. }) => {
                Scalar::Modular { value: add_mod(*a, *b, *p), modulus: *p }
            }
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(Box::new(&**a * &**b)),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, .. }) => {
                Scalar::Modular { value: mul_mod(*a, *b, *p), modulus: *p }
            }
            _ => unreachable!(),
        })
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(a) => Scalar::Rational(Box::new(a.recip())),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: inv_mod(*value, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(Box::new(-&**a)),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power allowing negative exponents.
    pub fn powi(&self, e: i64) -> Result<Scalar, ScalarError> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// A square root in the same field, when one exists.
    pub fn sqrt(&self) -> Option<Scalar> {
        match self {
            Scalar::Rational(r) => {
                if r.is_negative() {
                    return None;
                }
                let n = r.numer().sqrt();
                let d = r.denom().sqrt();
                if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
                    Some(Scalar::Rational(Box::new(BigRational::new(n, d))))
                } else {
                    None
                }
            }
            Scalar::Modular { value, modulus } => {
                sqrt_mod(*value, *modulus).map(|v| Scalar::Modular { value: v, modulus: *modulus })
            }
        }
    }

    /// Parse a scalar literal: an optionally signed integer with an optional
    /// `/denominator`. For `F_p` the value is reduced modulo `p`.
    pub fn parse(field: FieldSpec, literal: &str) -> Result<Scalar, ScalarError> {
        let bad = |reason: &str| ScalarError::BadLiteral {
            literal: literal.to_string(),
            reason: reason.to_string(),
        };
        let t = literal.trim();
        if t.is_empty() {
            return Err(bad("empty"));
        }
        let (num_s, den_s) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (t, None),
        };
        let parse_int = |s: &str| -> Result<BigInt, ScalarError> {
            let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad("expected an integer or a/b"));
            }
            s.parse::<BigInt>().map_err(|_| bad("expected an integer or a/b"))
        };
        let num = parse_int(num_s)?;
        let den = match den_s {
            Some(d) => parse_int(d)?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        Scalar::from_rational(field, &BigRational::new(num, den)).map_err(|_| bad("denominator vanishes in this field"))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

// Operator impls panic on field mismatch. Inside the crate every object is
// built over a single field, so a mismatch there is a bug.
impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar field mismatch")
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar field mismatch")
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar field mismatch")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

/// Exact binary operation on two scalars of the same field.
pub fn field_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar, ScalarError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Div => a.try_div(b),
        ArithOp::Inv => a.inv(),
        ArithOp::Neg => Ok(a.neg_ref()),
    }
}

/// A primitive `n`-th root of unity in `F_p`, built from the smallest
/// primitive root.
pub fn nth_root_of_unity(p: u64, n: u64) -> Result<Scalar, ScalarError> {
    let field = FieldSpec::prime(p)?;
    let p32 = p as u32;
    if n == 0 || !(p - 1).is_multiple_of(n) {
        return Err(ScalarError::NotFound { p: p32, order: n });
    }
    if n == 1 {
        return Ok(field.one());
    }
    let g = primitive_root(p32);
    Ok(Scalar::Modular {
        value: pow_mod(g, (p - 1) / n, p32),
        modulus: p32,
    })
}

/// Multiplicative order of a nonzero residue.
pub fn multiplicative_order(a: &Scalar) -> Option<u64> {
    let (v, p) = match a {
        Scalar::Modular { value, modulus } if *value != 0 => (*value, *modulus),
        _ => return None,
    };
    let n = p as u64 - 1;
    let mut order = n;
    for q in prime_factors(n) {
        while order.is_multiple_of(q) && pow_mod(v, order / q, p) == 1 {
            order /= q;
        }
    }
    Some(order)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let n = p as u64 - 1;
    let factors = prime_factors(n);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, n / q, p) != 1))
        .expect("every prime field has a primitive root")
}

fn reduce_bigint(x: &BigInt, p: u32) -> u32 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u32().expect("residue fits")
}

#[inline]
pub(crate) fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    if s >= p as u64 {
        (s - p as u64) as u32
    } else {
        s as u32
    }
}

#[inline]
pub(crate) fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub(crate) fn pow_mod(mut base: u32, mut e: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    pow_mod(a, p as u64 - 2, p)
}

/// Tonelli-Shanks.
fn sqrt_mod(a: u32, p: u32) -> Option<u32> {
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p as u64 - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p as u64 - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p as u64 - 1) / 2, p) == p - 1)?;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r.min(p - r))
}
