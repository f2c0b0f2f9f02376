//! Exact scalars: the rationals and prime fields `F_p` with `p >= 5`.
//!
//! Two layers live here. [`Scalar`] is the self-describing value used at API
//! boundaries (reports, parsing, user input). The [`Field`] trait and its two
//! implementations carry the unboxed element types that the elimination code
//! is generic over.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

/// Largest prime modulus accepted; elements are stored as `u32` and products
/// are formed in `u64`.
pub const MAX_PRIME: u32 = (1 << 31) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} and {1})")]
    MixedFields(FieldSpec, FieldSpec),
    #[error("denominator {denominator} is not invertible modulo {p}")]
    NotInvertible { denominator: BigInt, p: u32 },
    #[error("{0} is not an admissible prime (need a prime 5 <= p < 2^31)")]
    InvalidPrime(u64),
    #[error("prime {p} is too small for degree {degree} multilinear work (need p > degree)")]
    PrimeTooSmall { p: u32, degree: usize },
    #[error("cannot parse field spec `{0}` (expected `q` or `fp:<p>`)")]
    BadFieldSpec(String),
    #[error("cannot parse scalar `{0}`")]
    BadScalar(String),
}

/// The scalar domain of a computation. Serialized as `q` or `fp:<p>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Rationals,
    Prime(u32),
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if p < 5 || p > MAX_PRIME as u64 || !is_prime(p) {
            return Err(ScalarError::InvalidPrime(p));
        }
        Ok(FieldSpec::Prime(p as u32))
    }

    /// Multilinearization is an equivalence only when `p > degree`.
    pub fn check_degree(&self, degree: usize, allow_small_prime: bool) -> Result<(), ScalarError> {
        match *self {
            FieldSpec::Prime(p) if (p as usize) <= degree && !allow_small_prime => {
                Err(ScalarError::PrimeTooSmall { p, degree })
            }
            _ => Ok(()),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, FieldSpec::Rationals)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "q" {
            return Ok(FieldSpec::Rationals);
        }
        let p = s
            .strip_prefix("fp:")
            .and_then(|rest| rest.parse::<u64>().ok())
            .ok_or_else(|| ScalarError::BadFieldSpec(s.to_string()))?;
        FieldSpec::prime(p)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
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

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A field element tagged with its field. Rationals are kept reduced with a
/// positive denominator, residues as the least nonnegative representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(Rational),
    Modular { value: u32, p: u32 },
}

impl Scalar {
    pub fn rational(num: i64, den: i64) -> Result<Self, ScalarError> {
        if den == 0 {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::Rational(Rational::new(num.into(), den.into())))
    }

    pub fn modular(value: i64, p: u32) -> Self {
        Scalar::Modular {
            value: value.rem_euclid(p as i64) as u32,
            p,
        }
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rationals,
            Scalar::Modular { p, .. } => FieldSpec::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn arith(&self, other: &Scalar, op: ArithOp) -> Result<Scalar, ScalarError> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => {
                let r = match op {
                    ArithOp::Add => a + b,
                    ArithOp::Sub => a - b,
                    ArithOp::Mul => a * b,
                    ArithOp::Div => {
                        if b.is_zero() {
                            return Err(ScalarError::DivisionByZero);
                        }
                        a / b
                    }
                };
                Ok(Scalar::Rational(r))
            }
            (Scalar::Modular { value: a, p }, Scalar::Modular { value: b, p: q }) if p == q => {
                let field = PrimeField::new(*p);
                let r = match op {
                    ArithOp::Add => field.add(a, b),
                    ArithOp::Sub => field.sub(a, b),
                    ArithOp::Mul => field.mul(a, b),
                    ArithOp::Div => {
                        let inv = field.inv(b).ok_or(ScalarError::DivisionByZero)?;
                        field.mul(a, &inv)
                    }
                };
                Ok(Scalar::Modular { value: r, p: *p })
            }
            _ => Err(ScalarError::MixedFields(self.field(), other.field())),
        }
    }

    pub fn inverse(&self) -> Result<Scalar, ScalarError> {
        let one = match self {
            Scalar::Rational(_) => Scalar::Rational(Rational::one()),
            Scalar::Modular { p, .. } => Scalar::Modular { value: 1, p: *p },
        };
        one.arith(self, ArithOp::Div)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{}", format_rational(q)),
            Scalar::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

/// `a/b`, or `a` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `a`, `-a`, `a/b`.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let bad = || ScalarError::BadScalar(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.trim().parse().map_err(|_| bad())?;
    let den: BigInt = den.trim().parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(ScalarError::DivisionByZero);
    }
    Ok(Rational::new(num, den))
}

/// Image of a rational under the canonical map `Z[1/den] -> F_p`.
pub fn reduce_mod_p(a: &Rational, spec: FieldSpec) -> Result<Scalar, ScalarError> {
    let p = match spec {
        FieldSpec::Prime(p) => p,
        FieldSpec::Rationals => return Ok(Scalar::Rational(a.clone())),
    };
    let value = PrimeField::new(p).from_rational(a)?;
    Ok(Scalar::Modular { value, p })
}

/// Field operations over an unboxed element type.
pub trait Field: Clone + Send + Sync + 'static {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, v: i64) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)]
    fn from_rational(&self, q: &Rational) -> Result<Self::Elem, ScalarError>;
    fn to_scalar(&self, a: &Self::Elem) -> Scalar;

    /// `a -= c * b`
    fn sub_mul_assign(&self, a: &mut Self::Elem, c: &Self::Elem, b: &Self::Elem) {
        *a = self.sub(a, &self.mul(c, b));
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = Rational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Option<Rational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn from_i64(&self, v: i64) -> Rational {
        Rational::from_integer(v.into())
    }
    fn from_rational(&self, q: &Rational) -> Result<Rational, ScalarError> {
        Ok(q.clone())
    }
    fn to_scalar(&self, a: &Rational) -> Scalar {
        Scalar::Rational(a.clone())
    }
    fn sub_mul_assign(&self, a: &mut Rational, c: &Rational, b: &Rational) {
        *a -= c * b;
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Self {
        debug_assert!((2..=MAX_PRIME).contains(&p));
        PrimeField { p }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    fn reduce_big(&self, n: &BigInt) -> u32 {
        let m = n.mod_floor(&BigInt::from(self.p));
        m.to_u32().expect("residue fits in u32")
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        (if s >= self.p as u64 { s - self.p as u64 } else { s }) as u32
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (*a as u64 + self.p as u64 - *b as u64) as u32
        }
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i64, *a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Some(t0.rem_euclid(self.p as i64) as u32)
    }
    fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
    fn from_rational(&self, q: &Rational) -> Result<u32, ScalarError> {
        let den = self.reduce_big(q.denom());
        let inv = self.inv(&den).ok_or_else(|| ScalarError::NotInvertible {
            denominator: q.denom().clone(),
            p: self.p,
        })?;
        Ok(self.mul(&self.reduce_big(q.numer()), &inv))
    }
    fn to_scalar(&self, a: &u32) -> Scalar {
        Scalar::Modular { value: *a, p: self.p }
    }
    fn sub_mul_assign(&self, a: &mut u32, c: &u32, b: &u32) {
        let prod = (*c as u64 * *b as u64) % self.p as u64;
        *a = ((*a as u64 + self.p as u64 - prod) % self.p as u64) as u32;
    }
}

/// Least common multiple of the denominators; scaling by it clears fractions.
pub fn denominator_lcm<'a>(coeffs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    coeffs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn rational_sign(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}
