//! Scalar coefficient rings.
//!
//! All quantities in this crate are computed exactly.  The workhorse scalar
//! is [`Rat`], an arbitrary-precision rational; algebraic coefficients live
//! in [`crate::nf::NfElem`]; [`F64`] exists only for quick floating-point
//! sanity passes and is never used in any exactness-critical path.
//!
//! The [`Ring`] / [`Field`] traits are deliberately small: owned arithmetic
//! operators plus a handful of reference-flavoured helpers that let hot
//! loops avoid gratuitous clones without turning every signature into a
//! thicket of lifetimes.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::AiryError;

/// Exact rational scalar: arbitrary-precision numerator and denominator.
pub type Rat = BigRational;

/// Commutative ring with identity, plus an embedding of the rationals.
///
/// The embedding is total for every coefficient domain used here (rational
/// functions of the structure constants never leave the prime field), which
/// is what makes generic code over `Ring` able to introduce literal
/// constants like `1/2`.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Sized
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn from_rat(r: &Rat) -> Self;
    fn from_int(n: i64) -> Self {
        Self::from_rat(&Rat::from_integer(BigInt::from(n)))
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add_ref(other);
    }
}

/// Ring in which every nonzero element is invertible.
pub trait Field: Ring {
    /// Multiplicative inverse; `None` exactly for zero.
    fn inv(&self) -> Option<Self>;

    fn div_ref(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul_ref(&i))
    }
}

impl Ring for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
}

impl Field for Rat {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Build a rational from a numerator/denominator pair of machine integers.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parse `"p"` or `"p/q"` with optional sign, arbitrary precision.
pub fn parse_rat(s: &str) -> Result<Rat, AiryError> {
    let s = s.trim();
    let bad = || AiryError::Parse(format!("invalid rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), Some(q.trim())),
        None => (s, None),
    };
    let p: BigInt = num.parse().map_err(|_| bad())?;
    let q: BigInt = match den {
        Some(q) => q.parse().map_err(|_| bad())?,
        None => One::one(),
    };
    if Zero::is_zero(&q) {
        return Err(bad());
    }
    Ok(Rat::new(p, q))
}

/// Canonical text form: `p/q` in lowest terms with positive denominator,
/// `/q` omitted when the denominator is one.  Inverse of [`parse_rat`].
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Floating-point scalar for sanity modes.
///
/// Exact comparison semantics (`is_zero` means bit-zero); callers that want
/// a tolerance compare explicitly.  Not `Eq`/`Ord` and never used where
/// exactness is asserted.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct F64(pub f64);

impl Display for F64 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for F64 {
    type Output = F64;
    fn add(self, o: F64) -> F64 {
        F64(self.0 + o.0)
    }
}
impl Sub for F64 {
    type Output = F64;
    fn sub(self, o: F64) -> F64 {
        F64(self.0 - o.0)
    }
}
impl Mul for F64 {
    type Output = F64;
    fn mul(self, o: F64) -> F64 {
        F64(self.0 * o.0)
    }
}
impl Neg for F64 {
    type Output = F64;
    fn neg(self) -> F64 {
        F64(-self.0)
    }
}

impl Ring for F64 {
    fn zero() -> Self {
        F64(0.0)
    }
    fn one() -> Self {
        F64(1.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
    fn from_rat(r: &Rat) -> Self {
        let p = r.numer().to_f64().expect("numerator out of f64 range");
        let q = r.denom().to_f64().expect("denominator out of f64 range");
        F64(p / q)
    }
}

impl Field for F64 {
    fn inv(&self) -> Option<Self> {
        if self.0 == 0.0 {
            None
        } else {
            Some(F64(1.0 / self.0))
        }
    }
}

/// `|a - b|` is within `tol` — the comparison used by float sanity modes.
pub fn f64_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Exact integer power with negative exponents routed through the inverse.
pub fn field_pow<K: Field>(x: &K, e: i64) -> K {
    if e < 0 {
        let inv = x.inv().expect("zero base with negative exponent");
        return field_pow_nonneg(&inv, (-e) as u64);
    }
    field_pow_nonneg(x, e as u64)
}

fn field_pow_nonneg<K: Ring>(x: &K, mut e: u64) -> K {
    let mut base = x.clone();
    let mut acc = K::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul_ref(&base);
        }
        base = base.mul_ref(&base);
        e >>= 1;
    }
    acc
}

/// `n!` as an exact rational.
pub fn factorial(n: u64) -> Rat {
    let mut acc: BigInt = One::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

/// Binomial coefficient `C(n, k)` as an exact rational.
pub fn binomial(n: u64, k: u64) -> Rat {
    if k > n {
        return Ring::zero();
    }
    let k = k.min(n - k);
    let mut num: BigInt = One::one();
    let mut den: BigInt = One::one();
    for j in 0..k {
        num *= BigInt::from(n - j);
        den *= BigInt::from(j + 1);
    }
    Rat::new(num, den)
}

/// True when the rational is a nonnegative integer.
pub fn is_nat(r: &Rat) -> bool {
    r.denom().is_one() && !r.numer().is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "7", "-3", "22/7", "-9/4", "1000000000000000000000/7"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        // Non-canonical inputs normalize.
        assert_eq!(format_rat(&parse_rat("4/6").unwrap()), "2/3");
        assert_eq!(format_rat(&parse_rat("5/-10").unwrap()), "-1/2");
        assert_eq!(format_rat(&parse_rat(" 3 / 4 ").unwrap()), "3/4");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("").is_err());
        assert!(parse_rat("a/b").is_err());
    }

    #[test]
    fn powers_and_combinatorics() {
        assert_eq!(field_pow(&rat(2, 1), 10), rat(1024, 1));
        assert_eq!(field_pow(&rat(2, 1), -3), rat(1, 8));
        assert_eq!(field_pow(&rat(5, 7), 0), rat(1, 1));
        assert_eq!(factorial(6), rat(720, 1));
        assert_eq!(binomial(10, 3), rat(120, 1));
        assert_eq!(binomial(3, 5), rat(0, 1));
    }

    #[test]
    fn float_fallback_embeds_rationals() {
        let x = F64::from_rat(&rat(1, 4));
        assert!(f64_close(x.0, 0.25, 1e-15));
        assert_eq!(x.inv().unwrap().0, 4.0);
        assert!(F64(0.0).inv().is_none());
    }
}
