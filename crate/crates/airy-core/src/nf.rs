//! Number-field arithmetic: `Q[z] / (m(z))` for a fixed defining polynomial.
//!
//! Structures whose constants are algebraic (the cubic three-dimensional
//! family, the eighth-root-of-unity Frobenius example) carry coefficients in
//! a quotient ring `Q[z]/(m)`.  Elements are coefficient vectors in the
//! power basis `1, z, ..., z^{d-1}`, always kept reduced; the modulus is
//! stored exactly as supplied (it need not be monic — reduction divides by
//! the leading coefficient rationally, which is harmless over `Q`).
//!
//! Every element carries a shared handle to its field so that generic ring
//! code can operate without threading a context object around.  The ring
//! constants `zero`/`one` are field-agnostic rational constants that adopt
//! the field of whatever they are combined with — the only values allowed
//! to have no field attached are such rational constants.

use std::fmt::{self, Display};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::AiryError;
use crate::scalar::{format_rat, parse_rat, Field, Rat, Ring};

/// A defining polynomial `m(z)`, lowest-degree coefficient first.
#[derive(Clone, Debug, PartialEq)]
pub struct NumberField {
    modulus: Vec<Rat>,
}

impl NumberField {
    /// `modulus` must have degree at least one and a nonzero leading
    /// coefficient.  Irreducibility is the caller's responsibility; it is
    /// what makes [`NfElem::inv`] total on nonzero elements.
    pub fn new(modulus: Vec<Rat>) -> Result<Arc<Self>, AiryError> {
        let deg = poly_degree(&modulus);
        if deg < 1 {
            return Err(AiryError::Parse(
                "number field modulus must have degree >= 1".into(),
            ));
        }
        if (deg + 1) as usize != modulus.len() {
            return Err(AiryError::Parse(
                "number field modulus has a zero leading coefficient".into(),
            ));
        }
        Ok(Arc::new(NumberField { modulus }))
    }

    pub fn from_strs(modulus: &[&str]) -> Result<Arc<Self>, AiryError> {
        let coeffs = modulus
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// The modulus exactly as supplied, lowest-degree first.
    pub fn modulus(&self) -> &[Rat] {
        &self.modulus
    }

    /// The generator `z + (m)`.
    pub fn gen(self: &Arc<Self>) -> NfElem {
        let mut c = vec![<Rat as Ring>::zero(); self.degree().max(2)];
        c[1] = Ring::one();
        NfElem::from_coeffs(self, c)
    }

    pub fn elem(self: &Arc<Self>, coeffs: &[Rat]) -> NfElem {
        NfElem::from_coeffs(self, coeffs.to_vec())
    }

    pub fn elem_from_strs(self: &Arc<Self>, coeffs: &[&str]) -> Result<NfElem, AiryError> {
        let c = coeffs
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NfElem::from_coeffs(self, c))
    }
}

/// Element of `Q[z]/(m)`: reduced coefficient vector plus field handle.
///
/// `field == None` marks a rational constant (coefficient vector of length
/// at most one) that is compatible with every field; all other elements of
/// a computation must share one field, and mixing two distinct moduli is a
/// programming error that panics rather than silently mangling values.
#[derive(Clone, Debug)]
pub struct NfElem {
    coeffs: Vec<Rat>,
    field: Option<Arc<NumberField>>,
}

impl NfElem {
    pub fn from_coeffs(field: &Arc<NumberField>, coeffs: Vec<Rat>) -> Self {
        let coeffs = nf_reduce(&coeffs, field.modulus());
        NfElem {
            coeffs,
            field: Some(field.clone()),
        }
    }

    pub fn from_rat_const(r: Rat) -> Self {
        let coeffs = if Ring::is_zero(&r) { vec![] } else { vec![r] };
        NfElem { coeffs, field: None }
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.field.as_ref()
    }

    /// Reduced coefficients, padded with zeros to the field degree (or to
    /// length one for a field-less rational constant).
    pub fn coeffs_padded(&self) -> Vec<Rat> {
        let n = self.field.as_ref().map_or(1, |f| f.degree());
        let mut c = self.coeffs.clone();
        c.resize(n.max(1), Ring::zero());
        c
    }

    /// `Some(r)` when the element lies in the prime field.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.coeffs.len() <= 1 {
            Some(self.coeffs.first().cloned().unwrap_or_else(Ring::zero))
        } else {
            None
        }
    }

    fn unified_field(&self, other: &Self) -> Option<Arc<NumberField>> {
        match (&self.field, &other.field) {
            (Some(a), Some(b)) => {
                assert!(
                    a.modulus() == b.modulus(),
                    "cannot mix elements of different number fields"
                );
                Some(a.clone())
            }
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        }
    }
}

impl PartialEq for NfElem {
    fn eq(&self, other: &Self) -> bool {
        // Reduced representatives are canonical, so value equality is
        // coefficient equality (after trimming, which reduction does).
        self.unified_field(other);
        self.coeffs == other.coeffs
    }
}

impl Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rat() {
            Some(r) if self.field.is_none() => write!(f, "{}", format_rat(&r)),
            _ => {
                let parts: Vec<String> = self.coeffs_padded().iter().map(format_rat).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

impl Add for NfElem {
    type Output = NfElem;
    fn add(self, other: NfElem) -> NfElem {
        let field = self.unified_field(&other);
        let mut c = self.coeffs;
        if c.len() < other.coeffs.len() {
            c.resize(other.coeffs.len(), Ring::zero());
        }
        for (i, x) in other.coeffs.iter().enumerate() {
            c[i] += x;
        }
        trim(&mut c);
        NfElem { coeffs: c, field }
    }
}

impl Sub for NfElem {
    type Output = NfElem;
    fn sub(self, other: NfElem) -> NfElem {
        self + (-other)
    }
}

impl Neg for NfElem {
    type Output = NfElem;
    fn neg(mut self) -> NfElem {
        for c in &mut self.coeffs {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for NfElem {
    type Output = NfElem;
    fn mul(self, other: NfElem) -> NfElem {
        let field = self.unified_field(&other);
        let prod = poly_mul(&self.coeffs, &other.coeffs);
        let coeffs = match &field {
            Some(f) => nf_reduce(&prod, f.modulus()),
            None => prod,
        };
        NfElem { coeffs, field }
    }
}

impl Ring for NfElem {
    fn zero() -> Self {
        NfElem {
            coeffs: vec![],
            field: None,
        }
    }
    fn one() -> Self {
        NfElem {
            coeffs: vec![Ring::one()],
            field: None,
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn from_rat(r: &Rat) -> Self {
        NfElem::from_rat_const(r.clone())
    }
}

impl Field for NfElem {
    fn inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            return None;
        }
        match &self.field {
            None => {
                let r = self.coeffs[0].clone();
                Some(NfElem::from_rat_const(r.recip()))
            }
            Some(f) => {
                // Extended Euclid in Q[z] against the (monicized) modulus.
                // Irreducibility of the modulus makes the final remainder a
                // nonzero constant.
                let monic = monicize(f.modulus());
                let (g, t) = half_ext_gcd(&monic, &self.coeffs);
                debug_assert_eq!(poly_degree(&g), 0, "modulus not irreducible?");
                let scale = g[0].clone().recip();
                let inv: Vec<Rat> = t.iter().map(|c| c * &scale).collect();
                Some(NfElem::from_coeffs(f, inv))
            }
        }
    }
}

/// Remainder of `poly` modulo `modulus` over `Q`, lowest-degree first,
/// trailing zeros trimmed.  Exposed directly because loaders and tests want
/// to reduce raw coefficient vectors without constructing elements.
pub fn nf_reduce(poly: &[Rat], modulus: &[Rat]) -> Vec<Rat> {
    let n = poly_degree(modulus);
    assert!(n >= 1, "modulus must have positive degree");
    let lead = modulus[n as usize].clone();
    let mut rem: Vec<Rat> = poly.to_vec();
    trim(&mut rem);
    while poly_degree(&rem) >= n {
        let d = poly_degree(&rem) as usize;
        let factor = &rem[d] / &lead;
        let shift = d - n as usize;
        for (i, m) in modulus.iter().enumerate() {
            let t = &factor * m;
            rem[shift + i] -= t;
        }
        trim(&mut rem);
    }
    rem
}

fn trim(c: &mut Vec<Rat>) {
    while c.last().is_some_and(Ring::is_zero) {
        c.pop();
    }
}

/// Degree with the convention `deg 0 = -1`.
fn poly_degree(c: &[Rat]) -> i64 {
    for (i, x) in c.iter().enumerate().rev() {
        if !Ring::is_zero(x) {
            return i as i64;
        }
    }
    -1
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![<Rat as Ring>::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if Ring::is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn monicize(m: &[Rat]) -> Vec<Rat> {
    let d = poly_degree(m) as usize;
    let lead = m[d].clone();
    m.iter().take(d + 1).map(|c| c / &lead).collect()
}

/// `(gcd, t)` with `gcd = s*m + t*a` — only the cofactor of `a` is tracked.
fn half_ext_gcd(m: &[Rat], a: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    let mut t0: Vec<Rat> = vec![];
    let mut t1: Vec<Rat> = vec![Ring::one()];
    while poly_degree(&r1) >= 0 {
        let q = poly_div(&r0, &r1);
        let r2 = poly_sub(&r0, &poly_mul(&q, &r1));
        let t2 = poly_sub(&t0, &poly_mul(&q, &t1));
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    (r0, t0)
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), Ring::zero());
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

fn poly_div(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let db = poly_degree(b);
    assert!(db >= 0, "division by zero polynomial");
    let mut rem = a.to_vec();
    trim(&mut rem);
    let mut q: Vec<Rat> = vec![];
    while poly_degree(&rem) >= db {
        let dr = poly_degree(&rem) as usize;
        let shift = dr - db as usize;
        let factor = &rem[dr] / &b[db as usize];
        if q.len() <= shift {
            q.resize(shift + 1, Ring::zero());
        }
        q[shift] = factor.clone();
        for (i, c) in b.iter().enumerate() {
            let t = &factor * c;
            rem[shift + i] -= t;
        }
        trim(&mut rem);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn cubic() -> Arc<NumberField> {
        // 2z^3 - 2z^2 + 3z - 1
        NumberField::from_strs(&["-1", "3", "-2", "2"]).unwrap()
    }

    #[test]
    fn reduction_of_generator_powers() {
        let f = cubic();
        let z = f.gen();
        // z^3 = z^2 - (3/2) z + 1/2 in this field.
        let z3 = z.clone() * z.clone() * z.clone();
        assert_eq!(
            z3.coeffs_padded(),
            vec![rat(1, 2), rat(-3, 2), rat(1, 1)]
        );
        // Same thing through the raw reduction entry point.
        let raw = nf_reduce(
            &[rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)],
            f.modulus(),
        );
        assert_eq!(raw, vec![rat(1, 2), rat(-3, 2), rat(1, 1)]);
    }

    #[test]
    fn inverse_via_extended_euclid() {
        let f = cubic();
        let z = f.gen();
        let x = z.clone() * z.clone() - z.clone() + NfElem::from_int(3);
        let xi = x.inv().unwrap();
        assert!((x * xi).is_one());
        // The generator itself: z * z^{-1} = 1.
        let zi = z.inv().unwrap();
        assert!((z * zi).is_one());
        assert!(NfElem::zero().inv().is_none());
    }

    #[test]
    fn rational_constants_adopt_fields() {
        let f = cubic();
        let half = NfElem::from_rat(&rat(1, 2));
        let z = f.gen();
        let sum = half.clone() + z.clone();
        assert!(sum.field().is_some());
        assert_eq!(sum.coeffs_padded(), vec![rat(1, 2), rat(1, 1), rat(0, 1)]);
        // Constants stay constants among themselves.
        let c = half.clone() * NfElem::from_int(4);
        assert_eq!(c.as_rat(), Some(rat(2, 1)));
        assert!(c.field().is_none());
        assert_eq!(half.inv().unwrap().as_rat(), Some(rat(2, 1)));
    }

    #[test]
    fn eighth_root_of_unity() {
        // z^4 + 1: z is a primitive eighth root of unity.
        let f = NumberField::from_strs(&["1", "0", "0", "0", "1"]).unwrap();
        let z = f.gen();
        let z4 = field_pow4(&z);
        assert_eq!(z4, NfElem::from_int(-1));
        let z8 = z4.clone() * z4;
        assert!(z8.is_one());
        // (1/sqrt2)^2 = 1/2 with 1/sqrt2 = (z - z^3)/2.
        let s = f.elem(&[rat(0, 1), rat(1, 2), rat(0, 1), rat(-1, 2)]);
        assert_eq!((s.clone() * s).as_rat(), Some(rat(1, 2)));
    }

    fn field_pow4(z: &NfElem) -> NfElem {
        let z2 = z.clone() * z.clone();
        z2.clone() * z2
    }

    #[test]
    #[should_panic(expected = "different number fields")]
    fn mixing_fields_panics() {
        let a = cubic().gen();
        let b = NumberField::from_strs(&["1", "0", "1"]).unwrap().gen();
        let _ = a + b;
    }
}
