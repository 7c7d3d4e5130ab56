//! Truncated multivariate formal power series.
//!
//! `TSeries<K>` is a polynomial in `nvars` commuting variables with
//! coefficients in `K`, tracked only up to a fixed total degree: every
//! operation silently discards terms whose total degree exceeds the
//! truncation order, so a value represents its class modulo
//! `(t_0, ..., t_{nvars-1})^{ord+1}`.  That is exactly the arithmetic the
//! shift/translation machinery needs — all series there are generated
//! degree by degree and only finitely many orders are ever inspected.
//!
//! A series with no shape attached (`zero`, `one`, anything built by
//! `from_rat`) is a scalar constant compatible with every variable count
//! and order; it adopts the shape of the first shaped operand it meets.
//! Combining two shaped series requires equal variable counts, and the
//! result is truncated to the coarser of the two orders.

use std::collections::BTreeMap;
use std::fmt::{self, Display};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::AiryError;
use crate::scalar::{Rat, Ring};

/// Exponent vector, one entry per variable.
pub type Exps = Vec<u16>;

#[derive(Clone, Debug, PartialEq)]
struct Shape {
    nvars: usize,
    ord: u32,
}

/// Formal power series truncated in total degree.
#[derive(Clone, Debug)]
pub struct TSeries<K: Ring> {
    shape: Option<Shape>,
    terms: BTreeMap<Exps, K>,
}

impl<K: Ring> TSeries<K> {
    /// The zero series in `nvars` variables, truncated above `ord`.
    pub fn new(nvars: usize, ord: u32) -> Self {
        TSeries {
            shape: Some(Shape { nvars, ord }),
            terms: BTreeMap::new(),
        }
    }

    /// The variable `t_i` as a series.
    pub fn var(nvars: usize, ord: u32, i: usize) -> Self {
        let mut s = Self::new(nvars, ord);
        assert!(i < nvars, "variable index out of range");
        if ord >= 1 {
            let mut e = vec![0u16; nvars];
            e[i] = 1;
            s.terms.insert(e, K::one());
        }
        s
    }

    /// A shapeless scalar constant.
    pub fn constant(c: K) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![], c);
        }
        TSeries { shape: None, terms }
    }

    pub fn nvars(&self) -> Option<usize> {
        self.shape.as_ref().map(|s| s.nvars)
    }

    pub fn order(&self) -> Option<u32> {
        self.shape.as_ref().map(|s| s.ord)
    }

    /// Add `c * t^exps`, dropping it if beyond the truncation order.
    pub fn add_term(&mut self, exps: &[u16], c: K) {
        if c.is_zero() {
            return;
        }
        let shape = self.shape.as_ref().expect("add_term needs a shaped series");
        assert_eq!(exps.len(), shape.nvars, "exponent arity mismatch");
        if total_degree(exps) > shape.ord {
            return;
        }
        match self.terms.entry(exps.to_vec()) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().add_ref(&c);
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    /// Coefficient of `t^exps` (zero when absent).
    pub fn coeff(&self, exps: &[u16]) -> K {
        self.terms.get(exps).cloned().unwrap_or_else(K::zero)
    }

    pub fn constant_term(&self) -> K {
        match &self.shape {
            None => self.terms.get(&vec![]).cloned().unwrap_or_else(K::zero),
            Some(s) => self.coeff(&vec![0u16; s.nvars]),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms
            .keys()
            .all(|e| total_degree(e) == 0)
    }

    /// Iterate `(exponents, coefficient)` in lexicographic key order.
    pub fn iter(&self) -> impl Iterator<Item = (&Exps, &K)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Restrict to terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut out = self.clone();
        out.terms.retain(|e, _| total_degree(e) == d);
        out
    }

    /// Lower the truncation order (raising it would fabricate information).
    pub fn truncated(mut self, ord: u32) -> Self {
        match &mut self.shape {
            None => self,
            Some(s) => {
                if ord < s.ord {
                    s.ord = ord;
                    self.terms.retain(|e, _| total_degree(e) <= ord);
                }
                self
            }
        }
    }

    /// Multiply by the single variable `t_i` (degree shift by one).
    pub fn mul_var(&self, i: usize) -> Self {
        let shape = self.shape.clone().expect("mul_var needs a shaped series");
        assert!(i < shape.nvars);
        let mut out = TSeries {
            shape: Some(shape.clone()),
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            if total_degree(e) + 1 > shape.ord {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] += 1;
            out.terms.insert(e2, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &K) -> Self {
        let mut out = self.clone();
        if c.is_zero() {
            out.terms.clear();
            return out;
        }
        for v in out.terms.values_mut() {
            *v = v.mul_ref(c);
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    pub fn map_coeffs<L: Ring>(&self, f: impl Fn(&K) -> L) -> TSeries<L> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                terms.insert(e.clone(), v);
            }
        }
        TSeries {
            shape: self.shape.clone(),
            terms,
        }
    }

    /// Substitute `args[i]` for variable `i`.  Every argument must share a
    /// shape and have zero constant term, which keeps substitution exact on
    /// truncations (a term of degree `d` only produces degree `>= d`).
    pub fn compose(&self, args: &[TSeries<K>]) -> Result<TSeries<K>, AiryError> {
        let nvars = self.nvars().unwrap_or(0);
        if args.len() != nvars {
            return Err(AiryError::Arity {
                expected: nvars,
                got: args.len(),
            });
        }
        let mut out_shape: Option<Shape> = None;
        for a in args {
            if !a.constant_term().is_zero() {
                return Err(AiryError::Unsupported(
                    "composition requires zero constant terms".into(),
                ));
            }
            if let Some(s) = &a.shape {
                match &mut out_shape {
                    None => out_shape = Some(s.clone()),
                    Some(t) => {
                        assert_eq!(t.nvars, s.nvars, "composition arguments disagree on arity");
                        t.ord = t.ord.min(s.ord);
                    }
                }
            }
        }
        let out_shape = out_shape.ok_or_else(|| {
            AiryError::Unsupported("composition needs at least one shaped argument".into())
        })?;
        let mut out = TSeries {
            shape: Some(out_shape.clone()),
            terms: BTreeMap::new(),
        };
        // Cache powers of each argument as they are needed.
        let mut powers: Vec<Vec<TSeries<K>>> = args
            .iter()
            .map(|a| vec![TSeries { shape: Some(out_shape.clone()), terms: one_term(&out_shape) }, a.clone().truncated(out_shape.ord)])
            .collect();
        for (e, c) in &self.terms {
            if total_degree(e) > out_shape.ord {
                continue;
            }
            let mut term = TSeries {
                shape: Some(out_shape.clone()),
                terms: one_term(&out_shape),
            };
            term = term.scale(c);
            for (i, &p) in e.iter().enumerate() {
                let p = p as usize;
                while powers[i].len() <= p {
                    let next = powers[i].last().unwrap().clone() * powers[i][1].clone();
                    powers[i].push(next);
                }
                term = term * powers[i][p].clone();
            }
            out = out + term;
        }
        Ok(out)
    }
}

fn one_term<K: Ring>(shape: &Shape) -> BTreeMap<Exps, K> {
    let mut m = BTreeMap::new();
    m.insert(vec![0u16; shape.nvars], K::one());
    m
}

pub fn total_degree(e: &[u16]) -> u32 {
    e.iter().map(|&x| x as u32).sum()
}

fn unify(a: &Option<Shape>, b: &Option<Shape>) -> Option<Shape> {
    match (a, b) {
        (Some(x), Some(y)) => {
            assert_eq!(
                x.nvars, y.nvars,
                "cannot combine series in different numbers of variables"
            );
            Some(Shape {
                nvars: x.nvars,
                ord: x.ord.min(y.ord),
            })
        }
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    }
}

/// Re-key a term map into the target shape (pads constant keys, truncates).
fn conform<K: Ring>(terms: &BTreeMap<Exps, K>, shape: &Option<Shape>) -> BTreeMap<Exps, K> {
    match shape {
        None => terms.clone(),
        Some(s) => {
            let mut out = BTreeMap::new();
            for (e, c) in terms {
                let mut e2 = e.clone();
                e2.resize(s.nvars, 0);
                if total_degree(&e2) <= s.ord {
                    out.insert(e2, c.clone());
                }
            }
            out
        }
    }
}

impl<K: Ring> PartialEq for TSeries<K> {
    fn eq(&self, other: &Self) -> bool {
        let shape = unify(&self.shape, &other.shape);
        conform(&self.terms, &shape) == conform(&other.terms, &shape)
    }
}

impl<K: Ring> Add for TSeries<K> {
    type Output = TSeries<K>;
    fn add(self, other: TSeries<K>) -> TSeries<K> {
        let shape = unify(&self.shape, &other.shape);
        let mut terms = conform(&self.terms, &shape);
        for (e, c) in conform(&other.terms, &shape) {
            match terms.entry(e) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let v = o.get().add_ref(&c);
                    if v.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = v;
                    }
                }
            }
        }
        TSeries { shape, terms }
    }
}

impl<K: Ring> Sub for TSeries<K> {
    type Output = TSeries<K>;
    fn sub(self, other: TSeries<K>) -> TSeries<K> {
        self + (-other)
    }
}

impl<K: Ring> Neg for TSeries<K> {
    type Output = TSeries<K>;
    fn neg(mut self) -> TSeries<K> {
        for v in self.terms.values_mut() {
            *v = -v.clone();
        }
        self
    }
}

impl<K: Ring> Mul for TSeries<K> {
    type Output = TSeries<K>;
    fn mul(self, other: TSeries<K>) -> TSeries<K> {
        let shape = unify(&self.shape, &other.shape);
        let a = conform(&self.terms, &shape);
        let b = conform(&other.terms, &shape);
        let ord = shape.as_ref().map(|s| s.ord).unwrap_or(u32::MAX);
        let mut terms: BTreeMap<Exps, K> = BTreeMap::new();
        for (ea, ca) in &a {
            let da = total_degree(ea);
            for (eb, cb) in &b {
                if da + total_degree(eb) > ord {
                    continue;
                }
                // `conform` gave both keys the same length.
                let e: Exps = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                let prod = ca.mul_ref(cb);
                if prod.is_zero() {
                    continue;
                }
                match terms.entry(e) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let v = o.get().add_ref(&prod);
                        if v.is_zero() {
                            o.remove();
                        } else {
                            *o.get_mut() = v;
                        }
                    }
                }
            }
        }
        TSeries { shape, terms }
    }
}

impl<K: Ring> Ring for TSeries<K> {
    fn zero() -> Self {
        TSeries {
            shape: None,
            terms: BTreeMap::new(),
        }
    }
    fn one() -> Self {
        TSeries::constant(K::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_rat(r: &Rat) -> Self {
        TSeries::constant(K::from_rat(r))
    }
}

impl<K: Ring> Display for TSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*t{i}")?,
                    _ => write!(f, "*t{i}^{p}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    type S = TSeries<Rat>;

    #[test]
    fn truncating_product() {
        // (1 + t0)^4 truncated above degree 2.
        let one_plus = S::constant(rat(1, 1)) + S::var(1, 2, 0);
        let mut p = S::one();
        for _ in 0..4 {
            p = p * one_plus.clone();
        }
        assert_eq!(p.coeff(&[0]), rat(1, 1));
        assert_eq!(p.coeff(&[1]), rat(4, 1));
        assert_eq!(p.coeff(&[2]), rat(6, 1));
        assert_eq!(p.coeff(&[3]), rat(0, 1));
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn constants_adopt_shape_and_orders_meet() {
        let a = S::var(2, 5, 0);
        let b = S::var(2, 3, 1);
        let c = (a * b).truncated(10);
        assert_eq!(c.order(), Some(3));
        assert_eq!(c.coeff(&[1, 1]), rat(1, 1));
        assert!(S::zero() + S::zero() == S::zero());
        assert_eq!((S::one() + S::one()).constant_term(), rat(2, 1));
    }

    #[test]
    fn composition_with_nilpotent_arguments() {
        // f(u, v) = u^2 + 3 v; substitute u = t0 + t1^2, v = t0 t1 (order 4).
        let mut f = S::new(2, 4);
        f.add_term(&[2, 0], rat(1, 1));
        f.add_term(&[0, 1], rat(3, 1));
        let u = S::var(2, 4, 0) + {
            let mut s = S::new(2, 4);
            s.add_term(&[0, 2], rat(1, 1));
            s
        };
        let v = S::var(2, 4, 0).mul_var(1);
        let g = f.compose(&[u, v]).unwrap();
        // u^2 = t0^2 + 2 t0 t1^2 + t1^4, 3v = 3 t0 t1.
        assert_eq!(g.coeff(&[2, 0]), rat(1, 1));
        assert_eq!(g.coeff(&[1, 2]), rat(2, 1));
        assert_eq!(g.coeff(&[0, 4]), rat(1, 1));
        assert_eq!(g.coeff(&[1, 1]), rat(3, 1));
        // Nonzero constant terms are rejected.
        let bad = S::constant(rat(1, 1)) + S::var(2, 4, 0);
        assert!(f.compose(&[bad, S::new(2, 4)]).is_err());
    }

    #[test]
    fn homogeneous_slices() {
        let s = (S::constant(rat(1, 1)) + S::var(1, 3, 0)) * (S::constant(rat(2, 1)) + S::var(1, 3, 0));
        assert_eq!(s.homogeneous_part(0).constant_term(), rat(2, 1));
        assert_eq!(s.homogeneous_part(1).coeff(&[1]), rat(3, 1));
        assert_eq!(s.homogeneous_part(2).coeff(&[2]), rat(1, 1));
    }
}
