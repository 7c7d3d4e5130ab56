//! At-most-quadratic differential operators and their commutators.
//!
//! The constraint operators of a structure live in the span of
//!
//! ```text
//! u = c·ħ + Q·x + P·(ħ∂) + ½ xᵀA x + ħ xᵀB ∂ + ½ ħ² ∂ᵀC ∂
//! ```
//!
//! with `A`, `C` symmetric.  This span is closed under the rescaled
//! commutator `ħ⁻¹[·,·]`, which is again of the same shape — with one
//! wrinkle: the central part of a commutator arises at two different
//! powers of `ħ` (the `P·Q` pairing at first order, the `A`–`C` double
//! contraction at second order), and both are accumulated into the single
//! coordinate `c`.  On the elements built from an Airy structure the
//! linear-position part `Q` vanishes, so there the division by `ħ` is
//! literal and the convention is invisible.
//!
//! [`lie_closure_check`] verifies that the operator family of a structure
//! closes onto itself with the commutation constants read off from `B` —
//! the operator-algebra face of the identity validation in
//! [`crate::relations`]; the two must accept and reject in unison.

use crate::error::AiryError;
use crate::relations::structure_constants;
use crate::scalar::{Rat, Ring};
use crate::structure::AiryStructure;

/// One at-most-quadratic operator in `d` pairs of variables.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylElement<K: Ring> {
    d: usize,
    pub c: K,
    pub q: Vec<K>,
    pub p: Vec<K>,
    /// Symmetric: coefficient matrix of `½ xᵀA x`.
    pub a2: Vec<Vec<K>>,
    /// Coefficient matrix of `ħ xᵀB ∂` (row: x-slot, column: ∂-slot).
    pub b2: Vec<Vec<K>>,
    /// Symmetric: coefficient matrix of `½ ħ² ∂ᵀC ∂`.
    pub c2: Vec<Vec<K>>,
}

fn zmat<K: Ring>(d: usize) -> Vec<Vec<K>> {
    vec![vec![K::zero(); d]; d]
}

impl<K: Ring> WeylElement<K> {
    pub fn zero(d: usize) -> Self {
        WeylElement {
            d,
            c: K::zero(),
            q: vec![K::zero(); d],
            p: vec![K::zero(); d],
            a2: zmat(d),
            b2: zmat(d),
            c2: zmat(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// The `i`-th constraint operator of a structure:
    /// `L_i = ħ∂_i − ½A^i x² − ħ xB^i ∂ − ½ħ² ∂C^i ∂ − ħD^i`.
    pub fn from_airy(s: &AiryStructure<K>, i: u32) -> Self {
        let d = s.dim();
        let mut w = Self::zero(d);
        w.p[i as usize] = K::one();
        w.c = -s.d.get(&[i]);
        for a in 0..d as u32 {
            for b in 0..d as u32 {
                w.a2[a as usize][b as usize] = -s.a.get(&[i, a, b]);
                w.b2[a as usize][b as usize] = -s.b.get(&[i, a, b]);
                w.c2[a as usize][b as usize] = -s.c.get(&[i, a, b]);
            }
        }
        w
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        let mut out = self.clone();
        out.c.add_assign_ref(&other.c);
        for i in 0..self.d {
            out.q[i].add_assign_ref(&other.q[i]);
            out.p[i].add_assign_ref(&other.p[i]);
            for j in 0..self.d {
                out.a2[i][j].add_assign_ref(&other.a2[i][j]);
                out.b2[i][j].add_assign_ref(&other.b2[i][j]);
                out.c2[i][j].add_assign_ref(&other.c2[i][j]);
            }
        }
        out
    }

    pub fn scale(&self, f: &K) -> Self {
        let mut out = self.clone();
        out.c = out.c.mul_ref(f);
        for i in 0..self.d {
            out.q[i] = out.q[i].mul_ref(f);
            out.p[i] = out.p[i].mul_ref(f);
            for j in 0..self.d {
                out.a2[i][j] = out.a2[i][j].mul_ref(f);
                out.b2[i][j] = out.b2[i][j].mul_ref(f);
                out.c2[i][j] = out.c2[i][j].mul_ref(f);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero()
            && self.q.iter().all(K::is_zero)
            && self.p.iter().all(K::is_zero)
            && [&self.a2, &self.b2, &self.c2]
                .iter()
                .all(|m| m.iter().flatten().all(K::is_zero))
    }

    /// Flatten onto the coordinate module: `[c, Q, P, A upper-triangle
    /// (row-major, i ≤ j), B full rows, C upper-triangle]`.  Length is
    /// [`module_dim`]`(d) = 2d² + 3d + 1`.
    pub fn vec(&self) -> Vec<K> {
        let d = self.d;
        let mut v = Vec::with_capacity(module_dim(d));
        v.push(self.c.clone());
        v.extend(self.q.iter().cloned());
        v.extend(self.p.iter().cloned());
        for i in 0..d {
            for j in i..d {
                v.push(self.a2[i][j].clone());
            }
        }
        for i in 0..d {
            v.extend(self.b2[i].iter().cloned());
        }
        for i in 0..d {
            for j in i..d {
                v.push(self.c2[i][j].clone());
            }
        }
        v
    }
}

/// Dimension of the coordinate module of [`WeylElement::vec`].
pub fn module_dim(d: usize) -> usize {
    2 * d * d + 3 * d + 1
}

fn mat_mul<K: Ring>(x: &[Vec<K>], y: &[Vec<K>]) -> Vec<Vec<K>> {
    let d = x.len();
    let mut out = zmat::<K>(d);
    for i in 0..d {
        for k in 0..d {
            if x[i][k].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[k][j].is_zero() {
                    continue;
                }
                out[i][j].add_assign_ref(&x[i][k].mul_ref(&y[k][j]));
            }
        }
    }
    out
}

fn mat_t<K: Ring>(x: &[Vec<K>]) -> Vec<Vec<K>> {
    let d = x.len();
    let mut out = zmat::<K>(d);
    for i in 0..d {
        for j in 0..d {
            out[i][j] = x[j][i].clone();
        }
    }
    out
}

fn mat_vec<K: Ring>(x: &[Vec<K>], v: &[K]) -> Vec<K> {
    x.iter()
        .map(|row| {
            let mut acc = K::zero();
            for (a, b) in row.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    acc.add_assign_ref(&a.mul_ref(b));
                }
            }
            acc
        })
        .collect()
}

fn trace_prod<K: Ring>(x: &[Vec<K>], y: &[Vec<K>]) -> K {
    let d = x.len();
    let mut acc = K::zero();
    for i in 0..d {
        for j in 0..d {
            if !x[i][j].is_zero() && !y[j][i].is_zero() {
                acc.add_assign_ref(&x[i][j].mul_ref(&y[j][i]));
            }
        }
    }
    acc
}

/// The rescaled commutator `ħ⁻¹[u, v]` (central convention as in the
/// module docs).
pub fn bracket<K: Ring>(u: &WeylElement<K>, v: &WeylElement<K>) -> WeylElement<K> {
    assert_eq!(u.d, v.d, "operands live in different Weyl algebras");
    let d = u.d;
    let half = K::from_rat(&Rat::new(1.into(), 2.into()));
    let mut w = WeylElement::zero(d);

    // Central part: P·Q pairing plus the A–C double contraction.
    let mut c = K::zero();
    for i in 0..d {
        c = c + u.p[i].mul_ref(&v.q[i]) - v.p[i].mul_ref(&u.q[i]);
    }
    c = c + half.mul_ref(&(trace_prod(&v.a2, &u.c2) - trace_prod(&u.a2, &v.c2)));
    w.c = c;

    let qa = mat_vec(&v.a2, &u.p);
    let qb = mat_vec(&u.a2, &v.p);
    let qc = mat_vec(&u.b2, &v.q);
    let qd = mat_vec(&v.b2, &u.q);
    for i in 0..d {
        w.q[i] = qa[i].clone() - qb[i].clone() + qc[i].clone() - qd[i].clone();
    }

    let pa = mat_vec(&mat_t(&v.b2), &u.p);
    let pb = mat_vec(&mat_t(&u.b2), &v.p);
    let pc = mat_vec(&u.c2, &v.q);
    let pd = mat_vec(&v.c2, &u.q);
    for i in 0..d {
        w.p[i] = pa[i].clone() - pb[i].clone() + pc[i].clone() - pd[i].clone();
    }

    let t1a = mat_mul(&u.b2, &v.a2);
    let t1b = mat_mul(&v.a2, &mat_t(&u.b2));
    let t2a = mat_mul(&v.b2, &u.a2);
    let t2b = mat_mul(&u.a2, &mat_t(&v.b2));
    let t3a = mat_mul(&u.b2, &v.b2);
    let t3b = mat_mul(&v.b2, &u.b2);
    let t4a = mat_mul(&v.a2, &u.c2);
    let t4b = mat_mul(&u.a2, &v.c2);
    let t5a = mat_mul(&mat_t(&v.b2), &u.c2);
    let t5b = mat_mul(&u.c2, &v.b2);
    let t6a = mat_mul(&mat_t(&u.b2), &v.c2);
    let t6b = mat_mul(&v.c2, &u.b2);
    for i in 0..d {
        for j in 0..d {
            w.a2[i][j] = t1a[i][j].clone() + t1b[i][j].clone()
                - t2a[i][j].clone()
                - t2b[i][j].clone();
            w.b2[i][j] = t3a[i][j].clone() - t3b[i][j].clone() + t4a[i][j].clone()
                - t4b[i][j].clone();
            w.c2[i][j] = t5a[i][j].clone() + t5b[i][j].clone()
                - t6a[i][j].clone()
                - t6b[i][j].clone();
        }
    }
    w
}

/// Outcome of the operator-closure check.
#[derive(Clone, Debug)]
pub struct ClosureReport {
    /// Pairs `(i, j)` with `ħ⁻¹[L_i, L_j] ≠ Σ_a f^a_{ij} L_a`.
    pub failures: Vec<(u32, u32)>,
    pub window_dim: usize,
}

impl ClosureReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Verify that the constraint operators close under the commutator with
/// the commutation constants derived from `B`.
///
/// For truncated graded structures the pair `(i, j)` ranges over the
/// certified window while the span `Σ_a f^a_{ij} L_a` uses every stored
/// label, mirroring [`crate::relations::validate_relations`].
pub fn lie_closure_check<K: Ring>(s: &AiryStructure<K>) -> Result<ClosureReport, AiryError> {
    let d = s.dim();
    let e = match &s.grading {
        None => d,
        Some(g) => (g.window().min(g.max_mode) + 1) * g.colors,
    };
    let ops: Vec<WeylElement<K>> = (0..d as u32)
        .map(|i| WeylElement::from_airy(s, i))
        .collect();
    let (f, _) = structure_constants(s);
    let mut failures = Vec::new();
    for i in 0..e as u32 {
        for j in (i + 1)..e as u32 {
            let lhs = bracket(&ops[i as usize], &ops[j as usize]);
            let mut rhs = WeylElement::zero(d);
            for a in 0..d as u32 {
                let coeff = f.get(&[i, j, a]);
                if !coeff.is_zero() {
                    rhs = rhs.add(&ops[a as usize].scale(&coeff));
                }
            }
            if lhs != rhs {
                failures.push((i, j));
            }
        }
    }
    Ok(ClosureReport {
        failures,
        window_dim: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::validate_relations;
    use crate::scalar::rat;
    use crate::structure::FieldSpec;
    use std::collections::BTreeMap;

    // ------------------------------------------------------------------
    // Brute-force cross-check of `bracket` by normal-ordered expansion.
    //
    // Monomial key: (x exponents, ∂ exponents, ħ power); normal order puts
    // every x left of every ∂.  Products use, per variable,
    //   ∂ⁿ xᵐ = Σ_j C(n,j) C(m,j) j! x^{m-j} ∂^{n-j}.
    // ------------------------------------------------------------------

    type Mono = (Vec<u8>, Vec<u8>, u8);
    type Poly = BTreeMap<Mono, Rat>;

    fn cleanup(p: &mut Poly) {
        p.retain(|_, v| !Ring::is_zero(v));
    }

    fn comb(n: u8, k: u8) -> i64 {
        if k > n {
            return 0;
        }
        let mut out: i64 = 1;
        for j in 0..k as i64 {
            out = out * (n as i64 - j) / (j + 1);
        }
        out
    }

    fn fact(n: u8) -> i64 {
        (1..=n as i64).product::<i64>().max(1)
    }

    fn mono_mul(d: usize, a: (&Mono, &Rat), b: (&Mono, &Rat)) -> Poly {
        let ((xa, da, ha), ca) = a;
        let ((xb, db, hb), cb) = b;
        // Per-variable reordering of ∂^da past x^xb.
        let mut terms: Vec<(Vec<u8>, Vec<u8>, Rat)> = vec![(vec![], vec![], ca * cb)];
        for v in 0..d {
            let (n, m) = (da[v], xb[v]);
            let mut next = Vec::new();
            for (xacc, dacc, coeff) in &terms {
                for j in 0..=n.min(m) {
                    let c = comb(n, j) * comb(m, j) * fact(j);
                    let mut x2 = xacc.clone();
                    let mut d2 = dacc.clone();
                    x2.push(m - j);
                    d2.push(n - j);
                    next.push((x2, d2, coeff * rat(c, 1)));
                }
            }
            terms = next;
        }
        let mut out = Poly::new();
        for (xmid, dmid, coeff) in terms {
            let xe: Vec<u8> = (0..d).map(|v| xa[v] + xmid[v]).collect();
            let de: Vec<u8> = (0..d).map(|v| dmid[v] + db[v]).collect();
            *out.entry((xe, de, ha + hb)).or_insert_with(|| rat(0, 1)) += coeff;
        }
        cleanup(&mut out);
        out
    }

    fn poly_mul(d: usize, a: &Poly, b: &Poly) -> Poly {
        let mut out = Poly::new();
        for am in a {
            for bm in b {
                for (k, v) in mono_mul(d, am, bm) {
                    *out.entry(k).or_insert_with(|| rat(0, 1)) += v;
                }
            }
        }
        cleanup(&mut out);
        out
    }

    /// Expand the six-slot ansatz into a normal-ordered polynomial.
    fn embed(w: &WeylElement<Rat>) -> Poly {
        let d = w.dim();
        let half = rat(1, 2);
        let mut p = Poly::new();
        let z = vec![0u8; d];
        let mut add = |xe: Vec<u8>, de: Vec<u8>, h: u8, v: Rat| {
            if !Ring::is_zero(&v) {
                *p.entry((xe, de, h)).or_insert_with(|| rat(0, 1)) += v;
            }
        };
        add(z.clone(), z.clone(), 1, w.c.clone());
        for i in 0..d {
            let mut e = z.clone();
            e[i] = 1;
            add(e.clone(), z.clone(), 0, w.q[i].clone());
            add(z.clone(), e.clone(), 1, w.p[i].clone());
            for j in 0..d {
                let mut e2 = z.clone();
                e2[i] += 1;
                e2[j] += 1;
                let mut ei = z.clone();
                ei[i] = 1;
                let mut ej = z.clone();
                ej[j] = 1;
                add(e2.clone(), z.clone(), 0, &half * &w.a2[i][j]);
                add(ei, ej, 1, w.b2[i][j].clone());
                add(z.clone(), e2, 2, &half * &w.c2[i][j]);
            }
        }
        cleanup(&mut p);
        p
    }

    fn pseudo(seed: &mut u64) -> Rat {
        // Small deterministic values in [-4, 4].
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        rat(((*seed >> 33) % 9) as i64 - 4, 1)
    }

    fn random_element(d: usize, seed: &mut u64) -> WeylElement<Rat> {
        let mut w = WeylElement::zero(d);
        w.c = pseudo(seed);
        for i in 0..d {
            w.q[i] = pseudo(seed);
            w.p[i] = pseudo(seed);
            for j in 0..d {
                w.b2[i][j] = pseudo(seed);
            }
            for j in i..d {
                let a = pseudo(seed);
                let c = pseudo(seed);
                w.a2[i][j] = a.clone();
                w.a2[j][i] = a;
                w.c2[i][j] = c.clone();
                w.c2[j][i] = c;
            }
        }
        w
    }

    /// The commutator, expanded by brute force, matches `bracket` in all
    /// non-central slots after one division by ħ; the central part splits
    /// as `(P·Q)·ħ + (A–C trace)·ħ²`, and `bracket` reports their sum.
    #[test]
    fn bracket_matches_normal_ordered_commutator() {
        for d in 1..=2usize {
            let mut seed = 0xC0FFEE ^ (d as u64);
            for _ in 0..4 {
                let u = random_element(d, &mut seed);
                let v = random_element(d, &mut seed);
                let (pu, pv) = (embed(&u), embed(&v));
                let mut comm = poly_mul(d, &pu, &pv);
                for (k, val) in poly_mul(d, &pv, &pu) {
                    *comm.entry(k).or_insert_with(|| rat(0, 1)) -= val;
                }
                cleanup(&mut comm);

                let w = bracket(&u, &v);
                // Non-central slots: embed w with c = 0, multiply by ħ.
                let mut wz = w.clone();
                wz.c = rat(0, 1);
                let mut expect: Poly = embed(&wz)
                    .into_iter()
                    .map(|((x, de, h), v)| ((x, de, h + 1), v))
                    .collect();
                // Central slots at their true ħ powers.
                let mut pq = rat(0, 1);
                for i in 0..d {
                    pq += &u.p[i] * &v.q[i] - &v.p[i] * &u.q[i];
                }
                let mut tr = rat(0, 1);
                for i in 0..d {
                    for j in 0..d {
                        tr += &v.a2[i][j] * &u.c2[j][i] - &u.a2[i][j] * &v.c2[j][i];
                    }
                }
                tr = &tr * &rat(1, 2);
                let z = vec![0u8; d];
                *expect
                    .entry((z.clone(), z.clone(), 1))
                    .or_insert_with(|| rat(0, 1)) += pq.clone();
                *expect.entry((z.clone(), z, 2)).or_insert_with(|| rat(0, 1)) += tr.clone();
                cleanup(&mut expect);

                assert_eq!(comm, expect, "commutator mismatch at d={d}");
                assert_eq!(w.c, &pq + &tr, "central accumulation");
            }
        }
    }

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi() {
        let mut seed = 99u64;
        let d = 2;
        let u = random_element(d, &mut seed);
        let v = random_element(d, &mut seed);
        let w = random_element(d, &mut seed);
        let uv = bracket(&u, &v);
        let vu = bracket(&v, &u);
        assert!(uv.add(&vu).is_zero());
        // Jacobi: [[u,v],w] + [[v,w],u] + [[w,u],v] = 0.
        let j1 = bracket(&uv, &w);
        let j2 = bracket(&bracket(&v, &w), &u);
        let j3 = bracket(&bracket(&w, &u), &v);
        assert!(j1.add(&j2).add(&j3).is_zero());
    }

    #[test]
    fn vec_layout_and_module_dim() {
        let d = 3;
        let mut w: WeylElement<Rat> = WeylElement::zero(d);
        w.c = rat(7, 1);
        w.q[1] = rat(2, 1);
        w.p[2] = rat(3, 1);
        w.a2[0][2] = rat(5, 1);
        w.a2[2][0] = rat(5, 1);
        w.b2[2][1] = rat(11, 1);
        w.c2[1][1] = rat(13, 1);
        let v = w.vec();
        assert_eq!(v.len(), module_dim(d));
        assert_eq!(module_dim(d), 28);
        assert_eq!(v[0], rat(7, 1));
        assert_eq!(v[2], rat(2, 1)); // Q slot 1
        assert_eq!(v[6], rat(3, 1)); // P slot 2
        assert_eq!(v[7 + 2], rat(5, 1)); // A upper-tri (0,2)
        assert_eq!(v[13 + 7], rat(11, 1)); // B row 2, col 1
        assert_eq!(v[22 + 3], rat(13, 1)); // C upper-tri (1,1)
    }

    /// A valid structure closes; perturbing one entry breaks closure and
    /// relation validation in the same stroke.
    #[test]
    fn closure_agrees_with_relation_validation() {
        // Direct sum of two one-dimensional structures.
        let mut s = AiryStructure::new("sum", 2, FieldSpec::Rational);
        s.a.set(&[0, 0, 0], rat(1, 1));
        s.b.set(&[0, 0, 0], rat(2, 1));
        s.c.set(&[0, 0, 0], rat(3, 1));
        s.d.set(&[0], rat(4, 1));
        s.a.set(&[1, 1, 1], rat(5, 1));
        s.b.set(&[1, 1, 1], rat(1, 1));
        s.c.set(&[1, 1, 1], rat(2, 1));
        s.d.set(&[1], rat(3, 1));
        assert!(lie_closure_check(&s).unwrap().is_ok());
        assert!(validate_relations(&s, true).is_ok());

        let mut bad = s.clone();
        bad.b.set(&[0, 1, 1], rat(1, 1));
        let closure = lie_closure_check(&bad).unwrap();
        let relations = validate_relations(&bad, true);
        assert!(!closure.is_ok());
        assert!(!relations.is_ok());
        assert_eq!(closure.failures, vec![(0, 1)]);
    }
}
