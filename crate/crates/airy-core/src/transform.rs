//! Symmetry-preserving moves on structures: the quadratic gauge flow, two
//! scaling families, and translation of the expansion point.
//!
//! Each move sends valid structures to valid structures.  The gauge action
//! is parametrised by a symmetric matrix `u` and forms an abelian group
//! (`gauge_u ∘ gauge_v = gauge_{u+v}`); it intertwines with the scalings by
//!
//! ```text
//! gauge_u ∘ scale_λ   = scale_λ ∘ gauge_{λ²u}
//! gauge_u ∘ hbar_z    = hbar_z ∘ gauge_{u/z}
//! ```
//!
//! Translation is a formal move: it produces tensors valued in truncated
//! power series in the displacement, graded by degree.  The degree pieces
//! obey first-order flow equations driven by the genus-zero one- and
//! two-point functions of the shifted structure, and the whole package is
//! certified by [`shifted_free_energy`]: the outputs of the translated
//! structure agree with the displacement-resummed outputs of the source.

use crate::error::{AiryError, Result};
use crate::recursion::Evaluator;
use crate::scalar::{factorial, rat, Field, Rat, Ring};
use crate::series::TSeries;
use crate::structure::AiryStructure;
use crate::tensor::{sorted_multisets, SparseTensor};
use std::sync::Arc;

/// Read a symmetric gauge parameter entry.
fn sym_get<K: Ring>(u: &SparseTensor<K>, a: u32, b: u32) -> K {
    u.get(&[a, b])
}

/// Apply the gauge move with symmetric parameter `u` (an arity-2 tensor
/// over the same index range).
///
/// The cubic tensor is untouched; the remaining tensors pick up
/// contractions of `u` against their derivative slots:
///
/// ```text
/// B̃ⁱⱼₖ = Bⁱⱼₖ + Σ_a u_{ka} Aⁱ_{aj}
/// C̃ⁱⱼₖ = Cⁱⱼₖ + Σ_a (u_{ja} Bⁱ_{ak} + u_{ka} Bⁱ_{aj}) + Σ_{ab} u_{ja} u_{kb} Aⁱ_{ab}
/// D̃ⁱ  = Dⁱ + ½ Σ_{ab} u_{ab} Aⁱ_{ab}
/// ```
pub fn gauge<K: Ring>(s: &AiryStructure<K>, u: &SparseTensor<K>) -> AiryStructure<K> {
    assert_eq!(u.arity(), 2, "gauge parameter must be an arity-2 tensor");
    assert_eq!(u.dim() as usize, s.dim(), "gauge parameter dimension mismatch");
    let d = s.dim() as u32;
    let half = K::from_rat(&rat(1, 2));
    let mut out = s.clone();
    out.b = SparseTensor::new(3, s.dim(), s.b.symmetry());
    out.c = SparseTensor::new(3, s.dim(), s.c.symmetry());
    out.d = SparseTensor::new(1, s.dim(), s.d.symmetry());
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut v = s.b.get(&[i, j, k]);
                for a in 0..d {
                    let ua = sym_get(u, k, a);
                    if !ua.is_zero() {
                        v.add_assign_ref(&ua.mul_ref(&s.a.get(&[i, a, j])));
                    }
                }
                out.b.set(&[i, j, k], v);
            }
            for k in j..d {
                let mut v = s.c.get(&[i, j, k]);
                for a in 0..d {
                    let uja = sym_get(u, j, a);
                    let uka = sym_get(u, k, a);
                    if !uja.is_zero() {
                        v.add_assign_ref(&uja.mul_ref(&s.b.get(&[i, a, k])));
                    }
                    if !uka.is_zero() {
                        v.add_assign_ref(&uka.mul_ref(&s.b.get(&[i, a, j])));
                    }
                    if uja.is_zero() {
                        continue;
                    }
                    for b in 0..d {
                        let ukb = sym_get(u, k, b);
                        if !ukb.is_zero() {
                            v.add_assign_ref(
                                &uja.mul_ref(&ukb).mul_ref(&s.a.get(&[i, a, b])),
                            );
                        }
                    }
                }
                out.c.set(&[i, j, k], v);
            }
        }
        let mut v = s.d.get(&[i]);
        for a in 0..d {
            for b in 0..d {
                let uab = sym_get(u, a, b);
                if !uab.is_zero() {
                    v.add_assign_ref(&half.mul_ref(&uab).mul_ref(&s.a.get(&[i, a, b])));
                }
            }
        }
        out.d.set(&[i], v);
    }
    out
}

/// Compose two gauge parameters (entrywise sum, the group law).
pub fn gauge_compose<K: Ring>(u: &SparseTensor<K>, v: &SparseTensor<K>) -> SparseTensor<K> {
    assert_eq!(u.dim(), v.dim());
    let mut out = u.clone();
    for (key, val) in v.iter() {
        out.add_to(key, val.clone());
    }
    out
}

/// Rescale all variables: `(A, B, C, D) ↦ (λ³A, λB, λ⁻¹C, λD)`.
pub fn scale<K: Field>(s: &AiryStructure<K>, lam: &K) -> Result<AiryStructure<K>> {
    let inv = lam.inv().ok_or(AiryError::DivisionByZero)?;
    let l3 = lam.mul_ref(lam).mul_ref(lam);
    let mut out = s.clone();
    out.a = s.a.map_values(|x| x.mul_ref(&l3));
    out.b = s.b.map_values(|x| x.mul_ref(lam));
    out.c = s.c.map_values(|x| x.mul_ref(&inv));
    out.d = s.d.map_values(|x| x.mul_ref(lam));
    Ok(out)
}

/// Rescale the deformation parameter: `(A, B, C, D) ↦ (z⁻¹A, B, zC, D)`.
pub fn hbar_rescale<K: Field>(s: &AiryStructure<K>, z: &K) -> Result<AiryStructure<K>> {
    let inv = z.inv().ok_or(AiryError::DivisionByZero)?;
    let mut out = s.clone();
    out.a = s.a.map_values(|x| x.mul_ref(&inv));
    out.c = s.c.map_values(|x| x.mul_ref(z));
    Ok(out)
}

/// Degree-graded data of a structure translated by a formal displacement.
///
/// Every series lives in the polynomial ring over the structure's index
/// set, truncated beyond total degree `order`; the piece at grade `n` is
/// homogeneous of degree `n` in the displacement.
pub struct Translation<K: Ring> {
    dim: usize,
    order: u32,
    one_point: Vec<Vec<TSeries<K>>>,
    two_point: Vec<Vec<TSeries<K>>>,
    at: Vec<Vec<TSeries<K>>>,
    bt: Vec<Vec<TSeries<K>>>,
    ct: Vec<Vec<TSeries<K>>>,
    dt: Vec<Vec<TSeries<K>>>,
    grading_source: AiryStructure<K>,
}

impl<K: Ring> Translation<K> {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Degree-`n` piece of the genus-zero one-point function (zero for
    /// `n < 2`).
    pub fn one_point(&self, n: u32, i: u32) -> &TSeries<K> {
        &self.one_point[n as usize][i as usize]
    }

    /// Degree-`n` piece of the genus-zero two-point function (zero for
    /// `n < 1`).
    pub fn two_point(&self, n: u32, i: u32, j: u32) -> &TSeries<K> {
        &self.two_point[n as usize][(i as usize) * self.dim + j as usize]
    }

    pub fn a_piece(&self, n: u32, i: u32, j: u32, k: u32) -> &TSeries<K> {
        &self.at[n as usize][self.t3(i, j, k)]
    }

    pub fn b_piece(&self, n: u32, i: u32, j: u32, k: u32) -> &TSeries<K> {
        &self.bt[n as usize][self.t3(i, j, k)]
    }

    pub fn c_piece(&self, n: u32, i: u32, j: u32, k: u32) -> &TSeries<K> {
        &self.ct[n as usize][self.t3(i, j, k)]
    }

    pub fn d_piece(&self, n: u32, i: u32) -> &TSeries<K> {
        &self.dt[n as usize][i as usize]
    }

    fn t3(&self, i: u32, j: u32, k: u32) -> usize {
        ((i as usize) * self.dim + j as usize) * self.dim + k as usize
    }

    /// Sum the degree pieces into a series-valued structure.
    ///
    /// Fails if the resummed cubic tensor is not fully symmetric or the
    /// quadratic-derivative tensor not symmetric in its lower pair — for a
    /// valid source both symmetries hold identically.
    pub fn series_structure(&self) -> Result<AiryStructure<TSeries<K>>> {
        let d = self.dim as u32;
        let mut out: AiryStructure<TSeries<K>> = AiryStructure::new(
            self.grading_source.name.clone(),
            self.dim,
            self.grading_source.field.clone(),
        );
        out.grading = self.grading_source.grading.clone();
        let sum3 = |pieces: &Vec<Vec<TSeries<K>>>, idx: usize| -> TSeries<K> {
            let mut acc = TSeries::new(self.dim, self.order);
            for n in 0..=self.order as usize {
                acc = acc + pieces[n][idx].clone();
            }
            acc
        };
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let v = sum3(&self.at, self.t3(i, j, k));
                    if v != sum3(&self.at, self.t3(j, i, k))
                        || v != sum3(&self.at, self.t3(k, j, i))
                    {
                        return Err(AiryError::Unsupported(
                            "translated cubic tensor is not symmetric; source is invalid"
                                .into(),
                        ));
                    }
                    if i <= j && j <= k {
                        out.a.set(&[i, j, k], v);
                    }
                    if j <= k {
                        let c = sum3(&self.ct, self.t3(i, j, k));
                        if c != sum3(&self.ct, self.t3(i, k, j)) {
                            return Err(AiryError::Unsupported(
                                "translated derivative tensor is not pair-symmetric; \
                                 source is invalid"
                                    .into(),
                            ));
                        }
                        out.c.set(&[i, j, k], c);
                    }
                    out.b.set(&[i, j, k], sum3(&self.bt, self.t3(i, j, k)));
                }
            }
            let mut acc = TSeries::new(self.dim, self.order);
            for n in 0..=self.order as usize {
                acc = acc + self.dt[n][i as usize].clone();
            }
            out.d.set(&[i], acc);
        }
        Ok(out)
    }

    /// Evaluate the translated tensors at a concrete displacement.
    ///
    /// The result is exact through total degree [`Translation::order`] in
    /// the displacement and truncated beyond it.
    pub fn eval_at(&self, t: &[K]) -> Result<AiryStructure<K>> {
        assert_eq!(t.len(), self.dim, "displacement dimension mismatch");
        let series = self.series_structure()?;
        Ok(series.map_values(|ts| eval_series(ts, t)))
    }
}

/// Evaluate a series at a numeric point.
pub fn eval_series<K: Ring>(ts: &TSeries<K>, t: &[K]) -> K {
    let mut acc = K::zero();
    for (exps, coeff) in ts.iter() {
        let mut term = coeff.clone();
        for (a, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                term = term.mul_ref(&t[a]);
            }
        }
        acc.add_assign_ref(&term);
    }
    acc
}

/// Translate a structure by a formal displacement, computing all degree
/// pieces through total degree `order`.
pub fn translate<K: Ring>(s: &AiryStructure<K>, order: u32) -> Translation<K> {
    let d = s.dim();
    let du = d as u32;
    let half = K::from_rat(&rat(1, 2));
    let ord = order as usize;
    let zs = || TSeries::<K>::new(d, order);
    let tv: Vec<TSeries<K>> = (0..d).map(|a| TSeries::var(d, order, a)).collect();

    // Genus-zero one-point pieces: seeded by the cubic tensor, grown by
    // the same two elementary moves as the outputs themselves.
    let mut one: Vec<Vec<TSeries<K>>> = vec![vec![zs(); d]; ord + 1];
    if order >= 2 {
        for i in 0..du {
            let mut acc = zs();
            for a in 0..du {
                for b in 0..du {
                    let av = s.a.get(&[i, a, b]);
                    if !av.is_zero() {
                        acc = acc
                            + (tv[a as usize].clone() * tv[b as usize].clone())
                                .scale(&half.mul_ref(&av));
                    }
                }
            }
            one[2][i as usize] = acc;
        }
    }
    for n in 3..=ord {
        for i in 0..du {
            let mut acc = zs();
            for a in 0..du {
                for b in 0..du {
                    let bv = s.b.get(&[i, a, b]);
                    if !bv.is_zero() {
                        acc = acc
                            + (tv[a as usize].clone() * one[n - 1][b as usize].clone())
                                .scale(&bv);
                    }
                    let cv = s.c.get(&[i, a, b]);
                    if !cv.is_zero() {
                        let mut pair = zs();
                        for n1 in 2..=(n - 2) {
                            pair = pair
                                + one[n1][a as usize].clone() * one[n - n1][b as usize].clone();
                        }
                        acc = acc + pair.scale(&half.mul_ref(&cv));
                    }
                }
            }
            one[n][i as usize] = acc;
        }
    }

    // Genus-zero two-point pieces.
    let t2 = |i: u32, j: u32| (i as usize) * d + j as usize;
    let mut two: Vec<Vec<TSeries<K>>> = vec![vec![zs(); d * d]; ord + 1];
    if order >= 1 {
        for i in 0..du {
            for j in 0..du {
                let mut acc = zs();
                for a in 0..du {
                    let av = s.a.get(&[i, j, a]);
                    if !av.is_zero() {
                        acc = acc + tv[a as usize].clone().scale(&av);
                    }
                }
                two[1][t2(i, j)] = acc;
            }
        }
    }
    for n in 2..=ord {
        for i in 0..du {
            for j in 0..du {
                let mut acc = zs();
                for a in 0..du {
                    for b in 0..du {
                        let bv = s.b.get(&[i, a, b]);
                        if !bv.is_zero() {
                            acc = acc
                                + (tv[a as usize].clone() * two[n - 1][t2(b, j)].clone())
                                    .scale(&bv);
                        }
                        let cv = s.c.get(&[i, a, b]);
                        if !cv.is_zero() {
                            let mut pair = zs();
                            for n1 in 2..n {
                                pair = pair
                                    + one[n1][a as usize].clone()
                                        * two[n - n1][t2(b, j)].clone();
                            }
                            acc = acc + pair.scale(&cv);
                        }
                    }
                    let bj = s.b.get(&[i, j, a]);
                    if !bj.is_zero() {
                        acc = acc + one[n][a as usize].clone().scale(&bj);
                    }
                }
                two[n][t2(i, j)] = acc;
            }
        }
    }

    // Transported tensors, degree by degree.
    let t3 = |i: u32, j: u32, k: u32| ((i as usize) * d + j as usize) * d + k as usize;
    let mut at: Vec<Vec<TSeries<K>>> = vec![vec![zs(); d * d * d]; ord + 1];
    let mut bt = at.clone();
    let mut ct = at.clone();
    let mut dt: Vec<Vec<TSeries<K>>> = vec![vec![zs(); d]; ord + 1];
    for i in 0..du {
        for j in 0..du {
            for k in 0..du {
                at[0][t3(i, j, k)] = TSeries::constant(s.a.get(&[i, j, k]));
                bt[0][t3(i, j, k)] = TSeries::constant(s.b.get(&[i, j, k]));
                ct[0][t3(i, j, k)] = TSeries::constant(s.c.get(&[i, j, k]));
            }
        }
        dt[0][i as usize] = TSeries::constant(s.d.get(&[i]));
    }
    for n in 1..=ord {
        for i in 0..du {
            for j in 0..du {
                for k in 0..du {
                    let mut acc_a = zs();
                    let mut acc_b = zs();
                    let mut acc_c = zs();
                    for a in 0..du {
                        for b in 0..du {
                            let bv = s.b.get(&[i, a, b]);
                            if !bv.is_zero() {
                                let flow = tv[a as usize].clone();
                                acc_a = acc_a
                                    + (flow.clone() * at[n - 1][t3(b, j, k)].clone()).scale(&bv);
                                acc_b = acc_b
                                    + (flow.clone() * bt[n - 1][t3(b, j, k)].clone()).scale(&bv);
                                acc_c = acc_c
                                    + (flow * ct[n - 1][t3(b, j, k)].clone()).scale(&bv);
                            }
                            let cv = s.c.get(&[i, a, b]);
                            if !cv.is_zero() {
                                let mut pa = zs();
                                let mut pb = zs();
                                let mut pc = zs();
                                for n1 in 2..=n {
                                    let g = one[n1][a as usize].clone();
                                    pa = pa + g.clone() * at[n - n1][t3(b, j, k)].clone();
                                    pb = pb + g.clone() * bt[n - n1][t3(b, j, k)].clone();
                                    pc = pc + g * ct[n - n1][t3(b, j, k)].clone();
                                }
                                for n1 in 1..n {
                                    pa = pa
                                        + two[n1][t2(a, j)].clone()
                                            * two[n - n1][t2(b, k)].clone();
                                }
                                acc_a = acc_a + pa.scale(&cv);
                                acc_b = acc_b + pb.scale(&cv);
                                acc_c = acc_c + pc.scale(&cv);
                            }
                        }
                        let bja = s.b.get(&[i, j, a]);
                        if !bja.is_zero() {
                            acc_a = acc_a + two[n][t2(a, k)].clone().scale(&bja);
                        }
                        let bka = s.b.get(&[i, k, a]);
                        if !bka.is_zero() {
                            acc_a = acc_a + two[n][t2(a, j)].clone().scale(&bka);
                        }
                        let cka = s.c.get(&[i, k, a]);
                        if !cka.is_zero() {
                            acc_b = acc_b + two[n][t2(a, j)].clone().scale(&cka);
                        }
                    }
                    at[n][t3(i, j, k)] = acc_a;
                    bt[n][t3(i, j, k)] = acc_b;
                    ct[n][t3(i, j, k)] = acc_c;
                }
            }
            let mut acc_d = zs();
            for a in 0..du {
                for b in 0..du {
                    let bv = s.b.get(&[i, a, b]);
                    if !bv.is_zero() {
                        acc_d = acc_d
                            + (tv[a as usize].clone() * dt[n - 1][b as usize].clone()).scale(&bv);
                    }
                    let cv = s.c.get(&[i, a, b]);
                    if !cv.is_zero() {
                        // Both pieces are required for consistency with the
                        // resummed outputs: the two-point half-contraction
                        // and the one-point flow.
                        let mut acc = two[n][t2(a, b)].clone().scale(&half);
                        for n1 in 2..=n {
                            acc = acc + one[n1][a as usize].clone() * dt[n - n1][b as usize].clone();
                        }
                        acc_d = acc_d + acc.scale(&cv);
                    }
                }
            }
            dt[n][i as usize] = acc_d;
        }
    }

    Translation {
        dim: d,
        order,
        one_point: one,
        two_point: two,
        at,
        bt,
        ct,
        dt,
        grading_source: s.clone(),
    }
}

/// Resum the outputs of `s` around a formal displacement:
/// `Σ_m (1/m!) Σ_{j₁..j_m} F_{g,n+m}(idx, j₁..j_m) t_{j₁}⋯t_{j_m}`,
/// through total degree `order`.
///
/// This is the quantity the translated structure's own outputs must
/// reproduce; the evaluator must carry a budget covering `2g−2+n+order`.
pub fn shifted_free_energy<K: Ring>(
    ev: &mut Evaluator<K>,
    g: u32,
    idx: &[u32],
    order: u32,
) -> Result<TSeries<K>> {
    let d = ev.structure().dim();
    let mut acc = TSeries::new(d, order);
    for m in 0..=order {
        for js in sorted_multisets(d, m as usize) {
            let mut full = idx.to_vec();
            full.extend_from_slice(&js);
            let val = ev.fgn(g, &full)?;
            if val.is_zero() {
                continue;
            }
            // 1/∏(multiplicity!) — the m! of the resummation cancels the
            // count of orderings of the multiset.
            let mut denom = Rat::from_integer(1.into());
            let mut exps = vec![0u16; d];
            for &j in &js {
                exps[j as usize] += 1;
            }
            for &e in &exps {
                denom *= factorial(e as u64);
            }
            let coeff = K::from_rat(&denom.recip());
            acc.add_term(&exps, val.mul_ref(&coeff));
        }
    }
    Ok(acc)
}

/// Check that the translated structure reproduces the resummed outputs of
/// the source for every `(g, idx)` within the budget.  Returns the number
/// of identities verified.
pub fn translation_consistency<K: Ring>(
    s: &AiryStructure<K>,
    order: u32,
    budget: i64,
) -> Result<usize> {
    let d = s.dim();
    let series = translate(s, order).series_structure()?;
    let mut tev: Evaluator<TSeries<K>> = Evaluator::new(Arc::new(series));
    tev.set_budget(budget);
    let mut sev: Evaluator<K> = Evaluator::new(Arc::new(s.clone()));
    sev.set_budget(budget + order as i64);
    let mut checks = 0;
    for g in 0..=((budget / 2 + 1) as u32) {
        for n in 1..=((budget + 2) as usize) {
            let cost = 2 * g as i64 - 2 + n as i64;
            if cost < 1 || cost > budget {
                continue;
            }
            for idx in sorted_multisets(d, n) {
                let lhs = tev.fgn(g, &idx)?;
                let rhs = shifted_free_energy(&mut sev, g, &idx, order)?;
                if lhs != rhs {
                    return Err(AiryError::Unsupported(format!(
                        "translation consistency failed at genus {g}, indices {idx:?}"
                    )));
                }
                checks += 1;
            }
        }
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::validate_relations;
    use crate::scalar::rat;
    use crate::structure::FieldSpec;
    use crate::tensor::Symmetry;

    fn dim1(a: i64, b: i64, c: i64, dv: i64) -> AiryStructure<Rat> {
        let mut s = AiryStructure::new("dim1", 1, FieldSpec::Rational);
        s.a.set(&[0, 0, 0], rat(a, 1));
        s.b.set(&[0, 0, 0], rat(b, 1));
        s.c.set(&[0, 0, 0], rat(c, 1));
        s.d.set(&[0], rat(dv, 1));
        s
    }

    fn two_blocks() -> AiryStructure<Rat> {
        let mut s = AiryStructure::new("blocks", 2, FieldSpec::Rational);
        s.a.set(&[0, 0, 0], rat(1, 1));
        s.b.set(&[0, 0, 0], rat(2, 1));
        s.c.set(&[0, 0, 0], rat(3, 1));
        s.d.set(&[0], rat(4, 1));
        s.a.set(&[1, 1, 1], rat(5, 1));
        s.b.set(&[1, 1, 1], rat(1, 1));
        s.c.set(&[1, 1, 1], rat(2, 1));
        s.d.set(&[1], rat(3, 1));
        s
    }

    fn uparam(d: usize, entries: &[(u32, u32, Rat)]) -> SparseTensor<Rat> {
        let mut u = SparseTensor::new(2, d, Symmetry::Full);
        for (a, b, v) in entries {
            u.set(&[*a, *b], v.clone());
        }
        u
    }

    #[test]
    fn gauge_one_dimensional_example() {
        let s = dim1(1, 0, 0, 0);
        let g = gauge(&s, &uparam(1, &[(0, 0, rat(3, 1))]));
        assert_eq!(g.a.get(&[0, 0, 0]), rat(1, 1));
        assert_eq!(g.b.get(&[0, 0, 0]), rat(3, 1));
        assert_eq!(g.c.get(&[0, 0, 0]), rat(9, 1));
        assert_eq!(g.d.get(&[0]), rat(3, 2));
    }

    #[test]
    fn scalings_one_dimensional_examples() {
        let ones = dim1(1, 1, 1, 1);
        let s2 = scale(&ones, &rat(2, 1)).unwrap();
        assert_eq!(
            (
                s2.a.get(&[0, 0, 0]),
                s2.b.get(&[0, 0, 0]),
                s2.c.get(&[0, 0, 0]),
                s2.d.get(&[0])
            ),
            (rat(8, 1), rat(2, 1), rat(1, 2), rat(2, 1))
        );
        let h3 = hbar_rescale(&ones, &rat(3, 1)).unwrap();
        assert_eq!(
            (
                h3.a.get(&[0, 0, 0]),
                h3.b.get(&[0, 0, 0]),
                h3.c.get(&[0, 0, 0]),
                h3.d.get(&[0])
            ),
            (rat(1, 3), rat(1, 1), rat(3, 1), rat(1, 1))
        );
        assert!(scale(&ones, &rat(0, 1)).is_err());
    }

    #[test]
    fn gauge_preserves_validity_and_forms_group() {
        let s = two_blocks();
        assert!(validate_relations(&s, true).is_ok());
        let u = uparam(2, &[(0, 0, rat(1, 2)), (0, 1, rat(-2, 3)), (1, 1, rat(3, 1))]);
        let v = uparam(2, &[(0, 0, rat(-1, 1)), (0, 1, rat(1, 5)), (1, 1, rat(2, 7))]);
        let gu = gauge(&s, &u);
        assert!(validate_relations(&gu, true).is_ok());
        let lhs = gauge(&gu, &v);
        let rhs = gauge(&s, &gauge_compose(&u, &v));
        assert_eq!(lhs.b, rhs.b);
        assert_eq!(lhs.c, rhs.c);
        assert_eq!(lhs.d, rhs.d);
    }

    #[test]
    fn gauge_intertwines_with_scalings() {
        let s = two_blocks();
        let u = uparam(2, &[(0, 0, rat(1, 1)), (0, 1, rat(2, 1)), (1, 1, rat(-1, 2))]);
        let lam = rat(5, 3);
        let z = rat(-7, 4);
        let ul2 = u.map_values(|x| x.mul_ref(&(&lam * &lam)));
        let uz = u.map_values(|x| x.mul_ref(&z.inv().unwrap()));
        let lhs = gauge(&scale(&s, &lam).unwrap(), &u);
        let rhs = scale(&gauge(&s, &ul2), &lam).unwrap();
        assert_eq!((lhs.a.clone(), lhs.b.clone()), (rhs.a.clone(), rhs.b.clone()));
        assert_eq!((lhs.c, lhs.d), (rhs.c, rhs.d));
        let lhs = gauge(&hbar_rescale(&s, &z).unwrap(), &u);
        let rhs = hbar_rescale(&gauge(&s, &uz), &z).unwrap();
        assert_eq!((lhs.a.clone(), lhs.b.clone()), (rhs.a.clone(), rhs.b.clone()));
        assert_eq!((lhs.c, lhs.d), (rhs.c, rhs.d));
    }

    #[test]
    fn translation_pieces_match_frozen_values() {
        let s = dim1(2, 3, 5, 7);
        let tr = translate(&s, 3);
        let t = |e: u16| vec![e];
        // One- and two-point pieces.
        assert_eq!(tr.one_point(2, 0).coeff(&t(2)), rat(1, 1));
        assert_eq!(tr.one_point(3, 0).coeff(&t(3)), rat(3, 1));
        assert_eq!(tr.two_point(1, 0, 0).coeff(&t(1)), rat(2, 1));
        assert_eq!(tr.two_point(2, 0, 0).coeff(&t(2)), rat(9, 1));
        assert_eq!(tr.two_point(3, 0, 0).coeff(&t(3)), rat(46, 1));
        // Transported tensor pieces.
        assert_eq!(tr.a_piece(0, 0, 0, 0).constant_term(), rat(2, 1));
        assert_eq!(tr.a_piece(1, 0, 0, 0).coeff(&t(1)), rat(18, 1));
        assert_eq!(tr.a_piece(2, 0, 0, 0).coeff(&t(2)), rat(138, 1));
        assert_eq!(tr.a_piece(3, 0, 0, 0).coeff(&t(3)), rat(990, 1));
        assert_eq!(tr.b_piece(1, 0, 0, 0).coeff(&t(1)), rat(19, 1));
        assert_eq!(tr.b_piece(2, 0, 0, 0).coeff(&t(2)), rat(117, 1));
        assert_eq!(tr.b_piece(3, 0, 0, 0).coeff(&t(3)), rat(721, 1));
        assert_eq!(tr.c_piece(1, 0, 0, 0).coeff(&t(1)), rat(15, 1));
        assert_eq!(tr.c_piece(2, 0, 0, 0).coeff(&t(2)), rat(70, 1));
        assert_eq!(tr.c_piece(3, 0, 0, 0).coeff(&t(3)), rat(360, 1));
        assert_eq!(tr.d_piece(1, 0).coeff(&t(1)), rat(26, 1));
        assert_eq!(tr.d_piece(2, 0).coeff(&t(2)), rat(271, 2));
        assert_eq!(tr.d_piece(3, 0).coeff(&t(3)), rat(1513, 2));
    }

    #[test]
    fn translation_consistency_one_dimensional() {
        let s = dim1(2, 3, 5, 7);
        let checks = translation_consistency(&s, 3, 3).unwrap();
        assert_eq!(checks, 7);
    }

    #[test]
    fn eval_at_zero_displacement_is_identity() {
        let s = two_blocks();
        let tr = translate(&s, 2);
        let back = tr.eval_at(&[rat(0, 1), rat(0, 1)]).unwrap();
        assert_eq!(back.a, s.a);
        assert_eq!(back.b, s.b);
        assert_eq!(back.c, s.c);
        assert_eq!(back.d, s.d);
    }
}
