//! The correlator recursion.
//!
//! For a valid structure there is a unique array of fully symmetric
//! tensors `F_{g,n}` (genus `g`, one slot per label) extending
//! `F_{0,3} = A` and `F_{1,1} = D`, computed by descending induction on
//! `2g - 2 + n`: single out one slot, flow it through `B` onto each other
//! slot, and resolve it through `C` into either a genus-lowered correlator
//! or a product over a two-part split of the remaining slots.  Only stable
//! factors occur (`2h - 2 + m > 0`), which is also what terminates the
//! recursion.
//!
//! The recursion singles out the *first* slot, so its output is symmetric
//! only when the structure satisfies the compatibility identities — that
//! is a theorem, not a property of the algorithm, and [`Evaluator::check_symmetry`]
//! exists precisely to exercise it.  Canonically we put the smallest label
//! first; [`Evaluator::fgn_first`] forces any other choice.
//!
//! Values are memoized per `(g, sorted labels)`.  A soft complexity budget
//! on `2g - 2 + n` guards against accidental blowups; raise it explicitly
//! for larger computations.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::error::AiryError;
use crate::scalar::{Rat, Ring};
use crate::structure::AiryStructure;
use crate::tensor::{sorted_multisets, SparseTensor, Symmetry};

/// Default cap on `2g - 2 + n` for public entry points.
pub const DEFAULT_BUDGET: i64 = 12;

/// Memoizing evaluator for the correlators of one structure.
pub struct Evaluator<K: Ring> {
    structure: Arc<AiryStructure<K>>,
    memo: HashMap<(u32, Vec<u32>), K>,
    budget: i64,
}

/// Result of re-deriving one correlator from every distinct first slot.
#[derive(Clone, Debug)]
pub struct SymmetryReport<K> {
    /// Number of `(g, labels)` keys checked.
    pub checked: usize,
    /// Keys whose value depended on the choice of first slot, with the
    /// per-choice values observed.
    pub discrepancies: Vec<(u32, Vec<u32>, BTreeMap<u32, K>)>,
}

impl<K> SymmetryReport<K> {
    pub fn is_ok(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

impl<K: Ring> Evaluator<K> {
    pub fn new(structure: Arc<AiryStructure<K>>) -> Self {
        Evaluator {
            structure,
            memo: HashMap::new(),
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn structure(&self) -> &AiryStructure<K> {
        &self.structure
    }

    /// Replace the soft cap on `2g - 2 + n` (entry points only; inner
    /// recursive calls always have strictly smaller cost).
    pub fn set_budget(&mut self, budget: i64) {
        self.budget = budget;
    }

    pub fn budget(&self) -> i64 {
        self.budget
    }

    pub fn clear_cache(&mut self) {
        self.memo.clear();
    }

    pub fn cache_len(&self) -> usize {
        self.memo.len()
    }

    fn check_entry(&self, g: u32, idx: &[u32]) -> Result<(), AiryError> {
        let cost = 2 * g as i64 - 2 + idx.len() as i64;
        if cost > self.budget {
            return Err(AiryError::Budget {
                cost,
                limit: self.budget,
            });
        }
        let dim = self.structure.dim();
        for &i in idx {
            if i as usize >= dim {
                return Err(AiryError::IndexRange {
                    index: i as usize,
                    dim,
                });
            }
        }
        Ok(())
    }

    /// `F_{g,n}` at the given multiset of labels (order irrelevant).
    pub fn fgn(&mut self, g: u32, idx: &[u32]) -> Result<K, AiryError> {
        self.check_entry(g, idx)?;
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        Ok(self.fgn_raw(g as i64, idx))
    }

    /// Unchecked memoized recursion; `idx` must be sorted.
    fn fgn_raw(&mut self, g: i64, idx: Vec<u32>) -> K {
        let n = idx.len() as i64;
        if g < 0 || 2 * g - 2 + n < 0 || (g == 0 && n <= 2) {
            return K::zero();
        }
        let key = (g as u32, idx);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let (g_u, idx) = (key.0, key.1);
        let v = if g_u == 0 && n == 3 {
            self.structure.a.get(&idx)
        } else if g_u == 1 && n == 1 {
            self.structure.d.get(&idx)
        } else {
            self.recurse(g_u as i64, idx[0], &idx[1..])
        };
        self.memo.insert((g_u, idx), v.clone());
        v
    }

    /// One step with slot `i1` singled out; `j` is the rest (any order).
    fn recurse(&mut self, g: i64, i1: u32, j: &[u32]) -> K {
        let s = self.structure.clone();
        let mut acc = K::zero();

        // Flow i1 through B onto each remaining slot in turn.
        for m in 0..j.len() {
            let mut rest: Vec<u32> = Vec::with_capacity(j.len());
            rest.extend_from_slice(&j[..m]);
            rest.extend_from_slice(&j[m + 1..]);
            for (key, bval) in s.b.iter_prefix(&[i1, j[m]]) {
                let a = key[2];
                let mut args = Vec::with_capacity(rest.len() + 1);
                args.push(a);
                args.extend_from_slice(&rest);
                args.sort_unstable();
                let f = self.fgn_raw(g, args);
                if !f.is_zero() {
                    acc.add_assign_ref(&bval.mul_ref(&f));
                }
            }
        }

        // Resolve i1 through C: one genus-lowered term plus all stable
        // two-part splits of genus and remaining slots.
        let half = K::from_rat(&Rat::new(1.into(), 2.into()));
        for (key, cval) in s.c.iter_prefix(&[i1]) {
            let (a, b) = (key[1], key[2]);
            // Canonical storage has a <= b; the symmetric orbit contributes
            // twice when the pair is genuinely unordered.
            let mult = if a == b { 1 } else { 2 };

            let mut args = Vec::with_capacity(j.len() + 2);
            args.push(a);
            args.push(b);
            args.extend_from_slice(j);
            args.sort_unstable();
            let mut inner = self.fgn_raw(g - 1, args);

            for bits in 0..(1u32 << j.len()) {
                let mut j1: Vec<u32> = Vec::new();
                let mut j2: Vec<u32> = Vec::new();
                for (t, &x) in j.iter().enumerate() {
                    if bits >> t & 1 == 1 {
                        j1.push(x);
                    } else {
                        j2.push(x);
                    }
                }
                for h1 in 0..=g {
                    // Unstable factors vanish identically; skipping them
                    // also prevents the split from reproducing the parent.
                    if h1 == 0 && j1.len() < 2 {
                        continue;
                    }
                    if g - h1 == 0 && j2.len() < 2 {
                        continue;
                    }
                    let mut a1 = Vec::with_capacity(j1.len() + 1);
                    a1.push(a);
                    a1.extend_from_slice(&j1);
                    a1.sort_unstable();
                    let f1 = self.fgn_raw(h1, a1);
                    if f1.is_zero() {
                        continue;
                    }
                    let mut a2 = Vec::with_capacity(j2.len() + 1);
                    a2.push(b);
                    a2.extend_from_slice(&j2);
                    a2.sort_unstable();
                    let f2 = self.fgn_raw(g - h1, a2);
                    if f2.is_zero() {
                        continue;
                    }
                    inner.add_assign_ref(&f1.mul_ref(&f2));
                }
            }
            let weight = half.mul_ref(&K::from_int(mult)).mul_ref(cval);
            acc.add_assign_ref(&weight.mul_ref(&inner));
        }
        acc
    }

    /// The recursion with a forced first slot, bypassing canonicalization.
    /// Agreement across choices of `first` is exactly the symmetry theorem.
    pub fn fgn_first(&mut self, g: u32, first: u32, rest: &[u32]) -> Result<K, AiryError> {
        let mut all = vec![first];
        all.extend_from_slice(rest);
        self.check_entry(g, &all)?;
        let n = 1 + rest.len() as i64;
        if g == 0 && n == 3 {
            let mut key = all;
            key.sort_unstable();
            return Ok(self.structure.a.get(&key));
        }
        if g == 1 && n == 1 {
            return Ok(self.structure.d.get(&[first]));
        }
        if 2 * (g as i64) - 2 + n <= 0 {
            return Ok(K::zero());
        }
        let mut rest = rest.to_vec();
        rest.sort_unstable();
        Ok(self.recurse(g as i64, first, &rest))
    }

    /// Recompute one correlator once per distinct slot value used as the
    /// singled-out slot; returns the map `first slot -> value`.
    pub fn check_symmetry(
        &mut self,
        g: u32,
        idx: &[u32],
    ) -> Result<BTreeMap<u32, K>, AiryError> {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        let mut out = BTreeMap::new();
        for i in 0..idx.len() {
            if i > 0 && idx[i] == idx[i - 1] {
                continue;
            }
            let mut rest = idx.clone();
            rest.remove(i);
            let v = self.fgn_first(g, idx[i], &rest)?;
            out.insert(idx[i], v);
        }
        Ok(out)
    }

    /// Sweep all `(g, n)` with `0 < 2g - 2 + n <= budget` and all label
    /// multisets (optionally filtered), verifying first-slot independence.
    ///
    /// `mode_cap` restricts attention to multisets whose total grading
    /// mode is at most the cap — for truncated structures, correlators
    /// above the family's vanishing bound are identically zero in a way
    /// the truncation may not reproduce slot-by-slot, so callers pass the
    /// bound from the certificate.
    pub fn check_symmetry_all(
        &mut self,
        budget: i64,
        mode_cap: Option<Box<dyn Fn(u32, usize) -> usize>>,
    ) -> Result<SymmetryReport<K>, AiryError> {
        let dim = self.structure.dim();
        let mut checked = 0;
        let mut discrepancies = Vec::new();
        for g in 0u32.. {
            if 2 * g as i64 - 2 + 1 > budget {
                break;
            }
            for n in 1usize.. {
                let cost = 2 * g as i64 - 2 + n as i64;
                if cost > budget {
                    break;
                }
                if cost <= 0 {
                    continue;
                }
                for idx in sorted_multisets(dim, n) {
                    if let Some(cap) = &mode_cap {
                        let total: usize =
                            idx.iter().map(|&i| self.structure.mode_of(i)).sum();
                        if total > cap(g, n) {
                            continue;
                        }
                    }
                    let per_first = self.check_symmetry(g, &idx)?;
                    checked += 1;
                    let mut values = per_first.values();
                    if let Some(v0) = values.next() {
                        if values.any(|v| v != v0) {
                            discrepancies.push((g, idx, per_first));
                        }
                    }
                }
            }
        }
        Ok(SymmetryReport {
            checked,
            discrepancies,
        })
    }

    /// The full symmetric tensor `F_{g,n}`, one canonical entry per label
    /// multiset, zeros omitted.
    pub fn free_energy(&mut self, g: u32, n: usize) -> Result<SparseTensor<K>, AiryError> {
        let dim = self.structure.dim();
        let mut out = SparseTensor::new(n, dim, Symmetry::Full);
        for idx in sorted_multisets(dim, n) {
            let v = self.fgn(g, &idx)?;
            out.set(&idx, v);
        }
        Ok(out)
    }
}
