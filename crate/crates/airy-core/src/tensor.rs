//! Sparse tensors with declared index symmetries and canonical keys.
//!
//! The structure constants come in three shapes: fully symmetric (the cubic
//! term, and every output table of symmetric correlators), symmetric in the
//! trailing pair only (the second-derivative term `C^i_{jk} = C^i_{kj}`),
//! and asymmetric (the mixed term `B^i_{jk}`, where the two lower slots
//! play different roles).  Storing one canonical representative per orbit
//! keeps lookups exact and iteration order deterministic.

use std::collections::BTreeMap;

use crate::scalar::Ring;

/// Which permutations of the key are identified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// All indices interchangeable; canonical key is sorted ascending.
    Full,
    /// Last two of three indices interchangeable.
    TailPair,
    /// No identifications.
    None,
}

impl Symmetry {
    pub fn canonical(self, key: &[u32]) -> Vec<u32> {
        let mut k = key.to_vec();
        match self {
            Symmetry::Full => k.sort_unstable(),
            Symmetry::TailPair => {
                assert_eq!(k.len(), 3, "tail-pair symmetry is for arity 3");
                if k[1] > k[2] {
                    k.swap(1, 2);
                }
            }
            Symmetry::None => {}
        }
        k
    }
}

/// A duplicate key carrying two different values — surfaced by loaders as a
/// symmetry-consistency violation rather than silently resolved.
#[derive(Clone, Debug)]
pub struct Inconsistency<K> {
    pub key: Vec<u32>,
    pub kept: K,
    pub rejected: K,
}

/// Sparse exact tensor over a finite index range `0..dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseTensor<K: Ring> {
    arity: usize,
    dim: usize,
    sym: Symmetry,
    map: BTreeMap<Vec<u32>, K>,
}

impl<K: Ring> SparseTensor<K> {
    pub fn new(arity: usize, dim: usize, sym: Symmetry) -> Self {
        SparseTensor {
            arity,
            dim,
            sym,
            map: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symmetry(&self) -> Symmetry {
        self.sym
    }

    fn check_key(&self, key: &[u32]) {
        assert_eq!(key.len(), self.arity, "tensor key arity mismatch");
        for &i in key {
            assert!((i as usize) < self.dim, "tensor index out of range");
        }
    }

    /// Entry at `key` up to declared symmetry; zero when absent.
    pub fn get(&self, key: &[u32]) -> K {
        self.check_key(key);
        let k = self.sym.canonical(key);
        self.map.get(&k).cloned().unwrap_or_else(K::zero)
    }

    pub fn get_ref(&self, key: &[u32]) -> Option<&K> {
        self.check_key(key);
        let k = self.sym.canonical(key);
        self.map.get(&k)
    }

    /// Overwrite the orbit of `key`; zero values delete the entry.
    pub fn set(&mut self, key: &[u32], value: K) {
        self.check_key(key);
        let k = self.sym.canonical(key);
        if value.is_zero() {
            self.map.remove(&k);
        } else {
            self.map.insert(k, value);
        }
    }

    /// Add into the orbit of `key`.
    pub fn add_to(&mut self, key: &[u32], value: K) {
        if value.is_zero() {
            return;
        }
        self.check_key(key);
        let k = self.sym.canonical(key);
        match self.map.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(value);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().add_ref(&value);
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    /// Insert raw entries, canonicalizing keys.  A key seen twice with equal
    /// values collapses silently; two different values for one orbit are
    /// reported so the caller can flag the input as symmetry-inconsistent.
    pub fn absorb_entries(
        &mut self,
        entries: impl IntoIterator<Item = (Vec<u32>, K)>,
    ) -> Vec<Inconsistency<K>> {
        let mut bad = Vec::new();
        for (key, value) in entries {
            self.check_key(&key);
            let k = self.sym.canonical(&key);
            match self.map.get(&k) {
                None => {
                    if !value.is_zero() {
                        self.map.insert(k, value);
                    }
                }
                Some(existing) => {
                    if *existing != value {
                        bad.push(Inconsistency {
                            key: k.clone(),
                            kept: existing.clone(),
                            rejected: value,
                        });
                    }
                }
            }
        }
        bad
    }

    /// Canonical entries in sorted key order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &K)> {
        self.map.iter()
    }

    /// Entries whose canonical key starts with `prefix`, in key order.
    ///
    /// Keys are stored lexicographically, so a prefix is a contiguous
    /// range; this is what makes the recursion's contractions sparse (they
    /// walk only stored entries instead of scanning the index cube).
    pub fn iter_prefix<'a>(
        &'a self,
        prefix: &[u32],
    ) -> impl Iterator<Item = (&'a Vec<u32>, &'a K)> {
        assert!(prefix.len() <= self.arity);
        let mut lo = prefix.to_vec();
        lo.resize(self.arity, 0);
        let mut hi = prefix.to_vec();
        hi.resize(self.arity, u32::MAX);
        self.map.range(lo..=hi)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map_values<L: Ring>(&self, f: impl Fn(&K) -> L) -> SparseTensor<L> {
        let mut out = SparseTensor::new(self.arity, self.dim, self.sym);
        for (k, v) in &self.map {
            let w = f(v);
            if !w.is_zero() {
                out.map.insert(k.clone(), w);
            }
        }
        out
    }

    /// Keys of the nonzero entries, canonical form, sorted.
    pub fn support(&self) -> Vec<Vec<u32>> {
        self.map.keys().cloned().collect()
    }
}

/// All sorted `arity`-multisets over `0..dim` (canonical keys of a fully
/// symmetric tensor), in lexicographic order.
pub fn sorted_multisets(dim: usize, arity: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(arity);
    fn rec(dim: u32, arity: usize, start: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == arity {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(dim, arity, i, cur, out);
            cur.pop();
        }
    }
    rec(dim as u32, arity, 0, &mut cur, &mut out);
    out
}

/// Number of distinct permutations of a sorted multiset — the symmetry
/// factor relating one canonical entry to its full orbit.
pub fn multiset_permutations(key: &[u32]) -> u64 {
    let mut total: u64 = 1;
    for k in 2..=key.len() as u64 {
        total *= k;
    }
    let mut i = 0;
    while i < key.len() {
        let j = key[i..].iter().take_while(|&&x| x == key[i]).count();
        let mut rep: u64 = 1;
        for k in 2..=j as u64 {
            rep *= k;
        }
        total /= rep;
        i += j;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat};

    #[test]
    fn canonical_orbits() {
        let mut a: SparseTensor<Rat> = SparseTensor::new(3, 4, Symmetry::Full);
        a.set(&[3, 0, 2], rat(5, 1));
        assert_eq!(a.get(&[0, 2, 3]), rat(5, 1));
        assert_eq!(a.get(&[2, 3, 0]), rat(5, 1));
        assert_eq!(a.support(), vec![vec![0, 2, 3]]);

        let mut c: SparseTensor<Rat> = SparseTensor::new(3, 4, Symmetry::TailPair);
        c.set(&[1, 3, 2], rat(7, 1));
        assert_eq!(c.get(&[1, 2, 3]), rat(7, 1));
        assert_eq!(c.get(&[1, 3, 2]), rat(7, 1));
        // The head slot does not participate.
        assert!(c.get(&[2, 1, 3]).is_zero());

        let mut b: SparseTensor<Rat> = SparseTensor::new(3, 4, Symmetry::None);
        b.set(&[1, 2, 3], rat(1, 1));
        assert!(b.get(&[1, 3, 2]).is_zero());
    }

    #[test]
    fn absorb_reports_inconsistent_duplicates() {
        let mut a: SparseTensor<Rat> = SparseTensor::new(3, 3, Symmetry::Full);
        let bad = a.absorb_entries(vec![
            (vec![0, 1, 2], rat(1, 1)),
            (vec![2, 1, 0], rat(1, 1)), // same orbit, same value: fine
            (vec![1, 0, 2], rat(3, 1)), // same orbit, new value: reported
        ]);
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].key, vec![0, 1, 2]);
        assert_eq!(bad[0].kept, rat(1, 1));
        assert_eq!(bad[0].rejected, rat(3, 1));
        assert_eq!(a.get(&[0, 1, 2]), rat(1, 1));
    }

    #[test]
    fn zero_handling() {
        let mut t: SparseTensor<Rat> = SparseTensor::new(1, 5, Symmetry::None);
        t.set(&[2], rat(4, 1));
        t.add_to(&[2], rat(-4, 1));
        assert!(t.is_empty());
        t.set(&[3], rat(0, 1));
        assert!(t.is_empty());
    }

    #[test]
    fn multiset_enumeration_and_orbit_sizes() {
        assert_eq!(sorted_multisets(3, 2).len(), 6);
        assert_eq!(sorted_multisets(2, 3).len(), 4);
        assert_eq!(multiset_permutations(&[0, 0, 0]), 1);
        assert_eq!(multiset_permutations(&[0, 1, 2]), 6);
        assert_eq!(multiset_permutations(&[0, 0, 1, 1]), 6);
        assert_eq!(multiset_permutations(&[1]), 1);
    }
}
