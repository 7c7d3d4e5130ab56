//! Dense exact linear algebra over an arbitrary field.
//!
//! The cohomology computations reduce to ranks and kernels of matrices
//! with a few hundred rows whose entries are rationals or number-field
//! elements; fraction-free tricks are unnecessary at that size, so this is
//! a plain Gaussian elimination with exact division.  Everything is
//! deterministic: pivots are chosen as the first nonzero entry in column
//! order.

use crate::scalar::{Field, Ring};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<K: Field> {
    rows: usize,
    cols: usize,
    data: Vec<K>,
}

impl<K: Field> Mat<K> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![K::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = K::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> K) -> Self {
        let mut m = Self::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<K>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[K] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out: Mat<K> = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let t = a.mul_ref(b);
                    out[(i, j)].add_assign_ref(&t);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[K]) -> Vec<K> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = K::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc.add_assign_ref(&self[(i, j)].mul_ref(&v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    /// `self - a * I` (square only).
    pub fn sub_scalar_identity(&self, a: &K) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] = out[(i, i)].sub_ref(a);
        }
        out
    }

    pub fn hstack(parts: &[&Mat<K>]) -> Self {
        assert!(!parts.is_empty());
        let rows = parts[0].rows;
        assert!(parts.iter().all(|m| m.rows == rows), "row count mismatch");
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Mat::zero(rows, cols);
        for i in 0..rows {
            let mut off = 0;
            for m in parts {
                for j in 0..m.cols {
                    out[(i, off + j)] = m[(i, j)].clone();
                }
                off += m.cols;
            }
        }
        out
    }

    pub fn vstack(parts: &[&Mat<K>]) -> Self {
        assert!(!parts.is_empty());
        let cols = parts[0].cols;
        assert!(parts.iter().all(|m| m.cols == cols), "column count mismatch");
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Mat::zero(rows, cols);
        let mut off = 0;
        for m in parts {
            for i in 0..m.rows {
                for j in 0..cols {
                    out[(off + i, j)] = m[(i, j)].clone();
                }
            }
            off += m.rows;
        }
        out
    }

    /// Row-reduce in place; returns the pivot columns.  The result is in
    /// reduced row echelon form.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].inv().expect("nonzero pivot");
            for j in c..self.cols {
                self[(r, j)] = self[(r, j)].mul_ref(&inv);
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        let t = f.mul_ref(&self[(r, j)]);
                        self[(i, j)] = self[(i, j)].sub_ref(&t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right null space, one vector per non-pivot column.
    pub fn nullspace(&self) -> Vec<Vec<K>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![K::zero(); self.cols];
            v[free] = K::one();
            for (r, &pc) in pivots.iter().enumerate() {
                // Row r reads: x_pc + sum_{j free} m[r,j] x_j = 0.
                v[pc] = -m[(r, free)].clone();
            }
            basis.push(v);
        }
        basis
    }
}

impl<K: Field> std::ops::Index<(usize, usize)> for Mat<K> {
    type Output = K;
    fn index(&self, (i, j): (usize, usize)) -> &K {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<K: Field> std::ops::IndexMut<(usize, usize)> for Mat<K> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut K {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat};

    fn m(rows: &[&[i64]]) -> Mat<Rat> {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        for v in &ns {
            let w = a.mul_vec(v);
            assert!(w.iter().all(Ring::is_zero));
        }
        assert_eq!(Mat::<Rat>::identity(4).rank(), 4);
        assert_eq!(Mat::<Rat>::zero(3, 5).nullspace().len(), 5);
    }

    #[test]
    fn stacking_and_products() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        let h = Mat::hstack(&[&a, &b]);
        assert_eq!(h.ncols(), 4);
        assert_eq!(h[(1, 2)], rat(1, 1));
        let v = Mat::vstack(&[&a, &b]);
        assert_eq!(v.nrows(), 4);
        assert_eq!(v[(3, 0)], rat(1, 1));
        let p = a.mul(&b);
        assert_eq!(p, m(&[&[2, 1], &[4, 3]]));
        let s = a.sub_scalar_identity(&rat(1, 1));
        assert_eq!(s, m(&[&[0, 2], &[3, 3]]));
    }

    #[test]
    fn nullspace_vectors_satisfy_the_system() {
        // Random-ish rectangular system with rational entries.
        let a: Mat<Rat> =
            Mat::from_fn(3, 6, |i, j| rat((i * j) as i64 % 5 - 2, 1 + (j as i64)));
        let ns = a.nullspace();
        assert_eq!(a.rank() + ns.len(), 6);
        for v in &ns {
            assert!(a.mul_vec(v).iter().all(Ring::is_zero));
        }
    }
}
