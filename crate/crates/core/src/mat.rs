//! Dense row-major matrices over a [`Field`].

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{Elem, Field};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{op}: shape mismatch {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{0}: matrix is not square")]
    NotSquare(&'static str),
}

#[derive(Clone)]
pub struct Mat {
    field: Arc<Field>,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl PartialEq for Mat {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
            && *self.field == *other.field
    }
}

impl Eq for Mat {}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<u32> = self.row(i).iter().map(|&e| self.field.encoding(e)).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

/// Result of [`Mat::rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Mat,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Mat {
    pub fn zeros(field: &Arc<Field>, rows: usize, cols: usize) -> Mat {
        Mat {
            field: field.clone(),
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &Arc<Field>, n: usize) -> Mat {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Elem::ONE);
        }
        m
    }

    pub fn from_vec(field: &Arc<Field>, rows: usize, cols: usize, data: Vec<Elem>) -> Mat {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Mat {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn from_rows(field: &Arc<Field>, rows: &[Vec<Elem>]) -> Mat {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat::from_vec(field, rows.len(), cols, data)
    }

    /// Builds a matrix from integers mapped into the prime subfield.
    pub fn from_ints(field: &Arc<Field>, rows: &[&[i64]]) -> Mat {
        let rows: Vec<Vec<Elem>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_int(x)).collect())
            .collect();
        Mat::from_rows(field, &rows)
    }

    pub fn from_fn(
        field: &Arc<Field>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Elem,
    ) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat::from_vec(field, rows, cols, data)
    }

    #[inline]
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Elem] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn add(&self, other: &Mat) -> Result<Mat, LinalgError> {
        self.same_shape(other, "add")?;
        let f = &self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Mat::from_vec(f, self.rows, self.cols, data))
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat, LinalgError> {
        self.same_shape(other, "sub")?;
        let f = &self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(Mat::from_vec(f, self.rows, self.cols, data))
    }

    pub fn scale(&self, c: Elem) -> Mat {
        let f = &self.field;
        let data = self.data.iter().map(|&a| f.mul(a, c)).collect();
        Mat::from_vec(f, self.rows, self.cols, data)
    }

    /// `self - lambda * I`.
    pub fn sub_scalar(&self, lambda: Elem) -> Mat {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = self.field.sub(m.get(i, i), lambda);
            m.set(i, i, v);
        }
        m
    }

    fn same_shape(&self, other: &Mat, op: &'static str) -> Result<(), LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::ShapeMismatch {
                op,
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(())
    }

    fn check_mul(&self, other: &Mat) -> Result<(), LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch {
                op: "mul",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(())
    }

    /// Exact product; GF(2) goes through the bit-packed kernel.
    pub fn mul(&self, other: &Mat) -> Result<Mat, LinalgError> {
        self.check_mul(other)?;
        if self.field.is_gf2() {
            Ok(self.mul_gf2_packed(other))
        } else {
            Ok(self.mul_rows(other))
        }
    }

    /// Generic row-combination product, usable over any field.
    pub fn mul_generic(&self, other: &Mat) -> Result<Mat, LinalgError> {
        self.check_mul(other)?;
        Ok(self.mul_rows(other))
    }

    /// Textbook inner-product loop. Slow; kept as a reference path.
    pub fn mul_naive(&self, other: &Mat) -> Result<Mat, LinalgError> {
        self.check_mul(other)?;
        let f = &self.field;
        Ok(Mat::from_fn(f, self.rows, other.cols, |i, j| {
            (0..self.cols).fold(Elem::ZERO, |acc, k| {
                f.add(acc, f.mul(self.get(i, k), other.get(k, j)))
            })
        }))
    }

    fn mul_rows(&self, other: &Mat) -> Mat {
        let f = &self.field;
        let n = other.cols;
        let mut out = Mat::zeros(f, self.rows, n);
        for i in 0..self.rows {
            let acc = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                if a == Elem::ONE {
                    for (x, &b) in acc.iter_mut().zip(brow) {
                        *x = f.add(*x, b);
                    }
                } else {
                    for (x, &b) in acc.iter_mut().zip(brow) {
                        if !b.is_zero() {
                            *x = f.add(*x, f.mul(a, b));
                        }
                    }
                }
            }
        }
        out
    }

    fn mul_gf2_packed(&self, other: &Mat) -> Mat {
        let n = other.cols;
        let words = n.div_ceil(64);
        let mut packed = vec![0u64; other.rows * words];
        for k in 0..other.rows {
            for (j, &b) in other.row(k).iter().enumerate() {
                if !b.is_zero() {
                    packed[k * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        let mut out = Mat::zeros(&self.field, self.rows, n);
        let mut acc = vec![0u64; words];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|w| *w = 0);
            for (k, &a) in self.row(i).iter().enumerate() {
                if !a.is_zero() {
                    for (w, &b) in acc.iter_mut().zip(&packed[k * words..(k + 1) * words]) {
                        *w ^= b;
                    }
                }
            }
            let row = out.row_mut(i);
            for (j, x) in row.iter_mut().enumerate() {
                if acc[j / 64] >> (j % 64) & 1 == 1 {
                    *x = Elem::ONE;
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.rows, "vector length mismatch");
        let f = &self.field;
        let mut out = vec![Elem::ZERO; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (x, &b) in out.iter_mut().zip(self.row(k)) {
                if !b.is_zero() {
                    *x = f.add(*x, f.mul(a, b));
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(Elem::ZERO, |acc, (&a, &b)| {
                    f.add(acc, f.mul(a, b))
                })
            })
            .collect()
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Mat) -> Mat {
        let f = &self.field;
        let (r2, c2) = (other.rows, other.cols);
        Mat::from_fn(f, self.rows * r2, self.cols * c2, |i, j| {
            f.mul(self.get(i / r2, j / c2), other.get(i % r2, j % c2))
        })
    }

    /// Reduced row-echelon form.
    pub fn rref(&self) -> Rref {
        let f = self.field.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, piv);
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for x in m.row_mut(r) {
                *x = f.mul(*x, inv);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                m.row_axpy(i, r, f.neg(factor));
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            reduced: m,
            rank: r,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of the right null space `{v : A v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Elem>> {
        let Rref {
            reduced,
            rank,
            pivots,
        } = self.rref();
        let f = &self.field;
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![Elem::ZERO; self.cols];
                v[free] = Elem::ONE;
                for (t, &pc) in pivots.iter().enumerate().take(rank) {
                    v[pc] = f.neg(reduced.get(t, free));
                }
                v
            })
            .collect()
    }

    /// Basis of the left null space `{v : v A = 0}`.
    pub fn left_kernel(&self) -> Vec<Vec<Elem>> {
        self.transpose().kernel()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn inverse(&self) -> Option<Mat> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let f = &self.field;
        let aug = Mat::from_fn(f, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j)
            } else if j - n == i {
                Elem::ONE
            } else {
                Elem::ZERO
            }
        });
        let r = aug.rref();
        if r.rank < n || r.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Mat::from_fn(f, n, n, |i, j| r.reduced.get(i, n + j)))
    }

    pub fn trace(&self) -> Elem {
        let f = &self.field;
        (0..self.rows.min(self.cols)).fold(Elem::ZERO, |acc, i| f.add(acc, self.get(i, i)))
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        let (lo, hi) = (a.min(b), a.max(b));
        let (first, second) = self.data.split_at_mut(hi * c);
        first[lo * c..(lo + 1) * c].swap_with_slice(&mut second[..c]);
    }

    /// row[target] += factor * row[src]
    pub(crate) fn row_axpy(&mut self, target: usize, src: usize, factor: Elem) {
        let f = self.field.clone();
        let c = self.cols;
        if target == src {
            let scale = f.add(Elem::ONE, factor);
            for x in self.row_mut(target) {
                *x = f.mul(*x, scale);
            }
            return;
        }
        let (t, s) = if target < src {
            let (a, b) = self.data.split_at_mut(src * c);
            (&mut a[target * c..(target + 1) * c], &b[..c])
        } else {
            let (a, b) = self.data.split_at_mut(target * c);
            (&mut b[..c], &a[src * c..(src + 1) * c])
        };
        for (x, &y) in t.iter_mut().zip(s) {
            if !y.is_zero() {
                *x = f.add(*x, f.mul(factor, y));
            }
        }
    }
}

/// Incrementally maintained basis of a subspace in reduced echelon form.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Arc<Field>,
    dim: usize,
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(field: &Arc<Field>, dim: usize) -> Echelon {
        Echelon {
            field: field.clone(),
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<Elem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Subtracts the span from `v`; the result vanishes on every pivot column.
    pub fn reduce(&self, v: &mut [Elem]) {
        let f = &self.field;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c.is_zero() {
                continue;
            }
            let nc = f.neg(c);
            for (x, &y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = f.add(*x, f.mul(nc, y));
                }
            }
        }
    }

    /// Inserts `v`, keeping the basis fully reduced. Returns the reduced new
    /// row when `v` was outside the span.
    pub fn insert(&mut self, v: &[Elem]) -> Option<Vec<Elem>> {
        let f = self.field.clone();
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let pc = w.iter().position(|x| !x.is_zero())?;
        let inv = f.inv(w[pc]).expect("nonzero");
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let c = row[pc];
            if c.is_zero() {
                continue;
            }
            let nc = f.neg(c);
            for (x, &y) in row.iter_mut().zip(&w) {
                if !y.is_zero() {
                    *x = f.add(*x, f.mul(nc, y));
                }
            }
        }
        let pos = self.pivots.partition_point(|&p| p < pc);
        self.rows.insert(pos, w.clone());
        self.pivots.insert(pos, pc);
        Some(w)
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_zero())
    }

    /// Coordinates of a vector known to lie in the span.
    pub fn coordinates(&self, v: &[Elem]) -> Vec<Elem> {
        self.pivots.iter().map(|&pc| v[pc]).collect()
    }

    pub fn to_mat(&self) -> Mat {
        Mat::from_rows(&self.field, &self.rows).with_cols(self.dim)
    }
}

impl Mat {
    fn with_cols(mut self, cols: usize) -> Mat {
        if self.rows == 0 {
            self.cols = cols;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mat(f: &Arc<Field>, r: usize, c: usize, rng: &mut ChaCha8Rng) -> Mat {
        let q = f.order();
        Mat::from_fn(f, r, c, |_, _| Elem(rng.gen_range(0..q)))
    }

    #[test]
    fn identity_times_b() {
        let f = Arc::new(Field::new(5, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_mat(&f, 4, 3, &mut rng);
        assert_eq!(Mat::identity(&f, 4).mul(&b).unwrap(), b);
    }

    #[test]
    fn gf2_hand_product() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let a = Mat::from_ints(&f, &[&[1, 1], &[0, 1]]);
        let b = Mat::from_ints(&f, &[&[1, 0], &[1, 1]]);
        assert_eq!(a.mul(&b).unwrap(), Mat::from_ints(&f, &[&[0, 1], &[1, 1]]));
    }

    #[test]
    fn gf9_row_and_naive_paths_agree() {
        let f = Arc::new(Field::new(3, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let a = random_mat(&f, 7, 9, &mut rng);
            let b = random_mat(&f, 9, 5, &mut rng);
            assert_eq!(a.mul(&b).unwrap(), a.mul_naive(&b).unwrap());
        }
    }

    #[test]
    fn gf2_packed_matches_generic_up_to_512() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [1, 63, 64, 65, 130, 512] {
            let a = random_mat(&f, n, n, &mut rng);
            let b = random_mat(&f, n, n.max(3) - 2, &mut rng);
            assert_eq!(a.mul(&b).unwrap(), a.mul_generic(&b).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn shape_mismatch() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let a = Mat::zeros(&f, 2, 3);
        assert!(matches!(
            a.mul(&a),
            Err(LinalgError::ShapeMismatch { op: "mul", .. })
        ));
    }

    #[test]
    fn rref_examples() {
        let f = Arc::new(Field::new(5, 1).unwrap());
        assert_eq!(Mat::zeros(&f, 3, 4).rref().rank, 0);
        let i = Mat::identity(&f, 4);
        let r = i.rref();
        assert_eq!((r.reduced.clone(), r.rank), (i, 4));
        assert_eq!(Mat::from_ints(&f, &[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        assert!(Mat::identity(&f, 3).kernel().is_empty());
        assert_eq!(Mat::zeros(&f, 3, 3).kernel().len(), 3);
        let k = Mat::from_ints(&f, &[&[1, 1]]).kernel();
        assert_eq!(k, vec![vec![Elem::ONE, Elem::ONE]]);
    }

    #[test]
    fn inverse_roundtrip() {
        let f = Arc::new(Field::new(7, 1).unwrap());
        let a = Mat::from_ints(&f, &[&[1, 2, 0], &[0, 1, 3], &[4, 0, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Mat::identity(&f, 3));
        assert!(Mat::from_ints(&f, &[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn echelon_tracks_span() {
        let f = Arc::new(Field::new(3, 1).unwrap());
        let mut e = Echelon::new(&f, 3);
        let v = |xs: [i64; 3]| xs.map(|x| f.from_int(x)).to_vec();
        assert!(e.insert(&v([0, 1, 2])).is_some());
        assert!(e.insert(&v([0, 2, 1])).is_none());
        assert!(e.insert(&v([1, 1, 0])).is_some());
        assert_eq!(e.pivots(), &[0, 1]);
        assert!(e.contains(&v([1, 0, 1])));
        assert!(!e.contains(&v([0, 0, 1])));
    }
}
