//! Dense matrices and Gaussian elimination over any exact field.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::Q;

/// Arithmetic context for matrix entries.
pub trait Scalars {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;
    fn inv(&self, x: &Self::Elem) -> Result<Self::Elem>;
}

/// The rationals.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rationals;

impl Scalars for Rationals {
    type Elem = Q;

    fn zero(&self) -> Q {
        Q::zero()
    }
    fn one(&self) -> Q {
        Q::one()
    }
    fn is_zero(&self, x: &Q) -> bool {
        x.is_zero()
    }
    fn add(&self, x: &Q, y: &Q) -> Q {
        x + y
    }
    fn sub(&self, x: &Q, y: &Q) -> Q {
        x - y
    }
    fn mul(&self, x: &Q, y: &Q) -> Q {
        x * y
    }
    fn neg(&self, x: &Q) -> Q {
        -x
    }
    fn inv(&self, x: &Q) -> Result<Q> {
        if x.is_zero() {
            Err(crate::Error::DivisionByZero)
        } else {
            Ok(x.recip())
        }
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type QMat = Mat<Q>;

impl<T: Clone> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Mat { rows, cols, data: vec![value; rows * cols] }
    }

    /// Panics if rows have unequal length.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Mat { rows: n, cols, data }
    }

    pub fn from_cols(cols: Vec<Vec<T>>, rows: usize) -> Self {
        let c = cols.len();
        for col in &cols {
            assert_eq!(col.len(), rows, "ragged matrix columns");
        }
        Mat::from_fn(rows, c, |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn col_vecs(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Mat<T>) -> Self {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// Vertical concatenation.
    pub fn vcat(&self, other: &Mat<T>) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Mat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Mat::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn select_rows(&self, range: std::ops::Range<usize>) -> Self {
        Mat {
            rows: range.len(),
            cols: self.cols,
            data: self.data[range.start * self.cols..range.end * self.cols].to_vec(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

pub fn identity<S: Scalars>(ops: &S, n: usize) -> Mat<S::Elem> {
    Mat::from_fn(n, n, |i, j| if i == j { ops.one() } else { ops.zero() })
}

pub fn zeros<S: Scalars>(ops: &S, rows: usize, cols: usize) -> Mat<S::Elem> {
    Mat::filled(rows, cols, ops.zero())
}

pub fn mat_mul<S: Scalars>(ops: &S, a: &Mat<S::Elem>, b: &Mat<S::Elem>) -> Mat<S::Elem> {
    assert_eq!(a.cols, b.rows, "matrix product shape mismatch");
    let mut out = zeros(ops, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if ops.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let y = b.get(k, j);
                if ops.is_zero(y) {
                    continue;
                }
                let cur = ops.add(out.get(i, j), &ops.mul(x, y));
                out.set(i, j, cur);
            }
        }
    }
    out
}

pub fn mat_vec<S: Scalars>(ops: &S, a: &Mat<S::Elem>, v: &[S::Elem]) -> Vec<S::Elem> {
    assert_eq!(a.cols, v.len());
    (0..a.rows)
        .map(|i| {
            let mut acc = ops.zero();
            for (j, x) in v.iter().enumerate() {
                let aij = a.get(i, j);
                if !ops.is_zero(aij) && !ops.is_zero(x) {
                    acc = ops.add(&acc, &ops.mul(aij, x));
                }
            }
            acc
        })
        .collect()
}

pub fn mat_sub<S: Scalars>(ops: &S, a: &Mat<S::Elem>, b: &Mat<S::Elem>) -> Mat<S::Elem> {
    assert!(a.rows == b.rows && a.cols == b.cols);
    Mat::from_fn(a.rows, a.cols, |i, j| ops.sub(a.get(i, j), b.get(i, j)))
}

pub fn is_zero_mat<S: Scalars>(ops: &S, a: &Mat<S::Elem>) -> bool {
    a.data.iter().all(|x| ops.is_zero(x))
}

/// Reduced row echelon form together with the pivot columns.
pub fn rref<S: Scalars>(ops: &S, a: &Mat<S::Elem>) -> Result<(Mat<S::Elem>, Vec<usize>)> {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !ops.is_zero(m.get(i, c))) else {
            continue;
        };
        if p != r {
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, r * m.cols + j);
            }
        }
        let inv = ops.inv(m.get(r, c))?;
        for j in c..m.cols {
            let v = ops.mul(m.get(r, j), &inv);
            m.set(r, j, v);
        }
        for i in 0..m.rows {
            if i == r {
                continue;
            }
            let f = m.get(i, c).clone();
            if ops.is_zero(&f) {
                continue;
            }
            for j in c..m.cols {
                let rv = m.get(r, j);
                if ops.is_zero(rv) {
                    continue;
                }
                let v = ops.sub(m.get(i, j), &ops.mul(&f, rv));
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok((m, pivots))
}

pub fn rank<S: Scalars>(ops: &S, a: &Mat<S::Elem>) -> Result<usize> {
    Ok(rref(ops, a)?.1.len())
}

/// Basis of `{x : A x = 0}`, returned as rows in reduced echelon form.
pub fn right_kernel<S: Scalars>(ops: &S, a: &Mat<S::Elem>) -> Result<Mat<S::Elem>> {
    let (r, pivots) = rref(ops, a)?;
    let n = a.cols;
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![ops.zero(); n];
        v[f] = ops.one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = ops.neg(r.get(row, f));
        }
        basis.push(v);
    }
    let k = Mat::from_rows(basis, n);
    Ok(rref(ops, &k)?.0)
}

/// Basis of `{y : yᵀ A = 0}` as rows in reduced echelon form.
pub fn left_kernel<S: Scalars>(ops: &S, a: &Mat<S::Elem>) -> Result<Mat<S::Elem>> {
    right_kernel(ops, &a.transpose())
}

/// Row space of `a` in reduced echelon form, zero rows dropped.
pub fn row_space<S: Scalars>(ops: &S, a: &Mat<S::Elem>) -> Result<Mat<S::Elem>> {
    let (r, pivots) = rref(ops, a)?;
    Ok(r.select_rows(0..pivots.len()))
}

/// Solves `A X = B`; `None` when the system is inconsistent. Free
/// variables are set to zero.
pub fn solve<S: Scalars>(ops: &S, a: &Mat<S::Elem>, b: &Mat<S::Elem>) -> Result<Option<Mat<S::Elem>>> {
    assert_eq!(a.rows, b.rows);
    let aug = a.hcat(b);
    let (r, pivots) = rref(ops, &aug)?;
    if pivots.iter().any(|&p| p >= a.cols) {
        return Ok(None);
    }
    let mut x = zeros(ops, a.cols, b.cols);
    for (row, &p) in pivots.iter().enumerate() {
        for j in 0..b.cols {
            x.set(p, j, r.get(row, a.cols + j).clone());
        }
    }
    Ok(Some(x))
}

/// Determinant by elimination.
pub fn determinant<S: Scalars>(ops: &S, a: &Mat<S::Elem>) -> Result<S::Elem> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut det = ops.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !ops.is_zero(m.get(i, c))) else {
            return Ok(ops.zero());
        };
        if p != c {
            for j in 0..n {
                m.data.swap(p * n + j, c * n + j);
            }
            det = ops.neg(&det);
        }
        let pivot = m.get(c, c).clone();
        det = ops.mul(&det, &pivot);
        let inv = ops.inv(&pivot)?;
        for i in c + 1..n {
            let f = ops.mul(m.get(i, c), &inv);
            if ops.is_zero(&f) {
                continue;
            }
            for j in c..n {
                let v = ops.sub(m.get(i, j), &ops.mul(&f, m.get(c, j)));
                m.set(i, j, v);
            }
        }
    }
    Ok(det)
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse<S: Scalars>(ops: &S, a: &Mat<S::Elem>) -> Result<Option<Mat<S::Elem>>> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    if n == 0 {
        return Ok(Some(a.clone()));
    }
    let (r, pivots) = rref(ops, &a.hcat(&identity(ops, n)))?;
    if pivots.len() < n || pivots[n - 1] >= n {
        return Ok(None);
    }
    Ok(Some(Mat::from_fn(n, n, |i, j| r.get(i, n + j).clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(rows: &[&[i64]]) -> QMat {
        let cols = rows.first().map_or(0, |r| r.len());
        Mat::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect()).collect(),
            cols,
        )
    }

    #[test]
    fn kernel_annihilates() {
        let a = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let k = right_kernel(&Rationals, &a).unwrap();
        assert_eq!(k.rows(), 1);
        let prod = mat_mul(&Rationals, &a, &k.transpose());
        assert!(is_zero_mat(&Rationals, &prod));
        assert_eq!(k.row(0), &[Q::one(), Q::one(), -Q::one()]);
    }

    #[test]
    fn inverse_and_solve() {
        let a = qm(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&Rationals, &a).unwrap().unwrap();
        assert_eq!(mat_mul(&Rationals, &a, &inv), identity(&Rationals, 2));
        assert!(inverse(&Rationals, &qm(&[&[1, 2], &[2, 4]])).unwrap().is_none());
        let b = qm(&[&[1], &[3]]);
        assert!(solve(&Rationals, &qm(&[&[1, 2], &[2, 4]]), &b).unwrap().is_none());
    }

    #[test]
    fn empty_shapes() {
        let a: QMat = Mat::from_rows(vec![], 3);
        assert_eq!(right_kernel(&Rationals, &a).unwrap().rows(), 3);
        let b: QMat = Mat::from_cols(vec![], 4);
        assert_eq!(left_kernel(&Rationals, &b).unwrap().rows(), 4);
        assert_eq!(rank(&Rationals, &b).unwrap(), 0);
    }
}
