//! Dense small-matrix linear algebra over a [`Field`] level.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Elem, Field};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, a square matrix is required")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cofactor expansion is limited to size {max}, got {size}")]
    TooLarge { size: usize, max: usize },
}

/// Row-major matrix of encoded elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows<R: AsRef<[Elem]>>(rows: &[R]) -> Result<Matrix, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::Dimension("ragged rows".into()));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Elem>) -> Result<Matrix, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// An empty matrix with `cols` columns and no rows.
    pub fn empty(cols: usize) -> Matrix {
        Matrix { rows: 0, cols, data: Vec::new() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Elem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Elem]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        self.row_iter().map(|r| r.to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[Elem]) {
        assert_eq!(row.len(), self.cols, "row length");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Skew-symmetric with zero diagonal (alternating).
    pub fn is_alternating(&self, field: &Field) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                self.get(i, i) == 0
                    && (0..i).all(|j| self.get(i, j) == field.neg(self.get(j, i)))
            })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, field: &Field, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = field.add(out.get(i, j), field.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, field: &Field, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Dimension("matrix sum of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| field.add(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, field: &Field, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Dimension("matrix difference of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| field.sub(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, field: &Field, s: Elem) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| field.mul(a, s)).collect(),
        }
    }

    /// Entrywise map, e.g. a Frobenius power.
    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f(a)).collect() }
    }
}

/// Row vector times matrix.
pub fn vec_mul(field: &Field, v: &[Elem], m: &Matrix) -> Vec<Elem> {
    assert_eq!(v.len(), m.rows(), "vector length");
    let mut out = vec![0; m.cols()];
    for (k, &a) in v.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o = field.add(*o, field.mul(a, m.get(k, j)));
        }
    }
    out
}

pub fn dot(field: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

/// Reduces `m` in place to reduced row-echelon form and returns the pivot columns.
/// Zero rows are removed.
pub fn rref(field: &Field, m: &mut Matrix) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        let Some(p) = (r..m.rows()).find(|&i| m.get(i, c) != 0) else {
            continue;
        };
        m.swap_rows(r, p);
        let inv = field.inv(m.get(r, c)).expect("pivot is nonzero");
        if inv != 1 {
            for x in m.row_mut(r) {
                *x = field.mul(*x, inv);
            }
        }
        for i in 0..m.rows() {
            if i == r {
                continue;
            }
            let f = m.get(i, c);
            if f == 0 {
                continue;
            }
            for j in c..m.cols() {
                let v = field.sub(m.get(i, j), field.mul(f, m.get(r, j)));
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.data.truncate(r * m.cols);
    m.rows = r;
    pivots
}

pub fn rank(field: &Field, m: &Matrix) -> usize {
    let mut w = m.clone();
    rref(field, &mut w).len()
}

/// Determinant by Gaussian elimination.
pub fn determinant(field: &Field, m: &Matrix) -> Result<Elem, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut w = m.clone();
    let mut det = 1;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| w.get(i, c) != 0) else {
            return Ok(0);
        };
        if p != c {
            w.swap_rows(p, c);
            det = field.neg(det);
        }
        let piv = w.get(c, c);
        det = field.mul(det, piv);
        let inv = field.inv(piv).expect("pivot is nonzero");
        for i in c + 1..n {
            let f = field.mul(w.get(i, c), inv);
            if f == 0 {
                continue;
            }
            for j in c..n {
                let v = field.sub(w.get(i, j), field.mul(f, w.get(c, j)));
                w.set(i, j, v);
            }
        }
    }
    Ok(det)
}

pub const MAX_COFACTOR_SIZE: usize = 5;

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_determinant(field: &Field, m: &Matrix) -> Result<Elem, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.rows() > MAX_COFACTOR_SIZE {
        return Err(LinalgError::TooLarge { size: m.rows(), max: MAX_COFACTOR_SIZE });
    }
    let cols: Vec<usize> = (0..m.cols()).collect();
    Ok(laplace(field, m, 0, &cols))
}

fn laplace(field: &Field, m: &Matrix, row: usize, cols: &[usize]) -> Elem {
    if cols.is_empty() {
        return 1;
    }
    let mut acc = 0;
    for (k, &c) in cols.iter().enumerate() {
        let a = m.get(row, c);
        if a == 0 {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = field.mul(a, laplace(field, m, row + 1, &rest));
        acc = if k % 2 == 0 { field.add(acc, term) } else { field.sub(acc, term) };
    }
    acc
}

/// Basis (as rows) of the right kernel `{v : M v^T = 0}`.
pub fn kernel(field: &Field, m: &Matrix) -> Matrix {
    let mut w = m.clone();
    let pivots = rref(field, &mut w);
    let n = m.cols();
    let mut out = Matrix::empty(n);
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0; n];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = field.neg(w.get(r, free));
        }
        out.push_row(&v);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetRankKernel {
    pub determinant: Elem,
    pub rank: usize,
    pub kernel: Matrix,
}

/// Determinant, rank and kernel of a square matrix. For sizes up to
/// [`MAX_COFACTOR_SIZE`] the elimination determinant is cross-checked
/// against cofactor expansion.
pub fn det_rank_kernel(field: &Field, m: &Matrix) -> Result<DetRankKernel, LinalgError> {
    let determinant = determinant(field, m)?;
    if m.rows() <= MAX_COFACTOR_SIZE {
        let cof = cofactor_determinant(field, m)?;
        assert_eq!(cof, determinant, "cofactor and elimination determinants disagree");
    }
    let kernel = kernel(field, m);
    let rank = m.cols() - kernel.rows();
    debug_assert_eq!(determinant == 0, rank < m.rows());
    Ok(DetRankKernel { determinant, rank, kernel })
}

pub fn inverse(field: &Field, m: &Matrix) -> Result<Matrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut aug = Matrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, n + i, 1);
    }
    let pivots = rref(field, &mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(LinalgError::Singular);
    }
    let mut inv = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, aug.get(i, n + j));
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::new(2, 1).unwrap()
    }

    #[test]
    fn identity_example() {
        let f = f2();
        let r = det_rank_kernel(&f, &Matrix::identity(3)).unwrap();
        assert_eq!((r.determinant, r.rank, r.kernel.rows()), (1, 3, 0));
    }

    #[test]
    fn all_ones_example() {
        let f = f2();
        let m = Matrix::from_rows(&[[1, 1, 1], [1, 1, 1], [1, 1, 1]]).unwrap();
        let r = det_rank_kernel(&f, &m).unwrap();
        assert_eq!((r.determinant, r.rank, r.kernel.rows()), (0, 1, 2));
        for v in r.kernel.row_iter() {
            assert!(vec_mul(&f, v, &m.transpose()).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn non_square_is_rejected() {
        let m = Matrix::zeros(2, 3);
        assert_eq!(
            det_rank_kernel(&f2(), &m).unwrap_err(),
            LinalgError::NotSquare { rows: 2, cols: 3 }
        );
    }

    #[test]
    fn invertible_symmetric_count_over_f2() {
        // oracle: brute force over the 64 symmetric 3x3 matrices via the
        // six-term determinant formula written out by hand
        let f = f2();
        let mut oracle = 0;
        let mut via_lib = 0;
        for bits in 0u32..64 {
            let t: Vec<u32> = (0..6).map(|i| (bits >> i) & 1).collect();
            let det = (t[0] * t[1] * t[2] + t[0] * t[5] * t[5] + t[1] * t[4] * t[4]
                + t[2] * t[3] * t[3])
                % 2;
            oracle += det as usize;
            let m = Matrix::from_rows(&[[t[0], t[3], t[4]], [t[3], t[1], t[5]], [t[4], t[5], t[2]]])
                .unwrap();
            if det_rank_kernel(&f, &m).unwrap().determinant != 0 {
                via_lib += 1;
            }
        }
        assert_eq!(oracle, 28);
        assert_eq!(via_lib, 28);
    }

    #[test]
    fn inverse_round_trip_over_f9() {
        let f = Field::new(3, 2).unwrap();
        let m = Matrix::from_rows(&[[1, 2, 0], [0, 4, 5], [7, 0, 1]]).unwrap();
        let inv = inverse(&f, &m).unwrap();
        assert_eq!(m.mul(&f, &inv).unwrap(), Matrix::identity(3));
        assert_eq!(
            determinant(&f, &m).unwrap(),
            cofactor_determinant(&f, &m).unwrap()
        );
        let sing = Matrix::from_rows(&[[1, 2], [1, 2]]).unwrap();
        assert_eq!(inverse(&f, &sing), Err(LinalgError::Singular));
    }

    #[test]
    fn rref_is_canonical() {
        let f = Field::new(2, 2).unwrap();
        let mut a = Matrix::from_rows(&[[2, 2, 0], [1, 3, 1]]).unwrap();
        let mut b = Matrix::from_rows(&[[1, 3, 1], [3, 1, 1]]).unwrap();
        rref(&f, &mut a);
        rref(&f, &mut b);
        assert_eq!(a, b);
    }
}
