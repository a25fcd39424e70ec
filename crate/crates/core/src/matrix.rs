//! Dense matrices over an exact field.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::scalar::Scalar;

/// Row-major matrix. A linear map `V^a -> V^b` is a `b x a` matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Mat {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| S::from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: S) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows)
    }

    /// `self * rhs`. Panics on a dimension mismatch.
    pub fn matmul(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.data[k * rhs.cols + j];
                    if !b.is_zero() {
                        let cell = &mut out.data[i * rhs.cols + j];
                        *cell = cell.clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    /// Kronecker product; `(i1, i2), (j1, j2)` maps to `i1 * b.rows + i2, j1 * b.cols + j2`.
    pub fn kron(&self, b: &Mat<S>) -> Mat<S> {
        let mut out = Self::zeros(self.rows * b.rows, self.cols * b.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..b.rows {
                    for j2 in 0..b.cols {
                        out.set(
                            i1 * b.rows + i2,
                            j1 * b.cols + j2,
                            a.clone() * b.get(i2, j2).clone(),
                        );
                    }
                }
            }
        }
        out
    }

    /// Row echelon form by exact Gaussian elimination; returns the rank and
    /// the product of pivots (with sign from row swaps).
    fn eliminate(&self) -> (Mat<S>, usize, S) {
        let mut m = self.clone();
        let mut rank = 0;
        let mut det = S::one();
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                det = S::zero();
                continue;
            };
            if pivot != rank {
                for c in 0..m.cols {
                    m.data.swap(pivot * m.cols + c, rank * m.cols + c);
                }
                det = -det;
            }
            let p = m.get(rank, col).clone();
            det = det * p.clone();
            let inv = p.checked_inv().expect("nonzero pivot");
            for r in rank + 1..m.rows {
                let factor = m.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                let factor = factor * inv.clone();
                for c in col..m.cols {
                    let v = m.get(r, c).clone() - factor.clone() * m.get(rank, c).clone();
                    m.set(r, c, v);
                }
            }
            rank += 1;
        }
        (m, rank, det)
    }

    pub fn rank(&self) -> usize {
        self.eliminate().1
    }

    /// Determinant of a square matrix.
    pub fn determinant(&self) -> S {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let (_, rank, det) = self.eliminate();
        if rank < self.rows {
            S::zero()
        } else {
            det
        }
    }

    /// Inverse by Gauss-Jordan elimination; `None` if singular or non-square.
    pub fn inverse(&self) -> Option<Mat<S>> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for c in 0..n {
                    a.data.swap(pivot * n + c, col * n + c);
                    inv.data.swap(pivot * n + c, col * n + c);
                }
            }
            let p_inv = a.get(col, col).checked_inv()?;
            for c in 0..n {
                a.set(col, c, a.get(col, c).clone() * p_inv.clone());
                inv.set(col, c, inv.get(col, c).clone() * p_inv.clone());
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for c in 0..n {
                    let va = a.get(r, c).clone() - factor.clone() * a.get(col, c).clone();
                    a.set(r, c, va);
                    let vi = inv.get(r, c).clone() - factor.clone() * inv.get(col, c).clone();
                    inv.set(r, c, vi);
                }
            }
        }
        Some(inv)
    }

    /// Entries as display strings, row by row.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(ToString::to_string).collect())
            .collect()
    }
}

impl<S: Scalar> fmt::Display for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.to_strings();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for (r, row) in cells.iter().enumerate() {
            if r > 0 {
                writeln!(f)?;
            }
            f.write_str("[")?;
            for (c, cell) in row.iter().enumerate() {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{cell:>width$}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat {}x{}\n{}", self.rows, self.cols, self)
    }
}

impl<S: Scalar> Serialize for Mat<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        let mut st = serializer.serialize_struct("Mat", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &self.to_strings())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Fp;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    #[test]
    fn kron_small_cases() {
        assert_eq!(
            Mat::<Q>::identity(2).kron(&Mat::identity(2)),
            Mat::identity(4)
        );
        let a = Mat::<Q>::from_i64_rows(&[&[1, 0]]);
        let b = Mat::<Q>::from_i64_rows(&[&[0, 1]]);
        assert_eq!(a.kron(&b), Mat::from_i64_rows(&[&[0, 1, 0, 0]]));
    }

    #[test]
    fn ranks() {
        assert_eq!(Mat::<Q>::identity(4).rank(), 4);
        assert_eq!(Mat::<Q>::zeros(3, 3).rank(), 0);
        assert_eq!(Mat::<Q>::from_i64_rows(&[&[1, 0, 0, 1]]).rank(), 1);
        assert_eq!(
            Mat::<Q>::from_i64_rows(&[&[1, 2], &[2, 4], &[0, 1]]).rank(),
            2
        );
    }

    #[test]
    fn determinant_and_inverse() {
        let m = Mat::<Q>::from_i64_rows(&[&[0, 2], &[3, 1]]);
        assert_eq!(m.determinant(), Q::from_i64(-6));
        let inv = m.inverse().unwrap();
        assert!(m.matmul(&inv).is_identity());
        assert!(Mat::<Q>::from_i64_rows(&[&[1, 2], &[2, 4]])
            .inverse()
            .is_none());
    }

    #[test]
    fn rational_and_prime_ranks_agree() {
        let rows: &[&[i64]] = &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9], &[1, 0, 1]];
        assert_eq!(
            Mat::<Q>::from_i64_rows(rows).rank(),
            Mat::<Fp<1_000_003>>::from_i64_rows(rows).rank()
        );
    }

    proptest! {
        #[test]
        fn kron_matches_index_formula(a in prop::array::uniform4(-5i64..5), b in prop::array::uniform4(-5i64..5)) {
            let ma = Mat::<Q>::from_i64_rows(&[&a[0..2], &a[2..4]]);
            let mb = Mat::<Q>::from_i64_rows(&[&b[0..2], &b[2..4]]);
            let k = ma.kron(&mb);
            for i1 in 0..2 { for i2 in 0..2 { for j1 in 0..2 { for j2 in 0..2 {
                let expected = Q::from_i64(a[i1 * 2 + j1] * b[i2 * 2 + j2]);
                prop_assert_eq!(k.get(i1 * 2 + i2, j1 * 2 + j2), &expected);
            }}}}
        }

        #[test]
        fn mixed_product(a in prop::array::uniform4(-3i64..3), b in prop::array::uniform4(-3i64..3),
                         c in prop::array::uniform4(-3i64..3), d in prop::array::uniform4(-3i64..3)) {
            let m = |x: &[i64; 4]| Mat::<Q>::from_i64_rows(&[&x[0..2], &x[2..4]]);
            let (a, b, c, d) = (m(&a), m(&b), m(&c), m(&d));
            prop_assert_eq!(a.kron(&b).matmul(&c.kron(&d)), a.matmul(&c).kron(&b.matmul(&d)));
        }
    }
}
