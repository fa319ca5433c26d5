//! Dense matrices over [`Scalar`] with exact Gaussian elimination.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("expected a square matrix, got {0}x{1}")]
    NotSquare(usize, usize),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch(
                self.rows, self.cols, rhs.rows, rhs.cols,
            ));
        }
        let mut out = Matrix::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let lhs = &self[(r, k)];
                if lhs.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let term = lhs * &rhs[(k, c)];
                    out[(r, c)] += &term;
                }
            }
        }
        Ok(out)
    }

    pub fn kronecker(&self, rhs: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |r, c| {
            &self[(r / rhs.rows, c / rhs.cols)] * &rhs[(r % rhs.rows, c % rhs.cols)]
        })
    }

    /// `self ⊗ self ⊗ ⋯` with `n` factors; `n = 0` gives the 1×1 identity.
    pub fn kronecker_pow(&self, n: usize) -> Matrix {
        let mut out = Matrix::identity(1);
        for _ in 0..n {
            out = out.kronecker(self);
        }
        out
    }

    /// Rank over Q(i, √2) by exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            let inv = m[(rank, col)].inverse().expect("pivot is nonzero");
            for r in rank + 1..m.rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] * &inv;
                for c in col..m.cols {
                    let delta = &factor * &m[(rank, c)];
                    let val = &m[(r, c)] - &delta;
                    m[(r, c)] = val;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Column indices of the pivots found by elimination, left to right.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            let inv = m[(rank, col)].inverse().expect("pivot is nonzero");
            for r in rank + 1..m.rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] * &inv;
                for c in col..m.cols {
                    let delta = &factor * &m[(rank, c)];
                    let val = &m[(r, c)] - &delta;
                    m[(r, c)] = val;
                }
            }
            pivots.push(col);
            rank += 1;
        }
        pivots
    }

    /// Exact determinant by elimination with row pivoting.
    pub fn det(&self) -> Result<Scalar, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Ok(Scalar::zero());
            };
            if pivot != col {
                m.swap_rows(col, pivot);
                det = -det;
            }
            det = &det * &m[(col, col)];
            let inv = m[(col, col)].inverse().expect("pivot is nonzero");
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] * &inv;
                for c in col..n {
                    let delta = &factor * &m[(col, c)];
                    let val = &m[(r, c)] - &delta;
                    m[(r, c)] = val;
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse via Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !m[(r, col)].is_zero())
                .ok_or(MatrixError::Singular)?;
            m.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let scale = m[(col, col)].inverse().expect("pivot is nonzero");
            for c in 0..n {
                m[(col, c)] = &m[(col, c)] * &scale;
                inv[(col, c)] = &inv[(col, c)] * &scale;
            }
            for r in 0..n {
                if r == col || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in 0..n {
                    let dm = &factor * &m[(col, c)];
                    let di = &factor * &inv[(col, c)];
                    m[(r, c)] = &m[(r, c)] - &dm;
                    inv[(r, c)] = &inv[(r, c)] - &di;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|s| s.to_string()).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::zero(3, 5).rank(), 0);
        assert_eq!(Matrix::identity(4).rank(), 4);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(m(&[&[1, 1], &[1, -1]]).rank(), 2);
    }

    #[test]
    fn det_and_inverse() {
        let h = m(&[&[1, 1], &[1, -1]]);
        assert_eq!(h.det().unwrap(), Scalar::from_int(-2));
        let inv = h.inverse().unwrap();
        assert_eq!(h.mul(&inv).unwrap(), Matrix::identity(2));
        assert_eq!(inv[(0, 0)], Scalar::from_ratio(1, 2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_err());
    }

    #[test]
    fn kronecker_shape() {
        let h = m(&[&[1, 1], &[1, -1]]);
        let hh = h.kronecker(&h);
        assert_eq!((hh.rows(), hh.cols()), (4, 4));
        assert_eq!(hh[(3, 3)], Scalar::from_int(1));
        assert_eq!(hh[(1, 3)], Scalar::from_int(-1));
        assert_eq!(h.kronecker_pow(0), Matrix::identity(1));
    }

    #[test]
    fn pivot_columns_skip_dependent() {
        let a = m(&[&[0, 1, 2, 1], &[0, 2, 4, 3]]);
        assert_eq!(a.pivot_columns(), vec![1, 3]);
    }
}
