//! Dense linear algebra over ordered fields: row reduction, kernels, rank.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

/// Result of [`Matrix::rref`].
#[derive(Clone, Debug)]
pub struct Rref<T> {
    pub matrix: Matrix<T>,
    pub pivots: Vec<usize>,
}

impl<T: Scalar + Signed> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Matrix {
            rows: n,
            cols,
            data,
        }
    }

    pub fn from_integer_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| T::from_bigint(&BigInt::from(x))).collect())
                .collect(),
            cols,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// Reduced row echelon form. Entries with absolute value at most `eps`
    /// count as zero; pass zero for exact fields.
    pub fn rref(&self, eps: &T) -> Rref<T> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best = None;
            for i in r..m.rows {
                let v = m.get(i, c).abs();
                if v > *eps && best.as_ref().map_or(true, |(_, b): &(usize, T)| v > *b) {
                    best = Some((i, v));
                }
            }
            let Some((pr, _)) = best else { continue };
            m.swap_rows(r, pr);
            let piv = m.get(r, c).clone();
            for j in c..m.cols {
                let v = m.get(r, j).clone() / piv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j).clone() - f.clone() * m.get(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self, eps: &T) -> usize {
        self.rref(eps).pivots.len()
    }

    /// A basis of the right kernel, one vector per free column, with a one in
    /// that column.
    pub fn kernel(&self, eps: &T) -> Vec<Vec<T>> {
        let Rref { matrix, pivots } = self.rref(eps);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -matrix.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    /// One solution of `self x = rhs`, or `None` when the system is
    /// inconsistent.
    pub fn solve(&self, rhs: &[T], eps: &T) -> Option<Vec<T>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, rhs[r].clone());
        }
        let Rref { matrix, pivots } = aug.rref(eps);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = matrix.get(r, self.cols).clone();
        }
        Some(x)
    }
}

/// Fraction-free (Bareiss) rank of an integer matrix.
pub fn bareiss_rank(rows: &[Vec<i64>], cols: usize) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let n = m.len();
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..cols {
        if rank == n {
            break;
        }
        let Some(pr) = (rank..n).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, pr);
        for i in rank + 1..n {
            for j in c + 1..cols {
                let v = (&m[rank][c] * &m[i][j] - &m[i][c] * &m[rank][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}
