//! Dense matrices over a [`Field`] and row reduction.

use std::ops::{Index, IndexMut};

use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u8] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Submatrix made of the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out[(r, j)] = self[(r, c)];
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)];
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, f: &Field, u: &[u8]) -> Vec<u8> {
        assert_eq!(u.len(), self.rows);
        let mut out = vec![0u8; self.cols];
        for (r, &ur) in u.iter().enumerate() {
            if ur == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.row(r)) {
                *o = f.add(*o, f.mul(ur, g));
            }
        }
        out
    }

    /// In-place reduced row echelon form. Pivots are the first nonzero entry
    /// in each column scanning rows top-down. Returns the pivot columns.
    pub fn rref(&mut self, f: &Field) -> Vec<usize> {
        self.rref_limited(f, self.cols)
    }

    /// Like [`Matrix::rref`] but only the first `pivot_cols` columns are
    /// eligible as pivots; trailing columns are carried along (augmented part).
    pub fn rref_limited(&mut self, f: &Field, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..pivot_cols.min(self.cols) {
            if lead == self.rows {
                break;
            }
            let Some(pr) = (lead..self.rows).find(|&r| self[(r, c)] != 0) else {
                continue;
            };
            self.swap_rows(lead, pr);
            let inv = f.inv_nonzero(self[(lead, c)]);
            if inv != 1 {
                for x in self.row_mut(lead) {
                    *x = f.mul(*x, inv);
                }
            }
            for r in 0..self.rows {
                if r == lead {
                    continue;
                }
                let factor = self[(r, c)];
                if factor != 0 {
                    self.sub_scaled_row(f, r, lead, factor);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.clone().rref(f).len()
    }

    /// A nonzero `u` with `u * self = 0`, if the rows are dependent.
    pub fn left_null_vector(&self, f: &Field) -> Option<Vec<u8>> {
        // u M = 0  <=>  M^T u^T = 0
        let mut t = self.transpose();
        let pivots = t.rref(f);
        let free = (0..t.cols).find(|c| !pivots.contains(c))?;
        let mut u = vec![0u8; t.cols];
        u[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            u[pc] = f.neg(t[(r, free)]);
        }
        Some(u)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// row[dst] -= factor * row[src]
    fn sub_scaled_row(&mut self, f: &Field, dst: usize, src: usize, factor: u8) {
        let cols = self.cols;
        for c in 0..cols {
            let s = self.data[src * cols + c];
            if s != 0 {
                let d = &mut self.data[dst * cols + c];
                *d = f.sub(*d, f.mul(factor, s));
            }
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = u8;
    fn index(&self, (r, c): (usize, usize)) -> &u8 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut u8 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}
