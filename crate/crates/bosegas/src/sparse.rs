//! Minimal CSR sparse operator used for truncated Fock-space Hamiltonians.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

#[derive(Debug, Clone)]
pub struct SparseOp {
    pub rows: usize,
    pub cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<C64>,
}

/// Accumulates (row, col, value) triplets; duplicates are summed.
#[derive(Debug)]
pub struct SparseBuilder {
    rows: usize,
    cols: usize,
    triplets: Vec<(u32, u32, C64)>,
}

impl SparseBuilder {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseBuilder { rows, cols, triplets: Vec::new() }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.rows && col < self.cols);
        if value != C64::new(0.0, 0.0) {
            self.triplets.push((row as u32, col as u32, value));
        }
    }

    pub fn build(mut self) -> SparseOp {
        self.triplets
            .sort_unstable_by_key(|&(r, c, _)| ((r as u64) << 32) | c as u64);
        let mut row_ptr = vec![0usize; self.rows + 1];
        let mut col_idx = Vec::with_capacity(self.triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(self.triplets.len());
        let mut last: Option<(u32, u32)> = None;
        for &(r, c, v) in &self.triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r as usize + 1] += 1;
                last = Some((r, c));
            }
        }
        for rr in 0..self.rows {
            row_ptr[rr + 1] += row_ptr[rr];
        }
        SparseOp { rows: self.rows, cols: self.cols, row_ptr, col_idx, values }
    }
}

impl SparseOp {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseOp {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn apply(&self, x: &Array1<C64>) -> Array1<C64> {
        debug_assert_eq!(x.len(), self.cols);
        let mut y = Array1::zeros(self.rows);
        self.apply_into(x, &mut y);
        y
    }

    pub fn apply_into(&self, x: &Array1<C64>, y: &mut Array1<C64>) {
        let xs = x.as_slice().expect("contiguous");
        let ys = y.as_slice_mut().expect("contiguous");
        for r in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * xs[self.col_idx[k] as usize];
            }
            ys[r] = acc;
        }
    }

    /// y += factor * (self x)
    pub fn apply_acc(&self, x: &Array1<C64>, factor: C64, y: &mut Array1<C64>) {
        let xs = x.as_slice().expect("contiguous");
        let ys = y.as_slice_mut().expect("contiguous");
        for r in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * xs[self.col_idx[k] as usize];
            }
            ys[r] += factor * acc;
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> SparseOp {
        let mut b = SparseBuilder::new(self.cols, self.rows);
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                b.push(self.col_idx[k] as usize, r, self.values[k].conj());
            }
        }
        b.build()
    }

    /// self + other
    pub fn add(&self, other: &SparseOp) -> SparseOp {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut b = SparseBuilder::new(self.rows, self.cols);
        for op in [self, other] {
            for r in 0..op.rows {
                for k in op.row_ptr[r]..op.row_ptr[r + 1] {
                    b.push(r, op.col_idx[k] as usize, op.values[k]);
                }
            }
        }
        b.build()
    }

    pub fn scaled(&self, factor: C64) -> SparseOp {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= factor;
        }
        out
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut a = Array2::zeros((self.rows, self.cols));
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                a[(r, self.col_idx[k] as usize)] += self.values[k];
            }
        }
        a
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(move |k| (r, self.col_idx[k] as usize, self.values[k]))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn build_and_apply() {
        let mut b = SparseBuilder::new(3, 3);
        b.push(0, 1, c(2.0));
        b.push(2, 0, c(-1.0));
        b.push(0, 1, c(0.5)); // duplicate sums
        b.push(1, 1, c(3.0));
        let m = b.build();
        assert_eq!(m.nnz(), 3);
        let x = array![c(1.0), c(1.0), c(1.0)];
        let y = m.apply(&x);
        assert_eq!(y[0], c(2.5));
        assert_eq!(y[1], c(3.0));
        assert_eq!(y[2], c(-1.0));
    }

    #[test]
    fn dagger_matches_dense() {
        let mut b = SparseBuilder::new(2, 3);
        b.push(0, 2, C64::new(1.0, 2.0));
        b.push(1, 0, C64::new(0.0, -1.0));
        let m = b.build();
        let d = m.dagger().to_dense();
        let md = m.to_dense();
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(d[(j, i)], md[(i, j)].conj());
            }
        }
    }

    #[test]
    fn empty_rows_are_fine() {
        let mut b = SparseBuilder::new(4, 4);
        b.push(3, 3, c(1.0));
        let m = b.build();
        let x = array![c(1.0), c(2.0), c(3.0), c(4.0)];
        let y = m.apply(&x);
        assert_eq!(y[0], c(0.0));
        assert_eq!(y[3], c(4.0));
    }
}
