//! Dense exact linear algebra: row reduction, ranks, kernels and incremental spans.

use rayon::prelude::*;

use crate::scalar::Field;

/// Work size above which row elimination is spread over the thread pool.
const PAR_THRESHOLD: usize = 1 << 16;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn zeros<F: Field<Elem = E>>(f: &F, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![f.zero(); rows * cols] }
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.data[i * n + i] = f.one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<E>>, cols: usize) -> Self {
        let r = rows.len();
        let data: Vec<E> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * cols);
        Matrix { rows: r, cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: E) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, other: &Matrix<E>) -> Matrix<E> {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let c = self.get(i, k);
                if !f.is_zero(c) {
                    f.axpy(dst, c, other.row(k));
                }
            }
        }
        out
    }

    pub fn apply<F: Field<Elem = E>>(&self, f: &F, x: &[E]) -> Vec<E> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (a, b) in self.row(i).iter().zip(x) {
                    if !f.is_zero(a) && !f.is_zero(b) {
                        acc = f.add(&acc, &f.mul(a, b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.data.iter().all(|x| f.is_zero(x))
    }
}

/// Reduced row echelon form of a matrix: nonzero rows only, pivot entries equal to one.
#[derive(Clone, Debug)]
pub struct Echelon<E> {
    pub cols: usize,
    pub rows: Vec<Vec<E>>,
    pub pivots: Vec<usize>,
}

impl<E: Clone + Send + Sync> Echelon<E> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Columns without a pivot, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Basis of the null space: one vector per free column, equal to one there and
    /// zero on every other free column.
    pub fn kernel_basis<F: Field<Elem = E>>(&self, f: &F) -> Vec<Vec<E>> {
        self.free_columns()
            .into_iter()
            .map(|j| {
                let mut x = vec![f.zero(); self.cols];
                x[j] = f.one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if !f.is_zero(&row[j]) {
                        x[p] = f.neg(&row[j]);
                    }
                }
                x
            })
            .collect()
    }

    /// Subtracts the row space component so that `x` vanishes on every pivot column.
    pub fn reduce<F: Field<Elem = E>>(&self, f: &F, x: &mut [E]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !f.is_zero(&x[p]) {
                let c = f.neg(&x[p]);
                f.axpy(&mut x[p..], &c, &row[p..]);
            }
        }
    }
}

fn eliminate<F: Field>(f: &F, rows: &mut [Vec<F::Elem>], pivot: &[F::Elem], col: usize, skip: usize) {
    let work = rows.len() * (pivot.len() - col);
    let body = |(i, row): (usize, &mut Vec<F::Elem>)| {
        if i != skip && !f.is_zero(&row[col]) {
            let c = f.neg(&row[col]);
            f.axpy(&mut row[col..], &c, &pivot[col..]);
        }
    };
    if work >= PAR_THRESHOLD {
        rows.par_iter_mut().enumerate().for_each(body);
    } else {
        rows.iter_mut().enumerate().for_each(body);
    }
}

/// Full Gauss-Jordan reduction of the given rows.
pub fn rref<F: Field>(f: &F, mut rows: Vec<Vec<F::Elem>>, cols: usize) -> Echelon<F::Elem> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(i) = (r..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(i, r);
        let inv = f.inv(&rows[r][c]).expect("nonzero pivot");
        f.scale(&mut rows[r][c..], &inv);
        let pivot = rows[r].clone();
        eliminate(f, &mut rows, &pivot, c, r);
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    Echelon { cols, rows, pivots }
}

pub fn rref_matrix<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Echelon<F::Elem> {
    rref(f, m.to_rows(), m.cols)
}

/// Rank by forward elimination only.
pub fn rank<F: Field>(f: &F, m: &Matrix<F::Elem>) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let mut rows = if m.rows <= m.cols { m.to_rows() } else { m.transpose().to_rows() };
    let cols = rows[0].len();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(i) = (r..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(i, r);
        let inv = f.inv(&rows[r][c]).expect("nonzero pivot");
        f.scale(&mut rows[r][c..], &inv);
        let pivot = rows[r].clone();
        let (_, below) = rows.split_at_mut(r + 1);
        eliminate(f, below, &pivot, c, usize::MAX);
        r += 1;
    }
    r
}

/// Null space basis of `m` (vectors of length `m.cols`).
pub fn kernel<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Vec<Vec<F::Elem>> {
    if m.cols == 0 {
        return Vec::new();
    }
    rref_matrix(f, m).kernel_basis(f)
}

/// A subspace grown one vector at a time.
#[derive(Clone, Debug)]
pub struct Span<E> {
    pub len: usize,
    rows: Vec<Vec<E>>,
    pivots: Vec<usize>,
}

impl<E: Clone> Span<E> {
    pub fn new(len: usize) -> Self {
        Span { len, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce_in_place<F: Field<Elem = E>>(&self, f: &F, x: &mut [E]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !f.is_zero(&x[p]) {
                let c = f.neg(&x[p]);
                f.axpy(x, &c, row);
            }
        }
    }

    pub fn contains<F: Field<Elem = E>>(&self, f: &F, x: &[E]) -> bool {
        let mut y = x.to_vec();
        self.reduce_in_place(f, &mut y);
        y.iter().all(|c| f.is_zero(c))
    }

    /// Adds `x`; returns true when it enlarged the span.
    pub fn insert<F: Field<Elem = E>>(&mut self, f: &F, x: &[E]) -> bool {
        let mut y = x.to_vec();
        self.reduce_in_place(f, &mut y);
        match y.iter().position(|c| !f.is_zero(c)) {
            None => false,
            Some(p) => {
                let inv = f.inv(&y[p]).expect("nonzero");
                f.scale(&mut y, &inv);
                self.rows.push(y);
                self.pivots.push(p);
                true
            }
        }
    }
}
