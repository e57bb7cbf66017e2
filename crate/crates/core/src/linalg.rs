//! Dense linear algebra used by the simulator and as the ground-truth oracle.
//!
//! Everything here is plain `f64` arithmetic with a fixed operation order, so
//! results are reproducible bit for bit across runs and platforms.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::InvalidInput(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
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

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Mutable views of two distinct rows.
    pub fn two_rows_mut(&mut self, a: usize, b: usize) -> (&mut [f64], &mut [f64]) {
        assert_ne!(a, b);
        let c = self.cols;
        if a < b {
            let (lo, hi) = self.data.split_at_mut(b * c);
            (&mut lo[a * c..(a + 1) * c], &mut hi[..c])
        } else {
            let (lo, hi) = self.data.split_at_mut(a * c);
            (&mut hi[..c], &mut lo[b * c..(b + 1) * c])
        }
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// First `k` columns as a new matrix.
    pub fn leading_columns(&self, k: usize) -> Matrix {
        assert!(k <= self.cols);
        let mut out = Matrix::zeros(self.rows, k);
        for i in 0..self.rows {
            out.row_mut(i).copy_from_slice(&self.row(i)[..k]);
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(l);
                let dst = out.row_mut(i);
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `selfᵀ · self`, computed as column dot products.
    pub fn gram(&self) -> Matrix {
        let k = self.cols;
        let mut g = Matrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let mut s = 0.0;
                for r in 0..self.rows {
                    s += self[(r, i)] * self[(r, j)];
                }
                g[(i, j)] = s;
                g[(j, i)] = s;
            }
        }
        g
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(1.0);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self[(i, j)] - self[(j, i)]).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Full eigendecomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen {
    /// Eigenvalues, largest first.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: Matrix,
}

impl SymEigen {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps run until the off-diagonal Frobenius norm drops below
/// `1e-12 * ‖m‖_F`. Eigenvalues are sorted descending with a stable sort and
/// every eigenvector is flipped so its largest-magnitude entry is positive.
pub fn sym_eigen(m: &Matrix) -> Result<SymEigen> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!(
            "sym_eigen needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::InvalidInput("sym_eigen needs a symmetric matrix".into()));
    }
    let n = m.rows();
    // Padded row stride: power-of-two strides make the column writes in
    // `rotate` collide in cache.
    let mut a = Work::new(n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, 0.5 * (m[(i, j)] + m[(j, i)]));
        }
    }
    let mut vt = Matrix::identity(n);
    let threshold = JACOBI_REL_TOL * m.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_norm() <= threshold {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, &mut vt, p, q);
            }
        }
    }

    let raw: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[j].partial_cmp(&raw[i]).unwrap_or(std::cmp::Ordering::Equal));

    let mut vectors = Matrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(raw[src]);
        let mut col = vt.row(src).to_vec();
        normalize_sign(&mut col);
        for (i, x) in col.into_iter().enumerate() {
            vectors[(i, dst)] = x;
        }
    }
    Ok(SymEigen { values, vectors })
}

struct Work {
    n: usize,
    stride: usize,
    data: Vec<f64>,
}

impl Work {
    fn new(n: usize) -> Self {
        let stride = n + 3;
        Self {
            n,
            stride,
            data: vec![0.0; n * stride],
        }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.stride + j]
    }

    fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.stride + j] = x;
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j) * self.get(i, j);
                }
            }
        }
        s.sqrt()
    }
}

/// One Jacobi rotation zeroing `a[p][q]`; `vt` accumulates eigenvectors as rows.
fn rotate(a: &mut Work, vt: &mut Matrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    if apq == 0.0 {
        return;
    }
    let n = a.n;
    let w = a.stride;
    let app = a.get(p, p);
    let aqq = a.get(q, q);
    let tau = (aqq - app) / (2.0 * apq);
    let t = if tau >= 0.0 {
        1.0 / (tau + 1f64.hypot(tau))
    } else {
        -1.0 / (-tau + 1f64.hypot(tau))
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let (lo, hi) = a.data.split_at_mut(q * w);
    let row_p = &mut lo[p * w..p * w + n];
    let row_q = &mut hi[..n];
    for k in 0..n {
        let akp = row_p[k];
        let akq = row_q[k];
        row_p[k] = c * akp - s * akq;
        row_q[k] = s * akp + c * akq;
    }
    for k in 0..n {
        if k != p && k != q {
            a.data[k * w + p] = a.data[p * w + k];
            a.data[k * w + q] = a.data[q * w + k];
        }
    }
    a.set(p, p, app - t * apq);
    a.set(q, q, aqq + t * apq);
    a.set(p, q, 0.0);
    a.set(q, p, 0.0);

    let (vp, vq) = vt.two_rows_mut(p, q);
    for k in 0..n {
        let x = vp[k];
        let y = vq[k];
        vp[k] = c * x - s * y;
        vq[k] = s * x + c * y;
    }
}

fn normalize_sign(col: &mut [f64]) {
    let mut best = 0;
    for (i, x) in col.iter().enumerate() {
        if x.abs() > col[best].abs() {
            best = i;
        }
    }
    if col.get(best).is_some_and(|&x| x < 0.0) {
        col.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Cholesky factor `L` (lower triangular, positive diagonal) with `L·Lᵀ = r`.
///
/// Only the lower triangle of `r` is read.
pub fn cholesky(r: &Matrix) -> Result<Matrix> {
    if !r.is_square() {
        return Err(Error::InvalidInput(format!(
            "cholesky needs a square matrix, got {}x{}",
            r.rows(),
            r.cols()
        )));
    }
    let k = r.rows();
    let mut l = Matrix::zeros(k, k);
    for j in 0..k {
        let mut d = r[(j, j)];
        for p in 0..j {
            d -= l[(j, p)] * l[(j, p)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..k {
            let mut s = r[(i, j)];
            for p in 0..j {
                s -= l[(i, p)] * l[(j, p)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `x · Lᵀ = row` for `x`, i.e. one row of `Q·(Lᵀ)⁻¹`.
pub fn solve_transposed_lower(row: &[f64], l: &Matrix) -> Result<Vec<f64>> {
    let k = l.rows();
    if !l.is_square() || row.len() != k {
        return Err(Error::InvalidInput(format!(
            "row of length {} against {}x{} factor",
            row.len(),
            l.rows(),
            l.cols()
        )));
    }
    let mut x = vec![0.0; k];
    for i in 0..k {
        let d = l[(i, i)];
        if d == 0.0 {
            return Err(Error::Singular { index: i });
        }
        let mut s = row[i];
        for j in 0..i {
            s -= l[(i, j)] * x[j];
        }
        x[i] = s / d;
    }
    Ok(x)
}
