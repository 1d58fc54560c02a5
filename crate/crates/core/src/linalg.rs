//! Dense and sparse complex matrices plus the two extremal-value kernels
//! everything else is built on: the largest singular value and the largest
//! eigenvalue of a Hermitian matrix.
//!
//! Both kernels run power iteration from a deterministic all-ones start and
//! then once more from a seeded random start; the larger Rayleigh value wins.
//! Small dense problems go to a full decomposition instead.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Above this size `sigma_max` and `lambda_max_hermitian` iterate instead of
/// decomposing.
pub const FULL_DECOMPOSITION_MAX: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-11;
pub const DEFAULT_MAX_ITERS: usize = 20_000;
pub const DEFAULT_RESTART_SEED: u64 = 0x005e_ed0f_ba5e;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(rows, cols, |i, j| C64::new(f(i, j), 0.0))
    }

    /// Builds from row vectors; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row length",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(DenseMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entry count",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "mul_vec: length mismatch");
        self.data
            .chunks_exact(self.cols.max(1))
            .take(self.rows)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `M^* y`.
    pub fn adjoint_mul_vec(&self, y: &[C64]) -> Vec<C64> {
        assert_eq!(y.len(), self.rows, "adjoint_mul_vec: length mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for (i, yi) in y.iter().enumerate() {
            if yi.re == 0.0 && yi.im == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * yi;
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product inner dimension",
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Entrywise (Schur) product.
    pub fn hadamard(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(rhs, "Schur product shape")?;
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn max_abs_diff(&self, rhs: &DenseMatrix) -> Result<f64> {
        self.check_same_shape(rhs, "matrix comparison shape")?;
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Copy of rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> DenseMatrix {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Copy padded with zeros to `rows × cols` (top-left block keeps `self`).
    pub fn padded(&self, rows: usize, cols: usize) -> DenseMatrix {
        assert!(rows >= self.rows && cols >= self.cols);
        Self::from_fn(rows, cols, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn to_real_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].re)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    pub fn from_real_nalgebra(m: &DMatrix<f64>) -> Self {
        Self::from_real_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    fn check_same_shape(&self, rhs: &DenseMatrix, context: &'static str) -> Result<()> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.rows,
                found: rhs.rows,
            });
        }
        if self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.cols,
                found: rhs.cols,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;

    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;

    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;

    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs).expect("matrix product dimensions")
    }
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    /// Duplicate `(row, col)` entries are summed.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry") += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    /// Drops all-zero rows and columns. Singular values are unchanged.
    pub fn compact(&self) -> SparseMatrix {
        let mut col_map = vec![usize::MAX; self.cols];
        let mut next_col = 0;
        let mut triplets = Vec::with_capacity(self.nnz());
        let mut next_row = 0;
        for r in 0..self.rows {
            let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let nonzero: Vec<usize> = (lo..hi).filter(|&k| self.values[k] != C64::new(0.0, 0.0)).collect();
            if nonzero.is_empty() {
                continue;
            }
            for k in nonzero {
                let c = self.col_idx[k];
                if col_map[c] == usize::MAX {
                    col_map[c] = next_col;
                    next_col += 1;
                }
                triplets.push((next_row, col_map[c], self.values[k]));
            }
            next_row += 1;
        }
        SparseMatrix::from_triplets(next_row, next_col, triplets)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.col_idx[k])] += self.values[k];
            }
        }
        m
    }

    #[allow(clippy::needless_range_loop)]
    fn gram_apply<T: Field>(&self, vals: &[T], x: &[T], tmp: &mut [T], out: &mut [T]) {
        for r in 0..self.rows {
            let mut acc = T::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc = acc + vals[k] * x[self.col_idx[k]];
            }
            tmp[r] = acc;
        }
        out.iter_mut().for_each(|o| *o = T::zero());
        for r in 0..self.rows {
            let t = tmp[r];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                out[c] = out[c] + vals[k].conj() * t;
            }
        }
    }
}

/// Scalars the power iteration runs over; real input matrices take the
/// cheaper `f64` path.
pub(crate) trait Field: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn zero() -> Self;
    fn from_f64(x: f64) -> Self;
    fn conj(self) -> Self;
    fn abs2(self) -> f64;
    fn re(self) -> f64;
    fn random(rng: &mut ChaCha8Rng) -> Self;
    fn to_c64(self) -> C64;
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn abs2(self) -> f64 {
        self * self
    }
    fn re(self) -> f64 {
        self
    }
    fn random(rng: &mut ChaCha8Rng) -> Self {
        rng.gen_range(-1.0..1.0)
    }
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
}

impl Field for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    fn re(self) -> f64 {
        self.re
    }
    fn random(rng: &mut ChaCha8Rng) -> Self {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }
    fn to_c64(self) -> C64 {
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Full decomposition for small dense inputs, power iteration otherwise.
    Auto,
    /// Always power iteration.
    Power,
    /// Always full decomposition (dense inputs only).
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub method: Method,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            seed: DEFAULT_RESTART_SEED,
            method: Method::Auto,
        }
    }
}

impl PowerOptions {
    pub fn power() -> Self {
        PowerOptions {
            method: Method::Power,
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Result of an extremal-value computation. `value` is the singular value
/// (for `sigma_max`) or eigenvalue (for `lambda_max_hermitian`); `vector` is
/// the corresponding right singular vector / eigenvector.
#[derive(Clone, Debug)]
pub struct Extremal {
    pub value: f64,
    /// `‖Gv − λv‖ / λ` for the Gram or Hermitian matrix `G` actually iterated.
    pub residual: f64,
    pub iters: usize,
    pub converged: bool,
    pub method: Method,
    pub vector: Vec<C64>,
}

struct PowerOutcome<T> {
    lambda: f64,
    residual: f64,
    iters: usize,
    converged: bool,
    vector: Vec<T>,
}

fn norm<T: Field>(v: &[T]) -> f64 {
    v.iter().map(|x| x.abs2()).sum::<f64>().sqrt()
}

fn power_run<T: Field>(start: Vec<T>, opts: &PowerOptions, apply: &mut impl FnMut(&[T], &mut [T])) -> PowerOutcome<T> {
    let n = start.len();
    let mut v = start;
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x = *x * T::from_f64(1.0 / nv));
    let mut w = vec![T::zero(); n];
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iters {
        apply(&v, &mut w);
        lambda = v.iter().zip(&w).map(|(a, b)| (a.conj() * *b).re()).sum::<f64>();
        let nw = norm(&w);
        if nw == 0.0 {
            return PowerOutcome {
                lambda: 0.0,
                residual: 0.0,
                iters: it,
                converged: true,
                vector: v,
            };
        }
        let lam = T::from_f64(lambda);
        let r2: f64 = w.iter().zip(&v).map(|(a, b)| (*a - lam * *b).abs2()).sum();
        residual = r2.sqrt() / lambda.abs();
        if residual <= opts.tol {
            return PowerOutcome {
                lambda,
                residual,
                iters: it,
                converged: true,
                vector: v,
            };
        }
        let inv = T::from_f64(1.0 / nw);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = *wi * inv;
        }
    }
    PowerOutcome {
        lambda,
        residual,
        iters: opts.max_iters,
        converged: false,
        vector: v,
    }
}

/// Two runs (all-ones start, then seeded random start); the larger wins.
fn power_twice<T: Field>(n: usize, opts: &PowerOptions, mut apply: impl FnMut(&[T], &mut [T])) -> Extremal {
    if n == 0 {
        return Extremal {
            value: 0.0,
            residual: 0.0,
            iters: 0,
            converged: true,
            method: Method::Power,
            vector: Vec::new(),
        };
    }
    let first = power_run(vec![T::from_f64(1.0); n], opts, &mut apply);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start: Vec<T> = (0..n).map(|_| T::random(&mut rng)).collect();
    let second = power_run(start, opts, &mut apply);
    let iters = first.iters + second.iters;
    let best = if second.lambda > first.lambda { second } else { first };
    Extremal {
        value: best.lambda,
        residual: best.residual,
        iters,
        converged: best.converged,
        method: Method::Power,
        vector: best.vector.into_iter().map(Field::to_c64).collect(),
    }
}

fn gram_residual(m: &DenseMatrix, v: &[C64], lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    let w = m.adjoint_mul_vec(&m.mul_vec(v));
    let r2: f64 = w.iter().zip(v).map(|(a, b)| (a - b * lambda).norm_sqr()).sum();
    r2.sqrt() / lambda
}

fn dense_real_parts(m: &DenseMatrix) -> Vec<f64> {
    m.as_slice().iter().map(|z| z.re).collect()
}

fn dense_gram_apply<T: Field>(rows: usize, cols: usize, data: &[T], x: &[T], tmp: &mut [T], out: &mut [T]) {
    for (i, t) in tmp.iter_mut().enumerate().take(rows) {
        let row = &data[i * cols..(i + 1) * cols];
        let mut acc = T::zero();
        for (a, b) in row.iter().zip(x) {
            acc = acc + *a * *b;
        }
        *t = acc;
    }
    out.iter_mut().for_each(|o| *o = T::zero());
    for (i, t) in tmp.iter().enumerate().take(rows) {
        let row = &data[i * cols..(i + 1) * cols];
        for (o, a) in out.iter_mut().zip(row) {
            *o = *o + a.conj() * *t;
        }
    }
}

/// Largest singular value of a dense matrix.
///
/// Non-convergence is not an error: the best value is returned with
/// `converged == false` and its residual.
pub fn sigma_max(m: &DenseMatrix, opts: &PowerOptions) -> Extremal {
    let (rows, cols) = (m.rows(), m.cols());
    if rows == 0 || cols == 0 || m.is_zero() {
        return Extremal {
            value: 0.0,
            residual: 0.0,
            iters: 0,
            converged: true,
            method: opts.method,
            vector: vec![C64::new(0.0, 0.0); cols],
        };
    }
    let full = match opts.method {
        Method::Full => true,
        Method::Power => false,
        Method::Auto => rows.max(cols) <= FULL_DECOMPOSITION_MAX,
    };
    if full {
        return sigma_max_full(m);
    }
    let mut out = if m.is_real() {
        let data = dense_real_parts(m);
        let mut tmp = vec![0.0; rows];
        power_twice::<f64>(cols, opts, |x, y| dense_gram_apply(rows, cols, &data, x, &mut tmp, y))
    } else {
        let data = m.as_slice();
        let mut tmp = vec![C64::new(0.0, 0.0); rows];
        power_twice::<C64>(cols, opts, |x, y| dense_gram_apply(rows, cols, data, x, &mut tmp, y))
    };
    out.value = out.value.max(0.0).sqrt();
    out
}

/// Indices of nonzero rows and columns. The decomposition runs on that
/// core only; exact zero rows and columns can break the bidiagonalization.
fn nonzero_core(m: &DenseMatrix) -> (Vec<usize>, Vec<usize>) {
    let zero = C64::new(0.0, 0.0);
    let rows = (0..m.rows).filter(|&i| m.row(i).iter().any(|z| *z != zero)).collect();
    let cols = (0..m.cols)
        .filter(|&j| (0..m.rows).any(|i| m[(i, j)] != zero))
        .collect();
    (rows, cols)
}

fn sigma_max_full(m: &DenseMatrix) -> Extremal {
    let (ri, ci) = nonzero_core(m);
    let mut vector = vec![C64::new(0.0, 0.0); m.cols];
    if ri.is_empty() {
        vector[0] = C64::new(1.0, 0.0);
        return Extremal {
            value: 0.0,
            residual: 0.0,
            iters: 0,
            converged: true,
            method: Method::Full,
            vector,
        };
    }
    let s = if m.is_real() {
        let core = DMatrix::from_fn(ri.len(), ci.len(), |i, j| m[(ri[i], ci[j])].re);
        let svd = core.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let k = svd.singular_values.imax();
        for (j, &c) in ci.iter().enumerate() {
            vector[c] = C64::new(v_t[(k, j)], 0.0);
        }
        svd.singular_values[k]
    } else {
        let core = DMatrix::from_fn(ri.len(), ci.len(), |i, j| m[(ri[i], ci[j])]);
        let svd = core.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let k = svd.singular_values.imax();
        for (j, &c) in ci.iter().enumerate() {
            vector[c] = v_t[(k, j)].conj();
        }
        svd.singular_values[k]
    };
    let residual = gram_residual(m, &vector, s * s);
    Extremal {
        value: s,
        residual,
        iters: 0,
        converged: true,
        method: Method::Full,
        vector,
    }
}

/// Largest singular value from a full decomposition without singular
/// vectors. Cheaper than iterating when the top of the spectrum is crowded,
/// as for Gaussian matrices.
pub fn sigma_max_values_only(m: &DenseMatrix) -> f64 {
    let (ri, ci) = nonzero_core(m);
    if ri.is_empty() {
        return 0.0;
    }
    if ri.len() == m.rows && ci.len() == m.cols {
        return if m.is_real() {
            m.to_real_nalgebra().singular_values().max()
        } else {
            m.to_nalgebra().singular_values().max()
        };
    }
    if m.is_real() {
        DMatrix::from_fn(ri.len(), ci.len(), |i, j| m[(ri[i], ci[j])].re)
            .singular_values()
            .max()
    } else {
        DMatrix::from_fn(ri.len(), ci.len(), |i, j| m[(ri[i], ci[j])])
            .singular_values()
            .max()
    }
}

/// Largest singular value of a sparse matrix (always by power iteration).
pub fn sparse_sigma_max(m: &SparseMatrix, opts: &PowerOptions) -> Extremal {
    let mut out = if m.is_real() {
        let vals: Vec<f64> = m.values.iter().map(|z| z.re).collect();
        let mut tmp = vec![0.0; m.rows];
        power_twice::<f64>(m.cols, opts, |x, y| m.gram_apply(&vals, x, &mut tmp, y))
    } else {
        let mut tmp = vec![C64::new(0.0, 0.0); m.rows];
        power_twice::<C64>(m.cols, opts, |x, y| m.gram_apply(&m.values, x, &mut tmp, y))
    };
    out.value = out.value.max(0.0).sqrt();
    out
}

/// Largest eigenvalue of a Hermitian (expected positive semidefinite) matrix.
///
/// The input is symmetrized first; an asymmetry above `1e-9 · max(1, max|m|)`
/// is rejected.
pub fn lambda_max_hermitian(m: &DenseMatrix, opts: &PowerOptions) -> Result<Extremal> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "Hermitian matrix must be square",
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let n = m.rows();
    let asym = m.max_abs_diff(&m.conj_transpose())?;
    if asym > 1e-9 * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(asym));
    }
    let h = DenseMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    if n == 0 || h.is_zero() {
        return Ok(Extremal {
            value: 0.0,
            residual: 0.0,
            iters: 0,
            converged: true,
            method: opts.method,
            vector: vec![C64::new(0.0, 0.0); n],
        });
    }
    let full = match opts.method {
        Method::Full => true,
        Method::Power => false,
        Method::Auto => n <= FULL_DECOMPOSITION_MAX,
    };
    if full {
        let eig = h.to_nalgebra().symmetric_eigen();
        let (k, &lambda) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty matrix");
        let vector: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
        let hv = h.mul_vec(&vector);
        let r2: f64 = hv.iter().zip(&vector).map(|(a, b)| (a - b * lambda).norm_sqr()).sum();
        return Ok(Extremal {
            value: lambda,
            residual: if lambda != 0.0 { r2.sqrt() / lambda.abs() } else { 0.0 },
            iters: 0,
            converged: true,
            method: Method::Full,
            vector,
        });
    }
    let out = if h.is_real() {
        let data = dense_real_parts(&h);
        power_twice::<f64>(n, opts, |x, y| hermitian_apply(n, &data, x, y))
    } else {
        let data = h.as_slice();
        power_twice::<C64>(n, opts, |x, y| hermitian_apply(n, data, x, y))
    };
    Ok(out)
}

fn hermitian_apply<T: Field>(n: usize, data: &[T], x: &[T], y: &mut [T]) {
    for (i, yi) in y.iter_mut().enumerate() {
        let row = &data[i * n..(i + 1) * n];
        let mut acc = T::zero();
        for (a, b) in row.iter().zip(x) {
            acc = acc + *a * *b;
        }
        *yi = acc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| {
            C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        })
    }

    fn svd_oracle(m: &DenseMatrix) -> f64 {
        m.to_nalgebra().singular_values().iter().cloned().fold(0.0, f64::max)
    }

    #[test]
    fn diagonal_example() {
        let m = DenseMatrix::from_rows(&[vec![c(3.0), c(0.0)], vec![c(0.0), c(1.0)]]).unwrap();
        for opts in [PowerOptions::default(), PowerOptions::power()] {
            assert!((sigma_max(&m, &opts).value - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn all_ones_has_norm_two() {
        let m = DenseMatrix::from_real_fn(2, 2, |_, _| 1.0);
        for opts in [PowerOptions::default(), PowerOptions::power()] {
            assert!((sigma_max(&m, &opts).value - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn power_matches_svd_on_random_square() {
        let m = random_matrix(100, 100, 7);
        let out = sigma_max(&m, &PowerOptions::power().with_tol(1e-12));
        let oracle = svd_oracle(&m);
        assert!(out.converged);
        assert!(
            (out.value - oracle).abs() <= 1e-10 * oracle,
            "{} vs {}",
            out.value,
            oracle
        );
    }

    #[test]
    fn adjoint_has_same_norm() {
        let m = random_matrix(30, 17, 3);
        let a = sigma_max(&m, &PowerOptions::power()).value;
        let b = sigma_max(&m.conj_transpose(), &PowerOptions::power()).value;
        assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn submatrix_norm_is_smaller() {
        let m = random_matrix(40, 40, 11);
        let full = sigma_max(&m, &PowerOptions::default()).value;
        let sub = sigma_max(&m.submatrix(0, 25, 0, 25), &PowerOptions::default()).value;
        assert!(sub <= full * (1.0 + 1e-12));
    }

    #[test]
    fn deterministic_iteration() {
        let m = random_matrix(60, 50, 5);
        let a = sigma_max(&m, &PowerOptions::power());
        let b = sigma_max(&m, &PowerOptions::power());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.iters, b.iters);
    }

    #[test]
    fn zero_matrix() {
        let m = DenseMatrix::zeros(5, 3);
        assert_eq!(sigma_max(&m, &PowerOptions::power()).value, 0.0);
    }

    #[test]
    fn nonconvergence_is_flagged() {
        let m = random_matrix(80, 80, 1);
        let opts = PowerOptions {
            max_iters: 2,
            ..PowerOptions::power()
        };
        let out = sigma_max(&m, &opts);
        assert!(!out.converged);
        assert!(out.value > 0.0 && out.residual > opts.tol);
    }

    #[test]
    fn hermitian_diagonal_example() {
        let m = DenseMatrix::from_rows(&[
            vec![c(0.0), c(0.0), c(0.0)],
            vec![c(0.0), c(5.0), c(0.0)],
            vec![c(0.0), c(0.0), c(1.0)],
        ])
        .unwrap();
        for opts in [PowerOptions::default(), PowerOptions::power()] {
            assert!((lambda_max_hermitian(&m, &opts).unwrap().value - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_homogeneity() {
        let a = random_matrix(20, 20, 9);
        let g = a.conj_transpose().matmul(&a).unwrap();
        let l1 = lambda_max_hermitian(&g, &PowerOptions::power()).unwrap().value;
        let l2 = lambda_max_hermitian(&g.scale_real(2.5), &PowerOptions::power())
            .unwrap()
            .value;
        assert!((l2 - 2.5 * l1).abs() <= 1e-10 * l2);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DenseMatrix::from_rows(&[vec![c(1.0), c(2.0)], vec![c(0.0), c(1.0)]]).unwrap();
        assert!(matches!(
            lambda_max_hermitian(&m, &PowerOptions::default()),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn sparse_matches_dense() {
        let d = random_matrix(30, 20, 13);
        let mut trip = Vec::new();
        for i in 0..30 {
            for j in 0..20 {
                if (i * 7 + j * 3) % 4 == 0 {
                    trip.push((i, j, d[(i, j)]));
                }
            }
        }
        let s = SparseMatrix::from_triplets(30, 20, trip);
        let dense = s.to_dense();
        let a = sparse_sigma_max(&s, &PowerOptions::power()).value;
        let b = svd_oracle(&dense);
        assert!((a - b).abs() <= 1e-10 * b);
        let compact = s.compact();
        assert!(compact.rows() <= 30 && compact.cols() <= 20);
        assert!((sparse_sigma_max(&compact, &PowerOptions::power()).value - b).abs() <= 1e-10 * b);
    }

    #[test]
    fn triplets_are_summed() {
        let s = SparseMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0)), (0, 1, c(2.0))]);
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.to_dense()[(0, 1)], c(3.0));
    }
}
