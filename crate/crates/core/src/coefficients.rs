//! Truncated Taylor expansions of operator-valued symbols and vector-valued
//! test functions, plus their text file formats.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, C64};

/// Points with `|z|` up to this bound count as lying in the closed disc.
pub const DISC_SLACK: f64 = 1e-12;

const ZERO: C64 = Complex64::new(0.0, 0.0);

fn check_in_closed_disc(z: C64) -> Result<()> {
    if z.norm() > 1.0 + DISC_SLACK {
        return Err(Error::OutsideDisc { re: z.re, im: z.im });
    }
    Ok(())
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A finite real order of differentiation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracOrder(f64);

impl FracOrder {
    /// Any finite real.
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::invalid(format!("order must be finite, got {alpha}")));
        }
        Ok(FracOrder(alpha))
    }

    /// A finite order with `alpha > 0`.
    pub fn positive(alpha: f64) -> Result<Self> {
        let a = Self::new(alpha)?;
        if alpha <= 0.0 {
            return Err(Error::invalid(format!("order must be positive, got {alpha}")));
        }
        Ok(a)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn require_positive(self) -> Result<Self> {
        Self::positive(self.0)
    }
}

/// An integer differentiation shift, at least 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftOrder(u32);

impl ShiftOrder {
    pub fn new(l: u32) -> Result<Self> {
        if l == 0 {
            return Err(Error::invalid("shift order must be at least 1"));
        }
        Ok(ShiftOrder(l))
    }

    pub fn value(self) -> u32 {
        self.0
    }
}

/// Operator-valued polynomial `Σ φ̂(n) zⁿ` with `d × d` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSymbol {
    dim: usize,
    coeffs: Vec<DenseMatrix>,
    rank_one: bool,
}

impl OperatorSymbol {
    pub fn new(dim: usize, coeffs: Vec<DenseMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if coeffs.is_empty() {
            return Err(Error::invalid("a symbol needs at least one coefficient"));
        }
        for c in &coeffs {
            for found in [c.rows(), c.cols()] {
                if found != dim {
                    return Err(Error::DimensionMismatch {
                        context: "symbol coefficient size",
                        expected: dim,
                        found,
                    });
                }
            }
        }
        if coeffs
            .iter()
            .flat_map(|c| c.as_slice())
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::invalid("symbol coefficients must be finite"));
        }
        Ok(OperatorSymbol {
            dim,
            coeffs,
            rank_one: false,
        })
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        OperatorSymbol {
            dim,
            coeffs: vec![DenseMatrix::zeros(dim, dim); degree + 1],
            rank_one: false,
        }
    }

    /// A `d = 1` symbol.
    pub fn scalar(coeffs: &[C64]) -> Result<Self> {
        Self::new(
            1,
            coeffs.iter().map(|&c| DenseMatrix::from_fn(1, 1, |_, _| c)).collect(),
        )
    }

    pub fn scalar_real(coeffs: &[f64]) -> Result<Self> {
        Self::scalar(&coeffs.iter().map(|&c| C64::new(c, 0.0)).collect::<Vec<_>>())
    }

    /// Single term `c zᵏ` with a matrix coefficient.
    pub fn monomial(k: usize, c: DenseMatrix) -> Result<Self> {
        let dim = c.rows();
        let mut coeffs = vec![DenseMatrix::zeros(dim, dim); k + 1];
        coeffs[k] = c;
        Self::new(dim, coeffs)
    }

    /// Rank-one-valued symbol with coefficients `u_n v_n^*`.
    pub fn rank_one(u: &[Vec<C64>], v: &[Vec<C64>]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                context: "rank-one factor count",
                expected: u.len(),
                found: v.len(),
            });
        }
        let dim = u.first().map_or(0, Vec::len);
        for x in u.iter().chain(v) {
            if x.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "rank-one factor length",
                    expected: dim,
                    found: x.len(),
                });
            }
        }
        let coeffs = u
            .iter()
            .zip(v)
            .map(|(a, b)| DenseMatrix::from_fn(dim, dim, |i, j| a[i] * b[j].conj()))
            .collect();
        let mut s = Self::new(dim, coeffs)?;
        s.rank_one = true;
        Ok(s)
    }

    /// `H`-valued polynomial `u` viewed as the operator symbol `u ⊗ e₀^*`
    /// (coefficient `n` has `û(n)` as column 0, zeros elsewhere).
    pub fn from_vector_column(u: &VectorPolynomial) -> Self {
        let d = u.dim();
        OperatorSymbol {
            dim: d,
            coeffs: u
                .coeffs()
                .iter()
                .map(|c| DenseMatrix::from_fn(d, d, |i, j| if j == 0 { c[i] } else { ZERO }))
                .collect(),
            rank_one: true,
        }
    }

    /// Complex Gaussian coefficients, each scaled by `1/√d`.
    pub fn random(dim: usize, degree: usize, rng: &mut impl Rng) -> Self {
        let scale = 1.0 / (dim as f64).sqrt();
        let coeffs = (0..=degree)
            .map(|_| DenseMatrix::from_fn(dim, dim, |_, _| gaussian(rng) * scale))
            .collect();
        OperatorSymbol {
            dim,
            coeffs,
            rank_one: false,
        }
    }

    /// Random rank-one-valued symbol of the given degree.
    pub fn random_rank_one(dim: usize, degree: usize, rng: &mut impl Rng) -> Self {
        let mut draw = || (0..dim).map(|_| gaussian(rng)).collect::<Vec<_>>();
        let u: Vec<_> = (0..=degree).map(|_| draw()).collect();
        let v: Vec<_> = (0..=degree).map(|_| draw()).collect();
        Self::rank_one(&u, &v).expect("consistent shapes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// True when built through a rank-one constructor. Not re-checked after
    /// transformations that preserve rank (multipliers, conjugation).
    pub fn is_rank_one(&self) -> bool {
        self.rank_one
    }

    pub fn coeffs(&self) -> &[DenseMatrix] {
        &self.coeffs
    }

    /// `φ̂(n)`, or `None` beyond the degree.
    pub fn coeff(&self, n: usize) -> Option<&DenseMatrix> {
        self.coeffs.get(n)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(DenseMatrix::is_zero)
    }

    /// Largest `n` with a nonzero coefficient, `None` for the zero symbol.
    pub fn effective_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Horner evaluation at `z` in the closed disc.
    pub fn evaluate(&self, z: C64) -> Result<DenseMatrix> {
        check_in_closed_disc(z)?;
        let mut acc = DenseMatrix::zeros(self.dim, self.dim);
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(z) + c;
        }
        Ok(acc)
    }

    /// Coefficient-wise conjugate transpose: the symbol of `z ↦ φ(z̄)*`.
    pub fn conjugate(&self) -> Self {
        OperatorSymbol {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(DenseMatrix::conj_transpose).collect(),
            rank_one: self.rank_one,
        }
    }

    /// Coefficient `n` multiplied by `factor(n)`.
    pub fn map_coeffs(&self, mut factor: impl FnMut(usize) -> C64) -> Self {
        OperatorSymbol {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c.scale(factor(n)))
                .collect(),
            rank_one: self.rank_one,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map_coeffs(|_| c)
    }

    /// `a·self + b·other`; the shorter symbol is padded with zeros.
    pub fn combine(&self, a: C64, other: &OperatorSymbol, b: C64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                context: "symbol dimension",
                expected: self.dim,
                found: other.dim,
            });
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = DenseMatrix::zeros(self.dim, self.dim);
        let coeffs = (0..len)
            .map(|n| {
                let x = self.coeffs.get(n).unwrap_or(&zero).scale(a);
                let y = other.coeffs.get(n).unwrap_or(&zero).scale(b);
                &x + &y
            })
            .collect();
        Ok(OperatorSymbol {
            dim: self.dim,
            coeffs,
            rank_one: false,
        })
    }

    /// Copy truncated or zero-padded to the given degree.
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, DenseMatrix::zeros(self.dim, self.dim));
        OperatorSymbol {
            dim: self.dim,
            coeffs,
            rank_one: self.rank_one,
        }
    }

    pub fn from_file_format(file: SymbolFile) -> Result<Self> {
        if file.coeffs.len() != file.degree + 1 {
            return Err(Error::Format(format!(
                "degree {} requires {} coefficients, found {}",
                file.degree,
                file.degree + 1,
                file.coeffs.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(file.coeffs.len());
        for rows in &file.coeffs {
            if let Some(found) = std::iter::once(rows.len())
                .chain(rows.iter().map(Vec::len))
                .find(|&len| len != file.dim)
            {
                return Err(Error::DimensionMismatch {
                    context: "symbol coefficient size",
                    expected: file.dim,
                    found,
                });
            }
            let rows: Vec<Vec<C64>> = rows
                .iter()
                .map(|r| r.iter().map(|p| C64::new(p[0], p[1])).collect())
                .collect();
            coeffs.push(DenseMatrix::from_rows(&rows)?);
        }
        Self::new(file.dim, coeffs).map_err(|e| match e {
            Error::InvalidArgument(m) => Error::Format(m),
            other => other,
        })
    }

    pub fn to_file_format(&self) -> SymbolFile {
        SymbolFile {
            dim: self.dim,
            degree: self.degree(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| {
                    (0..self.dim)
                        .map(|i| c.row(i).iter().map(|z| [z.re, z.im]).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file_format(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_format()).expect("serializable")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// On-disk form of an [`OperatorSymbol`]: `coeffs[n][row][col] = [re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolFile {
    pub dim: usize,
    pub degree: usize,
    pub coeffs: Vec<Vec<Vec<[f64; 2]>>>,
}

/// On-disk form of a [`VectorPolynomial`]: `coeffs[n][row] = [re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub dim: usize,
    pub degree: usize,
    pub coeffs: Vec<Vec<[f64; 2]>>,
}

/// Symbol whose coefficients are stored as `(row, col, value)` lists, for
/// large ambient dimensions with few nonzeros per coefficient.
#[derive(Clone, Debug)]
pub struct SparseSymbol {
    dim: usize,
    coeffs: Vec<Vec<(usize, usize, C64)>>,
}

impl SparseSymbol {
    pub fn new(dim: usize, coeffs: Vec<Vec<(usize, usize, C64)>>) -> Result<Self> {
        if dim == 0 || coeffs.is_empty() {
            return Err(Error::invalid(
                "sparse symbol needs positive dimension and a coefficient",
            ));
        }
        for &(r, c, _) in coeffs.iter().flatten() {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch {
                    context: "sparse symbol entry index",
                    expected: dim,
                    found: r.max(c),
                });
            }
        }
        Ok(SparseSymbol { dim, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &[(usize, usize, C64)] {
        self.coeffs.get(n).map_or(&[], Vec::as_slice)
    }

    pub fn to_dense(&self) -> OperatorSymbol {
        let coeffs = self
            .coeffs
            .iter()
            .map(|entries| {
                let mut m = DenseMatrix::zeros(self.dim, self.dim);
                for &(r, c, v) in entries {
                    m[(r, c)] += v;
                }
                m
            })
            .collect();
        OperatorSymbol::new(self.dim, coeffs).expect("validated shape")
    }
}

/// `H`-valued polynomial `Σ f̂(m) zᵐ` with `d`-vector coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorPolynomial {
    dim: usize,
    coeffs: Vec<Vec<C64>>,
}

impl VectorPolynomial {
    pub fn new(dim: usize, coeffs: Vec<Vec<C64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if coeffs.is_empty() {
            return Err(Error::invalid("a polynomial needs at least one coefficient"));
        }
        for c in &coeffs {
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "vector coefficient length",
                    expected: dim,
                    found: c.len(),
                });
            }
        }
        Ok(VectorPolynomial { dim, coeffs })
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        VectorPolynomial {
            dim,
            coeffs: vec![vec![ZERO; dim]; degree + 1],
        }
    }

    pub fn scalar(coeffs: &[C64]) -> Result<Self> {
        Self::new(1, coeffs.iter().map(|&c| vec![c]).collect())
    }

    pub fn scalar_real(coeffs: &[f64]) -> Result<Self> {
        Self::scalar(&coeffs.iter().map(|&c| C64::new(c, 0.0)).collect::<Vec<_>>())
    }

    /// `zᵏ e_i` in dimension `d`.
    pub fn monomial(dim: usize, k: usize, i: usize) -> Self {
        let mut p = Self::zero(dim, k);
        p.coeffs[k][i] = C64::new(1.0, 0.0);
        p
    }

    /// Complex Gaussian coefficients (not normalized).
    pub fn random(dim: usize, degree: usize, rng: &mut impl Rng) -> Self {
        VectorPolynomial {
            dim,
            coeffs: (0..=degree)
                .map(|_| (0..dim).map(|_| gaussian(rng)).collect())
                .collect(),
        }
    }

    /// Random element of the unit sphere of `H²` of the given shape.
    pub fn random_unit(dim: usize, degree: usize, rng: &mut impl Rng) -> Self {
        Self::random(dim, degree, rng)
            .normalized()
            .expect("Gaussian draw is almost surely nonzero")
    }

    /// Flattened coefficient vector `(f̂(0), f̂(1), …)`.
    pub fn from_flat(dim: usize, flat: &[C64]) -> Result<Self> {
        if dim == 0 || flat.is_empty() || !flat.len().is_multiple_of(dim) {
            return Err(Error::invalid(
                "flat length must be a positive multiple of the dimension",
            ));
        }
        Self::new(dim, flat.chunks(dim).map(<[C64]>::to_vec).collect())
    }

    pub fn to_flat(&self) -> Vec<C64> {
        self.coeffs.concat()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Vec<C64>] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&[C64]> {
        self.coeffs.get(n).map(Vec::as_slice)
    }

    pub fn hardy_norm(&self) -> f64 {
        self.coeffs.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescaled to unit Hardy norm; fails on the zero polynomial.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.hardy_norm();
        if n == 0.0 {
            return Err(Error::invalid("cannot normalize the zero polynomial"));
        }
        Ok(self.map_coeffs(|_| C64::new(1.0 / n, 0.0)))
    }

    pub fn evaluate(&self, z: C64) -> Result<Vec<C64>> {
        check_in_closed_disc(z)?;
        Ok(self.horner(z))
    }

    /// Horner evaluation without the disc check.
    pub(crate) fn horner(&self, z: C64) -> Vec<C64> {
        let mut acc = vec![ZERO; self.dim];
        for c in self.coeffs.iter().rev() {
            for (a, b) in acc.iter_mut().zip(c) {
                *a = *a * z + b;
            }
        }
        acc
    }

    /// Entrywise conjugated coefficients: the polynomial `z ↦ conj(f(z̄))`.
    pub fn conjugate(&self) -> Self {
        VectorPolynomial {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.iter().map(|z| z.conj()).collect())
                .collect(),
        }
    }

    pub fn map_coeffs(&self, mut factor: impl FnMut(usize) -> C64) -> Self {
        VectorPolynomial {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| {
                    let f = factor(n);
                    c.iter().map(|z| z * f).collect()
                })
                .collect(),
        }
    }

    /// `Σ_n ⟨f̂(n), ĝ(n)⟩`, linear in the first argument.
    pub fn inner(&self, other: &VectorPolynomial) -> Result<C64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                context: "inner product dimension",
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y.conj()))
            .sum())
    }

    pub fn with_degree(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, vec![ZERO; self.dim]);
        VectorPolynomial { dim: self.dim, coeffs }
    }

    pub fn from_file_format(file: VectorFile) -> Result<Self> {
        if file.coeffs.len() != file.degree + 1 {
            return Err(Error::Format(format!(
                "degree {} requires {} coefficients, found {}",
                file.degree,
                file.degree + 1,
                file.coeffs.len()
            )));
        }
        let coeffs = file
            .coeffs
            .iter()
            .map(|c| c.iter().map(|p| C64::new(p[0], p[1])).collect())
            .collect();
        Self::new(file.dim, coeffs).map_err(|e| match e {
            Error::InvalidArgument(m) => Error::Format(m),
            other => other,
        })
    }

    pub fn to_file_format(&self) -> VectorFile {
        VectorFile {
            dim: self.dim,
            degree: self.degree(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file_format(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_format()).expect("serializable")
    }
}

/// Symbol of `z ↦ φ(z̄)*`.
pub fn conjugate_symbol(phi: &OperatorSymbol) -> OperatorSymbol {
    phi.conjugate()
}

pub fn hardy_norm(f: &VectorPolynomial) -> f64 {
    f.hardy_norm()
}

pub fn evaluate(phi: &OperatorSymbol, z: C64) -> Result<DenseMatrix> {
    phi.evaluate(z)
}
