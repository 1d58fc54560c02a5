//! Finite block sections of vector-valued Hankel operators, optionally
//! composed with `D^α` on either side.
//!
//! The `(N+1)`-section of `Γ_φ` is the block matrix whose `(m, n)` block is
//! `φ̂(m + n)`; diagonal weights `w_L(m)` and `w_R(n)` multiply block rows and
//! block columns. Block `(m, n)` occupies rows `m·d..(m+1)·d` and columns
//! `n·d..(n+1)·d` of one flat matrix.

use rayon::prelude::*;

use crate::coefficients::{FracOrder, OperatorSymbol, SparseSymbol, VectorPolynomial};
use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix, Extremal, PowerOptions, SparseMatrix, C64};
use crate::multipliers::d_factor;

/// Diagonal weight sequence applied to block rows or block columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightRule {
    Identity,
    /// `(1 + n)^α`.
    Power(f64),
}

impl WeightRule {
    pub fn d(alpha: FracOrder) -> Self {
        WeightRule::Power(alpha.value())
    }

    pub fn weight(self, n: usize) -> f64 {
        match self {
            WeightRule::Identity => 1.0,
            WeightRule::Power(a) => d_factor(a, n),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HankelSection {
    dim: usize,
    truncation: usize,
    left: WeightRule,
    right: WeightRule,
    matrix: DenseMatrix,
}

impl HankelSection {
    /// Block `(m, n)` is `w_L(m) · φ̂(m+n) · w_R(n)` for `0 ≤ m, n ≤ N`.
    pub fn assemble(phi: &OperatorSymbol, n: usize, left: WeightRule, right: WeightRule) -> Self {
        let d = phi.dim();
        let size = (n + 1) * d;
        let wl: Vec<f64> = (0..=n).map(|m| left.weight(m)).collect();
        let wr: Vec<f64> = (0..=n).map(|k| right.weight(k)).collect();
        let mut data = vec![C64::new(0.0, 0.0); size * size];
        data.par_chunks_mut(size * d).enumerate().for_each(|(m, rows)| {
            for k in 0..=n {
                let Some(c) = phi.coeff(m + k) else { break };
                let w = wl[m] * wr[k];
                for i in 0..d {
                    let dst = &mut rows[i * size + k * d..i * size + (k + 1) * d];
                    for (x, y) in dst.iter_mut().zip(c.row(i)) {
                        *x = y * w;
                    }
                }
            }
        });
        HankelSection {
            dim: d,
            truncation: n,
            left,
            right,
            matrix: DenseMatrix::from_vec(size, size, data).expect("consistent size"),
        }
    }

    /// Unweighted section of `Γ_φ`.
    pub fn plain(phi: &OperatorSymbol, n: usize) -> Self {
        Self::assemble(phi, n, WeightRule::Identity, WeightRule::Identity)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `N`; the section has `N + 1` block rows and columns.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn weights(&self) -> (WeightRule, WeightRule) {
        (self.left, self.right)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn block(&self, m: usize, n: usize) -> DenseMatrix {
        let d = self.dim;
        self.matrix.submatrix(m * d, (m + 1) * d, n * d, (n + 1) * d)
    }

    /// Output coefficient `n` is `Σ_m block(n, m) f̂(m)`.
    pub fn apply(&self, f: &VectorPolynomial) -> Result<VectorPolynomial> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "test function dimension",
                expected: self.dim,
                found: f.dim(),
            });
        }
        if f.degree() > self.truncation {
            return Err(Error::DimensionMismatch {
                context: "test function degree exceeds truncation",
                expected: self.truncation,
                found: f.degree(),
            });
        }
        let x = f.with_degree(self.truncation).to_flat();
        VectorPolynomial::from_flat(self.dim, &self.matrix.mul_vec(&x))
    }

    pub fn sigma_max(&self, opts: &PowerOptions) -> Extremal {
        linalg::sigma_max(&self.matrix, opts)
    }
}

/// Same layout as [`HankelSection`] but stored sparsely, for symbols with
/// huge ambient dimension and few nonzeros.
#[derive(Clone, Debug)]
pub struct SparseHankelSection {
    dim: usize,
    truncation: usize,
    matrix: SparseMatrix,
}

impl SparseHankelSection {
    pub fn assemble(phi: &SparseSymbol, n: usize, left: WeightRule, right: WeightRule) -> Self {
        let d = phi.dim();
        let mut triplets = Vec::new();
        for m in 0..=n {
            let wl = left.weight(m);
            for k in 0..=n {
                if m + k > phi.degree() {
                    break;
                }
                let entries = phi.coeff(m + k);
                let w = wl * right.weight(k);
                for &(r, c, v) in entries {
                    triplets.push((m * d + r, k * d + c, v * w));
                }
            }
        }
        let size = (n + 1) * d;
        SparseHankelSection {
            dim: d,
            truncation: n,
            matrix: SparseMatrix::from_triplets(size, size, triplets),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// Largest singular value by power iteration on the compacted matrix.
    pub fn sigma_max(&self, opts: &PowerOptions) -> Extremal {
        linalg::sparse_sigma_max(&self.matrix.compact(), opts)
    }
}

/// Max entry of `section(Γ_φ D^α) − section(D^α Γ_{φ#})^*`.
pub fn adjoint_residual(phi: &OperatorSymbol, alpha: FracOrder, n: usize) -> f64 {
    let w = WeightRule::d(alpha);
    let lhs = HankelSection::assemble(phi, n, WeightRule::Identity, w).into_matrix();
    let rhs = HankelSection::assemble(&phi.conjugate(), n, w, WeightRule::Identity)
        .into_matrix()
        .conj_transpose();
    lhs.max_abs_diff(&rhs).expect("same shape")
}

/// Max entry of `Γ_{Dφ} − DΓ_φ − (DΓ_{φ#})^* + Γ_φ` on the `(N+1)`-section.
pub fn leibniz_residual(phi: &OperatorSymbol, n: usize) -> f64 {
    let one = FracOrder::new(1.0).expect("finite");
    let d = WeightRule::d(one);
    let id = WeightRule::Identity;
    let dphi = crate::multipliers::apply_d(one, phi);
    let a = HankelSection::assemble(&dphi, n, id, id).into_matrix();
    let b = HankelSection::assemble(phi, n, d, id).into_matrix();
    let c = HankelSection::assemble(&phi.conjugate(), n, d, id)
        .into_matrix()
        .conj_transpose();
    let e = HankelSection::assemble(phi, n, id, id).into_matrix();
    let total = &(&(&a - &b) - &c) + &e;
    total.max_abs()
}
