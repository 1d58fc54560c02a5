//! Carleson-embedding functionals and the six-value norm chain, computed as
//! extremal eigen- and singular values of explicitly assembled matrices.
//!
//! Everything rests on `∫ z^a z̄^b (1−|z|²) dA = δ_{ab} π / ((a+1)(a+2))`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{FracOrder, OperatorSymbol};
use crate::error::{Error, Result};
use crate::hankel::{HankelSection, WeightRule};
use crate::linalg::{self, DenseMatrix, Extremal, Method, PowerOptions, C64};
use crate::multipliers::{apply_d, d_factor};
use crate::spaces::WeightSpec;

/// `π / ((a+1)(a+2))`.
pub fn monomial_weight(a: usize) -> f64 {
    let a = a as f64;
    PI / ((a + 1.0) * (a + 2.0))
}

const ZERO: C64 = C64::new(0.0, 0.0);

/// Products `ψ̂(j′)^* ψ̂(j)` for all `j′, j ≤ deg`.
fn coefficient_products(psi: &OperatorSymbol) -> Vec<Vec<DenseMatrix>> {
    let cs = psi.coeffs();
    cs.iter()
        .map(|a| {
            let ah = a.conj_transpose();
            cs.iter().map(|b| ah.matmul(b).expect("square blocks")).collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pairing {
    /// Test function evaluated at `z̄`.
    Anti,
    /// Test function evaluated at `z`.
    Analytic,
}

/// Hermitian matrix `G` with `∫ ‖ψ(z) f(·)‖² (1−|z|²) dA = f^* G f` for
/// coefficient vectors `f` of degree `≤ N`.
fn gram_matrix(psi: &OperatorSymbol, n: usize, pairing: Pairing) -> DenseMatrix {
    let d = psi.dim();
    let deg = psi.degree() as isize;
    let size = (n + 1) * d;
    let prods = coefficient_products(psi);
    let mut data = vec![ZERO; size * size];
    data.par_chunks_mut(size * d).enumerate().for_each(|(mp, rows)| {
        for m in 0..=n {
            let shift = m as isize - mp as isize;
            // Anti: j − j′ = m − m′, weight index j + m′.
            // Analytic: j + m = j′ + m′, weight index j + m.
            let mut block = vec![ZERO; d * d];
            let mut any = false;
            for j in 0..=deg {
                let jp = match pairing {
                    Pairing::Anti => j - shift,
                    Pairing::Analytic => j + shift,
                };
                if !(0..=deg).contains(&jp) {
                    continue;
                }
                let w = match pairing {
                    Pairing::Anti => monomial_weight(j as usize + mp),
                    Pairing::Analytic => monomial_weight(j as usize + m),
                };
                let p = &prods[jp as usize][j as usize];
                for (x, y) in block.iter_mut().zip(p.as_slice()) {
                    *x += y * w;
                }
                any = true;
            }
            if !any {
                continue;
            }
            for i in 0..d {
                rows[i * size + m * d..i * size + (m + 1) * d].copy_from_slice(&block[i * d..(i + 1) * d]);
            }
        }
    });
    DenseMatrix::from_vec(size, size, data).expect("consistent size")
}

fn hermitian_max(g: &DenseMatrix) -> Extremal {
    linalg::lambda_max_hermitian(g, &PowerOptions::default()).expect("Gram matrices are Hermitian by construction")
}

/// `sup_f ∫ ‖ψ(z) f(z̄)‖² (1−|z|²) dA` over unit `f` of degree `≤ N`.
pub fn gram_embedding_value(psi: &OperatorSymbol, n: usize) -> Extremal {
    hermitian_max(&gram_matrix(psi, n, Pairing::Anti))
}

/// `sup_f ∫ ‖ψ(z) f(z)‖² (1−|z|²) dA` over unit `f` of degree `≤ N`.
pub fn analytic_embedding_value(psi: &OperatorSymbol, n: usize) -> Extremal {
    hermitian_max(&gram_matrix(psi, n, Pairing::Analytic))
}

/// The anti-analytic Gram matrix, exposed for oracles and FFI.
pub fn gram_matrix_anti(psi: &OperatorSymbol, n: usize) -> DenseMatrix {
    gram_matrix(psi, n, Pairing::Anti)
}

pub fn gram_matrix_analytic(psi: &OperatorSymbol, n: usize) -> DenseMatrix {
    gram_matrix(psi, n, Pairing::Analytic)
}

/// Test-function degree used for value 6 once `N ≥ deg φ`: the extension
/// past `deg ψ` doubles from `EXTENSION_START` until the value moves by at
/// most `EXTENSION_TOL` (relative), but never past `EXTENSION_MAX`.
pub const EXTENSION_START: usize = 8;
pub const EXTENSION_MAX: usize = 256;
pub const EXTENSION_TOL: f64 = 1e-13;

/// Anti-analytic Gram supremum with the test-function degree increased until
/// the value stabilizes. Returns the value and the degree used.
pub fn gram_embedding_converged(psi: &OperatorSymbol) -> (Extremal, usize) {
    let deg = psi.degree();
    let mut ext = EXTENSION_START;
    let mut prev = gram_embedding_value(psi, deg + ext);
    while ext < EXTENSION_MAX {
        let next_ext = (2 * ext).min(EXTENSION_MAX);
        let next = gram_embedding_value(psi, deg + next_ext);
        let change = (next.value - prev.value).abs();
        prev = next;
        ext = next_ext;
        if change <= EXTENSION_TOL * prev.value.abs() {
            break;
        }
    }
    (prev, deg + ext)
}

/// Auxiliary exponent `max{2, 1+α} + 1`.
pub fn auxiliary_beta(alpha: f64) -> f64 {
    2.0_f64.max(1.0 + alpha) + 1.0
}

/// `√(π/2)`: raw Gram value 6 divided by its `dA₁`-normalized value.
pub fn l2_1_conversion() -> f64 {
    (PI / 2.0).sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct ValueMeta {
    pub method: &'static str,
    pub residual: f64,
    pub converged: bool,
    pub iters: usize,
}

impl From<&Extremal> for ValueMeta {
    fn from(e: &Extremal) -> Self {
        ValueMeta {
            method: match e.method {
                Method::Full => "full",
                Method::Power => "power",
                Method::Auto => "auto",
            },
            residual: e.residual,
            converged: e.converged,
            iters: e.iters,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Ratio {
    pub i: usize,
    pub j: usize,
    /// `v_i / v_j`, absent when `v_j = 0`.
    pub value: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormChainReport {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub values: [f64; 6],
    pub ratios: Vec<Ratio>,
    /// `sup ∫ ‖D^{1+α}φ(z) f(z̄)‖² (1−|z|²) dA`, unnormalized.
    pub gram_raw: f64,
    /// `√gram_raw / values[5]`.
    pub l2_conversion: f64,
    /// Test-function degree behind value 6.
    pub test_degree: usize,
    pub meta: Vec<ValueMeta>,
}

impl NormChainReport {
    pub fn ratio(&self, i: usize, j: usize) -> Option<f64> {
        self.ratios.iter().find(|r| r.i == i && r.j == j).and_then(|r| r.value)
    }
}

fn pairwise_ratios(values: &[f64; 6]) -> Vec<Ratio> {
    let mut out = Vec::with_capacity(15);
    for i in 0..6 {
        for j in i + 1..6 {
            out.push(Ratio {
                i: i + 1,
                j: j + 1,
                value: (values[j] != 0.0).then(|| values[i] / values[j]),
            });
        }
    }
    out
}

/// Block `(n, m) = out_w(n) · c(m, n) · ψ̂(m+n)` on `0 ≤ n, m ≤ size-1`,
/// with `scale(n, m)` supplying the scalar product of all factors.
fn projected_map(phi: &OperatorSymbol, blocks: usize, scale: impl Fn(usize, usize) -> f64 + Sync) -> DenseMatrix {
    let d = phi.dim();
    let size = blocks * d;
    let mut data = vec![ZERO; size * size];
    data.par_chunks_mut(size * d).enumerate().for_each(|(n, rows)| {
        for m in 0..blocks {
            let Some(c) = phi.coeff(m + n) else { break };
            let w = scale(n, m);
            for i in 0..d {
                for (x, y) in rows[i * size + m * d..i * size + (m + 1) * d].iter_mut().zip(c.row(i)) {
                    *x = y * w;
                }
            }
        }
    });
    DenseMatrix::from_vec(size, size, data).expect("consistent size")
}

/// The six quantities `‖φ‖_{k,α}` at truncation `N`.
///
/// Values 1–5 are largest singular values of `(N+1)`-block matrices (rows
/// and columns past `deg φ` are identically zero and trimmed). Value 6 is
/// the `dA₁`-normalized anti-analytic Gram supremum of `D^{1+α}φ`; for
/// `N ≥ deg φ` its test-function degree is chosen by
/// [`gram_embedding_converged`], otherwise it is `N`.
pub fn norm_chain(phi: &OperatorSymbol, alpha: FracOrder, n: usize) -> Result<NormChainReport> {
    let a = alpha.require_positive()?.value();
    let beta = auxiliary_beta(a);
    let deg = phi.degree();
    let blocks = n.min(deg) + 1;
    let opts = PowerOptions::default();
    let phi_t = phi.with_degree(deg.min(2 * n));

    let v1 = HankelSection::assemble(&phi_t, blocks - 1, WeightRule::Power(a), WeightRule::Identity).sigma_max(&opts);

    let log_2b = WeightSpec::log(2.0 * beta - 1.0)?;
    let log_1 = WeightSpec::log(1.0)?;
    let std_1 = WeightSpec::standard(1.0)?;
    let out_log_2b = |k: usize| log_2b.parseval_weight(k).sqrt();
    let out_log_1 = |k: usize| log_1.parseval_weight(k).sqrt();
    let out_std_1 = |k: usize| std_1.parseval_weight(k).sqrt();

    let m2 = projected_map(&phi_t, blocks, |k, m| {
        out_log_2b(k) * log_2b.projection_coefficient(m, k) * d_factor(beta + a, m + k)
    });
    let m3 = projected_map(&phi_t, blocks, |k, m| {
        out_log_1(k) * log_1.projection_coefficient(m, k) * d_factor(1.0 + a, m + k)
    });
    let m4 = projected_map(&phi_t, blocks, |k, m| {
        out_log_1(k) * std_1.projection_coefficient(m, k) * d_factor(1.0 + a, m + k)
    });
    let m5 = projected_map(&phi_t, blocks, |k, m| {
        out_std_1(k) * std_1.projection_coefficient(m, k) * d_factor(1.0 + a, m + k)
    });
    let v2 = linalg::sigma_max(&m2, &opts);
    let v3 = linalg::sigma_max(&m3, &opts);
    let v4 = linalg::sigma_max(&m4, &opts);
    let v5 = linalg::sigma_max(&m5, &opts);

    let psi = apply_d(FracOrder::new(1.0 + a)?, phi);
    let (g, test_degree) = if n >= deg {
        gram_embedding_converged(&psi)
    } else {
        (gram_embedding_value(&psi.with_degree(deg.min(2 * n)), n), n)
    };
    let gram_raw = g.value.max(0.0);
    let conversion = l2_1_conversion();
    let v6 = gram_raw.sqrt() / conversion;

    let values = [v1.value, v2.value, v3.value, v4.value, v5.value, v6];
    let mut meta: Vec<ValueMeta> = [&v1, &v2, &v3, &v4, &v5].into_iter().map(ValueMeta::from).collect();
    meta.push(ValueMeta::from(&g));
    Ok(NormChainReport {
        alpha: a,
        beta,
        n,
        d: phi.dim(),
        values,
        ratios: pairwise_ratios(&values),
        gram_raw,
        l2_conversion: conversion,
        test_degree,
        meta,
    })
}

/// Points `w` at which the kernel functionals are sampled.
#[derive(Clone, Debug)]
pub struct WGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
    pub refine: bool,
}

impl Default for WGrid {
    fn default() -> Self {
        let mut radii: Vec<f64> = (0..10).map(|k| k as f64 / 10.0).collect();
        radii.extend([0.95, 0.99]);
        WGrid {
            radii,
            angles: 32,
            refine: true,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridSup {
    pub value: f64,
    pub argmax: C64,
}

/// Subdivisions per side of the local refinement patch.
const W_REFINE: i32 = 4;

fn grid_sup(grid: &WGrid, f: impl Fn(C64) -> f64 + Sync) -> Result<GridSup> {
    if grid.radii.is_empty() || grid.angles == 0 {
        return Err(Error::invalid("w-grid needs at least one radius and one angle"));
    }
    if let Some(&r) = grid.radii.iter().find(|&&r| !(0.0..1.0).contains(&r)) {
        return Err(Error::OutsideDisc { re: r, im: 0.0 });
    }
    let dtheta = 2.0 * PI / grid.angles as f64;
    let pts: Vec<(f64, f64)> = grid
        .radii
        .iter()
        .flat_map(|&r| (0..grid.angles).map(move |j| (r, j as f64 * dtheta)))
        .collect();
    let pick = |pts: &[(f64, f64)]| -> (f64, f64, f64) {
        let vals: Vec<f64> = pts.par_iter().map(|&(r, t)| f(C64::from_polar(r, t))).collect();
        let mut best = 0;
        for (i, v) in vals.iter().enumerate() {
            if *v > vals[best] {
                best = i;
            }
        }
        (pts[best].0, pts[best].1, vals[best])
    };
    let (mut r, mut t, mut v) = pick(&pts);
    if grid.refine {
        let mut sorted = grid.radii.clone();
        sorted.sort_by(f64::total_cmp);
        let r_max = *sorted.last().expect("nonempty");
        let gap = sorted
            .windows(2)
            .filter(|w| w[0] <= r && r <= w[1] && w[1] > w[0])
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let dr = if gap.is_finite() { gap } else { 0.0 };
        let local: Vec<(f64, f64)> = (-W_REFINE..=W_REFINE)
            .flat_map(|i| (-W_REFINE..=W_REFINE).map(move |j| (i, j)))
            .map(|(i, j)| {
                let rr = (r + i as f64 * dr / W_REFINE as f64).clamp(0.0, r_max);
                (rr, t + j as f64 * dtheta / W_REFINE as f64)
            })
            .collect();
        let (r2, t2, v2) = pick(&local);
        if v2 > v {
            (r, t, v) = (r2, t2, v2);
        }
    }
    Ok(GridSup {
        value: v,
        argmax: C64::from_polar(r, t.rem_euclid(2.0 * PI)),
    })
}

/// `Q(w) = Σ_p c_p c_p^* π/((p+1)(p+2))` with `c_p = Σ_{k+j=p, k≤N} w̄^k ψ̂(j)`,
/// so `x^* Q(w) x = ∫ |k_w^N(z)|² ‖ψ(z)^* x‖² (1−|z|²) dA`.
fn weak_form(psi: &OperatorSymbol, w: C64, n: usize) -> DenseMatrix {
    let d = psi.dim();
    let deg = psi.degree();
    let wc = w.conj();
    let powers: Vec<C64> = std::iter::successors(Some(C64::new(1.0, 0.0)), |p| Some(p * wc))
        .take(n + 1)
        .collect();
    let mut q = DenseMatrix::zeros(d, d);
    for p in 0..=(n + deg) {
        let mut c = DenseMatrix::zeros(d, d);
        for j in p.saturating_sub(n)..=p.min(deg) {
            c = &c + &psi.coeff(j).expect("within degree").scale(powers[p - j]);
        }
        let cc = c.matmul(&c.conj_transpose()).expect("square");
        q = &q + &cc.scale_real(monomial_weight(p));
    }
    q
}

fn lambda_max_small(m: &DenseMatrix) -> f64 {
    let h = DenseMatrix::from_fn(m.rows(), m.cols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    linalg::lambda_max_hermitian(&h, &PowerOptions::default())
        .expect("symmetrized")
        .value
}

/// `(1−|w|²) λ_max Q(w)` at one point, with `ψ = D^{1+α}φ`.
pub fn weak_bmoa_at(phi: &OperatorSymbol, alpha: FracOrder, w: C64, n: usize) -> Result<f64> {
    let a = alpha.require_positive()?.value();
    check_open_disc(w)?;
    let psi = apply_d(FracOrder::new(1.0 + a)?, phi);
    Ok((1.0 - w.norm_sqr()) * lambda_max_small(&weak_form(&psi, w, n)))
}

pub fn weak_bmoa_value(phi: &OperatorSymbol, alpha: FracOrder, grid: &WGrid, n: usize) -> Result<GridSup> {
    let a = alpha.require_positive()?.value();
    let psi = apply_d(FracOrder::new(1.0 + a)?, phi);
    grid_sup(grid, |w| {
        (1.0 - w.norm_sqr()) * lambda_max_small(&weak_form(&psi, w, n))
    })
}

fn check_open_disc(w: C64) -> Result<()> {
    if w.norm() >= 1.0 {
        return Err(Error::OutsideDisc { re: w.re, im: w.im });
    }
    Ok(())
}

/// `K_w = (k_w ⊗ I_d)`: `(N+1)d × d`, block `m` equal to `w̄^m I`.
fn kernel_columns(w: C64, n: usize, d: usize) -> DenseMatrix {
    let wc = w.conj();
    DenseMatrix::from_fn((n + 1) * d, d, |row, col| {
        let (m, i) = (row / d, row % d);
        if i == col {
            wc.powu(m as u32)
        } else {
            ZERO
        }
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RkThesis {
    /// `sup_w (1−|w|²) sup_x ∫ ‖ψ(z) (k_w x)(z̄)‖² (1−|z|²) dA`, `ψ = D^{1+α}φ`.
    pub iii: GridSup,
    /// `sup_w (1−|w|²) sup_x ‖D^α Γ_φ (k_w x)‖²`.
    pub v: GridSup,
}

struct RkForms {
    gram: DenseMatrix,
    section: DenseMatrix,
    d: usize,
    n: usize,
}

impl RkForms {
    fn new(phi: &OperatorSymbol, alpha: f64, n: usize) -> Result<Self> {
        let psi = apply_d(FracOrder::new(1.0 + alpha)?, phi);
        Ok(RkForms {
            gram: gram_matrix(&psi, n, Pairing::Anti),
            section: HankelSection::assemble(phi, n, WeightRule::Power(alpha), WeightRule::Identity).into_matrix(),
            d: phi.dim(),
            n,
        })
    }

    fn iii(&self, w: C64) -> f64 {
        let k = kernel_columns(w, self.n, self.d);
        let q = k
            .conj_transpose()
            .matmul(&self.gram.matmul(&k).expect("shape"))
            .expect("shape");
        (1.0 - w.norm_sqr()) * lambda_max_small(&q)
    }

    fn v(&self, w: C64) -> f64 {
        let k = kernel_columns(w, self.n, self.d);
        let t = self.section.matmul(&k).expect("shape");
        let s = linalg::sigma_max(&t, &PowerOptions::default()).value;
        (1.0 - w.norm_sqr()) * s * s
    }
}

/// Both kernel-thesis values at a single point `w`: `(iii, v)`.
pub fn rk_thesis_at(phi: &OperatorSymbol, alpha: FracOrder, w: C64, n: usize) -> Result<(f64, f64)> {
    let a = alpha.value();
    if a < 0.0 {
        return Err(Error::invalid(format!("order must be nonnegative, got {a}")));
    }
    check_open_disc(w)?;
    let forms = RkForms::new(phi, a, n)?;
    Ok((forms.iii(w), forms.v(w)))
}

pub fn rk_thesis_value(phi: &OperatorSymbol, alpha: FracOrder, grid: &WGrid, n: usize) -> Result<RkThesis> {
    let a = alpha.value();
    if a < 0.0 {
        return Err(Error::invalid(format!("order must be nonnegative, got {a}")));
    }
    let forms = RkForms::new(phi, a, n)?;
    Ok(RkThesis {
        iii: grid_sup(grid, |w| forms.iii(w))?,
        v: grid_sup(grid, |w| forms.v(w))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::VectorPolynomial;
    use crate::quadrature::GaussLegendre;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    /// `∫ ‖ψ(z) f(ζ)‖² (1−|z|²) dA` with `ζ = z̄` or `z`, by tensor quadrature
    /// that is exact for these polynomial integrands.
    fn integral_oracle(psi: &OperatorSymbol, f: &VectorPolynomial, anti: bool) -> f64 {
        let total_deg = psi.degree() + f.degree();
        let angles = 2 * total_deg + 2;
        let rule = GaussLegendre::new(total_deg + 4);
        rule.integrate(0.0, 1.0, |r| {
            let mut acc = 0.0;
            for k in 0..angles {
                let z = C64::from_polar(r, 2.0 * PI * k as f64 / angles as f64);
                let arg = if anti { z.conj() } else { z };
                let v = psi.evaluate(z).unwrap().mul_vec(&f.evaluate(arg).unwrap());
                acc += v.iter().map(|x| x.norm_sqr()).sum::<f64>();
            }
            acc / angles as f64 * 2.0 * PI * r * (1.0 - r * r)
        })
    }

    #[test]
    fn constant_symbol_gram() {
        let cst = C64::new(1.5, -0.5);
        let psi = OperatorSymbol::scalar(&[cst]).unwrap();
        let g = gram_matrix_anti(&psi, 6);
        for m in 0..=6 {
            assert!((g[(m, m)].re - cst.norm_sqr() * monomial_weight(m)).abs() < 1e-14);
        }
        let v = gram_embedding_value(&psi, 6).value;
        assert!((v - PI * cst.norm_sqr() / 2.0).abs() < 1e-13);
        assert!((analytic_embedding_value(&psi, 6).value - v).abs() < 1e-13);
        assert_eq!(gram_embedding_value(&OperatorSymbol::zero(2, 3), 4).value, 0.0);
    }

    #[test]
    fn gram_forms_match_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [1, 2] {
            let psi = OperatorSymbol::random(d, 5, &mut rng);
            let n = 7;
            let ga = gram_matrix_anti(&psi, n);
            let gz = gram_matrix_analytic(&psi, n);
            for _ in 0..5 {
                let f = VectorPolynomial::random_unit(d, n, &mut rng);
                let x = f.to_flat();
                let qa: f64 = x.iter().zip(ga.mul_vec(&x)).map(|(a, b)| (a.conj() * b).re).sum();
                let qz: f64 = x.iter().zip(gz.mul_vec(&x)).map(|(a, b)| (a.conj() * b).re).sum();
                assert!((qa - integral_oracle(&psi, &f, true)).abs() < 1e-10 * qa.max(1.0));
                assert!((qz - integral_oracle(&psi, &f, false)).abs() < 1e-10 * qz.max(1.0));
            }
        }
    }

    #[test]
    fn gram_value_dominates_and_is_attained() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = OperatorSymbol::random(1, 5, &mut rng);
        let n = 5;
        let top = gram_embedding_value(&psi, n);
        for _ in 0..20 {
            let f = VectorPolynomial::random_unit(1, n, &mut rng);
            assert!(integral_oracle(&psi, &f, true) <= top.value + 1e-8);
        }
        let f = VectorPolynomial::from_flat(1, &top.vector)
            .unwrap()
            .normalized()
            .unwrap();
        assert!((integral_oracle(&psi, &f, true) - top.value).abs() < 1e-8);
    }

    #[test]
    fn two_dimensional_example_matches_quadrature() {
        // ψ(z) = e₁⊗e₁^* + z e₁⊗e₂^*
        let mut a0 = DenseMatrix::zeros(2, 2);
        a0[(0, 0)] = c(1.0);
        let mut a1 = DenseMatrix::zeros(2, 2);
        a1[(0, 1)] = c(1.0);
        let psi = OperatorSymbol::new(2, vec![a0, a1]).unwrap();
        for (anti, top) in [
            (true, gram_embedding_value(&psi, 4)),
            (false, analytic_embedding_value(&psi, 4)),
        ] {
            let f = VectorPolynomial::from_flat(2, &top.vector)
                .unwrap()
                .normalized()
                .unwrap();
            assert!((integral_oracle(&psi, &f, anti) - top.value).abs() < 1e-8);
        }
    }

    #[test]
    fn scalar_analytic_equals_anti() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let psi = OperatorSymbol::random(1, 6, &mut rng);
            let a = gram_embedding_value(&psi, 6).value;
            let b = analytic_embedding_value(&psi, 6).value;
            assert!((a - b).abs() <= 1e-10 * a);
        }
    }

    #[test]
    fn norm_chain_constant_and_zero() {
        let cst = C64::new(0.8, 0.6) * 2.0;
        let phi = OperatorSymbol::scalar(&[cst]).unwrap();
        let r = norm_chain(&phi, FracOrder::new(1.0).unwrap(), 3).unwrap();
        assert!((r.values[0] - cst.norm()).abs() < 1e-13);
        assert!((r.values[5] - cst.norm()).abs() < 1e-12);
        assert!((r.gram_raw.sqrt() - cst.norm() * l2_1_conversion()).abs() < 1e-12);
        assert_eq!(r.ratios.len(), 15);

        let z = norm_chain(&OperatorSymbol::zero(2, 4), FracOrder::new(0.5).unwrap(), 4).unwrap();
        assert!(z.values.iter().all(|&v| v == 0.0));
        assert!(z.ratios.iter().all(|r| r.value.is_none()));
        assert!(norm_chain(&phi, FracOrder::new(0.0).unwrap(), 3).is_err());
    }

    #[test]
    fn norm_chain_plateau_and_homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phi = OperatorSymbol::random(2, 6, &mut rng);
        let alpha = FracOrder::new(0.5).unwrap();
        let a = norm_chain(&phi, alpha, 6).unwrap();
        let b = norm_chain(&phi, alpha, 14).unwrap();
        let s = norm_chain(&phi.scale(C64::new(0.0, -3.0)), alpha, 6).unwrap();
        for k in 0..6 {
            assert!((a.values[k] - b.values[k]).abs() <= 1e-12 * a.values[k], "k={k}");
            assert!((s.values[k] - 3.0 * a.values[k]).abs() <= 1e-12 * s.values[k], "k={k}");
        }
    }

    #[test]
    fn values_grow_with_truncation_below_plateau() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = OperatorSymbol::random(1, 10, &mut rng);
        let alpha = FracOrder::new(1.0).unwrap();
        let mut prev = [0.0; 6];
        for n in 0..=10 {
            let r = norm_chain(&phi, alpha, n).unwrap();
            for (k, (v, p)) in r.values.iter().zip(&prev).take(5).enumerate() {
                assert!(*v >= p * (1.0 - 1e-12), "n={n} k={k}");
            }
            prev = r.values;
        }
    }

    #[test]
    fn weak_value_for_constant() {
        let cst = C64::new(0.0, 2.0);
        let phi = OperatorSymbol::scalar(&[cst]).unwrap();
        let alpha = FracOrder::new(1.0).unwrap();
        let at0 = weak_bmoa_at(&phi, alpha, c(0.0), 16).unwrap();
        assert!((at0 - PI * cst.norm_sqr() / 2.0).abs() < 1e-12);
        let sup = weak_bmoa_value(&phi, alpha, &WGrid::default(), 16).unwrap();
        assert!((sup.value - at0).abs() < 1e-12);
        assert_eq!(sup.argmax, c(0.0));
        let zero = weak_bmoa_value(&OperatorSymbol::zero(1, 2), alpha, &WGrid::default(), 8).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn weak_form_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let psi = OperatorSymbol::random(2, 3, &mut rng);
        let w = C64::new(0.3, 0.4);
        let n = 5;
        let q = weak_form(&psi, w, n);
        let x = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let form: f64 = x.iter().zip(q.mul_vec(&x)).map(|(a, b)| (a.conj() * b).re).sum();
        // ∫ |k_w(z)|² ‖ψ(z)^* x‖² (1−|z|²) dA
        let k = crate::spaces::reproducing_kernel(w, n).unwrap();
        let total = psi.degree() + n;
        let angles = 2 * total + 2;
        let rule = GaussLegendre::new(total + 4);
        let oracle = rule.integrate(0.0, 1.0, |r| {
            let mut acc = 0.0;
            for j in 0..angles {
                let z = C64::from_polar(r, 2.0 * PI * j as f64 / angles as f64);
                let kv = k.evaluate(z).unwrap()[0];
                let y = psi.evaluate(z).unwrap().conj_transpose().mul_vec(&x);
                acc += kv.norm_sqr() * y.iter().map(|v| v.norm_sqr()).sum::<f64>();
            }
            acc / angles as f64 * 2.0 * PI * r * (1.0 - r * r)
        });
        assert!((form - oracle).abs() < 1e-10 * oracle);
    }

    #[test]
    fn rk_v_variant_for_z() {
        let z = OperatorSymbol::scalar_real(&[0.0, 1.0]).unwrap();
        let alpha = FracOrder::new(0.0).unwrap();
        let n = 8;
        for w in [c(0.0), c(0.5), C64::new(0.0, 0.9)] {
            let (_, v) = rk_thesis_at(&z, alpha, w, n).unwrap();
            let k = crate::spaces::reproducing_kernel(w, n).unwrap();
            let out = HankelSection::plain(&z, n).apply(&k).unwrap();
            let direct = (1.0 - w.norm_sqr()) * out.hardy_norm().powi(2);
            assert!((v - direct).abs() < 1e-13);
            assert!((direct - (1.0 - w.norm_sqr()) * (1.0 + w.norm_sqr())).abs() < 1e-13);
        }
        let zero = rk_thesis_value(&OperatorSymbol::zero(1, 1), alpha, &WGrid::default(), 4).unwrap();
        assert_eq!((zero.iii.value, zero.v.value), (0.0, 0.0));
    }

    #[test]
    fn feasibility_inequalities_for_vector_symbols() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let alpha = FracOrder::new(1.0).unwrap();
        let n = 10;
        for _ in 0..5 {
            let u = VectorPolynomial::random(3, 4, &mut rng);
            let phi = OperatorSymbol::from_vector_column(&u);
            let psi = apply_d(FracOrder::new(2.0).unwrap(), &phi);
            let gram = gram_embedding_value(&psi, n).value;
            let weak = weak_bmoa_value(&phi, alpha, &WGrid::default(), n).unwrap().value;
            let rk = rk_thesis_value(&phi, alpha, &WGrid::default(), n).unwrap();
            assert!(weak <= gram * (1.0 + 1e-10));
            assert!(rk.iii.value <= gram * (1.0 + 1e-10));
        }
    }
}
