//! Growth experiments for the two unbounded-operator constructions and
//! the quantitative checks on differentiation order and primitives.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{FracOrder, OperatorSymbol, ShiftOrder, SparseSymbol};
use crate::error::{Error, Result};
use crate::gamma::ln_gamma_ratio;
use crate::hankel::{HankelSection, SparseHankelSection, WeightRule};
use crate::linalg::{self, DenseMatrix, PowerOptions, C64};
use crate::multipliers::{apply_d, d_factor};
use crate::spaces::{bloch_norm, monomial_a1log_norm, BlochGrid, BlochValue};

// ----- first construction -------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum BetaRule {
    /// `β_n = (1+n)^{−α−1/2}`.
    Default,
    /// `β_n = 0`.
    Zero,
    /// Explicit values; entries beyond the list are zero.
    Explicit(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct Dp1Config {
    pub alpha: FracOrder,
    pub beta_rule: BetaRule,
    pub n: usize,
}

impl Dp1Config {
    pub fn new(alpha: FracOrder, n: usize) -> Result<Self> {
        Ok(Dp1Config {
            alpha: alpha.require_positive()?,
            beta_rule: BetaRule::Default,
            n,
        })
    }

    pub fn with_rule(mut self, rule: BetaRule) -> Self {
        self.beta_rule = rule;
        self
    }

    pub fn with_n(&self, n: usize) -> Self {
        Dp1Config { n, ..self.clone() }
    }

    /// `β_0, …, β_N`.
    pub fn betas(&self) -> Vec<f64> {
        let a = self.alpha.value();
        (0..=self.n)
            .map(|k| match &self.beta_rule {
                BetaRule::Default => (1.0 + k as f64).powf(-a - 0.5),
                BetaRule::Zero => 0.0,
                BetaRule::Explicit(v) => v.get(k).copied().unwrap_or(0.0),
            })
            .collect()
    }

    /// Bound on `Σ_{k>N} β_k²`, when the rule admits one.
    pub fn tail_bound(&self) -> Option<f64> {
        let a = self.alpha.value();
        match &self.beta_rule {
            BetaRule::Default => Some((1.0 + self.n as f64).powf(-2.0 * a) / (2.0 * a)),
            BetaRule::Zero => Some(0.0),
            BetaRule::Explicit(v) => (v.len() <= self.n + 1).then_some(0.0),
        }
    }

    /// `ψ#` realized in `d = N+1`: coefficient `k` is `β_k e_k` placed in column 0.
    pub fn symbol(&self) -> SparseSymbol {
        let d = self.n + 1;
        let coeffs = self
            .betas()
            .into_iter()
            .enumerate()
            .map(|(k, b)| {
                if b != 0.0 {
                    vec![(k, 0, C64::new(b, 0.0))]
                } else {
                    Vec::new()
                }
            })
            .collect();
        SparseSymbol::new(d, coeffs).expect("entries within dimension")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Dp1ClosedForm {
    /// `sqrt(max_n (1+n)^{2α} Σ_{n≤k≤N} β_k²)`.
    pub right_norm: f64,
    /// Upper bound for the untruncated right norm, from the tail bound.
    pub right_norm_upper: Option<f64>,
    /// `sqrt(max_k Σ_{n≤N−k} (1+n)^{2α} β_{n+k}²)`.
    pub left_lower: f64,
    /// `(1+n)^{2α} γ_n²` (truncated) for each `n`.
    pub right_table: Vec<f64>,
    /// Column sums `Σ_n (1+n)^{2α} β_{n+k}²` for each `k`.
    pub left_table: Vec<f64>,
    pub tail_bound: Option<f64>,
}

pub fn dp1_closed_form(cfg: &Dp1Config) -> Dp1ClosedForm {
    let a = cfg.alpha.value();
    let b2: Vec<f64> = cfg.betas().iter().map(|b| b * b).collect();
    let n = cfg.n;
    let w2: Vec<f64> = (0..=n).map(|k| d_factor(2.0 * a, k)).collect();
    let mut gamma2 = vec![0.0; n + 2];
    for k in (0..=n).rev() {
        gamma2[k] = gamma2[k + 1] + b2[k];
    }
    let right_table: Vec<f64> = (0..=n).map(|k| w2[k] * gamma2[k]).collect();
    let left_table: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|k| (0..=n - k).map(|j| w2[j] * b2[j + k]).sum())
        .collect();
    let tail = cfg.tail_bound();
    let right_norm_upper = tail.map(|t| {
        let inside = (0..=n).map(|k| w2[k] * (gamma2[k] + t)).fold(0.0, f64::max);
        // n > N: (1+n)^{2α} γ_n² ≤ 1/(1+n) + 1/(2α)
        let beyond = match cfg.beta_rule {
            BetaRule::Default => 1.0 / (n as f64 + 2.0) + 1.0 / (2.0 * a),
            _ => 0.0,
        };
        inside.max(beyond).sqrt()
    });
    Dp1ClosedForm {
        right_norm: right_table.iter().cloned().fold(0.0, f64::max).sqrt(),
        right_norm_upper,
        left_lower: left_table.iter().cloned().fold(0.0, f64::max).sqrt(),
        right_table,
        left_table,
        tail_bound: tail,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Dp1Row {
    #[serde(rename = "N")]
    pub n: usize,
    /// `σ_max(D^α X_N)`.
    pub left: f64,
    /// `σ_max(X_N D^α)`.
    pub right: f64,
    pub right_closed: f64,
    pub left_lower: f64,
    /// `Σ_{n≤N} (1+n)^{2α} β_n²`.
    pub left_column_sq: f64,
    pub right_residual: f64,
    pub left_residual: f64,
}

/// Largest singular values of the weighted sparse sections at each `N`.
pub fn dp1_section_norms(cfg: &Dp1Config, n_list: &[usize]) -> Vec<Dp1Row> {
    let a = cfg.alpha.value();
    let opts = PowerOptions::power();
    n_list
        .iter()
        .map(|&n| {
            let c = cfg.with_n(n);
            let sym = c.symbol();
            let closed = dp1_closed_form(&c);
            let right =
                SparseHankelSection::assemble(&sym, n, WeightRule::Identity, WeightRule::Power(a)).sigma_max(&opts);
            let left =
                SparseHankelSection::assemble(&sym, n, WeightRule::Power(a), WeightRule::Identity).sigma_max(&opts);
            Dp1Row {
                n,
                left: left.value,
                right: right.value,
                right_closed: closed.right_norm,
                left_lower: closed.left_lower,
                left_column_sq: closed.left_table[0],
                right_residual: right.residual,
                left_residual: left.residual,
            }
        })
        .collect()
}

// ----- second construction ------------------------------------------------

pub fn schur_product(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    a.hadamard(b)
}

/// `((1+m)/(1+m+n))^α`.
pub fn dp2_entry(alpha: f64, m: usize, n: usize) -> f64 {
    ((1.0 + m as f64) / (1.0 + m as f64 + n as f64)).powf(alpha)
}

/// `(N+1) × (N+1)` matrix `B` with entries [`dp2_entry`].
pub fn dp2_schur_matrix(alpha: FracOrder, n: usize) -> Result<DenseMatrix> {
    let a = alpha.require_positive()?.value();
    Ok(DenseMatrix::from_real_fn(n + 1, n + 1, |i, j| dp2_entry(a, i, j)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    AllOnes,
    /// 32 seeded real Gaussian matrices.
    Gaussian,
    /// `1/(1+m+n)`.
    Hilbert,
    UpperTriangular,
    /// Unitary polar factor of `D_u B D_u` with `u_m = (1+m)^{−1/2}`.
    TraceDualPolar,
}

pub const GAUSSIAN_DRAWS: usize = 32;

impl WitnessKind {
    pub const BASIC: [WitnessKind; 4] = [
        WitnessKind::AllOnes,
        WitnessKind::Gaussian,
        WitnessKind::Hilbert,
        WitnessKind::UpperTriangular,
    ];
    pub const ALL: [WitnessKind; 5] = [
        WitnessKind::AllOnes,
        WitnessKind::Gaussian,
        WitnessKind::Hilbert,
        WitnessKind::UpperTriangular,
        WitnessKind::TraceDualPolar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WitnessKind::AllOnes => "all-ones",
            WitnessKind::Gaussian => "gaussian",
            WitnessKind::Hilbert => "hilbert",
            WitnessKind::UpperTriangular => "upper-triangular",
            WitnessKind::TraceDualPolar => "trace-dual-polar",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Seeded Gaussian draw `draw` at size `n+1`; one independent stream per
/// `(size, draw)` pair.
pub fn gaussian_witness(seed: u64, n: usize, draw: usize) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 8) | draw as u64);
    DenseMatrix::from_real_fn(n + 1, n + 1, |_, _| StandardNormal.sample(&mut rng))
}

/// Witness `U V^T` from the real SVD `D_u B D_u = U Σ V^T`.
pub fn trace_dual_polar_witness(b: &DenseMatrix) -> DenseMatrix {
    let n = b.rows();
    let u: Vec<f64> = (0..n).map(|m| (1.0 + m as f64).powf(-0.5)).collect();
    let x = nalgebra::DMatrix::from_fn(n, b.cols(), |i, j| u[i] * b[(i, j)].re * u[j]);
    let svd = x.svd(true, true);
    let (uu, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    DenseMatrix::from_real_nalgebra(&(uu * vt))
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRatio {
    pub witness: String,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchurBound {
    #[serde(rename = "N")]
    pub n: usize,
    pub value: f64,
    pub witness: String,
    pub ratios: Vec<WitnessRatio>,
}

fn ratio(b: &DenseMatrix, a: &DenseMatrix) -> f64 {
    let den = linalg::sigma_max_values_only(a);
    if den == 0.0 {
        return 0.0;
    }
    linalg::sigma_max_values_only(&b.hadamard(a).expect("same shape")) / den
}

fn witnesses(kind: WitnessKind, b: &DenseMatrix, seed: u64) -> Vec<(String, DenseMatrix)> {
    let size = b.rows();
    let n = size - 1;
    match kind {
        WitnessKind::AllOnes => vec![("all-ones".into(), DenseMatrix::from_real_fn(size, size, |_, _| 1.0))],
        WitnessKind::Gaussian => (0..GAUSSIAN_DRAWS)
            .map(|k| (format!("gaussian-{k}"), gaussian_witness(seed, n, k)))
            .collect(),
        WitnessKind::Hilbert => vec![(
            "hilbert".into(),
            DenseMatrix::from_real_fn(size, size, |i, j| 1.0 / (1.0 + i as f64 + j as f64)),
        )],
        WitnessKind::UpperTriangular => vec![(
            "upper-triangular".into(),
            DenseMatrix::from_real_fn(size, size, |i, j| if j >= i { 1.0 } else { 0.0 }),
        )],
        WitnessKind::TraceDualPolar => vec![("trace-dual-polar".into(), trace_dual_polar_witness(b))],
    }
}

/// `max_A σ_max(B∘A) / σ_max(A)` over the witness family, each norm from a
/// full singular value decomposition.
pub fn schur_lower_bound(b: &DenseMatrix, family: &[WitnessKind], seed: u64) -> Result<SchurBound> {
    if family.is_empty() {
        return Err(Error::invalid("witness family is empty"));
    }
    if !b.is_square() || b.rows() == 0 {
        return Err(Error::invalid("Schur multiplier must be a nonempty square matrix"));
    }
    let all: Vec<(String, DenseMatrix)> = family.iter().flat_map(|&k| witnesses(k, b, seed)).collect();
    let ratios: Vec<WitnessRatio> = all
        .par_iter()
        .map(|(name, a)| WitnessRatio {
            witness: name.clone(),
            ratio: ratio(b, a),
        })
        .collect();
    Ok(best_of(b.rows() - 1, ratios))
}

fn best_of(n: usize, ratios: Vec<WitnessRatio>) -> SchurBound {
    let mut best = 0;
    for (i, r) in ratios.iter().enumerate() {
        if r.ratio > ratios[best].ratio {
            best = i;
        }
    }
    SchurBound {
        n,
        value: ratios[best].ratio,
        witness: ratios[best].witness.clone(),
        ratios,
    }
}

/// [`schur_lower_bound`] along a ladder of sizes for `B = dp2_schur_matrix(α, N)`.
/// The best witness of each rung is carried, zero-padded, to the next, so
/// the bounds are nondecreasing by construction.
pub fn dp2_ladder(alpha: FracOrder, n_list: &[usize], family: &[WitnessKind], seed: u64) -> Result<Vec<SchurBound>> {
    let mut out: Vec<SchurBound> = Vec::with_capacity(n_list.len());
    let mut carried: Option<(String, DenseMatrix, usize)> = None;
    for &n in n_list {
        let b = dp2_schur_matrix(alpha, n)?;
        let mut bound = schur_lower_bound(&b, family, seed)?;
        if let Some((name, a, from)) = &carried {
            if a.rows() <= n + 1 {
                let padded = a.padded(n + 1, n + 1);
                let r = ratio(&b, &padded);
                bound.ratios.push(WitnessRatio {
                    witness: format!("{name}@{from}"),
                    ratio: r,
                });
                bound = best_of(n, bound.ratios);
            }
        }
        let best_matrix = rebuild_witness(&bound.witness, &b, seed, &carried, n)?;
        carried = Some((
            strip_origin(&bound.witness).to_string(),
            best_matrix,
            origin_of(&bound.witness, n),
        ));
        out.push(bound);
    }
    Ok(out)
}

fn strip_origin(name: &str) -> &str {
    name.split('@').next().unwrap_or(name)
}

fn origin_of(name: &str, n: usize) -> usize {
    name.split('@').nth(1).and_then(|s| s.parse().ok()).unwrap_or(n)
}

fn rebuild_witness(
    name: &str,
    b: &DenseMatrix,
    seed: u64,
    carried: &Option<(String, DenseMatrix, usize)>,
    n: usize,
) -> Result<DenseMatrix> {
    if name.contains('@') {
        let (_, a, _) = carried.as_ref().expect("carried witness exists");
        return Ok(a.padded(n + 1, n + 1));
    }
    let base = name.split('-').collect::<Vec<_>>();
    if base[0] == "gaussian" {
        let k: usize = base[1].parse().map_err(|_| Error::invalid("bad witness id"))?;
        return Ok(gaussian_witness(seed, n, k));
    }
    let kind = WitnessKind::parse(name).ok_or_else(|| Error::invalid(format!("unknown witness {name}")))?;
    Ok(witnesses(kind, b, seed).remove(0).1)
}

/// Symbol `φ(z) = diag(z^k) A diag(z^l)`: `φ̂(n) = Σ_{k+l=n} a_{kl} E_{kl}`.
pub fn dp2_symbol_from_matrix(a: &DenseMatrix) -> Result<OperatorSymbol> {
    if !a.is_square() || a.rows() == 0 {
        return Err(Error::invalid("matrix must be square and nonempty"));
    }
    let size = a.rows();
    let coeffs = (0..2 * size - 1)
        .map(|n| {
            DenseMatrix::from_fn(
                size,
                size,
                |k, l| if k + l == n { a[(k, l)] } else { C64::new(0.0, 0.0) },
            )
        })
        .collect();
    OperatorSymbol::new(size, coeffs)
}

/// `max σ_max(φ(z))` over `points` equispaced `z` on the circle of radius `r`.
pub fn symbol_sup_on_circle(phi: &OperatorSymbol, r: f64, points: usize) -> Result<f64> {
    let vals: Result<Vec<f64>> = (0..points)
        .into_par_iter()
        .map(|j| {
            let z = C64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / points as f64);
            Ok(linalg::sigma_max(&phi.evaluate(z)?, &PowerOptions::default()).value)
        })
        .collect();
    Ok(vals?.into_iter().fold(0.0, f64::max))
}

/// Max entry of `V^* D^α Γ_{D^{−α}φ} V − B∘A`, with `φ` built from `A` and
/// `V e_n = e_n zⁿ`.
pub fn dp2_compression_check(a: &DenseMatrix, alpha: FracOrder) -> Result<f64> {
    let al = alpha.require_positive()?;
    let phi = dp2_symbol_from_matrix(a)?;
    let n = a.rows() - 1;
    let neg = FracOrder::new(-al.value())?;
    let section = HankelSection::assemble(&apply_d(neg, &phi), n, WeightRule::d(al), WeightRule::Identity);
    let d = a.rows();
    let compressed = DenseMatrix::from_fn(d, d, |k, l| section.matrix()[(k * d + k, l * d + l)]);
    let target = schur_product(&dp2_schur_matrix(al, n)?, a)?;
    compressed.max_abs_diff(&target)
}

// ----- order control and primitives --------------------------------------

/// `Σ_{k=0}^{K} z^{2^k}`.
pub fn lacunary_symbol(k_max: u32) -> OperatorSymbol {
    let deg = 1usize << k_max;
    let mut c = vec![0.0; deg + 1];
    for k in 0..=k_max {
        c[1usize << k] = 1.0;
    }
    OperatorSymbol::scalar_real(&c).expect("nonempty")
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderControlRow {
    pub l: u32,
    pub sigma: f64,
    pub ratio: f64,
    pub converged: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderControl {
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub bloch: BlochValue,
    pub rows: Vec<OrderControlRow>,
}

/// `σ_max(section of D^α Γ_{D^{−α−l} ψ} D^l) / (l ‖ψ‖_B)` for each `l`.
pub fn order_control_ratios(
    psi: &OperatorSymbol,
    alpha: FracOrder,
    ls: &[ShiftOrder],
    n: usize,
) -> Result<OrderControl> {
    let a = alpha.require_positive()?.value();
    let bloch = bloch_norm(psi, BlochGrid::default());
    if bloch.value == 0.0 {
        return Err(Error::ZeroBlochNorm);
    }
    let opts = PowerOptions::default();
    let rows = ls
        .iter()
        .map(|l| {
            let lv = l.value();
            let chi = apply_d(FracOrder::new(-a - lv as f64).expect("finite"), psi);
            let s =
                HankelSection::assemble(&chi, n, WeightRule::Power(a), WeightRule::Power(lv as f64)).sigma_max(&opts);
            OrderControlRow {
                l: lv,
                sigma: s.value,
                ratio: s.value / (lv as f64 * bloch.value),
                converged: s.converged,
                residual: s.residual,
            }
        })
        .collect();
    Ok(OrderControl {
        alpha: a,
        n,
        bloch,
        rows,
    })
}

pub fn order_control_ratio(psi: &OperatorSymbol, alpha: FracOrder, l: ShiftOrder, n: usize) -> Result<f64> {
    Ok(order_control_ratios(psi, alpha, &[l], n)?.rows[0].ratio)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrimitiveCheck {
    pub alpha: f64,
    pub l: u32,
    pub n_zero: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_gap: f64,
}

/// Both sides of the primitive estimate tested on `h = c·z^N`.
pub fn primitive_norm_check_scaled(
    alpha: FracOrder,
    l: ShiftOrder,
    n_zero: usize,
    scale: f64,
) -> Result<PrimitiveCheck> {
    let a = alpha.require_positive()?.value();
    let lv = l.value() as f64;
    let nf = n_zero as f64;
    let s = scale.abs();
    let lhs = s * (1.0 + nf).powf(-lv) * monomial_a1log_norm(n_zero, alpha)?;
    // Γ(1+α) / (2^l Γ(1+α+l))
    let constant = (-lv * 2.0_f64.ln() - ln_gamma_ratio(1.0 + a, lv)).exp();
    let rhs = s * constant * ((2.0 + nf) / (1.0 + nf)).powf(lv) * monomial_a1log_norm(n_zero, FracOrder::new(a + lv)?)?;
    let rel_gap = if lhs == rhs {
        0.0
    } else {
        (lhs - rhs).abs() / lhs.abs().max(rhs.abs())
    };
    Ok(PrimitiveCheck {
        alpha: a,
        l: l.value(),
        n_zero,
        lhs,
        rhs,
        rel_gap,
    })
}

pub fn primitive_norm_check(alpha: FracOrder, l: ShiftOrder, n_zero: usize) -> Result<PrimitiveCheck> {
    primitive_norm_check_scaled(alpha, l, n_zero, 1.0)
}

/// Witness sizes must agree with the matrix; exposed for callers building
/// their own families.
pub fn witness_ratio(b: &DenseMatrix, a: &DenseMatrix) -> Result<f64> {
    b.hadamard(a)?;
    Ok(ratio(b, a))
}
