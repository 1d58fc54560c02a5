//! Diagonal Taylor-coefficient multipliers: `D^α`, its gamma-ratio variant
//! `D̃^α`, and arbitrary "small" multipliers.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::coefficients::{FracOrder, OperatorSymbol, SparseSymbol, VectorPolynomial};
use crate::error::{Error, Result};
use crate::gamma::gamma_ratio;
use crate::linalg::C64;

/// Anything with a Taylor expansion whose coefficients can be rescaled.
pub trait Coefficientwise: Sized {
    fn degree(&self) -> usize;
    fn scale_coefficients(&self, factor: &dyn Fn(usize) -> C64) -> Self;
}

impl Coefficientwise for OperatorSymbol {
    fn degree(&self) -> usize {
        OperatorSymbol::degree(self)
    }

    fn scale_coefficients(&self, factor: &dyn Fn(usize) -> C64) -> Self {
        self.map_coeffs(factor)
    }
}

impl Coefficientwise for VectorPolynomial {
    fn degree(&self) -> usize {
        VectorPolynomial::degree(self)
    }

    fn scale_coefficients(&self, factor: &dyn Fn(usize) -> C64) -> Self {
        self.map_coeffs(factor)
    }
}

impl Coefficientwise for SparseSymbol {
    fn degree(&self) -> usize {
        SparseSymbol::degree(self)
    }

    fn scale_coefficients(&self, factor: &dyn Fn(usize) -> C64) -> Self {
        let coeffs = (0..=self.degree())
            .map(|n| {
                let f = factor(n);
                self.coeff(n).iter().map(|&(r, c, v)| (r, c, v * f)).collect()
            })
            .collect();
        SparseSymbol::new(self.dim(), coeffs).expect("shape unchanged")
    }
}

/// `(1 + n)^α`.
pub fn d_factor(alpha: f64, n: usize) -> f64 {
    (1.0 + n as f64).powf(alpha)
}

/// `Γ(1 + n + α) / Γ(1 + n)`. Small integer orders use the rising
/// factorial, so `α = 1` reproduces `1 + n` exactly.
pub fn d_tilde_factor(alpha: f64, n: usize) -> f64 {
    if alpha.fract() == 0.0 && (0.0..=8.0).contains(&alpha) {
        let x = 1.0 + n as f64;
        return (0..alpha as usize).map(|k| x + k as f64).product();
    }
    gamma_ratio(1.0 + n as f64, alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorKind {
    Power,
    GammaRatio,
}

type CacheKey = (FactorKind, u64, usize);

const CACHE_CAPACITY: usize = 512;

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<[f64]>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<[f64]>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Factors `0..len` of the given multiplier, shared across callers.
pub fn factors(kind: FactorKind, alpha: f64, len: usize) -> Arc<[f64]> {
    let key = (kind, alpha.to_bits(), len);
    if let Some(hit) = cache().read().expect("factor cache poisoned").get(&key) {
        return Arc::clone(hit);
    }
    let f = match kind {
        FactorKind::Power => d_factor,
        FactorKind::GammaRatio => d_tilde_factor,
    };
    let values: Arc<[f64]> = (0..len).map(|n| f(alpha, n)).collect();
    let mut guard = cache().write().expect("factor cache poisoned");
    if guard.len() >= CACHE_CAPACITY {
        guard.clear();
    }
    Arc::clone(guard.entry(key).or_insert(values))
}

/// `D^α s`: coefficient `n` times `(1 + n)^α`.
pub fn apply_d<T: Coefficientwise>(alpha: FracOrder, s: &T) -> T {
    if alpha.value() == 0.0 {
        return s.scale_coefficients(&|_| C64::new(1.0, 0.0));
    }
    let f = factors(FactorKind::Power, alpha.value(), s.degree() + 1);
    s.scale_coefficients(&|n| C64::new(f[n], 0.0))
}

/// `D̃^α s`: coefficient `n` times `Γ(1 + n + α) / Γ(1 + n)`; needs `α > 0`.
pub fn apply_d_tilde<T: Coefficientwise>(alpha: FracOrder, s: &T) -> Result<T> {
    let alpha = alpha.require_positive()?;
    let f = factors(FactorKind::GammaRatio, alpha.value(), s.degree() + 1);
    Ok(s.scale_coefficients(&|n| C64::new(f[n], 0.0)))
}

/// `sup_n (1 + n)|λ_n|` over the given entries.
pub fn smallness_constant(lambda: &[C64]) -> f64 {
    lambda
        .iter()
        .enumerate()
        .map(|(n, l)| (1.0 + n as f64) * l.norm())
        .fold(0.0, f64::max)
}

/// Coefficient `n` times `λ_n`, together with `sup_{n ≤ deg} (1 + n)|λ_n|`.
pub fn apply_small_multiplier<T: Coefficientwise>(lambda: &[C64], s: &T) -> Result<(T, f64)> {
    let len = s.degree() + 1;
    if lambda.len() < len {
        return Err(Error::DimensionMismatch {
            context: "multiplier length must cover the degree",
            expected: len,
            found: lambda.len(),
        });
    }
    let out = s.scale_coefficients(&|n| lambda[n]);
    Ok((out, smallness_constant(&lambda[..len])))
}
