//! Weighted Bergman norms, Bergman projections of `φ f̄`, the Bloch norm,
//! Hardy-space reproducing kernels and the Carleson box intensity of
//! atomic measures.
//!
//! Measures are normalized to unit mass on the disc:
//! `dA_β = (1+β)(1−|z|²)^β dA/π` and `dA_{β,log} = (1+β)(log 1/|z|²)^β dA/π`.

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::{FracOrder, OperatorSymbol, VectorPolynomial};
use crate::error::{Error, Result};
use crate::gamma::{gamma, gamma_ratio, ln_gamma};
use crate::linalg::{self, PowerOptions, C64};
use crate::multipliers::apply_d;
use crate::quadrature::graded_power_integral;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Weight `(1 − |z|²)^β`.
    Standard,
    /// Weight `(log 1/|z|²)^β`.
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    beta: f64,
    flavor: Flavor,
    p: u8,
}

impl WeightSpec {
    pub fn new(beta: f64, flavor: Flavor, p: u8) -> Result<Self> {
        if !(beta.is_finite() && beta > -1.0) {
            return Err(Error::invalid(format!("weight exponent must exceed -1, got {beta}")));
        }
        if p != 1 && p != 2 {
            return Err(Error::invalid(format!(
                "integrability exponent must be 1 or 2, got {p}"
            )));
        }
        Ok(WeightSpec { beta, flavor, p })
    }

    pub fn standard(beta: f64) -> Result<Self> {
        Self::new(beta, Flavor::Standard, 2)
    }

    pub fn log(beta: f64) -> Result<Self> {
        Self::new(beta, Flavor::Log, 2)
    }

    pub fn with_p(self, p: u8) -> Result<Self> {
        Self::new(self.beta, self.flavor, p)
    }

    pub fn beta(self) -> f64 {
        self.beta
    }

    pub fn flavor(self) -> Flavor {
        self.flavor
    }

    pub fn p(self) -> u8 {
        self.p
    }

    /// `‖zᵏ‖²` in the `p = 2` space.
    pub fn parseval_weight(self, k: usize) -> f64 {
        let b = self.beta;
        match self.flavor {
            Flavor::Log => (ln_gamma(2.0 + b) - (1.0 + b) * (1.0 + k as f64).ln()).exp(),
            Flavor::Standard => gamma(2.0 + b) / gamma_ratio(1.0 + k as f64, 1.0 + b),
        }
    }

    /// Coefficient `c(m, n)` of `φ̂(m+n) f̂(m)` in coefficient `n` of the
    /// Bergman projection of `φ f̄`.
    pub fn projection_coefficient(self, m: usize, n: usize) -> f64 {
        let (mf, nf) = (m as f64, n as f64);
        let b = self.beta;
        match self.flavor {
            Flavor::Log => ((1.0 + nf) / (1.0 + mf + nf)).powf(1.0 + b),
            Flavor::Standard => gamma_ratio(1.0 + nf, 1.0 + b) / gamma_ratio(1.0 + mf + nf, 1.0 + b),
        }
    }

    /// `∫ F dA_w` for a radial profile `F`, given as `t ↦ F(√t)` with `t = |z|²`.
    pub fn radial_integral(self, nodes: usize, mut g: impl FnMut(f64) -> f64) -> f64 {
        let b = self.beta;
        let raw = match self.flavor {
            // v = 1 − t
            Flavor::Standard => graded_power_integral(b, 1.0, nodes, |v| g(1.0 - v)),
            // s = −ln t
            Flavor::Log => graded_power_integral(b, LOG_CUTOFF, nodes, |s| {
                let t = (-s).exp();
                g(t) * t
            }),
        };
        (1.0 + b) * raw
    }
}

/// Upper limit of the `s = −ln|z|²` integral; `e^{−60}` is below rounding.
const LOG_CUTOFF: f64 = 60.0;

/// `‖f‖` in `A²_β` or `A²_{β,log}` from the Taylor coefficients.
pub fn bergman_norm_parseval(f: &VectorPolynomial, w: WeightSpec) -> Result<f64> {
    if w.p() != 2 {
        return Err(Error::invalid("Parseval norm needs p = 2"));
    }
    Ok(f.coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| w.parseval_weight(k) * c.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt())
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per radial panel.
    pub radial_nodes: usize,
    /// Angular points for `p = 1`; `None` means `8·(degree+1)`.
    pub angular_nodes: Option<usize>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_nodes: 16,
            angular_nodes: None,
        }
    }
}

/// `(∫ ‖f‖^p dA_w)^{1/p}` by radial quadrature in `|z|²`. For `p = 2` the
/// angular mean is exact from coefficients; for `p = 1` it is a uniform
/// angular average.
pub fn bergman_norm_quadrature(f: &VectorPolynomial, w: WeightSpec, q: QuadratureSpec) -> Result<f64> {
    match w.p() {
        2 => {
            let sq: Vec<f64> = f
                .coeffs()
                .iter()
                .map(|c| c.iter().map(|z| z.norm_sqr()).sum())
                .collect();
            let total = w.radial_integral(q.radial_nodes, |t| sq.iter().rev().fold(0.0, |acc, &s| acc * t + s));
            Ok(total.max(0.0).sqrt())
        }
        _ => {
            let required = 8 * (f.degree() + 1);
            let m = q.angular_nodes.unwrap_or(required);
            if m < required {
                return Err(Error::InsufficientNodes { required, found: m });
            }
            let dirs: Vec<C64> = (0..m)
                .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64))
                .collect();
            Ok(w.radial_integral(q.radial_nodes, |t| {
                let r = t.max(0.0).sqrt();
                dirs.iter()
                    .map(|u| f.horner(u * r).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
                    .sum::<f64>()
                    / m as f64
            }))
        }
    }
}

/// `‖z^M‖` in `A¹_{α−1,log}`: `2^α Γ(1+α) / (2+M)^α`.
pub fn monomial_a1log_norm(m: usize, alpha: FracOrder) -> Result<f64> {
    let a = alpha.require_positive()?.value();
    Ok((a * 2.0_f64.ln() + ln_gamma(1.0 + a) - a * (2.0 + m as f64).ln()).exp())
}

/// Bergman projection of `φ f̄` in the `p = 2` space of `w`; the result has
/// the degree of `φ`.
pub fn bergman_project(phi: &OperatorSymbol, f: &VectorPolynomial, w: WeightSpec) -> Result<VectorPolynomial> {
    if phi.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            context: "symbol and test function dimension",
            expected: phi.dim(),
            found: f.dim(),
        });
    }
    let d = phi.dim();
    let coeffs = (0..=phi.degree())
        .map(|n| {
            let mut acc = vec![C64::new(0.0, 0.0); d];
            for (m, fm) in f.coeffs().iter().enumerate() {
                let Some(a) = phi.coeff(m + n) else { break };
                let c = w.projection_coefficient(m, n);
                for (x, y) in acc.iter_mut().zip(a.mul_vec(fm)) {
                    *x += y * c;
                }
            }
            acc
        })
        .collect();
    VectorPolynomial::new(d, coeffs)
}

#[derive(Clone, Copy, Debug)]
pub struct BlochGrid {
    pub radial: usize,
    /// `None` means `max(64, 4·(degree+1))`.
    pub angular: Option<usize>,
    pub refine: usize,
}

impl Default for BlochGrid {
    fn default() -> Self {
        BlochGrid {
            radial: 64,
            angular: None,
            refine: 2,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlochValue {
    pub value: f64,
    pub argmax: C64,
}

/// Local subdivision factor of each refinement round.
const REFINE_FACTOR: usize = 8;

/// `sup (1−|z|²) ‖Dφ(z)‖` over a polar grid with local refinement.
///
/// Radii are `1 − e^{−s}` with `s` uniform, so the grid resolves the
/// boundary layer of high-degree terms.
pub fn bloch_norm(phi: &OperatorSymbol, grid: BlochGrid) -> BlochValue {
    let dphi = apply_d(FracOrder::new(1.0).expect("finite"), phi);
    let deg = phi.degree();
    let s_max = (8.0 * (deg as f64 + 2.0)).ln();
    let radial = grid.radial.max(2);
    let angular = grid.angular.unwrap_or((4 * (deg + 1)).max(64)).max(1);
    let ds = s_max / (radial - 1) as f64;
    let dtheta = 2.0 * PI / angular as f64;

    let value_at = |s: f64, theta: f64| -> f64 {
        let s = s.clamp(0.0, 745.0);
        let r = 1.0 - (-s).exp();
        let z = C64::from_polar(r, theta);
        let m = dphi.evaluate(z).expect("inside disc");
        let norm = if m.rows() == 1 {
            m[(0, 0)].norm()
        } else {
            linalg::sigma_max(&m, &PowerOptions::default()).value
        };
        (1.0 - r * r) * norm
    };

    let points: Vec<(f64, f64)> = (0..radial)
        .flat_map(|i| (0..angular).map(move |j| (i as f64 * ds, j as f64 * dtheta)))
        .collect();
    let (mut best_s, mut best_t, mut best) = argmax(&points, value_at);
    let (mut hs, mut ht) = (ds, dtheta);
    for _ in 0..grid.refine {
        let k = REFINE_FACTOR as i64;
        let (ns, nt) = (hs / REFINE_FACTOR as f64, ht / REFINE_FACTOR as f64);
        let local: Vec<(f64, f64)> = (-k..=k)
            .flat_map(|i| (-k..=k).map(move |j| (i, j)))
            .map(|(i, j)| ((best_s + i as f64 * ns).max(0.0), best_t + j as f64 * nt))
            .collect();
        let (s, t, v) = argmax(&local, value_at);
        if v > best {
            (best_s, best_t, best) = (s, t, v);
        }
        (hs, ht) = (ns, nt);
    }
    let r = 1.0 - (-best_s).exp();
    BlochValue {
        value: best,
        argmax: C64::from_polar(r, best_t.rem_euclid(2.0 * PI)),
    }
}

/// First maximizer in grid order; ties keep the earlier point.
fn argmax(points: &[(f64, f64)], f: impl Fn(f64, f64) -> f64 + Sync) -> (f64, f64, f64) {
    let values: Vec<f64> = points.par_iter().map(|&(s, t)| f(s, t)).collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    (points[best].0, points[best].1, values[best])
}

/// Truncated Szegő kernel `Σ_{n≤N} w̄ⁿ zⁿ`.
pub fn reproducing_kernel(w: C64, n: usize) -> Result<VectorPolynomial> {
    if w.norm() >= 1.0 {
        return Err(Error::OutsideDisc { re: w.re, im: w.im });
    }
    let wc = w.conj();
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..=n {
        coeffs.push(p);
        p *= wc;
    }
    VectorPolynomial::scalar(&coeffs)
}

/// `Σ_{n≤N} |w|^{2n} = (1 − |w|^{2N+2}) / (1 − |w|²)`.
pub fn kernel_norm_sq_truncated(w: C64, n: usize) -> f64 {
    let r2 = w.norm_sqr();
    if r2 == 0.0 {
        return 1.0;
    }
    -(r2.ln() * (n as f64 + 1.0)).exp_m1() / (1.0 - r2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub re: f64,
    pub im: f64,
    pub mass: f64,
}

impl Atom {
    pub fn point(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// Finite atomic measure on the open disc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridMeasureFile", into = "GridMeasureFile")]
pub struct GridMeasure {
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridMeasureFile {
    atoms: Vec<Atom>,
}

impl TryFrom<GridMeasureFile> for GridMeasure {
    type Error = Error;

    fn try_from(f: GridMeasureFile) -> Result<Self> {
        GridMeasure::new(f.atoms)
    }
}

impl From<GridMeasure> for GridMeasureFile {
    fn from(m: GridMeasure) -> Self {
        GridMeasureFile { atoms: m.atoms }
    }
}

impl GridMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if !(a.mass.is_finite() && a.mass >= 0.0) {
                return Err(Error::invalid(format!(
                    "atom mass must be finite and nonnegative, got {}",
                    a.mass
                )));
            }
            let r = a.point().norm();
            if r.is_nan() || r >= 1.0 {
                return Err(Error::OutsideDisc { re: a.re, im: a.im });
            }
        }
        Ok(GridMeasure { atoms })
    }

    /// `count` equispaced atoms on the circle of the given radius, with
    /// total mass `total`.
    pub fn uniform_circle(radius: f64, count: usize, total: f64) -> Result<Self> {
        let mass = total / count as f64;
        Self::new(
            (0..count)
                .map(|j| {
                    let z = C64::from_polar(radius, 2.0 * PI * j as f64 / count as f64);
                    Atom {
                        re: z.re,
                        im: z.im,
                        mass,
                    }
                })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.atoms.iter().map(|a| Atom { mass: a.mass * c, ..*a }).collect())
    }

    pub fn with_atom(&self, atom: Atom) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        atoms.push(atom);
        Self::new(atoms)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CarlesonValue {
    pub value: f64,
    /// Start angle of the maximizing arc in `[0, 2π)`.
    pub arc_start: f64,
    /// Normalized length `m(I)` of the maximizing arc.
    pub arc_length: f64,
}

/// `sup_I μ(S(I)) / m(I)` over dyadic arcs of levels `0..=K` and arcs of
/// every dyadic length centred at each atom. Arcs are half-open; the box is
/// `1 − m(I) < |w| < 1`.
pub fn carleson_intensity(mu: &GridMeasure, levels: usize) -> Result<CarlesonValue> {
    if levels < 4 {
        return Err(Error::invalid(format!(
            "arc resolution must be at least 4, got {levels}"
        )));
    }
    let two_pi = 2.0 * PI;
    let atoms: Vec<(f64, f64, f64)> = mu
        .atoms()
        .iter()
        .filter(|a| a.mass > 0.0 && (a.re != 0.0 || a.im != 0.0))
        .map(|a| {
            let z = a.point();
            (z.norm(), z.arg().rem_euclid(two_pi), a.mass)
        })
        .collect();
    let mut best = CarlesonValue {
        value: 0.0,
        arc_start: 0.0,
        arc_length: 1.0,
    };
    let mut consider = |mass: f64, start: f64, length: f64| {
        let v = mass / length;
        if v > best.value {
            best = CarlesonValue {
                value: v,
                arc_start: start.rem_euclid(two_pi),
                arc_length: length,
            };
        }
    };
    for k in 0..=levels {
        let count = 1usize << k;
        let length = 1.0 / count as f64;
        let mut bins = vec![0.0; count];
        for &(r, theta, mass) in &atoms {
            if r > 1.0 - length {
                let j = ((theta / two_pi * count as f64) as usize).min(count - 1);
                bins[j] += mass;
            }
        }
        for (j, &mass) in bins.iter().enumerate() {
            consider(mass, two_pi * j as f64 / count as f64, length);
        }
        for &(_, centre, _) in &atoms {
            let start = centre - PI * length;
            let width = two_pi * length;
            let mass: f64 = atoms
                .iter()
                .filter(|&&(r, theta, _)| r > 1.0 - length && (theta - start).rem_euclid(two_pi) < width)
                .map(|a| a.2)
                .sum();
            consider(mass, start, length);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn parseval_examples() {
        let one = VectorPolynomial::scalar_real(&[1.0]).unwrap();
        let n = bergman_norm_parseval(&one, WeightSpec::log(1.0).unwrap()).unwrap();
        assert!((n * n - 2.0).abs() < 1e-14);
        let z = VectorPolynomial::monomial(1, 1, 0);
        let n = bergman_norm_parseval(&z, WeightSpec::standard(1.0).unwrap()).unwrap();
        assert!((n * n - 1.0 / 3.0).abs() < 1e-14);
        let p1 = WeightSpec::new(1.0, Flavor::Log, 1).unwrap();
        assert!(bergman_norm_parseval(&one, p1).is_err());
    }

    #[test]
    fn quadrature_p1_examples() {
        let one = VectorPolynomial::scalar_real(&[1.0]).unwrap();
        let q = QuadratureSpec::default();
        let mass = bergman_norm_quadrature(&one, WeightSpec::new(0.0, Flavor::Log, 1).unwrap(), q).unwrap();
        assert!((mass - 1.0).abs() < 1e-12);
        let v = bergman_norm_quadrature(&one, WeightSpec::new(1.0, Flavor::Log, 1).unwrap(), q).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let few = QuadratureSpec {
            angular_nodes: Some(7),
            ..q
        };
        assert!(matches!(
            bergman_norm_quadrature(&one, WeightSpec::new(1.0, Flavor::Log, 1).unwrap(), few),
            Err(Error::InsufficientNodes { required: 8, found: 7 })
        ));
    }

    #[test]
    fn quadrature_matches_parseval_on_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &beta in &[-0.5, 0.0, 1.0, 3.0, 2.3] {
            for flavor in [Flavor::Standard, Flavor::Log] {
                let w = WeightSpec::new(beta, flavor, 2).unwrap();
                let f = VectorPolynomial::random(2, 20, &mut rng);
                let a = bergman_norm_parseval(&f, w).unwrap();
                let b = bergman_norm_quadrature(&f, w, QuadratureSpec::default()).unwrap();
                assert!((a - b).abs() <= 1e-10 * a, "beta={beta} {flavor:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn monomial_norm_examples() {
        let one = FracOrder::new(1.0).unwrap();
        let two = FracOrder::new(2.0).unwrap();
        assert!((monomial_a1log_norm(0, one).unwrap() - 1.0).abs() < 1e-14);
        assert!((monomial_a1log_norm(0, two).unwrap() - 2.0).abs() < 1e-14);
        assert!(monomial_a1log_norm(0, FracOrder::new(0.0).unwrap()).is_err());
    }

    #[test]
    fn projection_coefficient_examples() {
        let log = WeightSpec::log(1.0).unwrap();
        let std = WeightSpec::standard(1.0).unwrap();
        for w in [log, std] {
            assert!((w.projection_coefficient(0, 0) - 1.0).abs() < 1e-14);
        }
        assert!((log.projection_coefficient(1, 1) - 4.0 / 9.0).abs() < 1e-15);
        assert!((std.projection_coefficient(1, 1) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn projection_of_constant_test_function() {
        let phi = OperatorSymbol::scalar_real(&[1.0, -2.0, 0.5, 3.0]).unwrap();
        let e = VectorPolynomial::scalar_real(&[1.0]).unwrap();
        for w in [WeightSpec::log(1.0).unwrap(), WeightSpec::standard(3.0).unwrap()] {
            let p = bergman_project(&phi, &e, w).unwrap();
            for n in 0..=3 {
                let want = phi.coeff(n).unwrap()[(0, 0)] * w.projection_coefficient(0, n);
                assert!((p.coeff(n).unwrap()[0] - want).norm() < 1e-14);
            }
        }
        let phi0 = OperatorSymbol::scalar(&[C64::new(2.0, 1.0)]).unwrap();
        let f0 = VectorPolynomial::scalar(&[C64::new(0.0, 3.0)]).unwrap();
        let p = bergman_project(&phi0, &f0, WeightSpec::log(2.0).unwrap()).unwrap();
        assert_eq!(p.coeff(0).unwrap()[0], C64::new(2.0, 1.0) * C64::new(0.0, 3.0));
    }

    #[test]
    fn log_norm_dominates_standard_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &beta in &[0.0, 1.0, 3.0] {
            for _ in 0..20 {
                let f = VectorPolynomial::random(2, 15, &mut rng);
                let s = bergman_norm_parseval(&f, WeightSpec::standard(beta).unwrap()).unwrap();
                let l = bergman_norm_parseval(&f, WeightSpec::log(beta).unwrap()).unwrap();
                assert!(s <= l * (1.0 + 1e-14));
            }
        }
    }

    #[test]
    fn bloch_examples() {
        let constant = OperatorSymbol::scalar(&[C64::new(0.6, -0.8)]).unwrap();
        let b = bloch_norm(&constant, BlochGrid::default());
        assert!((b.value - 1.0).abs() < 1e-14);
        assert_eq!(b.argmax, c(0.0));

        let z = OperatorSymbol::scalar_real(&[0.0, 1.0]).unwrap();
        let target = 4.0 * 3.0_f64.sqrt() / 9.0;
        let b = bloch_norm(&z, BlochGrid::default());
        assert!((b.value - target).abs() < 1e-6 * target, "{}", b.value);
        assert!((b.argmax.norm() - 1.0 / 3.0_f64.sqrt()).abs() < 1e-3);

        let mut diag = crate::linalg::DenseMatrix::zeros(2, 2);
        diag[(0, 0)] = c(1.0);
        let zd = OperatorSymbol::monomial(1, diag).unwrap();
        let bd = bloch_norm(&zd, BlochGrid::default());
        assert!((bd.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn kernel_examples() {
        let k0 = reproducing_kernel(c(0.0), 5).unwrap();
        assert!((k0.hardy_norm() - 1.0).abs() < 1e-15);
        let w = c(0.6);
        assert!((kernel_norm_sq_truncated(w, 2000) - 1.5625).abs() < 1e-12);
        assert!(reproducing_kernel(c(1.0), 3).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = VectorPolynomial::random(1, 12, &mut rng);
        let w = C64::new(0.3, -0.55);
        let k = reproducing_kernel(w, 12).unwrap();
        let ip = f.inner(&k).unwrap();
        assert!((ip - f.evaluate(w).unwrap()[0]).norm() < 1e-12);
        let kn = k.hardy_norm();
        assert!((kn * kn - kernel_norm_sq_truncated(w, 12)).abs() < 1e-13);
    }

    #[test]
    fn carleson_examples() {
        let origin = GridMeasure::new(vec![Atom {
            re: 0.0,
            im: 0.0,
            mass: 1.0,
        }])
        .unwrap();
        assert_eq!(carleson_intensity(&origin, 6).unwrap().value, 0.0);

        let ring = GridMeasure::uniform_circle(0.5, 64, 1.0).unwrap();
        let v = carleson_intensity(&ring, 10).unwrap().value;
        assert!((v - 1.0).abs() < 1e-12, "{v}");

        let scaled = ring.scaled(3.5).unwrap();
        assert_eq!(carleson_intensity(&scaled, 10).unwrap().value, 3.5 * v);

        let more = ring
            .with_atom(Atom {
                re: 0.0,
                im: 0.97,
                mass: 0.01,
            })
            .unwrap();
        assert!(carleson_intensity(&more, 10).unwrap().value >= v);
        assert!(carleson_intensity(&ring, 3).is_err());
    }

    #[test]
    fn measure_file_round_trip_and_validation() {
        let ring = GridMeasure::uniform_circle(0.5, 4, 1.0).unwrap();
        assert_eq!(GridMeasure::from_json(&ring.to_json()).unwrap(), ring);
        assert!(GridMeasure::from_json(r#"{"atoms":[{"re":1.0,"im":0.0,"mass":1.0}]}"#).is_err());
        assert!(GridMeasure::from_json(r#"{"atoms":[{"re":0.1,"im":0.0,"mass":-1.0}]}"#).is_err());
    }
}
