//! Gauss–Legendre rules and graded composite rules for radial integrals
//! with an algebraic endpoint singularity.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use std::collections::HashMap;

/// Nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared cached rule.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static RULES: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let rules = RULES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = rules.lock().expect("rule cache poisoned");
        Arc::clone(guard.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))))
    }

    /// `∫_a^b f`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Panels shrink geometrically toward the singular endpoint down to this width.
const GRADED_LEVELS: usize = 48;

/// `∫_0^L h(s) s^β ds` for smooth `h` and `β > −1`, on dyadic panels
/// graded toward `0` plus unit panels above 1. The first panel `[0, ε]`
/// is handled analytically as `h(0) ε^{β+1}/(β+1)`.
pub fn graded_power_integral(beta: f64, upper: f64, nodes: usize, mut h: impl FnMut(f64) -> f64) -> f64 {
    assert!(beta > -1.0, "weight exponent must exceed -1");
    let rule = GaussLegendre::cached(nodes);
    let eps = 0.5_f64.powi(GRADED_LEVELS as i32);
    let mut total = h(0.0) * eps.powf(beta + 1.0) / (beta + 1.0);
    let top = upper.min(1.0);
    let mut lo = eps * top;
    while lo < top {
        let hi = (2.0 * lo).min(top);
        total += rule.integrate(lo, hi, |s| h(s) * s.powf(beta));
        lo = hi;
    }
    let mut a = 1.0;
    while a < upper {
        let b = (a + 1.0).min(upper);
        total += rule.integrate(a, b, |s| h(s) * s.powf(beta));
        a = b;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::gamma;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(16);
        for k in 0..32 {
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            let got = rule.integrate(-1.0, 1.0, |x| x.powi(k));
            assert!((got - exact).abs() < 1e-14, "k={k}");
        }
        let sum: f64 = rule.weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_rule_has_center_node() {
        let rule = GaussLegendre::new(7);
        assert_eq!(rule.nodes[3], 0.0);
        assert!((rule.integrate(0.0, 1.0, |x| x.powi(12)) - 1.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn graded_rule_handles_endpoint_singularity() {
        // ∫_0^∞ e^{-s} s^β ds = Γ(1+β)
        for &beta in &[-0.5, 0.0, 0.3, 1.0, 2.7] {
            let got = graded_power_integral(beta, 60.0, 16, |s| (-s).exp());
            let exact = gamma(1.0 + beta);
            assert!((got - exact).abs() < 1e-12 * exact, "beta={beta}: {got} vs {exact}");
        }
    }
}
