use hankellab::coefficients::{conjugate_symbol, hardy_norm, FracOrder, OperatorSymbol, VectorPolynomial};
use hankellab::counterexamples::{dp1_closed_form, dp1_section_norms, dp2_compression_check, Dp1Config};
use hankellab::functionals::{analytic_embedding_value, gram_embedding_value};
use hankellab::hankel::{adjoint_residual, leibniz_residual, HankelSection, WeightRule};
use hankellab::linalg::{sigma_max, DenseMatrix, PowerOptions, C64};
use hankellab::multipliers::{apply_d, apply_d_tilde};
use hankellab::spaces::{bergman_norm_parseval, carleson_intensity, Atom, GridMeasure, WeightSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn op_norm(m: &DenseMatrix) -> f64 {
    sigma_max(m, &PowerOptions::default()).value
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

fn symbol(seed: u64, dim: usize, deg: usize) -> OperatorSymbol {
    OperatorSymbol::random(dim, deg, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn random_matrix(seed: u64, rows: usize, cols: usize) -> DenseMatrix {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| {
        C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjugation_is_isometric_involution(seed: u64, dim in 1usize..4, deg in 0usize..6) {
        let phi = symbol(seed, dim, deg);
        let c = conjugate_symbol(&phi);
        prop_assert_eq!(&conjugate_symbol(&c), &phi);
        for n in 0..=deg {
            let (a, b) = (op_norm(phi.coeff(n).unwrap()), op_norm(c.coeff(n).unwrap()));
            prop_assert!(close(a, b, 1e-12), "n={}: {} vs {}", n, a, b);
        }
        let f = VectorPolynomial::random(dim, deg, &mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        prop_assert!(close(hardy_norm(&f.conjugate()), hardy_norm(&f), 1e-15));
    }

    #[test]
    fn evaluation_is_linear(seed: u64, deg in 0usize..8, re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let phi = OperatorSymbol::random(3, deg, &mut r);
        let chi = OperatorSymbol::random(3, deg, &mut r);
        let (a, b) = (C64::new(r.gen_range(-2.0..2.0), 0.5), C64::new(-0.3, r.gen_range(-2.0..2.0)));
        let z = C64::new(re, im) * 0.7;
        let lhs = phi.combine(a, &chi, b).unwrap().evaluate(z).unwrap();
        let rhs = &phi.evaluate(z).unwrap().scale(a) + &chi.evaluate(z).unwrap().scale(b);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
    }

    #[test]
    fn multiplier_group_law(seed: u64, a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let phi = symbol(seed, 2, 6);
        let (fa, fb) = (FracOrder::new(a).unwrap(), FracOrder::new(b).unwrap());
        let two_step = apply_d(fa, &apply_d(fb, &phi));
        let one_step = apply_d(FracOrder::new(a + b).unwrap(), &phi);
        for n in 0..=6 {
            let (x, y) = (two_step.coeff(n).unwrap(), one_step.coeff(n).unwrap());
            prop_assert!(x.max_abs_diff(y).unwrap() <= 1e-12 * y.max_abs().max(1e-300));
        }
        prop_assert_eq!(conjugate_symbol(&apply_d(fa, &phi)), apply_d(fa, &conjugate_symbol(&phi)));
    }

    #[test]
    fn d_and_d_tilde_agree_at_order_one(seed: u64) {
        let phi = symbol(seed, 2, 9);
        let one = FracOrder::new(1.0).unwrap();
        prop_assert_eq!(apply_d(one, &phi), apply_d_tilde(one, &phi).unwrap());
    }

    #[test]
    fn sections_plateau_and_grow(seed: u64, dim in 1usize..3, deg in 0usize..6, alpha in 0.1..2.0f64) {
        let phi = symbol(seed, dim, deg);
        let opts = PowerOptions::default();
        let value = |n: usize| HankelSection::assemble(&phi, n, WeightRule::Power(alpha), WeightRule::Identity).sigma_max(&opts).value;
        let values: Vec<f64> = (0..=deg + 3).map(value).collect();
        for w in values.windows(2) {
            prop_assert!(w[1] >= w[0] * (1.0 - 1e-12));
        }
        for v in &values[deg..] {
            prop_assert!(close(*v, values[deg], 1e-12));
        }
    }

    #[test]
    fn exact_identities(seed: u64, dim in 1usize..4, deg in 0usize..8, n in 0usize..10, alpha in 0.05..3.0f64) {
        let phi = symbol(seed, dim, deg);
        prop_assert!(adjoint_residual(&phi, FracOrder::new(alpha).unwrap(), n) <= 1e-12);
        prop_assert!(leibniz_residual(&phi, n) <= 1e-12);
    }

    #[test]
    fn log_weight_dominates_standard(seed: u64, dim in 1usize..3, deg in 0usize..20, k in 0usize..3) {
        let beta = [0.0, 1.0, 3.0][k];
        let f = VectorPolynomial::random(dim, deg, &mut ChaCha8Rng::seed_from_u64(seed));
        let std = bergman_norm_parseval(&f, WeightSpec::standard(beta).unwrap()).unwrap();
        let log = bergman_norm_parseval(&f, WeightSpec::log(beta).unwrap()).unwrap();
        prop_assert!(std <= log * (1.0 + 1e-14), "{} > {}", std, log);
    }

    #[test]
    fn carleson_monotone_and_homogeneous(seed: u64, count in 1usize..12, exp in -3i32..4) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let atoms: Vec<Atom> = (0..count)
            .map(|_| {
                let z = C64::from_polar(r.gen_range(0.0..0.99), r.gen_range(0.0..std::f64::consts::TAU));
                Atom { re: z.re, im: z.im, mass: r.gen_range(0.0..1.0) }
            })
            .collect();
        let mu = GridMeasure::new(atoms).unwrap();
        let base = carleson_intensity(&mu, 6).unwrap().value;
        let c = 2f64.powi(exp);
        prop_assert_eq!(carleson_intensity(&mu.scaled(c).unwrap(), 6).unwrap().value, c * base);
        let z = C64::from_polar(r.gen_range(0.0..0.99), r.gen_range(0.0..std::f64::consts::TAU));
        let more = mu.with_atom(Atom { re: z.re, im: z.im, mass: r.gen_range(0.0..1.0) }).unwrap();
        prop_assert!(carleson_intensity(&more, 6).unwrap().value >= base);
    }

    #[test]
    fn scalar_embeddings_agree(seed: u64, deg in 0usize..10, extra in 0usize..6) {
        let psi = symbol(seed, 1, deg);
        let a = analytic_embedding_value(&psi, deg + extra).value;
        let g = gram_embedding_value(&psi, deg + extra).value;
        prop_assert!(close(a, g, 1e-12), "{} vs {}", a, g);
    }

    #[test]
    fn singular_value_symmetries(seed: u64, rows in 1usize..40, cols in 1usize..40) {
        let m = random_matrix(seed, rows, cols);
        let power = PowerOptions::power();
        let s = sigma_max(&m, &power);
        let t = sigma_max(&m.conj_transpose(), &power);
        prop_assert!(close(s.value, t.value, 1e-10));
        let sub = m.submatrix(0, rows.div_ceil(2), 0, cols.div_ceil(2));
        prop_assert!(sigma_max(&sub, &power).value <= s.value * (1.0 + 1e-12));
        let again = sigma_max(&m, &power);
        prop_assert_eq!(s.value.to_bits(), again.value.to_bits());
        prop_assert_eq!(s.iters, again.iters);
    }

    #[test]
    fn compression_identity(seed: u64, size in 1usize..8, alpha in 0.1..3.0f64) {
        let a = random_matrix(seed, size, size);
        prop_assert!(dp2_compression_check(&a, FracOrder::new(alpha).unwrap()).unwrap() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dp1_sections_match_closed_form(n in 0usize..80, alpha in 0.3..2.0f64) {
        let cfg = Dp1Config::new(FracOrder::new(alpha).unwrap(), n).unwrap();
        let closed = dp1_closed_form(&cfg);
        let row = &dp1_section_norms(&cfg, &[n])[0];
        prop_assert!((row.right - closed.right_norm).abs() <= 1e-10);
        prop_assert!(row.left * row.left >= row.left_column_sq * (1.0 - 1e-12));
    }
}
