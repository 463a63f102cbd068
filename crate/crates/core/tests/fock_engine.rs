use proptest::prelude::*;
use spqn_core::fock::*;
use spqn_core::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `<m| D(alpha) |0> = e^{-|alpha|^2/2} alpha^m / sqrt(m!)`.
fn coherent_amplitude(alpha: Complex64, m: usize) -> Complex64 {
    (-0.5 * alpha.norm_sqr()).exp() * alpha.powu(m as u32) / factorial(m).sqrt()
}

/// `<2n| S(xi) |0> = (-e^{i phi} tanh r)^n sqrt((2n)!) / (2^n n!) / sqrt(cosh r)`.
fn squeezed_vacuum_amplitude(xi: Complex64, m: usize) -> Complex64 {
    if m % 2 == 1 {
        return c(0.0, 0.0);
    }
    let n = m / 2;
    let (r, phi) = (xi.norm(), xi.arg());
    let ratio = -Complex64::from_polar(r.tanh(), phi);
    ratio.powu(n as u32)
        * (factorial(2 * n).sqrt() / (2f64.powi(n as i32) * factorial(n)) / r.cosh().sqrt())
}

#[test]
fn annihilation_small_cases() {
    let a = annihilation_matrix(3).unwrap();
    for m in 0..3 {
        for n in 0..3 {
            let want = match (m, n) {
                (0, 1) => 1.0,
                (1, 2) => 2f64.sqrt(),
                _ => 0.0,
            };
            assert_eq!(a[(m, n)], c(want, 0.0), "({m},{n})");
        }
    }
    let a2 = annihilation_matrix(2).unwrap();
    assert_eq!(a2[(0, 1)], c(1.0, 0.0));
    assert_eq!(a2.entries().iter().filter(|z| z.norm() > 0.0).count(), 1);
    assert!(annihilation_matrix(1).is_err());
    assert!(annihilation_matrix(0).is_err());
}

#[test]
fn number_operator_diagonal() {
    let a = annihilation_matrix(12).unwrap();
    let n = a.adjoint().matmul(&a);
    for m in 0..12 {
        for k in 0..12 {
            let want = if m == k { m as f64 } else { 0.0 };
            assert!((n[(m, k)] - c(want, 0.0)).norm() < 1e-14);
        }
    }
}

#[test]
fn exponential_of_zero_and_diagonal() {
    let zero = TruncatedOperator::zeros(6).unwrap();
    let e = matrix_exponential(&zero).unwrap();
    assert!(e.max_abs_diff_block(&TruncatedOperator::identity(6).unwrap(), 6) < 1e-15);

    let d = [c(0.5, 0.0), c(-2.0, 1.0), c(3.0, -0.25), c(0.0, 7.0)];
    let mut diag = TruncatedOperator::zeros(4).unwrap();
    for (k, v) in d.iter().enumerate() {
        diag[(k, k)] = *v;
    }
    let e = matrix_exponential(&diag).unwrap();
    for (k, v) in d.iter().enumerate() {
        assert!((e[(k, k)] - v.exp()).norm() <= 1e-12 * v.exp().norm());
    }
}

#[test]
fn exponential_of_nilpotent_shift_matches_series() {
    // t a is nilpotent on the truncated space, so its series is finite.
    let dim = 16;
    let t = c(0.7, -1.3);
    let shift = annihilation_matrix(dim).unwrap().scale(t);
    let e = matrix_exponential(&shift).unwrap();
    let mut series = TruncatedOperator::identity(dim).unwrap();
    let mut power = TruncatedOperator::identity(dim).unwrap();
    for k in 1..dim {
        power = power.matmul(&shift).scale(c(1.0 / k as f64, 0.0));
        series = series.add(&power);
    }
    let scale = series.norm_inf();
    assert!(
        e.max_abs_diff_block(&series, dim) <= 1e-12 * scale,
        "{}",
        e.max_abs_diff_block(&series, dim)
    );
}

#[test]
fn exponential_rejects_non_finite() {
    let mut op = TruncatedOperator::zeros(3).unwrap();
    op[(1, 2)] = c(f64::NAN, 0.0);
    assert!(matrix_exponential(&op).is_err());
}

#[test]
fn displacement_examples() {
    let id = displacement_matrix(c(0.0, 0.0), 10).unwrap();
    assert!(id.max_abs_diff_block(&TruncatedOperator::identity(10).unwrap(), 10) < 1e-15);
    let d = displacement_matrix(c(0.5, 0.0), DEFAULT_CUTOFF).unwrap();
    assert!((d[(0, 0)] - c((-0.125f64).exp(), 0.0)).norm() < 1e-12);
    let alpha = c(0.3, 0.4);
    let d = displacement_matrix(alpha, DEFAULT_CUTOFF).unwrap();
    assert!((d[(1, 0)] - alpha * (-0.125f64).exp()).norm() < 1e-12);
}

#[test]
fn squeezing_examples() {
    let id = squeezing_matrix(c(0.0, 0.0), 10).unwrap();
    assert!(id.max_abs_diff_block(&TruncatedOperator::identity(10).unwrap(), 10) < 1e-15);
    let s = squeezing_matrix(c(0.243, 0.0), DEFAULT_CUTOFF).unwrap();
    assert!((s[(0, 0)] - c(1.0 / 0.243f64.cosh().sqrt(), 0.0)).norm() < 1e-12);
    assert_eq!(s[(1, 0)], c(0.0, 0.0));
}

#[test]
fn cutoff_convergence_examples() {
    let disp = |alpha: Complex64| move |dim| displacement_matrix(alpha, dim);
    let sq = |r: f64| move |dim| squeezing_matrix(c(r, 0.0), dim);
    assert!(cutoff_converged(disp(c(0.0, 0.0)), 2, 1e-8).unwrap());
    assert!(cutoff_converged(disp(c(0.0, 0.0)), 40, 1e-8).unwrap());
    assert!(cutoff_converged(sq(0.243), 40, 1e-8).unwrap());
    assert!(!cutoff_converged(sq(1.0), 4, 1e-8).unwrap());
}

#[test]
fn hermite_examples() {
    assert!((hermite_wavefunction(0, 0.0) - std::f64::consts::PI.powf(-0.25)).abs() < 1e-15);
    assert_eq!(hermite_wavefunction(1, 0.0), 0.0);
}

#[test]
fn hermite_orthonormal_under_quadrature() {
    // Trapezoid rule on a fine grid is spectrally accurate for these Gaussians.
    let (lo, hi, steps) = (-14.0, 14.0, 28_000);
    let h = (hi - lo) / steps as f64;
    let grid: Vec<f64> = (0..=steps).map(|k| lo + h * k as f64).collect();
    let psi: Vec<Vec<f64>> = (0..=10)
        .map(|n| grid.iter().map(|&x| hermite_wavefunction(n, x)).collect())
        .collect();
    for m in 0..=10 {
        for n in 0..=10 {
            let overlap: f64 = psi[m].iter().zip(&psi[n]).map(|(a, b)| a * b).sum::<f64>() * h;
            let want = if m == n { 1.0 } else { 0.0 };
            assert!((overlap - want).abs() <= 1e-8, "<{m}|{n}> = {overlap}");
        }
    }
}

#[test]
fn squeezed_vacuum_column_closed_form() {
    let xi = Complex64::from_polar(0.6, 1.1);
    let s = squeezing_matrix(xi, 64).unwrap();
    for m in 0..20 {
        assert!(
            (s[(m, 0)] - squeezed_vacuum_amplitude(xi, m)).norm() < 1e-12,
            "m={m}"
        );
    }
}

fn in_bounds_alpha() -> impl Strategy<Value = Complex64> {
    (0.0..=2.0f64, -std::f64::consts::PI..std::f64::consts::PI)
        .prop_map(|(m, p)| Complex64::from_polar(m, p))
}

fn in_bounds_xi() -> impl Strategy<Value = Complex64> {
    (-1.0..=1.0f64, -std::f64::consts::PI..std::f64::consts::PI)
        .prop_map(|(r, p)| Complex64::from_polar(r, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn displacement_is_unitary_on_leading_block(alpha in in_bounds_alpha()) {
        let d = displacement_matrix(alpha, DEFAULT_CUTOFF).unwrap();
        prop_assert!(d.unitarity_defect(DEFAULT_CUTOFF / 2) <= 1e-8);
    }

    #[test]
    fn squeezing_is_unitary_on_leading_block(xi in in_bounds_xi()) {
        let s = squeezing_matrix(xi, DEFAULT_CUTOFF).unwrap();
        prop_assert!(s.unitarity_defect(DEFAULT_CUTOFF / 2) <= 1e-8);
    }

    #[test]
    fn displacement_inverse(alpha in in_bounds_alpha()) {
        let dim = DEFAULT_CUTOFF;
        let prod = displacement_matrix(alpha, dim).unwrap().matmul(&displacement_matrix(-alpha, dim).unwrap());
        prop_assert!(prod.max_abs_diff_block(&TruncatedOperator::identity(dim).unwrap(), dim / 2) <= 1e-8);
    }

    #[test]
    fn coherent_closed_form(alpha in in_bounds_alpha()) {
        let d = displacement_matrix(alpha, DEFAULT_CUTOFF).unwrap();
        for m in 0..=5 {
            prop_assert!((d[(m, 0)] - coherent_amplitude(alpha, m)).norm() <= 1e-8);
        }
    }

    #[test]
    fn squeezing_parity_selection(xi in in_bounds_xi()) {
        let s = squeezing_matrix(xi, DEFAULT_CUTOFF).unwrap();
        for m in 0..DEFAULT_CUTOFF {
            for n in 0..DEFAULT_CUTOFF {
                if (m + n) % 2 == 1 {
                    prop_assert!(s[(m, n)].norm() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn exp_action_matches_dense(alpha in in_bounds_alpha(), xi in in_bounds_xi()) {
        let gauss = GaussianParams::new(alpha, xi);
        let dim = 56;
        let dense = gaussian_unitary(&gauss, dim).unwrap();
        let cols = gaussian_columns(&gauss, dim).unwrap();
        for (n, col) in cols.iter().enumerate() {
            for m in 0..dim / 2 {
                prop_assert!((dense[(m, n)] - col[m]).norm() <= 1e-10, "m={} n={}", m, n);
            }
        }
    }
}
