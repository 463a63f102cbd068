//! Slow reference computations that share no code path with the fast
//! evaluators: numeric quadrature over Fock wavefunctions, dense matrix
//! exponentials and phase-space formulas for Gaussian states.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
// Float math for no_std; unused where the toolchain provides it inherently.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{gaussian_unitary, GaussianParams};
use crate::measurement::{IntervalIntegrals, LocalObservable, Provenance, ENDPOINT_CLAMP};

const MAX_DEPTH: u32 = 40;
const PANELS: usize = 64;

/// Adaptive Simpson quadrature of a vector-valued `f` over `[a, b]`.
///
/// The interval is first cut into equal panels so oscillating integrands are
/// resolved before the error estimate is trusted; each panel is then
/// bisected until the Richardson estimate drops below its share of `tol`.
pub fn adaptive_simpson<const K: usize, F>(f: F, a: f64, b: f64, tol: f64) -> [f64; K]
where
    F: Fn(f64) -> [f64; K],
{
    let mut total = [0.0; K];
    if !(b > a) {
        return total;
    }
    let h = (b - a) / PANELS as f64;
    for k in 0..PANELS {
        let (lo, hi) = (a + h * k as f64, a + h * (k + 1) as f64);
        let (flo, fhi) = (f(lo), f(hi));
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        let whole = simpson(lo, hi, &flo, &fmid, &fhi);
        let part = refine(
            &f,
            lo,
            hi,
            flo,
            fmid,
            fhi,
            whole,
            tol / PANELS as f64,
            MAX_DEPTH,
        );
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

fn simpson<const K: usize>(
    a: f64,
    b: f64,
    fa: &[f64; K],
    fm: &[f64; K],
    fb: &[f64; K],
) -> [f64; K] {
    core::array::from_fn(|i| (b - a) / 6.0 * (fa[i] + 4.0 * fm[i] + fb[i]))
}

#[allow(clippy::too_many_arguments)]
fn refine<const K: usize, F>(
    f: &F,
    a: f64,
    b: f64,
    fa: [f64; K],
    fm: [f64; K],
    fb: [f64; K],
    whole: [f64; K],
    tol: f64,
    depth: u32,
) -> [f64; K]
where
    F: Fn(f64) -> [f64; K],
{
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, &fa, &flm, &fm);
    let right = simpson(m, b, &fm, &frm, &fb);
    let err = (0..K)
        .map(|i| (left[i] + right[i] - whole[i]).abs())
        .fold(0.0, f64::max);
    if depth == 0 || err <= 15.0 * tol {
        return core::array::from_fn(|i| {
            left[i] + right[i] + (left[i] + right[i] - whole[i]) / 15.0
        });
    }
    let l = refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    let r = refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    core::array::from_fn(|i| l[i] + r[i])
}

/// `psi_0 .. psi_{out.len()-1}` at `x` by the normalized recurrence.
fn wavefunctions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = SQRT_2 * x * out[0];
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

fn clamp_bin(z1: f64, z2: f64) -> Result<(f64, f64)> {
    if z1.is_nan() || z2.is_nan() || !(z1 < z2) {
        return Err(Error::InvalidInterval { z1, z2 });
    }
    Ok((z1.max(-ENDPOINT_CLAMP), z2.min(ENDPOINT_CLAMP)))
}

/// `int psi_m psi_n` over `[z1, z2]` (clamped to `±12`) by adaptive quadrature.
pub fn quadrature_interval_integrals(z1: f64, z2: f64) -> Result<IntervalIntegrals> {
    let (a, b) = clamp_bin(z1, z2)?;
    let [i00, i01, i11] = adaptive_simpson(
        |x| {
            let mut psi = [0.0; 2];
            wavefunctions(x, &mut psi);
            [psi[0] * psi[0], psi[0] * psi[1], psi[1] * psi[1]]
        },
        a,
        b,
        1e-14,
    );
    Ok(IntervalIntegrals { i00, i01, i11 })
}

/// `U_G^dag (2 int_{z1}^{z2} |x_theta><x_theta| dx - I) U_G` on `{|0>, |1>}`,
/// from a dense `dim`-dimensional `U_G` and quadrature over the transformed
/// wavefunctions `<x_theta| U_G |n> = sum_k e^{i k theta} psi_k(x) <k|U_G|n>`,
/// in the convention `<k|x_theta> = e^{-i k theta} psi_k(x)`.
pub fn fock_homodyne_observable(
    gauss: &GaussianParams,
    theta: f64,
    z1: f64,
    z2: f64,
    dim: usize,
) -> Result<LocalObservable> {
    let (a, b) = clamp_bin(z1, z2)?;
    let u = gaussian_unitary(gauss, dim)?;
    // Column n of U with the e^{ik theta} phases folded in.
    let cols: [Vec<Complex64>; 2] = core::array::from_fn(|n| {
        (0..dim)
            .map(|k| Complex64::from_polar(1.0, k as f64 * theta) * u[(k, n)])
            .collect()
    });
    let integrand = |x: f64| {
        let mut psi = vec![0.0; dim];
        wavefunctions(x, &mut psi);
        let f0: Complex64 = cols[0].iter().zip(&psi).map(|(c, p)| c * p).sum();
        let f1: Complex64 = cols[1].iter().zip(&psi).map(|(c, p)| c * p).sum();
        let f01 = f0.conj() * f1;
        [f0.norm_sqr(), f01.re, f01.im, f1.norm_sqr()]
    };
    let [i00, i01_re, i01_im, i11] = adaptive_simpson(integrand, a, b, 1e-11);
    let one = Complex64::new(1.0, 0.0);
    let off = Complex64::new(i01_re, i01_im) * 2.0;
    let matrix = [
        [one * (2.0 * i00 - 1.0), off],
        [off.conj(), one * (2.0 * i11 - 1.0)],
    ];
    Ok(LocalObservable {
        matrix,
        provenance: Provenance::Explicit,
    })
}

/// Probability that a detector of efficiency `eta` stays dark on
/// `U_G |0> = D(-alpha) S(xi) |0>`, from the Gaussian state's covariance:
/// loss maps `(V, d)` to `(eta V + (1 - eta) I/2, sqrt(eta) d)` and the vacuum
/// overlap is `exp(-d^T (V + I/2)^{-1} d / 2) / sqrt(det(V + I/2))`.
pub fn gaussian_no_click_probability(gauss: &GaussianParams, eta: f64) -> f64 {
    let r = gauss.xi.norm();
    let half = 0.5 * gauss.xi.arg();
    let (c, s) = (half.cos(), half.sin());
    let (squeezed, anti) = (0.5 * (-2.0 * r).exp(), 0.5 * (2.0 * r).exp());
    // V = R diag(squeezed, anti) R^T, R rotating x onto x_{phi/2}.
    let vxx = c * c * squeezed + s * s * anti;
    let vpp = s * s * squeezed + c * c * anti;
    let vxp = c * s * (squeezed - anti);
    let lossy = |v: f64, diag: bool| eta * v + if diag { 0.5 * (1.0 - eta) } else { 0.0 };
    let (axx, app, axp) = (
        lossy(vxx, true) + 0.5,
        lossy(vpp, true) + 0.5,
        lossy(vxp, false),
    );
    let mean = -gauss.alpha * (2.0 * eta).sqrt();
    let (dx, dp) = (mean.re, mean.im);
    let det = axx * app - axp * axp;
    let quad = (app * dx * dx - 2.0 * axp * dx * dp + axx * dp * dp) / det;
    (-0.5 * quad).exp() / det.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::hermite_wavefunction;

    #[test]
    fn simpson_on_polynomial_and_gaussian() {
        let [v] = adaptive_simpson(|x| [x * x * x - x], -1.0, 2.0, 1e-12);
        assert!((v - (4.0 - 2.0 - 0.25 + 0.5)).abs() < 1e-12);
        let [g] = adaptive_simpson(|x| [(-x * x).exp()], -12.0, 12.0, 1e-13);
        assert!((g - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn recurrence_matches_single_wavefunctions() {
        let mut psi = [0.0; 12];
        wavefunctions(0.7, &mut psi);
        for (n, v) in psi.iter().enumerate() {
            assert!((v - hermite_wavefunction(n, 0.7)).abs() < 1e-14);
        }
    }

    #[test]
    fn vacuum_never_clicks() {
        let gauss = GaussianParams::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        assert!((gaussian_no_click_probability(&gauss, 0.6) - 1.0).abs() < 1e-15);
        let coherent = GaussianParams::new(Complex64::new(0.3, -0.4), Complex64::new(0.0, 0.0));
        let want = (-0.6 * 0.25f64).exp();
        assert!((gaussian_no_click_probability(&coherent, 0.6) - want).abs() < 1e-15);
    }
}
