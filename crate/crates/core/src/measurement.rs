//! Effective dichotomic observables on the `{|0>, |1>}` manifold.
//!
//! The source never populates more than one photon per mode, so every local
//! measurement enters the CHSH functional only through the 2x2 block of its
//! `±1`-valued observable. Two detectors are modelled:
//!
//! * on-off detection preceded by `U_G = D(-alpha) S(xi)`, with detector loss
//!   `Pi_0 = sum_n (1 - eta)^n |n><n|` applied after the Gaussian unitary
//!   (click = +1, no click = -1);
//! * ideal homodyne detection of `x_theta` with the bin `[z1, z2]` mapped to +1.
//!
//! Homodyne phases follow `<n|x_theta> = e^{-i n theta} psi_n(x)`.

use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
// Float math for no_std; unused where the toolchain provides it inherently.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{self, GaussianParams, CUTOFF_TOLERANCE, MAX_CUTOFF};

/// Largest endpoint magnitude; `±12` stands in for `±inf`.
pub const ENDPOINT_CLAMP: f64 = 12.0;

/// Hermiticity tolerance of a [`LocalObservable`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Spectrum slack of a [`LocalObservable`] beyond `[-1, 1]`.
pub const SPECTRUM_TOL: f64 = 1e-9;

/// 2x2 complex matrix on `{|0>, |1>}`.
pub type Mat2 = [[Complex64; 2]; 2];

/// Binned homodyne setting: quadrature phase and the `+1` interval.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HomodyneParams {
    pub theta: f64,
    pub z1: f64,
    pub z2: f64,
}

impl HomodyneParams {
    /// Clamps the endpoints to `±12` (infinities allowed) and requires `z1 < z2`.
    pub fn new(theta: f64, z1: f64, z2: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFinite("homodyne phase"));
        }
        if z1.is_nan() || z2.is_nan() {
            return Err(Error::NonFinite("homodyne interval"));
        }
        let z1 = z1.clamp(-ENDPOINT_CLAMP, ENDPOINT_CLAMP);
        let z2 = z2.clamp(-ENDPOINT_CLAMP, ENDPOINT_CLAMP);
        if z1 >= z2 {
            return Err(Error::InvalidInterval { z1, z2 });
        }
        Ok(Self { theta, z1, z2 })
    }
}

/// Gaussian-assisted on-off setting with detection efficiency `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OnOffParams {
    pub gauss: GaussianParams,
    pub eta: f64,
}

impl OnOffParams {
    pub fn new(gauss: GaussianParams, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: eta,
            });
        }
        Ok(Self { gauss, eta })
    }
}

/// Where a [`LocalObservable`] came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Homodyne(HomodyneParams),
    OnOff(OnOffParams),
    /// Supplied directly as a matrix.
    Explicit,
}

/// Hermitian 2x2 restriction of a `±1`-valued observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalObservable {
    pub matrix: Mat2,
    pub provenance: Provenance,
}

impl LocalObservable {
    pub fn explicit(matrix: Mat2) -> Self {
        Self {
            matrix,
            provenance: Provenance::Explicit,
        }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::explicit([[one, zero], [zero, one]])
    }

    /// `max |M - M^dag|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        (m[0][0].im.abs() * 2.0)
            .max(m[1][1].im.abs() * 2.0)
            .max((m[0][1] - m[1][0].conj()).norm())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = &self.matrix;
        let a = m[0][0].re;
        let d = m[1][1].re;
        let b = (m[0][1] + m[1][0].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }

    /// Hermitian to [`HERMITIAN_TOL`] with spectrum in `[-1, 1]` up to [`SPECTRUM_TOL`].
    pub fn is_valid(&self) -> bool {
        let [lo, hi] = self.eigenvalues();
        self.hermiticity_defect() <= HERMITIAN_TOL
            && lo >= -1.0 - SPECTRUM_TOL
            && hi <= 1.0 + SPECTRUM_TOL
    }
}

/// Overlaps `I_mn = int_{z1}^{z2} psi_m psi_n dx` for `m, n` in `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalIntegrals {
    pub i00: f64,
    pub i01: f64,
    pub i11: f64,
}

/// Closed-form wavefunction overlaps over `[z1, z2]` (endpoints clamped to `±12`).
pub fn homodyne_interval_integrals(z1: f64, z2: f64) -> Result<IntervalIntegrals> {
    let bin = HomodyneParams::new(0.0, z1, z2)?;
    Ok(interval_integrals_unchecked(bin.z1, bin.z2))
}

fn interval_integrals_unchecked(z1: f64, z2: f64) -> IntervalIntegrals {
    let g1 = (-z1 * z1).exp();
    let g2 = (-z2 * z2).exp();
    let i00 = 0.5 * erf_difference(z1, z2);
    let i01 = (g1 - g2) / (2.0 * PI).sqrt();
    let i11 = i00 - (z2 * g2 - z1 * g1) / PI.sqrt();
    IntervalIntegrals { i00, i01, i11 }
}

/// `erf(z2) - erf(z1)`, using `erfc` in the tails to avoid cancellation.
fn erf_difference(z1: f64, z2: f64) -> f64 {
    if z1 >= 0.0 {
        libm::erfc(z1) - libm::erfc(z2)
    } else if z2 <= 0.0 {
        libm::erfc(-z2) - libm::erfc(-z1)
    } else {
        libm::erf(z2) - libm::erf(z1)
    }
}

/// `2 int_{z1}^{z2} |x_theta><x_theta| dx - I` on `{|0>, |1>}`.
pub fn homodyne_observable(params: &HomodyneParams) -> Result<LocalObservable> {
    let bin = HomodyneParams::new(params.theta, params.z1, params.z2)?;
    let ints = interval_integrals_unchecked(bin.z1, bin.z2);
    let off = Complex64::from_polar(2.0 * ints.i01, bin.theta);
    let matrix = [
        [Complex64::new(2.0 * ints.i00 - 1.0, 0.0), off],
        [off.conj(), Complex64::new(2.0 * ints.i11 - 1.0, 0.0)],
    ];
    Ok(LocalObservable {
        matrix,
        provenance: Provenance::Homodyne(bin),
    })
}

/// Shift, scale and rotated phase that absorb a Gaussian unitary into a
/// homodyne bin: `U_G^dag x_theta U_G = s x_phi - delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneRemap {
    pub delta: f64,
    pub s: f64,
    pub phi: f64,
}

impl HomodyneRemap {
    pub fn new(gauss: &GaussianParams, theta: f64) -> Result<Self> {
        if !gauss.is_finite() || !theta.is_finite() {
            return Err(Error::NonFinite("Gaussian remap input"));
        }
        let r = gauss.xi.norm();
        let phi_xi = gauss.xi.arg();
        let alpha = gauss.alpha;
        // In this convention x_theta = (a e^{i theta} + a^dag e^{-i theta}) / sqrt(2)
        // and U^dag a U = a cosh r - a^dag e^{i phi_xi} sinh r - alpha.
        let rotor = Complex64::from_polar(1.0, theta);
        let delta = SQRT_2 * (alpha * rotor).re;
        // Coefficient of `a` in U^dag x_theta U, times sqrt(2): w = s e^{i phi}.
        let w = rotor * r.cosh() - Complex64::from_polar(r.sinh(), -theta - phi_xi);
        let s = w.norm();
        assert!(s > 0.0, "squeezing scale must be positive");
        Ok(Self {
            delta,
            s,
            phi: w.arg(),
        })
    }
}

/// Plain homodyne parameters equivalent to measuring `x_theta` in `[z1, z2]`
/// after `U_G`.
pub fn gaussian_homodyne_remap(
    gauss: &GaussianParams,
    theta: f64,
    z1: f64,
    z2: f64,
) -> Result<HomodyneParams> {
    let remap = HomodyneRemap::new(gauss, theta)?;
    HomodyneParams::new(
        remap.phi,
        (z1 + remap.delta) / remap.s,
        (z2 + remap.delta) / remap.s,
    )
}

/// 2x2 block of `<m| U_G^dag Pi_0 U_G |n>` at cutoff `dim`, and whether the
/// cutoff truncated the columns.
fn no_click_block(params: &OnOffParams, dim: usize) -> Result<(Mat2, bool)> {
    let ([c0, c1], truncated) = fock::gaussian_columns_tracked(&params.gauss, dim)?;
    let damping = 1.0 - params.eta;
    let mut block = [[Complex64::new(0.0, 0.0); 2]; 2];
    let mut weight = 1.0;
    for (u0, u1) in c0.iter().zip(&c1) {
        if weight == 0.0 {
            break;
        }
        block[0][0] += u0.conj() * u0 * weight;
        block[0][1] += u0.conj() * u1 * weight;
        block[1][1] += u1.conj() * u1 * weight;
        weight *= damping;
    }
    block[1][0] = block[0][1].conj();
    Ok((block, truncated))
}

fn block_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut worst = 0.0_f64;
    for m in 0..2 {
        for n in 0..2 {
            worst = worst.max((a[m][n] - b[m][n]).norm());
        }
    }
    worst
}

/// `I - 2 U_G^dag Pi_0 U_G` on `{|0>, |1>}`.
///
/// The cutoff starts at `dim` and doubles until the block is stable to
/// [`CUTOFF_TOLERANCE`]; beyond [`MAX_CUTOFF`] a convergence error is returned.
pub fn onoff_observable(params: &OnOffParams, dim: usize) -> Result<LocalObservable> {
    let params = OnOffParams::new(params.gauss, params.eta)?;
    let mut dim = dim.max(2);
    let (mut coarse, mut truncated) = no_click_block(&params, dim)?;
    let (block, _) = loop {
        if !truncated {
            // Doubling would redo the same arithmetic: the difference is exactly 0.
            break (coarse, dim);
        }
        if 2 * dim > MAX_CUTOFF {
            let (fine, _) = no_click_block(&params, MAX_CUTOFF)?;
            let residual = block_diff(&coarse, &fine);
            if residual <= CUTOFF_TOLERANCE {
                break (fine, MAX_CUTOFF);
            }
            return Err(Error::CutoffNotConverged {
                max_dim: MAX_CUTOFF,
                residual,
            });
        }
        let (fine, fine_truncated) = no_click_block(&params, 2 * dim)?;
        if block_diff(&coarse, &fine) <= CUTOFF_TOLERANCE {
            break (fine, 2 * dim);
        }
        coarse = fine;
        truncated = fine_truncated;
        dim *= 2;
    };
    let one = Complex64::new(1.0, 0.0);
    let matrix = [
        [one - block[0][0] * 2.0, -block[0][1] * 2.0],
        [-block[1][0] * 2.0, one - block[1][1] * 2.0],
    ];
    Ok(LocalObservable {
        matrix,
        provenance: Provenance::OnOff(params),
    })
}

/// Closed form of `<0| D(-alpha) S(xi) |n>` for `n` in `{0, 1}`.
///
/// With `G = <alpha| S(xi) |0> = (cosh r)^{-1/2} exp(-|alpha|^2/2 - e^{i phi} tanh r conj(alpha)^2 / 2)`
/// the two overlaps are `G` and `conj(alpha) G / cosh r`. Serves as an
/// independent reference for [`onoff_observable`] at `eta = 1`.
pub fn vacuum_overlap_oracle(gauss: &GaussianParams, n: usize) -> Complex64 {
    assert!(n <= 1, "vacuum overlap oracle covers n = 0, 1 only");
    let r = gauss.xi.norm();
    let phase = Complex64::from_polar(1.0, gauss.xi.arg());
    let a_conj = gauss.alpha.conj();
    let exponent = -gauss.alpha.norm_sqr() * 0.5 - phase * r.tanh() * a_conj * a_conj * 0.5;
    let g = exponent.exp() / r.cosh().sqrt();
    if n == 0 {
        g
    } else {
        a_conj * g / r.cosh()
    }
}

/// Squeezing strength in decibels, `10 log10(e^{2|r|})`.
pub fn squeezing_db(r: f64) -> f64 {
    20.0 * r.abs() / core::f64::consts::LN_10
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::DEFAULT_CUTOFF;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn full_line_integrals_and_identity() {
        let ints = homodyne_interval_integrals(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert!((ints.i00 - 1.0).abs() < 1e-15);
        assert!(ints.i01.abs() < 1e-15);
        assert!((ints.i11 - 1.0).abs() < 1e-15);

        let obs = homodyne_observable(&HomodyneParams::new(0.7, -12.0, 12.0).unwrap()).unwrap();
        let id = LocalObservable::identity();
        for m in 0..2 {
            for n in 0..2 {
                assert!((obs.matrix[m][n] - id.matrix[m][n]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn symmetric_interval_has_no_coherence() {
        let ints = homodyne_interval_integrals(-0.83, 0.83).unwrap();
        assert!(ints.i01.abs() < 1e-16);
    }

    #[test]
    fn degenerate_interval_rejected() {
        assert!(matches!(
            homodyne_interval_integrals(0.5, 0.5),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(matches!(
            homodyne_interval_integrals(13.0, 20.0),
            Err(Error::InvalidInterval { .. })
        ));
    }

    #[test]
    fn sign_binning_values() {
        let half_line = homodyne_interval_integrals(f64::NEG_INFINITY, 0.0).unwrap();
        assert!((half_line.i00 - 0.5).abs() < 1e-15);
        assert!((half_line.i01 + 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((half_line.i11 - 0.5).abs() < 1e-15);

        let obs = homodyne_observable(&HomodyneParams::new(0.0, 0.0, 12.0).unwrap()).unwrap();
        assert!(obs.matrix[0][0].norm() < 1e-15);
        assert!((obs.matrix[0][1].re - (2.0 / PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn identity_gaussian_leaves_bin_unchanged() {
        let out = gaussian_homodyne_remap(&GaussianParams::default(), 0.4, -1.0, 2.5).unwrap();
        assert!((out.theta - 0.4).abs() < 1e-15);
        assert!((out.z1 + 1.0).abs() < 1e-15);
        assert!((out.z2 - 2.5).abs() < 1e-15);
    }

    #[test]
    fn displacement_only_remap() {
        let alpha = c(0.3, -0.8);
        let theta = 1.2;
        let remap = HomodyneRemap::new(&GaussianParams::new(alpha, c(0.0, 0.0)), theta).unwrap();
        let rot = Complex64::from_polar(1.0, theta);
        let expected = ((alpha * rot + alpha.conj() * rot.conj()) / SQRT_2).re;
        assert!((remap.delta - expected).abs() < 1e-15);
        assert!((remap.s - 1.0).abs() < 1e-15);
        assert!((remap.phi - theta).abs() < 1e-15);
    }

    #[test]
    fn real_squeezing_scale() {
        let remap =
            HomodyneRemap::new(&GaussianParams::new(c(0.0, 0.0), c(0.2, 0.0)), 0.0).unwrap();
        assert!((remap.s - (-0.2f64).exp()).abs() < 1e-15);
        assert!(remap.phi.abs() < 1e-15);
    }

    #[test]
    fn onoff_without_gaussian() {
        let ideal = OnOffParams::new(GaussianParams::default(), 1.0).unwrap();
        let obs = onoff_observable(&ideal, DEFAULT_CUTOFF).unwrap();
        assert!((obs.matrix[0][0] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((obs.matrix[1][1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(obs.matrix[0][1].norm() < 1e-15);

        let lossy = OnOffParams::new(GaussianParams::default(), 0.7).unwrap();
        let obs = onoff_observable(&lossy, DEFAULT_CUTOFF).unwrap();
        assert!((obs.matrix[0][0].re + 1.0).abs() < 1e-15);
        assert!((obs.matrix[1][1].re - (2.0 * 0.7 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn onoff_coherent_closed_form() {
        let alpha = c(0.5, 0.0);
        let obs = onoff_observable(
            &OnOffParams::new(GaussianParams::new(alpha, c(0.0, 0.0)), 1.0).unwrap(),
            40,
        )
        .unwrap();
        let g = (-alpha.norm_sqr()).exp();
        assert!((obs.matrix[0][0].re - (1.0 - 2.0 * g)).abs() < 1e-12);
        assert!((obs.matrix[1][1].re - (1.0 - 2.0 * alpha.norm_sqr() * g)).abs() < 1e-12);
        assert!((obs.matrix[0][1] + alpha.conj() * 2.0 * g).norm() < 1e-12);
    }

    #[test]
    fn onoff_rejects_bad_efficiency() {
        for eta in [0.0, -0.1, 1.01, f64::NAN] {
            assert!(OnOffParams::new(GaussianParams::default(), eta).is_err());
        }
    }

    #[test]
    fn overlap_oracle_simple_cases() {
        let zero = GaussianParams::default();
        assert!((vacuum_overlap_oracle(&zero, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(vacuum_overlap_oracle(&zero, 1).norm() < 1e-15);
        let coherent = GaussianParams::new(c(0.3, 0.4), c(0.0, 0.0));
        assert!((vacuum_overlap_oracle(&coherent, 0).re - (-0.125f64).exp()).abs() < 1e-15);
        let squeezed = GaussianParams::new(c(0.0, 0.0), c(0.243, 0.0));
        assert!(
            (vacuum_overlap_oracle(&squeezed, 0).re - 1.0 / 0.243f64.cosh().sqrt()).abs() < 1e-15
        );
    }

    #[test]
    fn decibels() {
        assert!((squeezing_db(0.032) - 0.28).abs() < 0.01);
        assert!((squeezing_db(0.243) - 2.11).abs() < 0.01);
        assert_eq!(squeezing_db(0.0), 0.0);
        assert_eq!(squeezing_db(-0.243), squeezing_db(0.243));
    }
}
