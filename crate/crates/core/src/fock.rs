//! Truncated Fock-space linear algebra.
//!
//! Operators act on the span of `|0>, ..., |dim-1>`. Quadratures follow
//! `x_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt(2)`, so the vacuum
//! quadrature variance is 1/2 and `psi_0(x) = pi^{-1/4} exp(-x^2/2)`.
//!
//! Displacement `D(beta) = exp(beta a^dag - conj(beta) a)` and squeezing
//! `S(xi) = exp((conj(xi) a^2 - xi a^dag^2) / 2)` are obtained from the
//! exponential of their truncated generators, either densely
//! ([`matrix_exponential`]) or through the action on a few basis vectors
//! ([`LadderGenerator::exp_action`]). Closed-form matrix elements only appear
//! in tests.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
// Float math for no_std; unused where the toolchain provides it inherently.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Default Fock cutoff.
pub const DEFAULT_CUTOFF: usize = 40;

/// Largest cutoff reached by automatic doubling.
pub const MAX_CUTOFF: usize = 1024;

/// Elementwise tolerance used by automatic cutoff doubling.
pub const CUTOFF_TOLERANCE: f64 = 1e-8;

/// Dense `dim x dim` complex matrix on the truncated Fock basis, indexed by
/// photon numbers `(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl TruncatedOperator {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            entries: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Self::zeros(dim)?;
        for k in 0..dim {
            op[(k, k)] = ONE;
        }
        Ok(op)
    }

    /// Builds an operator from row-major entries.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::LayoutMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for m in 0..n {
            for k in 0..n {
                out.entries[k * n + m] = self.entries[m * n + k].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let lhs = self.entries[i * n + k];
                if lhs == ZERO {
                    continue;
                }
                let rhs_row = &rhs.entries[k * n..(k + 1) * n];
                for (o, r) in row.iter_mut().zip(rhs_row) {
                    *o += lhs * r;
                }
            }
        }
        Self {
            dim: n,
            entries: out,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            entries,
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.entries
            .chunks(self.dim)
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        self.adjoint().norm_inf()
    }

    /// Largest elementwise modulus of `self - rhs` over the leading `block x block` corner.
    pub fn max_abs_diff_block(&self, rhs: &Self, block: usize) -> f64 {
        let block = block.min(self.dim).min(rhs.dim);
        let mut worst = 0.0_f64;
        for m in 0..block {
            for n in 0..block {
                worst = worst.max((self[(m, n)] - rhs[(m, n)]).norm());
            }
        }
        worst
    }

    /// `|| U^dag U - I ||_max` on the leading `block x block` corner.
    pub fn unitarity_defect(&self, block: usize) -> f64 {
        let gram = self.adjoint().matmul(self);
        let mut worst = 0.0_f64;
        for m in 0..block.min(self.dim) {
            for n in 0..block.min(self.dim) {
                let target = if m == n { ONE } else { ZERO };
                worst = worst.max((gram[(m, n)] - target).norm());
            }
        }
        worst
    }

    /// Leading 2x2 corner.
    pub fn corner(&self) -> [[Complex64; 2]; 2] {
        [[self[(0, 0)], self[(0, 1)]], [self[(1, 0)], self[(1, 1)]]]
    }
}

impl Index<(usize, usize)> for TruncatedOperator {
    type Output = Complex64;

    fn index(&self, (m, n): (usize, usize)) -> &Complex64 {
        &self.entries[m * self.dim + n]
    }
}

impl IndexMut<(usize, usize)> for TruncatedOperator {
    fn index_mut(&mut self, (m, n): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[m * self.dim + n]
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        Err(Error::InvalidDimension { dim })
    } else {
        Ok(())
    }
}

/// Complex displacement and squeezing of a Gaussian unitary `U_G = D(-alpha) S(xi)`.
///
/// `xi = r e^{i phi_xi}`; `r` may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianParams {
    pub alpha: Complex64,
    pub xi: Complex64,
}

impl GaussianParams {
    pub fn new(alpha: Complex64, xi: Complex64) -> Self {
        Self { alpha, xi }
    }

    /// Squeezing from signed modulus and phase.
    pub fn from_polar_squeezing(alpha: Complex64, r: f64, phi_xi: f64) -> Self {
        Self {
            alpha,
            xi: Complex64::from_polar(r, phi_xi),
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.alpha.re, self.alpha.im, self.xi.re, self.xi.im]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// `a` on the truncated basis: entry `(n-1, n) = sqrt(n)`.
pub fn annihilation_matrix(dim: usize) -> Result<TruncatedOperator> {
    let mut op = TruncatedOperator::zeros(dim)?;
    for n in 1..dim {
        op[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Ok(op)
}

// Padé(13) coefficients and theta_13 from Higham's scaling-and-squaring method.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// `exp(op)` by scaling and squaring with a degree-13 Padé kernel.
pub fn matrix_exponential(op: &TruncatedOperator) -> Result<TruncatedOperator> {
    if !op.is_finite() {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let dim = op.dim();
    let norm = op.norm_one();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = op.scale(Complex64::new(2f64.powi(-squarings), 0.0));

    let ident = TruncatedOperator::identity(dim)?;
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);
    let c = |k: usize| Complex64::new(PADE13[k], 0.0);

    let u_inner = a6.scale(c(13)).add(&a4.scale(c(11))).add(&a2.scale(c(9)));
    let u_outer = a6
        .matmul(&u_inner)
        .add(&a6.scale(c(7)))
        .add(&a4.scale(c(5)))
        .add(&a2.scale(c(3)))
        .add(&ident.scale(c(1)));
    let u = a.matmul(&u_outer);

    let v_inner = a6.scale(c(12)).add(&a4.scale(c(10))).add(&a2.scale(c(8)));
    let v = a6
        .matmul(&v_inner)
        .add(&a6.scale(c(6)))
        .add(&a4.scale(c(4)))
        .add(&a2.scale(c(2)))
        .add(&ident.scale(c(0)));

    let numer = v.add(&u);
    let denom = v.add(&u.scale(Complex64::new(-1.0, 0.0)));
    let mut result = solve(denom, numer);
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    if !result.is_finite() {
        return Err(Error::NonFinite("matrix exponential result"));
    }
    Ok(result)
}

/// Solves `lhs * X = rhs` by Gaussian elimination with partial pivoting.
fn solve(mut lhs: TruncatedOperator, mut rhs: TruncatedOperator) -> TruncatedOperator {
    let n = lhs.dim;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| lhs[(i, col)].norm().total_cmp(&lhs[(j, col)].norm()))
            .unwrap_or(col);
        if pivot_row != col {
            for k in 0..n {
                lhs.entries.swap(col * n + k, pivot_row * n + k);
                rhs.entries.swap(col * n + k, pivot_row * n + k);
            }
        }
        let pivot = lhs[(col, col)];
        for row in col + 1..n {
            let factor = lhs[(row, col)] / pivot;
            if factor == ZERO {
                continue;
            }
            for k in col..n {
                let v = lhs[(col, k)];
                lhs[(row, k)] -= factor * v;
            }
            for k in 0..n {
                let v = rhs[(col, k)];
                rhs[(row, k)] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let pivot = lhs[(col, col)];
        for k in 0..n {
            let mut acc = rhs[(col, k)];
            for j in col + 1..n {
                acc -= lhs[(col, j)] * rhs[(j, k)];
            }
            rhs[(col, k)] = acc / pivot;
        }
    }
    rhs
}

/// Generator `raise * (a^dag)^order + lower * a^order` of a one-mode Gaussian unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderGenerator {
    pub order: usize,
    pub raise: Complex64,
    pub lower: Complex64,
}

impl LadderGenerator {
    /// Generator of `D(beta) = exp(beta a^dag - conj(beta) a)`.
    pub fn displacement(beta: Complex64) -> Self {
        Self {
            order: 1,
            raise: beta,
            lower: -beta.conj(),
        }
    }

    /// Generator of `S(xi) = exp((conj(xi) a^2 - xi a^dag^2) / 2)`.
    pub fn squeezing(xi: Complex64) -> Self {
        Self {
            order: 2,
            raise: -xi * 0.5,
            lower: xi.conj() * 0.5,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.raise == ZERO && self.lower == ZERO
    }

    /// Dense truncated matrix of the generator.
    pub fn matrix(&self, dim: usize) -> Result<TruncatedOperator> {
        let mut op = TruncatedOperator::zeros(dim)?;
        for n in self.order..dim {
            let m = n - self.order;
            let amp = ladder_amplitude(m, self.order);
            // a^k |n> = amp |m>,  (a^dag)^k |m> = amp |n>
            op[(m, n)] += self.lower * amp;
            op[(n, m)] += self.raise * amp;
        }
        Ok(op)
    }

    /// `out = scale * G v` restricted to indices `offset + stride * i <= support`
    /// of `v`; returns the new support bound. `amps[m]` is the ladder
    /// amplitude between `m` and `m + order`.
    fn apply(
        &self,
        amps: &[f64],
        scale: f64,
        v: &[Complex64],
        (offset, stride): (usize, usize),
        support: usize,
        out: &mut [Complex64],
    ) -> usize {
        let dim = v.len();
        let k = self.order;
        let (lower, raise) = (self.lower * scale, self.raise * scale);
        let new_support = (support + k).min(dim - 1);
        out[..=new_support].fill(ZERO);
        for n in (offset..=support).step_by(stride) {
            let vn = v[n];
            if n >= k {
                out[n - k] += lower * amps[n - k] * vn;
            }
            if n + k < dim {
                out[n + k] += raise * amps[n] * vn;
            }
        }
        new_support
    }

    /// `exp(G) v` on the truncated space, summing the Taylor series in
    /// `steps` equal sub-intervals. The step count is doubled whenever the
    /// largest Taylor term exceeds `2^10 |v|`, which bounds cancellation loss.
    pub fn exp_action(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.exp_action_tracked(v).0
    }

    /// [`exp_action`](Self::exp_action) plus whether the truncation ever
    /// discarded a component. When it did not, the result is bitwise the one
    /// any larger cutoff would give on the leading `v.len()` entries.
    pub fn exp_action_tracked(&self, v: &[Complex64]) -> (Vec<Complex64>, bool) {
        let dim = v.len();
        let mut steps = 1usize;
        if self.is_zero() || dim == 0 {
            return (v.to_vec(), false);
        }
        loop {
            if let Some(result) = self.try_exp_action(v, steps) {
                return result;
            }
            steps *= 2;
        }
    }

    fn try_exp_action(&self, v: &[Complex64], steps: usize) -> Option<(Vec<Complex64>, bool)> {
        const MAX_TERMS: usize = 160;
        const GROWTH_LIMIT: f64 = 1024.0;
        // Terms and tails below these fractions of |v| are dropped; both sit far
        // under the 1e-8 cutoff tolerance and near the rounding floor.
        const TERM_TOL: f64 = f64::EPSILON * 0.1;
        const TAIL_TOL: f64 = f64::EPSILON * 1e-3;
        let dim = v.len();
        let inv_steps = 1.0 / steps as f64;
        let amps: Vec<f64> = (0..dim).map(|m| ladder_amplitude(m, self.order)).collect();
        let mut current = v.to_vec();
        let mut support = current.iter().rposition(|z| *z != ZERO).unwrap_or(0);
        let mut term = vec![ZERO; dim];
        let mut next = vec![ZERO; dim];
        let base = max_abs(&current).max(f64::MIN_POSITIVE);
        let tail_sq = (TAIL_TOL * base) * (TAIL_TOL * base);
        // The generator only links indices `order` apart, so a vector living on
        // one residue class mod `order` stays there.
        let first = current.iter().position(|z| *z != ZERO).unwrap_or(0);
        let lattice =
            if (0..dim).all(|n| n % self.order == first % self.order || current[n] == ZERO) {
                (first % self.order, self.order)
            } else {
                (0, 1)
            };
        let mut truncated = support + self.order >= dim;

        for _ in 0..steps {
            term.copy_from_slice(&current);
            let mut term_support = support;
            let mut small_run = 0;
            let mut converged = false;
            for j in 1..=MAX_TERMS {
                truncated |= term_support + self.order >= dim;
                term_support = self.apply(
                    &amps,
                    inv_steps / j as f64,
                    &term,
                    lattice,
                    term_support,
                    &mut next,
                );
                core::mem::swap(&mut term, &mut next);
                while term_support > 0 && term[term_support].norm_sqr() < tail_sq {
                    term[term_support] = ZERO;
                    term_support -= 1;
                }
                let mut biggest = 0.0_f64;
                for n in (lattice.0..=term_support).step_by(lattice.1) {
                    let t = term[n];
                    biggest = biggest.max(t.norm_sqr());
                    current[n] += t;
                }
                let biggest = biggest.sqrt();
                if biggest > GROWTH_LIMIT * base {
                    return None;
                }
                support = support.max(term_support);
                if biggest <= TERM_TOL * base {
                    small_run += 1;
                    if small_run >= 2 {
                        converged = true;
                        break;
                    }
                } else {
                    small_run = 0;
                }
            }
            if !converged {
                return None;
            }
        }
        Some((current, truncated))
    }
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max).sqrt()
}

/// `sqrt((m+1)(m+2)...(m+k))`, the amplitude of `(a^dag)^k |m>`.
fn ladder_amplitude(m: usize, k: usize) -> f64 {
    (1..=k).map(|j| ((m + j) as f64).sqrt()).product()
}

/// `D(alpha)` via the dense matrix exponential.
pub fn displacement_matrix(alpha: Complex64, dim: usize) -> Result<TruncatedOperator> {
    matrix_exponential(&LadderGenerator::displacement(alpha).matrix(dim)?)
}

/// `S(xi)` via the dense matrix exponential.
pub fn squeezing_matrix(xi: Complex64, dim: usize) -> Result<TruncatedOperator> {
    matrix_exponential(&LadderGenerator::squeezing(xi).matrix(dim)?)
}

/// Dense `U_G = D(-alpha) S(xi)`.
pub fn gaussian_unitary(gauss: &GaussianParams, dim: usize) -> Result<TruncatedOperator> {
    Ok(displacement_matrix(-gauss.alpha, dim)?.matmul(&squeezing_matrix(gauss.xi, dim)?))
}

/// Columns `U_G |n>` for `n = 0, 1`, computed through the exponential action
/// of the squeezing and then the displacement generator.
pub fn gaussian_columns(gauss: &GaussianParams, dim: usize) -> Result<[Vec<Complex64>; 2]> {
    Ok(gaussian_columns_tracked(gauss, dim)?.0)
}

/// [`gaussian_columns`] plus whether the cutoff truncated anything; see
/// [`LadderGenerator::exp_action_tracked`].
pub fn gaussian_columns_tracked(
    gauss: &GaussianParams,
    dim: usize,
) -> Result<([Vec<Complex64>; 2], bool)> {
    check_dim(dim)?;
    if !gauss.is_finite() {
        return Err(Error::NonFinite("Gaussian parameters"));
    }
    let squeeze = LadderGenerator::squeezing(gauss.xi);
    let displace = LadderGenerator::displacement(-gauss.alpha);
    let column = |n: usize| {
        let mut basis = vec![ZERO; dim];
        basis[n] = ONE;
        let (squeezed, cut_s) = squeeze.exp_action_tracked(&basis);
        let (out, cut_d) = displace.exp_action_tracked(&squeezed);
        (out, cut_s || cut_d)
    };
    let (c0, cut0) = column(0);
    let (c1, cut1) = column(1);
    Ok(([c0, c1], cut0 || cut1))
}

/// True iff the leading 2x2 corner of `build(dim)` and `build(2 dim)` agree
/// elementwise to within `tol`.
pub fn cutoff_converged<F>(build: F, dim: usize, tol: f64) -> Result<bool>
where
    F: Fn(usize) -> Result<TruncatedOperator>,
{
    let coarse = build(dim)?;
    let fine = build(2 * dim)?;
    Ok(coarse.max_abs_diff_block(&fine, 2) <= tol)
}

/// Quadrature wavefunction `psi_n(x) = (pi^{1/4} sqrt(2^n n!))^{-1} H_n(x) e^{-x^2/2}`
/// by the normalized three-term recurrence.
pub fn hermite_wavefunction(n: usize, x: f64) -> f64 {
    let psi0 = core::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return psi0;
    }
    let mut prev = psi0;
    let mut cur = core::f64::consts::SQRT_2 * x * psi0;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn annihilation_small_dims() {
        let a = annihilation_matrix(3).unwrap();
        assert_eq!(a[(0, 1)], c(1.0, 0.0));
        assert!((a[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        let nonzero = a.entries().iter().filter(|z| **z != ZERO).count();
        assert_eq!(nonzero, 2);

        let a2 = annihilation_matrix(2).unwrap();
        assert_eq!(a2.entries(), &[ZERO, ONE, ZERO, ZERO]);
        assert_eq!(
            annihilation_matrix(1),
            Err(Error::InvalidDimension { dim: 1 })
        );
    }

    #[test]
    fn number_operator_diagonal() {
        let a = annihilation_matrix(7).unwrap();
        let num = a.adjoint().matmul(&a);
        for k in 0..7 {
            assert!((num[(k, k)] - c(k as f64, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn exponential_of_zero_and_diagonal() {
        let zero = TruncatedOperator::zeros(5).unwrap();
        assert_eq!(
            matrix_exponential(&zero).unwrap(),
            TruncatedOperator::identity(5).unwrap()
        );

        let mut diag = TruncatedOperator::zeros(4).unwrap();
        let d = [c(0.3, 0.0), c(-2.0, 1.0), c(4.5, -0.2), c(0.0, 3.0)];
        for (k, v) in d.iter().enumerate() {
            diag[(k, k)] = *v;
        }
        let e = matrix_exponential(&diag).unwrap();
        for (k, v) in d.iter().enumerate() {
            assert!((e[(k, k)] - v.exp()).norm() <= 1e-12 * v.exp().norm());
        }
    }

    #[test]
    fn exponential_rejects_nan() {
        let mut op = TruncatedOperator::zeros(3).unwrap();
        op[(1, 2)] = c(f64::NAN, 0.0);
        assert!(matches!(matrix_exponential(&op), Err(Error::NonFinite(_))));
    }

    #[test]
    fn displacement_and_squeezing_identity_at_zero() {
        let id = TruncatedOperator::identity(12).unwrap();
        assert!(
            displacement_matrix(ZERO, 12)
                .unwrap()
                .max_abs_diff_block(&id, 12)
                < 1e-15
        );
        assert!(
            squeezing_matrix(ZERO, 12)
                .unwrap()
                .max_abs_diff_block(&id, 12)
                < 1e-15
        );
    }

    #[test]
    fn wavefunction_values() {
        assert!((hermite_wavefunction(0, 0.0) - core::f64::consts::PI.powf(-0.25)).abs() < 1e-15);
        assert_eq!(hermite_wavefunction(1, 0.0), 0.0);
        assert!((hermite_wavefunction(3, -0.7) + hermite_wavefunction(3, 0.7)).abs() < 1e-15);
    }

    #[test]
    fn exp_action_matches_dense_columns() {
        let gauss = GaussianParams::from_polar_squeezing(c(0.4, -0.3), 0.6, 1.1);
        let dense = gaussian_unitary(&gauss, 48).unwrap();
        let cols = gaussian_columns(&gauss, 48).unwrap();
        for (n, col) in cols.iter().enumerate() {
            for m in 0..48 {
                assert!((dense[(m, n)] - col[m]).norm() < 1e-12, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn exp_action_large_amplitude_refines_steps() {
        let gauss = GaussianParams::from_polar_squeezing(c(-2.0, 2.0), -1.0, -2.0);
        let dense = gaussian_unitary(&gauss, 64).unwrap();
        let cols = gaussian_columns(&gauss, 64).unwrap();
        for (n, col) in cols.iter().enumerate() {
            for m in 0..64 {
                assert!((dense[(m, n)] - col[m]).norm() < 1e-11, "m={m} n={n}");
            }
        }
    }
}
