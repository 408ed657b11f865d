//! Truncated Hardy space `L²₊(S¹)`.
//!
//! A function `u = Σ_{k≥0} û(k) e^{ikθ}` is stored by its first `N` Taylor
//! coefficients. Inner products use the normalized measure `dθ/2π`, so by
//! Parseval `(u | v) = Σ û(k) conj(v̂(k))`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, SzegoError};

/// Two-sided Fourier coefficients of a function on the circle, keyed by mode.
pub type TwoSided = BTreeMap<i64, Complex64>;

/// Nonnegative-frequency Fourier coefficients `û(0..N)`.
#[derive(Clone, PartialEq)]
pub struct HardyCoeffs {
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for HardyCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HardyCoeffs")
            .field("n", &self.coeffs.len())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl HardyCoeffs {
    /// Wraps a coefficient vector, checking `N ≥ 2` and finiteness.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(SzegoError::TooFewModes(coeffs.len()));
        }
        if let Some(k) = coeffs.iter().position(|z| !z.is_finite()) {
            return Err(SzegoError::NonFinite(k));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    /// Leading coefficients from `prefix`, zero-padded to `n` modes.
    pub fn from_prefix(prefix: &[Complex64], n: usize) -> Result<Self> {
        if prefix.len() > n {
            return Err(SzegoError::Dimension {
                expected: n,
                got: prefix.len(),
            });
        }
        let mut coeffs = prefix.to_vec();
        coeffs.resize(n, Complex64::new(0.0, 0.0));
        Self::new(coeffs)
    }

    /// Taylor coefficients of the rational function `num(z)/den(z)`,
    /// both given by ascending coefficients, by power-series division.
    pub fn from_rational(num: &[Complex64], den: &[Complex64], n: usize) -> Result<Self> {
        let d0 = den.first().copied().unwrap_or_default();
        if d0.norm() == 0.0 {
            return Err(SzegoError::InvalidConfig(
                "denominator must not vanish at z = 0".into(),
            ));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut acc = num.get(k).copied().unwrap_or_default();
            for (j, dj) in den.iter().enumerate().skip(1).take(k) {
                acc -= dj * out[k - j];
            }
            out[k] = acc / d0;
        }
        Self::new(out)
    }

    /// Truncation size `N`.
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `û(k)`, zero beyond the truncation.
    pub fn mode(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|z| z * factor).collect(),
        }
    }

    /// `self + h·other`; panics if sizes differ.
    pub fn add_scaled(&self, other: &Self, h: f64) -> Self {
        assert_eq!(self.n(), other.n(), "mode count mismatch");
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b * h)
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.is_finite())
    }

    pub fn to_two_sided(&self) -> TwoSided {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &z)| (k as i64, z))
            .collect()
    }
}

/// Szegő projection followed by Galerkin truncation: keeps modes `0..n`.
pub fn szego_project(two_sided: &TwoSided, n: usize) -> Result<HardyCoeffs> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (&m, &z) in two_sided.range(0..n as i64) {
        coeffs[m as usize] = z;
    }
    HardyCoeffs::new(coeffs)
}

pub fn inner_product(u: &HardyCoeffs, v: &HardyCoeffs) -> Result<Complex64> {
    if u.n() != v.n() {
        return Err(SzegoError::Dimension {
            expected: u.n(),
            got: v.n(),
        });
    }
    Ok(u.coeffs
        .iter()
        .zip(&v.coeffs)
        .map(|(a, b)| a * b.conj())
        .sum())
}

/// `v_m = Σ_k û(k+m) conj(û(k))` for `m = 0..N`; these are the Fourier
/// coefficients of `|u|²` at nonnegative modes (`v_{−m} = conj(v_m)`).
pub fn autocorrelation(u: &HardyCoeffs) -> Vec<Complex64> {
    let a = u.as_slice();
    let n = a.len();
    (0..n)
        .map(|m| (0..n - m).map(|k| a[k + m] * a[k].conj()).sum())
        .collect()
}

/// Two-sided symbol of `|u|²`.
pub fn abs_square_symbol(u: &HardyCoeffs) -> TwoSided {
    let v = autocorrelation(u);
    let mut sym = TwoSided::new();
    for (m, &z) in v.iter().enumerate() {
        sym.insert(m as i64, z);
        if m > 0 {
            sym.insert(-(m as i64), z.conj());
        }
    }
    sym
}

/// Reusable FFT workspace for `Π(|u|²u)` on a fixed truncation size.
///
/// The product is formed on a grid of at least `3N` points, so modes
/// `0..N` carry no aliasing before truncation.
pub struct CubicConvolver {
    n: usize,
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    buffer: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl CubicConvolver {
    pub fn new(n: usize) -> Self {
        let len = (3 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n,
            len,
            forward,
            inverse,
            buffer: vec![Complex64::new(0.0, 0.0); len],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Writes the first `N` modes of `Π(|u|²u)` into `out`.
    pub fn apply(&mut self, u: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(u.len(), self.n);
        assert_eq!(out.len(), self.n);
        self.buffer[..self.n].copy_from_slice(u);
        self.buffer[self.n..].fill(Complex64::new(0.0, 0.0));
        // Inverse transform evaluates Σ û(k) e^{ikθ_j} on the grid.
        self.inverse
            .process_with_scratch(&mut self.buffer, &mut self.scratch);
        for z in self.buffer.iter_mut() {
            *z *= z.norm_sqr();
        }
        self.forward
            .process_with_scratch(&mut self.buffer, &mut self.scratch);
        let scale = 1.0 / self.len as f64;
        for (o, z) in out.iter_mut().zip(&self.buffer[..self.n]) {
            *o = z * scale;
        }
    }
}

impl fmt::Debug for CubicConvolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CubicConvolver")
            .field("n", &self.n)
            .field("len", &self.len)
            .finish()
    }
}

/// Galerkin truncation of `Π(|u|²u)` by zero-padded FFT convolution.
pub fn cubic_nonlinearity(u: &HardyCoeffs) -> HardyCoeffs {
    let mut out = vec![Complex64::new(0.0, 0.0); u.n()];
    CubicConvolver::new(u.n()).apply(u.as_slice(), &mut out);
    HardyCoeffs { coeffs: out }
}

/// Same quantity as [`cubic_nonlinearity`] by the exact triple sum,
/// `Σ_a û(a) w_{m−a}` with `w` the autocorrelation of `û`. O(N²).
pub fn cubic_nonlinearity_direct(u: &HardyCoeffs) -> HardyCoeffs {
    let a = u.as_slice();
    let n = a.len();
    let v = autocorrelation(u);
    let w = |d: i64| -> Complex64 {
        if d >= 0 {
            v.get(d as usize).copied().unwrap_or_default()
        } else {
            v.get((-d) as usize).map(|z| z.conj()).unwrap_or_default()
        }
    };
    let coeffs = (0..n as i64)
        .map(|m| (0..n as i64).map(|k| a[k as usize] * w(m - k)).sum())
        .collect();
    HardyCoeffs { coeffs }
}

/// Mass, momentum and energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedTriple {
    pub q: f64,
    pub m: f64,
    pub e_alpha: f64,
}

impl ConservedTriple {
    /// Largest relative deviation of any component from `reference`.
    pub fn max_relative_drift(&self, reference: &ConservedTriple) -> f64 {
        let rel = |x: f64, r: f64| (x - r).abs() / r.abs().max(f64::MIN_POSITIVE);
        rel(self.q, reference.q)
            .max(rel(self.m, reference.m))
            .max(rel(self.e_alpha, reference.e_alpha))
    }
}

pub fn mass(u: &HardyCoeffs) -> f64 {
    u.coeffs.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm_l2(u: &HardyCoeffs) -> f64 {
    mass(u).sqrt()
}

/// `(Σ (1+k)^{2s} |û(k)|²)^{1/2}`; `s = 0` is the `L²` norm.
pub fn norm_hs(u: &HardyCoeffs, s: f64) -> f64 {
    u.coeffs
        .iter()
        .enumerate()
        .map(|(k, z)| (1.0 + k as f64).powf(2.0 * s) * z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Homogeneous seminorm `(Σ_{k≥1} k^{2s} |û(k)|²)^{1/2}`. At `s = 1/2`
/// it is `√M`.
pub fn seminorm_hs(u: &HardyCoeffs, s: f64) -> f64 {
    u.coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, z)| (k as f64).powf(2.0 * s) * z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Wiener norm `Σ |û(k)|`.
pub fn norm_wiener(u: &HardyCoeffs) -> f64 {
    u.coeffs.iter().map(|z| z.norm()).sum()
}

/// `‖u‖⁴_{L⁴}` from the autocorrelation: `|v₀|² + 2 Σ_{m≥1} |v_m|²`.
pub fn l4_fourth(u: &HardyCoeffs) -> f64 {
    let v = autocorrelation(u);
    v[0].norm_sqr() + 2.0 * v[1..].iter().map(|z| z.norm_sqr()).sum::<f64>()
}

pub fn norm_l4(u: &HardyCoeffs) -> f64 {
    l4_fourth(u).powf(0.25)
}

/// `M(u) = (Du | u) = Σ k |û(k)|²`.
pub fn momentum(u: &HardyCoeffs) -> f64 {
    u.coeffs
        .iter()
        .enumerate()
        .map(|(k, z)| k as f64 * z.norm_sqr())
        .sum()
}

/// `E_α(u) = ¼‖u‖⁴_{L⁴} + (α/2)|(u | 1)|²`.
pub fn energy_alpha(u: &HardyCoeffs, alpha: f64) -> f64 {
    0.25 * l4_fourth(u) + 0.5 * alpha * u.mode(0).norm_sqr()
}

pub fn conserved(u: &HardyCoeffs, alpha: f64) -> ConservedTriple {
    ConservedTriple {
        q: mass(u),
        m: momentum(u),
        e_alpha: energy_alpha(u, alpha),
    }
}

/// `u(θ) = Σ û(k) e^{ikθ}` by Horner's rule in `z = e^{iθ}`.
pub fn evaluate(u: &HardyCoeffs, theta: f64) -> Complex64 {
    let z = Complex64::from_polar(1.0, theta);
    u.coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Trapezoidal value of `(1/2π)∫|u|⁴ dθ` on `points` nodes.
pub fn l4_fourth_quadrature(u: &HardyCoeffs, points: usize) -> f64 {
    (0..points)
        .map(|j| evaluate(u, 2.0 * PI * j as f64 / points as f64).norm_sqr().powi(2))
        .sum::<f64>()
        / points as f64
}
