//! Finite sections of the Hankel operator `H_u(h) = Π(u h̄)`, the shifted
//! Hankel operator `K_u = T_z^* H_u`, Toeplitz operators `T_b(h) = Π(bh)`
//! and the Lax-pair generators built from them.
//!
//! Antilinear operators are stored as their (complex-symmetric) coefficient
//! matrices and act by `h ↦ mat · conj(h)`. Compositions follow from that
//! convention:
//!
//! | composition              | resulting matrix  | kind       |
//! |--------------------------|-------------------|------------|
//! | antilinear ∘ antilinear  | `A · conj(B)`     | linear     |
//! | linear ∘ antilinear      | `L · A`           | antilinear |
//! | antilinear ∘ linear      | `A · conj(L)`     | antilinear |

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, SzegoError};
use crate::hardy::{abs_square_symbol, cubic_nonlinearity, HardyCoeffs, TwoSided};

pub type CMatrix = DMatrix<Complex64>;

/// Default relative tolerance for [`numerical_rank`].
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HankelKind {
    /// entries `û(k+l)`
    Hankel,
    /// entries `û(k+l+1)`
    Shifted,
}

/// Antilinear operator `h ↦ mat · conj(h)` with a complex-symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearHankel {
    mat: CMatrix,
    kind: HankelKind,
}

impl AntilinearHankel {
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn kind(&self) -> HankelKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.mat.nrows()
    }

    pub fn apply(&self, h: &[Complex64]) -> Vec<Complex64> {
        let conj = nalgebra::DVector::from_iterator(h.len(), h.iter().map(|z| z.conj()));
        (&self.mat * conj).iter().copied().collect()
    }

    /// The linear operator `A∘A`, matrix `Â · conj(Â)`.
    pub fn square(&self) -> LinearOperator {
        LinearOperator {
            mat: &self.mat * self.mat.conjugate(),
        }
    }

    pub fn symmetry_defect(&self) -> f64 {
        max_abs(&(&self.mat - self.mat.transpose()))
    }
}

/// Linear operator `h ↦ mat · h`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    mat: CMatrix,
}

impl LinearOperator {
    pub fn from_matrix(mat: CMatrix) -> Self {
        Self { mat }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn size(&self) -> usize {
        self.mat.nrows()
    }

    pub fn apply(&self, h: &[Complex64]) -> Vec<Complex64> {
        let v = nalgebra::DVector::from_column_slice(h);
        (&self.mat * v).iter().copied().collect()
    }

    /// `max |A − A^*|`.
    pub fn hermitian_defect(&self) -> f64 {
        max_abs(&(&self.mat - self.mat.adjoint()))
    }

    /// `max |A + A^*|`.
    pub fn anti_hermitian_defect(&self) -> f64 {
        max_abs(&(&self.mat + self.mat.adjoint()))
    }

    /// Eigenvalues of the Hermitian part, descending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.mat + self.mat.adjoint()) * Complex64::new(0.5, 0.0);
        let mut eig: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        eig
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_size(u: &HardyCoeffs, m: usize) -> Result<()> {
    if m > u.n() {
        return Err(SzegoError::Dimension {
            expected: u.n(),
            got: m,
        });
    }
    Ok(())
}

fn hankel_with_offset(u: &HardyCoeffs, m: usize, offset: usize) -> CMatrix {
    CMatrix::from_fn(m, m, |k, l| u.mode(k + l + offset))
}

/// `M×M` section of `H_u`: entries `û(k+l)`.
pub fn hankel_matrix(u: &HardyCoeffs, m: usize) -> Result<AntilinearHankel> {
    check_size(u, m)?;
    Ok(AntilinearHankel {
        mat: hankel_with_offset(u, m, 0),
        kind: HankelKind::Hankel,
    })
}

/// `M×M` section of `K_u`: entries `û(k+l+1)`.
pub fn shifted_hankel_matrix(u: &HardyCoeffs, m: usize) -> Result<AntilinearHankel> {
    check_size(u, m)?;
    Ok(AntilinearHankel {
        mat: hankel_with_offset(u, m, 1),
        kind: HankelKind::Shifted,
    })
}

/// `M×M` section of `T_b`: entries `b̂(k−l)`.
pub fn toeplitz_matrix(symbol: &TwoSided, m: usize) -> LinearOperator {
    LinearOperator {
        mat: CMatrix::from_fn(m, m, |k, l| {
            symbol
                .get(&(k as i64 - l as i64))
                .copied()
                .unwrap_or_default()
        }),
    }
}

/// Generators of the two Lax pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxOperators {
    /// `B_u = (i/2)H_u² − iT_{|u|²}`
    pub b: LinearOperator,
    /// `C_u = (i/2)K_u² − iT_{|u|²}`
    pub c: LinearOperator,
}

pub fn lax_operators(u: &HardyCoeffs, m: usize) -> Result<LaxOperators> {
    let h2 = hankel_matrix(u, m)?.square().mat;
    let k2 = shifted_hankel_matrix(u, m)?.square().mat;
    let t = toeplitz_matrix(&abs_square_symbol(u), m).mat;
    let half_i = Complex64::new(0.0, 0.5);
    let i = Complex64::new(0.0, 1.0);
    Ok(LaxOperators {
        b: LinearOperator {
            mat: &h2 * half_i - &t * i,
        },
        c: LinearOperator {
            mat: &k2 * half_i - &t * i,
        },
    })
}

fn interior_defect(diff: &CMatrix, m: usize) -> f64 {
    max_abs(&diff.view((0, 0), (m, m)).into_owned())
}

fn check_interior(u: &HardyCoeffs, m: usize) -> Result<()> {
    if 3 * m > u.n() {
        return Err(SzegoError::Dimension {
            expected: u.n() / 3,
            got: m,
        });
    }
    Ok(())
}

/// Max-entry residual of `H_{Π(|u|²u)} = T_{|u|²}H_u + H_u T_{|u|²} − H_u³`
/// on the interior `m×m` block (`3m ≤ N`).
///
/// Operators are assembled on all `N` modes and compared on the leading
/// block, where truncation does not reach for symbols of degree `< m`.
pub fn verify_hpi(u: &HardyCoeffs, m: usize) -> Result<f64> {
    check_interior(u, m)?;
    let n = u.n();
    let h = hankel_with_offset(u, n, 0);
    let t = toeplitz_matrix(&abs_square_symbol(u), n).mat;
    let lhs = hankel_with_offset(&cubic_nonlinearity(u), n, 0);
    let h_conj = h.conjugate();
    let rhs = &t * &h + &h * t.conjugate() - &h * &h_conj * &h;
    Ok(interior_defect(&(lhs - rhs), m))
}

/// Max-entry residual of `K_u² = H_u² − (·|u)u` on the interior block.
pub fn verify_k_square(u: &HardyCoeffs, m: usize) -> Result<f64> {
    check_interior(u, m)?;
    let n = u.n();
    let h = hankel_with_offset(u, n, 0);
    let k = hankel_with_offset(u, n, 1);
    let col = nalgebra::DVector::from_column_slice(u.as_slice());
    let rank_one = &col * col.adjoint();
    let diff = &k * k.conjugate() - (&h * h.conjugate() - rank_one);
    Ok(interior_defect(&diff, m))
}

/// Spectrum of a finite section of `K_u²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ku2Spectrum {
    /// Eigenvalues of `K̂·conj(K̂)`, descending.
    pub eigenvalues: Vec<f64>,
    /// `Tr|K_u|`: sum of singular values of `K̂`.
    pub trace_abs: f64,
}

impl Ku2Spectrum {
    pub fn top(&self, count: usize) -> &[f64] {
        &self.eigenvalues[..count.min(self.eigenvalues.len())]
    }
}

pub fn ku2_spectrum(u: &HardyCoeffs, m: usize) -> Result<Ku2Spectrum> {
    let k = shifted_hankel_matrix(u, m)?;
    let eigenvalues = k.square().hermitian_eigenvalues();
    let trace_abs = SVD::new(k.mat, false, false).singular_values.sum();
    Ok(Ku2Spectrum {
        eigenvalues,
        trace_abs,
    })
}

/// Number of singular values above `tol` times the largest one.
pub fn numerical_rank(mat: &CMatrix, tol: f64) -> usize {
    if mat.is_empty() {
        return 0;
    }
    let sv = SVD::new(mat.clone(), false, false).singular_values;
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Polynomial symbol of exact degree `degree` with coefficients uniform in
/// the unit square, padded to `n` modes.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, degree: usize, n: usize) -> Result<HardyCoeffs> {
    let mut coeffs: Vec<Complex64> = (0..=degree).map(|_| random_complex(rng)).collect();
    if coeffs[degree].norm() < 0.1 {
        coeffs[degree] = Complex64::new(0.5, 0.5);
    }
    HardyCoeffs::from_prefix(&coeffs, n)
}

/// A rational symbol `A/B` with the requested degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSymbol {
    /// Ascending coefficients of `A`.
    pub numerator: Vec<Complex64>,
    /// Ascending coefficients of `B`, with `B(0) = 1`.
    pub denominator: Vec<Complex64>,
    /// Roots of `B`, all outside the closed unit disk.
    pub poles: Vec<Complex64>,
}

impl RationalSymbol {
    /// Kronecker rank `max(deg A, deg B)`.
    pub fn expected_rank(&self) -> usize {
        (self.numerator.len() - 1).max(self.denominator.len() - 1)
    }

    pub fn coefficients(&self, n: usize) -> Result<HardyCoeffs> {
        HardyCoeffs::from_rational(&self.numerator, &self.denominator, n)
    }
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_eval(a: &[Complex64], z: Complex64) -> Complex64 {
    a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Random `A/B` with `deg A = deg_num`, `deg B = deg_den`, poles of modulus
/// in `[1.5, 3]` and `A` bounded away from zero at every pole (so `A ∧ B = 1`).
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, deg_num: usize, deg_den: usize) -> RationalSymbol {
    let poles: Vec<Complex64> = (0..deg_den)
        .map(|_| {
            Complex64::from_polar(
                rng.random_range(1.5..3.0),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let denominator = poles.iter().fold(vec![Complex64::new(1.0, 0.0)], |acc, &r| {
        poly_mul(&acc, &[Complex64::new(1.0, 0.0), -1.0 / r])
    });
    let numerator = loop {
        let mut a: Vec<Complex64> = (0..=deg_num).map(|_| random_complex(rng)).collect();
        if a[deg_num].norm() < 0.1 {
            a[deg_num] = Complex64::new(0.5, -0.5);
        }
        if poles.iter().all(|&r| poly_eval(&a, r).norm() > 0.1) {
            break a;
        }
    };
    RationalSymbol {
        numerator,
        denominator,
        poles,
    }
}
