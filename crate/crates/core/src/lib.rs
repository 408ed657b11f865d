//! Numerical laboratory for the cubic Szegő equation with a mean-value
//! perturbation,
//!
//! ```text
//! i ∂ₜu = Π(|u|²u) + α (u | 1),    u(t) ∈ L²₊(S¹),
//! ```
//!
//! at three levels of description:
//!
//! - [`dynamics::integrate_full`]: a Galerkin truncation on the first `N`
//!   Fourier modes ([`hardy::HardyCoeffs`]);
//! - [`dynamics::integrate_reduced`]: the exact three-variable ODE on the
//!   rank-one manifold `u = b + cz/(1 − pz)` ([`reduced::L1State`]);
//! - [`reduced::exact_solution`]: the closed-form trajectory issued from
//!   `u₀ = z + √α`, whose Sobolev norms grow like `e^{(2s−1)√α t}`.
//!
//! The [`hankel`] module builds finite sections of the Hankel, shifted
//! Hankel and Toeplitz operators that carry the Lax-pair structure, and
//! [`diagnostics`] turns trajectories into growth rates, cascade and
//! boundedness measurements.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod hankel;
pub mod hardy;
pub mod reduced;

pub use error::{Result, SzegoError};
pub use num_complex::Complex64;
