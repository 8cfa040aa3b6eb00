//! Layer-potential machinery for the Neumann problem of the CR Yamabe operator
//! on the domain in S³ bounded by the Clifford torus.
//!
//! The boundary is parametrized by the checkerboard torus ℝ²/Λ with
//! Λ = {(πm, πn) : m ≡ n (mod 2)}. Everything the crate does happens in those
//! coordinates:
//!
//! - [`torus`]: lattice reduction, the anisotropic norm, grid sampling and the
//!   lattice Fourier transform (Parseval, convolution-as-multiplication).
//! - [`kernels`]: the closed-form scalar kernels (Green's function, the collar
//!   kernel and its normal derivative, the singular boundary kernel and its
//!   homogeneous model) together with the explicit majorant functions used by
//!   the certificate.
//! - [`quadrature`]: anisotropically graded adaptive quadrature for the
//!   singular/oscillatory integrals, plus the exact line-integral reduction of
//!   unbounded homogeneous integrals.
//! - [`multiplier`]: Fourier symbol tables for the kernel family and the
//!   diagonal Neumann / trace / Dirichlet-to-Neumann symbols built from them.
//! - [`certify`]: the machine-checkable certificate that sup |K̂| < 4π, which
//!   is the operator-norm bound ‖𝒩‖ < ½ making −½I + 𝒩 invertible.
//! - [`neumann`]: the end-to-end solver (boundary datum → density → interior
//!   field) and its verification harnesses (jump relation, interior PDE).
//! - [`yamabe`]: the closed-form boundary-Yamabe conformal factor built from
//!   the Gauss hypergeometric function ₂F₁(½, ½; 1; ·).

pub mod certify;
pub mod error;
pub mod jsonout;
pub mod kernels;
pub mod multiplier;
pub mod neumann;
pub mod par;
pub mod quadrature;
pub mod torus;
pub mod yamabe;

#[doc(hidden)]
pub mod testutil;

pub use error::{Error, Result};
