//! Error type shared by the whole crate.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A coordinate or datum was NaN or infinite.
    NonFinite { what: &'static str },
    /// A frequency (m, n) with m ≢ n (mod 2) is not on the dual lattice.
    ParityViolation { m: i64, n: i64 },
    /// Grid sample count per axis must be even (and positive).
    BadSampleCount { n: usize },
    /// Grid data does not satisfy F(u+π, v+π) = F(u, v) within tolerance,
    /// so it does not live on ℝ²/Λ.
    CheckerboardViolation { residual: f64, tol: f64 },
    /// Two grids of different sample counts were combined.
    SizeMismatch { left: usize, right: usize },
    /// A symbol value was requested at a frequency the table does not cover.
    MissingSymbol { m: i64, n: i64 },
    /// Kernel evaluated at (or too close to) a zero of its denominator.
    SingularPoint { t: f64, u: f64, v: f64 },
    /// Parameter outside its admissible range.
    OutOfRange { what: &'static str, value: f64 },
    /// Adaptive quadrature exhausted its panel budget above tolerance.
    ToleranceNotMet {
        err_est: f64,
        abs_tol: f64,
        panels: u64,
    },
    /// The majorant scale e₁(a) came out nonpositive, so the kernel
    /// domination inequalities do not certify for this aperture.
    MajorantFailure { a: f64, e1: f64 },
    /// The Neumann symbol left (−1, 0); this contradicts the operator-norm
    /// bound and indicates a broken table.
    SymbolSignViolation { m: i64, n: i64, sigma: f64 },
    /// The trace symbol vanishes at this mode, so no DtN ratio exists there.
    VanishingTraceSymbol { m: i64, n: i64 },
    /// Boundary data has too much energy outside the parity-valid band
    /// below the table cutoff.
    BandProjection { discarded_fraction: f64, max: f64 },
    /// Finite-difference stencil left the collar 0 ≤ t ≤ π/100.
    StencilLeavesCollar { t: f64 },
    /// File or parse problem (CSV tables, cached symbol tables).
    Io(String),
    Parse {
        file: String,
        line: usize,
        column: String,
        message: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite { what } => write!(f, "non-finite {what}"),
            Error::ParityViolation { m, n } => {
                write!(f, "({m}, {n}) is not on the dual lattice: m ≡ n (mod 2) required")
            }
            Error::BadSampleCount { n } => write!(f, "sample count {n} must be even and positive"),
            Error::CheckerboardViolation { residual, tol } => write!(
                f,
                "grid violates checkerboard symmetry: residual {residual:.3e} > tol {tol:.3e}"
            ),
            Error::SizeMismatch { left, right } => {
                write!(f, "grid size mismatch: {left} vs {right}")
            }
            Error::MissingSymbol { m, n } => write!(f, "no symbol value at ({m}, {n})"),
            Error::SingularPoint { t, u, v } => {
                write!(f, "kernel singular at (t, u, v) = ({t}, {u}, {v})")
            }
            Error::OutOfRange { what, value } => write!(f, "{what} = {value} out of range"),
            Error::ToleranceNotMet {
                err_est,
                abs_tol,
                panels,
            } => write!(
                f,
                "quadrature error {err_est:.3e} above tolerance {abs_tol:.3e} after {panels} panels"
            ),
            Error::MajorantFailure { a, e1 } => {
                write!(f, "majorant scale e1({a}) = {e1} is not positive")
            }
            Error::SymbolSignViolation { m, n, sigma } => write!(
                f,
                "Neumann symbol σ({m}, {n}) = {sigma} outside (−1, 0); table is inconsistent"
            ),
            Error::VanishingTraceSymbol { m, n } => {
                write!(f, "trace symbol vanishes at ({m}, {n})")
            }
            Error::BandProjection {
                discarded_fraction,
                max,
            } => write!(
                f,
                "boundary data loses energy fraction {discarded_fraction:.3e} to band projection (max {max:.3e})"
            ),
            Error::StencilLeavesCollar { t } => {
                write!(f, "finite-difference stencil leaves the collar at t = {t}")
            }
            Error::Io(msg) => write!(f, "{msg}"),
            Error::Parse {
                file,
                line,
                column,
                message,
            } => write!(f, "{file}:{line}: column {column}: {message}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
