//! The abelian group ℝ²/Λ for the checkerboard lattice
//! Λ = {(πm, πn) : m ≡ n (mod 2)}: representatives, the anisotropic norm
//! ‖(u,v)‖ = max(|u|, |v|^{1/2}), the lattice Fourier transform with the
//! normalization F̂(m,n) = ∬_fund F e^{−i(mu+nv)} du dv, Parseval, and
//! convolution as symbol multiplication.
//!
//! Grids are sampled on the square cover [−π, π)², which holds two copies of
//! the fundamental domain [−π, π) × [−π/2, π/2). A standard square-torus DFT
//! therefore computes twice each lattice coefficient, and every mixed-parity
//! bin of genuinely lifted data must vanish — a free self-test.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Area of the fundamental domain, 2π².
pub const FUND_AREA: f64 = 2.0 * PI * PI;

/// Default tolerance for the checkerboard-symmetry test on grids.
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-8;

/// max(|u|, |v|^{1/2}), the anisotropic norm of a fundamental-domain
/// representative.
pub fn aniso_norm(u: f64, v: f64) -> f64 {
    u.abs().max(v.abs().sqrt())
}

// ---------------------------------------------------------------------------
// Frequencies
// ---------------------------------------------------------------------------

/// A dual-lattice frequency: (m, n) ∈ ℤ² with m ≡ n (mod 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Freq {
    m: i64,
    n: i64,
}

impl Freq {
    pub fn new(m: i64, n: i64) -> Result<Freq> {
        if (m - n).rem_euclid(2) != 0 {
            return Err(Error::ParityViolation { m, n });
        }
        Ok(Freq { m, n })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn negated(&self) -> Freq {
        Freq {
            m: -self.m,
            n: -self.n,
        }
    }
}

impl std::fmt::Display for Freq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

/// A point of ℝ²/Λ represented in the fundamental domain
/// [−π, π) × [−π/2, π/2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusPoint {
    u: f64,
    v: f64,
}

impl TorusPoint {
    /// Reduce arbitrary (u, v) modulo Λ into the fundamental domain.
    ///
    /// The lattice multiple is found first as integers, then subtracted in one
    /// rounding each, so exact f64 lattice points reduce to exactly (0, 0).
    pub fn reduce(u: f64, v: f64) -> Result<TorusPoint> {
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::NonFinite {
                what: "torus coordinate",
            });
        }
        // v − nπ ∈ [−π/2, π/2)
        let mut n = ((v + PI / 2.0) / PI).floor();
        let mut vr = v - n * PI;
        if vr >= PI / 2.0 {
            n += 1.0;
            vr = v - n * PI;
        } else if vr < -PI / 2.0 {
            n -= 1.0;
            vr = v - n * PI;
        }
        // u − mπ ∈ [−π, π) with m ≡ n (mod 2), i.e. m = n + 2k.
        let mut m = n + 2.0 * ((u - n * PI + PI) / (2.0 * PI)).floor();
        let mut ur = u - m * PI;
        if ur >= PI {
            m += 2.0;
            ur = u - m * PI;
        } else if ur < -PI {
            m -= 2.0;
            ur = u - m * PI;
        }
        Ok(TorusPoint { u: ur, v: vr })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// max(|u|, |v|^{1/2}) on the fundamental-domain representative.
    pub fn norm(&self) -> f64 {
        aniso_norm(self.u, self.v)
    }
}

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

/// Samples of a function on the square cover [−π, π)², n × n, row-major in
/// (u, v): entry (j, k) sits at u_j = −π + 2πj/n, v_k = −π + 2πk/n.
#[derive(Clone, Debug)]
pub struct GridFn {
    n: usize,
    samples: Vec<Complex64>,
}

impl GridFn {
    pub fn zeros(n: usize) -> Result<GridFn> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::BadSampleCount { n });
        }
        Ok(GridFn {
            n,
            samples: vec![Complex64::new(0.0, 0.0); n * n],
        })
    }

    /// Sample `f(u, v)` on the square cover.
    pub fn sample(n: usize, f: impl Fn(f64, f64) -> Complex64) -> Result<GridFn> {
        let mut g = GridFn::zeros(n)?;
        for j in 0..n {
            let u = g.u_at(j);
            for k in 0..n {
                let v = g.v_at(k);
                g.samples[j * n + k] = f(u, v);
            }
        }
        Ok(g)
    }

    pub fn sample_real(n: usize, f: impl Fn(f64, f64) -> f64) -> Result<GridFn> {
        GridFn::sample(n, |u, v| Complex64::new(f(u, v), 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn u_at(&self, j: usize) -> f64 {
        -PI + 2.0 * PI * j as f64 / self.n as f64
    }

    pub fn v_at(&self, k: usize) -> f64 {
        -PI + 2.0 * PI * k as f64 / self.n as f64
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.samples[j * self.n + k]
    }

    pub fn set(&mut self, j: usize, k: usize, value: Complex64) {
        self.samples[j * self.n + k] = value;
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Largest deviation from F(u+π, v+π) = F(u, v) over the grid.
    pub fn checkerboard_residual(&self) -> f64 {
        let h = self.n / 2;
        let mut worst = 0.0f64;
        for j in 0..self.n {
            for k in 0..self.n {
                let shifted = self.get((j + h) % self.n, (k + h) % self.n);
                worst = worst.max((shifted - self.get(j, k)).norm());
            }
        }
        worst
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.samples
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }

    /// ∬_fund |F|² du dv evaluated on the grid (half the square-cover sum).
    pub fn fund_l2_sq(&self) -> f64 {
        let w = (2.0 * PI / self.n as f64).powi(2);
        0.5 * w * self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn sup_distance(&self, other: &GridFn) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

/// Lattice Fourier coefficients F̂(m, n) = ∬_fund F e^{−i(mu+nv)} du dv,
/// stored only at parity-valid frequencies.
#[derive(Clone, Debug, Default)]
pub struct Spectrum {
    coeffs: BTreeMap<Freq, Complex64>,
}

impl Spectrum {
    pub fn new() -> Spectrum {
        Spectrum {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, f: Freq, value: Complex64) {
        self.coeffs.insert(f, value);
    }

    pub fn get(&self, f: Freq) -> Complex64 {
        self.coeffs
            .get(&f)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Freq, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// (1/2π²) Σ |F̂|², which Parseval equates with ∬_fund |F|².
    pub fn energy(&self) -> f64 {
        self.coeffs.values().map(|z| z.norm_sqr()).sum::<f64>() / FUND_AREA
    }

    /// Sobolev energy (1/2π²) Σ (1+m²+n²)^s |F̂|².
    pub fn sobolev_sq(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(f, z)| {
                (1.0 + (f.m * f.m + f.n * f.n) as f64).powf(s) * z.norm_sqr()
            })
            .sum::<f64>()
            / FUND_AREA
    }

    /// Pointwise evaluation (1/2π²) Σ F̂(m,n) e^{i(mu+nv)}.
    pub fn eval_at(&self, u: f64, v: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (f, c) in &self.coeffs {
            let phase = f.m as f64 * u + f.n as f64 * v;
            acc += c * Complex64::new(phase.cos(), phase.sin());
        }
        acc / FUND_AREA
    }

    /// Largest violation of F̂(−m,−n) = conj F̂(m,n), which holds for
    /// real-valued source data.
    pub fn conjugate_symmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (f, c) in &self.coeffs {
            let mirrored = self.get(f.negated());
            worst = worst.max((mirrored - c.conj()).norm());
        }
        worst
    }

    /// Pointwise product with a symbol in frequency space. The symbol must be
    /// defined at every stored frequency.
    pub fn apply_symbol(
        &self,
        symbol: impl Fn(Freq) -> Option<Complex64>,
    ) -> Result<Spectrum> {
        let mut out = Spectrum::new();
        for (f, c) in &self.coeffs {
            let s = symbol(*f).ok_or(Error::MissingSymbol { m: f.m, n: f.n })?;
            out.insert(*f, c * s);
        }
        Ok(out)
    }

    pub fn max_freq(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|f| f.m.abs().max(f.n.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Restrict to the band |m|, |n| ≤ cutoff. Returns the restriction and
    /// the energy fraction that was discarded.
    pub fn truncated(&self, cutoff: i64) -> (Spectrum, f64) {
        let mut kept = Spectrum::new();
        let mut dropped = 0.0;
        let mut total = 0.0;
        for (f, c) in &self.coeffs {
            total += c.norm_sqr();
            if f.m.abs() <= cutoff && f.n.abs() <= cutoff {
                kept.insert(*f, *c);
            } else {
                dropped += c.norm_sqr();
            }
        }
        let fraction = if total > 0.0 { dropped / total } else { 0.0 };
        (kept, fraction)
    }
}

// ---------------------------------------------------------------------------
// FFT
// ---------------------------------------------------------------------------

/// In-place DFT, out[p] = Σ_q in[q] e^{∓2πi pq/N}. Radix-2 for power-of-two
/// lengths, direct evaluation otherwise (lengths here are small and even).
fn dft_in_place(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        // Bit-reversal permutation.
        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                data.swap(i, j);
            }
        }
        let sign = if inverse { 1.0 } else { -1.0 };
        let mut len = 2;
        while len <= n {
            let ang = sign * 2.0 * PI / len as f64;
            let wlen = Complex64::new(ang.cos(), ang.sin());
            let mut i = 0;
            while i < n {
                let mut w = Complex64::new(1.0, 0.0);
                for k in 0..len / 2 {
                    let a = data[i + k];
                    let b = data[i + k + len / 2] * w;
                    data[i + k] = a + b;
                    data[i + k + len / 2] = a - b;
                    w *= wlen;
                }
                i += len;
            }
            len <<= 1;
        }
    } else {
        let sign = if inverse { 1.0 } else { -1.0 };
        let src = data.to_vec();
        for (p, out) in data.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (q, z) in src.iter().enumerate() {
                let ang = sign * 2.0 * PI * (p * q % n) as f64 / n as f64;
                acc += z * Complex64::new(ang.cos(), ang.sin());
            }
            *out = acc;
        }
    }
}

/// 2D DFT over the row-major n×n array, both axes.
fn dft2_in_place(samples: &mut [Complex64], n: usize, inverse: bool) {
    // Second index (v) is contiguous.
    for row in samples.chunks_mut(n) {
        dft_in_place(row, inverse);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        for j in 0..n {
            col[j] = samples[j * n + k];
        }
        dft_in_place(&mut col, inverse);
        for j in 0..n {
            samples[j * n + k] = col[j];
        }
    }
}

/// Result of a forward transform: the parity-valid spectrum plus the largest
/// mixed-parity square-cover coefficient (a consistency check that the data
/// really lives on ℝ²/Λ; it must be at noise level for lifted data).
pub struct ForwardTransform {
    pub spectrum: Spectrum,
    pub max_mixed_parity: f64,
}

/// Forward lattice Fourier transform with the fundamental-domain
/// normalization. The square-cover DFT computes 2 F̂(m,n) at parity-valid
/// bins, so coefficients are halved; mixed-parity bins are monitored.
pub fn forward_transform_checked(grid: &GridFn, symmetry_tol: f64) -> Result<ForwardTransform> {
    let n = grid.n;
    let scale = grid.sup_norm();
    let residual = grid.checkerboard_residual();
    if residual > symmetry_tol * (1.0 + scale) {
        return Err(Error::CheckerboardViolation {
            residual,
            tol: symmetry_tol * (1.0 + scale),
        });
    }

    let mut bins = grid.samples.clone();
    dft2_in_place(&mut bins, n, false);

    let w = (2.0 * PI / n as f64).powi(2);
    let half = n as i64 / 2;
    let mut spectrum = Spectrum::new();
    let mut max_mixed = 0.0f64;
    for m in -half..half {
        let jm = (m.rem_euclid(n as i64)) as usize;
        for nn in -half..half {
            let kn = (nn.rem_euclid(n as i64)) as usize;
            let sign = if (m + nn).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let coeff = bins[jm * n + kn] * (w * sign);
            if (m - nn).rem_euclid(2) == 0 {
                spectrum.insert(Freq::new(m, nn)?, coeff * 0.5);
            } else {
                max_mixed = max_mixed.max(coeff.norm());
            }
        }
    }
    Ok(ForwardTransform {
        spectrum,
        max_mixed_parity: max_mixed,
    })
}

/// Forward transform with the default symmetry tolerance.
pub fn forward_transform(grid: &GridFn) -> Result<Spectrum> {
    Ok(forward_transform_checked(grid, DEFAULT_SYMMETRY_TOL)?.spectrum)
}

/// Inverse transform onto an n×n square-cover grid,
/// F(u,v) = (1/2π²) Σ F̂(m,n) e^{i(mu+nv)}.
pub fn inverse_transform(spectrum: &Spectrum, n: usize) -> Result<GridFn> {
    let mut grid = GridFn::zeros(n)?;
    let half = n as i64 / 2;
    let mut bins = vec![Complex64::new(0.0, 0.0); n * n];
    for (f, c) in spectrum.iter() {
        if f.m < -half || f.m >= half || f.n < -half || f.n >= half {
            return Err(Error::OutOfRange {
                what: "frequency beyond the grid Nyquist band",
                value: f.m.abs().max(f.n.abs()) as f64,
            });
        }
        let jm = (f.m.rem_euclid(n as i64)) as usize;
        let kn = (f.n.rem_euclid(n as i64)) as usize;
        // (−1)^{m+n} undoes the −π grid offset; parity-valid means m+n even.
        bins[jm * n + kn] = *c;
    }
    dft2_in_place(&mut bins, n, true);
    let scale = 1.0 / FUND_AREA;
    for (dst, src) in grid.samples.iter_mut().zip(bins) {
        *dst = src * scale;
    }
    Ok(grid)
}

/// Convolution on ℝ²/Λ via the multiplier route: (F ∗ K)^ = F̂ K̂.
pub fn convolve(f: &GridFn, g: &GridFn) -> Result<GridFn> {
    if f.n != g.n {
        return Err(Error::SizeMismatch {
            left: f.n,
            right: g.n,
        });
    }
    let fh = forward_transform(f)?;
    let gh = forward_transform(g)?;
    let product = fh.apply_symbol(|freq| Some(gh.get(freq)))?;
    inverse_transform(&product, f.n)
}

// ---------------------------------------------------------------------------
// CSV schemas (square-cover grids and spectra)
// ---------------------------------------------------------------------------

/// Render a grid as CSV with header `u,v,re,im`, row-major over the square
/// cover. Lines starting with `#` are comments (used for config hashes).
pub fn grid_to_csv(grid: &GridFn, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str("u,v,re,im\n");
    for j in 0..grid.n {
        for k in 0..grid.n {
            let z = grid.get(j, k);
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e}\n",
                grid.u_at(j),
                grid.v_at(k),
                z.re,
                z.im
            ));
        }
    }
    out
}

/// Render a spectrum as CSV with header `m,n,re,im`.
pub fn spectrum_to_csv(spectrum: &Spectrum, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str("m,n,re,im\n");
    for (f, z) in spectrum.iter() {
        out.push_str(&format!("{},{},{:.17e},{:.17e}\n", f.m(), f.n(), z.re, z.im));
    }
    out
}
