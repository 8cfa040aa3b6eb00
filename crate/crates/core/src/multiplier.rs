//! Fourier symbol tables for the kernel family and the diagonal operators
//! built from them.
//!
//! Every convolution operator in play is diagonal on the lattice characters,
//! so all the analysis reduces to tables of kernel Fourier coefficients:
//! K̂ (the Neumann kernel), K̂₀ (the trace kernel), and the collar families
//! k̂_t, ∂ₜk̂_t and K̂_t. Each variant implements [`TableKernel`]; the builder
//! only quadratures the symmetry-reduced set of frequencies and completes the
//! rest by reflection. Tables persist to CSV with a JSON provenance sidecar
//! and are keyed by (kernel, t, cutoff, quadrature settings).

use crate::error::{Error, Result};
use crate::jsonout::JsonObject;
use crate::kernels;
use crate::par;
use crate::quadrature::{self, Corner, IntegralResult, QuadratureSpec, Rect};
use crate::torus::Freq;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// How a kernel's Fourier coefficients reflect across sign changes of (m, n).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryClass {
    /// Odd in m and in n (K̂): axis rows vanish, quadrant m, n ≥ 1 computed.
    OddOdd,
    /// Even in m and in n (K̂₀): quadrant m, n ≥ 0 computed.
    EvenEven,
    /// Invariant only under (m,n) ↦ (−m,−n) (k̂_t, ∂ₜk̂_t): half plane computed.
    CenterEven,
    /// No usable symmetry (complex K̂_t): every frequency computed.
    Full,
}

/// One interchangeable kernel variant whose lattice Fourier coefficients a
/// [`SymbolTable`] caches. Implementations are registered by name in
/// [`kernel_by_name`] and selected at runtime.
pub trait TableKernel: Sync {
    /// Stable identifier (used in cache filenames and provenance).
    fn id(&self) -> String;
    /// Collar parameter, when the kernel has one.
    fn t(&self) -> Option<f64>;
    fn symmetry(&self) -> SymmetryClass;
    /// F̂(m, n) with a quadrature error estimate, for (m, n) in the computed
    /// set of [`Self::symmetry`].
    fn entry(&self, m: i64, n: i64, spec: &QuadratureSpec) -> Result<(Complex64, f64)>;
}

// ---------------------------------------------------------------------------
// Kernel implementations
// ---------------------------------------------------------------------------

/// K̂(m,n): coefficients of the singular boundary kernel.
pub struct NeumannCoeff;

impl TableKernel for NeumannCoeff {
    fn id(&self) -> String {
        "khat".into()
    }
    fn t(&self) -> Option<f64> {
        None
    }
    fn symmetry(&self) -> SymmetryClass {
        SymmetryClass::OddOdd
    }
    fn entry(&self, m: i64, n: i64, spec: &QuadratureSpec) -> Result<(Complex64, f64)> {
        let r = quadrature::khat(m, n, spec)?;
        // a coefficient at or beyond 4π would contradict the operator-norm
        // bound and can only mean the quadrature broke — abort immediately
        if r.value.abs() + r.err_est >= 4.0 * PI {
            return Err(Error::SymbolSignViolation {
                m,
                n,
                sigma: -0.5 + r.value / (8.0 * PI),
            });
        }
        Ok((Complex64::new(r.value, 0.0), r.err_est))
    }
}

/// K̂₀(m,n): coefficients of the trace kernel k(0,·).
pub struct TraceCoeff;

impl TableKernel for TraceCoeff {
    fn id(&self) -> String {
        "k0hat".into()
    }
    fn t(&self) -> Option<f64> {
        None
    }
    fn symmetry(&self) -> SymmetryClass {
        SymmetryClass::EvenEven
    }
    fn entry(&self, m: i64, n: i64, spec: &QuadratureSpec) -> Result<(Complex64, f64)> {
        let (mf, nf) = (m as f64, n as f64);
        let integrand = |u: f64, v: f64| {
            let k = kernels::trace_kernel(u, v).map_or(f64::INFINITY, |x| x);
            k * (mf * u).cos() * (nf * v).cos()
        };
        let quarter = QuadratureSpec {
            abs_tol: spec.abs_tol / 4.0,
            ..*spec
        };
        let r = quadrature::integrate_rect(
            &integrand,
            Rect::new(0.0, PI, 0.0, PI / 2.0),
            &quarter,
            Some(Corner::LowLow),
        )?;
        Ok((Complex64::new(4.0 * r.value, 0.0), 4.0 * r.err_est))
    }
}

// Kernel tables are meaningful well beyond the geometric collar (the kernel
// bounds hold for t/√2 up to π/4); convergence studies use dyadic sequences
// starting at t = 0.1, so the numeric range is wider than π/100.
fn check_collar(t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 4.0 * kernels::COLLAR_MAX) {
        return Err(Error::OutOfRange {
            what: "collar parameter t",
            value: t,
        });
    }
    Ok(t)
}

/// Integral over the fundamental domain of a kernel that is even under
/// (u,v) ↦ (−u,−v), against cos(mu + nv): two origin-graded half-domain
/// quadrants, doubled.
fn center_even_entry<K: Fn(f64, f64) -> f64>(
    kernel: K,
    m: i64,
    n: i64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let (mf, nf) = (m as f64, n as f64);
    let integrand = |u: f64, v: f64| kernel(u, v) * (mf * u + nf * v).cos();
    let half = QuadratureSpec {
        abs_tol: spec.abs_tol / 4.0,
        ..*spec
    };
    let upper = quadrature::integrate_rect(
        &integrand,
        Rect::new(0.0, PI, 0.0, PI / 2.0),
        &half,
        Some(Corner::LowLow),
    )?;
    let lower = quadrature::integrate_rect(
        &integrand,
        Rect::new(0.0, PI, -PI / 2.0, 0.0),
        &half,
        Some(Corner::LowHigh),
    )?;
    Ok(IntegralResult {
        value: 2.0 * (upper.value + lower.value),
        err_est: 2.0 * (upper.err_est + lower.err_est),
        panels: upper.panels + lower.panels,
    })
}

/// k̂(m,n) at collar level t: coefficients of k(t/√2, ·), the interior
/// single-layer symbol (up to √2/8π).
pub struct LayerCoeff {
    pub t: f64,
}

impl TableKernel for LayerCoeff {
    fn id(&self) -> String {
        "kthat".into()
    }
    fn t(&self) -> Option<f64> {
        Some(self.t)
    }
    fn symmetry(&self) -> SymmetryClass {
        SymmetryClass::CenterEven
    }
    fn entry(&self, m: i64, n: i64, spec: &QuadratureSpec) -> Result<(Complex64, f64)> {
        let tau = check_collar(self.t)? / std::f64::consts::SQRT_2;
        let r = center_even_entry(
            move |u, v| kernels::layer_kernel(tau, u, v).map_or(f64::INFINITY, |x| x),
            m,
            n,
            spec,
        )?;
        Ok((Complex64::new(r.value, 0.0), r.err_est))
    }
}

/// ∂ₜk̂(m,n) at collar level t: coefficients of ∂ₜk(t/√2, ·), the symbol of
/// the normal derivative along the collar curves (up to 1/8π).
pub struct LayerDtCoeff {
    pub t: f64,
}

impl TableKernel for LayerDtCoeff {
    fn id(&self) -> String {
        "dkdthat".into()
    }
    fn t(&self) -> Option<f64> {
        Some(self.t)
    }
    fn symmetry(&self) -> SymmetryClass {
        SymmetryClass::CenterEven
    }
    fn entry(&self, m: i64, n: i64, spec: &QuadratureSpec) -> Result<(Complex64, f64)> {
        let tau = check_collar(self.t)? / std::f64::consts::SQRT_2;
        let r = center_even_entry(
            move |u, v| kernels::layer_kernel_dt(tau, u, v).map_or(f64::INFINITY, |x| x),
            m,
            n,
            spec,
        )?;
        Ok((Complex64::new(r.value, 0.0), r.err_est))
    }
}

/// K̂_t(m,n): coefficients of the complex interior-gradient kernel, used for
/// the uniform-in-t multiplier boundedness check.
pub struct GradientCoeff {
    pub t: f64,
}

impl TableKernel for GradientCoeff {
    fn id(&self) -> String {
        "gradhat".into()
    }
    fn t(&self) -> Option<f64> {
        Some(self.t)
    }
    fn symmetry(&self) -> SymmetryClass {
        SymmetryClass::Full
    }
    fn entry(&self, m: i64, n: i64, spec: &QuadratureSpec) -> Result<(Complex64, f64)> {
        let t = check_collar(self.t)?;
        let (mf, nf) = (m as f64, n as f64);
        let half = QuadratureSpec {
            abs_tol: spec.abs_tol / 2.0,
            ..*spec
        };
        // Re K̂ = ∬ (Re K_t cos θ + Im K_t sin θ), Im K̂ = ∬ (Im K_t cos θ − Re K_t sin θ)
        let re = quadrature::integrate_fund_origin(
            &|u: f64, v: f64| {
                let kt = kernels::gradient_kernel(t, u, v)
                    .unwrap_or(Complex64::new(f64::INFINITY, 0.0));
                let th = mf * u + nf * v;
                kt.re * th.cos() + kt.im * th.sin()
            },
            &half,
        )?;
        let im = quadrature::integrate_fund_origin(
            &|u: f64, v: f64| {
                let kt = kernels::gradient_kernel(t, u, v)
                    .unwrap_or(Complex64::new(f64::INFINITY, 0.0));
                let th = mf * u + nf * v;
                kt.im * th.cos() - kt.re * th.sin()
            },
            &half,
        )?;
        Ok((
            Complex64::new(re.value, im.value),
            re.err_est + im.err_est,
        ))
    }
}

/// Runtime registry: construct a kernel variant by name. Collar kernels need
/// `t`; the boundary kernels reject one.
pub fn kernel_by_name(name: &str, t: Option<f64>) -> Result<Box<dyn TableKernel>> {
    match (name, t) {
        ("khat", None) => Ok(Box::new(NeumannCoeff)),
        ("k0hat", None) => Ok(Box::new(TraceCoeff)),
        ("kthat", Some(t)) => Ok(Box::new(LayerCoeff { t })),
        ("dkdthat", Some(t)) => Ok(Box::new(LayerDtCoeff { t })),
        ("gradhat", Some(t)) => Ok(Box::new(GradientCoeff { t })),
        ("khat" | "k0hat", Some(_)) => Err(Error::Io(format!(
            "kernel '{name}' does not take a collar parameter"
        ))),
        ("kthat" | "dkdthat" | "gradhat", None) => Err(Error::Io(format!(
            "kernel '{name}' requires a collar parameter --t"
        ))),
        _ => Err(Error::Io(format!(
            "unknown kernel '{name}' (available: {})",
            KERNEL_NAMES.join(", ")
        ))),
    }
}

pub const KERNEL_NAMES: [&str; 5] = ["khat", "k0hat", "kthat", "dkdthat", "gradhat"];

// ---------------------------------------------------------------------------
// Symbol tables
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SymbolTable {
    kernel_id: String,
    t: Option<f64>,
    cutoff: i64,
    values: BTreeMap<Freq, Complex64>,
    errs: BTreeMap<Freq, f64>,
    config_hash: String,
}

/// FNV-1a of a canonical settings string, hex-encoded. Used to key caches and
/// stamp output files.
pub fn fnv1a64(s: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn table_config_string(
    kernel_id: &str,
    t: Option<f64>,
    cutoff: i64,
    spec: &QuadratureSpec,
) -> String {
    format!(
        "kernel={kernel_id};t={};M={cutoff};abs_tol={:e};panel_order={};max_depth={};grading={},{}",
        t.map_or("none".to_string(), |x| format!("{x:.17e}")),
        spec.abs_tol,
        spec.panel_order,
        spec.max_depth,
        spec.grading.0,
        spec.grading.1,
    )
}

impl SymbolTable {
    pub fn kernel_id(&self) -> &str {
        &self.kernel_id
    }

    pub fn t(&self) -> Option<f64> {
        self.t
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    pub fn get(&self, f: Freq) -> Option<Complex64> {
        self.values.get(&f).copied()
    }

    pub fn err(&self, f: Freq) -> Option<f64> {
        self.errs.get(&f).copied()
    }

    /// Real part accessor for the real-valued kernel families.
    pub fn get_real(&self, f: Freq) -> Option<f64> {
        self.values.get(&f).map(|z| z.re)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Freq, &Complex64)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest |value| and the frequency attaining it.
    pub fn sup_abs(&self) -> (Freq, f64) {
        let mut best = (Freq::new(0, 0).unwrap(), 0.0f64);
        for (f, z) in &self.values {
            if z.norm() > best.1 {
                best = (*f, z.norm());
            }
        }
        best
    }

    pub fn max_err(&self) -> f64 {
        self.errs.values().copied().fold(0.0, f64::max)
    }

    #[cfg(test)]
    pub(crate) fn corrupt_for_test(&mut self, f: Freq, value: Complex64) {
        self.values.insert(f, value);
    }
}

fn parity_ok(m: i64, n: i64) -> bool {
    (m - n).rem_euclid(2) == 0
}

/// Build a symbol table over |m|, |n| ≤ cutoff: quadrature on the computed
/// set of the kernel's symmetry class, reflection for everything else.
pub fn build_table(
    kernel: &dyn TableKernel,
    cutoff: i64,
    spec: &QuadratureSpec,
    threads: usize,
) -> Result<SymbolTable> {
    if cutoff < 1 {
        return Err(Error::OutOfRange {
            what: "cutoff M",
            value: cutoff as f64,
        });
    }
    let sym = kernel.symmetry();
    let mut computed: Vec<(i64, i64)> = Vec::new();
    for m in -cutoff..=cutoff {
        for n in -cutoff..=cutoff {
            if !parity_ok(m, n) {
                continue;
            }
            let mine = match sym {
                SymmetryClass::OddOdd => m >= 1 && n >= 1,
                SymmetryClass::EvenEven => (m >= 1 && n >= 1) || (m == 0 && n >= 0) || (n == 0 && m >= 1),
                SymmetryClass::CenterEven => m >= 1 || (m == 0 && n >= 0),
                SymmetryClass::Full => true,
            };
            if mine {
                computed.push((m, n));
            }
        }
    }

    let results = par::map_indexed(computed.len(), threads, |i| {
        let (m, n) = computed[i];
        kernel.entry(m, n, spec)
    });

    let mut values = BTreeMap::new();
    let mut errs = BTreeMap::new();
    for ((m, n), res) in computed.iter().zip(results) {
        let (v, e) = res?;
        values.insert(Freq::new(*m, *n)?, v);
        errs.insert(Freq::new(*m, *n)?, e);
    }

    // Reflect into the rest of the band.
    for m in -cutoff..=cutoff {
        for n in -cutoff..=cutoff {
            if !parity_ok(m, n) {
                continue;
            }
            let f = Freq::new(m, n)?;
            if values.contains_key(&f) {
                continue;
            }
            let (v, e) = match sym {
                SymmetryClass::OddOdd => {
                    if m == 0 || n == 0 {
                        (Complex64::new(0.0, 0.0), 0.0)
                    } else {
                        let base = Freq::new(m.abs(), n.abs())?;
                        let sign = if (m < 0) ^ (n < 0) { -1.0 } else { 1.0 };
                        (values[&base] * sign, errs[&base])
                    }
                }
                SymmetryClass::EvenEven => {
                    let base = Freq::new(m.abs(), n.abs())?;
                    (values[&base], errs[&base])
                }
                SymmetryClass::CenterEven => {
                    let base = Freq::new(-m, -n)?;
                    (values[&base], errs[&base])
                }
                SymmetryClass::Full => unreachable!("full class computes every entry"),
            };
            values.insert(f, v);
            errs.insert(f, e);
        }
    }

    Ok(SymbolTable {
        kernel_id: kernel.id(),
        t: kernel.t(),
        cutoff,
        values,
        errs,
        config_hash: fnv1a64(&table_config_string(
            &kernel.id(),
            kernel.t(),
            cutoff,
            spec,
        )),
    })
}

pub fn build_khat(cutoff: i64, spec: &QuadratureSpec, threads: usize) -> Result<SymbolTable> {
    build_table(&NeumannCoeff, cutoff, spec, threads)
}

pub fn build_k0hat(cutoff: i64, spec: &QuadratureSpec, threads: usize) -> Result<SymbolTable> {
    build_table(&TraceCoeff, cutoff, spec, threads)
}

pub fn build_kthat(
    t: f64,
    cutoff: i64,
    spec: &QuadratureSpec,
    threads: usize,
) -> Result<SymbolTable> {
    build_table(&LayerCoeff { t }, cutoff, spec, threads)
}

pub fn build_dkdthat(
    t: f64,
    cutoff: i64,
    spec: &QuadratureSpec,
    threads: usize,
) -> Result<SymbolTable> {
    build_table(&LayerDtCoeff { t }, cutoff, spec, threads)
}

pub fn build_gradient_hat(
    t: f64,
    cutoff: i64,
    spec: &QuadratureSpec,
    threads: usize,
) -> Result<SymbolTable> {
    build_table(&GradientCoeff { t }, cutoff, spec, threads)
}

// ---------------------------------------------------------------------------
// Diagonal operators
// ---------------------------------------------------------------------------

/// σ(m,n) = −1/2 + K̂(m,n)/8π, the symbol of −½I + 𝒩. Construction asserts
/// σ ∈ (−1, 0) everywhere; a violation would contradict the operator-norm
/// bound and means the table is broken.
#[derive(Debug)]
pub struct NeumannSymbol {
    sigma: BTreeMap<Freq, f64>,
    cutoff: i64,
}

impl NeumannSymbol {
    pub fn new(khat: &SymbolTable) -> Result<NeumannSymbol> {
        let mut sigma = BTreeMap::new();
        for (f, z) in khat.iter() {
            let s = -0.5 + z.re / (8.0 * PI);
            if !(-1.0 < s && s < 0.0) {
                return Err(Error::SymbolSignViolation {
                    m: f.m(),
                    n: f.n(),
                    sigma: s,
                });
            }
            sigma.insert(*f, s);
        }
        Ok(NeumannSymbol {
            sigma,
            cutoff: khat.cutoff(),
        })
    }

    pub fn at(&self, f: Freq) -> Result<f64> {
        self.sigma
            .get(&f)
            .copied()
            .ok_or(Error::MissingSymbol { m: f.m(), n: f.n() })
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// Apply −½I + 𝒩 modewise.
    pub fn apply(&self, spectrum: &crate::torus::Spectrum) -> Result<crate::torus::Spectrum> {
        spectrum.apply_symbol(|f| self.sigma.get(&f).map(|s| Complex64::new(*s, 0.0)))
    }

    /// Solve (−½I + 𝒩) f = h modewise: f̂ = ĥ/σ.
    pub fn invert(&self, rhs: &crate::torus::Spectrum) -> Result<crate::torus::Spectrum> {
        rhs.apply_symbol(|f| self.sigma.get(&f).map(|s| Complex64::new(1.0 / *s, 0.0)))
    }
}

/// The trace symbol (√2/8π) K̂₀(m,n) of the boundary restriction of the
/// single layer potential.
#[derive(Debug)]
pub struct TraceSymbol {
    values: BTreeMap<Freq, f64>,
    cutoff: i64,
}

impl TraceSymbol {
    pub fn new(k0hat: &SymbolTable) -> TraceSymbol {
        let values = k0hat
            .iter()
            .map(|(f, z)| (*f, z.re * std::f64::consts::SQRT_2 / (8.0 * PI)))
            .collect();
        TraceSymbol {
            values,
            cutoff: k0hat.cutoff(),
        }
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn at(&self, f: Freq) -> Result<f64> {
        self.values
            .get(&f)
            .copied()
            .ok_or(Error::MissingSymbol { m: f.m(), n: f.n() })
    }

    pub fn apply(&self, spectrum: &crate::torus::Spectrum) -> Result<crate::torus::Spectrum> {
        spectrum.apply_symbol(|f| self.values.get(&f).map(|s| Complex64::new(*s, 0.0)))
    }
}

/// Modewise Dirichlet-to-Neumann ratio
/// ν(m,n) = σ(m,n) / ((√2/8π) K̂₀(m,n)): normal derivative over trace of the
/// single layer, mode by mode.
#[derive(Debug)]
pub struct DtnSymbol {
    values: BTreeMap<Freq, f64>,
}

impl DtnSymbol {
    pub fn new(khat: &SymbolTable, k0hat: &SymbolTable) -> Result<DtnSymbol> {
        let sigma = NeumannSymbol::new(khat)?;
        let trace = TraceSymbol::new(k0hat);
        let mut values = BTreeMap::new();
        for (f, _) in khat.iter() {
            let tr = trace.at(*f)?;
            if tr.abs() < 1e-10 {
                return Err(Error::VanishingTraceSymbol { m: f.m(), n: f.n() });
            }
            values.insert(*f, sigma.at(*f)? / tr);
        }
        Ok(DtnSymbol { values })
    }

    pub fn at(&self, f: Freq) -> Result<f64> {
        self.values
            .get(&f)
            .copied()
            .ok_or(Error::MissingSymbol { m: f.m(), n: f.n() })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Freq, &f64)> {
        self.values.iter()
    }
}

// ---------------------------------------------------------------------------
// Persistence: CSV table + JSON sidecar, keyed by the config hash
// ---------------------------------------------------------------------------

fn sidecar_json(
    table_kernel: &str,
    t: Option<f64>,
    cutoff: i64,
    spec: &QuadratureSpec,
    hash: &str,
) -> String {
    let mut obj = JsonObject::new()
        .str("format", "symbol-table-v1")
        .str("kernel", table_kernel);
    obj = match t {
        Some(t) => obj.num("t", t),
        None => obj.raw("t", "null"),
    };
    obj.int("cutoff", cutoff)
        .num("abs_tol", spec.abs_tol)
        .int("panel_order", spec.panel_order as i64)
        .int("max_depth", spec.max_depth as i64)
        .str("grading", &format!("{},{}", spec.grading.0, spec.grading.1))
        .str("config_hash", hash)
        .finish_pretty(0)
}

fn table_basename(kernel_id: &str, cutoff: i64, hash: &str) -> String {
    format!("{kernel_id}_M{cutoff}_{hash}")
}

impl SymbolTable {
    /// Write `<kernel>_M<cutoff>_<hash>.csv` plus its `.json` sidecar into
    /// `dir`. Only real-valued tables fit the `m,n,value,err` schema.
    pub fn save(&self, dir: &Path, spec: &QuadratureSpec) -> Result<PathBuf> {
        let max_im = self
            .values
            .values()
            .map(|z| z.im.abs())
            .fold(0.0f64, f64::max);
        if max_im > 1e-12 {
            return Err(Error::Io(format!(
                "table {} has complex entries (|im| up to {max_im:.3e}); only real tables persist",
                self.kernel_id
            )));
        }
        std::fs::create_dir_all(dir)?;
        let base = table_basename(&self.kernel_id, self.cutoff, &self.config_hash);
        let csv_path = dir.join(format!("{base}.csv"));
        let mut csv = String::new();
        csv.push_str(&format!("# config-hash: {}\n", self.config_hash));
        csv.push_str("m,n,value,err\n");
        for (f, z) in &self.values {
            csv.push_str(&format!(
                "{},{},{:.17e},{:.17e}\n",
                f.m(),
                f.n(),
                z.re,
                self.errs[f]
            ));
        }
        std::fs::write(&csv_path, csv)?;
        std::fs::write(
            dir.join(format!("{base}.json")),
            sidecar_json(&self.kernel_id, self.t, self.cutoff, spec, &self.config_hash) + "\n",
        )?;
        Ok(csv_path)
    }

    /// Load a cached table if its sidecar matches the expected provenance
    /// byte for byte; `Ok(None)` means "not cached, rebuild".
    pub fn load(
        dir: &Path,
        kernel_id: &str,
        t: Option<f64>,
        cutoff: i64,
        spec: &QuadratureSpec,
    ) -> Result<Option<SymbolTable>> {
        let hash = fnv1a64(&table_config_string(kernel_id, t, cutoff, spec));
        let base = table_basename(kernel_id, cutoff, &hash);
        let csv_path = dir.join(format!("{base}.csv"));
        let json_path = dir.join(format!("{base}.json"));
        if !csv_path.exists() || !json_path.exists() {
            return Ok(None);
        }
        let expected = sidecar_json(kernel_id, t, cutoff, spec, &hash) + "\n";
        let found = std::fs::read_to_string(&json_path)?;
        if found != expected {
            return Ok(None);
        }
        let table = parse_table_csv(&csv_path, kernel_id, t, cutoff, &hash)?;
        Ok(Some(table))
    }
}

fn parse_table_csv(
    path: &Path,
    kernel_id: &str,
    t: Option<f64>,
    cutoff: i64,
    hash: &str,
) -> Result<SymbolTable> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let mut values = BTreeMap::new();
    let mut errs = BTreeMap::new();
    let mut saw_header = false;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !saw_header {
            if line.trim() != "m,n,value,err" {
                return Err(Error::Parse {
                    file,
                    line: lineno,
                    column: "header".into(),
                    message: format!("expected 'm,n,value,err', found '{line}'"),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                file,
                line: lineno,
                column: "record".into(),
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let parse_int = |s: &str, col: &str| -> Result<i64> {
            s.trim().parse().map_err(|_| Error::Parse {
                file: file.clone(),
                line: lineno,
                column: col.into(),
                message: format!("invalid integer '{s}'"),
            })
        };
        let parse_float = |s: &str, col: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::Parse {
                file: file.clone(),
                line: lineno,
                column: col.into(),
                message: format!("invalid float '{s}'"),
            })
        };
        let m = parse_int(fields[0], "m")?;
        let n = parse_int(fields[1], "n")?;
        let value = parse_float(fields[2], "value")?;
        let err = parse_float(fields[3], "err")?;
        let f = Freq::new(m, n).map_err(|_| Error::Parse {
            file: file.clone(),
            line: lineno,
            column: "m,n".into(),
            message: format!("({m}, {n}) violates the parity constraint"),
        })?;
        values.insert(f, Complex64::new(value, 0.0));
        errs.insert(f, err);
    }
    Ok(SymbolTable {
        kernel_id: kernel_id.to_string(),
        t,
        cutoff,
        values,
        errs,
        config_hash: hash.to_string(),
    })
}

/// Build a table, reading it from `cache_dir` when an identical configuration
/// was built before and persisting it otherwise.
pub fn build_or_load(
    kernel: &dyn TableKernel,
    cutoff: i64,
    spec: &QuadratureSpec,
    threads: usize,
    cache_dir: Option<&Path>,
) -> Result<SymbolTable> {
    if let Some(dir) = cache_dir {
        if let Some(table) = SymbolTable::load(dir, &kernel.id(), kernel.t(), cutoff, spec)? {
            return Ok(table);
        }
    }
    let table = build_table(kernel, cutoff, spec, threads)?;
    if let Some(dir) = cache_dir {
        table.save(dir, spec)?;
    }
    Ok(table)
}
