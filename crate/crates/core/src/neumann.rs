//! The end-to-end Neumann solver: boundary datum → layer density → interior
//! field, plus the verification harnesses for the jump relation and the
//! interior equation.
//!
//! Everything is diagonal in frequency. The solve is f̂ = ĥ/σ with
//! σ = −½ + K̂/8π; the interior field at collar level t multiplies by
//! (√2/8π) k̂_t, its normal derivative by (1/8π) ∂ₜk̂_t, and the boundary
//! trace by (√2/8π) K̂₀. Sampled boundary data is projected onto the
//! parity-valid band below the table cutoff and the discarded energy
//! fraction is reported.

use crate::error::{Error, Result};
use crate::kernels::{self, CollarPoint, COLLAR_MAX};
use crate::multiplier::{
    build_dkdthat, build_khat, build_kthat, DtnSymbol, NeumannSymbol, SymbolTable, TraceSymbol,
};
use crate::quadrature::{self, QuadratureSpec};
use crate::torus::{forward_transform, inverse_transform, Freq, GridFn, Spectrum};
use num_complex::Complex64;
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::path::PathBuf;
use std::rc::Rc;

/// What a boundary grid means.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataKind {
    NeumannDatum,
    Density,
    Trace,
}

/// Real-valued boundary data sampled on the square cover.
#[derive(Clone, Debug)]
pub struct BoundaryData {
    pub grid: GridFn,
    pub kind: DataKind,
}

impl BoundaryData {
    pub fn new(grid: GridFn, kind: DataKind) -> Result<BoundaryData> {
        if grid.max_imag() > 1e-12 * (1.0 + grid.sup_norm()) {
            return Err(Error::NonFinite {
                what: "boundary data must be real-valued",
            });
        }
        Ok(BoundaryData { grid, kind })
    }
}

/// Interior samples of the field on a family of collar levels.
#[derive(Clone, Debug)]
pub struct InteriorField {
    t_levels: Vec<f64>,
    grids: Vec<GridFn>,
}

impl InteriorField {
    pub fn new(levels: Vec<(f64, GridFn)>) -> Result<InteriorField> {
        for pair in levels.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::OutOfRange {
                    what: "t-levels must be strictly increasing",
                    value: pair[1].0,
                });
            }
        }
        for (t, _) in &levels {
            if !(*t > 0.0 && *t <= COLLAR_MAX) {
                return Err(Error::OutOfRange {
                    what: "t-level outside the collar",
                    value: *t,
                });
            }
        }
        let (t_levels, grids) = levels.into_iter().unzip();
        Ok(InteriorField { t_levels, grids })
    }

    pub fn levels(&self) -> &[f64] {
        &self.t_levels
    }

    pub fn grid(&self, i: usize) -> &GridFn {
        &self.grids[i]
    }
}

// ---------------------------------------------------------------------------
// Collar table cache
// ---------------------------------------------------------------------------

/// Builds and memoizes k̂_t / ∂ₜk̂_t tables on demand, optionally persisting
/// them to a cache directory.
pub struct CollarTables {
    pub cutoff: i64,
    pub spec: QuadratureSpec,
    pub threads: usize,
    pub cache_dir: Option<PathBuf>,
    layer: RefCell<BTreeMap<u64, Rc<SymbolTable>>>,
    layer_dt: RefCell<BTreeMap<u64, Rc<SymbolTable>>>,
}

impl CollarTables {
    pub fn new(cutoff: i64, spec: QuadratureSpec, threads: usize) -> CollarTables {
        CollarTables {
            cutoff,
            spec,
            threads,
            cache_dir: None,
            layer: RefCell::new(BTreeMap::new()),
            layer_dt: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn with_cache_dir(mut self, dir: Option<PathBuf>) -> CollarTables {
        self.cache_dir = dir;
        self
    }

    pub fn layer_table(&self, t: f64) -> Result<Rc<SymbolTable>> {
        let key = t.to_bits();
        if let Some(tbl) = self.layer.borrow().get(&key) {
            return Ok(tbl.clone());
        }
        let tbl = Rc::new(self.build(t, false)?);
        self.layer.borrow_mut().insert(key, tbl.clone());
        Ok(tbl)
    }

    pub fn layer_dt_table(&self, t: f64) -> Result<Rc<SymbolTable>> {
        let key = t.to_bits();
        if let Some(tbl) = self.layer_dt.borrow().get(&key) {
            return Ok(tbl.clone());
        }
        let tbl = Rc::new(self.build(t, true)?);
        self.layer_dt.borrow_mut().insert(key, tbl.clone());
        Ok(tbl)
    }

    fn build(&self, t: f64, dt: bool) -> Result<SymbolTable> {
        if let Some(dir) = &self.cache_dir {
            let id = if dt { "dkdthat" } else { "kthat" };
            if let Some(tbl) = SymbolTable::load(dir, id, Some(t), self.cutoff, &self.spec)? {
                return Ok(tbl);
            }
        }
        let tbl = if dt {
            build_dkdthat(t, self.cutoff, &self.spec, self.threads)?
        } else {
            build_kthat(t, self.cutoff, &self.spec, self.threads)?
        };
        if let Some(dir) = &self.cache_dir {
            tbl.save(dir, &self.spec)?;
        }
        Ok(tbl)
    }
}

// ---------------------------------------------------------------------------
// Solve and field evaluation
// ---------------------------------------------------------------------------

/// Project sampled boundary data onto the parity-valid band below `cutoff`.
/// Fails if more than `max_discard` of the energy lies outside.
pub fn project_to_band(
    data: &BoundaryData,
    cutoff: i64,
    max_discard: f64,
) -> Result<(Spectrum, f64)> {
    let spectrum = forward_transform(&data.grid)?;
    let (kept, discarded) = spectrum.truncated(cutoff);
    if discarded > max_discard {
        return Err(Error::BandProjection {
            discarded_fraction: discarded,
            max: max_discard,
        });
    }
    Ok((kept, discarded))
}

/// Solve (−½I + 𝒩) f = h for the layer density f. Returns the density and
/// the band-projection loss of the input.
pub fn solve(
    h: &BoundaryData,
    sym: &NeumannSymbol,
    max_discard: f64,
) -> Result<(BoundaryData, f64)> {
    let (hhat, discarded) = project_to_band(h, sym.cutoff(), max_discard)?;
    let fhat = sym.invert(&hhat)?;
    let grid = inverse_transform(&fhat, h.grid.n())?;
    Ok((
        BoundaryData {
            grid,
            kind: DataKind::Density,
        },
        discarded,
    ))
}

/// Boundary trace of the single layer potential: modewise (√2/8π) K̂₀.
pub fn trace_s(f: &BoundaryData, trace: &TraceSymbol) -> Result<BoundaryData> {
    let (fhat, _) = forward_transform(&f.grid)?.truncated(trace.cutoff());
    let shat = trace.apply(&fhat)?;
    Ok(BoundaryData {
        grid: inverse_transform(&shat, f.grid.n())?,
        kind: DataKind::Trace,
    })
}

/// Interior values of Sf on the level surface at collar parameter t:
/// modewise (√2/8π) k̂_t.
pub fn interior_eval(f: &BoundaryData, t: f64, tables: &CollarTables) -> Result<GridFn> {
    let tbl = tables.layer_table(t)?;
    let fhat = forward_transform(&f.grid)?;
    let (fhat, _) = fhat.truncated(tables.cutoff);
    let shat = fhat.apply_symbol(|fr| {
        tbl.get_real(fr)
            .map(|k| Complex64::new(k * SQRT_2 / (8.0 * PI), 0.0))
    })?;
    inverse_transform(&shat, f.grid.n())
}

/// d/dt Sf along the collar curves at level t: modewise (1/8π) ∂ₜk̂_t.
pub fn normal_derivative(f: &BoundaryData, t: f64, tables: &CollarTables) -> Result<GridFn> {
    let tbl = tables.layer_dt_table(t)?;
    let fhat = forward_transform(&f.grid)?;
    let (fhat, _) = fhat.truncated(tables.cutoff);
    let shat = fhat.apply_symbol(|fr| {
        tbl.get_real(fr)
            .map(|k| Complex64::new(k / (8.0 * PI), 0.0))
    })?;
    inverse_transform(&shat, f.grid.n())
}

/// Pointwise interior evaluation of Sf from a density spectrum, with the
/// collar tables built on demand. Suitable for finite-difference stencils at
/// arbitrary collar points.
pub struct InteriorEvaluator<'a> {
    pub density_hat: Spectrum,
    pub tables: &'a CollarTables,
}

impl InteriorEvaluator<'_> {
    pub fn eval(&self, t: f64, u: f64, v: f64) -> Result<f64> {
        let tbl = self.tables.layer_table(t)?;
        let shat = self.density_hat.apply_symbol(|fr| {
            tbl.get_real(fr)
                .map(|k| Complex64::new(k * SQRT_2 / (8.0 * PI), 0.0))
        })?;
        Ok(shat.eval_at(u, v).re)
    }
}

/// Direct-quadrature evaluation of Sf at one collar point (the slow oracle
/// for the spectral route): (√2/8π) ∬ F(u′−u, v′−v) k(t/√2, u, v) du dv.
pub fn interior_eval_direct<F: Fn(f64, f64) -> f64>(
    density: &F,
    point: &CollarPoint,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let t = point.t();
    if t <= 0.0 {
        return Err(Error::OutOfRange {
            what: "collar parameter t",
            value: t,
        });
    }
    let (pu, pv) = (point.point().u(), point.point().v());
    let tau = t / SQRT_2;
    let integrand = |u: f64, v: f64| {
        density(pu - u, pv - v) * kernels::layer_kernel(tau, u, v).map_or(f64::INFINITY, |x| x)
    };
    let r = quadrature::integrate_fund_origin(&integrand, spec)?;
    Ok(r.value * SQRT_2 / (8.0 * PI))
}

// ---------------------------------------------------------------------------
// Coordinates and the interior operator
// ---------------------------------------------------------------------------

/// Collar coordinates to the polar interior coordinates (r, u, v) in which
/// the operator takes its product form: r = π/2 − √2 t, and the torus
/// coordinates swap roles (polar u is torus v, polar v is torus u).
pub fn collar_to_polar(c: &CollarPoint) -> (f64, f64, f64) {
    (
        PI / 2.0 - SQRT_2 * c.t(),
        c.point().v(),
        c.point().u(),
    )
}

/// Polar-coordinate chart: ζ¹ = e^{i(u+v)} sin(r/2), ζ² = e^{i(u−v)} cos(r/2).
pub fn polar_chart(r: f64, u: f64, v: f64) -> kernels::SpherePoint {
    kernels::SpherePoint {
        z1: Complex64::from_polar((0.5 * r).sin(), u + v),
        z2: Complex64::from_polar((0.5 * r).cos(), u - v),
    }
}

/// Second-order centered finite-difference application of the interior
/// operator
/// L = −2∂r² − ½cot²(r)∂u² − ½csc²(r)∂v² − cot(r)csc(r)∂uv − 2cot(r)∂r + ½
/// to a field given in collar coordinates, evaluated at `center` with step
/// `h_fd` in each polar coordinate.
pub fn l_residual<F: Fn(f64, f64, f64) -> Result<f64>>(
    field: &F,
    center: &CollarPoint,
    h_fd: f64,
) -> Result<f64> {
    let (r0, u0, v0) = collar_to_polar(center);
    let t_of_r = |r: f64| (PI / 2.0 - r) / SQRT_2;
    // the stencil spans ±h_fd in r; it must stay inside the collar
    for r in [r0 - h_fd, r0 + h_fd] {
        let t = t_of_r(r);
        if !(0.0..=COLLAR_MAX).contains(&t) {
            return Err(Error::StencilLeavesCollar { t });
        }
    }
    let w = |r: f64, u: f64, v: f64| field(t_of_r(r), v, u);

    let w0 = w(r0, u0, v0)?;
    let wr_p = w(r0 + h_fd, u0, v0)?;
    let wr_m = w(r0 - h_fd, u0, v0)?;
    let wu_p = w(r0, u0 + h_fd, v0)?;
    let wu_m = w(r0, u0 - h_fd, v0)?;
    let wv_p = w(r0, u0, v0 + h_fd)?;
    let wv_m = w(r0, u0, v0 - h_fd)?;
    let wpp = w(r0, u0 + h_fd, v0 + h_fd)?;
    let wpm = w(r0, u0 + h_fd, v0 - h_fd)?;
    let wmp = w(r0, u0 - h_fd, v0 + h_fd)?;
    let wmm = w(r0, u0 - h_fd, v0 - h_fd)?;

    let h2 = h_fd * h_fd;
    let w_rr = (wr_p - 2.0 * w0 + wr_m) / h2;
    let w_r = (wr_p - wr_m) / (2.0 * h_fd);
    let w_uu = (wu_p - 2.0 * w0 + wu_m) / h2;
    let w_vv = (wv_p - 2.0 * w0 + wv_m) / h2;
    let w_uv = (wpp - wpm - wmp + wmm) / (4.0 * h2);

    let cot = r0.cos() / r0.sin();
    let csc = 1.0 / r0.sin();
    Ok(-2.0 * w_rr - 0.5 * cot * cot * w_uu - 0.5 * csc * csc * w_vv - cot * csc * w_uv
        - 2.0 * cot * w_r
        + 0.5 * w0)
}

// ---------------------------------------------------------------------------
// Steklov spectrum
// ---------------------------------------------------------------------------

/// Modewise Dirichlet-to-Neumann ratios, one representative per frequency
/// class under (m,n) ↦ (−m,−n), sorted by ν.
pub fn steklov_modes(khat: &SymbolTable, k0hat: &SymbolTable) -> Result<Vec<(Freq, f64)>> {
    let dtn = DtnSymbol::new(khat, k0hat)?;
    let mut out: Vec<(Freq, f64)> = Vec::new();
    for (f, nu) in dtn.iter() {
        if f.m() > 0 || (f.m() == 0 && f.n() >= 0) {
            out.push((*f, *nu));
        }
    }
    out.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    Ok(out)
}

/// Convenience: build the two boundary tables and the diagonal solve chain at
/// one cutoff.
pub struct BoundaryOperators {
    pub khat: SymbolTable,
    pub k0hat: SymbolTable,
    pub neumann: NeumannSymbol,
    pub trace: TraceSymbol,
}

impl BoundaryOperators {
    pub fn build(cutoff: i64, spec: &QuadratureSpec, threads: usize) -> Result<BoundaryOperators> {
        let khat = build_khat(cutoff, spec, threads)?;
        let k0hat = crate::multiplier::build_k0hat(cutoff, spec, threads)?;
        let neumann = NeumannSymbol::new(&khat)?;
        let trace = TraceSymbol::new(&k0hat);
        Ok(BoundaryOperators {
            khat,
            k0hat,
            neumann,
            trace,
        })
    }
}
