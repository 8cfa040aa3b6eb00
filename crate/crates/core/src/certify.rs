//! Machine-checkable certificate that sup |K̂(m,n)| < 4π over the dual
//! lattice, hence ‖𝒩‖_{L²→L²} < ½ and −½I + 𝒩 is invertible.
//!
//! The argument splits the positive-frequency quadrant three ways:
//!
//! * red: m ≥ 4 and 25m² ≥ 64n — a two-fold integration by parts in u gives a
//!   closed-form row bound whose supremum over integers is attained at
//!   m ∈ {5, 6};
//! * blue: n ≥ 8 and 25m² ≤ 64n — one integration by parts in v, endpoints
//!   n ∈ {13, 14};
//! * direct: the remaining 11 frequencies with 1 ≤ m ≤ 3, 1 ≤ n ≤ 7, checked
//!   by quadrature (all come out below 5.8).
//!
//! The analytic branches rest on a family of aperture-dependent constants
//! (integrals of the homogeneous model kernel and of the explicit majorant
//! functions); the certificate recomputes every constant by quadrature,
//! checks each against the rounded bound its closed form is known to satisfy,
//! evaluates the branch endpoints, verifies partition coverage exhaustively
//! up to 10⁴, and records the margins.

use crate::error::{Error, Result};
use crate::jsonout::{array, JsonObject};
use crate::kernels::{self, model, MajorantScale, MAJORANT_BOX};
use crate::multiplier::{fnv1a64, SymbolTable};
use crate::quadrature::{
    homogeneous_tail, integrate_line, integrate_rect, Corner, QuadratureSpec, Rect,
};
use crate::torus::Freq;
use std::f64::consts::PI;

/// The two aperture paths the proof instantiates.
pub const RED_APERTURE: f64 = 2.0;
pub const BLUE_APERTURE: f64 = 1.0;
/// Cut constants c₁ (red, with c₁/b = 4) and c₂ (blue, with (c₂/b)² = 8).
pub const RED_CUT: f64 = 1.6;
pub fn blue_cut() -> f64 {
    4.0 * std::f64::consts::SQRT_2 / 5.0
}

/// A computed value with its quadrature error estimate.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Estimate {
        Estimate { value, err: 0.0 }
    }
}

/// The constant family for one aperture: both the m-directional (I) and
/// n-directional (J) integration-by-parts families are populated.
#[derive(Clone, Debug)]
pub struct MajorantConstants {
    pub a: f64,
    pub e0: f64,
    pub e1: f64,
    pub i0: Estimate,
    pub i1: Estimate,
    pub i2: Estimate,
    pub i3: Estimate,
    pub eps_i0: Estimate,
    pub eps_i1: Estimate,
    pub eps_i2: Estimate,
    pub eps_i3: Estimate,
    pub eps_i4: Estimate,
    pub j0: Estimate,
    pub j1: Estimate,
    pub j2: Estimate,
    pub eps_j0: Estimate,
    pub eps_j1: Estimate,
    pub eps_j2: Estimate,
    pub eps_j3: Estimate,
}

fn est(r: crate::quadrature::IntegralResult) -> Estimate {
    Estimate {
        value: r.value,
        err: r.err_est,
    }
}

/// Compute the full constant family for aperture a by quadrature and the
/// exact tail reductions.
pub fn compute_constants(a: f64, spec: &QuadratureSpec) -> Result<MajorantConstants> {
    if !(a > 0.0 && a <= 5.0) {
        return Err(Error::OutOfRange {
            what: "aperture a",
            value: a,
        });
    }
    let scale = kernels::majorant_scale(a)?;

    // |uv K∘| and |uv| 𝔢₀ are even in u and in v: quadrant × 4.
    let quarter_spec = QuadratureSpec {
        abs_tol: spec.abs_tol / 4.0,
        ..*spec
    };
    let quadrant = Rect::new(0.0, a, 0.0, 1.0);
    let i0_q = integrate_rect(
        &|u: f64, v: f64| (u * v * model::kernel(u, v).unwrap_or(f64::INFINITY)).abs(),
        quadrant,
        &quarter_spec,
        Some(Corner::LowLow),
    )?;
    let i0 = Estimate {
        value: 4.0 * i0_q.value,
        err: 4.0 * i0_q.err_est,
    };

    let eps0_q = integrate_rect(
        &|u: f64, v: f64| {
            (u * v).abs()
                * kernels::majorants(&scale, u, v).map_or(f64::INFINITY, |m| m.eps0)
        },
        quadrant,
        &quarter_spec,
        Some(Corner::LowLow),
    )?;
    let eps_i0 = Estimate {
        value: 4.0 * eps0_q.value,
        err: 4.0 * eps0_q.err_est,
    };

    let double = |r: crate::quadrature::IntegralResult| Estimate {
        value: 2.0 * r.value,
        err: 2.0 * r.err_est,
    };

    let i1 = double(integrate_line(
        &|v: f64| model::kernel(a, v).unwrap().abs(),
        -1.0,
        1.0,
        spec,
    )?);
    let i2 = double(integrate_line(
        &|v: f64| model::kernel_du(a, v).unwrap().abs(),
        -1.0,
        1.0,
        spec,
    )?);
    let i3 = est(homogeneous_tail(
        a,
        |v| model::kernel_duu(a, v).unwrap().abs(),
        |u| model::kernel_duu(u, 1.0).unwrap().abs(),
        -5,
        spec,
    )?);
    let eps_i1 = double(integrate_line(
        &|v: f64| kernels::majorants(&scale, a, v).unwrap().eps0,
        -1.0,
        1.0,
        spec,
    )?);
    let eps_i2 = double(integrate_line(
        &|v: f64| kernels::majorants(&scale, a, v).unwrap().eps_u,
        -1.0,
        1.0,
        spec,
    )?);
    let eps_i3 = est(homogeneous_tail(
        a,
        |v| kernels::majorants(&scale, a, v).unwrap().eps_uu,
        |u| kernels::majorants(&scale, u, 1.0).unwrap().eps_uu,
        -3,
        spec,
    )?);

    let j1 = double(integrate_line(
        &|u: f64| model::kernel(u, 1.0).unwrap().abs(),
        -a,
        a,
        spec,
    )?);
    let j2 = est(homogeneous_tail(
        a,
        |v| model::kernel_dv(a, v).unwrap().abs(),
        |u| model::kernel_dv(u, 1.0).unwrap().abs(),
        -5,
        spec,
    )?);
    let eps_j1 = double(integrate_line(
        &|u: f64| kernels::majorants(&scale, u, 1.0).unwrap().eps0,
        -a,
        a,
        spec,
    )?);
    let eps_j2 = est(homogeneous_tail(
        a,
        |v| kernels::majorants(&scale, a, v).unwrap().eps_v,
        |u| kernels::majorants(&scale, u, 1.0).unwrap().eps_v,
        -3,
        spec,
    )?);

    // Region integrals of the true kernel derivatives outside the box:
    // fund ∖ {|u| ≤ ab, |v| ≤ b²}, integrands even in u and in v.
    let b = MAJORANT_BOX;
    let outer_spec = QuadratureSpec {
        abs_tol: spec.abs_tol / 4.0,
        max_panels: spec.max_panels.max(2_000_000),
        ..*spec
    };
    let region_integral = |f: &dyn Fn(f64, f64) -> f64| -> Result<Estimate> {
        let inner = integrate_rect(
            f,
            Rect::new(0.0, a * b, b * b, PI / 2.0),
            &outer_spec,
            None,
        )?;
        let outer = integrate_rect(
            f,
            Rect::new(a * b, PI, 0.0, PI / 2.0),
            &outer_spec,
            None,
        )?;
        Ok(Estimate {
            // ×2 for v < 0 (evenness), inner already covers ±u via u-evenness ×2
            value: 4.0 * (inner.value + outer.value),
            err: 4.0 * (inner.err_est + outer.err_est),
        })
    };
    let eps_i4 = region_integral(&|u, v| kernels::neumann_kernel_duu(u, v).unwrap().abs())?;
    let eps_j3 = region_integral(&|u, v| kernels::neumann_kernel_dv(u, v).unwrap().abs())?;

    Ok(MajorantConstants {
        a,
        e0: scale.e0,
        e1: scale.e1,
        i0,
        i1,
        i2,
        i3,
        eps_i0,
        eps_i1,
        eps_i2,
        eps_i3,
        eps_i4,
        j0: i0,
        j1,
        j2,
        eps_j0: eps_i0,
        eps_j1,
        eps_j2,
        eps_j3,
    })
}

impl MajorantConstants {
    /// Majorant scale underlying this family (recomputed, cheap).
    pub fn scale(&self) -> MajorantScale {
        MajorantScale {
            a: self.a,
            e0: self.e0,
            e1: self.e1,
        }
    }
}

// ---------------------------------------------------------------------------
// Lemma and corollary right-hand sides
// ---------------------------------------------------------------------------

/// The m-directional coefficient bound: for positive same-parity (m, n) with
/// m ≥ c₁/b,
/// |K̂(m,n)| ≤ c₁³ I₀ n/m² + I₁/c₁ + (I₂+I₃)/c₁²
///            + (1/m²)(c₁⁵ (n/m²) ε_I0 + c₁ ε_I1 + ε_I2 − I₃/b² + ε_I3 log(bm/c₁) + ε_I4).
pub fn lemma_rhs_i(m: i64, n: i64, c1: f64, k: &MajorantConstants) -> Result<f64> {
    let b = MAJORANT_BOX;
    if !(m >= 1 && n >= 1) || (m as f64) < c1 / b {
        return Err(Error::OutOfRange {
            what: "m below c1/b in the m-directional bound",
            value: m as f64,
        });
    }
    let (mf, nf) = (m as f64, n as f64);
    Ok(c1.powi(3) * k.i0.value * nf / (mf * mf)
        + k.i1.value / c1
        + (k.i2.value + k.i3.value) / (c1 * c1)
        + (c1.powi(5) * nf / (mf * mf) * k.eps_i0.value
            + c1 * k.eps_i1.value
            + k.eps_i2.value
            - k.i3.value / (b * b)
            + k.eps_i3.value * (b * mf / c1).ln()
            + k.eps_i4.value)
            / (mf * mf))
}

/// The n-directional coefficient bound: for positive same-parity (m, n) with
/// n ≥ (c₂/b)²,
/// |K̂(m,n)| ≤ c₂³ J₀ m/√n + (J₁+J₂)/c₂²
///            + (1/n)(c₂⁵ ε_J0 m/√n + ε_J1 − J₂/b² + ε_J2 log(b√n/c₂) + ε_J3).
pub fn lemma_rhs_j(m: i64, n: i64, c2: f64, k: &MajorantConstants) -> Result<f64> {
    let b = MAJORANT_BOX;
    if !(m >= 1 && n >= 1) || (n as f64) < (c2 / b) * (c2 / b) {
        return Err(Error::OutOfRange {
            what: "n below (c2/b)^2 in the n-directional bound",
            value: n as f64,
        });
    }
    let (mf, nf) = (m as f64, n as f64);
    let rn = nf.sqrt();
    Ok(c2.powi(3) * k.j0.value * mf / rn
        + (k.j1.value + k.j2.value) / (c2 * c2)
        + (c2.powi(5) * k.eps_j0.value * mf / rn
            + k.eps_j1.value
            - k.j2.value / (b * b)
            + k.eps_j2.value * (b * rn / c2).ln()
            + k.eps_j3.value)
            / nf)
}

/// Rounded-constant bound for m ≥ 4:
/// |K̂(m,n)| ≤ (7168/625) n/m² + 5 + (1/m²)(783/40 + (98304/3125) n/m² + 192 log(m/4)).
pub fn corollary_rhs1(m: i64, n: i64) -> Result<f64> {
    if m < 4 || n < 1 {
        return Err(Error::OutOfRange {
            what: "corollary_rhs1 needs m ≥ 4",
            value: m as f64,
        });
    }
    let (mf, nf) = (m as f64, n as f64);
    Ok(7168.0 / 625.0 * nf / (mf * mf)
        + 5.0
        + (783.0 / 40.0 + 98304.0 / 3125.0 * nf / (mf * mf) + 192.0 * (mf / 4.0).ln())
            / (mf * mf))
}

/// Rounded-constant bound for n ≥ 8:
/// |K̂(m,n)| ≤ (4832√2/3125) m/√n + 245/32 + (1/n)(53/8 + (16384√2/15625) m/√n + 19 log(n/8)).
pub fn corollary_rhs2(m: i64, n: i64) -> Result<f64> {
    if n < 8 || m < 1 {
        return Err(Error::OutOfRange {
            what: "corollary_rhs2 needs n ≥ 8",
            value: n as f64,
        });
    }
    let (mf, nf) = (m as f64, n as f64);
    let s2 = std::f64::consts::SQRT_2;
    Ok(4832.0 * s2 / 3125.0 * mf / nf.sqrt()
        + 245.0 / 32.0
        + (53.0 / 8.0 + 16384.0 * s2 / 15625.0 * mf / nf.sqrt() + 19.0 * (nf / 8.0).ln()) / nf)
}

/// Red-row bound: corollary_rhs1 specialized along n ≤ 25m²/64,
/// 237/25 + (1/m²)(31863/1000 + 192 log(m/4)).
pub fn red_row_bound(m: f64) -> f64 {
    237.0 / 25.0 + (31863.0 / 1000.0 + 192.0 * (m / 4.0).ln()) / (m * m)
}

/// Blue-row bound: corollary_rhs2 specialized along m ≤ (8/5)√n,
/// 38656√2/15625 + 245/32 + (1/n)(131072√2/78125 + 53/8 + 19 log(n/8)).
pub fn blue_row_bound(n: f64) -> f64 {
    let s2 = std::f64::consts::SQRT_2;
    38656.0 * s2 / 15625.0
        + 245.0 / 32.0
        + (131072.0 * s2 / 78125.0 + 53.0 / 8.0 + 19.0 * (n / 8.0).ln()) / n
}

// ---------------------------------------------------------------------------
// Partition
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Red,
    Blue,
    Direct,
}

/// Classify a positive same-parity frequency. Red means the m-directional
/// closed-form bound applies (m ≥ 4, 25m² ≥ 64n ⟺ m ≥ (8/5)√n), blue the
/// n-directional one (n ≥ 8, 25m² ≤ 64n), direct the 11 small frequencies
/// checked by quadrature.
pub fn partition(m: i64, n: i64) -> Result<Region> {
    if m < 1 || n < 1 {
        return Err(Error::OutOfRange {
            what: "partition needs m, n ≥ 1",
            value: m.min(n) as f64,
        });
    }
    if (m - n).rem_euclid(2) != 0 {
        return Err(Error::ParityViolation { m, n });
    }
    if m <= 3 && n <= 7 {
        return Ok(Region::Direct);
    }
    if m >= 4 && 25 * m * m >= 64 * n {
        return Ok(Region::Red);
    }
    if n >= 8 && 25 * m * m <= 64 * n {
        return Ok(Region::Blue);
    }
    // Unreachable for same-parity m, n ≥ 1: if m ≥ 4 fails both red and
    // direct, then 25m² < 64n forces n ≥ 8; if m ≤ 3, non-direct forces
    // n ≥ 8 and 25m² ≤ 225 < 512 ≤ 64n.
    unreachable!("partition coverage: ({m}, {n})")
}

/// The 11 direct frequencies: 1 ≤ m ≤ 3, 1 ≤ n ≤ 7, m ≡ n (mod 2).
pub fn direct_frequencies() -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for m in 1..=3i64 {
        for n in 1..=7i64 {
            if (m - n).rem_euclid(2) == 0 {
                out.push((m, n));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// The certificate
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub name: &'static str,
    pub value: f64,
    pub err: f64,
    pub upper: f64,
    pub lower: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct EndpointCheck {
    pub index: i64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct DirectCheck {
    pub m: i64,
    pub n: i64,
    pub value: f64,
    pub err: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub rounded_bounds: Vec<BoundCheck>,
    pub red_endpoints: Vec<EndpointCheck>,
    pub blue_endpoints: Vec<EndpointCheck>,
    pub direct_points: Vec<DirectCheck>,
    pub sup_direct: f64,
    pub coverage_checked_to: i64,
    pub coverage_pass: bool,
    pub coverage_note: String,
    pub pass: bool,
    pub config_hash: String,
}

fn check(
    name: &'static str,
    e: Estimate,
    lower: Option<f64>,
    upper: f64,
) -> BoundCheck {
    let pass = e.value + e.err < upper && lower.is_none_or(|lo| e.value - e.err > lo);
    BoundCheck {
        name,
        value: e.value,
        err: e.err,
        upper,
        lower,
        pass,
    }
}

/// Exhaustive partition coverage for 1 ≤ m, n ≤ limit (same parity), in
/// exact integer arithmetic.
pub fn coverage_exhaustive(limit: i64) -> bool {
    for m in 1..=limit {
        for n in (if m.rem_euclid(2) == 0 { 2 } else { 1 }..=limit).step_by(2) {
            let direct = m <= 3 && n <= 7;
            let red = m >= 4 && 25 * m * m >= 64 * n;
            let blue = n >= 8 && 25 * m * m <= 64 * n;
            if !(direct || red || blue) {
                return false;
            }
        }
    }
    true
}

/// Assemble the certificate: rounded-constant checks for both aperture
/// paths, the red/blue endpoint evaluations, the 11 direct frequencies from
/// the K̂ table, and the partition coverage check.
///
/// Branch failures set `pass = false` — they never error. Errors are
/// structural only (a direct frequency missing from the supplied table).
pub fn certify_norm(
    khat_direct: &SymbolTable,
    consts_red: &MajorantConstants,
    consts_blue: &MajorantConstants,
) -> Result<Certificate> {
    let four_pi = 4.0 * PI;

    let rounded_bounds = vec![
        check("I0", consts_red.i0, None, 14.0 / 5.0),
        check("I1", consts_red.i1, None, 0.5),
        check("I2", consts_red.i2, None, 1.0),
        check("I3", consts_red.i3, Some(10.5), 11.0),
        check("eps_I0", consts_red.eps_i0, None, 3.0),
        check("eps_I1", consts_red.eps_i1, None, 2.0),
        check("eps_I2", consts_red.eps_i2, None, 7.0),
        check("eps_I3", consts_red.eps_i3, None, 192.0),
        check("eps_I4", consts_red.eps_i4, None, 75.0),
        check("J0", consts_blue.j0, None, 151.0 / 100.0),
        check("J1", consts_blue.j1, None, 9.0 / 5.0),
        check("J2", consts_blue.j2, Some(7.9), 8.0),
        check("eps_J0", consts_blue.eps_j0, None, 0.8),
        check("eps_J1", consts_blue.eps_j1, None, 2.0),
        check("eps_J2", consts_blue.eps_j2, None, 38.0),
        check("eps_J3", consts_blue.eps_j3, None, 54.0),
    ];

    let red_endpoints: Vec<EndpointCheck> = [4i64, 5, 6]
        .iter()
        .map(|&m| {
            let bound = red_row_bound(m as f64);
            EndpointCheck {
                index: m,
                bound,
                pass: bound < four_pi,
            }
        })
        .collect();

    let blue_endpoints: Vec<EndpointCheck> = (8i64..=14)
        .map(|n| {
            let bound = blue_row_bound(n as f64);
            EndpointCheck {
                index: n,
                bound,
                pass: bound < four_pi,
            }
        })
        .collect();

    let mut direct_points = Vec::new();
    let mut sup_direct = 0.0f64;
    for (m, n) in direct_frequencies() {
        let f = Freq::new(m, n)?;
        let value = khat_direct
            .get_real(f)
            .ok_or(Error::MissingSymbol { m, n })?;
        let err = khat_direct.err(f).unwrap_or(0.0);
        sup_direct = sup_direct.max(value.abs());
        direct_points.push(DirectCheck {
            m,
            n,
            value,
            err,
            pass: value.abs() + err < four_pi,
        });
    }

    let coverage_checked_to = 10_000i64;
    let coverage_pass = coverage_exhaustive(coverage_checked_to);
    let coverage_note = format!(
        "exhaustive for 1 <= m, n <= {coverage_checked_to}; beyond, the red condition \
         25m^2 >= 64n and its complement n > 25m^2/64 >= 25*16/64 > 8 cover every \
         same-parity pair with m >= 4, and m <= 3 < (8/5)sqrt(n) for n >= 8"
    );

    let pass = rounded_bounds.iter().all(|b| b.pass)
        && red_endpoints.iter().all(|e| e.pass)
        && blue_endpoints.iter().all(|e| e.pass)
        && direct_points.iter().all(|d| d.pass)
        && coverage_pass;

    let config_hash = fnv1a64(&format!(
        "certificate;khat={};a_red={};a_blue={}",
        khat_direct.config_hash(),
        consts_red.a,
        consts_blue.a
    ));

    Ok(Certificate {
        rounded_bounds,
        red_endpoints,
        blue_endpoints,
        direct_points,
        sup_direct,
        coverage_checked_to,
        coverage_pass,
        coverage_note,
        pass,
        config_hash,
    })
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let bounds = array(self.rounded_bounds.iter().map(|b| {
            let mut o = JsonObject::new()
                .str("name", b.name)
                .num("value", b.value)
                .num("err", b.err)
                .num("upper", b.upper);
            if let Some(lo) = b.lower {
                o = o.num("lower", lo);
            }
            o.bool("pass", b.pass).finish()
        }));
        let reds = array(self.red_endpoints.iter().map(|e| {
            JsonObject::new()
                .int("m", e.index)
                .num("bound", e.bound)
                .num("margin", 4.0 * PI - e.bound)
                .bool("pass", e.pass)
                .finish()
        }));
        let blues = array(self.blue_endpoints.iter().map(|e| {
            JsonObject::new()
                .int("n", e.index)
                .num("bound", e.bound)
                .num("margin", 4.0 * PI - e.bound)
                .bool("pass", e.pass)
                .finish()
        }));
        let directs = array(self.direct_points.iter().map(|d| {
            JsonObject::new()
                .int("m", d.m)
                .int("n", d.n)
                .num("value", d.value)
                .num("err", d.err)
                .bool("pass", d.pass)
                .finish()
        }));
        JsonObject::new()
            .str("certifies", "sup |khat| < 4*pi over the dual lattice")
            .num("four_pi", 4.0 * PI)
            .raw("rounded_constant_bounds", &bounds)
            .raw("red_endpoints", &reds)
            .raw("blue_endpoints", &blues)
            .raw("direct_points", &directs)
            .num("sup_direct", self.sup_direct)
            .int("coverage_checked_to", self.coverage_checked_to)
            .bool("coverage_pass", self.coverage_pass)
            .str("coverage_note", &self.coverage_note)
            .bool("pass", self.pass)
            .str("config_hash", &self.config_hash)
            .finish_pretty(0)
    }

    /// Human-readable margin table.
    pub fn report(&self) -> String {
        let mut out = String::new();
        out.push_str("rounded constant bounds:\n");
        for b in &self.rounded_bounds {
            let lo = b
                .lower
                .map(|l| format!("{l:.4} < "))
                .unwrap_or_default();
            out.push_str(&format!(
                "  {:8} = {:>12.8} (err {:.1e})  vs {}{:.4}   {}\n",
                b.name,
                b.value,
                b.err,
                lo,
                b.upper,
                if b.pass { "ok" } else { "FAIL" }
            ));
        }
        out.push_str("red endpoints (bound < 4π required at m = 5, 6):\n");
        for e in &self.red_endpoints {
            out.push_str(&format!(
                "  m = {}: {:>10.6}  margin {:+.6}  {}\n",
                e.index,
                e.bound,
                4.0 * PI - e.bound,
                if e.pass { "ok" } else { "FAIL" }
            ));
        }
        out.push_str("blue endpoints (bound < 4π required at n = 13, 14):\n");
        for e in &self.blue_endpoints {
            out.push_str(&format!(
                "  n = {}: {:>10.6}  margin {:+.6}  {}\n",
                e.index,
                e.bound,
                4.0 * PI - e.bound,
                if e.pass { "ok" } else { "FAIL" }
            ));
        }
        out.push_str("direct frequencies (|K̂| < 4π, observed < 5.8):\n");
        for d in &self.direct_points {
            out.push_str(&format!(
                "  ({}, {}): {:>12.8} ± {:.1e}  {}\n",
                d.m,
                d.n,
                d.value,
                d.err,
                if d.pass { "ok" } else { "FAIL" }
            ));
        }
        out.push_str(&format!(
            "sup direct |K̂| = {:.6}\ncoverage to {}: {}\npass: {}\n",
            self.sup_direct,
            self.coverage_checked_to,
            if self.coverage_pass { "ok" } else { "FAIL" },
            self.pass
        ));
        out
    }
}
