//! Adaptive quadrature tuned to the anisotropic kernel geometry.
//!
//! Panels are tensor Gauss–Legendre rules with an embedded lower-order
//! estimate; a global heap splits the worst panel until the error budget is
//! met. When a singular corner is flagged, refinement toward that corner is
//! graded anisotropically — the corner child keeps u-extent ∝ δ and
//! v-extent ∝ δ² — matching the ‖(u,v)‖ = max(|u|, |v|^{1/2}) geometry of the
//! kernels.
//!
//! Unbounded integrals of anisotropically homogeneous functions are never
//! truncated: [`homogeneous_tail`] reduces them exactly to two line
//! integrals.

use crate::error::{Error, Result};
use crate::kernels;
use crate::torus::TorusPoint;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// Specification and results
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    /// Absolute error budget for one integral.
    pub abs_tol: f64,
    /// Panel recursion limit (depth of the splitting tree).
    pub max_depth: u32,
    /// Gauss nodes per axis per panel; the embedded estimate uses two fewer.
    pub panel_order: usize,
    /// Anisotropic grading ratios toward a singular corner: the corner child
    /// keeps 1/u_div of the u-extent and 1/v_div of the v-extent.
    pub grading: (u32, u32),
    /// Hard cap on the number of panels before giving up.
    pub max_panels: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-9,
            max_depth: 40,
            panel_order: 7,
            grading: (2, 4),
            max_panels: 400_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadratureSpec {
            abs_tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.abs_tol <= 0.0 || self.abs_tol.is_nan() {
            return Err(Error::OutOfRange {
                what: "abs_tol",
                value: self.abs_tol,
            });
        }
        if self.panel_order < 3 {
            return Err(Error::OutOfRange {
                what: "panel_order",
                value: self.panel_order as f64,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IntegralResult {
    pub value: f64,
    pub err_est: f64,
    pub panels: u64,
}

impl IntegralResult {
    fn zero() -> Self {
        IntegralResult {
            value: 0.0,
            err_est: 0.0,
            panels: 0,
        }
    }

    fn merge(self, other: IntegralResult) -> IntegralResult {
        IntegralResult {
            value: self.value + other.value,
            err_est: self.err_est + other.err_est,
            panels: self.panels + other.panels,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Rect {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Rect {
        Rect { u0, u1, v0, v1 }
    }

    /// The fundamental domain [−π, π] × [−π/2, π/2].
    pub fn fundamental() -> Rect {
        Rect::new(-PI, PI, -PI / 2.0, PI / 2.0)
    }
}

/// Which corner of a rectangle carries the singularity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corner {
    LowLow,
    LowHigh,
    HighLow,
    HighHigh,
}

// ---------------------------------------------------------------------------
// Gauss–Legendre rules
// ---------------------------------------------------------------------------

/// Nodes and weights on [−1, 1] by Newton iteration on the Legendre
/// recurrence.
pub fn gauss_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = -p1 / dp;
            x += dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

struct PanelRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl PanelRule {
    fn new(order: usize) -> PanelRule {
        let (nodes, weights) = gauss_rule(order);
        PanelRule { nodes, weights }
    }

    fn on_rect<F: Fn(f64, f64) -> f64 + ?Sized>(&self, f: &F, rect: Rect) -> f64 {
        let cu = 0.5 * (rect.u0 + rect.u1);
        let hu = 0.5 * (rect.u1 - rect.u0);
        let cv = 0.5 * (rect.v0 + rect.v1);
        let hv = 0.5 * (rect.v1 - rect.v0);
        let mut acc = 0.0;
        for (i, &xu) in self.nodes.iter().enumerate() {
            let u = cu + hu * xu;
            let wu = self.weights[i];
            for (j, &xv) in self.nodes.iter().enumerate() {
                acc += wu * self.weights[j] * f(u, cv + hv * xv);
            }
        }
        acc * hu * hv
    }

    fn on_interval<F: Fn(f64) -> f64 + ?Sized>(&self, f: &F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }
}

// ---------------------------------------------------------------------------
// 2D adaptive integration
// ---------------------------------------------------------------------------

/// A panel carries the two-level estimate: `value` is the sum of the rule
/// applied to its four (grading-aware) children, `err` the disagreement with
/// the rule on the whole panel. The children's coarse values are kept so a
/// split reuses them.
struct Panel {
    value: f64,
    err: f64,
    depth: u32,
    seq: u64,
    kids: [(Rect, Option<Corner>, f64); 4],
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.seq == other.seq
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap by error; ties broken by insertion order for determinism
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(other.seq.cmp(&self.seq))
    }
}

#[allow(clippy::too_many_arguments)]
fn eval_panel<F: Fn(f64, f64) -> f64 + ?Sized>(
    f: &F,
    rect: Rect,
    rule: &PanelRule,
    corner: Option<Corner>,
    coarse: f64,
    grading: (u32, u32),
    depth: u32,
    seq: u64,
) -> Panel {
    let kid_geo = split_rect(rect, corner, grading);
    let mut kids = [(Rect::new(0.0, 0.0, 0.0, 0.0), None, 0.0); 4];
    let mut fine = 0.0;
    for (slot, (kr, kc)) in kids.iter_mut().zip(kid_geo) {
        let kv = rule.on_rect(f, kr);
        fine += kv;
        *slot = (kr, kc, kv);
    }
    let mut err = (coarse - fine).abs();
    let mut value = fine;
    if !coarse.is_finite() || !fine.is_finite() {
        value = 0.0;
        err = f64::INFINITY;
    } else if corner.is_some() {
        // No rule sees across the corner singularity; pinning the corner
        // panel's error to half its own contribution keeps it refining until
        // that contribution fits the budget.
        err = err.max(0.5 * fine.abs());
    }
    Panel {
        value,
        err,
        depth,
        seq,
        kids,
    }
}

fn split_rect(
    rect: Rect,
    corner: Option<Corner>,
    grading: (u32, u32),
) -> [(Rect, Option<Corner>); 4] {
    let (su, sv) = match corner {
        None => (0.5 * (rect.u0 + rect.u1), 0.5 * (rect.v0 + rect.v1)),
        Some(c) => {
            let fu = 1.0 / grading.0 as f64;
            let fv = 1.0 / grading.1 as f64;
            let lu = rect.u1 - rect.u0;
            let lv = rect.v1 - rect.v0;
            match c {
                Corner::LowLow => (rect.u0 + fu * lu, rect.v0 + fv * lv),
                Corner::LowHigh => (rect.u0 + fu * lu, rect.v1 - fv * lv),
                Corner::HighLow => (rect.u1 - fu * lu, rect.v0 + fv * lv),
                Corner::HighHigh => (rect.u1 - fu * lu, rect.v1 - fv * lv),
            }
        }
    };
    let quads = [
        Rect::new(rect.u0, su, rect.v0, sv),
        Rect::new(su, rect.u1, rect.v0, sv),
        Rect::new(rect.u0, su, sv, rect.v1),
        Rect::new(su, rect.u1, sv, rect.v1),
    ];
    let child_corner = |r: &Rect| -> Option<Corner> {
        let c = corner?;
        let (cu, cv) = match c {
            Corner::LowLow => (rect.u0, rect.v0),
            Corner::LowHigh => (rect.u0, rect.v1),
            Corner::HighLow => (rect.u1, rect.v0),
            Corner::HighHigh => (rect.u1, rect.v1),
        };
        if (r.u0 == cu || r.u1 == cu) && (r.v0 == cv || r.v1 == cv) {
            Some(c)
        } else {
            None
        }
    };
    [
        (quads[0], child_corner(&quads[0])),
        (quads[1], child_corner(&quads[1])),
        (quads[2], child_corner(&quads[2])),
        (quads[3], child_corner(&quads[3])),
    ]
}

/// Adaptive integral of `f` over `rect`; `singular_corner` flags a corner the
/// integrand blows up at (the flagged corner is approached with graded
/// anisotropic panels and never evaluated).
pub fn integrate_rect<F: Fn(f64, f64) -> f64 + ?Sized>(
    f: &F,
    rect: Rect,
    spec: &QuadratureSpec,
    singular_corner: Option<Corner>,
) -> Result<IntegralResult> {
    spec.validate()?;
    let rule = PanelRule::new(spec.panel_order);
    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut seq = 0u64;
    let mut live_err = 0.0f64;
    let mut frozen_err = 0.0f64;

    let root_coarse = rule.on_rect(f, rect);
    let root = eval_panel(
        f,
        rect,
        &rule,
        singular_corner,
        root_coarse,
        spec.grading,
        0,
        seq,
    );
    seq += 1;
    live_err += root.err;
    heap.push(root);

    loop {
        if live_err + frozen_err <= spec.abs_tol {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        live_err -= worst.err;
        if worst.depth >= spec.max_depth {
            frozen_err += worst.err;
            frozen.push(worst);
            continue;
        }
        if seq + 4 > spec.max_panels {
            let total: f64 = heap.iter().map(|p| p.err).sum::<f64>() + worst.err + frozen_err;
            return Err(Error::ToleranceNotMet {
                err_est: total,
                abs_tol: spec.abs_tol,
                panels: seq,
            });
        }
        for (kid_rect, kid_corner, kid_coarse) in worst.kids {
            let child = eval_panel(
                f,
                kid_rect,
                &rule,
                kid_corner,
                kid_coarse,
                spec.grading,
                worst.depth + 1,
                seq,
            );
            seq += 1;
            live_err += child.err;
            heap.push(child);
        }
    }

    let mut leaves: Vec<Panel> = heap.into_vec();
    leaves.extend(frozen);
    leaves.sort_by_key(|p| p.seq);
    let value: f64 = leaves.iter().map(|p| p.value).sum();
    let err_est: f64 = leaves.iter().map(|p| p.err).sum();
    if !value.is_finite() {
        return Err(Error::NonFinite {
            what: "integral value",
        });
    }
    if err_est > spec.abs_tol {
        return Err(Error::ToleranceNotMet {
            err_est,
            abs_tol: spec.abs_tol,
            panels: leaves.len() as u64,
        });
    }
    Ok(IntegralResult {
        value,
        err_est,
        panels: leaves.len() as u64,
    })
}

/// Integral over the fundamental domain of an integrand singular (or sharply
/// peaked) at the origin: four quadrants, each graded into the origin corner.
pub fn integrate_fund_origin<F: Fn(f64, f64) -> f64>(
    f: &F,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let quarter = QuadratureSpec {
        abs_tol: spec.abs_tol / 4.0,
        ..*spec
    };
    let mut acc = IntegralResult::zero();
    for (rect, corner) in [
        (Rect::new(0.0, PI, 0.0, PI / 2.0), Corner::LowLow),
        (Rect::new(-PI, 0.0, 0.0, PI / 2.0), Corner::HighLow),
        (Rect::new(0.0, PI, -PI / 2.0, 0.0), Corner::LowHigh),
        (Rect::new(-PI, 0.0, -PI / 2.0, 0.0), Corner::HighHigh),
    ] {
        acc = acc.merge(integrate_rect(f, rect, &quarter, Some(corner))?);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// 1D adaptive integration (line integrals for the constant computations)
// ---------------------------------------------------------------------------

struct Segment {
    value: f64,
    err: f64,
    depth: u32,
    seq: u64,
    kids: [(f64, f64, f64); 2], // (a, b, coarse)
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.seq == other.seq
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(other.seq.cmp(&self.seq))
    }
}

fn eval_segment<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    rule: &PanelRule,
    coarse: f64,
    depth: u32,
    seq: u64,
) -> Segment {
    let mid = 0.5 * (a + b);
    let left = rule.on_interval(f, a, mid);
    let right = rule.on_interval(f, mid, b);
    let fine = left + right;
    let (value, err) = if coarse.is_finite() && fine.is_finite() {
        (fine, (coarse - fine).abs())
    } else {
        (0.0, f64::INFINITY)
    };
    Segment {
        value,
        err,
        depth,
        seq,
        kids: [(a, mid, left), (mid, b, right)],
    }
}

/// Adaptive 1D integral on [a, b].
pub fn integrate_line<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    spec.validate()?;
    let rule = PanelRule::new(spec.panel_order);
    let mut heap: BinaryHeap<Segment> = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut seq = 0u64;
    let mut live_err = 0.0f64;
    let mut frozen_err = 0.0f64;

    let root_coarse = rule.on_interval(f, a, b);
    let root = eval_segment(f, a, b, &rule, root_coarse, 0, seq);
    seq += 1;
    live_err += root.err;
    heap.push(root);

    loop {
        if live_err + frozen_err <= spec.abs_tol {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        live_err -= worst.err;
        if worst.depth >= spec.max_depth || seq + 2 > spec.max_panels {
            frozen_err += worst.err;
            frozen.push(worst);
            if seq + 2 > spec.max_panels {
                break;
            }
            continue;
        }
        for (ka, kb, kcoarse) in worst.kids {
            let child = eval_segment(f, ka, kb, &rule, kcoarse, worst.depth + 1, seq);
            seq += 1;
            live_err += child.err;
            heap.push(child);
        }
    }

    let mut leaves: Vec<Segment> = heap.into_vec();
    leaves.extend(frozen);
    leaves.sort_by_key(|s| s.seq);
    let value: f64 = leaves.iter().map(|s| s.value).sum();
    let err_est: f64 = leaves.iter().map(|s| s.err).sum();
    if !value.is_finite() {
        return Err(Error::NonFinite {
            what: "integral value",
        });
    }
    if err_est > spec.abs_tol {
        return Err(Error::ToleranceNotMet {
            err_est,
            abs_tol: spec.abs_tol,
            panels: leaves.len() as u64,
        });
    }
    Ok(IntegralResult {
        value,
        err_est,
        panels: leaves.len() as u64,
    })
}

// ---------------------------------------------------------------------------
// The named integrals
// ---------------------------------------------------------------------------

/// Fourier coefficient of the singular boundary kernel,
/// K̂(m, n) = −∬_fund K(u,v) sin(mu) sin(nv) du dv.
///
/// Axis frequencies vanish exactly by oddness; otherwise the integrand is
/// even in u and in v, so one quarter-domain integral with the origin corner
/// flagged suffices, reflected back through the sign symmetries
/// K̂(±m, ±n) = (±)(±) K̂(m, n).
pub fn khat(m: i64, n: i64, spec: &QuadratureSpec) -> Result<IntegralResult> {
    if (m - n).rem_euclid(2) != 0 {
        return Err(Error::ParityViolation { m, n });
    }
    if m == 0 || n == 0 {
        return Ok(IntegralResult::zero());
    }
    let (ma, na) = (m.unsigned_abs() as f64, n.unsigned_abs() as f64);
    let sign = if (m < 0) ^ (n < 0) { -1.0 } else { 1.0 };
    let quarter = QuadratureSpec {
        abs_tol: spec.abs_tol / 4.0,
        ..*spec
    };
    let integrand = |u: f64, v: f64| {
        let k = kernels::neumann_kernel(u, v).map_or(f64::INFINITY, |x| x);
        k * (ma * u).sin() * (na * v).sin()
    };
    let quarter_result = integrate_rect(
        &integrand,
        Rect::new(0.0, PI, 0.0, PI / 2.0),
        &quarter,
        Some(Corner::LowLow),
    )?;
    Ok(IntegralResult {
        value: -4.0 * sign * quarter_result.value,
        err_est: 4.0 * quarter_result.err_est,
        panels: quarter_result.panels,
    })
}

/// The singular convolution 𝒩F at a boundary point, computed in subtracted
/// form as an absolutely convergent integral:
/// (1/8π) ∬ [F(p − x) − F(p)] K(x) dx.
///
/// `f` must be a C¹ function on ℝ²/Λ given analytically (Λ-periodic closure).
pub fn pv_apply_n<F: Fn(f64, f64) -> f64>(
    f: &F,
    p: TorusPoint,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let fp = f(p.u(), p.v());
    let integrand = |u: f64, v: f64| {
        let k = kernels::neumann_kernel(u, v).map_or(f64::INFINITY, |x| x);
        (f(p.u() - u, p.v() - v) - fp) * k
    };
    let r = integrate_fund_origin(&integrand, spec)?;
    Ok(IntegralResult {
        value: r.value / (8.0 * PI),
        err_est: r.err_est / (8.0 * PI),
        panels: r.panels,
    })
}

/// (1/8π) ∬_fund ∂ₜk(t, u, v) du dv, the kernel mass whose t → 0⁺ limit is
/// −1/2. The integrand is even under (u,v) ↦ (−u,−v), so two graded
/// half-domain quadrants suffice.
pub fn dkdt_mass(t: f64, spec: &QuadratureSpec) -> Result<IntegralResult> {
    if !(t > 0.0 && t <= kernels::COLLAR_MAX * 4.0) {
        return Err(Error::OutOfRange {
            what: "collar parameter t",
            value: t,
        });
    }
    let integrand =
        |u: f64, v: f64| kernels::layer_kernel_dt(t, u, v).map_or(f64::INFINITY, |x| x);
    let half = QuadratureSpec {
        abs_tol: spec.abs_tol / 2.0,
        ..*spec
    };
    let upper = integrate_rect(
        &integrand,
        Rect::new(0.0, PI, 0.0, PI / 2.0),
        &half,
        Some(Corner::LowLow),
    )?;
    let lower = integrate_rect(
        &integrand,
        Rect::new(0.0, PI, -PI / 2.0, 0.0),
        &half,
        Some(Corner::LowHigh),
    )?;
    let merged = upper.merge(lower);
    Ok(IntegralResult {
        value: 2.0 * merged.value / (8.0 * PI),
        err_est: 2.0 * merged.err_est / (8.0 * PI),
        panels: merged.panels,
    })
}

/// Exact reduction of ∬ over the unbounded region ‖(u/a, v)‖ ≥ 1 of a
/// nonnegative anisotropically homogeneous integrand to line integrals.
///
/// With B := 2a ∫_{−1}^{1} h(a, v) dv + 4 ∫_{−a}^{a} h(u, 1) du, the shell
/// derivative of ∬_{1<‖(u/a,v)‖≤T} h equals B·T^{p+2} for homogeneity
/// degree p, so
///
/// * degree −5: ∬_{‖(u/a,v)‖≥1} h = B/2,
/// * degree −3: the tail over R < ‖·‖ ≤ b grows as B log(b/R); B itself
///   (the log-slope) is returned.
pub fn homogeneous_tail<Fu, Fv>(
    a: f64,
    h_at_u_edge: Fu,
    h_at_v_edge: Fv,
    degree: i32,
    spec: &QuadratureSpec,
) -> Result<IntegralResult>
where
    Fu: Fn(f64) -> f64, // v ↦ h(a, v) on |v| ≤ 1
    Fv: Fn(f64) -> f64, // u ↦ h(u, 1) on |u| ≤ a
{
    if degree != -5 && degree != -3 {
        return Err(Error::OutOfRange {
            what: "homogeneity degree",
            value: degree as f64,
        });
    }
    let half = QuadratureSpec {
        abs_tol: spec.abs_tol / 2.0,
        ..*spec
    };
    let side_u = integrate_line(&h_at_u_edge, -1.0, 1.0, &half)?;
    let side_v = integrate_line(&h_at_v_edge, -a, a, &half)?;
    let b_slope = 2.0 * a * side_u.value + 4.0 * side_v.value;
    let b_err = 2.0 * a * side_u.err_est + 4.0 * side_v.err_est;
    let scale = if degree == -5 { 0.5 } else { 1.0 };
    Ok(IntegralResult {
        value: scale * b_slope,
        err_est: scale * b_err,
        panels: side_u.panels + side_v.panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::model;

    #[test]
    fn unit_square_constant() {
        let r = integrate_rect(
            &|_, _| 1.0,
            Rect::new(0.0, 1.0, 0.0, 1.0),
            &QuadratureSpec::default(),
            None,
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn smooth_product_integral() {
        // ∫∫ sin u cos v over [0,π]×[0,π/2] = 2·1 = 2
        let r = integrate_rect(
            &|u: f64, v: f64| u.sin() * v.cos(),
            Rect::new(0.0, PI, 0.0, PI / 2.0),
            &QuadratureSpec::default(),
            None,
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn collar_kernel_mass_is_stable_under_tightening() {
        let f = |u: f64, v: f64| kernels::layer_kernel(0.05, u, v).unwrap();
        let coarse = integrate_fund_origin(&f, &QuadratureSpec::with_tol(1e-7)).unwrap();
        let fine = integrate_fund_origin(&f, &QuadratureSpec::with_tol(5e-8)).unwrap();
        assert!(coarse.value.is_finite());
        assert!(
            (coarse.value - fine.value).abs() <= coarse.err_est + fine.err_est,
            "{} vs {}",
            coarse.value,
            fine.value
        );
    }

    #[test]
    fn anisotropic_tail_integrability_threshold() {
        // (1 + |u| + |v|^{1/2})^{−7/2} has a finite plane integral; the
        // exponent −3 diverges logarithmically on growing boxes.
        let spec = QuadratureSpec::with_tol(1e-5);
        let f72 = |u: f64, v: f64| (1.0 + u.abs() + v.abs().sqrt()).powf(-3.5);
        let f3 = |u: f64, v: f64| (1.0 + u.abs() + v.abs().sqrt()).powi(-3);
        let box_int = |f: &dyn Fn(f64, f64) -> f64, l: f64| {
            integrate_rect(f, Rect::new(-l, l, -l * l, l * l), &spec, None)
                .unwrap()
                .value
        };
        let small = integrate_rect(&f72, Rect::fundamental(), &spec, None).unwrap();
        assert!(small.value.is_finite() && small.value > 0.0);

        // Tail beyond the norm ball of radius L scales like L^{−1/2}, so the
        // increments of the convergent integral decay geometrically …
        let conv: Vec<f64> = [4.0, 16.0, 64.0]
            .iter()
            .map(|&l| box_int(&f72, l))
            .collect();
        let c1 = conv[1] - conv[0];
        let c2 = conv[2] - conv[1];
        assert!(c2 < 0.75 * c1, "tail increments must decay: {c1} vs {c2}");

        // … while the critical exponent gains a fixed log-slope per 4× step.
        let div: Vec<f64> = [4.0, 16.0, 64.0].iter().map(|&l| box_int(&f3, l)).collect();
        let d1 = div[1] - div[0];
        let d2 = div[2] - div[1];
        assert!(d1 > 1.0 && d2 > 0.95 * d1, "log growth: {d1}, {d2}");
    }

    #[test]
    fn khat_axis_zero_parity_and_signs() {
        let spec = QuadratureSpec::with_tol(1e-7);
        let z = khat(2, 0, &spec).unwrap();
        assert_eq!(z.value, 0.0);
        assert!(khat(1, 2, &spec).is_err());

        let base = khat(1, 1, &spec).unwrap();
        assert!(base.err_est < 1e-6);
        assert!(base.value.abs() < 5.8);
        let flip_u = khat(-1, 1, &spec).unwrap();
        assert_eq!(flip_u.value, -base.value);
        let flip_v = khat(1, -1, &spec).unwrap();
        assert_eq!(flip_v.value, -base.value);
        let flip_both = khat(-1, -1, &spec).unwrap();
        assert_eq!(flip_both.value, base.value);
    }

    #[test]
    fn khat_tolerance_halving_stays_within_error_estimate() {
        for (m, n) in [(1, 1), (3, 5), (2, 6)] {
            let coarse = khat(m, n, &QuadratureSpec::with_tol(2e-7)).unwrap();
            let fine = khat(m, n, &QuadratureSpec::with_tol(1e-7)).unwrap();
            assert!(
                (coarse.value - fine.value).abs() <= coarse.err_est + fine.err_est,
                "({m},{n}): {} vs {}",
                coarse.value,
                fine.value
            );
        }
    }

    #[test]
    fn khat_reproducible_bit_for_bit() {
        let spec = QuadratureSpec::with_tol(1e-7);
        let a = khat(3, 1, &spec).unwrap();
        let b = khat(3, 1, &spec).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.panels, b.panels);
    }

    #[test]
    fn pv_of_constant_vanishes() {
        let p = TorusPoint::reduce(0.3, 0.2).unwrap();
        let r = pv_apply_n(&|_, _| 1.0, p, &QuadratureSpec::with_tol(1e-9)).unwrap();
        assert!(r.value.abs() < 1e-9);
    }

    #[test]
    fn pv_matches_multiplier_action_on_single_mode() {
        let spec = QuadratureSpec::with_tol(1e-8);
        let k11 = khat(1, 1, &spec).unwrap();
        for (pu, pv) in [(0.0, 0.0), (0.7, 0.3), (-1.1, 0.4)] {
            let p = TorusPoint::reduce(pu, pv).unwrap();
            let r = pv_apply_n(&|u, v| (u + v).sin(), p, &spec).unwrap();
            let expect = k11.value / (8.0 * PI) * (pu + pv).sin();
            assert!(
                (r.value - expect).abs() < 1e-6,
                "at ({pu}, {pv}): {} vs {expect}",
                r.value
            );
        }
    }

    #[test]
    fn pv_agrees_with_epsilon_excision_for_odd_data() {
        // F odd under x ↦ −x with F(p) = 0 at p = 0: the subtracted form
        // equals the symmetric principal-value limit over shrinking boxes.
        let f = |u: f64, v: f64| (u + 2.0 * v).sin();
        let p = TorusPoint::reduce(0.0, 0.0).unwrap();
        let spec = QuadratureSpec::with_tol(1e-8);
        let subtracted = pv_apply_n(&f, p, &spec).unwrap().value;

        let excised = |eps: f64| {
            let g = |u: f64, v: f64| {
                f(-u, -v) * kernels::neumann_kernel(u, v).map_or(f64::INFINITY, |x| x)
            };
            let loose = QuadratureSpec::with_tol(1e-6);
            let mut total = 0.0;
            // fundamental domain minus [−ε, ε] × [−ε², ε²]
            for rect in [
                Rect::new(-PI, -eps, -PI / 2.0, PI / 2.0),
                Rect::new(eps, PI, -PI / 2.0, PI / 2.0),
                Rect::new(-eps, eps, eps * eps, PI / 2.0),
                Rect::new(-eps, eps, -PI / 2.0, -eps * eps),
            ] {
                total += integrate_rect(&g, rect, &loose, None).unwrap().value;
            }
            total / (8.0 * PI)
        };
        let e1 = excised(0.2);
        let e2 = excised(0.05);
        assert!((e2 - subtracted).abs() < (e1 - subtracted).abs() + 1e-9);
        assert!((e2 - subtracted).abs() < 2e-3, "{e2} vs {subtracted}");
    }

    #[test]
    fn tail_reduction_reproduces_closed_forms() {
        let spec = QuadratureSpec::with_tol(1e-10);
        // I₃ at aperture 2: ∬_{‖(u/2,v)‖≥1} |∂²K∘/∂u²| = 6 + 4√2 − 12/(5√5)
        let i3 = homogeneous_tail(
            2.0,
            |v| model::kernel_duu(2.0, v).unwrap().abs(),
            |u| model::kernel_duu(u, 1.0).unwrap().abs(),
            -5,
            &spec,
        )
        .unwrap();
        let i3_exact = 6.0 + 4.0 * 2f64.sqrt() - 12.0 / (5.0 * 5f64.sqrt());
        assert!(
            (i3.value - i3_exact).abs() < 1e-8,
            "{} vs {i3_exact}",
            i3.value
        );

        // J₂ at aperture 1: ∬_{‖(u,v)‖≥1} |∂K∘/∂v| = 32/(3√3) + 4/√5
        let j2 = homogeneous_tail(
            1.0,
            |v| model::kernel_dv(1.0, v).unwrap().abs(),
            |u| model::kernel_dv(u, 1.0).unwrap().abs(),
            -5,
            &spec,
        )
        .unwrap();
        let j2_exact = 32.0 / (3.0 * 3f64.sqrt()) + 4.0 / 5f64.sqrt();
        assert!(
            (j2.value - j2_exact).abs() < 1e-8,
            "{} vs {j2_exact}",
            j2.value
        );

        // linearity
        let scaled = homogeneous_tail(
            1.0,
            |v| 3.0 * model::kernel_dv(1.0, v).unwrap().abs(),
            |u| 3.0 * model::kernel_dv(u, 1.0).unwrap().abs(),
            -5,
            &spec,
        )
        .unwrap();
        assert!((scaled.value - 3.0 * j2.value).abs() < 1e-8);

        assert!(homogeneous_tail(1.0, |_| 0.0, |_| 0.0, -4, &spec).is_err());
    }

    #[test]
    fn tail_reduction_against_direct_quadrature_on_shell() {
        // Cross-check the degree −5 reduction against direct integration over
        // 1 < ‖(u/a, v)‖ ≤ T for a large box (truncation error ~ 1/T²).
        let a = 2.0;
        let spec = QuadratureSpec::with_tol(1e-8);
        let exact = homogeneous_tail(
            a,
            |v| model::kernel_duu(a, v).unwrap().abs(),
            |u| model::kernel_duu(u, 1.0).unwrap().abs(),
            -5,
            &spec,
        )
        .unwrap()
        .value;
        // box(T) ∖ box(1) in the scaled norm decomposes into four rectangles
        let f = |u: f64, v: f64| model::kernel_duu(u, v).unwrap().abs();
        let t_outer: f64 = 12.0;
        let t2 = t_outer * t_outer;
        let loose = QuadratureSpec::with_tol(1e-5);
        let mut direct = 0.0;
        for rect in [
            Rect::new(-a * t_outer, -a, -t2, t2),
            Rect::new(a, a * t_outer, -t2, t2),
            Rect::new(-a, a, 1.0, t2),
            Rect::new(-a, a, -t2, -1.0),
        ] {
            direct += integrate_rect(&f, rect, &loose, None).unwrap().value;
        }
        assert!(
            (direct - exact).abs() < 0.1,
            "direct {direct} vs reduced {exact}"
        );
    }

    #[test]
    fn dkdt_mass_limit_toward_minus_half() {
        let spec = QuadratureSpec::with_tol(1e-7);
        let m1 = dkdt_mass(0.1, &spec).unwrap();
        assert!((m1.value + 0.5).abs() < 0.15, "{}", m1.value);
        let m2 = dkdt_mass(0.05, &spec).unwrap();
        assert!(
            (m2.value + 0.5).abs() < (m1.value + 0.5).abs(),
            "{} vs {}",
            m2.value,
            m1.value
        );
    }
}
