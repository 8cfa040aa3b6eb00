//! The closed-form boundary-Yamabe conformal factor
//! u = ₂F₁(½, ½; 1; |ζ²|²) / ₂F₁(½, ½; 1; ½) and its residual checks.
//!
//! ₂F₁(½, ½; 1; ·) is evaluated from its defining series for x ≤ ½ and from
//! the c = a+b logarithmic connection formula in 1−x beyond; both branches
//! converge geometrically with ratio ≤ ½. Derivatives are term-wise series,
//! never finite differences, so the ODE residuals on the analytic branch sit
//! at rounding level. In the interior coordinates the factor depends only on
//! the polar radius, u(r) = F(cos²(r/2)) up to normalization, and solves
//! u″ + cot(r) u′ − u/4 = 0.

use crate::error::{Error, Result};
use crate::kernels::SpherePoint;

/// Which evaluation path produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum F21Method {
    Series,
    LogTransform,
    /// Arithmetic-geometric-mean route; test oracles only, never production.
    AgmOracle,
}

#[derive(Clone, Copy, Debug)]
pub struct F21Value {
    pub x: f64,
    pub value: f64,
    pub method: F21Method,
}

const MAX_TERMS: usize = 400;

fn check_domain(x: f64) -> Result<()> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::OutOfRange {
            what: "hypergeometric argument (diverges logarithmically at 1)",
            value: x,
        });
    }
    Ok(())
}

/// Σ c_n² xⁿ with c_n = (½)_n / n!, the defining series. Converges fast for
/// x ≤ ½; `deriv` ∈ {0, 1, 2} selects term-wise derivatives.
fn series_branch(x: f64, deriv: u32) -> f64 {
    let mut c = 1.0f64; // c_n = (1/2)_n / n!
    let mut sum = 0.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let a = c * c;
        let term = match deriv {
            0 => a * x.powi(n as i32),
            1 => {
                if n >= 1 {
                    nf * a * x.powi(n as i32 - 1)
                } else {
                    0.0
                }
            }
            _ => {
                if n >= 2 {
                    nf * (nf - 1.0) * a * x.powi(n as i32 - 2)
                } else {
                    0.0
                }
            }
        };
        sum += term;
        if n > 2 && term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
        c *= (nf + 0.5) / (nf + 1.0);
    }
    sum
}

/// The c = a + b logarithmic connection formula in w = 1 − x:
/// F(x) = (1/π) Σ c_n² (d_n − ln w) wⁿ,  d_n = 2ψ(n+1) − 2ψ(n+½),
/// with d_0 = 4 log 2. Term-wise w-derivatives, converted to x-derivatives.
fn log_branch(x: f64, deriv: u32) -> f64 {
    let w = 1.0 - x;
    let lw = w.ln();
    let mut c = 1.0f64;
    let mut d = 4.0 * std::f64::consts::LN_2;
    let mut sum = 0.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let a = c * c;
        let term = match deriv {
            0 => a * (d - lw) * w.powi(n as i32),
            // d/dw [(d_n − ln w) wⁿ] = wⁿ⁻¹ (n(d_n − ln w) − 1)
            1 => a * (nf * (d - lw) - 1.0) * w.powi(n as i32 - 1),
            // d²/dw²: wⁿ⁻² ((n−1)n(d_n − ln w) − (2n − 1))
            _ => a * ((nf - 1.0) * nf * (d - lw) - (2.0 * nf - 1.0)) * w.powi(n as i32 - 2),
        };
        sum += term;
        if n > 2 && term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
        c *= (nf + 0.5) / (nf + 1.0);
        d += 2.0 / (nf + 1.0) - 2.0 / (nf + 0.5);
    }
    let scaled = sum / std::f64::consts::PI;
    match deriv {
        0 => scaled,
        1 => -scaled,  // d/dx = −d/dw
        _ => scaled,
    }
}

/// ₂F₁(½, ½; 1; x) for x ∈ [0, 1).
pub fn f21_half(x: f64) -> Result<f64> {
    Ok(f21_half_detailed(x)?.value)
}

pub fn f21_half_detailed(x: f64) -> Result<F21Value> {
    check_domain(x)?;
    if x <= 0.5 {
        Ok(F21Value {
            x,
            value: series_branch(x, 0),
            method: F21Method::Series,
        })
    } else {
        Ok(F21Value {
            x,
            value: log_branch(x, 0),
            method: F21Method::LogTransform,
        })
    }
}

/// d/dx ₂F₁(½, ½; 1; x), term-wise.
pub fn f21_half_d1(x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(if x <= 0.5 {
        series_branch(x, 1)
    } else {
        log_branch(x, 1)
    })
}

/// d²/dx² ₂F₁(½, ½; 1; x), term-wise.
pub fn f21_half_d2(x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(if x <= 0.5 {
        series_branch(x, 2)
    } else {
        log_branch(x, 2)
    })
}

/// The conformal factor u(ζ) = F(|ζ²|²)/F(½), normalized to 1 on the
/// boundary |ζ¹| = |ζ²|. Diverges on the core circle |ζ²| = 1, which is
/// excluded from the domain.
pub fn yamabe_factor(p: &SpherePoint) -> Result<f64> {
    let x = p.z2.norm_sqr();
    if x >= 1.0 {
        return Err(Error::OutOfRange {
            what: "core circle |ζ²| = 1 excluded",
            value: x,
        });
    }
    Ok(f21_half(x)? / f21_half(0.5)?)
}

/// Residual of the Legendre-type equation (1−x²)u″ − 2xu′ − u/4 at
/// u(x) = F((1+x)/2). Analytic term-wise derivatives on x ≤ 0 (the series
/// branch of the argument), centered finite differences of the full
/// evaluator elsewhere.
pub fn ode_residual(x: f64) -> Result<f64> {
    if x <= 0.0 {
        ode_residual_analytic(x)
    } else {
        ode_residual_fd(x, 1e-4)
    }
}

fn ode_residual_analytic(x: f64) -> Result<f64> {
    if !(-1.0 < x && x < 1.0) {
        return Err(Error::OutOfRange {
            what: "ode argument",
            value: x,
        });
    }
    let w = 0.5 * (1.0 + x);
    // u(x) = F(w), u' = F'(w)/2, u'' = F''(w)/4
    let u = f21_half(w)?;
    let du = 0.5 * f21_half_d1(w)?;
    let ddu = 0.25 * f21_half_d2(w)?;
    Ok((1.0 - x * x) * ddu - 2.0 * x * du - 0.25 * u)
}

/// Finite-difference residual with explicit step, for convergence studies.
pub fn ode_residual_fd(x: f64, h: f64) -> Result<f64> {
    if !(-1.0 < x && x < 1.0) {
        return Err(Error::OutOfRange {
            what: "ode argument",
            value: x,
        });
    }
    let u = |y: f64| f21_half(0.5 * (1.0 + y));
    let um = u(x - h)?;
    let u0 = u(x)?;
    let up = u(x + h)?;
    let du = (up - um) / (2.0 * h);
    let ddu = (up - 2.0 * u0 + um) / (h * h);
    Ok((1.0 - x * x) * ddu - 2.0 * x * du - 0.25 * u0)
}

/// Residual of the radial interior equation u″ + cot(r) u′ − u/4 at
/// u(r) = F(cos²(r/2)), with analytic chain-rule derivatives.
pub fn radial_residual(r: f64) -> Result<f64> {
    if !(0.0 < r && r < std::f64::consts::PI) {
        return Err(Error::OutOfRange {
            what: "polar radius r",
            value: r,
        });
    }
    let x = (0.5 * r).cos().powi(2);
    let f1 = f21_half_d1(x)?;
    let f2 = f21_half_d2(x)?;
    let f0 = f21_half(x)?;
    // x(r) = cos²(r/2): x′ = −sin(r)/2, x″ = −cos(r)/2
    let xp = -0.5 * r.sin();
    let xpp = -0.5 * r.cos();
    let du = f1 * xp;
    let ddu = f2 * xp * xp + f1 * xpp;
    Ok(ddu + (r.cos() / r.sin()) * du - 0.25 * f0)
}

/// Max |radial residual| over a grid of radii (each must avoid 0 and π).
pub fn polar_l_residual(r_grid: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &r in r_grid {
        worst = worst.max(radial_residual(r)?.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::chart_raw;
    use crate::testutil::{f21_half_agm, GAMMA_QUARTER};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn f21_special_values() {
        assert_eq!(f21_half(0.0).unwrap(), 1.0);
        let expect = GAMMA_QUARTER * GAMMA_QUARTER / (2.0 * PI.powf(1.5));
        assert!((f21_half(0.5).unwrap() - expect).abs() < 1e-13);
        assert!(f21_half(1.0).is_err());
        assert!(f21_half(-0.1).is_err());
    }

    #[test]
    fn branches_agree_at_the_switch_point() {
        // log_branch returns x-derivatives directly (sign handled inside)
        for d in 0..3u32 {
            let s = series_branch(0.5, d);
            let l = log_branch(0.5, d);
            assert!(
                (s - l).abs() < 1e-13 * s.abs().max(1.0),
                "deriv {d}: {s} vs {l}"
            );
        }
    }

    #[test]
    fn agrees_with_agm_oracle_across_the_domain() {
        for i in 1..=19 {
            let x = 0.05 * i as f64;
            let got = f21_half(x).unwrap();
            let want = f21_half_agm(x);
            assert!(
                (got - want).abs() < 1e-12 * want,
                "x = {x}: {got} vs {want}"
            );
        }
        let v = f21_half_detailed(0.9).unwrap();
        assert_eq!(v.method, F21Method::LogTransform);
        assert!((v.value - f21_half_agm(0.9)).abs() < 1e-12 * v.value);
    }

    #[test]
    fn increasing_convex_and_log_blowup() {
        let mut prev = f21_half(0.0).unwrap();
        let mut prev_d = f21_half_d1(0.0).unwrap();
        for i in 1..=99 {
            let x = i as f64 / 100.0;
            let v = f21_half(x).unwrap();
            let d = f21_half_d1(x).unwrap();
            assert!(v > prev, "increasing at {x}");
            assert!(d >= prev_d, "convex at {x}");
            prev = v;
            prev_d = d;
        }
        // u ~ −log(1−x)/π as x → 1: record the ratio
        let mut ratios = Vec::new();
        for &x in &[0.99, 0.999, 0.9999] {
            ratios.push(f21_half(x).unwrap() / (1.0 / (1.0 - x)).ln());
        }
        println!("f21 / log(1/(1-x)) at x -> 1: {ratios:?}");
        assert!(ratios.iter().all(|r| r.is_finite() && *r > 0.0));
        // the ratios settle toward a finite constant (recorded, not pinned)
        assert!((ratios[2] - ratios[1]).abs() < (ratios[1] - ratios[0]).abs());
    }

    #[test]
    fn ode_residual_analytic_branch_is_rounding_level() {
        for i in 0..50 {
            let x = -0.98 + 0.02 * i as f64;
            if x > 0.0 {
                break;
            }
            let r = ode_residual(x).unwrap();
            assert!(r.abs() < 1e-12, "x = {x}: {r}");
        }
        assert!(ode_residual(-0.5).unwrap().abs() < 1e-12);
        assert!(ode_residual(0.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ode_residual_fd_branch_is_second_order() {
        let e1 = ode_residual_fd(0.6, 1e-3).unwrap().abs();
        let e2 = ode_residual_fd(0.6, 5e-4).unwrap().abs();
        assert!(e1 < 1e-4, "{e1}");
        assert!(e2 < e1 / 3.0, "order 2: {e1} → {e2}");
    }

    #[test]
    fn radial_residual_vanishes_on_the_exact_solution() {
        assert!(radial_residual(PI / 2.0).unwrap().abs() < 1e-10);
        assert!(radial_residual(3.0 * PI / 4.0).unwrap().abs() < 1e-10);
        let grid: Vec<f64> = (1..40).map(|i| PI / 2.0 + i as f64 * PI / 100.0).collect();
        assert!(polar_l_residual(&grid).unwrap() < 1e-10);
        assert!(polar_l_residual(&[0.0]).is_err());
    }

    #[test]
    fn full_interior_operator_annihilates_the_lifted_factor() {
        // the factor as a collar field depends only on t
        let field = |t: f64, _u: f64, _v: f64| {
            let r = PI / 2.0 - std::f64::consts::SQRT_2 * t;
            f21_half((0.5 * r).cos().powi(2))
        };
        let center = crate::kernels::CollarPoint::new(
            0.012,
            crate::torus::TorusPoint::reduce(0.3, -0.8).unwrap(),
        )
        .unwrap();
        let full = crate::neumann::l_residual(&field, &center, 1e-4).unwrap();
        let (r0, _, _) = crate::neumann::collar_to_polar(&center);
        let radial = -2.0 * radial_residual(r0).unwrap();
        assert!(
            (full - radial).abs() < 1e-5,
            "full L {full} vs radial form {radial}"
        );
        assert!(full.abs() < 1e-5, "{full}");
    }

    #[test]
    fn factor_normalization_and_t_dependence() {
        // exactly representable boundary point: |ζ¹|² = |ζ²|² = 1/2
        let p = SpherePoint::new(Complex64::new(0.5, 0.5), Complex64::new(0.5, -0.5)).unwrap();
        assert_eq!(yamabe_factor(&p).unwrap(), 1.0);

        // chart points on Σ are 1 to rounding
        for (u, v) in [(0.0, 0.0), (1.0, 0.4), (-2.0, 1.1)] {
            let q = chart_raw(0.0, u, v);
            assert!((yamabe_factor(&q).unwrap() - 1.0).abs() < 1e-14);
        }

        // interior: factor depends only on t, and exceeds 1 off the boundary
        for t in [0.005, 0.02] {
            let a = yamabe_factor(&chart_raw(t, 0.3, 0.1)).unwrap();
            let b = yamabe_factor(&chart_raw(t, -2.0, 1.4)).unwrap();
            assert!((a - b).abs() < 1e-14);
            assert!(a > 1.0);
        }

        // |ζ²|² = 0.9 reduces to the hypergeometric ratio
        let x: f64 = 0.9;
        let q = SpherePoint::new(
            Complex64::new((1.0 - x).sqrt(), 0.0),
            Complex64::new(x.sqrt(), 0.0),
        )
        .unwrap();
        let expect = f21_half(q.z2.norm_sqr()).unwrap() / f21_half(0.5).unwrap();
        assert_eq!(yamabe_factor(&q).unwrap(), expect);

        // core circle rejected
        let core = SpherePoint::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        assert!(yamabe_factor(&core).is_err());
    }
}
