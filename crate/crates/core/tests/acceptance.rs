//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured margins. Tolerances are pinned here, not configurable.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use clifford_layer::certify::{self, compute_constants};
use clifford_layer::kernels;
use clifford_layer::multiplier::{build_k0hat, build_khat, NeumannSymbol, SymbolTable};
use clifford_layer::neumann::{
    self, interior_eval, normal_derivative, solve, BoundaryData, CollarTables, DataKind,
    InteriorEvaluator,
};
use clifford_layer::quadrature::{dkdt_mass, QuadratureSpec};
use clifford_layer::testutil::{f21_half_agm, Rng};
use clifford_layer::torus::{
    forward_transform, forward_transform_checked, inverse_transform, Freq, GridFn, TorusPoint,
};
use clifford_layer::yamabe;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

const FOUR_PI: f64 = 4.0 * PI;

/// Higher-order Richardson in √t: the interpolating polynomial through
/// (√tᵢ, yᵢ) evaluated at √t = 0. One √t-step alone overcorrects here
/// because the actual remainders decay faster than the O(√t) bound.
fn richardson_sqrt(ts: &[f64], ys: &[f64]) -> f64 {
    let s: Vec<f64> = ts.iter().map(|t| t.sqrt()).collect();
    let mut total = 0.0;
    for (i, (&si, &yi)) in s.iter().zip(ys).enumerate() {
        let mut w = 1.0;
        for (j, &sj) in s.iter().enumerate() {
            if j != i {
                w *= (0.0 - sj) / (si - sj);
            }
        }
        total += yi * w;
    }
    total
}

fn table_spec() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-7)
}

fn khat64() -> &'static SymbolTable {
    static T: OnceLock<SymbolTable> = OnceLock::new();
    T.get_or_init(|| build_khat(64, &table_spec(), 1).expect("khat table"))
}

fn k0hat64() -> &'static SymbolTable {
    static T: OnceLock<SymbolTable> = OnceLock::new();
    T.get_or_init(|| build_k0hat(64, &table_spec(), 1).expect("k0hat table"))
}

fn k0hat32() -> &'static SymbolTable {
    static T: OnceLock<SymbolTable> = OnceLock::new();
    T.get_or_init(|| build_k0hat(32, &table_spec(), 1).expect("k0hat table"))
}

fn constants() -> &'static (certify::MajorantConstants, certify::MajorantConstants) {
    static C: OnceLock<(certify::MajorantConstants, certify::MajorantConstants)> = OnceLock::new();
    C.get_or_init(|| {
        let spec = QuadratureSpec::with_tol(1e-8);
        (
            compute_constants(2.0, &spec).expect("constants a=2"),
            compute_constants(1.0, &spec).expect("constants a=1"),
        )
    })
}

#[test]
fn acceptance_01_norm_certificate() {
    let (red, blue) = constants();
    let direct_table = build_khat(7, &table_spec(), 1).unwrap();
    let cert = certify::certify_norm(&direct_table, red, blue).unwrap();

    for b in &cert.rounded_bounds {
        assert!(b.err < 1e-7, "{}: quadrature error {:.2e}", b.name, b.err);
        assert!(b.pass, "{} = {} violates its rounded bound", b.name, b.value);
    }
    for e in &cert.red_endpoints {
        assert!(e.pass, "red endpoint m = {}: {}", e.index, e.bound);
    }
    for e in &cert.blue_endpoints {
        assert!(e.pass, "blue endpoint n = {}: {}", e.index, e.bound);
    }
    assert!(cert.sup_direct < 5.8, "direct sup {}", cert.sup_direct);
    assert!(cert.coverage_pass);
    assert!(cert.pass);

    let worst_red = cert
        .red_endpoints
        .iter()
        .map(|e| FOUR_PI - e.bound)
        .fold(f64::INFINITY, f64::min);
    let worst_blue = cert
        .blue_endpoints
        .iter()
        .map(|e| FOUR_PI - e.bound)
        .fold(f64::INFINITY, f64::min);
    println!(
        "ACCEPTANCE 1 (norm certificate): PASS — all rounded bounds hold, \
         red margin ≥ {worst_red:.4}, blue margin ≥ {worst_blue:.4}, direct sup {:.4} < 5.8",
        cert.sup_direct
    );
}

#[test]
fn acceptance_02_closed_form_constants() {
    let (red, blue) = constants();
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s5 = 5f64.sqrt();

    let e0_2_exact =
        ((68_935_125_533.0 + 1_312_025.0 * 1_102_101f64.sqrt()) / 55_105_058.0).sqrt() / 75.0;
    let e0_1_exact =
        ((137_909_641_801.0 + 2_625_550.0 * 1_102_731f64.sqrt()) / 110_273_101.0).sqrt() / 75.0;

    let cases = [
        ("I1", red.i1.value, 4.0 - 8.0 / s5),
        ("I2", red.i2.value, 2.0 - 12.0 / (5.0 * s5)),
        ("I3", red.i3.value, 6.0 + 4.0 * s2 - 12.0 / (5.0 * s5)),
        ("J1", blue.j1.value, 4.0 / s5),
        ("J2", blue.j2.value, 32.0 / (3.0 * s3) + 4.0 / s5),
        ("e0(2)", red.e0, e0_2_exact),
        ("e0(1)", blue.e0, e0_1_exact),
    ];
    let mut worst = 0.0f64;
    for (name, got, want) in cases {
        let rel = (got - want).abs() / want.abs();
        worst = worst.max(rel);
        assert!(rel < 1e-7, "{name}: {got} vs {want} (rel {rel:.2e})");
    }
    println!(
        "ACCEPTANCE 2 (closed-form constants): PASS — worst relative deviation {worst:.2e} < 1e-7"
    );
}

#[test]
fn acceptance_03_kernel_mass_limit() {
    let spec = QuadratureSpec::with_tol(1e-6);
    let ts = [0.1, 0.05, 0.025, 0.0125];
    let masses: Vec<f64> = ts
        .iter()
        .map(|&t| dkdt_mass(t, &spec).unwrap().value)
        .collect();
    for w in masses.windows(2) {
        assert!(
            w[1] + 0.5 < w[0] + 0.5,
            "mass + 1/2 must decrease: {} then {}",
            w[0],
            w[1]
        );
        assert!(w[1] + 0.5 > 0.0, "approach from above");
    }
    let extrapolated = richardson_sqrt(&ts[1..], &masses[1..]);
    let gap = (extrapolated + 0.5).abs();
    assert!(gap < 1e-2, "extrapolated limit {extrapolated} vs −1/2");
    println!(
        "ACCEPTANCE 3 (kernel mass limit): PASS — masses {masses:?}, \
         √t-extrapolated {extrapolated:.6} within {gap:.2e} of −1/2"
    );
}

#[test]
fn acceptance_04_jump_relation() {
    let cutoff = 3i64;
    let tables = CollarTables::new(cutoff, table_spec(), 1);
    let khat = build_khat(cutoff, &table_spec(), 1).unwrap();
    let sym = NeumannSymbol::new(&khat).unwrap();

    let densities: [&dyn Fn(f64, f64) -> f64; 3] = [
        &|u, v| (u + v).sin(),
        &|u, v| (u - v).cos() + 0.5 * (2.0 * u).cos(),
        &|u, v| (3.0 * u + v).sin() + 0.3 * (u + 3.0 * v).cos(),
    ];
    let ts = [0.08, 0.04, 0.02, 0.01, 0.005];
    let mut reports = Vec::new();
    for (i, density) in densities.iter().enumerate() {
        let f = BoundaryData::new(
            GridFn::sample_real(16, density).unwrap(),
            DataKind::Density,
        )
        .unwrap();
        let (fhat, _) = forward_transform(&f.grid).unwrap().truncated(cutoff);
        let target = inverse_transform(&sym.apply(&fhat).unwrap(), 16).unwrap();
        let errs: Vec<f64> = ts
            .iter()
            .map(|&t| {
                normal_derivative(&f, t, &tables)
                    .unwrap()
                    .sup_distance(&target)
                    .unwrap()
            })
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "density {i}: errors must decrease: {errs:?}");
        }
        let extrapolated = richardson_sqrt(&ts[1..], &errs[1..]);
        assert!(
            extrapolated.abs() < 1e-3,
            "density {i}: extrapolated jump error {extrapolated}"
        );
        reports.push(format!(
            "density {i}: sup errors {errs:?} → extrapolated {extrapolated:.2e}"
        ));
    }
    println!(
        "ACCEPTANCE 4 (jump relation): PASS — {}",
        reports.join("; ")
    );
}

#[test]
fn acceptance_05_interior_equation() {
    let cutoff = 3i64;
    let tables = CollarTables::new(cutoff, QuadratureSpec::with_tol(1e-9), 1);
    let grid = GridFn::sample_real(16, |u, v| (u + v).sin() + 0.5 * (u - 3.0 * v).cos()).unwrap();
    let f = BoundaryData::new(grid, DataKind::Density).unwrap();
    let (fhat, _) = forward_transform(&f.grid).unwrap().truncated(cutoff);
    let evaluator = InteriorEvaluator {
        density_hat: fhat,
        tables: &tables,
    };
    let field = |t: f64, u: f64, v: f64| evaluator.eval(t, u, v);

    let mut rng = Rng::new(2026);
    let t_center = 0.015;
    let mut orders = Vec::new();
    let mut residuals_fine = Vec::new();
    for i in 0..10 {
        let p = TorusPoint::reduce(rng.range(-PI, PI), rng.range(-PI / 2.0, PI / 2.0)).unwrap();
        let center = kernels::CollarPoint::new(t_center, p).unwrap();
        let scale = evaluator
            .eval(t_center, p.u(), p.v())
            .unwrap()
            .abs()
            .max(1.0);
        let r_coarse = neumann::l_residual(&field, &center, 8e-3).unwrap().abs();
        let r_mid = neumann::l_residual(&field, &center, 4e-3).unwrap().abs();
        let r_fine = neumann::l_residual(&field, &center, 1e-3).unwrap().abs();
        let order = (r_coarse / r_mid).log2();
        orders.push(order);
        residuals_fine.push(r_fine / scale);
        assert!(
            r_fine < 1e-4 * scale,
            "point {i}: residual {r_fine} vs scale {scale}"
        );
        assert!(order > 1.8, "point {i}: observed order {order:.3}");
    }
    let mean_order = orders.iter().sum::<f64>() / orders.len() as f64;
    let max_res = residuals_fine.iter().copied().fold(0.0f64, f64::max);
    println!(
        "ACCEPTANCE 5 (interior equation): PASS — observed orders {:.2}–{:.2} (mean {mean_order:.2}), \
         max residual {max_res:.2e} of field scale at step 1e-3",
        orders.iter().copied().fold(f64::INFINITY, f64::min),
        orders.iter().copied().fold(0.0f64, f64::max)
    );
}

#[test]
fn acceptance_06_solver_exactness() {
    let khat = build_khat(4, &table_spec(), 1).unwrap();
    let sym = NeumannSymbol::new(&khat).unwrap();

    // h = 0 → f = 0 exactly
    let zero = BoundaryData::new(GridFn::zeros(16).unwrap(), DataKind::NeumannDatum).unwrap();
    let (f0, _) = solve(&zero, &sym, 1e-8).unwrap();
    assert_eq!(f0.grid.sup_norm(), 0.0, "uniqueness mirror");

    let mut rng = Rng::new(7);
    let mut worst_rel = 0.0f64;
    for _ in 0..3 {
        let modes: Vec<(i64, i64, f64, f64)> = (0..10)
            .map(|_| {
                let m = rng.int(-4, 4);
                let n = (m + 2 * rng.int(-2, 2)).clamp(-4, 4);
                (m, n, rng.range(-1.0, 1.0), rng.range(-1.0, 1.0))
            })
            .collect();
        let h = BoundaryData::new(
            GridFn::sample_real(16, |u, v| {
                modes
                    .iter()
                    .filter(|(m, n, _, _)| (m - n).rem_euclid(2) == 0)
                    .map(|(m, n, a, b)| {
                        let ph = *m as f64 * u + *n as f64 * v;
                        a * ph.cos() + b * ph.sin()
                    })
                    .sum()
            })
            .unwrap(),
            DataKind::NeumannDatum,
        )
        .unwrap();
        let (f, _) = solve(&h, &sym, 1e-8).unwrap();
        let (fhat, _) = forward_transform(&f.grid).unwrap().truncated(4);
        let recovered = inverse_transform(&sym.apply(&fhat).unwrap(), 16).unwrap();
        let err = h.grid.sup_distance(&recovered).unwrap();
        let rel = err / h.grid.sup_norm().max(1e-300);
        worst_rel = worst_rel.max(rel);
        assert!(rel < 1e-12, "round trip relative error {rel}");
    }
    println!(
        "ACCEPTANCE 6 (solver exactness): PASS — round-trip relative error ≤ {worst_rel:.2e}, \
         zero datum gives the zero density exactly"
    );
}

#[test]
fn acceptance_07_multiplier_sup() {
    let tbl = khat64();
    let (argmax, sup) = tbl.sup_abs();
    let max_err = tbl.max_err();
    assert!(max_err < 1e-6, "per-entry error {max_err:.2e}");
    assert!(sup < FOUR_PI, "sup |K̂| = {sup}");
    println!(
        "ACCEPTANCE 7 (multiplier sup): PASS — max |K̂| = {sup:.6} at {argmax}, \
         margin to 4π = {:.6}, per-entry error ≤ {max_err:.2e}",
        FOUR_PI - sup
    );
}

#[test]
fn acceptance_08_trace_smoothing() {
    let weight = |tbl: &SymbolTable| {
        let mut worst = 0.0f64;
        let mut arg = Freq::new(0, 0).unwrap();
        for (f, z) in tbl.iter() {
            let w = z.re.abs() * (1.0 + f.m().abs() as f64 + (f.n().abs() as f64).sqrt());
            if w > worst {
                worst = w;
                arg = *f;
            }
        }
        (arg, worst)
    };
    let (arg64, w64) = weight(k0hat64());
    let (arg32, w32) = weight(k0hat32());
    let drift = (w64 - w32).abs() / w32;
    assert!(
        drift < 0.10,
        "implied constant moved {drift:.3} between M = 32 and M = 64"
    );
    println!(
        "ACCEPTANCE 8 (trace smoothing): PASS — sup |K̂₀|(1+|m|+√|n|) = {w32:.6} at {arg32} (M=32) \
         vs {w64:.6} at {arg64} (M=64), drift {drift:.2e} < 10%"
    );
}

#[test]
fn acceptance_09_hypergeometric_solution() {
    // series vs AGM on a 10-point grid
    let mut worst = 0.0f64;
    for i in 1..=10 {
        let x = 0.09 * i as f64;
        let got = yamabe::f21_half(x).unwrap();
        let want = f21_half_agm(x);
        worst = worst.max((got - want).abs() / want);
    }
    assert!(worst < 1e-12, "series vs AGM {worst:.2e}");

    // analytic-branch residual
    let mut worst_ode = 0.0f64;
    for i in 0..50 {
        let x = -0.98 + i as f64 * 0.02;
        if x > 0.0 {
            break;
        }
        worst_ode = worst_ode.max(yamabe::ode_residual(x).unwrap().abs());
    }
    assert!(worst_ode < 1e-12, "ODE residual {worst_ode:.2e}");

    // radial operator residual
    let r1 = yamabe::radial_residual(PI / 2.0).unwrap().abs();
    let r2 = yamabe::radial_residual(3.0 * PI / 4.0).unwrap().abs();
    assert!(r1 < 1e-10 && r2 < 1e-10, "radial residuals {r1:.2e}, {r2:.2e}");

    // exact boundary normalization at an exactly representable Σ point
    let p = kernels::SpherePoint::new(Complex64::new(0.5, 0.5), Complex64::new(0.5, -0.5))
        .unwrap();
    assert_eq!(yamabe::yamabe_factor(&p).unwrap(), 1.0);

    println!(
        "ACCEPTANCE 9 (hypergeometric solution): PASS — series vs AGM ≤ {worst:.2e}, \
         ODE residual ≤ {worst_ode:.2e}, radial residuals {r1:.2e}/{r2:.2e}, u(Σ) = 1 exactly"
    );
}

#[test]
fn acceptance_10_spectral_infrastructure() {
    let mut rng = Rng::new(314);
    // random lifted band-limited data at N ∈ {64, 128}
    let mut worst_parseval = 0.0f64;
    let mut worst_mixed = 0.0f64;
    for &n in &[64usize, 128] {
        let modes: Vec<(i64, i64, Complex64)> = (0..40)
            .map(|_| {
                let m = rng.int(-8, 8);
                let nn = (m + 2 * rng.int(-4, 4)).clamp(-8, 8);
                (
                    m,
                    nn,
                    Complex64::new(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)),
                )
            })
            .collect();
        let grid = GridFn::sample(n, |u, v| {
            modes
                .iter()
                .filter(|(m, nn, _)| (m - nn).rem_euclid(2) == 0)
                .map(|(m, nn, a)| {
                    a * Complex64::new(0.0, *m as f64 * u + *nn as f64 * v).exp()
                })
                .sum()
        })
        .unwrap();
        let fw = forward_transform_checked(&grid, 1e-8).unwrap();
        let lhs = grid.fund_l2_sq();
        let rhs = fw.spectrum.energy();
        worst_parseval = worst_parseval.max((lhs - rhs).abs() / lhs);
        worst_mixed = worst_mixed
            .max(fw.max_mixed_parity / (grid.sup_norm() * (2.0 * PI / n as f64) + 1.0));
    }
    assert!(worst_parseval < 1e-10, "Parseval {worst_parseval:.2e}");
    assert!(worst_mixed < 1e-10, "mixed parity {worst_mixed:.2e}");

    // convolution theorem vs brute-force double sum at N = 32
    let n = 32usize;
    let make = |phase: i64| {
        GridFn::sample(n, |u, v| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in -4i64..=4 {
                for k in -4i64..=4 {
                    if (m - k).rem_euclid(2) == 0 {
                        let mix = ((m * 31 + k * 17 + phase) % 7) as f64 / 7.0;
                        let amp = Complex64::new(mix, -0.3 * mix)
                            / (1.0 + (m * m + k * k) as f64);
                        acc += amp * Complex64::new(0.0, m as f64 * u + k as f64 * v).exp();
                    }
                }
            }
            acc
        })
        .unwrap()
    };
    let f = make(1);
    let g = make(4);
    let fast = clifford_layer::torus::convolve(&f, &g).unwrap();
    let w = 0.5 * (2.0 * PI / n as f64).powi(2);
    let mut worst_conv = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for jj in 0..n {
                for kk in 0..n {
                    acc += f.get((j + n - jj) % n, (k + n - kk) % n) * g.get(jj, kk);
                }
            }
            worst_conv = worst_conv.max((acc * w - fast.get(j, k)).norm());
        }
    }
    assert!(worst_conv < 1e-10, "convolution theorem {worst_conv:.2e}");

    println!(
        "ACCEPTANCE 10 (spectral infrastructure): PASS — Parseval ≤ {worst_parseval:.2e}, \
         mixed parity ≤ {worst_mixed:.2e}, convolution vs double sum ≤ {worst_conv:.2e}"
    );
}

/// Not an acceptance criterion: cutoff stability of the extremal
/// Dirichlet-to-Neumann ratio, sharing the M = 64 tables (band restriction
/// needs no new quadrature).
#[test]
fn steklov_extremal_stable_under_cutoff_doubling() {
    let modes64 = neumann::steklov_modes(khat64(), k0hat64()).unwrap();
    let extremal = |band: i64| {
        modes64
            .iter()
            .filter(|(f, _)| f.m().abs() <= band && f.n().abs() <= band)
            .map(|(_, nu)| *nu)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let top32 = extremal(32);
    let top64 = extremal(64);
    let drift = (top64 - top32).abs() / top32.abs();
    assert!(drift < 0.01, "extremal ν drift {drift:.3e}");
    for (f, nu) in &modes64 {
        assert!(nu.is_finite(), "{f}");
    }
    println!(
        "steklov stability: extremal ν = {top32:.8} (band 32) vs {top64:.8} (band 64), drift {drift:.2e}"
    );
}

/// Not an acceptance criterion: spot-check the spectral interior evaluation
/// against direct convolution quadrature (slow oracle).
#[test]
fn interior_spectral_route_matches_direct_quadrature() {
    let tables = CollarTables::new(2, table_spec(), 1);
    let density = |u: f64, v: f64| (u + v).sin() + 0.4 * (2.0 * v - 2.0 * u).cos();
    let f = BoundaryData::new(
        GridFn::sample_real(16, density).unwrap(),
        DataKind::Density,
    )
    .unwrap();
    let t = 0.015;
    let field = interior_eval(&f, t, &tables).unwrap();
    let mut rng = Rng::new(5);
    for _ in 0..4 {
        let j = (rng.next_u64() % 16) as usize;
        let k = (rng.next_u64() % 16) as usize;
        let p = kernels::CollarPoint::new(
            t,
            TorusPoint::reduce(field.u_at(j), field.v_at(k)).unwrap(),
        )
        .unwrap();
        let direct =
            neumann::interior_eval_direct(&density, &p, &QuadratureSpec::with_tol(1e-6)).unwrap();
        let spectral = field.get(j, k).re;
        assert!(
            (direct - spectral).abs() < 2e-6,
            "({j},{k}): {direct} vs {spectral}"
        );
    }
}

/// Not an acceptance criterion: two interior evaluations at different table
/// tolerances agree within the sum of the reported per-mode errors.
#[test]
fn interior_eval_tolerance_consistency() {
    let coarse_tables = CollarTables::new(2, QuadratureSpec::with_tol(1e-5), 1);
    let fine_tables = CollarTables::new(2, QuadratureSpec::with_tol(1e-7), 1);
    let f = BoundaryData::new(
        GridFn::sample_real(16, |u, v| (u + v).sin()).unwrap(),
        DataKind::Density,
    )
    .unwrap();
    let t = 0.01;
    let a = interior_eval(&f, t, &coarse_tables).unwrap();
    let b = interior_eval(&f, t, &fine_tables).unwrap();
    let observed = a.sup_distance(&b).unwrap();

    // bound: Σ_modes |f̂| (err_a + err_b) √2/(8π) / (2π²)
    let (fhat, _) = forward_transform(&f.grid).unwrap().truncated(2);
    let ta = coarse_tables.layer_table(t).unwrap();
    let tb = fine_tables.layer_table(t).unwrap();
    let mut bound = 0.0;
    for (fr, c) in fhat.iter() {
        bound += c.norm() * (ta.err(*fr).unwrap() + tb.err(*fr).unwrap());
    }
    bound *= std::f64::consts::SQRT_2 / (8.0 * PI) / (2.0 * PI * PI);
    assert!(
        observed <= bound,
        "observed {observed:.3e} vs error budget {bound:.3e}"
    );
}
