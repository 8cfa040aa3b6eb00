//! Command-line front end: reproducible batch runs with persisted artifacts.
//!
//! Subcommands: `multiplier`, `certify`, `solve`, `yamabe`, `steklov`,
//! `selftest`. Every output file embeds the configuration hash; symbol
//! tables are cached on disk keyed by (kernel, t, cutoff, quadrature
//! settings), so `certify` after `multiplier` is quadrature-free.
//!
//! Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 certificate
//! failure.

mod config;

use clifford_layer::certify;
use clifford_layer::error::Error;
use clifford_layer::jsonout::JsonObject;
use clifford_layer::multiplier::{self, kernel_by_name, NeumannSymbol, SymbolTable, TraceSymbol};
use clifford_layer::neumann::{self, BoundaryData, CollarTables, DataKind};
use clifford_layer::quadrature::{dkdt_mass, khat, QuadratureSpec};
use clifford_layer::torus::{forward_transform, grid_to_csv, inverse_transform, GridFn, TorusPoint};
use clifford_layer::yamabe;
use config::{build_config, parse_args, Cli, RunConfig};
use num_complex::Complex64;
use std::f64::consts::PI;

const USAGE: &str = "usage: clifford-layer <command> [--flag value ...]

commands:
  multiplier   build a kernel symbol table and report its sup
               [--kernel khat|k0hat|kthat|dkdthat|gradhat] [--t T] [--max-freq M]
  certify      assemble the operator-norm certificate (JSON); --report prints margins
  solve        solve the Neumann problem for a boundary CSV (--input h.csv)
  steklov      emit modewise Dirichlet-to-Neumann ratios
  yamabe       emit the boundary-Yamabe factor and its ODE residual on an r-grid
               [--r-min R] [--r-max R] [--r-count N]
  selftest     run the fast invariant suite

shared flags (also settable in a --config key=value file; flags win):
  --grid-n N --max-freq M --tol T --panel-order P --max-depth D
  --t-levels a,b,c --out DIR --cache-dir DIR --threads N --config FILE

environment: CLIFFORD_LAYER_CACHE_DIR sets the default table cache.";

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(run(&args));
}

fn run(args: &[String]) -> i32 {
    if args.is_empty() || args[0] == "--help" || args[0] == "help" {
        eprintln!("{USAGE}");
        return if args.is_empty() { 2 } else { 0 };
    }
    let cli = match parse_args(args) {
        Ok(cli) => cli,
        Err(e) => {
            eprintln!("error: {e}\n\n{USAGE}");
            return 2;
        }
    };
    if cli.switches.contains(&"help".to_string()) {
        eprintln!("{USAGE}");
        return 0;
    }
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}\n\n{USAGE}");
            return 2;
        }
    };

    let result = match cli.command.as_str() {
        "multiplier" => cmd_multiplier(&cli, &cfg),
        "certify" => cmd_certify(&cli, &cfg),
        "solve" => cmd_solve(&cli, &cfg),
        "steklov" => cmd_steklov(&cfg),
        "yamabe" => cmd_yamabe(&cli, &cfg),
        "selftest" => cmd_selftest(&cfg),
        other => {
            eprintln!("error: unknown command '{other}'\n\n{USAGE}");
            return 2;
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            3
        }
    }
}

fn write_out(cfg: &RunConfig, name: &str, contents: &str) -> Result<std::path::PathBuf, Error> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

// ---------------------------------------------------------------------------
// multiplier
// ---------------------------------------------------------------------------

fn cmd_multiplier(cli: &Cli, cfg: &RunConfig) -> Result<i32, Error> {
    let spec = cfg.quad_spec();
    let t = cli
        .flags
        .get("t")
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Io(format!("invalid --t value '{s}'")))
        })
        .transpose()?;
    // bare `multiplier` builds the two boundary tables; --kernel selects one
    // variant from the registry
    let names: Vec<&str> = match cli.flags.get("kernel") {
        Some(k) => vec![k.as_str()],
        None => vec!["khat", "k0hat"],
    };
    for kernel_name in names {
        let kernel = kernel_by_name(kernel_name, t)?;
        let table = multiplier::build_or_load(
            kernel.as_ref(),
            cfg.cutoff,
            &spec,
            cfg.threads,
            // complex tables cannot persist in the m,n,value,err schema
            if kernel_name == "gradhat" {
                None
            } else {
                Some(cfg.cache_dir.as_path())
            },
        )?;
        let (argmax, sup) = table.sup_abs();
        println!(
            "table {kernel_name} M = {} ({} entries, per-entry error ≤ {:.2e})",
            cfg.cutoff,
            table.len(),
            table.max_err()
        );
        println!("sup |entry| = {sup:.8} at {argmax}");
        if kernel_name == "khat" {
            let margin = 4.0 * PI - sup;
            println!(
                "margin to 4π = {margin:.8} ({})",
                if margin > 0.0 { "bounded" } else { "VIOLATION" }
            );
        }
        if kernel_name != "gradhat" {
            println!(
                "cached under {} (config hash {})",
                cfg.cache_dir.display(),
                table.config_hash()
            );
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

fn cmd_certify(cli: &Cli, cfg: &RunConfig) -> Result<i32, Error> {
    let spec = cfg.quad_spec();
    // constants are cheap and need the tightest tolerance in the pipeline
    let const_spec = QuadratureSpec {
        abs_tol: spec.abs_tol.min(1e-8),
        ..spec
    };
    let red = certify::compute_constants(certify::RED_APERTURE, &const_spec)?;
    let blue = certify::compute_constants(certify::BLUE_APERTURE, &const_spec)?;

    // reuse a cached full table when one covers the 11 direct frequencies;
    // build a small one otherwise
    let cached = if cfg.cutoff >= 7 {
        SymbolTable::load(&cfg.cache_dir, "khat", None, cfg.cutoff, &spec)?
    } else {
        None
    };
    let direct_table = match cached {
        Some(t) => t,
        None => multiplier::build_or_load(
            &multiplier::NeumannCoeff,
            7,
            &spec,
            cfg.threads,
            Some(cfg.cache_dir.as_path()),
        )?,
    };

    let cert = certify::certify_norm(&direct_table, &red, &blue)?;
    let path = write_out(cfg, "certificate.json", &(cert.to_json() + "\n"))?;
    println!("certificate written to {}", path.display());
    if cli.switches.contains(&"report".to_string()) {
        print!("{}", cert.report());
    }
    println!(
        "sup direct |K̂| = {:.6} (< 5.8), pass = {}",
        cert.sup_direct, cert.pass
    );
    Ok(if cert.pass { 0 } else { 4 })
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn parse_boundary_csv(path: &str) -> Result<GridFn, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "u,v,h" {
                return Err(Error::Parse {
                    file: path.into(),
                    line: lineno,
                    column: "header".into(),
                    message: format!("expected 'u,v,h', found '{line}'"),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                file: path.into(),
                line: lineno,
                column: "record".into(),
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let mut parsed = [0.0f64; 3];
        for (i, (field, col)) in fields.iter().zip(["u", "v", "h"]).enumerate() {
            parsed[i] = field.trim().parse().map_err(|_| Error::Parse {
                file: path.into(),
                line: lineno,
                column: col.into(),
                message: format!("invalid float '{field}'"),
            })?;
        }
        rows.push((parsed[0], parsed[1], parsed[2]));
    }
    let count = rows.len();
    let n = (count as f64).sqrt().round() as usize;
    if n * n != count || n == 0 || !n.is_multiple_of(2) {
        return Err(Error::Parse {
            file: path.into(),
            line: 1,
            column: "record count".into(),
            message: format!("{count} samples do not form an even square grid"),
        });
    }
    let mut grid = GridFn::zeros(n)?;
    for (i, (u, v, h)) in rows.into_iter().enumerate() {
        let (j, k) = (i / n, i % n);
        let (eu, ev) = (grid.u_at(j), grid.v_at(k));
        if (u - eu).abs() > 1e-9 || (v - ev).abs() > 1e-9 {
            return Err(Error::Parse {
                file: path.into(),
                line: i + 2,
                column: "u,v".into(),
                message: format!(
                    "sample at ({u}, {v}) does not match the row-major square-cover node ({eu}, {ev})"
                ),
            });
        }
        grid.set(j, k, Complex64::new(h, 0.0));
    }
    Ok(grid)
}

fn cmd_solve(cli: &Cli, cfg: &RunConfig) -> Result<i32, Error> {
    let Some(input) = cli.flags.get("input") else {
        eprintln!("error: solve requires --input <h.csv>\n\n{USAGE}");
        return Ok(2);
    };
    let grid = parse_boundary_csv(input)?;
    let h = BoundaryData::new(grid, DataKind::NeumannDatum)?;

    let spec = cfg.quad_spec();
    let cache = Some(cfg.cache_dir.as_path());
    let khat_tbl = multiplier::build_or_load(
        &multiplier::NeumannCoeff,
        cfg.cutoff,
        &spec,
        cfg.threads,
        cache,
    )?;
    let k0hat_tbl = multiplier::build_or_load(
        &multiplier::TraceCoeff,
        cfg.cutoff,
        &spec,
        cfg.threads,
        cache,
    )?;
    let sym = NeumannSymbol::new(&khat_tbl)?;
    let trace = TraceSymbol::new(&k0hat_tbl);

    let (density, discarded) = neumann::solve(&h, &sym, 1e-8)?;
    let traced = neumann::trace_s(&density, &trace)?;

    let hash_comment = vec![format!("config-hash: {}", cfg.hash())];
    write_out(cfg, "density.csv", &grid_to_csv(&density.grid, &hash_comment))?;
    write_out(cfg, "trace.csv", &grid_to_csv(&traced.grid, &hash_comment))?;

    let tables = CollarTables::new(cfg.cutoff, spec, cfg.threads)
        .with_cache_dir(Some(cfg.cache_dir.clone()));
    let mut levels = Vec::new();
    for &t in &cfg.t_levels {
        let field = neumann::interior_eval(&density, t, &tables)?;
        write_out(
            cfg,
            &format!("interior_t{t:.6}.csv"),
            &grid_to_csv(&field, &hash_comment),
        )?;
        levels.push((t, field));
    }
    let interior = neumann::InteriorField::new(levels)?;

    // residual summary: solve round trip and the jump relation at the
    // smallest level
    let (h_band, _) = neumann::project_to_band(&h, cfg.cutoff, 1.0)?;
    let (fhat, _) = forward_transform(&density.grid)?.truncated(cfg.cutoff);
    let recovered = inverse_transform(&sym.apply(&fhat)?, density.grid.n())?;
    let h_grid = inverse_transform(&h_band, density.grid.n())?;
    let round_trip = recovered.sup_distance(&h_grid)?;

    let t_min = cfg.t_levels[0];
    let jump = neumann::normal_derivative(&density, t_min, &tables)?
        .sup_distance(&h_grid)?;

    let summary = JsonObject::new()
        .str("config_hash", &cfg.hash())
        .int("grid_n", density.grid.n() as i64)
        .int("cutoff", cfg.cutoff)
        .num("band_discarded_fraction", discarded)
        .num("round_trip_sup_error", round_trip)
        .num("jump_relation_sup_error_at_t_min", jump)
        .num("t_min", t_min)
        .int("t_levels", interior.levels().len() as i64)
        .finish_pretty(0);
    write_out(cfg, "solve_summary.json", &(summary + "\n"))?;

    println!("density, trace, and {} interior level(s) written to {}", cfg.t_levels.len(), cfg.out_dir.display());
    println!("band projection discarded energy fraction: {discarded:.3e}");
    println!("round-trip sup error |(−½I+𝒩)f − h| = {round_trip:.3e}");
    println!("jump-relation sup error at t = {t_min}: {jump:.3e}");
    Ok(0)
}

// ---------------------------------------------------------------------------
// steklov
// ---------------------------------------------------------------------------

fn cmd_steklov(cfg: &RunConfig) -> Result<i32, Error> {
    let spec = cfg.quad_spec();
    let cache = Some(cfg.cache_dir.as_path());
    let khat_tbl = multiplier::build_or_load(
        &multiplier::NeumannCoeff,
        cfg.cutoff,
        &spec,
        cfg.threads,
        cache,
    )?;
    let k0hat_tbl = multiplier::build_or_load(
        &multiplier::TraceCoeff,
        cfg.cutoff,
        &spec,
        cfg.threads,
        cache,
    )?;
    let modes = neumann::steklov_modes(&khat_tbl, &k0hat_tbl)?;
    let mut csv = format!("# config-hash: {}\nm,n,nu\n", cfg.hash());
    for (f, nu) in &modes {
        csv.push_str(&format!("{},{},{:.17e}\n", f.m(), f.n(), nu));
    }
    let path = write_out(cfg, "steklov_modes.csv", &csv)?;
    let extremal = modes.last().expect("nonempty mode list");
    println!("{} modewise ratios written to {}", modes.len(), path.display());
    println!("extremal ν = {:.10} at {}", extremal.1, extremal.0);
    Ok(0)
}

// ---------------------------------------------------------------------------
// yamabe
// ---------------------------------------------------------------------------

fn cmd_yamabe(cli: &Cli, cfg: &RunConfig) -> Result<i32, Error> {
    let get = |key: &str, default: f64| -> Result<f64, Error> {
        match cli.flags.get(key) {
            Some(s) => s
                .parse()
                .map_err(|_| Error::Io(format!("invalid --{key} value '{s}'"))),
            None => Ok(default),
        }
    };
    let r_min = get("r-min", PI / 2.0)?;
    let r_max = get("r-max", 3.0)?;
    let count = get("r-count", 100.0)? as usize;
    if !(0.0 < r_min && r_min < r_max && r_max < PI) || count < 2 {
        eprintln!("error: need 0 < r-min < r-max < π and r-count ≥ 2");
        return Ok(2);
    }
    let norm = yamabe::f21_half(0.5)?;
    let mut csv = format!("# config-hash: {}\nr,x,u,ode_residual\n", cfg.hash());
    for i in 0..count {
        let r = r_min + (r_max - r_min) * i as f64 / (count - 1) as f64;
        let x = (0.5 * r).cos().powi(2);
        let u = yamabe::f21_half(x)? / norm;
        let residual = yamabe::radial_residual(r)?;
        csv.push_str(&format!("{r:.17e},{x:.17e},{u:.17e},{residual:.17e}\n"));
    }
    let path = write_out(cfg, "yamabe.csv", &csv)?;
    println!("{count} radii written to {}", path.display());
    Ok(0)
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

fn cmd_selftest(cfg: &RunConfig) -> Result<i32, Error> {
    let mut failures = 0usize;
    let mut check = |name: &str, ok: bool| {
        println!("{}  {name}", if ok { "ok  " } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    // lattice reduction
    let p = TorusPoint::reduce(3.0 * PI / 2.0, PI / 4.0 + PI)?;
    check(
        "lattice reduction lands in the fundamental domain",
        (p.u() - PI / 2.0).abs() < 1e-12 && (p.v() - PI / 4.0).abs() < 1e-12,
    );

    // Parseval on lifted data
    let g = GridFn::sample_real(32, |u, v| (u + v).sin() + 0.3 * (2.0 * u).cos())?;
    let s = forward_transform(&g)?;
    let parseval = (g.fund_l2_sq() - s.energy()).abs() / g.fund_l2_sq();
    check("Parseval identity on lifted data (1e-10)", parseval < 1e-10);

    // kernel coefficient value and bound
    let spec = QuadratureSpec::with_tol(1e-7);
    let k11 = khat(1, 1, &spec)?;
    check(
        "|K̂(1,1)| < 5.8 with error < 1e-6",
        k11.value.abs() < 5.8 && k11.err_est < 1e-6,
    );

    // kernel mass limit direction
    let m1 = dkdt_mass(0.1, &QuadratureSpec::with_tol(1e-6))?;
    let m2 = dkdt_mass(0.05, &QuadratureSpec::with_tol(1e-6))?;
    check(
        "kernel mass approaches −1/2 from above",
        (m2.value + 0.5) > 0.0 && (m2.value + 0.5) < (m1.value + 0.5),
    );

    // partition coverage
    check(
        "red/blue/direct partition covers the quadrant (to 10^4)",
        certify::coverage_exhaustive(10_000),
    );

    // full certificate on freshly computed constants
    let const_spec = QuadratureSpec::with_tol(1e-8);
    let red = certify::compute_constants(2.0, &const_spec)?;
    let blue = certify::compute_constants(1.0, &const_spec)?;
    let direct = multiplier::build_khat(7, &spec, cfg.threads)?;
    let cert = certify::certify_norm(&direct, &red, &blue)?;
    check("operator-norm certificate passes", cert.pass);

    // hypergeometric branches
    let f_half = yamabe::f21_half(0.5)?;
    let agm = {
        // AGM of (1, √(1−x)) gives 1/F for this parameter set
        let (mut a, mut b) = (1.0f64, 0.5f64.sqrt());
        for _ in 0..40 {
            let (na, nb) = (0.5 * (a + b), (a * b).sqrt());
            a = na;
            b = nb;
        }
        1.0 / a
    };
    check("hypergeometric series matches AGM (1e-12)", (f_half - agm).abs() < 1e-12);
    check(
        "radial operator annihilates the factor (1e-10)",
        yamabe::radial_residual(PI / 2.0)?.abs() < 1e-10,
    );

    // diagonal solve round trip
    let khat_tbl = multiplier::build_khat(2, &spec, cfg.threads)?;
    let sym = NeumannSymbol::new(&khat_tbl)?;
    let h = BoundaryData::new(GridFn::sample_real(8, |u, v| (u + v).sin())?, DataKind::NeumannDatum)?;
    let (f, _) = neumann::solve(&h, &sym, 1e-8)?;
    let (fhat, _) = forward_transform(&f.grid)?.truncated(2);
    let back = inverse_transform(&sym.apply(&fhat)?, 8)?;
    let rt = h.grid.sup_distance(&back)?;
    check("solver round trip exact to 1e-12", rt < 1e-12);

    println!(
        "selftest: {} checks, {} failure(s)",
        10,
        failures
    );
    Ok(if failures == 0 { 0 } else { 3 })
}
