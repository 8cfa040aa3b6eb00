//! Run configuration: defaults, `--config` key-value files, flag overrides,
//! and the hash stamped into every output file.

use clifford_layer::multiplier::fnv1a64;
use clifford_layer::quadrature::QuadratureSpec;
use std::collections::BTreeMap;
use std::path::PathBuf;

pub const CACHE_ENV: &str = "CLIFFORD_LAYER_CACHE_DIR";

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub grid_n: usize,
    pub cutoff: i64,
    pub abs_tol: f64,
    pub panel_order: usize,
    pub max_depth: u32,
    pub t_levels: Vec<f64>,
    pub out_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let cache_dir = std::env::var(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|_| PathBuf::from("out/cache"));
        RunConfig {
            grid_n: 256,
            cutoff: 64,
            abs_tol: 1e-7,
            panel_order: 7,
            max_depth: 40,
            t_levels: vec![0.005, 0.01, 0.02],
            out_dir: PathBuf::from("out"),
            cache_dir,
            threads: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        }
    }
}

impl RunConfig {
    pub fn quad_spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.abs_tol,
            panel_order: self.panel_order,
            max_depth: self.max_depth,
            ..QuadratureSpec::default()
        }
    }

    /// Canonical serialization of every numeric setting; its FNV-1a hash is
    /// embedded in all outputs.
    pub fn canonical(&self) -> String {
        let levels = self
            .t_levels
            .iter()
            .map(|t| format!("{t:.17e}"))
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "grid_n={};cutoff={};abs_tol={:.17e};panel_order={};max_depth={};t_levels={};threads={}",
            self.grid_n, self.cutoff, self.abs_tol, self.panel_order, self.max_depth, levels,
            self.threads
        )
    }

    pub fn hash(&self) -> String {
        fnv1a64(&self.canonical())
    }

    /// Apply one key = value setting (from a config file or a flag).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let bad = |what: &str| format!("invalid value '{value}' for {what}");
        match key {
            "grid-n" => {
                self.grid_n = value.parse().map_err(|_| bad("grid-n"))?;
                if self.grid_n == 0 || !self.grid_n.is_multiple_of(2) {
                    return Err(format!("grid-n must be even and positive, got {value}"));
                }
            }
            "max-freq" => {
                self.cutoff = value.parse().map_err(|_| bad("max-freq"))?;
                if self.cutoff < 1 {
                    return Err(format!("max-freq must be ≥ 1, got {value}"));
                }
            }
            "tol" => {
                self.abs_tol = value.parse().map_err(|_| bad("tol"))?;
                if self.abs_tol <= 0.0 || self.abs_tol.is_nan() {
                    return Err(format!("tol must be positive, got {value}"));
                }
            }
            "panel-order" => {
                self.panel_order = value.parse().map_err(|_| bad("panel-order"))?;
                if self.panel_order < 3 {
                    return Err(format!("panel-order must be ≥ 3, got {value}"));
                }
            }
            "max-depth" => self.max_depth = value.parse().map_err(|_| bad("max-depth"))?,
            "t-levels" => {
                let mut levels = Vec::new();
                for part in value.split(',') {
                    let t: f64 = part.trim().parse().map_err(|_| bad("t-levels"))?;
                    levels.push(t);
                }
                if levels.is_empty() {
                    return Err("t-levels must not be empty".into());
                }
                levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
                self.t_levels = levels;
            }
            "out" => self.out_dir = PathBuf::from(value),
            "cache-dir" => self.cache_dir = PathBuf::from(value),
            "threads" => {
                self.threads = value.parse().map_err(|_| bad("threads"))?;
                if self.threads == 0 {
                    return Err("threads must be ≥ 1".into());
                }
            }
            _ => return Err(format!("unknown configuration key '{key}'")),
        }
        Ok(())
    }

    /// Load `key = value` lines (# starts a comment).
    pub fn apply_file(&mut self, path: &str) -> Result<(), String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config file {path}: {e}"))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(format!("{path}:{}: expected key = value", idx + 1))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| format!("{path}:{}: {e}", idx + 1))?;
        }
        Ok(())
    }
}

/// Parsed command line: flag map plus the subcommand.
pub struct Cli {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub switches: Vec<String>,
}

pub fn parse_args(args: &[String]) -> Result<Cli, String> {
    let mut it = args.iter();
    let command = it.next().ok_or("missing subcommand")?.clone();
    let mut flags = BTreeMap::new();
    let mut switches = Vec::new();
    let mut rest: Vec<&String> = it.collect();
    rest.reverse();
    while let Some(arg) = rest.pop() {
        let Some(name) = arg.strip_prefix("--") else {
            return Err(format!("unexpected argument '{arg}'"));
        };
        // switches take no value
        if matches!(name, "report" | "help") {
            switches.push(name.to_string());
            continue;
        }
        let value = rest
            .pop()
            .ok_or(format!("flag --{name} needs a value"))?;
        flags.insert(name.to_string(), value.clone());
    }
    Ok(Cli {
        command,
        flags,
        switches,
    })
}

/// Fold `--config`, then the remaining flags, into a RunConfig.
pub fn build_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut config = RunConfig::default();
    if let Some(path) = cli.flags.get("config") {
        config.apply_file(path)?;
    }
    for (key, value) in &cli.flags {
        if matches!(
            key.as_str(),
            "config" | "kernel" | "t" | "input" | "r-min" | "r-max" | "r-count"
        ) {
            continue; // command-specific flags
        }
        config.set(key, value)?;
    }
    Ok(config)
}
