//! Flat `key=value` run configuration: file parsing, flag merging with
//! CLI-over-file-over-default precedence, range validation, and the
//! effective-config preamble that every output file starts with.
//!
//! Preambles are written as `# key=value` comment lines. When a file is fed
//! back with `--config`, commented assignments whose key is a known config
//! key are read as entries; all other comment lines are ignored. Bare
//! `key=value` lines must use known keys. Emitted diagnostics (eps_n,
//! inv_h, mise, …) are not config keys, so a preamble-bearing output file
//! is itself a valid config reproducing the run.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use condeconv_core::distributions::{MixtureSpec, RefDistribution};
use condeconv_core::estimator::EstimatorConfig;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot parse `{value}` ({reason})")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("key `{key}`: {reason}")]
    OutOfRange { key: String, reason: String },
    #[error("config file names command `{file}` but `{invoked}` was invoked")]
    CommandMismatch { file: String, invoked: String },
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Dispatchable commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandName {
    Estimate,
    Bench,
    Rate,
    TheoryCheck,
    Fig1,
}

impl fmt::Display for CommandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CommandName::Estimate => "estimate",
            CommandName::Bench => "bench",
            CommandName::Rate => "rate",
            CommandName::TheoryCheck => "theory-check",
            CommandName::Fig1 => "fig1",
        };
        f.write_str(s)
    }
}

/// Raw CLI flags shared by every subcommand; everything is optional so that
/// config-file and default values can fill the gaps.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// Flat key=value config file; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Distribution spec: cauchy[:scale], gaussian[:sigma], stable:a[:b], twopoint.
    #[arg(long)]
    pub dist: Option<String>,
    /// Mixing ratio γ = alpha/beta in (0,1); shorthand for alpha=γ, beta=1.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Mixture weight of X (requires --beta).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Mixture weight of Y (requires --alpha).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Sample size(s); comma-separated list for bench/rate.
    #[arg(long)]
    pub n: Option<String>,
    /// Product truncation depth, or `auto` for N = ceil(nu·ln n).
    #[arg(long = "N")]
    pub n_trunc: Option<String>,
    /// Threshold constant A in eps_n = A·n^{-1/2}·(ln n)^{1/2}.
    #[arg(long = "A")]
    pub a_threshold: Option<f64>,
    /// Cap constant in c_n = (zeta·ln n)^{1/a_exp}.
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Depth-schedule constant in N = ceil(nu·ln n).
    #[arg(long)]
    pub nu: Option<f64>,
    /// Stability exponent used by the c_n schedule.
    #[arg(long = "a-exp")]
    pub a_exp: Option<f64>,
    /// Replications per sample size.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Master seed; a fixed default keeps unseeded runs reproducible.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker-thread cap (execution detail; never echoed into preambles).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory (execution detail; never echoed into preambles).
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
    /// Left edge of the x-grid.
    #[arg(long = "grid-min")]
    pub grid_min: Option<f64>,
    /// Right edge of the x-grid.
    #[arg(long = "grid-max")]
    pub grid_max: Option<f64>,
    /// Number of x-grid points.
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,
    /// Composite-Simpson panel count (even, >= 8).
    #[arg(long)]
    pub panels: Option<usize>,
    /// Cutoff-scan resolution.
    #[arg(long = "scan-step")]
    pub scan_step: Option<f64>,
    /// Denominator clamp, or `auto` for eps_n/2.
    #[arg(long = "eps-floor")]
    pub eps_floor: Option<String>,
}

const KNOWN_KEYS: &[&str] = &[
    "command",
    "dist",
    "alpha",
    "beta",
    "gamma",
    "n",
    "N",
    "A",
    "zeta",
    "nu",
    "a_exp",
    "eps_floor",
    "scan_step",
    "panels",
    "reps",
    "seed",
    "grid_min",
    "grid_max",
    "grid_points",
];

/// Fully resolved, validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandName,
    pub dist: RefDistribution,
    pub mix: MixtureSpec,
    pub n_values: Vec<usize>,
    pub n_trunc: Option<usize>,
    pub a_threshold: f64,
    pub zeta: f64,
    pub nu: f64,
    pub a_exp: f64,
    pub eps_floor: Option<f64>,
    pub scan_step: f64,
    pub panels: usize,
    pub reps: usize,
    pub seed: u64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    pub threads: usize,
    pub out_dir: PathBuf,
}

/// Parse flat config text. See the module docs for the comment-line rules.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (content, commented) = if let Some(rest) = line.strip_prefix('#') {
            (rest.trim_start_matches(['#', ' ', '\t']).trim(), true)
        } else {
            (line, false)
        };
        let Some((key, value)) = split_assignment(content) else {
            if commented {
                continue; // prose comment
            }
            return Err(ConfigError::BadValue {
                key: String::new(),
                value: content.to_string(),
                reason: "expected key=value".into(),
            });
        };
        if !KNOWN_KEYS.contains(&key) {
            if commented {
                continue; // diagnostic comment such as `# eps_n=...`
            }
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        map.insert(key.to_string(), value.to_string());
    }
    Ok(map)
}

fn split_assignment(content: &str) -> Option<(&str, &str)> {
    let eq = content.find('=')?;
    let key = &content[..eq];
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    Some((key, content[eq + 1..].trim()))
}

/// Parse a distribution spec string (`cauchy:2`, `stable:1.5:1`, …).
pub fn parse_dist(spec: &str) -> Result<RefDistribution, ConfigError> {
    let err = |reason: &str| ConfigError::BadValue {
        key: "dist".into(),
        value: spec.into(),
        reason: reason.into(),
    };
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or("");
    let args: Vec<&str> = parts.collect();
    let parse_num = |s: &str| s.parse::<f64>().map_err(|e| err(&e.to_string()));
    let dist = match (name, args.len()) {
        ("cauchy", 0) => RefDistribution::cauchy(1.0),
        ("cauchy", 1) => RefDistribution::cauchy(parse_num(args[0])?),
        ("gaussian", 0) => RefDistribution::gaussian(1.0),
        ("gaussian", 1) => RefDistribution::gaussian(parse_num(args[0])?),
        ("stable", 1) => RefDistribution::symmetric_stable(parse_num(args[0])?, 1.0),
        ("stable", 2) => {
            RefDistribution::symmetric_stable(parse_num(args[0])?, parse_num(args[1])?)
        }
        ("twopoint", 0) => Ok(RefDistribution::two_point()),
        _ => {
            return Err(err(
                "expected cauchy[:scale], gaussian[:sigma], stable:a[:b], or twopoint",
            ))
        }
    };
    dist.map_err(|e| err(&e.to_string()))
}

struct Resolver {
    file: BTreeMap<String, String>,
}

impl Resolver {
    fn take(&self, key: &str) -> Option<&str> {
        self.file.get(key).map(String::as_str)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.take(key)
            .map(|v| {
                v.parse::<f64>().map_err(|e| ConfigError::BadValue {
                    key: key.into(),
                    value: v.into(),
                    reason: e.to_string(),
                })
            })
            .transpose()
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.take(key)
            .map(|v| {
                v.parse::<usize>().map_err(|e| ConfigError::BadValue {
                    key: key.into(),
                    value: v.into(),
                    reason: e.to_string(),
                })
            })
            .transpose()
    }

    fn u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.take(key)
            .map(|v| {
                v.parse::<u64>().map_err(|e| ConfigError::BadValue {
                    key: key.into(),
                    value: v.into(),
                    reason: e.to_string(),
                })
            })
            .transpose()
    }
}

fn out_of_range(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::OutOfRange {
        key: key.into(),
        reason: reason.into(),
    }
}

fn parse_n_list(key: &str, text: &str) -> Result<Vec<usize>, ConfigError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let v: usize =
            part.parse()
                .map_err(|e: std::num::ParseIntError| ConfigError::BadValue {
                    key: key.into(),
                    value: part.into(),
                    reason: e.to_string(),
                })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(out_of_range(key, "at least one sample size required"));
    }
    for v in &out {
        if *v < 2 {
            return Err(out_of_range(
                key,
                format!("sample sizes must be >= 2, got {v}"),
            ));
        }
    }
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(out_of_range(
            key,
            "sample sizes must be strictly increasing",
        ));
    }
    Ok(out)
}

fn parse_auto_or<T, F>(key: &str, text: &str, parse: F) -> Result<Option<T>, ConfigError>
where
    F: Fn(&str) -> Result<T, String>,
{
    if text == "auto" {
        return Ok(None);
    }
    parse(text)
        .map(Some)
        .map_err(|reason| ConfigError::BadValue {
            key: key.into(),
            value: text.into(),
            reason,
        })
}

impl RunConfig {
    /// Merge flags over the optional config file over per-command defaults,
    /// then range-validate every numeric key.
    pub fn resolve(command: CommandName, flags: &Flags) -> Result<Self, ConfigError> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                    path: path.clone(),
                    source,
                })?;
                parse_config_text(&text)?
            }
            None => BTreeMap::new(),
        };
        let r = Resolver { file };

        if let Some(file_cmd) = r.take("command") {
            if file_cmd != command.to_string() {
                return Err(ConfigError::CommandMismatch {
                    file: file_cmd.to_string(),
                    invoked: command.to_string(),
                });
            }
        }

        let dist_spec = flags
            .dist
            .clone()
            .or_else(|| r.take("dist").map(str::to_string))
            .unwrap_or_else(|| "cauchy:1".to_string());
        let dist = parse_dist(&dist_spec)?;

        // mixture: alpha/beta when given, else gamma, else the 0.5 default;
        // when both appear they must agree
        let alpha = flags.alpha.or(r.f64("alpha")?);
        let beta = flags.beta.or(r.f64("beta")?);
        let gamma = flags.gamma.or(r.f64("gamma")?);
        let mix = match (alpha, beta) {
            (Some(a), Some(b)) => {
                let mix =
                    MixtureSpec::new(a, b).map_err(|e| out_of_range("alpha", e.to_string()))?;
                if let Some(g) = gamma {
                    if (mix.gamma() - g).abs() > 1e-12 {
                        return Err(out_of_range(
                            "gamma",
                            format!("gamma={g} contradicts alpha/beta={}", mix.gamma()),
                        ));
                    }
                }
                mix
            }
            (None, None) => {
                let g = gamma.unwrap_or(0.5);
                if !(g > 0.0 && g < 1.0) {
                    return Err(out_of_range(
                        "gamma",
                        format!("gamma must lie in (0,1), got {g}"),
                    ));
                }
                MixtureSpec::from_gamma(g).map_err(|e| out_of_range("gamma", e.to_string()))?
            }
            _ => {
                return Err(out_of_range(
                    "alpha",
                    "alpha and beta must be given together",
                ))
            }
        };

        let default_n: &[usize] = match command {
            CommandName::TheoryCheck => &[10_000],
            _ => &[1000],
        };
        let n_values = match flags.n.clone().or_else(|| r.take("n").map(str::to_string)) {
            Some(text) => parse_n_list("n", &text)?,
            None => default_n.to_vec(),
        };

        let n_trunc_text = flags
            .n_trunc
            .clone()
            .or_else(|| r.take("N").map(str::to_string));
        let n_trunc = match n_trunc_text {
            Some(text) => parse_auto_or("N", &text, |s| {
                s.parse::<usize>().map_err(|e| e.to_string())
            })?,
            None => match command {
                CommandName::Fig1 => Some(10),
                _ => None,
            },
        };

        let eps_floor_text = flags
            .eps_floor
            .clone()
            .or_else(|| r.take("eps_floor").map(str::to_string));
        let eps_floor = match eps_floor_text {
            Some(text) => parse_auto_or("eps_floor", &text, |s| {
                s.parse::<f64>().map_err(|e| e.to_string())
            })?,
            None => None,
        };
        if let Some(fl) = eps_floor {
            if !(fl >= 0.0) {
                return Err(out_of_range("eps_floor", "must be >= 0"));
            }
        }

        let a_threshold = flags.a_threshold.or(r.f64("A")?).unwrap_or(2.0);
        if !(a_threshold > 0.0) {
            return Err(out_of_range("A", "must be > 0"));
        }
        let zeta = flags.zeta.or(r.f64("zeta")?).unwrap_or(1.0);
        if !(zeta > 0.0) {
            return Err(out_of_range("zeta", "must be > 0"));
        }
        let nu = flags.nu.or(r.f64("nu")?).unwrap_or(1.0);
        if !(nu > 0.0) {
            return Err(out_of_range("nu", "must be > 0"));
        }
        let a_exp = flags.a_exp.or(r.f64("a_exp")?).unwrap_or(1.0);
        if !(a_exp > 0.0 && a_exp <= 2.0) {
            return Err(out_of_range("a_exp", "must lie in (0, 2]"));
        }
        let scan_step = flags.scan_step.or(r.f64("scan_step")?).unwrap_or(0.01);
        if !(scan_step > 0.0) {
            return Err(out_of_range("scan_step", "must be > 0"));
        }
        let panels = flags.panels.or(r.usize("panels")?).unwrap_or(2048);
        if panels < 8 || !panels.is_multiple_of(2) {
            return Err(out_of_range("panels", "must be even and >= 8"));
        }
        let default_reps = match command {
            CommandName::TheoryCheck => 2000,
            CommandName::Estimate => 1,
            _ => 50,
        };
        let reps = flags.reps.or(r.usize("reps")?).unwrap_or(default_reps);
        if reps < 1 {
            return Err(out_of_range("reps", "must be >= 1"));
        }
        let seed = flags.seed.or(r.u64("seed")?).unwrap_or(1729);

        let (dmin, dmax, dpoints) = match command {
            CommandName::Fig1 => (-5.0, 5.0, 401),
            _ => (-25.0, 25.0, 2001),
        };
        let grid_min = flags.grid_min.or(r.f64("grid_min")?).unwrap_or(dmin);
        let grid_max = flags.grid_max.or(r.f64("grid_max")?).unwrap_or(dmax);
        if !(grid_min < grid_max) || !grid_min.is_finite() || !grid_max.is_finite() {
            return Err(out_of_range(
                "grid_min",
                "grid_min must be < grid_max, both finite",
            ));
        }
        let grid_points = flags
            .grid_points
            .or(r.usize("grid_points")?)
            .unwrap_or(dpoints);
        if grid_points < 2 {
            return Err(out_of_range("grid_points", "must be >= 2"));
        }

        let threads = flags
            .threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
        if threads < 1 {
            return Err(out_of_range("threads", "must be >= 1"));
        }
        let out_dir = flags
            .out_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("out"));

        Ok(RunConfig {
            command,
            dist,
            mix,
            n_values,
            n_trunc,
            a_threshold,
            zeta,
            nu,
            a_exp,
            eps_floor,
            scan_step,
            panels,
            reps,
            seed,
            grid_min,
            grid_max,
            grid_points,
            threads,
            out_dir,
        })
    }

    /// The estimator-facing slice of this configuration.
    pub fn estimator_config(&self) -> EstimatorConfig {
        EstimatorConfig {
            n_trunc: self.n_trunc,
            nu: self.nu,
            a_threshold: self.a_threshold,
            zeta: self.zeta,
            a_exponent: self.a_exp,
            eps_floor: self.eps_floor,
            scan_step: self.scan_step,
            panels: self.panels,
        }
    }

    /// Inclusive uniform x-grid.
    pub fn grid(&self) -> Vec<f64> {
        linspace(self.grid_min, self.grid_max, self.grid_points)
    }

    /// Effective-config preamble; parseable back as a config file.
    /// Execution details (threads, out-dir) are deliberately absent so that
    /// reports are byte-identical across worker counts.
    pub fn preamble(&self) -> String {
        let n_list = self
            .n_values
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let n_trunc = self.n_trunc.map_or("auto".to_string(), |v| v.to_string());
        let eps_floor = self.eps_floor.map_or("auto".to_string(), |v| v.to_string());
        format!(
            "# command={}\n# dist={}\n# alpha={}\n# beta={}\n# gamma={}\n# n={}\n# N={}\n\
             # A={}\n# zeta={}\n# nu={}\n# a_exp={}\n# eps_floor={}\n# scan_step={}\n\
             # panels={}\n# reps={}\n# seed={}\n# grid_min={}\n# grid_max={}\n# grid_points={}\n",
            self.command,
            self.dist,
            self.mix.alpha(),
            self.mix.beta(),
            self.mix.gamma(),
            n_list,
            n_trunc,
            self.a_threshold,
            self.zeta,
            self.nu,
            self.a_exp,
            eps_floor,
            self.scan_step,
            self.panels,
            self.reps,
            self.seed,
            self.grid_min,
            self.grid_max,
            self.grid_points,
        )
    }
}

/// Inclusive uniform grid with `points` nodes.
pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    let span = max - min;
    let denom = (points - 1) as f64;
    (0..points).map(|i| min + span * i as f64 / denom).collect()
}
