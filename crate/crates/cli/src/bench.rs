//! Monte Carlo MISE benchmarking, rate-vs-n studies, and the simulation
//! checks of the limit theory.
//!
//! Replications are independent work items keyed by `(master_seed, n, rep)`
//! streams; they run in parallel but reduce in a fixed order, so reports are
//! byte-identical regardless of the worker count.

use condeconv_core::distributions::{mix_z, MixtureSpec, Moment, RefDistribution};
use condeconv_core::ecf::{EmpiricalCf, ExactG, Sample};
use condeconv_core::estimator::{
    density_estimate, density_with_cutoff, ise, product_cf, CutoffResult, DensityEstimate,
    EstimatorConfig,
};
use condeconv_core::theory::{lemma3_bound, series_depth, series_variance, DeviationBound};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{linspace, RunConfig};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("distribution {0} has no evaluable density; use cauchy or gaussian")]
    NoDensity(String),
    #[error("rate study needs at least 3 sample sizes with finite MISE, got {0}")]
    TooFewSizes(usize),
    #[error("replication (n={n}, rep={rep}) failed: {message}")]
    ReplicationFailed {
        n: usize,
        rep: usize,
        message: String,
    },
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("{0}")]
    Theory(#[from] condeconv_core::theory::TheoryError),
    #[error("absolute moment of order {0} is infinite for this distribution")]
    InfiniteMoment(f64),
}

/// How replications obtain their CF: sample and use the empirical CF, or
/// substitute the exact `g` at a pinned cutoff (noise-free oracle mode).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunMode {
    Sampling,
    OracleCf { cutoff: f64 },
}

/// A full experiment: distribution, mixture, sample sizes, replication
/// count, estimator configuration, seeds, and the ISE grid.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub dist: RefDistribution,
    pub mix: MixtureSpec,
    pub n_values: Vec<usize>,
    pub reps: usize,
    pub config: EstimatorConfig,
    pub master_seed: u64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    pub mode: RunMode,
}

impl ExperimentPlan {
    /// Plan for ISE-measuring runs: the target must have an evaluable
    /// density (Cauchy or Gaussian).
    pub fn from_run_config(rc: &RunConfig) -> Result<Self, BenchError> {
        if rc.dist.density(0.0).is_none() {
            return Err(BenchError::NoDensity(rc.dist.spec_string()));
        }
        Ok(Self::from_run_config_any_target(rc))
    }

    /// Plan without the density requirement; replications of targets with
    /// no closed-form density carry `ise = NaN`.
    pub fn from_run_config_any_target(rc: &RunConfig) -> Self {
        ExperimentPlan {
            dist: rc.dist,
            mix: rc.mix,
            n_values: rc.n_values.clone(),
            reps: rc.reps,
            config: rc.estimator_config(),
            master_seed: rc.seed,
            grid_min: rc.grid_min,
            grid_max: rc.grid_max,
            grid_points: rc.grid_points,
            mode: RunMode::Sampling,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        linspace(self.grid_min, self.grid_max, self.grid_points)
    }

    /// Stream index for replication `rep` at sample size `n`; unique per
    /// `(n, rep)` pair for any plan this binary can express.
    pub fn stream_id(n: usize, rep: usize) -> u64 {
        ((n as u64) << 20) | rep as u64
    }
}

/// Per-replication outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepStats {
    pub ise: f64,
    pub inv_h: f64,
    pub crossed: bool,
    pub clamps: usize,
}

#[derive(Debug, Clone)]
pub struct RepRow {
    pub n: usize,
    pub rep: usize,
    pub outcome: Result<RepStats, String>,
}

/// Per-size aggregate; `mise` is the replication mean of ISE.
#[derive(Debug, Clone, Copy)]
pub struct AggRow {
    pub n: usize,
    pub mise: f64,
    pub median_ise: f64,
    pub stderr: f64,
    pub excluded: usize,
}

#[derive(Debug, Clone)]
pub struct MiseReport {
    pub rows: Vec<RepRow>,
    pub aggregates: Vec<AggRow>,
}

/// Run one replication and also return the density estimate (for plot
/// emission). Deterministic given the plan.
pub fn run_replication(
    plan: &ExperimentPlan,
    n: usize,
    rep: usize,
) -> Result<(DensityEstimate, RepStats), String> {
    let grid = plan.grid();
    let est = match plan.mode {
        RunMode::Sampling => {
            let mut rng = seeded_rng(plan.master_seed, ExperimentPlan::stream_id(n, rep));
            let x = plan.dist.sample(n, &mut rng);
            let y = plan.dist.sample(n, &mut rng);
            let z = mix_z(&x, &y, &plan.mix).map_err(|e| e.to_string())?;
            let sample = Sample::new(z, plan.mix).map_err(|e| e.to_string())?;
            let ecf = EmpiricalCf::from_sample(&sample);
            density_estimate(&ecf, &grid, &plan.config).map_err(|e| e.to_string())?
        }
        RunMode::OracleCf { cutoff } => {
            let g = ExactG {
                dist: plan.dist,
                gamma: plan.mix.gamma(),
            };
            let base = CutoffResult {
                eps_n: plan.config.eps_n(n),
                c_n: plan.config.c_n(n),
                inv_h: cutoff,
                crossed: cutoff < plan.config.c_n(n),
                d_n: None,
            }
            .with_exact_dn(&g, plan.config.scan_step);
            let depth = plan.config.truncation_depth(n);
            density_with_cutoff(&g, plan.mix.gamma(), &grid, &plan.config, base, depth)
                .map_err(|e| e.to_string())?
        }
    };
    let p = plan.dist;
    let stats = RepStats {
        ise: if p.density(0.0).is_some() {
            ise(&est, |x| p.density(x).unwrap_or(0.0))
        } else {
            f64::NAN
        },
        inv_h: est.cutoff.inv_h,
        crossed: est.cutoff.crossed,
        clamps: est.clamp_activations,
    };
    Ok((est, stats))
}

fn seeded_rng(master_seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Run every `(n, rep)` pair of the plan on up to `threads` workers and
/// aggregate. Failed replications are recorded and excluded from the
/// aggregates, never silently dropped.
pub fn run_experiment(plan: &ExperimentPlan, threads: usize) -> Result<MiseReport, BenchError> {
    let pairs: Vec<(usize, usize)> = plan
        .n_values
        .iter()
        .flat_map(|&n| (0..plan.reps).map(move |rep| (n, rep)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BenchError::ThreadPool(e.to_string()))?;
    let rows: Vec<RepRow> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(n, rep)| RepRow {
                n,
                rep,
                outcome: run_replication(plan, n, rep).map(|(_, stats)| stats),
            })
            .collect()
    });
    let aggregates = aggregate(plan, &rows);
    Ok(MiseReport { rows, aggregates })
}

fn aggregate(plan: &ExperimentPlan, rows: &[RepRow]) -> Vec<AggRow> {
    plan.n_values
        .iter()
        .map(|&n| {
            let mut ises: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n)
                .filter_map(|r| r.outcome.as_ref().ok().map(|s| s.ise))
                .collect();
            let excluded = plan.reps - ises.len();
            if ises.is_empty() {
                return AggRow {
                    n,
                    mise: f64::NAN,
                    median_ise: f64::NAN,
                    stderr: f64::NAN,
                    excluded,
                };
            }
            let m = ises.len() as f64;
            let mise = ises.iter().sum::<f64>() / m;
            ises.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median_ise = if ises.len() % 2 == 1 {
                ises[ises.len() / 2]
            } else {
                0.5 * (ises[ises.len() / 2 - 1] + ises[ises.len() / 2])
            };
            let stderr = if ises.len() > 1 {
                let var = ises.iter().map(|v| (v - mise) * (v - mise)).sum::<f64>() / (m - 1.0);
                (var / m).sqrt()
            } else {
                0.0
            };
            AggRow {
                n,
                mise,
                median_ise,
                stderr,
                excluded,
            }
        })
        .collect()
}

/// One least-squares line with slope standard error (`half_width` is the
/// normal-approximation 2·SE interval) and the residual sum of squares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitLine {
    pub slope: f64,
    pub intercept: f64,
    pub se_slope: f64,
    pub half_width: f64,
    pub sse: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> FitLine {
    let m = xs.len() as f64;
    let x_bar = xs.iter().sum::<f64>() / m;
    let y_bar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - x_bar) * (x - x_bar)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - x_bar) * (y - y_bar))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let dof = (xs.len().saturating_sub(2)).max(1) as f64;
    let se_slope = (sse / dof / sxx).sqrt();
    FitLine {
        slope,
        intercept,
        se_slope,
        half_width: 2.0 * se_slope,
        sse,
    }
}

/// Competing decay-law fits: `log MISE` against `log n` (polynomial rate)
/// and against `log log n` (logarithmic rate, the ordinary-deconvolution
/// benchmark).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub power: FitLine,
    pub log_law: FitLine,
}

pub fn rate_study(report: &MiseReport) -> Result<RateFit, BenchError> {
    let points: Vec<(f64, f64)> = report
        .aggregates
        .iter()
        .filter(|a| a.mise.is_finite() && a.mise > 0.0)
        .map(|a| (a.n as f64, a.mise))
        .collect();
    if points.len() < 3 {
        return Err(BenchError::TooFewSizes(points.len()));
    }
    let log_n: Vec<f64> = points.iter().map(|(n, _)| n.ln()).collect();
    let log_log_n: Vec<f64> = points.iter().map(|(n, _)| n.ln().ln()).collect();
    let log_mise: Vec<f64> = points.iter().map(|(_, m)| m.ln()).collect();
    Ok(RateFit {
        power: least_squares(&log_n, &log_mise),
        log_law: least_squares(&log_log_n, &log_mise),
    })
}

/// Limit-variance simulation check: the empirical variance of
/// `√n·(Re f̂_n(t) − f(t))` over seeded replications against the series
/// variance of the limiting Gaussian.
#[derive(Debug, Clone, Copy)]
pub struct Theorem1Report {
    pub n: usize,
    pub reps: usize,
    pub t: f64,
    /// Product depth, chosen so the truncation bias γ^{2N+2} < 1e-6.
    pub depth: usize,
    pub mc_variance: f64,
    pub series_variance: f64,
    pub ratio: f64,
}

pub fn theorem1_check(
    dist: RefDistribution,
    mix: MixtureSpec,
    t: f64,
    n: usize,
    reps: usize,
    master_seed: u64,
    threads: usize,
) -> Result<Theorem1Report, BenchError> {
    let gamma = mix.gamma();
    let mut depth = 0usize;
    while (gamma * gamma) * gamma.powi(2 * depth as i32) >= 1e-6 {
        depth += 1;
    }
    let f_t = dist.cf(t).re;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BenchError::ThreadPool(e.to_string()))?;
    let stats: Vec<f64> = pool.install(|| {
        (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = seeded_rng(master_seed, ExperimentPlan::stream_id(n, rep));
                let x = dist.sample(n, &mut rng);
                let y = dist.sample(n, &mut rng);
                let z = mix_z(&x, &y, &mix).expect("equal lengths");
                let sample = Sample::new(z, mix).expect("finite draws");
                let ecf = EmpiricalCf::from_sample(&sample);
                let fhat = product_cf(&ecf, t, depth, gamma, 0.0).map_err(|e| {
                    BenchError::ReplicationFailed {
                        n,
                        rep,
                        message: e.to_string(),
                    }
                })?;
                Ok((n as f64).sqrt() * (fhat.re - f_t))
            })
            .collect::<Result<Vec<f64>, BenchError>>()
    })?;
    let m = stats.len() as f64;
    let mean = stats.iter().sum::<f64>() / m;
    let mc_variance = stats.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (m - 1.0);
    let g = ExactG { dist, gamma };
    let k = series_depth(gamma, 1.0, 1e-8) + 10;
    let series = series_variance(&g, &dist, gamma, t, k)?;
    Ok(Theorem1Report {
        n,
        reps,
        t,
        depth,
        mc_variance,
        series_variance: series,
        ratio: mc_variance / series,
    })
}

/// Empirical exceedance of the sup-deviation bound: how often
/// `sup_{|θ| ≤ a} |f_n(θ) − f(θ)|` exceeds `b`, against the exponential
/// part of the deviation bound (the `ν_r/n` term is omitted and flagged).
#[derive(Debug, Clone, Copy)]
pub struct Lemma3Report {
    pub n: usize,
    pub reps: usize,
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub step: f64,
    pub exceed: usize,
    pub freq: f64,
    pub bound: DeviationBound,
}

#[allow(clippy::too_many_arguments)]
pub fn lemma3_check(
    dist: RefDistribution,
    r: f64,
    n: usize,
    a: f64,
    b: f64,
    reps: usize,
    step: f64,
    master_seed: u64,
    threads: usize,
) -> Result<Lemma3Report, BenchError> {
    // the bound's Θ takes β_r on the r ≤ 1 branch, β_{r/2} above it
    let order = if r <= 1.0 { r } else { r / 2.0 };
    let spec = dist
        .abs_moment(order)
        .map_err(|e| BenchError::ReplicationFailed {
            n,
            rep: 0,
            message: e.to_string(),
        })?;
    let moment = match spec.beta_r {
        Moment::Finite(v) => v,
        Moment::Infinite => return Err(BenchError::InfiniteMoment(order)),
    };
    let bound = lemma3_bound(n, a, b, r, moment)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BenchError::ThreadPool(e.to_string()))?;
    let exceed = pool.install(|| {
        (0..reps)
            .into_par_iter()
            .map(|rep| {
                let draws = dist.sample_seeded(n, master_seed, ExperimentPlan::stream_id(n, rep));
                let ecf = EmpiricalCf::from_raw(draws).expect("finite draws");
                usize::from(ecf.sup_deviation(&dist, a, step) > b)
            })
            .sum::<usize>()
    });
    Ok(Lemma3Report {
        n,
        reps,
        a,
        b,
        r,
        step,
        exceed,
        freq: exceed as f64 / reps as f64,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_plan() -> ExperimentPlan {
        ExperimentPlan {
            dist: RefDistribution::cauchy(1.0).unwrap(),
            mix: MixtureSpec::from_gamma(0.5).unwrap(),
            n_values: vec![400],
            reps: 3,
            config: EstimatorConfig {
                panels: 256,
                ..EstimatorConfig::default()
            },
            master_seed: 11,
            grid_min: -25.0,
            grid_max: 25.0,
            grid_points: 501,
            mode: RunMode::Sampling,
        }
    }

    #[test]
    fn replications_are_deterministic() {
        let plan = small_plan();
        let a = run_experiment(&plan, 1).unwrap();
        let b = run_experiment(&plan, 2).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.n, rb.n);
            assert_eq!(ra.rep, rb.rep);
            let sa = ra.outcome.as_ref().unwrap();
            let sb = rb.outcome.as_ref().unwrap();
            assert_eq!(
                sa.ise.to_bits(),
                sb.ise.to_bits(),
                "bitwise identical across pools"
            );
            assert_eq!(sa.inv_h.to_bits(), sb.inv_h.to_bits());
        }
    }

    #[test]
    fn sampled_estimate_has_near_unit_mass() {
        // soft sanity bound on well-posed runs, asserted here rather than
        // in the constructor
        let plan = small_plan();
        let (est, _) = run_replication(&plan, 400, 0).unwrap();
        let mass = condeconv_core::numeric::trapezoid(&est.grid_x, &est.values);
        assert!((0.8..=1.2).contains(&mass), "estimate mass {mass}");
    }

    #[test]
    fn oracle_mode_has_zero_variance() {
        let mut plan = small_plan();
        plan.mode = RunMode::OracleCf { cutoff: 2.0 };
        plan.config.n_trunc = Some(10);
        let report = run_experiment(&plan, 2).unwrap();
        let agg = &report.aggregates[0];
        assert_eq!(agg.excluded, 0);
        assert!(agg.stderr == 0.0, "identical replications");
        // Plancherel tail e^{-4}/(2π) up to grid truncation
        assert!((agg.mise - 0.0029150).abs() < 2e-4, "mise = {}", agg.mise);
    }

    #[test]
    fn rate_study_exact_power_law() {
        let rows = vec![];
        let aggregates = vec![1000usize, 4000, 16000, 64000]
            .into_iter()
            .map(|n| AggRow {
                n,
                mise: 1.0 / n as f64,
                median_ise: 1.0 / n as f64,
                stderr: 0.0,
                excluded: 0,
            })
            .collect();
        let fit = rate_study(&MiseReport { rows, aggregates }).unwrap();
        assert!(
            (fit.power.slope + 1.0).abs() < 1e-10,
            "slope {}",
            fit.power.slope
        );
        assert!(fit.power.sse < 1e-20);
    }

    #[test]
    fn rate_study_log_law() {
        let ns = [1000usize, 10_000, 100_000, 1_000_000];
        let aggregates = ns
            .iter()
            .map(|&n| {
                let mise = (n as f64).ln().powi(-2);
                AggRow {
                    n,
                    mise,
                    median_ise: mise,
                    stderr: 0.0,
                    excluded: 0,
                }
            })
            .collect();
        let fit = rate_study(&MiseReport {
            rows: vec![],
            aggregates,
        })
        .unwrap();
        assert!(
            (fit.log_law.slope + 2.0).abs() < 1e-10,
            "log-log-n slope {}",
            fit.log_law.slope
        );
        assert!(fit.log_law.sse < 1e-20, "exactly linear in log log n");
        assert!(
            fit.power.slope.abs() < 0.35,
            "log-n slope nearly flat for a log law, got {}",
            fit.power.slope
        );
    }

    #[test]
    fn rate_study_needs_three_sizes() {
        let aggregates = vec![
            AggRow {
                n: 100,
                mise: 0.1,
                median_ise: 0.1,
                stderr: 0.0,
                excluded: 0,
            },
            AggRow {
                n: 200,
                mise: 0.05,
                median_ise: 0.05,
                stderr: 0.0,
                excluded: 0,
            },
        ];
        assert!(matches!(
            rate_study(&MiseReport {
                rows: vec![],
                aggregates
            }),
            Err(BenchError::TooFewSizes(2))
        ));
    }

    #[test]
    fn degenerate_replications_are_excluded_and_counted() {
        // at n = 2 the threshold eps_n exceeds 1, so the very first scan
        // point already crosses and every replication fails
        let mut plan = small_plan();
        plan.n_values = vec![2];
        let report = run_experiment(&plan, 1).unwrap();
        assert!(report.rows.iter().all(|r| r.outcome.is_err()));
        let agg = &report.aggregates[0];
        assert_eq!(agg.excluded, plan.reps);
        assert!(agg.mise.is_nan(), "no surviving replications to average");
    }

    #[test]
    fn exchangeable_streams() {
        // the same (n, rep) pair always reproduces the same ISE, regardless
        // of which other pairs run
        let mut plan = small_plan();
        let full = run_experiment(&plan, 2).unwrap();
        plan.reps = 1;
        let only_first = run_experiment(&plan, 1).unwrap();
        let a = full.rows[0].outcome.as_ref().unwrap().ise;
        let b = only_first.rows[0].outcome.as_ref().unwrap().ise;
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
