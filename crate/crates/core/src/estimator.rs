//! The estimation pipeline: truncated product-CF estimator, data-driven
//! spectral cutoff, Fourier-inversion density estimate, clip-and-renormalize
//! correction, and integrated squared error.
//!
//! With `g(t) = f(t)·f(γt)` the characteristic function of the target
//! recovers as the telescoping product `∏_{k≥0} g(γ^{2k}t)/g(γ^{2k+1}t)`.
//! The estimator truncates the product at depth `N`, plugs in the empirical
//! CF, and inverts the result over `|t| ≤ 1/h_n`, where the cutoff `1/h_n`
//! is the first point at which `|g_n|` falls to the threshold
//! `ε_n = A·n^{-1/2}·(ln n)^{1/2}`, capped at `c_n = (ζ·ln n)^{1/a}`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::ecf::{CharFn, EmpiricalCf};
use crate::math;
use crate::numeric::{cis, simpson_weight, trapezoid};

const RENORM: usize = 512;

/// Pipeline errors.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorError {
    /// `|g_n(scan_step)| ≤ ε_n` already at the first scan point; no usable
    /// cutoff exists. Retry with larger `n` or smaller `A`.
    DegenerateCutoff { eps_n: f64, scan_step: f64 },
    /// A product denominator was exactly zero with no clamp floor; `k` is
    /// the offending factor index.
    ZeroDenominator { k: usize, t: f64 },
    /// The x-grid extends beyond what the quadrature can resolve:
    /// `max|x|` must stay at or below `panels / (4·inv_h)`.
    GridTooWide { max_abs_x: f64, limit: f64 },
    /// Everything clipped to zero; nothing left to renormalize.
    DegenerateEstimate,
    /// The sample size does not admit the cutoff schedule (needs `n ≥ 2`).
    SampleTooSmall { n: usize },
    /// The ECF carries no mixture, so `γ` is unknown.
    MissingMixture,
    /// Configuration violates its invariants.
    BadConfig(&'static str),
}

impl fmt::Display for EstimatorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorError::DegenerateCutoff { eps_n, scan_step } => write!(
                f,
                "degenerate cutoff: |g_n({scan_step})| <= eps_n = {eps_n} at the first scan point"
            ),
            EstimatorError::ZeroDenominator { k, t } => {
                write!(
                    f,
                    "product factor k={k} at t={t} has an exactly zero denominator"
                )
            }
            EstimatorError::GridTooWide { max_abs_x, limit } => write!(
                f,
                "x-grid reaches |x|={max_abs_x} but the quadrature resolves only |x| <= {limit}; \
                 raise panels or shrink the grid"
            ),
            EstimatorError::DegenerateEstimate => {
                write!(f, "estimate is identically zero after clipping")
            }
            EstimatorError::SampleTooSmall { n } => {
                write!(f, "cutoff schedule needs n >= 2, got {n}")
            }
            EstimatorError::MissingMixture => {
                write!(
                    f,
                    "empirical CF was built without mixture weights; gamma is unknown"
                )
            }
            EstimatorError::BadConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for EstimatorError {}

/// Tuning knobs of the estimator.
///
/// `n_trunc` pins the product depth directly; when `None` the depth follows
/// the schedule `N = ceil(nu·ln n)`. `eps_floor = None` selects the default
/// denominator clamp `ε_n/2`; the clamp is a safety net expected to stay
/// inactive (activations are counted and reported).
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    /// Direct truncation-depth override.
    pub n_trunc: Option<usize>,
    /// Depth schedule constant in `N = ceil(nu·ln n)`.
    pub nu: f64,
    /// Threshold constant in `ε_n = A·n^{-1/2}·(ln n)^{1/2}`.
    pub a_threshold: f64,
    /// Cap-schedule constant in `c_n = (zeta·ln n)^{1/a_exponent}`.
    pub zeta: f64,
    /// Stability exponent used by the `c_n` schedule.
    pub a_exponent: f64,
    /// Denominator clamp; `None` means `ε_n/2`.
    pub eps_floor: Option<f64>,
    /// Resolution of the cutoff scan.
    pub scan_step: f64,
    /// Composite-Simpson panel count (even, ≥ 8).
    pub panels: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            n_trunc: None,
            nu: 1.0,
            a_threshold: 2.0,
            zeta: 1.0,
            a_exponent: 1.0,
            eps_floor: None,
            scan_step: 0.01,
            panels: 2048,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        if !(self.a_threshold > 0.0) {
            return Err(EstimatorError::BadConfig("A must be > 0"));
        }
        if !(self.zeta > 0.0) {
            return Err(EstimatorError::BadConfig("zeta must be > 0"));
        }
        if !(self.nu > 0.0) {
            return Err(EstimatorError::BadConfig("nu must be > 0"));
        }
        if !(self.a_exponent > 0.0 && self.a_exponent <= 2.0) {
            return Err(EstimatorError::BadConfig("a_exponent must lie in (0, 2]"));
        }
        if !(self.scan_step > 0.0) {
            return Err(EstimatorError::BadConfig("scan_step must be > 0"));
        }
        if self.panels < 8 || !self.panels.is_multiple_of(2) {
            return Err(EstimatorError::BadConfig("panels must be even and >= 8"));
        }
        if let Some(fl) = self.eps_floor {
            if !(fl >= 0.0) {
                return Err(EstimatorError::BadConfig("eps_floor must be >= 0"));
            }
        }
        Ok(())
    }

    /// Realized truncation depth for a sample of size `n`.
    pub fn truncation_depth(&self, n: usize) -> usize {
        match self.n_trunc {
            Some(depth) => depth,
            None => math::ceil(self.nu * math::ln(n as f64)) as usize,
        }
    }

    /// `ε_n = A·n^{-1/2}·(ln n)^{1/2}`.
    pub fn eps_n(&self, n: usize) -> f64 {
        self.a_threshold * math::sqrt(math::ln(n as f64) / n as f64)
    }

    /// `c_n = (ζ·ln n)^{1/a_exponent}`.
    pub fn c_n(&self, n: usize) -> f64 {
        math::powf(self.zeta * math::ln(n as f64), 1.0 / self.a_exponent)
    }
}

/// Realized cutoff. `crossed` records whether the ε-crossing bound was
/// active (as opposed to the cap `c_n`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffResult {
    pub eps_n: f64,
    pub c_n: f64,
    /// Realized `1/h_n`, always in `(0, c_n]`.
    pub inv_h: f64,
    pub crossed: bool,
    /// `inf_{|s| ≤ c_n} |g(s)|`, available when an exact `g` is known.
    pub d_n: Option<f64>,
}

impl CutoffResult {
    /// Attach the diagnostic `d_n = inf_{|s| ≤ c_n} |g(s)|` computed from an
    /// exact `g` on the scan grid.
    pub fn with_exact_dn<C: CharFn>(mut self, g: &C, scan_step: f64) -> Self {
        let count = (math::floor(self.c_n / scan_step + 1e-9) as usize) + 1;
        let mut inf = f64::INFINITY;
        for j in 0..count {
            let m = g.eval(scan_step * j as f64).norm();
            if m < inf {
                inf = m;
            }
        }
        self.d_n = Some(inf);
        self
    }
}

/// Scan `|g_n|` from zero in steps of `scan_step` and return the realized
/// cutoff: the last grid point before `|g_n|` first drops to `ε_n`, capped
/// at `c_n`.
///
/// `|g_n|` oscillates near its noise floor, so the first crossing (rather
/// than the last exceedance) is the deterministic, conservative reading; for
/// a population `|g|` that is non-increasing the two coincide.
pub fn select_cutoff<C: CharFn>(
    cf: &C,
    n: usize,
    config: &EstimatorConfig,
    scan_step: f64,
) -> Result<CutoffResult, EstimatorError> {
    config.validate()?;
    if n < 2 {
        return Err(EstimatorError::SampleTooSmall { n });
    }
    if !(scan_step > 0.0) {
        return Err(EstimatorError::BadConfig("scan_step must be > 0"));
    }
    let eps_n = config.eps_n(n);
    let c_n = config.c_n(n);
    let count = math::floor(c_n / scan_step + 1e-9) as usize;
    let values = cf.eval_arith_grid(scan_step, count + 1);
    for (j, value) in values.iter().enumerate().skip(1) {
        if value.norm() <= eps_n {
            if j == 1 {
                return Err(EstimatorError::DegenerateCutoff { eps_n, scan_step });
            }
            return Ok(CutoffResult {
                eps_n,
                c_n,
                inv_h: scan_step * (j - 1) as f64,
                crossed: true,
                d_n: None,
            });
        }
    }
    Ok(CutoffResult {
        eps_n,
        c_n,
        inv_h: c_n,
        crossed: false,
        d_n: None,
    })
}

#[inline]
fn clamp_denominator(den: Complex64, eps_floor: f64) -> (Complex64, bool) {
    let mag = den.norm();
    if mag >= eps_floor {
        (den, false)
    } else if mag == 0.0 {
        // no phase to preserve
        (Complex64::new(eps_floor, 0.0), true)
    } else {
        (den * (eps_floor / mag), true)
    }
}

/// Truncated product estimator
/// `∏_{k=0..N} g(γ^{2k}t) / g(γ^{2k+1}t)` of the target CF at `t`.
///
/// Denominators with magnitude below `eps_floor` are clamped to that
/// magnitude with phase preserved. `eps_floor = 0` disables clamping, in
/// which case an exactly zero denominator is an error naming the factor.
///
/// ```
/// use condeconv_core::distributions::RefDistribution;
/// use condeconv_core::ecf::ExactG;
/// use condeconv_core::estimator::product_cf;
///
/// // with the exact g of a Cauchy mixture, depth 10 recovers the target CF
/// let g = ExactG { dist: RefDistribution::cauchy(1.0).unwrap(), gamma: 0.5 };
/// let f1 = product_cf(&g, 1.0, 10, 0.5, 0.0).unwrap();
/// assert!((f1.re - (-1.0f64).exp()).abs() < 1e-6);
/// ```
pub fn product_cf<C: CharFn>(
    cf: &C,
    t: f64,
    n_trunc: usize,
    gamma: f64,
    eps_floor: f64,
) -> Result<Complex64, EstimatorError> {
    assert!(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    let mut acc = Complex64::new(1.0, 0.0);
    let mut scale = 1.0; // γ^{2k}
    for k in 0..=n_trunc {
        let num = cf.eval(scale * t);
        let den = cf.eval(scale * gamma * t);
        let (den, _) = clamp_denominator(den, eps_floor);
        if den.norm() == 0.0 {
            return Err(EstimatorError::ZeroDenominator { k, t });
        }
        acc *= num / den;
        scale *= gamma * gamma;
    }
    Ok(acc)
}

/// [`product_cf`] on the uniform grid `t_j = j·t_step`, `j < count`,
/// returning the values and the number of clamp activations.
///
/// Each of the `2N+2` scales is one arithmetic-grid ECF pass, which is what
/// makes sample sweeps affordable.
pub fn product_cf_grid<C: CharFn>(
    cf: &C,
    t_step: f64,
    count: usize,
    n_trunc: usize,
    gamma: f64,
    eps_floor: f64,
) -> Result<(Vec<Complex64>, usize), EstimatorError> {
    assert!(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    let mut acc = vec![Complex64::new(1.0, 0.0); count];
    let mut clamps = 0usize;
    let mut scale = 1.0;
    for k in 0..=n_trunc {
        let nums = cf.eval_arith_grid(t_step * scale, count);
        let dens = cf.eval_arith_grid(t_step * scale * gamma, count);
        for j in 0..count {
            let (den, clamped) = clamp_denominator(dens[j], eps_floor);
            if clamped {
                clamps += 1;
            }
            if den.norm() == 0.0 {
                return Err(EstimatorError::ZeroDenominator {
                    k,
                    t: t_step * j as f64,
                });
            }
            acc[j] *= nums[j] / den;
        }
        scale *= gamma * gamma;
    }
    Ok((acc, clamps))
}

/// Density estimate on a grid of abscissas, with the cutoff and config that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub grid_x: Vec<f64>,
    pub values: Vec<f64>,
    pub cutoff: CutoffResult,
    pub config: EstimatorConfig,
    /// Realized truncation depth.
    pub n_trunc: usize,
    /// Denominator clamp activations across all quadrature nodes.
    pub clamp_activations: usize,
    /// Whether [`correct_density`] has been applied.
    pub corrected: bool,
}

/// Fourier inversion of precomputed CF values on the Simpson nodes of
/// `[0, inv_h]`, folded onto the half-line by Hermitian symmetry:
/// `p(x) = (1/π) ∫_0^{inv_h} Re[e^{-itx}·f̂(t)] dt`. Real by construction.
fn invert_nodes(fhat: &[Complex64], inv_h: f64, grid_x: &[f64]) -> Vec<f64> {
    let panels = fhat.len() - 1;
    let h = inv_h / panels as f64;
    let norm = h / (3.0 * core::f64::consts::PI);
    grid_x
        .iter()
        .map(|&x| {
            let rot = cis(-h * x);
            let mut w = Complex64::new(1.0, 0.0);
            let mut acc = 0.0;
            for (j, &fh) in fhat.iter().enumerate() {
                if j % RENORM == 0 {
                    w = cis(-h * x * j as f64);
                }
                acc += simpson_weight(j, panels) * (w.re * fh.re - w.im * fh.im);
                w *= rot;
            }
            acc * norm
        })
        .collect()
}

fn validate_grid(grid_x: &[f64], inv_h: f64, panels: usize) -> Result<(), EstimatorError> {
    let mut max_abs = 0.0f64;
    for &x in grid_x {
        if !x.is_finite() {
            return Err(EstimatorError::BadConfig(
                "x-grid contains a non-finite point",
            ));
        }
        max_abs = max_abs.max(math::abs(x));
    }
    // e^{-itx} oscillates with period 2π/|x|; below ~8 panels per period the
    // Simpson rule stops resolving it. panels/(4·inv_h) keeps 8π ≈ 25.
    let limit = panels as f64 / (4.0 * inv_h);
    if max_abs > limit {
        return Err(EstimatorError::GridTooWide {
            max_abs_x: max_abs,
            limit,
        });
    }
    Ok(())
}

/// Full pipeline on an empirical CF: select the cutoff, form the truncated
/// product on the quadrature nodes, and invert.
pub fn density_estimate(
    ecf: &EmpiricalCf,
    grid_x: &[f64],
    config: &EstimatorConfig,
) -> Result<DensityEstimate, EstimatorError> {
    let gamma = ecf.gamma().ok_or(EstimatorError::MissingMixture)?;
    let cutoff = select_cutoff(ecf, ecf.n(), config, config.scan_step)?;
    let n_trunc = config.truncation_depth(ecf.n());
    density_with_cutoff(ecf, gamma, grid_x, config, cutoff, n_trunc)
}

/// Pipeline below the cutoff selection: any CF evaluator plus an already
/// realized cutoff. This is the oracle entry point (exact `g` substituted
/// for `g_n`, or a pinned cutoff).
pub fn density_with_cutoff<C: CharFn>(
    cf: &C,
    gamma: f64,
    grid_x: &[f64],
    config: &EstimatorConfig,
    cutoff: CutoffResult,
    n_trunc: usize,
) -> Result<DensityEstimate, EstimatorError> {
    config.validate()?;
    validate_grid(grid_x, cutoff.inv_h, config.panels)?;
    let eps_floor = config.eps_floor.unwrap_or(0.5 * cutoff.eps_n);
    let t_step = cutoff.inv_h / config.panels as f64;
    let (fhat, clamp_activations) =
        product_cf_grid(cf, t_step, config.panels + 1, n_trunc, gamma, eps_floor)?;
    let values = invert_nodes(&fhat, cutoff.inv_h, grid_x);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(EstimatorError::BadConfig(
            "non-finite value in inversion output",
        ));
    }
    Ok(DensityEstimate {
        grid_x: grid_x.to_vec(),
        values,
        cutoff,
        config: config.clone(),
        n_trunc,
        clamp_activations,
        corrected: false,
    })
}

/// Direct inversion of an arbitrary CF evaluator at a pinned cutoff —
/// the closed-form oracle route, bypassing the product entirely.
pub fn invert_cf<C: CharFn>(
    fhat: &C,
    grid_x: &[f64],
    inv_h: f64,
    panels: usize,
) -> Result<Vec<f64>, EstimatorError> {
    if panels < 8 || !panels.is_multiple_of(2) {
        return Err(EstimatorError::BadConfig("panels must be even and >= 8"));
    }
    validate_grid(grid_x, inv_h, panels)?;
    let t_step = inv_h / panels as f64;
    let nodes = fhat.eval_arith_grid(t_step, panels + 1);
    Ok(invert_nodes(&nodes, inv_h, grid_x))
}

/// Clip negative values to zero and rescale so the trapezoid integral over
/// the grid is one. Finite-sample estimates need not be densities; this is
/// the simple correction, recorded in the `corrected` flag.
pub fn correct_density(est: &DensityEstimate) -> Result<DensityEstimate, EstimatorError> {
    let clipped: Vec<f64> = est.values.iter().map(|&v| v.max(0.0)).collect();
    let mass = trapezoid(&est.grid_x, &clipped);
    if !(mass > 0.0) {
        return Err(EstimatorError::DegenerateEstimate);
    }
    let scale = 1.0 / mass;
    let mut out = est.clone();
    out.values = clipped.into_iter().map(|v| v * scale).collect();
    out.corrected = true;
    Ok(out)
}

/// Trapezoid ISE `∫ (p(x) - p̂(x))² dx` over the estimate's grid.
///
/// The integral is domain-truncated to the grid; mass outside is not
/// counted, which callers report alongside the value.
pub fn ise<F: Fn(f64) -> f64>(est: &DensityEstimate, true_density: F) -> f64 {
    let sq: Vec<f64> = est
        .grid_x
        .iter()
        .zip(&est.values)
        .map(|(&x, &v)| {
            let d = true_density(x) - v;
            d * d
        })
        .collect();
    trapezoid(&est.grid_x, &sq)
}
