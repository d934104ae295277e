//! Numerically testable bounds and limit quantities.
//!
//! - a lower bound on real characteristic functions in terms of an absolute
//!   moment, `f(t) ≥ 1 − c(r)·β_r·|t|^r`, with `c(r) = 2/(2r)^{r/2}`, and
//!   the scalar inequality `cos x ≥ 1 − c(r)·x^r` underneath it;
//! - an upper bound on the log-CF near the origin,
//!   `|ln f(t)| ≤ 2π·sqrt(2^r·|t|^r·c(r)·β_r)`, valid for
//!   `|t| < 1/(2·(10·c(r)·β_r)^{1/r})`;
//! - a deviation bound for the sup-distance between an empirical CF and its
//!   population CF over a scan window (exponential term only);
//! - the limiting Gaussian cross-covariance of `√n(g_n − g)` and the series
//!   variance of the product estimator built from it.

use core::fmt;

use crate::ecf::CharFn;
use crate::math;

/// Errors from the bound evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TheoryError {
    /// Moment order outside (0, 2].
    OrderOutOfRange(f64),
    /// Deviation level outside (0, 2].
    LevelOutOfRange(f64),
    /// Series evaluation hit a (near-)zero CF value.
    NearZeroCf { k: usize, magnitude: f64 },
    /// Series terms stopped shrinking; the expansion does not converge.
    NonConvergentSeries,
}

impl fmt::Display for TheoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoryError::OrderOutOfRange(r) => {
                write!(f, "moment order must lie in (0, 2], got {r}")
            }
            TheoryError::LevelOutOfRange(b) => {
                write!(f, "deviation level must lie in (0, 2], got {b}")
            }
            TheoryError::NearZeroCf { k, magnitude } => {
                write!(f, "|g(gamma^{k} t)| = {magnitude} is too close to zero")
            }
            TheoryError::NonConvergentSeries => write!(f, "series terms are not decaying"),
        }
    }
}

impl core::error::Error for TheoryError {}

/// The constant `c(r) = 2/(2r)^{r/2}` for `r ∈ (0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaConstant {
    r: f64,
}

impl LemmaConstant {
    pub fn new(r: f64) -> Result<Self, TheoryError> {
        if r > 0.0 && r <= 2.0 {
            Ok(LemmaConstant { r })
        } else {
            Err(TheoryError::OrderOutOfRange(r))
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn c_r(&self) -> f64 {
        2.0 / math::powf(2.0 * self.r, self.r / 2.0)
    }
}

/// Lower bound `1 − c(r)·β_r·|t|^r` on a real characteristic function.
pub fn lemma1_bound(c: &LemmaConstant, beta_r: f64, t: f64) -> f64 {
    debug_assert!(beta_r >= 0.0);
    1.0 - c.c_r() * beta_r * math::powf(math::abs(t), c.r())
}

/// Outcome of a grid sweep of an inequality: whether it held everywhere and
/// the worst (smallest) slack seen, with its location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlackReport {
    pub pass: bool,
    pub worst_slack: f64,
    pub worst_x: f64,
}

/// Verify `cos x ≥ 1 − c(r)·x^r` on a grid of positive abscissas.
pub fn cos_inequality_check(r: f64, x_grid: &[f64]) -> Result<SlackReport, TheoryError> {
    let c = LemmaConstant::new(r)?;
    let c_r = c.c_r();
    let mut worst_slack = f64::INFINITY;
    let mut worst_x = f64::NAN;
    for &x in x_grid {
        debug_assert!(x > 0.0, "grid must be strictly positive");
        let slack = math::cos(x) - (1.0 - c_r * math::powf(x, r));
        if slack < worst_slack {
            worst_slack = slack;
            worst_x = x;
        }
    }
    Ok(SlackReport {
        pass: worst_slack >= 0.0,
        worst_slack,
        worst_x,
    })
}

/// Log-CF bound value and whether `t` lies in the bound's validity range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Bound {
    pub bound: f64,
    pub in_range: bool,
}

/// `|ln f(t)| ≤ 2π·sqrt(2^r·|t|^r·c(r)·β_r)` for
/// `|t| < 1/(2·(10·c(r)·β_r)^{1/r})`.
///
/// The range expression is parsed with the whole radical in the denominator;
/// the proof of the bound needs `2^{r+1}|t|^r c β_r` small, which the other
/// reading does not deliver. `in_range` exposes the parse.
pub fn lemma2_bound(r: f64, beta_r: f64, t: f64) -> Result<Lemma2Bound, TheoryError> {
    let c = LemmaConstant::new(r)?;
    debug_assert!(beta_r > 0.0);
    let c_r = c.c_r();
    let abs_t = math::abs(t);
    let bound = 2.0
        * core::f64::consts::PI
        * math::sqrt(math::powf(2.0, r) * math::powf(abs_t, r) * c_r * beta_r);
    let range = 1.0 / (2.0 * math::powf(10.0 * c_r * beta_r, 1.0 / r));
    Ok(Lemma2Bound {
        bound,
        in_range: abs_t < range,
    })
}

/// Deviation bound for `sup_{|θ| ≤ a} |f_n(θ) − f(θ)| > b` over `n` i.i.d.
/// observations: `2·(1 + a·Θ(n, b, r))·e^{−n b²/144}`.
///
/// Only the exponential part is computed; the additive `ν_r/n` term has an
/// unknown constant and is omitted, which `nu_term_omitted` records. The
/// `moment` input is `β_r` on the `r ≤ 1` branch and `β_{r/2}` on the
/// `r > 1` branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationBound {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub moment: f64,
    pub theta: f64,
    pub bound: f64,
    pub nu_term_omitted: bool,
}

/// Evaluate the deviation bound. Requires `r ∈ (0, 2]`, `b ∈ (0, 2]`,
/// `a > 0`, `n ≥ 1`.
pub fn lemma3_bound(
    n: usize,
    a: f64,
    b: f64,
    r: f64,
    moment: f64,
) -> Result<DeviationBound, TheoryError> {
    if !(r > 0.0 && r <= 2.0) {
        return Err(TheoryError::OrderOutOfRange(r));
    }
    if !(b > 0.0 && b <= 2.0) {
        return Err(TheoryError::LevelOutOfRange(b));
    }
    debug_assert!(a > 0.0 && n >= 1 && moment >= 0.0);
    let nf = n as f64;
    let theta = if r <= 1.0 {
        math::powf(moment, 1.0 / r) * math::powf(nf, (2.0 - r) / r) / math::powf(b, 1.0 / r)
    } else {
        math::powf(moment, 2.0 / r) * math::powf(nf, 1.0 / r) / math::powf(b, 2.0 / r)
    };
    let bound = 2.0 * (1.0 + a * theta) * math::exp(-nf * b * b / 144.0);
    Ok(DeviationBound {
        n,
        a,
        b,
        r,
        moment,
        theta,
        bound,
        nu_term_omitted: true,
    })
}

/// Cross-covariance of the limiting complex Gaussian process
/// `U(t) + iV(t)` of `√n(g_n − g)`, evaluated from `u = Re g`, `v = Im g`:
///
/// ```text
/// E U(t)U(s) = ½[u(t−s) + u(t+s)] − u(t)u(s)
/// E U(t)V(s) = ½[−v(t−s) + v(t+s)] − u(t)v(s)
/// E V(t)U(s) = ½[v(t−s) + v(t+s)] − v(t)u(s)
/// E V(t)V(s) = ½[u(t−s) − u(t+s)] − v(t)v(s)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMatrix2x2 {
    pub uu: f64,
    pub uv: f64,
    pub vu: f64,
    pub vv: f64,
}

impl CovMatrix2x2 {
    /// Eigenvalues of the symmetrized matrix; at `t = s` the matrix is a
    /// genuine covariance and both must be nonnegative.
    pub fn sym_eigenvalues(&self) -> (f64, f64) {
        let off = 0.5 * (self.uv + self.vu);
        let tr = self.uu + self.vv;
        let det = self.uu * self.vv - off * off;
        let disc = math::sqrt((0.25 * tr * tr - det).max(0.0));
        (0.5 * tr - disc, 0.5 * tr + disc)
    }
}

/// Evaluate the limiting cross-covariance at `(t, s)` from an exact `g`.
pub fn limit_cov<C: CharFn>(g: &C, t: f64, s: f64) -> CovMatrix2x2 {
    let g_diff = g.eval(t - s);
    let g_sum = g.eval(t + s);
    let g_t = g.eval(t);
    let g_s = g.eval(s);
    CovMatrix2x2 {
        uu: 0.5 * (g_diff.re + g_sum.re) - g_t.re * g_s.re,
        uv: 0.5 * (-g_diff.im + g_sum.im) - g_t.re * g_s.im,
        vu: 0.5 * (g_diff.im + g_sum.im) - g_t.im * g_s.re,
        vv: 0.5 * (g_diff.re - g_sum.re) - g_t.im * g_s.im,
    }
}

/// Series depth `K` such that the geometric tail `γ^{a·K}` drops below
/// `tol`.
pub fn series_depth(gamma: f64, a: f64, tol: f64) -> usize {
    debug_assert!(gamma > 0.0 && gamma < 1.0 && tol > 0.0 && a > 0.0);
    math::ceil(math::ln(tol) / (a * math::ln(gamma))) as usize
}

/// Variance of the real part of the limit of `√n(f̂_n(t) − f(t))` for a
/// real-symmetric target:
/// `f(t)² · Σ_{i,j ≤ K} (−1)^{i+j} E[U(γ^i t)U(γ^j t)] / (g(γ^i t)·g(γ^j t))`.
///
/// `K` is the series truncation; the terms decay geometrically, and the
/// value is insensitive to raising `K` past the tolerance depth.
pub fn series_variance<Cg: CharFn, Cf: CharFn>(
    g: &Cg,
    f: &Cf,
    gamma: f64,
    t: f64,
    k_max: usize,
) -> Result<f64, TheoryError> {
    assert!(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    if t == 0.0 {
        return Ok(0.0);
    }
    // precompute scales, denominators, and diagonal variances
    let mut args = alloc::vec::Vec::with_capacity(k_max + 1);
    let mut dens = alloc::vec::Vec::with_capacity(k_max + 1);
    let mut pow = 1.0;
    for k in 0..=k_max {
        let arg = pow * t;
        let mag = g.eval(arg).re;
        if math::abs(mag) < 1e-12 {
            return Err(TheoryError::NearZeroCf { k, magnitude: mag });
        }
        args.push(arg);
        dens.push(mag);
        pow *= gamma;
    }
    // diagonal terms must decay overall; three consecutive increases past
    // the first few scales means the expansion is diverging
    let mut growth_streak = 0;
    let mut prev_diag = f64::INFINITY;
    for k in 0..=k_max {
        let diag = limit_cov(g, args[k], args[k]).uu / (dens[k] * dens[k]);
        if diag > prev_diag * (1.0 + 1e-12) {
            growth_streak += 1;
            if growth_streak >= 3 && k > 3 {
                return Err(TheoryError::NonConvergentSeries);
            }
        } else {
            growth_streak = 0;
        }
        prev_diag = diag;
    }
    let mut acc = 0.0;
    for i in 0..=k_max {
        for j in 0..=k_max {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let cov = limit_cov(g, args[i], args[j]).uu;
            acc += sign * cov / (dens[i] * dens[j]);
        }
    }
    let f_t = f.eval(t).re;
    Ok(f_t * f_t * acc)
}
