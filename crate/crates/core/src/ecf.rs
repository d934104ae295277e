//! Empirical characteristic function of the rescaled sample `Z/beta`.
//!
//! `g_n(t) = (1/n) Σ_k e^{i t z_k / beta}` is the workhorse of the whole
//! pipeline: the cutoff scan, the product estimator, and the deviation
//! checks all reduce to evaluating it on grids. Evaluation on a uniform
//! grid uses a per-observation phase recurrence (one `e^{iθ}` per
//! observation, one complex multiply per grid point) with periodic
//! renormalization, so scans over thousands of points stay cheap and
//! accurate.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::distributions::MixtureSpec;
use crate::math;
use crate::numeric::{cis, pairwise_sum_by};

/// Errors from sample validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcfError {
    EmptySample,
    NonFiniteObservation { index: usize },
}

impl fmt::Display for EcfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EcfError::EmptySample => write!(f, "sample must contain at least one observation"),
            EcfError::NonFiniteObservation { index } => {
                write!(f, "observation {index} is not finite")
            }
        }
    }
}

impl core::error::Error for EcfError {}

/// Observations `z` together with the mixing weights that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    z: Vec<f64>,
    mix: MixtureSpec,
}

impl Sample {
    pub fn new(z: Vec<f64>, mix: MixtureSpec) -> Result<Self, EcfError> {
        if z.is_empty() {
            return Err(EcfError::EmptySample);
        }
        if let Some(index) = z.iter().position(|v| !v.is_finite()) {
            return Err(EcfError::NonFiniteObservation { index });
        }
        Ok(Sample { z, mix })
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn mix(&self) -> &MixtureSpec {
        &self.mix
    }
}

/// A characteristic-function evaluator.
///
/// Implementors must be Hermitian (`eval(-t) = conj(eval(t))`), which every
/// characteristic function is; grid scans rely on it to cover the negative
/// half-axis by reflection.
pub trait CharFn {
    fn eval(&self, t: f64) -> Complex64;

    /// Values at `t = 0, step, 2·step, …, (count-1)·step`.
    fn eval_arith_grid(&self, step: f64, count: usize) -> Vec<Complex64> {
        (0..count).map(|j| self.eval(step * j as f64)).collect()
    }
}

impl<F: Fn(f64) -> Complex64> CharFn for F {
    fn eval(&self, t: f64) -> Complex64 {
        self(t)
    }
}

impl CharFn for crate::distributions::RefDistribution {
    fn eval(&self, t: f64) -> Complex64 {
        self.cf(t)
    }
}

/// Exact characteristic function of `Z/beta`: `g(t) = f(t)·f(γt)`.
///
/// Stand-in for the empirical CF in oracle runs and closed-form tests.
#[derive(Debug, Clone, Copy)]
pub struct ExactG {
    pub dist: crate::distributions::RefDistribution,
    pub gamma: f64,
}

impl CharFn for ExactG {
    fn eval(&self, t: f64) -> Complex64 {
        self.dist.cf(t) * self.dist.cf(self.gamma * t)
    }
}

// Accumulation runs over fixed chunks so the reduction order never depends
// on anything but the data; chunk partials combine pairwise.
const CHUNK: usize = 4096;
// Upper bound on phase-recurrence drift before recomputing e^{iθ} exactly.
const RENORM: usize = 512;
// Below this size a single sequential sum is accurate enough.
const PAIRWISE_MIN: usize = 100_000;

/// Empirical characteristic function of `Z/beta`, immutable after
/// construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct EmpiricalCf {
    /// Observations already divided by `beta`.
    scaled: Vec<f64>,
    mix: Option<MixtureSpec>,
    cache: Option<GridCache>,
}

#[derive(Debug, Clone)]
struct GridCache {
    grid: Vec<f64>,
    values: Vec<Complex64>,
}

impl EmpiricalCf {
    pub fn from_sample(sample: &Sample) -> Self {
        let beta = sample.mix().beta();
        EmpiricalCf {
            scaled: sample.z().iter().map(|&z| z / beta).collect(),
            mix: Some(*sample.mix()),
            cache: None,
        }
    }

    /// ECF of raw observations (no mixture rescaling). Used for deviation
    /// checks of a plain i.i.d. sample against its own CF.
    pub fn from_raw(data: Vec<f64>) -> Result<Self, EcfError> {
        if data.is_empty() {
            return Err(EcfError::EmptySample);
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(EcfError::NonFiniteObservation { index });
        }
        Ok(EmpiricalCf {
            scaled: data,
            mix: None,
            cache: None,
        })
    }

    /// Precompute values on `grid` at construction; `eval` serves exact
    /// grid-point hits from the cache.
    pub fn with_grid_cache(sample: &Sample, grid: &[f64]) -> Self {
        let mut ecf = EmpiricalCf::from_sample(sample);
        let values = ecf.eval_grid(grid);
        ecf.cache = Some(GridCache {
            grid: grid.to_vec(),
            values,
        });
        ecf
    }

    pub fn n(&self) -> usize {
        self.scaled.len()
    }

    pub fn mix(&self) -> Option<&MixtureSpec> {
        self.mix.as_ref()
    }

    pub fn gamma(&self) -> Option<f64> {
        self.mix.map(|m| m.gamma())
    }

    /// Empirical absolute moment `(1/n) Σ |z_k/beta|^r` of the rescaled data.
    pub fn empirical_abs_moment(&self, r: f64) -> f64 {
        let n = self.scaled.len() as f64;
        self.scaled
            .iter()
            .map(|&x| math::powf(math::abs(x), r))
            .sum::<f64>()
            / n
    }

    fn eval_direct(&self, t: f64) -> Complex64 {
        let data = &self.scaled;
        let n = data.len();
        let sum = if n <= PAIRWISE_MIN {
            let mut acc = Complex64::new(0.0, 0.0);
            for &x in data {
                acc += cis(t * x);
            }
            acc
        } else {
            let chunks: Vec<Complex64> = data
                .chunks(CHUNK)
                .map(|c| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &x in c {
                        acc += cis(t * x);
                    }
                    acc
                })
                .collect();
            pairwise_sum_by(&|i| chunks[i], 0, chunks.len())
        };
        sum / n as f64
    }

    /// Elementwise ECF over an ascending grid.
    pub fn eval_grid(&self, grid: &[f64]) -> Vec<Complex64> {
        debug_assert!(
            grid.windows(2).all(|w| w[0] <= w[1]),
            "grid must be sorted ascending"
        );
        grid.iter().map(|&t| self.eval(t)).collect()
    }

    /// Grid-approximated `sup_{|θ| ≤ a} |g_n(θ) - g(θ)|` over
    /// `θ ∈ {0, ±step, …}`; by Hermitian symmetry the negative half mirrors
    /// the positive one, so only `[0, a]` is scanned.
    pub fn sup_deviation<C: CharFn>(&self, exact: &C, a: f64, step: f64) -> f64 {
        assert!(
            a > 0.0 && step > 0.0,
            "sup_deviation requires a > 0 and step > 0"
        );
        let count = (math::floor(a / step + 1e-9) as usize) + 1;
        let mine = self.eval_arith_grid(step, count);
        let mut worst = 0.0f64;
        for (j, &v) in mine.iter().enumerate() {
            let dev = (v - exact.eval(step * j as f64)).norm();
            if dev > worst {
                worst = dev;
            }
        }
        worst
    }
}

impl CharFn for EmpiricalCf {
    fn eval(&self, t: f64) -> Complex64 {
        if let Some(cache) = &self.cache {
            if let Ok(idx) = cache.grid.binary_search_by(|g| g.partial_cmp(&t).unwrap()) {
                return cache.values[idx];
            }
        }
        self.eval_direct(t)
    }

    /// Uniform-grid evaluation via the phase recurrence
    /// `e^{i(j+1)·step·x} = e^{i j·step·x} · e^{i·step·x}`, renormalized
    /// every [`RENORM`] points. Observations advance four at a time to break
    /// the multiply dependency chains; the reduction order is fixed, so the
    /// result is independent of everything but the data.
    fn eval_arith_grid(&self, step: f64, count: usize) -> Vec<Complex64> {
        if count == 0 {
            return Vec::new();
        }
        let data = &self.scaled;
        let n = data.len();
        let mut chunk_partials: Vec<Vec<Complex64>> = Vec::with_capacity(n.div_ceil(CHUNK));
        for chunk in data.chunks(CHUNK) {
            let mut acc = vec![Complex64::new(0.0, 0.0); count];
            let mut quads = chunk.chunks_exact(4);
            for quad in &mut quads {
                let steps = [
                    step * quad[0],
                    step * quad[1],
                    step * quad[2],
                    step * quad[3],
                ];
                let mult = [cis(steps[0]), cis(steps[1]), cis(steps[2]), cis(steps[3])];
                let mut w = [Complex64::new(1.0, 0.0); 4];
                for (j, slot) in acc.iter_mut().enumerate() {
                    if j % RENORM == 0 {
                        let jf = j as f64;
                        w = [
                            cis(steps[0] * jf),
                            cis(steps[1] * jf),
                            cis(steps[2] * jf),
                            cis(steps[3] * jf),
                        ];
                    }
                    *slot += (w[0] + w[1]) + (w[2] + w[3]);
                    for (wl, ml) in w.iter_mut().zip(&mult) {
                        *wl *= ml;
                    }
                }
            }
            for &x in quads.remainder() {
                let dstep = step * x;
                let mult = cis(dstep);
                let mut w = Complex64::new(1.0, 0.0);
                for (j, slot) in acc.iter_mut().enumerate() {
                    if j % RENORM == 0 {
                        w = cis(dstep * j as f64);
                    }
                    *slot += w;
                    w *= mult;
                }
            }
            chunk_partials.push(acc);
        }
        let nf = n as f64;
        (0..count)
            .map(|j| pairwise_sum_by(&|c| chunk_partials[c][j], 0, chunk_partials.len()) / nf)
            .collect()
    }
}

/// `|1 - e^{ix}| ≤ c(r)·|x|^r` constant: 1 at `r = 1` (the classical bound),
/// `sqrt(4/(2r)^r + 1/r^{2r})` for `r ∈ (0, 1)`.
pub fn cis_holder_const(r: f64) -> f64 {
    assert!(
        r > 0.0 && r <= 1.0,
        "holder constant defined for r in (0, 1]"
    );
    if r == 1.0 {
        1.0
    } else {
        math::sqrt(4.0 / math::powf(2.0 * r, r) + 1.0 / math::powf(r, 2.0 * r))
    }
}

/// Grid step that keeps the worst-case modulus of continuity of an ECF,
/// `c(r)·m_r·step^r` with `m_r` the (empirical) absolute moment of order
/// `r`, at or below `tol`. Used to justify grid scans as faithful
/// approximations of suprema.
pub fn deviation_scan_step(m_r: f64, r: f64, tol: f64) -> f64 {
    assert!(m_r > 0.0 && tol > 0.0);
    math::powf(tol / (cis_holder_const(r) * m_r), 1.0 / r)
}
