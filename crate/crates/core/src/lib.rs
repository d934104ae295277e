//! Nonparametric density estimation from mixed observations `Z = a·X + b·Y`,
//! where `X` and `Y` are independent draws from the same unknown law.
//!
//! The characteristic function `g` of `Z/b` factors as `g(t) = f(t)·f(γt)`
//! with `γ = a/b ∈ (0,1)`, so `f` can be recovered through the telescoping
//! product `f(t) = ∏ g(γ^{2k}t)/g(γ^{2k+1}t)`. This crate implements that
//! recovery on the empirical characteristic function together with the
//! machinery around it:
//!
//! - [`distributions`]: reference laws (Cauchy, Gaussian, symmetric stable,
//!   two-point) with exact characteristic functions, densities, absolute
//!   moments, seeded samplers, and the `Z = a·X + b·Y` mixer;
//! - [`ecf`]: the empirical characteristic function of a rescaled sample,
//!   batch grid evaluation, and sup-deviation scans;
//! - [`estimator`]: the truncated product-CF estimator, the data-driven
//!   spectral cutoff, Fourier-inversion density estimates, the
//!   clip-and-renormalize correction, and ISE;
//! - [`theory`]: numerically testable bounds (characteristic-function and
//!   log-CF lower/upper bounds, deviation probabilities) and the limiting
//!   Gaussian covariance of the estimator.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm` to build without the standard library. Every
//! operation is deterministic given its inputs and seeds; parallel callers
//! get bitwise-reproducible results because nothing here spawns threads.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]
// validation uses `!(x > 0.0)` so NaN fails the check as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("condeconv-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod distributions;
pub mod ecf;
pub mod estimator;
mod math;
pub mod numeric;
pub mod theory;

pub use num_complex::Complex64;
