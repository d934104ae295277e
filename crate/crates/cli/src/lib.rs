//! Benchmark front end for the constrained-deconvolution estimator:
//! experiment plans, Monte Carlo MISE reports, rate studies, theory checks,
//! and the CSV formats behind the `condeconv` binary.

// validation uses `!(x > 0.0)` so NaN fails the check as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod commands;
pub mod config;
pub mod report;
