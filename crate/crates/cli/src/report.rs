//! CSV emission. Every file starts with the effective-config preamble,
//! followed by diagnostic comment lines (whose keys are deliberately not
//! config keys) and a header row. Numeric cells carry 16 significant
//! digits so files round-trip losslessly.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use condeconv_core::estimator::DensityEstimate;

use crate::bench::{AggRow, Lemma3Report, MiseReport, RateFit, Theorem1Report};

/// Scientific notation with 16 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.15e}")
}

pub fn write_text(path: &Path, text: &str) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)
}

/// Cutoff and run diagnostics as comment lines. None of these names are
/// config keys, so preambles containing them still parse as config files.
pub fn cutoff_comment(est: &DensityEstimate) -> String {
    let mut s = String::new();
    let c = &est.cutoff;
    let _ = writeln!(s, "# eps_n={}", fmt_float(c.eps_n));
    let _ = writeln!(s, "# c_n={}", fmt_float(c.c_n));
    let _ = writeln!(s, "# inv_h={}", fmt_float(c.inv_h));
    let _ = writeln!(s, "# crossed={}", c.crossed);
    if let Some(dn) = c.d_n {
        let _ = writeln!(s, "# d_n={}", fmt_float(dn));
    }
    let _ = writeln!(s, "# depth={}", est.n_trunc);
    let _ = writeln!(s, "# clamps={}", est.clamp_activations);
    s
}

/// `x,p_hat` density table.
pub fn density_csv(preamble: &str, est: &DensityEstimate) -> String {
    let mut s = String::with_capacity(64 * est.grid_x.len());
    s.push_str(preamble);
    s.push_str(&cutoff_comment(est));
    s.push_str("x,p_hat\n");
    for (x, v) in est.grid_x.iter().zip(&est.values) {
        let _ = writeln!(s, "{},{}", fmt_float(*x), fmt_float(*v));
    }
    s
}

/// `x,p_true,p_hat,p_hat_corrected` table for the canned reproduction run.
pub fn fig_density_csv(
    preamble: &str,
    est: &DensityEstimate,
    corrected: &DensityEstimate,
    p_true: impl Fn(f64) -> f64,
) -> String {
    let mut s = String::with_capacity(96 * est.grid_x.len());
    s.push_str(preamble);
    s.push_str(&cutoff_comment(est));
    s.push_str("x,p_true,p_hat,p_hat_corrected\n");
    for ((x, v), w) in est.grid_x.iter().zip(&est.values).zip(&corrected.values) {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_float(*x),
            fmt_float(p_true(*x)),
            fmt_float(*v),
            fmt_float(*w)
        );
    }
    s
}

/// Per-replication table `n,rep,ise,inv_h,crossed,clamps`. Failed
/// replications are recorded as comment lines and excluded from the rows.
pub fn reps_csv(preamble: &str, report: &MiseReport) -> String {
    let mut s = String::new();
    s.push_str(preamble);
    s.push_str("# ISE is domain-truncated to the x-grid; mass outside is not counted.\n");
    for row in &report.rows {
        if let Err(msg) = &row.outcome {
            let _ = writeln!(s, "# excluded n={} rep={}: {}", row.n, row.rep, msg);
        }
    }
    s.push_str("n,rep,ise,inv_h,crossed,clamps\n");
    for row in &report.rows {
        if let Ok(stats) = &row.outcome {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                row.n,
                row.rep,
                fmt_float(stats.ise),
                fmt_float(stats.inv_h),
                stats.crossed,
                stats.clamps
            );
        }
    }
    s
}

/// Aggregate table `n,mise,median_ise,stderr,excluded`.
pub fn aggregate_csv(preamble: &str, aggregates: &[AggRow]) -> String {
    let mut s = String::new();
    s.push_str(preamble);
    s.push_str("# ISE is domain-truncated to the x-grid; mass outside is not counted.\n");
    s.push_str("n,mise,median_ise,stderr,excluded\n");
    for a in aggregates {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            a.n,
            fmt_float(a.mise),
            fmt_float(a.median_ise),
            fmt_float(a.stderr),
            a.excluded
        );
    }
    s
}

/// Fit table for the rate study: one row per competing decay law.
pub fn rate_csv(preamble: &str, fit: &RateFit) -> String {
    let mut s = String::new();
    s.push_str(preamble);
    s.push_str(
        "# Exact exponents are not identifiable at these sample sizes; the MISE bound's\n\
         # variance term scales like 2^N c_n/(n phi^2(c_n)) in one form and 4^N c_n/(n d_n^2)\n\
         # in another, so only the power-vs-log discrimination below is asserted.\n\
         # The log_log_n row is the logarithmic-rate benchmark typical of ordinary\n\
         # deconvolution; a materially better power fit indicates a polynomial-type rate.\n",
    );
    s.push_str("fit,slope,intercept,se_slope,half_width,sse\n");
    for (name, line) in [("log_n", &fit.power), ("log_log_n", &fit.log_law)] {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            name,
            fmt_float(line.slope),
            fmt_float(line.intercept),
            fmt_float(line.se_slope),
            fmt_float(line.half_width),
            fmt_float(line.sse)
        );
    }
    s
}

/// Inequality sweep rows `family,r,t,lhs,rhs,slack`.
pub struct SweepRow {
    pub family: String,
    pub r: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn sweep_csv(preamble: &str, rows: &[SweepRow]) -> String {
    let mut s = String::new();
    s.push_str(preamble);
    s.push_str("family,r,t,lhs,rhs,slack\n");
    for row in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            row.family,
            row.r,
            fmt_float(row.t),
            fmt_float(row.lhs),
            fmt_float(row.rhs),
            fmt_float(row.rhs - row.lhs)
        );
    }
    s
}

pub fn theorem1_csv(preamble: &str, rep: &Theorem1Report) -> String {
    let mut s = String::new();
    s.push_str(preamble);
    s.push_str("n,reps,t,depth,mc_variance,series_variance,ratio\n");
    let _ = writeln!(
        s,
        "{},{},{},{},{},{},{}",
        rep.n,
        rep.reps,
        fmt_float(rep.t),
        rep.depth,
        fmt_float(rep.mc_variance),
        fmt_float(rep.series_variance),
        fmt_float(rep.ratio)
    );
    s
}

pub fn lemma3_csv(preamble: &str, rep: &Lemma3Report) -> String {
    let mut s = String::new();
    s.push_str(preamble);
    s.push_str("# The additive nu_r/n term of the deviation bound has an unknown constant\n");
    s.push_str("# and is omitted; the bound column is the exponential part only.\n");
    s.push_str("n,reps,a,b,r,step,theta,bound,exceed,freq\n");
    let _ = writeln!(
        s,
        "{},{},{},{},{},{},{},{},{},{}",
        rep.n,
        rep.reps,
        rep.a,
        rep.b,
        rep.r,
        rep.step,
        fmt_float(rep.bound.theta),
        fmt_float(rep.bound.bound),
        rep.exceed,
        fmt_float(rep.freq)
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_16_significant_digits() {
        let s = fmt_float(std::f64::consts::PI);
        assert!(s.starts_with("3.141592653589793"), "{s}");
        let parsed: f64 = s.parse().unwrap();
        assert_eq!(parsed, std::f64::consts::PI, "lossless round-trip");
    }
}
