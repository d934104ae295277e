//! Closed-form oracles for the estimation pipeline: the telescoping product
//! identity, the truncated-inversion antiderivative, Simpson's convergence
//! order, and the spectral-energy (Plancherel) value of the ISE.

use condeconv_core::distributions::RefDistribution;
use condeconv_core::ecf::{CharFn, ExactG};
use condeconv_core::estimator::{
    invert_cf, ise, product_cf, CutoffResult, DensityEstimate, EstimatorConfig,
};
use condeconv_core::Complex64;

const PI: f64 = std::f64::consts::PI;

fn cauchy() -> RefDistribution {
    RefDistribution::cauchy(1.0).unwrap()
}

/// Truncated inversion of `e^{-|t|}` at cutoff `T`:
/// `(1/π)·(1 + e^{-T}(x·sin(Tx) − cos(Tx)))/(1+x²)`.
fn truncated_cauchy_inversion(x: f64, t_max: f64) -> f64 {
    (1.0 + (-t_max).exp() * (x * (t_max * x).sin() - (t_max * x).cos())) / (PI * (1.0 + x * x))
}

#[test]
fn telescoping_product_on_grid() {
    // exact Cauchy g (γ = 1/2) substituted for g_n:
    // ∏_{k=0}^{N} g(γ^{2k}t)/g(γ^{2k+1}t) = exp(−(1 − γ^{2N+2})|t|)
    let g = ExactG {
        dist: cauchy(),
        gamma: 0.5,
    };
    let n_trunc = 10;
    let shrink = 1.0 - 0.5f64.powi(2 * n_trunc as i32 + 2);
    for i in 0..100 {
        let t = -10.0 + 20.0 * i as f64 / 99.0;
        let got = product_cf(&g, t, n_trunc, 0.5, 0.0).unwrap();
        let expected = (-(shrink * t.abs())).exp();
        assert!(
            (got.re - expected).abs() < 1e-10 && got.im.abs() < 1e-12,
            "t={t}: {got} vs {expected}"
        );
    }
}

#[test]
fn telescoping_general_stable_exponent() {
    // the same identity with a non-integer stability exponent:
    // exp(−b·(1 − γ^{a(2N+2)})·|t|^a)
    let dist = RefDistribution::symmetric_stable(1.5, 0.8).unwrap();
    let g = ExactG { dist, gamma: 0.6 };
    for n_trunc in [0usize, 3, 8] {
        let shrink = 1.0 - 0.6f64.powf(1.5 * (2.0 * n_trunc as f64 + 2.0));
        for i in 0..40 {
            let t = 0.25 * i as f64;
            let got = product_cf(&g, t, n_trunc, 0.6, 0.0).unwrap();
            let expected = (-(0.8 * shrink * t.powf(1.5))).exp();
            assert!((got.re - expected).abs() < 1e-10, "N={n_trunc}, t={t}");
        }
    }
}

#[test]
fn truncation_error_monotone_in_depth() {
    let g = ExactG {
        dist: cauchy(),
        gamma: 0.5,
    };
    let f = cauchy();
    for i in 1..=20 {
        let t = 0.5 * i as f64;
        let mut prev = f64::INFINITY;
        for n_trunc in 0..12 {
            let err = (product_cf(&g, t, n_trunc, 0.5, 0.0).unwrap() - f.cf(t)).norm();
            assert!(
                err <= prev + 1e-15,
                "error must not grow with depth at t={t}"
            );
            prev = err;
        }
    }
}

#[test]
fn inversion_matches_closed_form() {
    // f̂ = exact Cauchy CF, cutoff T = 5, default panel count
    let grid: Vec<f64> = (0..=400).map(|i| -5.0 + 0.025 * i as f64).collect();
    let values = invert_cf(&cauchy(), &grid, 5.0, 2048).unwrap();
    let mut worst = 0.0f64;
    for (&x, &v) in grid.iter().zip(&values) {
        worst = worst.max((v - truncated_cauchy_inversion(x, 5.0)).abs());
    }
    assert!(worst < 1e-6, "max |estimate - closed form| = {worst}");
}

#[test]
fn inversion_reference_points() {
    let v0 = invert_cf(&cauchy(), &[0.0], 5.0, 2048).unwrap()[0];
    assert!((v0 - (1.0 - (-5.0f64).exp()) / PI).abs() < 1e-9);
    assert!((v0 - 0.3161652).abs() < 1e-7);
    let v_large = invert_cf(&cauchy(), &[0.0], 30.0, 8192).unwrap()[0];
    assert!(
        (v_large - 1.0 / PI).abs() < 1e-9,
        "T → ∞ recovers the density at 0"
    );
}

#[test]
fn simpson_error_falls_sixteen_fold_on_panel_doubling() {
    let grid: Vec<f64> = (0..=120).map(|i| -3.0 + 0.05 * i as f64).collect();
    let max_err = |panels: usize| -> f64 {
        let values = invert_cf(&cauchy(), &grid, 5.0, panels).unwrap();
        grid.iter()
            .zip(&values)
            .map(|(&x, &v)| (v - truncated_cauchy_inversion(x, 5.0)).abs())
            .fold(0.0f64, f64::max)
    };
    let coarse = max_err(64);
    let fine = max_err(128);
    let ratio = coarse / fine;
    assert!(
        (12.0..=20.0).contains(&ratio),
        "fourth-order convergence: expected ratio ~16, got {ratio} ({coarse} / {fine})"
    );
}

#[test]
fn plancherel_tail_ise_of_truncated_estimate() {
    // p̂ from the exact CF truncated at T: ISE = ∫_{|t|>T} e^{-2|t|} dt / 2π
    // = e^{-2T}/(2π), up to the x-grid domain truncation.
    let t_max = 2.0;
    let grid: Vec<f64> = (0..=2000).map(|i| -25.0 + 0.025 * i as f64).collect();
    let values = invert_cf(&cauchy(), &grid, t_max, 2048).unwrap();
    let est = DensityEstimate {
        grid_x: grid,
        values,
        cutoff: CutoffResult {
            eps_n: 0.1,
            c_n: 5.0,
            inv_h: t_max,
            crossed: true,
            d_n: None,
        },
        config: EstimatorConfig::default(),
        n_trunc: 0,
        clamp_activations: 0,
        corrected: false,
    };
    let got = ise(&est, |x| cauchy().density(x).unwrap());
    let plancherel = (-2.0 * t_max).exp() / (2.0 * PI);
    assert!(
        (got - 0.0029150).abs() < 1e-4,
        "near the spectral value, got {got}"
    );
    // the deficit is exactly the (p - p̂)² mass outside |x| ≤ 25, which is
    // positive and of order e^{-2T}/(π²·25)
    assert!(got < plancherel);
    assert!(plancherel - got < 2e-4);
}

#[test]
fn product_estimator_hermitian_symmetry() {
    let g = ExactG {
        dist: cauchy(),
        gamma: 0.5,
    };
    for i in 1..=10 {
        let t = 0.7 * i as f64;
        let plus = product_cf(&g, t, 6, 0.5, 0.0).unwrap();
        let minus = product_cf(&g, -t, 6, 0.5, 0.0).unwrap();
        assert!((minus - plus.conj()).norm() < 1e-14);
    }
}

#[test]
fn exact_cf_implements_charfn() {
    let d = cauchy();
    assert_eq!(d.eval(0.7), d.cf(0.7));
    let vals = d.eval_arith_grid(0.1, 4);
    assert_eq!(vals.len(), 4);
    assert_eq!(vals[0], Complex64::new(1.0, 0.0));
}
