//! Property tests for the structural invariants: ECF bounds and symmetries,
//! linearity in the empirical measure, product-estimator symmetries, and the
//! correction postcondition.

use condeconv_core::distributions::MixtureSpec;
use condeconv_core::ecf::{CharFn, EmpiricalCf, Sample};
use condeconv_core::estimator::{
    correct_density, product_cf, CutoffResult, DensityEstimate, EstimatorConfig,
};
use condeconv_core::numeric::trapezoid;
use proptest::prelude::*;

fn data_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 1..200)
}

proptest! {
    #[test]
    fn ecf_bounded_hermitian_and_one_at_zero(
        data in data_strategy(),
        t in -20.0f64..20.0,
    ) {
        let ecf = EmpiricalCf::from_raw(data).unwrap();
        let v = ecf.eval(t);
        prop_assert!(v.norm() <= 1.0 + 1e-12);
        prop_assert!((ecf.eval(-t) - v.conj()).norm() < 1e-13);
        prop_assert_eq!(ecf.eval(0.0), condeconv_core::Complex64::new(1.0, 0.0));
    }

    #[test]
    fn ecf_of_concatenation_averages(
        a in prop::collection::vec(-30.0f64..30.0, 1..100),
        b_seed in prop::collection::vec(-30.0f64..30.0, 1..100),
        t in -10.0f64..10.0,
    ) {
        // equal lengths required for the average identity
        let len = a.len().min(b_seed.len());
        let a = &a[..len];
        let b = &b_seed[..len];
        let ecf_a = EmpiricalCf::from_raw(a.to_vec()).unwrap();
        let ecf_b = EmpiricalCf::from_raw(b.to_vec()).unwrap();
        let mut joined = a.to_vec();
        joined.extend_from_slice(b);
        let ecf_ab = EmpiricalCf::from_raw(joined).unwrap();
        let avg = (ecf_a.eval(t) + ecf_b.eval(t)) / 2.0;
        prop_assert!((ecf_ab.eval(t) - avg).norm() < 1e-12);
    }

    #[test]
    fn ecf_permutation_invariant(
        data in data_strategy(),
        t in -10.0f64..10.0,
    ) {
        let forward = EmpiricalCf::from_raw(data.clone()).unwrap();
        let mut reversed = data;
        reversed.reverse();
        let backward = EmpiricalCf::from_raw(reversed).unwrap();
        prop_assert!((forward.eval(t) - backward.eval(t)).norm() < 1e-12);
    }

    #[test]
    fn product_cf_one_at_zero_and_hermitian(
        data in data_strategy(),
        t in 0.01f64..5.0,
        gamma in 0.05f64..0.95,
        n_trunc in 0usize..6,
    ) {
        let ecf = EmpiricalCf::from_raw(data).unwrap();
        let at_zero = product_cf(&ecf, 0.0, n_trunc, gamma, 1e-6).unwrap();
        prop_assert_eq!(at_zero, condeconv_core::Complex64::new(1.0, 0.0));
        let plus = product_cf(&ecf, t, n_trunc, gamma, 1e-6).unwrap();
        let minus = product_cf(&ecf, -t, n_trunc, gamma, 1e-6).unwrap();
        prop_assert!((minus - plus.conj()).norm() <= 1e-10 * plus.norm().max(1.0));
    }

    #[test]
    fn corrected_density_is_a_density(
        raw in prop::collection::vec(-0.5f64..2.0, 2..60),
    ) {
        let grid: Vec<f64> = (0..raw.len()).map(|i| i as f64 * 0.25).collect();
        prop_assume!(raw.iter().any(|&v| v > 1e-6));
        let est = DensityEstimate {
            grid_x: grid,
            values: raw,
            cutoff: CutoffResult { eps_n: 0.1, c_n: 1.0, inv_h: 0.5, crossed: false, d_n: None },
            config: EstimatorConfig::default(),
            n_trunc: 0,
            clamp_activations: 0,
            corrected: false,
        };
        let fixed = correct_density(&est).unwrap();
        prop_assert!(fixed.values.iter().all(|&v| v >= 0.0));
        let mass = trapezoid(&fixed.grid_x, &fixed.values);
        prop_assert!((mass - 1.0).abs() < 1e-9);
        prop_assert!(fixed.corrected);
    }

    #[test]
    fn mixture_scaling_consistency(
        data in prop::collection::vec(-10.0f64..10.0, 1..60),
        t in -5.0f64..5.0,
    ) {
        // ECF of a mixed sample at t equals the raw ECF of z/beta at t
        let mix = MixtureSpec::new(1.0, 2.0).unwrap();
        let sample = Sample::new(data.clone(), mix).unwrap();
        let scaled: Vec<f64> = data.iter().map(|z| z / 2.0).collect();
        let via_sample = EmpiricalCf::from_sample(&sample);
        let via_raw = EmpiricalCf::from_raw(scaled).unwrap();
        prop_assert!((via_sample.eval(t) - via_raw.eval(t)).norm() < 1e-13);
    }
}
