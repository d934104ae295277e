//! Monte Carlo oracles: samplers against their exact characteristic
//! functions and quantiles, and the mixed-sample ECF against the exact `g`.
//! All draws are seeded; nothing here is flaky.

use condeconv_core::distributions::{exact_g, mix_z, MixtureSpec, RefDistribution};
use condeconv_core::ecf::{CharFn, EmpiricalCf, Sample};

const N_BIG: usize = 1_000_000;

fn members() -> Vec<RefDistribution> {
    vec![
        RefDistribution::cauchy(1.0).unwrap(),
        RefDistribution::gaussian(1.0).unwrap(),
        RefDistribution::symmetric_stable(1.5, 1.0).unwrap(),
        RefDistribution::two_point(),
    ]
}

#[test]
fn ecf_of_big_sample_matches_exact_cf_uniformly() {
    // Hoeffding-scale tolerance 5/√n on a 50-point grid |t| ≤ 5
    let tol = 5.0 / (N_BIG as f64).sqrt();
    for (stream, dist) in members().into_iter().enumerate() {
        let draws = dist.sample_seeded(N_BIG, 0xD15C0, stream as u64);
        let ecf = EmpiricalCf::from_raw(draws).unwrap();
        for i in 0..50 {
            let t = -5.0 + 10.0 * i as f64 / 49.0;
            let dev = (ecf.eval(t) - dist.cf(t)).norm();
            assert!(dev <= tol, "{dist} at t={t}: |g_n - g| = {dev} > {tol}");
        }
    }
}

#[test]
fn mixed_sample_ecf_matches_exact_g() {
    let dist = RefDistribution::cauchy(1.0).unwrap();
    let mix = MixtureSpec::new(1.0, 2.0).unwrap(); // γ = 1/2
    let x = dist.sample_seeded(N_BIG, 0xA11CE, 0);
    let y = dist.sample_seeded(N_BIG, 0xA11CE, 1);
    let z = mix_z(&x, &y, &mix).unwrap();
    let ecf = EmpiricalCf::from_sample(&Sample::new(z, mix).unwrap());
    // g(1) = e^{-(1+γ)} = e^{-1.5} ≈ 0.223130
    let v = ecf.eval(1.0);
    assert!((v.re - 0.223130).abs() < 0.005, "got {v}");
    // and uniformly on a short grid
    let tol = 5.0 / (N_BIG as f64).sqrt();
    for i in 0..25 {
        let t = i as f64 * 0.2;
        let dev = (ecf.eval(t) - exact_g(&dist, &mix, t)).norm();
        assert!(dev <= tol, "t={t}: {dev}");
    }
}

#[test]
fn cauchy_sample_median_concentrates() {
    // The sample median of n Cauchy draws has spread ~ π/(2√n); over many
    // seeds nearly all medians land within ±0.02 for n = 10⁵.
    let dist = RefDistribution::cauchy(1.0).unwrap();
    let n = 100_000;
    let seeds = 1000;
    let mut hits = 0usize;
    for s in 0..seeds {
        let mut draws = dist.sample_seeded(n, 0x5EED, s);
        let mid = draws.len() / 2;
        let (_, median, _) = draws.select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).unwrap());
        if median.abs() <= 0.02 {
            hits += 1;
        }
    }
    let frac = hits as f64 / seeds as f64;
    assert!(frac >= 0.95, "median within ±0.02 for only {frac} of seeds");
}

#[test]
fn gaussian_sample_mean_obeys_clt_bound() {
    let dist = RefDistribution::gaussian(1.0).unwrap();
    let n = 100_000;
    let bound = 4.0 / (n as f64).sqrt();
    let mut hits = 0usize;
    let seeds = 200;
    for s in 0..seeds {
        let draws = dist.sample_seeded(n, 0xC17, s);
        let mean = draws.iter().sum::<f64>() / n as f64;
        if mean.abs() <= bound {
            hits += 1;
        }
    }
    // 4σ two-sided: essentially every seed
    assert!(
        hits as f64 / seeds as f64 >= 0.99,
        "{hits}/{seeds} within the 4/√n bound"
    );
}

#[test]
fn stable_sampler_matches_cf_at_awkward_exponent() {
    // CMS construction at a = 0.7 (infinite mean, not a special case)
    let dist = RefDistribution::symmetric_stable(0.7, 1.0).unwrap();
    let draws = dist.sample_seeded(N_BIG, 0x57AB, 9);
    let ecf = EmpiricalCf::from_raw(draws).unwrap();
    let tol = 5.0 / (N_BIG as f64).sqrt();
    for i in 1..=20 {
        let t = 0.25 * i as f64;
        let dev = (ecf.eval(t) - dist.cf(t)).norm();
        assert!(dev <= tol, "a=0.7, t={t}: {dev}");
    }
}
