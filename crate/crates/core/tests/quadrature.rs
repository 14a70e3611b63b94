use causal_moments::data::FnCdf;
use causal_moments::integrands::{MomentIntegrand, IDENTIFIED};
use causal_moments::quadrature::{draw_axis_points, integrate, integrate_all, FnIntegrand};
use causal_moments::synthetic::truth;
use causal_moments::{DomainBounds, Error, IntegrationConfig};

fn unit() -> DomainBounds {
    DomainBounds::new(0.0, 1.0).unwrap()
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Population CDFs of SCM A. Under `X = 0`, `Y = -U ~ Unif(-1, 1)`; under
/// `X = 1`, `Y = -2U` for `U >= 0` and `0` otherwise, so half the mass sits at
/// zero and the rest is uniform on `[-2, 0)`.
fn scm_a_cdfs() -> (FnCdf<fn(f64) -> f64>, FnCdf<fn(f64) -> f64>) {
    fn treated(y: f64) -> f64 {
        if y <= 0.0 {
            clamp01((y + 2.0) / 4.0)
        } else {
            1.0
        }
    }
    fn control(y: f64) -> f64 {
        clamp01((y + 1.0) / 2.0)
    }
    (FnCdf(treated as fn(f64) -> f64), FnCdf(control as fn(f64) -> f64))
}

#[test]
fn constant_integrand_is_exact_in_both_modes() {
    let bounds = DomainBounds::new(0.0, 2.0).unwrap();
    let one = FnIntegrand::new(2, |_: &[f64]| 1.0);
    assert_eq!(integrate(&one, &IntegrationConfig::joint(2, 1000, 3, bounds)).unwrap(), 4.0);
    assert_eq!(integrate(&one, &IntegrationConfig::tensor(2, 40, 3, bounds)).unwrap(), 4.0);
}

#[test]
fn ordered_pair_indicator_has_half_the_mass() {
    let f = FnIntegrand::new(2, |p: &[f64]| (p[0] < p[1]) as u8 as f64);
    let v = integrate(&f, &IntegrationConfig::joint(2, 100_000, 11, unit())).unwrap();
    assert!((v - 0.5).abs() < 0.01, "{v}");
}

#[test]
fn degenerate_cube_integrates_to_zero() {
    let bounds = DomainBounds::new(3.0, 3.0).unwrap();
    let f = FnIntegrand::new(3, |_: &[f64]| 5.0);
    assert_eq!(integrate(&f, &IntegrationConfig::joint(3, 100, 0, bounds)).unwrap(), 0.0);
}

#[test]
fn scm_a_population_moments_from_closed_form_cdfs() {
    let (f1, f0) = scm_a_cdfs();
    let bounds = DomainBounds::new(-2.0, 1.0).unwrap();
    for &(m, expected) in &truth::SCM_A_MOMENTS {
        let integrand = MomentIntegrand::new(m as usize, &f1, &f0);
        let cfg = IntegrationConfig::joint(m as usize, 400_000, 100 + m as u64, bounds);
        let est = integrate_all(&integrand, &cfg).unwrap()[IDENTIFIED];
        assert!(
            (est.value - expected).abs() <= 4.0 * est.std_error + 1e-9,
            "m={m}: {} vs {expected} (se {})",
            est.value,
            est.std_error
        );
    }
}

#[test]
fn tensor_mode_matches_joint_mode_for_second_moment() {
    let (f1, f0) = scm_a_cdfs();
    let bounds = DomainBounds::new(-2.0, 1.0).unwrap();
    let integrand = MomentIntegrand::new(2, &f1, &f0);
    let tensor = integrate(&integrand, &IntegrationConfig::tensor(2, 1000, 5, bounds)).unwrap();
    assert!((tensor - 1.0 / 3.0).abs() < 0.03, "{tensor}");
}

#[test]
fn integration_is_linear_under_a_shared_seed() {
    let f = |p: &[f64]| (p[0] * 3.0).sin() + p[1] * p[1];
    let g = |p: &[f64]| (p[0] < 0.3) as u8 as f64 - p[1];
    let (alpha, beta) = (2.5, -0.75);
    for cfg in [
        IntegrationConfig::joint(2, 50_000, 21, unit()),
        IntegrationConfig::tensor(2, 300, 21, unit()),
    ] {
        let lhs = integrate(&FnIntegrand::new(2, |p: &[f64]| alpha * f(p) + beta * g(p)), &cfg).unwrap();
        let rhs = alpha * integrate(&FnIntegrand::new(2, f), &cfg).unwrap()
            + beta * integrate(&FnIntegrand::new(2, g), &cfg).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
    }
}

#[test]
fn results_do_not_depend_on_the_worker_count() {
    let (f1, f0) = scm_a_cdfs();
    let bounds = DomainBounds::new(-2.0, 1.0).unwrap();
    let integrand = MomentIntegrand::new(3, &f1, &f0);
    let cfg = IntegrationConfig::joint(3, 50_000, 9, bounds);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| integrate_all(&integrand, &cfg).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, integrate_all(&integrand, &cfg).unwrap());
}

#[test]
fn joint_standard_deviation_shrinks_with_root_n() {
    let f = FnIntegrand::new(2, |p: &[f64]| (p[0] + p[1] < 0.8) as u8 as f64);
    let spread = |n: usize| {
        let values: Vec<f64> = (0..200)
            .map(|s| integrate(&f, &IntegrationConfig::joint(2, n, 1000 + s, unit())).unwrap())
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
    };
    let ratio = spread(500) / spread(8000);
    assert!((4.0 / 1.3..=4.0 * 1.3).contains(&ratio), "ratio {ratio}");
}

#[test]
fn reported_standard_error_tracks_the_spread() {
    let f = FnIntegrand::new(1, |p: &[f64]| p[0] * p[0]);
    let cfg = IntegrationConfig::joint(1, 20_000, 4, unit());
    let est = integrate_all(&f, &cfg).unwrap()[0];
    // Var(U^2) = 1/5 - 1/9 for U ~ Unif(0, 1).
    let expected = ((1.0 / 5.0 - 1.0 / 9.0) / 20_000.0f64).sqrt();
    assert!((est.std_error / expected - 1.0).abs() < 0.05, "{} vs {expected}", est.std_error);
}

#[test]
fn tensor_mode_is_guarded_above_two_dimensions() {
    let f = FnIntegrand::new(3, |_: &[f64]| 1.0);
    let mut cfg = IntegrationConfig::tensor(3, 10, 0, unit());
    assert!(matches!(integrate(&f, &cfg), Err(Error::TensorGuard { .. })));
    cfg.allow_large_tensor = true;
    assert_eq!(integrate(&f, &cfg).unwrap(), 1.0);
}

#[test]
fn dimension_mismatch_is_a_config_error() {
    let f = FnIntegrand::new(2, |_: &[f64]| 1.0);
    let cfg = IntegrationConfig::joint(3, 10, 0, unit());
    assert!(matches!(integrate(&f, &cfg), Err(Error::Config(_))));
}

#[test]
fn axis_draws_are_reproducible_uniform_and_independent_across_axes() {
    let a = draw_axis_points(unit(), 100_000, 8, 0).unwrap();
    assert_eq!(a, draw_axis_points(unit(), 100_000, 8, 0).unwrap());
    assert_ne!(a, draw_axis_points(unit(), 100_000, 8, 1).unwrap());
    assert!(a.iter().all(|&v| (0.0..=1.0).contains(&v)));
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    assert!((mean - 0.5).abs() < 0.01);

    let c = DomainBounds::new(2.5, 2.5).unwrap();
    assert!(draw_axis_points(c, 3, 0, 0).unwrap().iter().all(|&v| v == 2.5));
}
