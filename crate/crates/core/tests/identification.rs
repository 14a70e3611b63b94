use causal_moments::data::Observation;
use causal_moments::identify::{
    ate, central_moment_identified, central_product_moment_identified, correlation_identified, derived_stats,
    moment_family, moment_identified, product_moment_identified, MomentRequest,
};
use causal_moments::integrands::{MomentIntegrand, ProductIntegrand, IDENTIFIED};
use causal_moments::quadrature::integrate_all;
use causal_moments::synthetic::{corpus, simulate, truth, Preset};
use causal_moments::{ArmPair, Error, IntegrationConfig, McOptions, ObservationTable};

fn pair(i: i64, j: i64) -> ArmPair {
    ArmPair::new(i, j).unwrap()
}

fn sample(preset: Preset, n: usize, seed: u64) -> ObservationTable {
    simulate(&preset.spec(), n, seed).unwrap()
}

fn mc(seed: u64) -> McOptions {
    McOptions::with_seed(seed)
}

#[test]
fn scm_a_second_moment_at_n_1000() {
    let t = sample(Preset::ScmA, 1000, 3);
    let v = moment_identified(&t, &MomentRequest::new(2, pair(1, 0), false, mc(3))).unwrap();
    assert!((0.289..=0.418).contains(&v.value), "{}", v.value);
}

#[test]
fn scm_b_product_moment_at_n_1000() {
    let t = sample(Preset::ScmB, 1000, 4);
    let v = product_moment_identified(&t, pair(1, 0), pair(0, -1), &mc(4)).unwrap();
    assert!((-0.419..=-0.260).contains(&v.value), "{}", v.value);
}

#[test]
fn homogeneous_effect_has_vanishing_central_moments_and_spread() {
    let t = sample(Preset::Example1, 20_000, 5);
    for m in 1..=4 {
        let v = central_moment_identified(&t, &MomentRequest::new(m, pair(1, 0), true, mc(m as u64))).unwrap();
        assert!(v.value.abs() < 0.02, "m={m}: {}", v.value);
    }
    let cov = central_product_moment_identified(&t, pair(1, 0), pair(0, -1), &mc(6)).unwrap();
    assert!(cov.value.abs() < 0.02, "{}", cov.value);
    let stats = derived_stats(&t, pair(1, 0), &mc(7)).unwrap();
    assert!(stats.variance < 0.02 && stats.std_dev < 0.15, "{stats:?}");
}

#[test]
fn homogeneous_effect_has_unit_product_moment() {
    let t = sample(Preset::Example1, 20_000, 8);
    let v = product_moment_identified(&t, pair(1, 0), pair(0, -1), &mc(8)).unwrap();
    assert!((v.value - 1.0).abs() < 0.08, "{}", v.value);
}

#[test]
fn heterogeneous_examples_recover_noise_moments() {
    let e2 = sample(Preset::Example2, 20_000, 9);
    let var = central_moment_identified(&e2, &MomentRequest::new(2, pair(1, 0), true, mc(9))).unwrap();
    assert!((var.value - truth::UNIFORM_SECOND_MOMENT).abs() < 0.04, "{}", var.value);
    let cov = central_product_moment_identified(&e2, pair(2, 1), pair(1, 0), &mc(10)).unwrap();
    assert!((cov.value - 1.0 / 3.0).abs() < 0.04, "{}", cov.value);
    let rho = correlation_identified(&e2, pair(2, 1), pair(1, 0), &mc(11)).unwrap();
    assert!(rho.value > 0.98 && rho.value <= 1.0, "{}", rho.value);

    let e3 = sample(Preset::Example3, 20_000, 12);
    let prod = product_moment_identified(&e3, pair(1, 0), pair(0, -1), &mc(12)).unwrap();
    assert!((prod.value - truth::EXAMPLE_3_PRODUCT).abs() < 0.08, "{}", prod.value);
    let cov = central_product_moment_identified(&e3, pair(1, 0), pair(0, -1), &mc(13)).unwrap();
    assert!((cov.value + 1.0 / 3.0).abs() < 0.04, "{}", cov.value);
    let rho = correlation_identified(&e3, pair(1, 0), pair(0, -1), &mc(14)).unwrap();
    assert!(rho.value < -0.98 && rho.value >= -1.0, "{}", rho.value);
}

#[test]
fn scm_a_variance_and_average_effect() {
    let t = sample(Preset::ScmA, 20_000, 15);
    let stats = derived_stats(&t, pair(1, 0), &mc(15)).unwrap();
    assert!((stats.variance - truth::SCM_A_VARIANCE).abs() < 0.015, "{stats:?}");
    assert_eq!(stats.std_dev, stats.variance.sqrt());
    let effect = ate(&t, pair(1, 0)).unwrap();
    assert!((effect - truth::SCM_A_ATE).abs() < 0.03, "{effect}");
}

#[test]
fn first_moment_matches_the_mean_difference() {
    for (k, preset) in Preset::ALL.iter().enumerate() {
        let t = sample(*preset, 400, 20 + k as u64);
        let arms = {
            let a: Vec<i64> = t.arms().iter().copied().collect();
            pair(a[a.len() - 1], a[0])
        };
        let est = moment_identified(&t, &MomentRequest::new(1, arms, false, mc(k as u64))).unwrap();
        let diff = ate(&t, arms).unwrap();
        assert!((est.value - diff).abs() <= 3.0 * est.std_error + 1e-12, "{preset}: {} vs {diff}", est.value);

        let centred = central_moment_identified(&t, &MomentRequest::new(1, arms, true, mc(k as u64))).unwrap();
        assert!(centred.value.abs() <= 3.0 * centred.std_error + 1e-12, "{preset}: {}", centred.value);
    }
}

#[test]
fn even_moments_are_nonnegative() {
    for seed in 0..5 {
        let t = sample(Preset::ScmB, 60, seed);
        for m in [2, 4] {
            for centered in [false, true] {
                let f = moment_family(&t, m, pair(1, -1), centered, &mc(seed)).unwrap();
                assert!(f.identified.value >= 0.0);
            }
        }
    }
}

#[test]
fn raw_moments_are_invariant_under_row_permutation() {
    let t = sample(Preset::ScmA, 300, 30);
    let mut rows = t.rows().to_vec();
    rows.reverse();
    rows.rotate_left(17);
    let shuffled = ObservationTable::new(rows).unwrap();
    for m in 1..=4 {
        let a = moment_family(&t, m, pair(1, 0), false, &mc(2)).unwrap();
        let b = moment_family(&shuffled, m, pair(1, 0), false, &mc(2)).unwrap();
        assert_eq!(a, b);
        // The centre is a sequential sum, so centred values may move in the last bits.
        let a = moment_family(&t, m, pair(1, 0), true, &mc(2)).unwrap();
        let b = moment_family(&shuffled, m, pair(1, 0), true, &mc(2)).unwrap();
        assert!((a.identified.value - b.identified.value).abs() < 1e-12);
    }
}

#[test]
fn population_cdfs_of_monotone_models_recover_enumerated_moments() {
    let members: Vec<_> = corpus(17).into_iter().filter(|m| m.monotone).take(8).collect();
    for member in &members {
        let scm = &member.scm;
        let arms = pair(scm.arms[scm.arms.len() - 1], scm.arms[0]);
        for centered in [false, true] {
            let fi = scm.population_cdf(arms.treated, centered);
            let fj = scm.population_cdf(arms.control, centered);
            for m in 1..=3u32 {
                let cfg = IntegrationConfig::joint(m as usize, 200_000, 40 + m as u64, scm.domain(centered));
                let est = integrate_all(&MomentIntegrand::new(m as usize, &fi, &fj), &cfg).unwrap()[IDENTIFIED];
                let exact = scm.exact_moment(arms, m, centered);
                assert!(
                    (est.value - exact).abs() <= 4.0 * est.std_error + 1e-9,
                    "{} m={m} centered={centered}: {} vs {exact}",
                    scm.name,
                    est.value
                );
            }
        }
        let mid = scm.arms[scm.arms.len() / 2];
        if mid != arms.treated && mid != arms.control {
            let (left, right) = (pair(arms.treated, mid), pair(mid, arms.control));
            let cdf = |a| scm.population_cdf(a, false);
            let (fi, fj, fk, fh) = (cdf(left.treated), cdf(left.control), cdf(right.treated), cdf(right.control));
            let cfg = IntegrationConfig::joint(2, 200_000, 50, scm.domain(false));
            let est = integrate_all(&ProductIntegrand::new(&fi, &fj, &fk, &fh), &cfg).unwrap()[IDENTIFIED];
            let exact = scm.exact_product_moment(left, right, false);
            assert!((est.value - exact).abs() <= 4.0 * est.std_error + 1e-9, "{}", scm.name);
        }
    }
}

#[test]
fn invalid_requests_are_rejected() {
    let t = ObservationTable::new(vec![Observation::new(0, 1.0), Observation::new(1, 2.0)]).unwrap();
    assert!(matches!(
        moment_identified(&t, &MomentRequest::new(0, pair(1, 0), false, mc(0))),
        Err(Error::InvalidOrder(0))
    ));
    assert!(matches!(
        moment_identified(&t, &MomentRequest::new(2, pair(3, 0), false, mc(0))),
        Err(Error::EmptyArm(3))
    ));
    assert!(matches!(
        product_moment_identified(&t, pair(1, 0), pair(0, 7), &mc(0)),
        Err(Error::EmptyArm(7))
    ));
    assert!(ArmPair::new(2, 2).is_err());
}
