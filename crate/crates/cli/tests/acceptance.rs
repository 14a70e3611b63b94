//! Acceptance checks. Runs without the libtest harness and prints one
//! `PASS`/`FAIL` line per criterion; exits non-zero if any criterion fails.

use std::process::Command;
use std::time::Instant;

use causal_moments::bootstrap::{bootstrap_ci, BootstrapConfig};
use causal_moments::identify::{correlation_identified, moment_family, product_family, MomentFamily};
use causal_moments::reproduce::{reproduce, ReproduceConfig, ReproduceReport};
use causal_moments::rng;
use causal_moments::synthetic::{corpus, exact_identified_value, simulate, Formula, Preset, ScmSpec};
use causal_moments::{Arm, ArmPair, McOptions, ObservationTable};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn pair(i: Arm, j: Arm) -> ArmPair {
    ArmPair::new(i, j).unwrap()
}

/// Adjacent contrasts of the sorted arms plus the outermost one.
fn contrasts(arms: &[Arm]) -> Vec<ArmPair> {
    let mut a = arms.to_vec();
    a.sort_unstable();
    let mut out: Vec<ArmPair> = a.windows(2).map(|w| pair(w[1], w[0])).collect();
    if a.len() >= 3 {
        out.push(pair(a[a.len() - 1], a[0]));
    }
    out
}

fn mean_of(report: &ReproduceReport, row: &str) -> f64 {
    report
        .row(row)
        .and_then(|r| r.cells[0].mean)
        .unwrap_or(f64::NAN)
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo && v <= hi
}

fn criterion_1(report: &ReproduceReport) -> Outcome {
    let m2 = mean_of(report, "sigma^(2)");
    let m3 = mean_of(report, "sigma^(3)");
    let m4 = mean_of(report, "sigma^(4)");
    Outcome {
        pass: within(m2, 0.30, 0.37) && within(m3, -0.31, -0.19) && within(m4, 0.11, 0.29),
        detail: format!("sigma^(2)={m2:.4} sigma^(3)={m3:.4} sigma^(4)={m4:.4}"),
    }
}

fn criterion_2(report: &ReproduceReport) -> Outcome {
    let u2 = mean_of(report, "sigma_U^(2)");
    let l2 = mean_of(report, "sigma_L^(2)");
    let l3 = mean_of(report, "sigma_L^(3)");
    let u3 = mean_of(report, "sigma_U^(3)");
    let u4 = mean_of(report, "sigma_U^(4)");
    Outcome {
        pass: within(u2, 1.48, 1.78)
            && l2 <= 0.01
            && within(l3, -3.9, -3.0)
            && within(u3, 0.07, 0.18)
            && within(u4, 7.0, 9.0),
        detail: format!("U2={u2:.4} L2={l2:.4} L3={l3:.4} U3={u3:.4} U4={u4:.4}"),
    }
}

fn criterion_3(report: &ReproduceReport) -> Outcome {
    let p = mean_of(report, "sigma(1,0;0,-1)");
    let l = mean_of(report, "sigma_L(1,0;0,-1)");
    let u = mean_of(report, "sigma_U(1,0;0,-1)");
    Outcome {
        pass: within(p, -0.42, -0.26) && (l - -0.338).abs() <= 0.08 && (u - -0.168).abs() <= 0.08,
        detail: format!("product={p:.4} lower={l:.4} upper={u:.4}"),
    }
}

fn criterion_4() -> Outcome {
    let members = corpus(4);
    let mut worst: f64 = 0.0;
    let mut oracle_checks = 0;
    let mut containment_failures = 0;
    let mut containment_checks = 0;
    let mut contains = |exact: f64, lower: f64, upper: f64| {
        containment_checks += 1;
        let slack = 1e-9 * exact.abs().max(1.0);
        if exact < lower - slack || exact > upper + slack {
            containment_failures += 1;
        }
    };
    for member in &members {
        let scm = &member.scm;
        let pairs = contrasts(&scm.arms);
        for centered in [false, true] {
            for &arms in &pairs {
                for order in 1..=4 {
                    let v = exact_identified_value(scm, Formula::Moment { order, arms, centered }).unwrap();
                    let exact = scm.exact_moment(arms, order, centered);
                    if member.monotone {
                        worst = worst.max((v.identified - exact).abs());
                        oracle_checks += 1;
                    }
                    contains(exact, v.lower, v.upper);
                }
            }
            for &left in &pairs {
                for &right in &pairs {
                    let v = exact_identified_value(scm, Formula::Product { left, right, centered }).unwrap();
                    let exact = scm.exact_product_moment(left, right, centered);
                    if member.monotone {
                        worst = worst.max((v.identified - exact).abs());
                        oracle_checks += 1;
                    }
                    contains(exact, v.lower, v.upper);
                }
            }
        }
    }
    let monotone = members.iter().filter(|m| m.monotone).count();
    Outcome {
        pass: worst <= 1e-4 && containment_failures == 0,
        detail: format!(
            "{} members ({monotone} monotone), {oracle_checks} oracle checks, max error {worst:.2e}; \
             {containment_failures}/{containment_checks} containment failures",
            members.len()
        ),
    }
}

fn in_sandwich(f: &MomentFamily) -> bool {
    f.identified.value >= f.lower.value - 3.0 * f.lower.std_error
        && f.identified.value <= f.upper.value + 3.0 * f.upper.std_error
}

/// Presets plus finite-support corpus models, as samplers.
fn model_pool() -> Vec<ScmSpec> {
    let mut pool: Vec<ScmSpec> = Preset::ALL.iter().map(|p| p.spec()).collect();
    pool.extend(corpus(5).iter().map(|m| m.scm.to_spec().unwrap()));
    pool
}

fn criterion_5() -> Outcome {
    let pool = model_pool();
    let mut pick = rng::stream(55, 0);
    let mut passed = 0;
    let draws = 50;
    for d in 0..draws {
        let spec = &pool[pick.gen_range(0..pool.len())];
        let table = simulate(spec, 500, rng::derive_seed(55, 1, d)).unwrap();
        let mc = McOptions::with_seed(rng::derive_seed(55, 2, d));
        let pairs = contrasts(&spec.arms());
        let arms = pairs[0];
        let mut ok = (1..=4).all(|m| in_sandwich(&moment_family(&table, m, arms, false, &mc).unwrap()));
        let right = *pairs.get(1).unwrap_or(&arms);
        ok &= in_sandwich(&product_family(&table, arms, right, false, &mc).unwrap());
        passed += ok as usize;
    }
    Outcome {
        pass: passed >= 49,
        detail: format!("{passed}/{draws} draws inside [lower - 3SE, upper + 3SE] for m=1..4 and the product"),
    }
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    let table = simulate(&Preset::Example1.spec(), 2000, 66).unwrap();
    let mc = McOptions::with_seed(66);
    let mut worst_raw: f64 = 0.0;
    let mut worst_central: f64 = 0.0;
    for arms in [pair(1, 0), pair(0, -1)] {
        for m in 1..=4 {
            let raw = moment_family(&table, m, arms, false, &mc).unwrap().identified.value;
            let central = moment_family(&table, m, arms, true, &mc).unwrap().identified.value;
            worst_raw = worst_raw.max((raw - 1.0).abs());
            worst_central = worst_central.max(central.abs());
        }
    }
    pass &= worst_raw <= 0.03 && worst_central <= 0.03;
    let diffs: Vec<String> = [pair(1, 0), pair(0, -1)]
        .iter()
        .map(|&a| format!("{:.4}", table.conditional_mean(a.treated).unwrap() - table.conditional_mean(a.control).unwrap()))
        .collect();
    lines.push(format!(
        "example 1 max |moment-1|={worst_raw:.4} max |central|={worst_central:.4} (sample mean differences {})",
        diffs.join(", ")
    ));

    let cases = [
        (Preset::Example2, pair(2, 1), pair(1, 0), 1.0),
        (Preset::Example3, pair(1, 0), pair(0, -1), -1.0),
    ];
    for (preset, left, right, target) in cases {
        let table = simulate(&preset.spec(), 2000, 67).unwrap();
        let rho = correlation_identified(&table, left, right, &mc).unwrap();
        let clipped = !rho.flags.is_empty();
        pass &= (-1.0..=1.0).contains(&rho.value) && (rho.value - target).abs() <= 0.03;
        lines.push(format!("{} corr={:.4}{}", preset.name(), rho.value, if clipped { " (clipped)" } else { "" }));
    }
    Outcome {
        pass,
        detail: lines.join("; "),
    }
}

fn criterion_7() -> Outcome {
    let pool = model_pool();
    let mut pick = rng::stream(77, 0);
    let samples: usize = 100;
    let mut passed = 0;
    let mut worst_ratio: f64 = 0.0;
    for s in 0..samples {
        let spec = &pool[pick.gen_range(0..pool.len())];
        let n = pick.gen_range(50..=1000);
        let table = simulate(spec, n, rng::derive_seed(77, 1, s as u64)).unwrap();
        let arms = contrasts(&spec.arms())[0];
        if table.arm_count(arms.treated) == 0 || table.arm_count(arms.control) == 0 {
            continue;
        }
        let mc = McOptions::with_seed(rng::derive_seed(77, 2, s as u64));
        let est = moment_family(&table, 1, arms, false, &mc).unwrap().identified;
        let diff = table.conditional_mean(arms.treated).unwrap() - table.conditional_mean(arms.control).unwrap();
        let err = (est.value - diff).abs();
        if est.std_error > 0.0 {
            worst_ratio = worst_ratio.max(err / est.std_error);
        }
        passed += (err <= 3.0 * est.std_error + 1e-12) as usize;
    }
    Outcome {
        pass: passed == samples,
        detail: format!("{passed}/{samples} samples within 3 SE; max |error|/SE {worst_ratio:.2}"),
    }
}

fn criterion_8() -> Outcome {
    let spec = Preset::ScmA.spec();
    let datasets = 200;
    let arms = pair(1, 0);
    let truth = 1.0 / 3.0;
    let mut covered = 0;
    let mut failures = 0;
    for d in 0..datasets {
        let table = simulate(&spec, 100, rng::derive_seed(88, 1, d)).unwrap();
        let config = BootstrapConfig {
            replicates: 200,
            seed: rng::derive_seed(88, 2, d),
            ..BootstrapConfig::default()
        };
        let estimator = |t: &ObservationTable, seed: u64| {
            let mc = McOptions::with_seed(seed).joint_points(10_000);
            moment_family(t, 2, arms, false, &mc).map(|f| f.identified.value)
        };
        match bootstrap_ci(estimator, &table, &config) {
            Ok(ci) => covered += (ci.lower <= truth && truth <= ci.upper) as usize,
            Err(_) => failures += 1,
        }
    }
    let rate = covered as f64 / datasets as f64;
    Outcome {
        pass: within(rate, 0.85, 0.99),
        detail: format!("coverage {rate:.3} over {datasets} datasets (B=200, 1e4 MC points), {failures} failed"),
    }
}

fn run_reproduce(dir: &std::path::Path, name: &str, threads: &str) -> Vec<u8> {
    let path = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_causal-moments"))
        .args(["reproduce", "--seed", "9", "--replications", "6", "--sizes", "40,80", "--mc-points", "4000", "--output"])
        .arg(&path)
        .env("CAUSAL_MOMENTS_THREADS", threads)
        .status()
        .expect("binary runs");
    assert!(status.success(), "reproduce exited with {status}");
    std::fs::read(path).unwrap()
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let a = run_reproduce(dir.path(), "a.json", "1");
    let b = run_reproduce(dir.path(), "b.json", "1");
    let c = run_reproduce(dir.path(), "c.json", "3");
    Outcome {
        pass: !a.is_empty() && a == b && a == c,
        detail: format!("{} bytes; repeat identical: {}; 1 vs 3 threads identical: {}", a.len(), a == b, a == c),
    }
}

fn main() {
    // `cargo test -- --list` and similar harness probes expect no work.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let started = Instant::now();
    let config = ReproduceConfig {
        replications: 200,
        sizes: vec![1000],
        seed: 2024,
        ..ReproduceConfig::default()
    };
    let report = reproduce(&config);
    println!("reproduction study finished in {:.1}s", started.elapsed().as_secs_f64());

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("moment reproduction, scm-a N=1000", Box::new(|| criterion_1(&report))),
        ("moment bounds, scm-a N=1000", Box::new(|| criterion_2(&report))),
        ("product moment and bounds, scm-b N=1000", Box::new(|| criterion_3(&report))),
        ("exact oracle equivalence and bound containment", Box::new(criterion_4)),
        ("sandwich on sampled data", Box::new(criterion_5)),
        ("homogeneous and degenerate examples", Box::new(criterion_6)),
        ("first moment equals mean difference", Box::new(criterion_7)),
        ("bootstrap coverage", Box::new(criterion_8)),
        ("reproduce determinism", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        failed += (!outcome.pass) as usize;
        println!(
            "criterion {} {} - {}: {} [{:.1}s]",
            k + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            name,
            outcome.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
