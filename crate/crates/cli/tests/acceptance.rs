//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use sur_core::algebras::{build_gellmann, build_su11, build_su2, build_wh, weight_basis_state, Bargmann};
use sur_core::entangle::{
    collective_operators, identity_checks, mixed_state_convexity_check, random_product_for, slater_state,
    witness, witness_with,
};
use sur_core::exact::{bundled_fixture, compare_fixture, MatrixFixture};
use sur_core::matcore::{variance, I, ONE, ZERO};
use sur_core::optimize::{gradient_check, minimize_variance_sum, tangent_gradient_norm, MinimizeOptions};
use sur_core::sur::{
    haar_random_state, random_state_for, robertson_product, sample_observable, saturating_state, sweep, SweepSummary,
};
use sur_core::weights::{casimir_eigenvalue, casimir_matrix, expected_casimir, sur_bound, to_f64};
use sur_core::{AlgebraSpec, DynkinLabel, GeneratorSet, StateVector};

const MARGIN_TOL: f64 = 1e-9;
const CASIMIR_TOL: f64 = 1e-10;
const GAP_TOL: f64 = 1e-6;
const GRADIENT_TOL: f64 = 1e-5;
const GRADIENT_STEP: f64 = 1e-5;
const IDENTITY_TOL: f64 = 1e-9;
const EXACT_FLOAT_TOL: f64 = 1e-12;
const SAMPLE_K: f64 = 5.0;
const SAMPLE_SHOTS: usize = 100_000;
const SAMPLE_SEEDS: u64 = 100;
const SAMPLE_MIN_PASS: usize = 99;
const SWEEP_STATES: usize = 10_000;
const BOUND_LABEL_MAX: u32 = 6;
const BOUND_TIME: Duration = Duration::from_secs(1);
const SWEEP_TIME: Duration = Duration::from_secs(60);
const MINIMIZE_TIME: Duration = Duration::from_secs(30);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn q(p: i64, d: i64) -> Rational64 {
    Rational64::new(p, d)
}

fn printed_bound(l: &[i64]) -> Rational64 {
    let r = Rational64::from_integer;
    match *l {
        [a, b] => r(2 * (a + b)),
        [a, b, c] => r(3 * a + 4 * b + 3 * c),
        [a, b, c, d] => r(4 * a + 6 * b + 6 * c + 4 * d),
        _ => unreachable!(),
    }
}

fn printed_casimir(l: &[i64]) -> Rational64 {
    let r = Rational64::from_integer;
    match *l {
        [a, b] => q(2, 3) * r(a * a + b * b + 3 * (a + b) + a * b),
        [a, b, c] => {
            q(1, 4) * r(3 * a * a + 2 * (2 * b + c + 6) * a + 4 * b * b + 4 * b * (c + 4) + 3 * c * (c + 4))
        }
        [a, b, c, d] => {
            q(2, 5)
                * r(2 * a * a + 3 * b * a + 2 * c * a + d * a + 10 * a + 3 * b * b + 3 * c * c + 2 * d * d
                    + 15 * b
                    + 4 * b * c
                    + 15 * c
                    + 2 * b * d
                    + 3 * c * d
                    + 10 * d)
        }
        _ => unreachable!(),
    }
}

fn grid(n: usize) -> impl Iterator<Item = (DynkinLabel, Vec<i64>)> {
    DynkinLabel::grid(n - 1, BOUND_LABEL_MAX).map(|l| {
        let v = l.labels().iter().map(|&x| x as i64).collect();
        (l, v)
    })
}

fn kappas() -> Vec<Bargmann> {
    [(1, 4), (1, 2), (3, 4), (1, 1), (3, 2)]
        .iter()
        .map(|&(p, d)| Bargmann::new(q(p, d)).unwrap())
        .collect()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    let mut bad = Vec::new();
    for two_j in 0..=16u32 {
        let spec = AlgebraSpec::Su2 { two_j };
        checked += 1;
        if sur_core::weights::algebra_bound(&spec).unwrap() != q(two_j as i64, 2) {
            bad.push(spec.to_string());
        }
    }
    for n in 3..=5 {
        for (label, v) in grid(n) {
            checked += 1;
            if sur_bound(n, &label).unwrap() != printed_bound(&v) {
                bad.push(format!("su({n}){label}"));
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        bad.is_empty() && elapsed < BOUND_TIME,
        format!("{checked} labels exact, {} mismatches, {elapsed:.2?}", bad.len()),
    )
}

fn criterion_2() -> Verdict {
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in 3..=5 {
        for (label, v) in grid(n) {
            checked += 1;
            if casimir_eigenvalue(n, &label).unwrap() != printed_casimir(&v) {
                bad.push(format!("su({n}){label}"));
            }
        }
    }
    let mut worst: f64 = 0.0;
    let mut check = |gs: &GeneratorSet, block: usize| {
        let want = to_f64(expected_casimir(gs.spec()).unwrap());
        let c = casimir_matrix(gs);
        for r in 0..block {
            for col in 0..block {
                let target = if r == col { want } else { 0.0 };
                worst = worst.max((c.get(r, col) - target).norm());
            }
        }
    };
    for n in 3..=5 {
        let gs = build_gellmann(n).unwrap();
        check(&gs, n);
    }
    for two_j in 1..=8 {
        let gs = build_su2(two_j).unwrap();
        check(&gs, gs.rep_dim());
    }
    for kappa in kappas() {
        // away from the cutoff: the leading half of the ladder
        let gs = build_su11(kappa, 200).unwrap();
        check(&gs, 100);
    }
    let su3 = casimir_eigenvalue(3, &DynkinLabel::fundamental(3)).unwrap();
    let su3_matrix = casimir_matrix(&build_gellmann(3).unwrap()).identity_factor(CASIMIR_TOL).unwrap().re;
    let pass = bad.is_empty() && worst < CASIMIR_TOL && su3 == q(8, 3) && (su3_matrix - 8.0 / 3.0).abs() < CASIMIR_TOL;
    verdict(
        pass,
        format!(
            "{checked} polynomial values exact, max casimir deviation {worst:.1e}, su(3) fundamental {su3}"
        ),
    )
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut specs = vec![AlgebraSpec::Wh { cutoff: 64 }];
    specs.extend((1..=8).map(|two_j| AlgebraSpec::Su2 { two_j }));
    specs.extend(kappas().into_iter().map(|kappa| AlgebraSpec::Su11 { kappa, cutoff: 200 }));
    specs.extend((3..=5).map(|n| AlgebraSpec::Sun { n }));
    let mut min_margin = f64::INFINITY;
    let mut failures = 0;
    for (i, spec) in specs.iter().enumerate() {
        let gs = spec.build().unwrap();
        let summary = SweepSummary::of(&sweep(&gs, SWEEP_STATES, 1000 + i as u64).unwrap());
        min_margin = min_margin.min(summary.min_margin);
        failures += (summary.min_margin < -MARGIN_TOL) as usize;
    }
    let elapsed = start.elapsed();
    verdict(
        failures == 0 && elapsed < SWEEP_TIME,
        format!(
            "{} families x {SWEEP_STATES} states, min margin {min_margin:.2e}, {elapsed:.2?}",
            specs.len()
        ),
    )
}

fn criterion_4() -> Verdict {
    let mut specs = vec![AlgebraSpec::Wh { cutoff: 64 }];
    specs.extend((1..=6).map(|two_j| AlgebraSpec::Su2 { two_j }));
    specs.extend(kappas().into_iter().map(|kappa| AlgebraSpec::Su11 { kappa, cutoff: 64 }));
    specs.extend((3..=5).map(|n| AlgebraSpec::Sun { n }));
    let mut worst_gap: f64 = 0.0;
    let mut worst_time = Duration::ZERO;
    let mut worst_grad: f64 = 0.0;
    let mut failed = Vec::new();
    for spec in &specs {
        let gs = spec.build().unwrap();
        let start = Instant::now();
        let r = minimize_variance_sum(&gs, &MinimizeOptions::default()).unwrap();
        let elapsed = start.elapsed();
        worst_time = worst_time.max(elapsed);
        worst_gap = worst_gap.max(r.gap.abs());
        let mut grad: f64 = 0.0;
        for i in 0..3 {
            let s = random_state_for(&gs, 77, i);
            grad = grad.max(gradient_check(&gs, &s, GRADIENT_STEP).unwrap());
        }
        grad = grad.max(gradient_check(&gs, &saturating_state(&gs), GRADIENT_STEP).unwrap());
        worst_grad = worst_grad.max(grad);
        let stationary = tangent_gradient_norm(&gs, &saturating_state(&gs)) < 1e-8;
        if !(r.gap >= -MARGIN_TOL && r.gap <= GAP_TOL) || elapsed >= MINIMIZE_TIME || grad >= GRADIENT_TOL || !stationary
        {
            failed.push(spec.to_string());
        }
    }
    verdict(
        failed.is_empty(),
        format!(
            "{} specs, max |gap| {worst_gap:.1e}, slowest {worst_time:.2?}, max gradient deviation {worst_grad:.1e}{}",
            specs.len(),
            if failed.is_empty() { String::new() } else { format!(", failed {failed:?}") }
        ),
    )
}

fn criterion_5() -> Verdict {
    let mut details = Vec::new();
    let mut pass = true;
    for n in [4, 5] {
        let fx = MatrixFixture::from_json(bundled_fixture(n).unwrap()).unwrap();
        let r = compare_fixture(&fx).unwrap();
        pass &= r.passed() && r.matrices == n * n - 1;
        details.push(format!(
            "su({n}) {} matrices, {} mismatches, orthonormal {}",
            r.matrices,
            r.mismatches.len(),
            r.orthonormal
        ));
    }
    verdict(pass, details.join("; "))
}

fn criterion_6() -> Verdict {
    let r3 = identity_checks(3, 1000, 3).unwrap();
    let r4 = identity_checks(4, 1000, 4).unwrap();
    let r5 = identity_checks(5, 1000, 5).unwrap();
    let printed = (r3.cartan_square_exact.as_str(), r3.offdiag_square_exact.as_str(), r3.bloch_exact.as_str())
        == ("4/3", "4", "4/3")
        && r4.cartan_square_exact == "3/2"
        && r5.cartan_square_exact == "8/5"
        && (r4.witness_constant, r5.witness_constant) == (6, 8);
    let bloch = [&r3, &r4, &r5].iter().map(|r| r.bloch_max_deviation).fold(0.0, f64::max);
    verdict(
        printed && r3.holds && r4.holds && r5.holds && bloch < IDENTITY_TOL,
        format!(
            "n=3 ({}, {}, {}), n=4 {}, n=5 {}, Bloch max deviation {bloch:.1e}",
            r3.cartan_square_exact, r3.offdiag_square_exact, r3.bloch_exact, r4.cartan_square_exact, r5.cartan_square_exact
        ),
    )
}

fn criterion_7() -> Verdict {
    let slater = witness(&slater_state(3).unwrap(), 3, 3).unwrap();
    let worked = slater.lhs.abs() < EXACT_FLOAT_TOL && (slater.rhs + 12.0).abs() < EXACT_FLOAT_TOL;
    let mut flagged = 0;
    let mut min_margin = f64::INFINITY;
    for particles in [2, 3] {
        let set = collective_operators(3, particles).unwrap();
        for i in 0..1000 {
            let r = witness_with(&random_product_for(3, particles, 70 + particles as u64, i), &set).unwrap();
            min_margin = min_margin.min(r.margin()).min(r.total_margin());
            flagged += r.entangled() as usize;
        }
    }
    let mut mixtures_ok = true;
    for particles in [2, 3] {
        let c = mixed_state_convexity_check(3, particles, 1000, 90 + particles as u64).unwrap();
        mixtures_ok &= c.never_violated && c.convexity_holds;
        min_margin = min_margin.min(c.min_witness_margin).min(c.min_total_margin);
    }
    verdict(
        worked && slater.total_violated && !slater.violated && flagged == 0 && mixtures_ok && min_margin >= -MARGIN_TOL,
        format!(
            "slater lhs {} rhs {} total {} vs {}, 2000 products + 2000 mixtures flagged {flagged}, min margin {min_margin:.2e}",
            slater.lhs, slater.rhs, slater.total_variance, slater.total_variance_bound
        ),
    )
}

fn criterion_8() -> Verdict {
    let gs = build_su2(2).unwrap();
    let [jx, jy, _] = gs.spin_components().unwrap();
    // (|m=-1> + i |m=+1>) / sqrt 2: <J_z> = 0 yet both variances are 1/2
    let s = StateVector::normalized(vec![ONE, ZERO, I]).unwrap();
    let r = robertson_product(&s, &jx, &jy).unwrap();
    let top = robertson_product(&weight_basis_state(&gs, 2).unwrap(), &jx, &jy).unwrap();
    verdict(
        r.bound.abs() < EXACT_FLOAT_TOL && r.product > 0.1 && (top.product - top.bound).abs() < EXACT_FLOAT_TOL,
        format!(
            "zero-bound state: product {:.6} bound {:.1e}; highest weight: product {:.6} bound {:.6}",
            r.product, r.bound, top.product, top.bound
        ),
    )
}

fn criterion_9() -> Verdict {
    let wh = build_wh(64).unwrap();
    let su2 = build_su2(1).unwrap();
    let su3 = build_gellmann(3).unwrap();
    let pairs = [
        ("vacuum/x", saturating_state(&wh), wh.generator(0).clone()),
        ("spin-1/2 up/Jx", saturating_state(&su2), su2.spin_components().unwrap()[0].clone()),
        ("su(3) haar/h2", haar_random_state(3, 5).unwrap(), su3.generator(7).clone()),
    ];
    let mut counts = Vec::new();
    for (name, s, m) in &pairs {
        let exact = variance(s, m).unwrap();
        let within = (0..SAMPLE_SEEDS)
            .filter(|&seed| sample_observable(s, m, SAMPLE_SHOTS, seed).unwrap().within(exact, SAMPLE_K))
            .count();
        counts.push((name.to_string(), exact, within));
    }
    let pass = counts.iter().all(|c| c.2 >= SAMPLE_MIN_PASS);
    let detail = counts
        .iter()
        .map(|(n, e, w)| format!("{n} (exact {e:.6}) {w}/{SAMPLE_SEEDS}"))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(pass, detail)
}

fn run_cli(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_sur"))
        .args(args)
        .env_remove("SUR_OUTPUT_DIR")
        .output()
        .expect("run sur");
    (out.status.code(), out.stdout)
}

fn criterion_10() -> Verdict {
    let runs: &[&[&str]] = &[
        &["verify", "--algebra", "su:3", "--trials", "200", "--seed", "7"],
        &["verify", "--algebra", "su11", "--kappa", "1/2", "--cutoff", "200", "--trials", "20"],
        &["verify", "--algebra", "wh", "--trials", "20", "--format", "csv"],
        &["minimize", "--algebra", "su2:j=1", "--seed", "3"],
        &["minimize", "--algebra", "wh:cutoff=32", "--restarts", "4"],
        &["witness", "--n", "3", "--N", "3", "--state", "slater"],
        &["witness", "--n", "3", "--N", "2", "--state", "random-mixture", "--trials", "30", "--seed", "9"],
        &["identities", "--n", "4", "--trials", "200"],
        &["sample", "--algebra", "su2:j=1/2", "--shots", "5000", "--repeats", "3", "--seed", "5"],
        &["table", "--max-label", "2", "--format", "csv"],
    ];
    let mut differing = Vec::new();
    for args in runs {
        let a = run_cli(args);
        let b = run_cli(args);
        if a != b || a.0 != Some(0) || a.1.is_empty() {
            differing.push(args.join(" "));
        }
    }
    verdict(
        differing.is_empty(),
        format!(
            "{} command lines run twice, {} differ or fail{}",
            runs.len(),
            differing.len(),
            if differing.is_empty() { String::new() } else { format!(": {differing:?}") }
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("bound reproduction", criterion_1),
        ("casimir consistency", criterion_2),
        ("validity sweep", criterion_3),
        ("tightness certification", criterion_4),
        ("reference bases", criterion_5),
        ("operator identities", criterion_6),
        ("witness example", criterion_7),
        ("robertson contrast", criterion_8),
        ("sampling", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        failures += !v.pass as usize;
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {}/10 passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
