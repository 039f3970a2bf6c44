//! Acceptance suite: one PASS/FAIL line per criterion, each checked at its
//! stated tolerance and runtime budget. Exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use modwalk::chains::{
    coupled_step, draw_word, inversion_partner, negation_partner, project_c, run_x,
    sample_stationary_w, sample_stationary_x, sample_stationary_y, simulate_v, simulate_w,
    trajectory_rng,
};
use modwalk::minkowski::{kernel_pushforward_cdf, qmark_oracle};
use modwalk::stats::{
    exact_distribution_w, exact_distribution_x, fourier_coefficient, geometric_pmf_check,
    ks_distance, EmpiricalDistribution, FiniteDistribution, Reference,
};
use modwalk::tiling::{cayley_ball, is_nearest_neighbor_path, project_walk};
use modwalk::{
    lambda_survival, qmark, DyadicRational, ExtendedRational, GeneratorIndex, Mode, PlaneValue,
    ProjectiveMatrix, UpperHalfPoint, WalkConfig,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const SEED: u64 = 20_240_917;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn q(s: &str) -> ExtendedRational {
    s.parse().unwrap()
}

fn h(i: GeneratorIndex, x: &ExtendedRational) -> ExtendedRational {
    ProjectiveMatrix::generator(i).mobius_real(x)
}

/// `p/q` with `1 ≤ q ≤ max_den` and `0 ≤ p ≤ q`.
fn random_unit_rationals(seed: u64, count: usize, max_den: i64) -> Vec<ExtendedRational> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let den = rng.random_range(1..=max_den);
            let num = rng.random_range(0..=den);
            ExtendedRational::ratio(num, den).unwrap()
        })
        .collect()
}

fn multiset(values: impl IntoIterator<Item = ExtendedRational>) -> BTreeMap<ExtendedRational, usize> {
    let mut m = BTreeMap::new();
    for v in values {
        *m.entry(v).or_insert(0) += 1;
    }
    m
}

fn generator_set() -> Outcome {
    let mut found = Vec::new();
    for a in -1i64..=1 {
        for b in -1i64..=1 {
            for c in -1i64..=1 {
                for d in -1i64..=1 {
                    let canonical = c > 0 || (c == 0 && d > 0);
                    let identity = (a, b, c, d) == (1, 0, 0, 1);
                    if a * d - b * c == 1 && a * a + b * b + c * c + d * d <= 3 && canonical && !identity {
                        found.push(ProjectiveMatrix::from_i64(a, b, c, d).unwrap());
                    }
                }
            }
        }
    }
    let gens = ProjectiveMatrix::generators();
    let same = found.len() == 9 && gens.iter().all(|g| found.contains(g));
    outcome(same, format!("{} canonical matrices found, equal to E_0..E_8: {same}", found.len()))
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    let mut mismatches = 0;
    for den in 1..=200i64 {
        for num in 0..=den {
            let x = ExtendedRational::ratio(num, den).unwrap();
            if qmark(&x).unwrap() != qmark_oracle(&x).unwrap() {
                mismatches += 1;
            }
            checked += 1;
        }
    }
    outcome(mismatches == 0, format!("{checked} fractions, {mismatches} mismatches"))
}

fn functional_equations() -> Outcome {
    let xs = random_unit_rationals(SEED, 1000, 10_000);
    let mut failures = 0;
    for x in &xs {
        let qx = qmark(x).unwrap();
        let reflect = qmark(&x.unimodular_map_i64(-1, 1, 0, 1)).unwrap() == qx.complement();
        let shrink = qmark(&x.unimodular_map_i64(1, 0, 1, 1)).unwrap() == qx.half();
        let flip = qmark(&x.unimodular_map_i64(0, 1, 1, 1)).unwrap() == qx.half().complement();
        // qmark(H_4(w)) + 1 − qmark(H_1(w)) = qmark(w)
        let tent = qmark(&x.unimodular_map_i64(1, 0, 1, 1))
            .unwrap()
            .add(&qmark(&x.unimodular_map_i64(0, 1, 1, 1)).unwrap().complement())
            == qx;
        if !(reflect && shrink && flip && tent) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{} rationals, {failures} failures", xs.len()))
}

fn kernel_stationarity() -> Outcome {
    let grid: Vec<ExtendedRational> = (1..=500).map(|j| ExtendedRational::ratio(j, 501).unwrap()).collect();
    let failures = grid
        .iter()
        .filter(|w| {
            let lhs = ExtendedRational::from(kernel_pushforward_cdf(w).unwrap());
            lhs != qmark(w).unwrap().to_rational()
        })
        .count();
    outcome(failures == 0, format!("{} grid points, {failures} failures", grid.len()))
}

fn pathwise_coupling() -> Outcome {
    let x0 = q("2/3");
    let mut violations = 0;
    for j in 0..1000 {
        let word = draw_word(&mut trajectory_rng(SEED, j), 100);
        let xs = run_x(&x0, &word);
        let mut w = project_c(&x0);
        for (n, &m) in word.iter().enumerate() {
            match coupled_step(&xs[n], &w, m) {
                Ok((_, next)) => w = next,
                Err(_) => {
                    violations += 1;
                    break;
                }
            }
            if project_c(&xs[n + 1]) != w {
                violations += 1;
                break;
            }
        }
    }
    outcome(violations == 0, format!("1000 paths of length 100, {violations} violations"))
}

fn equivariance() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(SEED + 6);
    let mut failures = 0;
    for _ in 0..100 {
        let x = ExtendedRational::ratio(rng.random_range(-100_000..=100_000), rng.random_range(1..=10_000)).unwrap();
        let gens = || GeneratorIndex::all();
        let neg_ok = multiset(gens().map(|i| h(i, &x.neg()))) == multiset(gens().map(|i| h(i, &x).neg()))
            && gens().all(|i| h(i, &x.neg()) == h(negation_partner(i), &x).neg());
        let inv = x.recip().neg();
        let inv_ok = multiset(gens().map(|i| h(i, &inv))) == multiset(gens().map(|i| h(i, &x).recip().neg()))
            && gens()
                .filter(|i| i.get() != 0)
                .all(|i| h(i, &inv) == h(inversion_partner(i), &x));
        let involutions = gens().all(|i| {
            negation_partner(negation_partner(i)) == i && inversion_partner(inversion_partner(i)) == i
        });
        if !(neg_ok && inv_ok && involutions) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("100 rationals, {failures} failures"))
}

fn small_n_oracles() -> Outcome {
    let x0 = q("2/3");
    let mut bad = Vec::new();
    for n in 0..=5 {
        let projected = exact_distribution_x(&x0, n).unwrap().pushforward(project_c);
        if projected != exact_distribution_w(&project_c(&x0), n).unwrap() {
            bad.push(n);
        }
    }
    let expected = FiniteDistribution::from_weighted([
        (q("0"), BigRational::new(5.into(), 9.into())),
        (q("1"), BigRational::new(4.into(), 9.into())),
    ])
    .unwrap();
    let one_step = exact_distribution_w(&q("0"), 1).unwrap() == expected;
    outcome(
        bad.is_empty() && one_step,
        format!("n = 0..5 mismatches {bad:?}; W(0, 1) = {{0: 5/9, 1: 4/9}}: {one_step}"),
    )
}

fn monte_carlo_stationarity() -> Outcome {
    let cfg = WalkConfig::new(SEED, 64, 100_000, Mode::Exact);
    let runs = simulate_w(&q("2/3"), &cfg).unwrap();
    let last: Vec<_> = runs.iter().map(|t| t.last().clone()).collect();
    let emp = EmpiricalDistribution::from_values(&last).unwrap();
    let ks = ks_distance(&emp, Reference::QMark).unwrap();
    outcome(ks.statistic <= 0.01, format!("KS = {:.5} (≤ 0.01), N = {}", ks.statistic, ks.count))
}

fn stationary_x() -> Outcome {
    let cfg = WalkConfig::new(SEED + 9, 0, 100_000, Mode::Exact);
    let samples = sample_stationary_x(&cfg, 64).unwrap().exact_samples().unwrap();
    let n = samples.len() as f64;
    let above = |t: &ExtendedRational| samples.iter().filter(|x| *x > t).count() as f64 / n;
    let (p1, p0, p3) = (above(&q("1")), above(&q("0")), above(&q("3")));
    let target3 = lambda_survival(&q("3")).unwrap();
    let target_ok = target3 == DyadicRational::new(BigInt::from(1), 4);
    let pass = (p1 - 0.25).abs() <= 0.01 && (p0 - 0.5).abs() <= 0.01 && (p3 - 0.0625).abs() <= 0.01 && target_ok;
    outcome(
        pass,
        format!("Pr(X>1) = {p1:.4}, Pr(X>0) = {p0:.4}, Pr(X>3) = {p3:.4} vs λ-survival(3) = {target3}"),
    )
}

fn geometric_integer_part() -> Outcome {
    let cfg = WalkConfig::new(SEED + 10, 0, 100_000, Mode::Exact);
    let batch = sample_stationary_y(&cfg, 64).unwrap();
    let emp = EmpiricalDistribution::from_exact(batch.exact_samples().unwrap()).unwrap();
    let check = geometric_pmf_check(&emp).unwrap();
    let dev = check.max_deviation(5);
    let (p4, p2) = (check.independence_4x4.p_value, check.independence_2x4.p_value);
    outcome(
        dev < 0.01 && p4 > 1e-3 && p2 > 1e-3,
        format!("max pmf deviation (n ≤ 5) = {dev:.4}; independence p = {p4:.3} (4x4), {p2:.3} (2x4)"),
    )
}

fn v_convergence() -> Outcome {
    let steps = 400;
    let cfg = WalkConfig::new(SEED + 11, steps, 100, Mode::Float);
    let runs = simulate_v(&UpperHalfPoint::i(), &cfg);
    let mut worst: f64 = 0.0;
    for t in &runs {
        for n in 200..steps {
            let d = (t.values[n + 1].to_float().0 - t.values[n].to_float().0).norm();
            worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
        }
    }
    outcome(worst < 1e-6, format!("100 trajectories, max |V_(n+1) − V_n| over 200 ≤ n < {steps} = {worst:.3e}"))
}

fn tiling_graph() -> Outcome {
    let ball1 = cayley_ball(1).unwrap().vertex_count();
    let ball4 = cayley_ball(4).unwrap();
    let irregular = ball4.interior_vertices().filter(|&i| ball4.degree(i) != 9).count();
    let z0 = UpperHalfPoint::from_parts(&q("0"), &q("6/5")).unwrap();
    let cfg = WalkConfig::new(SEED + 12, 50, 100, Mode::Exact);
    let good = simulate_v(&z0, &cfg)
        .iter()
        .filter(|t| {
            let points: Vec<UpperHalfPoint> = t
                .values
                .iter()
                .map(|v| match v {
                    PlaneValue::Exact(z) => z.clone(),
                    PlaneValue::Float(_) => unreachable!("exact mode"),
                })
                .collect();
            is_nearest_neighbor_path(&project_walk(&points))
        })
        .count();
    outcome(
        ball1 == 10 && irregular == 0 && good == 100,
        format!(
            "ball(1) = {ball1} vertices; ball(4) = {} vertices, {irregular} irregular interior; {good}/100 walks adjacent-or-equal",
            ball4.vertex_count()
        ),
    )
}

fn fourier_illustration() -> Outcome {
    let cfg = WalkConfig::new(SEED + 13, 0, 1_000_000, Mode::Float);
    let samples = sample_stationary_w(&cfg, 64).unwrap().float_samples();
    let emp = EmpiricalDistribution::from_f64(samples).unwrap();
    let c0 = fourier_coefficient(0, &emp);
    let max = (1..=64).map(|n| fourier_coefficient(n, &emp).norm()).fold(0.0, f64::max);
    outcome(
        c0 == Complex64::new(1.0, 0.0) && max < 0.5,
        format!("c_0 = {c0}; max |c_n| for 1 ≤ n ≤ 64 = {max:.4}"),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 13] = [
        ("generator set reproduction", 1, generator_set),
        ("?-oracle equivalence", 10, oracle_equivalence),
        ("exact functional equations", 10, functional_equations),
        ("exact kernel stationarity", 10, kernel_stationarity),
        ("pathwise coupling", 30, pathwise_coupling),
        ("equivariance", 1, equivariance),
        ("small-n oracle agreement", 30, small_n_oracles),
        ("Monte-Carlo stationarity of W", 120, monte_carlo_stationarity),
        ("stationary law of X", 60, stationary_x),
        ("geometric integer part of Y", 60, geometric_integer_part),
        ("V-chain convergence", 10, v_convergence),
        ("tiling graph", 30, tiling_graph),
        ("Fourier illustration", 120, fourier_illustration),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let pass = result.passed && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2}. {name}: {} [{:.2} s / {budget} s]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            result.detail,
            elapsed.as_secs_f64(),
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
