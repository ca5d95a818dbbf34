//! Acceptance checks, one test per criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line before asserting.

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use gprace_core::fourier::{dirichlet_block_sum, pv_secondary_integral, FourierError};
use gprace_core::hecke::{gauss_sum_sign, mean_value, sign_psi, sign_xi};
use gprace_core::numerics::kahan_sum;
use gprace_core::pipeline::for_each_prime_event;
use gprace_core::race::{normalizer, AngleHistogram, AngleKind, Predicate, RaceReport};
use gprace_core::zdist::{simulate_distribution, variance_formula, AggregatedOrders};
use gprace_core::{Family, FourierSpec, HistogramSpec, Kernel, PrimeEvent, RaceConfig, RaceRunner, RankModel, SieveConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

struct Run {
    report: RaceReport,
    theta: AngleHistogram,
    tilde: AngleHistogram,
    elapsed: Duration,
}

fn run(limit: u64) -> Run {
    let start = Instant::now();
    let mut runner = RaceRunner::new(RaceConfig::default()).unwrap();
    let mut theta = AngleHistogram::new(HistogramSpec::new(200, AngleKind::Theta).unwrap()).unwrap();
    let mut tilde = AngleHistogram::new(HistogramSpec::new(200, AngleKind::ThetaTilde).unwrap()).unwrap();
    for_each_prime_event(&SieveConfig::new(limit).unwrap(), |event| {
        if let PrimeEvent::Split(ap) = event {
            theta.add(ap);
            tilde.add(ap);
        }
        runner.update(event)?;
        Ok(())
    })
    .unwrap();
    let report = runner.finish(limit).unwrap();
    Run { report, theta, tilde, elapsed: start.elapsed() }
}

fn run_1e8() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| run(100_000_000))
}

#[test]
fn criterion_01_complete_bias_of_d2() {
    let r = run_1e8();
    let d2 = &r.report.d2;
    let at_checkpoints = r.report.checkpoints.iter().all(|c| c.d2 >= 0);
    let (density, _) = d2.log_density(Predicate::NonNegative).unwrap();
    let runtime_ok = r.elapsed <= Duration::from_secs(300);
    report(
        1,
        d2.min_value() >= 0 && at_checkpoints && density >= 0.999 && runtime_ok,
        format!(
            "min D2 = {}, log-density(D2 >= 0) >= {density:.6}, {} checkpoints, runtime {:.1}s",
            d2.min_value(),
            r.report.checkpoints.len(),
            r.elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_02_d1_oscillates_with_negative_lean() {
    let d1 = &run_1e8().report.d1;
    let (lower, upper) = d1.log_density(Predicate::Negative).unwrap();
    let changes = d1.sign_changes().len();
    report(
        2,
        changes >= 1 && d1.min_value() < 0 && d1.max_value() > 0 && lower > 0.5,
        format!(
            "{changes} sign changes, D1 in [{}, {}], log-density(D1 < 0) in [{lower:.4}, {upper:.4}]",
            d1.min_value(),
            d1.max_value()
        ),
    );
}

/// Exhaustive `a² + 4b²` search with plain trial division; no Gaussian arithmetic.
fn brute_force_races(limit: u64) -> Vec<(u64, i64, i64)> {
    let is_prime = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
    let (mut d1, mut d2) = (0i64, 0i64);
    let mut out = Vec::new();
    for p in (2..=limit).filter(|&n| is_prime(n)) {
        let mut reps = Vec::new();
        let mut b = 1u64;
        while 4 * b * b < p {
            let rest = p - 4 * b * b;
            let a = (rest as f64).sqrt() as u64;
            for a in a.saturating_sub(1)..=a + 1 {
                if a > 0 && a * a == rest {
                    reps.push((a, b));
                }
            }
            b += 1;
        }
        reps.dedup();
        assert!(reps.len() <= 1, "{p} has representations {reps:?}");
        if let Some(&(a, b)) = reps.first() {
            d1 += if a > 2 * b { 1 } else { -1 };
            d2 += if a % 4 == 1 { 1 } else { -1 };
        }
        out.push((p, d1, d2));
    }
    out
}

#[test]
fn criterion_03_small_x_exactness() {
    let limit = 10_000;
    let oracle = brute_force_races(limit);
    let mut runner = RaceRunner::new(RaceConfig::default()).unwrap();
    let mut ours = Vec::new();
    for_each_prime_event(&SieveConfig::new(limit).unwrap(), |event| {
        runner.update(event)?;
        ours.push((event.p(), runner.d1(), runner.d2()));
        Ok(())
    })
    .unwrap();
    let mismatch = oracle.iter().zip(&ours).find(|(a, b)| a != b);
    report(
        3,
        ours.len() == oracle.len() && mismatch.is_none(),
        format!("{} primes compared, first mismatch {mismatch:?}", oracle.len()),
    );
}

#[test]
fn criterion_04_sign_closed_forms() {
    let mut worst: f64 = 0.0;
    for m in 1..=200u64 {
        let w = gauss_sum_sign(Family::Xi, m);
        worst = worst.max((w.re - sign_xi(m) as f64).abs()).max(w.im.abs());
    }
    for m in 0..=200u64 {
        let w = gauss_sum_sign(Family::Psi, m);
        worst = worst.max((w.re - sign_psi(m) as f64).abs()).max(w.im.abs());
    }
    report(4, worst <= 1e-10, format!("max |oracle - closed form| = {worst:.3e}"));
}

#[test]
fn criterion_05_mean_of_phi1_race() {
    let mv = mean_value(Family::Xi, &FourierSpec::phi1(1_000_000), &RankModel::Hypothesis);
    let theorem = mv.theorem.clone().expect("rank hypothesis").expect("finite principal value");
    let pv = pv_secondary_integral(&|t| FourierSpec::phi1(0).eval_exact(t), FourierSpec::phi1(0).jumps(), Kernel::CosOverCos2)
        .unwrap()
        .value;
    report(
        5,
        (mv.value + 0.5).abs() <= 1e-5 && (theorem - mv.value).abs() <= 1e-6,
        format!(
            "mean = {:.12}, truncated sum = {:.12}, theorem form = {theorem:.12}, PV = {pv:.3e}",
            mv.value, mv.partial_sum
        ),
    );
}

#[test]
fn criterion_06_divergent_mean_of_phi2_race() {
    let closed = |n: u64| 0.5 + 4.0 / PI * kahan_sum((3..=n).step_by(4).map(|m| 1.0 / m as f64));
    let mut ok = true;
    let mut prev = f64::NEG_INFINITY;
    let mut worst: f64 = 0.0;
    let mut at_1e5 = 0.0;
    // N doubles from 8, so every step adds new m ≡ 3 mod 4 terms.
    for n in (3..=16).map(|k| 1u64 << k).chain([100_000]) {
        let v = mean_value(Family::Psi, &FourierSpec::phi2(n), &RankModel::Hypothesis).value;
        worst = worst.max((v - closed(n)).abs());
        ok &= v > prev;
        prev = v;
        at_1e5 = v;
    }
    let phi2 = FourierSpec::phi2(0);
    let pv = pv_secondary_integral(&|t| phi2.eval_exact(t), phi2.jumps(), Kernel::HalfSec);
    let diverges = matches!(pv, Err(FourierError::Divergent { direction, .. }) if direction > 0.0);
    report(
        6,
        ok && worst <= 1e-12 && at_1e5 > 2.0 && diverges,
        format!("max |mean - closed| = {worst:.2e}, mean(N=1e5) = {at_1e5:.6}, monotone = {ok}, PV: {pv:?}"),
    );
}

#[test]
fn criterion_07_block_sum_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    let mut worst = 0.0f64;
    while checked < 1000 {
        let q: u64 = rng.gen_range(1..=12);
        let a: i64 = rng.gen_range(-12..=12);
        let n: u64 = rng.gen_range(0..=1000);
        let t: f64 = rng.gen_range(-PI..PI);
        // Stay away from the poles t ∈ (2π/q)Z.
        let period = 2.0 * PI / q as f64;
        let r = (t / period - (t / period).round()).abs() * period;
        if r < 1e-3 {
            continue;
        }
        let closed = dirichlet_block_sum(q, a, t, n).unwrap();
        let direct: f64 = (0..=n).map(|m| 2.0 * ((q * m) as f64 * t + a as f64 * t).cos()).sum();
        worst = worst.max((closed - direct).abs() / (n + 1) as f64);
        checked += 1;
    }
    report(7, worst <= 1e-9, format!("1000 cases, max |closed - direct|/(N+1) = {worst:.3e}"));
}

#[test]
fn criterion_08_variance_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let agg = AggregatedOrders::from_pairs((0..100).map(|_| (rng.gen_range(0.0..50.0f64).max(1e-6), 1.0)).collect());
    let d = simulate_distribution(&agg, 0.0, 1e6, 100_000, 100).unwrap();
    let v = variance_formula(&agg);
    let rel = (d.variance / v - 1.0).abs();
    report(8, rel <= 0.05, format!("Monte-Carlo {:.6} vs formula {v:.6}, relative {rel:.4}", d.variance));
}

#[test]
fn criterion_09_equidistribution_baseline() {
    let mut sectors = [0u64; 8];
    let mut total = 0u64;
    for_each_prime_event(&SieveConfig::new(10_000_000).unwrap(), |event| {
        if let PrimeEvent::Split(ap) = event {
            sectors[((ap.theta / (PI / 8.0)) as usize).min(7)] += 1;
            total += 1;
        }
        Ok(())
    })
    .unwrap();
    let shares: Vec<f64> = sectors.iter().map(|&c| c as f64 / total as f64).collect();
    let worst = shares.iter().map(|s| (s - 0.125).abs()).fold(0.0, f64::max);
    report(9, worst <= 0.02, format!("{total} split primes, sector shares {shares:.4?}, max deviation {worst:.5}"));
}

#[test]
fn criterion_10_histogram_pole_signature() {
    let r = run_1e8();
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, h) in [("theta", &r.theta), ("theta_tilde", &r.tilde)] {
        for (pole, below, above) in h.pole_signatures() {
            ok &= below > 0.0 && above < 0.0;
            detail.push(format!("{name} pole {pole:.4}: ({below:+}, {above:+})"));
        }
        let corr = h.overlay_correlation().unwrap_or(f64::NAN);
        ok &= corr > 0.0;
        detail.push(format!("{name} correlation {corr:.4}"));
    }
    report(10, ok, detail.join("; "));
}

#[test]
fn criterion_11_race_theorem_identity() {
    let r = run_1e8();
    let mut worst = 0.0f64;
    let mut exact_zero = true;
    for c in &r.report.checkpoints {
        let x = c.x as f64;
        for (value, d) in [(c.e_phi1, c.d1), (c.f_phi2, c.d2)] {
            let expect = normalizer(x) * d as f64;
            if d == 0 {
                exact_zero &= value == 0.0;
            } else {
                worst = worst.max(((value - expect) / expect).abs());
            }
        }
    }
    report(
        11,
        worst <= 1e-12 && exact_zero,
        format!("{} checkpoints, max relative error {worst:.3e}", r.report.checkpoints.len()),
    );
}

#[test]
fn criterion_12_empirical_bias_direction() {
    let avg = run_1e8().report.log_average_e_phi1;
    report(12, avg.is_some_and(|v| v < 0.0), format!("log average of E_phi1 over [log 1e3, log 1e8] = {avg:?}"));
}
