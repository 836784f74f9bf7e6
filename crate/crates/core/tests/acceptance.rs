//! Acceptance criteria, one line each.
//!
//! Criteria 2 and 3 contain claims that are false at the stated grids (the Moser
//! values are not within 5% of each other, and the counterexample values decrease
//! until `log n` is astronomically large). They are evaluated as stated and
//! reported as FAIL. This target exits nonzero only when a criterion outside
//! `KNOWN_FAILURES` fails or a known failure starts passing.

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tm_radial::cli::oracle_rows;
use tm_radial::equivalence::{adachi_split, ruf_normalize, tau_rescale};
use tm_radial::inequalities::{alvino_ratio_sup, at_constant_eps, at_quadratic_bound, best_eps, check_limine, zygmund_quasinorm};
use tm_radial::optimizer::{maximize, plateau_term, vanishing_probe, ConstraintSet, OptimizationResult};
use tm_radial::sequences::{alvino_extremal, counterexample, moser, zygmund_optimal};
use tm_radial::{Knot, RadialProfile, FOUR_PI};

const KNOWN_FAILURES: [u32; 2] = [2, 3];

// criterion 1
const ORACLE_REL: f64 = 1e-10;
// criterion 2
const MOSER_FLOOR: f64 = 0.5;
const MOSER_SPREAD: f64 = 1.05;
const MOSER_QUAD_TOL: f64 = 1e-8;
// criterion 3: π R_n² (1/√log n − 1/n²) at n = 10⁶, 30-digit reference
const BLOWUP_BOUND_1E6: f64 = 1.693_607_346_414_517;
const BLOWUP_BOUND_REL: f64 = 1e-6;
// criterion 4
const INV_SQRT_4PI: f64 = 0.282_094_791_773_878_14;
const ALVINO_ABS: f64 = 1e-10;
// criterion 5
const LIMINE_SAMPLES: usize = 10_000;
const ZYGMUND_K: f64 = 1e4;
const ZYGMUND_RATIO_FLOOR: f64 = 0.99;
// criterion 6
const SCALING_SAMPLES: usize = 1_000;
const SCALING_REL: f64 = 1e-9;
const SCALING_QUAD_TOL: f64 = 1e-12;
// criterion 7
const EQUIV_SAMPLES: usize = 100;
const EQUIV_REL: f64 = 1e-8;
const EQUIV_QUAD_TOL: f64 = 1e-12;
// criterion 8
const VANISHING_LAMBDA: f64 = 1e-3;
const VANISHING_ABS: f64 = 1e-3;
// criterion 9
const OPT_BUDGET: usize = 100_000;
const OPT_KNOTS: usize = 32;
const OPT_SEED: u64 = 20_240_601;
const OPT_QUAD_TOL: f64 = 1e-9;
const REDUCED_MARGIN: f64 = 1e-2;
const RUF_FLOOR: f64 = 12.0;
const E_PI: f64 = 8.539_734_222_673_566;
// criterion 10
const CONSTANT_RATIO_FLOOR: f64 = 1e3;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Random bounded profile: mostly continuous ramps, sometimes with jumps.
fn random_profile(rng: &mut ChaCha8Rng) -> RadialProfile {
    let segments = rng.gen_range(1..=8);
    let mut s = 0.0;
    let mut v = if rng.gen_bool(0.05) { rng.gen_range(0.0..0.5) } else { 0.0 };
    let mut knots = vec![Knot::linear(0.0, v)];
    for _ in 0..segments {
        s += rng.gen_range(-3.0f64..2.5).exp();
        if !rng.gen_bool(0.15) {
            v += rng.gen_range(0.0..1.0);
        }
        let knot = if rng.gen_bool(0.05) { Knot::jump(s, v + 0.1) } else { Knot::linear(s, v) };
        v = knot.v;
        knots.push(knot);
    }
    if v == 0.0 {
        knots.last_mut().unwrap().v = 1.0;
    }
    RadialProfile::from_knots(rng.gen_range(-5.0f64..7.0).exp(), knots).unwrap()
}

/// Random continuous profile rescaled to `||∇u||² = d`.
fn random_h1_profile(rng: &mut ChaCha8Rng, d: f64) -> RadialProfile {
    loop {
        let p = random_profile(rng);
        let grad = p.dirichlet_norm_sq();
        if grad.is_finite() && grad > 0.0 {
            return p.scale_amplitude((d / grad).sqrt()).unwrap();
        }
    }
}

fn criterion_1() -> Verdict {
    let rows = oracle_rows(None).unwrap();
    let worst = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    let failing = rows.iter().filter(|r| r.rel_err > ORACLE_REL).count();
    verdict(failing == 0, format!("{} oracle rows, worst rel err {worst:.2e}", rows.len()))
}

fn criterion_2() -> Verdict {
    let ns = [10u64, 100, 10_000, 1_000_000];
    let values: Vec<f64> = ns
        .iter()
        .map(|&n| moser(n).unwrap().tm_functional(FOUR_PI, MOSER_QUAD_TOL).unwrap().j_beta)
        .collect();
    let floor_ok = values.iter().all(|v| *v >= MOSER_FLOOR);
    let max = values.iter().copied().fold(0.0, f64::max);
    let last = values[ns.len() - 1];
    let spread_ok = max <= MOSER_SPREAD * last;
    verdict(
        floor_ok && spread_ok,
        format!(
            "J values {values:.4?}; all >= 1/2: {floor_ok}; max/J(1e6) = {:.4} (<= {MOSER_SPREAD}: {spread_ok})",
            max / last
        ),
    )
}

fn criterion_3() -> Verdict {
    let ns = [1_000u64, 10_000, 100_000, 1_000_000];
    let mut values = Vec::new();
    let mut bounds = Vec::new();
    for &n in &ns {
        let u = counterexample(n).unwrap();
        values.push(u.tm_functional(FOUR_PI, MOSER_QUAD_TOL).unwrap().j_beta);
        bounds.push(plateau_term(&u, FOUR_PI));
    }
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let above = values.iter().zip(&bounds).all(|(j, b)| j >= b);
    let bound_ok = rel(bounds[3], BLOWUP_BOUND_1E6) <= BLOWUP_BOUND_REL;
    verdict(
        increasing && above && bound_ok,
        format!(
            "J values {values:.4?}; strictly increasing: {increasing}; >= bound {bounds:.4?}: {above}; bound(1e6) matches reference: {bound_ok}"
        ),
    )
}

fn criterion_4() -> Verdict {
    let mut worst: f64 = 0.0;
    for t in [PI, 10.0] {
        for delta in [E, E.powi(4)] {
            let r = alvino_ratio_sup(&alvino_extremal(t, delta).unwrap(), t).unwrap();
            worst = worst.max((r.lhs - INV_SQRT_4PI).abs()).max((r.rhs - INV_SQRT_4PI).abs());
        }
    }
    verdict(worst <= ALVINO_ABS, format!("max |side - 1/sqrt(4 pi)| = {worst:.2e}"))
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..LIMINE_SAMPLES {
        let r = check_limine(&random_profile(&mut rng));
        if !r.holds {
            violations += 1;
        }
        if r.rhs.is_finite() {
            min_slack = min_slack.min(r.slack / r.rhs.max(1.0));
        }
    }
    let z = zygmund_optimal(ZYGMUND_K).unwrap();
    let ratio = FOUR_PI.sqrt() * zygmund_quasinorm(&z).value / z.sobolev_sq(1.0).sqrt();
    verdict(
        violations == 0 && ratio >= ZYGMUND_RATIO_FLOOR,
        format!("{violations} violations in {LIMINE_SAMPLES} profiles (min relative slack {min_slack:.3e}); ratio at k=1e4 = {ratio:.6}"),
    )
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut w1, mut w2, mut w3) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..SCALING_SAMPLES {
        let d = rng.gen_range(0.05..1.0);
        let p = random_h1_profile(&mut rng, d);
        let beta = rng.gen_range(0.1..FOUR_PI);
        let a = rng.gen_range(0.1..1.2);
        let b = rng.gen_range(-2.3f64..2.3).exp();
        let tau = rng.gen_range(-2.3f64..2.3).exp();
        let j = |q: &RadialProfile, beta: f64| q.tm_functional(beta, SCALING_QUAD_TOL).unwrap().j_beta;
        let base = j(&p, beta);
        w1 = w1.max(rel(j(&p.scale_amplitude(a).unwrap(), beta), j(&p, a * a * beta)));
        w2 = w2.max(rel(b * b * j(&p.scale_dilate(b).unwrap(), beta), base));
        let q = tau_rescale(&p, tau).unwrap();
        w3 = w3.max(rel(tau * j(&q, beta), base));
    }
    let worst = w1.max(w2).max(w3);
    verdict(worst <= SCALING_REL, format!("worst rel err: amplitude {w1:.2e}, dilation {w2:.2e}, tau {w3:.2e}"))
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut spread: f64 = 0.0;
    let mut max_coef: f64 = 0.0;
    for _ in 0..EQUIV_SAMPLES {
        let d = rng.gen_range(0.05..1.0);
        let p = random_h1_profile(&mut rng, d);
        let tr = ruf_normalize(&p, rng.gen_range(0.1..FOUR_PI)).unwrap();
        spread = spread.max(tr.chain_spread(EQUIV_QUAD_TOL).unwrap());

        let q = random_h1_profile(&mut rng, 1.0);
        let s = rng.gen_range(0.01..1.0);
        let q = q.scale_amplitude((s / q.sobolev_sq(1.0)).sqrt()).unwrap();
        max_coef = max_coef.max(adachi_split(&q).unwrap().bound.coefficient);
    }
    verdict(
        spread <= EQUIV_REL && max_coef <= 2.0,
        format!("worst chain spread {spread:.2e}; largest split coefficient {max_coef:.4}"),
    )
}

fn criterion_8() -> Verdict {
    let c = ConstraintSet::Reduced { delta: 0.0, k: 1.0 };
    let rows = vanishing_probe(&c, 2.0 * PI, &[1.0, 0.1, 0.01, VANISHING_LAMBDA], 1e-10).unwrap();
    let last = rows.last().unwrap();
    let gap = (last.j_beta - 2.0 * PI).abs();
    verdict(gap <= VANISHING_ABS, format!("|J(1e-3) - 2 pi| = {gap:.3e}"))
}

fn same_result(a: &OptimizationResult, b: &OptimizationResult) -> bool {
    a.best_value.to_bits() == b.best_value.to_bits()
        && a.best_profile == b.best_profile
        && a.objective_trace == b.objective_trace
        && a.starts == b.starts
        && a.evaluations == b.evaluations
}

fn criterion_9() -> Verdict {
    let reduced = ConstraintSet::Reduced { delta: 0.0, k: 1.0 };
    let ruf = ConstraintSet::Ruf { tau: 1.0 };
    let run = |c: &ConstraintSet, beta: f64| maximize(c, beta, OPT_KNOTS, OPT_BUDGET, OPT_SEED, OPT_QUAD_TOL).unwrap();
    let r1 = run(&reduced, 2.0 * PI);
    let r2 = run(&ruf, FOUR_PI);
    let deterministic = same_result(&r1, &run(&reduced, 2.0 * PI)) && same_result(&r2, &run(&ruf, FOUR_PI));
    let reduced_ok = r1.best_value > 2.0 * PI + REDUCED_MARGIN;
    #[allow(clippy::redundant_comparisons)]
    let ruf_ok = r2.best_value >= RUF_FLOOR && r2.best_value > E_PI;
    verdict(
        reduced_ok && ruf_ok && deterministic,
        format!(
            "reduced best {:.6} (> 2 pi + 0.01: {reduced_ok}); ruf best {:.6} (>= 12 and > e pi: {ruf_ok}); deterministic: {deterministic}",
            r1.best_value, r2.best_value
        ),
    )
}

fn criterion_10() -> Verdict {
    let ratios: Vec<f64> = [3.0, 3.5, 3.9, 3.99]
        .iter()
        .map(|m| {
            let beta = m * PI;
            at_constant_eps(beta, best_eps(beta).unwrap()).unwrap() / at_quadratic_bound(beta).unwrap()
        })
        .collect();
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    verdict(
        ratios[2] >= CONSTANT_RATIO_FLOOR && increasing,
        format!("ratios {:?}; at 3.9 pi >= 1e3: {}; increasing: {increasing}", ratios.iter().map(|r| format!("{r:.3e}")).collect::<Vec<_>>(), ratios[2] >= CONSTANT_RATIO_FLOOR),
    )
}

fn main() -> ExitCode {
    type Criterion = (u32, fn() -> Verdict, Duration);
    let criteria: [Criterion; 10] = [
        (1, criterion_1, Duration::from_secs(1)),
        (2, criterion_2, Duration::from_secs(10)),
        (3, criterion_3, Duration::from_secs(10)),
        (4, criterion_4, Duration::from_secs(1)),
        (5, criterion_5, Duration::from_secs(60)),
        (6, criterion_6, Duration::from_secs(30)),
        (7, criterion_7, Duration::from_secs(30)),
        (8, criterion_8, Duration::from_secs(5)),
        (9, criterion_9, Duration::from_secs(300)),
        (10, criterion_10, Duration::from_secs(1)),
    ];
    let mut unexpected = Vec::new();
    for (id, check, limit) in criteria {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let pass = v.pass && elapsed <= limit;
        println!(
            "criterion {id:>2}: {} ({:.2}s of {}s) {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            v.detail
        );
        if pass == KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: results as expected (known failures: {KNOWN_FAILURES:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
