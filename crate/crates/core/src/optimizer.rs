//! Maximisation of `J_β` over radial profiles under a norm budget, plus the
//! blow-up and vanishing scans.
//!
//! A candidate is a shape: knot values with `v_0 = 0` and last value 1, the
//! log-lengths of the s-gaps, and (when the budget leaves it free) `log T_sup`.
//! Every shape is projected onto the constraint boundary by rescaling amplitude
//! and support, so the search only ever sees feasible points.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{check_positive, check_tol, RadialProfile, FOUR_PI};
use crate::sequences::{counterexample_from_log, norm_sum};

/// Allowed constraint violation of a reported optimum.
pub const FEASIBILITY_TOL: f64 = 1e-9;

const LOG_GAP_RANGE: (f64, f64) = (-12.0, 8.0);
const LOG_T_RANGE: (f64, f64) = (-40.0, 80.0);
const MIN_STEP: f64 = 1e-7;
const PERTURB_EVERY: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintSet {
    /// `||∇u|| <= 1 - δ` and `||u|| <= K`.
    Reduced { delta: f64, k: f64 },
    /// `||∇u||² + τ ||u||² <= 1`.
    Ruf { tau: f64 },
    /// `||∇u|| + ||u|| <= 1`.
    NormSum,
}

impl ConstraintSet {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ConstraintSet::Reduced { delta, k } => {
                if !(0.0..1.0).contains(&delta) {
                    return Err(Error::Domain(format!("delta must lie in [0, 1), got {delta}")));
                }
                check_positive("K", k)
            }
            ConstraintSet::Ruf { tau } => check_positive("tau", tau),
            ConstraintSet::NormSum => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConstraintSet::Reduced { .. } => "reduced",
            ConstraintSet::Ruf { .. } => "ruf",
            ConstraintSet::NormSum => "norm_sum",
        }
    }

    /// Amount by which `p` violates the budget; `<= 0` when feasible.
    pub fn residual(&self, p: &RadialProfile) -> f64 {
        let (d, l) = (p.dirichlet_norm_sq(), p.l2_norm_sq());
        match *self {
            ConstraintSet::Reduced { delta, k } => (d - (1.0 - delta).powi(2)).max(l - k * k),
            ConstraintSet::Ruf { tau } => d + tau * l - 1.0,
            ConstraintSet::NormSum => norm_sum(p) - 1.0,
        }
    }

    pub fn is_feasible(&self, p: &RadialProfile, tol: f64) -> bool {
        self.residual(p) <= tol
    }

    /// Limit of `J_β` along normalised vanishing sequences: `β` times the largest
    /// admissible `||u||²`.
    pub fn vanishing_level(&self, beta: f64) -> f64 {
        match *self {
            ConstraintSet::Reduced { k, .. } => beta * k * k,
            ConstraintSet::Ruf { tau } => beta / tau,
            ConstraintSet::NormSum => beta,
        }
    }

    /// Whether `T_sup` is a free search coordinate. Under the reduced budget both
    /// norms saturate and fix amplitude and support.
    fn support_is_free(&self) -> bool {
        !matches!(self, ConstraintSet::Reduced { .. })
    }

    /// Rescales the unit-amplitude profile `p` onto the boundary of the budget.
    fn project(&self, p: &RadialProfile) -> Option<RadialProfile> {
        let (d0, l0) = (p.dirichlet_norm_sq(), p.l2_norm_sq());
        if !(d0 > 0.0 && d0.is_finite() && l0 > 0.0 && l0.is_finite()) {
            return None;
        }
        let mut q = match *self {
            ConstraintSet::Reduced { delta, k } => {
                let a = (1.0 - delta) / d0.sqrt();
                let t = p.t_support() * k * k / (a * a * l0);
                p.with_support(t).ok()?.scale_amplitude(a).ok()?
            }
            ConstraintSet::Ruf { tau } => p.scale_amplitude(1.0 / (d0 + tau * l0).sqrt()).ok()?,
            ConstraintSet::NormSum => p.scale_amplitude(1.0 / (d0.sqrt() + l0.sqrt())).ok()?,
        };
        for _ in 0..8 {
            if self.residual(&q) <= 0.0 {
                return Some(q);
            }
            q = q.scale_amplitude(1.0 - 4.0 * f64::EPSILON).ok()?;
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub dirichlet_sq: f64,
    pub l2_sq: f64,
    /// `<= 0` when feasible.
    pub constraint: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub label: String,
    pub initial_value: f64,
    pub final_value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub constraint: ConstraintSet,
    pub beta: f64,
    pub best_profile: RadialProfile,
    pub best_value: f64,
    pub quad_error: f64,
    pub vanishing_level_value: f64,
    pub exceeds_vanishing_level: bool,
    pub feasibility_residuals: Residuals,
    /// Best value so far, recorded after every sweep of every start in start order.
    pub objective_trace: Vec<f64>,
    pub starts: Vec<StartSummary>,
    pub evaluations: usize,
    pub seed: u64,
    /// Seconds; the only field that differs between runs with the same seed.
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Shape {
    /// `values[0] = 0`, `values[n-1] = 1`, nondecreasing.
    values: Vec<f64>,
    log_gaps: Vec<f64>,
    log_t: f64,
}

impl Shape {
    fn ramp(n: usize, s_top: f64, t_support: f64) -> Self {
        let m = (n - 1) as f64;
        Shape {
            values: (0..n).map(|i| i as f64 / m).collect(),
            log_gaps: vec![(s_top / m).ln(); n - 1],
            log_t: t_support.ln(),
        }
    }

    fn profile(&self) -> Option<RadialProfile> {
        let mut s = 0.0;
        let mut knots = Vec::with_capacity(self.values.len());
        knots.push((0.0, 0.0));
        for (v, g) in self.values[1..].iter().zip(&self.log_gaps) {
            s += g.exp();
            knots.push((s, *v));
        }
        RadialProfile::new(self.log_t.exp(), &knots).ok()
    }

    fn fix_values(&mut self) {
        let n = self.values.len();
        let interior = isotonic(&self.values[1..n - 1]);
        for (dst, v) in self.values[1..n - 1].iter_mut().zip(interior) {
            *dst = v.clamp(0.0, 1.0);
        }
    }
}

/// Least-squares nondecreasing fit (pool adjacent violators).
pub fn isotonic(y: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(y.len());
    for &v in y {
        blocks.push((v, 1));
        while blocks.len() > 1 && blocks[blocks.len() - 2].0 > blocks[blocks.len() - 1].0 {
            let (v2, w2) = blocks.pop().expect("len > 1");
            let (v1, w1) = blocks.pop().expect("len > 1");
            let w = w1 + w2;
            blocks.push(((v1 * w1 as f64 + v2 * w2 as f64) / w as f64, w));
        }
    }
    blocks.into_iter().flat_map(|(v, w)| std::iter::repeat_n(v, w)).collect()
}

#[derive(Debug, Clone, Copy)]
enum Coord {
    Value(usize),
    Gap(usize),
    Stretch,
    LogT,
}

impl Coord {
    fn initial_step(self) -> f64 {
        match self {
            Coord::Value(_) => 0.05,
            Coord::Gap(_) => 0.25,
            Coord::Stretch => 0.25,
            Coord::LogT => 0.5,
        }
    }

    fn apply(self, shape: &Shape, step: f64) -> Shape {
        let mut out = shape.clone();
        let clamp_gap = |g: f64| g.clamp(LOG_GAP_RANGE.0, LOG_GAP_RANGE.1);
        match self {
            Coord::Value(i) => {
                out.values[i] += step;
                out.fix_values();
            }
            Coord::Gap(i) => out.log_gaps[i] = clamp_gap(out.log_gaps[i] + step),
            Coord::Stretch => out.log_gaps.iter_mut().for_each(|g| *g = clamp_gap(*g + step)),
            Coord::LogT => out.log_t = (out.log_t + step).clamp(LOG_T_RANGE.0, LOG_T_RANGE.1),
        }
        out
    }
}

struct Problem {
    constraint: ConstraintSet,
    beta: f64,
    tol: f64,
}

struct Candidate {
    shape: Shape,
    profile: RadialProfile,
    value: f64,
}

impl Problem {
    fn evaluate(&self, shape: Shape) -> Option<Candidate> {
        let profile = self.constraint.project(&shape.profile()?)?;
        let value = profile.tm_functional(self.beta, self.tol).ok()?.j_beta;
        value.is_finite().then_some(Candidate { shape, profile, value })
    }

    fn coords(&self, n: usize) -> Vec<Coord> {
        let mut c: Vec<Coord> = (1..n - 1).map(Coord::Value).collect();
        c.extend((0..n - 1).map(Coord::Gap));
        c.push(Coord::Stretch);
        if self.constraint.support_is_free() {
            c.push(Coord::LogT);
        }
        c
    }

    /// Adaptive coordinate ascent from one start until `budget` evaluations.
    fn climb(&self, start: Candidate, budget: usize, rng: &mut ChaCha8Rng) -> (Candidate, Vec<f64>, usize) {
        let coords = self.coords(start.shape.values.len());
        let mut steps: Vec<f64> = coords.iter().map(|c| c.initial_step()).collect();
        let mut order: Vec<usize> = (0..coords.len()).collect();
        let mut best = start;
        let mut trace = vec![best.value];
        let mut evals = 1;
        let mut sweep = 0;

        while evals < budget {
            order.shuffle(rng);
            for &j in &order {
                if evals >= budget {
                    break;
                }
                let mut moved = false;
                for sign in [1.0, -1.0] {
                    if evals >= budget {
                        break;
                    }
                    evals += 1;
                    let trial = coords[j].apply(&best.shape, sign * steps[j]);
                    if let Some(c) = self.evaluate(trial) {
                        if c.value > best.value {
                            best = c;
                            moved = true;
                            break;
                        }
                    }
                }
                steps[j] = if moved { (steps[j] * 1.5).min(4.0 * coords[j].initial_step()) } else { steps[j] * 0.5 };
            }
            sweep += 1;
            if sweep % PERTURB_EVERY == 0 && evals < budget {
                evals += 1;
                if let Some(c) = self.evaluate(perturb(&best.shape, &coords, &steps, rng)) {
                    if c.value > best.value {
                        best = c;
                    }
                }
            }
            if steps.iter().all(|s| *s < MIN_STEP) {
                steps = coords.iter().map(|c| c.initial_step()).collect();
            }
            trace.push(best.value);
        }
        (best, trace, evals)
    }
}

fn perturb(shape: &Shape, coords: &[Coord], steps: &[f64], rng: &mut ChaCha8Rng) -> Shape {
    let mut out = shape.clone();
    for (c, s) in coords.iter().zip(steps) {
        let scale = 4.0 * s.max(0.1 * c.initial_step());
        out = c.apply(&out, rng.gen_range(-scale..=scale));
    }
    out
}

fn family_starts(c: &ConstraintSet, n: usize) -> Vec<(String, Shape)> {
    let pi = std::f64::consts::PI;
    let mut starts = Vec::new();
    for (name, log_delta) in [("e^0.25", 0.25), ("e^0.75", 0.75), ("e^1.5", 1.5), ("e^3", 3.0)] {
        starts.push((format!("alvino_extremal(T=pi, delta={name})"), Shape::ramp(n, 2.0 * log_delta, pi)));
    }
    for k in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
        starts.push((format!("cap(k={k}, R=1)"), Shape::ramp(n, k, pi)));
    }
    // wide and nearly flat: the vanishing regime
    for (s_top, t) in [(64.0, 1e4), (256.0, 1e6)] {
        let t = if c.support_is_free() { t } else { pi };
        starts.push((format!("flat(s_top={s_top}, T={t:e})"), Shape::ramp(n, s_top, t)));
    }
    starts
}

/// Multi-start projected coordinate ascent for `sup J_β` under `c`.
///
/// The budget counts functional evaluations and is split evenly over the family
/// starts, which run in parallel; the result depends only on the arguments.
pub fn maximize(c: &ConstraintSet, beta: f64, n_knots: usize, budget: usize, seed: u64, tol: f64) -> Result<OptimizationResult> {
    c.validate()?;
    check_positive("beta", beta)?;
    check_tol(tol)?;
    if n_knots < 4 {
        return Err(Error::Domain(format!("need at least 4 knots, got {n_knots}")));
    }
    if let ConstraintSet::Reduced { delta, .. } = *c {
        let critical = FOUR_PI / (1.0 - delta).powi(2);
        if beta >= critical {
            return Err(Error::Domain(format!("reduced budget requires beta < 4π/(1-δ)² = {critical}, got {beta}")));
        }
    }
    if budget == 0 {
        return Err(Error::Domain("budget must be positive".into()));
    }
    let clock = Instant::now();
    let problem = Problem { constraint: *c, beta, tol };
    let mut starts = family_starts(c, n_knots);
    starts.truncate(budget);
    let per_start = budget / starts.len();

    let runs: Vec<_> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, (label, shape))| {
            let start = problem.evaluate(shape)?;
            let initial = start.value;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (best, trace, evals) = problem.climb(start, per_start, &mut rng);
            let summary = StartSummary { label, initial_value: initial, final_value: best.value, evaluations: evals };
            Some((best, trace, summary))
        })
        .collect();

    let mut objective_trace = Vec::new();
    let mut summaries = Vec::new();
    let mut best: Option<Candidate> = None;
    let mut evaluations = 0;
    for (cand, trace, summary) in runs.into_iter().flatten() {
        let floor = objective_trace.last().copied().unwrap_or(f64::NEG_INFINITY);
        objective_trace.extend(trace.iter().map(|v| v.max(floor)));
        evaluations += summary.evaluations;
        summaries.push(summary);
        // first start wins ties
        if best.as_ref().is_none_or(|b| cand.value > b.value) {
            best = Some(cand);
        }
    }
    let best = best.ok_or_else(|| Error::Postcondition("no start could be projected onto the budget".into()))?;
    let report = best.profile.tm_functional(beta, tol)?;
    let residual = c.residual(&best.profile);
    if residual > FEASIBILITY_TOL {
        return Err(Error::Postcondition(format!("optimum violates the budget by {residual}")));
    }
    let level = c.vanishing_level(beta);
    Ok(OptimizationResult {
        constraint: *c,
        beta,
        best_value: report.j_beta,
        quad_error: report.quad_error,
        vanishing_level_value: level,
        exceeds_vanishing_level: report.j_beta > level,
        feasibility_residuals: Residuals { dirichlet_sq: report.dirichlet_sq, l2_sq: report.l2_sq, constraint: residual },
        best_profile: best.profile,
        objective_trace,
        starts: summaries,
        evaluations,
        seed,
        wall_time: clock.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    pub beta: f64,
    pub log_n: f64,
    pub j_beta: f64,
    /// Contribution of the inner disk where the profile is constant.
    pub lower_bound: f64,
    pub quad_error: f64,
}

/// The counterexample at `log n` with amplitude `1 - δ`, dilated if needed so
/// that `||u||_2 <= K`.
pub fn scaled_counterexample(delta: f64, k: f64, log_n: f64) -> Result<RadialProfile> {
    ConstraintSet::Reduced { delta, k }.validate()?;
    let u = counterexample_from_log(log_n)?.scale_amplitude(1.0 - delta)?;
    let l2 = u.l2_norm_sq();
    if l2 > k * k {
        u.scale_dilate((l2 / (k * k)).sqrt())
    } else {
        Ok(u)
    }
}

/// `|{u = max u}| (e^{β max u²} - 1)`, a lower bound for `J_β(u)`.
pub fn plateau_term(p: &RadialProfile, beta: f64) -> f64 {
    let c = p.max_value();
    let log_measure = p.t_support().ln() - p.plateau_start();
    let y = beta * c * c;
    if y > 1.0 {
        // (e^y - 1) e^m = e^{y+m}(1 - e^{-y})
        (y + log_measure).exp() * -(-y).exp_m1()
    } else {
        log_measure.exp() * y.exp_m1()
    }
}

/// [`blowup_scan`] indexed by `log n`.
pub fn blowup_scan_log(delta: f64, k: f64, betas: &[f64], log_ns: &[f64], tol: f64) -> Result<Vec<BlowupRow>> {
    if betas.is_empty() || log_ns.is_empty() {
        return Err(Error::Domain("scan grids must be nonempty".into()));
    }
    let mut rows = Vec::with_capacity(betas.len() * log_ns.len());
    for &beta in betas {
        for &log_n in log_ns {
            let u = scaled_counterexample(delta, k, log_n)?;
            let rep = u.tm_functional(beta, tol)?;
            rows.push(BlowupRow { beta, log_n, j_beta: rep.j_beta, lower_bound: plateau_term(&u, beta), quad_error: rep.quad_error });
        }
    }
    Ok(rows)
}

/// `J_β` along the counterexample sequence fitted to the reduced budget `(δ, K)`.
pub fn blowup_scan(delta: f64, k: f64, betas: &[f64], ns: &[u64], tol: f64) -> Result<Vec<BlowupRow>> {
    if let Some(n) = ns.iter().find(|n| **n < 3) {
        return Err(Error::Domain(format!("counterexample requires n >= 3, got {n}")));
    }
    let log_ns: Vec<f64> = ns.iter().map(|n| (*n as f64).ln()).collect();
    blowup_scan_log(delta, k, betas, &log_ns, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VanishingRow {
    pub lambda: f64,
    pub j_beta: f64,
    pub remainder: f64,
    pub vanishing_level: f64,
    pub dirichlet_sq: f64,
    pub l2_sq: f64,
}

/// The bump used by [`vanishing_probe`]: an Alvino extremal with `||∇φ|| = 1 - δ`
/// and `||φ||_2 = K`.
pub fn vanishing_bump(delta: f64, k: f64) -> Result<RadialProfile> {
    ConstraintSet::Reduced { delta, k }.validate()?;
    let phi = crate::sequences::alvino_extremal(std::f64::consts::PI, std::f64::consts::E)?.scale_amplitude(1.0 - delta)?;
    let l2 = phi.l2_norm_sq();
    phi.with_support(phi.t_support() * k * k / l2)
}

/// `J_β(λ φ(λ ·))` for each `λ`: the `L²` norm stays `K` while the gradient
/// shrinks like `λ`, so values tend to `β K²`.
pub fn vanishing_probe(c: &ConstraintSet, beta: f64, lambdas: &[f64], tol: f64) -> Result<Vec<VanishingRow>> {
    let ConstraintSet::Reduced { delta, k } = *c else {
        return Err(Error::Domain("vanishing probe needs a reduced constraint set".into()));
    };
    let phi = vanishing_bump(delta, k)?;
    let level = c.vanishing_level(beta);
    lambdas
        .iter()
        .map(|&lambda| {
            check_positive("lambda", lambda)?;
            let u = phi.scale_dilate(lambda)?.scale_amplitude(lambda)?;
            let rep = u.tm_functional(beta, tol)?;
            Ok(VanishingRow {
                lambda,
                j_beta: rep.j_beta,
                remainder: crate::inequalities::remainder_functional(&u, beta, tol)?,
                vanishing_level: level,
                dirichlet_sq: rep.dirichlet_sq,
                l2_sq: rep.l2_sq,
            })
        })
        .collect()
}
