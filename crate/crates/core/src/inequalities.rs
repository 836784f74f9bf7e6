//! Both sides of the Alvino, Zygmund and Adachi–Tanaka type inequalities on a
//! single profile, and the explicit constants attached to them.
//!
//! The suprema over `t` (and over the window `T`) are exact: on every linear piece
//! in `s` the ratios reduce to `(A + b x)/√x` or `(a + b s) e^{-s/2}`, whose maxima
//! are at the piece ends or at one closed-form stationary point.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{check_positive, Join, Kernel, RadialProfile, FOUR_PI};

/// Relative slack allowed before an inequality counts as violated.
pub const HOLDS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    None,
    /// Measure level `t` attaining the supremum.
    Level { t: f64 },
    /// Window `T` and level `t ∈ (0, T]` attaining the supremum.
    Window { big_t: f64, t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub witness: Witness,
}

impl InequalityReport {
    pub fn new(lhs: f64, rhs: f64, witness: Witness) -> Self {
        let slack = rhs - lhs;
        let holds = if rhs.is_infinite() && rhs > 0.0 {
            true
        } else {
            slack >= -HOLDS_TOL * rhs.abs().max(1.0)
        };
        InequalityReport { lhs, rhs, slack, holds, witness }
    }
}

/// `sup_{0<t<=T} (u*(t) - u*(T)) / √log(T/t)` against `||∇u||_2 / √(4π)`.
pub fn alvino_ratio_sup(p: &RadialProfile, big_t: f64) -> Result<InequalityReport> {
    check_positive("T", big_t)?;
    let rhs = p.dirichlet_norm_sq().sqrt() / FOUR_PI.sqrt();
    let s_t = (p.t_support() / big_t).ln();
    let base = p.value_at_s(s_t);
    let t_at = |s: f64| p.t_support() * (-s).exp();

    if p.upper_value_at_s(s_t) > base {
        // u* jumps right below T: the ratio is unbounded
        return Ok(InequalityReport::new(f64::INFINITY, rhs, Witness::Level { t: big_t }));
    }
    let mut best = (0.0, Witness::None);
    for k in p.knots().iter().filter(|k| k.s > s_t) {
        let ratio = (k.v - base) / (k.s - s_t).sqrt();
        if ratio > best.0 {
            best = (ratio, Witness::Level { t: t_at(k.s) });
        }
    }
    Ok(InequalityReport::new(best.0, rhs, best.1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quasinorm {
    pub value: f64,
    pub big_t: f64,
    pub t: f64,
}

/// `||u||_{Z^{1/2}} = sup_{T>0} sup_{t∈(0,T]} u*(t) / √(4π/T + log(T/t))`.
///
/// For fixed `t` the window term `4π/T + log(T/t)` is minimised over `T >= t` at
/// `T = max(4π, t)`, leaving `u*(t)/√φ(t)` with `φ = 1 + log(4π/t)` for `t <= 4π`
/// and `φ = 4π/t` beyond.
pub fn zygmund_quasinorm(p: &RadialProfile) -> Quasinorm {
    let t_sup = p.t_support();
    let s_4pi = (t_sup / FOUR_PI).ln();
    let phi = |s: f64| {
        if s >= s_4pi {
            1.0 + (s - s_4pi)
        } else {
            (s - s_4pi).exp()
        }
    };
    let mut best = Quasinorm { value: 0.0, big_t: FOUR_PI.max(t_sup), t: t_sup };
    let mut consider = |s: f64, u: f64| {
        if u <= 0.0 {
            return;
        }
        let value = u / phi(s).sqrt();
        if value > best.value {
            let t = t_sup * (-s).exp();
            best = Quasinorm { value, big_t: FOUR_PI.max(t), t };
        }
    };

    for k in p.knots() {
        consider(k.s, k.v);
    }
    if s_4pi > 0.0 && s_4pi < p.plateau_start() {
        consider(s_4pi, p.upper_value_at_s(s_4pi));
    }
    // t > 4π: (a + b x) e^{-(s0 + x)/2} peaks where a + b x = 2b
    for seg in p.segments() {
        if seg.slope <= 0.0 || seg.s0 >= s_4pi {
            continue;
        }
        let x = (2.0 * seg.slope - seg.start) / seg.slope;
        let s = seg.s0 + x;
        if x > 0.0 && x < seg.len && s < s_4pi && p.knots()[seg.end_knot].join == Join::Linear {
            consider(s, seg.value_at(x));
        }
    }
    best
}

/// `||u||_Z <= (1/√(4π)) (||∇u||² + ||u||²)^{1/2}`.
pub fn check_limine(p: &RadialProfile) -> InequalityReport {
    let q = zygmund_quasinorm(p);
    let rhs = p.sobolev_sq(1.0).sqrt() / FOUR_PI.sqrt();
    let witness = if q.value > 0.0 {
        Witness::Window { big_t: q.big_t, t: q.t }
    } else {
        Witness::None
    };
    InequalityReport::new(q.value, rhs, witness)
}

/// `J_β(u) / ||u||_2^2` for `||∇u|| <= 1`.
pub fn adachi_ratio(p: &RadialProfile, beta: f64, tol: f64) -> Result<f64> {
    check_subcritical(beta)?;
    if p.is_zero() {
        return Err(Error::Precondition("adachi ratio of the zero profile".into()));
    }
    let d = p.dirichlet_norm_sq();
    if d > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!("requires ||∇u||² <= 1, got {d}")));
    }
    let j = p.tm_functional(beta, tol)?.j_beta;
    Ok(j / p.l2_norm_sq())
}

fn check_subcritical(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < FOUR_PI {
        Ok(())
    } else {
        Err(Error::Domain(format!("beta must lie in (0, 4π), got {beta}")))
    }
}

/// `C_ε(β) = 4π e^{β/4π} max{β/4π, e^{β/(4πε)} / (1 - (β/4π)(1+ε))}`.
pub fn at_constant_eps(beta: f64, eps: f64) -> Result<f64> {
    check_subcritical(beta)?;
    let b = beta / FOUR_PI;
    if !(eps > 0.0 && eps < 1.0 / b - 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 4π/β - 1) = (0, {}), got {eps}", 1.0 / b - 1.0)));
    }
    let second = (b / eps).exp() / (1.0 - b * (1.0 + eps));
    Ok(FOUR_PI * b.exp() * b.max(second))
}

/// Minimiser of [`at_constant_eps`] in `ε`: `1 - β/4π`.
pub fn best_eps(beta: f64) -> Result<f64> {
    check_subcritical(beta)?;
    Ok(1.0 - beta / FOUR_PI)
}

/// `e^{1/(1-β/4π)} / (1-β/4π)²`, the growth of `C_ε(β)` at its best `ε`.
pub fn at_asymptotic_constant(beta: f64) -> Result<f64> {
    check_subcritical(beta)?;
    let gap = 1.0 - beta / FOUR_PI;
    Ok((1.0 / gap).exp() / (gap * gap))
}

/// `σ_vl(β) = β K²`.
pub fn vanishing_level(beta: f64, k: f64) -> Result<f64> {
    check_positive("beta", beta)?;
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("K must be nonnegative, got {k}")));
    }
    Ok(beta * k * k)
}

/// `K² = (1 - β/4π)/4`.
pub fn quadratic_k_sq(beta: f64) -> Result<f64> {
    check_subcritical(beta)?;
    Ok(0.25 * (1.0 - beta / FOUR_PI))
}

/// `(1 + K²) β/4π <= 1 - K²` and `K < 1` for the `K` of [`quadratic_k_sq`].
pub fn quadratic_k_feasible(beta: f64) -> Result<bool> {
    let k2 = quadratic_k_sq(beta)?;
    Ok((1.0 + k2) * beta / FOUR_PI <= 1.0 - k2 && k2 < 1.0)
}

/// `e^{4π}(1 + 4π)/K⁴ = 16 e^{4π}(1 + 4π)/(1 - β/4π)²`, an explicit bound on
/// `J_β(u)/||u||²` over `||∇u|| <= 1`.
pub fn at_quadratic_bound(beta: f64) -> Result<f64> {
    let k2 = quadratic_k_sq(beta)?;
    Ok(FOUR_PI.exp() * (1.0 + FOUR_PI) / (k2 * k2))
}

/// `∫ (e^{βu²} - 1 - βu²) dx`, integrated directly so it stays accurate when it is
/// a tiny fraction of `J_β`.
pub fn remainder_functional(p: &RadialProfile, beta: f64, tol: f64) -> Result<f64> {
    Ok(p.integrate_kernel(Kernel::Remainder, beta, tol)?.0)
}

/// `(1/√λ) max{1, √(K/4π)}` with `K = J_λ(u)`, an upper bound for
/// [`zygmund_quasinorm`].
pub fn zcharact_bound(p: &RadialProfile, lambda: f64, tol: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    let k = p.tm_functional(lambda, tol)?.j_beta;
    Ok((k / FOUR_PI).sqrt().max(1.0) / lambda.sqrt())
}

/// Report form of [`zcharact_bound`]: quasinorm on the left, bound on the right.
pub fn check_zcharact(p: &RadialProfile, lambda: f64, tol: f64) -> Result<InequalityReport> {
    let q = zygmund_quasinorm(p);
    let bound = zcharact_bound(p, lambda, tol)?;
    Ok(InequalityReport::new(q.value, bound, Witness::Window { big_t: q.big_t, t: q.t }))
}

/// Report form of [`adachi_ratio`]: the ratio against [`at_quadratic_bound`].
pub fn check_adachi(p: &RadialProfile, beta: f64, tol: f64) -> Result<InequalityReport> {
    let ratio = adachi_ratio(p, beta, tol)?;
    Ok(InequalityReport::new(ratio, at_quadratic_bound(beta)?, Witness::None))
}

/// `e π`, the upper bound on the concentration level of the critical Ruf problem.
pub fn concentration_level_bound() -> f64 {
    E * std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{alvino_extremal, cap, moser, zygmund_optimal};
    use std::f64::consts::PI;

    const INV_SQRT_4PI: f64 = 0.282_094_791_773_878_14;

    #[test]
    fn zero_profile_reports() {
        let z = RadialProfile::zero(1.0).unwrap();
        let a = alvino_ratio_sup(&z, 2.0).unwrap();
        assert_eq!((a.lhs, a.rhs), (0.0, 0.0));
        assert!(a.holds);
        let l = check_limine(&z);
        assert_eq!((l.lhs, l.rhs), (0.0, 0.0));
        assert!(l.holds);
        assert_eq!(zygmund_quasinorm(&z).value, 0.0);
        assert!(alvino_ratio_sup(&z, 0.0).is_err());
    }

    #[test]
    fn alvino_equality_on_extremal() {
        let p = alvino_extremal(10.0, E.powi(4)).unwrap();
        let r = alvino_ratio_sup(&p, 10.0).unwrap();
        assert!((r.lhs - INV_SQRT_4PI).abs() < 1e-15);
        assert!((r.rhs - INV_SQRT_4PI).abs() < 1e-15);
        assert!(r.holds);
    }

    #[test]
    fn moser_attains_alvino_at_unit_ball() {
        // w_n is u_{R,δ} with R = 1, δ = n
        let r = alvino_ratio_sup(&moser(10).unwrap(), PI).unwrap();
        assert!(r.holds);
        assert!((r.lhs - r.rhs).abs() < 1e-15);
    }

    #[test]
    fn alvino_window_inside_support() {
        let p = alvino_extremal(PI, E).unwrap();
        for t in [0.01, 0.5, 2.0, 50.0] {
            let r = alvino_ratio_sup(&p, t).unwrap();
            assert!(r.holds, "T = {t}: {r:?}");
        }
        // T in the plateau: u*(t) - u*(T) = 0
        assert_eq!(alvino_ratio_sup(&p, PI * (-3.0f64).exp()).unwrap().lhs, 0.0);
    }

    #[test]
    fn alvino_unbounded_at_jump() {
        let p = RadialProfile::constant(1.0, 2.0).unwrap();
        assert!(alvino_ratio_sup(&p, 2.0).unwrap().lhs.is_infinite());
    }

    #[test]
    fn quasinorm_of_unit_plateau() {
        let p = RadialProfile::constant(1.0, FOUR_PI).unwrap();
        let q = zygmund_quasinorm(&p);
        assert!((q.value - 1.0).abs() < 1e-15);
        assert!((q.big_t - FOUR_PI).abs() < 1e-12);
        assert!((q.t - FOUR_PI).abs() < 1e-12);
    }

    #[test]
    fn quasinorm_matches_window_ratio() {
        for k in [1.0, 4.0, 100.0] {
            let q = zygmund_quasinorm(&zygmund_optimal(k).unwrap());
            let f2 = k.sqrt() / (1.0 + 4f64.ln() + k).sqrt();
            assert!((FOUR_PI.sqrt() * q.value - f2).abs() < 1e-14);
        }
    }

    #[test]
    fn quasinorm_stationary_point_on_wide_support() {
        // support far beyond 4π: the max is interior to the first ramp
        let p = RadialProfile::new(1e4, &[(0.0, 0.0), (20.0, 1.0)]).unwrap();
        let q = zygmund_quasinorm(&p);
        let brute = (1..200_000)
            .map(|i| i as f64 * 1e-4)
            .map(|s| {
                let t = 1e4 * (-s).exp();
                let window = if t <= FOUR_PI { 1.0 + (FOUR_PI / t).ln() } else { FOUR_PI / t };
                p.value_at_s(s) / window.sqrt()
            })
            .fold(0.0f64, f64::max);
        assert!(q.value >= brute - 1e-12);
        assert!((q.value - brute) / brute < 1e-6);
    }

    #[test]
    fn limine_slack_on_alvino_extremal() {
        let r = check_limine(&alvino_extremal(PI, E).unwrap());
        assert!(r.holds && r.slack > 1e-3);
    }

    #[test]
    fn adachi_ratio_cases() {
        let c = cap(1.0, 1.0).unwrap();
        let r = adachi_ratio(&c, 2.0 * PI, 1e-10).unwrap();
        assert!(r.is_finite() && r > 2.0 * PI);
        let small = adachi_ratio(&c, 1e-6, 1e-10).unwrap();
        assert!((small - 1e-6).abs() < 1e-9);
        let scaled = adachi_ratio(&c.scale_dilate(3.0).unwrap(), 2.0 * PI, 1e-10).unwrap();
        assert!((scaled - r).abs() < 1e-9 * r);
        assert!(adachi_ratio(&RadialProfile::zero(1.0).unwrap(), 1.0, 1e-10).is_err());
        assert!(adachi_ratio(&c, FOUR_PI, 1e-10).is_err());
    }

    #[test]
    fn constant_eps_values() {
        let c = at_constant_eps(2.0 * PI, 0.5).unwrap();
        let expected = FOUR_PI * 0.5f64.exp() * (1f64.exp() / 0.25);
        assert!((c - expected).abs() < 1e-12 * expected);
        assert!((c - 225.28).abs() < 0.01);
        assert_eq!(best_eps(2.0 * PI).unwrap(), 0.5);
        assert!(at_constant_eps(2.0 * PI, 1.0).is_err());
        assert!(at_constant_eps(2.0 * PI, 0.0).is_err());
    }

    #[test]
    fn best_eps_minimises() {
        let beta = 3.0 * PI;
        let best = at_constant_eps(beta, best_eps(beta).unwrap()).unwrap();
        for i in 1..300 {
            let eps = i as f64 / 300.0 * (FOUR_PI / beta - 1.0);
            assert!(at_constant_eps(beta, eps).unwrap() >= best * (1.0 - 1e-12));
        }
    }

    #[test]
    fn quadratic_bound_values() {
        let k2 = quadratic_k_sq(2.0 * PI).unwrap();
        assert!((k2.sqrt() - 0.353_553).abs() < 1e-6);
        let b = at_quadratic_bound(2.0 * PI).unwrap();
        assert!((b / (64.0 * FOUR_PI.exp() * (1.0 + FOUR_PI)) - 1.0).abs() < 1e-14);
        assert!(quadratic_k_feasible(2.0 * PI).unwrap());
        assert!(((1.0 + k2) * 0.5 - 0.5625).abs() < 1e-15);
        let limit = at_quadratic_bound(1e-12).unwrap();
        assert!((limit / (16.0 * FOUR_PI.exp() * (1.0 + FOUR_PI)) - 1.0).abs() < 1e-12);
        assert!(at_quadratic_bound(FOUR_PI).is_err());
    }

    #[test]
    fn vanishing_level_values() {
        assert!((vanishing_level(2.0 * PI, 1.0).unwrap() - std::f64::consts::TAU).abs() < 1e-15);
        assert_eq!(vanishing_level(2.0, 0.0).unwrap(), 0.0);
        assert!((vanishing_level(FOUR_PI, 1.0).unwrap() - 12.566_37).abs() < 1e-5);
    }

    #[test]
    fn remainder_matches_difference() {
        let p = moser(10).unwrap();
        let beta = 3.0;
        let rem = remainder_functional(&p, beta, 1e-12).unwrap();
        let diff = p.j_beta(beta).unwrap() - beta * p.l2_norm_sq();
        assert!(rem >= 0.0);
        assert!((rem - diff).abs() < 1e-9 * p.j_beta(beta).unwrap());
        let tiny = p.scale_amplitude(0.01).unwrap();
        let ratio = remainder_functional(&tiny, beta, 1e-10).unwrap() / tiny.j_beta(beta).unwrap();
        assert!(ratio > 0.0 && ratio < 1e-3);
    }

    #[test]
    fn zcharact_examples() {
        let p = RadialProfile::constant(1.0, FOUR_PI).unwrap();
        let b = zcharact_bound(&p, 1.0, 1e-10).unwrap();
        assert!((b - (E - 1.0).sqrt()).abs() < 1e-12);
        assert!(b >= zygmund_quasinorm(&p).value);
        let z = RadialProfile::zero(1.0).unwrap();
        assert!((zcharact_bound(&z, 4.0, 1e-10).unwrap() - 0.5).abs() < 1e-15);
        let m = moser(10).unwrap();
        assert!(check_zcharact(&m, FOUR_PI, 1e-10).unwrap().holds);
    }
}
