//! Explicit extremal and counterexample families.
//!
//! Every family here is a single linear ramp in `s` followed by a plateau, so the
//! constructors are exact and each comes with closed-form norms in [`ClosedForm`]
//! that are computed from the original radial formulas rather than from knots.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{check_positive, RadialProfile, FOUR_PI};

/// Moser function on the unit ball, `w_n = (2π)^{-1/2} (log n)^{-1/2} log(1/|x|)`
/// on `1/n < |x| <= 1` and `(log n / 2π)^{1/2}` inside.
pub fn moser(n: u64) -> Result<RadialProfile> {
    if n < 2 {
        return Err(Error::Domain(format!("moser requires n >= 2, got {n}")));
    }
    moser_from_log((n as f64).ln())
}

/// [`moser`] parametrised by `log n`, for indices beyond `u64`.
pub fn moser_from_log(log_n: f64) -> Result<RadialProfile> {
    check_positive("log n", log_n)?;
    ramp(PI, 2.0 * log_n, (log_n / (2.0 * PI)).sqrt())
}

/// `λ_n² = 1 - log log n / (4 log n)`.
pub fn counterexample_lambda_sq(log_n: f64) -> f64 {
    1.0 - log_n.ln() / (4.0 * log_n)
}

/// `R_n² = log n / (log log n)²`.
pub fn counterexample_radius_sq(log_n: f64) -> f64 {
    let ll = log_n.ln();
    log_n / (ll * ll)
}

/// `u_n(x) = λ_n w_n(x / R_n)`, unbounded in `J_{4π}` although `||∇u_n|| < 1`.
pub fn counterexample(n: u64) -> Result<RadialProfile> {
    if n < 3 {
        return Err(Error::Domain(format!("counterexample requires n >= 3, got {n}")));
    }
    counterexample_from_log((n as f64).ln())
}

/// [`counterexample`] parametrised by `log n`; only `log n` and `log log n` enter,
/// so astronomically large indices stay representable.
pub fn counterexample_from_log(log_n: f64) -> Result<RadialProfile> {
    if !(log_n > 1.0 && log_n.is_finite()) {
        return Err(Error::Domain(format!("counterexample requires log log n > 0, got log n = {log_n}")));
    }
    let lambda = counterexample_lambda_sq(log_n).sqrt();
    let r = counterexample_radius_sq(log_n).sqrt();
    moser_from_log(log_n)?.scale_dilate(1.0 / r)?.scale_amplitude(lambda)
}

/// Extremal of the Alvino-type inequality on the ball of measure `t = πR²`:
/// `(2π)^{-1/2} log(R/r)/(log δ)^{1/2}` on `R/δ <= r <= R`, `(log δ / 2π)^{1/2}` inside.
pub fn alvino_extremal(t: f64, delta: f64) -> Result<RadialProfile> {
    check_positive("T", t)?;
    if !(delta > 1.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("alvino extremal requires delta > 1, got {delta}")));
    }
    let l = delta.ln();
    ramp(t, 2.0 * l, (l / (2.0 * PI)).sqrt())
}

/// Moser cap `w_k(s) = min(s, k)/√k` written as `u_k(R e^{-s/2}) = w_k(s)/√(4π)`.
pub fn cap(k: f64, r: f64) -> Result<RadialProfile> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::Domain(format!("cap requires k >= 1, got {k}")));
    }
    check_positive("R", r)?;
    ramp(PI * r * r, k, (k / FOUR_PI).sqrt())
}

/// Optimising sequence of the Zygmund-type inequality: the cap with `R = 1`.
pub fn zygmund_optimal(k: f64) -> Result<RadialProfile> {
    cap(k, 1.0)
}

/// `m_n = (1 - ||w_n||_2) w_n`, feasible for `||∇u|| + ||u|| <= 1`.
pub fn modified_moser(n: u64) -> Result<RadialProfile> {
    let w = moser(n)?;
    let a = 1.0 - w.l2_norm_sq().sqrt();
    w.scale_amplitude(a)
}

fn ramp(t_support: f64, s_top: f64, v_top: f64) -> Result<RadialProfile> {
    RadialProfile::new(t_support, &[(0.0, 0.0), (s_top, v_top)])
}

/// Sum-norm `||∇u||_2 + ||u||_2`.
pub fn norm_sum(p: &RadialProfile) -> f64 {
    p.dirichlet_norm_sq().sqrt() + p.l2_norm_sq().sqrt()
}

/// `f_k(R)`: the inner supremum of the Zygmund ratio of `u_k` at window `T = πR²`.
pub fn zygmund_window_ratio(k: f64, r: f64) -> f64 {
    if r > (-0.5 * k).exp() {
        k.sqrt() / (4.0 / (r * r) + (r * r).ln() + k).sqrt()
    } else {
        r * k.sqrt() / 2.0
    }
}

/// Named family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SequenceSpec {
    Moser { n: u64 },
    Counterexample { n: u64 },
    AlvinoExtremal { t: f64, delta: f64 },
    Cap { k: f64, r: f64 },
    ZygmundOptimal { k: f64 },
    ModifiedMoser { n: u64 },
}

/// Norms of a family member from its closed-form expressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub dirichlet_sq: f64,
    pub l2_sq: f64,
}

/// `||w_n||_2^2 = (1/log n)(1/4 - 1/(4n²) - log n/(2n²))`, with `n = e^{log_n}`.
pub fn moser_l2_sq(log_n: f64) -> f64 {
    let inv_n2 = (-2.0 * log_n).exp();
    (0.25 - 0.25 * inv_n2 - 0.5 * log_n * inv_n2) / log_n
}

/// `||u_k||_2^2 = (1/2)(1/k - e^{-k} - e^{-k}/k)` for the cap with `R = 1`.
pub fn cap_l2_sq(k: f64) -> f64 {
    let e = (-k).exp();
    0.5 * (1.0 / k - e - e / k)
}

impl SequenceSpec {
    pub fn build(&self) -> Result<RadialProfile> {
        match *self {
            SequenceSpec::Moser { n } => moser(n),
            SequenceSpec::Counterexample { n } => counterexample(n),
            SequenceSpec::AlvinoExtremal { t, delta } => alvino_extremal(t, delta),
            SequenceSpec::Cap { k, r } => cap(k, r),
            SequenceSpec::ZygmundOptimal { k } => zygmund_optimal(k),
            SequenceSpec::ModifiedMoser { n } => modified_moser(n),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            SequenceSpec::Moser { .. } => Family::Moser,
            SequenceSpec::Counterexample { .. } => Family::Counterexample,
            SequenceSpec::AlvinoExtremal { .. } => Family::Alvino,
            SequenceSpec::Cap { .. } => Family::Cap,
            SequenceSpec::ZygmundOptimal { .. } => Family::Zygmund,
            SequenceSpec::ModifiedMoser { .. } => Family::ModifiedMoser,
        }
    }

    /// Parameter string for reports, e.g. `n=10` or `T=3.14,delta=2.72`.
    pub fn params(&self) -> String {
        match *self {
            SequenceSpec::Moser { n }
            | SequenceSpec::Counterexample { n }
            | SequenceSpec::ModifiedMoser { n } => format!("n={n}"),
            SequenceSpec::AlvinoExtremal { t, delta } => format!("T={t},delta={delta}"),
            SequenceSpec::Cap { k, r } => format!("k={k},R={r}"),
            SequenceSpec::ZygmundOptimal { k } => format!("k={k}"),
        }
    }

    /// Norms from the radial closed forms. Scaled members reuse the Moser or cap
    /// formula through `u(x) ↦ a u(x/R)`, which multiplies `||u||²` by `a²R²`.
    pub fn closed_form(&self) -> Result<ClosedForm> {
        self.build()?;
        Ok(match *self {
            SequenceSpec::Moser { n } => ClosedForm { dirichlet_sq: 1.0, l2_sq: moser_l2_sq((n as f64).ln()) },
            SequenceSpec::Counterexample { n } => {
                let l = (n as f64).ln();
                let lam2 = counterexample_lambda_sq(l);
                ClosedForm {
                    dirichlet_sq: lam2,
                    l2_sq: lam2 * counterexample_radius_sq(l) * moser_l2_sq(l),
                }
            }
            SequenceSpec::AlvinoExtremal { t, delta } => ClosedForm {
                dirichlet_sq: 1.0,
                l2_sq: (t / PI) * moser_l2_sq(delta.ln()),
            },
            SequenceSpec::Cap { k, r } => ClosedForm { dirichlet_sq: 1.0, l2_sq: r * r * cap_l2_sq(k) },
            SequenceSpec::ZygmundOptimal { k } => ClosedForm { dirichlet_sq: 1.0, l2_sq: cap_l2_sq(k) },
            SequenceSpec::ModifiedMoser { n } => {
                let w = moser_l2_sq((n as f64).ln());
                let a = 1.0 - w.sqrt();
                ClosedForm { dirichlet_sq: a * a, l2_sq: a * a * w }
            }
        })
    }
}

/// CLI-facing family names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Moser,
    Counterexample,
    Alvino,
    Cap,
    Zygmund,
    ModifiedMoser,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Moser,
        Family::Counterexample,
        Family::Alvino,
        Family::Cap,
        Family::Zygmund,
        Family::ModifiedMoser,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Moser => "moser",
            Family::Counterexample => "counterexample",
            Family::Alvino => "alvino",
            Family::Cap => "cap",
            Family::Zygmund => "zygmund",
            Family::ModifiedMoser => "modified-moser",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown family {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn moser_norms() {
        let w = moser(10).unwrap();
        assert!(rel(w.dirichlet_norm_sq(), 1.0) < 1e-15);
        assert!((w.l2_norm_sq() - 0.102_487_884_271_054_83).abs() < 1e-15);
        assert!(moser(1).is_err());
    }

    #[test]
    fn moser_l2_decreases_in_n() {
        let vals: Vec<f64> = (3..200).map(|n| moser(n).unwrap().l2_norm_sq()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn counterexample_at_one_million() {
        let u = counterexample(1_000_000).unwrap();
        // λ² = 1 - log log n / (4 log n)
        assert!((u.dirichlet_norm_sq() - 0.952_484_710_871_537_2).abs() < 1e-15);
        // λ² R² (1/log n)(1/4 - 1/(4n²) - log n/(2n²))
        assert!((u.l2_norm_sq() - 0.034_536_427_260_897_98).abs() < 1e-15);
        assert!(u.dirichlet_norm_sq() < 1.0);
        assert!(counterexample(2).is_err());
    }

    #[test]
    fn counterexample_strictly_subunit_gradient() {
        for n in [3u64, 4, 10, 100, 10_000, 100_000_000] {
            assert!(counterexample(n).unwrap().dirichlet_norm_sq() < 1.0, "n = {n}");
        }
        // far beyond u64
        assert!(counterexample_from_log(1e6).unwrap().dirichlet_norm_sq() < 1.0);
    }

    #[test]
    fn alvino_knot_value() {
        let p = alvino_extremal(PI, std::f64::consts::E).unwrap();
        assert_eq!(p.knots()[1].s, 2.0);
        assert!((p.knots()[1].v - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-16);
        assert!((p.dirichlet_norm_sq() - 1.0).abs() < 1e-15);
        assert!(alvino_extremal(PI, 1.0).is_err());
    }

    #[test]
    fn alvino_radius_change_matches_dilation() {
        let (r, delta, b) = (1.3f64, 5.0, 2.0);
        let shrunk = alvino_extremal(PI * (r / b) * (r / b), delta).unwrap();
        let dilated = alvino_extremal(PI * r * r, delta).unwrap().scale_dilate(b).unwrap();
        assert_eq!(shrunk.knots(), dilated.knots());
        assert!(rel(shrunk.t_support(), dilated.t_support()) < 1e-15);
    }

    #[test]
    fn cap_with_unit_k_is_alvino_half() {
        let c = cap(1.0, 1.0).unwrap();
        let a = alvino_extremal(PI, 0.5f64.exp()).unwrap();
        assert_eq!(c.t_support(), a.t_support());
        for (x, y) in c.knots().iter().zip(a.knots()) {
            assert!((x.s - y.s).abs() < 1e-15 && (x.v - y.v).abs() < 1e-15);
        }
    }

    #[test]
    fn cap_ratio_sup_is_one() {
        // sup_s w_k(s)/√s = 1, reached on s = k
        let k = 4.0;
        let c = cap(k, 1.0).unwrap();
        let best = (1..4000)
            .map(|i| i as f64 * 0.005)
            .map(|s| FOUR_PI.sqrt() * c.value_at_s(s) / s.sqrt())
            .fold(0.0f64, f64::max);
        assert!((best - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zygmund_l2_k_one() {
        let z = zygmund_optimal(1.0).unwrap();
        assert!((z.l2_norm_sq() - 0.132_120_6).abs() < 1e-7);
        assert!(rel(z.l2_norm_sq(), cap_l2_sq(1.0)) < 1e-14);
    }

    #[test]
    fn window_ratio_at_two() {
        assert!((zygmund_window_ratio(4.0, 2.0) - 0.791_417_281_671_548_7).abs() < 1e-15);
        // R = 2 maximises f_k over R > e^{-k/2}
        let f2 = zygmund_window_ratio(4.0, 2.0);
        for i in 1..400 {
            assert!(zygmund_window_ratio(4.0, 0.15 + i as f64 * 0.02) <= f2 + 1e-15);
        }
    }

    #[test]
    fn modified_moser_sum_norm() {
        let m = modified_moser(10).unwrap();
        let a = moser(10).unwrap().l2_norm_sq().sqrt();
        assert!((a - 0.320_137_289_722_791_94).abs() < 1e-15);
        assert!(rel(norm_sum(&m), 1.0 - a * a) < 1e-14);
        assert!((norm_sum(&m) - 0.897_512_115_728_945_2).abs() < 1e-14);
        for n in [2u64, 3, 50, 1000, 1_000_000] {
            assert!(norm_sum(&modified_moser(n).unwrap()) <= 1.0);
        }
    }

    #[test]
    fn closed_forms_match_knot_norms() {
        let specs = [
            SequenceSpec::Moser { n: 100 },
            SequenceSpec::Counterexample { n: 10_000 },
            SequenceSpec::AlvinoExtremal { t: 10.0, delta: 54.0 },
            SequenceSpec::Cap { k: 16.0, r: 0.3 },
            SequenceSpec::ZygmundOptimal { k: 64.0 },
            SequenceSpec::ModifiedMoser { n: 10 },
        ];
        for spec in specs {
            let p = spec.build().unwrap();
            let cf = spec.closed_form().unwrap();
            assert!(rel(p.dirichlet_norm_sq(), cf.dirichlet_sq) < 1e-10, "{spec:?}");
            assert!(rel(p.l2_norm_sq(), cf.l2_sq) < 1e-10, "{spec:?}");
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("gauss".parse::<Family>().is_err());
    }
}
