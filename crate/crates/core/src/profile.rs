//! Radial nonincreasing functions on the plane stored through their decreasing
//! rearrangement.
//!
//! A profile is the function `u*(t)` on `(0, T_sup]`, written in the log-measure
//! coordinate `s = log(T_sup / t)`. With `U(s) = u*(T_sup e^{-s})` every Moser-type
//! function is piecewise linear in `s`, and
//!
//! ```text
//! ||∇u||_2^2 = 4π ∫ (dU/ds)^2 ds,     ∫ F(u) dx = T_sup ∫ F(U(s)) e^{-s} ds.
//! ```
//!
//! The radial function itself is `u(x) = u*(π|x|^2)`.
//!
//! Knots are joined either linearly in `s` or by a [`Join::Jump`], which holds the
//! previous value and jumps at the knot. Jumps carry the step functions produced by
//! rearranging sampled data. After the last knot the profile stays constant (the
//! plateau), so `u*` is constant on `(0, T_sup e^{-s_last}]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

pub const FOUR_PI: f64 = 4.0 * PI;

/// Default relative tolerance of the adaptive quadrature.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest accepted quadrature tolerance.
pub const MAX_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Join {
    /// Linear in `s` from the previous knot.
    Linear,
    /// Constant at the previous value, jumping up at this knot.
    Jump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub s: f64,
    pub v: f64,
    /// How this knot is reached from its predecessor; ignored on the first knot.
    pub join: Join,
}

impl Knot {
    pub fn linear(s: f64, v: f64) -> Self {
        Knot { s, v, join: Join::Linear }
    }

    pub fn jump(s: f64, v: f64) -> Self {
        Knot { s, v, join: Join::Jump }
    }
}

/// One piece between consecutive knots, `U(s0 + x) = start + slope * x` for
/// `x ∈ [0, len]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    /// Index of the knot closing this segment.
    pub end_knot: usize,
    pub s0: f64,
    pub len: f64,
    pub start: f64,
    pub slope: f64,
}

impl Segment {
    pub fn value_at(&self, x: f64) -> f64 {
        self.start + self.slope * x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileJson", into = "ProfileJson")]
pub struct RadialProfile {
    t_support: f64,
    knots: Vec<Knot>,
}

/// Wire format: `{"t_support": T, "knots": [[s, v], ...], "jumps": [i, ...]}`.
/// `jumps` lists the knot indices reached by a jump and is omitted when empty.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileJson {
    t_support: f64,
    knots: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    jumps: Vec<usize>,
}

impl TryFrom<ProfileJson> for RadialProfile {
    type Error = Error;

    fn try_from(raw: ProfileJson) -> Result<Self> {
        let mut knots: Vec<Knot> = raw.knots.iter().map(|&[s, v]| Knot::linear(s, v)).collect();
        for &i in &raw.jumps {
            if i == 0 || i >= knots.len() {
                return Err(Error::InvalidProfile(format!("jump index {i} out of range")));
            }
            knots[i].join = Join::Jump;
        }
        RadialProfile::from_knots(raw.t_support, knots)
    }
}

impl From<RadialProfile> for ProfileJson {
    fn from(p: RadialProfile) -> Self {
        ProfileJson {
            t_support: p.t_support,
            knots: p.knots.iter().map(|k| [k.s, k.v]).collect(),
            jumps: p
                .knots
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, k)| k.join == Join::Jump)
                .map(|(i, _)| i)
                .collect(),
        }
    }
}

/// Norms and the Trudinger–Moser functional of one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub beta: f64,
    pub j_beta: f64,
    pub dirichlet_sq: f64,
    pub l2_sq: f64,
    /// `||∇u||² + ||u||²`, the `τ = 1` case of [`FunctionalReport::sobolev_sq`].
    pub sobolev_sq: f64,
    /// Absolute error estimate of `j_beta`.
    pub quad_error: f64,
}

impl FunctionalReport {
    pub fn sobolev_tau_sq(&self, tau: f64) -> f64 {
        self.dirichlet_sq + tau * self.l2_sq
    }
}

/// Integrand of a functional `∫ F(u) dx`, parametrised by `y = β u²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kernel {
    /// `e^y - 1`
    Exp,
    /// `e^y - 1 - y`
    Remainder,
}

impl Kernel {
    /// `(log_scale, factor)` with `F(y) = e^{log_scale} * factor`, evaluated without
    /// overflow for large `y` and without cancellation for small `y`.
    fn split(self, y: f64) -> (f64, f64) {
        match self {
            Kernel::Exp => {
                if y > 1.0 {
                    (y, -(-y).exp_m1())
                } else {
                    (0.0, y.exp_m1())
                }
            }
            Kernel::Remainder => {
                if y > 0.5 {
                    (y, 1.0 - (-y).exp() * (1.0 + y))
                } else {
                    (0.0, exp_remainder_series(y))
                }
            }
        }
    }

    /// `F(y) e^{shift}`, where the caller keeps `y + shift` bounded above.
    fn scaled(self, y: f64, shift: f64) -> f64 {
        let (log_scale, factor) = self.split(y);
        factor * (log_scale + shift).exp()
    }
}

/// `e^y - 1 - y` for `0 <= y <= 0.5`.
pub(crate) fn exp_remainder_series(y: f64) -> f64 {
    let mut term = 0.5 * y * y;
    let mut sum = term;
    let mut j = 2.0;
    while term > 1e-18 * sum {
        j += 1.0;
        term *= y / j;
        sum += term;
    }
    sum
}

/// `∫_0^h x^k e^{-x} dx` for `k = 0, 1, 2`.
pub(crate) fn exp_moments(h: f64) -> [f64; 3] {
    if h.is_infinite() {
        return [1.0, 1.0, 2.0];
    }
    if h < 2.0 {
        // h^{k+1} e^{-h} Σ_m h^m / ((k+1)(k+2)...(k+1+m)), all terms positive
        let e = (-h).exp();
        let mut out = [0.0; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut term = 1.0 / (k as f64 + 1.0);
            let mut sum = term;
            let mut m = k as f64 + 1.0;
            while term > 1e-18 * sum {
                m += 1.0;
                term *= h / m;
                sum += term;
            }
            *slot = h.powi(k as i32 + 1) * e * sum;
        }
        out
    } else {
        let e = (-h).exp();
        [-(-h).exp_m1(), 1.0 - e * (1.0 + h), 2.0 - e * (h * h + 2.0 * h + 2.0)]
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= MAX_TOL {
        Ok(())
    } else {
        Err(Error::Domain(format!("quadrature tolerance {tol} outside (0, {MAX_TOL}]")))
    }
}

pub(crate) fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {x}")))
    }
}

impl RadialProfile {
    /// Profile with linear joins between the given `(s, v)` knots.
    pub fn new(t_support: f64, knots: &[(f64, f64)]) -> Result<Self> {
        Self::from_knots(t_support, knots.iter().map(|&(s, v)| Knot::linear(s, v)).collect())
    }

    pub fn from_knots(t_support: f64, knots: Vec<Knot>) -> Result<Self> {
        if !(t_support > 0.0 && t_support.is_finite()) {
            return Err(Error::InvalidProfile(format!("t_support must be positive, got {t_support}")));
        }
        let first = knots
            .first()
            .ok_or_else(|| Error::InvalidProfile("at least one knot is required".into()))?;
        if first.s != 0.0 {
            return Err(Error::InvalidProfile(format!("first knot must sit at s = 0, got {}", first.s)));
        }
        for (i, k) in knots.iter().enumerate() {
            if !k.s.is_finite() || !k.v.is_finite() {
                return Err(Error::InvalidProfile(format!("knot {i} is not finite")));
            }
            if k.v < 0.0 {
                return Err(Error::InvalidProfile(format!("knot {i} has negative value {}", k.v)));
            }
            if i > 0 {
                let prev = &knots[i - 1];
                if k.s <= prev.s {
                    return Err(Error::InvalidProfile(format!(
                        "knot {i}: s must be strictly increasing ({} after {})",
                        k.s, prev.s
                    )));
                }
                if k.v < prev.v {
                    return Err(Error::InvalidProfile(format!(
                        "knot {i}: value decreases in s ({} after {}); u* must be nonincreasing in t",
                        k.v, prev.v
                    )));
                }
            }
        }
        let mut knots = knots;
        knots[0].join = Join::Linear;
        Ok(RadialProfile { t_support, knots })
    }

    /// The zero function, carried on a support of measure `t_support`.
    pub fn zero(t_support: f64) -> Result<Self> {
        Self::new(t_support, &[(0.0, 0.0)])
    }

    /// `u* = value` on `(0, area]`.
    pub fn constant(value: f64, area: f64) -> Result<Self> {
        Self::new(area, &[(0.0, value)])
    }

    pub fn t_support(&self) -> f64 {
        self.t_support
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn is_zero(&self) -> bool {
        self.max_value() == 0.0
    }

    /// `u*(0+)`, the plateau value.
    pub fn max_value(&self) -> f64 {
        self.knots.last().map_or(0.0, |k| k.v)
    }

    pub fn plateau_start(&self) -> f64 {
        self.knots.last().map_or(0.0, |k| k.s)
    }

    /// True when `u*` has a jump, including a jump from zero at `t = T_sup`.
    pub fn has_jumps(&self) -> bool {
        self.knots[0].v > 0.0
            || self
                .knots
                .windows(2)
                .any(|w| w[1].join == Join::Jump && w[1].v > w[0].v)
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.knots.windows(2).enumerate().map(|(i, w)| {
            let len = w[1].s - w[0].s;
            let slope = match w[1].join {
                Join::Linear => (w[1].v - w[0].v) / len,
                Join::Jump => 0.0,
            };
            Segment { end_knot: i + 1, s0: w[0].s, len, start: w[0].v, slope }
        })
    }

    /// `U(s) = u*(T_sup e^{-s})`; left-continuous in `s`, which is right-continuity of
    /// `u*` in `t`. Zero for `s <= 0`.
    pub fn value_at_s(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        // first knot with s_i >= s
        let idx = self.knots.partition_point(|k| k.s < s);
        if idx == self.knots.len() {
            return self.max_value();
        }
        let k = &self.knots[idx];
        if idx == 0 {
            return k.v;
        }
        let prev = &self.knots[idx - 1];
        match k.join {
            Join::Jump => prev.v,
            Join::Linear => {
                if k.s == s {
                    k.v
                } else {
                    prev.v + (k.v - prev.v) * (s - prev.s) / (k.s - prev.s)
                }
            }
        }
    }

    /// Right limit `U(s+)`: the upper value at a jump.
    pub fn upper_value_at_s(&self, s: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        let idx = self.knots.partition_point(|k| k.s <= s);
        if idx == 0 {
            return self.knots[0].v;
        }
        if idx == self.knots.len() {
            return self.max_value();
        }
        let prev = &self.knots[idx - 1];
        let k = &self.knots[idx];
        match k.join {
            Join::Jump => prev.v,
            Join::Linear => prev.v + (k.v - prev.v) * (s - prev.s) / (k.s - prev.s),
        }
    }

    /// `u*(t)` for `t > 0`; zero for `t >= T_sup` when the profile starts above zero.
    pub fn value_at(&self, t: f64) -> f64 {
        if t >= self.t_support {
            return 0.0;
        }
        self.value_at_s((self.t_support / t).ln())
    }

    /// `||∇u||_2^2 = 4π Σ (Δv/Δs)^2 Δs`, exact. Infinite when the profile has a jump.
    pub fn dirichlet_norm_sq(&self) -> f64 {
        if self.has_jumps() {
            return f64::INFINITY;
        }
        FOUR_PI
            * self
                .segments()
                .map(|seg| seg.slope * seg.slope * seg.len)
                .sum::<f64>()
    }

    /// `||u||_2^2 = T_sup ∫ U(s)^2 e^{-s} ds`, in closed form per segment.
    pub fn l2_norm_sq(&self) -> f64 {
        let body: f64 = self
            .segments()
            .map(|seg| {
                let [m0, m1, m2] = exp_moments(seg.len);
                let (a, b) = (seg.start, seg.slope);
                (-seg.s0).exp() * (a * a * m0 + 2.0 * a * b * m1 + b * b * m2)
            })
            .sum();
        let c = self.max_value();
        self.t_support * (body + c * c * (-self.plateau_start()).exp())
    }

    /// `||∇u||_2^2 + τ ||u||_2^2`.
    pub fn sobolev_sq(&self, tau: f64) -> f64 {
        self.dirichlet_norm_sq() + tau * self.l2_norm_sq()
    }

    /// `∫_0^t u*(r) dr`.
    pub fn integral_up_to(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let from = (self.t_support / t).ln().max(0.0);
        let mut acc = 0.0;
        for seg in self.segments() {
            let end = seg.s0 + seg.len;
            if end <= from {
                continue;
            }
            let (x0, len) = if seg.s0 >= from { (0.0, seg.len) } else { (from - seg.s0, end - from) };
            let [m0, m1, _] = exp_moments(len);
            let a = seg.value_at(x0);
            acc += (-(seg.s0 + x0)).exp() * (a * m0 + seg.slope * m1);
        }
        let c = self.max_value();
        acc += c * (-self.plateau_start().max(from)).exp();
        self.t_support * acc
    }

    pub fn scale_amplitude(&self, a: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("amplitude factor must be nonnegative, got {a}")));
        }
        Ok(RadialProfile {
            t_support: self.t_support,
            knots: self.knots.iter().map(|k| Knot { v: k.v * a, ..*k }).collect(),
        })
    }

    /// `u_b(x) = u(bx)`: the support measure shrinks by `b²`, knots are unchanged.
    pub fn scale_dilate(&self, b: f64) -> Result<Self> {
        check_positive("dilation factor", b)?;
        self.with_support(self.t_support / (b * b))
    }

    /// Same knots on a support of measure `t_support`.
    pub fn with_support(&self, t_support: f64) -> Result<Self> {
        if !(t_support > 0.0 && t_support.is_finite()) {
            return Err(Error::Domain(format!("support measure must be positive, got {t_support}")));
        }
        Ok(RadialProfile { t_support, knots: self.knots.clone() })
    }

    /// Inserts collinear knots so that no linear segment is longer than `max_len`.
    pub fn refined(&self, max_len: f64) -> Result<Self> {
        check_positive("max segment length", max_len)?;
        let mut knots = vec![self.knots[0]];
        for seg in self.segments() {
            let end = self.knots[seg.end_knot];
            if end.join == Join::Linear {
                let pieces = (seg.len / max_len).ceil().max(1.0) as usize;
                for j in 1..pieces {
                    let x = seg.len * j as f64 / pieces as f64;
                    knots.push(Knot::linear(seg.s0 + x, seg.value_at(x)));
                }
            }
            knots.push(end);
        }
        Self::from_knots(self.t_support, knots)
    }

    /// Trudinger–Moser functional `J_β(u) = ∫ (e^{βu²} - 1) dx` with all norms.
    pub fn tm_functional(&self, beta: f64, tol: f64) -> Result<FunctionalReport> {
        let (j_beta, quad_error) = self.integrate_kernel(Kernel::Exp, beta, tol)?;
        let dirichlet_sq = self.dirichlet_norm_sq();
        let l2_sq = self.l2_norm_sq();
        Ok(FunctionalReport {
            beta,
            j_beta,
            dirichlet_sq,
            l2_sq,
            sobolev_sq: dirichlet_sq + l2_sq,
            quad_error,
        })
    }

    /// `J_β` alone, at the default tolerance.
    pub fn j_beta(&self, beta: f64) -> Result<f64> {
        Ok(self.integrate_kernel(Kernel::Exp, beta, DEFAULT_TOL)?.0)
    }

    /// `T_sup ∫ F(βU(s)^2) e^{-s} ds` and its absolute error estimate.
    ///
    /// Every piece is computed as `exp(log T_sup + E) * I` where `E` bounds the
    /// exponent `βU² - s` on the piece and `I` is integrated with the exponent
    /// shifted by `-E`, so the only place a float can overflow is the final `exp`.
    pub(crate) fn integrate_kernel(&self, kernel: Kernel, beta: f64, tol: f64) -> Result<(f64, f64)> {
        check_positive("beta", beta)?;
        check_tol(tol)?;
        let log_t = self.t_support.ln();
        let mut total = 0.0;
        let mut error = 0.0;
        // `magnitude` bounds the terms that cancel inside `log_scale`; their rounding
        // moves the exponent by about `magnitude * ε`
        let mut add = |knot: usize, s: f64, log_scale: f64, magnitude: f64, value: f64, err: f64| -> Result<()> {
            if value == 0.0 {
                return Ok(());
            }
            let log_exponent = log_t + log_scale + value.ln();
            let piece = (log_t + log_scale).exp() * value;
            if !piece.is_finite() {
                return Err(Error::ValueOverflow { knot, s, log_exponent });
            }
            total += piece;
            let rounding = 4.0 * f64::EPSILON * (magnitude + log_t.abs() + 1.0);
            error += (log_t + log_scale).exp() * err + piece * rounding;
            Ok(())
        };

        for seg in self.segments() {
            if seg.start == 0.0 && seg.slope == 0.0 {
                continue;
            }
            if seg.slope == 0.0 {
                let y = beta * seg.start * seg.start;
                let (log_scale, factor) = kernel.split(y);
                let mass = exp_moments(seg.len)[0];
                add(seg.end_knot, seg.s0, log_scale - seg.s0, y + seg.s0 + seg.len, factor * mass, 0.0)?;
                continue;
            }
            let end = seg.value_at(seg.len);
            let q0 = beta * seg.start * seg.start - seg.s0;
            let q1 = beta * end * end - seg.s0 - seg.len;
            // βU² - s is convex on the segment, so its max sits at an endpoint
            let shift = q0.max(q1);
            let integrand = |x: f64| {
                let u = seg.value_at(x);
                kernel.scaled(beta * u * u, -seg.s0 - x - shift)
            };
            let est = quadrature::integrate(integrand, 0.0, seg.len, tol, 0.0);
            let magnitude = beta * seg.start.max(end).powi(2) + seg.s0 + seg.len;
            add(seg.end_knot, seg.s0 + seg.len, shift, magnitude, est.value, est.error)?;
        }

        let c = self.max_value();
        if c > 0.0 {
            let y = beta * c * c;
            let (log_scale, factor) = kernel.split(y);
            let last = self.knots.len() - 1;
            add(last, self.plateau_start(), log_scale - self.plateau_start(), y + self.plateau_start(), factor, 0.0)?;
        }
        Ok((total, error))
    }
}
