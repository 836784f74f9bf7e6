//! Rescalings that carry a profile from one constraint set to the other while
//! keeping track of the functional.
//!
//! Each transform returns every intermediate profile together with the `β` and
//! multiplier under which it reproduces the original functional value, so the
//! chain of equalities can be re-evaluated independently.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{check_positive, RadialProfile, FOUR_PI};

/// Relative slack allowed on a stage constraint.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Unknown sharp constant a bound is stated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantTag {
    /// Supremum of `J_{4π}` over `||∇u||² + ||u||² <= 1`.
    D4Pi,
    /// Constant of the subcritical inequality at `β = 2π`.
    CSubcritical,
}

/// `J <= coefficient * constant(tag)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub coefficient: f64,
    pub tag: ConstantTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    DirichletSq,
    L2Sq,
    SobolevSq,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub norm: Norm,
    pub value: f64,
    pub limit: f64,
    /// `value = limit` is required rather than `value <= limit`.
    pub equality: bool,
}

impl ConstraintCheck {
    fn new(p: &RadialProfile, norm: Norm, limit: f64, equality: bool) -> Self {
        let value = match norm {
            Norm::DirichletSq => p.dirichlet_norm_sq(),
            Norm::L2Sq => p.l2_norm_sq(),
            Norm::SobolevSq => p.sobolev_sq(1.0),
        };
        ConstraintCheck { norm, value, limit, equality }
    }

    pub fn satisfied(&self) -> bool {
        let slack = CONSTRAINT_TOL * self.limit.abs().max(1.0);
        if self.equality {
            (self.value - self.limit).abs() <= slack
        } else {
            self.value <= self.limit + slack
        }
    }
}

/// A profile in the chain: `J_{β_0}(u) = multiplier * J_beta(profile)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub label: String,
    pub beta: f64,
    pub multiplier: f64,
    pub profile: RadialProfile,
    pub constraints: Vec<ConstraintCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    RufNormalize,
    AdachiSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `θ <= 1/2`: amplitude `√2`.
    Subcritical,
    /// `θ > 1/2`: amplitude `1/√θ`.
    Critical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceTrace {
    pub transform: Transform,
    /// `θ = ||∇u||²` of the input.
    pub theta: f64,
    pub l2_sq: f64,
    pub branch: Option<Branch>,
    pub stages: Vec<Stage>,
    pub bound: Bound,
}

impl EquivalenceTrace {
    /// `multiplier * J_beta(profile)` for every stage; all entries agree up to
    /// quadrature error.
    pub fn chain_values(&self, tol: f64) -> Result<Vec<f64>> {
        self.stages
            .iter()
            .map(|st| Ok(st.multiplier * st.profile.tm_functional(st.beta, tol)?.j_beta))
            .collect()
    }

    /// Largest relative spread in [`chain_values`](Self::chain_values).
    pub fn chain_spread(&self, tol: f64) -> Result<f64> {
        let values = self.chain_values(tol)?;
        let first = values[0];
        Ok(values
            .iter()
            .map(|v| (v - first).abs() / first.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max))
    }

    fn check(self) -> Result<Self> {
        for st in &self.stages {
            if let Some(c) = st.constraints.iter().find(|c| !c.satisfied()) {
                return Err(Error::Postcondition(format!(
                    "stage {}: {:?} = {} against limit {}",
                    st.label, c.norm, c.value, c.limit
                )));
            }
        }
        Ok(self)
    }
}

fn stage(label: &str, beta: f64, multiplier: f64, profile: RadialProfile, constraints: Vec<ConstraintCheck>) -> Stage {
    Stage { label: label.into(), beta, multiplier, profile, constraints }
}

/// `v = √(β/4π) u`, then `v_μ(x) = v(μx)` with `μ² = ||v||²/(1 - β/4π)`, which
/// lands in `||∇v_μ||² + ||v_μ||² <= 1` with `J_β(u) = μ² J_{4π}(v_μ)`.
pub fn ruf_normalize(p: &RadialProfile, beta: f64) -> Result<EquivalenceTrace> {
    if !(beta > 0.0 && beta < FOUR_PI) {
        return Err(Error::Domain(format!("beta must lie in (0, 4π), got {beta}")));
    }
    if p.is_zero() {
        return Err(Error::Precondition("ruf_normalize of the zero profile".into()));
    }
    let theta = p.dirichlet_norm_sq();
    if theta > 1.0 + CONSTRAINT_TOL {
        return Err(Error::Precondition(format!("requires ||∇u||² <= 1, got {theta}")));
    }
    let ratio = beta / FOUR_PI;
    let v = p.scale_amplitude(ratio.sqrt())?;
    let mu_sq = v.l2_norm_sq() / (1.0 - ratio);
    let v_mu = v.scale_dilate(mu_sq.sqrt())?;

    let input = ConstraintCheck::new(p, Norm::DirichletSq, 1.0, false);
    let v_grad = ConstraintCheck::new(&v, Norm::DirichletSq, ratio, false);
    let landed = ConstraintCheck::new(&v_mu, Norm::SobolevSq, 1.0, false);
    EquivalenceTrace {
        transform: Transform::RufNormalize,
        theta,
        l2_sq: p.l2_norm_sq(),
        branch: None,
        stages: vec![
            stage("u", beta, 1.0, p.clone(), vec![input]),
            stage("v", FOUR_PI, 1.0, v, vec![v_grad]),
            stage("v_mu", FOUR_PI, mu_sq, v_mu, vec![landed]),
        ],
        bound: Bound { coefficient: mu_sq, tag: ConstantTag::D4Pi },
    }
    .check()
}

/// Splits `||∇u||² + ||u||² <= 1` at `θ = ||∇u||² = 1/2` and bounds `J_{4π}(u)`:
/// for `θ <= 1/2` through `ũ = √2 u` at `β = 2π`, otherwise through `u_θ = u/√θ`
/// at `β = 4πθ`.
pub fn adachi_split(p: &RadialProfile) -> Result<EquivalenceTrace> {
    if p.is_zero() {
        return Err(Error::Precondition("adachi_split of the zero profile".into()));
    }
    let theta = p.dirichlet_norm_sq();
    let l2 = p.l2_norm_sq();
    if theta >= 1.0 {
        return Err(Error::Precondition(format!("requires ||∇u||² < 1, got {theta}")));
    }
    if theta + l2 > 1.0 + CONSTRAINT_TOL {
        return Err(Error::Precondition(format!("requires ||∇u||² + ||u||² <= 1, got {}", theta + l2)));
    }
    let input = ConstraintCheck::new(p, Norm::SobolevSq, 1.0, false);
    let first = stage("u", FOUR_PI, 1.0, p.clone(), vec![input]);

    let trace = if theta <= 0.5 {
        let u_tilde = p.scale_amplitude(std::f64::consts::SQRT_2)?;
        let checks = vec![
            ConstraintCheck::new(&u_tilde, Norm::DirichletSq, 1.0, false),
            ConstraintCheck::new(&u_tilde, Norm::L2Sq, 2.0, false),
        ];
        EquivalenceTrace {
            transform: Transform::AdachiSplit,
            theta,
            l2_sq: l2,
            branch: Some(Branch::Subcritical),
            stages: vec![first, stage("u_tilde", 0.5 * FOUR_PI, 1.0, u_tilde.clone(), checks)],
            bound: Bound { coefficient: u_tilde.l2_norm_sq(), tag: ConstantTag::CSubcritical },
        }
    } else {
        let u_theta = p.scale_amplitude(1.0 / theta.sqrt())?;
        let checks = vec![ConstraintCheck::new(&u_theta, Norm::DirichletSq, 1.0, true)];
        EquivalenceTrace {
            transform: Transform::AdachiSplit,
            theta,
            l2_sq: l2,
            branch: Some(Branch::Critical),
            stages: vec![first, stage("u_theta", FOUR_PI * theta, 1.0, u_theta, checks)],
            bound: Bound { coefficient: l2 / (theta * (1.0 - theta)), tag: ConstantTag::D4Pi },
        }
    };
    trace.check()
}

/// `u_τ(x) = u(√τ x)`, so that `||u_τ||²_{S,τ} = ||u||²_S` and `τ J_β(u_τ) = J_β(u)`.
pub fn tau_rescale(p: &RadialProfile, tau: f64) -> Result<RadialProfile> {
    check_positive("tau", tau)?;
    let out = p.with_support(p.t_support() / tau)?;
    let (before, after) = (p.sobolev_sq(1.0), out.sobolev_sq(tau));
    if before.is_finite() && (after - before).abs() > 1e-14 * before.max(f64::MIN_POSITIVE) {
        return Err(Error::Postcondition(format!("tau-norm changed from {before} to {after}")));
    }
    Ok(out)
}
