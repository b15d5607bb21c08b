//! Pursuer normal-acceleration commands.
//!
//! Three laws are provided:
//!
//! * proportional guidance (PG), `u = -λ V_P ψ̇ - g cos γ_P`;
//! * range-output feedback linearization, `u = β⁻¹(-α + v)` with `v = -k_R R`,
//!   blended with PG through a Takagi–Sugeno membership on `sin(ψ - γ_P)` so
//!   the singular set `ψ - γ_P = nπ` is never inverted;
//! * LOS-rate-output feedback linearization with `v = -k_ψ̇ ψ̇`, optionally
//!   with the sign correction that prevents the pursuer from nulling the LOS
//!   rate while flying away from the evader.
//!
//! `α` and `β` are the Lie-derivative terms of the chosen output along the
//! pursuer dynamics with the evader state held as an exogenous input. With
//! `evader_feedforward` set, the laws also cancel the part of the output
//! derivative driven by the evader's own acceleration and turn rate.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use crate::dynamics::{wrap_angle, EngagementModel, EngagementState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GuidanceLaw {
    #[serde(rename = "pg")]
    Pg,
    #[serde(rename = "range-iol")]
    RangeIol,
    #[serde(rename = "los-iol")]
    LosIol,
    #[serde(rename = "los-iol-uncorrected")]
    LosIolUncorrected,
}

impl GuidanceLaw {
    pub const ALL: [GuidanceLaw; 4] = [
        GuidanceLaw::Pg,
        GuidanceLaw::RangeIol,
        GuidanceLaw::LosIol,
        GuidanceLaw::LosIolUncorrected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GuidanceLaw::Pg => "pg",
            GuidanceLaw::RangeIol => "range-iol",
            GuidanceLaw::LosIol => "los-iol",
            GuidanceLaw::LosIolUncorrected => "los-iol-uncorrected",
        }
    }
}

impl fmt::Display for GuidanceLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GuidanceLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GuidanceLaw::ALL
            .into_iter()
            .find(|law| law.name() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "law",
                    format!("unknown guidance law {s:?} (expected pg, range-iol, los-iol, los-iol-uncorrected)"),
                )
            })
    }
}

/// Shape of the IOL membership on `s = sin(ψ - γ_P)`: zero on
/// `|s| <= dead_band`, linear up to one at `|s| = ramp_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipParams {
    pub dead_band: f64,
    pub ramp_end: f64,
}

impl Default for MembershipParams {
    fn default() -> Self {
        Self {
            dead_band: 0.1,
            ramp_end: 0.2,
        }
    }
}

impl MembershipParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.dead_band && self.dead_band < self.ramp_end && self.ramp_end <= 1.0) {
            return Err(Error::invalid(
                "guidance.membership",
                format!(
                    "need 0 < dead_band < ramp_end <= 1, got dead_band={} ramp_end={}",
                    self.dead_band, self.ramp_end
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceSpec {
    pub law: GuidanceLaw,
    /// PG navigation constant.
    pub lambda: f64,
    /// Range-law gain [1/s²].
    pub k_r: f64,
    /// LOS-rate-law gain [1/s].
    pub k_psidot: f64,
    pub membership: MembershipParams,
    /// Symmetric limit on `|u|` [m/s²]; `None` disables saturation.
    pub saturation_limit: Option<f64>,
    /// Lower bound on `|β|` of the LOS-rate law [1/m].
    pub beta_floor: f64,
    /// Include the evader-motion terms in `α` of both IOL laws.
    pub evader_feedforward: bool,
}

pub const DEFAULT_SATURATION_G: f64 = 40.0;

impl GuidanceSpec {
    pub fn new(law: GuidanceLaw) -> Self {
        Self {
            law,
            lambda: 3.0,
            k_r: 0.05,
            k_psidot: 2.0,
            membership: MembershipParams::default(),
            saturation_limit: Some(DEFAULT_SATURATION_G * 9.81),
            beta_floor: 1e-6,
            evader_feedforward: true,
        }
    }

    pub fn with_law(mut self, law: GuidanceLaw) -> Self {
        self.law = law;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("guidance.{field}"), "must be > 0"))
            }
        };
        positive("lambda", self.lambda)?;
        positive("k_r", self.k_r)?;
        positive("k_psidot", self.k_psidot)?;
        positive("beta_floor", self.beta_floor)?;
        if let Some(limit) = self.saturation_limit {
            positive("saturation_limit", limit)?;
        }
        self.membership.validate()
    }
}

/// Output of one guidance evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceCommand {
    /// Commanded pursuer normal acceleration `n_z,P` [m/s²].
    pub u: f64,
    /// Weight on the IOL branch; the PG weight is `1 - mu_iol`.
    pub mu_iol: f64,
    pub saturated: bool,
    /// The LOS-law `|β|` floor was engaged.
    pub near_singular: bool,
}

fn require_range(state: &EngagementState) -> Result<()> {
    if state.range > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveRange(state.range))
    }
}

/// Clamp to `[-limit, limit]`.
pub fn saturate(u: f64, limit: f64) -> f64 {
    u.clamp(-limit, limit)
}

/// Line-of-sight rate `ψ̇` [rad/s].
pub fn los_rate(state: &EngagementState) -> Result<f64> {
    require_range(state)?;
    let p = &state.pursuer;
    let e = &state.evader;
    Ok((p.speed * (state.los - p.flight_path).sin() - e.speed * (state.los - e.flight_path).sin())
        / state.range)
}

pub fn pg_command(state: &EngagementState, lambda: f64, model: &EngagementModel) -> Result<f64> {
    let psi_dot = los_rate(state)?;
    Ok(-lambda * state.pursuer.speed * psi_dot - model.consts.g * state.pursuer.flight_path.cos())
}

/// Specific thrust-minus-drag deficit `(D_P - T_P) / m_P`.
fn drag_deficit(state: &EngagementState, model: &EngagementModel) -> f64 {
    (model.pursuer_drag(state) - model.pursuer.thrust) / model.pursuer.mass
}

/// `α = L_f² R`: the input-free part of `R̈`.
pub fn range_iol_alpha(state: &EngagementState, model: &EngagementModel) -> Result<f64> {
    require_range(state)?;
    let g = model.consts.g;
    let p = &state.pursuer;
    let e = &state.evader;
    let (sin_p, cos_p) = (state.los - p.flight_path).sin_cos();
    let transverse = e.speed * (state.los - e.flight_path).sin() - p.speed * sin_p;
    let (sin_gp, cos_gp) = p.flight_path.sin_cos();
    Ok(transverse * transverse / state.range
        + cos_p * (drag_deficit(state, model) + g * sin_gp)
        + g * cos_gp * sin_p)
}

/// `β = L_g L_f R = sin(ψ - γ_P)`; zero on the tail-chase/head-on set.
pub fn range_iol_beta(state: &EngagementState) -> f64 {
    (state.los - state.pursuer.flight_path).sin()
}

/// Evader speed and flight-path rates under normal acceleration `n_ze`.
fn evader_rates(state: &EngagementState, model: &EngagementModel, n_ze: f64) -> (f64, f64) {
    let e = &state.evader;
    let g = model.consts.g;
    let (sin_ge, cos_ge) = e.flight_path.sin_cos();
    let d_e = crate::dynamics::drag(e.speed, e.altitude, &model.evader, &model.consts);
    let speed_rate = (model.evader.thrust - d_e) / model.evader.mass - g * sin_ge;
    let path_rate = -(n_ze + g * cos_ge) / e.speed;
    (speed_rate, path_rate)
}

/// Part of `R̈` driven by the evader's own motion.
pub fn range_iol_evader_alpha(state: &EngagementState, model: &EngagementModel, n_ze: f64) -> f64 {
    let (speed_rate, path_rate) = evader_rates(state, model, n_ze);
    let (sin_e, cos_e) = (state.los - state.evader.flight_path).sin_cos();
    speed_rate * cos_e + state.evader.speed * sin_e * path_rate
}

/// Unblended range law `β⁻¹(-α - k_R R)`, `α` being the pursuer-side term
/// only.
pub fn range_iol_raw(state: &EngagementState, k_r: f64, model: &EngagementModel) -> Result<f64> {
    range_iol_raw_with(state, k_r, model, 0.0)
}

fn range_iol_raw_with(
    state: &EngagementState,
    k_r: f64,
    model: &EngagementModel,
    evader_alpha: f64,
) -> Result<f64> {
    let beta = range_iol_beta(state);
    if beta == 0.0 {
        return Err(Error::Singular("sin(psi - gamma_P) = 0"));
    }
    let alpha = range_iol_alpha(state, model)? + evader_alpha;
    Ok((-alpha - k_r * state.range) / beta)
}

/// IOL membership weight `μ_IOL(s)`.
pub fn membership_iol(s: f64, params: &MembershipParams) -> f64 {
    let a = s.abs();
    if a <= params.dead_band {
        0.0
    } else if a >= params.ramp_end {
        1.0
    } else {
        (a - params.dead_band) / (params.ramp_end - params.dead_band)
    }
}

/// PG membership weight `μ_PG(s) = 1 - μ_IOL(s)`.
pub fn membership_pg(s: f64, params: &MembershipParams) -> f64 {
    1.0 - membership_iol(s, params)
}

/// Convex combination of an IOL command and a PG command.
///
/// `iol` is only called when its weight is non-zero and `pg` only when the
/// PG weight is non-zero, so a singular branch is never multiplied by zero.
/// Returns `(u, mu_iol)`.
pub fn fuzzy_blend(
    s: f64,
    params: &MembershipParams,
    iol: impl FnOnce() -> Result<f64>,
    pg: impl FnOnce() -> Result<f64>,
) -> Result<(f64, f64)> {
    let mu_iol = membership_iol(s, params);
    let u = if mu_iol == 0.0 {
        pg()?
    } else if mu_iol == 1.0 {
        iol()?
    } else {
        mu_iol * iol()? + (1.0 - mu_iol) * pg()?
    };
    Ok((u, mu_iol))
}

fn finish(u: f64, mu_iol: f64, near_singular: bool, limit: Option<f64>) -> GuidanceCommand {
    let (u, saturated) = match limit {
        Some(l) if u.abs() > l => (saturate(u, l), true),
        _ => (u, false),
    };
    GuidanceCommand {
        u,
        mu_iol,
        saturated,
        near_singular,
    }
}

/// Range law blended with PG. `n_ze` is only used for the evader
/// feedforward.
pub fn range_iol_blended(
    state: &EngagementState,
    spec: &GuidanceSpec,
    model: &EngagementModel,
    n_ze: f64,
) -> Result<GuidanceCommand> {
    require_range(state)?;
    let (u, mu_iol) = fuzzy_blend(
        range_iol_beta(state),
        &spec.membership,
        || {
            let evader_alpha = if spec.evader_feedforward {
                range_iol_evader_alpha(state, model, n_ze)
            } else {
                0.0
            };
            range_iol_raw_with(state, spec.k_r, model, evader_alpha)
        },
        || pg_command(state, spec.lambda, model),
    )?;
    Ok(finish(u, mu_iol, false, spec.saturation_limit))
}

/// `α = L_f ψ̇`: the input-free part of `ψ̈`.
pub fn los_iol_alpha(state: &EngagementState, model: &EngagementModel) -> Result<f64> {
    require_range(state)?;
    let g = model.consts.g;
    let r = state.range;
    let p = &state.pursuer;
    let e = &state.evader;
    let (sin_p, cos_p) = (state.los - p.flight_path).sin_cos();
    let (sin_e, cos_e) = (state.los - e.flight_path).sin_cos();
    let (sin_gp, cos_gp) = p.flight_path.sin_cos();
    let radial = e.speed * cos_e - p.speed * cos_p;
    let transverse = e.speed * sin_e - p.speed * sin_p;
    Ok(2.0 * radial * transverse / (r * r) - sin_p * (drag_deficit(state, model) + g * sin_gp) / r
        + g * cos_gp * cos_p / r)
}

/// Part of `ψ̈` driven by the evader's own motion.
pub fn los_iol_evader_alpha(state: &EngagementState, model: &EngagementModel, n_ze: f64) -> Result<f64> {
    require_range(state)?;
    let (speed_rate, path_rate) = evader_rates(state, model, n_ze);
    let (sin_e, cos_e) = (state.los - state.evader.flight_path).sin_cos();
    Ok((-speed_rate * sin_e + state.evader.speed * cos_e * path_rate) / state.range)
}

/// `β = L_g ψ̇ = cos(ψ - γ_P) / R`.
pub fn los_iol_beta(state: &EngagementState) -> Result<f64> {
    require_range(state)?;
    Ok((state.los - state.pursuer.flight_path).cos() / state.range)
}

/// `-1` when the pursuer heading is more than 90° off the line of sight,
/// `+1` otherwise (including exactly 90°).
pub fn correction_sign(state: &EngagementState) -> f64 {
    if wrap_angle(state.pursuer.flight_path - state.los).abs() > FRAC_PI_2 {
        -1.0
    } else {
        1.0
    }
}

pub fn los_iol_command(
    state: &EngagementState,
    spec: &GuidanceSpec,
    model: &EngagementModel,
    n_ze: f64,
    corrected: bool,
) -> Result<GuidanceCommand> {
    let mut alpha = los_iol_alpha(state, model)?;
    if spec.evader_feedforward {
        alpha += los_iol_evader_alpha(state, model, n_ze)?;
    }
    let beta = los_iol_beta(state)?;
    let v = -spec.k_psidot * los_rate(state)?;
    let near_singular = beta.abs() < spec.beta_floor;
    let beta = if !near_singular {
        beta
    } else if beta >= 0.0 {
        spec.beta_floor
    } else {
        -spec.beta_floor
    };
    let mut u = (-alpha + v) / beta;
    if corrected {
        u *= correction_sign(state);
    }
    Ok(finish(u, 1.0, near_singular, spec.saturation_limit))
}

/// Evaluates the law selected by `spec`; `n_ze` is the evader's current
/// normal acceleration.
pub fn command(
    state: &EngagementState,
    spec: &GuidanceSpec,
    model: &EngagementModel,
    n_ze: f64,
) -> Result<GuidanceCommand> {
    match spec.law {
        GuidanceLaw::Pg => {
            let u = pg_command(state, spec.lambda, model)?;
            Ok(finish(u, 0.0, false, spec.saturation_limit))
        }
        GuidanceLaw::RangeIol => range_iol_blended(state, spec, model, n_ze),
        GuidanceLaw::LosIol => los_iol_command(state, spec, model, n_ze, true),
        GuidanceLaw::LosIolUncorrected => los_iol_command(state, spec, model, n_ze, false),
    }
}
