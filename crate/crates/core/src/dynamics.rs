//! Planar point-mass equations of motion for a pursuer and an evader.
//!
//! The relative geometry is carried in polar form (range and line-of-sight
//! angle) alongside the Cartesian downrange/altitude of each vehicle, so the
//! guidance laws can read `R` and `psi` directly while positions remain
//! available for miss-distance computation and plotting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constant-thrust point-mass vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    /// [N]
    pub thrust: f64,
    /// [kg]
    pub mass: f64,
    pub drag_coefficient: f64,
    /// [m²]
    pub frontal_area: f64,
}

impl VehicleParams {
    /// 15 kN, 204 kg, 2.3 m² interceptor. The drag coefficient is not given
    /// for this vehicle; it defaults to the evader's value.
    pub fn default_pursuer() -> Self {
        Self {
            thrust: 15_000.0,
            mass: 204.0,
            drag_coefficient: 0.025,
            frontal_area: 2.3,
        }
    }

    /// 50 kN, 10 t, 28 m² target aircraft.
    pub fn default_evader() -> Self {
        Self {
            thrust: 50_000.0,
            mass: 10_000.0,
            drag_coefficient: 0.025,
            frontal_area: 28.0,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let check = |field: &str, ok: bool, reason: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name}.{field}"), reason))
            }
        };
        check("mass", self.mass > 0.0 && self.mass.is_finite(), "must be > 0")?;
        check("thrust", self.thrust >= 0.0 && self.thrust.is_finite(), "must be >= 0")?;
        check(
            "drag_coefficient",
            self.drag_coefficient >= 0.0 && self.drag_coefficient.is_finite(),
            "must be >= 0",
        )?;
        check(
            "frontal_area",
            self.frontal_area >= 0.0 && self.frontal_area.is_finite(),
            "must be >= 0",
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsConstants {
    /// Gravitational acceleration [m/s²], constant with altitude.
    pub g: f64,
    /// Sea-level air density [kg/m³].
    pub rho0: f64,
    /// Exponential atmosphere scale height [m].
    pub scale_height: f64,
}

impl Default for PhysicsConstants {
    fn default() -> Self {
        Self {
            g: 9.81,
            rho0: 1.225,
            scale_height: 8500.0,
        }
    }
}

impl PhysicsConstants {
    pub fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("g", self.g),
            ("rho0", self.rho0),
            ("scale_height", self.scale_height),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::invalid(format!("physics.{field}"), "must be > 0"));
            }
        }
        Ok(())
    }

    pub fn air_density(&self, altitude: f64) -> f64 {
        self.rho0 * (-altitude / self.scale_height).exp()
    }
}

/// Aerodynamic drag `½ ρ(h) C_d S V²` with an exponential atmosphere.
pub fn drag(speed: f64, altitude: f64, params: &VehicleParams, consts: &PhysicsConstants) -> f64 {
    0.5 * consts.air_density(altitude) * params.drag_coefficient * params.frontal_area * speed * speed
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvasionDirection {
    Up,
    Down,
}

/// Constant normal-acceleration pull by the evader, starting at `start_time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvasionSpec {
    pub start_time: f64,
    pub direction: EvasionDirection,
    /// [m/s²]
    pub magnitude: f64,
}

impl EvasionSpec {
    pub fn ten_g(start_time: f64, direction: EvasionDirection, consts: &PhysicsConstants) -> Self {
        Self {
            start_time,
            direction,
            magnitude: 10.0 * consts.g,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start_time >= 0.0 && self.start_time.is_finite()) {
            return Err(Error::invalid("evasion.start_time", "must be >= 0"));
        }
        if !(self.magnitude >= 0.0 && self.magnitude.is_finite()) {
            return Err(Error::invalid("evasion.magnitude", "must be >= 0"));
        }
        Ok(())
    }
}

/// Evader normal acceleration `n_z,E` at time `t`.
///
/// Gravity enters the flight-path equation separately, so a non-maneuvering
/// evader has `n_z,E = 0`. The pull is active on `[start_time, ∞)`; `Up` maps
/// to `+magnitude`.
pub fn evader_normal_accel(t: f64, evasion: Option<&EvasionSpec>) -> f64 {
    match evasion {
        Some(e) if t >= e.start_time => match e.direction {
            EvasionDirection::Up => e.magnitude,
            EvasionDirection::Down => -e.magnitude,
        },
        _ => 0.0,
    }
}

/// Kinematic state of one vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    /// [m/s]
    pub speed: f64,
    /// Flight-path angle above horizontal [rad].
    pub flight_path: f64,
    /// [m]
    pub downrange: f64,
    /// [m]
    pub altitude: f64,
}

impl VehicleState {
    pub fn velocity(&self) -> [f64; 2] {
        let (s, c) = self.flight_path.sin_cos();
        [self.speed * c, self.speed * s]
    }
}

/// Full engagement state: polar relative geometry plus both vehicles.
///
/// `los` is integrated continuously and is not wrapped, so it may leave
/// `(-π, π]` during an engagement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngagementState {
    pub t: f64,
    /// Range `R` [m].
    pub range: f64,
    /// Line-of-sight angle `psi` from pursuer to evader [rad].
    pub los: f64,
    pub pursuer: VehicleState,
    pub evader: VehicleState,
}

impl EngagementState {
    /// Builds a state whose polar fields agree with the Cartesian positions.
    pub fn from_vehicles(t: f64, pursuer: VehicleState, evader: VehicleState) -> Self {
        let mut state = Self {
            t,
            range: 0.0,
            los: 0.0,
            pursuer,
            evader,
        };
        let [dx, dy] = state.relative_position();
        state.range = dx.hypot(dy);
        state.los = dy.atan2(dx);
        state
    }

    /// `pos_E - pos_P`.
    pub fn relative_position(&self) -> [f64; 2] {
        [
            self.evader.downrange - self.pursuer.downrange,
            self.evader.altitude - self.pursuer.altitude,
        ]
    }

    /// `vel_E - vel_P`.
    pub fn relative_velocity(&self) -> [f64; 2] {
        let [ve_x, ve_y] = self.evader.velocity();
        let [vp_x, vp_y] = self.pursuer.velocity();
        [ve_x - vp_x, ve_y - vp_y]
    }

    /// Euclidean distance between the two position fields.
    pub fn cartesian_range(&self) -> f64 {
        let [dx, dy] = self.relative_position();
        dx.hypot(dy)
    }

    /// Range rate computed from positions and velocities.
    pub fn cartesian_range_rate(&self) -> f64 {
        let [dx, dy] = self.relative_position();
        let [vx, vy] = self.relative_velocity();
        (dx * vx + dy * vy) / dx.hypot(dy)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.range > 0.0) {
            return Err(Error::NonPositiveRange(self.range));
        }
        if !(self.pursuer.speed > 0.0) {
            return Err(Error::NonPositiveSpeed {
                vehicle: "pursuer",
                speed: self.pursuer.speed,
            });
        }
        if !(self.evader.speed > 0.0) {
            return Err(Error::NonPositiveSpeed {
                vehicle: "evader",
                speed: self.evader.speed,
            });
        }
        Ok(())
    }

    /// `self + h * rates`, with time advanced by `h`.
    pub fn advanced(&self, rates: &StateRates, h: f64) -> Self {
        let step = |v: &VehicleState, r: &VehicleRates| VehicleState {
            speed: v.speed + h * r.speed,
            flight_path: v.flight_path + h * r.flight_path,
            downrange: v.downrange + h * r.downrange,
            altitude: v.altitude + h * r.altitude,
        };
        Self {
            t: self.t + h,
            range: self.range + h * rates.range,
            los: self.los + h * rates.los,
            pursuer: step(&self.pursuer, &rates.pursuer),
            evader: step(&self.evader, &rates.evader),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VehicleRates {
    pub speed: f64,
    pub flight_path: f64,
    pub downrange: f64,
    pub altitude: f64,
}

/// Time derivative of every [`EngagementState`] field except `t`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateRates {
    pub range: f64,
    pub los: f64,
    pub pursuer: VehicleRates,
    pub evader: VehicleRates,
}

impl StateRates {
    /// Weighted sum `Σ wᵢ·kᵢ`, used by the Runge–Kutta combination.
    pub fn weighted(terms: &[(f64, &StateRates)]) -> Self {
        let mut out = StateRates::default();
        for &(w, k) in terms {
            out.range += w * k.range;
            out.los += w * k.los;
            for (o, r) in [(&mut out.pursuer, &k.pursuer), (&mut out.evader, &k.evader)] {
                o.speed += w * r.speed;
                o.flight_path += w * r.flight_path;
                o.downrange += w * r.downrange;
                o.altitude += w * r.altitude;
            }
        }
        out
    }
}

/// Vehicle parameters and constants shared by every step of an engagement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngagementModel {
    pub pursuer: VehicleParams,
    pub evader: VehicleParams,
    pub consts: PhysicsConstants,
}

impl Default for EngagementModel {
    fn default() -> Self {
        Self {
            pursuer: VehicleParams::default_pursuer(),
            evader: VehicleParams::default_evader(),
            consts: PhysicsConstants::default(),
        }
    }
}

impl EngagementModel {
    pub fn validate(&self) -> Result<()> {
        self.pursuer.validate("pursuer")?;
        self.evader.validate("evader")?;
        self.consts.validate()
    }

    /// Pursuer drag at the current state.
    pub fn pursuer_drag(&self, state: &EngagementState) -> f64 {
        drag(
            state.pursuer.speed,
            state.pursuer.altitude,
            &self.pursuer,
            &self.consts,
        )
    }

    /// State derivative for pursuer normal acceleration `u` and evader
    /// normal acceleration `n_ze`.
    pub fn derivatives(&self, state: &EngagementState, u: f64, n_ze: f64) -> Result<StateRates> {
        state.validate()?;
        let g = self.consts.g;
        let p = &state.pursuer;
        let e = &state.evader;

        let d_p = drag(p.speed, p.altitude, &self.pursuer, &self.consts);
        let d_e = drag(e.speed, e.altitude, &self.evader, &self.consts);

        let (sin_gp, cos_gp) = p.flight_path.sin_cos();
        let (sin_ge, cos_ge) = e.flight_path.sin_cos();
        let (sin_p, cos_p) = (state.los - p.flight_path).sin_cos();
        let (sin_e, cos_e) = (state.los - e.flight_path).sin_cos();

        Ok(StateRates {
            range: e.speed * cos_e - p.speed * cos_p,
            los: (p.speed * sin_p - e.speed * sin_e) / state.range,
            pursuer: VehicleRates {
                speed: (self.pursuer.thrust - d_p) / self.pursuer.mass - g * sin_gp,
                flight_path: -(u + g * cos_gp) / p.speed,
                downrange: p.speed * cos_gp,
                altitude: p.speed * sin_gp,
            },
            evader: VehicleRates {
                speed: (self.evader.thrust - d_e) / self.evader.mass - g * sin_ge,
                flight_path: -(n_ze + g * cos_ge) / e.speed,
                downrange: e.speed * cos_ge,
                altitude: e.speed * sin_ge,
            },
        })
    }
}

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}
