//! Fixed-step engagement simulation with guidance in the loop.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::dynamics::{evader_normal_accel, EngagementModel, EngagementState, EvasionSpec, VehicleState};
use crate::error::{Error, Result};
use crate::guidance::{self, GuidanceCommand, GuidanceLaw, GuidanceSpec};

/// Default multiple of the initial range beyond which a run is declared
/// diverged.
pub const DEFAULT_DIVERGENCE_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Initial pursuer state; angles in radians.
    pub pursuer: VehicleState,
    pub evader: VehicleState,
    pub model: EngagementModel,
    pub guidance: GuidanceSpec,
    pub evasion: Option<EvasionSpec>,
    /// Integration step [s].
    pub dt: f64,
    /// [s]
    pub t_max: f64,
    /// Miss distances below this count as interceptions [m].
    pub success_radius: f64,
    /// Runs stop as diverged once `R` exceeds this multiple of the initial
    /// range.
    pub divergence_factor: f64,
}

impl Scenario {
    /// Non-maneuvering evader at 10 km altitude and 5 km downrange, climbing
    /// at 10° and 584 m/s; pursuer at 5 km altitude, 800 m/s, 1° path angle.
    pub fn nominal(law: GuidanceLaw) -> Self {
        Self {
            pursuer: VehicleState {
                speed: 800.0,
                flight_path: 1f64.to_radians(),
                downrange: 0.0,
                altitude: 5000.0,
            },
            evader: VehicleState {
                speed: 584.0,
                flight_path: 10f64.to_radians(),
                downrange: 5000.0,
                altitude: 10_000.0,
            },
            model: EngagementModel::default(),
            guidance: GuidanceSpec::new(law),
            evasion: None,
            dt: 0.001,
            t_max: 50.0,
            success_radius: 10.0,
            divergence_factor: DEFAULT_DIVERGENCE_FACTOR,
        }
    }

    pub fn initial_state(&self) -> EngagementState {
        EngagementState::from_vehicles(0.0, self.pursuer, self.evader)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("scenario.dt", "must be > 0"));
        }
        if !(self.t_max > self.dt && self.t_max.is_finite()) {
            return Err(Error::invalid("scenario.t_max", "must exceed dt"));
        }
        if !(self.success_radius > 0.0 && self.success_radius.is_finite()) {
            return Err(Error::invalid("scenario.success_radius", "must be > 0"));
        }
        if !(self.divergence_factor > 1.0) {
            return Err(Error::invalid("scenario.divergence_factor", "must be > 1"));
        }
        self.model.validate()?;
        self.guidance.validate()?;
        if let Some(e) = &self.evasion {
            e.validate()?;
        }
        let s = self.initial_state();
        s.validate()?;
        if !(s.range > self.success_radius) {
            return Err(Error::invalid(
                "scenario",
                format!(
                    "initial range {} m must exceed the success radius {} m",
                    s.range, self.success_radius
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Termination {
    Intercepted,
    Miss,
    Diverged,
    Timeout,
    /// A domain error aborted the run.
    Error,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Intercepted => "intercepted",
            Termination::Miss => "miss",
            Termination::Diverged => "diverged",
            Termination::Timeout => "timeout",
            Termination::Error => "error",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Termination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Termination::Intercepted,
            Termination::Miss,
            Termination::Diverged,
            Termination::Timeout,
            Termination::Error,
        ]
        .into_iter()
        .find(|t| t.name() == s)
        .ok_or_else(|| Error::invalid("termination", format!("unknown value {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    /// Time of closest approach [s].
    pub intercept_time: f64,
    /// [m]
    pub miss_distance: f64,
    /// `-Ṙ` at closest approach [m/s].
    pub closing_velocity: f64,
    pub success: bool,
    pub termination: Termination,
}

impl TrialResult {
    pub fn errored() -> Self {
        Self {
            intercept_time: f64::NAN,
            miss_distance: f64::NAN,
            closing_velocity: f64::NAN,
            success: false,
            termination: Termination::Error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub state: EngagementState,
    pub command: GuidanceCommand,
}

/// Time-ordered samples spaced one integration step apart.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Classical fourth-order Runge–Kutta step with both normal accelerations
/// held constant over the step.
pub fn rk4_step(
    model: &EngagementModel,
    state: &EngagementState,
    u: f64,
    n_ze: f64,
    dt: f64,
) -> Result<EngagementState> {
    let k1 = model.derivatives(state, u, n_ze)?;
    let k2 = model.derivatives(&state.advanced(&k1, 0.5 * dt), u, n_ze)?;
    let k3 = model.derivatives(&state.advanced(&k2, 0.5 * dt), u, n_ze)?;
    let k4 = model.derivatives(&state.advanced(&k3, dt), u, n_ze)?;
    let rates = crate::dynamics::StateRates::weighted(&[
        (1.0 / 6.0, &k1),
        (2.0 / 6.0, &k2),
        (2.0 / 6.0, &k3),
        (1.0 / 6.0, &k4),
    ]);
    Ok(state.advanced(&rates, dt))
}

/// Range and range rate at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSample {
    pub t: f64,
    pub range: f64,
    pub range_rate: f64,
}

impl RangeSample {
    fn of(state: &EngagementState) -> Self {
        Self {
            t: state.t,
            range: state.cartesian_range(),
            range_rate: state.cartesian_range_rate(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestApproach {
    pub time: f64,
    pub miss: f64,
    pub closing_velocity: f64,
}

/// Refines a discrete range minimum bracketed by three samples.
///
/// A parabola is fit through the squared ranges, which is exact when the
/// relative velocity is constant across the bracket. If its curvature is not
/// positive the middle sample is returned as is. Closing velocity is `-Ṙ` at
/// the middle sample.
pub fn closest_approach(bracket: &[RangeSample; 3]) -> ClosestApproach {
    let [a, b, c] = bracket;
    let middle = ClosestApproach {
        time: b.t,
        miss: b.range,
        closing_velocity: -b.range_rate,
    };
    let (y0, y1, y2) = (a.range * a.range, b.range * b.range, c.range * c.range);
    let d01 = (y1 - y0) / (b.t - a.t);
    let d12 = (y2 - y1) / (c.t - b.t);
    let curvature = (d12 - d01) / (c.t - a.t);
    if !(curvature > 0.0) {
        return middle;
    }
    // Newton form: y(t) = y0 + d01 (t - t0) + curvature (t - t0)(t - t1).
    let t_star = (0.5 * (a.t + b.t - d01 / curvature)).clamp(a.t, c.t);
    let y_star = y0 + d01 * (t_star - a.t) + curvature * (t_star - a.t) * (t_star - b.t);
    let miss = y_star.max(0.0).sqrt();
    if miss > b.range {
        return middle;
    }
    ClosestApproach {
        time: t_star,
        miss,
        closing_velocity: -b.range_rate,
    }
}

/// Closest approach within one step assuming constant relative velocity.
fn in_step_approach(state: &EngagementState, dt: f64) -> ClosestApproach {
    let [rx, ry] = state.relative_position();
    let [vx, vy] = state.relative_velocity();
    let v2 = vx * vx + vy * vy;
    let tau = if v2 > 0.0 {
        (-(rx * vx + ry * vy) / v2).clamp(0.0, dt)
    } else {
        0.0
    };
    ClosestApproach {
        time: state.t + tau,
        miss: (rx + vx * tau).hypot(ry + vy * tau),
        closing_velocity: -state.cartesian_range_rate(),
    }
}

fn finish(approach: ClosestApproach, termination: Termination, radius: f64) -> TrialResult {
    let success = approach.miss < radius;
    let termination = match termination {
        Termination::Intercepted | Termination::Miss if success => Termination::Intercepted,
        Termination::Intercepted => Termination::Miss,
        other => other,
    };
    TrialResult {
        intercept_time: approach.time,
        miss_distance: approach.miss,
        closing_velocity: approach.closing_velocity,
        success,
        termination,
    }
}

/// Runs one engagement and records every step.
pub fn simulate(scenario: &Scenario) -> Result<(Trajectory, TrialResult)> {
    let mut trajectory = Trajectory::default();
    let result = run(scenario, Some(&mut trajectory))?;
    Ok((trajectory, result))
}

/// Runs one engagement without recording the trajectory.
pub fn simulate_result(scenario: &Scenario) -> Result<TrialResult> {
    run(scenario, None)
}

fn run(scenario: &Scenario, mut record: Option<&mut Trajectory>) -> Result<TrialResult> {
    scenario.validate()?;
    let model = &scenario.model;
    let dt = scenario.dt;
    let radius = scenario.success_radius;
    let max_steps = (scenario.t_max / dt).round() as u64;

    let mut state = scenario.initial_state();
    let divergence_range = scenario.divergence_factor * state.range;

    let mut previous: Option<RangeSample> = None;
    let mut current = RangeSample::of(&state);
    let mut best = ClosestApproach {
        time: current.t,
        miss: current.range,
        closing_velocity: -current.range_rate,
    };

    for step in 0..=max_steps {
        let n_ze = evader_normal_accel(state.t, scenario.evasion.as_ref());
        let command = guidance::command(&state, &scenario.guidance, model, n_ze)?;
        if let Some(traj) = record.as_deref_mut() {
            traj.samples.push(TrajectorySample { state, command });
        }
        if step == max_steps {
            break;
        }

        let mut next = match rk4_step(model, &state, command.u, n_ze, dt) {
            Ok(next) => next,
            // The polar range crossed zero inside the step.
            Err(Error::NonPositiveRange(_)) => {
                return Ok(finish(in_step_approach(&state, dt), Termination::Intercepted, radius));
            }
            Err(e) => return Err(e),
        };
        next.t = (step + 1) as f64 * dt;

        let sample = RangeSample::of(&next);
        if let Some(prev) = previous {
            if current.range < prev.range && sample.range > current.range {
                let approach = closest_approach(&[prev, current, sample]);
                return Ok(finish(approach, Termination::Intercepted, radius));
            }
        }
        if sample.range < best.miss {
            best = ClosestApproach {
                time: sample.t,
                miss: sample.range,
                closing_velocity: -sample.range_rate,
            };
        }
        if next.range <= 0.0 {
            return Ok(finish(in_step_approach(&state, dt), Termination::Intercepted, radius));
        }
        if next.range > divergence_range {
            return Ok(finish(best, Termination::Diverged, radius));
        }

        previous = Some(current);
        current = sample;
        state = next;
    }
    Ok(finish(best, Termination::Timeout, radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{PhysicsConstants, VehicleParams};
    use std::f64::consts::FRAC_PI_2;

    fn sample(t: f64, p: [f64; 2], e: [f64; 2], vrel: [f64; 2]) -> RangeSample {
        let r = [e[0] - p[0], e[1] - p[1]];
        let range = r[0].hypot(r[1]);
        RangeSample {
            t,
            range,
            range_rate: (r[0] * vrel[0] + r[1] * vrel[1]) / range,
        }
    }

    #[test]
    fn closest_approach_straight_line() {
        // P moves +x at 1 m/s from the origin, E sits at (1, 0.5).
        let at = |t: f64| sample(t, [t, 0.0], [1.0, 0.5], [-1.0, 0.0]);
        let ca = closest_approach(&[at(0.93), at(0.98), at(1.03)]);
        assert!((ca.miss - 0.5).abs() < 1e-12);
        assert!((ca.time - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closest_approach_at_sample() {
        let at = |t: f64| sample(t, [t, 0.0], [1.0, 0.5], [-1.0, 0.0]);
        let ca = closest_approach(&[at(0.9), at(1.0), at(1.1)]);
        assert_eq!(ca.time, 1.0);
        assert!((ca.miss - 0.5).abs() < 1e-12);
    }

    #[test]
    fn closest_approach_flat_returns_middle() {
        let s = |t: f64, range: f64| RangeSample {
            t,
            range,
            range_rate: 0.0,
        };
        let ca = closest_approach(&[s(0.0, 4.0), s(1.0, 4.0), s(2.0, 4.0)]);
        assert_eq!((ca.time, ca.miss), (1.0, 4.0));
    }

    fn ballistic_model() -> EngagementModel {
        let zero = VehicleParams {
            thrust: 0.0,
            mass: 1.0,
            drag_coefficient: 0.0,
            frontal_area: 0.0,
        };
        EngagementModel {
            pursuer: zero,
            evader: zero,
            consts: PhysicsConstants::default(),
        }
    }

    #[test]
    fn rk4_vertical_climb_is_linear_in_time() {
        let m = ballistic_model();
        let up = VehicleState {
            speed: 500.0,
            flight_path: FRAC_PI_2,
            downrange: 0.0,
            altitude: 0.0,
        };
        let e = VehicleState {
            speed: 500.0,
            flight_path: FRAC_PI_2,
            downrange: 1000.0,
            altitude: 0.0,
        };
        let mut s = EngagementState::from_vehicles(0.0, up, e);
        // n_z = -g cos γ holds the flight path fixed; cos(π/2) ≈ 6e-17.
        let hold = -m.consts.g * FRAC_PI_2.cos();
        for _ in 0..1000 {
            s = rk4_step(&m, &s, hold, hold, 0.001).unwrap();
        }
        let expected = 500.0 - m.consts.g * 1.0;
        assert!((s.pursuer.speed - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn rk4_fixed_point() {
        // Level flight, equal speeds, u = -g: every rate except the
        // downrange rates vanishes.
        let m = ballistic_model();
        let p = VehicleState {
            speed: 100.0,
            flight_path: 0.0,
            downrange: 0.0,
            altitude: 0.0,
        };
        let e = VehicleState { downrange: 500.0, ..p };
        let s = EngagementState::from_vehicles(0.0, p, e);
        let hold = -m.consts.g;
        let next = rk4_step(&m, &s, hold, hold, 0.01).unwrap();
        assert_eq!(next.range, s.range);
        assert_eq!(next.los, s.los);
        assert_eq!(next.pursuer.speed, s.pursuer.speed);
        assert_eq!(next.pursuer.flight_path, s.pursuer.flight_path);
        assert_eq!(next.evader.flight_path, s.evader.flight_path);
        assert_eq!(next.pursuer.altitude, s.pursuer.altitude);
    }

    #[test]
    fn invalid_scenarios_rejected() {
        let mut s = Scenario::nominal(GuidanceLaw::Pg);
        s.dt = 0.0;
        assert!(simulate_result(&s).is_err());
        let mut s = Scenario::nominal(GuidanceLaw::Pg);
        s.t_max = 0.0005;
        assert!(simulate_result(&s).is_err());
        let mut s = Scenario::nominal(GuidanceLaw::Pg);
        s.success_radius = 1e5;
        assert!(simulate_result(&s).is_err());
        let mut s = Scenario::nominal(GuidanceLaw::Pg);
        s.model.pursuer.mass = -3.0;
        assert!(simulate_result(&s).is_err());
    }

    #[test]
    fn termination_names_round_trip() {
        for t in [
            Termination::Intercepted,
            Termination::Miss,
            Termination::Diverged,
            Termination::Timeout,
            Termination::Error,
        ] {
            assert_eq!(t.name().parse::<Termination>().unwrap(), t);
        }
    }
}
