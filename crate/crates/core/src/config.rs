//! TOML run configuration.
//!
//! Angles are given in degrees and converted to radians here. Every section
//! except the top-level `mode` key is optional and falls back to the nominal
//! engagement; unknown keys are rejected. See the README for the full schema.

use serde::Deserialize;
use std::path::PathBuf;

use crate::dynamics::{
    EngagementModel, EvasionDirection, EvasionSpec, PhysicsConstants, VehicleParams, VehicleState,
};
use crate::error::{Error, Result};
use crate::guidance::{GuidanceLaw, GuidanceSpec, MembershipParams};
use crate::monte_carlo::{CampaignConfig, EvasionRanges, SamplingRanges, StatsInclusion, VehicleRanges};
use crate::sim::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Single,
    Campaign,
    Sweep,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Mode::Single),
            "campaign" => Ok(Mode::Campaign),
            "sweep" => Ok(Mode::Sweep),
            _ => Err(Error::invalid("mode", format!("unknown mode {s:?}"))),
        }
    }
}

/// Guidance gain varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    KR,
    KPsidot,
    Lambda,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::KR => "k_r",
            SweepParameter::KPsidot => "k_psidot",
            SweepParameter::Lambda => "lambda",
        }
    }

    pub fn apply(self, spec: &mut GuidanceSpec, value: f64) {
        match self {
            SweepParameter::KR => spec.k_r = value,
            SweepParameter::KPsidot => spec.k_psidot = value,
            SweepParameter::Lambda => spec.lambda = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// Also fly PG on the same scenario for comparison.
    pub include_pg: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub scenario: Scenario,
    pub campaign: Option<CampaignConfig>,
    pub sweep: Option<SweepConfig>,
    pub output_dir: PathBuf,
    pub emit_trajectory: bool,
    /// Campaign mode: number of leading trials whose trajectories are written.
    pub trajectory_samples: usize,
    pub workers: Option<usize>,
}

pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Mode,
    output_dir: Option<PathBuf>,
    emit_trajectory: Option<bool>,
    physics: Option<RawPhysics>,
    pursuer: Option<RawVehicle>,
    evader: Option<RawVehicle>,
    evasion: Option<RawEvasion>,
    guidance: Option<RawGuidance>,
    simulation: Option<RawSimulation>,
    sweep: Option<RawSweep>,
    campaign: Option<RawCampaign>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhysics {
    g: Option<f64>,
    rho0: Option<f64>,
    scale_height: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVehicle {
    speed: Option<f64>,
    flight_path_deg: Option<f64>,
    altitude: Option<f64>,
    downrange: Option<f64>,
    thrust: Option<f64>,
    mass: Option<f64>,
    drag_coefficient: Option<f64>,
    frontal_area: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvasion {
    start_time: f64,
    direction: EvasionDirection,
    magnitude_g: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGuidance {
    law: Option<GuidanceLaw>,
    lambda: Option<f64>,
    k_r: Option<f64>,
    k_psidot: Option<f64>,
    dead_band: Option<f64>,
    ramp_end: Option<f64>,
    /// Saturation limit in g; `0` or `saturate = false` disables it.
    saturation_g: Option<f64>,
    saturate: Option<bool>,
    beta_floor: Option<f64>,
    evader_feedforward: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    dt: Option<f64>,
    t_max: Option<f64>,
    success_radius: Option<f64>,
    divergence_factor: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    parameter: SweepParameter,
    values: Vec<f64>,
    include_pg: Option<bool>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Preset {
    RearAspect,
    FrontAspect,
    FrontAspectEvasive,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCampaign {
    n_trials: Option<usize>,
    seed: Option<u64>,
    preset: Option<Preset>,
    laws: Option<Vec<GuidanceLaw>>,
    workers: Option<usize>,
    stats: Option<StatsInclusion>,
    trajectory_samples: Option<usize>,
    pursuer: Option<VehicleRanges>,
    evader: Option<VehicleRanges>,
    evasion: Option<RawEvasionRanges>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvasionRanges {
    start_time: crate::monte_carlo::Bounds,
    magnitude_g: Option<f64>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

fn vehicle(raw: Option<RawVehicle>, state: VehicleState, params: VehicleParams) -> (VehicleState, VehicleParams) {
    let Some(r) = raw else {
        return (state, params);
    };
    (
        VehicleState {
            speed: r.speed.unwrap_or(state.speed),
            flight_path: r
                .flight_path_deg
                .map_or(state.flight_path, f64::to_radians),
            altitude: r.altitude.unwrap_or(state.altitude),
            downrange: r.downrange.unwrap_or(state.downrange),
        },
        VehicleParams {
            thrust: r.thrust.unwrap_or(params.thrust),
            mass: r.mass.unwrap_or(params.mass),
            drag_coefficient: r.drag_coefficient.unwrap_or(params.drag_coefficient),
            frontal_area: r.frontal_area.unwrap_or(params.frontal_area),
        },
    )
}

fn guidance(raw: Option<RawGuidance>, g: f64) -> Result<GuidanceSpec> {
    let mut spec = GuidanceSpec::new(GuidanceLaw::LosIol);
    spec.saturation_limit = Some(crate::guidance::DEFAULT_SATURATION_G * g);
    let Some(r) = raw else {
        return Ok(spec);
    };
    spec.law = r.law.unwrap_or(spec.law);
    spec.lambda = r.lambda.unwrap_or(spec.lambda);
    spec.k_r = r.k_r.unwrap_or(spec.k_r);
    spec.k_psidot = r.k_psidot.unwrap_or(spec.k_psidot);
    spec.beta_floor = r.beta_floor.unwrap_or(spec.beta_floor);
    spec.evader_feedforward = r.evader_feedforward.unwrap_or(spec.evader_feedforward);
    spec.membership = MembershipParams {
        dead_band: r.dead_band.unwrap_or(spec.membership.dead_band),
        ramp_end: r.ramp_end.unwrap_or(spec.membership.ramp_end),
    };
    if let Some(limit_g) = r.saturation_g {
        if !(limit_g > 0.0) {
            return Err(Error::invalid("guidance.saturation_g", "must be > 0"));
        }
        spec.saturation_limit = Some(limit_g * g);
    }
    if r.saturate == Some(false) {
        spec.saturation_limit = None;
    }
    Ok(spec)
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    if text.trim().is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "empty configuration".into(),
        });
    }
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;

    let physics = PhysicsConstants::default();
    let consts = match raw.physics {
        Some(p) => PhysicsConstants {
            g: p.g.unwrap_or(physics.g),
            rho0: p.rho0.unwrap_or(physics.rho0),
            scale_height: p.scale_height.unwrap_or(physics.scale_height),
        },
        None => physics,
    };
    consts.validate()?;

    let nominal = Scenario::nominal(GuidanceLaw::LosIol);
    let (pursuer, pursuer_params) = vehicle(raw.pursuer, nominal.pursuer, nominal.model.pursuer);
    let (evader, evader_params) = vehicle(raw.evader, nominal.evader, nominal.model.evader);
    let evasion = raw.evasion.map(|e| EvasionSpec {
        start_time: e.start_time,
        direction: e.direction,
        magnitude: e.magnitude_g.unwrap_or(10.0) * consts.g,
    });
    let sim = raw.simulation;
    let pick = |f: fn(&RawSimulation) -> Option<f64>, default: f64| {
        sim.as_ref().and_then(f).unwrap_or(default)
    };
    let scenario = Scenario {
        pursuer,
        evader,
        model: EngagementModel {
            pursuer: pursuer_params,
            evader: evader_params,
            consts,
        },
        guidance: guidance(raw.guidance, consts.g)?,
        evasion,
        dt: pick(|s| s.dt, nominal.dt),
        t_max: pick(|s| s.t_max, nominal.t_max),
        success_radius: pick(|s| s.success_radius, nominal.success_radius),
        divergence_factor: pick(|s| s.divergence_factor, nominal.divergence_factor),
    };

    let mut workers = None;
    let mut trajectory_samples = 0;
    let campaign = match raw.campaign {
        Some(c) => {
            let mut ranges = match c.preset {
                Some(Preset::RearAspect) | None => SamplingRanges::rear_aspect(),
                Some(Preset::FrontAspect) => SamplingRanges::front_aspect(),
                Some(Preset::FrontAspectEvasive) => SamplingRanges::front_aspect_evasive(10.0 * consts.g),
            };
            if let Some(p) = c.pursuer {
                ranges.pursuer = p;
            }
            if let Some(e) = c.evader {
                ranges.evader = e;
            }
            if let Some(e) = c.evasion {
                ranges.evasion = Some(EvasionRanges {
                    start_time: e.start_time,
                    magnitude: e.magnitude_g.unwrap_or(10.0) * consts.g,
                });
            }
            let laws = c
                .laws
                .unwrap_or_else(|| vec![GuidanceLaw::LosIol, GuidanceLaw::RangeIol, GuidanceLaw::Pg]);
            workers = c.workers;
            trajectory_samples = c.trajectory_samples.unwrap_or(0);
            Some(CampaignConfig {
                n_trials: c.n_trials.unwrap_or(1000),
                seed: c.seed.unwrap_or(0),
                ranges,
                laws: laws
                    .into_iter()
                    .map(|law| scenario.guidance.with_law(law))
                    .collect(),
                template: Scenario {
                    evasion: None,
                    ..scenario
                },
                inclusion: c.stats.unwrap_or_default(),
            })
        }
        None => None,
    };

    let sweep = raw.sweep.map(|s| SweepConfig {
        parameter: s.parameter,
        values: s.values,
        include_pg: s.include_pg.unwrap_or(true),
    });

    let config = RunConfig {
        mode: raw.mode,
        scenario,
        campaign,
        sweep,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        emit_trajectory: raw.emit_trajectory.unwrap_or(true),
        trajectory_samples,
        workers,
    };
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::Single => self.scenario.validate()?,
            Mode::Sweep => {
                self.scenario.validate()?;
                let sweep = self
                    .sweep
                    .as_ref()
                    .ok_or_else(|| Error::invalid("sweep", "sweep mode requires a [sweep] section"))?;
                if sweep.values.is_empty() {
                    return Err(Error::invalid("sweep.values", "must not be empty"));
                }
                for &v in &sweep.values {
                    let mut spec = self.scenario.guidance;
                    sweep.parameter.apply(&mut spec, v);
                    spec.validate().map_err(|_| {
                        Error::invalid(
                            "sweep.values",
                            format!("{} = {v} is not a valid gain", sweep.parameter.name()),
                        )
                    })?;
                }
            }
            Mode::Campaign => {
                let campaign = self.campaign.as_ref().ok_or_else(|| {
                    Error::invalid("campaign", "campaign mode requires a [campaign] section")
                })?;
                campaign.validate()?;
                let t = &campaign.template;
                if !(t.dt > 0.0 && t.t_max > t.dt && t.success_radius > 0.0) {
                    return Err(Error::invalid("simulation", "need dt > 0, t_max > dt, success_radius > 0"));
                }
                t.model.validate()?;
            }
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("campaign.workers", "must be > 0"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_single_config_uses_defaults() {
        let c = parse_config("mode = \"single\"\n").unwrap();
        assert_eq!(c.mode, Mode::Single);
        assert_eq!(c.scenario.dt, 0.001);
        assert_eq!(c.scenario.t_max, 50.0);
        assert_eq!(c.scenario.success_radius, 10.0);
        assert_eq!(c.scenario.pursuer.speed, 800.0);
        assert!((c.scenario.evader.flight_path - 10f64.to_radians()).abs() < 1e-15);
        assert!((c.scenario.guidance.saturation_limit.unwrap() - 392.4).abs() < 1e-12);
        assert!(c.emit_trajectory);
    }

    #[test]
    fn nominal_values_written_out() {
        let text = r#"
mode = "single"

[pursuer]
speed = 800.0
flight_path_deg = 1.0
altitude = 5000.0
downrange = 0.0
thrust = 15000.0
mass = 204.0
frontal_area = 2.3

[evader]
speed = 584.0
flight_path_deg = 10.0
altitude = 10000.0
downrange = 5000.0
thrust = 50000.0
mass = 10000.0
drag_coefficient = 0.025
frontal_area = 28.0

[guidance]
law = "range-iol"
k_r = 0.1
"#;
        let c = parse_config(text).unwrap();
        let nominal = Scenario::nominal(GuidanceLaw::RangeIol);
        assert_eq!(c.scenario.pursuer, nominal.pursuer);
        assert_eq!(c.scenario.evader, nominal.evader);
        assert_eq!(c.scenario.model, nominal.model);
        assert_eq!(c.scenario.guidance.law, GuidanceLaw::RangeIol);
        assert_eq!(c.scenario.guidance.k_r, 0.1);
    }

    #[test]
    fn negative_mass_names_field() {
        let err = parse_config("mode = \"single\"\n[pursuer]\nmass = -5.0\n").unwrap_err();
        match err {
            Error::Invalid { field, .. } => assert_eq!(field, "pursuer.mass"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse_config(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_config("  \n# only a comment\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse_config("mode = \"single\"\n\n[guidance]\nkr = 0.1\n").unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 4);
                assert!(message.contains("kr"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sweep_requires_values() {
        let err = parse_config("mode = \"sweep\"\n[sweep]\nparameter = \"k_r\"\nvalues = []\n").unwrap_err();
        assert!(matches!(err, Error::Invalid { ref field, .. } if field == "sweep.values"));
        assert!(parse_config("mode = \"sweep\"\n").is_err());
        let c = parse_config("mode = \"sweep\"\n[sweep]\nparameter = \"k_psidot\"\nvalues = [1.0, 2.0]\n").unwrap();
        assert_eq!(c.sweep.unwrap().parameter, SweepParameter::KPsidot);
    }

    #[test]
    fn campaign_preset_and_overrides() {
        let text = r#"
mode = "campaign"
[campaign]
n_trials = 20
seed = 5
preset = "front-aspect-evasive"
laws = ["pg", "los-iol"]
workers = 2
[campaign.evader]
speed = [300.0, 350.0]
flight_path_deg = [0.0, 0.0]
altitude = [10000.0, 10000.0]
downrange = [0.0, 0.0]
"#;
        let c = parse_config(text).unwrap();
        let camp = c.campaign.unwrap();
        assert_eq!(camp.n_trials, 20);
        assert_eq!(camp.laws.len(), 2);
        assert_eq!(camp.laws[0].law, GuidanceLaw::Pg);
        assert_eq!(camp.ranges.evader.speed.max, 350.0);
        assert!((camp.ranges.evasion.unwrap().magnitude - 98.1).abs() < 1e-12);
        assert_eq!(c.workers, Some(2));
    }

    #[test]
    fn saturation_can_be_disabled() {
        let c = parse_config("mode = \"single\"\n[guidance]\nsaturate = false\n").unwrap();
        assert_eq!(c.scenario.guidance.saturation_limit, None);
        let c = parse_config("mode = \"single\"\n[guidance]\nsaturation_g = 20.0\n").unwrap();
        assert!((c.scenario.guidance.saturation_limit.unwrap() - 196.2).abs() < 1e-12);
    }
}
