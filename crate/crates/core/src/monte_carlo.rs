//! Seeded Monte Carlo campaigns over uniformly sampled initial conditions.
//!
//! Every trial draws one scenario from its own ChaCha stream, keyed by the
//! campaign seed and the trial index, and flies every configured guidance law
//! against that same scenario. Draws therefore do not depend on how trials
//! are scheduled across worker threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{EvasionDirection, EvasionSpec, VehicleState};
use crate::error::{Error, Result};
use crate::guidance::{GuidanceLaw, GuidanceSpec};
use crate::sim::{simulate_result, Scenario, TrialResult};

/// Closed interval `[min, max]`, written as a two-element array in configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Bounds {
    pub min: f64,
    pub max: f64,
}

impl Bounds {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub const fn fixed(value: f64) -> Self {
        Self::new(value, value)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.min <= v && v <= self.max
    }

    fn validate(&self, field: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(Error::invalid(
                field,
                format!("need finite min <= max, got [{}, {}]", self.min, self.max),
            ));
        }
        Ok(())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.min == self.max {
            self.min
        } else {
            rng.random_range(self.min..=self.max)
        }
    }
}

impl From<[f64; 2]> for Bounds {
    fn from([min, max]: [f64; 2]) -> Self {
        Self { min, max }
    }
}

impl From<Bounds> for [f64; 2] {
    fn from(b: Bounds) -> Self {
        [b.min, b.max]
    }
}

/// Initial-condition bounds for one vehicle. Angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleRanges {
    /// [m/s]
    pub speed: Bounds,
    /// [deg]
    pub flight_path_deg: Bounds,
    /// [m]
    pub altitude: Bounds,
    /// [m]
    pub downrange: Bounds,
}

impl VehicleRanges {
    fn validate(&self, name: &str) -> Result<()> {
        self.speed.validate(&format!("{name}.speed"))?;
        if !(self.speed.min > 0.0) {
            return Err(Error::invalid(format!("{name}.speed"), "must be > 0"));
        }
        self.flight_path_deg.validate(&format!("{name}.flight_path_deg"))?;
        self.altitude.validate(&format!("{name}.altitude"))?;
        self.downrange.validate(&format!("{name}.downrange"))
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> VehicleState {
        let speed = self.speed.sample(rng);
        let flight_path = self.flight_path_deg.sample(rng).to_radians();
        let altitude = self.altitude.sample(rng);
        let downrange = self.downrange.sample(rng);
        VehicleState {
            speed,
            flight_path,
            downrange,
            altitude,
        }
    }
}

/// Evasive pull with uniformly drawn onset and equiprobable direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvasionRanges {
    /// [s]
    pub start_time: Bounds,
    /// [m/s²]
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingRanges {
    pub pursuer: VehicleRanges,
    pub evader: VehicleRanges,
    #[serde(default)]
    pub evasion: Option<EvasionRanges>,
}

impl SamplingRanges {
    /// Pursuer launched from behind and below/above a receding evader.
    pub fn rear_aspect() -> Self {
        Self {
            pursuer: VehicleRanges {
                speed: Bounds::new(800.0, 1100.0),
                flight_path_deg: Bounds::new(-45.0, 45.0),
                altitude: Bounds::new(12_500.0, 20_000.0),
                downrange: Bounds::fixed(0.0),
            },
            evader: VehicleRanges {
                speed: Bounds::new(300.0, 600.0),
                flight_path_deg: Bounds::new(-45.0, 45.0),
                altitude: Bounds::new(10_000.0, 20_000.0),
                downrange: Bounds::new(5000.0, 10_000.0),
            },
            evasion: None,
        }
    }

    /// Pursuer heading back toward an approaching evader.
    pub fn front_aspect() -> Self {
        Self {
            pursuer: VehicleRanges {
                speed: Bounds::new(800.0, 1100.0),
                flight_path_deg: Bounds::new(120.0, 240.0),
                altitude: Bounds::new(10_000.0, 30_000.0),
                downrange: Bounds::new(15_000.0, 20_000.0),
            },
            evader: VehicleRanges {
                speed: Bounds::new(300.0, 600.0),
                flight_path_deg: Bounds::new(-60.0, 60.0),
                altitude: Bounds::new(12_500.0, 30_000.0),
                downrange: Bounds::fixed(0.0),
            },
            evasion: None,
        }
    }

    /// Head-on engagement at a common 10 km altitude against an evader
    /// pulling `pull` m/s² up or down from a random time in [1, 8] s.
    pub fn front_aspect_evasive(pull: f64) -> Self {
        Self {
            pursuer: VehicleRanges {
                speed: Bounds::new(800.0, 1100.0),
                flight_path_deg: Bounds::new(157.5, 202.5),
                altitude: Bounds::fixed(10_000.0),
                downrange: Bounds::fixed(10_000.0),
            },
            evader: VehicleRanges {
                speed: Bounds::new(300.0, 600.0),
                flight_path_deg: Bounds::new(-22.5, 22.5),
                altitude: Bounds::fixed(10_000.0),
                downrange: Bounds::fixed(0.0),
            },
            evasion: Some(EvasionRanges {
                start_time: Bounds::new(1.0, 8.0),
                magnitude: pull,
            }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pursuer.validate("campaign.pursuer")?;
        self.evader.validate("campaign.evader")?;
        if let Some(e) = &self.evasion {
            e.start_time.validate("campaign.evasion.start_time")?;
            if !(e.start_time.min >= 0.0) {
                return Err(Error::invalid("campaign.evasion.start_time", "must be >= 0"));
            }
            if !(e.magnitude >= 0.0 && e.magnitude.is_finite()) {
                return Err(Error::invalid("campaign.evasion.magnitude", "must be >= 0"));
            }
        }
        Ok(())
    }
}

/// Statistics over which trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatsInclusion {
    /// Metric statistics over successful trials only.
    #[default]
    SuccessesOnly,
    /// Metric statistics over every trial that produced finite metrics.
    AllTrials,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub n_trials: usize,
    pub seed: u64,
    pub ranges: SamplingRanges,
    pub laws: Vec<GuidanceSpec>,
    /// Supplies vehicle parameters, step, timeout and success radius; its
    /// initial conditions and evasion are replaced by sampled values.
    pub template: Scenario,
    pub inclusion: StatsInclusion,
}

impl CampaignConfig {
    /// PG, range-IOL and LOS-IOL with default gains on `ranges`.
    pub fn standard(n_trials: usize, seed: u64, ranges: SamplingRanges) -> Self {
        let template = Scenario::nominal(GuidanceLaw::Pg);
        Self {
            n_trials,
            seed,
            ranges,
            laws: [GuidanceLaw::LosIol, GuidanceLaw::RangeIol, GuidanceLaw::Pg]
                .into_iter()
                .map(|law| template.guidance.with_law(law))
                .collect(),
            template,
            inclusion: StatsInclusion::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::invalid("campaign.n_trials", "must be > 0"));
        }
        if self.laws.is_empty() {
            return Err(Error::invalid("campaign.laws", "must not be empty"));
        }
        for law in &self.laws {
            law.validate()?;
        }
        self.ranges.validate()
    }
}

/// Per-trial random stream: `seed` selects the key, the trial index the
/// stream, so draws never depend on scheduling.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Draws one scenario from `ranges`, keeping everything else from `template`.
pub fn sample_scenario<R: Rng>(ranges: &SamplingRanges, template: &Scenario, rng: &mut R) -> Scenario {
    let pursuer = ranges.pursuer.sample(rng);
    let evader = ranges.evader.sample(rng);
    let evasion = ranges.evasion.map(|e| {
        let start_time = e.start_time.sample(rng);
        let direction = if rng.random_bool(0.5) {
            EvasionDirection::Up
        } else {
            EvasionDirection::Down
        };
        EvasionSpec {
            start_time,
            direction,
            magnitude: e.magnitude,
        }
    });
    Scenario {
        pursuer,
        evader,
        evasion,
        ..*template
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    /// Position of the law in [`CampaignConfig::laws`].
    pub law_index: usize,
    pub scenario: Scenario,
    pub result: TrialResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResults {
    pub laws: Vec<GuidanceSpec>,
    /// Ordered by `(trial, law_index)`.
    pub records: Vec<TrialRecord>,
}

impl CampaignResults {
    pub fn results_for(&self, law_index: usize) -> Vec<TrialResult> {
        self.records
            .iter()
            .filter(|r| r.law_index == law_index)
            .map(|r| r.result)
            .collect()
    }

    pub fn stats(&self, inclusion: StatsInclusion) -> Result<Vec<CampaignStats>> {
        (0..self.laws.len())
            .map(|i| aggregate(&self.results_for(i), inclusion))
            .collect()
    }
}

fn run_trial(config: &CampaignConfig, trial: usize) -> Vec<TrialRecord> {
    let mut rng = trial_rng(config.seed, trial);
    let base = sample_scenario(&config.ranges, &config.template, &mut rng);
    config
        .laws
        .iter()
        .enumerate()
        .map(|(law_index, spec)| {
            let scenario = Scenario {
                guidance: *spec,
                ..base
            };
            let result = simulate_result(&scenario).unwrap_or_else(|_| TrialResult::errored());
            TrialRecord {
                trial,
                law_index,
                scenario,
                result,
            }
        })
        .collect()
}

/// Runs every trial on `workers` threads (all cores when `None`).
pub fn run_campaign(config: &CampaignConfig, workers: Option<usize>) -> Result<CampaignResults> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::invalid("workers", "must be > 0"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    let records = pool.install(|| {
        (0..config.n_trials)
            .into_par_iter()
            .flat_map_iter(|trial| run_trial(config, trial))
            .collect()
    });
    Ok(CampaignResults {
        laws: config.laws.clone(),
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub average: f64,
    pub median: f64,
    /// Population variance.
    pub variance: f64,
    pub minimum: f64,
    pub maximum: f64,
}

impl MetricStats {
    /// `None` for an empty sample.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let average = sorted.iter().sum::<f64>() / n as f64;
        let variance = sorted.iter().map(|v| (v - average).powi(2)).sum::<f64>() / n as f64;
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        Some(Self {
            average,
            median,
            variance,
            minimum: sorted[0],
            maximum: sorted[n - 1],
        })
    }
}

/// Aggregate outcome of one law over a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampaignStats {
    pub trials: usize,
    pub failures: usize,
    pub percent_failure: f64,
    /// `None` when no trial qualified for inclusion.
    pub intercept_time: Option<MetricStats>,
    pub miss_distance: Option<MetricStats>,
    pub closing_velocity: Option<MetricStats>,
}

pub fn aggregate(results: &[TrialResult], inclusion: StatsInclusion) -> Result<CampaignStats> {
    if results.is_empty() {
        return Err(Error::invalid("results", "cannot aggregate an empty result set"));
    }
    let failures = results.iter().filter(|r| !r.success).count();
    let included: Vec<&TrialResult> = results
        .iter()
        .filter(|r| match inclusion {
            StatsInclusion::SuccessesOnly => r.success,
            StatsInclusion::AllTrials => {
                r.intercept_time.is_finite()
                    && r.miss_distance.is_finite()
                    && r.closing_velocity.is_finite()
            }
        })
        .collect();
    let metric = |f: fn(&TrialResult) -> f64| {
        let values: Vec<f64> = included.iter().map(|r| f(r)).collect();
        MetricStats::from_values(&values)
    };
    Ok(CampaignStats {
        trials: results.len(),
        failures,
        percent_failure: 100.0 * failures as f64 / results.len() as f64,
        intercept_time: metric(|r| r.intercept_time),
        miss_distance: metric(|r| r.miss_distance),
        closing_velocity: metric(|r| r.closing_velocity),
    })
}
