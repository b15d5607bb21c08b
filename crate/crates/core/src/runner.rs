//! Executes a [`RunConfig`] and writes its output files.

use std::path::{Path, PathBuf};

use crate::config::{Mode, RunConfig};
use crate::error::{Error, Result};
use crate::guidance::GuidanceLaw;
use crate::monte_carlo::{run_campaign, CampaignResults, CampaignStats};
use crate::output::{
    format_stats_table, write_results_csv, write_stats_csv, write_text, write_trajectory_csv, ResultRow,
};
use crate::sim::{simulate, Scenario, TrialResult};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const RESULTS_FILE: &str = "results.csv";
pub const STATS_CSV_FILE: &str = "stats.csv";
pub const STATS_TEXT_FILE: &str = "stats.txt";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    /// Human-readable report lines.
    pub report: Vec<String>,
}

impl RunSummary {
    fn file(&mut self, path: PathBuf) -> PathBuf {
        self.files.push(path.clone());
        path
    }
}

fn describe(label: &str, r: &TrialResult) -> String {
    format!(
        "{label}: {}, closest approach {:.4e} m at t = {:.3} s, closing velocity {:.1} m/s",
        r.termination, r.miss_distance, r.intercept_time, r.closing_velocity
    )
}

pub fn run(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    std::fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))?;
    match config.mode {
        Mode::Single => run_single(config),
        Mode::Sweep => run_sweep(config),
        Mode::Campaign => run_campaign_mode(config),
    }
}

fn run_single(config: &RunConfig) -> Result<RunSummary> {
    let mut summary = RunSummary::default();
    let dir = &config.output_dir;
    let (trajectory, result) = simulate(&config.scenario)?;
    if config.emit_trajectory {
        write_trajectory_csv(&summary.file(dir.join(TRAJECTORY_FILE)), &trajectory)?;
    }
    write_results_csv(
        &summary.file(dir.join(RESULTS_FILE)),
        [ResultRow {
            trial: 0,
            scenario: &config.scenario,
            result: &result,
        }],
    )?;
    summary
        .report
        .push(describe(config.scenario.guidance.law.name(), &result));
    Ok(summary)
}

/// `trajectory_<param>_<value>.csv`
pub fn sweep_trajectory_name(parameter: &str, value: f64) -> String {
    format!("trajectory_{parameter}_{value}.csv")
}

fn run_sweep(config: &RunConfig) -> Result<RunSummary> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::invalid("sweep", "missing"))?;
    let mut summary = RunSummary::default();
    let dir = &config.output_dir;
    let mut runs: Vec<(Scenario, TrialResult)> = Vec::new();
    for &value in &sweep.values {
        let mut scenario = config.scenario;
        sweep.parameter.apply(&mut scenario.guidance, value);
        let (trajectory, result) = simulate(&scenario)?;
        if config.emit_trajectory {
            let name = sweep_trajectory_name(sweep.parameter.name(), value);
            write_trajectory_csv(&summary.file(dir.join(name)), &trajectory)?;
        }
        summary.report.push(describe(
            &format!("{} {}={value}", scenario.guidance.law, sweep.parameter.name()),
            &result,
        ));
        runs.push((scenario, result));
    }
    if sweep.include_pg && config.scenario.guidance.law != GuidanceLaw::Pg {
        let scenario = Scenario {
            guidance: config.scenario.guidance.with_law(GuidanceLaw::Pg),
            ..config.scenario
        };
        let (trajectory, result) = simulate(&scenario)?;
        if config.emit_trajectory {
            write_trajectory_csv(&summary.file(dir.join("trajectory_pg.csv")), &trajectory)?;
        }
        summary.report.push(describe("pg (reference)", &result));
        runs.push((scenario, result));
    }
    write_results_csv(
        &summary.file(dir.join(RESULTS_FILE)),
        runs.iter().enumerate().map(|(trial, (scenario, result))| ResultRow {
            trial,
            scenario,
            result,
        }),
    )?;
    Ok(summary)
}

/// Stats label per configured law; repeated laws get a `#index` suffix.
pub fn law_labels(results: &CampaignResults) -> Vec<String> {
    results
        .laws
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let repeated = results.laws.iter().filter(|s| s.law == spec.law).count() > 1;
            if repeated {
                format!("{}#{i}", spec.law)
            } else {
                spec.law.to_string()
            }
        })
        .collect()
}

/// `trajectory_<trial>_<law>.csv`
pub fn campaign_trajectory_name(trial: usize, label: &str) -> String {
    format!("trajectory_{trial:04}_{label}.csv")
}

/// Writes results, stats and sampled trajectories of a finished campaign.
pub fn write_campaign_outputs(
    dir: &Path,
    results: &CampaignResults,
    stats: &[CampaignStats],
    trajectory_samples: usize,
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let results_path = dir.join(RESULTS_FILE);
    write_results_csv(
        &results_path,
        results.records.iter().map(|r| ResultRow {
            trial: r.trial,
            scenario: &r.scenario,
            result: &r.result,
        }),
    )?;
    files.push(results_path);

    let labels = law_labels(results);
    let labelled: Vec<(String, CampaignStats)> = labels.iter().cloned().zip(stats.iter().copied()).collect();
    let stats_path = dir.join(STATS_CSV_FILE);
    write_stats_csv(&stats_path, &labelled)?;
    files.push(stats_path);
    let text_path = dir.join(STATS_TEXT_FILE);
    write_text(&text_path, &format_stats_table(&labelled))?;
    files.push(text_path);

    for record in results.records.iter().filter(|r| r.trial < trajectory_samples) {
        // Trials that errored have no trajectory to write.
        if let Ok((trajectory, _)) = simulate(&record.scenario) {
            let path = dir.join(campaign_trajectory_name(record.trial, &labels[record.law_index]));
            write_trajectory_csv(&path, &trajectory)?;
            files.push(path);
        }
    }
    Ok(files)
}

fn run_campaign_mode(config: &RunConfig) -> Result<RunSummary> {
    let campaign = config
        .campaign
        .as_ref()
        .ok_or_else(|| Error::invalid("campaign", "missing"))?;
    let results = run_campaign(campaign, config.workers)?;
    let stats = results.stats(campaign.inclusion)?;
    let samples = if config.emit_trajectory {
        config.trajectory_samples
    } else {
        0
    };
    let files = write_campaign_outputs(&config.output_dir, &results, &stats, samples)?;
    let labels = law_labels(&results);
    let mut report: Vec<String> = labels
        .iter()
        .zip(&stats)
        .map(|(label, s)| format!("{label}: {:.2}% failure over {} trials", s.percent_failure, s.trials))
        .collect();
    let errored = results
        .records
        .iter()
        .filter(|r| r.result.termination == crate::sim::Termination::Error)
        .count();
    if errored > 0 {
        report.push(format!("{errored} trial runs aborted with a domain error"));
    }
    Ok(RunSummary { files, report })
}
