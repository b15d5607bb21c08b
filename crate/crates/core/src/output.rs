//! CSV and text emitters.
//!
//! Floats are written with 17 significant digits so every value parses back
//! to the identical `f64`. Angles are in radians.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::monte_carlo::{CampaignStats, MetricStats};
use crate::sim::{Scenario, Trajectory, TrialResult};

pub const TRAJECTORY_HEADER: [&str; 14] = [
    "t", "R", "psi", "V_P", "gamma_P", "V_E", "gamma_E", "d_P", "h_P", "d_E", "h_E", "u", "mu_iol",
    "saturated",
];

pub const RESULTS_HEADER: [&str; 22] = [
    "trial",
    "law",
    "lambda",
    "k_r",
    "k_psidot",
    "termination",
    "success",
    "intercept_time",
    "miss_distance",
    "closing_velocity",
    "V_P0",
    "gamma_P0",
    "h_P0",
    "d_P0",
    "V_E0",
    "gamma_E0",
    "h_E0",
    "d_E0",
    "evasion_start",
    "evasion_direction",
    "evasion_magnitude",
    "saturation_limit",
];

const METRICS: [&str; 3] = ["intercept_time", "miss_distance", "closing_velocity"];
const STATISTICS: [&str; 5] = ["average", "median", "variance", "minimum", "maximum"];

/// Full-precision decimal; NaN is written as an empty field.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    if field.is_empty() {
        return Ok(f64::NAN);
    }
    field.parse().map_err(|_| Error::Parse {
        line,
        column: 1,
        message: format!("invalid number {field:?}"),
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| Error::io(path, e))
}

fn finish_csv(mut w: csv::Writer<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_trajectory_csv(path: &Path, trajectory: &Trajectory) -> Result<()> {
    let mut w = csv_writer(path)?;
    let io = |e: csv::Error| Error::io(path, e);
    w.write_record(TRAJECTORY_HEADER).map_err(io)?;
    for s in &trajectory.samples {
        let st = &s.state;
        let row = [
            fmt_f64(st.t),
            fmt_f64(st.range),
            fmt_f64(st.los),
            fmt_f64(st.pursuer.speed),
            fmt_f64(st.pursuer.flight_path),
            fmt_f64(st.evader.speed),
            fmt_f64(st.evader.flight_path),
            fmt_f64(st.pursuer.downrange),
            fmt_f64(st.pursuer.altitude),
            fmt_f64(st.evader.downrange),
            fmt_f64(st.evader.altitude),
            fmt_f64(s.command.u),
            fmt_f64(s.command.mu_iol),
            u8::from(s.command.saturated).to_string(),
        ];
        w.write_record(&row).map_err(io)?;
    }
    finish_csv(w, path)
}

/// One line of a results file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultRow<'a> {
    pub trial: usize,
    pub scenario: &'a Scenario,
    pub result: &'a TrialResult,
}

pub fn write_results_csv<'a>(path: &Path, rows: impl IntoIterator<Item = ResultRow<'a>>) -> Result<()> {
    let mut w = csv_writer(path)?;
    let io = |e: csv::Error| Error::io(path, e);
    w.write_record(RESULTS_HEADER).map_err(io)?;
    for row in rows {
        let s = row.scenario;
        let r = row.result;
        let g = &s.guidance;
        let (ev_start, ev_dir, ev_mag) = match &s.evasion {
            Some(e) => (
                fmt_f64(e.start_time),
                match e.direction {
                    crate::dynamics::EvasionDirection::Up => "up".to_string(),
                    crate::dynamics::EvasionDirection::Down => "down".to_string(),
                },
                fmt_f64(e.magnitude),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        let record = [
            row.trial.to_string(),
            g.law.name().to_string(),
            fmt_f64(g.lambda),
            fmt_f64(g.k_r),
            fmt_f64(g.k_psidot),
            r.termination.name().to_string(),
            u8::from(r.success).to_string(),
            fmt_f64(r.intercept_time),
            fmt_f64(r.miss_distance),
            fmt_f64(r.closing_velocity),
            fmt_f64(s.pursuer.speed),
            fmt_f64(s.pursuer.flight_path),
            fmt_f64(s.pursuer.altitude),
            fmt_f64(s.pursuer.downrange),
            fmt_f64(s.evader.speed),
            fmt_f64(s.evader.flight_path),
            fmt_f64(s.evader.altitude),
            fmt_f64(s.evader.downrange),
            ev_start,
            ev_dir,
            ev_mag,
            g.saturation_limit.map_or(String::new(), fmt_f64),
        ];
        w.write_record(&record).map_err(io)?;
    }
    finish_csv(w, path)
}

pub fn stats_header() -> Vec<String> {
    let mut h = vec![
        "law".to_string(),
        "trials".into(),
        "failures".into(),
        "percent_failure".into(),
    ];
    for m in METRICS {
        for s in STATISTICS {
            h.push(format!("{m}_{s}"));
        }
    }
    h
}

fn metric_fields(m: &Option<MetricStats>) -> [String; 5] {
    match m {
        Some(m) => [
            fmt_f64(m.average),
            fmt_f64(m.median),
            fmt_f64(m.variance),
            fmt_f64(m.minimum),
            fmt_f64(m.maximum),
        ],
        None => Default::default(),
    }
}

/// One row per labelled law.
pub fn write_stats_csv(path: &Path, stats: &[(String, CampaignStats)]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let io = |e: csv::Error| Error::io(path, e);
    w.write_record(stats_header()).map_err(io)?;
    for (label, s) in stats {
        let mut row = vec![
            label.clone(),
            s.trials.to_string(),
            s.failures.to_string(),
            fmt_f64(s.percent_failure),
        ];
        for m in [&s.intercept_time, &s.miss_distance, &s.closing_velocity] {
            row.extend(metric_fields(m));
        }
        w.write_record(&row).map_err(io)?;
    }
    finish_csv(w, path)
}

pub fn read_stats_csv(path: &Path) -> Result<Vec<(String, CampaignStats)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::io(path, e))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::io(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != stats_header() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "unexpected stats header".into(),
        });
    }
    let mut out = Vec::new();
    for (i, record) in r.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::io(path, e))?;
        let count = |k: usize| -> Result<usize> {
            record[k].parse().map_err(|_| Error::Parse {
                line,
                column: k + 1,
                message: format!("invalid count {:?}", &record[k]),
            })
        };
        let metric = |offset: usize| -> Result<Option<MetricStats>> {
            if record[offset].is_empty() {
                return Ok(None);
            }
            Ok(Some(MetricStats {
                average: parse_f64(&record[offset], line)?,
                median: parse_f64(&record[offset + 1], line)?,
                variance: parse_f64(&record[offset + 2], line)?,
                minimum: parse_f64(&record[offset + 3], line)?,
                maximum: parse_f64(&record[offset + 4], line)?,
            }))
        };
        out.push((
            record[0].to_string(),
            CampaignStats {
                trials: count(1)?,
                failures: count(2)?,
                percent_failure: parse_f64(&record[3], line)?,
                intercept_time: metric(4)?,
                miss_distance: metric(9)?,
                closing_velocity: metric(14)?,
            },
        ));
    }
    Ok(out)
}

/// Text table laid out like a printed comparison table: one column group per
/// law, one row per statistic, failure percentage last.
pub fn format_stats_table(stats: &[(String, CampaignStats)]) -> String {
    const W: usize = 12;
    let mut out = String::new();
    let group = 3 * (W + 1);
    let _ = write!(out, "{:<16}", "");
    for (label, _) in stats {
        let _ = write!(out, "|{label:^group$}");
    }
    out.push('\n');
    let _ = write!(out, "{:<16}", "");
    for _ in stats {
        let _ = write!(out, "|{:>W$} {:>W$} {:>W$} ", "time (s)", "miss (m)", "Vc (m/s)");
    }
    out.push('\n');
    for (k, name) in ["Average", "Median", "Variance", "Minimum", "Maximum"].iter().enumerate() {
        let _ = write!(out, "{name:<16}");
        for (_, s) in stats {
            out.push('|');
            for m in [&s.intercept_time, &s.miss_distance, &s.closing_velocity] {
                let v = m.map(|m| [m.average, m.median, m.variance, m.minimum, m.maximum][k]);
                match v {
                    Some(v) => {
                        let _ = write!(out, "{:>W$} ", format_compact(v));
                    }
                    None => {
                        let _ = write!(out, "{:>W$} ", "-");
                    }
                }
            }
        }
        out.push('\n');
    }
    let _ = write!(out, "{:<16}", "Percent Failure");
    for (_, s) in stats {
        let cell = format!("{:.2}%", s.percent_failure);
        let _ = write!(out, "|{cell:^group$}");
    }
    out.push('\n');
    out
}

fn format_compact(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e6).contains(&a) {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
