//! CSV files and the run manifest.
//!
//! Reals are written with 17 significant digits in scientific notation, which
//! round-trips every `f64` and does not depend on locale.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::channel::{CampaignResult, ChannelSolution, Envelope};
use crate::trajectory::TrajectoryRecord;

pub const PROFILE_COLUMNS: [&str; 7] = ["y_plus", "u_plus", "k_plus", "omega_plus", "nu_t_ratio", "bary_x", "bary_y"];
pub const TRAJECTORY_COLUMNS: [&str; 13] =
    ["f", "bary_x", "bary_y", "III", "II", "xi", "eta", "lam1", "lam2", "lam3", "rho1", "rho2", "rho3"];
pub const ENVELOPE_COLUMNS: [&str; 4] = ["y_plus", "u_min", "u_max", "baseline"];
pub const OVERLAY_COLUMNS: [&str; 2] = ["y_plus", "u_plus"];

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_table<const N: usize>(path: &Path, header: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    w.write_record(header).map_err(|e| CliError::csv(path, e))?;
    for row in rows {
        w.write_record(row.map(real)).map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_profile(path: &Path, s: &ChannelSolution) -> Result<(), CliError> {
    let rows = (0..s.y_plus.len()).map(|i| {
        let b = s.bary_points[i];
        [s.y_plus[i], s.u_plus[i], s.k_plus[i], s.omega_plus[i], s.nu_t_ratio[i], b.x, b.y]
    });
    write_table(path, PROFILE_COLUMNS, rows)
}

pub fn write_trajectory(path: &Path, records: &[TrajectoryRecord]) -> Result<(), CliError> {
    let rows = records.iter().map(|r| {
        let (l, p) = (r.eigenvalues, r.semiaxes);
        [r.f, r.bary.x, r.bary.y, r.aim.third, r.aim.second, r.choi.xi, r.choi.eta, l[0], l[1], l[2], p[0], p[1], p[2]]
    });
    write_table(path, TRAJECTORY_COLUMNS, rows)
}

pub fn write_envelope(path: &Path, e: &Envelope) -> Result<(), CliError> {
    let rows = (0..e.y_plus.len()).map(|i| [e.y_plus[i], e.u_min[i], e.u_max[i], e.baseline[i]]);
    write_table(path, ENVELOPE_COLUMNS, rows)
}

/// Reference profile with `y_plus` and `u_plus` columns (other columns are ignored).
pub fn read_overlay(path: &Path) -> Result<Vec<[f64; 2]>, CliError> {
    #[derive(Deserialize)]
    struct Row {
        y_plus: f64,
        u_plus: f64,
    }
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| CliError::csv(path, e))?;
    let rows: Vec<[f64; 2]> = r
        .deserialize::<Row>()
        .map(|row| row.map(|row| [row.y_plus, row.u_plus]))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::csv(path, e))?;
    if rows.is_empty() {
        return Err(CliError::Usage(format!("{}: overlay has no rows", path.display())));
    }
    Ok(rows)
}

pub fn write_overlay(path: &Path, rows: &[[f64; 2]]) -> Result<(), CliError> {
    write_table(path, OVERLAY_COLUMNS, rows.iter().copied())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseRecord {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub campaign: Option<String>,
    pub converged: bool,
    pub laminarized: bool,
    pub diverged: bool,
    pub iterations: usize,
    pub final_residual: Option<f64>,
    pub centerline_u_plus: Option<f64>,
    pub realizability_violations: usize,
    pub file: String,
}

impl CaseRecord {
    pub fn new(s: &ChannelSolution, campaign: Option<String>, file: &str) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        Self {
            label: s.label(),
            campaign,
            converged: s.converged,
            laminarized: s.laminarized,
            diverged: s.diverged,
            iterations: s.iterations,
            final_residual: finite(s.final_residual),
            centerline_u_plus: finite(s.centerline_u_plus()),
            realizability_violations: s.realizability_violations,
            file: file.into(),
        }
    }
}

/// A run of consecutive cells whose envelope bound comes from one member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRun {
    pub side: String,
    pub member: String,
    pub y_plus_from: f64,
    pub y_plus_to: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeRecord {
    pub campaign: String,
    pub file: String,
    pub excluded: Vec<String>,
    pub bounds: Vec<BoundRun>,
}

impl EnvelopeRecord {
    pub fn new(c: &CampaignResult, file: &str) -> Self {
        let e = &c.envelope;
        let mut bounds = Vec::new();
        for (side, owners) in [("min", &e.min_member), ("max", &e.max_member)] {
            let mut start = 0;
            for i in 1..=owners.len() {
                if i == owners.len() || owners[i] != owners[start] {
                    let member = c.members.get(owners[start]).map(|m| m.label()).unwrap_or_else(|| "none".into());
                    bounds.push(BoundRun { side: side.into(), member, y_plus_from: e.y_plus[start], y_plus_to: e.y_plus[i - 1] });
                    start = i;
                }
            }
        }
        Self { campaign: c.kind.to_string(), file: file.into(), excluded: c.excluded.clone(), bounds }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub subcommand: String,
    pub config_digest: String,
    /// Seconds since the Unix epoch.
    pub started: u64,
    pub finished: u64,
    pub outputs: Vec<String>,
    pub cases: Vec<CaseRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub envelopes: Vec<EnvelopeRecord>,
}

impl RunManifest {
    pub fn new(subcommand: &str, config_digest: String) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            config_digest,
            started: unix_now(),
            finished: 0,
            outputs: Vec::new(),
            cases: Vec::new(),
            envelopes: Vec::new(),
        }
    }

    pub fn write(mut self, dir: &Path) -> Result<PathBuf, CliError> {
        self.finished = unix_now();
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self).expect("manifest always serializes");
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

fn unix_now() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}
