//! Perturbation campaigns and their velocity envelopes.

use serde::{Deserialize, Serialize};

use super::solver::{solve_channel_from, ChannelSolution};
use super::ChannelConfig;
use crate::barycentric::Corner;
use crate::error::{EpfError, Result};
use crate::exec::{self, Execution};
use crate::perturbation::{EvMode, PerturbationSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CampaignKind {
    Legacy,
    Consistent,
}

impl std::fmt::Display for CampaignKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CampaignKind::Legacy => "legacy",
            CampaignKind::Consistent => "consistent",
        })
    }
}

/// Every target/eigenvector combination. The legacy family moves fully
/// (`Δ_B = 1`) and moderates by `strength`; it drops the redundant
/// isotropic production-minimizing member.
pub fn campaign_specs(kind: CampaignKind, strength: f64) -> Result<Vec<PerturbationSpec>> {
    let mut specs = Vec::new();
    for target in Corner::ALL {
        for mode in [EvMode::ProductionMax, EvMode::ProductionMin] {
            let spec = match kind {
                CampaignKind::Consistent => PerturbationSpec::consistent(target, strength, mode)?,
                CampaignKind::Legacy => PerturbationSpec::legacy(target, 1.0, mode, strength)?,
            };
            if !spec.is_redundant() {
                specs.push(spec);
            }
        }
    }
    Ok(specs)
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignMember {
    pub spec: PerturbationSpec,
    pub solution: ChannelSolution,
}

impl CampaignMember {
    pub fn label(&self) -> String {
        self.spec.label()
    }
}

/// Pointwise bounds of `u⁺` over the usable members.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    pub y_plus: Vec<f64>,
    pub u_min: Vec<f64>,
    pub u_max: Vec<f64>,
    pub baseline: Vec<f64>,
    /// Member index attaining `u_min` / `u_max` at each cell.
    pub min_member: Vec<usize>,
    pub max_member: Vec<usize>,
}

impl Envelope {
    pub fn from_members(baseline: &ChannelSolution, members: &[CampaignMember]) -> Self {
        let n = baseline.u_plus.len();
        let mut env = Envelope {
            y_plus: baseline.y_plus.clone(),
            u_min: vec![f64::INFINITY; n],
            u_max: vec![f64::NEG_INFINITY; n],
            baseline: baseline.u_plus.clone(),
            min_member: vec![usize::MAX; n],
            max_member: vec![usize::MAX; n],
        };
        for (m, member) in members.iter().enumerate().filter(|(_, m)| m.solution.is_usable()) {
            for (i, &u) in member.solution.u_plus.iter().enumerate() {
                if u < env.u_min[i] {
                    env.u_min[i] = u;
                    env.min_member[i] = m;
                }
                if u > env.u_max[i] {
                    env.u_max[i] = u;
                    env.max_member[i] = m;
                }
            }
        }
        env
    }

    /// Largest pointwise difference of the bounds of two envelopes.
    pub fn max_difference(&self, other: &Envelope) -> f64 {
        let d = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()));
        d(&self.u_min, &other.u_min).max(d(&self.u_max, &other.u_max))
    }

    pub fn max_abs(&self) -> f64 {
        self.u_max.iter().chain(&self.u_min).fold(0.0, |m: f64, u| m.max(u.abs()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignResult {
    pub kind: CampaignKind,
    pub members: Vec<CampaignMember>,
    pub envelope: Envelope,
    /// Labels of diverged or unconverged members left out of the envelope.
    pub excluded: Vec<String>,
}

/// Runs every spec from the converged baseline under the same pressure gradient.
pub fn run_uq_campaign(
    base: &ChannelConfig,
    baseline: &ChannelSolution,
    kind: CampaignKind,
    specs: &[PerturbationSpec],
    exec: Execution,
) -> Result<CampaignResult> {
    if !baseline.converged || baseline.diverged {
        return Err(EpfError::BaselineNotConverged);
    }
    let configs: Vec<ChannelConfig> = specs.iter().map(|s| base.perturbed(*s)).collect();
    for c in &configs {
        c.validate()?;
    }
    let solutions = exec::map(exec, &configs, |c| solve_channel_from(c, Some(&baseline.state)));
    let members = specs
        .iter()
        .zip(solutions)
        .map(|(spec, sol)| Ok(CampaignMember { spec: *spec, solution: sol? }))
        .collect::<Result<Vec<_>>>()?;
    let excluded = members.iter().filter(|m| !m.solution.is_usable()).map(|m| m.label()).collect();
    let envelope = Envelope::from_members(baseline, &members);
    Ok(CampaignResult { kind, members, envelope, excluded })
}
