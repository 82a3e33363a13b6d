//! Fully developed turbulent channel flow with eigenspace-perturbed stresses.
//!
//! Solver units: half-height `h = 1`, friction velocity `u_τ = √G` for the
//! fixed pressure-gradient source `G`, and `ν = u_τ h / Re_τ`. Profiles are
//! reported in wall units.

mod campaign;
mod grid;
mod profile;
mod solver;
mod sst;

pub use campaign::{campaign_specs, run_uq_campaign, CampaignKind, CampaignMember, CampaignResult, Envelope};
pub use grid::{solve_tridiagonal, Grid};
pub use profile::{
    baseline_locus, extract_bary_profile, fit_log_law, perturbed_locus, LocusPoint, LogLawFit,
};
pub use solver::{boussinesq_stress, solve_channel, solve_channel_from, ChannelSolution, FlowState};
pub use sst::{Blended, SstConstants};

use serde::{Deserialize, Serialize};

use crate::error::{EpfError, Result};
use crate::perturbation::PerturbationSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ChannelMode {
    #[default]
    Baseline,
    Legacy,
    Consistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub re_tau: f64,
    /// Cells from the wall to the centreline.
    pub n_cells: usize,
    /// Ratio of neighbouring cell widths.
    pub stretching: f64,
    pub pressure_gradient: f64,
    pub model_constants: SstConstants,
    pub perturbation: Option<PerturbationSpec>,
    pub mode: ChannelMode,
    pub max_iters: usize,
    pub conv_tol: f64,
    pub relax_momentum: f64,
    pub relax_turbulence: f64,
    /// Iterations the residual may stay far above its best value before the run is declared diverged.
    pub divergence_window: usize,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            re_tau: 1000.0,
            n_cells: 100,
            stretching: 1.04,
            pressure_gradient: 1.0,
            model_constants: SstConstants::default(),
            perturbation: None,
            mode: ChannelMode::Baseline,
            max_iters: 200_000,
            conv_tol: 1e-8,
            relax_momentum: 0.5,
            relax_turbulence: 0.5,
            divergence_window: 5000,
        }
    }
}

impl ChannelConfig {
    pub fn friction_velocity(&self) -> f64 {
        self.pressure_gradient.sqrt()
    }

    pub fn viscosity(&self) -> f64 {
        self.friction_velocity() / self.re_tau
    }

    pub fn grid(&self) -> Grid {
        Grid::stretched(self.n_cells, self.stretching)
    }

    /// Copy of this configuration running `spec` in the matching mode.
    pub fn perturbed(&self, spec: PerturbationSpec) -> Self {
        let mode = if spec.legacy_f.is_some() { ChannelMode::Legacy } else { ChannelMode::Consistent };
        Self { perturbation: Some(spec), mode, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(EpfError::InvalidConfig(msg));
        if !(self.re_tau.is_finite() && self.re_tau > 0.0) {
            return bad(format!("re_tau must be positive, got {}", self.re_tau));
        }
        if !(self.pressure_gradient.is_finite() && self.pressure_gradient > 0.0) {
            return bad(format!("pressure_gradient must be positive, got {}", self.pressure_gradient));
        }
        if self.n_cells < 50 {
            return bad(format!("n_cells must be at least 50, got {}", self.n_cells));
        }
        if !(self.stretching >= 1.0 && self.stretching < 1.5) {
            return bad(format!("stretching must lie in [1, 1.5), got {}", self.stretching));
        }
        let first = self.grid().centers[0] * self.re_tau;
        if first > 1.0 {
            return bad(format!("first cell centre at y+ = {first:.3} exceeds 1"));
        }
        if !(self.conv_tol > 0.0 && self.conv_tol < 1.0) {
            return bad(format!("conv_tol must lie in (0, 1), got {}", self.conv_tol));
        }
        for (name, r) in [("relax_momentum", self.relax_momentum), ("relax_turbulence", self.relax_turbulence)] {
            if !(r > 0.0 && r <= 1.0) {
                return bad(format!("{name} must lie in (0, 1], got {r}"));
            }
        }
        if self.max_iters == 0 || self.divergence_window == 0 {
            return bad("max_iters and divergence_window must be positive".into());
        }
        match (self.mode, &self.perturbation) {
            (ChannelMode::Baseline, None) => Ok(()),
            (ChannelMode::Baseline, Some(_)) => bad("baseline mode takes no perturbation".into()),
            (_, None) => bad(format!("{:?} mode needs a perturbation", self.mode).to_lowercase()),
            (ChannelMode::Legacy, Some(p)) if p.legacy_f.is_none() => bad("legacy mode needs a moderation factor".into()),
            (ChannelMode::Consistent, Some(p)) if p.legacy_f.is_some() => {
                bad("consistent mode takes no moderation factor".into())
            }
            (_, Some(p)) => p.validate(),
        }
    }
}
