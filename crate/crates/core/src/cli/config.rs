//! Run configuration file.
//!
//! TOML with the sections `[flow]`, `[grid]`, `[solver]`, `[model]`,
//! `[perturbation]` and `[campaign]`. Every key is optional and falls back to
//! the defaults below; unknown keys are rejected. The canonical form is the
//! re-serialized parse, so two files that differ only in layout, comments or
//! omitted defaults share a digest.
//!
//! ```toml
//! [flow]
//! re_tau = 1000.0
//! pressure_gradient = 1.0
//!
//! [grid]
//! n_cells = 100
//! stretching = 1.04
//!
//! [solver]
//! max_iters = 200000
//! conv_tol = 1e-8
//!
//! [campaign]
//! kind = "both"
//! strength = 0.5
//! ```

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{CampaignKind, ChannelConfig, ChannelMode, SstConstants};
use crate::error::{EpfError, Result};
use crate::perturbation::PerturbationSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSection {
    pub re_tau: f64,
    pub pressure_gradient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n_cells: usize,
    pub stretching: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub max_iters: usize,
    pub conv_tol: f64,
    pub relax_momentum: f64,
    pub relax_turbulence: f64,
    pub divergence_window: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CampaignChoice {
    Legacy,
    Consistent,
    Both,
}

impl CampaignChoice {
    pub fn kinds(self) -> Vec<CampaignKind> {
        match self {
            CampaignChoice::Legacy => vec![CampaignKind::Legacy],
            CampaignChoice::Consistent => vec![CampaignKind::Consistent],
            CampaignChoice::Both => vec![CampaignKind::Consistent, CampaignKind::Legacy],
        }
    }
}

/// `strength` is `Δ_B` of the consistent family and the moderation factor of the legacy one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<CampaignChoice>,
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub flow: FlowSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub model: SstConstants,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationSpec>,
    pub campaign: CampaignSection,
}

impl Default for FlowSection {
    fn default() -> Self {
        let c = ChannelConfig::default();
        Self { re_tau: c.re_tau, pressure_gradient: c.pressure_gradient }
    }
}

impl Default for GridSection {
    fn default() -> Self {
        let c = ChannelConfig::default();
        Self { n_cells: c.n_cells, stretching: c.stretching }
    }
}

impl Default for SolverSection {
    fn default() -> Self {
        let c = ChannelConfig::default();
        Self {
            max_iters: c.max_iters,
            conv_tol: c.conv_tol,
            relax_momentum: c.relax_momentum,
            relax_turbulence: c.relax_turbulence,
            divergence_window: c.divergence_window,
        }
    }
}

impl Default for CampaignSection {
    fn default() -> Self {
        Self { kind: None, strength: 0.5 }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| EpfError::InvalidConfig(e.message().to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if let Some(p) = &self.perturbation {
            p.validate()?;
        }
        if !(self.campaign.strength > 0.0 && self.campaign.strength <= 1.0) {
            return Err(EpfError::InvalidConfig(format!(
                "campaign.strength must lie in (0, 1], got {}",
                self.campaign.strength
            )));
        }
        self.baseline().validate()
    }

    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("run configuration always serializes")
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn digest(&self) -> String {
        digest_text(&self.canonical())
    }

    pub fn baseline(&self) -> ChannelConfig {
        ChannelConfig {
            re_tau: self.flow.re_tau,
            pressure_gradient: self.flow.pressure_gradient,
            n_cells: self.grid.n_cells,
            stretching: self.grid.stretching,
            max_iters: self.solver.max_iters,
            conv_tol: self.solver.conv_tol,
            relax_momentum: self.solver.relax_momentum,
            relax_turbulence: self.solver.relax_turbulence,
            divergence_window: self.solver.divergence_window,
            model_constants: self.model,
            perturbation: None,
            mode: ChannelMode::Baseline,
        }
    }
}

pub fn digest_text(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}
