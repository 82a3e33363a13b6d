//! Channel solves shared by the integration targets; each runs once per process.

#![allow(dead_code)]

use std::sync::OnceLock;

use epfkit::channel::{
    campaign_specs, run_uq_campaign, solve_channel, CampaignKind, CampaignResult, ChannelConfig, ChannelSolution,
};
use epfkit::Execution;

pub const STRENGTH: f64 = 0.5;

pub struct Runs {
    pub config: ChannelConfig,
    pub baseline: ChannelSolution,
    pub legacy: CampaignResult,
    pub consistent: CampaignResult,
}

pub fn runs() -> &'static Runs {
    static RUNS: OnceLock<Runs> = OnceLock::new();
    RUNS.get_or_init(|| {
        let config = ChannelConfig::default();
        let baseline = solve_channel(&config).expect("baseline solve");
        let campaign = |kind| {
            let specs = campaign_specs(kind, STRENGTH).unwrap();
            run_uq_campaign(&config, &baseline, kind, &specs, Execution::Parallel).expect("campaign")
        };
        let legacy = campaign(CampaignKind::Legacy);
        let consistent = campaign(CampaignKind::Consistent);
        Runs { config, baseline, legacy, consistent }
    })
}

/// Laminar Poiseuille profile `u⁺ = Re_τ (η − η²/2)` at wall distance `η = y⁺/Re_τ`.
pub fn laminar_u_plus(re_tau: f64, y_plus: f64) -> f64 {
    let eta = y_plus / re_tau;
    re_tau * (eta - 0.5 * eta * eta)
}
