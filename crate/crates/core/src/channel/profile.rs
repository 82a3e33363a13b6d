//! Post-processing of channel solutions: barycentric profiles and log-law fits.

use serde::Serialize;

use super::solver::ChannelSolution;
use crate::barycentric::{segment_distance, BaryPoint, STANDARD_CORNERS};
use crate::error::{EpfError, Result};
use crate::perturbation::{
    clip_to_realizable, perturb_eigenspace, perturb_legacy_unchecked, stress_barycentric, PerturbationSpec,
};

/// `(y⁺, barycentric position)` of the stress each cell propagates.
pub fn extract_bary_profile(solution: &ChannelSolution) -> Vec<(f64, BaryPoint)> {
    solution.y_plus.iter().copied().zip(solution.bary_points.iter().copied()).collect()
}

/// One cell of a baseline solution pushed through a perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocusPoint {
    pub y_plus: f64,
    /// Baseline stress, clipped to the realizable set.
    pub baseline: BaryPoint,
    /// Position of the perturbed (or legacy-blended) stress.
    pub perturbed: BaryPoint,
    /// Distance of `perturbed` from the segment joining `baseline` and the target corner.
    pub segment_distance: f64,
    /// `λ1 − λ3` of the baseline anisotropy.
    pub spread: f64,
}

/// Baseline barycentric locus after realizability clipping.
pub fn baseline_locus(baseline: &ChannelSolution) -> Result<Vec<(f64, BaryPoint)>> {
    baseline
        .tau_profiles
        .iter()
        .zip(&baseline.y_plus)
        .map(|(t, y)| Ok((*y, stress_barycentric(&clip_to_realizable(t))?)))
        .collect()
}

/// Applies `spec` (legacy when it carries a moderation factor) to every cell
/// of a converged baseline and measures where the result lands.
pub fn perturbed_locus(baseline: &ChannelSolution, spec: &PerturbationSpec) -> Result<Vec<LocusPoint>> {
    if baseline.perturbation.is_some() {
        return Err(EpfError::InvalidConfig("perturbed locus needs a baseline solution".into()));
    }
    let corner = STANDARD_CORNERS.corner(spec.target);
    baseline
        .tau_profiles
        .iter()
        .zip(&baseline.y_plus)
        .map(|(t, &y_plus)| {
            let tau = clip_to_realizable(t);
            let out = match spec.legacy_f {
                Some(_) => perturb_legacy_unchecked(&tau, spec, &STANDARD_CORNERS)?,
                None => perturb_eigenspace(&tau, spec, &STANDARD_CORNERS)?,
            };
            let perturbed = stress_barycentric(&out.tau_star)?;
            let an = crate::tensor::anisotropy_from_stress(&tau);
            let l = crate::tensor::eig_sym3(&an.a).values;
            Ok(LocusPoint {
                y_plus,
                baseline: out.bary_before,
                perturbed,
                segment_distance: segment_distance(&perturbed, &out.bary_before, &corner),
                spread: if an.degenerate { 0.0 } else { l[0] - l[2] },
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLawFit {
    pub kappa: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least-squares `u⁺ = ln(y⁺)/κ + B` over cells with `lo < y⁺ < hi`.
pub fn fit_log_law(solution: &ChannelSolution, lo: f64, hi: f64) -> Option<LogLawFit> {
    let pts: Vec<(f64, f64)> = solution
        .y_plus
        .iter()
        .zip(&solution.u_plus)
        .filter(|(y, _)| **y > lo && **y < hi)
        .map(|(y, u)| (y.ln(), *u))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 3 {
        return None;
    }
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx).powi(2), b + (x - mx) * (y - my)));
    let slope = sxy / sxx;
    Some(LogLawFit { kappa: 1.0 / slope, intercept: my - slope * mx, points: pts.len() })
}
