//! Blend trajectories in the three anisotropy maps.
//!
//! `Z = (1 − f) X + f Y` is swept over `f ∈ [0, 1]`. For commuting `X`, `Y`
//! with co-ordered spectra the barycentric path is the straight chord; for
//! non-commuting tensors, or when one spectrum is reordered by an
//! eigenvector permutation, it bends.

use serde::Serialize;

use crate::barycentric::{aim_coords, choi_coords, line_distance, AimPoint, BaryPoint, ChoiPoint, Corner};
use crate::error::{EpfError, Result};
use crate::exec::{self, Execution};
use crate::perturbation::{clamp_to_triangle, perturb_consistent, EvMode, PerturbationSpec};
use crate::tensor::{anisotropy_from_stress, eig_sym3, validate_realizability, Mat3, SymTensor3, REALIZABILITY_EPS};

/// Default sample count for smooth CSV curves.
pub const CSV_STEPS: usize = 101;
/// `f ∈ {0, 0.2, 0.4, 0.6, 0.8, 1}`.
pub const FIXTURE_STEPS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub f: f64,
    pub bary: BaryPoint,
    pub aim: AimPoint,
    pub choi: ChoiPoint,
    pub eigenvalues: [f64; 3],
    /// Stress eigenvalues `ρ_i = k (λ_i + 2/3)`.
    pub semiaxes: [f64; 3],
}

impl TrajectoryRecord {
    pub fn from_stress(f: f64, tau: &SymTensor3) -> Result<Self> {
        let an = anisotropy_from_stress(tau);
        let eigenvalues = if an.degenerate { [0.0; 3] } else { clamp_to_triangle(eig_sym3(&an.a).values) };
        Ok(Self {
            f,
            bary: crate::barycentric::to_barycentric(&eigenvalues)?,
            aim: aim_coords(&eigenvalues),
            choi: choi_coords(&eigenvalues),
            eigenvalues,
            semiaxes: eigenvalues.map(|l| an.k * (l + 2.0 / 3.0)),
        })
    }
}

fn check_psd(t: &SymTensor3, which: &str) -> Result<()> {
    let r = validate_realizability(t, REALIZABILITY_EPS);
    if r.is_realizable {
        Ok(())
    } else {
        let names: Vec<String> = r.violations.iter().map(|(c, v)| format!("{c} by {v:e}")).collect();
        Err(EpfError::NonRealizable(format!("{which}: {}", names.join(", "))))
    }
}

/// Samples `f` uniformly on `[0, 1]` with `n_steps` points.
pub fn blend_trajectory(x: &SymTensor3, y: &SymTensor3, n_steps: usize) -> Result<Vec<TrajectoryRecord>> {
    if n_steps < 2 {
        return Err(EpfError::TooFewSteps(n_steps));
    }
    check_psd(x, "X")?;
    check_psd(y, "Y")?;
    (0..n_steps)
        .map(|i| {
            let f = i as f64 / (n_steps - 1) as f64;
            let z = if i == n_steps - 1 { *y } else { x.lerp(y, f) };
            TrajectoryRecord::from_stress(f, &z)
        })
        .collect()
}

/// A modeled stress state given in its principal frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RansPoint {
    pub eigenvalues: [f64; 3],
    pub vectors: Mat3,
    pub k: f64,
}

impl RansPoint {
    pub fn stress(&self) -> SymTensor3 {
        (SymTensor3::from_eigen(self.eigenvalues, &self.vectors) + SymTensor3::identity() * (2.0 / 3.0)) * self.k
    }
}

/// `n` states on the plane-strain locus `λ = (s, 0, −s)`, `s ∈ (0, 1/3]`.
pub fn plane_strain_points(n: usize, k: f64, vectors: &Mat3) -> Vec<RansPoint> {
    (1..=n)
        .map(|i| {
            let s = i as f64 / (3.0 * n as f64);
            RansPoint { eigenvalues: [s, 0.0, -s], vectors: *vectors, k }
        })
        .collect()
}

/// For each point, fully perturbs toward `target` and sweeps the moderated blend.
pub fn rans_point_trajectories(
    points: &[RansPoint],
    target: Corner,
    ev_mode: EvMode,
    n_steps: usize,
    exec: Execution,
) -> Result<Vec<Vec<TrajectoryRecord>>> {
    exec::map(exec, points, |p| perturbation_trajectory(&p.stress(), target, ev_mode, n_steps)).into_iter().collect()
}

/// Blend from `tau` to its full (`Δ_B = 1`) perturbation toward `target`.
pub fn perturbation_trajectory(tau: &SymTensor3, target: Corner, ev_mode: EvMode, n_steps: usize) -> Result<Vec<TrajectoryRecord>> {
    let spec = PerturbationSpec::consistent(target, 1.0, ev_mode)?;
    let full = perturb_consistent(tau, &spec)?;
    blend_trajectory(tau, &full.tau_star, n_steps)
}

/// Largest perpendicular distance of the barycentric samples from the chord
/// joining the first and last record.
pub fn chord_deviation(records: &[TrajectoryRecord]) -> f64 {
    let (Some(first), Some(last)) = (records.first(), records.last()) else {
        return 0.0;
    };
    records
        .iter()
        .map(|r| line_distance(&r.bary, &first.bary, &last.bary))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barycentric::STANDARD_CORNERS;
    use crate::fixtures;

    #[test]
    fn commuting_pair_is_collinear() {
        let traj = blend_trajectory(&fixtures::TENSOR_A, &fixtures::tensor_b(), FIXTURE_STEPS).unwrap();
        assert_eq!(traj.len(), 6);
        assert!(chord_deviation(&traj) < 1e-10);
        let a = TrajectoryRecord::from_stress(0.0, &fixtures::TENSOR_A).unwrap();
        assert!(traj[0].bary.distance(&a.bary) < 1e-12);
    }

    #[test]
    fn non_commuting_pair_bends() {
        let traj = blend_trajectory(&fixtures::TENSOR_A, &fixtures::TENSOR_C, FIXTURE_STEPS).unwrap();
        let (first, last) = (traj[0].bary, traj[5].bary);
        for r in &traj[1..5] {
            assert!(line_distance(&r.bary, &first, &last) > 0.01, "f = {}", r.f);
        }
    }

    #[test]
    fn self_blend_is_constant() {
        let traj = blend_trajectory(&fixtures::TENSOR_C, &fixtures::TENSOR_C, 5).unwrap();
        assert!(traj.windows(2).all(|w| w[0].bary == w[1].bary && w[0].eigenvalues == w[1].eigenvalues));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(blend_trajectory(&fixtures::TENSOR_A, &fixtures::TENSOR_C, 1), Err(EpfError::TooFewSteps(1))));
        let bad = SymTensor3::diag(1.0, -1.0, 1.0);
        assert!(matches!(blend_trajectory(&bad, &fixtures::TENSOR_C, 3), Err(EpfError::NonRealizable(_))));
    }

    #[test]
    fn semiaxes_sum_to_twice_energy() {
        let traj = blend_trajectory(&fixtures::TENSOR_A, &fixtures::TENSOR_C, 11).unwrap();
        for r in &traj {
            assert!((r.semiaxes.iter().sum::<f64>() - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn plane_strain_trajectories() {
        let v = eig_sym3(&fixtures::TENSOR_A).vectors;
        let pts = plane_strain_points(4, 1.0, &v);
        let straight = rans_point_trajectories(&pts, Corner::OneC, EvMode::ProductionMax, 21, Execution::Sequential).unwrap();
        assert!(straight.iter().all(|t| chord_deviation(t) < 1e-10));
        let bent = rans_point_trajectories(&pts, Corner::OneC, EvMode::ProductionMin, 21, Execution::Sequential).unwrap();
        assert!(bent.iter().all(|t| chord_deviation(t) > 0.01));
    }

    #[test]
    fn point_at_one_component_corner_without_permutation_stays_put() {
        let v = eig_sym3(&fixtures::TENSOR_C).vectors;
        let p = RansPoint { eigenvalues: Corner::OneC.eigenvalues(), vectors: v, k: 1.0 };
        let t = rans_point_trajectories(&[p], Corner::OneC, EvMode::ProductionMax, 6, Execution::Sequential).unwrap();
        assert!(t[0].iter().all(|r| r.bary.distance(&STANDARD_CORNERS.one_c) < 1e-10));
    }

    #[test]
    fn point_at_one_component_corner_with_permutation_passes_through_two_component() {
        let v = eig_sym3(&fixtures::TENSOR_C).vectors;
        let p = RansPoint { eigenvalues: Corner::OneC.eigenvalues(), vectors: v, k: 1.0 };
        let t = rans_point_trajectories(&[p], Corner::OneC, EvMode::ProductionMin, 3, Execution::Sequential).unwrap();
        assert!(t[0][0].bary.distance(&t[0][2].bary) < 1e-10);
        assert!(t[0][1].bary.distance(&STANDARD_CORNERS.two_c) < 1e-10);
    }
}
