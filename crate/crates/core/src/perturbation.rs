//! Eigenspace perturbation of the Reynolds stress tensor.
//!
//! Two pipelines are provided. [`perturb_consistent`] moves the eigenvalues
//! along the barycentric segment toward a limiting state by `Δ_B` and
//! optionally permutes the eigenvectors; the barycentric position of the
//! result depends only on the sorted eigenvalues, so it always sits on that
//! segment. [`perturb_legacy`] perturbs fully and then blends the stress
//! component-wise with a moderation factor `f`. When eigenvectors are
//! permuted the blend mixes non-commuting tensors and lands off the segment.

use serde::{Deserialize, Serialize};

use crate::barycentric::{BaryPoint, Corner, CornerSet, STANDARD_CORNERS};
use crate::error::{EpfError, Result};
use crate::tensor::{
    anisotropy_from_stress, det3, eig_sym3, frobenius_inner, orthonormality_error, validate_realizability, Mat3,
    SymTensor3, REALIZABILITY_EPS,
};

/// Eigenvector treatment, named by the production extreme it targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EvMode {
    #[serde(rename = "max")]
    ProductionMax,
    #[serde(rename = "min")]
    ProductionMin,
}

impl std::fmt::Display for EvMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EvMode::ProductionMax => "max",
            EvMode::ProductionMin => "min",
        })
    }
}

impl std::str::FromStr for EvMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "max" | "production_max" | "pkmax" => Ok(EvMode::ProductionMax),
            "min" | "production_min" | "pkmin" => Ok(EvMode::ProductionMin),
            other => Err(format!("unknown eigenvector mode `{other}` (expected max or min)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub target: Corner,
    pub delta_b: f64,
    pub ev_mode: EvMode,
    /// Moderation factor of the legacy formulation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legacy_f: Option<f64>,
}

impl PerturbationSpec {
    pub fn consistent(target: Corner, delta_b: f64, ev_mode: EvMode) -> Result<Self> {
        let spec = Self { target, delta_b, ev_mode, legacy_f: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn legacy(target: Corner, delta_b: f64, ev_mode: EvMode, f: f64) -> Result<Self> {
        let spec = Self { target, delta_b, ev_mode, legacy_f: Some(f) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("delta_b", self.delta_b)?;
        if let Some(f) = self.legacy_f {
            check_unit("legacy_f", f)?;
        }
        Ok(())
    }

    /// Full move to the isotropic corner leaves a sphere; permuting its axes changes nothing.
    pub fn is_redundant(&self) -> bool {
        self.target == Corner::ThreeC && self.delta_b == 1.0 && self.ev_mode == EvMode::ProductionMin
    }

    /// Short label such as `1C-min-d0.5` or `2C-max-d1-f0.5`.
    pub fn label(&self) -> String {
        let mut s = format!("{}-{}-d{}", self.target, self.ev_mode, self.delta_b);
        if let Some(f) = self.legacy_f {
            s.push_str(&format!("-f{f}"));
        }
        s
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(EpfError::OutOfRange { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbedState {
    pub tau_star: SymTensor3,
    /// Perturbed eigenvalues, descending.
    pub lambda_star: [f64; 3],
    /// Eigenvectors paired column-wise with `lambda_star`.
    pub v_star: Mat3,
    pub bary_before: BaryPoint,
    /// Barycentric position of `tau_star` (of the blended tensor in the legacy path).
    pub bary_after: BaryPoint,
    /// Target of the barycentric move.
    pub bary_target: BaryPoint,
    pub production_before: Option<f64>,
    pub production_after: Option<f64>,
    /// Turbulent kinetic energy at or below the floor; `tau_star == tau`.
    pub degenerate: bool,
    /// The (3C, Δ_B = 1, min) combination.
    pub redundant: bool,
}

impl PerturbedState {
    /// Fills in production before and after perturbation for strain rate `s`.
    pub fn with_strain(mut self, tau: &SymTensor3, s: &SymTensor3) -> Self {
        self.production_before = Some(production(tau, s));
        self.production_after = Some(production(&self.tau_star, s));
        self
    }
}

/// `x* = x + Δ_B (x_t − x)`.
pub fn perturb_barycentric(x: &BaryPoint, target: Corner, delta_b: f64) -> Result<BaryPoint> {
    perturb_barycentric_with(&STANDARD_CORNERS, x, target, delta_b)
}

pub fn perturb_barycentric_with(corners: &CornerSet, x: &BaryPoint, target: Corner, delta_b: f64) -> Result<BaryPoint> {
    check_unit("delta_b", delta_b)?;
    if !corners.contains(x, 1e-10) {
        return Err(EpfError::NonRealizableTarget { x: x.x, y: x.y });
    }
    Ok(x.lerp(&corners.corner(target), delta_b))
}

/// Production-minimizing permutation swaps the first and last eigenvector.
pub fn permute_eigenvectors(v: &Mat3, mode: EvMode) -> Result<Mat3> {
    let err = orthonormality_error(v);
    if err > 1e-10 {
        return Err(EpfError::NotOrthonormal(err));
    }
    let mut out = *v;
    if mode == EvMode::ProductionMin {
        for row in out.iter_mut() {
            row.swap(0, 2);
        }
        if det3(&out) < 0.0 {
            for row in out.iter_mut() {
                row[2] = -row[2];
            }
        }
    }
    Ok(out)
}

/// `P_k = −τ_ij S_ij`.
pub fn production(tau: &SymTensor3, strain: &SymTensor3) -> f64 {
    -frobenius_inner(tau, strain)
}

/// Production range reachable by re-orienting a stress with spectrum `rho`
/// against a strain with spectrum `sigma` (both descending).
///
/// Returns `(p_min, p_max)`: the aligned pairing gives the least production,
/// the reversed pairing the most.
pub fn production_bounds(rho: &[f64; 3], sigma: &[f64; 3]) -> Result<(f64, f64)> {
    for l in [rho, sigma] {
        if l[0] < l[1] || l[1] < l[2] {
            return Err(EpfError::UnsortedEigenvalues(*l));
        }
    }
    let aligned = rho[0] * sigma[0] + rho[1] * sigma[1] + rho[2] * sigma[2];
    let reversed = rho[0] * sigma[2] + rho[1] * sigma[1] + rho[2] * sigma[0];
    Ok((-aligned, -reversed))
}

/// `τ + f (τ* − τ)`.
pub fn moderated_stress_legacy(tau: &SymTensor3, tau_star: &SymTensor3, f: f64) -> Result<SymTensor3> {
    check_unit("f", f)?;
    Ok(tau.lerp(tau_star, f))
}

pub fn perturb_consistent(tau: &SymTensor3, spec: &PerturbationSpec) -> Result<PerturbedState> {
    if spec.legacy_f.is_some() {
        return Err(EpfError::UnexpectedModeration);
    }
    spec.validate()?;
    let report = validate_realizability(tau, REALIZABILITY_EPS);
    if !report.is_realizable {
        let names: Vec<String> = report.violations.iter().map(|(c, r)| format!("{c} by {r:e}")).collect();
        return Err(EpfError::NonRealizable(names.join(", ")));
    }
    perturb_eigenspace(tau, spec, &STANDARD_CORNERS)
}

/// Anisotropy → eigenspace → barycentric move → inverse map → permutation → reconstruction.
///
/// Skips the realizability precondition; callers that clip their inputs use this directly.
pub fn perturb_eigenspace(tau: &SymTensor3, spec: &PerturbationSpec, corners: &CornerSet) -> Result<PerturbedState> {
    let an = anisotropy_from_stress(tau);
    if an.degenerate {
        let x3 = corners.three_c;
        return Ok(PerturbedState {
            tau_star: *tau,
            lambda_star: [0.0; 3],
            v_star: crate::tensor::IDENTITY3,
            bary_before: x3,
            bary_after: x3,
            bary_target: x3,
            production_before: None,
            production_after: None,
            degenerate: true,
            redundant: spec.is_redundant(),
        });
    }

    let eig = eig_sym3(&an.a);
    let lambda = clamp_to_triangle(eig.values);
    let bary_before = corners.to_barycentric(&lambda)?;
    let bary_target = perturb_barycentric_with(corners, &bary_before, spec.target, spec.delta_b)?;
    let lambda_star = corners.from_barycentric(&bary_target)?;
    let v_star = permute_eigenvectors(&eig.vectors, spec.ev_mode)?;

    let a_star = SymTensor3::from_eigen(lambda_star, &v_star);
    let tau_star = (a_star + SymTensor3::identity() * (2.0 / 3.0)) * an.k;
    Ok(PerturbedState {
        tau_star,
        lambda_star,
        v_star,
        bary_before,
        bary_after: bary_target,
        bary_target,
        production_before: None,
        production_after: None,
        degenerate: false,
        redundant: spec.is_redundant(),
    })
}

pub fn perturb_legacy(tau: &SymTensor3, spec: &PerturbationSpec) -> Result<PerturbedState> {
    let f = spec.legacy_f.ok_or(EpfError::MissingModeration)?;
    let full = perturb_consistent(tau, &PerturbationSpec { legacy_f: None, ..*spec })?;
    let blended = moderated_stress_legacy(tau, &full.tau_star, f)?;
    Ok(PerturbedState {
        tau_star: blended,
        bary_after: stress_barycentric(&blended)?,
        ..full
    })
}

/// Legacy pipeline without the realizability precondition.
pub fn perturb_legacy_unchecked(tau: &SymTensor3, spec: &PerturbationSpec, corners: &CornerSet) -> Result<PerturbedState> {
    let f = spec.legacy_f.ok_or(EpfError::MissingModeration)?;
    let full = perturb_eigenspace(tau, &PerturbationSpec { legacy_f: None, ..*spec }, corners)?;
    let blended = moderated_stress_legacy(tau, &full.tau_star, f)?;
    Ok(PerturbedState { tau_star: blended, bary_after: stress_barycentric(&blended)?, ..full })
}

/// Barycentric position of a stress tensor's anisotropy (isotropic corner for `k ≤ K_FLOOR`).
pub fn stress_barycentric(tau: &SymTensor3) -> Result<BaryPoint> {
    let an = anisotropy_from_stress(tau);
    if an.degenerate {
        return Ok(STANDARD_CORNERS.three_c);
    }
    STANDARD_CORNERS.to_barycentric(&clamp_to_triangle(eig_sym3(&an.a).values))
}

/// Shrinks the anisotropy of `tau` toward isotropy just enough to make it
/// realizable (smallest eigenvalue `−2/3`); realizable input is returned unchanged.
pub fn clip_to_realizable(tau: &SymTensor3) -> SymTensor3 {
    let an = anisotropy_from_stress(tau);
    if an.degenerate {
        return *tau;
    }
    let lowest = eig_sym3(&an.a).values[2];
    if lowest >= -2.0 / 3.0 {
        return *tau;
    }
    let a = an.a * ((2.0 / 3.0) / -lowest);
    (a + SymTensor3::identity() * (2.0 / 3.0)) * an.k
}

/// Removes round-off that pushes a realizable spectrum past `λ3 = −2/3` or
/// breaks the trace, so that the barycentric map accepts it.
pub fn clamp_to_triangle(mut l: [f64; 3]) -> [f64; 3] {
    let mean = (l[0] + l[1] + l[2]) / 3.0;
    l.iter_mut().for_each(|v| *v -= mean);
    if l[2] < -2.0 / 3.0 && l[2] > -2.0 / 3.0 - 1e-10 {
        let excess = -2.0 / 3.0 - l[2];
        l[2] = -2.0 / 3.0;
        l[1] -= excess * 0.5;
        l[0] -= excess * 0.5;
        if l[1] < l[2] {
            l[1] = l[2];
            l[0] = -l[1] - l[2];
        }
    }
    l
}
