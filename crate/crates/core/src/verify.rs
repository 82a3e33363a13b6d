//! Randomized invariant suites behind `epfkit verify`.
//!
//! Each suite draws `instances` seeded cases (one ChaCha stream per case),
//! evaluates a residual and reports the worst one against its tolerance.

use rand::Rng;
use serde::Serialize;

use crate::barycentric::{aim_contains, aim_coords, choi_contains, choi_coords, line_distance, Corner, CornerSet};
use crate::exec::{self, Execution};
use crate::fixtures::{self, TENSOR_B_PRINTED};
use crate::perturbation::{
    clamp_to_triangle, perturb_eigenspace, perturb_legacy_unchecked, production, production_bounds, EvMode,
    PerturbationSpec,
};
use crate::sampling::{
    instance_rng, random_psd, random_realizable_stress, random_realizable_triple, random_rotation, random_symmetric,
};
use crate::tensor::{
    anisotropy_from_stress, column, det3, dot, eig_sym3, mat_mul, mat_vec, orthonormality_error, validate_realizability, SymTensor3,
    REALIZABILITY_EPS,
};

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub instances: usize,
    pub corners: CornerSet,
    pub exec: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 0, instances: 10_000, corners: crate::barycentric::STANDARD_CORNERS, exec: Execution::Parallel }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub instances: usize,
    pub failures: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl std::fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:<28} instances={:<6} failures={:<5} worst={:.3e} tol={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.instances,
            self.failures,
            self.worst,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.suites.iter().filter(|s| !s.passed).map(|s| s.name).collect()
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

/// A residual of `None` marks a case that could not be evaluated at all.
fn run_suite<F>(name: &'static str, cfg: &VerifyConfig, salt: u64, tolerance: f64, case: F) -> SuiteResult
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Option<f64> + Sync + Send,
{
    let seed = cfg.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let residuals = exec::map_range(cfg.exec, cfg.instances, |i| case(&mut instance_rng(seed, i as u64)));
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for r in residuals {
        match r {
            Some(r) if r.is_finite() => {
                worst = worst.max(r);
                if r > tolerance {
                    failures += 1;
                }
            }
            _ => {
                worst = f64::INFINITY;
                failures += 1;
            }
        }
    }
    SuiteResult { name, instances: cfg.instances, failures, worst, tolerance, passed: failures == 0 }
}

/// Tensors sharing eigenvectors add their eigenvalues pairwise; pairs are
/// matched through the shared vectors, not through sort order.
pub fn suite_commuting_sums(cfg: &VerifyConfig) -> SuiteResult {
    run_suite("commuting-eigenvalue-sums", cfg, 9, 1e-10, |rng| {
        let v = random_rotation(rng);
        let rx = [rng.random_range(0.0..5.0), rng.random_range(0.0..5.0), rng.random_range(0.0..5.0)];
        let ry = [rng.random_range(0.0..5.0), rng.random_range(0.0..5.0), rng.random_range(0.0..5.0)];
        let sum = SymTensor3::from_eigen(rx, &v) + SymTensor3::from_eigen(ry, &v);
        let e = eig_sym3(&sum);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            let c = column(&v, i);
            // the computed eigenpair whose vector is most parallel to the shared one
            let j = (0..3).max_by(|&a, &b| dot(&e.column(a), &c).abs().total_cmp(&dot(&e.column(b), &c).abs()))?;
            let paired = if dot(&e.column(j), &c).abs() > 0.999 { e.values[j] } else { rayleigh(&sum, &c) };
            worst = worst.max((paired - (rx[i] + ry[i])).abs());
        }
        Some(worst / sum.max_abs().max(1.0))
    })
}

fn rayleigh(t: &SymTensor3, c: &[f64; 3]) -> f64 {
    dot(c, &mat_vec(&t.to_matrix(), c))
}

/// Blends of PSD tensors stay PSD; residual is the worst constraint violation.
pub fn suite_convex_blend(cfg: &VerifyConfig) -> SuiteResult {
    run_suite("convex-blend-realizability", cfg, 1, 0.0, |rng| {
        let (x, y) = (random_psd(rng, 5.0), random_psd(rng, 5.0));
        let f = match rng.random_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random(),
        };
        let r = validate_realizability(&x.lerp(&y, f), REALIZABILITY_EPS);
        Some(if r.is_realizable { 0.0 } else { r.violations.iter().map(|v| v.1.abs()).fold(0.0, f64::max) + 1.0 })
    })
}

/// Commuting, co-ordered, equal-trace pairs map linearly onto the chord.
pub fn suite_commuting_linearity(cfg: &VerifyConfig) -> SuiteResult {
    let corners = cfg.corners;
    run_suite("commuting-blend-linearity", cfg, 2, 1e-10, move |rng| {
        let v = random_rotation(rng);
        let k = 0.1 + 2.0 * rng.random::<f64>();
        let lx = random_realizable_triple(rng);
        let ly = random_realizable_triple(rng);
        let x = (SymTensor3::from_eigen(lx, &v) + SymTensor3::identity() * (2.0 / 3.0)) * k;
        let y = (SymTensor3::from_eigen(ly, &v) + SymTensor3::identity() * (2.0 / 3.0)) * k;
        let f: f64 = rng.random();
        let bx = corners.to_barycentric(&lx).ok()?;
        let by = corners.to_barycentric(&ly).ok()?;
        let z = anisotropy_from_stress(&x.lerp(&y, f));
        let bz = corners.to_barycentric(&clamp_to_triangle(eig_sym3(&z.a).values)).ok()?;
        Some(bz.distance(&bx.lerp(&by, f)).max(if bx.distance(&by) > 1e-6 { line_distance(&bz, &bx, &by) } else { 0.0 }))
    })
}

/// `x ↦ λ ↦ x` and `λ ↦ x ↦ λ` reproduce their inputs.
pub fn suite_barycentric_round_trip(cfg: &VerifyConfig) -> SuiteResult {
    let corners = cfg.corners;
    run_suite("barycentric-round-trip", cfg, 3, 1e-12, move |rng| {
        let l = random_realizable_triple(rng);
        let p = corners.to_barycentric(&l).ok()?;
        let back = corners.from_barycentric(&p).ok()?;
        let forward = corners.to_barycentric(&back).ok()?;
        Some(l.iter().zip(back).map(|(a, b)| (a - b).abs()).fold(p.distance(&forward), f64::max))
    })
}

/// Realizable tensors land inside the barycentric triangle, the Lumley
/// triangle and the Choi-Lumley region; anisotropy bounds hold.
pub fn suite_map_regions(cfg: &VerifyConfig) -> SuiteResult {
    let corners = cfg.corners;
    run_suite("map-regions", cfg, 4, 1e-10, move |rng| {
        let tau = random_realizable_stress(rng);
        let an = anisotropy_from_stress(&tau);
        let l = clamp_to_triangle(eig_sym3(&an.a).values);
        let p = corners.to_barycentric(&l).ok()?;
        let w = corners.weights(&p)?;
        let mut worst = w.iter().map(|w| (-w).max(0.0)).fold(0.0, f64::max);
        let a = an.a;
        for d in [a.xx, a.yy, a.zz] {
            worst = worst.max((-2.0 / 3.0 - d).max(d - 4.0 / 3.0));
        }
        for o in [a.xy, a.xz, a.yz] {
            worst = worst.max(o.abs() - 1.0);
        }
        worst = worst.max((3.0 * l[1].abs() - l[1]) / 2.0 - l[0]).max(l[0] - (2.0 / 3.0 - l[1]));
        if !aim_contains(&aim_coords(&l), 1e-9) || !choi_contains(&choi_coords(&l), 1e-9) {
            worst = worst.max(1.0);
        }
        Some(worst)
    })
}

/// Closed-form eigendecomposition reconstructs its input with a proper orthonormal basis.
pub fn suite_eigendecomposition(cfg: &VerifyConfig) -> SuiteResult {
    run_suite("eigendecomposition", cfg, 5, 1e-10, |rng| {
        let a = random_symmetric(rng);
        let e = eig_sym3(&a);
        let scale = a.max_abs().max(1.0);
        let sorted = e.values[0] >= e.values[1] && e.values[1] >= e.values[2];
        let recon = e.reconstruct().max_component_diff(&a) / scale;
        let ortho = orthonormality_error(&e.vectors) * 1e2;
        let handed = (det3(&e.vectors) - 1.0).abs() * 1e2;
        Some(if sorted { recon.max(ortho).max(handed) } else { f64::INFINITY })
    })
}

fn perturbation_cases<R: Rng>(rng: &mut R) -> (SymTensor3, PerturbationSpec) {
    let tau = random_realizable_stress(rng);
    let target = Corner::ALL[rng.random_range(0..3)];
    let ev_mode = if rng.random::<bool>() { EvMode::ProductionMax } else { EvMode::ProductionMin };
    let delta_b = [0.0, 0.25, 0.5, 1.0, rng.random()][rng.random_range(0..5)];
    (tau, PerturbationSpec { target, delta_b, ev_mode, legacy_f: None })
}

/// Perturbed stresses are realizable, keep `k`, and sit on the requested point.
pub fn suite_perturbation(cfg: &VerifyConfig) -> SuiteResult {
    let corners = cfg.corners;
    run_suite("perturbation-consistency", cfg, 6, 1e-10, move |rng| {
        let (tau, spec) = perturbation_cases(rng);
        let out = perturb_eigenspace(&tau, &spec, &corners).ok()?;
        let r = validate_realizability(&out.tau_star, REALIZABILITY_EPS);
        if !r.is_realizable {
            return Some(1.0);
        }
        let an = anisotropy_from_stress(&out.tau_star);
        let l = clamp_to_triangle(eig_sym3(&an.a).values);
        let landed = corners.to_barycentric(&l).ok()?;
        let expected = out.bary_before.lerp(&corners.corner(spec.target), spec.delta_b);
        Some((out.tau_star.trace() - tau.trace()).abs().max(landed.distance(&expected)))
    })
}

/// Without permutation, legacy moderation by `f` equals a consistent move by `Δ_B = f`.
pub fn suite_moderation_equivalence(cfg: &VerifyConfig) -> SuiteResult {
    let corners = cfg.corners;
    run_suite("moderation-equivalence", cfg, 7, 1e-10, move |rng| {
        let tau = random_realizable_stress(rng);
        let target = Corner::ALL[rng.random_range(0..3)];
        let f = 0.1 + 0.8 * rng.random::<f64>();
        let legacy = PerturbationSpec { target, delta_b: 1.0, ev_mode: EvMode::ProductionMax, legacy_f: Some(f) };
        let consistent = PerturbationSpec { target, delta_b: f, ev_mode: EvMode::ProductionMax, legacy_f: None };
        let a = perturb_legacy_unchecked(&tau, &legacy, &corners).ok()?;
        let b = perturb_eigenspace(&tau, &consistent, &corners).ok()?;
        Some(a.tau_star.max_component_diff(&b.tau_star))
    })
}

/// Least and greatest `−Σ ρ_i σ_π(i)` over the six pairings.
pub fn brute_force_production_range(rho: &[f64; 3], sigma: &[f64; 3]) -> (f64, f64) {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS.iter().map(|p| -(0..3).map(|i| rho[i] * sigma[p[i]]).sum::<f64>()).fold(
        (f64::INFINITY, f64::NEG_INFINITY),
        |(lo, hi), v| (lo.min(v), hi.max(v)),
    )
}

/// Shared-eigenvector configurations reach the production extremes, and the
/// legacy blend of the minimizing state stays strictly between them.
pub fn suite_production_extremes(cfg: &VerifyConfig) -> SuiteResult {
    let corners = cfg.corners;
    run_suite("production-extremes", cfg, 8, 1e-9, move |rng| {
        let v = random_rotation(rng);
        let k = 0.2 + rng.random::<f64>();
        let mut lambda = random_realizable_triple(rng);
        // keep the state visibly anisotropic so the strictness margin is resolvable
        if lambda[0] - lambda[2] < 0.05 {
            lambda = [0.3, 0.0, -0.3];
        }
        let mut sigma: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 0.0];
        sigma[2] = -sigma[0] - sigma[1];
        sigma.sort_by(|a, b| b.total_cmp(a));
        if sigma[0] - sigma[2] < 0.1 {
            sigma = [0.5, 0.0, -0.5];
        }
        // eddy-viscosity pairing: largest stress along the most compressive strain
        let s = SymTensor3::from_eigen([sigma[2], sigma[1], sigma[0]], &v);
        let tau = (SymTensor3::from_eigen(lambda, &v) + SymTensor3::identity() * (2.0 / 3.0)) * k;
        let target = Corner::ALL[rng.random_range(0..3)];
        let f = 0.1 + 0.8 * rng.random::<f64>();

        let mut worst: f64 = 0.0;
        for mode in [EvMode::ProductionMax, EvMode::ProductionMin] {
            let spec = PerturbationSpec { target, delta_b: f, ev_mode: mode, legacy_f: None };
            let out = perturb_eigenspace(&tau, &spec, &corners).ok()?;
            let rho = out.lambda_star.map(|l| k * (l + 2.0 / 3.0));
            let (lo, hi) = production_bounds(&rho, &sigma).ok()?;
            let (blo, bhi) = brute_force_production_range(&rho, &sigma);
            let p = production(&out.tau_star, &s);
            let attained = if mode == EvMode::ProductionMax { (p - hi).abs() } else { (p - lo).abs() };
            worst = worst.max(attained).max((lo - blo).abs()).max((hi - bhi).abs());
            if mode == EvMode::ProductionMin {
                let legacy = PerturbationSpec { target, delta_b: 1.0, ev_mode: mode, legacy_f: Some(f) };
                let blended = perturb_legacy_unchecked(&tau, &legacy, &corners).ok()?;
                let pl = production(&blended.tau_star, &s);
                if pl <= lo + 1e-9 || pl > hi + 1e-9 || (target != Corner::ThreeC && pl >= hi - 1e-9) {
                    worst = worst.max(1.0);
                }
            }
        }
        Some(worst)
    })
}

/// Fixture tensors: PSD, equal trace, `A` and `B` commute, `B` matches its printed digits.
pub fn suite_fixtures() -> SuiteResult {
    let fx = fixtures::fixture_tensors();
    let printed = SymTensor3::from_matrix(&TENSOR_B_PRINTED).map(|p| fx.b.max_component_diff(&p)).unwrap_or(f64::INFINITY);
    // printed to two decimals
    let mut worst = if printed <= 0.005 { 0.0 } else { f64::INFINITY };
    for t in [&fx.a, &fx.b, &fx.c] {
        if !validate_realizability(t, REALIZABILITY_EPS).is_realizable {
            worst = f64::INFINITY;
        }
        worst = worst.max((t.trace() - 6.0).abs());
    }
    let (ma, mb) = (fx.a.to_matrix(), fx.b.to_matrix());
    let (ab, ba) = (mat_mul(&ma, &mb), mat_mul(&mb, &ma));
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((ab[i][j] - ba[i][j]).abs());
        }
    }
    let tolerance = 1e-9;
    SuiteResult { name: "fixture-integrity", instances: 1, failures: usize::from(worst > tolerance), worst, tolerance, passed: worst <= tolerance }
}

/// The four suites that back the eigenvalue-sum, convexity, linearity and fixture claims.
pub fn verify_lemmas(cfg: &VerifyConfig) -> VerifyReport {
    VerifyReport {
        seed: cfg.seed,
        suites: vec![
            suite_commuting_sums(cfg),
            suite_convex_blend(cfg),
            suite_commuting_linearity(cfg),
            suite_fixtures(),
        ],
    }
}

pub fn run_all(cfg: &VerifyConfig) -> VerifyReport {
    let mut report = verify_lemmas(cfg);
    report.suites.extend([
        suite_eigendecomposition(cfg),
        suite_barycentric_round_trip(cfg),
        suite_map_regions(cfg),
        suite_perturbation(cfg),
        suite_moderation_equivalence(cfg),
        suite_production_extremes(cfg),
    ]);
    report
}
