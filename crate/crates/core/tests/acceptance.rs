//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are still evaluated and printed;
//! they do not fail the run, but one of them passing does, so the list stays honest.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{runs, STRENGTH};
use epfkit::barycentric::{line_distance, to_barycentric, BaryPoint, Corner, STANDARD_CORNERS};
use epfkit::channel::{fit_log_law, perturbed_locus, solve_channel, ChannelConfig};
use epfkit::fixtures::{fixture_tensors, TENSOR_A, TENSOR_C};
use epfkit::perturbation::{
    perturb_consistent, perturb_legacy, production, stress_barycentric, EvMode, PerturbationSpec,
};
use epfkit::sampling::{instance_rng, random_realizable_stress, random_realizable_triple, random_rotation};
use epfkit::tensor::{anisotropy_from_stress, eig_sym3, SymTensor3};
use epfkit::trajectory::{blend_trajectory, FIXTURE_STEPS};
use epfkit::verify::{verify_lemmas, VerifyConfig};
use rand::Rng;

/// The log-law constants of the SST baseline miss the band; see the decisions ledger.
const KNOWN_UNATTAINABLE: &[u32] = &[7];

const SEED: u64 = 2024;
const MODES: [EvMode; 2] = [EvMode::ProductionMax, EvMode::ProductionMin];

struct Outcome {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn outcome(id: u32, title: &'static str, passed: bool, detail: String) -> Outcome {
    Outcome { id, title, passed, detail }
}

/// Printed values, row-major.
const A_PRINTED: [[f64; 3]; 3] = [[2.0, 0.5, -0.5], [0.5, 2.5, -0.5], [-0.5, -0.5, 1.5]];
const B_PRINTED: [[f64; 3]; 3] = [[2.19, 0.55, -1.11], [0.55, 3.02, -0.83], [-1.11, -0.83, 0.79]];
const C_PRINTED: [[f64; 3]; 3] = [[1.0, 0.5, 1.5], [0.5, 2.0, 0.0], [1.5, 0.0, 3.0]];

fn worst_entry(t: &SymTensor3, m: &[[f64; 3]; 3]) -> f64 {
    let tm = t.to_matrix();
    (0..9).map(|n| (tm[n / 3][n % 3] - m[n / 3][n % 3]).abs()).fold(0.0, f64::max)
}

fn all_pairings(rho: &[f64; 3], sigma: &[f64; 3]) -> (f64, f64) {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    perms
        .iter()
        .map(|p: &[usize; 3]| -(rho[0] * sigma[p[0]] + rho[1] * sigma[p[1]] + rho[2] * sigma[p[2]]))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn lemma_suites() -> Outcome {
    let start = Instant::now();
    let report = verify_lemmas(&VerifyConfig { seed: SEED, instances: 10_000, ..Default::default() });
    let elapsed = start.elapsed();
    let summary: Vec<String> = report.suites.iter().map(|s| format!("{} worst {:.1e}", s.name, s.worst)).collect();
    outcome(
        1,
        "eigenvalue-sum, convexity and collinearity suites on 10^4 instances",
        report.passed() && elapsed < Duration::from_secs(10),
        format!("{} in {elapsed:.2?}", summary.join(", ")),
    )
}

fn fixture_integrity() -> Outcome {
    let fx = fixture_tensors();
    let (a, c) = (worst_entry(&TENSOR_A, &A_PRINTED), worst_entry(&TENSOR_C, &C_PRINTED));
    let b = worst_entry(&fx.b, &B_PRINTED);
    outcome(
        2,
        "fixture tensors",
        a == 0.0 && c == 0.0 && b <= 0.005,
        format!("A exact {}, C exact {}, B vs printed {b:.4}", a == 0.0, c == 0.0),
    )
}

fn inconsistency_reproduction() -> Outcome {
    let fx = fixture_tensors();
    let chord = |r: &[epfkit::trajectory::TrajectoryRecord]| {
        let (p, q) = (r[0].bary, r[r.len() - 1].bary);
        r[1..r.len() - 1].iter().map(|x| line_distance(&x.bary, &p, &q)).collect::<Vec<_>>()
    };
    let ab = chord(&blend_trajectory(&fx.a, &fx.b, FIXTURE_STEPS).unwrap());
    let ac = chord(&blend_trajectory(&fx.a, &fx.c, FIXTURE_STEPS).unwrap());
    let ab_max = ab.iter().copied().fold(0.0, f64::max);
    let ac_min = ac.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        3,
        "A-C trajectory bends, A-B stays on the chord",
        ac_min > 0.01 && ab_max < 1e-10,
        format!("A-C interior min {ac_min:.4}, A-B interior max {ab_max:.1e}"),
    )
}

fn moderation_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let tau = random_realizable_stress(&mut instance_rng(SEED, i));
        for target in Corner::ALL {
            for n in 1..=9 {
                let f = n as f64 / 10.0;
                let legacy = perturb_legacy(&tau, &PerturbationSpec::legacy(target, 1.0, EvMode::ProductionMax, f).unwrap());
                let reduced = perturb_consistent(&tau, &PerturbationSpec::consistent(target, f, EvMode::ProductionMax).unwrap());
                worst = match (legacy, reduced) {
                    (Ok(l), Ok(r)) => worst.max(l.tau_star.max_component_diff(&r.tau_star)),
                    _ => f64::INFINITY,
                };
            }
        }
    }
    outcome(4, "legacy f equals consistent delta_b = f", worst <= 1e-10, format!("worst component {worst:.1e}"))
}

fn self_consistency() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let mut rng = instance_rng(SEED ^ 5, i);
        let tau = random_realizable_stress(&mut rng);
        let delta_b: f64 = rng.random();
        let l = eig_sym3(&anisotropy_from_stress(&tau).a).values;
        let x = to_barycentric(&l).unwrap();
        for target in Corner::ALL {
            let c = STANDARD_CORNERS.corner(target);
            let expected = BaryPoint::new(x.x + delta_b * (c.x - x.x), x.y + delta_b * (c.y - x.y));
            for mode in MODES {
                let out = perturb_consistent(&tau, &PerturbationSpec::consistent(target, delta_b, mode).unwrap()).unwrap();
                worst = worst.max(stress_barycentric(&out.tau_star).unwrap().distance(&expected));
            }
        }
    }
    outcome(5, "perturbed states land on their targets", worst <= 1e-10, format!("worst distance {worst:.1e}"))
}

fn production_bounds_check() -> Outcome {
    let (mut attain, mut inside_margin, mut inside_failures) = (0.0f64, f64::INFINITY, 0usize);
    let cases = 1000;
    for i in 0..cases {
        let mut rng = instance_rng(SEED ^ 6, i);
        let v = random_rotation(&mut rng);
        let mut l = random_realizable_triple(&mut rng);
        if l[0] - l[2] < 0.05 {
            l = [0.3, 0.0, -0.3];
        }
        let k = 0.2 + rng.random::<f64>();
        let tau = (SymTensor3::from_eigen(l, &v) + SymTensor3::identity() * (2.0 / 3.0)) * k;
        let gain = 0.1 + rng.random::<f64>();
        // strain opposed to the anisotropy, as an eddy-viscosity closure produces
        let strain = SymTensor3::from_eigen(l.map(|x| -gain * x), &v);
        let sigma = eig_sym3(&strain).values;
        let delta_b: f64 = rng.random();
        let f = 0.1 + 0.8 * rng.random::<f64>();
        for target in Corner::ALL {
            for mode in MODES {
                let out = perturb_consistent(&tau, &PerturbationSpec::consistent(target, delta_b, mode).unwrap()).unwrap();
                let rho = eig_sym3(&out.tau_star).values;
                let (lo, hi) = all_pairings(&rho, &sigma);
                let p = production(&out.tau_star, &strain);
                let bound = if mode == EvMode::ProductionMax { hi } else { lo };
                attain = attain.max((p - bound).abs() / (1.0 + bound.abs()));
            }
            if target == Corner::ThreeC {
                // the full isotropic minimizing move is the redundant sphere and not a campaign member
                continue;
            }
            // interval of the state the moderated move stands for: a consistent move by Δ_B = f
            let reduced = perturb_consistent(&tau, &PerturbationSpec::consistent(target, f, EvMode::ProductionMin).unwrap()).unwrap();
            let (lo, hi) = all_pairings(&eig_sym3(&reduced.tau_star).values, &sigma);
            let out = perturb_legacy(&tau, &PerturbationSpec::legacy(target, 1.0, EvMode::ProductionMin, f).unwrap()).unwrap();
            let p = production(&out.tau_star, &strain);
            let margin = (p - lo).min(hi - p);
            inside_margin = inside_margin.min(margin);
            if margin <= 1e-9 {
                inside_failures += 1;
            }
        }
    }
    outcome(
        6,
        "production extremes attained, legacy blends strictly inside",
        attain <= 1e-9 && inside_failures == 0,
        format!("worst attainment gap {attain:.1e}, smallest legacy margin {inside_margin:.2e} over {} blends", cases * 2),
    )
}

fn channel_baseline() -> Outcome {
    let cfg = ChannelConfig::default();
    let start = Instant::now();
    let b = solve_channel(&cfg).unwrap();
    let elapsed = start.elapsed();
    let fit = fit_log_law(&b, 30.0, 300.0);
    let sublayer = b
        .y_plus
        .iter()
        .zip(&b.u_plus)
        .filter(|(y, _)| **y < 5.0)
        .map(|(y, u)| (u / y - 1.0).abs())
        .fold(0.0, f64::max);
    let converged = b.converged && b.final_residual < 1e-8 && elapsed < Duration::from_secs(60);
    let (kappa, intercept) = fit.map(|f| (f.kappa, f.intercept)).unwrap_or((f64::NAN, f64::NAN));
    let log_law = (0.38..=0.43).contains(&kappa) && (4.5..=5.8).contains(&intercept);
    outcome(
        7,
        "SST baseline at Re_tau 1000",
        converged && log_law && sublayer < 0.05,
        format!(
            "converged {converged} ({} iterations, residual {:.1e}, {elapsed:.2?}); log law 30<y+<300 kappa {kappa:.4} B {intercept:.3} \
             (band kappa 0.38-0.43, B 4.5-5.8); sublayer worst {:.2}%",
            b.iterations,
            b.final_residual,
            100.0 * sublayer
        ),
    )
}

fn laminarization() -> Outcome {
    let r = runs();
    let laminar = r.config.re_tau / 2.0;
    let members: Vec<_> = r
        .legacy
        .members
        .iter()
        .chain(&r.consistent.members)
        .filter(|m| m.spec.ev_mode == EvMode::ProductionMin)
        .collect();
    let worst = members.iter().map(|m| (m.solution.centerline_u_plus() / laminar - 1.0).abs()).fold(0.0, f64::max);
    let all = members.iter().all(|m| m.solution.laminarized);
    outcome(
        8,
        "production-minimizing members laminarize",
        all && worst <= 0.05 && !members.is_empty(),
        format!("{} members, all flagged {all}, worst centreline deviation from {laminar} is {:.3}%", members.len(), 100.0 * worst),
    )
}

fn envelope_equivalence() -> Outcome {
    let r = runs();
    let diff = r.legacy.envelope.max_difference(&r.consistent.envelope);
    let tol = 10.0 * r.config.conv_tol;
    outcome(9, "legacy and consistent envelopes agree", diff <= tol, format!("max difference {diff:.1e} (tolerance {tol:.0e})"))
}

fn barycentric_contrast() -> Outcome {
    let b = &runs().baseline;
    let mut on = 0.0f64;
    for target in Corner::ALL {
        for mode in MODES {
            let spec = PerturbationSpec::consistent(target, STRENGTH, mode).unwrap();
            on = perturbed_locus(b, &spec).unwrap().iter().map(|p| p.segment_distance).fold(on, f64::max);
        }
    }
    let mut off = f64::INFINITY;
    for target in [Corner::OneC, Corner::TwoC] {
        let spec = PerturbationSpec::legacy(target, 1.0, EvMode::ProductionMin, STRENGTH).unwrap();
        off = perturbed_locus(b, &spec)
            .unwrap()
            .iter()
            .filter(|p| p.spread >= 0.3)
            .map(|p| p.segment_distance)
            .fold(off, f64::min);
    }
    outcome(
        10,
        "consistent states on segments, legacy minimizing states off",
        on < 1e-6 && off > 0.01,
        format!("consistent worst {on:.1e}; legacy min off-segment {off:.4} on cells with spread >= 0.3"),
    )
}

fn main() -> ExitCode {
    let checks: [fn() -> Outcome; 10] = [
        lemma_suites,
        fixture_integrity,
        inconsistency_reproduction,
        moderation_equivalence,
        self_consistency,
        production_bounds_check,
        channel_baseline,
        laminarization,
        envelope_equivalence,
        barycentric_contrast,
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for check in checks {
        let o = check();
        let known = KNOWN_UNATTAINABLE.contains(&o.id);
        let tag = match (o.passed, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{tag} {:>2} {}: {}", o.id, o.title, o.detail);
        passed += usize::from(o.passed);
        if o.passed == known {
            unexpected.push(o.id);
        }
    }
    println!("{passed}/10 criteria pass");
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("criteria with unexpected outcome: {unexpected:?}");
        ExitCode::FAILURE
    }
}
