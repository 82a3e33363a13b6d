//! Randomized invariants over the tensor, map, perturbation and config layers.

use epfkit::barycentric::{
    aim_contains, aim_coords, choi_contains, choi_coords, from_barycentric, line_distance, to_barycentric, Corner,
    STANDARD_CORNERS,
};
use epfkit::cli::config::RunConfig;
use epfkit::perturbation::{
    perturb_consistent, perturb_legacy, production, production_bounds, stress_barycentric, EvMode, PerturbationSpec,
};
use epfkit::tensor::{
    anisotropy_from_stress, column, det3, dot, eig_sym3, validate_realizability, Mat3, SymTensor3, REALIZABILITY_EPS,
};
use epfkit::trajectory::blend_trajectory;
use proptest::prelude::*;

const MODES: [EvMode; 2] = [EvMode::ProductionMax, EvMode::ProductionMin];

fn rotation_from(q: [f64; 4]) -> Mat3 {
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|c| c / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn rotation() -> impl Strategy<Value = Mat3> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("quaternion away from zero", |q| q.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(rotation_from)
}

fn spectrum() -> impl Strategy<Value = [f64; 3]> {
    prop_oneof![
        4 => prop::array::uniform3(0.0f64..3.0),
        1 => (0.0f64..3.0, 0.0f64..3.0).prop_map(|(a, b)| [a, a, b]),
        1 => (0.0f64..3.0).prop_map(|a| [a, 0.0, 0.0]),
    ]
}

fn psd() -> impl Strategy<Value = SymTensor3> {
    (spectrum(), rotation()).prop_map(|(rho, v)| SymTensor3::from_eigen(rho, &v))
}

/// Realizable stress with nonzero kinetic energy.
fn stress() -> impl Strategy<Value = SymTensor3> {
    psd().prop_filter("nonzero trace", |t| t.trace() > 1e-3)
}

/// Sorted traceless spectrum of a realizable anisotropy via uniform triangle weights.
fn realizable_triple() -> impl Strategy<Value = [f64; 3]> {
    (0.0f64..1.0, 0.0f64..1.0).prop_map(|(mut r1, mut r2)| {
        if r1 + r2 > 1.0 {
            r1 = 1.0 - r1;
            r2 = 1.0 - r2;
        }
        let c = STANDARD_CORNERS;
        let w3 = 1.0 - r1 - r2;
        let p = epfkit::BaryPoint::new(
            r1 * c.one_c.x + r2 * c.two_c.x + w3 * c.three_c.x,
            r1 * c.one_c.y + r2 * c.two_c.y + w3 * c.three_c.y,
        );
        from_barycentric(&p).unwrap()
    })
}

fn corner() -> impl Strategy<Value = Corner> {
    prop::sample::select(Corner::ALL.to_vec())
}

fn mode() -> impl Strategy<Value = EvMode> {
    prop::sample::select(MODES.to_vec())
}

/// Two spectra sorted the same way, so blends never reorder eigenvalues.
fn co_ordered() -> impl Strategy<Value = ([f64; 3], [f64; 3])> {
    (spectrum(), spectrum()).prop_map(|(a, b)| (sorted_desc(a), sorted_desc(b)))
}

fn sorted_desc(mut v: [f64; 3]) -> [f64; 3] {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn anisotropy_components_stay_bounded(tau in stress()) {
        let a = anisotropy_from_stress(&tau).a;
        for d in [a.xx, a.yy, a.zz] {
            prop_assert!((-2.0 / 3.0 - 1e-12..=4.0 / 3.0 + 1e-12).contains(&d));
        }
        for o in [a.xy, a.xz, a.yz] {
            prop_assert!(o.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn eigensystem_reconstructs(values in prop::array::uniform3(-5.0f64..5.0), v in rotation()) {
        let t = SymTensor3::from_eigen(values, &v);
        let e = eig_sym3(&t);
        let scale = t.max_abs().max(1.0);
        prop_assert!(e.reconstruct().max_component_diff(&t) <= 1e-10 * scale);
        prop_assert!(e.values[0] >= e.values[1] && e.values[1] >= e.values[2]);
        prop_assert!((det3(&e.vectors) - 1.0).abs() < 1e-10);
        prop_assert_eq!(e, eig_sym3(&t));
    }

    #[test]
    fn realizable_eigenvalues_satisfy_ordering_bounds(tau in stress()) {
        let l = eig_sym3(&anisotropy_from_stress(&tau).a).values;
        prop_assert!(l[0] >= (3.0 * l[1].abs() - l[1]) / 2.0 - 1e-10);
        prop_assert!(l[0] <= 2.0 / 3.0 - l[1] + 1e-10);
    }

    #[test]
    fn psd_blends_stay_realizable(x in psd(), y in psd(), f in 0.0f64..=1.0) {
        let r = validate_realizability(&x.lerp(&y, f), REALIZABILITY_EPS);
        prop_assert!(r.is_realizable, "{:?}", r.violations);
    }

    #[test]
    fn commuting_sum_pairs_eigenvalues_by_vector(
        rx in prop::array::uniform3(0.0f64..3.0),
        ry in prop::array::uniform3(0.0f64..3.0),
        v in rotation(),
    ) {
        let sum = SymTensor3::from_eigen(rx, &v) + SymTensor3::from_eigen(ry, &v);
        let e = eig_sym3(&sum);
        // Rayleigh quotient on each shared vector gives the paired value directly.
        let m = sum.to_matrix();
        for i in 0..3 {
            let c = column(&v, i);
            let mc = [dot(&m[0], &c), dot(&m[1], &c), dot(&m[2], &c)];
            prop_assert!((dot(&c, &mc) - (rx[i] + ry[i])).abs() < 1e-10);
        }
        let expected = sorted_desc([rx[0] + ry[0], rx[1] + ry[1], rx[2] + ry[2]]);
        for i in 0..3 {
            prop_assert!((e.values[i] - expected[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn barycentric_round_trip(l in realizable_triple()) {
        let back = from_barycentric(&to_barycentric(&l).unwrap()).unwrap();
        for i in 0..3 {
            prop_assert!((back[i] - l[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn commuting_blends_interpolate_linearly((rx, ry) in co_ordered(), v in rotation(), f in 0.0f64..=1.0) {
        let (x, y) = (SymTensor3::from_eigen(rx, &v), SymTensor3::from_eigen(ry, &v));
        prop_assume!(x.trace() > 1e-3 && y.trace() > 1e-3);
        // equal traces keep k fixed along the blend, so map points mix with weight f
        let y = y * (x.trace() / y.trace());
        let (px, py) = (stress_barycentric(&x).unwrap(), stress_barycentric(&y).unwrap());
        let mid = stress_barycentric(&x.lerp(&y, f)).unwrap();
        prop_assert!(mid.distance(&px.lerp(&py, f)) < 1e-10);
    }

    #[test]
    fn maps_stay_in_their_regions(tau in stress()) {
        let l = eig_sym3(&anisotropy_from_stress(&tau).a).values;
        let p = stress_barycentric(&tau).unwrap();
        prop_assert!(STANDARD_CORNERS.contains(&p, 1e-10));
        prop_assert!(aim_contains(&aim_coords(&l), 1e-10));
        prop_assert!(choi_contains(&choi_coords(&l), 1e-10));
    }

    #[test]
    fn perturbation_preserves_realizability_and_trace(
        tau in stress(), t in corner(), m in mode(), d in prop::sample::select(vec![0.0, 0.25, 0.5, 1.0]),
    ) {
        let out = perturb_consistent(&tau, &PerturbationSpec::consistent(t, d, m).unwrap()).unwrap();
        let r = validate_realizability(&out.tau_star, REALIZABILITY_EPS);
        prop_assert!(r.is_realizable, "{:?}", r.violations);
        prop_assert!((out.tau_star.trace() - tau.trace()).abs() <= 1e-10 * tau.trace());
    }

    #[test]
    fn perturbed_state_lands_on_its_target(tau in stress(), t in corner(), m in mode(), d in 0.0f64..=1.0) {
        let out = perturb_consistent(&tau, &PerturbationSpec::consistent(t, d, m).unwrap()).unwrap();
        let x = out.bary_before;
        let c = STANDARD_CORNERS.corner(t);
        let target = epfkit::BaryPoint::new(x.x + d * (c.x - x.x), x.y + d * (c.y - x.y));
        prop_assert!(stress_barycentric(&out.tau_star).unwrap().distance(&target) < 1e-10);
    }

    #[test]
    fn moderation_matches_reduced_move(tau in stress(), t in corner(), i in 1usize..=9) {
        let f = i as f64 / 10.0;
        let legacy = perturb_legacy(&tau, &PerturbationSpec::legacy(t, 1.0, EvMode::ProductionMax, f).unwrap()).unwrap();
        let reduced = perturb_consistent(&tau, &PerturbationSpec::consistent(t, f, EvMode::ProductionMax).unwrap()).unwrap();
        prop_assert!(legacy.tau_star.max_component_diff(&reduced.tau_star) < 1e-10 * tau.trace().max(1.0));
    }

    #[test]
    fn aligned_strain_hits_production_extremes(
        tau in stress(), t in corner(), d in 0.0f64..=1.0, sigma_scale in 0.1f64..3.0,
    ) {
        let an = anisotropy_from_stress(&tau);
        let e = eig_sym3(&an.a);
        prop_assume!(e.values[0] - e.values[1] > 1e-3 && e.values[1] - e.values[2] > 1e-3);
        // strain opposite to the anisotropy, as a linear eddy viscosity model sets it
        let strain = SymTensor3::from_eigen(e.values.map(|l| -sigma_scale * l), &e.vectors);
        let sigma = eig_sym3(&strain).values;

        let max = perturb_consistent(&tau, &PerturbationSpec::consistent(t, d, EvMode::ProductionMax).unwrap()).unwrap();
        let rho = eig_sym3(&max.tau_star).values;
        let (_, hi) = production_bounds(&rho, &sigma).unwrap();
        prop_assert!((production(&max.tau_star, &strain) - hi).abs() < 1e-9 * (1.0 + hi.abs()));

        let min = perturb_consistent(&tau, &PerturbationSpec::consistent(t, d, EvMode::ProductionMin).unwrap()).unwrap();
        let rho = eig_sym3(&min.tau_star).values;
        let (lo, _) = production_bounds(&rho, &sigma).unwrap();
        prop_assert!((production(&min.tau_star, &strain) - lo).abs() < 1e-9 * (1.0 + lo.abs()));
    }

    #[test]
    fn trajectories_are_ordered_and_inside(x in stress(), y in stress(), n in 2usize..40) {
        let r = blend_trajectory(&x, &y, n).unwrap();
        prop_assert_eq!(r.len(), n);
        prop_assert!(r.windows(2).all(|w| w[1].f > w[0].f));
        prop_assert!(r.iter().all(|p| STANDARD_CORNERS.contains(&p.bary, 1e-10)));
        prop_assert!(r[0].bary.distance(&stress_barycentric(&x).unwrap()) < 1e-12);
        prop_assert!(r[n - 1].bary.distance(&stress_barycentric(&y).unwrap()) < 1e-12);
    }

    #[test]
    fn commuting_trajectories_are_straight((rx, ry) in co_ordered(), v in rotation()) {
        let (x, y) = (SymTensor3::from_eigen(rx, &v), SymTensor3::from_eigen(ry, &v));
        prop_assume!(x.trace() > 1e-3 && y.trace() > 1e-3);
        let r = blend_trajectory(&x, &y, 11).unwrap();
        for p in &r {
            prop_assert!(line_distance(&p.bary, &r[0].bary, &r[10].bary) < 1e-10);
        }
    }

    #[test]
    fn config_canonical_form_is_a_fixed_point(
        re in 100.0f64..5000.0,
        n in 50usize..400,
        stretch in 1.0f64..1.2,
        tol in 1e-12f64..1e-4,
        relax in 0.05f64..1.0,
        strength in 0.05f64..=1.0,
        t in corner(),
        m in mode(),
        d in 0.0f64..=1.0,
    ) {
        let text = format!(
            "[flow]\nre_tau = {re}\n[grid]\nn_cells = {n}\nstretching = {stretch}\n\
             [solver]\nconv_tol = {tol:e}\nrelax_momentum = {relax}\n\
             [perturbation]\ntarget = \"{t}\"\ndelta_b = {d}\nev_mode = \"{m}\"\n\
             [campaign]\nkind = \"both\"\nstrength = {strength}\n"
        );
        let cfg = match RunConfig::parse(&text) {
            Ok(c) => c,
            Err(e) => return Err(TestCaseError::reject(e.to_string())),
        };
        let canon = cfg.canonical();
        let again = RunConfig::parse(&canon).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.canonical(), canon);
        prop_assert_eq!(again.digest(), cfg.digest());
    }
}
