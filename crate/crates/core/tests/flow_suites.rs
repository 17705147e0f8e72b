use std::f64::consts::PI;

use approx::assert_relative_eq;
use ricci4_core::estimates::{run_suite, Status, Suite, SuiteOptions};
use ricci4_core::flow::{evolve, evolve_normalized, FlowConfig, FlowError, Termination};
use ricci4_core::{FamilyId, FourierField, GeometryState, StateData};

fn hom(f: FamilyId, p: &[f64]) -> GeometryState {
    GeometryState::homogeneous(f, p.to_vec()).unwrap()
}

fn statuses(traj: &ricci4_core::flow::Trajectory, suite: Suite) -> Vec<(String, Status)> {
    run_suite(traj, suite, &SuiteOptions::default())
        .into_iter()
        .map(|r| (r.check_id, r.status))
        .collect()
}

#[test]
fn round_sphere_follows_its_closed_form() {
    let tr = evolve(&hom(FamilyId::S4, &[100.0]), &FlowConfig::with_t_end(1.0)).unwrap();
    let StateData::Params(p) = &tr.last().state.data else {
        panic!("not homogeneous")
    };
    assert_relative_eq!(p[0], 94.0, max_relative = 1e-10);
    assert_relative_eq!(
        tr.last().integrals.vol,
        8.0 * PI * PI / 3.0 * 94.0 * 94.0,
        max_relative = 1e-10
    );
    // ∫₀¹ vol dt with r² = 100 − 6t
    let exact = 8.0 * PI * PI / 3.0 * (100f64.powi(3) - 94f64.powi(3)) / 18.0;
    assert_relative_eq!(tr.last().acc.vol, exact, max_relative = 1e-9);
}

#[test]
fn every_suite_on_a_large_sphere_has_no_failure() {
    let tr = evolve(&hom(FamilyId::S4, &[100.0]), &FlowConfig::with_t_end(1.0)).unwrap();
    for suite in Suite::ALL {
        for (id, st) in statuses(&tr, suite) {
            let expect_unmet = suite == Suite::Krescale;
            let want = if expect_unmet {
                Status::PreconditionUnmet
            } else {
                Status::Pass
            };
            assert_eq!(st, want, "{id}");
        }
    }
}

#[test]
fn flat_torus_meets_everything_but_the_positivity_hypotheses() {
    let tr = evolve(&hom(FamilyId::T4, &[1.0, 2.0, 3.0, 4.0]), &FlowConfig::with_t_end(1.0)).unwrap();
    for (id, st) in statuses(&tr, Suite::Posscalar) {
        assert_eq!(st, Status::PreconditionUnmet, "{id}");
    }
    for suite in [
        Suite::Main,
        Suite::Basic,
        Suite::Gaussbonnet,
        Suite::Maxprinciple,
        Suite::Gradient,
    ] {
        for (id, st) in statuses(&tr, suite) {
            assert_eq!(st, Status::Pass, "{id}");
        }
    }
}

#[test]
fn product_of_spheres_blows_up_and_keeps_its_partial_run() {
    let err = evolve(&hom(FamilyId::S2xS2, &[1.0, 1.0]), &FlowConfig::with_t_end(1.0)).unwrap_err();
    let FlowError::BlowupBeforeEnd {
        last_good_time,
        partial,
    } = err
    else {
        panic!("expected blow-up")
    };
    assert!(last_good_time < 0.5 && last_good_time > 0.49, "{last_good_time}");
    assert!(matches!(partial.termination, Termination::Blowup { .. }));
    let opts = SuiteOptions {
        eval_time: Some(0.4),
        ..SuiteOptions::default()
    };
    for r in run_suite(&partial, Suite::Main, &opts) {
        assert_eq!(r.status, Status::Pass, "{}", r.check_id);
    }
}

#[test]
fn negative_scalar_data_is_normalized_before_the_flow() {
    let tr = evolve_normalized(
        &hom(FamilyId::Nil3xS1, &[1.0, 1.0, 8.0, 1.0]),
        &FlowConfig::with_t_end(0.2),
    )
    .unwrap();
    assert_relative_eq!(tr.scale_applied, 4.0, max_relative = 1e-8);
    assert!(tr.initial().integrals.min_r > -1.0);
    for (id, st) in statuses(&tr, Suite::Main) {
        assert_eq!(st, Status::Pass, "{id}");
    }
}

#[test]
fn warped_run_passes_identity_and_gauss_bonnet() {
    let psi = FourierField {
        mean: 4.0,
        cos: vec![0.2],
        sin: vec![],
    };
    let s = GeometryState::warped_from_fourier(&FourierField::constant(1.5), &psi, 64).unwrap();
    let cfg = FlowConfig {
        n_reports: 50,
        ..FlowConfig::with_t_end(0.1)
    };
    let tr = evolve(&s, &cfg).unwrap();
    for suite in [Suite::Identity, Suite::Gaussbonnet, Suite::Main, Suite::Maxprinciple] {
        for (id, st) in statuses(&tr, suite) {
            assert_eq!(st, Status::Pass, "{id}");
        }
    }
}
