//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p ricci4-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use ricci4_core::estimates::{
    self, check_gauss_bonnet, check_gradient, check_integralest, check_k_rescaled, check_main, check_positive_scalar,
    check_scalar_min_monotone, check_scaled, check_volume_evolution, identity_series, volume_series, EstimateConstants,
    InequalityResult, Status, DEFAULT_MARGIN_TOL,
};
use ricci4_core::flow::{
    basic_assumptions_check, evolve_normalized, parabolic_rescale, FlowConfig, FlowError, Trajectory,
};
use ricci4_core::tensor::{norms, random_curvature, ricci_of, rm_bilinear, scalar_of, young_pointwise_check};
use ricci4_core::{FamilyId, FourierField, GeometryState, Sym2Tensor, DEFAULT_WARP_N};

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Self {
            ok,
            detail: detail.into(),
        }
    }
}

fn warped(mean: f64, amp: f64) -> GeometryState {
    warped_n(mean, amp, DEFAULT_WARP_N)
}

fn warped_n(mean: f64, amp: f64, n: usize) -> GeometryState {
    let psi = FourierField {
        mean,
        cos: vec![],
        sin: vec![amp],
    };
    GeometryState::warped_from_fourier(&FourierField::constant(1.0), &psi, n).unwrap()
}

fn hom(f: FamilyId, p: &[f64]) -> GeometryState {
    GeometryState::homogeneous(f, p.to_vec()).unwrap()
}

fn run(state: &GeometryState, cfg: &FlowConfig) -> Trajectory {
    match evolve_normalized(state, cfg) {
        Ok(t) => t,
        Err(e) => panic!("{:?} run failed: {e}", state.family),
    }
}

fn failures(results: &[InequalityResult]) -> Vec<String> {
    results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| {
            format!(
                "{} at t={} ({}, margin {:e})",
                r.check_id, r.eval_time, r.status, r.margin
            )
        })
        .collect()
}

fn summarize(results: &[InequalityResult]) -> Outcome {
    let bad = failures(results);
    let worst = results
        .iter()
        .filter(|r| r.status == Status::Pass)
        .map(|r| r.relative_margin())
        .fold(f64::INFINITY, f64::min);
    if bad.is_empty() {
        Outcome::new(
            true,
            format!("{} checks, smallest relative margin {worst:.3e}", results.len()),
        )
    } else {
        Outcome::new(false, bad.join("; "))
    }
}

fn criterion_1_gauss_bonnet() -> Outcome {
    let points: Vec<GeometryState> = vec![
        hom(FamilyId::S4, &[1.0]),
        hom(FamilyId::S4, &[2.5]),
        hom(FamilyId::S4, &[100.0]),
        hom(FamilyId::S2xS2, &[1.0, 1.0]),
        hom(FamilyId::S2xS2, &[2.0, 5.0]),
        hom(FamilyId::S2xS2, &[0.3, 7.0]),
        hom(FamilyId::T4, &[1.0; 4]),
        hom(FamilyId::T4, &[0.5, 2.0, 3.0, 1.0]),
        hom(FamilyId::T4, &[9.0, 0.1, 1.0, 4.0]),
        hom(FamilyId::BergerS3xS1, &[1.0, 1.0, 1.0, 1.0]),
        hom(FamilyId::BergerS3xS1, &[0.5, 2.0, 2.0, 3.0]),
        hom(FamilyId::BergerS3xS1, &[8.0, 10.0, 10.0, 1.0]),
        hom(FamilyId::Nil3xS1, &[1.0, 1.0, 1.0, 1.0]),
        hom(FamilyId::Nil3xS1, &[2.0, 0.5, 3.0, 1.0]),
        hom(FamilyId::Nil3xS1, &[1.0, 1.0, 8.0, 2.0]),
        warped(1.0, 0.2),
        warped(3.0, 0.3),
        GeometryState::warped_from_fourier(
            &FourierField {
                mean: 1.0,
                cos: vec![0.1],
                sin: vec![],
            },
            &FourierField {
                mean: 2.0,
                cos: vec![0.2],
                sin: vec![0.3, 0.05],
            },
            DEFAULT_WARP_N,
        )
        .unwrap(),
    ];
    let results: Vec<InequalityResult> = points.iter().map(|s| check_gauss_bonnet(s, None).unwrap()).collect();
    let worst = results.iter().map(|r| r.margin.abs()).fold(0.0, f64::max);
    let mut o = summarize(&results);
    o.detail = format!("{} parameter points, worst |∫I/32π² − χ| = {worst:.2e}", results.len());
    o
}

fn criterion_2_einstein() -> Outcome {
    let mut worst: f64 = 0.0;
    let cases = [
        (hom(FamilyId::S4, &[4.0]), 6.0, 4.0),
        (hom(FamilyId::S2xS2, &[1.0, 1.0]), 2.0, 1.0),
    ];
    for (s, rate, p0) in cases {
        let t_end = 0.9 * p0 / rate;
        let tr = run(&s, &FlowConfig::with_t_end(t_end));
        for smp in &tr.samples {
            for v in smp.state.to_vec() {
                worst = worst.max((v - (p0 - rate * smp.t)).abs());
            }
        }
    }
    Outcome::new(
        worst <= 1e-8,
        format!("max |a²(t) − closed form| = {worst:.2e} (limit 1e-8)"),
    )
}

/// Name, initial data and end time. The warped grid is refined so the
/// spatial error stays below the time-difference error being measured.
fn identity_runs() -> Vec<(&'static str, GeometryState, f64)> {
    vec![
        ("S4", hom(FamilyId::S4, &[4.0]), 0.4),
        ("BergerS3xS1", hom(FamilyId::BergerS3xS1, &[4.0, 10.0, 10.0, 1.0]), 0.4),
        ("Nil3xS1", hom(FamilyId::Nil3xS1, &[2.0, 2.0, 1.0, 1.0]), 0.4),
        ("WarpedS1xS3", warped_n(6.0, 0.3, 2 * DEFAULT_WARP_N), 0.2),
    ]
}

fn criterion_3_identity() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, s, t_end) in identity_runs() {
        let res = |dt: f64| {
            let cfg = FlowConfig {
                t_end,
                n_reports: (t_end / dt).round() as usize,
                rel_tol: 1e-12,
                abs_tol: 1e-14,
                ..FlowConfig::default()
            };
            let tr = run(&s, &cfg);
            let check = estimates::check_evolution_identity(&tr);
            let series = identity_series(&tr).unwrap();
            (series.max_abs_normalized(), check)
        };
        let (coarse, _) = res(2e-3);
        let (fine, check) = res(1e-3);
        let ratio = coarse / fine;
        let this = fine < 1e-6 && (3.0..=5.5).contains(&ratio) && check.passed();
        ok &= this;
        parts.push(format!(
            "{name}: {fine:.1e} (x{ratio:.2}){}",
            if this { "" } else { " !" }
        ));
    }
    Outcome::new(ok, parts.join(", "))
}

struct Bundle {
    name: &'static str,
    traj: Trajectory,
    s: f64,
}

fn s_eval(state: &GeometryState) -> (f64, Option<f64>) {
    // probe for blow-up over [0, 1]
    match evolve_normalized(state, &FlowConfig::with_t_end(1.0)) {
        Ok(_) => (1.0, None),
        Err(FlowError::BlowupBeforeEnd { last_good_time, .. }) => {
            ((0.9 * last_good_time).min(1.0), Some(last_good_time))
        }
        Err(e) => panic!("{e}"),
    }
}

fn main_bundle() -> Vec<Bundle> {
    let scenarios: Vec<(&'static str, GeometryState)> = vec![
        ("S4", hom(FamilyId::S4, &[4.0])),
        ("S2xS2", hom(FamilyId::S2xS2, &[1.0, 1.0])),
        ("T4", hom(FamilyId::T4, &[1.0; 4])),
        ("Nil3xS1", hom(FamilyId::Nil3xS1, &[1.0, 1.0, 8.0, 1.0])),
        ("BergerS3xS1", hom(FamilyId::BergerS3xS1, &[8.0, 10.0, 10.0, 1.0])),
        ("WarpedS1xS3", warped(3.0, 0.3)),
    ];
    scenarios
        .into_iter()
        .map(|(name, st)| {
            let (s, _) = s_eval(&st);
            Bundle {
                name,
                traj: run(&st, &FlowConfig::with_t_end(s)),
                s,
            }
        })
        .collect()
}

fn criterion_4_main(bundle: &[Bundle]) -> Outcome {
    let mut results = Vec::new();
    let mut zero_margin: f64 = 0.0;
    for b in bundle {
        results.extend(check_main(&b.traj, b.s, DEFAULT_MARGIN_TOL));
        let at0 = check_main(&b.traj, 0.0, DEFAULT_MARGIN_TOL);
        zero_margin = zero_margin.max(at0[0].margin.abs());
    }
    let mut o = summarize(&results);
    o.ok &= zero_margin <= 1e-12;
    let names: Vec<String> = bundle.iter().map(|b| format!("{}@{:.3}", b.name, b.s)).collect();
    o.detail = format!("{}; S = 0 margin {zero_margin:.1e}; {}", o.detail, names.join(" "));
    o
}

fn criterion_5_posscalar(bundle: &[Bundle]) -> Outcome {
    let mut results = Vec::new();
    let mut torus_unmet = false;
    for b in bundle {
        let r = check_positive_scalar(&b.traj, b.s, DEFAULT_MARGIN_TOL);
        match b.name {
            "S4" | "S2xS2" => results.extend(r),
            "T4" => torus_unmet = r.iter().all(|x| x.status == Status::PreconditionUnmet),
            _ => {}
        }
    }
    let mut o = summarize(&results);
    o.ok &= torus_unmet && results.len() == 6;
    o.detail = format!("{}; T4 precondition unmet: {torus_unmet}", o.detail);
    o
}

fn basic_runs() -> Vec<(&'static str, Trajectory)> {
    vec![
        ("S4", run(&hom(FamilyId::S4, &[100.0]), &FlowConfig::with_t_end(1.0))),
        (
            "S2xS2",
            run(&hom(FamilyId::S2xS2, &[50.0, 50.0]), &FlowConfig::with_t_end(1.0)),
        ),
        (
            "Nil3xS1",
            run(&hom(FamilyId::Nil3xS1, &[1.0; 4]), &FlowConfig::with_t_end(1.0)),
        ),
    ]
}

fn criterion_6_integralest(runs: &[(&'static str, Trajectory)]) -> Outcome {
    let mut results = Vec::new();
    let mut shape_ok = true;
    for (_, tr) in runs {
        if !basic_assumptions_check(tr).holds {
            return Outcome::new(false, "basic assumptions do not hold");
        }
        let r = check_integralest(tr, DEFAULT_MARGIN_TOL);
        for x in &r {
            if x.check_id.contains("rcp_tail") {
                let note = x.note.as_deref().unwrap_or("");
                shape_ok &= note.contains("decreasing in S: true") && note.contains("is zero: true");
            }
        }
        results.extend(r);
    }
    let mut o = summarize(&results);
    o.ok &= shape_ok;
    o.detail = format!("{}; tail bound decreases to 0: {shape_ok}", o.detail);
    o
}

fn criterion_7_scaling() -> Outcome {
    let mut ok = true;
    let mut worst_inv: f64 = 0.0;
    let runs = [
        run(&hom(FamilyId::S4, &[100.0]), &FlowConfig::with_t_end(1.0)),
        run(
            &hom(FamilyId::Nil3xS1, &[1.0, 2.0, 3.0, 1.0]),
            &FlowConfig::with_t_end(0.5),
        ),
        run(
            &warped(3.0, 0.3),
            &FlowConfig {
                t_end: 0.05,
                n_reports: 10,
                ..FlowConfig::default()
            },
        ),
    ];
    for tr in &runs {
        for c in [2.0, 4.0] {
            let sc = parabolic_rescale(tr, c).unwrap();
            for (a, b) in tr.samples.iter().zip(&sc.samples) {
                worst_inv = worst_inv
                    .max(((a.integrals.rc2 - b.integrals.rc2) / a.integrals.rc2.abs().max(1e-300)).abs())
                    .max(((a.integrals.rm2 - b.integrals.rm2) / a.integrals.rm2.abs().max(1e-300)).abs());
            }
        }
    }
    ok &= worst_inv <= 1e-12;

    let s = hom(FamilyId::S2xS2, &[3.0, 5.0]);
    let cfg = FlowConfig::with_t_end(0.1);
    let k1 = EstimateConstants::from_trajectory(&run(&s, &cfg));
    let k3 = EstimateConstants::from_trajectory(&run(&s.scaled(3.0), &cfg));
    let b_dev = [0.0, 0.05, 0.1, 0.5]
        .iter()
        .map(|&t| ((k1.b(t) - k3.b(t)) / k1.b(t)).abs())
        .fold(0.0, f64::max);
    ok &= b_dev <= 1e-12;

    let mut results = check_scaled(&runs[0], 4.0, 0.0, 2.0, DEFAULT_MARGIN_TOL);
    let k1 = run(&hom(FamilyId::S4, &[2.0]), &FlowConfig::with_t_end(0.2));
    let k2 = run(&hom(FamilyId::S2xS2, &[1.5, 1.5]), &FlowConfig::with_t_end(0.5));
    results.extend(check_k_rescaled(&k1, DEFAULT_MARGIN_TOL));
    results.extend(check_k_rescaled(&k2, DEFAULT_MARGIN_TOL));
    let o = summarize(&results);
    Outcome::new(
        ok && o.ok,
        format!(
            "invariance {worst_inv:.1e}, b(3g) deviation {b_dev:.1e}, K = {:.3}/{:.3}; {}",
            k1.sup_abs_r(),
            k2.sup_abs_r(),
            o.detail
        ),
    )
}

fn criterion_8_gradient() -> Outcome {
    let runs = [
        (
            "BergerS3xS1",
            run(
                &hom(FamilyId::BergerS3xS1, &[16.0, 20.0, 20.0, 1.0]),
                &FlowConfig::with_t_end(1.0),
            ),
        ),
        ("WarpedS1xS3", run(&warped(4.0, 0.4), &FlowConfig::with_t_end(1.0))),
    ];
    let mut results = Vec::new();
    let mut grads = Vec::new();
    for (name, tr) in &runs {
        grads.push(format!("{name} ∫∫|∇Rc|² = {:.3e}", tr.last().acc.grad));
        if tr.last().acc.grad.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Outcome::new(false, format!("{name}: gradient integral not positive"));
        }
        results.push(check_gradient(tr, DEFAULT_MARGIN_TOL));
    }
    let o = summarize(&results);
    Outcome::new(o.ok, format!("{}; {}", o.detail, grads.join(", ")))
}

fn criterion_9_pointwise() -> Outcome {
    const N: u64 = 1_000_000;
    let g = Sym2Tensor::identity();
    let mut worst = [0.0f64; 4];
    for seed in 0..N {
        let mut rm = random_curvature(seed);
        let sym = rm.worst_symmetry_residual().2 / rm.max_abs().max(1.0);
        let mut rc = ricci_of(&rm, &g).unwrap();
        let mut r = scalar_of(&rc, &g).unwrap();
        if r <= -2.0 {
            rm = rm.scaled(-1.0);
            rc = ricci_of(&rm, &g).unwrap();
            r = -r;
        }
        let (rm2, rc2) = norms(&rm, &rc, &g).unwrap();
        // |R| <= 2|Rc|
        let trace = (r * r - 4.0 * rc2) / (r * r + 4.0 * rc2).max(1.0);
        // |Rm(Rc,Rc)| <= |Rm| |Rc|²
        let b = rm_bilinear(&rm, &rc, &g).unwrap();
        let cs_scale = (rm2.sqrt() * rc2).max(1.0);
        let cs = (b.abs() - rm2.sqrt() * rc2) / cs_scale;
        let y = young_pointwise_check(&rm, &rc, r, &g, 2.0).unwrap();
        let young = -y.margin / y.scale().max(1.0);
        for (w, v) in worst.iter_mut().zip([sym, trace, cs, young]) {
            *w = w.max(v);
        }
    }
    let ok = worst.iter().all(|&w| w <= 1e-12);
    Outcome::new(
        ok,
        format!(
            "{N} tensors; worst excess: symmetry {:.1e}, trace {:.1e}, Cauchy–Schwarz {:.1e}, Young {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn criterion_10_monitors(trajs: &[(&str, &Trajectory)]) -> Outcome {
    let mut ok = true;
    let mut worst_vol: f64 = 0.0;
    let mut bad = Vec::new();
    for (name, tr) in trajs {
        let v = volume_series(tr).unwrap().max_abs_normalized();
        worst_vol = worst_vol.max(v);
        let vr = check_volume_evolution(tr, estimates::VOLUME_RESIDUAL_TOL);
        let mr = check_scalar_min_monotone(tr);
        if v >= 1e-6 || !vr.passed() || !mr.passed() {
            ok = false;
            bad.push(format!("{name} (vol {v:.1e}, min R margin {:.1e})", mr.margin));
        }
    }
    let detail = format!("{} trajectories, worst volume residual {worst_vol:.1e}", trajs.len());
    Outcome::new(
        ok,
        if bad.is_empty() {
            detail
        } else {
            format!("{detail}; {}", bad.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut all_ok = true;
    let mut report = |n: usize, name: &str, o: Outcome| {
        all_ok &= o.ok;
        println!(
            "criterion {n:>2} {:<28} {}  {}",
            name,
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
    };
    report(1, "gauss-bonnet", criterion_1_gauss_bonnet());
    report(2, "einstein closed forms", criterion_2_einstein());
    report(3, "evolution identity", criterion_3_identity());
    let bundle = main_bundle();
    report(4, "main estimates", criterion_4_main(&bundle));
    report(5, "positive scalar", criterion_5_posscalar(&bundle));
    let basic = basic_runs();
    report(6, "integral estimates", criterion_6_integralest(&basic));
    report(7, "scaling", criterion_7_scaling());
    report(8, "gradient", criterion_8_gradient());
    report(9, "pointwise algebra", criterion_9_pointwise());
    let mut monitored: Vec<(&str, &Trajectory)> = bundle.iter().map(|b| (b.name, &b.traj)).collect();
    monitored.extend(basic.iter().map(|(n, t)| (*n, t)));
    report(10, "volume and max principle", criterion_10_monitors(&monitored));
    println!("acceptance finished in {:.1?}", start.elapsed());
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
