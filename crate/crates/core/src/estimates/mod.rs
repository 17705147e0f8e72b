//! Both sides of every integral curvature estimate along a trajectory.
//!
//! Checkers are pure functions of a [`Trajectory`]. Each returns one
//! [`InequalityResult`] per estimate; estimates stated "for all t" report
//! the sample with the smallest relative margin.

pub mod constants;
pub mod residual;
pub mod result;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::catalog::{point_data, GeometryError, GeometryState, Kind};
use crate::flow::{basic_assumptions_check, parabolic_rescale, Trajectory};
use crate::tensor::{gauss_bonnet_density, Sym2Tensor};
pub use constants::EstimateConstants;
pub use residual::ResidualSeries;
use result::worst_of;
pub use result::{CheckKind, InequalityResult, Status, DEFAULT_MARGIN_TOL};

/// Gauss–Bonnet tolerance for single-point families.
pub const GB_TOL_HOMOGENEOUS: f64 = 1e-10;
/// Gauss–Bonnet tolerance for the warped quadrature.
pub const GB_TOL_WARPED: f64 = 1e-6;
/// Default tolerance on the normalized volume-evolution residual.
pub const VOLUME_RESIDUAL_TOL: f64 = 1e-6;

fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

fn with_constants(mut r: InequalityResult, items: &[(&str, f64)]) -> InequalityResult {
    for (k, v) in items {
        r = r.with_constant(k, *v);
    }
    r
}

/// Sample index for an evaluation time, or the reason there is none.
fn eval_index(traj: &Trajectory, s: f64) -> Result<usize, String> {
    if !(s >= 0.0) {
        return Err(format!("evaluation time {s} is negative"));
    }
    if s > traj.final_time() * (1.0 + 1e-9) + 1e-12 {
        return Err(format!(
            "evaluation time {s} is past the trajectory end {}",
            traj.final_time()
        ));
    }
    traj.index_at(s).ok_or_else(|| format!("no sample at or before {s}"))
}

fn unmet_all(ids: &[&str], s: f64, tol: f64, why: &str) -> Vec<InequalityResult> {
    ids.iter().map(|id| InequalityResult::unmet(id, s, tol, why)).collect()
}

pub const MAIN_IDS: [&str; 4] = ["main.f_bound", "main.rc_l1", "main.rc_l2_time", "main.rm_l2_time"];

/// The four general estimates at time `s`, with `f = |Rc|²/(R+2)`:
///
/// * `∫f(S) + ∫₀ˢ∫f² <= c₀(S) + 2¹⁰ e^{64S} ∫₀ˢ∫R²`
/// * `∫|Rc|(S) <= vol(S) + 2c₀(S) + 2¹¹ e^{64S} ∫₀ˢ∫R²`
/// * `∫₀ˢ∫|Rc|² <= ∫₀ˢ vol + 2³c₀(S) + 2¹³ e^{64S} ∫₀ˢ∫R²`
/// * `∫₀ˢ∫|Rm|² <= 4∫₀ˢ vol + 2⁵(c₀(S) + π²χS) + 2¹⁵ e^{64S} ∫₀ˢ∫R²`
pub fn check_main(traj: &Trajectory, s: f64, tol: f64) -> Vec<InequalityResult> {
    let init = &traj.initial().integrals;
    if !(init.min_r > -1.0) {
        return unmet_all(&MAIN_IDS, s, tol, &format!("inf R(0) = {} <= -1", init.min_r));
    }
    let k = EstimateConstants::from_trajectory(traj);
    let idx = match eval_index(traj, s) {
        Ok(i) => i,
        Err(e) => return unmet_all(&MAIN_IDS, s, tol, &e),
    };
    let smp = &traj.samples[idx];
    let (c0, af2, f) = match (k.c0(smp.t), smp.acc.f2, smp.integrals.f) {
        (Some(c0), Some(af2), Some(f)) => (c0, af2, f),
        _ => {
            return unmet_all(
                &MAIN_IDS,
                smp.t,
                tol,
                "f = |Rc|²/(R+2) or its time integral is unavailable",
            )
        }
    };
    let t = smp.t;
    let e = (64.0 * t).exp();
    let ar2 = smp.acc.r2;
    let chi = k.chi;
    let base = [("c0", c0), ("A_R2", ar2), ("exp64S", e)];
    vec![
        with_constants(
            InequalityResult::inequality(MAIN_IDS[0], t, f + af2, c0 + pow2(10) * e * ar2, tol),
            &base,
        )
        .with_constant("A_f2", af2),
        with_constants(
            InequalityResult::inequality(
                MAIN_IDS[1],
                t,
                smp.integrals.rc1,
                smp.integrals.vol + 2.0 * c0 + pow2(11) * e * ar2,
                tol,
            ),
            &base,
        )
        .with_constant("vol", smp.integrals.vol),
        with_constants(
            InequalityResult::inequality(
                MAIN_IDS[2],
                t,
                smp.acc.rcp(2),
                smp.acc.vol + pow2(3) * c0 + pow2(13) * e * ar2,
                tol,
            ),
            &base,
        )
        .with_constant("A_vol", smp.acc.vol),
        with_constants(
            InequalityResult::inequality(
                MAIN_IDS[3],
                t,
                smp.acc.rm2,
                4.0 * smp.acc.vol + pow2(5) * (c0 + PI * PI * chi * t) + pow2(15) * e * ar2,
                tol,
            ),
            &base,
        )
        .with_constant("A_vol", smp.acc.vol)
        .with_constant("chi", chi),
    ]
}

pub const POSSCALAR_IDS: [&str; 3] = ["posscalar.rc_l1", "posscalar.rc_l2_time", "posscalar.rm_l2_time"];

/// The positive-scalar-curvature estimates at time `s`:
///
/// * `∫|Rc|(S) <= 2a₀(S) + 2¹¹ e^{64S} ∫₀ˢ∫R²`
/// * `∫₀ˢ∫|Rc|² <= 2³a₀(S) + 2¹³ e^{64S} ∫₀ˢ∫R²`
/// * `∫₀ˢ∫|Rm|² <= 2⁵π²χS + 2⁵a₀(S) + 2¹⁵ e^{64S} ∫₀ˢ∫R²`
pub fn check_positive_scalar(traj: &Trajectory, s: f64, tol: f64) -> Vec<InequalityResult> {
    let init = &traj.initial().integrals;
    if !(init.min_r > 0.0) {
        return unmet_all(&POSSCALAR_IDS, s, tol, &format!("inf R(0) = {} <= 0", init.min_r));
    }
    let k = EstimateConstants::from_trajectory(traj);
    let idx = match eval_index(traj, s) {
        Ok(i) => i,
        Err(e) => return unmet_all(&POSSCALAR_IDS, s, tol, &e),
    };
    let smp = &traj.samples[idx];
    let t = smp.t;
    let Some(a0) = k.a0(t) else {
        return unmet_all(&POSSCALAR_IDS, t, tol, "∫|Rc|²/R at t = 0 is unavailable");
    };
    let e = (64.0 * t).exp();
    let ar2 = smp.acc.r2;
    let base = [("a0", a0), ("A_R2", ar2), ("exp64S", e)];
    vec![
        with_constants(
            InequalityResult::inequality(
                POSSCALAR_IDS[0],
                t,
                smp.integrals.rc1,
                2.0 * a0 + pow2(11) * e * ar2,
                tol,
            ),
            &base,
        ),
        with_constants(
            InequalityResult::inequality(
                POSSCALAR_IDS[1],
                t,
                smp.acc.rcp(2),
                pow2(3) * a0 + pow2(13) * e * ar2,
                tol,
            ),
            &base,
        ),
        with_constants(
            InequalityResult::inequality(
                POSSCALAR_IDS[2],
                t,
                smp.acc.rm2,
                pow2(5) * PI * PI * k.chi * t + pow2(5) * a0 + pow2(15) * e * ar2,
                tol,
            ),
            &base,
        )
        .with_constant("chi", k.chi),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DifferentialVariant {
    /// `d/dt ∫f <= 2⁸π²χ + ∫(−f² + 64f + 2¹⁰R²)`
    General,
    /// `d/dt ∫f <= 128π²χ + ∫(−f² + 50f)` under the basic assumptions.
    Basic,
}

impl DifferentialVariant {
    pub fn check_id(self) -> &'static str {
        match self {
            DifferentialVariant::General => "differential.general",
            DifferentialVariant::Basic => "differential.basic",
        }
    }
}

fn uniform_dt(traj: &Trajectory) -> Result<f64, String> {
    if traj.samples.len() < 7 {
        return Err("fewer than seven samples".into());
    }
    traj.uniform_spacing()
        .ok_or_else(|| "samples are not uniformly spaced".to_string())
}

fn f_series(traj: &Trajectory) -> Result<(Vec<f64>, Vec<f64>), String> {
    let f: Option<Vec<f64>> = traj.samples.iter().map(|s| s.integrals.f).collect();
    let f2: Option<Vec<f64>> = traj.samples.iter().map(|s| s.integrals.f2).collect();
    match (f, f2) {
        (Some(f), Some(f2)) => Ok((f, f2)),
        _ => Err("R + 2 <= 0 at some sample".into()),
    }
}

/// `d/dt ∫f` against the right-hand side of the chosen differential
/// inequality, at interior report times.
pub fn differential_series(traj: &Trajectory, variant: DifferentialVariant) -> Result<ResidualSeries, String> {
    let dt = uniform_dt(traj)?;
    let (f, f2) = f_series(traj)?;
    let chi = traj.chi as f64;
    let rhs: Vec<f64> = traj
        .samples
        .iter()
        .zip(f.iter().zip(&f2))
        .map(|(s, (f, f2))| match variant {
            DifferentialVariant::General => pow2(8) * PI * PI * chi - f2 + 64.0 * f + pow2(10) * s.integrals.r2,
            DifferentialVariant::Basic => 128.0 * PI * PI * chi - f2 + 50.0 * f,
        })
        .collect();
    ResidualSeries::new(&traj.times(), &f, &rhs, dt, traj.config.rel_tol, traj.config.abs_tol)
        .ok_or_else(|| "series too short".into())
}

/// The differential inequality for `∫f` at every interior report time. The
/// right-hand side is widened by the finite-difference error bar.
pub fn check_differential(traj: &Trajectory, variant: DifferentialVariant, tol: f64) -> InequalityResult {
    let id = variant.check_id();
    let t_end = traj.final_time();
    if !(traj.initial().integrals.min_r > -1.0) {
        return InequalityResult::unmet(id, t_end, tol, "inf R(0) <= -1");
    }
    if variant == DifferentialVariant::Basic {
        let b = basic_assumptions_check(traj);
        if !b.holds {
            return InequalityResult::unmet(id, t_end, tol, format!("sup |R| = {} > 1", b.sup_abs_r));
        }
    }
    let series = match differential_series(traj, variant) {
        Ok(s) => s,
        Err(e) => return InequalityResult::unmet(id, t_end, tol, e),
    };
    let k = series.worst_index(true).expect("non-empty series");
    InequalityResult::inequality(
        id,
        series.times[k],
        series.derivative[k],
        series.target[k] + series.fd_tol[k],
        tol,
    )
    .with_constant("fd_tolerance", series.fd_tol[k])
    .with_constant("excess", series.residual(k))
    .with_constant("dt", series.dt)
}

/// `d/dt ∫f` against `∫(−2|Z|²/(R+2)³ − 2f² + 4Rm(Rc,Rc)/(R+2) − fR)`.
pub fn identity_series(traj: &Trajectory) -> Result<ResidualSeries, String> {
    let dt = uniform_dt(traj)?;
    let (f, _) = f_series(traj)?;
    let rhs: Option<Vec<f64>> = traj.samples.iter().map(|s| s.integrals.f_identity_rhs).collect();
    let rhs = rhs.ok_or("R + 2 <= 0 at some sample")?;
    ResidualSeries::new(&traj.times(), &f, &rhs, dt, traj.config.rel_tol, traj.config.abs_tol)
        .ok_or_else(|| "series too short".into())
}

pub const IDENTITY_ID: &str = "identity.f_evolution";

/// The evolution identity for `∫f`, up to the finite-difference error bar.
pub fn check_evolution_identity(traj: &Trajectory) -> InequalityResult {
    let series = match identity_series(traj) {
        Ok(s) => s,
        Err(e) => return InequalityResult::unmet(IDENTITY_ID, traj.final_time(), 0.0, e),
    };
    let k = series.worst_index(false).expect("non-empty series");
    let tol = series.fd_tol[k] / series.scale(k);
    InequalityResult::equality(
        IDENTITY_ID,
        series.times[k],
        series.derivative[k],
        series.target[k],
        tol,
    )
    .with_constant("fd_tolerance", series.fd_tol[k])
    .with_constant("max_normalized_residual", series.max_abs_normalized())
    .with_constant("dt", series.dt)
}

pub const INTEGRALEST_IDS: [&str; 3] = ["integralest.rc_l2", "integralest.rm_l2", "integralest.rc4_time"];

fn rcp_tail_id(p: usize) -> String {
    format!("integralest.rcp_tail_p{p}")
}

/// The `b(t)` estimates under the basic assumptions, each at every sample:
///
/// * `∫|Rc|²(t) <= b(t)`
/// * `∫|Rm|²(t) <= 32π²χ + 4b(t)`
/// * `∫₀ᵗ∫|Rc|⁴ <= b(t)`
/// * `∫_S^T∫|Rc|^p <= |b(T)|^{p/4} e^{(4−p)T/4} vol(0)^{(4−p)/4} |T−S|^{(4−p)/4}`
///   for p = 1, 2, 3 on every sample `S <= T`.
pub fn check_integralest(traj: &Trajectory, tol: f64) -> Vec<InequalityResult> {
    let t_end = traj.final_time();
    let b = basic_assumptions_check(traj);
    if !b.holds {
        let mut ids: Vec<String> = INTEGRALEST_IDS.iter().map(|s| s.to_string()).collect();
        ids.extend((1..=3).map(rcp_tail_id));
        return ids
            .iter()
            .map(|id| InequalityResult::unmet(id, t_end, tol, format!("sup |R| = {} > 1", b.sup_abs_r)))
            .collect();
    }
    let k = EstimateConstants::from_trajectory(traj);
    let gb = 32.0 * PI * PI * k.chi;
    let mut out = Vec::new();
    let per_time = |id: &str, f: &dyn Fn(&crate::flow::Sample) -> (f64, f64)| {
        let all = traj
            .samples
            .iter()
            .map(|s| {
                let (l, r) = f(s);
                InequalityResult::inequality(id, s.t, l, r, tol).with_constant("b", k.b(s.t))
            })
            .collect();
        worst_of(all).expect("non-empty trajectory")
    };
    out.push(per_time(INTEGRALEST_IDS[0], &|s| (s.integrals.rc2, k.b(s.t))));
    out.push(per_time(INTEGRALEST_IDS[1], &|s| {
        (s.integrals.rm2, gb + 4.0 * k.b(s.t))
    }));
    out.push(per_time(INTEGRALEST_IDS[2], &|s| (s.acc.rc4, k.b(s.t))));
    let last = traj.last();
    let bt = k.b(t_end).abs();
    for p in 1..=3usize {
        let q = (4 - p) as f64 / 4.0;
        let all: Vec<(f64, InequalityResult)> = traj
            .samples
            .iter()
            .map(|s| {
                let lhs = last.acc.rcp(p) - s.acc.rcp(p);
                let rhs = bt.powf(p as f64 / 4.0) * (q * t_end).exp() * k.vol0.powf(q) * (t_end - s.t).abs().powf(q);
                (rhs, InequalityResult::inequality(&rcp_tail_id(p), s.t, lhs, rhs, tol))
            })
            .collect();
        let decreasing = all.windows(2).all(|w| w[1].0 <= w[0].0);
        let vanishes = all.last().map(|a| a.0) == Some(0.0);
        let worst = worst_of(all.into_iter().map(|a| a.1).collect()).expect("non-empty trajectory");
        out.push(
            worst
                .with_constant("b_T", bt)
                .with_constant("vol0", k.vol0)
                .with_constant("T", t_end)
                .with_note(format!(
                    "rhs decreasing in S: {decreasing}; rhs at S = T is zero: {vanishes}"
                )),
        );
    }
    out
}

pub const SCALED_IDS: [&str; 3] = ["scaled.rc_l2", "scaled.rm_l2", "scaled.rc4_window"];

/// Estimates for `g̃(t̃) = c g(t̃/c)` in terms of `b(g(0), ·)`:
///
/// * `∫|R̃c|²(t̃) <= b(t̃/c)` and `∫|R̃m|²(t̃) <= 32π²χ + 4b(t̃/c)` on every sample
/// * for `c >= 1`, `∫_{R̃}^{S̃}∫|R̃c|⁴ <= 50 e^{50L̃} b(R̃/c) + 128π²χ(e^{50L̃} − 1)`
///   with `L̃ = S̃ − R̃`.
pub fn check_scaled(traj: &Trajectory, c: f64, r_tilde: f64, s_tilde: f64, tol: f64) -> Vec<InequalityResult> {
    let b = basic_assumptions_check(traj);
    let t_end = c * traj.final_time();
    if !b.holds {
        return unmet_all(&SCALED_IDS, t_end, tol, &format!("sup |R| = {} > 1", b.sup_abs_r));
    }
    let scaled = match parabolic_rescale(traj, c) {
        Ok(s) => s,
        Err(e) => return unmet_all(&SCALED_IDS, t_end, tol, &e.to_string()),
    };
    let k = EstimateConstants::from_trajectory(traj);
    let gb = 32.0 * PI * PI * k.chi;
    let mut out = Vec::new();
    for (i, id) in SCALED_IDS[..2].iter().enumerate() {
        let all = scaled
            .samples
            .iter()
            .map(|s| {
                let bt = k.b(s.t / c);
                let (l, r) = if i == 0 {
                    (s.integrals.rc2, bt)
                } else {
                    (s.integrals.rm2, gb + 4.0 * bt)
                };
                InequalityResult::inequality(id, s.t, l, r, tol).with_constant("b", bt)
            })
            .collect();
        out.push(worst_of(all).expect("non-empty").with_constant("c", c));
    }
    let id = SCALED_IDS[2];
    if c < 1.0 {
        out.push(InequalityResult::unmet(id, s_tilde, tol, format!("c = {c} < 1")));
        return out;
    }
    if !(0.0 <= r_tilde && r_tilde < s_tilde && s_tilde <= t_end * (1.0 + 1e-9)) {
        out.push(InequalityResult::unmet(
            id,
            s_tilde,
            tol,
            format!("window ({r_tilde}, {s_tilde}) outside [0, {t_end}]"),
        ));
        return out;
    }
    let (ir, is) = (scaled.index_at(r_tilde), scaled.index_at(s_tilde));
    let (Some(ir), Some(is)) = (ir, is) else {
        out.push(InequalityResult::unmet(
            id,
            s_tilde,
            tol,
            "window endpoints not sampled",
        ));
        return out;
    };
    let (sr, ss) = (&scaled.samples[ir], &scaled.samples[is]);
    let l = ss.t - sr.t;
    let e = (50.0 * l).exp();
    let b_r = k.b(sr.t / c);
    let rhs = 50.0 * e * b_r + 128.0 * PI * PI * k.chi * (50.0 * l).exp_m1();
    out.push(
        InequalityResult::inequality(id, ss.t, ss.acc.rc4 - sr.acc.rc4, rhs, tol)
            .with_constant("c", c)
            .with_constant("R_tilde", sr.t)
            .with_constant("L_tilde", l)
            .with_constant("b_R", b_r),
    );
    out
}

pub const GRADIENT_ID: &str = "gradient.grad_rc";

/// `∫₀ᵀ∫|∇Rc|² <= B(T)` under the basic assumptions.
pub fn check_gradient(traj: &Trajectory, tol: f64) -> InequalityResult {
    let t = traj.final_time();
    let b = basic_assumptions_check(traj);
    if !b.holds {
        return InequalityResult::unmet(GRADIENT_ID, t, tol, format!("sup |R| = {} > 1", b.sup_abs_r));
    }
    let k = EstimateConstants::from_trajectory(traj);
    InequalityResult::inequality(GRADIENT_ID, t, traj.last().acc.grad, k.big_b(t), tol)
        .with_constant("B", k.big_b(t))
        .with_constant("b", k.b(t))
        .with_constant("int_rc2_0", k.int_rc2_0)
}

pub const KRESCALE_IDS: [&str; 4] = [
    "krescale.rc_l2",
    "krescale.rm_l2",
    "krescale.rc4_time",
    "krescale.grad_rc",
];

/// Estimates with `K = sup |R| >= 1`:
///
/// * `∫|Rc|²(t) <= b(Kt)`, `∫|Rm|²(t) <= 32π²χ + 4b(Kt)` on every sample
/// * `∫₀ᵀ∫|Rc|⁴ <= K b(KT)`
/// * `∫₀ᵀ∫|∇Rc|² <= K³ B(KT)`
pub fn check_k_rescaled(traj: &Trajectory, tol: f64) -> Vec<InequalityResult> {
    let t_end = traj.final_time();
    let kk = traj.sup_abs_r();
    if !(kk >= 1.0) || !t_end.is_finite() {
        return unmet_all(&KRESCALE_IDS, t_end, tol, &format!("K = sup |R| = {kk} < 1"));
    }
    let k = EstimateConstants::from_trajectory(traj);
    let gb = 32.0 * PI * PI * k.chi;
    let mut out = Vec::new();
    for (i, id) in KRESCALE_IDS[..2].iter().enumerate() {
        let all = traj
            .samples
            .iter()
            .map(|s| {
                let bt = k.b(kk * s.t);
                let (l, r) = if i == 0 {
                    (s.integrals.rc2, bt)
                } else {
                    (s.integrals.rm2, gb + 4.0 * bt)
                };
                InequalityResult::inequality(id, s.t, l, r, tol)
            })
            .collect();
        out.push(worst_of(all).expect("non-empty").with_constant("K", kk));
    }
    let last = traj.last();
    out.push(
        InequalityResult::inequality(KRESCALE_IDS[2], t_end, last.acc.rc4, kk * k.b(kk * t_end), tol)
            .with_constant("K", kk)
            .with_constant("b_KT", k.b(kk * t_end)),
    );
    out.push(
        InequalityResult::inequality(
            KRESCALE_IDS[3],
            t_end,
            last.acc.grad,
            kk.powi(3) * k.big_b(kk * t_end),
            tol,
        )
        .with_constant("K", kk)
        .with_constant("B_KT", k.big_b(kk * t_end))
        .with_note("the time integral of |∇Rc|² is scale invariant, so B(KT) alone already bounds it"),
    );
    out
}

pub const GAUSS_BONNET_ID: &str = "gaussbonnet.euler";

pub fn gauss_bonnet_tolerance(state: &GeometryState) -> f64 {
    match state.entry().kind {
        Kind::Warped => GB_TOL_WARPED,
        _ => GB_TOL_HOMOGENEOUS,
    }
}

/// `∫I / (32π²) = χ`.
pub fn check_gauss_bonnet(state: &GeometryState, tol: Option<f64>) -> Result<InequalityResult, GeometryError> {
    let pts = point_data(state)?;
    let g = Sym2Tensor::identity();
    let mut total = 0.0;
    for p in &pts {
        total += p.weight * gauss_bonnet_density(&p.curvature, &p.ricci, p.scal_r, &g)?;
    }
    let chi = state.entry().chi as f64;
    let tol = tol.unwrap_or_else(|| gauss_bonnet_tolerance(state));
    Ok(
        InequalityResult::equality(GAUSS_BONNET_ID, state.time, total / (32.0 * PI * PI), chi, tol)
            .with_constant("int_I", total),
    )
}

/// Gauss–Bonnet at every sample, reporting the worst.
pub fn check_gauss_bonnet_along(traj: &Trajectory, tol: Option<f64>) -> InequalityResult {
    let tol = tol.unwrap_or_else(|| gauss_bonnet_tolerance(&traj.initial().state));
    let chi = traj.chi as f64;
    let all = traj
        .samples
        .iter()
        .map(|s| {
            InequalityResult::equality(GAUSS_BONNET_ID, s.t, s.integrals.gb / (32.0 * PI * PI), chi, tol)
                .with_constant("int_I", s.integrals.gb)
        })
        .collect();
    worst_of(all).expect("non-empty trajectory")
}

pub const MIN_SCALAR_ID: &str = "maxprinciple.min_scalar";

/// `min R` is nondecreasing between consecutive samples within `10·relTol`.
pub fn check_scalar_min_monotone(traj: &Trajectory) -> InequalityResult {
    let tol = 10.0 * traj.config.rel_tol;
    if traj.samples.len() < 2 {
        let m = traj.initial().integrals.min_r;
        return InequalityResult::inequality(MIN_SCALAR_ID, 0.0, m, m, tol);
    }
    let all = traj
        .samples
        .windows(2)
        .map(|w| InequalityResult::inequality(MIN_SCALAR_ID, w[1].t, w[0].integrals.min_r, w[1].integrals.min_r, tol))
        .collect();
    worst_of(all).expect("at least one pair")
}

pub const VOLUME_EVOLUTION_ID: &str = "volume.evolution";

/// `d/dt vol` by the fourth-order stencil against `−∫R`.
pub fn volume_series(traj: &Trajectory) -> Result<ResidualSeries, String> {
    let dt = uniform_dt(traj)?;
    let vol: Vec<f64> = traj.samples.iter().map(|s| s.integrals.vol).collect();
    let rate: Vec<f64> = traj.samples.iter().map(|s| -s.integrals.r).collect();
    ResidualSeries::with_order(
        &traj.times(),
        &vol,
        &rate,
        dt,
        traj.config.rel_tol,
        traj.config.abs_tol,
        4,
    )
    .ok_or_else(|| "series too short".into())
}

/// `d/dt vol = −∫R`: normalized residual within `tol` plus the
/// finite-difference error bar.
pub fn check_volume_evolution(traj: &Trajectory, tol: f64) -> InequalityResult {
    let series = match volume_series(traj) {
        Ok(s) => s,
        Err(e) => return InequalityResult::unmet(VOLUME_EVOLUTION_ID, traj.final_time(), tol, e),
    };
    let k = series.worst_index(false).expect("non-empty series");
    let eff = tol + series.fd_tol[k] / series.scale(k);
    InequalityResult::equality(
        VOLUME_EVOLUTION_ID,
        series.times[k],
        series.derivative[k],
        series.target[k],
        eff,
    )
    .with_constant("fd_tolerance", series.fd_tol[k])
    .with_constant("max_normalized_residual", series.max_abs_normalized())
}

pub const VOLUME_BOUND_IDS: [&str; 2] = ["volume.lower", "volume.upper"];

/// `e^{−t} vol(0) <= vol(t) <= e^{t} vol(0)` under the basic assumptions.
pub fn check_volume_bounds(traj: &Trajectory, tol: f64) -> Vec<InequalityResult> {
    let b = basic_assumptions_check(traj);
    if !b.holds {
        return unmet_all(
            &VOLUME_BOUND_IDS,
            traj.final_time(),
            tol,
            &format!("sup |R| = {} > 1", b.sup_abs_r),
        );
    }
    let v0 = traj.initial().integrals.vol;
    let lower = traj
        .samples
        .iter()
        .map(|s| InequalityResult::inequality(VOLUME_BOUND_IDS[0], s.t, (-s.t).exp() * v0, s.integrals.vol, tol))
        .collect();
    let upper = traj
        .samples
        .iter()
        .map(|s| InequalityResult::inequality(VOLUME_BOUND_IDS[1], s.t, s.integrals.vol, s.t.exp() * v0, tol))
        .collect();
    vec![worst_of(lower).expect("non-empty"), worst_of(upper).expect("non-empty")]
}

/// Named groups of checks requested by a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Main,
    Posscalar,
    Differential,
    Identity,
    Basic,
    Scaled,
    Gradient,
    Krescale,
    Gaussbonnet,
    Maxprinciple,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Main,
        Suite::Posscalar,
        Suite::Differential,
        Suite::Identity,
        Suite::Basic,
        Suite::Scaled,
        Suite::Gradient,
        Suite::Krescale,
        Suite::Gaussbonnet,
        Suite::Maxprinciple,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Main => "main",
            Suite::Posscalar => "posscalar",
            Suite::Differential => "differential",
            Suite::Identity => "identity",
            Suite::Basic => "basic",
            Suite::Scaled => "scaled",
            Suite::Gradient => "gradient",
            Suite::Krescale => "krescale",
            Suite::Gaussbonnet => "gaussbonnet",
            Suite::Maxprinciple => "maxprinciple",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// Knobs shared by the suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct SuiteOptions {
    /// Evaluation time for `main` and `posscalar`; trajectory end if unset.
    pub eval_time: Option<f64>,
    pub margin_tol: f64,
    /// Parabolic factor for `scaled`.
    pub scale_factor: f64,
    /// `(R̃, S̃)` for `scaled`; `(0, c·T)` if unset.
    pub window: Option<(f64, f64)>,
    /// Override for the Gauss–Bonnet tolerance.
    pub gauss_bonnet_tol: Option<f64>,
    pub volume_residual_tol: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            eval_time: None,
            margin_tol: DEFAULT_MARGIN_TOL,
            scale_factor: 4.0,
            window: None,
            gauss_bonnet_tol: None,
            volume_residual_tol: VOLUME_RESIDUAL_TOL,
        }
    }
}

/// All checks of one suite along a trajectory.
pub fn run_suite(traj: &Trajectory, suite: Suite, opts: &SuiteOptions) -> Vec<InequalityResult> {
    let tol = opts.margin_tol;
    let s = opts.eval_time.unwrap_or(traj.final_time());
    match suite {
        Suite::Main => check_main(traj, s, tol),
        Suite::Posscalar => check_positive_scalar(traj, s, tol),
        Suite::Differential => vec![check_differential(traj, DifferentialVariant::General, tol)],
        Suite::Identity => vec![check_evolution_identity(traj)],
        Suite::Basic => {
            let mut v = vec![check_differential(traj, DifferentialVariant::Basic, tol)];
            v.extend(check_integralest(traj, tol));
            v.extend(check_volume_bounds(traj, tol));
            v
        }
        Suite::Scaled => {
            let c = opts.scale_factor;
            let (r, s) = opts.window.unwrap_or((0.0, c * traj.final_time()));
            check_scaled(traj, c, r, s, tol)
        }
        Suite::Gradient => vec![check_gradient(traj, tol)],
        Suite::Krescale => check_k_rescaled(traj, tol),
        Suite::Gaussbonnet => vec![check_gauss_bonnet_along(traj, opts.gauss_bonnet_tol)],
        Suite::Maxprinciple => vec![
            check_scalar_min_monotone(traj),
            check_volume_evolution(traj, opts.volume_residual_tol),
        ],
    }
}
