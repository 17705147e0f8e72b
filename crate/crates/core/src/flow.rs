//! Ricci flow `∂g/∂t = −2 Rc` on the catalog's reduced state spaces.
//!
//! Time integrals are carried as extra ODE components so they share the
//! stepper's order of accuracy.

use serde::{Deserialize, Serialize};
use std::cell::Cell;
use thiserror::Error;

use crate::catalog::{flow_rhs_from_points, point_data, FamilyId, GeometryError, GeometryState, PointData, StateData};
use crate::integrator::{Dopri5, StepError, StepperOptions};
use crate::tensor::{PointwiseDensities, Sym2Tensor, TensorError};

/// Shift `c` in `f = |Rc|² / (R + c)` used by the general estimates.
pub const F_SHIFT: f64 = 2.0;

/// Relative margin applied when normalizing negative scalar curvature.
pub const NORMALIZE_MARGIN: f64 = 1e-9;

/// Slack on `sup |R| <= 1` in the basic assumptions.
pub const BASIC_ASSUMPTION_SLACK: f64 = 1e-9;

const N_ACC: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct FlowConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_end: f64,
    /// Blow-up is declared once `max |Rm|` exceeds this.
    pub blowup_curvature_cap: f64,
    /// Warped steps are capped at `factor · (Δθ · min(φ, ψ))²`.
    pub warped_stability_factor: f64,
    /// Number of uniform report intervals on `[0, t_end]`.
    pub n_reports: usize,
    pub max_steps: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            t_end: 1.0,
            blowup_curvature_cap: 1e8,
            warped_stability_factor: 0.2,
            n_reports: 200,
            max_steps: 2_000_000,
        }
    }
}

impl FlowConfig {
    pub fn with_t_end(t_end: f64) -> Self {
        Self {
            t_end,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let bad = |m: &str| Err(FlowError::InvalidConfig(m.to_string()));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be positive and finite");
        }
        if !(self.blowup_curvature_cap > 0.0) {
            return bad("blowup_curvature_cap must be positive");
        }
        if !(self.warped_stability_factor > 0.0) {
            return bad("warped_stability_factor must be positive");
        }
        if self.n_reports < 2 {
            return bad("n_reports must be at least 2");
        }
        Ok(())
    }

    pub fn report_spacing(&self) -> f64 {
        self.t_end / self.n_reports as f64
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("curvature blew up before t_end; last good time {last_good_time}")]
    BlowupBeforeEnd {
        last_good_time: f64,
        partial: Box<Trajectory>,
    },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StiffnessFailure { t: f64, h: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
}

impl From<TensorError> for FlowError {
    fn from(e: TensorError) -> Self {
        FlowError::Geometry(e.into())
    }
}

/// Spatial integrals and extrema at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integrals {
    pub vol: f64,
    /// `∫R`
    pub r: f64,
    pub r2: f64,
    /// `∫|Rc|^p` for p = 1, 2, 3, 4.
    pub rc1: f64,
    pub rc2: f64,
    pub rc3: f64,
    pub rc4: f64,
    pub rm2: f64,
    /// `∫I`, the Gauss–Bonnet integral.
    pub gb: f64,
    pub grad: f64,
    /// `∫f`, `∫f²` with `f = |Rc|²/(R+2)`; `None` where `R + 2 <= 0` somewhere.
    pub f: Option<f64>,
    pub f2: Option<f64>,
    /// Right-hand side of the `∫f` evolution identity.
    pub f_identity_rhs: Option<f64>,
    /// `∫|Rc|²/R`; `None` unless `R > 0` everywhere.
    pub f_pos: Option<f64>,
    pub min_r: f64,
    pub max_r: f64,
    pub max_rm: f64,
}

impl Integrals {
    pub fn of_points(points: &[PointData]) -> Result<Self, GeometryError> {
        let g = Sym2Tensor::identity();
        let mut s = Integrals {
            vol: 0.0,
            r: 0.0,
            r2: 0.0,
            rc1: 0.0,
            rc2: 0.0,
            rc3: 0.0,
            rc4: 0.0,
            rm2: 0.0,
            gb: 0.0,
            grad: 0.0,
            f: Some(0.0),
            f2: Some(0.0),
            f_identity_rhs: Some(0.0),
            f_pos: Some(0.0),
            min_r: f64::INFINITY,
            max_r: f64::NEG_INFINITY,
            max_rm: 0.0,
        };
        for p in points {
            let d = PointwiseDensities::evaluate(&p.curvature, &p.ricci, p.scal_r, &p.derivs, F_SHIFT, &g)?;
            let w = p.weight;
            let rc = d.norm_rc2.sqrt();
            s.vol += w;
            s.r += w * d.scal_r;
            s.r2 += w * d.scal_r * d.scal_r;
            s.rc1 += w * rc;
            s.rc2 += w * d.norm_rc2;
            s.rc3 += w * rc * d.norm_rc2;
            s.rc4 += w * d.norm_rc2 * d.norm_rc2;
            s.rm2 += w * d.norm_rm2;
            s.gb += w * d.gb_density;
            s.grad += w * d.grad_rc2;
            s.min_r = s.min_r.min(d.scal_r);
            s.max_r = s.max_r.max(d.scal_r);
            s.max_rm = s.max_rm.max(p.curvature.max_abs());
            match (d.f_density, d.z_norm2) {
                (Some(f), Some(z)) => {
                    let den = d.scal_r + F_SHIFT;
                    s.f = s.f.map(|v| v + w * f);
                    s.f2 = s.f2.map(|v| v + w * f * f);
                    let id = -2.0 * z / den.powi(3) - 2.0 * f * f + 4.0 * d.rm_bilinear / den - f * d.scal_r;
                    s.f_identity_rhs = s.f_identity_rhs.map(|v| v + w * id);
                }
                _ => {
                    s.f = None;
                    s.f2 = None;
                    s.f_identity_rhs = None;
                }
            }
            if d.scal_r > 0.0 {
                s.f_pos = s.f_pos.map(|v| v + w * d.norm_rc2 / d.scal_r);
            } else {
                s.f_pos = None;
            }
        }
        Ok(s)
    }

    pub fn of_state(state: &GeometryState) -> Result<Self, GeometryError> {
        Self::of_points(&point_data(state)?)
    }

    /// `∫|Rc|^p` for p ∈ {1, 2, 3}.
    pub fn rcp(&self, p: usize) -> f64 {
        match p {
            1 => self.rc1,
            2 => self.rc2,
            3 => self.rc3,
            _ => panic!("p must be 1, 2 or 3"),
        }
    }
}

/// Time integrals `∫₀ᵗ ∫ · dμ dt` at a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accumulators {
    pub r2: f64,
    /// `None` when `f` is not tracked or the trajectory was rescaled.
    pub f2: Option<f64>,
    pub rc4: f64,
    pub rm2: f64,
    pub grad: f64,
    pub vol: f64,
    /// `∫₀ᵗ∫|Rc|^p` for p = 1, 2, 3.
    pub rcp: [f64; 3],
}

impl Accumulators {
    fn from_slice(a: &[f64], tracks_f: bool) -> Self {
        Self {
            r2: a[0],
            f2: tracks_f.then_some(a[1]),
            rc4: a[2],
            rm2: a[3],
            grad: a[4],
            vol: a[5],
            rcp: [a[6], a[7], a[8]],
        }
    }

    fn rates(i: &Integrals, tracks_f: bool) -> [f64; N_ACC] {
        [
            i.r2,
            if tracks_f { i.f2.unwrap_or(0.0) } else { 0.0 },
            i.rc4,
            i.rm2,
            i.grad,
            i.vol,
            i.rc1,
            i.rc2,
            i.rc3,
        ]
    }

    pub fn rcp(&self, p: usize) -> f64 {
        self.rcp[p - 1]
    }

    /// Values under `g̃(t̃) = c g(t̃/c)`.
    pub fn rescaled(&self, c: f64) -> Self {
        Self {
            r2: self.r2 * c,
            f2: None,
            rc4: self.rc4 / c,
            rm2: self.rm2 * c,
            grad: self.grad,
            vol: self.vol * c.powi(3),
            rcp: [self.rcp[0] * c * c, self.rcp[1] * c, self.rcp[2]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: GeometryState,
    pub integrals: Integrals,
    pub acc: Accumulators,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", rename_all_fields = "camelCase", tag = "kind")]
pub enum Termination {
    Completed,
    Blowup { last_good_time: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub family: FamilyId,
    pub chi: i32,
    pub samples: Vec<Sample>,
    pub termination: Termination,
    pub config: FlowConfig,
    /// Whether `f = |Rc|²/(R+2)` was well defined at `t = 0`.
    pub tracks_f: bool,
    /// Metric factor applied by [`normalize_initial`] before the run.
    pub scale_applied: f64,
    /// Parabolic factor applied after the run (1 for a direct run).
    pub rescale: f64,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

impl Trajectory {
    pub fn initial(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectories are never empty")
    }

    pub fn final_time(&self) -> f64 {
        self.last().t
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Index of the last sample with `t <= time` (up to roundoff).
    pub fn index_at(&self, time: f64) -> Option<usize> {
        let eps = 1e-9 * time.abs().max(1.0);
        self.samples.iter().rposition(|s| s.t <= time + eps)
    }

    pub fn sample_at(&self, time: f64) -> Option<&Sample> {
        self.index_at(time).map(|i| &self.samples[i])
    }

    pub fn sup_abs_r(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.integrals.min_r.abs().max(s.integrals.max_r.abs()))
            .fold(0.0, f64::max)
    }

    /// Report spacing if the samples are uniform.
    pub fn uniform_spacing(&self) -> Option<f64> {
        if self.samples.len() < 2 {
            return None;
        }
        let dt = self.samples[1].t - self.samples[0].t;
        let ok = self
            .samples
            .windows(2)
            .all(|w| ((w[1].t - w[0].t) - dt).abs() <= 1e-9 * dt);
        ok.then_some(dt)
    }
}

fn warped_h_max(state: &GeometryState, factor: f64) -> f64 {
    match &state.data {
        StateData::Warped { phi, psi } => {
            let h = crate::catalog::warped::grid_spacing(phi.len());
            let m = phi.iter().chain(psi).copied().fold(f64::INFINITY, f64::min);
            factor * (h * m).powi(2)
        }
        StateData::Params(_) => f64::INFINITY,
    }
}

fn sample_from(proto: &GeometryState, y: &[f64], t: f64, tracks_f: bool) -> Result<Sample, GeometryError> {
    let d = proto.dimension();
    let state = proto.with_vec(&y[..d], t);
    state.validate()?;
    let integrals = Integrals::of_state(&state)?;
    Ok(Sample {
        t,
        state,
        integrals,
        acc: Accumulators::from_slice(&y[d..], tracks_f),
    })
}

/// Integrates the flow from `initial` to `config.t_end`, sampling at
/// uniform report times.
pub fn evolve(initial: &GeometryState, config: &FlowConfig) -> Result<Trajectory, FlowError> {
    config.validate()?;
    initial.validate()?;
    let proto = GeometryState {
        time: 0.0,
        ..initial.clone()
    };
    let first = Integrals::of_state(&proto)?;
    let tracks_f = first.f.is_some();
    let d = proto.dimension();

    let last_max_rm = Cell::new(first.max_rm);
    let mut rhs = |t: f64, y: &[f64]| -> Result<Vec<f64>, GeometryError> {
        let state = proto.with_vec(&y[..d], t);
        state.validate()?;
        let pts = point_data(&state)?;
        let ints = Integrals::of_points(&pts)?;
        if tracks_f && ints.f.is_none() {
            return Err(TensorError::DenominatorNonpositive(ints.min_r + F_SHIFT).into());
        }
        last_max_rm.set(ints.max_rm);
        let mut out = flow_rhs_from_points(&state, &pts);
        out.extend_from_slice(&Accumulators::rates(&ints, tracks_f));
        Ok(out)
    };

    let mut y0 = proto.to_vec();
    y0.extend_from_slice(&[0.0; N_ACC]);
    let opts = StepperOptions {
        rel_tol: config.rel_tol,
        abs_tol: config.abs_tol,
        h_max: warped_h_max(&proto, config.warped_stability_factor),
        h_init: None,
        max_steps: config.max_steps,
    };
    let mut stepper = Dopri5::new(&mut rhs, 0.0, y0.clone(), opts).map_err(|e| match e {
        StepError::Initial(g) => FlowError::Geometry(g),
        _ => unreachable!("construction only evaluates the initial point"),
    })?;

    let dt = config.report_spacing();
    let report_time = |k: usize| {
        if k == config.n_reports {
            config.t_end
        } else {
            k as f64 * dt
        }
    };
    let mut samples = vec![sample_from(&proto, &y0, 0.0, tracks_f)?];
    let mut next = 1;

    let build = |samples: Vec<Sample>, termination: Termination, st: &Dopri5| Trajectory {
        family: proto.family,
        chi: proto.entry().chi,
        samples,
        termination,
        config: *config,
        tracks_f,
        scale_applied: 1.0,
        rescale: 1.0,
        steps_accepted: st.n_accepted,
        steps_rejected: st.n_rejected,
    };

    while next <= config.n_reports {
        let seg = match stepper.step(&mut rhs, config.t_end) {
            Ok(seg) => seg,
            Err(StepError::Underflow { t, h, last_rhs_error }) => {
                // leaving the admissible domain is a finite-time singularity
                if last_rhs_error.is_some() {
                    let traj = build(samples, Termination::Blowup { last_good_time: t }, &stepper);
                    return Err(FlowError::BlowupBeforeEnd {
                        last_good_time: t,
                        partial: Box::new(traj),
                    });
                }
                return Err(FlowError::StiffnessFailure { t, h });
            }
            Err(StepError::TooManySteps(n)) => return Err(FlowError::TooManySteps(n)),
            Err(StepError::Initial(_)) => unreachable!(),
        };
        let t1 = stepper.t();
        while next <= config.n_reports {
            let tr = report_time(next);
            if tr > t1 {
                break;
            }
            let y = if next == config.n_reports {
                stepper.y().to_vec()
            } else {
                seg.eval(tr)
            };
            samples.push(sample_from(&proto, &y, tr, tracks_f)?);
            next += 1;
        }
        if last_max_rm.get() > config.blowup_curvature_cap {
            let traj = build(samples, Termination::Blowup { last_good_time: t1 }, &stepper);
            return Err(FlowError::BlowupBeforeEnd {
                last_good_time: t1,
                partial: Box::new(traj),
            });
        }
        let d = proto.dimension();
        stepper.set_h_max(warped_h_max(
            &proto.with_vec(&stepper.y()[..d], t1),
            config.warped_stability_factor,
        ));
    }
    Ok(build(samples, Termination::Completed, &stepper))
}

/// Scales the metric so that `inf R > −1` when it is not already.
/// Returns the scaled state and the factor applied.
pub fn normalize_initial(state: &GeometryState) -> Result<(GeometryState, f64), GeometryError> {
    let min_r = Integrals::of_state(state)?.min_r;
    if min_r > -1.0 {
        return Ok((state.clone(), 1.0));
    }
    let c = min_r.abs() * (1.0 + NORMALIZE_MARGIN);
    Ok((state.scaled(c), c))
}

/// [`normalize_initial`] followed by [`evolve`].
pub fn evolve_normalized(initial: &GeometryState, config: &FlowConfig) -> Result<Trajectory, FlowError> {
    let (state, c) = normalize_initial(initial)?;
    let mark = |mut t: Trajectory| {
        t.scale_applied = c;
        t
    };
    match evolve(&state, config) {
        Ok(t) => Ok(mark(t)),
        Err(FlowError::BlowupBeforeEnd {
            last_good_time,
            partial,
        }) => Err(FlowError::BlowupBeforeEnd {
            last_good_time,
            partial: Box::new(mark(*partial)),
        }),
        Err(e) => Err(e),
    }
}

/// The trajectory of `g̃(t̃) = c g(t̃/c)`. Instantaneous integrals are
/// recomputed from the scaled states; accumulators are transformed by their
/// scaling weights. `A_f2` does not scale homogeneously and is dropped.
pub fn parabolic_rescale(traj: &Trajectory, c: f64) -> Result<Trajectory, FlowError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(FlowError::InvalidConfig(format!("rescale factor {c} must be positive")));
    }
    if c == 1.0 {
        return Ok(traj.clone());
    }
    let samples = traj
        .samples
        .iter()
        .map(|s| {
            let mut state = s.state.scaled(c);
            state.time = c * s.t;
            Ok(Sample {
                t: c * s.t,
                integrals: Integrals::of_state(&state)?,
                state,
                acc: s.acc.rescaled(c),
            })
        })
        .collect::<Result<Vec<_>, GeometryError>>()?;
    let termination = match traj.termination {
        Termination::Completed => Termination::Completed,
        Termination::Blowup { last_good_time } => Termination::Blowup {
            last_good_time: c * last_good_time,
        },
    };
    Ok(Trajectory {
        samples,
        termination,
        config: FlowConfig {
            t_end: c * traj.config.t_end,
            ..traj.config
        },
        tracks_f: false,
        rescale: traj.rescale * c,
        ..traj.clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasicAssumptions {
    pub holds: bool,
    pub sup_abs_r: f64,
}

/// Whether `sup |R| <= 1` on a finite horizon.
pub fn basic_assumptions_check(traj: &Trajectory) -> BasicAssumptions {
    let sup_abs_r = traj.sup_abs_r();
    BasicAssumptions {
        holds: sup_abs_r <= 1.0 + BASIC_ASSUMPTION_SLACK && traj.final_time().is_finite(),
        sup_abs_r,
    }
}
