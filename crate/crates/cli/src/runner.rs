//! Runs scenarios through the flow and the estimate suites.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use ricci4_core::{
    evolve, evolve_normalized, run_suite, EstimateConstants, FamilyId, FlowError, InequalityResult, Status,
    Termination, Trajectory,
};
use serde::Serialize;

use crate::config::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrajectorySummary {
    pub termination: Termination,
    pub final_time: f64,
    pub sup_abs_r: f64,
    /// Metric factor applied to reach `inf R > −1` before the run.
    pub scale_applied: f64,
    pub samples: usize,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

impl TrajectorySummary {
    fn of(t: &Trajectory) -> Self {
        Self {
            termination: t.termination,
            final_time: t.final_time(),
            sup_abs_r: t.sup_abs_r(),
            scale_applied: t.scale_applied,
            samples: t.samples.len(),
            steps_accepted: t.steps_accepted,
            steps_rejected: t.steps_rejected,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario_id: String,
    pub family: FamilyId,
    pub chi: i32,
    /// Worst status over `results`; FAIL when the run itself errored.
    pub status: Status,
    pub summary: Option<TrajectorySummary>,
    pub results: Vec<InequalityResult>,
    /// Constants of the initial metric and their values at the
    /// evaluation time `S` and the final time `T`.
    pub constants: BTreeMap<String, f64>,
    pub error: Option<String>,
    pub elapsed_ms: f64,
    pub trajectory: Option<Trajectory>,
}

fn constants_of(traj: &Trajectory, s: f64) -> BTreeMap<String, f64> {
    let k = EstimateConstants::from_trajectory(traj);
    let t = traj.final_time();
    let mut m = BTreeMap::new();
    let mut put = |name: &str, v: Option<f64>| {
        if let Some(v) = v {
            m.insert(name.to_string(), v);
        }
    };
    put("chi", Some(k.chi));
    put("S", Some(s));
    put("T", Some(t));
    put("vol0", Some(k.vol0));
    put("intF0", k.int_f0);
    put("intRc2OverR0", k.int_rc2_over_r0);
    put("intRc2_0", Some(k.int_rc2_0));
    put("c0(S)", k.c0(s));
    put("a0(S)", k.a0(s));
    put("b(T)", Some(k.b(t)));
    put("B(T)", Some(k.big_b(t)));
    m
}

/// Runs one scenario; errors land in the report rather than aborting.
pub fn run_one(sc: &Scenario) -> RunReport {
    let start = Instant::now();
    let entry = sc.family.entry();
    let mut report = RunReport {
        scenario_id: sc.id.clone(),
        family: sc.family,
        chi: entry.chi,
        status: Status::Fail,
        summary: None,
        results: Vec::new(),
        constants: BTreeMap::new(),
        error: None,
        elapsed_ms: 0.0,
        trajectory: None,
    };
    let outcome = sc.initial_state().map_err(FlowError::from).and_then(|s| {
        if sc.normalize {
            evolve_normalized(&s, &sc.flow_config())
        } else {
            evolve(&s, &sc.flow_config())
        }
    });
    let traj = match outcome {
        Ok(t) => Some(t),
        Err(FlowError::BlowupBeforeEnd { partial, .. }) => Some(*partial),
        Err(e) => {
            report.error = Some(e.to_string());
            None
        }
    };
    if let Some(traj) = traj {
        for suite in &sc.suites {
            report.results.extend(run_suite(&traj, *suite, &sc.options));
        }
        report.status = Status::worst(report.results.iter().map(|r| r.status));
        report.constants = constants_of(&traj, sc.options.eval_time.unwrap_or(traj.final_time()));
        report.summary = Some(TrajectorySummary::of(&traj));
        report.trajectory = Some(traj);
    }
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

/// Runs scenarios in parallel; reports come back ordered by scenario id.
pub fn run(scenarios: &[Scenario]) -> Vec<RunReport> {
    let mut out: Vec<RunReport> = scenarios.par_iter().map(run_one).collect();
    out.sort_by(|a, b| a.scenario_id.cmp(&b.scenario_id));
    out
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_PRECONDITION: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

pub fn exit_code(reports: &[RunReport]) -> u8 {
    match Status::worst(reports.iter().map(|r| r.status)) {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::PreconditionUnmet => EXIT_PRECONDITION,
    }
}
