//! JSON and CSV reports.
//!
//! Non-finite numbers (the sides of a check whose precondition failed)
//! are written as the strings `"NaN"`, `"inf"` and `"-inf"` so the JSON
//! stays strict.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ricci4_core::{InequalityResult, StateData, Trajectory};
use serde_json::{json, Map, Value};

use crate::config::{Scenario, SCHEMA_VERSION};
use crate::runner::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?}; expected json or csv")),
        }
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("NaN")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn num_map(m: &BTreeMap<String, f64>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.clone(), num(*v))).collect())
}

pub fn check_json(r: &InequalityResult) -> Value {
    json!({
        "checkId": r.check_id,
        "S": num(r.eval_time),
        "lhs": num(r.lhs),
        "rhs": num(r.rhs),
        "margin": num(r.margin),
        "status": r.status,
        "kind": r.kind,
        "tolerance": num(r.tolerance),
        "constants": num_map(&r.constants),
        "note": r.note,
    })
}

fn report_json(r: &RunReport, deterministic: bool) -> Value {
    let mut o = Map::new();
    o.insert("scenarioId".into(), json!(r.scenario_id));
    o.insert("family".into(), json!(r.family));
    o.insert("chi".into(), json!(r.chi));
    o.insert("status".into(), json!(r.status));
    o.insert("trajectory".into(), json!(r.summary));
    o.insert(
        "checks".into(),
        Value::Array(r.results.iter().map(check_json).collect()),
    );
    o.insert("error".into(), json!(r.error));
    if !deterministic {
        o.insert("elapsedMs".into(), json!(r.elapsed_ms));
    }
    Value::Object(o)
}

/// The full report document. With `deterministic`, timing is left out
/// and the output depends only on the config and the build.
pub fn json_document(scenarios: &[Scenario], reports: &[RunReport], deterministic: bool) -> Value {
    let mut sorted: Vec<&Scenario> = scenarios.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let constants: Map<String, Value> = reports
        .iter()
        .map(|r| (r.scenario_id.clone(), num_map(&r.constants)))
        .collect();
    let mut doc = Map::new();
    doc.insert("schemaVersion".into(), json!(SCHEMA_VERSION));
    doc.insert(
        "generator".into(),
        json!({ "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") }),
    );
    doc.insert(
        "scenarios".into(),
        serde_json::to_value(&sorted).expect("scenarios serialize"),
    );
    doc.insert(
        "results".into(),
        Value::Array(reports.iter().map(|r| report_json(r, deterministic)).collect()),
    );
    doc.insert("constants".into(), Value::Object(constants));
    if !deterministic {
        let total: f64 = reports.iter().map(|r| r.elapsed_ms).sum();
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        doc.insert(
            "timing".into(),
            json!({ "scenarioMsTotal": total, "generatedAtUnix": now }),
        );
    }
    Value::Object(doc)
}

pub fn write_json<W: Write + ?Sized>(
    w: &mut W,
    scenarios: &[Scenario],
    reports: &[RunReport],
    deterministic: bool,
) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, &json_document(scenarios, reports, deterministic))?;
    writeln!(w)
}

pub const RESULT_COLUMNS: [&str; 7] = ["checkId", "scenarioId", "S", "lhs", "rhs", "margin", "status"];

fn csv_err(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        k => io::Error::other(format!("{k:?}")),
    }
}

/// One row per check.
pub fn write_csv<W: Write>(w: W, reports: &[RunReport]) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RESULT_COLUMNS).map_err(csv_err)?;
    for rep in reports {
        for r in &rep.results {
            out.write_record([
                r.check_id.clone(),
                rep.scenario_id.clone(),
                fmt_f64(r.eval_time),
                fmt_f64(r.lhs),
                fmt_f64(r.rhs),
                fmt_f64(r.margin),
                r.status.as_str().to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    out.flush()
}

pub const TRAJECTORY_TAIL: [&str; 12] = [
    "minR", "maxR", "vol", "intRc2", "intRm2", "intF", "accR2", "accF2", "accRc4", "accRm2", "accGrad", "accVol",
];

/// Parameter columns: catalog names for homogeneous families, field
/// extrema for the warped one.
fn param_columns(traj: &Trajectory) -> Vec<String> {
    match &traj.initial().state.data {
        StateData::Params(_) => traj
            .family
            .entry()
            .param_spec
            .iter()
            .map(|p| p.name.to_string())
            .collect(),
        StateData::Warped { .. } => ["phiMin", "phiMax", "psiMin", "psiMax"].map(String::from).to_vec(),
    }
}

fn param_values(data: &StateData) -> Vec<f64> {
    let ext = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        [lo, hi]
    };
    match data {
        StateData::Params(p) => p.clone(),
        StateData::Warped { phi, psi } => ext(phi).into_iter().chain(ext(psi)).collect(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Samples of one trajectory; unavailable `f` entries are left empty.
pub fn write_trajectory_csv<W: Write>(w: W, traj: &Trajectory) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["t".to_string()];
    header.extend(param_columns(traj));
    header.extend(TRAJECTORY_TAIL.iter().map(|s| s.to_string()));
    out.write_record(&header).map_err(csv_err)?;
    for s in &traj.samples {
        let i = &s.integrals;
        let a = &s.acc;
        let mut row = vec![fmt_f64(s.t)];
        row.extend(param_values(&s.state.data).into_iter().map(fmt_f64));
        row.extend([
            fmt_f64(i.min_r),
            fmt_f64(i.max_r),
            fmt_f64(i.vol),
            fmt_f64(i.rc2),
            fmt_f64(i.rm2),
            opt(i.f),
            fmt_f64(a.r2),
            opt(a.f2),
            fmt_f64(a.rc4),
            fmt_f64(a.rm2),
            fmt_f64(a.grad),
            fmt_f64(a.vol),
        ]);
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()
}

/// Writes `<dir>/<scenario id>.csv` for every report with a trajectory
/// and returns the paths written.
pub fn write_trajectories(dir: &Path, reports: &[RunReport]) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for r in reports {
        if let Some(t) = &r.trajectory {
            let name: String = r
                .scenario_id
                .chars()
                .map(|c| {
                    if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                        c
                    } else {
                        '_'
                    }
                })
                .collect();
            let p = dir.join(format!("{name}.csv"));
            write_trajectory_csv(std::fs::File::create(&p)?, t)?;
            paths.push(p);
        }
    }
    Ok(paths)
}
