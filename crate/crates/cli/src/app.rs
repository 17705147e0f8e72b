//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ricci4_core::{catalog, CatalogEntry, FamilyId, SuiteOptions};
use serde_json::json;

use crate::config::{initial_params_from_pairs, parse_config, ConfigError, Overrides, Scenario};
use crate::emit::{self, Format};
use crate::runner::{exit_code, run, run_one, RunReport, EXIT_USAGE};

/// Default directory for reports when `--out` is not given.
pub const OUT_DIR_ENV: &str = "RICCI4_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "ricci4", version, about = "Ricci flow integral curvature estimate checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl From<ReportFormat> for Format {
    fn from(f: ReportFormat) -> Self {
        match f {
            ReportFormat::Json => Format::Json,
            ReportFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ViewFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the geometry families with their Euler characteristic.
    Catalog {
        #[arg(long, value_enum, default_value_t = ViewFormat::Text)]
        format: ViewFormat,
    },
    /// Run every scenario of a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
        /// Report path; defaults to `$RICCI4_OUT_DIR/report.<format>`,
        /// else standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for one trajectory CSV per scenario.
        #[arg(long)]
        traj_out: Option<PathBuf>,
        /// Leave timing out of the report.
        #[arg(long)]
        deterministic: bool,
        #[arg(long, env = OUT_DIR_ENV, hide_env_values = true)]
        out_dir: Option<PathBuf>,
    },
    /// Run one family through one or more suites.
    Check {
        #[arg(long)]
        family: String,
        #[arg(long = "suite", required = true)]
        suites: Vec<String>,
        /// Initial data as `name=value`; repeatable.
        #[arg(long = "param", value_parser = parse_pair)]
        params: Vec<(String, f64)>,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, value_enum, default_value_t = ViewFormat::Text)]
        format: ViewFormat,
    },
}

fn parse_pair(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Runs the CLI and returns the process exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let res = match cli.command {
        Command::Catalog { format } => cmd_catalog(format, out),
        Command::Run {
            config,
            format,
            out: path,
            traj_out,
            deterministic,
            out_dir,
        } => cmd_run(
            &config,
            format.into(),
            path.or_else(|| out_dir.map(|d| d.join(format!("report.{}", Format::from(format).extension())))),
            traj_out.as_deref(),
            deterministic,
            out,
            err,
        ),
        Command::Check {
            family,
            suites,
            params,
            t_end,
            format,
        } => cmd_check(&family, &suites, &params, t_end, format, out, err),
    };
    match res {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

/// Parameter names in slot order; shared slots appear once.
fn distinct_params(e: &CatalogEntry) -> Vec<(&'static str, f64)> {
    let mut v: Vec<(&'static str, f64)> = Vec::new();
    for p in &e.param_spec {
        if !v.iter().any(|(n, _)| *n == p.name) {
            v.push((p.name, p.default));
        }
    }
    v
}

fn cmd_catalog(format: ViewFormat, out: &mut dyn Write) -> Result<u8, String> {
    let io = |e: std::io::Error| e.to_string();
    match format {
        ViewFormat::Json => {
            let v: Vec<_> = catalog()
                .iter()
                .map(|e| {
                    json!({
                        "family": e.name(),
                        "kind": e.kind,
                        "chi": e.chi,
                        "description": e.description,
                        "params": distinct_params(e).iter().map(|(n, d)| json!({"name": n, "default": d})).collect::<Vec<_>>(),
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &v).map_err(|e| e.to_string())?;
            writeln!(out).map_err(io)?;
        }
        ViewFormat::Csv => {
            writeln!(out, "family,chi,params").map_err(io)?;
            for e in catalog() {
                let names: Vec<&str> = distinct_params(e).iter().map(|p| p.0).collect();
                writeln!(out, "{},{},{}", e.name(), e.chi, names.join(" ")).map_err(io)?;
            }
        }
        ViewFormat::Text => {
            writeln!(out, "{:<13} {:>3}  {:<28} description", "family", "chi", "defaults").map_err(io)?;
            for e in catalog() {
                let d: Vec<String> = distinct_params(e).iter().map(|(n, d)| format!("{n}={d}")).collect();
                let d = if d.is_empty() {
                    "warp fields".to_string()
                } else {
                    d.join(" ")
                };
                writeln!(out, "{:<13} {:>3}  {:<28} {}", e.name(), e.chi, d, e.description).map_err(io)?;
            }
        }
    }
    Ok(0)
}

fn write_report(
    format: Format,
    scenarios: &[Scenario],
    reports: &[RunReport],
    deterministic: bool,
    w: &mut dyn Write,
) -> std::io::Result<()> {
    match format {
        Format::Json => emit::write_json(w, scenarios, reports, deterministic),
        Format::Csv => emit::write_csv(w, reports),
    }
}

fn summarize(reports: &[RunReport], err: &mut dyn Write) {
    for r in reports {
        let bad = r.results.iter().filter(|c| !c.passed()).count();
        let _ = write!(
            err,
            "{:<24} {:<18} {} checks",
            r.scenario_id,
            r.status.as_str(),
            r.results.len()
        );
        if bad > 0 {
            let _ = write!(err, ", {bad} not passed");
        }
        if let Some(e) = &r.error {
            let _ = write!(err, ", error: {e}");
        }
        let _ = writeln!(err);
    }
}

fn cmd_run(
    config: &Path,
    format: Format,
    path: Option<PathBuf>,
    traj_out: Option<&Path>,
    deterministic: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<u8, String> {
    let text = std::fs::read_to_string(config).map_err(|e| format!("{}: {e}", config.display()))?;
    let scenarios = parse_config(&text).map_err(|e| format!("{}: {e}", config.display()))?;
    let reports = run(&scenarios);
    match &path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            }
            let mut f = std::fs::File::create(p).map_err(|e| format!("{}: {e}", p.display()))?;
            write_report(format, &scenarios, &reports, deterministic, &mut f)
                .map_err(|e| format!("{}: {e}", p.display()))?;
        }
        None => write_report(format, &scenarios, &reports, deterministic, out).map_err(|e| e.to_string())?,
    }
    if let Some(dir) = traj_out {
        emit::write_trajectories(dir, &reports).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    summarize(&reports, err);
    Ok(exit_code(&reports))
}

fn cmd_check(
    family: &str,
    suites: &[String],
    params: &[(String, f64)],
    t_end: f64,
    format: ViewFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<u8, String> {
    let id = FamilyId::from_name(family).ok_or_else(|| {
        ConfigError::UnknownFamily {
            field: "family".into(),
            name: family.into(),
        }
        .to_string()
    })?;
    let initial = if params.is_empty() {
        None
    } else {
        Some(initial_params_from_pairs(id, params).map_err(|e| e.to_string())?)
    };
    let sc = Scenario::new(
        "check",
        "check",
        family,
        initial,
        t_end,
        suites,
        Overrides::default(),
        SuiteOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let rep = run_one(&sc);
    let reports = [rep];
    let io = |e: std::io::Error| e.to_string();
    match format {
        ViewFormat::Json => emit::write_json(out, std::slice::from_ref(&sc), &reports, true).map_err(io)?,
        ViewFormat::Csv => emit::write_csv(&mut *out, &reports).map_err(io)?,
        ViewFormat::Text => {
            let r = &reports[0];
            if let Some(s) = &r.summary {
                writeln!(
                    out,
                    "{} to t = {} ({:?}), sup|R| = {:.6e}",
                    family, s.final_time, s.termination, s.sup_abs_r
                )
                .map_err(io)?;
            }
            writeln!(
                out,
                "{:<34} {:>10} {:>14} {:>14} {:>12}  status",
                "check", "S", "lhs", "rhs", "margin"
            )
            .map_err(io)?;
            for c in &r.results {
                writeln!(
                    out,
                    "{:<34} {:>10.4} {:>14.6e} {:>14.6e} {:>12.3e}  {}",
                    c.check_id, c.eval_time, c.lhs, c.rhs, c.margin, c.status
                )
                .map_err(io)?;
            }
        }
    }
    if let Some(e) = &reports[0].error {
        let _ = writeln!(err, "run error: {e}");
    }
    Ok(exit_code(&reports))
}
