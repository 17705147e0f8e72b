//! Scenario files: a JSON object with a `scenarios` array.
//!
//! ```json
//! {
//!   "schemaVersion": 1,
//!   "scenarios": [
//!     { "id": "sphere", "family": "S4", "initialParams": { "r2": 100 },
//!       "tEnd": 1.0, "suites": ["main", "posscalar"] }
//!   ]
//! }
//! ```
//!
//! Every field except `id` and `family` has a default. Warped scenarios
//! take `initialParams` of the form `{ "phi": F, "psi": F, "n": 128 }` where
//! `F = { "mean": a0, "cos": [a1, ...], "sin": [b1, ...] }`.

use std::collections::{BTreeMap, BTreeSet};

use ricci4_core::{FamilyId, FlowConfig, FourierField, GeometryState, Kind, Suite, SuiteOptions, DEFAULT_WARP_N};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column} (field `{field}`): {message}")]
    Parse {
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("field `{field}`: unknown family {name:?}; known families: {}", known_families())]
    UnknownFamily { field: String, name: String },
    #[error("field `{field}`: unknown suite {name:?}; known suites: {}", known_suites())]
    UnknownSuite { field: String, name: String },
    #[error("field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn known_families() -> String {
    FamilyId::ALL.map(|f| f.name()).join(", ")
}

fn known_suites() -> String {
    Suite::ALL.map(|s| s.name()).join(", ")
}

/// Warp-field initial data by Fourier coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpSpec {
    #[serde(default = "unit_field")]
    pub phi: FourierField,
    #[serde(default = "default_psi")]
    pub psi: FourierField,
    #[serde(default = "default_n")]
    pub n: usize,
}

fn unit_field() -> FourierField {
    FourierField::constant(1.0)
}

fn default_psi() -> FourierField {
    FourierField {
        mean: 4.0,
        cos: vec![0.2],
        sin: vec![],
    }
}

fn default_n() -> usize {
    DEFAULT_WARP_N
}

impl Default for WarpSpec {
    fn default() -> Self {
        Self {
            phi: unit_field(),
            psi: default_psi(),
            n: default_n(),
        }
    }
}

/// Named parameters for homogeneous families, or a warp spec.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum InitialParams {
    Named(BTreeMap<String, f64>),
    Warp(WarpSpec),
}

impl<'de> Deserialize<'de> for InitialParams {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(d)?;
        let is_warp = v
            .as_object()
            .is_some_and(|o| o.contains_key("phi") || o.contains_key("psi") || o.contains_key("n"));
        if is_warp {
            serde_json::from_value(v)
                .map(InitialParams::Warp)
                .map_err(D::Error::custom)
        } else {
            serde_json::from_value(v)
                .map(InitialParams::Named)
                .map_err(|e| D::Error::custom(format!("expected named real parameters or a warp spec: {e}")))
        }
    }
}

/// Flow settings a scenario may override; `tEnd` lives on the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct Overrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup_curvature_cap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warped_stability_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_reports: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, t_end: f64) -> FlowConfig {
        let d = FlowConfig::default();
        FlowConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            t_end,
            blowup_curvature_cap: self.blowup_curvature_cap.unwrap_or(d.blowup_curvature_cap),
            warped_stability_factor: self.warped_stability_factor.unwrap_or(d.warped_stability_factor),
            n_reports: self.n_reports.unwrap_or(d.n_reports),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
        }
    }

    fn filled(c: &FlowConfig) -> Self {
        Self {
            rel_tol: Some(c.rel_tol),
            abs_tol: Some(c.abs_tol),
            blowup_curvature_cap: Some(c.blowup_curvature_cap),
            warped_stability_factor: Some(c.warped_stability_factor),
            n_reports: Some(c.n_reports),
            max_steps: Some(c.max_steps),
        }
    }
}

fn default_t_end() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawScenario {
    id: String,
    family: String,
    #[serde(default)]
    initial_params: Option<InitialParams>,
    #[serde(default = "default_t_end")]
    t_end: f64,
    /// Empty means every suite.
    #[serde(default)]
    suites: Vec<String>,
    /// Rescale data with `inf R <= −1` before the flow.
    #[serde(default = "yes")]
    normalize: bool,
    #[serde(default)]
    overrides: Overrides,
    #[serde(default)]
    options: SuiteOptions,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawConfig {
    #[serde(default)]
    schema_version: Option<u32>,
    scenarios: Vec<RawScenario>,
}

/// A validated scenario with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Scenario {
    pub id: String,
    pub family: FamilyId,
    pub initial_params: InitialParams,
    pub t_end: f64,
    pub suites: Vec<Suite>,
    pub normalize: bool,
    pub overrides: Overrides,
    pub options: SuiteOptions,
}

impl Scenario {
    pub fn flow_config(&self) -> FlowConfig {
        self.overrides.apply(self.t_end)
    }

    pub fn initial_state(&self) -> Result<GeometryState, ricci4_core::GeometryError> {
        build_state(self.family, &self.initial_params)
    }

    /// Builds and validates a scenario outside a config file; `field` is
    /// the prefix used in diagnostics.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        field: &str,
        id: &str,
        family: &str,
        initial_params: Option<InitialParams>,
        t_end: f64,
        suites: &[String],
        overrides: Overrides,
        options: SuiteOptions,
    ) -> Result<Self, ConfigError> {
        validate(
            field,
            RawScenario {
                id: id.to_string(),
                family: family.to_string(),
                initial_params,
                t_end,
                suites: suites.to_vec(),
                normalize: true,
                overrides,
                options,
            },
        )
    }
}

fn build_state(family: FamilyId, p: &InitialParams) -> Result<GeometryState, ricci4_core::GeometryError> {
    match p {
        InitialParams::Named(m) => GeometryState::homogeneous(family, family.entry().params_from_named(m)?),
        InitialParams::Warp(w) => GeometryState::warped_from_fourier(&w.phi, &w.psi, w.n),
    }
}

fn default_initial(family: FamilyId) -> InitialParams {
    let e = family.entry();
    match e.kind {
        Kind::Warped => InitialParams::Warp(WarpSpec::default()),
        _ => InitialParams::Named(e.param_spec.iter().map(|p| (p.name.to_string(), p.default)).collect()),
    }
}

/// Named parameters with every catalog slot present.
fn fill_named(family: FamilyId, m: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>, String> {
    let e = family.entry();
    let v = e.params_from_named(m).map_err(|err| err.to_string())?;
    Ok(e.param_spec
        .iter()
        .zip(v)
        .map(|(p, x)| (p.name.to_string(), x))
        .collect())
}

fn validate(prefix: &str, raw: RawScenario) -> Result<Scenario, ConfigError> {
    let invalid = |f: &str, m: String| ConfigError::Invalid {
        field: format!("{prefix}.{f}"),
        message: m,
    };
    if raw.id.trim().is_empty() {
        return Err(invalid("id", "must not be empty".into()));
    }
    let family = FamilyId::from_name(&raw.family).ok_or_else(|| ConfigError::UnknownFamily {
        field: format!("{prefix}.family"),
        name: raw.family.clone(),
    })?;
    let mut suites = Vec::new();
    for (k, s) in raw.suites.iter().enumerate() {
        let suite = s.parse::<Suite>().map_err(|_| ConfigError::UnknownSuite {
            field: format!("{prefix}.suites[{k}]"),
            name: s.clone(),
        })?;
        if !suites.contains(&suite) {
            suites.push(suite);
        }
    }
    if suites.is_empty() {
        suites = Suite::ALL.to_vec();
    }
    let warped = family.entry().kind == Kind::Warped;
    let initial_params = match raw.initial_params {
        None => default_initial(family),
        Some(InitialParams::Named(m)) if !warped => {
            InitialParams::Named(fill_named(family, &m).map_err(|e| invalid("initialParams", e))?)
        }
        Some(InitialParams::Warp(w)) if warped => InitialParams::Warp(w),
        Some(InitialParams::Named(m)) if m.is_empty() => default_initial(family),
        Some(_) => {
            let want = if warped {
                "a warp spec {phi, psi, n}"
            } else {
                "named real parameters"
            };
            return Err(invalid("initialParams", format!("{} takes {want}", family.name())));
        }
    };
    build_state(family, &initial_params).map_err(|e| invalid("initialParams", e.to_string()))?;
    let flow = raw.overrides.apply(raw.t_end);
    flow.validate().map_err(|e| invalid("overrides", e.to_string()))?;
    let o = &raw.options;
    if !(o.margin_tol >= 0.0) || !(o.volume_residual_tol >= 0.0) || o.gauss_bonnet_tol.is_some_and(|t| !(t >= 0.0)) {
        return Err(invalid("options", "tolerances must be non-negative".into()));
    }
    if !(o.scale_factor > 0.0) {
        return Err(invalid("options.scaleFactor", "must be positive".into()));
    }
    Ok(Scenario {
        id: raw.id,
        family,
        initial_params,
        t_end: flow.t_end,
        suites,
        normalize: raw.normalize,
        overrides: Overrides::filled(&flow),
        options: raw.options,
    })
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<Vec<Scenario>, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        let message = strip_position(&inner.to_string());
        ConfigError::Parse {
            line: inner.line(),
            column: inner.column(),
            field,
            message,
        }
    })?;
    if let Some(v) = raw.schema_version {
        if v != SCHEMA_VERSION {
            return Err(ConfigError::Invalid {
                field: "schemaVersion".into(),
                message: format!("unsupported version {v}, expected {SCHEMA_VERSION}"),
            });
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.scenarios.len());
    for (i, s) in raw.scenarios.into_iter().enumerate() {
        let prefix = format!("scenarios[{i}]");
        if !seen.insert(s.id.clone()) {
            return Err(ConfigError::Invalid {
                field: format!("{prefix}.id"),
                message: format!("duplicate scenario id {:?}", s.id),
            });
        }
        out.push(validate(&prefix, s)?);
    }
    Ok(out)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(k) => msg[..k].to_string(),
        None => msg.to_string(),
    }
}

/// The canonical config document for `scenarios`; parsing it returns
/// the same scenarios.
pub fn serialize_config(scenarios: &[Scenario]) -> String {
    #[derive(Serialize)]
    #[serde(rename_all = "camelCase")]
    struct Doc<'a> {
        schema_version: u32,
        scenarios: &'a [Scenario],
    }
    serde_json::to_string_pretty(&Doc {
        schema_version: SCHEMA_VERSION,
        scenarios,
    })
    .expect("scenarios serialize")
}

/// Initial data from `key=value` pairs. Homogeneous families take catalog
/// parameter names; the warped family takes `n`, `phi.mean`, `psi.mean`,
/// `psi.cos1`, `psi.sin2` and so on.
pub fn initial_params_from_pairs(family: FamilyId, pairs: &[(String, f64)]) -> Result<InitialParams, ConfigError> {
    let invalid = |m: String| ConfigError::Invalid {
        field: "param".into(),
        message: m,
    };
    if family.entry().kind != Kind::Warped {
        return Ok(InitialParams::Named(pairs.iter().cloned().collect()));
    }
    let mut w = WarpSpec::default();
    for (k, v) in pairs {
        if k == "n" {
            if !(v.fract() == 0.0 && *v >= 1.0) {
                return Err(invalid(format!("n = {v} is not a positive integer")));
            }
            w.n = *v as usize;
            continue;
        }
        let (field, coef) = k
            .split_once('.')
            .ok_or_else(|| invalid(format!("unknown warp key {k:?}")))?;
        let f = match field {
            "phi" => &mut w.phi,
            "psi" => &mut w.psi,
            _ => return Err(invalid(format!("unknown warp field {field:?}"))),
        };
        if coef == "mean" {
            f.mean = *v;
            continue;
        }
        let (list, idx) = if let Some(i) = coef.strip_prefix("cos") {
            (&mut f.cos, i)
        } else if let Some(i) = coef.strip_prefix("sin") {
            (&mut f.sin, i)
        } else {
            return Err(invalid(format!("unknown coefficient {coef:?}")));
        };
        let m: usize = idx
            .parse()
            .ok()
            .filter(|m| *m >= 1)
            .ok_or_else(|| invalid(format!("bad mode in {k:?}")))?;
        if list.len() < m {
            list.resize(m, 0.0);
        }
        list[m - 1] = *v;
    }
    Ok(InitialParams::Warp(w))
}
