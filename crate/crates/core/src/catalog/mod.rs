//! Closed four-manifold families with exactly computable curvature.

pub mod lie;
pub mod warped;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

use crate::tensor::{ricci_of, scalar_of, CurvatureDerivatives, CurvatureTensor, Sym2Tensor, TensorError, DIM};
use lie::{Connection, StructureConstants};
pub use warped::FourierField;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("parameter domain error: {0}")]
    Domain(String),
    #[error("warped field sample {index} = {value:e} is degenerate")]
    DegenerateField { index: usize, value: f64 },
    #[error("expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FamilyId {
    S4,
    S2xS2,
    T4,
    BergerS3xS1,
    Nil3xS1,
    WarpedS1xS3,
}

impl FamilyId {
    pub const ALL: [FamilyId; 6] = [
        FamilyId::S4,
        FamilyId::S2xS2,
        FamilyId::T4,
        FamilyId::BergerS3xS1,
        FamilyId::Nil3xS1,
        FamilyId::WarpedS1xS3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::S4 => "S4",
            FamilyId::S2xS2 => "S2xS2",
            FamilyId::T4 => "T4",
            FamilyId::BergerS3xS1 => "BergerS3xS1",
            FamilyId::Nil3xS1 => "Nil3xS1",
            FamilyId::WarpedS1xS3 => "WarpedS1xS3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn entry(self) -> &'static CatalogEntry {
        catalog()
            .iter()
            .find(|e| e.id == self)
            .expect("every family has an entry")
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Homogeneous,
    Product,
    Warped,
}

/// One admissible parameter with its open interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub lower: f64,
    pub upper: f64,
    pub default: f64,
}

impl ParamSpec {
    fn positive(name: &'static str, default: f64) -> Self {
        Self {
            name,
            lower: 0.0,
            upper: f64::INFINITY,
            default,
        }
    }

    pub fn admits(&self, v: f64) -> bool {
        v.is_finite() && v > self.lower && v < self.upper
    }
}

/// Immutable description of a geometry family.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: FamilyId,
    pub kind: Kind,
    pub description: &'static str,
    pub structure_constants: Option<StructureConstants>,
    pub chi: i32,
    /// Stored parameters, in state-vector order. Homogeneous parameters are
    /// squared frame scales; slots sharing a name are set together.
    pub param_spec: Vec<ParamSpec>,
    /// Volume at unit parameters.
    pub lattice_volume_factor: f64,
}

impl CatalogEntry {
    pub fn name(&self) -> &'static str {
        self.id.name()
    }

    pub fn default_params(&self) -> Vec<f64> {
        self.param_spec.iter().map(|p| p.default).collect()
    }

    /// Parameter vector from named values; unnamed slots keep defaults.
    pub fn params_from_named(&self, named: &BTreeMap<String, f64>) -> Result<Vec<f64>, GeometryError> {
        let mut out = self.default_params();
        for (key, &v) in named {
            let mut hit = false;
            for (slot, spec) in self.param_spec.iter().enumerate() {
                if spec.name == key {
                    out[slot] = v;
                    hit = true;
                }
            }
            if !hit {
                return Err(GeometryError::Domain(format!(
                    "{} has no parameter {key:?}",
                    self.name()
                )));
            }
        }
        self.check_params(&out)?;
        Ok(out)
    }

    pub fn check_params(&self, params: &[f64]) -> Result<(), GeometryError> {
        if self.kind == Kind::Warped {
            return Err(GeometryError::Domain(
                "warped family takes field samples, not parameters".into(),
            ));
        }
        if params.len() != self.param_spec.len() {
            return Err(GeometryError::ArityMismatch {
                expected: self.param_spec.len(),
                got: params.len(),
            });
        }
        for (spec, &v) in self.param_spec.iter().zip(params) {
            if !spec.admits(v) {
                return Err(GeometryError::Domain(format!(
                    "{} parameter {} = {v} outside ({}, {})",
                    self.name(),
                    spec.name,
                    spec.lower,
                    spec.upper
                )));
            }
        }
        Ok(())
    }

    /// Squared orthonormal-frame scales for a parameter vector.
    fn frame_scales2(&self, p: &[f64]) -> [f64; DIM] {
        match self.id {
            FamilyId::S4 => [p[0]; DIM],
            FamilyId::S2xS2 => [p[0], p[0], p[1], p[1]],
            _ => [p[0], p[1], p[2], p[3]],
        }
    }
}

pub fn catalog() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let su2 = StructureConstants::from_brackets(&[(0, 1, 2, 2.0), (1, 2, 0, 2.0), (2, 0, 1, 2.0)]);
        let heis = StructureConstants::from_brackets(&[(0, 1, 2, 1.0)]);
        vec![
            CatalogEntry {
                id: FamilyId::S4,
                kind: Kind::Homogeneous,
                description: "round 4-sphere of radius r",
                structure_constants: None,
                chi: 2,
                param_spec: vec![ParamSpec::positive("r2", 100.0)],
                lattice_volume_factor: 8.0 * PI * PI / 3.0,
            },
            CatalogEntry {
                id: FamilyId::S2xS2,
                kind: Kind::Product,
                description: "product of round 2-spheres of radii a, b",
                structure_constants: None,
                chi: 4,
                param_spec: vec![ParamSpec::positive("a2", 50.0), ParamSpec::positive("b2", 50.0)],
                lattice_volume_factor: 16.0 * PI * PI,
            },
            CatalogEntry {
                id: FamilyId::T4,
                kind: Kind::Homogeneous,
                description: "flat torus R^4 / (2π Z)^4 with diagonal metric",
                structure_constants: Some(StructureConstants::zero()),
                chi: 0,
                param_spec: ["x1", "x2", "x3", "x4"]
                    .into_iter()
                    .map(|n| ParamSpec::positive(n, 1.0))
                    .collect(),
                lattice_volume_factor: (2.0 * PI).powi(4),
            },
            CatalogEntry {
                id: FamilyId::BergerS3xS1,
                kind: Kind::Homogeneous,
                description: "Berger metric on SU(2) ([e1,e2] = 2e3 cyclic) times a circle",
                structure_constants: Some(su2),
                chi: 0,
                param_spec: vec![
                    ParamSpec::positive("lambda2", 8.0),
                    ParamSpec::positive("mu2", 10.0),
                    ParamSpec::positive("mu2", 10.0),
                    ParamSpec::positive("L2", 1.0),
                ],
                lattice_volume_factor: 2.0 * PI * PI * 2.0 * PI,
            },
            CatalogEntry {
                id: FamilyId::Nil3xS1,
                kind: Kind::Homogeneous,
                description: "Heisenberg nilmanifold ([e1,e2] = e3) times a circle",
                structure_constants: Some(heis),
                chi: 0,
                param_spec: ["a2", "b2", "c2", "L2"]
                    .into_iter()
                    .map(|n| ParamSpec::positive(n, 1.0))
                    .collect(),
                lattice_volume_factor: 1.0,
            },
            CatalogEntry {
                id: FamilyId::WarpedS1xS3,
                kind: Kind::Warped,
                description: "phi(θ)² dθ² + psi(θ)² g_S3 on S1 x S3",
                structure_constants: None,
                chi: 0,
                param_spec: Vec::new(),
                lattice_volume_factor: warped::S3_VOLUME,
            },
        ]
    })
}

/// Default warped grid size.
pub const DEFAULT_WARP_N: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateData {
    Params(Vec<f64>),
    Warped { phi: Vec<f64>, psi: Vec<f64> },
}

/// A metric in one catalog family at a given flow time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryState {
    pub family: FamilyId,
    pub data: StateData,
    pub time: f64,
}

impl GeometryState {
    pub fn homogeneous(family: FamilyId, params: Vec<f64>) -> Result<Self, GeometryError> {
        family.entry().check_params(&params)?;
        Ok(Self {
            family,
            data: StateData::Params(params),
            time: 0.0,
        })
    }

    pub fn warped(phi: Vec<f64>, psi: Vec<f64>) -> Result<Self, GeometryError> {
        warped::validate_fields(&phi, &psi)?;
        Ok(Self {
            family: FamilyId::WarpedS1xS3,
            data: StateData::Warped { phi, psi },
            time: 0.0,
        })
    }

    pub fn warped_from_fourier(phi: &FourierField, psi: &FourierField, n: usize) -> Result<Self, GeometryError> {
        Self::warped(phi.sample(n), psi.sample(n))
    }

    pub fn entry(&self) -> &'static CatalogEntry {
        self.family.entry()
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        match &self.data {
            StateData::Params(p) => self.entry().check_params(p),
            StateData::Warped { phi, psi } => warped::validate_fields(phi, psi),
        }
    }

    /// Flat state vector (parameters, or `phi` followed by `psi`).
    pub fn to_vec(&self) -> Vec<f64> {
        match &self.data {
            StateData::Params(p) => p.clone(),
            StateData::Warped { phi, psi } => phi.iter().chain(psi).copied().collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        match &self.data {
            StateData::Params(p) => p.len(),
            StateData::Warped { phi, .. } => 2 * phi.len(),
        }
    }

    /// Same family and layout, new values. Not validated.
    pub fn with_vec(&self, v: &[f64], time: f64) -> Self {
        let data = match &self.data {
            StateData::Params(_) => StateData::Params(v.to_vec()),
            StateData::Warped { phi, .. } => {
                let n = phi.len();
                StateData::Warped {
                    phi: v[..n].to_vec(),
                    psi: v[n..2 * n].to_vec(),
                }
            }
        };
        Self {
            family: self.family,
            data,
            time,
        }
    }

    /// The metric `c g`.
    pub fn scaled(&self, c: f64) -> Self {
        let data = match &self.data {
            StateData::Params(p) => StateData::Params(p.iter().map(|v| v * c).collect()),
            StateData::Warped { phi, psi } => {
                let s = c.sqrt();
                StateData::Warped {
                    phi: phi.iter().map(|v| v * s).collect(),
                    psi: psi.iter().map(|v| v * s).collect(),
                }
            }
        };
        Self {
            family: self.family,
            data,
            time: self.time,
        }
    }
}

/// Curvature data at one quadrature point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointData {
    pub curvature: CurvatureTensor,
    pub ricci: Sym2Tensor,
    pub scal_r: f64,
    pub derivs: CurvatureDerivatives,
    /// Quadrature weight of the Riemannian measure.
    pub weight: f64,
}

/// Levi-Civita coefficients of the orthonormal frame at the evaluation point.
///
/// Group families use the Koszul formula. `S4` and `S2xS2` are symmetric
/// spaces whose curvature comes from closed forms; their frame is taken
/// normal at the evaluation point, so the coefficients vanish there.
pub fn koszul_connection(entry: &CatalogEntry, params: &[f64]) -> Result<Connection, GeometryError> {
    entry.check_params(params)?;
    match &entry.structure_constants {
        Some(sc) => Ok(Connection::koszul(&sc.orthonormal(&entry.frame_scales2(params)))),
        None => Ok(Connection::zero()),
    }
}

fn homogeneous_point(entry: &CatalogEntry, params: &[f64]) -> Result<PointData, GeometryError> {
    entry.check_params(params)?;
    let s = entry.frame_scales2(params);
    let weight = entry.lattice_volume_factor * s.iter().product::<f64>().sqrt();
    let g = Sym2Tensor::identity();
    let (curvature, ricci, scal_r, derivs) = match (&entry.structure_constants, entry.id) {
        (Some(sc), _) => lie::left_invariant_geometry(sc, &s)?,
        (None, FamilyId::S4) => {
            let rm = CurvatureTensor::constant_curvature(1.0 / s[0]);
            let rc = ricci_of(&rm, &g)?;
            let r = scalar_of(&rc, &g)?;
            (rm, rc, r, CurvatureDerivatives::zero())
        }
        (None, FamilyId::S2xS2) => {
            let mut sec = [[0.0; DIM]; DIM];
            sec[0][1] = 1.0 / s[0];
            sec[2][3] = 1.0 / s[2];
            let rm = CurvatureTensor::from_sectional_diagonal(&sec);
            let rc = ricci_of(&rm, &g)?;
            let r = scalar_of(&rc, &g)?;
            (rm, rc, r, CurvatureDerivatives::zero())
        }
        (None, other) => unreachable!("{other} has no closed form"),
    };
    Ok(PointData {
        curvature,
        ricci,
        scal_r,
        derivs,
        weight,
    })
}

/// Curvature data at every quadrature point of the state.
pub fn point_data(state: &GeometryState) -> Result<Vec<PointData>, GeometryError> {
    match &state.data {
        StateData::Params(p) => Ok(vec![homogeneous_point(state.entry(), p)?]),
        StateData::Warped { phi, psi } => warped::point_data(phi, psi),
    }
}

/// `Σ density_j weight_j`.
pub fn integrate(points: &[PointData], density: &[f64]) -> Result<f64, GeometryError> {
    if points.len() != density.len() {
        return Err(GeometryError::ArityMismatch {
            expected: points.len(),
            got: density.len(),
        });
    }
    Ok(points.iter().zip(density).map(|(p, d)| p.weight * d).sum())
}

pub fn integrate_with(points: &[PointData], mut density: impl FnMut(&PointData) -> f64) -> f64 {
    points.iter().map(|p| p.weight * density(p)).sum()
}

pub fn volume(state: &GeometryState) -> Result<f64, GeometryError> {
    match &state.data {
        StateData::Params(p) => {
            let entry = state.entry();
            entry.check_params(p)?;
            let s = entry.frame_scales2(p);
            Ok(entry.lattice_volume_factor * s.iter().product::<f64>().sqrt())
        }
        StateData::Warped { phi, psi } => {
            warped::validate_fields(phi, psi)?;
            let h = warped::grid_spacing(phi.len());
            Ok(phi
                .iter()
                .zip(psi)
                .map(|(p, q)| warped::S3_VOLUME * p * q.powi(3) * h)
                .sum())
        }
    }
}

/// Time derivative of the state vector under `∂g/∂t = −2 Rc`.
pub fn flow_rhs(state: &GeometryState) -> Result<Vec<f64>, GeometryError> {
    let points = point_data(state)?;
    Ok(flow_rhs_from_points(state, &points))
}

pub(crate) fn flow_rhs_from_points(state: &GeometryState, points: &[PointData]) -> Vec<f64> {
    match &state.data {
        StateData::Params(p) => {
            let rc = &points[0].ricci;
            let slots: Vec<usize> = match state.family {
                FamilyId::S4 => vec![0],
                FamilyId::S2xS2 => vec![0, 2],
                _ => vec![0, 1, 2, 3],
            };
            slots.iter().zip(p).map(|(&i, v)| -2.0 * rc.get(i, i) * v).collect()
        }
        StateData::Warped { phi, psi } => {
            let n = phi.len();
            let mut out = vec![0.0; 2 * n];
            for j in 0..n {
                out[j] = -points[j].ricci.get(0, 0) * phi[j];
                out[n + j] = -points[j].ricci.get(1, 1) * psi[j];
            }
            out
        }
    }
}
