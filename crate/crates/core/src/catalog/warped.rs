//! Cohomogeneity-one metrics `φ(θ)² dθ² + ψ(θ)² g_{S³}` on S¹ × S³.
//!
//! With arclength `ds = φ dθ` and the orthonormal frame `e_0 = ∂_s`,
//! `e_a = ψ⁻¹ × (unit frame on S³)`, the curvature operator is diagonal:
//!
//! * `K(e_0, e_a) = −ψ_ss / ψ`
//! * `K(e_a, e_b) = (1 − ψ_s²) / ψ²`
//!
//! so `Rc = diag(ρ₀, ρ₁, ρ₁, ρ₁)` with `ρ₀ = −3ψ_ss/ψ` and
//! `ρ₁ = −ψ_ss/ψ + 2(1 − ψ_s²)/ψ²`. The only nonzero Christoffel terms are
//! `∇_{e_a} e_0 = (ψ_s/ψ) e_a` and `∇_{e_a} e_b ∋ −(ψ_s/ψ) δ_ab e_0`, giving
//!
//! * `(∇_0 Rc)_00 = ρ₀'`, `(∇_0 Rc)_aa = ρ₁'`
//! * `(∇_a Rc)_0a = (∇_a Rc)_a0 = (ψ_s/ψ)(ρ₀ − ρ₁)`
//!
//! θ-derivatives use fourth-order periodic central differences.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{GeometryError, PointData};
use crate::tensor::{ricci_of, scalar_of, CurvatureDerivatives, CurvatureTensor, Sym2Tensor, DIM};

/// Smallest admissible field sample.
pub const MIN_FIELD: f64 = 1e-8;

/// Volume of the unit round three-sphere.
pub const S3_VOLUME: f64 = 2.0 * PI * PI;

pub fn grid_spacing(n: usize) -> f64 {
    2.0 * PI / n as f64
}

/// Fourth-order periodic first derivative.
pub fn d1(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|j| {
            let at = |o: isize| f[(j as isize + o).rem_euclid(n as isize) as usize];
            (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h)
        })
        .collect()
}

/// Fourth-order periodic second derivative.
pub fn d2(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|j| {
            let at = |o: isize| f[(j as isize + o).rem_euclid(n as isize) as usize];
            (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2)) / (12.0 * h * h)
        })
        .collect()
}

/// Periodic field given by a truncated Fourier series
/// `mean + Σ_k cos[k] cos((k+1)θ) + sin[k] sin((k+1)θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierField {
    pub mean: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl FourierField {
    pub fn constant(mean: f64) -> Self {
        Self {
            mean,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.mean;
        for (k, a) in self.cos.iter().enumerate() {
            v += a * ((k + 1) as f64 * theta).cos();
        }
        for (k, b) in self.sin.iter().enumerate() {
            v += b * ((k + 1) as f64 * theta).sin();
        }
        v
    }

    pub fn sample(&self, n: usize) -> Vec<f64> {
        let h = grid_spacing(n);
        (0..n).map(|j| self.eval(j as f64 * h)).collect()
    }
}

pub(crate) fn validate_fields(phi: &[f64], psi: &[f64]) -> Result<(), GeometryError> {
    if phi.len() != psi.len() {
        return Err(GeometryError::ArityMismatch {
            expected: phi.len(),
            got: psi.len(),
        });
    }
    let n = phi.len();
    if n < 8 || !n.is_power_of_two() {
        return Err(GeometryError::Domain(format!(
            "warped grid size {n} must be a power of two >= 8"
        )));
    }
    for (index, &value) in phi.iter().chain(psi.iter()).enumerate() {
        if !(value > MIN_FIELD) || !value.is_finite() {
            return Err(GeometryError::DegenerateField {
                index: index % n,
                value,
            });
        }
    }
    Ok(())
}

/// Curvature at every grid point.
pub(crate) fn point_data(phi: &[f64], psi: &[f64]) -> Result<Vec<PointData>, GeometryError> {
    validate_fields(phi, psi)?;
    let n = phi.len();
    let h = grid_spacing(n);
    let psi_t = d1(psi, h);
    let psi_tt = d2(psi, h);
    let phi_t = d1(phi, h);

    let mut psi_s = vec![0.0; n];
    let mut mixed = vec![0.0; n];
    let mut sphere = vec![0.0; n];
    for j in 0..n {
        let (p, q) = (phi[j], psi[j]);
        psi_s[j] = psi_t[j] / p;
        let psi_ss = psi_tt[j] / (p * p) - psi_t[j] * phi_t[j] / (p * p * p);
        mixed[j] = -psi_ss / q;
        sphere[j] = (1.0 - psi_s[j] * psi_s[j]) / (q * q);
    }
    let rho0: Vec<f64> = mixed.iter().map(|a| 3.0 * a).collect();
    let rho1: Vec<f64> = mixed.iter().zip(&sphere).map(|(a, b)| a + 2.0 * b).collect();
    let rho0_t = d1(&rho0, h);
    let rho1_t = d1(&rho1, h);

    let g = Sym2Tensor::identity();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut sec = [[0.0; DIM]; DIM];
        for a in 1..DIM {
            sec[0][a] = mixed[j];
            for b in (a + 1)..DIM {
                sec[a][b] = sphere[j];
            }
        }
        let curvature = CurvatureTensor::from_sectional_diagonal(&sec);
        let ricci = ricci_of(&curvature, &g)?;
        let scal_r = scalar_of(&ricci, &g)?;

        let d_rho0 = rho0_t[j] / phi[j];
        let d_rho1 = rho1_t[j] / phi[j];
        let twist = psi_s[j] / psi[j] * (rho0[j] - rho1[j]);
        let mut grad = [[[0.0; DIM]; DIM]; DIM];
        grad[0][0][0] = d_rho0;
        for a in 1..DIM {
            grad[0][a][a] = d_rho1;
            grad[a][0][a] = twist;
            grad[a][a][0] = twist;
        }
        let grad_r = [d_rho0 + 3.0 * d_rho1, 0.0, 0.0, 0.0];
        let derivs = CurvatureDerivatives::new(grad, grad_r)?;

        out.push(PointData {
            curvature,
            ricci,
            scal_r,
            derivs,
            weight: S3_VOLUME * phi[j] * psi[j].powi(3) * h,
        });
    }
    Ok(out)
}
