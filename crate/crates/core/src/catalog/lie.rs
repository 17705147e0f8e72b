//! Left-invariant metrics on four-dimensional Lie groups.
//!
//! The structural frame `X_i` has fixed brackets `[X_i, X_j] = C^k_ij X_k`.
//! A diagonal metric with `g(X_i, X_i) = s_i` is represented by its
//! orthonormal frame `e_i = X_i / sqrt(s_i)`, whose brackets are
//! `c^k_ij = C^k_ij sqrt(s_k) / sqrt(s_i s_j)`.

use crate::tensor::{ricci_of, CurvatureDerivatives, CurvatureTensor, Rank3, Sym2Tensor, TensorError, DIM};

/// `c[i][j][k] = c^k_ij`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureConstants {
    c: Rank3,
}

impl StructureConstants {
    pub fn zero() -> Self {
        Self {
            c: [[[0.0; DIM]; DIM]; DIM],
        }
    }

    /// Builds constants from generating brackets `[X_i, X_j] = Σ coef X_k`,
    /// filling in antisymmetry.
    pub fn from_brackets(brackets: &[(usize, usize, usize, f64)]) -> Self {
        let mut c = [[[0.0; DIM]; DIM]; DIM];
        for &(i, j, k, v) in brackets {
            c[i][j][k] += v;
            c[j][i][k] -= v;
        }
        Self { c }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[i][j][k]
    }

    /// Largest violation of antisymmetry or of the Jacobi identity.
    pub fn residual(&self) -> f64 {
        let c = &self.c;
        let mut worst: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    worst = worst.max((c[i][j][k] + c[j][i][k]).abs());
                }
            }
        }
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for n in 0..DIM {
                        let mut s = 0.0;
                        for m in 0..DIM {
                            s += c[i][j][m] * c[m][k][n] + c[j][k][m] * c[m][i][n] + c[k][i][m] * c[m][j][n];
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Constants of the orthonormal frame for squared frame scales `s`.
    pub fn orthonormal(&self, s: &[f64; DIM]) -> Self {
        let a = s.map(f64::sqrt);
        let mut c = [[[0.0; DIM]; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    c[i][j][k] = self.c[i][j][k] * a[k] / (a[i] * a[j]);
                }
            }
        }
        Self { c }
    }
}

/// Levi-Civita coefficients in an orthonormal frame:
/// `gamma[i][j][k] = g(∇_{e_i} e_j, e_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Connection {
    pub gamma: Rank3,
}

impl Connection {
    pub fn zero() -> Self {
        Self {
            gamma: [[[0.0; DIM]; DIM]; DIM],
        }
    }

    /// Koszul formula for a left-invariant orthonormal frame.
    pub fn koszul(orth: &StructureConstants) -> Self {
        let c = &orth.c;
        let mut gamma = [[[0.0; DIM]; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    gamma[i][j][k] = 0.5 * (c[i][j][k] - c[j][k][i] + c[k][i][j]);
                }
            }
        }
        Self { gamma }
    }

    /// `Γ_ijk + Γ_ikj`, which vanishes for a metric connection.
    pub fn metric_residual(&self) -> f64 {
        let g = &self.gamma;
        let mut w: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    w = w.max((g[i][j][k] + g[i][k][j]).abs());
                }
            }
        }
        w
    }

    /// `Γ_ijk − Γ_jik − c_ijk`, which vanishes for a torsion-free connection.
    pub fn torsion_residual(&self, orth: &StructureConstants) -> f64 {
        let g = &self.gamma;
        let mut w: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    w = w.max((g[i][j][k] - g[j][i][k] - orth.c[i][j][k]).abs());
                }
            }
        }
        w
    }

    /// Riemann tensor of a left-invariant metric, from constant coefficients:
    /// `g(R(e_i,e_j)e_l, e_n) = Σ_m Γ_jlm Γ_imn − Γ_ilm Γ_jmn − c_ijm Γ_mln`,
    /// stored as `R_ijnl` so that `R_ijij` is sectional curvature.
    pub fn curvature(&self, orth: &StructureConstants) -> Result<CurvatureTensor, TensorError> {
        let g = &self.gamma;
        let c = &orth.c;
        let mut r = [[[[0.0; DIM]; DIM]; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                for l in 0..DIM {
                    for n in 0..DIM {
                        let mut s = 0.0;
                        for m in 0..DIM {
                            s += g[j][l][m] * g[i][m][n] - g[i][l][m] * g[j][m][n] - c[i][j][m] * g[m][l][n];
                        }
                        r[i][j][n][l] = s;
                    }
                }
            }
        }
        CurvatureTensor::from_array(r)
    }

    /// `(∇_k Rc)_is = −Γ_kim Rc_ms − Γ_ksm Rc_im` for a left-invariant Rc.
    pub fn ricci_derivatives(&self, rc: &Sym2Tensor) -> Result<CurvatureDerivatives, TensorError> {
        let g = &self.gamma;
        let rc = rc.components();
        let mut grad = [[[0.0; DIM]; DIM]; DIM];
        for k in 0..DIM {
            for i in 0..DIM {
                for s in 0..DIM {
                    let mut v = 0.0;
                    for m in 0..DIM {
                        v -= g[k][i][m] * rc[m][s] + g[k][s][m] * rc[i][m];
                    }
                    grad[k][i][s] = v;
                }
            }
        }
        // left-invariant scalar curvature is constant
        CurvatureDerivatives::new(grad, [0.0; DIM])
    }
}

/// Curvature, Ricci, scalar curvature and derivatives for one left-invariant
/// metric given by squared frame scales.
pub(crate) fn left_invariant_geometry(
    sc: &StructureConstants,
    scales2: &[f64; DIM],
) -> Result<(CurvatureTensor, Sym2Tensor, f64, CurvatureDerivatives), TensorError> {
    let orth = sc.orthonormal(scales2);
    let conn = Connection::koszul(&orth);
    let rm = conn.curvature(&orth)?;
    let g = Sym2Tensor::identity();
    let rc = ricci_of(&rm, &g)?;
    let r = crate::tensor::scalar_of(&rc, &g)?;
    let d = conn.ricci_derivatives(&rc)?;
    Ok((rm, rc, r, d))
}
