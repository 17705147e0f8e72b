//! Curvature tensor algebra in four dimensions.
//!
//! Conventions: `R[i][j][k][l]` is chosen so that `R[i][j][i][j]` is the
//! sectional curvature of the plane spanned by `e_i, e_j`, and the Ricci
//! tensor is `Rc_ij = g^{kl} R_ikjl`. With these conventions the unit round
//! four-sphere has `R = 12`, `|Rc|^2 = 36` and `|Rm|^2 = 24`, where the norm
//! sums over all four indices.
//!
//! Indices are zero based throughout the crate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

pub const DIM: usize = 4;

/// Relative tolerance used for all symmetry and Bianchi validation.
pub const SYMMETRY_TOL: f64 = 1e-12;

pub type Rank2 = [[f64; DIM]; DIM];
pub type Rank3 = [[[f64; DIM]; DIM]; DIM];
pub type Rank4 = [[[[f64; DIM]; DIM]; DIM]; DIM];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("curvature components violate {which} at {index:?} (residual {residual:e})")]
    SymmetryViolation {
        which: &'static str,
        index: [usize; 4],
        residual: f64,
    },
    #[error("index {0:?} out of range")]
    IndexOutOfRange([usize; 4]),
    #[error("symmetric tensor input is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("metric is singular or not positive definite")]
    SingularMetric,
    #[error("denominator R + c = {0} is not positive")]
    DenominatorNonpositive(f64),
}

fn zero4() -> Rank4 {
    [[[[0.0; DIM]; DIM]; DIM]; DIM]
}

/// The eight index permutations generated by the Riemann antisymmetries and
/// pair symmetry, with the sign each picks up.
fn symmetric_images([i, j, k, l]: [usize; 4]) -> [([usize; 4], f64); 8] {
    [
        ([i, j, k, l], 1.0),
        ([j, i, k, l], -1.0),
        ([i, j, l, k], -1.0),
        ([j, i, l, k], 1.0),
        ([k, l, i, j], 1.0),
        ([l, k, i, j], -1.0),
        ([k, l, j, i], -1.0),
        ([l, k, j, i], 1.0),
    ]
}

/// Frame components of an algebraic curvature tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    c: Rank4,
}

impl CurvatureTensor {
    pub fn zero() -> Self {
        Self { c: zero4() }
    }

    /// Constant sectional curvature `k`: `R_ijkl = k (δ_ik δ_jl − δ_il δ_jk)`.
    pub fn constant_curvature(k: f64) -> Self {
        let mut sec = [[0.0; DIM]; DIM];
        for (i, row) in sec.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i != j {
                    *v = k;
                }
            }
        }
        Self::from_sectional_diagonal(&sec)
    }

    /// Tensor whose curvature operator is diagonal on `e_i ∧ e_j` with
    /// eigenvalue `sec[i][j]` (only the strict upper triangle is read).
    pub fn from_sectional_diagonal(sec: &Rank2) -> Self {
        let mut c = zero4();
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                let k = sec[i][j];
                c[i][j][i][j] = k;
                c[j][i][j][i] = k;
                c[i][j][j][i] = -k;
                c[j][i][i][j] = -k;
            }
        }
        Self { c }
    }

    /// Builds a tensor from a generating set of components, filling every
    /// symmetric image. Entries not reached by any generator are zero.
    pub fn from_components(entries: &[([usize; 4], f64)]) -> Result<Self, TensorError> {
        let mut slots: [[[[Option<f64>; DIM]; DIM]; DIM]; DIM] = [[[[None; DIM]; DIM]; DIM]; DIM];
        let scale = entries
            .iter()
            .fold(0.0_f64, |m, (_, v)| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        for &(idx, v) in entries {
            if idx.iter().any(|&x| x >= DIM) {
                return Err(TensorError::IndexOutOfRange(idx));
            }
            for (img, sign) in symmetric_images(idx) {
                let [a, b, c, d] = img;
                let want = sign * v;
                match slots[a][b][c][d] {
                    Some(have) if (have - want).abs() > SYMMETRY_TOL * scale => {
                        return Err(TensorError::SymmetryViolation {
                            which: "antisymmetry/pair symmetry",
                            index: img,
                            residual: (have - want).abs(),
                        });
                    }
                    Some(_) => {}
                    None => slots[a][b][c][d] = Some(want),
                }
            }
        }
        let mut c = zero4();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        c[i][j][k][l] = slots[i][j][k][l].unwrap_or(0.0);
                    }
                }
            }
        }
        Self::from_array(c)
    }

    /// Validates a full component array against all three symmetry invariants.
    pub fn from_array(c: Rank4) -> Result<Self, TensorError> {
        let t = Self { c };
        t.validate()?;
        Ok(t)
    }

    pub fn components(&self) -> &Rank4 {
        &self.c
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.c[i][j][k][l]
    }

    pub fn max_abs(&self) -> f64 {
        self.c
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest violation of the antisymmetries, pair symmetry and first Bianchi
    /// identity, as `(which, index, absolute residual)`.
    pub fn worst_symmetry_residual(&self) -> (&'static str, [usize; 4], f64) {
        let c = &self.c;
        let mut worst = ("none", [0; 4], 0.0);
        let mut note = |which, idx, r: f64| {
            if r > worst.2 {
                worst = (which, idx, r);
            }
        };
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        let v = c[i][j][k][l];
                        note("antisymmetry", [i, j, k, l], (v + c[j][i][k][l]).abs());
                        note("antisymmetry", [i, j, k, l], (v + c[i][j][l][k]).abs());
                        note("pair symmetry", [i, j, k, l], (v - c[k][l][i][j]).abs());
                        note(
                            "first Bianchi identity",
                            [i, j, k, l],
                            (v + c[i][k][l][j] + c[i][l][j][k]).abs(),
                        );
                    }
                }
            }
        }
        worst
    }

    pub fn validate(&self) -> Result<(), TensorError> {
        let scale = self.max_abs();
        let (which, index, residual) = self.worst_symmetry_residual();
        if residual > SYMMETRY_TOL * scale {
            return Err(TensorError::SymmetryViolation { which, index, residual });
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().flatten().flatten().flatten().for_each(|v| *v *= s);
        Self { c }
    }

    /// Components in the frame `e'_a = Σ_i q[a][i] e_i`.
    pub fn rotated(&self, q: &Rank2) -> Self {
        Self {
            c: transform4(&self.c, q),
        }
    }
}

/// Applies `out[a..] = Σ m[a][i] .. t[i..]` on every index in turn.
fn transform4(t: &Rank4, m: &Rank2) -> Rank4 {
    let mut cur = *t;
    for slot in 0..4 {
        let mut next = zero4();
        for a in 0..DIM {
            for b in 0..DIM {
                for c in 0..DIM {
                    for d in 0..DIM {
                        let mut s = 0.0;
                        for x in 0..DIM {
                            let (v, w) = match slot {
                                0 => (m[a][x], cur[x][b][c][d]),
                                1 => (m[b][x], cur[a][x][c][d]),
                                2 => (m[c][x], cur[a][b][x][d]),
                                _ => (m[d][x], cur[a][b][c][x]),
                            };
                            s += v * w;
                        }
                        next[a][b][c][d] = s;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

/// Symmetric 4×4 tensor (Ricci tensor or frame metric).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym2Tensor {
    c: Rank2,
}

impl Sym2Tensor {
    pub fn new(c: Rank2) -> Result<Self, TensorError> {
        let scale = c.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                if (c[i][j] - c[j][i]).abs() > SYMMETRY_TOL * scale {
                    return Err(TensorError::NotSymmetric(i, j));
                }
            }
        }
        Ok(Self { c })
    }

    pub fn identity() -> Self {
        Self::diagonal([1.0; DIM])
    }

    pub fn diagonal(d: [f64; DIM]) -> Self {
        let mut c = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            c[i][i] = d[i];
        }
        Self { c }
    }

    pub fn zero() -> Self {
        Self { c: [[0.0; DIM]; DIM] }
    }

    pub fn components(&self) -> &Rank2 {
        &self.c
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i][j]
    }

    pub fn rotated(&self, q: &Rank2) -> Self {
        let mut out = [[0.0; DIM]; DIM];
        for a in 0..DIM {
            for b in 0..DIM {
                let mut s = 0.0;
                for i in 0..DIM {
                    for j in 0..DIM {
                        s += q[a][i] * q[b][j] * self.c[i][j];
                    }
                }
                out[a][b] = s;
            }
        }
        Self { c: out }
    }
}

/// Inverse metric used to raise indices. The identity frame skips all
/// inversions.
#[derive(Debug, Clone, Copy)]
enum Raiser {
    Identity,
    Inverse(Rank2),
}

impl Raiser {
    fn new(g: &Sym2Tensor) -> Result<Self, TensorError> {
        if *g == Sym2Tensor::identity() {
            return Ok(Raiser::Identity);
        }
        invert_spd(&g.c).map(Raiser::Inverse)
    }

    fn inv(&self) -> Rank2 {
        match self {
            Raiser::Identity => Sym2Tensor::identity().c,
            Raiser::Inverse(m) => *m,
        }
    }

    fn raise2(&self, t: &Rank2) -> Rank2 {
        match self {
            Raiser::Identity => *t,
            Raiser::Inverse(m) => {
                let mut out = [[0.0; DIM]; DIM];
                for a in 0..DIM {
                    for b in 0..DIM {
                        let mut s = 0.0;
                        for i in 0..DIM {
                            for j in 0..DIM {
                                s += m[a][i] * m[b][j] * t[i][j];
                            }
                        }
                        out[a][b] = s;
                    }
                }
                out
            }
        }
    }

    fn raise3(&self, t: &Rank3) -> Rank3 {
        match self {
            Raiser::Identity => *t,
            Raiser::Inverse(m) => {
                let mut out = [[[0.0; DIM]; DIM]; DIM];
                for a in 0..DIM {
                    for b in 0..DIM {
                        for c in 0..DIM {
                            let mut s = 0.0;
                            for i in 0..DIM {
                                for j in 0..DIM {
                                    for k in 0..DIM {
                                        s += m[a][i] * m[b][j] * m[c][k] * t[i][j][k];
                                    }
                                }
                            }
                            out[a][b][c] = s;
                        }
                    }
                }
                out
            }
        }
    }

    fn raise4(&self, t: &Rank4) -> Rank4 {
        match self {
            Raiser::Identity => *t,
            Raiser::Inverse(m) => transform4(t, m),
        }
    }
}

/// Cholesky-based inverse of a symmetric positive definite 4×4 matrix.
fn invert_spd(a: &Rank2) -> Result<Rank2, TensorError> {
    let scale = a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !scale.is_finite() || scale == 0.0 {
        return Err(TensorError::SingularMetric);
    }
    let mut l = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 1e-14 * scale {
                    return Err(TensorError::SingularMetric);
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // columns of inverse: solve L L^T x = e_c
    let mut inv = [[0.0; DIM]; DIM];
    for col in 0..DIM {
        let mut y = [0.0; DIM];
        for i in 0..DIM {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[i][k] * y[k];
            }
            y[i] = s / l[i][i];
        }
        let mut x = [0.0; DIM];
        for i in (0..DIM).rev() {
            let mut s = y[i];
            for k in (i + 1)..DIM {
                s -= l[k][i] * x[k];
            }
            x[i] = s / l[i][i];
        }
        for i in 0..DIM {
            inv[i][col] = x[i];
        }
    }
    Ok(inv)
}

/// `Rc_ij = g^{kl} R_ikjl`.
pub fn ricci_of(rm: &CurvatureTensor, g: &Sym2Tensor) -> Result<Sym2Tensor, TensorError> {
    let inv = Raiser::new(g)?.inv();
    let mut rc = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in i..DIM {
            let mut s = 0.0;
            for k in 0..DIM {
                for l in 0..DIM {
                    s += inv[k][l] * rm.c[i][k][j][l];
                }
            }
            rc[i][j] = s;
            rc[j][i] = s;
        }
    }
    Ok(Sym2Tensor { c: rc })
}

/// `R = g^{ij} Rc_ij`.
pub fn scalar_of(rc: &Sym2Tensor, g: &Sym2Tensor) -> Result<f64, TensorError> {
    let inv = Raiser::new(g)?.inv();
    let mut s = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            s += inv[i][j] * rc.c[i][j];
        }
    }
    Ok(s)
}

/// `(|Rm|^2, |Rc|^2)` with every index contracted through `g`.
pub fn norms(rm: &CurvatureTensor, rc: &Sym2Tensor, g: &Sym2Tensor) -> Result<(f64, f64), TensorError> {
    let r = Raiser::new(g)?;
    let up = r.raise4(&rm.c);
    let rc_up = r.raise2(&rc.c);
    let rm2: f64 = dot4(&rm.c, &up);
    let mut rc2 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            rc2 += rc.c[i][j] * rc_up[i][j];
        }
    }
    Ok((rm2, rc2))
}

fn dot4(a: &Rank4, b: &Rank4) -> f64 {
    a.iter()
        .flatten()
        .flatten()
        .flatten()
        .zip(b.iter().flatten().flatten().flatten())
        .map(|(x, y)| x * y)
        .sum()
}

/// `Rm(Rc, Rc) = Rm^{ikjl} Rc_ij Rc_kl`.
pub fn rm_bilinear(rm: &CurvatureTensor, rc: &Sym2Tensor, g: &Sym2Tensor) -> Result<f64, TensorError> {
    let up = Raiser::new(g)?.raise4(&rm.c);
    let mut s = 0.0;
    for i in 0..DIM {
        for k in 0..DIM {
            for j in 0..DIM {
                let rij = rc.c[i][j];
                if rij == 0.0 {
                    continue;
                }
                for l in 0..DIM {
                    s += up[i][k][j][l] * rij * rc.c[k][l];
                }
            }
        }
    }
    Ok(s)
}

/// Gauss–Bonnet–Chern integrand `I = |Rm|^2 − 4|Rc|^2 + R^2`.
pub fn gauss_bonnet_density(
    rm: &CurvatureTensor,
    rc: &Sym2Tensor,
    scal_r: f64,
    g: &Sym2Tensor,
) -> Result<f64, TensorError> {
    let (rm2, rc2) = norms(rm, rc, g)?;
    Ok(rm2 - 4.0 * rc2 + scal_r * scal_r)
}

/// `f = |Rc|^2 / (R + c)`.
pub fn f_density(norm_rc2: f64, scal_r: f64, c: f64) -> Result<f64, TensorError> {
    let d = scal_r + c;
    if d <= 0.0 || !d.is_finite() {
        return Err(TensorError::DenominatorNonpositive(d));
    }
    Ok(norm_rc2 / d)
}

/// First covariant derivatives of the Ricci and scalar curvature.
///
/// `grad_rc[k][i][s] = (∇_k Rc)_is`, the first index being the direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureDerivatives {
    grad_rc: Rank3,
    grad_r: [f64; DIM],
}

impl CurvatureDerivatives {
    pub fn new(grad_rc: Rank3, grad_r: [f64; DIM]) -> Result<Self, TensorError> {
        let scale = grad_rc.iter().flatten().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (k, slab) in grad_rc.iter().enumerate() {
            for i in 0..DIM {
                for s in (i + 1)..DIM {
                    if (slab[i][s] - slab[s][i]).abs() > SYMMETRY_TOL * scale {
                        return Err(TensorError::SymmetryViolation {
                            which: "symmetry of ∇Rc in its last two indices",
                            index: [k, i, s, 0],
                            residual: (slab[i][s] - slab[s][i]).abs(),
                        });
                    }
                }
            }
        }
        Ok(Self { grad_rc, grad_r })
    }

    pub fn zero() -> Self {
        Self {
            grad_rc: [[[0.0; DIM]; DIM]; DIM],
            grad_r: [0.0; DIM],
        }
    }

    pub fn grad_rc(&self) -> &Rank3 {
        &self.grad_rc
    }

    pub fn grad_r(&self) -> &[f64; DIM] {
        &self.grad_r
    }
}

/// `|∇Rc|^2`.
pub fn grad_rc_norm_sq(derivs: &CurvatureDerivatives, g: &Sym2Tensor) -> Result<f64, TensorError> {
    let up = Raiser::new(g)?.raise3(&derivs.grad_rc);
    Ok(dot3(&derivs.grad_rc, &up))
}

fn dot3(a: &Rank3, b: &Rank3) -> f64 {
    a.iter()
        .flatten()
        .flatten()
        .zip(b.iter().flatten().flatten())
        .map(|(x, y)| x * y)
        .sum()
}

/// `|Z|^2` for `Z_kis = (∇_k Rc)_is (R + c) − (∇_k R) Rc_is`.
pub fn z_norm_sq(
    derivs: &CurvatureDerivatives,
    rc: &Sym2Tensor,
    scal_r: f64,
    c: f64,
    g: &Sym2Tensor,
) -> Result<f64, TensorError> {
    let d = scal_r + c;
    if d <= 0.0 || !d.is_finite() {
        return Err(TensorError::DenominatorNonpositive(d));
    }
    let mut z = [[[0.0; DIM]; DIM]; DIM];
    for k in 0..DIM {
        for i in 0..DIM {
            for s in 0..DIM {
                z[k][i][s] = derivs.grad_rc[k][i][s] * d - derivs.grad_r[k] * rc.c[i][s];
            }
        }
    }
    let up = Raiser::new(g)?.raise3(&z);
    Ok(dot3(&z, &up))
}

/// Every pointwise scalar the estimates consume, at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseDensities {
    pub norm_rc2: f64,
    pub norm_rm2: f64,
    pub scal_r: f64,
    /// `|Rc|^2/(R+c)`; `None` when `R + c <= 0`.
    pub f_density: Option<f64>,
    pub gb_density: f64,
    pub rm_bilinear: f64,
    /// `|Z|^2`; `None` when `R + c <= 0`.
    pub z_norm2: Option<f64>,
    pub grad_rc2: f64,
}

impl PointwiseDensities {
    pub fn evaluate(
        rm: &CurvatureTensor,
        rc: &Sym2Tensor,
        scal_r: f64,
        derivs: &CurvatureDerivatives,
        c: f64,
        g: &Sym2Tensor,
    ) -> Result<Self, TensorError> {
        let (norm_rm2, norm_rc2) = norms(rm, rc, g)?;
        Ok(Self {
            norm_rc2,
            norm_rm2,
            scal_r,
            f_density: f_density(norm_rc2, scal_r, c).ok(),
            gb_density: norm_rm2 - 4.0 * norm_rc2 + scal_r * scal_r,
            rm_bilinear: rm_bilinear(rm, rc, g)?,
            z_norm2: z_norm_sq(derivs, rc, scal_r, c, g).ok(),
            grad_rc2: grad_rc_norm_sq(derivs, g)?,
        })
    }
}

/// Both sides of the pointwise Young step
/// `4 Rm(Rc,Rc)/(R+2) <= |Rc|^4 / (2 (R+2)^2) + 8 |Rm|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoungMargin {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl YoungMargin {
    pub fn scale(&self) -> f64 {
        self.lhs.abs() + self.rhs.abs()
    }
}

pub fn young_pointwise_check(
    rm: &CurvatureTensor,
    rc: &Sym2Tensor,
    scal_r: f64,
    g: &Sym2Tensor,
    c: f64,
) -> Result<YoungMargin, TensorError> {
    let d = scal_r + c;
    if d <= 0.0 || !d.is_finite() {
        return Err(TensorError::DenominatorNonpositive(d));
    }
    let (rm2, rc2) = norms(rm, rc, g)?;
    let lhs = 4.0 * rm_bilinear(rm, rc, g)? / d;
    let rhs = rc2 * rc2 / (2.0 * d * d) + 8.0 * rm2;
    Ok(YoungMargin {
        lhs,
        rhs,
        margin: rhs - lhs,
    })
}

/// Deterministic random algebraic curvature tensor with unit-normal raw
/// entries, symmetrized over the Riemann symmetry group and projected onto
/// the kernel of the Bianchi map.
pub fn random_curvature(seed: u64) -> CurvatureTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = zero4();
    raw.iter_mut().flatten().flatten().flatten().for_each(|v| {
        *v = StandardNormal.sample(&mut rng);
    });
    let mut sym = zero4();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    let s: f64 = symmetric_images([i, j, k, l])
                        .iter()
                        .map(|&([a, b, c, d], sign)| sign * raw[a][b][c][d])
                        .sum();
                    sym[i][j][k][l] = s / 8.0;
                }
            }
        }
    }
    let mut out = zero4();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    let cyc = sym[i][j][k][l] + sym[i][k][l][j] + sym[i][l][j][k];
                    out[i][j][k][l] = sym[i][j][k][l] - cyc / 3.0;
                }
            }
        }
    }
    CurvatureTensor { c: out }
}
