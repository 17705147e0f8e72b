use proptest::prelude::*;
use ricci4_core::tensor::{
    norms, random_curvature, ricci_of, rm_bilinear, scalar_of, young_pointwise_check, CurvatureTensor, Rank2, DIM,
};
use ricci4_core::Sym2Tensor;

fn givens(i: usize, j: usize, a: f64) -> Rank2 {
    let mut q = [[0.0; DIM]; DIM];
    for (k, row) in q.iter_mut().enumerate() {
        row[k] = 1.0;
    }
    q[i][i] = a.cos();
    q[j][j] = a.cos();
    q[i][j] = -a.sin();
    q[j][i] = a.sin();
    q
}

fn matmul(a: &Rank2, b: &Rank2) -> Rank2 {
    let mut c = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            c[i][j] = (0..DIM).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn invariants(rm: &CurvatureTensor, g: &Sym2Tensor) -> (f64, f64, f64) {
    let rc = ricci_of(rm, g).unwrap();
    let r = scalar_of(&rc, g).unwrap();
    let (rm2, rc2) = norms(rm, &rc, g).unwrap();
    (rm2, rc2, r)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn invariants_survive_rotation(seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64) {
        let q = matmul(&matmul(&givens(0, 1, a), &givens(1, 3, b)), &givens(2, 3, c));
        let g = Sym2Tensor::identity();
        let rm = random_curvature(seed);
        let (x, y, z) = invariants(&rm, &g);
        let (xr, yr, zr) = invariants(&rm.rotated(&q), &g);
        prop_assert!(close(x, xr, 1e-12));
        prop_assert!(close(y, yr, 1e-12));
        prop_assert!(close(z, zr, 1e-12));
    }

    #[test]
    fn diagonal_metric_matches_rescaled_frame(seed in any::<u64>(), d in prop::array::uniform4(0.2..5.0f64)) {
        // Components in a coordinate basis with g = diag(d) equal
        // orthonormal-frame components multiplied by sqrt(d) per index.
        let rm = random_curvature(seed);
        let s: Vec<f64> = d.iter().map(|x| x.sqrt()).collect();
        let mut c = *rm.components();
        for i in 0..DIM { for j in 0..DIM { for k in 0..DIM { for l in 0..DIM {
            c[i][j][k][l] *= s[i] * s[j] * s[k] * s[l];
        }}}}
        let coord = CurvatureTensor::from_array(c).unwrap();
        let (x, y, z) = invariants(&rm, &Sym2Tensor::identity());
        let (xc, yc, zc) = invariants(&coord, &Sym2Tensor::diagonal(d));
        prop_assert!(close(x, xc, 1e-10));
        prop_assert!(close(y, yc, 1e-10));
        prop_assert!(close(z, zc, 1e-10));
    }

    #[test]
    fn norms_scale_quadratically(seed in any::<u64>(), k in -10.0..10.0f64) {
        let g = Sym2Tensor::identity();
        let rm = random_curvature(seed);
        let (x, y, z) = invariants(&rm, &g);
        let (xs, ys, zs) = invariants(&rm.scaled(k), &g);
        prop_assert!(close(xs, k * k * x, 1e-12));
        prop_assert!(close(ys, k * k * y, 1e-12));
        prop_assert!(close(zs, k * z, 1e-12));
    }

    #[test]
    fn trace_and_cauchy_schwarz(seed in any::<u64>(), k in 0.01..20.0f64) {
        let g = Sym2Tensor::identity();
        let rm = random_curvature(seed).scaled(k);
        let rc = ricci_of(&rm, &g).unwrap();
        let r = scalar_of(&rc, &g).unwrap();
        let (rm2, rc2) = norms(&rm, &rc, &g).unwrap();
        prop_assert!(r * r <= 4.0 * rc2 * (1.0 + 1e-12));
        let bil = rm_bilinear(&rm, &rc, &g).unwrap();
        prop_assert!(bil.abs() <= rm2.sqrt() * rc2 * (1.0 + 1e-12));
    }

    #[test]
    fn young_step_holds(seed in any::<u64>(), k in 0.01..20.0f64) {
        let g = Sym2Tensor::identity();
        let mut rm = random_curvature(seed).scaled(k);
        let rc = ricci_of(&rm, &g).unwrap();
        if scalar_of(&rc, &g).unwrap() <= -2.0 {
            rm = rm.scaled(-1.0);
        }
        let rc = ricci_of(&rm, &g).unwrap();
        let r = scalar_of(&rc, &g).unwrap();
        let y = young_pointwise_check(&rm, &rc, r, &g, 2.0).unwrap();
        prop_assert!(y.margin >= -1e-12 * y.scale());
    }
}
