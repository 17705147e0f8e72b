//! Central-difference time derivatives on a uniform report grid, with an
//! a-posteriori error bar.

use serde::Serialize;

/// Multiplier on the third-difference truncation estimate.
pub const FD_SAFETY: f64 = 4.0;

/// Multiplier on the integrator noise floor.
pub const NOISE_SAFETY: f64 = 10.0;

/// `d/dt F` by central differences against a comparison series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSeries {
    pub times: Vec<f64>,
    pub derivative: Vec<f64>,
    pub target: Vec<f64>,
    /// Absolute error bar on each `derivative` entry.
    pub fd_tol: Vec<f64>,
    pub dt: f64,
}

impl ResidualSeries {
    /// Builds the series at interior grid points with the second-order
    /// stencil. `values` are samples of `F` on a uniform grid with spacing
    /// `dt`; `target[k]` is compared with `F'(t_k)`. `rel_tol`, `abs_tol`
    /// describe how accurately `F` was produced.
    pub fn new(times: &[f64], values: &[f64], target: &[f64], dt: f64, rel_tol: f64, abs_tol: f64) -> Option<Self> {
        Self::with_order(times, values, target, dt, rel_tol, abs_tol, 2)
    }

    /// As [`ResidualSeries::new`] with a central stencil of order 2 or 4.
    /// The error bar comes from the next-higher difference.
    pub fn with_order(
        times: &[f64],
        values: &[f64],
        target: &[f64],
        dt: f64,
        rel_tol: f64,
        abs_tol: f64,
        order: usize,
    ) -> Option<Self> {
        assert!(order == 2 || order == 4, "order must be 2 or 4");
        let n = values.len();
        let half = order / 2;
        if n < order + 2 || times.len() != n || target.len() != n {
            return None;
        }
        let mut out = Self {
            times: Vec::with_capacity(n),
            derivative: Vec::with_capacity(n),
            target: Vec::with_capacity(n),
            fd_tol: Vec::with_capacity(n),
            dt,
        };
        for k in half..n - half {
            let v = |o: isize| values[(k as isize + o) as usize];
            let (d, trunc) = if order == 2 {
                let d = (v(1) - v(-1)) / (2.0 * dt);
                let lo = if k + 2 < n { k - 1 } else { k - 2 };
                let w = &values[lo..lo + 4];
                let third = w[3] - 3.0 * w[2] + 3.0 * w[1] - w[0];
                (d, third.abs() / (6.0 * dt))
            } else {
                let d = (-v(2) + 8.0 * v(1) - 8.0 * v(-1) + v(-2)) / (12.0 * dt);
                let lo = (k - 2).min(n - 6);
                let w = &values[lo..lo + 6];
                let fifth = w[5] - 5.0 * w[4] + 10.0 * w[3] - 10.0 * w[2] + 5.0 * w[1] - w[0];
                (d, fifth.abs() / (30.0 * dt))
            };
            let local = values[k - half..=k + half].iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let noise = (rel_tol * local + abs_tol) / dt;
            out.times.push(times[k]);
            out.derivative.push(d);
            out.target.push(target[k]);
            out.fd_tol.push(FD_SAFETY * trunc + NOISE_SAFETY * noise);
        }
        Some(out)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn scale(&self, k: usize) -> f64 {
        1f64.max(self.derivative[k].abs()).max(self.target[k].abs())
    }

    /// `derivative − target`.
    pub fn residual(&self, k: usize) -> f64 {
        self.derivative[k] - self.target[k]
    }

    pub fn normalized_residual(&self, k: usize) -> f64 {
        self.residual(k) / self.scale(k)
    }

    pub fn max_abs_normalized(&self) -> f64 {
        (0..self.len())
            .map(|k| self.normalized_residual(k).abs())
            .fold(0.0, f64::max)
    }

    /// Index maximizing `residual / (fd_tol + floor)`, i.e. the point
    /// nearest to breaking `derivative <= target` (`signed`) or
    /// `|derivative − target| <= tol`.
    pub fn worst_index(&self, signed: bool) -> Option<usize> {
        (0..self.len())
            .map(|k| {
                let r = self.residual(k);
                let r = if signed { r } else { r.abs() };
                (k, r / (self.fd_tol[k] + f64::MIN_POSITIVE) / self.scale(k))
            })
            .fold(None, |best: Option<(usize, f64)>, (k, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((k, v)),
            })
            .map(|(k, _)| k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * dt).collect()
    }

    #[test]
    fn quadratic_is_differentiated_exactly() {
        let t = grid(11, 0.1);
        let f: Vec<f64> = t.iter().map(|t| 3.0 * t * t - t).collect();
        let want: Vec<f64> = t.iter().map(|t| 6.0 * t - 1.0).collect();
        let s = ResidualSeries::new(&t, &f, &want, 0.1, 0.0, 0.0).unwrap();
        assert_eq!(s.len(), 9);
        assert!(s.max_abs_normalized() < 1e-13);
    }

    #[test]
    fn error_bar_covers_truncation_and_converges_at_second_order() {
        let res = |dt: f64| {
            let t = grid(21, dt);
            let f: Vec<f64> = t.iter().map(|t| t.sin()).collect();
            let want: Vec<f64> = t.iter().map(|t| t.cos()).collect();
            let s = ResidualSeries::new(&t, &f, &want, dt, 1e-14, 0.0).unwrap();
            for k in 0..s.len() {
                assert!(s.residual(k).abs() <= s.fd_tol[k] + 1e-15);
            }
            s.max_abs_normalized()
        };
        let ratio = res(0.02) / res(0.01);
        assert!((ratio - 4.0).abs() < 0.3, "{ratio}");
    }

    #[test]
    fn fourth_order_stencil_converges_at_fourth_order() {
        let res = |dt: f64| {
            let t = grid(41, dt);
            let f: Vec<f64> = t.iter().map(|t| (2.0 * t).sin()).collect();
            let want: Vec<f64> = t.iter().map(|t| 2.0 * (2.0 * t).cos()).collect();
            let s = ResidualSeries::with_order(&t, &f, &want, dt, 1e-15, 0.0, 4).unwrap();
            assert_eq!(s.len(), 37);
            for k in 0..s.len() {
                assert!(s.residual(k).abs() <= s.fd_tol[k] + 1e-14);
            }
            s.max_abs_normalized()
        };
        let ratio = res(0.02) / res(0.01);
        assert!((ratio - 16.0).abs() < 1.5, "{ratio}");
    }

    #[test]
    fn too_short_or_mismatched() {
        assert!(ResidualSeries::new(&[0.0, 1.0, 2.0], &[0.0; 3], &[0.0; 3], 1.0, 0.0, 0.0).is_none());
        assert!(ResidualSeries::new(&[0.0; 5], &[0.0; 4], &[0.0; 5], 1.0, 0.0, 0.0).is_none());
    }

    #[test]
    fn worst_index_signed() {
        let t = grid(6, 1.0);
        let f = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let target = vec![0.0, 1.0, 0.9, 1.0, 3.0, 0.0];
        let s = ResidualSeries::new(&t, &f, &target, 1.0, 1e-3, 0.0).unwrap();
        assert_eq!(s.worst_index(true), Some(1));
        assert_eq!(s.worst_index(false), Some(3));
    }
}
