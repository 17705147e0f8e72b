//! Dormand–Prince 5(4) stepper with continuous extension.

use thiserror::Error;

const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_max: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for StepperOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            h_max: f64::INFINITY,
            h_init: None,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError<E> {
    /// The step size fell below roundoff. `last_rhs_error` is set when the
    /// final rejection came from the right-hand side rather than from error
    /// control.
    #[error("step size underflow at t = {t} (h = {h:e})")]
    Underflow { t: f64, h: f64, last_rhs_error: Option<E> },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("right-hand side failed at the initial point")]
    Initial(E),
}

/// Continuous extension over one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    cont: [Vec<f64>; 5],
}

impl DenseSegment {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Fourth-order interpolant; exact at both endpoints.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [c0, c1, c2, c3, c4] = &self.cont;
        (0..c0.len())
            .map(|i| c0[i] + th * (c1[i] + th1 * (c2[i] + th * (c3[i] + th1 * c4[i]))))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Dopri5 {
    t: f64,
    y: Vec<f64>,
    k0: Vec<f64>,
    h: f64,
    opts: StepperOptions,
    fac_old: f64,
    last_rejected: bool,
    pub n_accepted: usize,
    pub n_rejected: usize,
    pub n_rhs: usize,
}

fn err_norm(y0: &[f64], y1: &[f64], err: &[f64], opts: &StepperOptions) -> f64 {
    let n = y0.len().max(1) as f64;
    let s: f64 = y0
        .iter()
        .zip(y1)
        .zip(err)
        .map(|((a, b), e)| {
            let sk = opts.abs_tol + opts.rel_tol * a.abs().max(b.abs());
            (e / sk).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

impl Dopri5 {
    pub fn new<F, E>(rhs: &mut F, t0: f64, y0: Vec<f64>, opts: StepperOptions) -> Result<Self, StepError<E>>
    where
        F: FnMut(f64, &[f64]) -> Result<Vec<f64>, E>,
    {
        let k0 = rhs(t0, &y0).map_err(StepError::Initial)?;
        let h = opts.h_init.unwrap_or_else(|| {
            // Hairer–Wanner starting guess
            let d0 = err_norm(&y0, &y0, &y0, &opts);
            let d1 = err_norm(&y0, &y0, &k0, &opts);
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            h0.min(opts.h_max)
        });
        Ok(Self {
            t: t0,
            y: y0,
            k0,
            h,
            opts,
            fac_old: 1e-4,
            last_rejected: false,
            n_accepted: 0,
            n_rejected: 0,
            n_rhs: 1,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Derivative at the current point.
    pub fn dy(&self) -> &[f64] {
        &self.k0
    }

    pub fn set_h_max(&mut self, h_max: f64) {
        self.opts.h_max = h_max;
    }

    /// Takes one accepted step, never past `t_limit`.
    pub fn step<F, E>(&mut self, rhs: &mut F, t_limit: f64) -> Result<DenseSegment, StepError<E>>
    where
        F: FnMut(f64, &[f64]) -> Result<Vec<f64>, E>,
    {
        let n = self.y.len();
        let mut last_rhs_error = None;
        loop {
            if self.n_accepted + self.n_rejected >= self.opts.max_steps {
                return Err(StepError::TooManySteps(self.opts.max_steps));
            }
            let h_floor = 16.0 * f64::EPSILON * self.t.abs().max(1.0);
            let mut h = self.h.min(self.opts.h_max);
            let mut last = false;
            if self.t + h >= t_limit - h_floor {
                h = t_limit - self.t;
                last = true;
            }
            if h < h_floor {
                return Err(StepError::Underflow {
                    t: self.t,
                    h,
                    last_rhs_error,
                });
            }

            let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
            k.push(self.k0.clone());
            let mut failed = None;
            let mut ynew = Vec::new();
            for s in 0..6 {
                let ys: Vec<f64> = (0..n)
                    .map(|i| self.y[i] + h * (0..=s).map(|j| A[s][j] * k[j][i]).sum::<f64>())
                    .collect();
                let ts = if s == 5 { self.t + h } else { self.t + C[s] * h };
                self.n_rhs += 1;
                match rhs(ts, &ys) {
                    Ok(v) if v.iter().all(|x| x.is_finite()) => k.push(v),
                    Ok(_) => {
                        failed = Some(None);
                        break;
                    }
                    Err(e) => {
                        failed = Some(Some(e));
                        break;
                    }
                }
                if s == 5 {
                    ynew = ys;
                }
            }
            if let Some(e) = failed {
                self.n_rejected += 1;
                last_rhs_error = e;
                self.h = 0.25 * h;
                self.last_rejected = true;
                continue;
            }

            let err: Vec<f64> = (0..n)
                .map(|i| h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>())
                .collect();
            let en = err_norm(&self.y, &ynew, &err, &self.opts);
            if !en.is_finite() {
                self.n_rejected += 1;
                self.h = 0.25 * h;
                self.last_rejected = true;
                continue;
            }
            let fac11 = en.powf(0.2 - BETA * 0.75);
            let fac = (fac11 / self.fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;

            if en <= 1.0 {
                self.fac_old = en.max(1e-4);
                let ydiff: Vec<f64> = (0..n).map(|i| ynew[i] - self.y[i]).collect();
                let bspl: Vec<f64> = (0..n).map(|i| h * k[0][i] - ydiff[i]).collect();
                let c3: Vec<f64> = (0..n).map(|i| ydiff[i] - h * k[6][i] - bspl[i]).collect();
                let c4: Vec<f64> = (0..n)
                    .map(|i| h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>())
                    .collect();
                let seg = DenseSegment {
                    t0: self.t,
                    h,
                    cont: [self.y.clone(), ydiff, bspl, c3, c4],
                };
                if self.last_rejected {
                    h_new = h_new.min(h);
                }
                self.last_rejected = false;
                self.t = if last { t_limit } else { self.t + h };
                self.y = ynew;
                self.k0 = k.pop().expect("seven stages");
                self.n_accepted += 1;
                // keep the pre-truncation step size after hitting a limit
                self.h = if last { h_new.max(self.h) } else { h_new };
                return Ok(seg);
            }
            self.n_rejected += 1;
            self.last_rejected = true;
            self.h = h / (1.0 / FAC_MIN).min(fac11 / SAFETY);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn run(
        f: &mut impl FnMut(f64, &[f64]) -> Result<Vec<f64>, Infallible>,
        y0: Vec<f64>,
        t_end: f64,
        rel_tol: f64,
    ) -> (Vec<f64>, Vec<DenseSegment>) {
        let opts = StepperOptions {
            rel_tol,
            abs_tol: rel_tol * 1e-3,
            ..Default::default()
        };
        let mut s = Dopri5::new(f, 0.0, y0, opts).unwrap();
        let mut segs = Vec::new();
        while s.t() < t_end {
            segs.push(s.step(f, t_end).unwrap());
        }
        (s.y().to_vec(), segs)
    }

    #[test]
    fn exponential_decay() {
        let mut f = |_: f64, y: &[f64]| Ok(vec![-y[0]]);
        let (y, _) = run(&mut f, vec![1.0], 3.0, 1e-10);
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let mut f = |_: f64, y: &[f64]| Ok(vec![y[1], -y[0]]);
        let (_, segs) = run(&mut f, vec![0.0, 1.0], 10.0, 1e-10);
        let mut worst: f64 = 0.0;
        for s in &segs {
            for q in 0..=8 {
                let t = s.t0 + s.h * q as f64 / 8.0;
                let y = s.eval(t);
                worst = worst.max((y[0] - t.sin()).abs()).max((y[1] - t.cos()).abs());
            }
        }
        assert!(worst < 1e-7, "{worst}");
        let last = segs.last().unwrap();
        assert_eq!(last.t1(), 10.0);
    }

    #[test]
    fn polynomial_is_integrated_exactly() {
        // y' = 5t⁴ lies in the span of the fifth-order weights
        let mut f = |t: f64, _: &[f64]| Ok(vec![5.0 * t.powi(4)]);
        let (y, _) = run(&mut f, vec![0.0], 2.0, 1e-6);
        assert!((y[0] - 32.0).abs() < 1e-11);
    }

    #[test]
    fn convergence_under_tolerance_refinement() {
        let mut f = |t: f64, y: &[f64]| Ok(vec![y[0] * t.cos()]);
        let exact = 5f64.sin().exp();
        let e1 = (run(&mut f, vec![1.0], 5.0, 1e-6).0[0] - exact).abs();
        let e2 = (run(&mut f, vec![1.0], 5.0, 1e-9).0[0] - exact).abs();
        assert!(e2 < e1 && e2 < 1e-8);
    }

    #[test]
    fn rhs_failure_shrinks_step_then_underflows_at_barrier() {
        // y' = 1 but y >= 1 is forbidden
        let mut f = |_: f64, y: &[f64]| if y[0] < 1.0 { Ok(vec![1.0]) } else { Err("barrier") };
        let opts = StepperOptions {
            h_init: Some(0.3),
            ..Default::default()
        };
        let mut s = Dopri5::new(&mut f, 0.0, vec![0.0], opts).unwrap();
        let err = loop {
            match s.step(&mut f, 2.0) {
                Ok(_) => continue,
                Err(e) => break e,
            }
        };
        match err {
            StepError::Underflow { t, last_rhs_error, .. } => {
                assert!((t - 1.0).abs() < 1e-12);
                assert_eq!(last_rhs_error, Some("barrier"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn h_max_is_respected() {
        let mut f = |_: f64, _: &[f64]| Ok::<_, Infallible>(vec![0.0]);
        let opts = StepperOptions {
            h_max: 0.1,
            ..Default::default()
        };
        let mut s = Dopri5::new(&mut f, 0.0, vec![1.0], opts).unwrap();
        while s.t() < 1.0 {
            let seg = s.step(&mut f, 1.0).unwrap();
            assert!(seg.h <= 0.1 + 1e-15);
        }
        assert!(s.n_accepted >= 10);
    }
}
