//! The constants `c₀`, `a₀`, `b`, `B` of the integral estimates.

use serde::Serialize;
use std::f64::consts::PI;

use crate::flow::Trajectory;

/// Everything the constants depend on: `χ` and integrals of `g(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateConstants {
    pub chi: f64,
    /// `∫|Rc|²/(R+2)` at `t = 0`.
    pub int_f0: Option<f64>,
    /// `∫|Rc|²/R` at `t = 0`.
    pub int_rc2_over_r0: Option<f64>,
    /// `∫|Rc|²` at `t = 0`.
    pub int_rc2_0: f64,
    pub vol0: f64,
}

impl EstimateConstants {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let i = &traj.initial().integrals;
        Self {
            chi: traj.chi as f64,
            int_f0: i.f,
            int_rc2_over_r0: i.f_pos,
            int_rc2_0: i.rc2,
            vol0: i.vol,
        }
    }

    fn euler_part(&self, s: f64) -> f64 {
        4.0 * PI * PI * self.chi * (64.0 * s).exp_m1()
    }

    /// `c₀(S) = 4π²χ(e^{64S} − 1) + e^{64S} ∫f(0)`.
    pub fn c0(&self, s: f64) -> Option<f64> {
        self.int_f0.map(|f| self.euler_part(s) + (64.0 * s).exp() * f)
    }

    /// `a₀(S) = 4π²χ(e^{64S} − 1) + e^{64S} ∫(|Rc|²/R)(0)`.
    pub fn a0(&self, s: f64) -> Option<f64> {
        self.int_rc2_over_r0.map(|f| self.euler_part(s) + (64.0 * s).exp() * f)
    }

    /// `b(t) = 50 e^{50t} ∫|Rc|²(0) + 128π²χ(e^{50t} − 1)`.
    pub fn b(&self, t: f64) -> f64 {
        50.0 * (50.0 * t).exp() * self.int_rc2_0 + 128.0 * PI * PI * self.chi * (50.0 * t).exp_m1()
    }

    /// The gradient bound
    /// `B(T) = ∫|Rc|²(0) + b(T) + 2⁹π²χT
    ///        + 2⁶((e^{50T} − 1)∫|Rc|²(0) + 128π²χ(e^{50T}/50 − 1/50 − T))`.
    pub fn big_b(&self, t: f64) -> f64 {
        let e = (50.0 * t).exp_m1();
        self.int_rc2_0
            + self.b(t)
            + 512.0 * PI * PI * self.chi * t
            + 64.0 * (e * self.int_rc2_0 + 128.0 * PI * PI * self.chi * (e / 50.0 - t))
    }
}
