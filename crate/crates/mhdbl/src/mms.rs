//! Manufactured-solution case: a closed-form pair `(u*, f*)` with the source
//! fields that make it an exact solution of the forced system.
//!
//! ```text
//! u* = a sin(x) y^2 e^{-y} e^{-t}
//! f* = c0 <y>^{-delta} + a cos(x) e^{-y^2} e^{-t}
//! v* = -a cos(x) e^{-t} (2 - (y^2 + 2y + 2) e^{-y})
//! g* =  a sin(x) e^{-t} (sqrt(pi)/2) erf(y)
//! ```
//!
//! `v*` and `g*` are the exact antiderivatives required by the
//! divergence-free conditions (the magnetic one is elementary because the
//! perturbation of `f*` is additive). The sources below are the hand-derived
//! residuals of the two evolution equations; a finite-difference check in the
//! tests guards the transcription.

use libm::erf;

use crate::field::Field;
use crate::grid::{weight, Grid};
use crate::state::State;

const SQRT_PI: f64 = 1.7724538509055159;

#[derive(Debug, Clone, Copy)]
pub struct MmsCase {
    pub amp: f64,
    pub c0: f64,
    pub delta: f64,
}

impl Default for MmsCase {
    fn default() -> Self {
        MmsCase { amp: 0.1, c0: 1.0, delta: 2.0 }
    }
}

impl MmsCase {
    pub fn u(&self, t: f64, x: f64, y: f64) -> f64 {
        self.amp * x.sin() * y * y * (-y).exp() * (-t).exp()
    }

    pub fn f(&self, t: f64, x: f64, y: f64) -> f64 {
        self.c0 * weight(y, -self.delta) + self.amp * x.cos() * (-y * y).exp() * (-t).exp()
    }

    pub fn v(&self, t: f64, x: f64, y: f64) -> f64 {
        -self.amp * x.cos() * (-t).exp() * (2.0 - (y * y + 2.0 * y + 2.0) * (-y).exp())
    }

    pub fn g(&self, t: f64, x: f64, y: f64) -> f64 {
        self.amp * x.sin() * (-t).exp() * 0.5 * SQRT_PI * erf(y)
    }

    pub fn du_dx(&self, t: f64, x: f64, y: f64) -> f64 {
        self.amp * x.cos() * y * y * (-y).exp() * (-t).exp()
    }

    fn du_dy(&self, t: f64, x: f64, y: f64) -> f64 {
        self.amp * x.sin() * (2.0 * y - y * y) * (-y).exp() * (-t).exp()
    }

    pub fn df_dx(&self, t: f64, x: f64, y: f64) -> f64 {
        -self.amp * x.sin() * (-y * y).exp() * (-t).exp()
    }

    fn df_dy(&self, t: f64, x: f64, y: f64) -> f64 {
        let base = -self.c0 * self.delta * y * (1.0 + y * y).powf(-self.delta / 2.0 - 1.0);
        base - 2.0 * y * self.amp * x.cos() * (-y * y).exp() * (-t).exp()
    }

    fn d2f_dy2(&self, t: f64, x: f64, y: f64) -> f64 {
        let q = 1.0 + y * y;
        let base = -self.c0 * self.delta * q.powf(-self.delta / 2.0 - 1.0)
            + self.c0 * self.delta * (self.delta + 2.0) * y * y * q.powf(-self.delta / 2.0 - 2.0);
        base + self.amp * x.cos() * (-t).exp() * (4.0 * y * y - 2.0) * (-y * y).exp()
    }

    /// Source of the velocity equation:
    /// `S_u = d_t u* + u* d_x u* + v* d_y u* - f* d_x f* - g* d_y f*`.
    pub fn source_u(&self, t: f64, x: f64, y: f64) -> f64 {
        -self.u(t, x, y) + self.u(t, x, y) * self.du_dx(t, x, y)
            + self.v(t, x, y) * self.du_dy(t, x, y)
            - self.f(t, x, y) * self.df_dx(t, x, y)
            - self.g(t, x, y) * self.df_dy(t, x, y)
    }

    /// Source of the magnetic equation:
    /// `S_f = d_t f* + u* d_x f* + v* d_y f* - f* d_x u* - g* d_y u* - d_y^2 f*`.
    pub fn source_f(&self, t: f64, x: f64, y: f64) -> f64 {
        -self.amp * x.cos() * (-y * y).exp() * (-t).exp()
            + self.u(t, x, y) * self.df_dx(t, x, y)
            + self.v(t, x, y) * self.df_dy(t, x, y)
            - self.f(t, x, y) * self.du_dx(t, x, y)
            - self.g(t, x, y) * self.du_dy(t, x, y)
            - self.d2f_dy2(t, x, y)
    }

    pub fn eval_u(&self, grid: &Grid, t: f64) -> Field {
        Field::from_fn(grid, |x, y| self.u(t, x, y))
    }

    pub fn eval_f(&self, grid: &Grid, t: f64) -> Field {
        Field::from_fn(grid, |x, y| self.f(t, x, y))
    }

    pub fn sources(&self, grid: &Grid, t: f64) -> (Field, Field) {
        (
            Field::from_fn(grid, |x, y| self.source_u(t, x, y)),
            Field::from_fn(grid, |x, y| self.source_f(t, x, y)),
        )
    }

    /// Dirichlet values of `f*` along the truncation row `y = Ymax`.
    pub fn f_top(&self, grid: &Grid, t: f64) -> Vec<f64> {
        grid.x_nodes()
            .iter()
            .map(|&x| self.f(t, x, grid.ymax()))
            .collect()
    }

    pub fn initial_state(&self, grid: &Grid) -> State {
        State::new(
            0.0,
            self.eval_u(grid, 0.0),
            self.eval_f(grid, 0.0),
            0.25 * self.c0,
            self.delta,
            grid,
        )
    }
}
