//! Time evolution: explicit transport and magnetic stretching, implicit
//! normal diffusion of `f` (IMEX Euler), CFL control, and the derived-field
//! consistency residual.

use crate::banded::{Banded, BandedLu};
use crate::error::{MhdError, Result};
use crate::field::Field;
use crate::grid::{fornberg_weights, weight, Grid};
use crate::spectral;
use crate::state::State;

pub const EPS0: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub dt: f64,
    pub cfl: f64,
    pub tend: f64,
    /// Minimum admissible pointwise value of `f <y>^delta`.
    pub f_floor: f64,
    pub output_every: usize,
    pub dealias: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1e-3,
            cfl: 0.5,
            tend: 0.1,
            f_floor: 1e-3,
            output_every: 10,
            dealias: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(MhdError::InvalidParameter {
                name: "dt",
                reason: format!("must be positive, got {}", self.dt),
            });
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(MhdError::InvalidParameter {
                name: "cfl",
                reason: format!("must lie in (0, 1], got {}", self.cfl),
            });
        }
        if !(self.f_floor > 0.0) {
            return Err(MhdError::InvalidParameter {
                name: "f_floor",
                reason: format!("must be positive, got {}", self.f_floor),
            });
        }
        Ok(())
    }
}

/// 2nd-order upwinded `d_y F` with pointwise advection speed `a`; one-sided
/// in the advection direction, falling back to the opposite bias where the
/// stencil would leave the grid.
pub fn upwind_dy(field: &Field, speed: &Field, grid: &Grid) -> Field {
    let nx = grid.nx();
    let ny = grid.ny();
    let h = grid.dy_spacing();
    let mut out = Field::zeros(grid);
    for j in 0..=ny {
        for i in 0..nx {
            let backward = if j >= 2 {
                (3.0 * field.at(i, j) - 4.0 * field.at(i, j - 1) + field.at(i, j - 2)) / (2.0 * h)
            } else {
                (-3.0 * field.at(i, j) + 4.0 * field.at(i, j + 1) - field.at(i, j + 2)) / (2.0 * h)
            };
            let forward = if j + 2 <= ny {
                (-3.0 * field.at(i, j) + 4.0 * field.at(i, j + 1) - field.at(i, j + 2)) / (2.0 * h)
            } else {
                (3.0 * field.at(i, j) - 4.0 * field.at(i, j - 1) + field.at(i, j - 2)) / (2.0 * h)
            };
            out.set(i, j, if speed.at(i, j) >= 0.0 { backward } else { forward });
        }
    }
    out
}

fn product(a: &Field, b: &Field, dealias: bool) -> Field {
    if dealias {
        spectral::dealiased_product(a, b)
    } else {
        a.pointwise_mul(b)
    }
}

fn rhs_u_opt(state: &State, grid: &Grid, dealias: bool) -> Field {
    let dxu = spectral::dx(&state.u, 1);
    let dxf = spectral::dx(&state.f, 1);
    let dyu = upwind_dy(&state.u, &state.v, grid);
    let dyf = upwind_dy(&state.f, &state.g, grid);
    product(&state.u, &dxu, dealias)
        .scale(-1.0)
        .axpy(-1.0, &product(&state.v, &dyu, dealias))
        .axpy(1.0, &product(&state.f, &dxf, dealias))
        .axpy(1.0, &product(&state.g, &dyf, dealias))
}

fn rhs_f_opt(state: &State, grid: &Grid, dealias: bool) -> Field {
    let dxu = spectral::dx(&state.u, 1);
    let dxf = spectral::dx(&state.f, 1);
    let dyu = upwind_dy(&state.u, &state.g, grid);
    let dyf = upwind_dy(&state.f, &state.v, grid);
    product(&state.u, &dxf, dealias)
        .scale(-1.0)
        .axpy(-1.0, &product(&state.v, &dyf, dealias))
        .axpy(1.0, &product(&state.f, &dxu, dealias))
        .axpy(1.0, &product(&state.g, &dyu, dealias))
}

/// `-u d_x u - v d_y u + f d_x f + g d_y f`.
pub fn rhs_u(state: &State, grid: &Grid) -> Field {
    rhs_u_opt(state, grid, true)
}

/// `-u d_x f - v d_y f + f d_x u + g d_y u` (diffusion handled implicitly).
pub fn rhs_f_explicit(state: &State, grid: &Grid) -> Field {
    rhs_f_opt(state, grid, true)
}

/// Backward-Euler operator for the normal diffusion of `f`:
/// `(I - dt d_y^2)` with a one-sided 2nd-order Neumann row at `y = 0` and a
/// Dirichlet row at `Ymax`.
pub struct DiffusionSolver {
    lu: BandedLu,
    ny: usize,
}

impl DiffusionSolver {
    pub fn new(grid: &Grid, dt: f64) -> Result<DiffusionSolver> {
        let n = grid.ny() + 1;
        let h = grid.dy_spacing();
        let y = grid.y_nodes();
        let mut a = Banded::zeros(n, 4, 4);
        a.set(0, 0, -3.0 / (2.0 * h));
        a.set(0, 1, 4.0 / (2.0 * h));
        a.set(0, 2, -1.0 / (2.0 * h));
        for j in 1..n - 1 {
            let start = (j.saturating_sub(2)).min(n - 6);
            let w = fornberg_weights(y[j], &y[start..start + 6], 2);
            a.set(j, j, 1.0);
            for (p, wp) in w.iter().enumerate() {
                let col = start + p;
                a.set(j, col, a.get(j, col) - dt * wp);
            }
        }
        a.set(n - 1, n - 1, 1.0);
        Ok(DiffusionSolver { lu: a.factor()?, ny: n - 1 })
    }

    /// Solve column-by-column; the Neumann row forces `d_y f = 0` at the
    /// bottom, `top` supplies the Dirichlet value per x-node (zero if None).
    pub fn solve(&self, f: &Field, top: Option<&[f64]>) -> Field {
        let nx = f.nx();
        let mut out = f.clone();
        let mut col = vec![0.0; self.ny + 1];
        for i in 0..nx {
            for j in 0..=self.ny {
                col[j] = f.at(i, j);
            }
            col[0] = 0.0;
            col[self.ny] = top.map_or(0.0, |t| t[i]);
            self.lu.solve_in_place(&mut col);
            for j in 0..=self.ny {
                out.set(i, j, col[j]);
            }
        }
        out
    }
}

pub fn implicit_diffusion_f(f: &Field, dt: f64, grid: &Grid) -> Result<Field> {
    Ok(DiffusionSolver::new(grid, dt)?.solve(f, None))
}

/// CFL-limited step size for the current fields.
pub fn cfl_dt(state: &State, cfg: &SolverConfig, grid: &Grid) -> f64 {
    let tangential = grid.dx_spacing() / (state.u.max_abs() + state.f.max_abs() + EPS0);
    let normal = grid.dy_spacing() / (state.v.max_abs() + state.g.max_abs() + EPS0);
    cfg.dt.min(cfg.cfl * tangential.min(normal))
}

fn check_positivity(f: &Field, t: f64, floor: f64, delta: f64, grid: &Grid) -> Result<f64> {
    let mut min_ratio = f64::INFINITY;
    for j in 0..=grid.monitor_top() {
        let w = weight(grid.y_nodes()[j], delta);
        for i in 0..grid.nx() {
            min_ratio = min_ratio.min(f.at(i, j) * w);
        }
    }
    if min_ratio < floor {
        return Err(MhdError::PositivityLost { t, min_ratio, floor });
    }
    Ok(min_ratio)
}

/// One IMEX-Euler step with optional forcing (for manufactured-solution
/// runs): explicit transport, then the implicit diffusion solve on `f`.
pub fn step_forced(
    state: &State,
    cfg: &SolverConfig,
    grid: &Grid,
    source_u: Option<&Field>,
    source_f: Option<&Field>,
    f_top: Option<&[f64]>,
) -> Result<State> {
    if !state.u.is_finite() {
        return Err(MhdError::NonFinite { field: "u", t: state.t });
    }
    if !state.f.is_finite() {
        return Err(MhdError::NonFinite { field: "f", t: state.t });
    }
    check_positivity(&state.f, state.t, cfg.f_floor, state.delta, grid)?;

    let dt = cfl_dt(state, cfg, grid);
    if dt < 1e-12 {
        return Err(MhdError::CflCollapse { t: state.t, dt });
    }

    let mut ru = rhs_u_opt(state, grid, cfg.dealias);
    let mut rf = rhs_f_opt(state, grid, cfg.dealias);
    if let Some(s) = source_u {
        ru = ru.axpy(1.0, s);
    }
    if let Some(s) = source_f {
        rf = rf.axpy(1.0, s);
    }
    let u_next = state.u.axpy(dt, &ru);
    let f_tilde = state.f.axpy(dt, &rf);
    let f_next = DiffusionSolver::new(grid, dt)?.solve(&f_tilde, f_top);

    let next = State::new(state.t + dt, u_next, f_next, state.c, state.delta, grid);
    check_positivity(&next.f, next.t, cfg.f_floor, state.delta, grid)?;
    Ok(next)
}

pub fn step(state: &State, cfg: &SolverConfig, grid: &Grid) -> Result<State> {
    step_forced(state, cfg, grid, None, None, None)
}

/// `L^2` residual of the evolution equation satisfied by the derived `g`:
/// `(d_t + u d_x + v d_y - d_y^2) g - f d_x v + g d_x u`, with a
/// finite-difference time derivative between consecutive states.
pub fn g_equation_residual(state: &State, prev: &State, grid: &Grid) -> Result<f64> {
    let dt = state.t - prev.t;
    assert!(dt > 0.0, "states must be one step apart");
    let ddt = state.g.axpy(-1.0, &prev.g).scale(1.0 / dt);
    let transport = spectral::dealiased_product(&state.u, &spectral::dx(&state.g, 1))
        .axpy(1.0, &spectral::dealiased_product(&state.v, &grid.dy(&state.g, 1)?));
    let stretch = spectral::dealiased_product(&state.f, &spectral::dx(&state.v, 1))
        .axpy(-1.0, &spectral::dealiased_product(&state.g, &spectral::dx(&state.u, 1)));
    let res = ddt
        .axpy(1.0, &transport)
        .axpy(-1.0, &grid.dy(&state.g, 2)?)
        .axpy(-1.0, &stretch);
    Ok(grid.weighted_l2(&res, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_initial_data, InitialDataSpec};

    fn grid() -> Grid {
        Grid::build(16, 128, 12.0, 0.6, 1.5).unwrap()
    }

    fn zero_state(g: &Grid) -> State {
        State::new(0.0, Field::zeros(g), Field::zeros(g), 1.0, 2.0, g)
    }

    #[test]
    fn rhs_zero_state_is_zero() {
        let g = grid();
        let s = zero_state(&g);
        assert!(rhs_u(&s, &g).max_abs() == 0.0);
        assert!(rhs_f_explicit(&s, &g).max_abs() == 0.0);
    }

    #[test]
    fn rhs_x_independent_is_zero() {
        let g = grid();
        let u = Field::from_fn(&g, |_, y| y * y * (-y).exp());
        let f = Field::from_fn(&g, |_, y| 1.0 / (1.0 + y * y));
        let s = State::new(0.0, u, f, 0.4, 2.0, &g);
        assert!(rhs_u(&s, &g).max_abs() < 1e-11);
        assert!(rhs_f_explicit(&s, &g).max_abs() < 1e-11);
    }

    #[test]
    fn upwind_matches_centered_on_smooth_interior() {
        let g = grid();
        let f = Field::from_fn(&g, |_, y| (-y).exp());
        let plus = Field::from_fn(&g, |_, _| 1.0);
        let d = upwind_dy(&f, &plus, &g);
        let dy2 = g.dy_spacing() * g.dy_spacing();
        for j in 2..g.ny() {
            let exact = -(-g.y_nodes()[j]).exp();
            assert!((d.at(0, j) - exact).abs() < 4.0 * dy2, "j={j}");
        }
    }

    #[test]
    fn diffusion_fixed_points() {
        let g = grid();
        assert!(implicit_diffusion_f(&Field::zeros(&g), 1e-3, &g).unwrap().max_abs() == 0.0);

        // constant stays put away from the Dirichlet top
        let c = Field::from_fn(&g, |_, _| 2.0);
        let out = implicit_diffusion_f(&c, 1e-4, &g).unwrap();
        for j in 0..g.ny() / 2 {
            assert!((out.at(0, j) - 2.0).abs() < 1e-9, "j={j}");
        }
        assert_eq!(out.at(0, g.ny()), 0.0);
    }

    #[test]
    fn diffusion_preserves_neumann_bottom() {
        let g = grid();
        let f = Field::from_fn(&g, |_, y| (-(y - 3.0) * (y - 3.0)).exp());
        let out = implicit_diffusion_f(&f, 1e-3, &g).unwrap();
        let h = g.dy_spacing();
        let d = (-3.0 * out.at(0, 0) + 4.0 * out.at(0, 1) - out.at(0, 2)) / (2.0 * h);
        assert!(d.abs() < 1e-10);
    }

    #[test]
    fn zero_state_is_fixed_point_of_forced_free_step() {
        let g = grid();
        // zero f violates the positivity floor, so drive a pure-shear state
        let spec = InitialDataSpec { amp_u: 0.0, amp_f: 0.0, ..Default::default() };
        let s = make_initial_data(&spec, &g).unwrap();
        let cfg = SolverConfig { dt: 1e-4, f_floor: 1e-4, ..Default::default() };
        let next = step(&s, &cfg, &g).unwrap();
        assert!(next.u.max_abs() < 1e-14);
        assert!(next.v.max_abs() < 1e-14 && next.g.max_abs() < 1e-13);
    }

    #[test]
    fn zero_f_triggers_positivity_loss() {
        let g = grid();
        let s = zero_state(&g);
        let cfg = SolverConfig::default();
        assert!(matches!(
            step(&s, &cfg, &g),
            Err(MhdError::PositivityLost { .. })
        ));
    }

    #[test]
    fn nan_detected() {
        let g = grid();
        let mut s = make_initial_data(&InitialDataSpec::default(), &g).unwrap();
        s.u.set(3, 7, f64::NAN);
        assert!(matches!(
            step(&s, &SolverConfig::default(), &g),
            Err(MhdError::NonFinite { field: "u", .. })
        ));
    }

    #[test]
    fn cfl_limits_step() {
        let g = grid();
        let mut s = make_initial_data(&InitialDataSpec::default(), &g).unwrap();
        // large fields force dt below cfg.dt
        s.u = Field::from_fn(&g, |x, y| 100.0 * x.sin() * y * (-y).exp());
        let cfg = SolverConfig { dt: 1e-1, ..Default::default() };
        let dt = cfl_dt(&s, &cfg, &g);
        assert!(dt < 1e-1);
        assert!(dt <= cfg.cfl * g.dx_spacing() / (s.u.max_abs() + s.f.max_abs()));
    }

    #[test]
    fn step_commutes_with_node_translation() {
        let g = grid();
        let s = make_initial_data(&InitialDataSpec::default(), &g).unwrap();
        let cfg = SolverConfig { dt: 1e-4, f_floor: 1e-4, ..Default::default() };

        let shift = |f: &Field, by: usize| -> Field {
            let mut out = f.clone();
            for j in 0..=g.ny() {
                for i in 0..g.nx() {
                    out.set((i + by) % g.nx(), j, f.at(i, j));
                }
            }
            out
        };
        let shifted = State::new(0.0, shift(&s.u, 3), shift(&s.f, 3), s.c, s.delta, &g);

        let a = step(&s, &cfg, &g).unwrap();
        let b = step(&shifted, &cfg, &g).unwrap();
        let diff_u = shift(&a.u, 3).axpy(-1.0, &b.u).max_abs();
        let diff_f = shift(&a.f, 3).axpy(-1.0, &b.f).max_abs();
        // not bit-exact: FFT roundoff is amplified by k^4 and the band solve
        assert!(diff_u < 1e-8 && diff_f < 1e-8, "({diff_u}, {diff_f})");
    }

    #[test]
    fn g_equation_residual_x_independent_is_zero() {
        let g = grid();
        let spec = InitialDataSpec { amp_u: 0.0, amp_f: 0.0, ..Default::default() };
        let s = make_initial_data(&spec, &g).unwrap();
        let cfg = SolverConfig { dt: 1e-4, f_floor: 1e-4, ..Default::default() };
        let next = step(&s, &cfg, &g).unwrap();
        let r = g_equation_residual(&next, &s, &g).unwrap();
        assert!(r < 1e-10, "residual {r}");
    }

    #[test]
    fn g_equation_residual_detects_corruption() {
        let g = grid();
        let s = make_initial_data(&InitialDataSpec::default(), &g).unwrap();
        let cfg = SolverConfig { dt: 1e-4, f_floor: 1e-4, ..Default::default() };
        let next = step(&s, &cfg, &g).unwrap();
        let clean = g_equation_residual(&next, &s, &g).unwrap();

        let mut bad = next.clone();
        for i in 0..g.nx() {
            for j in 0..=g.ny() {
                bad.g.set(i, j, bad.g.at(i, j) + 0.5 * (g.x_nodes()[i]).sin());
            }
        }
        let corrupted = g_equation_residual(&bad, &s, &g).unwrap();
        assert!(corrupted > 100.0 * clean.max(1e-6), "clean {clean}, corrupted {corrupted}");
    }
}
