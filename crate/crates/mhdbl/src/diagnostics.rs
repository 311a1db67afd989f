//! The quantities the weighted energy method is built from: `H^m_l` norms,
//! the energy and dissipation functionals, the good unknowns with their
//! transport cancellation, the wall trace identities, and the running
//! inequality ratio.

use crate::dynamics::EPS0;
use crate::error::{MhdError, Result};
use crate::field::Field;
use crate::grid::{weight, Grid};
use crate::spectral;
use crate::state::State;

/// One diagnostics row of a run; serializes to one CSV line.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub t: f64,
    pub e: f64,
    pub d: f64,
    pub cstar: f64,
    pub cancel_residual: f64,
    pub b3_residual: f64,
    pub b5_residual: f64,
    pub div_u_residual: f64,
    pub div_f_residual: f64,
    pub g_eq_residual: f64,
    pub min_env_ratio: f64,
    pub tail_mass: f64,
    /// squared weighted norms per derivative pair `(i, j)`, for u then f
    pub norm_breakdown_u: Vec<(usize, usize, f64)>,
    pub norm_breakdown_f: Vec<(usize, usize, f64)>,
}

pub const CSV_HEADER: &str =
    "t,E,D,Cstar,cancel_res,b3_res,b5_res,div_u_res,div_f_res,g_eq_res,min_env_ratio,tail_mass";

impl EnergyReport {
    pub fn csv_row(&self) -> String {
        let v = [
            self.t,
            self.e,
            self.d,
            self.cstar,
            self.cancel_residual,
            self.b3_residual,
            self.b5_residual,
            self.div_u_residual,
            self.div_f_residual,
            self.g_eq_residual,
            self.min_env_ratio,
            self.tail_mass,
        ];
        v.iter()
            .map(|x| format!("{x:.16e}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Per-pair squared norms `||<y>^{l+j} d_x^i d_y^j field||^2` for `i+j <= m`.
pub fn sobolev_table(field: &Field, m: usize, ell: f64, grid: &Grid) -> Result<Vec<(usize, usize, f64)>> {
    assert!(m <= 4, "norms defined for m <= 4");
    let mut out = Vec::new();
    for i in 0..=m {
        let base = if i == 0 { field.clone() } else { spectral::dx(field, i) };
        for j in 0..=m - i {
            let d = if j == 0 { base.clone() } else { grid.dy(&base, j)? };
            let n = grid.weighted_l2(&d, ell + j as f64);
            out.push((i, j, n * n));
        }
    }
    Ok(out)
}

pub fn sobolev_norm_sq(field: &Field, m: usize, ell: f64, grid: &Grid) -> Result<f64> {
    Ok(sobolev_table(field, m, ell, grid)?.iter().map(|(_, _, v)| v).sum())
}

/// `E = ||u||^2_{H^4_l} + ||f||^2_{H^4_l}`.
pub fn energy_e(state: &State, grid: &Grid) -> Result<f64> {
    Ok(sobolev_norm_sq(&state.u, 4, grid.ell(), grid)?
        + sobolev_norm_sq(&state.f, 4, grid.ell(), grid)?)
}

/// `D = ||d_y f||^2_{H^4_l}`.
pub fn dissipation_d(state: &State, grid: &Grid) -> Result<f64> {
    sobolev_norm_sq(&grid.dy(&state.f, 1)?, 4, grid.ell(), grid)
}

#[derive(Debug, Clone)]
pub struct GoodUnknowns {
    /// `psi = d_x^4 f + (d_y f / f) d_x^3 g`
    pub psi: Field,
    /// `phi = d_x^4 u + (d_y u / f) d_x^3 g`
    pub phi: Field,
    /// max relative gap between the additive and product (`-f d_y(d_x^3 g / f)`)
    /// forms of `psi` over the monitored region
    pub max_discrepancy: f64,
}

/// Denominator copy of `f` with the rows above the monitored region floored
/// at half the envelope, so the artificial Dirichlet zero at `Ymax` cannot
/// blow up the ratio terms.
fn guarded_f(state: &State, grid: &Grid) -> Field {
    let top = grid.monitor_top();
    let mut out = state.f.clone();
    for j in top + 1..=grid.ny() {
        let floor = 0.5 * state.c.max(EPS0) * weight(grid.y_nodes()[j], -state.delta);
        for i in 0..grid.nx() {
            out.set(i, j, out.at(i, j).max(floor));
        }
    }
    out
}

fn require_positive(state: &State, grid: &Grid) -> Result<()> {
    let top = grid.monitor_top();
    for j in 0..=top {
        let w = weight(grid.y_nodes()[j], state.delta);
        for i in 0..grid.nx() {
            let ratio = state.f.at(i, j) * w;
            if ratio <= 0.0 {
                return Err(MhdError::PositivityLost {
                    t: state.t,
                    min_ratio: ratio,
                    floor: 0.0,
                });
            }
        }
    }
    Ok(())
}

pub fn good_unknowns(state: &State, grid: &Grid) -> Result<GoodUnknowns> {
    require_positive(state, grid)?;
    let f_safe = guarded_f(state, grid);
    let dx4f = spectral::dx(&state.f, 4);
    let dx4u = spectral::dx(&state.u, 4);
    let dx3g = spectral::dx(&state.g, 3);
    let dyf = grid.dy(&state.f, 1)?;
    let dyu = grid.dy(&state.u, 1)?;

    let mut psi = dx4f.clone();
    let mut phi = dx4u.clone();
    let mut ratio = Field::zeros(grid);
    for j in 0..=grid.ny() {
        for i in 0..grid.nx() {
            let fd = f_safe.at(i, j);
            psi.set(i, j, dx4f.at(i, j) + dyf.at(i, j) / fd * dx3g.at(i, j));
            phi.set(i, j, dx4u.at(i, j) + dyu.at(i, j) / fd * dx3g.at(i, j));
            ratio.set(i, j, dx3g.at(i, j) / fd);
        }
    }
    // product form -f d_y(d_x^3 g / f), compared away from the one-sided
    // stencils at the top
    let psi_prod = state.f.pointwise_mul(&grid.dy(&ratio, 1)?).scale(-1.0);
    let jmax = grid.monitor_top().saturating_sub(3);
    let scale = psi.max_abs().max(EPS0);
    let mut gap = 0.0f64;
    for j in 0..=jmax {
        for i in 0..grid.nx() {
            gap = gap.max((psi.at(i, j) - psi_prod.at(i, j)).abs());
        }
    }
    Ok(GoodUnknowns {
        psi,
        phi,
        max_discrepancy: gap / scale,
    })
}

fn inner(a: &Field, b: &Field, grid: &Grid) -> f64 {
    let dx = grid.dx_spacing();
    let mut sum = 0.0;
    for j in 0..=grid.ny() {
        let w = grid.quad_weights()[j] * dx;
        let (ra, rb) = (a.row(j), b.row(j));
        let mut row = 0.0;
        for i in 0..grid.nx() {
            row += ra[i] * rb[i];
        }
        sum += w * row;
    }
    sum
}

/// Discrete value of
/// `((f d_x + g d_y) <y>^l phi, <y>^l psi) + ((f d_x + g d_y) <y>^l psi, <y>^l phi)`,
/// normalized by `||<y>^l psi|| ||<y>^l phi|| + eps`. The continuum value is
/// zero, so this is pure discretization error.
pub fn cancellation_residual(state: &State, grid: &Grid) -> Result<f64> {
    let gu = good_unknowns(state, grid)?;
    let w = Field::from_fn(grid, |_, y| weight(y, grid.ell()));
    let wpsi = w.pointwise_mul(&gu.psi);
    let wphi = w.pointwise_mul(&gu.phi);
    let transport = |a: &Field| -> Result<Field> {
        Ok(state
            .f
            .pointwise_mul(&spectral::dx(a, 1))
            .axpy(1.0, &state.g.pointwise_mul(&grid.dy(a, 1)?)))
    };
    let sum = inner(&transport(&wphi)?, &wpsi, grid) + inner(&transport(&wpsi)?, &wphi, grid);
    let norm = grid.weighted_l2(&gu.psi, grid.ell()) * grid.weighted_l2(&gu.phi, grid.ell());
    Ok(sum.abs() / (norm + EPS0))
}

fn trace_rows(state: &State, grid: &Grid) -> Result<[Vec<f64>; 10]> {
    let row = |f: &Field| f.row(0).to_vec();
    let dyu = grid.dy(&state.u, 1)?;
    Ok([
        row(&grid.dy(&state.f, 3)?),
        row(&dyu),
        row(&spectral::dx(&state.f, 1)),
        row(&spectral::dx(&dyu, 1)),
        row(&state.f),
        row(&state.u),
        row(&grid.dy(&state.f, 2)?),
        row(&grid.dy(&state.u, 3)?),
        row(&spectral::dx(&state.u, 1)),
        row(&spectral::dx(&dyu, 2)),
    ])
}

/// `L^2_x` residual of the wall identity
/// `d_y^3 f = 2 (d_y u)(d_x f) - f d_x d_y u` at `y = 0`, relative to the
/// trace scale of `f`.
pub fn boundary_identity_b3(state: &State, grid: &Grid) -> Result<f64> {
    let [d3f, dyu, dxf, dxdyu, f0, ..] = trace_rows(state, grid)?;
    let res: Vec<f64> = (0..grid.nx())
        .map(|i| d3f[i] - 2.0 * dyu[i] * dxf[i] + f0[i] * dxdyu[i])
        .collect();
    Ok(grid.l2_x(&res) / (grid.l2_x(&f0) + EPS0))
}

/// `L^2_x` residual of the ten-term wall identity for `d_y^5 f` at `y = 0`,
/// relative to the trace scale of `f`.
pub fn boundary_identity_b5(state: &State, grid: &Grid) -> Result<f64> {
    let d5f = grid.dy(&state.f, 5)?.row(0).to_vec();
    let [_, dyu, dxf, dxdyu, f0, u0, d2f, d3u, dxu, dx2dyu] = trace_rows(state, grid)?;
    let d3f = grid.dy(&state.f, 3)?;
    let dxd3f = spectral::dx(&d3f, 1).row(0).to_vec();
    let d3f = d3f.row(0).to_vec();
    let dxd3u = spectral::dx(&grid.dy(&state.u, 3)?, 1).row(0).to_vec();
    let dxd2f = spectral::dx(&grid.dy(&state.f, 2)?, 1).row(0).to_vec();
    let dx2f = spectral::dx(&state.f, 2).row(0).to_vec();
    let dx2u = spectral::dx(&state.u, 2).row(0).to_vec();

    let res: Vec<f64> = (0..grid.nx())
        .map(|i| {
            let rhs = u0[i] * dxd3f[i] - f0[i] * dxd3u[i] - 4.0 * dxu[i] * d3f[i]
                - 7.0 * dxdyu[i] * d2f[i]
                + 4.0 * dxf[i] * d3u[i]
                + 8.0 * dyu[i] * dxd2f[i]
                - u0[i] * dxf[i] * dxdyu[i]
                + u0[i] * f0[i] * dx2dyu[i]
                - 2.0 * u0[i] * dyu[i] * dx2f[i]
                + 2.0 * f0[i] * dyu[i] * dx2u[i];
            d5f[i] - rhs
        })
        .collect();
    Ok(grid.l2_x(&res) / (grid.l2_x(&f0) + EPS0))
}

/// Running ratio `C*(t) = (E(t) + int_0^t D) / (E(0) + int_0^t (E + E^2))`
/// with trapezoidal time quadrature. Returns the trace and a degenerate
/// flag for zero-data runs.
pub fn inequality_ratio(history: &[EnergyReport]) -> (Vec<f64>, bool) {
    let mut out = Vec::with_capacity(history.len());
    let mut int_d = 0.0;
    let mut int_ee = 0.0;
    let mut degenerate = false;
    for (k, r) in history.iter().enumerate() {
        if k > 0 {
            let p = &history[k - 1];
            let h = r.t - p.t;
            int_d += 0.5 * h * (r.d + p.d);
            int_ee += 0.5 * h * ((r.e + r.e * r.e) + (p.e + p.e * p.e));
        }
        let denom = history[0].e + int_ee;
        if denom <= EPS0 {
            degenerate = true;
            out.push(0.0);
        } else {
            out.push((r.e + int_d) / denom);
        }
    }
    (out, degenerate)
}

#[derive(Debug, Clone, Copy)]
pub struct TraceCheck {
    /// `||Lambda^{1/2} d_y^3 u(., 0)||^2_{L^2_x}`
    pub lhs: f64,
    /// `2 int ||Lambda d_y^3 u|| ||d_y^4 u|| dy`
    pub rhs: f64,
    pub energy: f64,
    /// `lhs <= 1.05 rhs` and `rhs <= 1.05 E`
    pub ok: bool,
}

pub fn trace_inequality_check(state: &State, grid: &Grid) -> Result<TraceCheck> {
    let d3u = grid.dy(&state.u, 3)?;
    let d4u = grid.dy(&state.u, 4)?;
    let half = spectral::lambda_sigma(&d3u, 0.5);
    let lhs = {
        let n = grid.l2_x(half.row(0));
        n * n
    };
    let lam = spectral::lambda_sigma(&d3u, 1.0);
    let mut rhs = 0.0;
    for j in 0..=grid.ny() {
        rhs += 2.0 * grid.quad_weights()[j] * grid.l2_x(lam.row(j)) * grid.l2_x(d4u.row(j));
    }
    let energy = energy_e(state, grid)?;
    let ok = lhs <= 1.05 * rhs && rhs <= 1.05 * energy;
    Ok(TraceCheck { lhs, rhs, energy, ok })
}

/// Analytic estimate of the weighted mass neglected beyond `Ymax`, from the
/// envelope `c <y>^-delta`: `2 pi c^2 int_Ymax^inf (1+y^2)^{l-delta} dy`.
pub fn tail_mass(c: f64, delta: f64, ell: f64, ymax: f64) -> f64 {
    let p = ell - delta; // 2p < -1
    let cut = 50.0 * ymax;
    let n = 20_000;
    let h = (cut - ymax) / n as f64;
    let integrand = |y: f64| (1.0 + y * y).powf(p);
    let mut int = 0.5 * (integrand(ymax) + integrand(cut));
    for k in 1..n {
        int += integrand(ymax + k as f64 * h);
    }
    int *= h;
    // power-law remainder beyond the cutoff
    int += cut.powf(2.0 * p + 1.0) / (-2.0 * p - 1.0);
    crate::grid::TWO_PI * c * c * int
}
