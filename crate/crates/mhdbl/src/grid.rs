//! Discrete geometry of the domain `T x [0, Ymax]`: node placement,
//! trapezoidal quadrature, the polynomial weights `<y>^sigma`, and the
//! normal-direction finite-difference calculus.

use crate::error::{MhdError, Result};
use crate::field::Field;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Highest normal derivative order used anywhere (the `d_y^5 f` trace).
pub const MAX_DY_ORDER: usize = 5;

/// The weight `<y> = (1 + y^2)^{1/2}` raised to `sigma`.
#[inline]
pub fn weight(y: f64, sigma: f64) -> f64 {
    (1.0 + y * y).powf(sigma / 2.0)
}

/// Finite-difference weights for the `m`-th derivative at `z` from the nodes
/// `x`, by Fornberg's recurrence.
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    assert!(n > m, "need more nodes than derivative order");
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// Precomputed stencil table for one derivative order: per row `j`, the
/// window start and the weights over `order + 4` nodes.
#[derive(Debug, Clone)]
struct StencilTable {
    npts: usize,
    starts: Vec<usize>,
    weights: Vec<f64>, // (ny+1) x npts, row-major
}

#[derive(Debug, Clone)]
pub struct Grid {
    nx: usize,
    ny: usize,
    ymax: f64,
    ell: f64,
    delta: f64,
    x_nodes: Vec<f64>,
    y_nodes: Vec<f64>,
    quad_weights: Vec<f64>,
    stencils: Vec<Option<StencilTable>>, // index = derivative order
}

impl Grid {
    /// Build a uniform grid. `nx` must be a power of two >= 4, `ny >= 16`,
    /// `ell > 1/2`, `delta > ell + 1/2`.
    pub fn build(nx: usize, ny: usize, ymax: f64, ell: f64, delta: f64) -> Result<Grid> {
        let invalid = |name: &'static str, reason: String| MhdError::InvalidParameter { name, reason };
        if nx < 4 || !nx.is_power_of_two() {
            return Err(invalid("nx", format!("must be a power of two >= 4, got {nx}")));
        }
        if ny < 16 {
            return Err(invalid("ny", format!("must be >= 16, got {ny}")));
        }
        if !(ymax > 0.0) {
            return Err(invalid("ymax", format!("must be positive, got {ymax}")));
        }
        if !(ell > 0.5) {
            return Err(invalid("ell", format!("requires ell > 1/2, got {ell}")));
        }
        if !(delta > ell + 0.5) {
            return Err(invalid(
                "delta",
                format!("requires delta > ell + 1/2 = {}, got {delta}", ell + 0.5),
            ));
        }

        let dy = ymax / ny as f64;
        let x_nodes: Vec<f64> = (0..nx).map(|i| TWO_PI * i as f64 / nx as f64).collect();
        // y_0 = 0 and y_ny = ymax exactly
        let y_nodes: Vec<f64> = (0..=ny)
            .map(|j| if j == ny { ymax } else { j as f64 * dy })
            .collect();
        let mut quad_weights = vec![dy; ny + 1];
        quad_weights[0] = 0.5 * dy;
        quad_weights[ny] = 0.5 * dy;

        let mut grid = Grid {
            nx,
            ny,
            ymax,
            ell,
            delta,
            x_nodes,
            y_nodes,
            quad_weights,
            stencils: vec![None; MAX_DY_ORDER + 1],
        };
        for order in 1..=MAX_DY_ORDER {
            if ny >= 2 * order + 4 {
                grid.stencils[order] = Some(grid.build_stencil(order));
            }
        }
        Ok(grid)
    }

    fn build_stencil(&self, order: usize) -> StencilTable {
        let n = self.ny + 1;
        let npts = order + 4; // accuracy >= 4 everywhere
        let mut starts = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n * npts);
        for j in 0..n {
            let start = j.saturating_sub(npts / 2).min(n - npts);
            starts.push(start);
            weights.extend(fornberg_weights(
                self.y_nodes[j],
                &self.y_nodes[start..start + npts],
                order,
            ));
        }
        StencilTable { npts, starts, weights }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn ymax(&self) -> f64 {
        self.ymax
    }
    pub fn ell(&self) -> f64 {
        self.ell
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn dx_spacing(&self) -> f64 {
        TWO_PI / self.nx as f64
    }
    pub fn dy_spacing(&self) -> f64 {
        self.ymax / self.ny as f64
    }
    pub fn x_nodes(&self) -> &[f64] {
        &self.x_nodes
    }
    pub fn y_nodes(&self) -> &[f64] {
        &self.y_nodes
    }
    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// Largest row index of the envelope-monitored region (`y <= 0.9 Ymax`).
    /// The top tenth of the column is governed by the artificial Dirichlet
    /// truncation, not by the decay structure of the solution.
    pub fn monitor_top(&self) -> usize {
        ((0.9 * self.ny as f64).floor() as usize).min(self.ny)
    }

    /// `order`-th normal derivative, 4th-order accurate including the
    /// one-sided stencils near both ends.
    pub fn dy(&self, field: &Field, order: usize) -> Result<Field> {
        assert!(order >= 1 && order <= MAX_DY_ORDER, "dy order must be 1..=5");
        let table = self.stencils[order]
            .as_ref()
            .ok_or(MhdError::GridTooCoarse { ny: self.ny, order })?;
        let mut out = Field::zeros(self);
        for j in 0..=self.ny {
            let start = table.starts[j];
            let w = &table.weights[j * table.npts..(j + 1) * table.npts];
            let row_out = {
                let mut acc = vec![0.0; self.nx];
                for (p, &wp) in w.iter().enumerate() {
                    let row = field.row(start + p);
                    for i in 0..self.nx {
                        acc[i] += wp * row[i];
                    }
                }
                acc
            };
            out.row_mut(j).copy_from_slice(&row_out);
        }
        Ok(out)
    }

    /// Cumulative trapezoidal antiderivative in y, exactly zero on the first
    /// row.
    pub fn integrate_y_from_0(&self, field: &Field) -> Field {
        let mut out = Field::zeros(self);
        let half_dy = 0.5 * self.dy_spacing();
        for j in 1..=self.ny {
            for i in 0..self.nx {
                let v = out.at(i, j - 1) + half_dy * (field.at(i, j - 1) + field.at(i, j));
                out.set(i, j, v);
            }
        }
        out
    }

    /// Discrete `L^2(Omega)` norm of `<y>^sigma * field`: trapezoid in y,
    /// uniform `2 pi / nx` weights in x.
    pub fn weighted_l2(&self, field: &Field, sigma: f64) -> f64 {
        let dx = self.dx_spacing();
        let mut sum = 0.0;
        for j in 0..=self.ny {
            let w2 = {
                let w = weight(self.y_nodes[j], sigma);
                w * w * self.quad_weights[j]
            };
            let row = field.row(j);
            let mut row_sum = 0.0;
            for &v in row {
                row_sum += v * v;
            }
            sum += w2 * row_sum * dx;
        }
        sum.sqrt()
    }

    /// `L^2_x` norm of a single row (trace in y).
    pub fn l2_x(&self, row: &[f64]) -> f64 {
        let dx = self.dx_spacing();
        (row.iter().map(|v| v * v).sum::<f64>() * dx).sqrt()
    }
}
