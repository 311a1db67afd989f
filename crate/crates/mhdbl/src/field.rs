use crate::grid::Grid;

/// A real scalar sampled on the grid, stored row-major: `data[j*nx + i]` is
/// the value at `(x_i, y_j)`, `j = 0..=ny`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Field {
            nx: grid.nx(),
            ny: grid.ny(),
            data: vec![0.0; grid.nx() * (grid.ny() + 1)],
        }
    }

    /// Sample a closure `(x, y) -> value` on every node.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut out = Field::zeros(grid);
        for j in 0..=grid.ny() {
            let y = grid.y_nodes()[j];
            for i in 0..grid.nx() {
                out.data[j * grid.nx() + i] = f(grid.x_nodes()[i], y);
            }
        }
        out
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.nx + i] = v;
    }

    /// Row `j` (fixed y), contiguous over x.
    #[inline]
    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.nx..(j + 1) * self.nx]
    }

    #[inline]
    pub fn row_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nx..(j + 1) * self.nx]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Pointwise `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Field) -> Field {
        assert_eq!(self.data.len(), other.data.len());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + c * b)
            .collect();
        Field { nx: self.nx, ny: self.ny, data }
    }

    pub fn scale(&self, c: f64) -> Field {
        let data = self.data.iter().map(|a| c * a).collect();
        Field { nx: self.nx, ny: self.ny, data }
    }

    /// Pointwise (aliased) product; use `spectral::dealiased_product` for
    /// quadratic nonlinearities of the evolution equations.
    pub fn pointwise_mul(&self, other: &Field) -> Field {
        assert_eq!(self.data.len(), other.data.len());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .collect();
        Field { nx: self.nx, ny: self.ny, data }
    }
}
