//! Banded linear solves for the implicit diffusion step.
//!
//! Storage is row-major band form: entry `(i, j)` lives at
//! `data[i * width + (j + kl - i)]` for `i - kl <= j <= i + ku`.
//! Factorization is Doolittle LU without pivoting; the diffusion matrices
//! `I - dt d_y^2` are far from singular, and a zero pivot is reported as an
//! error rather than repaired.

use crate::error::{MhdError, Result};

#[derive(Debug, Clone)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Banded {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku, "({i},{j}) outside band");
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// LU factorization in band storage (L unit lower, multipliers stored in
    /// the subdiagonal slots).
    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        for k in 0..n {
            let piv = self.get(k, k);
            if piv.abs() < 1e-300 {
                return Err(MhdError::SingularSolve { row: k });
            }
            let imax = (k + self.kl).min(n - 1);
            let jmax = (k + self.ku).min(n - 1);
            for i in k + 1..=imax {
                let m = self.get(i, k) / piv;
                self.set(i, k, m);
                for j in k + 1..=jmax {
                    let v = self.get(i, j) - m * self.get(k, j);
                    self.set(i, j, v);
                }
            }
        }
        Ok(BandedLu(self))
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu(Banded);

impl BandedLu {
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let b = &self.0;
        let n = b.n;
        assert_eq!(rhs.len(), n);
        for i in 1..n {
            let j0 = i.saturating_sub(b.kl);
            let mut acc = rhs[i];
            for j in j0..i {
                acc -= b.get(i, j) * rhs[j];
            }
            rhs[i] = acc;
        }
        for i in (0..n).rev() {
            let j1 = (i + b.ku).min(n - 1);
            let mut acc = rhs[i];
            for j in i + 1..=j1 {
                acc -= b.get(i, j) * rhs[j];
            }
            rhs[i] = acc / b.get(i, i);
        }
    }
}
