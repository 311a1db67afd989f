//! Tangential (periodic) calculus: spectral `d_x`, the Fourier multipliers
//! `Lambda^sigma` (symbol `(1+k^2)^{sigma/2}`) and `|D_x|^sigma` (symbol
//! `|k|^sigma`), dealiased products, and the multiplier commutator.
//!
//! Convention: the forward transform of a real row `w` is
//! `c_k = (2 pi / Nx) * sum_i w(x_i) e^{-i k x_i}`, so the discrete
//! `L^2_x` norm satisfies `||w||^2 = (2 pi)^{-1} sum_k |c_k|^2`.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::field::Field;
use crate::grid::TWO_PI;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Signed wavenumber of bin `i` (Nyquist bin maps to `-nx/2`).
#[inline]
pub fn wavenumber(i: usize, nx: usize) -> i64 {
    if i < (nx + 1) / 2 {
        i as i64
    } else {
        i as i64 - nx as i64
    }
}

/// Fourier coefficients of a real row under the stated convention.
pub fn forward_coefficients(row: &[f64]) -> Vec<Complex<f64>> {
    let n = row.len();
    let mut buf: Vec<Complex<f64>> = row.iter().map(|&v| Complex::new(v, 0.0)).collect();
    plan_forward(n).process(&mut buf);
    let scale = TWO_PI / n as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Real row from coefficients (inverse of [`forward_coefficients`]).
pub fn inverse_coefficients(coeffs: &[Complex<f64>]) -> Vec<f64> {
    let n = coeffs.len();
    let mut buf = coeffs.to_vec();
    plan_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / TWO_PI).collect()
}

/// Apply a diagonal Fourier multiplier to one real row.
fn apply_row(row: &[f64], mult: &[Complex<f64>], out: &mut [f64]) {
    let n = row.len();
    let mut buf: Vec<Complex<f64>> = row.iter().map(|&v| Complex::new(v, 0.0)).collect();
    plan_forward(n).process(&mut buf);
    for (c, m) in buf.iter_mut().zip(mult) {
        *c *= m;
    }
    plan_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for (o, c) in out.iter_mut().zip(&buf) {
        *o = c.re * scale;
    }
}

fn apply_field(field: &Field, mult: &[Complex<f64>]) -> Field {
    let mut out = field.clone();
    let ny = field.ny();
    for j in 0..=ny {
        let row = field.row(j).to_vec();
        apply_row(&row, mult, out.row_mut(j));
    }
    out
}

/// Spectral tangential derivative of order 1..=4 (multiplier `(ik)^order`;
/// the unpaired Nyquist mode is dropped for odd orders).
pub fn dx(field: &Field, order: usize) -> Field {
    assert!((1..=4).contains(&order), "dx order must be 1..=4");
    let nx = field.nx();
    let mult: Vec<Complex<f64>> = (0..nx)
        .map(|i| {
            let k = wavenumber(i, nx);
            if order % 2 == 1 && nx % 2 == 0 && i == nx / 2 {
                return Complex::new(0.0, 0.0);
            }
            Complex::new(0.0, k as f64).powu(order as u32)
        })
        .collect();
    apply_field(field, &mult)
}

/// Multiplier with symbol `(1 + k^2)^{sigma/2}`.
pub fn lambda_sigma(field: &Field, sigma: f64) -> Field {
    let nx = field.nx();
    let mult: Vec<Complex<f64>> = (0..nx)
        .map(|i| {
            let k = wavenumber(i, nx) as f64;
            Complex::new((1.0 + k * k).powf(sigma / 2.0), 0.0)
        })
        .collect();
    apply_field(field, &mult)
}

/// Multiplier with symbol `|k|^sigma`, `sigma > 0`; annihilates the mean.
pub fn abs_dx_sigma(field: &Field, sigma: f64) -> Field {
    assert!(sigma > 0.0, "abs_dx_sigma requires sigma > 0");
    let nx = field.nx();
    let mult: Vec<Complex<f64>> = (0..nx)
        .map(|i| {
            let k = wavenumber(i, nx).unsigned_abs() as f64;
            Complex::new(if k == 0.0 { 0.0 } else { k.powf(sigma) }, 0.0)
        })
        .collect();
    apply_field(field, &mult)
}

fn abs_dx_sigma_row(row: &[f64], sigma: f64) -> Vec<f64> {
    let n = row.len();
    let mut buf: Vec<Complex<f64>> = row.iter().map(|&v| Complex::new(v, 0.0)).collect();
    plan_forward(n).process(&mut buf);
    for (i, c) in buf.iter_mut().enumerate() {
        let k = wavenumber(i, n).unsigned_abs() as f64;
        *c *= if k == 0.0 { 0.0 } else { k.powf(sigma) };
    }
    plan_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// `|D_x|^sigma (rho w) - rho |D_x|^sigma w` on one row, `0 < sigma < 1`.
pub fn commutator_multiplier(rho: &[f64], w: &[f64], sigma: f64) -> Vec<f64> {
    assert!(sigma > 0.0 && sigma < 1.0, "commutator sigma must lie in (0,1)");
    assert_eq!(rho.len(), w.len());
    let prod: Vec<f64> = rho.iter().zip(w).map(|(r, v)| r * v).collect();
    let a = abs_dx_sigma_row(&prod, sigma);
    let b = abs_dx_sigma_row(w, sigma);
    a.iter()
        .zip(b.iter().zip(rho))
        .map(|(av, (bv, r))| av - r * bv)
        .collect()
}

/// Zero all modes with `|k| > nx/3` (2/3 rule).
pub fn dealias(field: &Field) -> Field {
    let nx = field.nx();
    let cut = nx as f64 / 3.0;
    let mult: Vec<Complex<f64>> = (0..nx)
        .map(|i| {
            let k = wavenumber(i, nx).unsigned_abs() as f64;
            Complex::new(if k > cut { 0.0 } else { 1.0 }, 0.0)
        })
        .collect();
    apply_field(field, &mult)
}

/// Pointwise product with the 2/3 rule applied to both inputs and the result.
pub fn dealiased_product(a: &Field, b: &Field) -> Field {
    dealias(&dealias(a).pointwise_mul(&dealias(b)))
}
