//! Randomized structural properties of the operator layer.

use mhdbl::field::Field;
use mhdbl::grid::Grid;
use mhdbl::spectral;
use proptest::prelude::*;

fn small_grid() -> Grid {
    Grid::build(16, 32, 8.0, 0.6, 1.5).unwrap()
}

/// Band-limited field built from a handful of bounded mode amplitudes.
fn field_from(params: &[(f64, f64, f64)], grid: &Grid) -> Field {
    Field::from_fn(grid, |x, y| {
        params
            .iter()
            .enumerate()
            .map(|(k, &(a, b, c))| {
                (a * ((k + 1) as f64 * x).cos() + b * ((k + 1) as f64 * x).sin())
                    * (-c.abs() * y).exp()
            })
            .sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn weighted_norm_is_absolutely_homogeneous(
        params in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, 0.1..2.0f64), 1..4),
        scale in -5.0..5.0f64,
        sigma in -2.0..2.0f64,
    ) {
        let g = small_grid();
        let f = field_from(&params, &g);
        let lhs = g.weighted_l2(&f.scale(scale), sigma);
        let rhs = scale.abs() * g.weighted_l2(&f, sigma);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn spectral_derivative_is_linear(
        pa in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, 0.1..2.0f64), 1..4),
        pb in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, 0.1..2.0f64), 1..4),
        alpha in -3.0..3.0f64,
    ) {
        let g = small_grid();
        let (a, b) = (field_from(&pa, &g), field_from(&pb, &g));
        let lhs = spectral::dx(&a.axpy(alpha, &b), 1);
        let rhs = spectral::dx(&a, 1).axpy(alpha, &spectral::dx(&b, 1));
        prop_assert!(lhs.axpy(-1.0, &rhs).max_abs() < 1e-10);
    }

    #[test]
    fn forward_inverse_round_trip(
        params in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, 0.1..2.0f64), 1..4),
    ) {
        let g = small_grid();
        let f = field_from(&params, &g);
        let row = f.row(3);
        let coeffs = spectral::forward_coefficients(row);
        let back = spectral::inverse_coefficients(&coeffs);
        for (u, v) in row.iter().zip(&back) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn commutator_with_constant_multiplier_vanishes(
        params in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, 0.1..2.0f64), 1..4),
        rho in -4.0..4.0f64,
        sigma in 0.1..0.9f64,
    ) {
        let g = small_grid();
        let w = field_from(&params, &g);
        let rho_row = vec![rho; g.nx()];
        let comm = spectral::commutator_multiplier(&rho_row, w.row(0), sigma);
        prop_assert!(comm.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn snapshot_round_trip_is_exact(
        params in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, 0.1..2.0f64), 1..4),
        t in 0.0..10.0f64,
    ) {
        let g = small_grid();
        let u = field_from(&params, &g);
        let f = Field::from_fn(&g, |_, y| mhdbl::grid::weight(y, -2.0));
        let s = mhdbl::state::State::new(t, u, f, 0.5, 2.0, &g);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        mhdbl::snapshot::write_snapshot(&path, &g, &s).unwrap();
        let snap = mhdbl::snapshot::read_snapshot(&path).unwrap();
        prop_assert_eq!(snap.t.to_bits(), s.t.to_bits());
        prop_assert_eq!(snap.u, s.u.data().to_vec());
        prop_assert_eq!(snap.f, s.f.data().to_vec());
        prop_assert_eq!(snap.g, s.g.data().to_vec());
    }
}
