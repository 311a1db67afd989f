//! Numerical solver and verification harness for the 2D magnetic boundary
//! layer system on `T x R+` (periodic in x, truncated half-line in y):
//!
//! ```text
//! (d_t + u d_x + v d_y) u - (f d_x + g d_y) f = 0
//! (d_t + u d_x + v d_y - d_y^2) f - (f d_x + g d_y) u = 0
//! d_x u + d_y v = 0,   d_x f + d_y g = 0
//! (v, d_y f, g)|_{y=0} = 0,   u, f -> 0 as y -> infinity
//! ```
//!
//! The prognostic unknowns are `(u, f)`; the normal components `(v, g)` are
//! reconstructed from the divergence-free conditions. Tangential derivatives
//! are spectral, normal derivatives are 4th-order finite differences, and the
//! magnetic diffusion `d_y^2 f` is treated implicitly (IMEX Euler).
//!
//! Alongside the solver, the crate computes the quantities that the weighted
//! energy method for this system is built from: the `H^m_l` norms, the energy
//! and dissipation functionals, the good unknowns `psi`/`phi` with their
//! transport cancellation, wall trace identities, and empirical checks of the
//! multiplier commutator, Hardy and trace inequalities.

pub mod banded;
pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod grid;
pub mod mms;
pub mod runner;
pub mod snapshot;
pub mod spectral;
pub mod state;
pub mod verify;

pub use error::MhdError;
pub use field::Field;
pub use grid::Grid;
pub use state::State;
