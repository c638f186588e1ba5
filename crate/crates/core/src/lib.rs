//! Semi-analytic solver and estimate probes for the sixth-order Boussinesq
//! equation
//!
//! ```text
//! u_tt − α²u_xx + αβu_xxxx − u_xxxxxx + (u²)_xx = 0,   x > 0, t > 0,
//! u(x,0) = φ(x),  u_t(x,0) = ψ''(x),
//! u(0,t) = h₁(t), u_xx(0,t) = h₂(t), u_xxxx(0,t) = h₃(t).
//! ```
//!
//! The linear pieces are evaluated from explicit representation formulas: the
//! whole-line propagator per Fourier mode, a Duhamel integral, and a boundary
//! operator obtained by inverting the Laplace transform in time. The nonlinear
//! problem is solved by Picard iteration on the resulting integral equation
//! after rescaling into the small-data regime.

pub mod boundary;
pub mod error;
pub mod estimates;
pub mod fd;
pub mod field;
pub mod grid;
pub mod io;
pub mod norms;
pub mod propagator;
pub mod quadrature;
pub mod series;
pub mod solver;
pub mod symbols;

pub use error::{Error, Result};
pub use field::{Representation, SpectralField};
pub use grid::{CutoffSpec, SpaceTimeGrid};
pub use symbols::PhaseSymbol;

pub use num_complex::Complex64 as C64;
