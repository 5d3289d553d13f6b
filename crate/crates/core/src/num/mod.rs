//! Small self-contained numerical kernel: trigonometric series, quadrature,
//! root finding, an embedded adaptive ODE pair, tensor-grid interpolation,
//! continued fractions and slope fits.
//!
//! Everything here is deterministic: identical inputs produce bit-identical
//! outputs, which the command-line reproducibility guarantee relies on.

pub mod cf;
pub mod fit;
pub mod interp;
pub mod ode;
pub mod quadrature;
pub mod rootfind;
pub mod trig;

pub use cf::convergents;
pub use fit::{linear_fit, loglog_slope, FitLine};
pub use interp::{Table1, Table2, Table3, UniformAxis};
pub use ode::{integrate_adaptive, OdeOptions};
pub use quadrature::{adaptive_quad, fixed_gauss, gauss_nodes};
pub use rootfind::{bracketed_newton, expand_bracket_upward};
pub use trig::TrigSeries;
