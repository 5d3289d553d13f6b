//! Error taxonomy shared by every module in the crate.
//!
//! Each variant corresponds to a specific detectable failure of a numeric
//! routine or an input contract; operations never panic on bad input.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Radius-of-curvature profile dips to zero or below (not strictly convex).
    #[error("profile is not strictly convex: min radius of curvature {min_radius:.6e} <= 0")]
    NonConvex { min_radius: f64 },

    /// Frequency-1 coefficients present in a radius profile; the curve would not close.
    #[error("frequency-1 profile coefficients must be zero for the curve to close")]
    ClosureViolation,

    /// Reflection angle below the configured floor; the bounce root-finder degenerates.
    #[error("reflection angle {v:.3e} is below the tangency floor")]
    DegenerateTangency { v: f64 },

    /// Two-point generating function queried on (nearly) coincident endpoints.
    #[error("generating function endpoints coincide (gap {gap:.3e})")]
    CoincidentPoints { gap: f64 },

    /// Adaptive quadrature exceeded the subdivision budget.
    #[error("adaptive quadrature stalled at subdivision depth {depth}")]
    QuadratureStall { depth: u32 },

    /// Legendre/twist inversion could not bracket a solution.
    #[error("inversion failed: no bracket for action {l:.6e}")]
    InversionFail { l: f64 },

    /// Adaptive ODE integrator step size collapsed.
    #[error("ODE step size underflow at t = {t:.6}")]
    StepUnderflow { t: f64 },

    /// Generating-function grid failed its reconstruction self-test.
    #[error("grid too coarse: reconstruction residual {residual:.3e} exceeds {tol:.3e}")]
    GridTooCoarse { residual: f64, tol: f64 },

    /// The positivity criterion failed at a grid node.
    #[error(
        "positivity violated at (x={x:.6}, l={l:.3e}, t={t:.6}): margin {margin:.6e} <= required {required:.6e}"
    )]
    PositivityViolation {
        x: f64,
        l: f64,
        t: f64,
        margin: f64,
        required: f64,
    },

    /// Iterative minimization ran out of iterations.
    #[error("no convergence after {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: u32, residual: f64 },

    /// Monotone-ordering projection cycled during action minimization.
    #[error("ordering projection cycled; configuration collapsed")]
    OrderingCollapse,

    /// Convex conjugation queried outside the sampled slope range.
    #[error("slope {c:.6e} outside sampled range [{lo:.6e}, {hi:.6e}]")]
    OutOfSlopeRange { c: f64, lo: f64, hi: f64 },

    /// Too few usable points above the floating-point floor for a slope fit.
    #[error("fit unstable: only {usable} residuals above the floating-point floor")]
    FitUnstable { usable: usize },

    /// Invalid run/suspension configuration.
    #[error("invalid configuration: {msg}")]
    InvalidConfig { msg: String },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
