//! Smooth transition machinery: a compactly supported bump, the normalized
//! mollifier, a C-infinity step built from the bump's cumulative integral,
//! and the far-from-diagonal cutoff of a two-point generating function.

use crate::error::{Error, Result};
use crate::genfn::{GenJet, GeneratingFn, PureCubic};
use crate::lazutkin::{tilde_h, LazutkinChart};
use crate::num::quadrature::{adaptive_quad, fixed_gauss};
use once_cell::sync::Lazy;

/// Unnormalized bump `exp(-1/(1-s^2))` on (-1, 1), identically zero outside.
pub fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// First derivative of [`bump`].
fn bump_deriv(s: f64) -> f64 {
    if s.abs() < 1.0 {
        let r = 1.0 - s * s;
        bump(s) * (-2.0 * s / (r * r))
    } else {
        0.0
    }
}

static BUMP_MASS: Lazy<f64> =
    Lazy::new(|| adaptive_quad(&bump, -1.0, 1.0, 1e-14, 1e-18, 32).expect("bump is smooth"));

/// Mollifier: the bump rescaled to unit mass on [-1, 1].
pub fn mollifier(s: f64) -> f64 {
    bump(s) / *BUMP_MASS
}

/// Derivative of the mollifier.
pub fn mollifier_deriv(s: f64) -> f64 {
    bump_deriv(s) / *BUMP_MASS
}

const STEP_PANELS: usize = 256;

/// C-infinity monotone step: 0 for u <= -1, 1 for u >= 1, with derivative
/// equal to the mollifier. Values come from panel-cumulative integrals of the
/// bump plus an exact partial-panel quadrature, so no interpolation error.
#[derive(Debug, Clone)]
pub struct SmoothStep {
    cum: Vec<f64>,
}

impl SmoothStep {
    fn build() -> Self {
        let h = 2.0 / STEP_PANELS as f64;
        let mut cum = Vec::with_capacity(STEP_PANELS + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for i in 0..STEP_PANELS {
            let a = -1.0 + h * i as f64;
            acc += fixed_gauss(bump, a, a + h, 16);
            cum.push(acc);
        }
        Self { cum }
    }

    /// Step value at `u`.
    pub fn value(&self, u: f64) -> f64 {
        if u <= -1.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let h = 2.0 / STEP_PANELS as f64;
        let idx = (((u + 1.0) / h).floor() as usize).min(STEP_PANELS - 1);
        let a = -1.0 + h * idx as f64;
        let partial = fixed_gauss(bump, a, u, 16);
        (self.cum[idx] + partial) / *BUMP_MASS
    }

    /// First derivative (the mollifier itself).
    pub fn deriv(&self, u: f64) -> f64 {
        mollifier(u)
    }

    /// Second derivative.
    pub fn deriv2(&self, u: f64) -> f64 {
        mollifier_deriv(u)
    }
}

static SMOOTHSTEP: Lazy<SmoothStep> = Lazy::new(SmoothStep::build);

/// Shared smoothstep instance.
pub fn smoothstep() -> &'static SmoothStep {
    &SMOOTHSTEP
}

/// Generating function equal to the chart's two-point function for gaps below
/// `eps`, to the pure cubic `gap^3/6` for gaps above `sqrt(eps)`, and blended
/// smoothly in between. The blend keeps the function C-infinity in both
/// endpoints, so the associated twist map is globally defined while agreeing
/// with the original map near the diagonal.
#[derive(Debug, Clone)]
pub struct CutoffGen<'a> {
    chart: &'a LazutkinChart,
    eps: f64,
}

impl<'a> CutoffGen<'a> {
    /// Gap below which the chart function is returned untouched.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Gap above which the function is exactly the pure cubic.
    pub fn outer_gap(&self) -> f64 {
        self.eps.sqrt()
    }

    /// Underlying chart.
    pub fn chart(&self) -> &'a LazutkinChart {
        self.chart
    }

    /// Transition factor T(gap) with its first two derivatives: 1 below
    /// `eps`, 0 above `sqrt(eps)`.
    fn transition(&self, gap: f64) -> (f64, f64, f64) {
        let lo = self.eps;
        let hi = self.eps.sqrt();
        let scale = 2.0 / (hi - lo);
        let u = (gap - lo) * scale - 1.0;
        let s = smoothstep();
        (
            1.0 - s.value(u),
            -s.deriv(u) * scale,
            -s.deriv2(u) * scale * scale,
        )
    }
}

/// Builds the far-from-diagonal cutoff of the chart's generating function.
pub fn cutoff_generating(chart: &LazutkinChart, eps: f64) -> Result<CutoffGen<'_>> {
    if !(eps > 0.0 && eps < 0.2) {
        return Err(Error::InvalidConfig {
            msg: "cutoff gap must lie in (0, 0.2)".to_string(),
        });
    }
    Ok(CutoffGen { chart, eps })
}

impl GeneratingFn for CutoffGen<'_> {
    fn jet(&self, x: f64, x_plus: f64) -> Result<GenJet> {
        let gap = x_plus - x;
        if gap <= 0.0 {
            return Err(Error::CoincidentPoints { gap: gap.abs() });
        }
        if gap >= self.outer_gap() {
            return PureCubic.jet(x, x_plus);
        }
        let th = tilde_h(self.chart, x, x_plus)?;
        if gap <= self.eps {
            return Ok(th);
        }
        let (t, td, tdd) = self.transition(gap);
        let cubic = PureCubic.jet(x, x_plus)?;
        // Departure of the chart function from the cubic and its partials.
        let q = th.value - cubic.value;
        let q1 = th.d1 - cubic.d1;
        let q2 = th.d2 - cubic.d2;
        Ok(GenJet {
            value: cubic.value + q * t,
            d1: cubic.d1 + q1 * t - q * td,
            d2: cubic.d2 + q2 * t + q * td,
            d11: cubic.d11 + (th.d11 - cubic.d11) * t - 2.0 * q1 * td + q * tdd,
            d12: cubic.d12 + (th.d12 - cubic.d12) * t + (q1 - q2) * td - q * tdd,
            d22: cubic.d22 + (th.d22 - cubic.d22) * t + 2.0 * q2 * td + q * tdd,
        })
    }
}
