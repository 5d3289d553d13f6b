//! Embedded adaptive Dormand–Prince 5(4) integrator for small fixed-size
//! systems, with proportional step control and both time directions.

use crate::error::{Error, Result};

/// Integrator options.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Relative local tolerance.
    pub rel_tol: f64,
    /// Absolute local tolerance.
    pub abs_tol: f64,
    /// Initial step as a fraction of the span (0 → automatic).
    pub init_step_fraction: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-14,
            init_step_fraction: 0.0,
        }
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dy/dt = f(t, y)` from `t0` to `t1` (either direction) and
/// returns `y(t1)`. Step size adapts to the embedded error estimate; a step
/// shrinking below `1e-13·|t1−t0|` reports `StepUnderflow`.
pub fn integrate_adaptive<const N: usize, F>(
    f: &F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    opts: &OdeOptions,
) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = if opts.init_step_fraction > 0.0 {
        span * opts.init_step_fraction
    } else {
        span * 0.05
    };
    let h_min = span.abs() * 1e-13;
    let mut k = [[0.0; N]; 7];
    loop {
        let remaining = t1 - t;
        if remaining == 0.0 || remaining.abs() <= span.abs() * 1e-16 {
            return Ok(y);
        }
        if h.abs() > remaining.abs() {
            h = remaining;
        }
        if h.abs() < h_min {
            return Err(Error::StepUnderflow { t });
        }
        // Seven stages (the last evaluation point coincides with t + h).
        k[0] = f(t, &y);
        for stage in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[stage + 1] = f(t + C[stage] * h, &ys);
        }
        let mut y5 = y;
        let mut y4 = y;
        for (j, kj) in k.iter().enumerate() {
            for i in 0..N {
                y5[i] += h * B5[j] * kj[i];
                y4[i] += h * B4[j] * kj[i];
            }
        }
        // Scaled error norm.
        let mut err: f64 = 0.0;
        for i in 0..N {
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
            err = err.max(((y5[i] - y4[i]) / scale).abs());
        }
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h * dir <= 0.0 {
            h = h_min * dir;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_round_trip() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let opts = OdeOptions::default();
        let tau = 2.0 * std::f64::consts::PI;
        let y = integrate_adaptive(&f, 0.0, tau, [1.0, 0.0], &opts).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9);
        assert!(y[1].abs() < 1e-9);
    }

    #[test]
    fn backward_integration_inverts_forward() {
        let f = |t: f64, y: &[f64; 1]| [t.cos() * y[0]];
        let opts = OdeOptions::default();
        let fwd = integrate_adaptive(&f, 0.0, 2.5, [1.3], &opts).unwrap();
        let back = integrate_adaptive(&f, 2.5, 0.0, fwd, &opts).unwrap();
        assert!((back[0] - 1.3).abs() < 1e-9);
    }

    #[test]
    fn tolerance_controls_error() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let tight = OdeOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            init_step_fraction: 0.0,
        };
        let y = integrate_adaptive(&f, 0.0, 1.0, [1.0], &tight).unwrap();
        assert!((y[0] - std::f64::consts::E).abs() < 1e-10);
    }
}
