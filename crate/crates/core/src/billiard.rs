//! The exact billiard map on the annulus 𝕋 × (0, π) and the physical
//! two-point generating function h(s, s⁺) = −|P(s⁺) − P(s)| with analytic
//! first and second partial derivatives.

use crate::boundary::BoundaryCurve;
use crate::error::{Error, Result};
use crate::num::rootfind::{bracketed_newton, RootError};

/// Default floor on the reflection angle below which the bounce root-finder
/// bracket collapses.
pub const V_MIN_DEFAULT: f64 = 1e-9;

/// One point of the billiard phase space: arc length (lifted real) and
/// reflection angle in (0, π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilliardState {
    pub s: f64,
    pub v: f64,
}

/// Chord data between two boundary points, with the generating function and
/// its partial derivatives.
#[derive(Debug, Clone, Copy)]
pub struct ChordData {
    pub s: f64,
    pub s_plus: f64,
    /// Chord length.
    pub ell: f64,
    /// Departure and arrival angles to the forward tangent.
    pub v: f64,
    pub v_plus: f64,
    /// h = −ℓ.
    pub h: f64,
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Applies the billiard map: the ray leaving arc length `s` at angle `v` to
/// the forward tangent is traced to its next boundary intersection. The
/// returned arc length is lifted into (s, s+1).
pub fn reflect(curve: &BoundaryCurve, state: BilliardState) -> Result<BilliardState> {
    reflect_with_floor(curve, state, V_MIN_DEFAULT)
}

/// `reflect` with an explicit tangency floor.
pub fn reflect_with_floor(
    curve: &BoundaryCurve,
    state: BilliardState,
    v_min: f64,
) -> Result<BilliardState> {
    let BilliardState { s, v } = state;
    if !(v_min..=std::f64::consts::PI - v_min).contains(&v) {
        return Err(Error::DegenerateTangency { v });
    }
    let psi1 = curve.tangent_angle(s);
    let dir = [(psi1 + v).cos(), (psi1 + v).sin()];
    // Alignment function: signed area between the outgoing direction and the
    // chord to P(σ). Negative just after s, positive just before s+1, with a
    // single zero at the exit point on a strictly convex curve.
    let align = |sigma: f64| -> (f64, f64) {
        let psi2 = curve.tangent_angle(sigma);
        let chord = curve.chord_of_angles(psi1, psi2);
        let f = cross(dir, chord);
        let fp = cross(dir, curve.tangent_of_angle(psi2));
        (f, fp)
    };
    let lo = s + 1e-13;
    let hi = s + 1.0 - 1e-13;
    let s_plus = bracketed_newton(align, lo, hi, 1e-15, 0.0, 300).map_err(|e| match e {
        RootError::NoBracket => Error::DegenerateTangency { v },
        RootError::NoConvergence => Error::NoConvergence {
            iters: 300,
            residual: f64::NAN,
        },
    })?;
    let psi2 = curve.tangent_angle(s_plus);
    let t2 = curve.tangent_of_angle(psi2);
    let v_plus = f64::atan2(cross(dir, t2), dot(dir, t2));
    Ok(BilliardState {
        s: s_plus,
        v: v_plus,
    })
}

/// Generating function h(s, s⁺) = −ℓ with its partials. The second point is
/// lifted into (s, s+1); endpoints closer than 1e−12 (mod 1) are rejected.
pub fn generating_h(curve: &BoundaryCurve, s: f64, s_plus: f64) -> Result<ChordData> {
    let gap = (s_plus - s).rem_euclid(1.0);
    if gap < 1e-12 || gap > 1.0 - 1e-12 {
        return Err(Error::CoincidentPoints {
            gap: gap.min(1.0 - gap),
        });
    }
    let sp = s + gap;
    let psi1 = curve.tangent_angle(s);
    let psi2 = curve.tangent_angle(sp);
    let t1 = curve.tangent_of_angle(psi1);
    let t2 = curve.tangent_of_angle(psi2);
    let chord = curve.chord_of_angles(psi1, psi2);
    let ell = (chord[0] * chord[0] + chord[1] * chord[1]).sqrt();
    let v = f64::atan2(cross(t1, chord), dot(t1, chord));
    let v_plus = f64::atan2(cross(chord, t2), dot(chord, t2));
    let (sv, svp) = (v.sin(), v_plus.sin());
    let rho1 = curve.radius_of_angle(psi1);
    let rho2 = curve.radius_of_angle(psi2);
    Ok(ChordData {
        s,
        s_plus: sp,
        ell,
        v,
        v_plus,
        h: -ell,
        d1: v.cos(),
        d2: -v_plus.cos(),
        d11: sv / rho1 - sv * sv / ell,
        d12: -sv * svp / ell,
        d22: svp / rho2 - svp * svp / ell,
    })
}

/// Iterates `reflect` n times, returning the n+1 visited states with lifted
/// arc lengths.
pub fn orbit(curve: &BoundaryCurve, state: BilliardState, n: usize) -> Result<Vec<BilliardState>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(state);
    let mut current = state;
    for _ in 0..n {
        current = reflect(curve, current)?;
        out.push(current);
    }
    Ok(out)
}
