//! Adapted boundary-layer coordinates for the billiard map: the near-identity
//! chart x(s) weighted by curvature-radius^{−2/3}, the action variable
//! l = y²/2, the exactly conjugated map, its generating function h̃, and the
//! small-angle expansion diagnostics of the underlying billiard map.

use crate::billiard::{self, BilliardState};
use crate::boundary::{BoundaryCurve, PSI0};
use crate::error::{Error, Result};
use crate::genfn::{GenJet, GeneratingFn};
use crate::num::fit::{loglog_slope, FitLine};
use crate::num::quadrature::adaptive_quad;
use crate::num::trig::TrigSeries;

const TAU: f64 = 2.0 * std::f64::consts::PI;
const CHART_TABLE: usize = 4096;
const PROFILE_SAMPLES: usize = 4096;

/// Threshold below which the conjugated map returns its l = 0 limit (the
/// identity) instead of attempting a degenerate reflection.
pub const L_FLOOR: f64 = 1e-14;

/// A point of the chart phase space: lifted coordinate x and action l ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LazutkinState {
    pub x: f64,
    pub l: f64,
}

/// The chart over one boundary: normalization constant, the curvature weight
/// g(ψ) = ρ(ψ)^{1/3} as a trigonometric series, and an inversion table.
#[derive(Debug, Clone)]
pub struct LazutkinChart {
    curve: BoundaryCurve,
    c1: f64,
    g: TrigSeries<f64>,
    psi_table: Vec<f64>,
}

/// Builds the chart for a curve. The coordinate is
/// x(s) = C₁ ∫₀ˢ ρ^{−2/3} dτ with C₁ = (∫₀¹ ρ^{−2/3} ds)^{−1}, evaluated
/// spectrally: in the tangent-angle variable the integrand becomes ρ^{1/3}.
pub fn build_chart(curve: &BoundaryCurve) -> Result<LazutkinChart> {
    let vals: Vec<f64> = (0..PROFILE_SAMPLES)
        .map(|j| {
            let psi = TAU * j as f64 / PROFILE_SAMPLES as f64;
            curve.radius_of_angle(psi).cbrt()
        })
        .collect();
    let g = TrigSeries::from_samples(&vals, 192, 1e-16);
    let c1 = 1.0 / (TAU * g.mean());
    if !(c1 > 0.0) {
        return Err(Error::NonConvex { min_radius: 0.0 });
    }
    // March a ψ(x) table over one period for inversion seeds.
    let mut psi_table = Vec::with_capacity(CHART_TABLE + 1);
    let mut psi = PSI0;
    for j in 0..=CHART_TABLE {
        let target = j as f64 / CHART_TABLE as f64;
        for _ in 0..32 {
            let err = c1 * g.antideriv_diff(PSI0, psi) - target;
            if err.abs() < 1e-15 {
                break;
            }
            psi -= err / (c1 * g.eval(psi));
        }
        psi_table.push(psi);
    }
    Ok(LazutkinChart {
        curve: curve.clone(),
        c1,
        g,
        psi_table,
    })
}

impl LazutkinChart {
    /// Normalization constant C₁ = (∫₀¹ ρ^{−2/3} ds)^{−1}.
    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    /// Chart coordinate as a function of the (lifted) tangent angle.
    pub fn x_of_angle(&self, psi: f64) -> f64 {
        self.c1 * self.g.antideriv_diff(PSI0, psi)
    }

    /// Chart coordinate of a lifted arc length.
    pub fn x_of_s(&self, s: f64) -> f64 {
        self.x_of_angle(self.curve.tangent_angle(s))
    }

    /// Tangent angle at a lifted chart coordinate (inverse of `x_of_angle`).
    pub fn angle_of_x(&self, x: f64) -> f64 {
        let wind = x.floor();
        let frac = x - wind;
        let j = ((frac * CHART_TABLE as f64) as usize).min(CHART_TABLE - 1);
        let mut psi = self.psi_table[j];
        for _ in 0..32 {
            let err = self.c1 * self.g.antideriv_diff(PSI0, psi) - frac;
            if err.abs() < 1e-16 {
                break;
            }
            psi -= err / (self.c1 * self.g.eval(psi));
        }
        psi + TAU * wind
    }

    /// Lifted arc length at a lifted chart coordinate.
    pub fn s_of_x(&self, x: f64) -> f64 {
        self.curve.arc_of_angle(self.angle_of_x(x))
    }

    /// Jacobian σ(x) = ds/dx = ρ^{2/3}(s(x))/C₁.
    pub fn sigma_of_angle(&self, psi: f64) -> f64 {
        self.curve.radius_of_angle(psi).powf(2.0 / 3.0) / self.c1
    }
}

/// Maps a billiard state to chart coordinates: x = x(s),
/// l = y²/2 with y = 4 C₁ ρ(s)^{1/3} sin(v/2).
pub fn to_lazutkin(chart: &LazutkinChart, state: BilliardState) -> LazutkinState {
    let psi = chart.curve.tangent_angle(state.s);
    let rho = chart.curve.radius_of_angle(psi);
    let y = 4.0 * chart.c1 * rho.cbrt() * (0.5 * state.v).sin();
    LazutkinState {
        x: chart.x_of_angle(psi),
        l: 0.5 * y * y,
    }
}

/// Inverse chart map. Fails with `InversionFail` when l exceeds the chart's
/// validity (sin(v/2) would leave [0, 1]).
pub fn from_lazutkin(chart: &LazutkinChart, state: LazutkinState) -> Result<BilliardState> {
    let LazutkinState { x, l } = state;
    if l < 0.0 {
        return Err(Error::InversionFail { l });
    }
    let psi = chart.angle_of_x(x);
    let rho = chart.curve.radius_of_angle(psi);
    let arg = (2.0 * l).sqrt() / (4.0 * chart.c1 * rho.cbrt());
    if arg > 1.0 {
        return Err(Error::InversionFail { l });
    }
    Ok(BilliardState {
        s: chart.curve.arc_of_angle(psi),
        v: 2.0 * arg.asin(),
    })
}

/// The billiard map conjugated into the chart — exact, no series truncation.
/// Below `L_FLOOR` the l = 0 limit (the identity) is returned because the
/// reflection root-finder degenerates there.
pub fn lazutkin_map(chart: &LazutkinChart, state: LazutkinState) -> Result<LazutkinState> {
    if state.l < L_FLOOR {
        return Ok(state);
    }
    let b = from_lazutkin(chart, state)?;
    let next = billiard::reflect(&chart.curve, b)?;
    Ok(to_lazutkin(chart, next))
}

/// Generating function h̃(x, x⁺) = 4C₁² ∫ ρ^{2/3} dτ + 4C₁³ h(s, s⁺) of the
/// conjugated map (the first integral runs over the chart coordinate and
/// collapses to C₁ (s⁺ − s)), with all partials: −∂₁h̃ = l, ∂₂h̃ = l⁺.
pub fn tilde_h(chart: &LazutkinChart, x: f64, x_plus: f64) -> Result<GenJet> {
    let psi1 = chart.angle_of_x(x);
    let psi2 = chart.angle_of_x(x_plus);
    let s = chart.curve.arc_of_angle(psi1);
    let sp = chart.curve.arc_of_angle(psi2);
    let hjet = billiard::generating_h(&chart.curve, s, sp)?;
    let [rho1, drho1, _] = chart.curve.curvature_radius_jet(s);
    let [rho2, drho2, _] = chart.curve.curvature_radius_jet(hjet.s_plus);
    let c1 = chart.c1;
    let scale = 4.0 * c1 * c1 * c1;
    let sig1 = rho1.powf(2.0 / 3.0) / c1;
    let sig2 = rho2.powf(2.0 / 3.0) / c1;
    // dσ/dx = (2/3) ρ^{1/3} ρ′ / C₁².
    let dsig1 = 2.0 / 3.0 * rho1.cbrt() * drho1 / (c1 * c1);
    let dsig2 = 2.0 / 3.0 * rho2.cbrt() * drho2 / (c1 * c1);
    // ∂₁h − 1 = cos v − 1 and ∂₂h + 1 = 1 − cos v⁺, in cancellation-free form.
    let p1 = -2.0 * (0.5 * hjet.v).sin().powi(2);
    let p2 = 2.0 * (0.5 * hjet.v_plus).sin().powi(2);
    Ok(GenJet {
        value: scale * ((hjet.s_plus - s) - hjet.ell),
        d1: scale * sig1 * p1,
        d2: scale * sig2 * p2,
        d11: scale * (dsig1 * p1 + sig1 * sig1 * hjet.d11),
        d12: scale * sig1 * sig2 * hjet.d12,
        d22: scale * (dsig2 * p2 + sig2 * sig2 * hjet.d22),
    })
}

/// `tilde_h` as a [`GeneratingFn`], for use by the generic twist machinery.
#[derive(Debug, Clone, Copy)]
pub struct LazutkinGen<'a> {
    pub chart: &'a LazutkinChart,
}

impl GeneratingFn for LazutkinGen<'_> {
    fn jet(&self, x: f64, xp: f64) -> Result<GenJet> {
        tilde_h(self.chart, x, xp)
    }
}

/// Small-angle expansion coefficients of the billiard map at arc length s:
/// s⁺ = s + α₁v + α₂v² + α₃v³ + O(v⁴), v⁺ = v + β₂v² + β₃v³ + O(v⁴).
#[derive(Debug, Clone, Copy)]
pub struct ExpansionCoeffs {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub beta2: f64,
    pub beta3: f64,
}

/// Evaluates the expansion coefficients from the curvature-radius jet:
/// α₁ = 2ρ, α₂ = (4/3)ρρ′, α₃ = (2/3)ρ²ρ″ + (4/9)ρρ′²,
/// β₂ = −(2/3)ρ′, β₃ = −(2/3)ρρ″ + (4/9)ρ′².
pub fn expansion_coeffs(curve: &BoundaryCurve, s: f64) -> ExpansionCoeffs {
    let [rho, drho, ddrho] = curve.curvature_radius_jet(s);
    ExpansionCoeffs {
        alpha1: 2.0 * rho,
        alpha2: 4.0 / 3.0 * rho * drho,
        alpha3: 2.0 / 3.0 * rho * rho * ddrho + 4.0 / 9.0 * rho * drho * drho,
        beta2: -2.0 / 3.0 * drho,
        beta3: -2.0 / 3.0 * rho * ddrho + 4.0 / 9.0 * drho * drho,
    }
}

/// Residual noise floor below which expansion residuals are considered
/// exactly reproduced (dominated by root-finder/atan2 rounding).
const RESIDUAL_FLOOR: f64 = 1e-13;

/// Fitted remainder exponents of the truncated expansion. `None` slope with
/// the matching `exact` flag means every residual sat at the rounding floor.
#[derive(Debug, Clone)]
pub struct ExpansionOrderFit {
    pub s_slope: Option<FitLine>,
    pub v_slope: Option<FitLine>,
    pub s_exact: bool,
    pub v_exact: bool,
}

/// Compares the exact reflection against the truncated cubic expansion over
/// a decreasing angle sequence and fits the remainder order (expected ≥ 4).
pub fn verify_expansion_order(
    curve: &BoundaryCurve,
    s: f64,
    v_seq: &[f64],
) -> Result<ExpansionOrderFit> {
    let co = expansion_coeffs(curve, s);
    let mut res_s = Vec::with_capacity(v_seq.len());
    let mut res_v = Vec::with_capacity(v_seq.len());
    for &v in v_seq {
        let exact = billiard::reflect(curve, BilliardState { s, v })?;
        let s_series = s + co.alpha1 * v + co.alpha2 * v * v + co.alpha3 * v * v * v;
        let v_series = v + co.beta2 * v * v + co.beta3 * v * v * v;
        res_s.push((exact.s - s_series).abs());
        res_v.push((exact.v - v_series).abs());
    }
    let fit_one = |res: &[f64]| -> Result<(Option<FitLine>, bool)> {
        match loglog_slope(v_seq, res, RESIDUAL_FLOOR) {
            Ok(fit) => Ok((Some(fit), false)),
            Err(Error::FitUnstable { usable }) if usable == 0 => Ok((None, true)),
            Err(e) => Err(e),
        }
    };
    let (s_slope, s_exact) = fit_one(&res_s)?;
    let (v_slope, v_exact) = fit_one(&res_v)?;
    Ok(ExpansionOrderFit {
        s_slope,
        v_slope,
        s_exact,
        v_exact,
    })
}

/// Convenience: the geometric angle sequence v_k = 2^{−k}, k in [lo, hi].
pub fn geometric_angles(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|k| 2.0f64.powi(-(k as i32))).collect()
}

/// Independent check of the chart table: x(s) recomputed by adaptive
/// quadrature of C₁ ρ^{−2/3} in arc length.
pub fn x_by_quadrature(chart: &LazutkinChart, s: f64) -> Result<f64> {
    let f = |t: f64| chart.curve.radius_of_curvature(t).powf(-2.0 / 3.0);
    Ok(chart.c1 * adaptive_quad(&f, 0.0, s, 1e-12, 1e-16, 32)?)
}
