//! Generating-function tables of the suspension flow in mixed variables.
//!
//! The time-t map φᵗ of the suspended flow is encoded by a scalar w(X, l, t)
//! through x = X + ∂ₗw and L = l + ∂ₓw (final position, initial momentum);
//! w solves ∂ₜw = −H(X, l + ∂ₓw, t) with w = 0 at t = 0. This is the
//! representation in which the corner of the piecewise flow is smoothed:
//! generating functions may be averaged freely while the maps they generate
//! stay exactly symplectic. Up to the kinetic corner w is closed-form; beyond
//! it every node is computed from the flow's own straight characteristic —
//! speed, momentum and tangent data by implicit differentiation, and the
//! value by integrating ∂ₗw up from the wall {l = 0} — never by differencing
//! a neighboring table.

use crate::error::{Error, Result};
use crate::lazutkin::LazutkinState;
use crate::num::interp::{Table1, Table3, UniformAxis};
use crate::num::ode::{integrate_adaptive, OdeOptions};
use crate::suspension::hamiltonian::{
    deriv_integral, HamiltonianJet, PiecewiseData, SuspendedHamiltonian, KINETIC_COEFF,
};
use crate::suspension::lagrangian::{InterpolatingLagrangian, TwistKernel};
use crate::suspension::modified::KernelGrid;
use std::cell::RefCell;
use std::f64::consts::SQRT_2;

/// Grid sizes and momentum range for generating-function tables.
#[derive(Debug, Clone, Copy)]
pub struct WGridSpec {
    pub n_x: usize,
    pub n_l: usize,
    pub n_t: usize,
    /// Momentum below which the log axis is clamped (scaled fields freeze).
    pub l_floor: f64,
    /// Momentum ceiling of the tables.
    pub l_ceil: f64,
}

impl Default for WGridSpec {
    fn default() -> Self {
        WGridSpec {
            n_x: 48,
            n_l: 56,
            n_t: 32,
            l_floor: 1e-7,
            // Headroom above the default verification ceiling, so flows
            // started at the ceiling keep their momentum inside the tables.
            l_ceil: 1.25e-3,
        }
    }
}

impl WGridSpec {
    fn validate(&self) -> Result<()> {
        if self.n_x < 8 || self.n_l < 8 || self.n_t < 4 {
            return Err(Error::InvalidConfig {
                msg: format!(
                    "generating grid too small ({} × {} × {})",
                    self.n_x, self.n_l, self.n_t
                ),
            });
        }
        if !(self.l_floor > 0.0 && self.l_floor < self.l_ceil) {
            return Err(Error::InvalidConfig {
                msg: format!(
                    "generating grid needs 0 < l_floor < l_ceil, got [{:e}, {:e}]",
                    self.l_floor, self.l_ceil
                ),
            });
        }
        Ok(())
    }
}

/// Value and partial derivatives of the generating function at one point.
#[derive(Debug, Clone, Copy)]
pub struct WJet {
    pub w: f64,
    /// ∂ₗw = x − X, the backward displacement.
    pub wl: f64,
    /// ∂ₓw = L − l, the momentum increment.
    pub wx: f64,
    pub wll: f64,
    pub wxl: f64,
    pub wxx: f64,
}

/// Stored fields, scaled so each stays O(1) down to the wall.
#[derive(Debug, Clone)]
struct WTables {
    /// w / l^{3/2}
    val: Table3,
    /// ∂ₗw / l^{1/2}
    wl: Table3,
    /// ∂ₓw / l^{3/2}
    wx: Table3,
    /// ∂ₗₗw · l^{1/2}
    wll: Table3,
    /// ∂ₓ∂ₗw (raw; O(l) small)
    wxl: Table3,
    /// ∂ₓₓw (raw; O(l²) small)
    wxx: Table3,
}

/// Generating function w(X, l, t) of the suspension flow on a time window
/// [0, t_top]: closed-form kinetic up to the corner, tabulated beyond it.
#[derive(Debug, Clone)]
pub struct GeneratingW {
    tables: Option<WTables>,
    /// Time up to which the flow is a pure kinetic shear (closed forms).
    kin_top: f64,
    t_top: f64,
    l_floor: f64,
    l_ceil: f64,
}

impl GeneratingW {
    /// Top of the time window [0, t_top] this object covers.
    pub fn t_top(&self) -> f64 {
        self.t_top
    }

    fn locate(&self, l: f64, t: f64) -> Result<()> {
        if !(l >= 0.0) || !t.is_finite() || !(t >= 0.0) {
            return Err(Error::InvalidConfig {
                msg: format!("generating function queried at l = {l:e}, t = {t:e}"),
            });
        }
        if t > self.t_top * (1.0 + 1e-12) {
            return Err(Error::InvalidConfig {
                msg: format!(
                    "generating function queried at t = {t:e} beyond its window top {:e}",
                    self.t_top
                ),
            });
        }
        if t > self.kin_top && l > self.l_ceil * (1.0 + 1e-12) {
            return Err(Error::InvalidConfig {
                msg: format!(
                    "generating function queried at l = {l:e} above its ceiling {:e}",
                    self.l_ceil
                ),
            });
        }
        Ok(())
    }

    /// w at one point; defined for all l ≥ 0 (w ∝ l^{3/2} near the wall).
    pub fn value(&self, x: f64, l: f64, t: f64) -> Result<f64> {
        self.locate(l, t)?;
        if l == 0.0 {
            return Ok(0.0);
        }
        if t <= self.kin_top {
            return Ok(-KINETIC_COEFF * l * l.sqrt() * t);
        }
        let tb = self.tables.as_ref().expect("window beyond corner has tables");
        let lam = l.max(self.l_floor).ln();
        Ok(tb.val.eval(x, lam, t) * l * l.sqrt())
    }

    /// Value and partials at one point; needs l > 0 (∂ₗₗw ∝ l^{−1/2}).
    pub fn jet(&self, x: f64, l: f64, t: f64) -> Result<WJet> {
        self.locate(l, t)?;
        if l == 0.0 {
            return Err(Error::InvalidConfig {
                msg: "generating jet diverges at the wall l = 0; use value()".into(),
            });
        }
        let sq = l.sqrt();
        if t <= self.kin_top {
            return Ok(WJet {
                w: -KINETIC_COEFF * l * sq * t,
                wl: -SQRT_2 * sq * t,
                wx: 0.0,
                wll: -0.5 * SQRT_2 * t / sq,
                wxl: 0.0,
                wxx: 0.0,
            });
        }
        let tb = self.tables.as_ref().expect("window beyond corner has tables");
        let lam = l.max(self.l_floor).ln();
        Ok(WJet {
            w: tb.val.eval(x, lam, t) * l * sq,
            wl: tb.wl.eval(x, lam, t) * sq,
            wx: tb.wx.eval(x, lam, t) * l * sq,
            wll: tb.wll.eval(x, lam, t) / sq,
            wxl: tb.wxl.eval(x, lam, t),
            wxx: tb.wxx.eval(x, lam, t),
        })
    }
}

/// Builds the generating function of `h`'s flow on the window [0, t].
///
/// Supports the pure kinetic mode (any t > 0, all closed form) and the
/// piecewise suspension with t in (0, 2κ], whose window never reaches the
/// far corner. After tabulating, the map the tables generate is checked
/// against the flow itself; a discrepancy beyond the reconstruction gates
/// (1e-6 in position, 1e-5 relative in momentum) fails the build.
pub fn generating_w(
    h: &SuspendedHamiltonian,
    t: f64,
    spec: &WGridSpec,
) -> Result<GeneratingW> {
    spec.validate()?;
    if !t.is_finite() || !(t > 0.0) {
        return Err(Error::InvalidConfig {
            msg: format!("generating window top must be positive, got {t:e}"),
        });
    }
    if h.is_kinetic() {
        return Ok(GeneratingW {
            tables: None,
            kin_top: t,
            t_top: t,
            l_floor: spec.l_floor,
            l_ceil: spec.l_ceil,
        });
    }
    if !h.is_piecewise() {
        return Err(Error::InvalidConfig {
            msg: "generating tables are built from the kinetic or piecewise flow".into(),
        });
    }
    let p = h.piecewise_data().expect("piecewise mode has data");
    let kappa = p.kappa();
    if t > 2.0 * kappa {
        return Err(Error::InvalidConfig {
            msg: format!("generating window top {t:e} must stay within (0, {:e}]", 2.0 * kappa),
        });
    }
    let g = middle_tables(p, t, spec)?;
    if g.tables.is_some() {
        reconstruction_gate(h, &g, spec)?;
    }
    Ok(g)
}

/// Tabulates w for the piecewise flow on [0, t_top] (kinetic closed form up
/// to the corner, middle-characteristic data beyond it). No fidelity gate.
pub(crate) fn middle_tables(
    p: &PiecewiseData,
    t_top: f64,
    spec: &WGridSpec,
) -> Result<GeneratingW> {
    let kappa = p.kappa();
    if t_top <= kappa {
        return Ok(GeneratingW {
            tables: None,
            kin_top: t_top,
            t_top,
            l_floor: spec.l_floor,
            l_ceil: spec.l_ceil,
        });
    }
    let lag = p.lag();
    let lead = lag.kernel().lead();
    let ax = UniformAxis::periodic(0.0, 1.0, spec.n_x);
    let ay = UniformAxis::new(spec.l_floor.ln(), spec.l_ceil.ln(), spec.n_l);
    let az = UniformAxis::new(kappa, t_top, spec.n_t);
    let n = spec.n_x * spec.n_l * spec.n_t;
    let mut val = vec![0.0; n];
    let mut wl = vec![0.0; n];
    let mut wx = vec![0.0; n];
    let mut wll = vec![0.0; n];
    let mut wxl = vec![0.0; n];
    let mut wxx = vec![0.0; n];
    let idx = |i: usize, j: usize, k: usize| (i * spec.n_l + j) * spec.n_t + k;
    // Speed seeds scale like √l between neighboring momentum nodes.
    let seed_ratio = (0.5 * ay.h()).exp();
    let ls: Vec<f64> = (0..spec.n_l).map(|j| ay.node(j).exp()).collect();
    let qs: Vec<f64> = ls.iter().map(|l| l.sqrt()).collect();
    let v_lead = (2.0 / lead).sqrt();
    for i in 0..spec.n_x {
        let xx = ax.node(i);
        for k in 0..spec.n_t {
            let tau = p.tau(az.node(k));
            let mut seed: Option<f64> = None;
            let mut dv = vec![0.0; spec.n_l];
            for j in 0..spec.n_l {
                let l = ls[j];
                let sq = qs[j];
                let v = solve_speed(lag, xx, l, tau, seed)?;
                seed = Some(v * seed_ratio);
                // Integrand of the value integral in q = √l: 2q·(v − v_lead·q).
                dv[j] = 2.0 * sq * (v - v_lead * sq);
                let xk = xx - v * tau;
                // M(X − vτ, v, 0) = l defines v; differentiate implicitly.
                let g1 = lag.kernel().kernel(xk, v)?;
                let mx0 = deriv_integral(lag, xk, v, 0.0, |_| 1.0)?;
                let mxt = deriv_integral(lag, xx, v, tau, |_| 1.0)?;
                let phi_v = g1 - tau * mx0;
                let lb = lag.momentum(xx, v, tau)?;
                let s32 = l * sq;
                wl[idx(i, j, k)] = (-v * tau - SQRT_2 * sq * kappa) / sq;
                wx[idx(i, j, k)] = (lb - l) / s32;
                wll[idx(i, j, k)] = (-tau / phi_v - 0.5 * SQRT_2 * kappa / sq) * sq;
                wxl[idx(i, j, k)] = g1 / phi_v - 1.0;
                wxx[idx(i, j, k)] = mxt - g1 * mx0 / phi_v;
            }
            // w = ∫₀ˡ ∂ₗw dl′ = −τ∫₀ˡ v dl′ − (2√2/3)κ l^{3/2}; the leading
            // part of v integrates in closed form, the rest from node samples.
            let cum = cumulative_from_zero(&qs, &dv);
            for j in 0..spec.n_l {
                let s32 = ls[j] * qs[j];
                let vint = v_lead * (2.0 / 3.0) * s32 + cum[j];
                val[idx(i, j, k)] = (-tau * vint - KINETIC_COEFF * kappa * s32) / s32;
            }
        }
    }
    Ok(GeneratingW {
        tables: Some(WTables {
            val: Table3::new(ax, ay, az, val),
            wl: Table3::new(ax, ay, az, wl),
            wx: Table3::new(ax, ay, az, wx),
            wll: Table3::new(ax, ay, az, wll),
            wxl: Table3::new(ax, ay, az, wxl),
            wxx: Table3::new(ax, ay, az, wxx),
        }),
        kin_top: kappa,
        t_top,
        l_floor: spec.l_floor,
        l_ceil: spec.l_ceil,
    })
}

/// Jets and phase-space second derivatives of the Hamiltonian driving an
/// orbit-based table build (for flows with no exact composition rule).
pub(crate) struct OdeSource<'a> {
    pub(crate) jet: &'a dyn Fn(f64, f64, f64) -> Result<HamiltonianJet>,
    /// (∂ₓₓH, ∂ₓₗH, ∂ₗₗH) at a phase point.
    pub(crate) hessian: &'a dyn Fn(f64, f64, f64) -> Result<(f64, f64, f64)>,
}

/// Tabulates w on [0, t_top] for a flow that is a kinetic shear up to
/// `kin_top` and integrable only numerically beyond: orbits with their
/// variational tangents launch from every position node at each momentum,
/// the position map is inverted onto the output nodes, and the tangent
/// matrix yields the second derivatives (∂ₗₗw = −m₁₂/m₁₁, ∂ₓₗw = det M/m₁₁ − 1,
/// ∂ₓₓw = m₂₁/m₁₁). Values integrate ∂ₗw up from the wall as usual.
pub(crate) fn ode_tables(
    src: &OdeSource,
    kin_top: f64,
    t_top: f64,
    ode_tol: f64,
    spec: &WGridSpec,
) -> Result<GeneratingW> {
    if t_top <= kin_top {
        return Ok(GeneratingW {
            tables: None,
            kin_top: t_top,
            t_top,
            l_floor: spec.l_floor,
            l_ceil: spec.l_ceil,
        });
    }
    let ax = UniformAxis::periodic(0.0, 1.0, spec.n_x);
    let ay = UniformAxis::new(spec.l_floor.ln(), spec.l_ceil.ln(), spec.n_l);
    let az = UniformAxis::new(kin_top, t_top, spec.n_t);
    let n = spec.n_x * spec.n_l * spec.n_t;
    let mut val = vec![0.0; n];
    let mut wl = vec![0.0; n];
    let mut wx = vec![0.0; n];
    let mut wll = vec![0.0; n];
    let mut wxl = vec![0.0; n];
    let mut wxx = vec![0.0; n];
    let idx = |i: usize, j: usize, k: usize| (i * spec.n_l + j) * spec.n_t + k;
    let ls: Vec<f64> = (0..spec.n_l).map(|j| ay.node(j).exp()).collect();
    let qs: Vec<f64> = ls.iter().map(|l| l.sqrt()).collect();
    let opts = OdeOptions {
        rel_tol: ode_tol,
        ..OdeOptions::default()
    };
    let status: RefCell<Option<Error>> = RefCell::new(None);
    let rhs = |t: f64, y: &[f64; 6]| -> [f64; 6] {
        let fail = |e: Error| {
            status.borrow_mut().get_or_insert(e);
            [f64::NAN; 6]
        };
        let j = match (src.jet)(y[0], y[1], t) {
            Ok(j) => j,
            Err(e) => return fail(e),
        };
        let (hxx, hxl, hll) = match (src.hessian)(y[0], y[1], t) {
            Ok(h) => h,
            Err(e) => return fail(e),
        };
        [
            j.dl,
            -j.dx,
            hxl * y[2] + hll * y[4],
            hxl * y[3] + hll * y[5],
            -hxx * y[2] - hxl * y[4],
            -hxx * y[3] - hxl * y[5],
        ]
    };
    for (j, (&l, &sq)) in ls.iter().zip(&qs).enumerate() {
        let vk = SQRT_2 * sq;
        // One orbit per position node, launched from the exact kinetic
        // prefix: x = x₀ + √(2l)·kin_top, tangent M = [[1, t/√(2l)], [0, 1]].
        let mut ys: Vec<[f64; 6]> = (0..spec.n_x)
            .map(|s| [ax.node(s) + vk * kin_top, l, 1.0, kin_top / vk, 0.0, 1.0])
            .collect();
        for k in 0..spec.n_t {
            if k > 0 {
                for y in ys.iter_mut() {
                    let out =
                        integrate_adaptive::<6, _>(&rhs, az.node(k - 1), az.node(k), *y, &opts);
                    if let Some(e) = status.borrow_mut().take() {
                        return Err(e);
                    }
                    *y = out?;
                }
            }
            let table = |f: &dyn Fn(&[f64; 6], usize) -> f64| {
                Table1::new(
                    ax.clone(),
                    ys.iter().enumerate().map(|(s, y)| f(y, s)).collect(),
                )
            };
            let drift = table(&|y, s| y[0] - ax.node(s));
            let dmom = table(&|y, _| y[1] - l);
            let m11 = table(&|y, _| y[2]);
            let m12 = table(&|y, _| y[3]);
            let m21 = table(&|y, _| y[4]);
            let m22 = table(&|y, _| y[5]);
            for i in 0..spec.n_x {
                let xx = ax.node(i);
                // Invert x₀ ↦ x: the drift beyond −∂ₗw is a tiny contraction.
                let mut p = xx - drift.eval(xx);
                for _ in 0..6 {
                    p = xx - drift.eval(p);
                }
                let (a11, a12, a21, a22) =
                    (m11.eval(p), m12.eval(p), m21.eval(p), m22.eval(p));
                wl[idx(i, j, k)] = -drift.eval(p) / sq;
                wx[idx(i, j, k)] = dmom.eval(p) / (l * sq);
                wll[idx(i, j, k)] = -a12 / a11 * sq;
                wxl[idx(i, j, k)] = (a11 * a22 - a12 * a21) / a11 - 1.0;
                wxx[idx(i, j, k)] = a21 / a11;
            }
        }
    }
    // w = ∫₀ˡ ∂ₗw dl′ column by column, splitting off the kinetic part
    // −√2·√l′·t which integrates in closed form.
    for i in 0..spec.n_x {
        for k in 0..spec.n_t {
            let tk = az.node(k);
            let fs: Vec<f64> = (0..spec.n_l)
                .map(|j| 2.0 * qs[j] * (wl[idx(i, j, k)] * qs[j] + SQRT_2 * qs[j] * tk))
                .collect();
            let cum = cumulative_from_zero(&qs, &fs);
            for j in 0..spec.n_l {
                let s32 = ls[j] * qs[j];
                val[idx(i, j, k)] = (-KINETIC_COEFF * s32 * tk + cum[j]) / s32;
            }
        }
    }
    Ok(GeneratingW {
        tables: Some(WTables {
            val: Table3::new(ax.clone(), ay.clone(), az.clone(), val),
            wl: Table3::new(ax.clone(), ay.clone(), az.clone(), wl),
            wx: Table3::new(ax.clone(), ay.clone(), az.clone(), wx),
            wll: Table3::new(ax.clone(), ay.clone(), az.clone(), wll),
            wxl: Table3::new(ax.clone(), ay.clone(), az.clone(), wxl),
            wxx: Table3::new(ax, ay, az, wxx),
        }),
        kin_top,
        t_top,
        l_floor: spec.l_floor,
        l_ceil: spec.l_ceil,
    })
}

/// Launch speed of the straight middle characteristic arriving at position X
/// with initial momentum l at rescaled time τ: solves M(X − vτ, v, 0) = l.
fn solve_speed(
    lag: &InterpolatingLagrangian<KernelGrid>,
    x_new: f64,
    l: f64,
    tau: f64,
    seed: Option<f64>,
) -> Result<f64> {
    if l == 0.0 {
        return Ok(0.0);
    }
    let lead = lag.kernel().lead();
    let mut v = seed.unwrap_or((2.0 * l / lead).sqrt());
    // Momentum quadrature noise sits at the relative tolerance times l.
    let ftol = 1e-9 * l + f64::MIN_POSITIVE;
    let mut res = f64::NAN;
    for _ in 0..16 {
        let xk = x_new - v * tau;
        res = lag.momentum(xk, v, 0.0)? - l;
        if res.abs() <= ftol {
            return Ok(v);
        }
        // Dominant slope dM/dv = G; the −τ·∂ₓM term it drops is O(l²).
        let slope = lag.kernel().kernel(xk, v)?;
        let next = v - res / slope;
        if !(next > 0.0) || (next - v).abs() > 0.5 * v {
            break;
        }
        if next == v {
            return Ok(v);
        }
        v = next;
    }
    Err(Error::NoConvergence {
        iters: 16,
        residual: res,
    })
}

/// Cumulative integral ∫₀^{qs[j]} f dq of a smooth function with f(0) = 0
/// sampled at strictly increasing nodes: each cell integrates its local
/// Lagrange cubic with two-point Gauss (exact on cubics).
fn cumulative_from_zero(qs: &[f64], fs: &[f64]) -> Vec<f64> {
    let mut qe = Vec::with_capacity(qs.len() + 1);
    qe.push(0.0);
    qe.extend_from_slice(qs);
    let mut fe = Vec::with_capacity(fs.len() + 1);
    fe.push(0.0);
    fe.extend_from_slice(fs);
    let cubic = |s: usize, y: f64| -> f64 {
        let mut sum = 0.0;
        for a in 0..4 {
            let mut basis = 1.0;
            for b in 0..4 {
                if a != b {
                    basis *= (y - qe[s + b]) / (qe[s + a] - qe[s + b]);
                }
            }
            sum += basis * fe[s + a];
        }
        sum
    };
    let mut out = Vec::with_capacity(qs.len());
    let mut acc = 0.0;
    for m in 0..qs.len() {
        let s = m.saturating_sub(1).min(qe.len() - 4);
        let (a, b) = (qe[m], qe[m + 1]);
        let mid = 0.5 * (a + b);
        let off = 0.5 * (b - a) / 3.0f64.sqrt();
        acc += 0.5 * (b - a) * (cubic(s, mid - off) + cubic(s, mid + off));
        out.push(acc);
    }
    out
}

/// Verifies that the tabulated w reproduces the flow it encodes: for probe
/// states, x = X + ∂ₗw within 1e-6 and L = l + ∂ₓw within 1e-5 relative.
fn reconstruction_gate(
    h: &SuspendedHamiltonian,
    g: &GeneratingW,
    spec: &WGridSpec,
) -> Result<()> {
    const TOL_X: f64 = 1e-6;
    const TOL_L: f64 = 1e-5;
    let span = g.t_top - g.kin_top;
    for &tp in &[g.kin_top + 0.31 * span, g.t_top - 0.07 * span] {
        for m in 0..10 {
            let x0 = (0.618_033_988_749_895 * m as f64).fract();
            for &l in &[spec.l_ceil, 1e-1 * spec.l_ceil, 1e-2 * spec.l_ceil, 2e-3 * spec.l_ceil]
            {
                let s = h.flow(LazutkinState { x: x0, l }, 0.0, tp)?;
                let jet = g.jet(s.x, l, tp)?;
                let xerr = (s.x + jet.wl - x0 + 0.5).rem_euclid(1.0) - 0.5;
                if xerr.abs() > TOL_X {
                    return Err(Error::GridTooCoarse {
                        residual: xerr.abs(),
                        tol: TOL_X,
                    });
                }
                let lerr = (l + jet.wx - s.l).abs() / l.max(s.l);
                if lerr > TOL_L {
                    return Err(Error::GridTooCoarse {
                        residual: lerr,
                        tol: TOL_L,
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suspension::fixtures::OVAL;
    use crate::suspension::SuspensionConfig;
    use once_cell::sync::Lazy;

    static WGRID: Lazy<GeneratingW> = Lazy::new(|| {
        let (_, hat) = &*OVAL;
        generating_w(hat, 0.28, &WGridSpec::default()).unwrap()
    });

    #[test]
    fn kinetic_window_is_closed_form() {
        let cfg = SuspensionConfig::default();
        let h = SuspendedHamiltonian::kinetic(&cfg).unwrap();
        let g = generating_w(&h, 0.7, &WGridSpec::default()).unwrap();
        let (l, t) = (3e-4, 0.53);
        let expect = -KINETIC_COEFF * l * l.sqrt() * t;
        assert_eq!(g.value(0.3, l, t).unwrap(), expect);
        let jet = g.jet(0.9, l, t).unwrap();
        assert_eq!(jet.wl, -SQRT_2 * l.sqrt() * t);
        assert_eq!(jet.wx, 0.0);
        assert_eq!(jet.wll, -0.5 * SQRT_2 * t / l.sqrt());
        // The piecewise flow is the same shear before its corner.
        let (_, hat) = &*OVAL;
        let kappa = hat.config().kappa;
        let gp = generating_w(hat, 0.9 * kappa, &WGridSpec::default()).unwrap();
        let tp = 0.8 * kappa;
        let v = gp.value(0.11, 5e-4, tp).unwrap();
        assert_eq!(v, -KINETIC_COEFF * 5e-4f64 * (5e-4f64).sqrt() * tp);
    }

    #[test]
    fn wall_row_vanishes() {
        let g = &*WGRID;
        for &t in &[0.05, 0.2, 0.28] {
            assert_eq!(g.value(0.37, 0.0, t).unwrap(), 0.0);
        }
        assert!(g.jet(0.37, 0.0, 0.2).is_err());
    }

    #[test]
    fn tables_generate_the_flow_map() {
        let (_, hat) = &*OVAL;
        let g = &*WGRID;
        let mut worst_x = 0.0f64;
        let mut worst_l = 0.0f64;
        for m in 0..14 {
            let x0 = (0.37 + 0.618 * m as f64).fract();
            for &l in &[9e-4, 1e-4, 3e-6, 4e-7] {
                for &t in &[0.19, 0.242, 0.28] {
                    let s = hat.flow(LazutkinState { x: x0, l }, 0.0, t).unwrap();
                    let jet = g.jet(s.x, l, t).unwrap();
                    let dx = (s.x + jet.wl - x0 + 0.5).rem_euclid(1.0) - 0.5;
                    worst_x = worst_x.max(dx.abs());
                    worst_l = worst_l.max((l + jet.wx - s.l).abs() / l);
                }
            }
        }
        println!("generating map vs flow: x {worst_x:.3e}, rel l {worst_l:.3e}");
        assert!(worst_x < 1e-6, "position gap {worst_x:.3e}");
        assert!(worst_l < 1e-5, "momentum gap {worst_l:.3e}");
    }

    #[test]
    fn time_derivative_recovers_the_hamiltonian() {
        // ∂ₜw = −H(X, l + ∂ₓw, t): centered difference of the value tables
        // against the Hamiltonian itself, the identity that lets blended
        // generating functions rebuild their Hamiltonian.
        let (_, hat) = &*OVAL;
        let g = &*WGRID;
        let e = 2e-4;
        let mut worst = 0.0f64;
        for m in 0..8 {
            let x = (0.21 + 0.618 * m as f64).fract();
            for &l in &[8e-4, 5e-5, 2e-6] {
                for &t in &[0.18, 0.231, 0.27] {
                    let wp = g.value(x, l, t + e).unwrap();
                    let wm = g.value(x, l, t - e).unwrap();
                    let jet = g.jet(x, l, t).unwrap();
                    let h = hat.jet(x, l + jet.wx, t).unwrap().h;
                    let gap = ((wp - wm) / (2.0 * e) + h).abs() / h;
                    worst = worst.max(gap);
                }
            }
        }
        println!("dw/dt vs -H: rel {worst:.3e}");
        assert!(worst < 1e-5, "connection gap {worst:.3e}");
    }

    #[test]
    fn corner_junction_is_continuous() {
        let g = &*WGRID;
        let kappa = 0.15;
        let (x, l) = (0.66, 2e-4);
        let below = g.jet(x, l, kappa - 1e-9).unwrap();
        let above = g.jet(x, l, kappa + 1e-9).unwrap();
        let s32 = l * l.sqrt();
        assert!((below.w - above.w).abs() < 1e-8 * s32);
        assert!((below.wl - above.wl).abs() < 1e-8 * l.sqrt());
        // The corner node solves M = l only to the speed solver's ftol.
        assert!((below.wx - above.wx).abs() < 3e-9 * l);
        assert!((below.wll - above.wll).abs() < 1e-8 / l.sqrt());
    }

    #[test]
    fn momentum_ceiling_and_window_top_are_enforced() {
        let g = &*WGRID;
        assert!(g.value(0.5, 2e-3, 0.2).is_err());
        assert!(g.value(0.5, 1e-4, 0.31).is_err());
        // Above the ceiling but still in the kinetic lead-in is exact.
        assert!(g.value(0.5, 2e-3, 0.1).is_ok());
        let (_, hat) = &*OVAL;
        assert!(generating_w(hat, 0.5, &WGridSpec::default()).is_err());
    }
}
