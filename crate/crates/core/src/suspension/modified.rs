//! Shear conjugation of the cutoff twist map and the generating function of
//! the conjugated map.
//!
//! The momentum shear ψ^κ: (x, l) ↦ (x + κ√(2l), l) is generated by
//! κ·(X−x)³/(6κ³), so splitting the suspension's outer kinetic segments off
//! the map leaves the "modified" middle map ψ^{−κ} ∘ φ ∘ ψ^{−κ}. Its
//! generating function is assembled by composing the three pieces through
//! their matched intermediate points; first partials are the momenta at the
//! endpoints and second partials come from the composed Jacobian.

use super::transition::CutoffGen;
use crate::error::{Error, Result};
use crate::genfn::{solve_twist, GenJet, GeneratingFn};
use crate::lazutkin::{lazutkin_map, LazutkinChart, LazutkinState};
use crate::num::interp::{Table2, UniformAxis};
use crate::num::rootfind::{bracketed_newton, RootError};
use crate::suspension::lagrangian::TwistKernel;
use std::cell::RefCell;
use std::f64::consts::PI;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Momentum shear ψ^κ: (x, l) ↦ (x + κ√(2l), l).
pub fn shear(state: LazutkinState, kappa: f64) -> LazutkinState {
    LazutkinState {
        x: state.x + kappa * (2.0 * state.l).sqrt(),
        l: state.l,
    }
}

/// Inverse shear ψ^{−κ}.
pub fn shear_inverse(state: LazutkinState, kappa: f64) -> LazutkinState {
    shear(state, -kappa)
}

/// The map the middle time segment of the suspension must reproduce:
/// ψ^{−κ} ∘ (chart map) ∘ ψ^{−κ}.
pub fn modified_map(
    chart: &LazutkinChart,
    state: LazutkinState,
    kappa: f64,
) -> Result<LazutkinState> {
    let mid = lazutkin_map(chart, shear_inverse(state, kappa))?;
    Ok(shear_inverse(mid, kappa))
}

/// Action the inverse shear contributes to a composed generating function.
fn shear_action(l: f64, kappa: f64) -> f64 {
    -SQRT2 * kappa / 3.0 * l * l.sqrt()
}

/// Generating function of ψ^{−κ} ∘ (cutoff map) ∘ ψ^{−κ}.
#[derive(Debug, Clone)]
pub struct ModifiedGen<'a> {
    cut: CutoffGen<'a>,
    kappa: f64,
}

/// Relative tolerance of the inner cutoff twist solves.
const INNER_REL: f64 = 1e-12;

/// Everything known about the composition at one momentum.
struct Composition {
    x1: f64,
    x2: f64,
    l2: f64,
    x_out: f64,
}

/// Warm-start data carried between neighbouring jet solves.
///
/// Grid builds sweep the gap upward along one position row; scaling the
/// previous solution by the gap ratio (momentum quadratically, chord gap
/// linearly) lands within a percent of the next solution, which collapses
/// both root solves to a couple of iterations.
#[derive(Debug, Clone, Copy)]
pub struct JetSeed {
    l_star: f64,
    gap: f64,
}

impl JetSeed {
    /// Transports the seed to a gap `ratio` times the one it was solved at.
    pub fn scaled(&self, ratio: f64) -> JetSeed {
        JetSeed {
            l_star: self.l_star * ratio * ratio,
            gap: self.gap * ratio,
        }
    }
}

impl<'a> ModifiedGen<'a> {
    pub fn new(cut: CutoffGen<'a>, kappa: f64) -> Self {
        Self { cut, kappa }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn cut(&self) -> &CutoffGen<'a> {
        &self.cut
    }

    /// Leading coefficient of the kernel: G(a, u) = u/(1−2κ)² + O(u³).
    pub fn lead(&self) -> f64 {
        let d = 1.0 - 2.0 * self.kappa;
        1.0 / (d * d)
    }

    /// Runs the composition forward from (x, l*), seeding the inner twist
    /// solve with an estimate of the cutoff-map chord gap.
    fn forward(&self, x: f64, l_star: f64, gap_init: f64) -> Result<Composition> {
        let x1 = x - self.kappa * (2.0 * l_star).sqrt();
        let (x2, l2) = solve_twist(&self.cut, x1, l_star, gap_init, INNER_REL)?;
        let x_out = x2 - self.kappa * (2.0 * l2).sqrt();
        Ok(Composition { x1, x2, l2, x_out })
    }

    /// Newton solve of the cutoff twist from a trusted chord seed; returns
    /// the landing point and the jet there, or None if the seed wanders.
    fn cut_newton(&self, x1: f64, l: f64, gap_init: f64) -> Result<Option<(f64, GenJet)>> {
        let ftol = INNER_REL * l;
        let mut gap = gap_init;
        for _ in 0..12 {
            let jc = self.cut.jet(x1, x1 + gap)?;
            let r = -jc.d1 - l;
            if r.abs() <= ftol {
                return Ok(Some((x1 + gap, jc)));
            }
            // dr/dgap = −∂₁₂h > 0.
            let next = gap + r / jc.d12;
            if !(next > 0.0) || (next - gap).abs() > 0.5 * gap {
                return Ok(None);
            }
            gap = next;
        }
        Ok(None)
    }

    /// Newton solve of the whole composition from a trusted warm start;
    /// returns None (so the caller can fall back to bracketing) if either
    /// level stops trusting its seed.
    fn jet_newton(&self, x: f64, xp: f64, s: JetSeed) -> Result<Option<(GenJet, JetSeed)>> {
        let delta = xp - x;
        let ftol = outer_ftol(delta);
        let mut l = s.l_star;
        let mut gap = s.gap;
        for _ in 0..16 {
            let x1 = x - self.kappa * (2.0 * l).sqrt();
            let Some((x2, jc)) = self.cut_newton(x1, l, gap)? else {
                return Ok(None);
            };
            let l2 = jc.d2;
            let x_out = x2 - self.kappa * (2.0 * l2).sqrt();
            let j = self.jacobian(&jc, l, l2);
            let r = x_out - xp;
            if r.abs() <= ftol {
                let value = shear_action(l, self.kappa) + jc.value + shear_action(l2, self.kappa);
                let jet = GenJet {
                    value,
                    d1: -l,
                    d2: l2,
                    d11: j[0][0] / j[0][1],
                    d12: -1.0 / j[0][1],
                    d22: j[1][1] / j[0][1],
                };
                return Ok(Some((jet, JetSeed { l_star: l, gap: x2 - x1 })));
            }
            let next = l - r / j[0][1];
            if !(next > 0.0) || (next - l).abs() > 0.5 * l {
                return Ok(None);
            }
            gap *= (next / l).sqrt();
            l = next;
        }
        Ok(None)
    }

    /// Jacobian ∂(X, l⁺)/∂(x, l) of the composition, given the cutoff jet at
    /// the solved intermediate chord.
    fn jacobian(&self, jc: &GenJet, l_star: f64, l2: f64) -> [[f64; 2]; 2] {
        // Twist-map block from the cutoff generating function.
        let dxdx = -jc.d11 / jc.d12;
        let dxdl = -1.0 / jc.d12;
        let c = [[dxdx, dxdl], [jc.d12 + jc.d22 * dxdx, jc.d22 * dxdl]];
        // Inverse-shear blocks before and after.
        let s_in = -self.kappa / (2.0 * l_star).sqrt();
        let s_out = -self.kappa / (2.0 * l2).sqrt();
        // J = Jψ(l2) · C · Jψ(l*), with Jψ = [[1, s], [0, 1]].
        let m00 = c[0][0];
        let m01 = c[0][0] * s_in + c[0][1];
        let m10 = c[1][0];
        let m11 = c[1][0] * s_in + c[1][1];
        [[m00 + s_out * m10, m01 + s_out * m11], [m10, m11]]
    }

    /// Full jet plus the solved warm-start state, for sweep-style callers.
    pub fn jet_with_seed(&self, x: f64, xp: f64, seed: Option<JetSeed>) -> Result<(GenJet, JetSeed)> {
        let delta = xp - x;
        if delta <= 0.0 {
            return Err(Error::CoincidentPoints { gap: delta.abs() });
        }
        if let Some(s) = seed {
            if s.l_star > 0.0 && s.gap > 0.0 {
                if let Some(out) = self.jet_newton(x, xp, s)? {
                    return Ok(out);
                }
            }
        }
        // No (trustworthy) seed: start from the small-gap asymptotics
        // X − x ≈ (1−2κ)√(2l*) and bracket the momentum in octaves.
        let lead = self.lead();
        let init = 0.5 * delta * delta * lead;
        let gap_for = |l: f64| (2.0 * l).sqrt();
        let residual = |l: f64| -> Result<(f64, Composition)> {
            let comp = self.forward(x, l, gap_for(l))?;
            Ok((comp.x_out - xp, comp))
        };
        let mut lo = init;
        let mut guard = 0;
        while residual(lo)?.0 > 0.0 {
            lo *= 0.5;
            guard += 1;
            if guard > 200 {
                return Err(Error::InversionFail { l: init });
            }
        }
        let mut hi = (2.0 * lo).max(init);
        guard = 0;
        while residual(hi)?.0 < 0.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(Error::InversionFail { l: init });
            }
        }
        let status: RefCell<Option<Error>> = RefCell::new(None);
        let f = |l: f64| -> (f64, f64) {
            let pair = residual(l).and_then(|(r, comp)| {
                let jc = self.cut.jet(comp.x1, comp.x2)?;
                let j = self.jacobian(&jc, l, comp.l2);
                Ok((r, j[0][1]))
            });
            match pair {
                Ok(p) => p,
                Err(e) => {
                    status.borrow_mut().get_or_insert(e);
                    (f64::NAN, f64::NAN)
                }
            }
        };
        let root = bracketed_newton(f, lo, hi, 0.0, outer_ftol(delta), 200).map_err(|e| match e {
            RootError::NoBracket => Error::InversionFail { l: init },
            RootError::NoConvergence => Error::NoConvergence {
                iters: 200,
                residual: f64::NAN,
            },
        });
        if let Some(e) = status.into_inner() {
            return Err(e);
        }
        let l_star = root?;
        let comp = self.forward(x, l_star, gap_for(l_star))?;
        let jc = self.cut.jet(comp.x1, comp.x2)?;
        let j = self.jacobian(&jc, l_star, comp.l2);
        let value =
            shear_action(l_star, self.kappa) + jc.value + shear_action(comp.l2, self.kappa);
        let jet = GenJet {
            value,
            d1: -l_star,
            d2: comp.l2,
            d11: j[0][0] / j[0][1],
            d12: -1.0 / j[0][1],
            d22: j[1][1] / j[0][1],
        };
        let out_seed = JetSeed {
            l_star,
            gap: comp.x2 - comp.x1,
        };
        Ok((jet, out_seed))
    }
}

/// Tolerance on the landing position: the inner momentum solve leaves the
/// endpoint fuzzy at a few times 1e−12 of the chord, plus an ulp of x.
fn outer_ftol(delta: f64) -> f64 {
    5e-12 * delta + 1e-15
}

impl GeneratingFn for ModifiedGen<'_> {
    fn jet(&self, x: f64, xp: f64) -> Result<GenJet> {
        self.jet_with_seed(x, xp, None).map(|(jet, _)| jet)
    }
}

/// Grid of the modified map's twist kernel G(a, u) = −∂₁₂h(a, a + u).
///
/// The kernel is stored as the cubic-scaled residual
/// r(a, ln u) = (G − u/(1−2κ)²) / u³, which stays bounded and smooth down to
/// u → 0 because the composed generating function carries no quartic term;
/// reconstruction is then relatively accurate at every gap. Below the grid
/// floor the residual freezes at its edge value (an O(u²) relative effect);
/// queries above the ceiling are refused.
#[derive(Debug, Clone)]
pub struct KernelGrid {
    table: Table2,
    deriv: Table2,
    lead: f64,
    u_min: f64,
    u_max: f64,
    mirrored: bool,
}

impl KernelGrid {
    /// Samples the kernel of `gen` on `n_a × n_u` nodes (position periodic on
    /// [0,1), gap log-spaced on [u_min, u_max]).
    pub fn build(
        gen: &ModifiedGen,
        n_a: usize,
        n_u: usize,
        u_min: f64,
        u_max: f64,
    ) -> Result<KernelGrid> {
        let ax = UniformAxis::periodic(0.0, 1.0, n_a);
        let ay = UniformAxis::new(u_min.ln(), u_max.ln(), n_u);
        let lead = gen.lead();
        let step_ratio = ((u_max / u_min).ln() / (n_u - 1) as f64).exp();
        let mut data = Vec::with_capacity(n_a * n_u);
        // Sweep each row upward in gap, warm-starting every solve from its
        // predecessor; rows start from the previous row's bottom solution.
        let mut row_start: Option<JetSeed> = None;
        for i in 0..n_a {
            let a = ax.node(i);
            let mut seed = row_start;
            for j in 0..n_u {
                let u = ay.node(j).exp();
                let (jet, solved) = gen.jet_with_seed(a, a + u, seed)?;
                if j == 0 {
                    row_start = Some(solved);
                }
                seed = Some(solved.scaled(step_ratio));
                let g = -jet.d12;
                data.push((g - u * lead) / (u * u * u));
            }
        }
        // Differentiate the residual along the periodic position axis with
        // the trigonometric differentiation matrix. A piecewise interpolant's
        // own derivative is discontinuous at every cell edge and exposes a
        // grid-period sawtooth; a separately stored derivative table keeps
        // ∂ₐr as smooth between nodes as r itself.
        let mut weights = vec![0.0; n_a];
        for (k, w) in weights.iter_mut().enumerate().skip(1) {
            let phase = if k % 2 == 0 { PI } else { -PI };
            let arg = PI * k as f64 / n_a as f64;
            *w = if n_a % 2 == 0 {
                phase * arg.cos() / arg.sin()
            } else {
                phase / arg.sin()
            };
        }
        let mut ddata = vec![0.0; n_a * n_u];
        for i in 0..n_a {
            for (k, &w) in weights.iter().enumerate().skip(1) {
                let m = (i + n_a - k) % n_a;
                for j in 0..n_u {
                    ddata[i * n_u + j] += w * data[m * n_u + j];
                }
            }
        }
        Ok(KernelGrid {
            table: Table2::new(ax, ay, data),
            deriv: Table2::new(ax, ay, ddata),
            lead,
            u_min,
            u_max,
            mirrored: false,
        })
    }

    /// The same kernel read in time-reversed orientation:
    /// G_m(a, u) = G(−a−u, u), the kernel of h(x, X) ↦ h(−X, −x).
    pub fn mirrored(&self) -> KernelGrid {
        let mut k = self.clone();
        k.mirrored = !k.mirrored;
        k
    }

    pub fn lead(&self) -> f64 {
        self.lead
    }

    /// Correction G(a, u) − u·lead = u³·r(a, ln u) beyond the kernel's linear
    /// lead, read off the stored table directly (no cancelling subtraction).
    pub fn kernel_correction(&self, a: f64, u: f64) -> Result<f64> {
        if u == 0.0 {
            return Ok(0.0);
        }
        if u < 0.0 {
            return Err(Error::CoincidentPoints { gap: u.abs() });
        }
        if u > self.u_max {
            return Err(Error::InvalidConfig {
                msg: format!(
                    "kernel grid queried at gap {u:.3e} above ceiling {:.3e}",
                    self.u_max
                ),
            });
        }
        let a = if self.mirrored { -a - u } else { a };
        let lam = u.max(self.u_min).ln();
        Ok(u * u * u * self.table.eval(a, lam))
    }

    /// Position derivative ∂ₐG(a, u) of the kernel; the linear leading term
    /// carries no position dependence, so this is u³∂ₐr, read from the
    /// spectrally differentiated residual table.
    pub fn kernel_deriv(&self, a: f64, u: f64) -> Result<f64> {
        if u == 0.0 {
            return Ok(0.0);
        }
        if u < 0.0 {
            return Err(Error::CoincidentPoints { gap: u.abs() });
        }
        if u > self.u_max {
            return Err(Error::InvalidConfig {
                msg: format!(
                    "kernel grid queried at gap {u:.3e} above ceiling {:.3e}",
                    self.u_max
                ),
            });
        }
        let (a, sign) = if self.mirrored { (-a - u, -1.0) } else { (a, 1.0) };
        let lam = u.max(self.u_min).ln();
        let ra = self.deriv.eval(a, lam);
        Ok(sign * u * u * u * ra)
    }

    /// η values in (0, v) where the table argument of a kernel read along the
    /// path a = x − ηt crosses a position-cell edge. The interpolants are
    /// only C⁰ there, so quadratures split at these points to keep every
    /// panel smooth.
    pub fn deriv_seams(&self, x: f64, v: f64, t: f64) -> Vec<f64> {
        // Table argument along the path: c0 + c1·η.
        let (c0, c1) = if self.mirrored {
            (-x, t - 1.0)
        } else {
            (x, -t)
        };
        let mut out = Vec::new();
        if c1 != 0.0 {
            let ha = self.table.ax.h();
            let (lo, hi) = if c1 > 0.0 {
                (c0, c0 + c1 * v)
            } else {
                (c0 + c1 * v, c0)
            };
            let mut m = (lo / ha).ceil();
            while m * ha <= hi {
                let eta = (m * ha - c0) / c1;
                if eta > 0.0 && eta < v {
                    out.push(eta);
                }
                m += 1.0;
            }
            out.sort_by(f64::total_cmp);
        }
        out
    }
}

impl TwistKernel for KernelGrid {
    fn kernel(&self, a: f64, u: f64) -> Result<f64> {
        // G vanishes linearly on the diagonal; extend by continuity so the
        // Legendre bracket may probe v = 0.
        if u == 0.0 {
            return Ok(0.0);
        }
        if u < 0.0 {
            return Err(Error::CoincidentPoints { gap: u.abs() });
        }
        if u > self.u_max {
            return Err(Error::InvalidConfig {
                msg: format!("kernel grid queried at gap {u:.3e} above ceiling {:.3e}", self.u_max),
            });
        }
        let a = if self.mirrored { -a - u } else { a };
        let lam = u.max(self.u_min).ln();
        let r = self.table.eval(a, lam);
        Ok(u * self.lead + u * u * u * r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{build_curve, RadiusProfile};
    use crate::lazutkin::build_chart;
    use crate::suspension::transition::cutoff_generating;

    fn oval_chart() -> LazutkinChart {
        let curve = build_curve(&RadiusProfile::from_cos(&[1.0, 0.0, 0.3])).unwrap();
        build_chart(&curve).unwrap()
    }

    #[test]
    fn shear_round_trip_is_identity() {
        let s = LazutkinState { x: 0.37, l: 2e-4 };
        let back = shear_inverse(shear(s, 0.15), 0.15);
        assert!((back.x - s.x).abs() < 1e-16);
        assert_eq!(back.l, s.l);
    }

    #[test]
    fn zero_shear_reduces_to_the_cutoff_function() {
        let chart = oval_chart();
        let cut = cutoff_generating(&chart, 0.05).unwrap();
        let gen = ModifiedGen::new(cut.clone(), 0.0);
        for &gap in &[1e-3, 1e-2, 0.04] {
            let a = gen.jet(0.3, 0.3 + gap).unwrap();
            let b = cut.jet(0.3, 0.3 + gap).unwrap();
            // The endpoint solve lands within one ulp of X; the cutoff value
            // itself jitters by ~2e-8 relative under a one-ulp shift at the
            // smallest gap, so the value bound is absolute.
            assert!((a.value - b.value).abs() < 1e-9);
            assert!((a.d1 - b.d1).abs() < 1e-9 * b.d1.abs());
            assert!((a.d2 - b.d2).abs() < 1e-9 * b.d2.abs());
            assert!((a.d11 - b.d11).abs() < 1e-7 * b.d11.abs());
            assert!((a.d12 - b.d12).abs() < 1e-7 * b.d12.abs());
            assert!((a.d22 - b.d22).abs() < 1e-7 * b.d22.abs());
        }
    }

    #[test]
    fn first_partials_reproduce_the_modified_map() {
        let chart = oval_chart();
        let cut = cutoff_generating(&chart, 0.05).unwrap();
        let kappa = 0.15;
        let gen = ModifiedGen::new(cut, kappa);
        for &l in &[1e-6, 1e-4, 1e-3] {
            for &x in &[0.05, 0.33, 0.71] {
                let state = LazutkinState { x, l };
                let image = modified_map(&chart, state, kappa).unwrap();
                let jet = gen.jet(x, image.x).unwrap();
                assert!((-jet.d1 - l).abs() < 1e-7 * l, "l mismatch at l={l}");
                assert!((jet.d2 - image.l).abs() < 1e-7 * image.l, "L mismatch");
            }
        }
    }

    #[test]
    fn five_quantities_vanish_toward_the_diagonal() {
        let chart = oval_chart();
        let cut = cutoff_generating(&chart, 0.05).unwrap();
        let gen = ModifiedGen::new(cut, 0.15);
        let mut prev = f64::INFINITY;
        for k in (6..=18).step_by(3) {
            let gap = 2.0f64.powi(-k);
            let jet = gen.jet(0.3, 0.3 + gap).unwrap();
            let size = (-jet.d1)
                .abs()
                .max(jet.d2.abs())
                .max(jet.d11.abs())
                .max(jet.d12.abs())
                .max(jet.d22.abs());
            assert!(size < prev, "quantities must shrink with the gap");
            prev = size;
        }
        let tiny = gen.jet(0.3, 0.3 + 1e-6).unwrap();
        assert!(tiny.d12.abs() < 1e-5);
    }

    #[test]
    fn second_partials_match_finite_differences() {
        let chart = oval_chart();
        let cut = cutoff_generating(&chart, 0.05).unwrap();
        let gen = ModifiedGen::new(cut, 0.15);
        let (x, xp) = (0.42, 0.42 + 0.012);
        let jet = gen.jet(x, xp).unwrap();
        let h = 1e-5;
        let d1p = gen.jet(x + h, xp).unwrap().d1;
        let d1m = gen.jet(x - h, xp).unwrap().d1;
        assert!(((d1p - d1m) / (2.0 * h) - jet.d11).abs() < 1e-5 * jet.d11.abs());
        let d2p = gen.jet(x + h, xp).unwrap().d2;
        let d2m = gen.jet(x - h, xp).unwrap().d2;
        assert!(((d2p - d2m) / (2.0 * h) - jet.d12).abs() < 1e-5 * jet.d12.abs());
        let d2pp = gen.jet(x, xp + h).unwrap().d2;
        let d2pm = gen.jet(x, xp - h).unwrap().d2;
        assert!(((d2pp - d2pm) / (2.0 * h) - jet.d22).abs() < 1e-5 * jet.d22.abs());
        // Cross-check the mixed partial from the other slot.
        let d1pp = gen.jet(x, xp + h).unwrap().d1;
        let d1pm = gen.jet(x, xp - h).unwrap().d1;
        assert!(((d1pp - d1pm) / (2.0 * h) - jet.d12).abs() < 1e-5 * jet.d12.abs());
    }

    #[test]
    fn kernel_grid_matches_direct_kernel() {
        let chart = oval_chart();
        let cut = cutoff_generating(&chart, 0.05).unwrap();
        let gen = ModifiedGen::new(cut, 0.15);
        let grid = KernelGrid::build(&gen, 96, 176, 1e-4, 0.08).unwrap();
        for &u in &[3e-4, 2.7e-3, 0.011, 0.05] {
            for &a in &[0.13, 0.55, 0.92] {
                let direct = -gen.jet(a, a + u).unwrap().d12;
                let gridded = grid.kernel(a, u).unwrap();
                assert!(
                    (gridded - direct).abs() < 1e-5 * direct,
                    "kernel mismatch at a={a}, u={u}: {gridded} vs {direct}"
                );
            }
        }
        // Below the floor the reconstruction keeps its leading behavior.
        let small = grid.kernel(0.4, 1e-6).unwrap();
        assert!((small - 1e-6 * gen.lead()).abs() < 1e-3 * small);
        // The derivative table tracks the directly differenced kernel.
        let e = 1e-3;
        let u = 0.02;
        for &a in &[0.13, 0.55, 0.92] {
            let fd = (-gen.jet(a + e, a + e + u).unwrap().d12
                + gen.jet(a - e, a - e + u).unwrap().d12)
                / (2.0 * e);
            let gridded = grid.kernel_deriv(a, u).unwrap();
            assert!(
                (gridded - fd).abs() < 5e-2 * fd.abs().max(1e-6),
                "kernel derivative mismatch at a={a}: {gridded} vs {fd}"
            );
        }
    }

    #[test]
    fn mirrored_kernel_reads_reflected_arguments() {
        let chart = oval_chart();
        let cut = cutoff_generating(&chart, 0.05).unwrap();
        let gen = ModifiedGen::new(cut, 0.15);
        let grid = KernelGrid::build(&gen, 32, 80, 1e-4, 0.08).unwrap();
        let mir = grid.mirrored();
        let (a, u) = (0.27, 0.013);
        let left = mir.kernel(a, u).unwrap();
        let right = grid.kernel(-a - u, u).unwrap();
        assert_eq!(left, right);
        let dleft = mir.kernel_deriv(a, u).unwrap();
        let dright = grid.kernel_deriv(-a - u, u).unwrap();
        assert_eq!(dleft, -dright);
    }

    #[test]
    fn kernel_grid_refuses_gap_above_ceiling() {
        let chart = oval_chart();
        let cut = cutoff_generating(&chart, 0.05).unwrap();
        let gen = ModifiedGen::new(cut, 0.15);
        let grid = KernelGrid::build(&gen, 16, 60, 1e-4, 0.05).unwrap();
        assert!(matches!(
            grid.kernel(0.2, 0.1),
            Err(Error::InvalidConfig { .. })
        ));
    }
}
