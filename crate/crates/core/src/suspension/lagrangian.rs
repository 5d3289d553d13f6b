//! The interpolating Lagrangian of a twist map and its Legendre transform.
//!
//! For a generating function h with twist kernel G(a, u) = −∂₁₂h(a, a + u)
//! the Lagrangian
//!
//!   L(x, v, t) = ∫₀ᵛ (v − η) G(x − ηt, η) dη
//!
//! has exactly straight extremals x(t) = x₀ + v t, carries momentum
//! L_v(x, v, t) = ∫₀ᵛ G(x − ηt, η) dη along them, and its time-1 extremal
//! flow reproduces the twist map of h. The Hamiltonian side comes from the
//! Legendre transform in v, which is monotone because L_vv = G > 0.

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::genfn::GeneratingFn;
use crate::num::quadrature::adaptive_quad;
use crate::num::rootfind::{bracketed_newton, RootError};

/// Twist kernel G(a, u) = −∂₁₂h(a, a + u) of a generating function, the only
/// piece of h the Lagrangian machinery consumes.
pub trait TwistKernel {
    fn kernel(&self, a: f64, u: f64) -> Result<f64>;
}

impl<G: GeneratingFn> TwistKernel for G {
    fn kernel(&self, a: f64, u: f64) -> Result<f64> {
        Ok(-self.jet(a, a + u)?.d12)
    }
}

const QUAD_DEPTH: u32 = 20;
const LEGENDRE_REL: f64 = 1e-12;

/// Time-interpolating Lagrangian over a twist kernel.
#[derive(Debug, Clone)]
pub struct InterpolatingLagrangian<K: TwistKernel> {
    kernel: K,
    quad_rel: f64,
}

impl<K: TwistKernel> InterpolatingLagrangian<K> {
    pub fn new(kernel: K) -> Self {
        Self::with_tolerance(kernel, 1e-10)
    }

    pub fn with_tolerance(kernel: K, quad_rel: f64) -> Self {
        Self { kernel, quad_rel }
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    /// Relative tolerance of the velocity quadratures.
    pub fn quad_tolerance(&self) -> f64 {
        self.quad_rel
    }

    /// Integrates `f(η)·G(x − ηt, η)` over η ∈ [0, v], surfacing any kernel
    /// error raised inside the quadrature.
    fn quad<F: Fn(f64) -> f64>(&self, x: f64, v: f64, t: f64, f: F) -> Result<f64> {
        if v == 0.0 {
            return Ok(0.0);
        }
        let status: RefCell<Option<Error>> = RefCell::new(None);
        let integrand = |eta: f64| -> f64 {
            match self.kernel.kernel(x - eta * t, eta) {
                Ok(g) => f(eta) * g,
                Err(e) => {
                    status.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let val = adaptive_quad(&integrand, 0.0, v, self.quad_rel, 0.0, QUAD_DEPTH);
        if let Some(e) = status.into_inner() {
            return Err(e);
        }
        val
    }

    /// L(x, v, t).
    pub fn value(&self, x: f64, v: f64, t: f64) -> Result<f64> {
        self.quad(x, v, t, |eta| v - eta)
    }

    /// Momentum L_v(x, v, t).
    pub fn momentum(&self, x: f64, v: f64, t: f64) -> Result<f64> {
        self.quad(x, v, t, |_| 1.0)
    }

    /// Stiffness L_vv(x, v, t) = G(x − vt, v).
    pub fn stiffness(&self, x: f64, v: f64, t: f64) -> Result<f64> {
        self.kernel.kernel(x - v * t, v)
    }

    /// Legendre transform: returns (H(x, l, t), v*) where v* maximizes
    /// v·l − L(x, v, t), i.e. solves L_v(x, v*, t) = l.
    pub fn hamiltonian(&self, x: f64, l: f64, t: f64) -> Result<(f64, f64)> {
        self.hamiltonian_with_seed(x, l, t, None)
    }

    /// Newton refinement of the Legendre maximizer from a trusted velocity
    /// seed; returns None when the seed wanders so the caller can fall back.
    fn legendre_newton(&self, x: f64, l: f64, t: f64, seed: f64) -> Result<Option<f64>> {
        let ftol = LEGENDRE_REL * l;
        let mut v = seed;
        for _ in 0..12 {
            let r = self.momentum(x, v, t)? - l;
            if r.abs() <= ftol {
                return Ok(Some(v));
            }
            let next = v - r / self.stiffness(x, v, t)?;
            if !(next > 0.0) || (next - v).abs() > 0.5 * v {
                return Ok(None);
            }
            v = next;
        }
        Ok(None)
    }

    /// `hamiltonian` with an optional warm-start velocity for sweep callers.
    pub fn hamiltonian_with_seed(
        &self,
        x: f64,
        l: f64,
        t: f64,
        seed: Option<f64>,
    ) -> Result<(f64, f64)> {
        if l == 0.0 {
            return Ok((0.0, 0.0));
        }
        if !(l > 0.0) {
            return Err(Error::InversionFail { l });
        }
        if let Some(v0) = seed {
            if v0 > 0.0 {
                if let Some(v_star) = self.legendre_newton(x, l, t, v0)? {
                    let h = v_star * l - self.value(x, v_star, t)?;
                    return Ok((h, v_star));
                }
            }
        }
        // L_v grows like v²/2 near the diagonal, so the free-motion velocity
        // seeds the upper bracket end.
        let mut hi = (2.0 * l).sqrt();
        let mut guard = 0;
        while self.momentum(x, hi, t)? < l {
            hi *= 2.0;
            guard += 1;
            if guard > 60 {
                return Err(Error::InversionFail { l });
            }
        }
        let status: RefCell<Option<Error>> = RefCell::new(None);
        let f = |v: f64| -> (f64, f64) {
            let pair = self
                .momentum(x, v, t)
                .and_then(|m| Ok((m - l, self.stiffness(x, v, t)?)));
            match pair {
                Ok(p) => p,
                Err(e) => {
                    status.borrow_mut().get_or_insert(e);
                    (f64::NAN, f64::NAN)
                }
            }
        };
        let root = bracketed_newton(f, 0.0, hi, 0.0, LEGENDRE_REL * l, 200).map_err(
            |e| match e {
                RootError::NoBracket => Error::InversionFail { l },
                RootError::NoConvergence => Error::NoConvergence {
                    iters: 200,
                    residual: f64::NAN,
                },
            },
        );
        if let Some(e) = status.into_inner() {
            return Err(e);
        }
        let v_star = root?;
        let h = v_star * l - self.value(x, v_star, t)?;
        Ok((h, v_star))
    }
}

/// L, L_v and L_vv of the interpolating Lagrangian built directly from a
/// generating function.
pub fn lagrangian<G: GeneratingFn>(
    g: &G,
    x: f64,
    v: f64,
    t: f64,
) -> Result<(f64, f64, f64)> {
    let lag = InterpolatingLagrangian::new(g);
    Ok((
        lag.value(x, v, t)?,
        lag.momentum(x, v, t)?,
        lag.stiffness(x, v, t)?,
    ))
}

/// Conjugate momentum L_v(x, v, t) of the interpolating Lagrangian of `g`.
pub fn momentum<G: GeneratingFn>(g: &G, x: f64, v: f64, t: f64) -> Result<f64> {
    InterpolatingLagrangian::new(g).momentum(x, v, t)
}

/// Stiffness L_vv(x, v, t) = −∂₁₂h at the chord endpoints.
pub fn stiffness<G: GeneratingFn>(g: &G, x: f64, v: f64, t: f64) -> Result<f64> {
    InterpolatingLagrangian::new(g).stiffness(x, v, t)
}

/// Legendre transform of the interpolating Lagrangian of `g`: returns
/// (H(x, l, t), v*).
pub fn legendre_hamiltonian<G: GeneratingFn>(g: &G, x: f64, l: f64, t: f64) -> Result<(f64, f64)> {
    InterpolatingLagrangian::new(g).hamiltonian(x, l, t)
}

/// Action of the piecewise-linear path through `nodes` (uniform time steps
/// spanning [0, 1]), one midpoint-rule term per segment.
pub fn path_action<K: TwistKernel>(
    lag: &InterpolatingLagrangian<K>,
    nodes: &[f64],
) -> Result<f64> {
    let n = nodes.len() - 1;
    let dt = 1.0 / n as f64;
    let mut acc = 0.0;
    for k in 0..n {
        let v = (nodes[k + 1] - nodes[k]) / dt;
        let xm = 0.5 * (nodes[k] + nodes[k + 1]);
        let tm = (k as f64 + 0.5) * dt;
        acc += dt * lag.value(xm, v, tm)?;
    }
    Ok(acc)
}

/// Gradient of [`path_action`] with respect to the interior nodes, by central
/// differences (endpoints stay fixed).
pub fn path_action_gradient<K: TwistKernel>(
    lag: &InterpolatingLagrangian<K>,
    nodes: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    let mut grad = Vec::with_capacity(nodes.len().saturating_sub(2));
    let mut work = nodes.to_vec();
    for i in 1..nodes.len() - 1 {
        let saved = work[i];
        work[i] = saved + step;
        let plus = path_action(lag, &work)?;
        work[i] = saved - step;
        let minus = path_action(lag, &work)?;
        work[i] = saved;
        grad.push((plus - minus) / (2.0 * step));
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfn::PureCubic;

    const KINETIC: f64 = 2.0 * std::f64::consts::SQRT_2 / 3.0;

    #[test]
    fn cubic_kernel_gives_free_lagrangian() {
        let lag = InterpolatingLagrangian::new(PureCubic);
        for &t in &[0.0, 0.3, 1.0] {
            for &v in &[1e-4, 3e-3, 0.05] {
                let val = lag.value(0.37, v, t).unwrap();
                assert!((val - v * v * v / 6.0).abs() < 1e-12 * (v * v * v / 6.0));
                let mom = lag.momentum(0.37, v, t).unwrap();
                assert!((mom - 0.5 * v * v).abs() < 1e-12 * (0.5 * v * v));
                // The kernel works at (a, a + u), so u is quantized at ulp(a).
                let stiff = lag.stiffness(0.37, v, t).unwrap();
                assert!((stiff - v).abs() < 1e-12 * v + 2.0 * f64::EPSILON);
            }
        }
    }

    #[test]
    fn rest_state_has_zero_action_and_momentum() {
        let lag = InterpolatingLagrangian::new(PureCubic);
        assert_eq!(lag.value(0.2, 0.0, 0.5).unwrap(), 0.0);
        assert_eq!(lag.momentum(0.2, 0.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn cubic_legendre_transform_is_exact() {
        let lag = InterpolatingLagrangian::new(PureCubic);
        for &l in &[1e-8, 1e-5, 1e-3] {
            let (h, v) = lag.hamiltonian(0.1, l, 0.4).unwrap();
            let h_exact = KINETIC * l.powf(1.5);
            let v_exact = (2.0 * l).sqrt();
            assert!((h - h_exact).abs() < 1e-10 * h_exact, "l={l}");
            assert!((v - v_exact).abs() < 1e-10 * v_exact, "l={l}");
        }
    }

    #[test]
    fn negative_momentum_is_rejected() {
        let lag = InterpolatingLagrangian::new(PureCubic);
        assert!(matches!(
            lag.hamiltonian(0.0, -1e-4, 0.2),
            Err(Error::InversionFail { .. })
        ));
    }

    #[test]
    fn envelope_derivative_equals_velocity() {
        let lag = InterpolatingLagrangian::new(PureCubic);
        let l = 4e-4;
        let dl = 1e-9;
        let (hp, _) = lag.hamiltonian(0.3, l + dl, 0.7).unwrap();
        let (hm, _) = lag.hamiltonian(0.3, l - dl, 0.7).unwrap();
        let (_, v) = lag.hamiltonian(0.3, l, 0.7).unwrap();
        assert!(((hp - hm) / (2.0 * dl) - v).abs() < 1e-7 * v);
    }

    #[test]
    fn straight_path_action_recovers_generating_value() {
        let lag = InterpolatingLagrangian::new(PureCubic);
        let (x, v) = (0.25, 0.04);
        let nodes: Vec<f64> = (0..=50).map(|k| x + v * k as f64 / 50.0).collect();
        let action = path_action(&lag, &nodes).unwrap();
        let h = PureCubic.jet(x, x + v).unwrap().value;
        assert!((action - h).abs() < 1e-6 * h);
    }

    #[test]
    fn straight_path_is_a_discrete_minimizer() {
        let lag = InterpolatingLagrangian::new(PureCubic);
        let (x, v) = (0.0, 0.03);
        let nodes: Vec<f64> = (0..=50).map(|k| x + v * k as f64 / 50.0).collect();
        let base = path_action(&lag, &nodes).unwrap();
        let grad = path_action_gradient(&lag, &nodes, 1e-7).unwrap();
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        assert!(gmax < 1e-8, "stationarity defect {gmax}");
        // Any explicit detour raises the action.
        let mut bent = nodes.clone();
        for (k, b) in bent.iter_mut().enumerate() {
            let s = k as f64 / 50.0;
            *b += 1e-3 * (std::f64::consts::PI * s).sin();
        }
        let detour = path_action(&lag, &bent).unwrap();
        assert!(detour > base);
    }
}
